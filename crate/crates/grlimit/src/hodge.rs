//! Systems of Hodge bundles: graded split bundles with logarithmic maps one
//! step down the grading, parabolic slopes, the center-of-gravity invariants,
//! and the maximal-destabilizer search.
//!
//! # Search completeness for total rank at most three
//!
//! Every graded subobject may be assumed saturated level by level (saturating
//! each piece preserves invariance and never lowers the parabolic degree), so
//! candidate pieces at a level are strict subbundles of that level. For total
//! rank `<= 3` the level ranks are among `(r)`, `(1, 1)`, `(2, 1)`, `(1, 2)`
//! and `(1, 1, 1)`, and a case check shows each potentially maximal candidate
//! decomposes into independently optimal per-level pieces of these kinds:
//!
//! * lines inside the kernel of the outgoing map (standalone pieces),
//! * lines with no constraint (their image is absorbed by a full piece or by
//!   the saturation of the image one level down),
//! * the full level, the saturated image from above, the kernel of the
//!   outgoing map, and sums/intersections of those,
//! * rank-two subbundles of a rank-three level, found through the dual line
//!   search.
//!
//! Lines are enumerated by degree and by flag-incidence profile; for a fixed
//! degree and profile, existence is a rational linear-solvability question,
//! and the best value over solvable classes equals the best parabolic degree
//! over actual line subbundles, because saturating a degenerate solution
//! trades each lost weight (less than one) for at least one unit of degree.
//! Assemblies of one optional piece per level are filtered by exact
//! invariance checks, so the reported maximum is sound; completeness beyond
//! rank three is not claimed and needs the explicit heuristic override.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::bundle::{
    kernel_subbundle, kernel_subbundle_of_matrix, par_degree, par_degree_full,
    quotient, saturate_span, BundleMap, FlagStep, ParabolicData, PointFlag, SplitBundle,
    Subbundle,
};
use crate::exactalg::ratlin::{self, RatMat};
use crate::exactalg::{Poly, PolyMatrix, Rat};
use crate::{Error, Result};

pub mod oracle;

/// One graded level: a split bundle with the parabolic flags induced on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Level {
    pub bundle: SplitBundle,
    pub flags: ParabolicData,
}

impl Level {
    pub fn new(bundle: SplitBundle, flags: ParabolicData) -> Result<Self> {
        flags.validate(bundle.rank(), true)?;
        Ok(Level { bundle, flags })
    }

    pub fn par_degree(&self) -> Rat {
        par_degree_full(&self.bundle, &self.flags)
    }
}

/// Graded split bundle `E = (+)_p E^p` with maps `theta_p : E^p -> E^{p-1}`
/// twisted by `O(k - 2)` for `k` marked points. Only adjacent maps exist, so
/// composing two of them is zero by construction.
#[derive(Clone, Debug)]
pub struct HodgeSystem {
    marked_points: Vec<Rat>,
    levels: BTreeMap<i64, Level>,
    theta: BTreeMap<i64, BundleMap>,
}

impl HodgeSystem {
    pub fn new(
        marked_points: Vec<Rat>,
        levels: BTreeMap<i64, Level>,
        theta: BTreeMap<i64, BundleMap>,
    ) -> Result<Self> {
        for (i, a) in marked_points.iter().enumerate() {
            for b in marked_points.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::InvalidInput(format!("repeated marked point {a}")));
                }
            }
        }
        let twist = marked_points.len() as i64 - 2;
        for (p, level) in &levels {
            if level.bundle.rank() == 0 {
                return Err(Error::InvalidInput(format!("level {p} has rank zero")));
            }
            let flag_points = level.flags.points();
            if flag_points != marked_points {
                return Err(Error::InvalidInput(format!(
                    "level {p} flags do not match the marked points"
                )));
            }
        }
        for (p, map) in &theta {
            let (Some(src), Some(tgt)) = (levels.get(p), levels.get(&(p - 1))) else {
                return Err(Error::InvalidInput(format!(
                    "theta at level {p} without both adjacent levels"
                )));
            };
            if map.twist != twist {
                return Err(Error::InvalidInput(format!(
                    "theta at level {p} has twist {} instead of {twist}",
                    map.twist
                )));
            }
            if map.source != src.bundle || map.target != tgt.bundle {
                return Err(Error::InvalidInput(format!(
                    "theta at level {p} does not match its levels"
                )));
            }
        }
        Ok(HodgeSystem {
            marked_points,
            levels,
            theta,
        })
    }

    pub fn marked_points(&self) -> &[Rat] {
        &self.marked_points
    }

    pub fn twist(&self) -> i64 {
        self.marked_points.len() as i64 - 2
    }

    pub fn levels(&self) -> &BTreeMap<i64, Level> {
        &self.levels
    }

    pub fn level(&self, p: i64) -> Option<&Level> {
        self.levels.get(&p)
    }

    pub fn theta(&self, p: i64) -> Option<&BundleMap> {
        self.theta.get(&p)
    }

    pub fn rank(&self) -> usize {
        self.levels.values().map(|l| l.bundle.rank()).sum()
    }

    pub fn degree(&self) -> i64 {
        self.levels.values().map(|l| l.bundle.degree()).sum()
    }

    pub fn par_degree(&self) -> Rat {
        self.levels.values().map(Level::par_degree).sum()
    }

    pub fn min_level(&self) -> Option<i64> {
        self.levels.keys().next().copied()
    }

    pub fn max_level(&self) -> Option<i64> {
        self.levels.keys().next_back().copied()
    }

    /// Whether the nonzero levels form a contiguous integer interval.
    pub fn is_contiguous(&self) -> bool {
        match (self.min_level(), self.max_level()) {
            (Some(lo), Some(hi)) => (lo..=hi).all(|p| self.levels.contains_key(&p)),
            _ => true,
        }
    }
}

/// Serialized form of a graded system: levels with splitting degrees and
/// flags, and the maps between adjacent level pairs.
#[derive(serde::Serialize, serde::Deserialize)]
struct HodgeSchema {
    points: Vec<Rat>,
    levels: Vec<LevelSchema>,
    theta: Vec<ThetaSchema>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct LevelSchema {
    p: i64,
    degrees: Vec<i64>,
    flags: Vec<PointFlag>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct ThetaSchema {
    p: i64,
    matrix: PolyMatrix,
}

impl Serialize for HodgeSystem {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let schema = HodgeSchema {
            points: self.marked_points.clone(),
            levels: self
                .levels
                .iter()
                .map(|(p, l)| LevelSchema {
                    p: *p,
                    degrees: l.bundle.degrees().to_vec(),
                    flags: l.flags.flags.clone(),
                })
                .collect(),
            theta: self
                .theta
                .iter()
                .map(|(p, m)| ThetaSchema {
                    p: *p,
                    matrix: m.matrix.clone(),
                })
                .collect(),
        };
        schema.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for HodgeSystem {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let schema = HodgeSchema::deserialize(deserializer)?;
        let twist = schema.points.len() as i64 - 2;
        let mut levels = BTreeMap::new();
        for l in &schema.levels {
            let bundle = SplitBundle::new(l.degrees.clone());
            let level = Level::new(
                bundle,
                ParabolicData {
                    flags: l.flags.clone(),
                },
            )
            .map_err(serde::de::Error::custom)?;
            levels.insert(l.p, level);
        }
        let mut theta = BTreeMap::new();
        for t in &schema.theta {
            let (Some(src), Some(tgt)) = (levels.get(&t.p), levels.get(&(t.p - 1))) else {
                return Err(serde::de::Error::custom(format!(
                    "theta at level {} without both adjacent levels",
                    t.p
                )));
            };
            let map = BundleMap::new(
                src.bundle.clone(),
                tgt.bundle.clone(),
                twist,
                t.matrix.clone(),
            )
            .map_err(serde::de::Error::custom)?;
            theta.insert(t.p, map);
        }
        HodgeSystem::new(schema.points, levels, theta).map_err(serde::de::Error::custom)
    }
}

/// Rank-weighted average of the Hodge levels.
pub fn zeta(e: &HodgeSystem) -> Result<Rat> {
    let rank = e.rank();
    if rank == 0 {
        return Err(Error::InvalidInput("zeta of a rank-zero system".into()));
    }
    let num: Rat = e
        .levels
        .iter()
        .map(|(p, l)| Rat::from_int(p * l.bundle.rank() as i64))
        .sum();
    Ok(num / Rat::from_int(rank as i64))
}

/// Relabel all levels up by `k`, carrying the maps along.
pub fn shift(e: &HodgeSystem, k: i64) -> HodgeSystem {
    HodgeSystem {
        marked_points: e.marked_points.clone(),
        levels: e.levels.iter().map(|(p, l)| (p + k, l.clone())).collect(),
        theta: e.theta.iter().map(|(p, m)| (p + k, m.clone())).collect(),
    }
}

/// Parabolic slope of the whole system.
pub fn par_slope(e: &HodgeSystem) -> Result<Rat> {
    let rank = e.rank();
    if rank == 0 {
        return Err(Error::InvalidInput("slope of a rank-zero system".into()));
    }
    Ok(e.par_degree() / Rat::from_int(rank as i64))
}

/// Graded subobject: a strict subbundle of each level, zero pieces omitted.
#[derive(Clone, Debug)]
pub struct GradedSub {
    pieces: BTreeMap<i64, Subbundle>,
}

impl GradedSub {
    pub fn new(pieces: BTreeMap<i64, Subbundle>) -> Self {
        GradedSub {
            pieces: pieces.into_iter().filter(|(_, s)| !s.is_zero()).collect(),
        }
    }

    pub fn empty() -> Self {
        GradedSub {
            pieces: BTreeMap::new(),
        }
    }

    pub fn pieces(&self) -> &BTreeMap<i64, Subbundle> {
        &self.pieces
    }

    pub fn piece(&self, p: i64) -> Option<&Subbundle> {
        self.pieces.get(&p)
    }

    pub fn rank(&self) -> usize {
        self.pieces.values().map(Subbundle::rank).sum()
    }

    pub fn degree(&self) -> i64 {
        self.pieces.values().map(Subbundle::degree).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn shift(&self, k: i64) -> GradedSub {
        GradedSub {
            pieces: self.pieces.iter().map(|(p, s)| (p + k, s.clone())).collect(),
        }
    }

    pub fn par_degree(&self, e: &HodgeSystem) -> Rat {
        self.pieces
            .iter()
            .map(|(p, s)| {
                let level = e.level(*p).expect("piece at an existing level");
                par_degree(s, &level.flags)
            })
            .sum()
    }

    pub fn par_slope(&self, e: &HodgeSystem) -> Result<Rat> {
        let rank = self.rank();
        if rank == 0 {
            return Err(Error::InvalidInput("slope of an empty graded sub".into()));
        }
        Ok(self.par_degree(e) / Rat::from_int(rank as i64))
    }

    /// Per-level ranks listed from the highest level of the ambient system
    /// down; the deterministic tie-break minimizes this lexicographically.
    pub fn level_vector(&self, e: &HodgeSystem) -> Vec<usize> {
        let (Some(lo), Some(hi)) = (e.min_level(), e.max_level()) else {
            return Vec::new();
        };
        (lo..=hi)
            .rev()
            .map(|p| self.piece(p).map_or(0, Subbundle::rank))
            .collect()
    }

    pub fn canonical_key(&self) -> String {
        let mut s = String::new();
        for (p, piece) in &self.pieces {
            s.push_str(&format!("{p}:{};", piece.canonical_key()));
        }
        s
    }

    /// Exact invariance: at every level the composite of the inclusion, the
    /// downward map, and the projection modulo the piece below vanishes.
    pub fn check_invariance(&self, e: &HodgeSystem) -> Result<bool> {
        for (p, piece) in &self.pieces {
            let Some(theta) = e.theta(*p) else { continue };
            let image = theta.matrix.mul(piece.matrix());
            if image.is_zero() {
                continue;
            }
            let below = self
                .pieces
                .get(&(p - 1))
                .cloned()
                .unwrap_or_else(|| Subbundle::zero(&theta.target));
            let (_, proj) = quotient(&below)?;
            if !proj.matrix.mul(&image).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Invariants of one destabilizing step: slope and rank of the maximal
/// destabilizer and the centered gap `zeta(E/H) - zeta(H)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HNInvariants {
    pub beta: Rat,
    pub rho: usize,
    pub gamma: Rat,
}

/// Invariants of the destabilizer `h` inside `e`, recomputed by definition.
pub fn hn_step_invariants(e: &HodgeSystem, h: &GradedSub) -> Result<HNInvariants> {
    let rho = h.rank();
    if rho == 0 || rho >= e.rank() {
        return Err(Error::InvalidInput(
            "invariants need a proper nonzero graded sub".into(),
        ));
    }
    let beta = h.par_slope(e)?;
    let zeta_sub = {
        let num: Rat = h
            .pieces
            .iter()
            .map(|(p, s)| Rat::from_int(p * s.rank() as i64))
            .sum();
        num / Rat::from_int(rho as i64)
    };
    let quot_rank = e.rank() - rho;
    let zeta_quot = {
        let num: Rat = e
            .levels
            .iter()
            .map(|(p, l)| {
                let hr = h.piece(*p).map_or(0, Subbundle::rank);
                Rat::from_int(p * (l.bundle.rank() - hr) as i64)
            })
            .sum();
        num / Rat::from_int(quot_rank as i64)
    };
    Ok(HNInvariants {
        beta,
        rho,
        gamma: zeta_quot - zeta_sub,
    })
}

/// Search configuration.
#[derive(Clone, Debug, Default)]
pub struct SearchConfig {
    /// Run the candidate families on ranks above three without the
    /// completeness claim.
    pub heuristic_rank_override: bool,
    /// Permutes the candidate exploration order; the result is invariant.
    pub exploration_seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub family: &'static str,
    pub candidates: usize,
    pub best_slope: Option<Rat>,
}

/// Semistability certificate: the system slope, the enumerated candidate
/// families with their best slopes, and whether the search was heuristic.
#[derive(Clone, Debug, Serialize)]
pub struct SemistabilityCertificate {
    pub slope: Rat,
    pub families: Vec<FamilyReport>,
    pub heuristic: bool,
}

/// Outcome of a destabilizer search.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub destabilizer: Option<(GradedSub, HNInvariants)>,
    pub certificate: SemistabilityCertificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    StrictlySemistable,
    Unstable,
}

struct Candidate {
    sub: GradedSub,
    slope: Rat,
    family: &'static str,
}

/// Maximal destabilizing graded subobject, or a semistability certificate.
///
/// Ties in slope break toward maximal rank, then the lexicographically
/// smallest level vector (ranks listed from the top level down), then the
/// canonical serialization; the result does not depend on the exploration
/// order.
pub fn max_destabilizer(e: &HodgeSystem, cfg: &SearchConfig) -> Result<SearchResult> {
    let rank = e.rank();
    if rank == 0 {
        return Err(Error::InvalidInput("empty system".into()));
    }
    if rank > 3 && !cfg.heuristic_rank_override {
        return Err(Error::UnsupportedRank(rank));
    }
    let mu = par_slope(e)?;
    let mut candidates = collect_candidates(e)?;
    if let Some(seed) = cfg.exploration_seed {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        candidates.shuffle(&mut rng);
    }

    let mut families: BTreeMap<&'static str, (usize, Option<Rat>)> = BTreeMap::new();
    for c in &candidates {
        let entry = families.entry(c.family).or_insert((0, None));
        entry.0 += 1;
        if entry.1.as_ref().is_none_or(|b| &c.slope > b) {
            entry.1 = Some(c.slope.clone());
        }
    }
    let certificate = |heuristic: bool| SemistabilityCertificate {
        slope: mu.clone(),
        families: families
            .iter()
            .map(|(family, (candidates, best_slope))| FamilyReport {
                family,
                candidates: *candidates,
                best_slope: best_slope.clone(),
            })
            .collect(),
        heuristic,
    };

    let mut best: Option<Candidate> = None;
    for c in candidates.iter().filter(|c| c.slope > mu) {
        let better = match &best {
            None => true,
            Some(b) => {
                use std::cmp::Ordering::*;
                match c.slope.cmp(&b.slope) {
                    Greater => true,
                    Less => false,
                    Equal => match c.sub.rank().cmp(&b.sub.rank()) {
                        Greater => true,
                        Less => false,
                        Equal => match c.sub.level_vector(e).cmp(&b.sub.level_vector(e)) {
                            Less => true,
                            Greater => false,
                            Equal => c.sub.canonical_key() < b.sub.canonical_key(),
                        },
                    },
                }
            }
        };
        if better {
            best = Some(Candidate {
                sub: c.sub.clone(),
                slope: c.slope.clone(),
                family: c.family,
            });
        }
    }

    let heuristic = rank > 3;
    match best {
        None => Ok(SearchResult {
            destabilizer: None,
            certificate: certificate(heuristic),
        }),
        Some(c) => {
            // soundness gates: invariance and strict slope increase were
            // already enforced during collection; re-derive the invariants
            let inv = hn_step_invariants(e, &c.sub)?;
            if inv.beta <= mu {
                return Err(Error::Certification(
                    "destabilizer slope does not exceed the system slope".into(),
                ));
            }
            Ok(SearchResult {
                destabilizer: Some((c.sub, inv)),
                certificate: certificate(heuristic),
            })
        }
    }
}

/// Semistability: no proper graded subobject of strictly larger slope among
/// the enumerated families.
pub fn is_semistable(e: &HodgeSystem, cfg: &SearchConfig) -> Result<(bool, SemistabilityCertificate)> {
    let res = max_destabilizer(e, cfg)?;
    Ok((res.destabilizer.is_none(), res.certificate))
}

/// Three-way stability classification.
pub fn stability(e: &HodgeSystem, cfg: &SearchConfig) -> Result<Stability> {
    let res = max_destabilizer(e, cfg)?;
    if res.destabilizer.is_some() {
        return Ok(Stability::Unstable);
    }
    let tie = res
        .certificate
        .families
        .iter()
        .filter_map(|f| f.best_slope.as_ref())
        .any(|s| s == &res.certificate.slope);
    Ok(if tie {
        Stability::StrictlySemistable
    } else {
        Stability::Stable
    })
}

fn collect_candidates(e: &HodgeSystem) -> Result<Vec<Candidate>> {
    let rank = e.rank();
    // per-level atom lists
    let mut atoms: BTreeMap<i64, Vec<Subbundle>> = BTreeMap::new();
    for (&p, level) in e.levels() {
        let mut list: Vec<Subbundle> = Vec::new();
        let push = |list: &mut Vec<Subbundle>, s: Subbundle| {
            if s.is_zero() {
                return;
            }
            if !list.iter().any(|t| t.canonical_key() == s.canonical_key()) {
                list.push(s);
            }
        };
        push(&mut list, Subbundle::full(&level.bundle));
        let outgoing = e.theta(p);
        let ker = outgoing.map(kernel_subbundle);
        if let Some(k) = &ker {
            push(&mut list, k.clone());
        }
        let im = e
            .theta(p + 1)
            .map(|th| saturate_span(&th.matrix, &level.bundle))
            .transpose()?;
        if let Some(i) = &im {
            push(&mut list, i.clone());
            if let Some(k) = &ker {
                // intersection and saturated sum of image and kernel
                push(&mut list, intersect_subbundles(i, k)?);
                let joined = i.matrix().hstack(k.matrix());
                push(&mut list, saturate_span(&joined, &level.bundle)?);
            }
        }
        // lines constrained to the kernel (standalone pieces) and
        // unconstrained lines (pieces whose image is absorbed below)
        for line in line_candidates(level, ker.as_ref())? {
            push(&mut list, line);
        }
        if ker.is_some() {
            for line in line_candidates(level, None)? {
                push(&mut list, line);
            }
        }
        if level.bundle.rank() == 3 {
            for plane in plane_candidates(level)? {
                push(&mut list, plane);
            }
        }
        atoms.insert(p, list);
    }

    // assemble one optional piece per level, pruning by exact invariance of
    // each adjacent pair as the levels descend
    let level_keys: Vec<i64> = e.levels().keys().rev().copied().collect();
    let mut stack: Vec<(usize, BTreeMap<i64, Subbundle>, usize)> = vec![(0, BTreeMap::new(), 0)];
    let mut out: Vec<Candidate> = Vec::new();
    while let Some((idx, chosen, total_rank)) = stack.pop() {
        if idx == level_keys.len() {
            if total_rank == 0 || total_rank >= rank {
                continue;
            }
            let sub = GradedSub::new(chosen);
            if !sub.check_invariance(e)? {
                continue;
            }
            let slope = sub.par_slope(e)?;
            let family = classify_family(&sub);
            out.push(Candidate { sub, slope, family });
            continue;
        }
        let p = level_keys[idx];
        // option: no piece at this level
        stack.push((idx + 1, chosen.clone(), total_rank));
        for atom in &atoms[&p] {
            let new_rank = total_rank + atom.rank();
            if new_rank >= rank {
                continue;
            }
            // incremental invariance against the piece chosen one level up
            if let Some(above) = chosen.get(&(p + 1)) {
                if let Some(theta) = e.theta(p + 1) {
                    let image = theta.matrix.mul(above.matrix());
                    if !image.is_zero() {
                        let (_, proj) = quotient(atom)?;
                        if !proj.matrix.mul(&image).is_zero() {
                            continue;
                        }
                    }
                }
            }
            let mut next = chosen.clone();
            next.insert(p, atom.clone());
            stack.push((idx + 1, next, new_rank));
        }
    }
    Ok(out)
}

fn classify_family(sub: &GradedSub) -> &'static str {
    let levels = sub.pieces().len();
    let rank = sub.rank();
    match (levels, rank) {
        (1, 1) => "A:line",
        (1, _) => "C:single-level",
        (2, 2) => "B:two-level",
        _ => "D:assembly",
    }
}

/// Intersection of two strict subbundles of the same bundle.
fn intersect_subbundles(a: &Subbundle, b: &Subbundle) -> Result<Subbundle> {
    assert_eq!(a.target(), b.target());
    if a.is_zero() || b.is_zero() {
        return Ok(Subbundle::zero(a.target()));
    }
    let (_, proj_a) = quotient(a)?;
    let (_, proj_b) = quotient(b)?;
    let stacked = proj_a.matrix.vstack(&proj_b.matrix);
    Ok(kernel_subbundle_of_matrix(&stacked, a.target()))
}

/// All lines found by the degree-and-incidence-profile search inside the
/// given level, optionally constrained to a subbundle of it. Deterministic
/// and deduplicated.
fn line_candidates(level: &Level, constraint: Option<&Subbundle>) -> Result<Vec<Subbundle>> {
    let ambient = level.bundle.rank();
    let constraint_full = Subbundle::full(&level.bundle);
    let region = constraint.unwrap_or(&constraint_full);
    if region.rank() == 0 {
        return Ok(Vec::new());
    }
    let search = LineSearchSpace {
        ambient_rank: ambient,
        region,
        flags: &level.flags,
    };
    let mut out: Vec<Subbundle> = Vec::new();
    for column in search.solve_all() {
        let line = saturate_span(&column, &level.bundle)?;
        debug_assert_eq!(line.rank(), 1);
        if !out
            .iter()
            .any(|l| l.canonical_key() == line.canonical_key())
        {
            out.push(line);
        }
    }
    Ok(out)
}

struct LineSearchSpace<'a> {
    ambient_rank: usize,
    region: &'a Subbundle,
    flags: &'a ParabolicData,
}

impl LineSearchSpace<'_> {
    /// One representative polynomial column (ambient coordinates) per
    /// solvable degree-and-profile class.
    fn solve_all(&self) -> Vec<PolyMatrix> {
        let degs = self.region.source().degrees();
        let Some(&cmax) = degs.first() else {
            return Vec::new();
        };
        let npoints = self.flags.flags.len() as i64;
        let dmin = cmax - npoints;
        // per-point proper cumulative spans with their annihilators
        let mut conditions: Vec<(Rat, Vec<Vec<Vec<Rat>>>)> = Vec::new();
        for flag in &self.flags.flags {
            let spans = flag.cumulative_spans();
            let mut anns = Vec::new();
            for span in spans.iter().take(spans.len().saturating_sub(1)) {
                anns.push(ratlin::annihilator(span, self.ambient_rank));
            }
            conditions.push((flag.point.clone(), anns));
        }
        let mut out = Vec::new();
        for d in (dmin..=cmax).rev() {
            let widths: Vec<usize> = degs
                .iter()
                .map(|&c| usize::try_from(c - d + 1).unwrap_or(0))
                .collect();
            let nvars: usize = widths.iter().sum();
            if nvars == 0 {
                continue;
            }
            // evaluated region columns per point, reused across profiles
            let evals: Vec<(Rat, RatMat)> = conditions
                .iter()
                .map(|(x, _)| (x.clone(), self.region.matrix().eval(x)))
                .collect();
            let mut profile = vec![0usize; conditions.len()];
            loop {
                if let Some(v) = self.solve_profile(&widths, nvars, &conditions, &evals, &profile) {
                    out.push(v);
                }
                // advance the mixed-radix profile counter
                let mut i = 0;
                loop {
                    if i == profile.len() {
                        break;
                    }
                    let radix = conditions[i].1.len() + 1;
                    profile[i] += 1;
                    if profile[i] < radix {
                        break;
                    }
                    profile[i] = 0;
                    i += 1;
                }
                if profile.iter().all(|&x| x == 0) {
                    break;
                }
                if conditions.is_empty() {
                    break;
                }
            }
        }
        out
    }

    fn solve_profile(
        &self,
        widths: &[usize],
        nvars: usize,
        conditions: &[(Rat, Vec<Vec<Vec<Rat>>>)],
        evals: &[(Rat, RatMat)],
        profile: &[usize],
    ) -> Option<PolyMatrix> {
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for (pi, &choice) in profile.iter().enumerate() {
            if choice == 0 {
                continue;
            }
            let ann = &conditions[pi].1[choice - 1];
            let (x, ev) = &evals[pi];
            for functional in ann {
                // functional . (sum_l sum_e coeff_{l,e} x^e region_col_l)
                let mut row = Vec::with_capacity(nvars);
                for (l, &w) in widths.iter().enumerate() {
                    let dot: Rat = (0..self.ambient_rank)
                        .map(|i| &functional[i] * &ev[(i, l)])
                        .sum();
                    let mut xe = Rat::one();
                    for _ in 0..w {
                        row.push(&dot * &xe);
                        xe = &xe * x;
                    }
                }
                rows.push(row);
            }
        }
        let solution = if rows.is_empty() {
            let mut v = vec![Rat::zero(); nvars];
            v[0] = Rat::one();
            v
        } else {
            RatMat::from_rows(rows).kernel_basis().into_iter().next()?
        };
        // assemble the polynomial column in region coordinates, then map to
        // ambient coordinates
        let mut region_col = Vec::with_capacity(widths.len());
        let mut offset = 0usize;
        for &w in widths {
            let coeffs = solution[offset..offset + w].to_vec();
            region_col.push(Poly::from_coeffs(coeffs));
            offset += w;
        }
        let v = PolyMatrix::from_cols(vec![region_col]);
        let ambient_col = self.region.matrix().mul(&v);
        if ambient_col.is_zero() {
            return None;
        }
        Some(ambient_col)
    }
}

/// Rank-two subbundles of a rank-three level through the dual line search:
/// planes correspond to lines in the dual bundle, with reversed coordinates,
/// orthogonal-complement flags and negated weights.
fn plane_candidates(level: &Level) -> Result<Vec<Subbundle>> {
    let r = level.bundle.rank();
    assert_eq!(r, 3);
    let rev_dual_degrees: Vec<i64> = level.bundle.degrees().iter().rev().map(|d| -d).collect();
    let dual_bundle = SplitBundle::new(rev_dual_degrees.clone());
    debug_assert_eq!(dual_bundle.degrees(), &rev_dual_degrees[..]);
    let mut dual_flags = Vec::new();
    for flag in &level.flags.flags {
        let spans = flag.cumulative_spans();
        let s = flag.steps.len();
        let mut steps = Vec::new();
        for i in 1..=s {
            // dual step i: annihilator of the span with s - i original steps
            let orig = s - i;
            let span: Vec<Vec<Rat>> = if orig == 0 {
                Vec::new()
            } else {
                spans[orig - 1].clone()
            };
            let ann = ratlin::annihilator(&span, r);
            // reverse coordinates to match the reversed dual splitting
            let ann_rev: Vec<Vec<Rat>> = ann
                .into_iter()
                .map(|f| f.into_iter().rev().collect())
                .collect();
            let mut added = Vec::new();
            let mut current: Vec<Vec<Rat>> = steps
                .iter()
                .flat_map(|st: &FlagStep| st.vectors.iter().cloned())
                .collect();
            for f in ann_rev {
                let mut trial = current.clone();
                trial.push(f.clone());
                if ratlin::span_dim(&trial, r) > current.len() {
                    current.push(f.clone());
                    added.push(f);
                }
            }
            let weight = -&flag.steps[s - i].weight;
            if !added.is_empty() {
                steps.push(FlagStep {
                    weight,
                    vectors: added,
                });
            }
        }
        dual_flags.push(PointFlag {
            point: flag.point.clone(),
            steps,
        });
    }
    let dual_pd = ParabolicData { flags: dual_flags };
    dual_pd.validate(r, false)?;
    let dual_level = Level {
        bundle: dual_bundle.clone(),
        flags: dual_pd,
    };
    let space = LineSearchSpace {
        ambient_rank: r,
        region: &Subbundle::full(&dual_bundle),
        flags: &dual_level.flags,
    };
    let mut out: Vec<Subbundle> = Vec::new();
    for dual_col in space.solve_all() {
        // a dual line is a functional row on the original coordinates after
        // undoing the reversal; its kernel is the plane
        let row: Vec<Poly> = (0..r).map(|i| dual_col[(r - 1 - i, 0)].clone()).collect();
        let rowmat = PolyMatrix::from_rows(vec![row]);
        let plane = kernel_subbundle_of_matrix(&rowmat, &level.bundle);
        if plane.rank() == 2
            && !out
                .iter()
                .any(|p| p.canonical_key() == plane.canonical_key())
        {
            out.push(plane);
        }
    }
    Ok(out)
}
