//! Stratum signatures of limiting systems, oper detection, Kostov
//! genericity, hyperplane arrangements in weight space, and empirical
//! chamber-constancy scans.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::connection::{iterate_to_partial_oper, FuchsianSystem, IterateConfig};
use crate::hodge::{is_semistable, HodgeSystem, SearchConfig};
use crate::{Error, Rat, Result};

/// One graded level of a signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureLevel {
    pub p: i64,
    pub rank: usize,
    pub degree: i64,
    pub pardeg: Rat,
}

/// Shift-normalized Hodge type of a limiting system: per-level data with the
/// lowest nonzero level at zero, plus the oper and trivial-filtration flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumSignature {
    pub levels: Vec<SignatureLevel>,
    pub is_oper: bool,
    pub is_trivial_filtration: bool,
}

impl StratumSignature {
    /// The discrete part `(level, rank, degree)`, constant on weight
    /// chambers; parabolic degrees vary continuously with the weights.
    pub fn hodge_type(&self) -> Vec<(i64, usize, i64)> {
        self.levels
            .iter()
            .map(|l| (l.p, l.rank, l.degree))
            .collect()
    }
}

/// Normalized signature of a semistable graded system.
pub fn classify_signature(e: &HodgeSystem, cfg: &SearchConfig) -> Result<StratumSignature> {
    let (semistable, _) = is_semistable(e, cfg)?;
    if !semistable {
        return Err(Error::InvalidInput(
            "signatures classify semistable systems only".into(),
        ));
    }
    let base = e
        .min_level()
        .ok_or_else(|| Error::InvalidInput("empty system has no signature".into()))?;
    let levels = e
        .levels()
        .iter()
        .map(|(p, level)| SignatureLevel {
            p: p - base,
            rank: level.bundle.rank(),
            degree: level.bundle.degree(),
            pardeg: level.par_degree(),
        })
        .collect::<Vec<_>>();
    let trivial = levels.len() == 1;
    Ok(StratumSignature {
        is_oper: is_oper(e),
        is_trivial_filtration: trivial,
        levels,
    })
}

/// Full-flag oper test: every level is a line bundle and every adjacent map
/// is an isomorphism of line bundles, meaning the degree bound is exactly
/// zero and the single entry is a nonzero constant.
pub fn is_oper(e: &HodgeSystem) -> bool {
    if e.levels().is_empty() || !e.is_contiguous() {
        return false;
    }
    if e.levels().values().any(|l| l.bundle.rank() != 1) {
        return false;
    }
    let (lo, hi) = (e.min_level().unwrap(), e.max_level().unwrap());
    for p in lo + 1..=hi {
        let Some(theta) = e.theta(p) else { return false };
        if theta.bound(0, 0) != 0 {
            return false;
        }
        if theta.matrix[(0, 0)].degree() != Some(0) {
            return false;
        }
    }
    true
}

/// Kostov genericity on residue exponents: no subcollection of `0 < r' < r`
/// eigenvalues at each point has an integral grand total.
pub fn kostov_check(eigen: &[Vec<Rat>]) -> Result<bool> {
    let Some(first) = eigen.first() else {
        return Ok(true);
    };
    let r = first.len();
    if r == 0 || eigen.iter().any(|e| e.len() != r) {
        return Err(Error::InvalidInput(
            "each point must carry the same positive number of eigenvalues".into(),
        ));
    }
    let total: Rat = eigen.iter().flatten().cloned().sum();
    if !total.is_zero() {
        return Err(Error::InvalidInput(
            "eigenvalues must sum to zero overall".into(),
        ));
    }
    for take in 1..r {
        let per_point: Vec<Vec<Rat>> = eigen
            .iter()
            .map(|vals| {
                let mut sums = Vec::new();
                subset_sums(vals, take, 0, Rat::zero(), &mut sums);
                sums.sort();
                sums.dedup();
                sums
            })
            .collect();
        let mut totals = vec![Rat::zero()];
        for sums in &per_point {
            let mut next = Vec::with_capacity(totals.len() * sums.len());
            for t in &totals {
                for s in sums {
                    next.push(t + s);
                }
            }
            next.sort();
            next.dedup();
            totals = next;
        }
        if totals.iter().any(Rat::is_integer) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn subset_sums(vals: &[Rat], take: usize, from: usize, acc: Rat, out: &mut Vec<Rat>) {
    if take == 0 {
        out.push(acc);
        return;
    }
    for i in from..vals.len() {
        if vals.len() - i < take {
            break;
        }
        subset_sums(vals, take - 1, i + 1, &acc + &vals[i], out);
    }
}

/// Affine expression `coeffs . x + constant` in the weight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineExpr {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl AffineExpr {
    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut v = self.constant.clone();
        for (c, xi) in self.coeffs.iter().zip(x) {
            v += &(c * xi);
        }
        v
    }

    fn range_over_box(&self, lo: &[Rat], hi: &[Rat]) -> (Rat, Rat) {
        let mut min = self.constant.clone();
        let mut max = self.constant.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_negative() {
                min += &(c * &hi[i]);
                max += &(c * &lo[i]);
            } else {
                min += &(c * &lo[i]);
                max += &(c * &hi[i]);
            }
        }
        (min, max)
    }
}

/// Ambient weight coordinates with per-point eigenvalue expressions and an
/// admissible box.
#[derive(Clone, Debug, Serialize)]
pub struct WallSpace {
    pub dim: usize,
    pub point_exprs: Vec<Vec<AffineExpr>>,
    pub box_lo: Vec<Rat>,
    pub box_hi: Vec<Rat>,
}

impl WallSpace {
    /// Traceless rank-two parameterization: one coordinate per point with
    /// eigenvalues `(a_i, -a_i)`.
    pub fn traceless_rank2(points: usize, lo: Rat, hi: Rat) -> Self {
        let dim = points;
        let point_exprs = (0..points)
            .map(|i| {
                let mut plus = vec![Rat::zero(); dim];
                plus[i] = Rat::one();
                let mut minus = vec![Rat::zero(); dim];
                minus[i] = -Rat::one();
                vec![
                    AffineExpr {
                        coeffs: plus,
                        constant: Rat::zero(),
                    },
                    AffineExpr {
                        coeffs: minus,
                        constant: Rat::zero(),
                    },
                ]
            })
            .collect();
        WallSpace {
            dim,
            point_exprs,
            box_lo: vec![lo; points],
            box_hi: vec![hi; points],
        }
    }

    pub fn rank(&self) -> usize {
        self.point_exprs.first().map_or(0, Vec::len)
    }

    pub fn eigenvalues_at(&self, x: &[Rat]) -> Vec<Vec<Rat>> {
        self.point_exprs
            .iter()
            .map(|exprs| exprs.iter().map(|e| e.eval(x)).collect())
            .collect()
    }
}

/// Single wall `normal . x = offset` with a human-readable selection label.
/// An all-zero normal marks a degenerate wall containing the whole box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Wall {
    pub normal: Vec<Rat>,
    pub offset: Rat,
    pub pattern: String,
}

impl Wall {
    pub fn residual(&self, x: &[Rat]) -> Rat {
        let mut v = -&self.offset;
        for (c, xi) in self.normal.iter().zip(x) {
            v += &(c * xi);
        }
        v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WallArrangement {
    pub space: WallSpace,
    pub walls: Vec<Wall>,
}

/// Which hyperplane family to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallMode {
    /// Selection patterns of `r'` eigenvalues per point against integer
    /// offsets: the non-generic locus.
    Kostov,
    /// All slope-comparison boundaries of the rank-two line search:
    /// per-coordinate coefficients up to two in absolute value against
    /// half-integer offsets. Limit types are constant on these chambers.
    Decision,
}

/// Enumerate the walls of the chosen family meeting the admissible box,
/// deduplicated up to sign. Guarded to small rank and point count.
pub fn enumerate_walls(
    space: &WallSpace,
    mode: WallMode,
    override_guard: bool,
) -> Result<WallArrangement> {
    let r = space.rank();
    let k = space.point_exprs.len();
    if !override_guard && (r > 3 || k > 5) {
        return Err(Error::OutOfRange(format!(
            "wall enumeration guarded to rank <= 3 and <= 5 points; got rank {r}, {k} points"
        )));
    }
    let mut walls: Vec<Wall> = Vec::new();
    let push = |expr: &AffineExpr, offset: Rat, pattern: String, walls: &mut Vec<Wall>| {
        let (normal, off) = normalize_wall(&expr.coeffs, &(offset - &expr.constant));
        if !walls.iter().any(|w| w.normal == normal && w.offset == off) {
            walls.push(Wall {
                normal,
                offset: off,
                pattern,
            });
        }
    };
    match mode {
        WallMode::Kostov => {
            for take in 1..r {
                for (expr, pattern) in per_point_selections(space, take) {
                    let (min, max) = expr.range_over_box(&space.box_lo, &space.box_hi);
                    let mut n = min.floor_big();
                    let top = max.floor_big();
                    while n <= top {
                        let offset = Rat::from_big(n.clone(), 1.into());
                        if offset >= min && offset <= max {
                            push(&expr, offset.clone(), format!("{pattern} = {offset}"), &mut walls);
                        }
                        n += 1;
                    }
                }
            }
        }
        WallMode::Decision => {
            let dim = space.dim;
            if dim == 0 {
                return Ok(WallArrangement {
                    space: space.clone(),
                    walls,
                });
            }
            let mut coeffs = vec![-2i64; dim];
            loop {
                if coeffs.iter().any(|&c| c != 0) {
                    let expr = AffineExpr {
                        coeffs: coeffs.iter().map(|&c| Rat::from_int(c)).collect(),
                        constant: Rat::zero(),
                    };
                    let (min, max) = expr.range_over_box(&space.box_lo, &space.box_hi);
                    // offsets in half-integers
                    let mut n = (&min + &min).floor_big();
                    let top = (&max + &max).floor_big();
                    while n <= top {
                        let offset = Rat::from_big(n.clone(), 2.into());
                        if offset >= min && offset <= max {
                            let pattern = format!("{coeffs:?} . a = {offset}");
                            push(&expr, offset, pattern, &mut walls);
                        }
                        n += 1;
                    }
                }
                let mut i = 0;
                loop {
                    if i == dim {
                        return Ok(WallArrangement {
                            space: space.clone(),
                            walls,
                        });
                    }
                    coeffs[i] += 1;
                    if coeffs[i] <= 2 {
                        break;
                    }
                    coeffs[i] = -2;
                    i += 1;
                }
            }
        }
    }
    Ok(WallArrangement {
        space: space.clone(),
        walls,
    })
}

/// All ways to pick `take` eigenvalue expressions per point, summed into one
/// affine expression with a printable pattern.
fn per_point_selections(space: &WallSpace, take: usize) -> Vec<(AffineExpr, String)> {
    let mut acc: Vec<(AffineExpr, String)> = vec![(
        AffineExpr {
            coeffs: vec![Rat::zero(); space.dim],
            constant: Rat::zero(),
        },
        String::new(),
    )];
    for (pi, exprs) in space.point_exprs.iter().enumerate() {
        let combos = index_combinations(exprs.len(), take);
        let mut next = Vec::with_capacity(acc.len() * combos.len());
        for (expr, pattern) in &acc {
            for combo in &combos {
                let mut coeffs = expr.coeffs.clone();
                let mut constant = expr.constant.clone();
                for &ci in combo {
                    for (d, c) in exprs[ci].coeffs.iter().enumerate() {
                        coeffs[d] += c;
                    }
                    constant += &exprs[ci].constant;
                }
                next.push((
                    AffineExpr { coeffs, constant },
                    format!("{pattern}p{pi}{combo:?}"),
                ));
            }
        }
        acc = next;
    }
    acc
}

fn index_combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (k - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Primitive integer normal with a canonical sign, plus matching offset.
fn normalize_wall(coeffs: &[Rat], offset: &Rat) -> (Vec<Rat>, Rat) {
    use num_bigint::BigInt;
    use num_traits::{One, Signed, Zero};
    let mut lcm = BigInt::one();
    for c in coeffs.iter().chain(std::iter::once(offset)) {
        let d = c.denom();
        let g = num_integer::Integer::gcd(&lcm, d);
        lcm = &lcm / &g * d;
    }
    let scale = Rat::from_big(lcm, BigInt::one());
    let mut ints: Vec<BigInt> = coeffs.iter().map(|c| (c * &scale).numer().clone()).collect();
    let mut off = (offset * &scale).numer().clone();
    let mut g = BigInt::zero();
    for v in ints.iter().chain(std::iter::once(&off)) {
        g = num_integer::Integer::gcd(&g, v);
    }
    if !g.is_zero() && !g.is_one() {
        for v in ints.iter_mut() {
            *v = &*v / &g;
        }
        off = &off / &g;
    }
    let flip = match ints.iter().find(|v| !v.is_zero()) {
        Some(v) => v.is_negative(),
        None => off.is_negative(),
    };
    if flip {
        for v in ints.iter_mut() {
            *v = -&*v;
        }
        off = -off;
    }
    (
        ints.into_iter()
            .map(|v| Rat::from_big(v, BigInt::one()))
            .collect(),
        Rat::from_big(off, BigInt::one()),
    )
}

/// One scanned sample.
#[derive(Clone, Debug, Serialize)]
pub struct ScanSample {
    pub index: usize,
    pub weights: Vec<Rat>,
    pub chamber: String,
    pub kostov_generic: bool,
    pub signature: StratumSignature,
}

/// Chamber summary: its sample indices and whether they all agreed on the
/// discrete Hodge type.
#[derive(Clone, Debug, Serialize)]
pub struct ChamberSummary {
    pub chamber: String,
    pub samples: Vec<usize>,
    pub agreeing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub walls: Vec<Wall>,
    pub samples: Vec<ScanSample>,
    pub chambers: Vec<ChamberSummary>,
    pub disagreements: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub min_wall_distance: Rat,
    pub budget: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            min_wall_distance: Rat::new(1, 200),
            budget: 64,
        }
    }
}

/// Runs the limit iteration on the supplied parameter points, keeping the
/// Kostov-generic ones at the configured interior distance from every wall,
/// and groups the observed signatures by chamber. Intra-chamber disagreement
/// on the discrete type is surfaced, never suppressed.
pub fn chamber_scan<F>(
    arrangement: &WallArrangement,
    samples: Vec<Vec<Rat>>,
    build: F,
    cfg: &ScanConfig,
) -> Result<ScanReport>
where
    F: Fn(&[Rat]) -> Result<FuchsianSystem>,
{
    let mut out_samples = Vec::new();
    for (index, params) in samples.into_iter().enumerate() {
        let eigen = arrangement.space.eigenvalues_at(&params);
        if !kostov_check(&eigen)? {
            continue;
        }
        let interior = arrangement.walls.iter().all(|w| {
            if w.normal.iter().all(Rat::is_zero) {
                false
            } else {
                w.residual(&params).abs() >= cfg.min_wall_distance
            }
        });
        if !interior {
            continue;
        }
        let system = build(&params)?;
        let iter_cfg = IterateConfig {
            budget: cfg.budget,
            certified_irreducible: true,
            ..Default::default()
        };
        let (_, limit, _) = iterate_to_partial_oper(&system, &iter_cfg)?;
        let signature = classify_signature(&limit, &SearchConfig::default())?;
        let chamber: String = arrangement
            .walls
            .iter()
            .map(|w| {
                if w.residual(&params).is_negative() {
                    '-'
                } else {
                    '+'
                }
            })
            .collect();
        out_samples.push(ScanSample {
            index,
            weights: params,
            chamber,
            kostov_generic: true,
            signature,
        });
    }
    let mut chambers: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, s) in out_samples.iter().enumerate() {
        chambers.entry(s.chamber.clone()).or_default().push(i);
    }
    let mut summaries = Vec::new();
    let mut disagreements = Vec::new();
    for (chamber, members) in &chambers {
        let mut agreeing = true;
        if let Some((first, rest)) = members.split_first() {
            let reference = out_samples[*first].signature.hodge_type();
            for m in rest {
                if out_samples[*m].signature.hodge_type() != reference {
                    agreeing = false;
                }
            }
        }
        if !agreeing {
            disagreements.push(chamber.clone());
        }
        summaries.push(ChamberSummary {
            chamber: chamber.clone(),
            samples: members.clone(),
            agreeing,
        });
    }
    Ok(ScanReport {
        walls: arrangement.walls.clone(),
        samples: out_samples,
        chambers: summaries,
        disagreements,
    })
}
