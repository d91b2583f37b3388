//! Fuchsian systems on the trivial bundle, Griffiths-transverse filtrations,
//! the induced graded Higgs structure, and the destabilizing-modification
//! iteration that terminates at a gr-semistable filtration.
//!
//! A system is a tuple of distinct finite rational points with semisimple
//! rational residue matrices summing to zero, so the connection
//! `d + sum A_i dt/(t - x_i)` has no pole at infinity and lives on `O^r`.
//! In the trivialization `dt/P(t) |-> 1` with `P = prod (t - x_i)`, applying
//! the connection to a polynomial section `f` gives
//! `P f' + sum_i A_i prod_{j != i}(t - x_j) f`, again polynomial.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bundle::{
    check_subbundle, kernel_subbundle_of_matrix, par_degree, par_degree_full, quotient, BundleMap,
    FlagStep, ParabolicData, PointFlag, SplitBundle, Subbundle,
};
use crate::exactalg::ratlin::{self, RatMat};
use crate::exactalg::{solve_polynomial, Poly, PolyMatrix, Rat};
use crate::hodge::{
    max_destabilizer, GradedSub, HNInvariants, HodgeSystem, Level, SearchConfig,
    SemistabilityCertificate,
};
use crate::{Error, Result};

/// Logarithmic connection on the trivial bundle: distinct finite points,
/// semisimple rational residues summing to zero, and weighted eigenspace
/// flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuchsianSystem {
    pub rank: usize,
    pub points: Vec<Rat>,
    pub residues: Vec<RatMat>,
    pub parabolic: ParabolicData,
}

/// Validation output: the per-point eigenvalue lists (with multiplicity).
#[derive(Clone, Debug, Serialize)]
pub struct SystemReport {
    pub eigenvalues: Vec<Vec<Rat>>,
}

impl FuchsianSystem {
    /// Normalizes the parabolic data to one flag per marked point, filling
    /// missing points with the trivial single-step flag of weight zero.
    pub fn new(
        rank: usize,
        points: Vec<Rat>,
        residues: Vec<RatMat>,
        parabolic: ParabolicData,
    ) -> Result<Self> {
        for f in &parabolic.flags {
            if !points.contains(&f.point) {
                return Err(Error::InvalidInput(format!(
                    "parabolic flag at {} which is not a marked point",
                    f.point
                )));
            }
        }
        let mut flags = Vec::with_capacity(points.len());
        for x in &points {
            match parabolic.flags.iter().find(|f| &f.point == x) {
                Some(f) => flags.push(f.clone()),
                None => flags.push(PointFlag::trivial(x.clone(), rank)),
            }
        }
        Ok(FuchsianSystem {
            rank,
            points,
            residues,
            parabolic: ParabolicData { flags },
        })
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn twist(&self) -> i64 {
        self.points.len() as i64 - 2
    }

    pub fn bundle(&self) -> SplitBundle {
        SplitBundle::trivial(self.rank)
    }

    /// `prod_i (t - x_i)`.
    pub fn poly_p(&self) -> Poly {
        self.points
            .iter()
            .fold(Poly::one(), |acc, x| &acc * &Poly::linear_root(x))
    }

    /// `prod_{j != i} (t - x_j)`.
    pub fn poly_p_except(&self, i: usize) -> Poly {
        self.points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(Poly::one(), |acc, (_, x)| &acc * &Poly::linear_root(x))
    }
}

/// Full validity check: distinct points, residues summing to zero, each
/// residue semisimple with rational eigenvalues, flags invariant under the
/// residues. Returns the per-point eigenvalue lists.
pub fn validate_system(s: &FuchsianSystem) -> Result<SystemReport> {
    let r = s.rank;
    if r == 0 {
        return Err(Error::InvalidInput("rank zero system".into()));
    }
    if s.residues.len() != s.points.len() {
        return Err(Error::InvalidInput(
            "one residue matrix per marked point is required".into(),
        ));
    }
    for (i, a) in s.points.iter().enumerate() {
        for b in s.points.iter().skip(i + 1) {
            if a == b {
                return Err(Error::InvalidInput(format!("repeated marked point {a}")));
            }
        }
    }
    let mut total = RatMat::zero(r, r);
    for m in &s.residues {
        if m.rows != r || m.cols != r {
            return Err(Error::InvalidInput("residue of wrong size".into()));
        }
        total = mat_add(&total, m);
    }
    if !total.is_zero() {
        return Err(Error::InvalidInput(
            "residues do not sum to zero, so the connection has a pole at infinity".into(),
        ));
    }
    let mut eigenvalues = Vec::with_capacity(s.residues.len());
    for (i, a) in s.residues.iter().enumerate() {
        let eig = semisimple_eigenvalues(a).ok_or_else(|| {
            Error::InvalidInput(format!(
                "residue at point {} is not semisimple with rational eigenvalues",
                s.points[i]
            ))
        })?;
        eigenvalues.push(eig);
    }
    s.parabolic.validate(r, true)?;
    if s.parabolic.points() != s.points {
        return Err(Error::InvalidInput(
            "parabolic flags must follow the marked points".into(),
        ));
    }
    for (flag, a) in s.parabolic.flags.iter().zip(&s.residues) {
        for span in flag.cumulative_spans() {
            for v in &span {
                let av = a.mul_vec(v);
                if !ratlin::span_contains(&span, &av) {
                    return Err(Error::InvalidInput(format!(
                        "flag step at point {} is not invariant under the residue",
                        flag.point
                    )));
                }
            }
        }
    }
    Ok(SystemReport { eigenvalues })
}

fn mat_add(a: &RatMat, b: &RatMat) -> RatMat {
    let mut out = RatMat::zero(a.rows, a.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out[(i, j)] = &a[(i, j)] + &b[(i, j)];
        }
    }
    out
}

/// Eigenvalue list (with multiplicity, descending) of a semisimple matrix
/// with rational eigenvalues; `None` when either property fails.
pub fn semisimple_eigenvalues(a: &RatMat) -> Option<Vec<Rat>> {
    let r = a.rows;
    assert_eq!(r, a.cols);
    let minpoly = minimal_polynomial(a);
    let roots = rational_roots(&minpoly)?;
    if roots.iter().any(|(_, m)| *m > 1) {
        return None;
    }
    let split: Poly = roots
        .iter()
        .fold(Poly::one(), |acc, (root, _)| &acc * &Poly::linear_root(root));
    if split != minpoly {
        return None;
    }
    let mut eig = Vec::new();
    let mut total = 0usize;
    for (root, _) in &roots {
        let mut shifted = a.clone();
        for i in 0..r {
            shifted[(i, i)] = &shifted[(i, i)] - root;
        }
        let dim = r - shifted.rank();
        total += dim;
        for _ in 0..dim {
            eig.push(root.clone());
        }
    }
    if total != r {
        return None;
    }
    eig.sort_by(|x, y| y.cmp(x));
    Some(eig)
}

/// Monic minimal polynomial via the first linear dependence among powers.
pub fn minimal_polynomial(a: &RatMat) -> Poly {
    let r = a.rows;
    let mut powers: Vec<Vec<Rat>> = Vec::new();
    let mut current = RatMat::identity(r);
    loop {
        let flat: Vec<Rat> = (0..r)
            .flat_map(|i| (0..r).map(|j| current[(i, j)].clone()).collect::<Vec<_>>())
            .collect();
        powers.push(flat);
        let n = powers.len();
        if n >= 2 {
            let cols: Vec<Vec<Rat>> = powers[..n - 1].to_vec();
            let target = &powers[n - 1];
            if let Some(coeffs) = RatMat::from_cols(cols).solve(target) {
                let mut poly = vec![Rat::zero(); n];
                for (i, c) in coeffs.into_iter().enumerate() {
                    poly[i] = -c;
                }
                poly[n - 1] = Rat::one();
                return Poly::from_coeffs(poly);
            }
        }
        assert!(powers.len() <= r + 1, "dependence must appear by degree r");
        current = current.mul(a);
    }
}

/// Rational roots with multiplicities, descending; `None` when coefficient
/// factorization exceeds the trial-division budget.
pub fn rational_roots(poly: &Poly) -> Option<Vec<(Rat, usize)>> {
    if poly.is_zero() {
        return Some(Vec::new());
    }
    let mut work = poly.clone();
    let mut roots: Vec<(Rat, usize)> = Vec::new();
    let mut zero_mult = 0usize;
    while work.degree() > Some(0) && work.coeff(0).is_zero() {
        work = Poly::from_coeffs(work.coeffs()[1..].to_vec());
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rat::zero(), zero_mult));
    }
    if work.degree() == Some(0) {
        roots.sort_by(|a, b| b.0.cmp(&a.0));
        return Some(roots);
    }
    // integerize to a primitive polynomial
    let mut lcm = BigInt::one();
    for c in work.coeffs() {
        let d = c.denom();
        let g = num_integer::Integer::gcd(&lcm, d);
        lcm = &lcm / &g * d;
    }
    let ints: Vec<BigInt> = work
        .coeffs()
        .iter()
        .map(|c| {
            let scaled = c * &Rat::from_big(lcm.clone(), BigInt::one());
            debug_assert!(scaled.is_integer());
            scaled.numer().clone()
        })
        .collect();
    let lead = ints.last().unwrap().abs();
    let constant = ints.first().unwrap().abs();
    let p_divs = divisors(&constant)?;
    let q_divs = divisors(&lead)?;
    let mut candidates: Vec<Rat> = Vec::new();
    for p in &p_divs {
        for q in &q_divs {
            for sign in [1i64, -1] {
                let c = Rat::from_big(p * BigInt::from(sign), q.clone());
                if !candidates.contains(&c) {
                    candidates.push(c);
                }
            }
        }
    }
    for cand in candidates {
        let mut mult = 0usize;
        while work.degree() > Some(0) && work.eval(&cand).is_zero() {
            let (q, rem) = work.divmod(&Poly::linear_root(&cand));
            debug_assert!(rem.is_zero());
            work = q;
            mult += 1;
        }
        if mult > 0 {
            roots.push((cand, mult));
        }
    }
    roots.sort_by(|a, b| b.0.cmp(&a.0));
    Some(roots)
}

/// All positive divisors by trial division; `None` above the budget.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    if n.is_zero() {
        return Some(vec![BigInt::one()]);
    }
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut d = BigInt::from(2);
    let budget = BigInt::from(1_000_000u64);
    while &d * &d <= rest {
        if d > budget {
            return None;
        }
        let mut mult = 0u32;
        while (&rest % &d).is_zero() {
            rest = &rest / &d;
            mult += 1;
        }
        if mult > 0 {
            factors.push((d.clone(), mult));
        }
        d += 1;
    }
    if rest > BigInt::one() {
        factors.push((rest, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (prime, mult) in factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut power = BigInt::one();
            for _ in 0..=mult {
                next.push(d * &power);
                power = &power * &prime;
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    Some(divs)
}

/// Apply the connection to a polynomial section in the logarithmic
/// trivialization: `P f' + sum_i A_i prod_{j != i}(t - x_j) f`.
pub fn apply_nabla(s: &FuchsianSystem, section: &[Poly]) -> Vec<Poly> {
    assert_eq!(section.len(), s.rank);
    let p = s.poly_p();
    let mut out: Vec<Poly> = section.iter().map(|f| &p * &f.derivative()).collect();
    for (i, a) in s.residues.iter().enumerate() {
        let pe = s.poly_p_except(i);
        for row in 0..s.rank {
            let mut acc = Poly::zero();
            for col in 0..s.rank {
                if a[(row, col)].is_zero() || section[col].is_zero() {
                    continue;
                }
                acc = &acc + &section[col].scale(&a[(row, col)]);
            }
            out[row] = &out[row] + &(&pe * &acc);
        }
    }
    out
}

/// Columnwise application of the connection to a polynomial matrix.
pub fn nabla_matrix(s: &FuchsianSystem, m: &PolyMatrix) -> PolyMatrix {
    let cols: Vec<Vec<Poly>> = (0..m.cols()).map(|j| apply_nabla(s, &m.col(j))).collect();
    if cols.is_empty() {
        PolyMatrix::zero(m.rows(), 0)
    } else {
        PolyMatrix::from_cols(cols)
    }
}

/// The induced connection on endomorphisms in the same trivialization:
/// `P phi' + sum_i [A_i, phi] prod_{j != i}(t - x_j)`.
pub fn nabla_endomorphism(s: &FuchsianSystem, phi: &PolyMatrix) -> PolyMatrix {
    assert_eq!(phi.rows(), s.rank);
    assert_eq!(phi.cols(), s.rank);
    let p = s.poly_p();
    let mut out = PolyMatrix::from_fn(s.rank, s.rank, |i, j| &p * &phi[(i, j)].derivative());
    for (i, a) in s.residues.iter().enumerate() {
        let pe = s.poly_p_except(i);
        let am = PolyMatrix::from_ratmat(a);
        let comm = am.mul(phi).sub(&phi.mul(&am));
        out = out.add(&comm.scale(&pe));
    }
    out
}

/// Decreasing chain of strict subbundles of the trivial bundle, stored
/// densely from `F^1` to `F^m` (`F^0` is the whole bundle, deeper steps are
/// zero). Consecutive repeats encode graded pieces of rank zero.
#[derive(Clone, Debug)]
pub struct GTFiltration {
    steps: Vec<Subbundle>,
}

impl GTFiltration {
    pub fn trivial() -> Self {
        GTFiltration { steps: Vec::new() }
    }

    /// Builds a chain after verifying decreasing containment of strict
    /// subbundles; strictness of the chain itself is reported by
    /// [`GTFiltration::is_strict`], not enforced.
    pub fn new(rank: usize, steps: Vec<Subbundle>) -> Result<Self> {
        let ambient = SplitBundle::trivial(rank);
        for (i, sub) in steps.iter().enumerate() {
            if sub.target() != &ambient {
                return Err(Error::InvalidInput(format!(
                    "filtration step {i} does not live in the trivial rank-{rank} bundle"
                )));
            }
            if !check_subbundle(sub.inclusion()).valid() {
                return Err(Error::InvalidInput(format!(
                    "filtration step {i} is not a strict subbundle"
                )));
            }
        }
        for i in 1..steps.len() {
            if solve_polynomial(steps[i - 1].matrix(), steps[i].matrix()).is_none() {
                return Err(Error::InvalidInput(format!(
                    "filtration step {} is not contained in step {}",
                    i + 1,
                    i
                )));
            }
        }
        Ok(GTFiltration { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Subbundle] {
        &self.steps
    }

    /// `F^p` for any `p >= 0`.
    pub fn subbundle_at(&self, rank: usize, p: usize) -> Subbundle {
        let ambient = SplitBundle::trivial(rank);
        if p == 0 {
            Subbundle::full(&ambient)
        } else if p <= self.steps.len() {
            self.steps[p - 1].clone()
        } else {
            Subbundle::zero(&ambient)
        }
    }

    /// Strict when consecutive steps have strictly decreasing ranks.
    pub fn is_strict(&self, rank: usize) -> bool {
        let mut prev = rank;
        for s in &self.steps {
            if s.rank() >= prev {
                return false;
            }
            prev = s.rank();
        }
        true
    }
}

/// Per-level data of a graded structure, kept for every chain index
/// including rank-zero pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub p: i64,
    pub rank: usize,
    pub degree: i64,
    pub pardeg: Rat,
}

/// The graded structure of a transverse filtration: the Hodge system plus
/// the per-level projections used to descend maps through the quotients.
#[derive(Clone, Debug)]
pub struct GradedStructure {
    pub system: HodgeSystem,
    /// `F^p` as a subbundle of the trivial bundle, for `p = 0 ..= m + 1`.
    pub filtration_steps: Vec<Subbundle>,
    /// Coordinates of `F^{p+1}` inside `F^p`, for `p = 0 ..= m`.
    pub inclusion_coords: Vec<PolyMatrix>,
    /// Projection `F^p -> E^p` in splitting coordinates, for `p = 0 ..= m`.
    pub projections: Vec<BundleMap>,
    /// Graded data per chain index, including rank-zero levels.
    pub level_data: Vec<LevelReport>,
}

/// Whether the chain satisfies transversality: the connection maps each step
/// into the span of the previous one, decided by exact solvability.
pub fn check_transversality(s: &FuchsianSystem, f: &GTFiltration) -> bool {
    for p in 2..=f.len() {
        let mp = f.subbundle_at(s.rank, p);
        let prev = f.subbundle_at(s.rank, p - 1);
        let image = nabla_matrix(s, mp.matrix());
        if solve_polynomial(prev.matrix(), &image).is_none() {
            return false;
        }
    }
    true
}

/// Builds the graded Higgs structure of a transverse filtration: quotient
/// levels in split normal form with induced flags, and the function-linear
/// maps induced by the connection, certified well-defined and within their
/// degree bounds.
pub fn kodaira_spencer(s: &FuchsianSystem, f: &GTFiltration) -> Result<GradedStructure> {
    let r = s.rank;
    let m = f.len();
    let mut filtration_steps = Vec::with_capacity(m + 2);
    for p in 0..=m + 1 {
        filtration_steps.push(f.subbundle_at(r, p));
    }
    let mut inclusion_coords = Vec::with_capacity(m + 1);
    for p in 0..=m {
        let outer = &filtration_steps[p];
        let inner = &filtration_steps[p + 1];
        let x = solve_polynomial(outer.matrix(), inner.matrix()).ok_or_else(|| {
            Error::InvalidInput(format!("chain step {} is not contained in step {p}", p + 1))
        })?;
        inclusion_coords.push(x);
    }
    let mut projections = Vec::with_capacity(m + 1);
    let mut level_bundles = Vec::with_capacity(m + 1);
    for p in 0..=m {
        let outer = &filtration_steps[p];
        let inner_coords = BundleMap::new(
            filtration_steps[p + 1].source().clone(),
            outer.source().clone(),
            0,
            inclusion_coords[p].clone(),
        )
        .map_err(|e| Error::Certification(format!("inclusion coordinates violate bounds: {e}")))?;
        let inner_sub = if inner_coords.source.rank() == 0 {
            Subbundle::zero(outer.source())
        } else {
            Subbundle::from_map(inner_coords)
                .map_err(|e| Error::Certification(format!("inner step not strict: {e}")))?
        };
        let (bundle, proj) = quotient(&inner_sub)?;
        level_bundles.push(bundle);
        projections.push(proj);
    }
    let mut levels: BTreeMap<i64, Level> = BTreeMap::new();
    let mut level_data = Vec::with_capacity(m + 2);
    for p in 0..=m {
        let bundle = &level_bundles[p];
        let flags = induced_level_flags(s, &filtration_steps[p], &projections[p]);
        let pardeg = par_degree_full(bundle, &flags);
        level_data.push(LevelReport {
            p: p as i64,
            rank: bundle.rank(),
            degree: bundle.degree(),
            pardeg,
        });
        if bundle.rank() > 0 {
            levels.insert(p as i64, Level::new(bundle.clone(), flags)?);
        }
    }
    level_data.push(LevelReport {
        p: (m + 1) as i64,
        rank: 0,
        degree: 0,
        pardeg: Rat::zero(),
    });
    let mut theta: BTreeMap<i64, BundleMap> = BTreeMap::new();
    for p in 1..=m {
        if level_bundles[p].rank() == 0 || level_bundles[p - 1].rank() == 0 {
            continue;
        }
        let mp = &filtration_steps[p];
        let nabla_cols = nabla_matrix(s, mp.matrix());
        let y = solve_polynomial(filtration_steps[p - 1].matrix(), &nabla_cols)
            .ok_or_else(|| Error::InvalidInput(format!("transversality fails at level {p}")))?;
        let phi = projections[p - 1].matrix.mul(&y);
        // independence of the lift: composing with the deeper step is zero
        if !phi.mul(&inclusion_coords[p]).is_zero() {
            return Err(Error::Certification(
                "induced map depends on the choice of lift".into(),
            ));
        }
        let theta_t = solve_polynomial(&projections[p].matrix.transpose(), &phi.transpose())
            .ok_or_else(|| {
                Error::Certification("induced map does not descend to the quotient".into())
            })?;
        let map = BundleMap::new(
            level_bundles[p].clone(),
            level_bundles[p - 1].clone(),
            s.twist(),
            theta_t.transpose(),
        )
        .map_err(|e| Error::Certification(format!("induced map violates degree bounds: {e}")))?;
        theta.insert(p as i64, map);
    }
    let system = HodgeSystem::new(s.points.clone(), levels, theta)?;
    Ok(GradedStructure {
        system,
        filtration_steps,
        inclusion_coords,
        projections,
        level_data,
    })
}

/// Subquotient flags on a level: intersect each cumulative span with the
/// fiber of the filtration step, pull back to splitting coordinates, push
/// through the projection, and keep the increments.
fn induced_level_flags(
    s: &FuchsianSystem,
    fp: &Subbundle,
    projection: &BundleMap,
) -> ParabolicData {
    let qrank = projection.target.rank();
    let srank = fp.rank();
    let mut flags = Vec::with_capacity(s.parabolic.flags.len());
    for flag in &s.parabolic.flags {
        let x = &flag.point;
        let mpx = fp.inclusion().matrix.eval(x);
        let projx = projection.matrix.eval(x);
        let mut steps = Vec::new();
        let mut image_span: Vec<Vec<Rat>> = Vec::new();
        let mut acc: Vec<Vec<Rat>> = Vec::new();
        for step in &flag.steps {
            acc.extend(step.vectors.iter().cloned());
            let ann = ratlin::annihilator(&acc, s.rank);
            let pre: Vec<Vec<Rat>> = if ann.is_empty() {
                (0..srank)
                    .map(|i| {
                        let mut v = vec![Rat::zero(); srank];
                        v[i] = Rat::one();
                        v
                    })
                    .collect()
            } else {
                let rows: Vec<Vec<Rat>> = ann
                    .iter()
                    .map(|functional| {
                        (0..srank)
                            .map(|c| (0..s.rank).map(|i| &functional[i] * &mpx[(i, c)]).sum())
                            .collect()
                    })
                    .collect();
                RatMat::from_rows(rows).kernel_basis()
            };
            let mut added = Vec::new();
            for c in pre {
                let image = projx.mul_vec(&c);
                let mut trial = image_span.clone();
                trial.extend(added.iter().cloned());
                trial.push(image.clone());
                if ratlin::span_dim(&trial, qrank) > image_span.len() + added.len() {
                    added.push(image);
                }
            }
            if !added.is_empty() {
                image_span.extend(added.iter().cloned());
                steps.push(FlagStep {
                    weight: step.weight.clone(),
                    vectors: added,
                });
            }
        }
        flags.push(PointFlag {
            point: x.clone(),
            steps,
        });
    }
    ParabolicData { flags }
}

/// Result of one destabilizing modification: the raw chain (same indexing as
/// the input, possibly one step longer), the normalized strict chain, and
/// the level translation applied during normalization.
#[derive(Clone, Debug)]
pub struct Modification {
    pub raw: GTFiltration,
    pub normalized: GTFiltration,
    pub shift: i64,
}

/// The destabilizing modification: each new step is the kernel of the map to
/// the quotient of `V/F^p` by the piece of the destabilizer one level down.
pub fn modify(s: &FuchsianSystem, graded: &GradedStructure, h: &GradedSub) -> Result<Modification> {
    if !h.check_invariance(&graded.system)? {
        return Err(Error::InvalidInput(
            "graded sub is not invariant under the induced maps".into(),
        ));
    }
    let r = s.rank;
    let ambient = SplitBundle::trivial(r);
    let m = graded.filtration_steps.len() - 2;
    let mut raw_steps: Vec<Subbundle> = Vec::with_capacity(m + 1);
    for p in 1..=m + 1 {
        let fp = &graded.filtration_steps[p];
        let piece = h.piece((p - 1) as i64);
        let new_step = match piece {
            None => fp.clone(),
            Some(hp) => {
                let level_rank = graded.projections[p - 1].target.rank();
                if hp.rank() == level_rank {
                    graded.filtration_steps[p - 1].clone()
                } else {
                    let (_, rho) = quotient(fp)?;
                    // embed the level below into V/F^p
                    let rho_m = rho.matrix.mul(graded.filtration_steps[p - 1].matrix());
                    let iota_t = solve_polynomial(
                        &graded.projections[p - 1].matrix.transpose(),
                        &rho_m.transpose(),
                    )
                    .ok_or_else(|| {
                        Error::Certification("level does not embed into the quotient".into())
                    })?;
                    let kappa = iota_t.transpose().mul(hp.matrix());
                    let kappa_sub = Subbundle::from_map(
                        BundleMap::new(hp.source().clone(), rho.target.clone(), 0, kappa).map_err(
                            |e| Error::Certification(format!("embedded piece violates bounds: {e}")),
                        )?,
                    )
                    .map_err(|e| Error::Certification(format!("embedded piece is not strict: {e}")))?;
                    let (_, proj2) = quotient(&kappa_sub)?;
                    let composite = proj2.matrix.mul(&rho.matrix);
                    kernel_subbundle_of_matrix(&composite, &ambient)
                }
            }
        };
        raw_steps.push(new_step);
    }
    while raw_steps.last().is_some_and(Subbundle::is_zero) {
        raw_steps.pop();
    }
    let raw = GTFiltration::new(r, raw_steps.clone())?;
    // leading full steps are empty graded pieces at the bottom; dropping
    // each one translates the level indexing down by one
    let mut shift = 0i64;
    let mut steps = raw_steps;
    while steps.first().is_some_and(|s| s.is_full()) {
        steps.remove(0);
        shift -= 1;
    }
    let normalized = GTFiltration::new(r, steps)?;
    Ok(Modification {
        raw,
        normalized,
        shift,
    })
}

/// One recorded step of the iteration.
#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub beta: Rat,
    pub rho: usize,
    pub gamma: Rat,
    pub levels: Vec<LevelReport>,
    pub destabilizer: Vec<LevelReport>,
    pub shift: i64,
}

/// Full trace: the recorded steps, the final graded data, the final
/// certificate, and whether any intermediate graded object had gaps.
#[derive(Clone, Debug, Serialize)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
    pub final_levels: Vec<LevelReport>,
    pub certificate: SemistabilityCertificate,
    pub gaps_seen: bool,
}

#[derive(Clone, Debug)]
pub struct IterateConfig {
    pub budget: usize,
    pub search: SearchConfig,
    /// Demand contiguous graded levels at every step; sound for inputs
    /// certified irreducible, for instance by Kostov genericity.
    pub certified_irreducible: bool,
}

impl Default for IterateConfig {
    fn default() -> Self {
        IterateConfig {
            budget: 64,
            search: SearchConfig::default(),
            certified_irreducible: false,
        }
    }
}

/// Iterates the destabilizing modification from the trivial filtration until
/// the graded object is semistable. Certifies, at every step: strict
/// lexicographic descent of the invariant triple, the exact per-level
/// bookkeeping of the modification, transversality of the new chain, and
/// finally the semistability certificate.
pub fn iterate_to_partial_oper(
    s: &FuchsianSystem,
    cfg: &IterateConfig,
) -> Result<(GTFiltration, HodgeSystem, IterationTrace)> {
    validate_system(s)?;
    let mut filt = GTFiltration::trivial();
    let mut trace_steps: Vec<TraceStep> = Vec::new();
    let mut previous: Option<HNInvariants> = None;
    let mut gaps_seen = false;
    for step in 0..=cfg.budget {
        let graded = kodaira_spencer(s, &filt)?;
        if !graded.system.is_contiguous() {
            gaps_seen = true;
            if cfg.certified_irreducible {
                return Err(Error::Certification(
                    "gap in the graded levels of a certified-irreducible input".into(),
                ));
            }
        }
        let res = max_destabilizer(&graded.system, &cfg.search)?;
        match res.destabilizer {
            None => {
                let trace = IterationTrace {
                    steps: trace_steps,
                    final_levels: graded.level_data.clone(),
                    certificate: res.certificate,
                    gaps_seen,
                };
                return Ok((filt, graded.system, trace));
            }
            Some((h, inv)) => {
                if let Some(prev) = &previous {
                    let descending = inv.beta < prev.beta
                        || (inv.beta == prev.beta && inv.rho < prev.rho)
                        || (inv.beta == prev.beta
                            && inv.rho == prev.rho
                            && inv.gamma < prev.gamma);
                    if !descending {
                        return Err(Error::Certification(format!(
                            "invariants do not descend: ({}, {}, {}) after ({}, {}, {})",
                            inv.beta, inv.rho, inv.gamma, prev.beta, prev.rho, prev.gamma
                        )));
                    }
                }
                let destab_reports = destabilizer_reports(&graded.system, &h);
                let modification = modify(s, &graded, &h)?;
                let raw_graded = kodaira_spencer(s, &modification.raw)?;
                certify_modification_bookkeeping(&graded, &h, &raw_graded)?;
                trace_steps.push(TraceStep {
                    step,
                    beta: inv.beta.clone(),
                    rho: inv.rho,
                    gamma: inv.gamma.clone(),
                    levels: graded.level_data.clone(),
                    destabilizer: destab_reports,
                    shift: modification.shift,
                });
                previous = Some(inv);
                filt = modification.normalized;
            }
        }
    }
    Err(Error::BudgetExceeded { budget: cfg.budget })
}

fn destabilizer_reports(e: &HodgeSystem, h: &GradedSub) -> Vec<LevelReport> {
    h.pieces()
        .iter()
        .map(|(p, piece)| {
            let level = e.level(*p).expect("piece at an existing level");
            LevelReport {
                p: *p,
                rank: piece.rank(),
                degree: piece.degree(),
                pardeg: par_degree(piece, &level.flags),
            }
        })
        .collect()
}

/// The exact-sequence bookkeeping of the modification: at every level, the
/// (rank, degree, parabolic degree) of the new graded piece equals that of
/// the old piece modulo the destabilizer, plus the piece one level down.
fn certify_modification_bookkeeping(
    old: &GradedStructure,
    h: &GradedSub,
    new: &GradedStructure,
) -> Result<()> {
    let e = &old.system;
    let zero_row = |p: usize| LevelReport {
        p: p as i64,
        rank: 0,
        degree: 0,
        pardeg: Rat::zero(),
    };
    let top = new.level_data.len().max(old.level_data.len());
    for p in 0..top {
        let new_row = new.level_data.get(p).cloned().unwrap_or_else(|| zero_row(p));
        let old_row = old.level_data.get(p).cloned().unwrap_or_else(|| zero_row(p));
        let piece_data = |piece: Option<&Subbundle>, level: i64| -> (usize, i64, Rat) {
            match piece {
                None => (0, 0, Rat::zero()),
                Some(sub) => {
                    let flags = &e.level(level).expect("piece at existing level").flags;
                    (sub.rank(), sub.degree(), par_degree(sub, flags))
                }
            }
        };
        let (hr, hd, hp) = piece_data(h.piece(p as i64), p as i64);
        let (br, bd, bp) = piece_data(h.piece(p as i64 - 1), p as i64 - 1);
        let want_rank = old_row.rank - hr + br;
        let want_degree = old_row.degree - hd + bd;
        let want_pardeg = &(&old_row.pardeg - &hp) + &bp;
        if new_row.rank != want_rank
            || new_row.degree != want_degree
            || new_row.pardeg != want_pardeg
        {
            return Err(Error::Certification(format!(
                "modification bookkeeping fails at level {p}: got ({}, {}, {}), want ({}, {}, {})",
                new_row.rank, new_row.degree, new_row.pardeg, want_rank, want_degree, want_pardeg
            )));
        }
    }
    Ok(())
}

/// Serialized form of a Fuchsian system, matching the documented input
/// schema.
#[derive(Serialize, Deserialize)]
struct SystemSchema {
    rank: usize,
    points: Vec<Rat>,
    residues: Vec<Vec<Vec<Rat>>>,
    #[serde(default)]
    parabolic: Vec<ParFlagSchema>,
}

#[derive(Serialize, Deserialize)]
struct ParFlagSchema {
    point: Rat,
    steps: Vec<FlagStepSchema>,
}

#[derive(Serialize, Deserialize)]
struct FlagStepSchema {
    weight: Rat,
    vectors: Vec<Vec<Rat>>,
}

impl Serialize for FuchsianSystem {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let schema = SystemSchema {
            rank: self.rank,
            points: self.points.clone(),
            residues: self
                .residues
                .iter()
                .map(|m| (0..m.rows).map(|i| m.row(i)).collect())
                .collect(),
            parabolic: self
                .parabolic
                .flags
                .iter()
                .map(|f| ParFlagSchema {
                    point: f.point.clone(),
                    steps: f
                        .steps
                        .iter()
                        .map(|st| FlagStepSchema {
                            weight: st.weight.clone(),
                            vectors: st.vectors.clone(),
                        })
                        .collect(),
                })
                .collect(),
        };
        schema.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FuchsianSystem {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let schema = SystemSchema::deserialize(deserializer)?;
        let residues: Vec<RatMat> = schema
            .residues
            .iter()
            .map(|rows| {
                if rows.len() != schema.rank || rows.iter().any(|r| r.len() != schema.rank) {
                    Err(serde::de::Error::custom("residue of wrong size"))
                } else {
                    Ok(RatMat::from_rows(rows.clone()))
                }
            })
            .collect::<std::result::Result<_, D::Error>>()?;
        let parabolic = ParabolicData {
            flags: schema
                .parabolic
                .into_iter()
                .map(|f| PointFlag {
                    point: f.point,
                    steps: f
                        .steps
                        .into_iter()
                        .map(|st| FlagStep {
                            weight: st.weight,
                            vectors: st.vectors,
                        })
                        .collect(),
                })
                .collect(),
        };
        FuchsianSystem::new(schema.rank, schema.points, residues, parabolic)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rq(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn mat2(entries: [[Rat; 2]; 2]) -> RatMat {
        RatMat::from_rows(entries.into_iter().map(|row| row.into()).collect())
    }

    /// The running rank-two fixture: three points with residues
    /// `[[0, 1], [0, 1/2]]`, `[[1/2, -1], [0, 0]]`, and minus their sum.
    /// The residues are simultaneously diagonalizable, so the system is
    /// completely reducible with invariant lines `(2, 1)` and `(1, 0)`.
    pub(crate) fn fixture_f1(weighted: bool) -> FuchsianSystem {
        let a1 = mat2([[r(0), r(1)], [r(0), rq(1, 2)]]);
        let a2 = mat2([[rq(1, 2), r(-1)], [r(0), r(0)]]);
        let a3 = mat2([[rq(-1, 2), r(0)], [r(0), rq(-1, 2)]]);
        let points = vec![r(0), r(1), r(2)];
        let parabolic = if weighted {
            ParabolicData {
                flags: vec![
                    PointFlag {
                        point: r(0),
                        steps: vec![
                            FlagStep {
                                weight: rq(1, 2),
                                vectors: vec![vec![r(2), r(1)]],
                            },
                            FlagStep {
                                weight: Rat::zero(),
                                vectors: vec![vec![r(1), r(0)]],
                            },
                        ],
                    },
                    PointFlag {
                        point: r(1),
                        steps: vec![
                            FlagStep {
                                weight: rq(1, 2),
                                vectors: vec![vec![r(1), r(0)]],
                            },
                            FlagStep {
                                weight: Rat::zero(),
                                vectors: vec![vec![r(2), r(1)]],
                            },
                        ],
                    },
                    PointFlag::trivial(r(2), 2),
                ],
            }
        } else {
            ParabolicData::empty()
        };
        FuchsianSystem::new(2, points, vec![a1, a2, a3], parabolic).unwrap()
    }

    /// Irreducible rank-two fixture with no common eigenvector: residues
    /// `[[0, 1], [0, 1/2]]`, `[[1/2, 0], [1, 0]]`, and minus their sum, with
    /// weight 3/4 on the top eigenvector at every point. The top directions
    /// `(2, 1)`, `(1, 2)`, `(1, -1)` admit a degree -1 line through all
    /// three, so the trivial filtration is destabilized.
    pub(crate) fn fixture_irreducible_weighted() -> FuchsianSystem {
        let a1 = mat2([[r(0), r(1)], [r(0), rq(1, 2)]]);
        let a2 = mat2([[rq(1, 2), r(0)], [r(1), r(0)]]);
        let a3 = mat2([[rq(-1, 2), r(-1)], [r(-1), rq(-1, 2)]]);
        let w = rq(3, 4);
        let flags = ParabolicData {
            flags: vec![
                PointFlag {
                    point: r(0),
                    steps: vec![
                        FlagStep {
                            weight: w.clone(),
                            vectors: vec![vec![r(2), r(1)]],
                        },
                        FlagStep {
                            weight: Rat::zero(),
                            vectors: vec![vec![r(1), r(0)]],
                        },
                    ],
                },
                PointFlag {
                    point: r(1),
                    steps: vec![
                        FlagStep {
                            weight: w.clone(),
                            vectors: vec![vec![r(1), r(2)]],
                        },
                        FlagStep {
                            weight: Rat::zero(),
                            vectors: vec![vec![r(0), r(1)]],
                        },
                    ],
                },
                PointFlag {
                    point: r(2),
                    steps: vec![
                        FlagStep {
                            weight: w,
                            vectors: vec![vec![r(1), r(-1)]],
                        },
                        FlagStep {
                            weight: Rat::zero(),
                            vectors: vec![vec![r(1), r(1)]],
                        },
                    ],
                },
            ],
        };
        FuchsianSystem::new(2, vec![r(0), r(1), r(2)], vec![a1, a2, a3], flags).unwrap()
    }

    #[test]
    fn validate_fixture() {
        let s = fixture_f1(false);
        let report = validate_system(&s).unwrap();
        assert_eq!(report.eigenvalues[0], vec![rq(1, 2), r(0)]);
        assert_eq!(report.eigenvalues[1], vec![rq(1, 2), r(0)]);
        assert_eq!(report.eigenvalues[2], vec![rq(-1, 2), rq(-1, 2)]);
    }

    #[test]
    fn validate_rejects_bad_residues() {
        let a = mat2([[r(1), r(0)], [r(0), r(1)]]);
        let b = RatMat::zero(2, 2);
        let s =
            FuchsianSystem::new(2, vec![r(0), r(1)], vec![a, b], ParabolicData::empty()).unwrap();
        assert!(validate_system(&s).is_err());

        let n = mat2([[r(0), r(1)], [r(0), r(0)]]);
        let minus = mat2([[r(0), r(-1)], [r(0), r(0)]]);
        let s = FuchsianSystem::new(2, vec![r(0), r(1)], vec![n, minus], ParabolicData::empty())
            .unwrap();
        assert!(validate_system(&s).is_err());
    }

    #[test]
    fn apply_nabla_examples() {
        let flat = FuchsianSystem::new(
            2,
            vec![r(0), r(1), r(2)],
            vec![RatMat::zero(2, 2), RatMat::zero(2, 2), RatMat::zero(2, 2)],
            ParabolicData::empty(),
        )
        .unwrap();
        let e = vec![Poly::one(), Poly::zero()];
        assert!(apply_nabla(&flat, &e).iter().all(Poly::is_zero));

        // f = t * e for the flat system: the derivative term P survives
        let te = vec![Poly::var(), Poly::zero()];
        let out = apply_nabla(&flat, &te);
        assert_eq!(out[0], flat.poly_p());
        assert!(out[1].is_zero());

        // constant section of the fixture: degree at most one, matching the
        // residue expansion at each marked point
        let s = fixture_f1(false);
        let out = apply_nabla(&s, &e);
        assert!(out.iter().all(|p| p.degree().is_none_or(|d| d <= 1)));
        for (i, x) in s.points.iter().enumerate() {
            let pe = s.poly_p_except(i).eval(x);
            let want: Vec<Rat> = (0..2).map(|row| &s.residues[i][(row, 0)] * &pe).collect();
            let got: Vec<Rat> = out.iter().map(|p| p.eval(x)).collect();
            assert_eq!(got, want);
        }
    }

    fn constant_line(v: [i64; 2]) -> Subbundle {
        Subbundle::from_map(
            BundleMap::new(
                SplitBundle::new(vec![0]),
                SplitBundle::trivial(2),
                0,
                PolyMatrix::from_cols(vec![vec![
                    Poly::constant(r(v[0])),
                    Poly::constant(r(v[1])),
                ]]),
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn transversality_examples() {
        let s = fixture_f1(false);
        assert!(check_transversality(&s, &GTFiltration::trivial()));
        // one-step filtrations are always transverse
        let f = GTFiltration::new(2, vec![constant_line([1, 0])]).unwrap();
        assert!(check_transversality(&s, &f));
    }

    #[test]
    fn kodaira_spencer_trivial_filtration() {
        let s = fixture_f1(true);
        let graded = kodaira_spencer(&s, &GTFiltration::trivial()).unwrap();
        assert_eq!(graded.system.rank(), 2);
        assert_eq!(graded.system.levels().len(), 1);
        assert!(graded.system.theta(0).is_none());
        assert_eq!(
            graded.system.level(0).unwrap().par_degree(),
            par_degree_full(&s.bundle(), &s.parabolic)
        );
    }

    #[test]
    fn kodaira_spencer_invariant_line_kills_theta() {
        // upper-triangular residues share the invariant line e1
        let a1 = mat2([[rq(1, 3), r(1)], [r(0), r(0)]]);
        let a2 = mat2([[rq(1, 3), r(2)], [r(0), rq(1, 2)]]);
        let a3 = mat2([[rq(-2, 3), r(-3)], [r(0), rq(-1, 2)]]);
        let s = FuchsianSystem::new(
            2,
            vec![r(0), r(1), r(2)],
            vec![a1, a2, a3],
            ParabolicData::empty(),
        )
        .unwrap();
        let f = GTFiltration::new(2, vec![constant_line([1, 0])]).unwrap();
        let graded = kodaira_spencer(&s, &f).unwrap();
        assert!(graded.system.theta(1).unwrap().matrix.is_zero());
    }

    #[test]
    fn kodaira_spencer_noninvariant_line_has_theta() {
        let s = fixture_f1(false);
        let f = GTFiltration::new(2, vec![constant_line([0, 1])]).unwrap();
        let graded = kodaira_spencer(&s, &f).unwrap();
        assert!(!graded.system.theta(1).unwrap().matrix.is_zero());
    }

    #[test]
    fn modify_trivial_destabilizer_is_identity() {
        let s = fixture_f1(true);
        let graded = kodaira_spencer(&s, &GTFiltration::trivial()).unwrap();
        let modification = modify(&s, &graded, &GradedSub::empty()).unwrap();
        assert!(modification.normalized.is_trivial());
        assert_eq!(modification.shift, 0);
    }

    #[test]
    fn modify_line_from_trivial_filtration() {
        let s = fixture_f1(true);
        let graded = kodaira_spencer(&s, &GTFiltration::trivial()).unwrap();
        let line = constant_line([2, 1]);
        let h = GradedSub::new(BTreeMap::from([(0, line.clone())]));
        let modification = modify(&s, &graded, &h).unwrap();
        assert_eq!(modification.normalized.len(), 1);
        let step = &modification.normalized.steps()[0];
        assert_eq!(step.rank(), 1);
        // same line up to column scaling
        assert!(solve_polynomial(step.matrix(), line.matrix()).is_some());
        assert!(solve_polynomial(line.matrix(), step.matrix()).is_some());
    }

    #[test]
    fn iterate_zero_weights_terminates_immediately() {
        let s = fixture_f1(false);
        let (filt, system, trace) =
            iterate_to_partial_oper(&s, &IterateConfig::default()).unwrap();
        assert!(filt.is_trivial());
        assert_eq!(trace.steps.len(), 0);
        assert_eq!(system.levels().len(), 1);
        assert_eq!(system.level(0).unwrap().bundle.degrees(), &[0, 0]);
    }

    #[test]
    fn iterate_balanced_weights_stop_at_the_trivial_filtration() {
        // both eigenvector lines carry parabolic degree 1/2, the slope
        // exactly: strictly semistable, no modification fires
        let s = fixture_f1(true);
        let (filt, system, trace) =
            iterate_to_partial_oper(&s, &IterateConfig::default()).unwrap();
        assert!(filt.is_trivial());
        assert!(trace.steps.is_empty());
        assert_eq!(
            crate::hodge::stability(&system, &SearchConfig::default()).unwrap(),
            crate::hodge::Stability::StrictlySemistable
        );
    }

    #[test]
    fn iterate_weighted_fixture_descends() {
        let s = fixture_irreducible_weighted();
        let (filt, system, trace) =
            iterate_to_partial_oper(&s, &IterateConfig::default()).unwrap();
        assert!(!trace.steps.is_empty(), "weighted fixture must move");
        assert!(!filt.is_trivial());
        for w in trace.steps.windows(2) {
            let a = (&w[0].beta, w[0].rho, &w[0].gamma);
            let b = (&w[1].beta, w[1].rho, &w[1].gamma);
            assert!(b < a, "descent failed: {b:?} after {a:?}");
        }
        assert_eq!(system.rank(), 2);
        // the first destabilizer is the degree -1 line through the three
        // top directions
        assert_eq!(trace.steps[0].beta, rq(5, 4));
        assert_eq!(trace.steps[0].rho, 1);
        assert_eq!(system.levels().len(), 2);
        assert_eq!(system.level(1).unwrap().bundle.degrees(), &[-1]);
        assert_eq!(system.level(0).unwrap().bundle.degrees(), &[1]);
    }

    #[test]
    fn iterate_reducible_with_destabilizing_invariant_line_exceeds_budget() {
        // the invariant line (2, 1) carries weight 1/2 at two points, so the
        // modification keeps shifting it up one level per step: beta and rho
        // stay fixed while gamma decreases without bound
        let a1 = mat2([[r(0), r(1)], [r(0), rq(1, 2)]]);
        let a2 = mat2([[rq(1, 2), r(-1)], [r(0), r(0)]]);
        let a3 = mat2([[rq(-1, 2), r(0)], [r(0), rq(-1, 2)]]);
        let flags = ParabolicData {
            flags: vec![
                PointFlag {
                    point: r(0),
                    steps: vec![
                        FlagStep {
                            weight: rq(1, 2),
                            vectors: vec![vec![r(2), r(1)]],
                        },
                        FlagStep {
                            weight: Rat::zero(),
                            vectors: vec![vec![r(1), r(0)]],
                        },
                    ],
                },
                PointFlag {
                    point: r(1),
                    steps: vec![
                        FlagStep {
                            weight: rq(1, 2),
                            vectors: vec![vec![r(2), r(1)]],
                        },
                        FlagStep {
                            weight: Rat::zero(),
                            vectors: vec![vec![r(1), r(0)]],
                        },
                    ],
                },
                PointFlag::trivial(r(2), 2),
            ],
        };
        let s = FuchsianSystem::new(2, vec![r(0), r(1), r(2)], vec![a1, a2, a3], flags).unwrap();
        let cfg = IterateConfig {
            budget: 6,
            ..Default::default()
        };
        assert!(matches!(
            iterate_to_partial_oper(&s, &cfg),
            Err(Error::BudgetExceeded { budget: 6 })
        ));
    }

    #[test]
    fn eigenvalue_helpers() {
        let a = mat2([[r(0), r(1)], [r(0), rq(1, 2)]]);
        assert_eq!(semisimple_eigenvalues(&a).unwrap(), vec![rq(1, 2), r(0)]);
        let nilpotent = mat2([[r(0), r(1)], [r(0), r(0)]]);
        assert!(semisimple_eigenvalues(&nilpotent).is_none());
        let scalar = mat2([[rq(-1, 2), r(0)], [r(0), rq(-1, 2)]]);
        assert_eq!(
            semisimple_eigenvalues(&scalar).unwrap(),
            vec![rq(-1, 2), rq(-1, 2)]
        );
    }

    #[test]
    fn system_schema_roundtrip() {
        let s = fixture_f1(true);
        let json = serde_json::to_string(&s).unwrap();
        let back: FuchsianSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
