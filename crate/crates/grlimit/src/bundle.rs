//! Vector bundles on the projective line in split normal form, together with
//! degree-bounded maps, strict subbundles, saturation, kernels, quotients and
//! parabolic degrees.
//!
//! A bundle is a sorted list of splitting degrees. A map into a twisted
//! target is a polynomial matrix whose entry `(i, j)` has degree at most
//! `target[i] + twist - source[j]`; working in the affine chart `t`, the
//! behaviour at infinity is controlled through these bounds, so a subbundle
//! is strict exactly when its matrix has full rank, unit minor gcd, and a
//! full-rank bound-leading-coefficient matrix.

use serde::{Deserialize, Serialize};

use crate::exactalg::ratlin::{self, RatMat};
use crate::exactalg::{minimal_kernel_basis_shifted, weighted_col_degree, Poly, PolyMatrix, Rat};
use crate::{Error, Result};

/// Splitting type of a vector bundle on the projective line: the list of
/// degrees of its line-bundle summands, sorted non-increasing.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct SplitBundle {
    degrees: Vec<i64>,
}

impl SplitBundle {
    pub fn new(mut degrees: Vec<i64>) -> Self {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        SplitBundle { degrees }
    }

    /// The trivial bundle of the given rank.
    pub fn trivial(rank: usize) -> Self {
        SplitBundle {
            degrees: vec![0; rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self) -> i64 {
        self.degrees.iter().sum()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn top_degree(&self) -> Option<i64> {
        self.degrees.first().copied()
    }

    pub fn dual(&self) -> SplitBundle {
        SplitBundle::new(self.degrees.iter().map(|d| -d).collect())
    }
}

/// A map of bundles `source -> target (x) O(twist)` in degree-bounded matrix
/// form.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BundleMap {
    pub source: SplitBundle,
    pub target: SplitBundle,
    pub twist: i64,
    pub matrix: PolyMatrix,
}

impl BundleMap {
    pub fn new(
        source: SplitBundle,
        target: SplitBundle,
        twist: i64,
        matrix: PolyMatrix,
    ) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{} but the map needs {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        let m = BundleMap {
            source,
            target,
            twist,
            matrix,
        };
        for i in 0..m.target.rank() {
            for j in 0..m.source.rank() {
                let bound = m.bound(i, j);
                let deg = m.matrix[(i, j)].degree().map(|d| d as i64);
                if deg.is_some_and(|d| bound < 0 || d > bound) {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i}, {j}) of degree {} exceeds its bound {}",
                        deg.unwrap(),
                        bound
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn zero(source: SplitBundle, target: SplitBundle, twist: i64) -> Self {
        let matrix = PolyMatrix::zero(target.rank(), source.rank());
        BundleMap {
            source,
            target,
            twist,
            matrix,
        }
    }

    pub fn identity(bundle: &SplitBundle) -> Self {
        BundleMap {
            source: bundle.clone(),
            target: bundle.clone(),
            twist: 0,
            matrix: PolyMatrix::identity(bundle.rank()),
        }
    }

    /// Degree bound for entry `(i, j)`.
    pub fn bound(&self, i: usize, j: usize) -> i64 {
        self.target.degrees()[i] + self.twist - self.source.degrees()[j]
    }

    /// Leading-coefficient matrix with respect to the entry bounds; full rank
    /// means no degeneration at infinity.
    pub fn bound_leading_matrix(&self) -> RatMat {
        let mut l = RatMat::zero(self.target.rank(), self.source.rank());
        for i in 0..self.target.rank() {
            for j in 0..self.source.rank() {
                let bound = self.bound(i, j);
                if bound >= 0 {
                    l[(i, j)] = self.matrix[(i, j)].coeff(bound as usize);
                }
            }
        }
        l
    }

    /// Compose with another map (self after rhs); twists add.
    pub fn compose(&self, rhs: &BundleMap) -> Result<BundleMap> {
        if rhs.target != self.source {
            return Err(Error::InvalidInput(
                "composition source/target mismatch".into(),
            ));
        }
        BundleMap::new(
            rhs.source.clone(),
            self.target.clone(),
            self.twist + rhs.twist,
            self.matrix.mul(&rhs.matrix),
        )
    }
}

/// Strict subbundle, stored as a twist-zero inclusion that passed
/// [`check_subbundle`]: the two saturation certificates are unit minor gcd
/// and a full-rank leading matrix at infinity.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Subbundle {
    inclusion: BundleMap,
}

impl Subbundle {
    /// The zero subbundle of `target`.
    pub fn zero(target: &SplitBundle) -> Self {
        Subbundle {
            inclusion: BundleMap::zero(SplitBundle::new(vec![]), target.clone(), 0),
        }
    }

    /// The full subbundle (identity inclusion).
    pub fn full(target: &SplitBundle) -> Self {
        Subbundle {
            inclusion: BundleMap::identity(target),
        }
    }

    pub fn from_map(map: BundleMap) -> Result<Self> {
        if map.twist != 0 {
            return Err(Error::InvalidInput(
                "subbundle inclusions have twist 0".into(),
            ));
        }
        let report = check_subbundle(&map);
        if !report.valid() {
            return Err(Error::InvalidInput(format!(
                "inclusion is not a strict subbundle: {report:?}"
            )));
        }
        Ok(Subbundle { inclusion: map })
    }

    pub fn inclusion(&self) -> &BundleMap {
        &self.inclusion
    }

    pub fn source(&self) -> &SplitBundle {
        &self.inclusion.source
    }

    pub fn target(&self) -> &SplitBundle {
        &self.inclusion.target
    }

    pub fn rank(&self) -> usize {
        self.inclusion.source.rank()
    }

    pub fn degree(&self) -> i64 {
        self.inclusion.source.degree()
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.inclusion.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.target().rank()
    }

    /// Fiber of the subbundle at a finite point, as a column span inside the
    /// target fiber.
    pub fn fiber_span(&self, x: &Rat) -> Vec<Vec<Rat>> {
        let ev = self.inclusion.matrix.eval(x);
        (0..ev.cols).map(|j| ev.col(j)).collect()
    }

    /// Deterministic total-order key.
    pub fn canonical_key(&self) -> String {
        format!(
            "{:?}|{}",
            self.source().degrees(),
            self.inclusion.matrix.canonical_key()
        )
    }
}

/// Validity report for a candidate strict-subbundle inclusion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubbundleReport {
    pub full_rank: bool,
    pub finite_saturated: bool,
    pub infinity_saturated: bool,
}

impl SubbundleReport {
    pub fn valid(&self) -> bool {
        self.full_rank && self.finite_saturated && self.infinity_saturated
    }
}

/// Checks that a twist-zero map is a strict subbundle inclusion: full column
/// rank, unit gcd of maximal minors (no finite degeneration), and a full-rank
/// bound-leading-coefficient matrix (no degeneration at infinity).
pub fn check_subbundle(m: &BundleMap) -> SubbundleReport {
    let s = m.source.rank();
    if s == 0 {
        return SubbundleReport {
            full_rank: true,
            finite_saturated: true,
            infinity_saturated: true,
        };
    }
    let full_rank = m.matrix.rank() == s;
    let finite_saturated = full_rank
        && m.matrix
            .minor_gcd(s)
            .map(|g| g.degree() == Some(0))
            .unwrap_or(false);
    let infinity_saturated = m.bound_leading_matrix().rank() == s;
    SubbundleReport {
        full_rank,
        finite_saturated,
        infinity_saturated,
    }
}

/// Saturation of the column span of a twist-zero polynomial matrix into the
/// given target: the unique strict subbundle with the same generic fiber.
/// Columns may be dependent; the zero span saturates to the zero subbundle.
pub fn saturate_span(matrix: &PolyMatrix, target: &SplitBundle) -> Result<Subbundle> {
    assert_eq!(matrix.rows(), target.rank(), "ambient rank mismatch");
    let r = target.rank();
    if matrix.cols() == 0 || matrix.is_zero() {
        return Ok(Subbundle::zero(target));
    }
    // annihilator of the span, then the kernel of its transpose: double
    // duality yields the saturated module, with minimal weighted degrees
    let ann = matrix.transpose().kernel_basis_raw();
    let basis = if ann.cols() == 0 {
        minimal_kernel_basis_shifted(&PolyMatrix::zero(0, r), target.degrees())
    } else {
        minimal_kernel_basis_shifted(&ann.transpose(), target.degrees())
    };
    subbundle_from_minimal_basis(basis, target)
}

/// Saturation of a full-column-rank inclusion.
pub fn saturate(m: &BundleMap) -> Result<Subbundle> {
    if m.twist != 0 {
        return Err(Error::InvalidInput("saturation expects twist 0".into()));
    }
    let s = m.source.rank();
    if s > 0 && m.matrix.rank() < s {
        return Err(Error::RankDeficient(
            "saturate needs a full-column-rank inclusion".into(),
        ));
    }
    saturate_span(&m.matrix, &m.target)
}

/// The saturated subbundle of the source whose generic fiber is the kernel
/// of the map; the zero subbundle when the map is injective.
pub fn kernel_subbundle(m: &BundleMap) -> Subbundle {
    kernel_subbundle_of_matrix(&m.matrix, &m.source)
}

/// Kernel of a bare polynomial matrix acting on sections of `source`,
/// bypassing target degree bookkeeping.
pub fn kernel_subbundle_of_matrix(matrix: &PolyMatrix, source: &SplitBundle) -> Subbundle {
    let basis = minimal_kernel_basis_shifted(matrix, source.degrees());
    if basis.cols() == 0 {
        return Subbundle::zero(source);
    }
    subbundle_from_minimal_basis(basis, source)
        .expect("a minimal kernel basis is a strict subbundle")
}

fn subbundle_from_minimal_basis(basis: PolyMatrix, target: &SplitBundle) -> Result<Subbundle> {
    let mut degs = Vec::with_capacity(basis.cols());
    for j in 0..basis.cols() {
        let w = weighted_col_degree(&basis, j, target.degrees()).expect("basis column is nonzero");
        degs.push(-w);
    }
    let source = SplitBundle::new(degs.clone());
    // minimal bases come out sorted by ascending weighted degree, which is
    // descending source degree, matching the canonical order
    debug_assert_eq!(source.degrees(), &degs[..]);
    let map = BundleMap::new(source, target.clone(), 0, basis)?;
    Subbundle::from_map(map)
}

/// Quotient of the target by a strict subbundle: the quotient splitting type
/// and a fiberwise-surjective projection with `projection . inclusion = 0`.
pub fn quotient(sub: &Subbundle) -> Result<(SplitBundle, BundleMap)> {
    let target = sub.target().clone();
    let r = target.rank();
    let s = sub.rank();
    if s == 0 {
        return Ok((target.clone(), BundleMap::identity(&target)));
    }
    let dual_shifts: Vec<i64> = target.degrees().iter().map(|d| -d).collect();
    let ann = if s == r {
        PolyMatrix::zero(r, 0)
    } else {
        minimal_kernel_basis_shifted(&sub.matrix().transpose(), &dual_shifts)
    };
    let mut qdegs = Vec::with_capacity(ann.cols());
    for j in 0..ann.cols() {
        let w = weighted_col_degree(&ann, j, &dual_shifts).expect("annihilator column is nonzero");
        qdegs.push(w);
    }
    // annihilator columns arrive sorted by ascending weighted degree; list
    // the quotient summands in non-increasing degree order instead
    let proj_rows: Vec<Vec<Poly>> = (0..ann.cols()).rev().map(|j| ann.col(j)).collect();
    qdegs.reverse();
    let quot = SplitBundle::new(qdegs.clone());
    debug_assert_eq!(quot.degrees(), &qdegs[..]);
    let matrix = if proj_rows.is_empty() {
        PolyMatrix::zero(0, r)
    } else {
        PolyMatrix::from_rows(proj_rows)
    };
    let projection = BundleMap {
        source: target.clone(),
        target: quot.clone(),
        twist: 0,
        matrix,
    };
    // certify: bounds, exact annihilation, degree bookkeeping, surjectivity
    for i in 0..projection.target.rank() {
        for j in 0..projection.source.rank() {
            let bound = projection.bound(i, j);
            let deg = projection.matrix[(i, j)].degree().map(|d| d as i64);
            if deg.is_some_and(|d| bound < 0 || d > bound) {
                return Err(Error::Certification(
                    "projection violates its degree bounds".into(),
                ));
            }
        }
    }
    if !projection.matrix.mul(sub.matrix()).is_zero() {
        return Err(Error::Certification(
            "projection does not annihilate the subbundle".into(),
        ));
    }
    if quot.degree() != target.degree() - sub.degree() {
        return Err(Error::Certification(
            "quotient degree bookkeeping failed".into(),
        ));
    }
    // dualized strictness: the transpose is an inclusion of the dual of the
    // quotient with the same entry bounds, so run the three subbundle checks
    // against the projection's own bound data
    let qrank = quot.rank();
    let surjective = qrank == 0
        || (projection.matrix.rank() == qrank
            && projection
                .matrix
                .minor_gcd(qrank)
                .map(|g| g.degree() == Some(0))
                .unwrap_or(false)
            && projection.bound_leading_matrix().rank() == qrank);
    if !surjective {
        return Err(Error::Certification(
            "projection is not fiberwise surjective".into(),
        ));
    }
    Ok((quot, projection))
}

/// One weighted flag step: the vectors extend the span of all previous steps.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FlagStep {
    pub weight: Rat,
    pub vectors: Vec<Vec<Rat>>,
}

/// Weighted flag in the fiber over one marked point, steps ordered by
/// strictly decreasing weight; cumulative spans increase to the full fiber.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PointFlag {
    pub point: Rat,
    pub steps: Vec<FlagStep>,
}

impl PointFlag {
    /// Cumulative spans, one per step prefix.
    pub fn cumulative_spans(&self) -> Vec<Vec<Vec<Rat>>> {
        let mut spans = Vec::with_capacity(self.steps.len());
        let mut acc: Vec<Vec<Rat>> = Vec::new();
        for step in &self.steps {
            acc.extend(step.vectors.iter().cloned());
            spans.push(acc.clone());
        }
        spans
    }

    /// Trivial flag: one step of weight zero spanning the whole fiber.
    pub fn trivial(point: Rat, rank: usize) -> Self {
        let vectors = (0..rank)
            .map(|i| {
                let mut v = vec![Rat::zero(); rank];
                v[i] = Rat::one();
                v
            })
            .collect();
        PointFlag {
            point,
            steps: vec![FlagStep {
                weight: Rat::zero(),
                vectors,
            }],
        }
    }
}

/// Parabolic structure on a bundle: weighted flags over distinct finite
/// marked points, weights within `[0, 1)` and strictly decreasing along each
/// flag.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ParabolicData {
    pub flags: Vec<PointFlag>,
}

impl ParabolicData {
    pub fn empty() -> Self {
        ParabolicData { flags: Vec::new() }
    }

    pub fn points(&self) -> Vec<Rat> {
        self.flags.iter().map(|f| f.point.clone()).collect()
    }

    /// Validate against an ambient fiber dimension. `strict_range` demands
    /// weights within `[0, 1)`; induced structures on graded pieces keep the
    /// same shape but inherit whatever weights the ambient had.
    pub fn validate(&self, rank: usize, strict_range: bool) -> Result<()> {
        let pts = self.points();
        for (i, a) in pts.iter().enumerate() {
            for b in pts.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::InvalidInput(format!("repeated marked point {a}")));
                }
            }
        }
        for flag in &self.flags {
            let mut prev: Option<&Rat> = None;
            let mut dim = 0usize;
            let mut span: Vec<Vec<Rat>> = Vec::new();
            for step in &flag.steps {
                if strict_range && (step.weight.is_negative() || step.weight >= Rat::one()) {
                    return Err(Error::InvalidInput(format!(
                        "weight {} outside [0, 1) at point {}",
                        step.weight, flag.point
                    )));
                }
                if let Some(p) = prev {
                    if &step.weight >= p {
                        return Err(Error::InvalidInput(format!(
                            "weights not strictly decreasing at point {}",
                            flag.point
                        )));
                    }
                }
                prev = Some(&step.weight);
                for v in &step.vectors {
                    if v.len() != rank {
                        return Err(Error::InvalidInput(format!(
                            "flag vector of length {} in a rank-{} fiber",
                            v.len(),
                            rank
                        )));
                    }
                    span.push(v.clone());
                }
                let new_dim = ratlin::span_dim(&span, rank);
                if new_dim != dim + step.vectors.len() {
                    return Err(Error::InvalidInput(format!(
                        "flag step at point {} does not extend the span freely",
                        flag.point
                    )));
                }
                dim = new_dim;
            }
            if dim != rank {
                return Err(Error::InvalidInput(format!(
                    "flag at point {} spans dimension {dim} of {rank}",
                    flag.point
                )));
            }
        }
        Ok(())
    }
}

/// Parabolic degree of the full bundle: ordinary degree plus the weighted
/// dimensions of all flag steps.
pub fn par_degree_full(bundle: &SplitBundle, pd: &ParabolicData) -> Rat {
    let mut deg = Rat::from_int(bundle.degree());
    for flag in &pd.flags {
        for step in &flag.steps {
            deg += &(&step.weight * &Rat::from_int(step.vectors.len() as i64));
        }
    }
    deg
}

/// Exact parabolic degree of a strict subbundle: ordinary degree plus, at
/// each marked point, the weights of the induced graded pieces of its fiber.
pub fn par_degree(sub: &Subbundle, pd: &ParabolicData) -> Rat {
    let mut deg = Rat::from_int(sub.degree());
    if sub.rank() == 0 {
        return deg;
    }
    let ambient = sub.target().rank();
    for flag in &pd.flags {
        let fiber = sub.fiber_span(&flag.point);
        debug_assert_eq!(
            ratlin::span_dim(&fiber, ambient),
            sub.rank(),
            "strict subbundle fibers have full rank"
        );
        let mut prev_dim = 0usize;
        let mut acc: Vec<Vec<Rat>> = Vec::new();
        for step in &flag.steps {
            acc.extend(step.vectors.iter().cloned());
            let dim = ratlin::intersect_spans(&fiber, &acc, ambient).len();
            let inc = dim - prev_dim;
            if inc > 0 {
                deg += &(&step.weight * &Rat::from_int(inc as i64));
            }
            prev_dim = dim;
        }
    }
    deg
}

/// Flags induced on a quotient bundle through a fiberwise-surjective
/// projection: images of the cumulative spans, reduced to independent
/// increments; steps that add nothing are dropped.
pub fn induced_quotient_flags(pd: &ParabolicData, projection: &BundleMap) -> ParabolicData {
    let qrank = projection.target.rank();
    let mut flags = Vec::with_capacity(pd.flags.len());
    for flag in &pd.flags {
        let proj = projection.matrix.eval(&flag.point);
        let mut steps = Vec::new();
        let mut span: Vec<Vec<Rat>> = Vec::new();
        for step in &flag.steps {
            let mut added = Vec::new();
            for v in &step.vectors {
                let image = proj.mul_vec(v);
                let mut trial = span.clone();
                trial.extend(added.iter().cloned());
                trial.push(image.clone());
                if ratlin::span_dim(&trial, qrank) > span.len() + added.len() {
                    added.push(image);
                }
            }
            if !added.is_empty() {
                span.extend(added.iter().cloned());
                steps.push(FlagStep {
                    weight: step.weight.clone(),
                    vectors: added,
                });
            }
        }
        flags.push(PointFlag {
            point: flag.point.clone(),
            steps,
        });
    }
    ParabolicData { flags }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    fn map(source: &[i64], target: &[i64], cols: Vec<Vec<Poly>>) -> BundleMap {
        BundleMap::new(
            SplitBundle::new(source.to_vec()),
            SplitBundle::new(target.to_vec()),
            0,
            PolyMatrix::from_cols(cols),
        )
        .unwrap()
    }

    #[test]
    fn check_subbundle_examples() {
        // O(-1) -> O + O by (t, 1): valid
        let good = map(&[-1], &[0, 0], vec![vec![p(&[0, 1]), p(&[1])]]);
        assert!(check_subbundle(&good).valid());

        // (t, t): finite degeneration at t = 0
        let bad = map(&[-1], &[0, 0], vec![vec![p(&[0, 1]), p(&[0, 1])]]);
        let rep = check_subbundle(&bad);
        assert!(!rep.finite_saturated && rep.full_rank);

        // (1, 1) from O(-1): bounds are 1, leading matrix vanishes
        let inf = map(&[-1], &[0, 0], vec![vec![p(&[1]), p(&[1])]]);
        let rep = check_subbundle(&inf);
        assert!(rep.full_rank && rep.finite_saturated && !rep.infinity_saturated);
    }

    #[test]
    fn saturate_divides_content() {
        let m = map(&[-1], &[0, 0], vec![vec![p(&[0, 1]), p(&[0, 1])]]);
        let sat = saturate(&m).unwrap();
        assert_eq!(sat.source().degrees(), &[0]);
        let col = sat.matrix().col(0);
        assert_eq!(col[0], col[1]);
        assert_eq!(col[0].degree(), Some(0));
    }

    #[test]
    fn saturate_is_idempotent_on_saturated_input() {
        let m = map(&[-1], &[0, 0], vec![vec![p(&[0, 1]), p(&[1])]]);
        let sat = saturate(&m).unwrap();
        assert_eq!(sat.source().degrees(), &[-1]);
        let again = saturate(sat.inclusion()).unwrap();
        assert_eq!(again.source().degrees(), sat.source().degrees());
        // same span: the original columns solve through the new basis
        assert!(crate::exactalg::solve_polynomial(again.matrix(), sat.matrix()).is_some());
    }

    #[test]
    fn saturate_rank_two_span() {
        // span of (t^2, 1) and (t^2 + t, 1) inside O + O is everything
        let cols = vec![vec![p(&[0, 0, 1]), p(&[1])], vec![p(&[0, 1, 1]), p(&[1])]];
        let m = map(&[-2, -2], &[0, 0], cols);
        let sat = saturate(&m).unwrap();
        assert_eq!(sat.source().degrees(), &[0, 0]);
        assert!(sat.is_full());
    }

    #[test]
    fn kernel_subbundle_examples() {
        let o_oneg1 = SplitBundle::new(vec![0, -1]);
        // zero map: full kernel
        let z = BundleMap::zero(o_oneg1.clone(), SplitBundle::new(vec![0]), 2);
        let k = kernel_subbundle(&z);
        assert!(k.is_full());

        // isomorphism O(-1) -> O(-1): zero kernel
        let iso = BundleMap::new(
            SplitBundle::new(vec![-1]),
            SplitBundle::new(vec![-1]),
            0,
            PolyMatrix::identity(1),
        )
        .unwrap();
        assert!(kernel_subbundle(&iso).is_zero());

        // (t, t-1): kernel line of degree -1
        let m = BundleMap::new(
            SplitBundle::trivial(2),
            SplitBundle::new(vec![1]),
            0,
            PolyMatrix::from_rows(vec![vec![p(&[0, 1]), p(&[-1, 1])]]),
        )
        .unwrap();
        let k = kernel_subbundle(&m);
        assert_eq!(k.source().degrees(), &[-1]);
        assert!(m.matrix.mul(k.matrix()).is_zero());
        assert!(check_subbundle(k.inclusion()).valid());
    }

    #[test]
    fn quotient_examples() {
        // O(-1) in O + O by (t, 1): quotient O(1), projection kills (t, 1)
        let sub =
            Subbundle::from_map(map(&[-1], &[0, 0], vec![vec![p(&[0, 1]), p(&[1])]])).unwrap();
        let (q, proj) = quotient(&sub).unwrap();
        assert_eq!(q.degrees(), &[1]);
        assert!(proj.matrix.mul(sub.matrix()).is_zero());

        // direct summand O(2) in O(2) + O(-1)
        let amb = SplitBundle::new(vec![2, -1]);
        let sub = Subbundle::from_map(
            BundleMap::new(
                SplitBundle::new(vec![2]),
                amb.clone(),
                0,
                PolyMatrix::from_cols(vec![vec![p(&[1]), p(&[0])]]),
            )
            .unwrap(),
        )
        .unwrap();
        let (q, proj) = quotient(&sub).unwrap();
        assert_eq!(q.degrees(), &[-1]);
        assert!(proj.matrix.mul(sub.matrix()).is_zero());

        // zero subbundle: quotient is the whole target under the identity
        let z = Subbundle::zero(&amb);
        let (q, proj) = quotient(&z).unwrap();
        assert_eq!(q, amb);
        assert_eq!(proj.matrix, PolyMatrix::identity(2));
    }

    fn half_zero_flags(at: &[i64]) -> ParabolicData {
        let e1 = vec![Rat::one(), Rat::zero()];
        let e2 = vec![Rat::zero(), Rat::one()];
        ParabolicData {
            flags: at
                .iter()
                .map(|&i| PointFlag {
                    point: Rat::from_int(i),
                    steps: vec![
                        FlagStep {
                            weight: Rat::new(1, 2),
                            vectors: vec![e1.clone()],
                        },
                        FlagStep {
                            weight: Rat::zero(),
                            vectors: vec![e2.clone()],
                        },
                    ],
                })
                .collect(),
        }
    }

    #[test]
    fn par_degree_examples() {
        let v = SplitBundle::trivial(2);
        let flags = half_zero_flags(&[0, 1, 2]);
        flags.validate(2, true).unwrap();
        // weights (1/2, 0) at three points sum to 3/2 on the full bundle
        assert_eq!(par_degree_full(&v, &flags), Rat::new(3, 2));

        // zero-weight data: ordinary degree
        let trivial = ParabolicData {
            flags: (0..3)
                .map(|i| PointFlag::trivial(Rat::from_int(i), 2))
                .collect(),
        };
        let full = Subbundle::full(&v);
        assert_eq!(par_degree(&full, &trivial), Rat::zero());

        // constant line e1 lies in the 1/2 step at all three points
        let line = Subbundle::from_map(
            BundleMap::new(
                SplitBundle::new(vec![0]),
                v.clone(),
                0,
                PolyMatrix::from_cols(vec![vec![p(&[1]), p(&[0])]]),
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(par_degree(&line, &flags), Rat::new(3, 2));
    }

    #[test]
    fn parabolic_additivity() {
        let v = SplitBundle::trivial(2);
        let flags = half_zero_flags(&[0, 1, 2]);
        let sub =
            Subbundle::from_map(map(&[-1], &[0, 0], vec![vec![p(&[0, 1]), p(&[1])]])).unwrap();
        let (q, proj) = quotient(&sub).unwrap();
        let qflags = induced_quotient_flags(&flags, &proj);
        let total = par_degree_full(&v, &flags);
        let lhs = par_degree(&sub, &flags) + par_degree_full(&q, &qflags);
        assert_eq!(lhs, total);
        assert_eq!(sub.rank() + q.rank(), v.rank());
        assert_eq!(sub.degree() + q.degree(), v.degree());
    }

    #[test]
    fn top_splitting_degree_is_max_line_degree() {
        // exhaustive search down from the top degree on a few splitting types
        for degs in [vec![2, 0, -1], vec![0, 0], vec![3, 3, 1]] {
            let v = SplitBundle::new(degs);
            let top = v.top_degree().unwrap();
            // a line of degree `top` exists: the first summand
            let mut col = vec![Poly::zero(); v.rank()];
            col[0] = Poly::one();
            let line = Subbundle::from_map(
                BundleMap::new(
                    SplitBundle::new(vec![top]),
                    v.clone(),
                    0,
                    PolyMatrix::from_cols(vec![col]),
                )
                .unwrap(),
            )
            .unwrap();
            assert_eq!(line.degree(), top);
            // no line of degree top + 1 fits any bound
            assert!(v.degrees().iter().all(|&d| d < top + 1 || d == top));
        }
    }
}
