//! Hypercohomology of two-term complexes of split bundles on the projective
//! line, endomorphism complexes with parabolic residue conditions, and the
//! deformation-dimension reports with their symmetry and half-dimension
//! identities.
//!
//! For a two-term complex the hypercohomology sits in the seven-term exact
//! sequence through the cohomology of the two sheaves, which on the line
//! reduces everything to four finite rational linear maps: the differential
//! on global sections and on first cohomology. Global sections of a split
//! bundle are monomial coefficient spaces; first cohomology has the usual
//! basis of negative monomial classes between the coboundary ranges.


use serde::Serialize;

use crate::bundle::{quotient, BundleMap, SplitBundle, Subbundle};
use crate::connection::{kodaira_spencer, nabla_endomorphism, FuchsianSystem, GTFiltration};
use crate::exactalg::ratlin::RatMat;
use crate::exactalg::{minimal_kernel_basis_shifted, solve_polynomial, weighted_col_degree, Poly, PolyMatrix, Rat};
use crate::hodge::{stability, SearchConfig, Stability};
use crate::{Error, Result};

/// Two-term complex with a function-linear differential in matrix form.
#[derive(Clone, Debug, Serialize)]
pub struct TwoTermComplex {
    pub map: BundleMap,
}

impl TwoTermComplex {
    pub fn c0(&self) -> &SplitBundle {
        &self.map.source
    }

    pub fn c1(&self) -> &SplitBundle {
        &self.map.target
    }

    /// Effective degrees of the twisted target.
    pub fn c1_degrees(&self) -> Vec<i64> {
        self.map
            .target
            .degrees()
            .iter()
            .map(|d| d + self.map.twist)
            .collect()
    }
}

/// Euler characteristic from splitting degrees alone.
pub fn euler_characteristic(c: &TwoTermComplex) -> i64 {
    let chi0: i64 = c.c0().degrees().iter().map(|d| d + 1).sum();
    let chi1: i64 = c.c1_degrees().iter().map(|d| d + 1).sum();
    chi0 - chi1
}

fn h0_indices(degrees: &[i64]) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for (l, &d) in degrees.iter().enumerate() {
        for e in 0..=d {
            out.push((l, e));
        }
    }
    out
}

fn h1_indices(degrees: &[i64]) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for (l, &d) in degrees.iter().enumerate() {
        // classes t^{-e} for 1 <= e <= -d - 1
        let mut e = 1;
        while e < -d {
            out.push((l, e));
            e += 1;
        }
    }
    out
}

fn index_of(indices: &[(usize, i64)], key: (usize, i64)) -> Option<usize> {
    indices.iter().position(|&k| k == key)
}

/// Exact hypercohomology dimensions `(h0, h1, h2)` of a matrix complex.
pub fn hyper_dims(c: &TwoTermComplex) -> (usize, usize, usize) {
    let src_deg = c.c0().degrees().to_vec();
    let tgt_deg = c.c1_degrees();
    // global sections
    let src0 = h0_indices(&src_deg);
    let tgt0 = h0_indices(&tgt_deg);
    let mut m0 = RatMat::zero(tgt0.len(), src0.len());
    for (col, &(l, e)) in src0.iter().enumerate() {
        for m in 0..tgt_deg.len() {
            let entry = &c.map.matrix[(m, l)];
            for (j, coeff) in entry.coeffs().iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let f = j as i64 + e;
                let row = index_of(&tgt0, (m, f)).expect("bounded image exponent");
                m0[(row, col)] = coeff.clone();
            }
        }
    }
    // first cohomology classes
    let src1 = h1_indices(&src_deg);
    let tgt1 = h1_indices(&tgt_deg);
    let mut m1 = RatMat::zero(tgt1.len(), src1.len());
    for (col, &(l, e)) in src1.iter().enumerate() {
        for (m, &tdeg) in tgt_deg.iter().enumerate() {
            let entry = &c.map.matrix[(m, l)];
            for (j, coeff) in entry.coeffs().iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                // class exponent j - e; keep strictly negative above the
                // coboundary range
                let x = j as i64 - e;
                if x >= 0 || x <= tdeg {
                    continue;
                }
                let row = index_of(&tgt1, (m, -x)).expect("class exponent in range");
                m1[(row, col)] = coeff.clone();
            }
        }
    }
    let rank0 = m0.rank();
    let rank1 = m1.rank();
    let h0 = src0.len() - rank0;
    let h1 = (tgt0.len() - rank0) + (src1.len() - rank1);
    let h2 = tgt1.len() - rank1;
    (h0, h1, h2)
}

/// Residue condition at the marked points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidueMode {
    /// Endomorphism fibers preserve every flag step.
    FlagPreserving,
    /// Endomorphism fibers map every flag step into the previous one.
    StronglyParabolic,
}

/// Which degree-one term the deformation complex carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ResidueVariant {
    /// Flag-preserving endomorphisms mapping to strongly parabolic ones:
    /// deformations with the residue conjugacy classes held fixed.
    #[default]
    StronglyParabolic,
    /// Fully logarithmic degree-one term (flag-preserving on both sides).
    FullLogarithmic,
}

impl ResidueVariant {
    fn c1_mode(self) -> ResidueMode {
        match self {
            ResidueVariant::StronglyParabolic => ResidueMode::StronglyParabolic,
            ResidueVariant::FullLogarithmic => ResidueMode::FlagPreserving,
        }
    }
}

/// A subsheaf of the endomorphism bundle realized in split normal form: the
/// splitting type plus a minimal module basis in endomorphism coordinates.
#[derive(Clone, Debug)]
pub struct EndSheaf {
    pub bundle: SplitBundle,
    /// `r^2 x rank`, columns in bundle order (row-major endomorphisms).
    pub basis: PolyMatrix,
}

impl EndSheaf {
    /// Column `l` as an `r x r` matrix.
    pub fn column_matrix(&self, r: usize, l: usize) -> PolyMatrix {
        PolyMatrix::from_fn(r, r, |a, b| self.basis[(a * r + b, l)].clone())
    }
}

/// The filtered endomorphism subsheaf `{phi : phi F^q < F^{p+q}}` with point
/// conditions, realized by saturating the condition module.
pub fn end_subsheaf(
    s: &FuchsianSystem,
    graded: &crate::connection::GradedStructure,
    p: i64,
    mode: ResidueMode,
    trace_free: bool,
) -> Result<EndSheaf> {
    let r = s.rank;
    let n = r * r;
    let m = graded.filtration_steps.len() - 2;
    let mut t_rows: Vec<Vec<Poly>> = Vec::new();
    // filtration conditions: for every chain index q, the composite from
    // F^q to V / F^{p+q} vanishes
    for q in 0..=m as i64 {
        let pq = p + q;
        if pq <= 0 {
            continue;
        }
        let mq = &graded.filtration_steps[q as usize];
        if mq.rank() == 0 {
            continue;
        }
        let proj: PolyMatrix = if pq <= m as i64 {
            let (_, proj) = quotient(&graded.filtration_steps[pq as usize])?;
            proj.matrix
        } else {
            PolyMatrix::identity(r)
        };
        if proj.rows() == 0 {
            continue;
        }
        for i in 0..proj.rows() {
            for j in 0..mq.rank() {
                let mut row = vec![Poly::zero(); n];
                for a in 0..r {
                    if proj[(i, a)].is_zero() {
                        continue;
                    }
                    for b in 0..r {
                        let mval = &mq.matrix()[(b, j)];
                        if mval.is_zero() {
                            continue;
                        }
                        row[a * r + b] = &row[a * r + b] + &(&proj[(i, a)] * mval);
                    }
                }
                if row.iter().any(|p| !p.is_zero()) {
                    t_rows.push(row);
                }
            }
        }
    }
    if trace_free {
        let mut row = vec![Poly::zero(); n];
        for a in 0..r {
            row[a * r + a] = Poly::one();
        }
        t_rows.push(row);
    }
    // point conditions
    let mut point_blocks: Vec<(Rat, Vec<Vec<Rat>>)> = Vec::new();
    for flag in &s.parabolic.flags {
        let spans = flag.cumulative_spans();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for (j, span) in spans.iter().enumerate() {
            let (target_span, sources): (Vec<Vec<Rat>>, &Vec<Vec<Rat>>) = match mode {
                ResidueMode::FlagPreserving => {
                    if j + 1 == spans.len() {
                        continue; // full fiber, vacuous
                    }
                    (span.clone(), span)
                }
                ResidueMode::StronglyParabolic => {
                    let prev = if j == 0 { Vec::new() } else { spans[j - 1].clone() };
                    (prev, span)
                }
            };
            let ann = crate::exactalg::ratlin::annihilator(&target_span, r);
            for f in &ann {
                for w in sources {
                    let mut row = vec![Rat::zero(); n];
                    for a in 0..r {
                        if f[a].is_zero() {
                            continue;
                        }
                        for b in 0..r {
                            if w[b].is_zero() {
                                continue;
                            }
                            row[a * r + b] = &row[a * r + b] + &(&f[a] * &w[b]);
                        }
                    }
                    if row.iter().any(|v| !v.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
        if !rows.is_empty() {
            point_blocks.push((flag.point.clone(), rows));
        }
    }
    // assemble the stacked kernel problem
    let extra: usize = point_blocks.iter().map(|(_, rows)| rows.len()).sum();
    let total_cols = n + extra;
    let mut stacked_rows: Vec<Vec<Poly>> = Vec::new();
    for row in &t_rows {
        let mut full = row.clone();
        full.resize(total_cols, Poly::zero());
        stacked_rows.push(full);
    }
    let mut offset = n;
    for (x, rows) in &point_blocks {
        let factor = Poly::linear_root(x);
        for (bi, row) in rows.iter().enumerate() {
            let mut full: Vec<Poly> = row.iter().map(|c| Poly::constant(c.clone())).collect();
            full.resize(total_cols, Poly::zero());
            full[offset + bi] = factor.clone();
            stacked_rows.push(full);
        }
        offset += rows.len();
    }
    let stacked = if stacked_rows.is_empty() {
        PolyMatrix::zero(0, total_cols)
    } else {
        PolyMatrix::from_rows(stacked_rows)
    };
    let kernel = minimal_kernel_basis_shifted(&stacked, &vec![0; total_cols]);
    if kernel.cols() == 0 {
        return Ok(EndSheaf {
            bundle: SplitBundle::new(vec![]),
            basis: PolyMatrix::zero(n, 0),
        });
    }
    let mut degrees = Vec::with_capacity(kernel.cols());
    let mut cols = Vec::with_capacity(kernel.cols());
    for j in 0..kernel.cols() {
        let w = weighted_col_degree(&kernel, j, &vec![0; total_cols])
            .expect("kernel basis column is nonzero");
        degrees.push(-w);
        cols.push((0..n).map(|i| kernel[(i, j)].clone()).collect::<Vec<_>>());
    }
    let bundle = SplitBundle::new(degrees.clone());
    debug_assert_eq!(bundle.degrees(), &degrees[..]);
    Ok(EndSheaf {
        bundle,
        basis: PolyMatrix::from_cols(cols),
    })
}

/// Total endomorphism complex with the connection commutator as its
/// first-order differential.
#[derive(Clone, Debug)]
pub struct OperatorComplex {
    pub system: FuchsianSystem,
    pub c0: EndSheaf,
    pub c1: EndSheaf,
    pub twist: i64,
}

/// Hypercohomology of the operator complex, through the induced linear maps
/// on global sections and on first cohomology classes.
pub fn hyper_dims_operator(c: &OperatorComplex) -> Result<(usize, usize, usize)> {
    let r = c.system.rank;
    let src_deg = c.c0.bundle.degrees().to_vec();
    let tgt_deg: Vec<i64> = c.c1.bundle.degrees().iter().map(|d| d + c.twist).collect();
    let src0 = h0_indices(&src_deg);
    let tgt0 = h0_indices(&tgt_deg);
    let src1 = h1_indices(&src_deg);
    let tgt1 = h1_indices(&tgt_deg);
    // coordinates, in the target basis, of the commutator image and of the
    // product with the vanishing polynomial, one pair per source column
    let p_poly = c.system.poly_p();
    let mut d_coords: Vec<Vec<Poly>> = Vec::with_capacity(src_deg.len());
    let mut p_coords: Vec<Vec<Poly>> = Vec::with_capacity(src_deg.len());
    for l in 0..src_deg.len() {
        let phi = c.c0.column_matrix(r, l);
        let image = nabla_endomorphism(&c.system, &phi);
        let vec_image = PolyMatrix::from_cols(vec![(0..r * r)
            .map(|idx| image[(idx / r, idx % r)].clone())
            .collect()]);
        let coords = solve_polynomial(&c.c1.basis, &vec_image).ok_or_else(|| {
            Error::Certification("commutator image leaves the degree-one condition sheaf".into())
        })?;
        d_coords.push(coords.col(0));
        let vec_p = PolyMatrix::from_cols(vec![(0..r * r)
            .map(|idx| &c.c0.basis[(idx, l)] * &p_poly)
            .collect()]);
        let coords_p = solve_polynomial(&c.c1.basis, &vec_p).ok_or_else(|| {
            Error::Certification("vanishing multiple leaves the degree-one sheaf".into())
        })?;
        p_coords.push(coords_p.col(0));
    }
    let mut m0 = RatMat::zero(tgt0.len(), src0.len());
    for (col, &(l, e)) in src0.iter().enumerate() {
        // D(t^e phi_l) = t^e D(phi_l) + e t^{e-1} P phi_l
        for m in 0..tgt_deg.len() {
            let mut comp = d_coords[l][m].shift_up(e as usize);
            if e > 0 {
                let deriv = p_coords[l][m]
                    .scale(&Rat::from_int(e))
                    .shift_up((e - 1) as usize);
                comp = &comp + &deriv;
            }
            for (j, coeff) in comp.coeffs().iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let row = index_of(&tgt0, (m, j as i64)).ok_or_else(|| {
                    Error::Certification("section image escapes its bounds".into())
                })?;
                m0[(row, col)] += coeff;
            }
        }
    }
    let mut m1 = RatMat::zero(tgt1.len(), src1.len());
    for (col, &(l, e)) in src1.iter().enumerate() {
        // D(t^{-e} phi_l) = t^{-e-1} (t D(phi_l) - e P phi_l)
        for m in 0..tgt_deg.len() {
            let comp = &d_coords[l][m].shift_up(1) - &p_coords[l][m].scale(&Rat::from_int(e));
            for (j, coeff) in comp.coeffs().iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let x = j as i64 - e - 1;
                if x >= 0 || x <= tgt_deg[m] {
                    continue;
                }
                let row = index_of(&tgt1, (m, -x)).expect("class exponent in range");
                m1[(row, col)] += coeff;
            }
        }
    }
    let rank0 = m0.rank();
    let rank1 = m1.rank();
    Ok((
        src0.len() - rank0,
        (tgt0.len() - rank0) + (src1.len() - rank1),
        tgt1.len() - rank1,
    ))
}

/// Either a graded (matrix) complex or the total (operator) complex.
#[derive(Clone, Debug)]
pub enum EndComplex {
    Graded(TwoTermComplex),
    Total(OperatorComplex),
}

/// Selector for [`parabolic_end_complex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexPart {
    Total,
    Graded(i64),
}

/// The parabolic endomorphism complex of a transverse filtration: the full
/// flag-preserving complex with its residue-mode degree-one term, or one
/// graded subquotient, realized as split bundles.
pub fn parabolic_end_complex(
    s: &FuchsianSystem,
    f: &GTFiltration,
    part: ComplexPart,
    variant: ResidueVariant,
    trace_free: bool,
) -> Result<EndComplex> {
    if s.points.is_empty() {
        return Err(Error::InvalidInput(
            "the parabolic complex needs at least one marked point".into(),
        ));
    }
    let graded = kodaira_spencer(s, f)?;
    let m = f.len() as i64;
    match part {
        ComplexPart::Total => {
            let c0 = end_subsheaf(s, &graded, -m, ResidueMode::FlagPreserving, trace_free)?;
            let c1 = end_subsheaf(s, &graded, -m, variant.c1_mode(), trace_free)?;
            Ok(EndComplex::Total(OperatorComplex {
                system: s.clone(),
                c0,
                c1,
                twist: s.twist(),
            }))
        }
        ComplexPart::Graded(p) => {
            let piece = graded_piece(s, &graded, p, ResidueMode::FlagPreserving, trace_free)?;
            let target = graded_piece(s, &graded, p - 1, variant.c1_mode(), trace_free)?;
            let matrix = graded_differential(s, &graded, p, variant, trace_free, &piece, &target)?;
            let map = BundleMap::new(piece.quotient.clone(), target.quotient.clone(), s.twist(), matrix)
                .map_err(|e| {
                    Error::Certification(format!("graded differential violates bounds: {e}"))
                })?;
            Ok(EndComplex::Graded(TwoTermComplex { map }))
        }
    }
}

/// One graded subquotient of the filtered endomorphism sheaf.
struct GradedEndPiece {
    outer: EndSheaf,
    quotient: SplitBundle,
    projection: BundleMap,
}

fn graded_piece(
    s: &FuchsianSystem,
    graded: &crate::connection::GradedStructure,
    p: i64,
    mode: ResidueMode,
    trace_free: bool,
) -> Result<GradedEndPiece> {
    let outer = end_subsheaf(s, graded, p, mode, trace_free)?;
    let inner = end_subsheaf(s, graded, p + 1, mode, trace_free)?;
    if outer.bundle.rank() == 0 {
        return Ok(GradedEndPiece {
            quotient: SplitBundle::new(vec![]),
            projection: BundleMap::zero(outer.bundle.clone(), SplitBundle::new(vec![]), 0),
            outer,
        });
    }
    let coords = if inner.bundle.rank() == 0 {
        PolyMatrix::zero(outer.bundle.rank(), 0)
    } else {
        solve_polynomial(&outer.basis, &inner.basis).ok_or_else(|| {
            Error::Certification("deeper filtered piece does not embed".into())
        })?
    };
    let sub = if coords.cols() == 0 {
        Subbundle::zero(&outer.bundle)
    } else {
        Subbundle::from_map(
            BundleMap::new(inner.bundle.clone(), outer.bundle.clone(), 0, coords)
                .map_err(|e| Error::Certification(format!("filtered inclusion bounds: {e}")))?,
        )
        .map_err(|e| Error::Certification(format!("filtered inclusion not strict: {e}")))?
    };
    let (quotient_bundle, projection) = quotient(&sub)?;
    Ok(GradedEndPiece {
        outer,
        quotient: quotient_bundle,
        projection,
    })
}

fn graded_differential(
    s: &FuchsianSystem,
    graded: &crate::connection::GradedStructure,
    p: i64,
    variant: ResidueVariant,
    trace_free: bool,
    piece: &GradedEndPiece,
    target: &GradedEndPiece,
) -> Result<PolyMatrix> {
    if piece.quotient.rank() == 0 || target.quotient.rank() == 0 {
        return Ok(PolyMatrix::zero(target.quotient.rank(), piece.quotient.rank()));
    }
    let r = s.rank;
    let outer_target = end_subsheaf(s, graded, p - 1, variant.c1_mode(), trace_free)?;
    // coordinates of the commutator images of the outer basis columns
    let mut cols = Vec::with_capacity(piece.outer.bundle.rank());
    for l in 0..piece.outer.bundle.rank() {
        let phi = piece.outer.column_matrix(r, l);
        let image = nabla_endomorphism(s, &phi);
        let vec_image = PolyMatrix::from_cols(vec![(0..r * r)
            .map(|idx| image[(idx / r, idx % r)].clone())
            .collect()]);
        let coords = solve_polynomial(&outer_target.basis, &vec_image).ok_or_else(|| {
            Error::Certification("commutator leaves the filtered target sheaf".into())
        })?;
        cols.push(coords.col(0));
    }
    let y = PolyMatrix::from_cols(cols);
    let projected = target.projection.matrix.mul(&y);
    // descend through the source projection
    let descended_t = solve_polynomial(
        &piece.projection.matrix.transpose(),
        &projected.transpose(),
    )
    .ok_or_else(|| Error::Certification("graded differential does not descend".into()))?;
    Ok(descended_t.transpose())
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GradedDim {
    pub p: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DimSet {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub graded: Vec<GradedDim>,
}

/// Deformation dimensions: the full endomorphism complex and its trace-free
/// part, each with the graded decomposition of the middle hypercohomology.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DefDims {
    #[serde(flatten)]
    pub full: DimSet,
    pub trace_free: DimSet,
}

/// Deformation dimensions of a gr-stable filtration: total hypercohomology
/// plus the per-level graded dimensions, full and trace-free.
pub fn graded_def_dims(
    s: &FuchsianSystem,
    f: &GTFiltration,
    variant: ResidueVariant,
) -> Result<DefDims> {
    let graded = kodaira_spencer(s, f)?;
    match stability(&graded.system, &SearchConfig::default())? {
        Stability::Stable => {}
        other => {
            return Err(Error::InvalidInput(format!(
                "graded dimensions need a gr-stable filtration, got {other:?}"
            )))
        }
    }
    let m = f.len() as i64;
    let dims_for = |trace_free: bool| -> Result<DimSet> {
        let total = match parabolic_end_complex(s, f, ComplexPart::Total, variant, trace_free)? {
            EndComplex::Total(op) => hyper_dims_operator(&op)?,
            EndComplex::Graded(_) => unreachable!("total part requested"),
        };
        let mut graded_dims = Vec::new();
        for p in -m..=m + 1 {
            let complex =
                match parabolic_end_complex(s, f, ComplexPart::Graded(p), variant, trace_free)? {
                    EndComplex::Graded(c) => c,
                    EndComplex::Total(_) => unreachable!("graded part requested"),
                };
            let (_, h1, _) = hyper_dims(&complex);
            if h1 > 0 || (-m..=m).contains(&p) {
                graded_dims.push(GradedDim { p, dim: h1 });
            }
        }
        Ok(DimSet {
            h0: total.0,
            h1: total.1,
            h2: total.2,
            graded: graded_dims,
        })
    };
    Ok(DefDims {
        full: dims_for(false)?,
        trace_free: dims_for(true)?,
    })
}

/// Map-based helper for fixtures: a complex from raw pieces.
pub fn complex_from_map(map: BundleMap) -> TwoTermComplex {
    TwoTermComplex { map }
}
