//! Seeded random generators: Fuchsian systems of rank two and three with
//! prescribed rational spectra, weighted eigenvector flags, random graded
//! systems and random two-term complexes. All sampling flows through one
//! ChaCha generator, so identical seeds reproduce identical objects.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::bundle::{BundleMap, FlagStep, ParabolicData, PointFlag, SplitBundle};
use crate::connection::{semisimple_eigenvalues, FuchsianSystem};
use crate::exactalg::ratlin::RatMat;
use crate::exactalg::{Poly, PolyMatrix, Rat};
use crate::hodge::{HodgeSystem, Level};
use crate::{Error, Result};

pub type SampleRng = ChaCha12Rng;

/// Random rational `lo + j/d (hi - lo)` with denominator at most `den`.
pub fn rand_rat(rng: &mut SampleRng, lo: &Rat, hi: &Rat, den: u32) -> Rat {
    let d = rng.gen_range(2..=den.max(2)) as i64;
    let j = rng.gen_range(1..d);
    lo + &(&(hi - lo) * &Rat::new(j, d))
}

/// Random small integer in `[-bound, bound]` avoiding zero when `nonzero`.
fn rand_int(rng: &mut SampleRng, bound: i64, nonzero: bool) -> Rat {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if !nonzero || v != 0 {
            return Rat::from_int(v);
        }
    }
}

/// Random invertible matrix with small integer entries.
pub fn random_invertible(rng: &mut SampleRng, n: usize) -> RatMat {
    loop {
        let m = RatMat::from_rows(
            (0..n)
                .map(|_| (0..n).map(|_| rand_int(rng, 3, false)).collect())
                .collect(),
        );
        if m.inverse().is_some() {
            return m;
        }
    }
}

fn conjugate(m: &RatMat, g: &RatMat) -> RatMat {
    let inv = g.inverse().expect("conjugation by an invertible matrix");
    g.mul(m).mul(&inv)
}

/// Weight policy for eigenvector flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMenu {
    /// Trivial flags of weight zero.
    Zero,
    /// Weight of an eigenvalue is its fractional part; equal weights merge
    /// into one step.
    EigenFrac,
    /// Weight 1/2 on the largest eigenvalue's eigenspace, zero on the rest.
    /// Only sound on inputs certified irreducible.
    HalfTop,
}

/// Attach eigenspace flags to a validated spectrum according to the menu.
pub fn attach_eigen_flags(s: &FuchsianSystem, menu: WeightMenu) -> Result<FuchsianSystem> {
    let r = s.rank;
    let mut flags = Vec::with_capacity(s.points.len());
    for (x, a) in s.points.iter().zip(&s.residues) {
        let eig = semisimple_eigenvalues(a).ok_or_else(|| {
            Error::InvalidInput(format!("residue at {x} is not semisimple rational"))
        })?;
        let mut distinct: Vec<Rat> = eig.clone();
        distinct.dedup();
        // group eigenvalues by assigned weight
        let mut groups: Vec<(Rat, Vec<Rat>)> = Vec::new();
        for lambda in &distinct {
            let w = match menu {
                WeightMenu::Zero => Rat::zero(),
                WeightMenu::EigenFrac => lambda.frac(),
                WeightMenu::HalfTop => {
                    if lambda == distinct.first().unwrap() {
                        Rat::new(1, 2)
                    } else {
                        Rat::zero()
                    }
                }
            };
            match groups.iter_mut().find(|(gw, _)| gw == &w) {
                Some((_, members)) => members.push(lambda.clone()),
                None => groups.push((w, vec![lambda.clone()])),
            }
        }
        groups.sort_by(|a, b| b.0.cmp(&a.0));
        let mut steps = Vec::new();
        for (weight, members) in groups {
            let mut vectors = Vec::new();
            for lambda in members {
                let mut shifted = a.clone();
                for i in 0..r {
                    shifted[(i, i)] = &shifted[(i, i)] - &lambda;
                }
                vectors.extend(shifted.kernel_basis());
            }
            steps.push(FlagStep { weight, vectors });
        }
        flags.push(PointFlag {
            point: x.clone(),
            steps,
        });
    }
    FuchsianSystem::new(
        r,
        s.points.clone(),
        s.residues.clone(),
        ParabolicData { flags },
    )
}

/// Rank-two system with the prescribed per-point spectra `(alpha_i, beta_i)`
/// (sums must total zero): the first `k - 2` residues are random
/// conjugations of diagonals, the last two are completed exactly so that the
/// whole family sums to zero with the right spectra. No flags are attached.
pub fn rank2_with_spectrum(
    points: &[Rat],
    pairs: &[(Rat, Rat)],
    rng: &mut SampleRng,
) -> Result<FuchsianSystem> {
    let k = points.len();
    if k < 2 || pairs.len() != k {
        return Err(Error::InvalidInput(
            "need at least two points and one spectrum pair per point".into(),
        ));
    }
    let total: Rat = pairs.iter().map(|(a, b)| a + b).sum();
    if !total.is_zero() {
        return Err(Error::InvalidInput("spectra must sum to zero".into()));
    }
    for (a, b) in &pairs[k - 2..] {
        if a == b {
            return Err(Error::InvalidInput(
                "the two completion points need distinct eigenvalues".into(),
            ));
        }
    }
    let mut residues: Vec<RatMat> = Vec::with_capacity(k);
    let mut sum = RatMat::zero(2, 2);
    for (a, b) in pairs.iter().take(k - 2) {
        let d = RatMat::from_rows(vec![
            vec![a.clone(), Rat::zero()],
            vec![Rat::zero(), b.clone()],
        ]);
        let g = random_invertible(rng, 2);
        let m = conjugate(&d, &g);
        for i in 0..2 {
            for j in 0..2 {
                sum[(i, j)] += &m[(i, j)];
            }
        }
        residues.push(m);
    }
    // complete the last two points: A + B = M with prescribed spectra
    let m = RatMat::from_rows(vec![
        vec![-&sum[(0, 0)], -&sum[(0, 1)]],
        vec![-&sum[(1, 0)], -&sum[(1, 1)]],
    ]);
    let (c, cp) = pairs[k - 2].clone();
    let (d1, d2) = pairs[k - 1].clone();
    let a = complete_pair_rank2(&m, &c, &cp, &(&d1 * &d2), rng)?;
    let b = RatMat::from_rows(vec![
        vec![&m[(0, 0)] - &a[(0, 0)], &m[(0, 1)] - &a[(0, 1)]],
        vec![&m[(1, 0)] - &a[(1, 0)], &m[(1, 1)] - &a[(1, 1)]],
    ]);
    residues.push(a);
    residues.push(b);
    FuchsianSystem::new(2, points.to_vec(), residues, ParabolicData::empty())
}

/// Find `A` in the conjugation orbit of `diag(c, cp)` with
/// `det(M - A) = target`: the orbit is swept by two unipotent parameters and
/// the determinant is affine in the second because the orbit fixes both
/// trace and determinant of `A`.
fn complete_pair_rank2(
    m: &RatMat,
    c: &Rat,
    cp: &Rat,
    target: &Rat,
    rng: &mut SampleRng,
) -> Result<RatMat> {
    for _ in 0..64 {
        let u = rand_int(rng, 4, false);
        // A(w) = E diag(c, cp) E^{-1} with E = [[1+uw, u], [w, 1]]: compute
        // symbolically with w as the polynomial variable
        let w = Poly::var();
        let one = Poly::one();
        let e = vec![
            vec![&one + &w.scale(&u), Poly::constant(u.clone())],
            vec![w.clone(), one.clone()],
        ];
        let e_inv = vec![
            vec![one.clone(), Poly::constant(-&u)],
            vec![-&w, &one + &w.scale(&u)],
        ];
        let d = vec![
            vec![Poly::constant(c.clone()), Poly::zero()],
            vec![Poly::zero(), Poly::constant(cp.clone())],
        ];
        let mul = |x: &Vec<Vec<Poly>>, y: &Vec<Vec<Poly>>| -> Vec<Vec<Poly>> {
            (0..2)
                .map(|i| {
                    (0..2)
                        .map(|j| &(&x[i][0] * &y[0][j]) + &(&x[i][1] * &y[1][j]))
                        .collect()
                })
                .collect()
        };
        let a = mul(&mul(&e, &d), &e_inv);
        // det(M - A(w)) as a polynomial in w
        let m00 = Poly::constant(m[(0, 0)].clone());
        let m01 = Poly::constant(m[(0, 1)].clone());
        let m10 = Poly::constant(m[(1, 0)].clone());
        let m11 = Poly::constant(m[(1, 1)].clone());
        let det = &(&(&m00 - &a[0][0]) * &(&m11 - &a[1][1]))
            - &(&(&m01 - &a[0][1]) * &(&m10 - &a[1][0]));
        let residual = &det - &Poly::constant(target.clone());
        match residual.degree() {
            None => {}
            Some(0) => continue,
            Some(1) => {
                let wstar = -&(residual.coeff(0) / residual.coeff(1));
                let eval = RatMat::from_rows(
                    (0..2)
                        .map(|i| (0..2).map(|j| a[i][j].eval(&wstar)).collect())
                        .collect(),
                );
                return Ok(eval);
            }
            Some(_) => {
                return Err(Error::Certification(
                    "pair completion determinant is not affine".into(),
                ))
            }
        }
        // residual identically zero: any w works
        let eval = RatMat::from_rows(
            (0..2)
                .map(|i| (0..2).map(|j| a[i][j].eval(&Rat::zero())).collect())
                .collect(),
        );
        return Ok(eval);
    }
    Err(Error::InvalidInput(
        "pair completion failed for the requested spectra".into(),
    ))
}

/// Traceless rank-two system with eigenvalues `(a_i, -a_i)` and weights
/// linked to the fractional parts, conjugated by a random global change of
/// basis.
pub fn rank2_traceless(points: &[Rat], params: &[Rat], rng: &mut SampleRng) -> Result<FuchsianSystem> {
    let pairs: Vec<(Rat, Rat)> = params.iter().map(|a| (a.clone(), -a)).collect();
    let bare = rank2_with_spectrum(points, &pairs, rng)?;
    attach_eigen_flags(&bare, WeightMenu::EigenFrac)
}

/// Rank-three block system: a rank-two system plus scalar residues summing
/// to zero, conjugated globally. Reducible by construction.
pub fn rank3_block(
    points: &[Rat],
    pairs: &[(Rat, Rat)],
    scalars: &[Rat],
    rng: &mut SampleRng,
) -> Result<FuchsianSystem> {
    if scalars.len() != points.len() {
        return Err(Error::InvalidInput("one scalar per point".into()));
    }
    if !scalars.iter().cloned().sum::<Rat>().is_zero() {
        return Err(Error::InvalidInput("scalars must sum to zero".into()));
    }
    let base = rank2_with_spectrum(points, pairs, rng)?;
    let g = random_invertible(rng, 3);
    let residues: Vec<RatMat> = base
        .residues
        .iter()
        .zip(scalars)
        .map(|(m, c)| {
            let mut block = RatMat::zero(3, 3);
            for i in 0..2 {
                for j in 0..2 {
                    block[(i, j)] = m[(i, j)].clone();
                }
            }
            block[(2, 2)] = c.clone();
            conjugate(&block, &g)
        })
        .collect();
    FuchsianSystem::new(3, points.to_vec(), residues, ParabolicData::empty())
}

/// Completely reducible rank-three system: conjugated diagonals with each
/// coordinate's eigenvalues summing to zero.
pub fn rank3_diagonal(
    points: &[Rat],
    triples: &[[Rat; 3]],
    rng: &mut SampleRng,
) -> Result<FuchsianSystem> {
    if triples.len() != points.len() {
        return Err(Error::InvalidInput("one triple per point".into()));
    }
    for j in 0..3 {
        let s: Rat = triples.iter().map(|t| t[j].clone()).sum();
        if !s.is_zero() {
            return Err(Error::InvalidInput(
                "each diagonal coordinate must sum to zero".into(),
            ));
        }
    }
    let g = random_invertible(rng, 3);
    let residues: Vec<RatMat> = triples
        .iter()
        .map(|t| {
            let mut d = RatMat::zero(3, 3);
            for j in 0..3 {
                d[(j, j)] = t[j].clone();
            }
            conjugate(&d, &g)
        })
        .collect();
    FuchsianSystem::new(3, points.to_vec(), residues, ParabolicData::empty())
}

/// Irreducible-flavored rank-three system on three points: a diagonal
/// residue, a scalar-plus-rank-one residue solved through a Cauchy system so
/// that the third residue has the prescribed distinct spectrum.
pub fn rank3_cauchy(
    points: &[Rat],
    diag: &[Rat; 3],
    sigma: &Rat,
    third_spectrum: &[Rat; 3],
) -> Result<FuchsianSystem> {
    if points.len() != 3 {
        return Err(Error::InvalidInput("three points required".into()));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if diag[i] == diag[j] || third_spectrum[i] == third_spectrum[j] {
                return Err(Error::InvalidInput(
                    "diagonal and third spectra must be distinct triples".into(),
                ));
            }
        }
    }
    // solve sum_i v_i / (e_j + sigma + d_i) = -1 for each j
    let mut rows = Vec::with_capacity(3);
    let mut rhs = Vec::with_capacity(3);
    for e in third_spectrum {
        let mut row = Vec::with_capacity(3);
        for d in diag {
            let denom = &(e + sigma) + d;
            if denom.is_zero() {
                return Err(Error::InvalidInput(
                    "resonant spectra in the Cauchy completion".into(),
                ));
            }
            row.push(denom.recip());
        }
        rows.push(row);
        rhs.push(-Rat::one());
    }
    let v = RatMat::from_rows(rows)
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidInput("Cauchy completion is singular".into()))?;
    let vsum: Rat = v.iter().cloned().sum();
    if vsum.is_zero() {
        return Err(Error::InvalidInput(
            "rank-one completion degenerates to nilpotent".into(),
        ));
    }
    let mut a1 = RatMat::zero(3, 3);
    for j in 0..3 {
        a1[(j, j)] = diag[j].clone();
    }
    let mut a2 = RatMat::zero(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            a2[(i, j)] = v[i].clone();
        }
        a2[(i, i)] += sigma;
    }
    let mut a3 = RatMat::zero(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            a3[(i, j)] = -&(&a1[(i, j)] + &a2[(i, j)]);
        }
    }
    FuchsianSystem::new(3, points.to_vec(), vec![a1, a2, a3], ParabolicData::empty())
}

/// Configuration for random graded systems.
#[derive(Clone, Debug)]
pub struct RandomHodgeConfig {
    pub max_rank: usize,
    pub max_abs_degree: i64,
    pub points: Vec<Rat>,
}

impl Default for RandomHodgeConfig {
    fn default() -> Self {
        RandomHodgeConfig {
            max_rank: 3,
            max_abs_degree: 2,
            points: vec![Rat::from_int(0), Rat::from_int(1), Rat::from_int(2)],
        }
    }
}

/// Random system of Hodge bundles: random level ranks and degrees, random
/// full flags with weights from a small menu, and random maps within their
/// degree bounds.
pub fn random_hodge_system(rng: &mut SampleRng, cfg: &RandomHodgeConfig) -> HodgeSystem {
    let total_rank = rng.gen_range(1..=cfg.max_rank);
    let num_levels = rng.gen_range(1..=total_rank);
    // split the rank across contiguous levels
    let mut ranks = vec![1usize; num_levels];
    for _ in 0..total_rank - num_levels {
        let i = rng.gen_range(0..num_levels);
        ranks[i] += 1;
    }
    let base = rng.gen_range(-1..=1i64);
    let twist = cfg.points.len() as i64 - 2;
    let weight_menu = [
        Rat::zero(),
        Rat::new(1, 2),
        Rat::new(1, 3),
        Rat::new(2, 5),
        Rat::new(1, 5),
    ];
    let mut levels = BTreeMap::new();
    for (i, &rank) in ranks.iter().enumerate() {
        let degrees: Vec<i64> = (0..rank)
            .map(|_| rng.gen_range(-cfg.max_abs_degree..=cfg.max_abs_degree))
            .collect();
        let bundle = SplitBundle::new(degrees);
        let mut flags = Vec::new();
        for x in &cfg.points {
            // random full flag: random invertible columns split into steps
            let basis = random_invertible(rng, rank);
            let steps_count = rng.gen_range(1..=rank);
            let mut cuts: Vec<usize> = (1..rank).collect();
            // choose steps_count - 1 cut positions
            while cuts.len() > steps_count - 1 {
                let drop = rng.gen_range(0..cuts.len());
                cuts.remove(drop);
            }
            let mut weights: Vec<Rat> = Vec::new();
            while weights.len() < steps_count {
                let w = weight_menu[rng.gen_range(0..weight_menu.len())].clone();
                if !weights.contains(&w) {
                    weights.push(w);
                }
            }
            weights.sort_by(|a, b| b.cmp(a));
            let mut steps = Vec::new();
            let mut start = 0usize;
            let bounds: Vec<usize> = cuts.iter().copied().chain(std::iter::once(rank)).collect();
            for (si, &end) in bounds.iter().enumerate() {
                let vectors: Vec<Vec<Rat>> = (start..end).map(|j| basis.col(j)).collect();
                steps.push(FlagStep {
                    weight: weights[si].clone(),
                    vectors,
                });
                start = end;
            }
            flags.push(PointFlag {
                point: x.clone(),
                steps,
            });
        }
        let level = Level::new(bundle, ParabolicData { flags }).expect("random level is valid");
        levels.insert(base + i as i64, level);
    }
    let mut theta = BTreeMap::new();
    for i in 1..num_levels {
        let p = base + i as i64;
        let src = levels[&p].bundle.clone();
        let tgt = levels[&(p - 1)].bundle.clone();
        let map = random_bundle_map(rng, &src, &tgt, twist);
        theta.insert(p, map);
    }
    HodgeSystem::new(cfg.points.clone(), levels, theta).expect("random system is valid")
}

/// Random map within the degree bounds (zero when every bound is negative).
pub fn random_bundle_map(
    rng: &mut SampleRng,
    source: &SplitBundle,
    target: &SplitBundle,
    twist: i64,
) -> BundleMap {
    let matrix = PolyMatrix::from_fn(target.rank(), source.rank(), |i, j| {
        let bound = target.degrees()[i] + twist - source.degrees()[j];
        if bound < 0 {
            return Poly::zero();
        }
        let coeffs: Vec<Rat> = (0..=bound).map(|_| rand_int(rng, 2, false)).collect();
        Poly::from_coeffs(coeffs)
    });
    BundleMap::new(source.clone(), target.clone(), twist, matrix)
        .expect("generated entries respect their bounds")
}

/// Random two-term complex for cohomology tests: random split bundles and a
/// random differential respecting the twist bounds.
pub fn random_two_term_complex(rng: &mut SampleRng) -> BundleMap {
    let max_rank = 3usize;
    let c0_rank = rng.gen_range(1..=max_rank);
    let c1_rank = rng.gen_range(0..=max_rank);
    let deg = |rng: &mut SampleRng| rng.gen_range(-3..=3i64);
    let c0 = SplitBundle::new((0..c0_rank).map(|_| deg(rng)).collect());
    let c1 = SplitBundle::new((0..c1_rank).map(|_| deg(rng)).collect());
    let twist = rng.gen_range(0..=3i64);
    random_bundle_map(rng, &c0, &c1, twist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::validate_system;
    use crate::strata::kostov_check;
    use rand::SeedableRng;

    fn pts(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| Rat::from_int(x)).collect()
    }

    #[test]
    fn rank2_spectrum_is_exact() {
        let mut rng = SampleRng::seed_from_u64(7);
        let pairs = vec![
            (Rat::new(1, 5), Rat::new(-1, 5)),
            (Rat::new(1, 7), Rat::new(-1, 7)),
            (Rat::new(3, 35), Rat::new(-3, 35)),
        ];
        let s = rank2_with_spectrum(&pts(&[0, 1, 2]), &pairs, &mut rng).unwrap();
        let report = validate_system(&s).unwrap();
        assert_eq!(
            report.eigenvalues,
            vec![
                vec![Rat::new(1, 5), Rat::new(-1, 5)],
                vec![Rat::new(1, 7), Rat::new(-1, 7)],
                vec![Rat::new(3, 35), Rat::new(-3, 35)],
            ]
        );
        assert!(kostov_check(&report.eigenvalues).unwrap());
    }

    #[test]
    fn rank2_traceless_flags_validate() {
        let mut rng = SampleRng::seed_from_u64(11);
        let params = vec![Rat::new(1, 5), Rat::new(1, 7), Rat::new(3, 35)];
        let s = rank2_traceless(&pts(&[0, 1, 2]), &params, &mut rng).unwrap();
        validate_system(&s).unwrap();
        // weights are the fractional parts: 1 - a on the negative eigenvalue
        let flag = &s.parabolic.flags[0];
        assert_eq!(flag.steps[0].weight, Rat::new(4, 5));
        assert_eq!(flag.steps[1].weight, Rat::new(1, 5));
    }

    #[test]
    fn rank3_builders_validate() {
        let mut rng = SampleRng::seed_from_u64(13);
        let pairs = vec![
            (Rat::new(1, 5), Rat::new(-1, 5)),
            (Rat::new(1, 7), Rat::new(-1, 7)),
            (Rat::new(3, 35), Rat::new(-3, 35)),
        ];
        let scalars = vec![Rat::new(1, 3), Rat::new(1, 3), Rat::new(-2, 3)];
        let block = rank3_block(&pts(&[0, 1, 2]), &pairs, &scalars, &mut rng).unwrap();
        validate_system(&block).unwrap();

        let triples = vec![
            [Rat::new(1, 2), Rat::new(1, 3), Rat::new(1, 5)],
            [Rat::new(-1, 2), Rat::new(1, 3), Rat::new(-1, 5)],
            [Rat::zero(), Rat::new(-2, 3), Rat::zero()],
        ];
        let diag = rank3_diagonal(&pts(&[0, 1, 2]), &triples, &mut rng).unwrap();
        validate_system(&diag).unwrap();

        let cauchy = rank3_cauchy(
            &pts(&[0, 1, 2]),
            &[Rat::new(1, 3), Rat::new(1, 7), Rat::new(-1, 2)],
            &Rat::new(1, 11),
            &[Rat::new(1, 4), Rat::new(1, 9), Rat::new(-2, 5)],
        );
        let cauchy = cauchy.unwrap();
        let report = validate_system(&cauchy).unwrap();
        let mut third = report.eigenvalues[2].clone();
        third.sort();
        let mut want = vec![Rat::new(1, 4), Rat::new(1, 9), Rat::new(-2, 5)];
        want.sort();
        assert_eq!(third, want);
    }

    #[test]
    fn random_hodge_systems_are_valid_and_seeded() {
        let cfg = RandomHodgeConfig::default();
        let mut a = SampleRng::seed_from_u64(99);
        let mut b = SampleRng::seed_from_u64(99);
        for _ in 0..20 {
            let ea = random_hodge_system(&mut a, &cfg);
            let eb = random_hodge_system(&mut b, &cfg);
            assert_eq!(ea.rank(), eb.rank());
            assert_eq!(ea.degree(), eb.degree());
            assert!(ea.rank() >= 1 && ea.rank() <= 3);
        }
    }
}
