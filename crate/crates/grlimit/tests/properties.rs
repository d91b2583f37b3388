//! Property-based tests for the exact-arithmetic invariants: kernel bases
//! annihilate exactly with unit minor gcd, gcd is a commutative monoid
//! operation up to monic normalization, saturation is idempotent, and
//! parabolic degrees are additive along quotients.

use proptest::prelude::*;

use grlimit::bundle::{
    check_subbundle, induced_quotient_flags, kernel_subbundle, par_degree, par_degree_full,
    quotient, saturate_span, BundleMap, FlagStep, ParabolicData, PointFlag, SplitBundle,
};
use grlimit::exactalg::{minimal_kernel_basis, poly_gcd, solve_polynomial, Poly, PolyMatrix, Rat};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rat::new(n, d))
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rat(), 0..=max_deg + 1).prop_map(Poly::from_coeffs)
}

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = PolyMatrix> {
    prop::collection::vec(small_poly(3), rows * cols)
        .prop_map(move |data| PolyMatrix::new(rows, cols, data))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gcd_is_commutative_and_monic(a in small_poly(4), b in small_poly(4)) {
        let g1 = poly_gcd(&a, &b);
        let g2 = poly_gcd(&b, &a);
        prop_assert_eq!(&g1, &g2);
        if !g1.is_zero() {
            prop_assert!(g1.leading_coeff().unwrap().is_one());
            prop_assert!(a.exact_div(&g1).is_some());
            prop_assert!(b.exact_div(&g1).is_some());
        }
    }

    #[test]
    fn gcd_associates(a in small_poly(3), b in small_poly(3), c in small_poly(3)) {
        let left = poly_gcd(&poly_gcd(&a, &b), &c);
        let right = poly_gcd(&a, &poly_gcd(&b, &c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn kernel_basis_annihilates_exactly(m in small_matrix(2, 3)) {
        let k = minimal_kernel_basis(&m);
        prop_assert!(m.mul(&k).is_zero(), "kernel must annihilate exactly");
        if k.cols() > 0 {
            let g = k.minor_gcd(k.cols()).unwrap();
            prop_assert_eq!(g.degree(), Some(0), "kernel basis has unit minor gcd");
        }
        // rank-nullity over the function field
        prop_assert_eq!(m.rank() + k.cols(), 3);
    }

    #[test]
    fn saturation_is_idempotent_and_degreewise_monotone(m in small_matrix(2, 1)) {
        prop_assume!(!m.is_zero());
        let target = SplitBundle::trivial(2);
        let sat = saturate_span(&m, &target).unwrap();
        prop_assert!(check_subbundle(sat.inclusion()).valid());
        let again = saturate_span(sat.matrix(), &target).unwrap();
        prop_assert_eq!(again.source().degrees(), sat.source().degrees());
        // the column span is unchanged: each original column solves through
        // the saturated basis
        prop_assert!(solve_polynomial(sat.matrix(), &m).is_some());
        // degree never drops below the raw column degree bound
        let raw_deg: i64 = -(m.col(0)
            .iter()
            .filter_map(|p| p.degree())
            .max()
            .unwrap_or(0) as i64);
        prop_assert!(sat.degree() >= raw_deg);
    }

    #[test]
    fn kernel_composes_to_zero_through_inclusion(m in small_matrix(2, 2)) {
        let source = SplitBundle::trivial(2);
        let target = SplitBundle::new(vec![4, 4]);
        let map = BundleMap::new(source, target, 0, m).unwrap();
        let k = kernel_subbundle(&map);
        prop_assert!(map.matrix.mul(k.matrix()).is_zero());
        prop_assert!(check_subbundle(k.inclusion()).valid());
    }

    #[test]
    fn parabolic_additivity_on_random_lines(
        c0 in small_rat(),
        c1 in small_rat(),
        w in 1i64..=5,
    ) {
        // a line through (c0, c1) + t e1 inside the trivial rank-two bundle
        let col = vec![
            Poly::from_coeffs(vec![c0, Rat::one()]),
            Poly::constant(c1),
        ];
        let matrix = PolyMatrix::from_cols(vec![col]);
        let target = SplitBundle::trivial(2);
        let sub = saturate_span(&matrix, &target).unwrap();
        prop_assume!(sub.rank() == 1);
        let flags = ParabolicData {
            flags: (0..3)
                .map(|i| PointFlag {
                    point: Rat::from_int(i),
                    steps: vec![
                        FlagStep {
                            weight: Rat::new(w, 6),
                            vectors: vec![vec![Rat::one(), Rat::zero()]],
                        },
                        FlagStep {
                            weight: Rat::zero(),
                            vectors: vec![vec![Rat::zero(), Rat::one()]],
                        },
                    ],
                })
                .collect(),
        };
        let (q, proj) = quotient(&sub).unwrap();
        let qflags = induced_quotient_flags(&flags, &proj);
        let total = par_degree_full(&target, &flags);
        let split = par_degree(&sub, &flags) + par_degree_full(&q, &qflags);
        prop_assert_eq!(split, total);
    }
}
