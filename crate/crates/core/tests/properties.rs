//! Property tests for the structural invariants: parser round trips,
//! Möbius composition versus matrix products, Schwarz-Pick contraction on
//! catalog maps, and Koenigs round trips under random targets.

mod common;

use discflow::catalog;
use discflow::formula::{parse, Expr};
use discflow::map::{MapDescriptor, Mobius};
use discflow::metric::rho_disc;
use discflow::util::disc_grid;
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::Arc;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Strategy for expressions in the parseable subset (nonnegative real
/// literals plus the imaginary unit), so printing round-trips structurally.
fn parseable_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        (0.0f64..4.0).prop_map(|v| Expr::Const(c(v, 0.0))),
        Just(Expr::Const(c(0.0, 1.0))),
    ];
    leaf.prop_recursive(5, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Add(Arc::new(a), Arc::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Sub(Arc::new(a), Arc::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Mul(Arc::new(a), Arc::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Div(Arc::new(a), Arc::new(b))),
            (inner.clone(), -3i32..4).prop_map(|(a, n)| Expr::Pow(Arc::new(a), n)),
            inner.clone().prop_map(|a| Expr::Neg(Arc::new(a))),
            inner.clone().prop_map(|a| Expr::Exp(Arc::new(a))),
            inner.clone().prop_map(|a| Expr::Log(Arc::new(a))),
            inner.clone().prop_map(|a| Expr::Sqrt(Arc::new(a))),
            inner.clone().prop_map(|a| Expr::Sin(Arc::new(a))),
            inner.prop_map(|a| Expr::Cos(Arc::new(a))),
        ]
    })
}

fn small_complex() -> impl Strategy<Value = Complex64> {
    (-0.9f64..0.9, -0.9f64..0.9).prop_map(|(re, im)| c(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_structural_identity(e in parseable_expr()) {
        let printed = e.to_string();
        let reparsed = parse(&printed).unwrap_or_else(|err| {
            panic!("printed form `{printed}` failed to parse: {err}")
        });
        prop_assert_eq!(e, reparsed);
    }

    #[test]
    fn mobius_composition_is_matrix_product(
        a in small_complex(), b in small_complex(),
        d in small_complex(), z in small_complex(),
    ) {
        // build two well-conditioned maps; skip degenerate draws
        let m1 = Mobius::new(c(1.0, 0.0) + a, b, b * 0.3, c(1.2, 0.0) + d);
        let m2 = Mobius::new(c(1.1, 0.0) + d, a * 0.5, a * 0.2, c(1.0, 0.0) + b);
        prop_assume!(m1.is_ok() && m2.is_ok());
        let (m1, m2) = (m1.unwrap(), m2.unwrap());
        let comp = m1.compose(&m2);
        let inner = m2.eval(z);
        prop_assume!(inner.is_ok());
        let via_eval = m1.eval(inner.unwrap());
        let via_matrix = comp.eval(z);
        prop_assume!(via_eval.is_ok() && via_matrix.is_ok());
        prop_assert!((via_eval.unwrap() - via_matrix.unwrap()).norm() < 1e-12);
    }

    #[test]
    fn schwarz_pick_on_catalog_maps(zi in 0usize..20, wi in 0usize..20, entry in 0usize..4) {
        let names = ["koebe-zero-step", "strip-minus-slits", "mobius-hyperbolic", "elliptic"];
        let m = catalog::build(names[entry]).unwrap().principal_map().unwrap();
        let grid = disc_grid(20, 0.88);
        let (z, w) = (grid[zi], grid[wi]);
        let (fz, fw) = (m.eval(z).unwrap(), m.eval(w).unwrap());
        let lhs = rho_disc(fz, fw).unwrap();
        let rhs = rho_disc(z, w).unwrap();
        prop_assert!(lhs <= rhs + 1e-9, "{}: rho {} > {}", names[entry], lhs, rhs);
    }

    #[test]
    fn koenigs_round_trip_on_random_interior_points(zi in 0usize..50, entry in 0usize..2) {
        let names = ["koebe-zero-step", "strip-minus-slits"];
        let spec = catalog::build(names[entry]).unwrap().semigroup().unwrap();
        let k = spec.koenigs().unwrap();
        let z = disc_grid(50, 0.95)[zi];
        let w = k.eval(z).unwrap();
        let back = k.invert(w, z).unwrap();
        prop_assert!((back - z).norm() < 1e-9);
    }

    #[test]
    fn iterate_additivity_on_descriptors(n in 0u32..5, m in 0u32..5, zi in 0usize..12) {
        let phi = MapDescriptor::Mobius(
            Mobius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap(),
        );
        let z = disc_grid(12, 0.8)[zi];
        let lhs = phi.iterate_n(n + m).eval(z).unwrap();
        let rhs = phi.iterate_n(n).eval(phi.iterate_n(m).eval(z).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn dual_derivative_matches_central_differences() {
    // 200 random (expression, point) pairs at depth <= 6 against the
    // central finite-difference oracle with h = 1e-5
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xd1ff_0001);
    let mut accepted = 0usize;
    let h = 1e-5;
    while accepted < 200 {
        let Some((e, z)) = common::sample_pair(&mut rng) else {
            continue;
        };
        let d = e.eval_dual(z).unwrap();
        let fp = e.eval(z + c(h, 0.0)).unwrap();
        let fm = e.eval(z - c(h, 0.0)).unwrap();
        let fd = (fp - fm) / c(2.0 * h, 0.0);
        assert!(
            (d.deriv - fd).norm() <= 1e-6 * (1.0 + d.deriv.norm()),
            "expr {e}, z {z}: dual {} vs fd {}",
            d.deriv,
            fd
        );
        accepted += 1;
    }
}
