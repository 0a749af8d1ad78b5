//! Shared helpers for the integration test suites: a deterministic random
//! expression generator with singular-set avoidance, and the central
//! finite-difference derivative oracle.

use discflow::formula::Expr;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Random expression tree of the given depth. Leaves are the variable or a
/// small complex constant; inner nodes draw from the full operator set.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 {
        return if rng.gen_bool(0.6) {
            Expr::Var
        } else {
            Expr::Const(Complex64::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ))
        };
    }
    let a = || Arc::new(random_expr(&mut rng.clone(), 0));
    let _ = a;
    match rng.gen_range(0..12u8) {
        0 => Expr::Add(
            Arc::new(random_expr(rng, depth - 1)),
            Arc::new(random_expr(rng, depth - 1)),
        ),
        1 => Expr::Sub(
            Arc::new(random_expr(rng, depth - 1)),
            Arc::new(random_expr(rng, depth - 1)),
        ),
        2 => Expr::Mul(
            Arc::new(random_expr(rng, depth - 1)),
            Arc::new(random_expr(rng, depth - 1)),
        ),
        3 => Expr::Div(
            Arc::new(random_expr(rng, depth - 1)),
            Arc::new(random_expr(rng, depth - 1)),
        ),
        4 => Expr::Pow(Arc::new(random_expr(rng, depth - 1)), rng.gen_range(2..4)),
        5 => Expr::Neg(Arc::new(random_expr(rng, depth - 1))),
        6 => Expr::Exp(Arc::new(random_expr(rng, depth - 1))),
        7 => Expr::Log(Arc::new(random_expr(rng, depth - 1))),
        8 => Expr::Sqrt(Arc::new(random_expr(rng, depth - 1))),
        9 => Expr::Sin(Arc::new(random_expr(rng, depth - 1))),
        10 => Expr::Cos(Arc::new(random_expr(rng, depth - 1))),
        _ => Expr::Pow(Arc::new(random_expr(rng, depth - 1)), -rng.gen_range(1..3)),
    }
}

/// Recursive safety margin: every divisor, log/sqrt argument and negative
/// power base must stay well away from its singular set (and from the
/// branch cut for the principal-branch functions), so that a central
/// difference with h = 1e-5 never crosses a cut.
pub fn safe_at(e: &Expr, z: Complex64) -> bool {
    fn value(e: &Expr, z: Complex64) -> Option<Complex64> {
        e.eval(z).ok()
    }
    fn off_cut(v: Complex64) -> bool {
        // distance from the closed negative real axis
        if v.re >= 0.0 {
            v.norm() > 1e-2
        } else {
            v.im.abs() > 1e-2 * (1.0 + v.norm())
        }
    }
    match e {
        Expr::Var | Expr::Const(_) => true,
        Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) => safe_at(x, z) && safe_at(y, z),
        Expr::Div(x, y) => {
            safe_at(x, z)
                && safe_at(y, z)
                && value(y, z).map_or(false, |v| v.norm() > 1e-2)
        }
        Expr::Pow(x, n) => {
            safe_at(x, z) && (*n >= 0 || value(x, z).map_or(false, |v| v.norm() > 1e-2))
        }
        Expr::Neg(x) | Expr::Sin(x) | Expr::Cos(x) | Expr::Exp(x) => safe_at(x, z),
        Expr::Log(x) | Expr::Sqrt(x) => {
            safe_at(x, z) && value(x, z).map_or(false, off_cut)
        }
    }
}

/// Draw a (expression, point) pair whose value and derivative are tame,
/// whose finite-difference stencil stays off every cut, and whose third
/// derivative (estimated by differences) is small enough for the central
/// difference oracle at h = 1e-5 to be trustworthy.
pub fn sample_pair(rng: &mut ChaCha8Rng) -> Option<(Expr, Complex64)> {
    let depth = rng.gen_range(1..=6usize);
    let e = random_expr(rng, depth);
    let z = Complex64::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
    let h = 1e-5;
    for step in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let probe = z + Complex64::new(step * h, 0.0);
        if !safe_at(&e, probe) {
            return None;
        }
        let d = e.eval_dual(probe).ok()?;
        if !d.value.re.is_finite()
            || !d.deriv.re.is_finite()
            || d.value.norm() > 1e3
            || d.deriv.norm() > 1e3
        {
            return None;
        }
    }
    // third-derivative estimate bounds the oracle's truncation error
    let hh = Complex64::new(h, 0.0);
    let f2p = e.eval(z + hh * 2.0).ok()?;
    let f1p = e.eval(z + hh).ok()?;
    let f1m = e.eval(z - hh).ok()?;
    let f2m = e.eval(z - hh * 2.0).ok()?;
    let third = (f2p - f1p * 2.0 + f1m * 2.0 - f2m) / (hh * hh * hh * 2.0);
    if third.norm() > 2e4 {
        return None;
    }
    Some((e, z))
}
