//! Small shared numerics: deterministic grids, sequence acceleration,
//! one-dimensional minimization, quadrature, and an adaptive RK45 stepper.

use num_complex::Complex64;

/// Deterministic sunflower grid of `n` points in the closed disc of radius
/// `rmax`. Points are well spread and never repeat between calls.
pub fn disc_grid(n: usize, rmax: f64) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|j| {
            let r = rmax * (((j as f64) + 0.5) / n as f64).sqrt();
            let th = golden * j as f64;
            Complex64::from_polar(r, th)
        })
        .collect()
}

/// Deterministic grid in the right half-plane, spread in angle and log-radius.
pub fn right_half_plane_grid(n: usize) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|j| {
            let t = ((j as f64) + 0.5) / n as f64;
            let r = 0.3 * (30.0_f64).powf(t);
            let th = 0.85 * std::f64::consts::FRAC_PI_2 * ((golden * j as f64).sin());
            Complex64::from_polar(r, th)
        })
        .collect()
}

/// Aitken delta-squared extrapolation of the last usable triple of a
/// sequence. Falls back to the final element when the denominator degenerates.
pub fn aitken(seq: &[Complex64]) -> Complex64 {
    if seq.len() < 3 {
        return *seq.last().expect("aitken needs a non-empty sequence");
    }
    let n = seq.len();
    let (a, b, c) = (seq[n - 3], seq[n - 2], seq[n - 1]);
    let d1 = b - a;
    let d2 = c - b;
    let den = d2 - d1;
    if den.norm() < 1e-14 * (d1.norm() + d2.norm()).max(1e-300) {
        return c;
    }
    c - d2 * d2 / den
}

/// Richardson extrapolation for a scalar sequence `f(h_k)` on the dyadic grid
/// `h_k = h_0 * 2^{-k}`, assuming an error expansion in integer powers of `h`.
/// Returns the extrapolated limit together with a crude error indicator.
pub fn richardson_dyadic(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n >= 2, "richardson needs at least two samples");
    let mut table: Vec<Vec<f64>> = vec![values.to_vec()];
    let levels = n.min(6);
    for j in 1..levels {
        let prev = &table[j - 1];
        let factor = 2f64.powi(j as i32);
        let row: Vec<f64> = (0..prev.len() - 1)
            .map(|k| (factor * prev[k + 1] - prev[k]) / (factor - 1.0))
            .collect();
        table.push(row);
    }
    // best estimate: last entry of the deepest row; error indicator from the
    // final two rows
    let deep = table.last().unwrap();
    let best = *deep.last().unwrap();
    let err = if table.len() >= 2 {
        let above = &table[table.len() - 2];
        (best - *above.last().unwrap()).abs()
    } else {
        f64::INFINITY
    };
    (best, err)
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Adaptive Simpson quadrature of a complex-valued function on [0, 1].
pub fn adaptive_simpson<F>(f: &F, tol: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
        (fa + fm * 4.0 + fb) * (h / 6.0)
    }
    fn recurse<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() < 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
    }
    let fa = f(0.0);
    let fm = f(0.5);
    let fb = f(1.0);
    let whole = simpson(fa, fm, fb, 1.0);
    recurse(f, 0.0, 1.0, fa, fm, fb, whole, tol, 48)
}

/// One adaptive Dormand-Prince 5(4) integration of `dw/dt = g(w)` from
/// `t = 0` to `t = t_end` with local tolerance `tol`.
pub fn rk45<F>(g: &F, w0: Complex64, t_end: f64, tol: f64) -> Result<Complex64, crate::error::Error>
where
    F: Fn(Complex64) -> Result<Complex64, crate::error::Error>,
{
    if t_end == 0.0 {
        return Ok(w0);
    }
    let mut w = w0;
    let mut t = 0.0_f64;
    let mut h = (t_end / 16.0).min(0.1).max(1e-6);
    let mut steps = 0usize;
    while t < t_end {
        if steps > 2_000_000 {
            return Err(crate::error::Error::StepSizeUnderflow);
        }
        steps += 1;
        if t + h > t_end {
            h = t_end - t;
        }
        // a stage landing outside the evaluable region rejects the step
        let attempt = (|| -> Result<(Complex64, f64), crate::error::Error> {
            let k1 = g(w)?;
            let k2 = g(w + k1 * (h / 5.0))?;
            let k3 = g(w + k1 * (3.0 * h / 40.0) + k2 * (9.0 * h / 40.0))?;
            let k4 =
                g(w + k1 * (44.0 * h / 45.0) - k2 * (56.0 * h / 15.0) + k3 * (32.0 * h / 9.0))?;
            let k5 = g(w
                + k1 * (19372.0 * h / 6561.0)
                - k2 * (25360.0 * h / 2187.0)
                + k3 * (64448.0 * h / 6561.0)
                - k4 * (212.0 * h / 729.0))?;
            let k6 = g(w
                + k1 * (9017.0 * h / 3168.0)
                - k2 * (355.0 * h / 33.0)
                + k3 * (46732.0 * h / 5247.0)
                + k4 * (49.0 * h / 176.0)
                - k5 * (5103.0 * h / 18656.0))?;
            let w5 = w
                + k1 * (35.0 * h / 384.0)
                + k3 * (500.0 * h / 1113.0)
                + k4 * (125.0 * h / 192.0)
                - k5 * (2187.0 * h / 6784.0)
                + k6 * (11.0 * h / 84.0);
            let k7 = g(w5)?;
            let w4 = w
                + k1 * (5179.0 * h / 57600.0)
                + k3 * (7571.0 * h / 16695.0)
                + k4 * (393.0 * h / 640.0)
                - k5 * (92097.0 * h / 339200.0)
                + k6 * (187.0 * h / 2100.0)
                + k7 * (h / 40.0);
            Ok((w5, (w5 - w4).norm()))
        })();
        match attempt {
            Ok((w5, err)) => {
                let scale = tol * (1.0 + w.norm());
                if err <= scale {
                    t += h;
                    w = w5;
                }
                let factor = if err > 0.0 {
                    0.9 * (scale / err).powf(0.2)
                } else {
                    4.0
                };
                h *= factor.clamp(0.2, 4.0);
            }
            Err(_) => {
                h *= 0.25;
            }
        }
        if h < 1e-14 {
            return Err(crate::error::Error::StepSizeUnderflow);
        }
    }
    Ok(w)
}

/// Least-squares fit of `y ~ a*x + c` with `a` real and `c` complex.
/// Returns `(a, c, sup_residual)`.
pub fn fit_real_affine(x: &[Complex64], y: &[Complex64]) -> (f64, Complex64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    // normal equations over the reals for unknowns (a, Re c, Im c)
    let sum_xx: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    let sum_x: Complex64 = x.iter().sum();
    let sum_xy: f64 = x
        .iter()
        .zip(y)
        .map(|(xv, yv)| (xv.conj() * yv).re)
        .sum();
    let sum_y: Complex64 = y.iter().sum();
    // [ sum_xx   Re sum_x   Im sum_x ] [a   ]   [ sum_xy  ]
    // [ Re sum_x n          0        ] [Re c] = [ Re sum_y]
    // [ Im sum_x 0          n        ] [Im c]   [ Im sum_y]
    let (p, q) = (sum_x.re, sum_x.im);
    let det = sum_xx * n * n - n * (p * p + q * q);
    let a = if det.abs() < 1e-300 {
        1.0
    } else {
        (sum_xy * n * n - n * (p * sum_y.re + q * sum_y.im)) / det
    };
    let c = (sum_y - sum_x * a) / n;
    let sup = x
        .iter()
        .zip(y)
        .map(|(xv, yv)| (yv - (xv * a + c)).norm())
        .fold(0.0, f64::max);
    (a, c, sup)
}

/// Uniform f64 in [0,1) from a raw 64-bit draw.
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
