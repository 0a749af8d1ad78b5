//! Numerical construction of holomorphic models: normalized iterates for
//! parabolic maps of positive hyperbolic step, classical iteration for
//! elliptic maps, Abel residuals, and Newton inversion of Koenigs maps.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{Dual, Expr};
use crate::map::{
    BaseSpace, DomainTag, Holomorphic, Inversion, KoenigsDescriptor, KoenigsFn, MapDescriptor,
    Mobius, OmegaPredicate,
};
use crate::metric::{classify, MapKind};
use crate::util;

/// Success threshold for Newton inversion, relative to the target size.
fn newton_tol(w: Complex64) -> f64 {
    1e-11 * (1.0 + w.norm())
}

/// Newton iteration z_{k+1} = z_k - (h(z_k) - w)/h'(z_k) from `seed`,
/// damping on stalls and keeping iterates inside the unit disc.
pub fn newton_invert(k: &KoenigsDescriptor, w: Complex64, seed: Complex64) -> Result<Complex64> {
    newton_core(k, w, seed).or_else(|_| {
        // fallback: path continuation from the known preimage `seed` along
        // the segment h(seed) -> w (horizontal for flow targets, which stays
        // inside Omega by forward invariance)
        let mut z = seed;
        let start = k.eval(z)?;
        let steps = 48;
        for j in 1..=steps {
            let target = start + (w - start) * (j as f64 / steps as f64);
            z = newton_core(k, target, z)?;
        }
        Ok(z)
    })
}

fn newton_core(k: &KoenigsDescriptor, w: Complex64, seed: Complex64) -> Result<Complex64> {
    let mut z = if seed.norm() < 1.0 {
        seed
    } else {
        seed / (seed.norm() + 1e-9)
    };
    let mut best = z;
    let mut best_res = f64::INFINITY;
    let mut res = {
        let d = k.eval_dual(z)?;
        (d.value - w).norm()
    };
    for _ in 0..60 {
        let d = k.eval_dual(z)?;
        let r = d.value - w;
        if r.norm() < best_res {
            best_res = r.norm();
            best = z;
        }
        if r.norm() <= 0.01 * newton_tol(w) {
            return Ok(z);
        }
        if d.deriv.norm() < 1e-300 {
            break;
        }
        let step = r / d.deriv;
        // near the boundary the evaluation noise floors the residual while
        // h' is huge; a sub-ulp Newton step means the root is exact to
        // machine precision
        if step.norm() < 5e-15 * (1.0 + z.norm()) {
            return Ok(z);
        }
        // damped update: shrink until the residual improves and the iterate
        // stays strictly inside the disc
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let zn = z - step * alpha;
            if zn.norm() >= 1.0 - 1e-15 {
                alpha *= 0.5;
                continue;
            }
            match k.eval(zn) {
                Ok(v) if (v - w).norm() < r.norm() => {
                    z = zn;
                    res = (v - w).norm();
                    accepted = true;
                    break;
                }
                Ok(_) | Err(_) => {
                    alpha *= 0.5;
                }
            }
        }
        if !accepted {
            break;
        }
    }
    if res <= newton_tol(w) {
        Ok(z)
    } else if best_res <= newton_tol(w) {
        Ok(best)
    } else {
        Err(Error::InversionFailed {
            best,
            residual: best_res,
        })
    }
}

/// Invert a Koenigs map at `w`, checking the Omega predicate first when it
/// is exact. `seed` starts the Newton iteration.
pub fn invert_koenigs(k: &KoenigsDescriptor, w: Complex64, seed: Complex64) -> Result<Complex64> {
    if k.omega.is_exact() && !k.omega.contains(w) {
        return Err(Error::OutsideOmega);
    }
    match &k.inverse {
        Inversion::Formula(e) => e.eval(w),
        Inversion::Newton => newton_invert(k, w, seed),
    }
}

/// Sup of |h(f(z)) - h(z) - step| over the grid.
pub fn abel_residual(
    h: &dyn Holomorphic,
    f: &MapDescriptor,
    step: Complex64,
    grid: &[Complex64],
) -> Result<f64> {
    let mut sup = 0.0_f64;
    for &z in grid {
        let lhs = h.eval(f.eval(z)?)?;
        let rhs = h.eval(z)? + step;
        sup = sup.max((lhs - rhs).norm());
    }
    Ok(sup)
}

/// Pommerenke's normalized-iterate model for a univalent parabolic self-map
/// of the right half-plane of positive hyperbolic step with Denjoy-Wolff
/// point at infinity: h_n(w) = (f^n(w) - i Im f^n(w0)) / Re f^n(w0)
/// converges to h with h(f(w)) = h(w) + ib and h(w0) = 1.
pub struct PommerenkeModel {
    pub f: MapDescriptor,
    pub w0: Complex64,
    /// Translation step: h ∘ f = h + ib, b real nonzero.
    pub b: f64,
    /// Iteration depth the evaluator uses.
    pub n_used: usize,
    /// sup |h(f(w)) - h(w) - ib| over the sample grid.
    pub residual: f64,
    /// (w, h(w)) samples on the construction grid.
    pub grid: Vec<(Complex64, Complex64)>,
    /// Orbit normalization at depth n_used: x = Re f^n(w0), y = Im f^n(w0).
    pub norm_x: f64,
    pub norm_y: f64,
    /// Raw limit estimate of (Im f^{n+1}(w0) - Im f^n(w0)) / Re f^n(w0).
    pub b_orbit_estimate: f64,
    pub converged: bool,
}

impl PommerenkeModel {
    /// h(w) at the stored depth, with derivative, by dual propagation
    /// through the iterates.
    pub fn eval_dual(&self, w: Complex64) -> Result<Dual> {
        let mut d = Dual::var(w);
        for _ in 0..self.n_used {
            d = self.f.eval_dual_from(d)?;
        }
        let x = Complex64::new(self.norm_x, 0.0);
        Ok(Dual {
            value: (d.value - Complex64::new(0.0, self.norm_y)) / x,
            deriv: d.deriv / x,
        })
    }
}

impl Holomorphic for PommerenkeModel {
    fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        PommerenkeModel::eval_dual(self, z)
    }
}

/// Run the Pommerenke construction for `f` (a map of the right half-plane)
/// normalized at `w0`. The class precondition is verified by classifying the
/// Cayley transport of `f` to the disc.
pub fn pommerenke_koenigs(
    f: &MapDescriptor,
    w0: Complex64,
    n_max: usize,
) -> Result<PommerenkeModel> {
    verify_parabolic_positive_halfplane(f)?;
    if w0.re <= 0.0 {
        return Err(Error::OutsideDomain);
    }

    let grid = util::right_half_plane_grid(64);
    let mut pts: Vec<Complex64> = grid.clone();
    let mut orbit0 = w0;
    let mut prev_samples: Option<Vec<Complex64>> = None;
    let mut n = 0usize;
    let mut last_change = f64::INFINITY;
    let mut b_orbit = f64::NAN;
    let block = 8usize;

    let samples_at =
        |pts: &[Complex64], x: f64, y: f64| -> Vec<Complex64> {
            pts.iter()
                .map(|&u| (u - Complex64::new(0.0, y)) / Complex64::new(x, 0.0))
                .collect()
        };

    let mut result: Option<(usize, f64, f64, Vec<Complex64>)> = None;
    while n < n_max {
        for _ in 0..block {
            for p in pts.iter_mut() {
                *p = f.eval(*p)?;
            }
            let next0 = f.eval(orbit0)?;
            b_orbit = (next0.im - orbit0.im) / orbit0.re;
            orbit0 = next0;
            n += 1;
        }
        let (x, y) = (orbit0.re, orbit0.im);
        if x.abs() < 1e-300 {
            return Err(Error::NumericalUnderflow);
        }
        let samples = samples_at(&pts, x, y);
        if let Some(prev) = &prev_samples {
            last_change = samples
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
        }
        // Abel residual with the current depth: h_n(f(w)) - h_n(w) is one
        // more iterate of the orbit, rescaled.
        let mut abel_vals = Vec::with_capacity(pts.len());
        for (&u_n, &w_start) in pts.iter().zip(grid.iter()) {
            let _ = w_start;
            let fu = f.eval(u_n)?;
            abel_vals.push((fu - u_n) / Complex64::new(x, 0.0));
        }
        let b_grid: f64 = abel_vals.iter().map(|v| v.im).sum::<f64>() / abel_vals.len() as f64;
        let residual = abel_vals
            .iter()
            .map(|v| (v - Complex64::new(0.0, b_grid)).norm())
            .fold(0.0, f64::max);
        if last_change < 1e-6 && residual < 1e-4 {
            result = Some((n, b_grid, residual, samples));
            break;
        }
        prev_samples = Some(samples);
    }

    let (n_used, b, residual, samples, converged) = match result {
        Some((n, b, r, s)) => (n, b, r, s, true),
        None => {
            let (x, y) = (orbit0.re, orbit0.im);
            let samples = samples_at(&pts, x, y);
            let mut sup = 0.0_f64;
            let mut b_sum = 0.0_f64;
            for &u_n in pts.iter() {
                let fu = f.eval(u_n)?;
                let v = (fu - u_n) / Complex64::new(x, 0.0);
                b_sum += v.im;
            }
            let b = b_sum / pts.len() as f64;
            for &u_n in pts.iter() {
                let fu = f.eval(u_n)?;
                let v = (fu - u_n) / Complex64::new(x, 0.0);
                sup = sup.max((v - Complex64::new(0.0, b)).norm());
            }
            (n, b, sup, samples, false)
        }
    };

    if b == 0.0 || !b.is_finite() {
        return Err(Error::DivergentQuotient);
    }

    let model = PommerenkeModel {
        f: f.clone(),
        w0,
        b,
        n_used,
        residual,
        grid: grid.into_iter().zip(samples).collect(),
        norm_x: orbit0.re,
        norm_y: orbit0.im,
        b_orbit_estimate: b_orbit,
        converged,
    };
    if !model.converged {
        return Err(Error::SlowConvergence {
            depth: n_max,
            residual: model.residual,
        });
    }
    Ok(model)
}

fn verify_parabolic_positive_halfplane(f: &MapDescriptor) -> Result<()> {
    // transport to the disc through the Cayley map at tau = 1 and classify
    let cayley = MapDescriptor::Mobius(Mobius::cayley(Complex64::new(1.0, 0.0))?);
    let phi = MapDescriptor::conjugate(cayley, f.clone())?;
    let report = classify(&phi)?;
    match report.kind {
        MapKind::ParabolicPositiveStep => {}
        other => {
            return Err(Error::WrongClass {
                expected: "parabolic of positive hyperbolic step with Denjoy-Wolff at infinity",
                found: format!("{other:?}"),
            })
        }
    }
    if (report.dw_point - Complex64::new(1.0, 0.0)).norm() > 1e-4 {
        return Err(Error::WrongClass {
            expected: "Denjoy-Wolff point at infinity on the half-plane",
            found: format!("disc Denjoy-Wolff point {}", report.dw_point),
        });
    }
    Ok(())
}

/// On-demand evaluator for the classical elliptic Koenigs map
/// h = lim lambda^{-n} (f^n - tau), normalized with h'(tau) = 1.
pub struct EllipticKoenigs {
    pub f: MapDescriptor,
    pub tau: Complex64,
    pub lambda: Complex64,
    pub n_max: usize,
}

impl Holomorphic for EllipticKoenigs {
    fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        let mut d = Dual::var(z);
        let mut scale = Complex64::new(1.0, 0.0);
        let mut prev: Option<Dual> = None;
        for n in 0..self.n_max {
            let h_n = Dual {
                value: (d.value - self.tau) / scale,
                deriv: d.deriv / scale,
            };
            if let Some(p) = prev {
                if (h_n.value - p.value).norm() < 1e-10 * (1.0 + h_n.value.norm())
                    && (h_n.deriv - p.deriv).norm() < 1e-9 * (1.0 + h_n.deriv.norm())
                {
                    return Ok(h_n);
                }
            }
            prev = Some(h_n);
            if n + 1 == self.n_max {
                break;
            }
            d = self.f.eval_dual_from(d)?;
            scale *= self.lambda;
        }
        Err(Error::SlowConvergence {
            depth: self.n_max,
            residual: f64::NAN,
        })
    }
}

/// Koenigs linearization of an elliptic non-automorphism around its interior
/// fixed point: h(f(z)) = lambda h(z) with h'(tau) = 1.
pub fn elliptic_koenigs(
    f: &MapDescriptor,
    tau: Complex64,
    n_max: usize,
) -> Result<KoenigsDescriptor> {
    if tau.norm() >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    let at_tau = f.eval_dual(tau)?;
    if (at_tau.value - tau).norm() > 1e-9 {
        return Err(Error::NotAFixedPoint {
            point: tau,
            displacement: (at_tau.value - tau).norm(),
        });
    }
    let lambda = at_tau.deriv;
    if lambda.norm() < 1e-14 || lambda.norm() > 1.0 - 1e-8 {
        return Err(Error::WrongClass {
            expected: "elliptic non-automorphism (0 < |f'(tau)| < 1)",
            found: format!("multiplier {lambda}"),
        });
    }
    let eval = EllipticKoenigs {
        f: f.clone(),
        tau,
        lambda,
        n_max,
    };
    Ok(KoenigsDescriptor {
        forward: KoenigsFn::Numeric(Arc::new(eval)),
        inverse: Inversion::Newton,
        base_space: BaseSpace::Plane,
        omega: OmegaPredicate::Unknown,
    })
}

/// Disc-level Koenigs map of a parabolic positive-step self-map, obtained
/// by transporting a half-plane model through the Cayley map:
/// h_disc = h(C(z)) / (i b), so that h_disc ∘ phi = h_disc + 1. The model
/// base space is the upper half-plane when b < 0 and the lower one when
/// b > 0.
pub struct DiscTransportedModel {
    pub model: Arc<PommerenkeModel>,
    pub cayley: Mobius,
}

impl Holomorphic for DiscTransportedModel {
    fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        let c = self.cayley.eval_dual(crate::formula::Dual::var(z))?;
        let h = self.model.eval_dual(c.value)?;
        let scale = Complex64::new(1.0, 0.0) / Complex64::new(0.0, self.model.b);
        Ok(Dual {
            value: scale * h.value,
            deriv: scale * h.deriv * c.deriv,
        })
    }
}

/// Wrap a half-plane model as a disc-level Koenigs descriptor for the
/// Cayley-conjugated map. Returns the descriptor together with the flag
/// `base_upper` (true when the model base space is the upper half-plane).
pub fn disc_koenigs_from_model(
    model: Arc<PommerenkeModel>,
    tau: Complex64,
) -> Result<(KoenigsDescriptor, bool)> {
    let base_upper = model.b < 0.0;
    let transported = DiscTransportedModel {
        model,
        cayley: Mobius::cayley(tau)?,
    };
    Ok((
        KoenigsDescriptor {
            forward: KoenigsFn::Numeric(Arc::new(transported)),
            inverse: Inversion::Newton,
            base_space: if base_upper {
                BaseSpace::UpperHalfPlane
            } else {
                BaseSpace::LowerHalfPlane
            },
            omega: OmegaPredicate::Unknown,
        },
        base_upper,
    ))
}

/// Koenigs map by quadrature of the reciprocal generator:
/// h(z) = ∫_0^z dζ / G(ζ) along a radial-then-circular path. The derivative
/// is exact: h' = 1/G.
pub struct QuadratureKoenigs {
    pub g: Arc<Expr>,
}

impl Holomorphic for QuadratureKoenigs {
    fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        let gz = self.g.eval(z)?;
        if gz.norm() < 1e-300 {
            return Err(Error::EvalSingular("generator vanishes"));
        }
        let r = z.norm();
        let theta = z.arg();
        let g = &self.g;
        // radial leg along the positive real axis to radius r
        let mut value = Complex64::default();
        if r > 0.0 {
            let leg = |t: f64| -> Complex64 {
                let p = Complex64::new(t * r, 0.0);
                match g.eval(p) {
                    Ok(v) if v.norm() > 1e-300 => Complex64::new(r, 0.0) / v,
                    _ => Complex64::new(f64::NAN, 0.0),
                }
            };
            value += util::adaptive_simpson(&leg, 1e-13);
            // circular leg from angle 0 to theta at radius r
            if theta != 0.0 {
                let arc = |t: f64| -> Complex64 {
                    let ang = t * theta;
                    let p = Complex64::from_polar(r, ang);
                    let dp = Complex64::new(0.0, theta) * p;
                    match g.eval(p) {
                        Ok(v) if v.norm() > 1e-300 => dp / v,
                        _ => Complex64::new(f64::NAN, 0.0),
                    }
                };
                value += util::adaptive_simpson(&arc, 1e-13);
            }
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::EvalSingular("quadrature path hit a singularity"));
        }
        Ok(Dual {
            value,
            deriv: Complex64::new(1.0, 0.0) / gz,
        })
    }
}

/// Build the half-plane map used throughout as the positive-step workhorse:
/// f(w) = w + i + 1/(w + 1).
pub fn phs_halfplane_map() -> MapDescriptor {
    MapDescriptor::parse_formula("z + i + 1/(z+1)", DomainTag::RightHalfPlane)
        .expect("static formula parses")
}
