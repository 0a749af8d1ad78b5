//! Hyperbolic geometry of the disc, Denjoy-Wolff estimation, boundary
//! multipliers via radial quotients with Richardson extrapolation, type
//! classification, hyperbolic-step classification and boundary-fixed-point
//! scanning.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::map::{MapDescriptor, PointLocation};
use crate::report::cx;
use crate::util;

/// Hyperbolic distance in the disc with the curvature -4 convention:
/// rho(z, w) = atanh |(z - w)/(1 - conj(w) z)|.
pub fn rho_disc(z: Complex64, w: Complex64) -> Result<f64> {
    if z.norm() >= 1.0 || w.norm() >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    let den = Complex64::new(1.0, 0.0) - w.conj() * z;
    if den.norm() < 1e-300 {
        return Err(Error::EvalSingular("pseudo-hyperbolic denominator ~ 0"));
    }
    let m = ((z - w) / den).norm().min(1.0 - 1e-16);
    Ok(m.atanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    EllipticAutomorphism,
    Elliptic,
    Hyperbolic,
    ParabolicZeroStep,
    ParabolicPositiveStep,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub seed_spread: f64,
    pub dw_radial_residual: f64,
    pub step_undecided: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassificationReport {
    #[serde(with = "cx")]
    pub dw_point: Complex64,
    pub kind: MapKind,
    #[serde(with = "cx")]
    pub multiplier: Complex64,
    pub step_estimate: Vec<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct DwEstimate {
    pub point: Complex64,
    pub interior: bool,
    pub iterations: usize,
    pub seed_spread: f64,
    pub radial_residual: f64,
}

const DW_SEEDS: [Complex64; 5] = [
    Complex64 { re: 0.0, im: 0.0 },
    Complex64 { re: 0.4, im: 0.0 },
    Complex64 { re: -0.4, im: 0.0 },
    Complex64 { re: 0.0, im: 0.4 },
    Complex64 { re: 0.0, im: -0.4 },
];

/// Denjoy-Wolff point by iteration from five seeds. Interior convergence
/// (successive difference below 1e-12) yields an interior point; otherwise
/// the late iterates are extrapolated, projected to the boundary, and the
/// angle is refined by golden-section search on the radial displacement.
pub fn denjoy_wolff(m: &MapDescriptor) -> Result<Complex64> {
    denjoy_wolff_full(m, 4000).map(|e| e.point)
}

pub fn denjoy_wolff_full(m: &MapDescriptor, max_iter: usize) -> Result<DwEstimate> {
    // the one excluded case: elliptic automorphisms have non-convergent
    // iterates; detect via a Möbius fit with an interior fixed point of
    // unimodular multiplier
    if let Some(fit) = m.mobius_fit(1e-10) {
        if fit.is_identity(1e-12) {
            return Err(Error::IsIdentity);
        }
        // a parabolic double root splits under fit noise into two nearby
        // points, one spuriously interior; demand a separated discriminant
        // before trusting the interior fixed point
        let disc = (fit.d - fit.a) * (fit.d - fit.a) + fit.c * fit.b * 4.0;
        if disc.norm() > 1e-5 {
            if let Ok(fps) = fit.fixed_points() {
                for fp in fps {
                    if fp.location == PointLocation::Interior {
                        let lam = fit.derivative(fp.point.unwrap())?;
                        if (lam.norm() - 1.0).abs() < 1e-6 {
                            return Err(Error::EllipticAutomorphism);
                        }
                    }
                }
            }
        }
    }

    let mut candidates: Vec<(Complex64, bool)> = Vec::new();
    let mut extrapolated: Vec<Complex64> = Vec::new();
    let mut total_iters = 0usize;
    for seed in DW_SEEDS {
        let mut z = seed;
        let mut tail: Vec<Complex64> = Vec::with_capacity(3);
        // dyadic checkpoints z_n at n = 64, 128, 256, ...: the angular
        // drift of a boundary-bound orbit decays like a power of n, which
        // is geometric along dyadic indices, so Aitken applies cleanly
        let mut checkpoints: Vec<Complex64> = Vec::new();
        let mut next_checkpoint = 64usize;
        let mut converged = false;
        for n in 0..max_iter {
            let next = match m.eval(z) {
                Ok(v) => v,
                // orbits hugging the boundary can fall off the evaluable
                // region; extrapolate from what we have
                Err(_) => break,
            };
            total_iters = n + 1;
            if tail.len() == 3 {
                tail.rotate_left(1);
                tail.pop();
            }
            tail.push(next);
            if n + 1 == next_checkpoint {
                checkpoints.push(next);
                next_checkpoint *= 2;
            }
            if (next - z).norm() < 1e-12 {
                z = next;
                converged = true;
                break;
            }
            z = next;
        }
        let cand = if tail.len() >= 3 {
            util::aitken(&tail)
        } else {
            z
        };
        candidates.push((cand, converged));
        // extrapolate the direction sequence of the checkpoints
        let dirs: Vec<Complex64> = checkpoints
            .iter()
            .filter(|p| p.norm() > 1e-12)
            .map(|p| p / p.norm())
            .collect();
        if dirs.len() >= 3 {
            let mut lvl1 = Vec::new();
            for w in dirs.windows(3) {
                lvl1.push(util::aitken(w));
            }
            let e = if lvl1.len() >= 3 {
                util::aitken(&lvl1)
            } else {
                *lvl1.last().unwrap()
            };
            if e.norm() > 1e-12 {
                extrapolated.push(e / e.norm());
            }
        }
    }

    let mean: Complex64 =
        candidates.iter().map(|(c, _)| c).sum::<Complex64>() / candidates.len() as f64;
    let spread = candidates
        .iter()
        .map(|(c, _)| (c - mean).norm())
        .fold(0.0, f64::max);

    let interior_like = mean.norm() < 1.0 - 1e-6 && candidates.iter().all(|(_, conv)| *conv);
    if interior_like {
        if spread > 1e-6 {
            return Err(Error::NoConvergence(max_iter));
        }
        // Newton polish on f(z) - z = 0 for full accuracy
        let mut tau = mean;
        for _ in 0..50 {
            let d = m.eval_dual(tau)?;
            let g = d.value - tau;
            let gp = d.deriv - Complex64::new(1.0, 0.0);
            if gp.norm() < 1e-300 {
                break;
            }
            let next = tau - g / gp;
            if (next - tau).norm() < 1e-15 {
                tau = next;
                break;
            }
            tau = next;
        }
        return Ok(DwEstimate {
            point: tau,
            interior: true,
            iterations: total_iters,
            seed_spread: spread,
            radial_residual: (m.eval(tau)? - tau).norm(),
        });
    }

    // boundary case: collect competing angle estimates and keep the one
    // with the smallest validated radial displacement. Iterate projection
    // wins when the angular drift dies fast; Richardson wins for the c/n
    // tangential drift of parabolic orbits; golden-section wins for
    // well-separated hyperbolic points.
    if mean.norm() < 1e-12 {
        return Err(Error::NoConvergence(max_iter));
    }
    // pool ordered by expected accuracy: the extrapolated direction first
    // (the displacement objective is too flat near parabolic points for the
    // golden-section candidate to be trusted there), with later candidates
    // replacing it only on a decisive residual improvement
    let mut pool: Vec<Complex64> = Vec::new();
    if !extrapolated.is_empty() {
        let rm: Complex64 = extrapolated.iter().sum::<Complex64>() / extrapolated.len() as f64;
        if rm.norm() > 1e-12 {
            pool.push(rm / rm.norm());
        }
    }
    pool.push(mean / mean.norm());
    if let Ok(gs) = refine_boundary_fixed_angle(m, (mean / mean.norm()).arg(), 0.2) {
        pool.push(gs);
    }
    let mut tau = pool[0];
    let mut residual = radial_fixed_point_residual(m, tau);
    for &cand in &pool[1..] {
        let r = radial_fixed_point_residual(m, cand);
        if r < 0.5 * residual {
            residual = r;
            tau = cand;
        }
    }
    if residual > 1e-4 {
        return Err(Error::NoConvergence(max_iter));
    }
    Ok(DwEstimate {
        point: tau,
        interior: false,
        iterations: total_iters,
        seed_spread: spread,
        radial_residual: residual,
    })
}

/// Golden-section refinement of a boundary fixed point angle by minimizing
/// the radial displacement |m(r e^{i th}) - e^{i th}| at r = 1 - 2^{-20}.
fn refine_boundary_fixed_angle(m: &MapDescriptor, theta0: f64, half_width: f64) -> Result<Complex64> {
    let r = 1.0 - 2f64.powi(-20);
    let displacement = |th: f64| -> f64 {
        let s = Complex64::from_polar(1.0, th);
        match m.eval(s * r) {
            Ok(v) => (v - s).norm(),
            Err(_) => f64::INFINITY,
        }
    };
    let theta = util::golden_section_min(displacement, theta0 - half_width, theta0 + half_width, 90);
    Ok(Complex64::from_polar(1.0, theta))
}

/// Smallest radial displacement of the map at `sigma` along r = 1 - 2^{-k}.
fn radial_fixed_point_residual(m: &MapDescriptor, sigma: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for k in 10..=24 {
        let r = 1.0 - 2f64.powi(-k);
        if let Ok(v) = m.eval(sigma * r) {
            best = best.min((v - sigma).norm());
        }
    }
    best
}

/// Angular derivative estimate at a boundary fixed point.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AngularDerivative {
    pub finite: bool,
    /// Extrapolated value when finite; last quotient otherwise.
    pub value: f64,
    /// Raw radial quotients (1 - |m(r_k tau)|)/(1 - r_k).
    pub quotients: Vec<f64>,
}

/// Radial-quotient estimate of the angular derivative at the boundary fixed
/// point `tau`, on the grid r_k = 1 - 2^{-k}, k = 8..26, with Richardson
/// extrapolation. Divergent monotone quotients beyond 1e8 flag +infinity.
pub fn boundary_multiplier(m: &MapDescriptor, tau: Complex64) -> Result<AngularDerivative> {
    let displacement = radial_fixed_point_residual(m, tau);
    if !(displacement < 1e-4) {
        return Err(Error::NotAFixedPoint {
            point: tau,
            displacement,
        });
    }
    let mut quotients = Vec::new();
    for k in 8..=26 {
        let r = 1.0 - 2f64.powi(-k);
        match m.eval(tau * r) {
            Ok(v) => {
                let q = (1.0 - v.norm()) / (1.0 - r);
                if q.is_finite() && q > 0.0 {
                    quotients.push(q);
                } else {
                    break;
                }
            }
            Err(_) => break,
        }
    }
    if quotients.len() < 3 {
        return Err(Error::DivergentQuotient);
    }
    let tail = &quotients[quotients.len().saturating_sub(4)..];
    let diverging = tail.windows(2).all(|w| w[1] > w[0]) && *tail.last().unwrap() > 1e8;
    if diverging {
        return Ok(AngularDerivative {
            finite: false,
            value: f64::INFINITY,
            quotients,
        });
    }
    let take = quotients.len().min(8);
    let (value, _err) = util::richardson_dyadic(&quotients[quotients.len() - take..]);
    Ok(AngularDerivative {
        finite: true,
        value,
        quotients,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepVerdict {
    Zero,
    Positive,
    Undecided,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct StepReport {
    pub verdict: StepVerdict,
    pub q: Vec<f64>,
    pub underflow: bool,
}

/// Hyperbolic step along the orbit of `z0`: q_n = rho(z_n, z_{n+1}).
/// Zero verdict requires the tail to sink below 0.02 with a decaying trend;
/// positive requires stabilization above 0.02; anything else is Undecided.
pub fn hyperbolic_step(m: &MapDescriptor, z0: Complex64, n_max: usize) -> Result<StepReport> {
    let mut q = Vec::with_capacity(n_max.min(1024));
    let mut z = z0;
    let mut underflow = false;
    for n in 0..n_max {
        let next = match m.eval(z) {
            Ok(v) => v,
            Err(_) => {
                underflow = true;
                break;
            }
        };
        if next.norm() >= 1.0 - 1e-13 {
            underflow = true;
            break;
        }
        match rho_disc(z, next) {
            Ok(d) => q.push(d),
            Err(_) => {
                underflow = true;
                break;
            }
        }
        z = next;
        if n > 20 {
            let l = q.len();
            if (q[l - 1] - q[l - 2]).abs() < 1e-10 {
                break;
            }
        }
    }
    if q.len() < 8 {
        return Ok(StepReport {
            verdict: StepVerdict::Undecided,
            q,
            underflow,
        });
    }
    let last = *q.last().unwrap();
    let l = q.len();
    let tail = &q[l / 2..];
    let monotone_down = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    // C/n decay check: n*q_n roughly constant over the second half
    let decay_like = {
        let a = q[l / 2] * (l / 2) as f64;
        let b = last * l as f64;
        a > 0.0 && b > 0.0 && (a / b < 3.0 && b / a < 3.0)
    };
    let stabilized = {
        let back = q[l.saturating_sub(20).max(l / 2)];
        (last - back).abs() < 0.05 * last.abs() + 1e-6
    };
    let verdict = if last < 0.02 && monotone_down && decay_like {
        StepVerdict::Zero
    } else if last >= 0.02 && stabilized {
        StepVerdict::Positive
    } else {
        StepVerdict::Undecided
    };
    Ok(StepReport {
        verdict,
        q,
        underflow,
    })
}

/// Full classification: Denjoy-Wolff point, type, multiplier and, for
/// parabolic maps, the hyperbolic-step sub-kind.
pub fn classify(m: &MapDescriptor) -> Result<ClassificationReport> {
    classify_with(m, 4000, 400)
}

pub fn classify_with(
    m: &MapDescriptor,
    dw_max_iter: usize,
    step_n_max: usize,
) -> Result<ClassificationReport> {
    match denjoy_wolff_full(m, dw_max_iter) {
        Err(Error::EllipticAutomorphism) => {
            let fit = m.mobius_fit(1e-10).expect("detection implies a Möbius fit");
            let fps = fit.fixed_points()?;
            let tau = fps
                .iter()
                .find(|p| p.location == PointLocation::Interior)
                .and_then(|p| p.point)
                .ok_or(Error::EllipticAutomorphism)?;
            let lam = m.derivative(tau)?;
            Ok(ClassificationReport {
                dw_point: tau,
                kind: MapKind::EllipticAutomorphism,
                multiplier: lam,
                step_estimate: Vec::new(),
                diagnostics: Diagnostics {
                    iterations: 0,
                    seed_spread: 0.0,
                    dw_radial_residual: 0.0,
                    step_undecided: false,
                },
            })
        }
        Err(e) => Err(e),
        Ok(est) if est.interior => {
            let lam = m.derivative(est.point)?;
            Ok(ClassificationReport {
                dw_point: est.point,
                kind: MapKind::Elliptic,
                multiplier: lam,
                step_estimate: Vec::new(),
                diagnostics: Diagnostics {
                    iterations: est.iterations,
                    seed_spread: est.seed_spread,
                    dw_radial_residual: est.radial_residual,
                    step_undecided: false,
                },
            })
        }
        Ok(est) => {
            let tau = est.point;
            let mult = boundary_multiplier(m, tau)?;
            if !mult.finite {
                return Err(Error::DivergentQuotient);
            }
            let lam = mult.value;
            if lam < 1.0 - 2e-4 {
                return Ok(ClassificationReport {
                    dw_point: tau,
                    kind: MapKind::Hyperbolic,
                    multiplier: Complex64::new(lam, 0.0),
                    step_estimate: Vec::new(),
                    diagnostics: Diagnostics {
                        iterations: est.iterations,
                        seed_spread: est.seed_spread,
                        dw_radial_residual: est.radial_residual,
                        step_undecided: false,
                    },
                });
            }
            let step = hyperbolic_step(m, Complex64::new(0.0, 0.0), step_n_max)?;
            let (kind, undecided) = match step.verdict {
                StepVerdict::Zero => (MapKind::ParabolicZeroStep, false),
                StepVerdict::Positive => (MapKind::ParabolicPositiveStep, false),
                StepVerdict::Undecided => {
                    // commit to the side the last quotient suggests, flagged
                    let last = step.q.last().copied().unwrap_or(0.0);
                    if last < 0.02 {
                        (MapKind::ParabolicZeroStep, true)
                    } else {
                        (MapKind::ParabolicPositiveStep, true)
                    }
                }
            };
            Ok(ClassificationReport {
                dw_point: tau,
                kind,
                multiplier: Complex64::new(lam, 0.0),
                step_estimate: step.q,
                diagnostics: Diagnostics {
                    iterations: est.iterations,
                    seed_spread: est.seed_spread,
                    dw_radial_residual: est.radial_residual,
                    step_undecided: undecided,
                },
            })
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BrfpRecord {
    #[serde(with = "cx")]
    pub sigma: Complex64,
    pub angular_derivative: AngularDerivative,
    pub regular: bool,
    pub is_denjoy_wolff: bool,
    /// For semigroup elements: whether |h(r sigma)| blows up along the
    /// radius (the Koenigs criterion for boundary fixed points of the flow).
    pub koenigs_blowup: Option<bool>,
}

/// Scan `n_angles` boundary directions for fixed points of the radial limit,
/// refine hits by golden-section search on the displacement, and attach
/// angular derivatives. Semigroup elements additionally run the Koenigs
/// blow-up criterion.
pub fn brfp_scan(m: &MapDescriptor, n_angles: usize) -> Vec<BrfpRecord> {
    let r_coarse = 1.0 - 2f64.powi(-16);
    let mut disp = vec![f64::INFINITY; n_angles];
    for (j, d) in disp.iter_mut().enumerate() {
        let th = 2.0 * std::f64::consts::PI * j as f64 / n_angles as f64;
        let s = Complex64::from_polar(1.0, th);
        if let Ok(v) = m.eval(s * r_coarse) {
            *d = (v - s).norm();
        }
    }
    // candidates: local minima of the displacement below a loose threshold,
    // plus Koenigs blow-up hits for semigroup elements
    let mut cand_angles: Vec<f64> = Vec::new();
    for j in 0..n_angles {
        let prev = disp[(j + n_angles - 1) % n_angles];
        let next = disp[(j + 1) % n_angles];
        if disp[j] < 0.2 && disp[j] <= prev && disp[j] <= next {
            cand_angles.push(2.0 * std::f64::consts::PI * j as f64 / n_angles as f64);
        }
    }
    if let MapDescriptor::SemigroupElement { spec, .. } = m {
        if let Some(k) = spec.koenigs() {
            for j in 0..n_angles {
                let th = 2.0 * std::f64::consts::PI * j as f64 / n_angles as f64;
                if koenigs_blowup_at(k.as_ref(), th) == Some(true) {
                    cand_angles.push(th);
                }
            }
        }
    }

    let width = 2.0 * std::f64::consts::PI / n_angles as f64;
    let mut records: Vec<BrfpRecord> = Vec::new();
    for th0 in cand_angles {
        let sigma = match refine_boundary_fixed_angle(m, th0, 1.5 * width) {
            Ok(s) => s,
            Err(_) => continue,
        };
        // validate: radial displacement decreasing and small
        let mut d_vals = Vec::new();
        for k in [14, 17, 20] {
            let r = 1.0 - 2f64.powi(-k);
            match m.eval(sigma * r) {
                Ok(v) => d_vals.push((v - sigma).norm()),
                Err(_) => {}
            }
        }
        if d_vals.len() < 2 {
            continue;
        }
        let final_d = *d_vals.last().unwrap();
        if !(final_d < 5e-4 && final_d <= d_vals[0] * 1.5) {
            continue;
        }
        if records
            .iter()
            .any(|r| (r.sigma - sigma).norm() < 1e-4)
        {
            continue;
        }
        let ad = match boundary_multiplier(m, sigma) {
            Ok(a) => a,
            Err(_) => continue,
        };
        let regular = ad.finite && ad.value > 1.0 + 1e-6;
        let is_dw = ad.finite && ad.value <= 1.0 + 1e-6;
        let blowup = if let MapDescriptor::SemigroupElement { spec, .. } = m {
            spec.koenigs()
                .and_then(|k| koenigs_blowup_at(k.as_ref(), sigma.arg()))
        } else {
            None
        };
        records.push(BrfpRecord {
            sigma,
            angular_derivative: ad,
            regular,
            is_denjoy_wolff: is_dw,
            koenigs_blowup: blowup,
        });
    }
    records.sort_by(|a, b| a.sigma.arg().partial_cmp(&b.sigma.arg()).unwrap());
    records
}

/// Koenigs criterion probe: does |h(r e^{i th})| grow without bound along
/// the radius? Logarithmic growth counts, so the test compares successive
/// radial levels rather than absolute size.
fn koenigs_blowup_at(k: &crate::map::KoenigsDescriptor, theta: f64) -> Option<bool> {
    let s = Complex64::from_polar(1.0, theta);
    let mut levels = Vec::new();
    for kk in [8, 12, 16, 20] {
        let r = 1.0 - 2f64.powi(-kk);
        match k.eval(s * r) {
            Ok(v) => levels.push(v.norm()),
            Err(_) => return None,
        }
    }
    let growing = levels.windows(2).all(|w| w[1] > w[0] + 1.0);
    Some(growing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{DomainTag, Mobius};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn phi_half() -> MapDescriptor {
        MapDescriptor::Mobius(
            Mobius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap(),
        )
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_disc(c(0.3, 0.2), c(0.3, 0.2)).unwrap(), 0.0);
        let t = 1.0_f64.tanh();
        assert!((rho_disc(c(0.0, 0.0), c(t, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        // independently computed in extended precision: atanh(0.6/1.09)
        let v = rho_disc(c(0.3, 0.0), c(-0.3, 0.0)).unwrap();
        assert!((v - 0.6190392084062234).abs() < 1e-14, "{v}");
        assert!(rho_disc(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn schwarz_pick_contraction_on_mobius() {
        let m = phi_half();
        for (i, z) in util::disc_grid(20, 0.9).into_iter().enumerate() {
            let w = util::disc_grid(20, 0.85)[(i * 7 + 3) % 20];
            let lhs = rho_disc(m.eval(z).unwrap(), m.eval(w).unwrap()).unwrap();
            let rhs = rho_disc(z, w).unwrap();
            assert!(lhs <= rhs + 1e-9);
        }
    }

    #[test]
    fn dw_of_mobius_hyperbolic_is_one() {
        let tau = denjoy_wolff(&phi_half()).unwrap();
        assert!((tau - c(1.0, 0.0)).norm() < 1e-8, "tau = {tau}");
    }

    #[test]
    fn dw_of_elliptic_is_zero() {
        let m = MapDescriptor::parse_formula("z/(2-z)", DomainTag::Disc).unwrap();
        let tau = denjoy_wolff(&m).unwrap();
        assert!(tau.norm() < 1e-12, "tau = {tau}");
    }

    #[test]
    fn dw_rejects_elliptic_automorphism() {
        let rot = MapDescriptor::parse_formula("i*z", DomainTag::Disc).unwrap();
        assert!(matches!(
            denjoy_wolff(&rot),
            Err(Error::EllipticAutomorphism)
        ));
    }

    #[test]
    fn boundary_multiplier_of_mobius() {
        let m = phi_half();
        let at_tau = boundary_multiplier(&m, c(1.0, 0.0)).unwrap();
        assert!(at_tau.finite && (at_tau.value - 1.0 / 3.0).abs() < 1e-6);
        let at_sigma = boundary_multiplier(&m, c(-1.0, 0.0)).unwrap();
        assert!(at_sigma.finite && (at_sigma.value - 3.0).abs() < 1e-6);
        assert!(matches!(
            boundary_multiplier(&m, c(0.0, 1.0)),
            Err(Error::NotAFixedPoint { .. })
        ));
    }

    #[test]
    fn classify_mobius_and_elliptic() {
        let rep = classify(&phi_half()).unwrap();
        assert_eq!(rep.kind, MapKind::Hyperbolic);
        assert!((rep.dw_point - c(1.0, 0.0)).norm() < 1e-8);
        assert!((rep.multiplier.re - 1.0 / 3.0).abs() < 1e-6);

        let m = MapDescriptor::parse_formula("z/(2-z)", DomainTag::Disc).unwrap();
        let rep = classify(&m).unwrap();
        assert_eq!(rep.kind, MapKind::Elliptic);
        assert!(rep.dw_point.norm() < 1e-10);
        assert!((rep.multiplier - c(0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn parabolic_automorphism_has_positive_step() {
        // Cayley conjugate of w -> w + 1 on the upper half-plane
        let cayley_h =
            Mobius::new(c(0.0, 1.0), c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
        let psi = MapDescriptor::conjugate(
            MapDescriptor::Mobius(cayley_h),
            MapDescriptor::Mobius(Mobius::translation(c(1.0, 0.0))),
        )
        .unwrap();
        let step = hyperbolic_step(&psi, c(0.0, 0.0), 400).unwrap();
        assert_eq!(step.verdict, StepVerdict::Positive);
        // automorphisms preserve rho: q_n constant
        let q = &step.q;
        assert!((q[0] - q[q.len() - 1]).abs() < 1e-9);

        let rep = classify(&psi).unwrap();
        assert_eq!(rep.kind, MapKind::ParabolicPositiveStep);
        assert!((rep.dw_point - c(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn phs_halfplane_classifies_parabolic_positive() {
        let f = crate::koenigs::phs_halfplane_map();
        let phi = MapDescriptor::conjugate(
            MapDescriptor::Mobius(Mobius::cayley(c(1.0, 0.0)).unwrap()),
            f,
        )
        .unwrap();
        let rep = classify(&phi).unwrap();
        assert_eq!(rep.kind, MapKind::ParabolicPositiveStep, "{:?}", rep.step_estimate);
        assert!((rep.dw_point - c(1.0, 0.0)).norm() < 1e-5);
        assert!((rep.multiplier.re - 1.0).abs() < 2e-4);
    }

    #[test]
    fn brfp_scan_finds_both_fixed_points_of_mobius() {
        let recs = brfp_scan(&phi_half(), 256);
        assert_eq!(recs.len(), 2, "{recs:?}");
        let at_minus = recs
            .iter()
            .find(|r| (r.sigma - c(-1.0, 0.0)).norm() < 1e-4)
            .expect("repelling point at -1");
        assert!(at_minus.regular);
        assert!((at_minus.angular_derivative.value - 3.0).abs() < 1e-6);
        let at_plus = recs
            .iter()
            .find(|r| (r.sigma - c(1.0, 0.0)).norm() < 1e-4)
            .expect("DW at 1");
        assert!(at_plus.is_denjoy_wolff);
        assert!((at_plus.angular_derivative.value - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn hyperbolic_multiplier_obeys_power_law_in_time() {
        // chain rule along the common radial direction: lambda(t) = lambda(1)^t
        let spec = crate::catalog::build("mobius-hyperbolic")
            .unwrap()
            .semigroup()
            .unwrap();
        let tau = c(1.0, 0.0);
        let lam1 = boundary_multiplier(&spec.element(1.0), tau).unwrap().value;
        for &t in &[0.5, 1.0, 2.0] {
            let lam_t = boundary_multiplier(&spec.element(t), tau).unwrap().value;
            assert!(
                (lam_t - lam1.powf(t)).abs() < 1e-5,
                "t={t}: {lam_t} vs {}",
                lam1.powf(t)
            );
        }
    }

    #[test]
    fn brfp_scan_on_semigroup_elements() {
        // Koebe: h extends finitely to the whole boundary except tau = 1,
        // so the only boundary fixed point is the Denjoy-Wolff point
        let koebe = crate::catalog::build("koebe-zero-step")
            .unwrap()
            .semigroup()
            .unwrap();
        let recs = brfp_scan(&koebe.element(1.0), 256);
        assert_eq!(recs.len(), 1, "{recs:?}");
        assert!((recs[0].sigma - c(1.0, 0.0)).norm() < 1e-4);
        assert!(recs[0].is_denjoy_wolff);
        assert_eq!(recs[0].koenigs_blowup, Some(true));

        // strip-minus-slits: tau = 1 plus the repelling point at -1, where
        // |h| blows up and the multiplier is e^{1/2}
        let strip = crate::catalog::build("strip-minus-slits")
            .unwrap()
            .semigroup()
            .unwrap();
        let recs = brfp_scan(&strip.element(1.0), 256);
        assert_eq!(recs.len(), 2, "{recs:?}");
        let rep = recs
            .iter()
            .find(|r| (r.sigma - c(-1.0, 0.0)).norm() < 1e-4)
            .expect("repelling point at -1");
        assert!(rep.regular);
        assert_eq!(rep.koenigs_blowup, Some(true));
        assert!((rep.angular_derivative.value - 0.5_f64.exp()).abs() < 1e-4);
        let dw = recs
            .iter()
            .find(|r| (r.sigma - c(1.0, 0.0)).norm() < 1e-4)
            .expect("DW at 1");
        assert!(dw.is_denjoy_wolff);
    }

    #[test]
    fn iterate_orbits_contract_hyperbolic_distance() {
        // Schwarz-Pick corollary: rho(phi^n(0), phi^n(0.3)) non-increasing.
        // The Möbius orbit reaches the boundary within machine precision
        // before n = 100; the slow Koebe orbit covers the full range.
        let koebe = crate::catalog::build("koebe-zero-step")
            .unwrap()
            .semigroup()
            .unwrap()
            .element(1.0);
        for m in [phi_half(), koebe] {
            let mut a = c(0.0, 0.0);
            let mut b = c(0.3, 0.0);
            let mut prev = rho_disc(a, b).unwrap();
            for _ in 0..100 {
                a = m.eval(a).unwrap();
                b = m.eval(b).unwrap();
                // stop before pseudo-hyperbolic cancellation noise sets in
                if a.norm() > 1.0 - 1e-6 || b.norm() > 1.0 - 1e-6 {
                    break;
                }
                let d = rho_disc(a, b).unwrap();
                assert!(d <= prev + 1e-9);
                prev = d;
            }
        }
    }
}
