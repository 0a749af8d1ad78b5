//! Backward-invariant-set geometry: petal membership and classification,
//! alpha-points, images of petals under commuting maps, cascades,
//! isogonality, pre-models, spectral values and the Cowen-Pommerenke bound.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::{KoenigsDescriptor, MapDescriptor, OmegaPredicate, PetalComponent};
use crate::metric::{boundary_multiplier, rho_disc};
use crate::report::{cx, cx_vec};
use crate::semigroup::{backward_flow, flow, ModelStep, SemigroupSpec};
use crate::util;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PetalKind {
    Hyperbolic,
    Parabolic,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Membership {
    pub inside: bool,
    /// Whether the verdict came from an exact Omega predicate or from the
    /// sampled fallback.
    pub exact: bool,
}

/// Is `z` in a petal, i.e. does h(z) - t stay in Omega for every t >= 0?
/// Exact predicates decide this in closed form; otherwise a t-grid up to
/// t = 50 is probed and the verdict carries a confidence flag.
pub fn petal_membership(spec: &Arc<SemigroupSpec>, z: Complex64) -> Result<Membership> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    match spec.step() {
        Some(ModelStep::Translation) => {}
        Some(ModelStep::Dilation { .. }) => return Err(Error::PredicateUnavailable),
        None => {
            // generator form: sampled fallback through the backward flow
            let mut cur = z;
            for _ in 0..100 {
                match backward_flow(spec, 0.5, cur) {
                    Ok(Some(v)) => cur = v,
                    _ => return Ok(Membership { inside: false, exact: false }),
                }
            }
            return Ok(Membership { inside: true, exact: false });
        }
    }
    let k = spec.koenigs().expect("translation form has Koenigs data");
    let w = k.eval(z)?;
    if k.omega.is_exact() {
        Ok(Membership {
            inside: k.omega.backward_core_contains(w),
            exact: true,
        })
    } else {
        let mut cur = z;
        for _ in 0..100 {
            match backward_flow(spec, 0.5, cur) {
                Ok(Some(v)) => cur = v,
                _ => return Ok(Membership { inside: false, exact: false }),
            }
        }
        Ok(Membership { inside: true, exact: false })
    }
}

/// Double Aitken acceleration of a complex sequence.
fn accelerate(orbit: &[Complex64]) -> Complex64 {
    if orbit.len() < 3 {
        return *orbit.last().expect("non-empty orbit");
    }
    let mut level1 = Vec::new();
    for w in orbit.windows(3) {
        level1.push(util::aitken(w));
    }
    if level1.len() >= 3 {
        util::aitken(&level1)
    } else {
        *level1.last().unwrap()
    }
}

#[derive(Debug, Clone)]
pub struct AlphaPoint {
    pub sigma: Complex64,
    pub kind: PetalKind,
    pub orbit: Vec<Complex64>,
}

/// Follow the backward orbit on the doubling schedule t = 1, 2, 4, ..., 2^20
/// and extrapolate its boundary limit. The petal kind compares the limit
/// with the Denjoy-Wolff point (exact component data is used when the
/// Omega predicate provides it).
pub fn alpha_point(spec: &Arc<SemigroupSpec>, z0: Complex64) -> Result<AlphaPoint> {
    let member = petal_membership(spec, z0)?;
    if !member.inside {
        return Err(Error::OutsideOmega);
    }
    let mut orbit = vec![z0];
    match (spec.koenigs(), spec.step()) {
        (Some(k), Some(ModelStep::Translation)) => {
            let w0 = k.eval(z0)?;
            let mut seed = z0;
            for kk in 0..=20 {
                let t = 2f64.powi(kk);
                let target = w0 - t;
                if k.omega.is_exact() && !k.omega.contains(target) {
                    return Err(Error::BackwardExit);
                }
                let z = k.invert(target, seed)?;
                orbit.push(z);
                seed = z;
                if z.norm() > 1.0 - 1e-9 {
                    break;
                }
                if orbit.len() >= 2 {
                    let l = orbit.len();
                    if (orbit[l - 1] - orbit[l - 2]).norm() < 1e-11 {
                        break;
                    }
                }
            }
        }
        _ => {
            // increments of the backward flow double the elapsed time
            let mut cur = z0;
            let mut elapsed = 0.0;
            for kk in 0..=20 {
                let t = 2f64.powi(kk);
                let dt = t - elapsed;
                match backward_flow(spec, dt, cur)? {
                    Some(v) => {
                        cur = v;
                        elapsed = t;
                        orbit.push(cur);
                        if cur.norm() > 1.0 - 1e-9 {
                            break;
                        }
                    }
                    None => return Err(Error::BackwardExit),
                }
            }
        }
    }
    let raw = accelerate(&orbit);
    if raw.norm() < 1e-12 {
        return Err(Error::NoConvergence(orbit.len()));
    }
    let sigma = raw / raw.norm();
    let kind = exact_kind(spec, z0).unwrap_or_else(|| {
        if (sigma - spec.dw_point).norm() < 1e-6 {
            PetalKind::Parabolic
        } else {
            PetalKind::Hyperbolic
        }
    });
    Ok(AlphaPoint { sigma, kind, orbit })
}

/// Petal kind from the exact Omega component, when available.
fn exact_kind(spec: &Arc<SemigroupSpec>, z: Complex64) -> Option<PetalKind> {
    let k = spec.koenigs()?;
    if !matches!(spec.step()?, ModelStep::Translation) || !k.omega.is_exact() {
        return None;
    }
    let w = k.eval(z).ok()?;
    let comp = k.omega.petal_component(w)?;
    Some(match (k.omega, comp) {
        (OmegaPredicate::TwoHorizontalRays { .. }, PetalComponent::Middle) => PetalKind::Hyperbolic,
        (OmegaPredicate::TwoHorizontalRays { .. }, _) => PetalKind::Parabolic,
        (OmegaPredicate::PlaneSlitLeft { .. }, _) => PetalKind::Parabolic,
        (OmegaPredicate::Strip { .. }, _) => PetalKind::Hyperbolic,
        (OmegaPredicate::HalfPlane { .. }, _) => PetalKind::Parabolic,
        _ => return None,
    })
}

/// Identifier for the petal containing `z` (component name for exact
/// predicates, alpha-point based otherwise).
pub fn petal_id(spec: &Arc<SemigroupSpec>, z: Complex64) -> Result<String> {
    if let Some(k) = spec.koenigs() {
        if k.omega.is_exact() {
            let w = k.eval(z)?;
            if let Some(comp) = k.omega.petal_component(w) {
                return Ok(format!("{comp:?}").to_lowercase());
            }
            return Err(Error::OutsideOmega);
        }
    }
    let a = alpha_point(spec, z)?;
    Ok(format!("alpha({:.6},{:.6})", a.sigma.re, a.sigma.im))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PetalReport {
    pub petal_id: String,
    pub kind: PetalKind,
    #[serde(with = "cx")]
    pub alpha: Complex64,
    pub spectral_value: Option<f64>,
    pub strip: Option<(f64, f64)>,
    #[serde(with = "cx_vec")]
    pub witness: Vec<Complex64>,
    pub exact_membership: bool,
}

/// Full petal report for a seed point; `Ok(None)` when the seed is not in
/// any petal.
pub fn petal_report(spec: &Arc<SemigroupSpec>, seed: Complex64) -> Result<Option<PetalReport>> {
    let member = petal_membership(spec, seed)?;
    if !member.inside {
        return Ok(None);
    }
    let a = alpha_point(spec, seed)?;
    let strip = petal_strip(spec, seed).ok().flatten();
    let spectral = if a.kind == PetalKind::Hyperbolic {
        spectral_value(spec, a.sigma).ok().map(|s| s.lambda)
    } else {
        None
    };
    let witness = a.orbit.iter().take(6).cloned().collect();
    Ok(Some(PetalReport {
        petal_id: petal_id(spec, seed)?,
        kind: a.kind,
        alpha: a.sigma,
        spectral_value: spectral,
        strip,
        witness,
        exact_membership: member.exact,
    }))
}

/// h-image strip of the petal containing `z`, when that image is a strip.
pub fn petal_strip(spec: &Arc<SemigroupSpec>, z: Complex64) -> Result<Option<(f64, f64)>> {
    let k = spec.koenigs().ok_or(Error::PredicateUnavailable)?;
    let w = k.eval(z)?;
    if k.omega.is_exact() {
        let comp = k.omega.petal_component(w).ok_or(Error::OutsideOmega)?;
        Ok(match (k.omega, comp) {
            (OmegaPredicate::TwoHorizontalRays { im, .. }, PetalComponent::Middle) => {
                Some((-im, im))
            }
            (OmegaPredicate::Strip { a, b }, PetalComponent::Whole) => Some((a, b)),
            _ => None,
        })
    } else {
        // fitted strip: (inf, sup) of Im h over petal samples, with slack
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut found = 0usize;
        for p in util::disc_grid(10_000, 0.999) {
            if let Ok(m) = petal_membership(spec, p) {
                if m.inside {
                    if let Ok(wp) = k.eval(p) {
                        lo = lo.min(wp.im);
                        hi = hi.max(wp.im);
                        found += 1;
                    }
                }
            }
        }
        if found < 100 {
            return Err(Error::StripUnknown);
        }
        Ok(Some((lo - 1e-3, hi + 1e-3)))
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub enum PetalImageVerdict {
    /// phi maps the petal into itself; for hyperbolic petals this forces
    /// phi = psi_{t0}.
    SamePetal { t0: f64, affinity_residual: f64 },
    /// phi sends the petal into a different hyperbolic petal with alpha
    /// point sigma'; the angular limit of phi at sigma is sigma'.
    HyperbolicTarget {
        #[serde(with = "cx")]
        sigma_prime: Complex64,
        radial_image_gap: f64,
    },
    /// phi sends the petal into a parabolic petal; sigma becomes an
    /// irregular contact point when the radial quotient diverges.
    ParabolicTarget { irregular_contact: bool },
}

/// Where does phi send the petal of z0? The caller certifies that phi
/// commutes with psi_1 (checked here with a quick residual audit).
pub fn petal_image(
    spec: &Arc<SemigroupSpec>,
    phi: &MapDescriptor,
    z0: Complex64,
) -> Result<PetalImageVerdict> {
    let psi1 = spec.element(1.0);
    let res = crate::centralizer::commutator_residual(phi, &psi1, &util::disc_grid(24, 0.8))?;
    if res > 1e-6 {
        return Err(Error::NotCommuting(res));
    }
    let source = alpha_point(spec, z0)?;
    let image_pt = phi.eval(z0)?;
    let target = alpha_point(spec, image_pt)?;
    if (source.sigma - target.sigma).norm() < 1e-6
        || (source.kind == PetalKind::Parabolic && target.kind == PetalKind::Parabolic
            && same_parabolic_petal(spec, z0, image_pt))
    {
        // recover t0 from the affinity constant
        let k = spec.koenigs().ok_or(Error::PredicateUnavailable)?;
        let (c, residual) =
            crate::centralizer::affinity_constant(k.as_ref(), phi, &util::disc_grid(32, 0.8))?;
        return Ok(PetalImageVerdict::SamePetal {
            t0: c.re,
            affinity_residual: residual,
        });
    }
    match target.kind {
        PetalKind::Hyperbolic => {
            // angular image check: phi(r sigma) should approach sigma'
            let mut gap = f64::INFINITY;
            for kk in [16, 18, 20] {
                let r = 1.0 - 2f64.powi(-kk);
                if let Ok(v) = phi.eval(source.sigma * r) {
                    gap = gap.min((v - target.sigma).norm());
                }
            }
            Ok(PetalImageVerdict::HyperbolicTarget {
                sigma_prime: target.sigma,
                radial_image_gap: gap,
            })
        }
        PetalKind::Parabolic => {
            let irregular = match boundary_multiplier(phi, source.sigma) {
                Ok(ad) => !ad.finite,
                // not a fixed point of phi at all: contact point taken to tau
                Err(Error::NotAFixedPoint { .. }) => {
                    let mut qs = Vec::new();
                    for kk in 8..=20 {
                        let r = 1.0 - 2f64.powi(-kk);
                        if let Ok(v) = phi.eval(source.sigma * r) {
                            qs.push((1.0 - v.norm()) / (1.0 - r));
                        }
                    }
                    qs.len() >= 4 && qs.windows(2).all(|w| w[1] > w[0] * 1.2)
                }
                Err(e) => return Err(e),
            };
            Ok(PetalImageVerdict::ParabolicTarget {
                irregular_contact: irregular,
            })
        }
    }
}

/// Two points lie in the same parabolic petal when the exact component
/// matches (there can be two parabolic petals with the same alpha point).
fn same_parabolic_petal(spec: &Arc<SemigroupSpec>, a: Complex64, b: Complex64) -> bool {
    match (petal_id(spec, a), petal_id(spec, b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CascadeReport {
    /// Alpha points of the visited petals, in order.
    #[serde(with = "cx_vec")]
    pub alpha_points: Vec<Complex64>,
    pub kinds: Vec<PetalKind>,
    pub terminated_in_parabolic: bool,
    /// phi fixed the starting petal (degenerate cascade).
    pub degenerate_fixed: bool,
    /// |sigma_n - tau| decreasing along the cascade.
    pub sigma_trend_to_tau: bool,
    /// Pairwise distinct alpha points (disjointness witness).
    pub disjoint: bool,
}

/// Iterate petal images: Delta_1, Delta_2, ... until a parabolic petal is
/// hit or `n_max` petals are collected.
pub fn petal_cascade(
    spec: &Arc<SemigroupSpec>,
    phi: &MapDescriptor,
    z0: Complex64,
    n_max: usize,
) -> Result<CascadeReport> {
    let start = alpha_point(spec, z0)?;
    let tau = spec.dw_point;
    let mut alphas = vec![start.sigma];
    let mut kinds = vec![start.kind];
    let mut z = z0;
    let mut terminated = false;
    let mut degenerate = false;
    for _ in 0..n_max {
        match petal_image(spec, phi, z)? {
            PetalImageVerdict::SamePetal { .. } => {
                degenerate = true;
                break;
            }
            PetalImageVerdict::HyperbolicTarget { sigma_prime, .. } => {
                alphas.push(sigma_prime);
                kinds.push(PetalKind::Hyperbolic);
                z = phi.eval(z)?;
            }
            PetalImageVerdict::ParabolicTarget { .. } => {
                alphas.push(tau);
                kinds.push(PetalKind::Parabolic);
                terminated = true;
                break;
            }
        }
    }
    let mut disjoint = true;
    for i in 0..alphas.len() {
        for j in (i + 1)..alphas.len() {
            if kinds[i] == PetalKind::Hyperbolic
                && kinds[j] == PetalKind::Hyperbolic
                && (alphas[i] - alphas[j]).norm() < 1e-6
            {
                disjoint = false;
            }
        }
    }
    let dists: Vec<f64> = alphas.iter().map(|s| (s - tau).norm()).collect();
    let trend = dists.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    Ok(CascadeReport {
        alpha_points: alphas,
        kinds,
        terminated_in_parabolic: terminated,
        degenerate_fixed: degenerate,
        sigma_trend_to_tau: trend,
        disjoint,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct IsogonalityReport {
    pub isogonal: bool,
    #[serde(with = "cx")]
    pub contact: Complex64,
    /// Final argument along the radius and the two Stolz rays.
    pub tail_args: [f64; 3],
    pub ray_args: Vec<Vec<f64>>,
}

/// Isogonality (semi-conformality) test at a boundary point: the argument
/// of (1 - conj(f(zeta)) f(z)) / (1 - conj(zeta) z) must tend to zero along
/// the radius and along Stolz rays at +/- pi/4.
pub fn isogonality_test(m: &MapDescriptor, zeta: Complex64) -> Result<IsogonalityReport> {
    // contact value from the deepest radial sample
    let mut contact = None;
    for kk in [22, 20, 18] {
        let r = 1.0 - 2f64.powi(-kk);
        if let Ok(v) = m.eval(zeta * r) {
            if v.norm() > 1.0 - 1e-3 {
                contact = Some(v / v.norm());
                break;
            }
        }
    }
    let contact = contact.ok_or(Error::NoContactPoint)?;
    let angles = [0.0, std::f64::consts::FRAC_PI_4, -std::f64::consts::FRAC_PI_4];
    let mut ray_args: Vec<Vec<f64>> = Vec::new();
    let mut tails = [0.0_f64; 3];
    for (idx, &alpha) in angles.iter().enumerate() {
        let dir = Complex64::from_polar(1.0, alpha);
        let mut args = Vec::new();
        for kk in 6..=22 {
            let zp = zeta * (Complex64::new(1.0, 0.0) - dir * 2f64.powi(-kk));
            if zp.norm() >= 1.0 {
                continue;
            }
            let v = match m.eval(zp) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let num = Complex64::new(1.0, 0.0) - contact.conj() * v;
            let den = Complex64::new(1.0, 0.0) - zeta.conj() * zp;
            if num.norm() < 1e-300 || den.norm() < 1e-300 {
                continue;
            }
            args.push((num / den).arg());
        }
        if args.len() < 4 {
            return Err(Error::NoContactPoint);
        }
        tails[idx] = *args.last().unwrap();
        ray_args.push(args);
    }
    let all_small = tails.iter().all(|a| a.abs() < 1e-2);
    let agree = (tails[0] - tails[1]).abs() < 1e-2 && (tails[0] - tails[2]).abs() < 1e-2;
    Ok(IsogonalityReport {
        isogonal: all_small && agree,
        contact,
        tail_args: tails,
        ray_args,
    })
}

/// Intertwiner of a pre-model at a repelling point: maps the right
/// half-plane into the disc via w -> h^{-1}(A log w + i (a+b)/2 + s).
pub struct PreModelMap {
    pub koenigs: Arc<KoenigsDescriptor>,
    pub coeff: f64,
    pub center: f64,
    pub s_shift: f64,
    anchor: Complex64,
}

impl PreModelMap {
    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        if w.re <= 0.0 && w.im == 0.0 {
            return Err(Error::OutsideDomain);
        }
        let target = Complex64::new(self.coeff, 0.0) * w.ln()
            + Complex64::new(self.s_shift, self.center);
        self.koenigs.invert(target, self.anchor)
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SpectralValue {
    /// log of the angular derivative of psi_1 at sigma (the primary route).
    pub lambda: f64,
    pub from_multiplier: f64,
    /// pi / (strip width) when the petal strip is known; coincides with
    /// `from_multiplier` up to the measurement tolerance.
    pub from_strip: Option<f64>,
}

/// Spectral value at a repelling point.
pub fn spectral_value(spec: &Arc<SemigroupSpec>, sigma: Complex64) -> Result<SpectralValue> {
    let psi1 = spec.element(1.0);
    let ad = boundary_multiplier(&psi1, sigma)?;
    if !ad.finite || ad.value <= 1.0 + 1e-6 {
        return Err(Error::NotRepelling(sigma));
    }
    let lam = ad.value.ln();
    // cross-check against the petal strip when it is known exactly
    let from_strip = hyperbolic_petal_strip_at(spec, sigma)
        .map(|(a, b)| std::f64::consts::PI / (b - a));
    Ok(SpectralValue {
        lambda: lam,
        from_multiplier: lam,
        from_strip,
    })
}

fn hyperbolic_petal_strip_at(spec: &Arc<SemigroupSpec>, _sigma: Complex64) -> Option<(f64, f64)> {
    let k = spec.koenigs()?;
    match k.omega {
        OmegaPredicate::TwoHorizontalRays { im, .. } => Some((-im, im)),
        OmegaPredicate::Strip { a, b } => Some((a, b)),
        _ => None,
    }
}

pub struct PreModel {
    #[allow(dead_code)]
    pub sigma: Complex64,
    /// Dilation rate: Q_t(w) = e^{lambda t} w with lambda = G'(sigma).
    pub lambda: f64,
    pub s_shift: f64,
    pub strip: (f64, f64),
    pub map: PreModelMap,
}

/// Pre-model at a repelling point sigma with hyperbolic petal strip (a, b):
/// Psi(w) = h^{-1}( (b-a)/pi * log w + i (a+b)/2 + s ), lambda = pi/(b-a).
/// With this pairing the conjugation Psi(e^{lambda t} w) = psi_t(Psi(w))
/// holds identically and Psi maps the half-plane onto the petal.
pub fn pre_model(
    spec: &Arc<SemigroupSpec>,
    sigma: Complex64,
    strip_hint: Option<(f64, f64)>,
) -> Result<PreModel> {
    let psi1 = spec.element(1.0);
    let ad = boundary_multiplier(&psi1, sigma)?;
    if !ad.finite || ad.value <= 1.0 + 1e-6 {
        return Err(Error::NotRepelling(sigma));
    }
    let k = spec.koenigs().ok_or(Error::PredicateUnavailable)?;
    let strip = match strip_hint.or_else(|| hyperbolic_petal_strip_at(spec, sigma)) {
        Some(s) => s,
        None => return Err(Error::StripUnknown),
    };
    let (a, b) = strip;
    if !(b > a) {
        return Err(Error::StripUnknown);
    }
    let lambda = std::f64::consts::PI / (b - a);
    // anchor the Newton inversion at a petal point: h-preimage of the strip
    // midline
    let anchor = k.invert(Complex64::new(0.0, 0.5 * (a + b)), Complex64::new(0.0, 0.0))
        .or_else(|_| k.invert(Complex64::new(1.0, 0.5 * (a + b)), Complex64::new(0.0, 0.0)))?;
    let map = PreModelMap {
        koenigs: k,
        coeff: (b - a) / std::f64::consts::PI,
        center: 0.5 * (a + b),
        s_shift: 0.0,
        anchor,
    };
    Ok(PreModel {
        sigma,
        lambda,
        s_shift: 0.0,
        strip,
        map,
    })
}

/// Conjugation residual sup |Psi(e^{lambda t} w) - psi_t(Psi(w))| over the
/// sample pairs.
pub fn pre_model_conjugation_residual(
    spec: &Arc<SemigroupSpec>,
    pm: &PreModel,
    ws: &[Complex64],
    ts: &[f64],
) -> Result<f64> {
    let mut sup = 0.0_f64;
    for &w in ws {
        let base = pm.map.eval(w)?;
        for &t in ts {
            let lhs = pm.map.eval(w * (pm.lambda * t).exp())?;
            let rhs = flow(spec, t, base)?;
            sup = sup.max((lhs - rhs).norm());
        }
    }
    Ok(sup)
}

/// Isogonality of the pre-model intertwiner at 0: Arg[(1 - conj(sigma)
/// Psi(w)) / w] must tend to 0 along rays into the right half-plane.
pub fn pre_model_isogonality(pm: &PreModel) -> Result<(bool, [f64; 3])> {
    let angles = [0.0, std::f64::consts::FRAC_PI_4, -std::f64::consts::FRAC_PI_4];
    let mut tails = [0.0_f64; 3];
    for (i, &alpha) in angles.iter().enumerate() {
        let dir = Complex64::from_polar(1.0, alpha);
        let mut last = f64::NAN;
        for kk in 4..=16 {
            let w = dir * 2f64.powi(-kk);
            let v = match pm.map.eval(w) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let num = Complex64::new(1.0, 0.0) - pm.sigma.conj() * v;
            if num.norm() < 1e-300 {
                continue;
            }
            last = (num / w).arg();
        }
        if last.is_nan() {
            return Err(Error::NoContactPoint);
        }
        tails[i] = last;
    }
    let ok = tails.iter().all(|a| a.abs() < 1e-2);
    Ok((ok, tails))
}

#[derive(Debug, Clone, serde::Serialize)]
pub enum CowenPommerenke {
    Holds {
        lhs: f64,
        rhs: f64,
        excluded_divergent: usize,
    },
    Fails {
        lhs: f64,
        rhs: f64,
        excluded_divergent: usize,
    },
    /// psi_1 is an automorphism; the inequality targets non-automorphisms.
    NotApplicable,
}

/// Cowen-Pommerenke inequality over a family of repelling points:
/// sum |tau - sigma|^2 / (psi_1'(sigma) - 1) <= 2 Re(1/psi_1(0) - 1).
pub fn cowen_pommerenke_bound(
    spec: &Arc<SemigroupSpec>,
    sigmas: &[Complex64],
) -> Result<CowenPommerenke> {
    let psi1 = spec.element(1.0);
    if crate::map::disc_automorphism_fit(&psi1, 1e-9).is_some() {
        return Ok(CowenPommerenke::NotApplicable);
    }
    let tau = spec.dw_point;
    let at_zero = flow(spec, 1.0, Complex64::new(0.0, 0.0))?;
    if at_zero.norm() < 1e-12 {
        return Err(Error::OutsideDomain);
    }
    let mut lhs = 0.0_f64;
    let mut excluded = 0usize;
    for &s in sigmas {
        match boundary_multiplier(&psi1, s) {
            Ok(ad) if ad.finite && ad.value > 1.0 + 1e-9 => {
                lhs += (tau - s).norm_sqr() / (ad.value - 1.0);
            }
            _ => excluded += 1,
        }
    }
    let rhs = 2.0 * (Complex64::new(1.0, 0.0) / at_zero - Complex64::new(1.0, 0.0)).re;
    Ok(if lhs <= rhs + 1e-9 {
        CowenPommerenke::Holds {
            lhs,
            rhs,
            excluded_divergent: excluded,
        }
    } else {
        CowenPommerenke::Fails {
            lhs,
            rhs,
            excluded_divergent: excluded,
        }
    })
}

/// Boundary traces of a petal: polylines along level sets Im h = const,
/// for plotting. Returns rows (level, Re z, Im z).
pub fn petal_boundary_traces(
    spec: &Arc<SemigroupSpec>,
    levels: &[f64],
    re_range: (f64, f64),
    n: usize,
) -> Result<Vec<(f64, Complex64)>> {
    let k = spec.koenigs().ok_or(Error::PredicateUnavailable)?;
    let mut rows = Vec::new();
    for &lvl in levels {
        let mut seed = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let x = re_range.0 + (re_range.1 - re_range.0) * j as f64 / (n - 1) as f64;
            let w = Complex64::new(x, lvl);
            if k.omega.is_exact() && !k.omega.contains(w) {
                continue;
            }
            if let Ok(z) = k.invert(w, seed) {
                seed = z;
                rows.push((lvl, z));
            }
        }
    }
    Ok(rows)
}

/// rho-distance helper for tests: both arguments inside the disc.
pub fn petal_rho(a: Complex64, b: Complex64) -> Result<f64> {
    rho_disc(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn koebe() -> Arc<SemigroupSpec> {
        catalog::build("koebe-zero-step").unwrap().semigroup().unwrap()
    }

    fn strip() -> Arc<SemigroupSpec> {
        catalog::build("strip-minus-slits").unwrap().semigroup().unwrap()
    }

    #[test]
    fn membership_examples() {
        let s = koebe();
        assert!(petal_membership(&s, c(0.0, 0.5)).unwrap().inside);
        assert!(!petal_membership(&s, c(0.0, 0.0)).unwrap().inside);
        assert!(!petal_membership(&s, c(0.3, 0.0)).unwrap().inside);
        let st = strip();
        assert!(petal_membership(&st, c(0.0, 0.0)).unwrap().inside);
    }

    #[test]
    fn alpha_points_of_catalog_petals() {
        let st = strip();
        let a = alpha_point(&st, c(0.0, 0.0)).unwrap();
        assert_eq!(a.kind, PetalKind::Hyperbolic);
        assert!((a.sigma - c(-1.0, 0.0)).norm() < 1e-6, "sigma = {}", a.sigma);

        let s = koebe();
        let up = alpha_point(&s, c(0.0, 0.5)).unwrap();
        assert_eq!(up.kind, PetalKind::Parabolic);
        assert!((up.sigma - c(1.0, 0.0)).norm() < 1e-4, "sigma = {}", up.sigma);
        let down = alpha_point(&s, c(0.0, -0.5)).unwrap();
        assert_eq!(down.kind, PetalKind::Parabolic);
        assert!((down.sigma - c(1.0, 0.0)).norm() < 1e-4);
        // distinct parabolic petals carry distinct ids
        assert_ne!(
            petal_id(&s, c(0.0, 0.5)).unwrap(),
            petal_id(&s, c(0.0, -0.5)).unwrap()
        );
    }

    #[test]
    fn petals_are_flow_invariant() {
        let st = strip();
        for (seed, _) in [(c(0.0, 0.0), 0), (c(0.6, 0.6), 1), (c(0.6, -0.6), 2)] {
            let id0 = petal_id(&st, seed).unwrap();
            let a0 = alpha_point(&st, seed).unwrap();
            for &t in &[0.5, 1.0, 2.0] {
                let moved = flow(&st, t, seed).unwrap();
                assert_eq!(petal_id(&st, moved).unwrap(), id0);
                let a1 = alpha_point(&st, moved).unwrap();
                assert!((a0.sigma - a1.sigma).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn spectral_values() {
        let st = strip();
        let sv = spectral_value(&st, c(-1.0, 0.0)).unwrap();
        // pi / (2 pi) = 1/2, and log of the measured multiplier agrees
        assert!((sv.lambda - 0.5).abs() < 1e-3, "lambda = {}", sv.lambda);
        assert!((sv.from_strip.unwrap() - 0.5).abs() < 1e-12);
        assert!((sv.from_multiplier - sv.from_strip.unwrap()).abs() < 1e-3);

        let hyp = catalog::build("mobius-hyperbolic").unwrap().semigroup().unwrap();
        let sv = spectral_value(&hyp, c(-1.0, 0.0)).unwrap();
        // multiplier 3 at -1: spectral value log 3; strip width pi/log 3
        assert!((sv.lambda - 3f64.ln()).abs() < 1e-5);
        assert!((sv.from_strip.unwrap() - 3f64.ln()).abs() < 1e-12);
        assert!(matches!(
            spectral_value(&st, c(1.0, 0.0)),
            Err(Error::NotRepelling(_))
        ));
    }

    #[test]
    fn spectral_value_scales_with_time() {
        // time-rescaled semigroup psi_{2t}: multiplier at sigma squares
        let st = strip();
        let psi2 = st.element(2.0);
        let ad1 = boundary_multiplier(&st.element(1.0), c(-1.0, 0.0)).unwrap();
        let ad2 = boundary_multiplier(&psi2, c(-1.0, 0.0)).unwrap();
        assert!((ad2.value.ln() - 2.0 * ad1.value.ln()).abs() < 1e-3);
    }

    #[test]
    fn pre_model_conjugation_and_isogonality() {
        let st = strip();
        let pm = pre_model(&st, c(-1.0, 0.0), None).unwrap();
        assert!((pm.lambda - 0.5).abs() < 1e-12);
        let ws = [c(1.0, 0.0), c(0.5, 0.3), c(2.0, -0.7), c(0.2, 0.0)];
        let ts = [0.0, 0.5, 1.0, 2.0];
        let r = pre_model_conjugation_residual(&st, &pm, &ws, &ts).unwrap();
        assert!(r < 1e-6, "conjugation residual {r}");
        let (ok, tails) = pre_model_isogonality(&pm).unwrap();
        assert!(ok, "tails {tails:?}");
        // multiplier cross-check: e^lambda matches the boundary multiplier
        let ad = boundary_multiplier(&st.element(1.0), c(-1.0, 0.0)).unwrap();
        assert!((ad.value - pm.lambda.exp()).abs() < 1e-3);
    }

    #[test]
    fn pre_model_of_group_covers_the_disc() {
        let hyp = catalog::build("mobius-hyperbolic").unwrap().semigroup().unwrap();
        let pm = pre_model(&hyp, c(-1.0, 0.0), None).unwrap();
        assert!((pm.lambda - 3f64.ln()).abs() < 1e-12);
        let ws = [c(1.0, 0.0), c(3.0, 1.0), c(0.1, -0.05)];
        let ts = [0.0, 1.0, 2.0];
        let r = pre_model_conjugation_residual(&hyp, &pm, &ws, &ts).unwrap();
        assert!(r < 1e-6);
        // t = 0 consistency is exact
        let w = c(0.7, 0.2);
        let a = pm.map.eval(w).unwrap();
        let b = pm.map.eval(w * (pm.lambda * 0.0).exp()).unwrap();
        assert_eq!(a, b);
        // the intertwiner reaches deep into the disc (whole-disc petal):
        // sample disc points and verify they are hit by the half-plane
        let k = hyp.koenigs().unwrap();
        for z in util::disc_grid(24, 0.9) {
            let w_img = k.eval(z).unwrap();
            // invert Psi: w = exp((h(z) - s)/coeff)
            let w = ((w_img - c(0.0, pm.map.center) - c(pm.map.s_shift, 0.0))
                / c(pm.map.coeff, 0.0))
            .exp();
            assert!(w.re > 0.0);
            let back = pm.map.eval(w).unwrap();
            assert!((back - z).norm() < 1e-9);
        }
    }

    #[test]
    fn petal_image_of_semigroup_elements() {
        // flow elements fix each petal; the affinity constant recovers t0
        let s = koebe();
        match petal_image(&s, &s.element(0.8), c(0.0, 0.5)).unwrap() {
            PetalImageVerdict::SamePetal {
                t0,
                affinity_residual,
            } => {
                assert!((t0 - 0.8).abs() < 1e-9, "t0 = {t0}");
                assert!(affinity_residual < 1e-9);
            }
            other => panic!("expected SamePetal, got {other:?}"),
        }
        let st = strip();
        match petal_image(&st, &st.element(1.3), c(0.0, 0.0)).unwrap() {
            PetalImageVerdict::SamePetal { t0, .. } => {
                assert!((t0 - 1.3).abs() < 1e-9)
            }
            other => panic!("expected SamePetal, got {other:?}"),
        }
    }

    #[test]
    fn cascades_degenerate_for_flow_elements() {
        let s = koebe();
        let rep = petal_cascade(&s, &s.element(0.7), c(0.0, 0.5), 8).unwrap();
        assert!(rep.degenerate_fixed);
        assert_eq!(rep.alpha_points.len(), 1);
        let st = strip();
        let rep = petal_cascade(&st, &st.element(1.3), c(0.0, 0.0), 8).unwrap();
        assert!(rep.degenerate_fixed);
        assert!(rep.disjoint);
    }

    #[test]
    fn two_parabolic_petals_forbid_complex_translations() {
        // a semigroup with two parabolic petals admits no commuting map
        // whose model conjugate translates off the real axis: the Omega
        // invariance audit rejects every Im c != 0
        let s = koebe();
        let k = s.koenigs().unwrap();
        for c_im in [0.5, -0.3, 1.0, 1e-3] {
            let cand = Complex64::new(0.7, c_im);
            assert!(!k.omega.translation_invariant(cand));
        }
        for c_re in [0.0, 0.4, 2.0] {
            assert!(k.omega.translation_invariant(Complex64::new(c_re, 0.0)));
        }
        assert!(!k.omega.translation_invariant(Complex64::new(-0.1, 0.0)));
    }

    #[test]
    fn isogonality_examples() {
        let phi = MapDescriptor::Mobius(
            crate::map::Mobius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap(),
        );
        let rep = isogonality_test(&phi, c(-1.0, 0.0)).unwrap();
        assert!(rep.isogonal, "{:?}", rep.tail_args);
        let id = MapDescriptor::identity();
        let rep = isogonality_test(&id, c(0.6, 0.8)).unwrap();
        assert!(rep.isogonal);
    }

    #[test]
    fn half_plane_ratio_limit_at_regular_point() {
        // T = C ∘ phi ∘ C^{-1} fixes 0 with finite derivative; then
        // T(beta x)/T(x) -> beta as x -> 0+ (here beta = 2)
        let cay = crate::map::Mobius::cayley(c(1.0, 0.0)).unwrap();
        let phi =
            crate::map::Mobius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let t_map = cay.compose(&phi).compose(&cay.inverse());
        let beta = 2.0;
        let x = 1e-7;
        let ratio = t_map.eval(c(beta * x, 0.0)).unwrap() / t_map.eval(c(x, 0.0)).unwrap();
        assert!((ratio - c(beta, 0.0)).norm() < 1e-3, "ratio {ratio}");
    }

    #[test]
    fn cowen_pommerenke_cases() {
        let st = strip();
        match cowen_pommerenke_bound(&st, &[c(-1.0, 0.0)]).unwrap() {
            CowenPommerenke::Holds { lhs, rhs, .. } => {
                // lhs = 4/(sqrt(e) - 1), rhs = 2(1/psi_1(0) - 1)
                let want_lhs = 4.0 / (0.5_f64.exp() - 1.0);
                assert!((lhs - want_lhs).abs() < 1e-3, "lhs {lhs} want {want_lhs}");
                assert!(rhs > lhs);
            }
            other => panic!("expected Holds, got {other:?}"),
        }
        match cowen_pommerenke_bound(&st, &[]).unwrap() {
            CowenPommerenke::Holds { lhs, .. } => assert_eq!(lhs, 0.0),
            other => panic!("expected Holds with empty list, got {other:?}"),
        }
        let hyp = catalog::build("mobius-hyperbolic").unwrap().semigroup().unwrap();
        assert!(matches!(
            cowen_pommerenke_bound(&hyp, &[c(-1.0, 0.0)]).unwrap(),
            CowenPommerenke::NotApplicable
        ));
    }

    #[test]
    fn strip_into_half_plane_is_never_onto() {
        // model-level analogue of a hyperbolic petal carried into a
        // parabolic one: a strip translated into a half-plane leaves an
        // uncovered target point
        let strip = (0.0, 1.0);
        let shift = c(0.0, 2.5);
        let image = (strip.0 + shift.im, strip.1 + shift.im);
        assert!(image.0 > 0.0, "image strip sits inside the half-plane");
        let uncovered = c(0.0, image.1 + 1.0);
        assert!(uncovered.im > 0.0 && (uncovered.im < image.0 || uncovered.im > image.1));
    }
}
