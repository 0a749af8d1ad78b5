//! Commutativity machinery: commutator residuals, the affinity criterion
//! H ∘ phi = H + c, the normalized-quotient limit f along forward orbits,
//! periodic extension and injectivity audits of the model conjugate, the
//! constant formula at the Denjoy-Wolff point, the sufficient-criteria
//! battery, the two-semigroup check, and the elliptic criterion.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::{Holomorphic, MapDescriptor};
use crate::metric::{boundary_multiplier, brfp_scan, classify, MapKind};
use crate::petals::isogonality_test;
use crate::report::{cx, cx_opt, cx_pairs};
use crate::semigroup::SemigroupSpec;
use crate::util;

/// Sup over the grid of |phi(psi(z)) - psi(phi(z))|.
pub fn commutator_residual(
    phi: &MapDescriptor,
    psi: &MapDescriptor,
    grid: &[Complex64],
) -> Result<f64> {
    let mut sup = 0.0_f64;
    for &z in grid {
        let a = phi.eval(psi.eval(z)?)?;
        let b = psi.eval(phi.eval(z)?)?;
        sup = sup.max((a - b).norm());
    }
    Ok(sup)
}

/// Affinity constant of phi with respect to the Koenigs map h:
/// c = h(phi(z0)) - h(z0) at z0 = 0, with the sup residual of
/// h ∘ phi - h - c over the grid. A residual below tolerance certifies that
/// the whole semigroup commutes with phi; a large residual certifies
/// failure.
pub fn affinity_constant(
    h: &dyn Holomorphic,
    phi: &MapDescriptor,
    grid: &[Complex64],
) -> Result<(Complex64, f64)> {
    let z0 = Complex64::new(0.0, 0.0);
    let c = h.eval(phi.eval(z0)?)? - h.eval(z0)?;
    let mut sup = 0.0_f64;
    for &z in grid {
        let lhs = h.eval(phi.eval(z)?)?;
        let rhs = h.eval(z)? + c;
        sup = sup.max((lhs - rhs).norm());
    }
    Ok((c, sup))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AffinityReport {
    #[serde(with = "cx_pairs")]
    pub f_samples: Vec<(Complex64, Complex64)>,
    pub n_used: usize,
    pub is_constant: bool,
    pub spread: f64,
    #[serde(with = "cx")]
    pub c_estimate: Complex64,
    pub residual_history: Vec<f64>,
}

/// Accelerated limit of R(phi^n(z)) for one base point, where
/// R(u) = (psi(u) - u)/(phi(u) - u). Uses the exact commutation identity
/// psi(phi^n(z)) = phi^n(psi(z)), so only phi is iterated.
fn f_value_sequence(
    phi: &MapDescriptor,
    psi_z: Complex64,
    z: Complex64,
    n_max: usize,
    block: usize,
) -> Result<(Vec<Complex64>, usize)> {
    let mut u = z;
    let mut v = psi_z;
    let mut raw = Vec::new();
    let mut n = 0usize;
    while n < n_max {
        let fu = phi.eval(u)?;
        let den = fu - u;
        if den.norm() < 1e-13 {
            break;
        }
        raw.push((v - u) / den);
        // advance both orbits `block` steps
        for _ in 0..block {
            u = phi.eval(u)?;
            v = phi.eval(v)?;
            n += 1;
        }
    }
    Ok((raw, n))
}

/// The locally-uniform limit f of R(phi^n) on a grid, for a parabolic map
/// phi of positive hyperbolic step and a commuting psi. Constancy of f is
/// equivalent to psi being affine with respect to phi.
pub fn f_limit(
    phi: &MapDescriptor,
    psi: &MapDescriptor,
    grid: &[Complex64],
    n_max: usize,
) -> Result<AffinityReport> {
    let report = classify(phi)?;
    if report.kind != MapKind::ParabolicPositiveStep {
        return Err(Error::WrongClass {
            expected: "parabolic of positive hyperbolic step",
            found: format!("{:?}", report.kind),
        });
    }
    let small = util::disc_grid(24, 0.8);
    let res = commutator_residual(phi, psi, &small)?;
    if res > 1e-6 {
        return Err(Error::NotCommuting(res));
    }
    let mut is_id = true;
    for &z in &small {
        if (psi.eval(z)? - z).norm() > 1e-12 {
            is_id = false;
            break;
        }
    }
    if is_id {
        return Err(Error::IsIdentity);
    }

    let block = 8usize;
    let mut sequences: Vec<Vec<Complex64>> = Vec::with_capacity(grid.len());
    let mut n_used = 0usize;
    for &z in grid {
        let (seq, n) = f_value_sequence(phi, psi.eval(z)?, z, n_max, block)?;
        if seq.len() < 3 {
            return Err(Error::SlowConvergence {
                depth: n,
                residual: f64::NAN,
            });
        }
        sequences.push(seq);
        n_used = n_used.max(n);
    }
    // accelerated tail values and their convergence history
    let mut history = Vec::new();
    let min_len = sequences.iter().map(|s| s.len()).min().unwrap();
    let mut prev: Option<Vec<Complex64>> = None;
    let mut finals: Vec<Complex64> = Vec::new();
    for cut in (4..=min_len).step_by(4) {
        let vals: Vec<Complex64> = sequences
            .iter()
            .map(|s| accelerated_tail(&s[..cut]))
            .collect();
        if let Some(p) = &prev {
            let change = vals
                .iter()
                .zip(p)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            history.push(change);
        }
        finals = vals.clone();
        prev = Some(vals);
        if history.last().map_or(false, |&c| c < 1e-7) {
            break;
        }
    }
    let spread = {
        let mut s = 0.0_f64;
        for i in 0..finals.len() {
            for j in (i + 1)..finals.len() {
                s = s.max((finals[i] - finals[j]).norm());
            }
        }
        s
    };
    let c_estimate = finals.iter().sum::<Complex64>() / finals.len() as f64;
    Ok(AffinityReport {
        f_samples: grid.iter().cloned().zip(finals).collect(),
        n_used,
        is_constant: spread < 1e-5,
        spread,
        c_estimate,
        residual_history: history,
    })
}

fn accelerated_tail(seq: &[Complex64]) -> Complex64 {
    if seq.len() < 3 {
        return *seq.last().unwrap();
    }
    let mut lvl1 = Vec::new();
    for w in seq.windows(3) {
        lvl1.push(util::aitken(w));
    }
    if lvl1.len() >= 3 {
        util::aitken(&lvl1)
    } else {
        *lvl1.last().unwrap()
    }
}

/// Limit value of f at a single point (accelerated), shared by the
/// periodicity check.
pub fn f_value_at(
    phi: &MapDescriptor,
    psi: &MapDescriptor,
    z: Complex64,
    n_max: usize,
) -> Result<Complex64> {
    let (seq, _) = f_value_sequence(phi, psi.eval(z)?, z, n_max, 8)?;
    if seq.len() < 3 {
        return Err(Error::SlowConvergence {
            depth: n_max,
            residual: f64::NAN,
        });
    }
    Ok(accelerated_tail(&seq))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InjectivityAudit {
    pub injective: bool,
    /// Colliding pair when non-injective.
    #[serde(with = "cx_opt")]
    pub witness_a: Option<Complex64>,
    #[serde(with = "cx_opt")]
    pub witness_b: Option<Complex64>,
    pub min_image_gap: f64,
}

/// Injectivity audit of a holomorphic map on a sampled region: searches for
/// a pair of well-separated sources with nearly equal images and polishes
/// the best candidate with a Newton collision search.
pub fn injectivity_audit<G, GP>(
    g: G,
    g_deriv: GP,
    samples: &[Complex64],
    source_sep: f64,
) -> InjectivityAudit
where
    G: Fn(Complex64) -> Result<Complex64>,
    GP: Fn(Complex64) -> Result<Complex64>,
{
    let vals: Vec<Option<Complex64>> = samples.iter().map(|&w| g(w).ok()).collect();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            if (samples[i] - samples[j]).norm() < source_sep {
                continue;
            }
            if let (Some(a), Some(b)) = (vals[i], vals[j]) {
                let gap = (a - b).norm();
                if best.map_or(true, |(_, _, g0)| gap < g0) {
                    best = Some((i, j, gap));
                }
            }
        }
    }
    let Some((i, j, gap)) = best else {
        return InjectivityAudit {
            injective: true,
            witness_a: None,
            witness_b: None,
            min_image_gap: f64::INFINITY,
        };
    };
    // Newton polish: solve g(b) = g(a) for b starting from the candidate
    let a = samples[i];
    let target = match g(a) {
        Ok(v) => v,
        Err(_) => {
            return InjectivityAudit {
                injective: true,
                witness_a: None,
                witness_b: None,
                min_image_gap: gap,
            }
        }
    };
    let mut b = samples[j];
    for _ in 0..60 {
        let (val, der) = match (g(b), g_deriv(b)) {
            (Ok(v), Ok(d)) if d.norm() > 1e-300 => (v, d),
            _ => break,
        };
        let r = val - target;
        if r.norm() < 1e-12 {
            break;
        }
        b -= r / der;
    }
    let polished_gap = g(b).map(|v| (v - target).norm()).unwrap_or(f64::INFINITY);
    if polished_gap < 1e-10 && (b - a).norm() > source_sep {
        InjectivityAudit {
            injective: false,
            witness_a: Some(a),
            witness_b: Some(b),
            min_image_gap: polished_gap,
        }
    } else {
        InjectivityAudit {
            injective: true,
            witness_a: None,
            witness_b: None,
            min_image_gap: gap,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PeriodicCheck {
    /// sup |f(h^{-1}(w+1)) - f(h^{-1}(w))| over the sampled pairs.
    pub periodicity_residual: f64,
    pub injectivity: InjectivityAudit,
    /// Im of the periodic part stays on the model side of the real axis.
    pub range_ok: bool,
    pub min_im: f64,
    pub max_im: f64,
}

/// Checks on the periodic extension of f ∘ h^{-1}: 1-periodicity, the
/// univalence audit of g(w) = w + G(w), and the range condition
/// (G maps into S ∪ R for the model half-plane S).
pub fn periodic_extension_check(
    phi: &MapDescriptor,
    psi: &MapDescriptor,
    h_phi: &dyn Holomorphic,
    base_upper: bool,
    zs: &[Complex64],
    n_max: usize,
) -> Result<PeriodicCheck> {
    // periodicity through independent limits at z and phi(z):
    // w and w + 1 are the h-images of those two points
    let mut periodicity = 0.0_f64;
    for &z in zs {
        let f_here = f_value_at(phi, psi, z, n_max)?;
        let f_shift = f_value_at(phi, psi, phi.eval(z)?, n_max)?;
        periodicity = periodicity.max((f_shift - f_here).norm());
    }
    // model-side samples of G(w) = h(psi(h^{-1}(w))) - w at w = h(z)
    let mut ws = Vec::with_capacity(zs.len());
    let mut gs = Vec::with_capacity(zs.len());
    for &z in zs {
        let w = h_phi.eval(z)?;
        let gw = h_phi.eval(psi.eval(z)?)?;
        ws.push(w);
        gs.push(gw);
    }
    // injectivity of g on sample pairs
    let mut injective = true;
    let mut min_gap = f64::INFINITY;
    let (mut wa, mut wb) = (None, None);
    for i in 0..ws.len() {
        for j in (i + 1)..ws.len() {
            let src = (ws[i] - ws[j]).norm();
            let img = (gs[i] - gs[j]).norm();
            if src > 1e-4 {
                min_gap = min_gap.min(img);
                if img < 1e-6 {
                    injective = false;
                    wa = Some(ws[i]);
                    wb = Some(ws[j]);
                }
            }
        }
    }
    // range of the periodic part
    let mut min_im = f64::INFINITY;
    let mut max_im = f64::NEG_INFINITY;
    for (w, g) in ws.iter().zip(&gs) {
        let part = g - w;
        min_im = min_im.min(part.im);
        max_im = max_im.max(part.im);
    }
    let range_ok = if base_upper {
        min_im >= -1e-6
    } else {
        max_im <= 1e-6
    };
    Ok(PeriodicCheck {
        periodicity_residual: periodicity,
        injectivity: InjectivityAudit {
            injective,
            witness_a: wa,
            witness_b: wb,
            min_image_gap: min_gap,
        },
        range_ok,
        min_im,
        max_im,
    })
}

/// The affinity constant from boundary data at the common Denjoy-Wolff
/// point: log-quotient of multipliers in the hyperbolic case, radial limit
/// of (psi - id)/(phi - id) with Richardson extrapolation in the parabolic
/// case.
pub fn c_formula(
    phi: &MapDescriptor,
    psi: &MapDescriptor,
    tau: Complex64,
) -> Result<Complex64> {
    let phi_mult = boundary_multiplier(phi, tau)?;
    if !phi_mult.finite {
        return Err(Error::DivergentQuotient);
    }
    if phi_mult.value < 1.0 - 2e-4 {
        let psi_mult = boundary_multiplier(psi, tau)?;
        if !psi_mult.finite {
            return Err(Error::DivergentQuotient);
        }
        return Ok(Complex64::new(
            psi_mult.value.ln() / phi_mult.value.ln(),
            0.0,
        ));
    }
    // parabolic branch; stop once the pointwise increments fall below the
    // f64 resolution of points this close to the boundary
    let mut re = Vec::new();
    let mut im = Vec::new();
    for k in 8..=24 {
        let r = 1.0 - 2f64.powi(-k);
        let z = tau * r;
        let (p, q) = (phi.eval(z)?, psi.eval(z)?);
        let den = p - z;
        if den.norm() < 1e-11 || (q - z).norm() < 1e-11 {
            break;
        }
        let v = (q - z) / den;
        if !v.re.is_finite() || v.norm() > 1e8 {
            return Err(Error::DivergentQuotient);
        }
        re.push(v.re);
        im.push(v.im);
    }
    if re.len() < 3 {
        return Err(Error::DivergentQuotient);
    }
    let take = re.len().min(6);
    let (cre, _) = util::richardson_dyadic(&re[re.len() - take..]);
    let (cim, _) = util::richardson_dyadic(&im[im.len() - take..]);
    Ok(Complex64::new(cre, cim))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionFlag {
    pub holds: bool,
    pub evidence: f64,
    #[serde(with = "cx_opt")]
    pub point: Option<Complex64>,
    pub note: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CriteriaReport {
    /// (a) phi is affine with respect to psi_1.
    pub affine: CriterionFlag,
    /// (b) psi_1 is hyperbolic or parabolic of zero hyperbolic step.
    pub hyperbolic_or_zero_step: CriterionFlag,
    /// (c) psi_r commutes with phi for the fixed irrational r = sqrt(2)-1.
    pub irrational_time: CriterionFlag,
    /// (d) unrestricted-limit proxy: radial and tangential quotients agree.
    pub unrestricted_limit: CriterionFlag,
    /// (e) psi_1 has a repelling point at which phi is isogonal.
    pub isogonal_repelling: CriterionFlag,
    /// (f) phi and psi_1 share a boundary fixed point other than tau.
    pub common_boundary_point: CriterionFlag,
    /// Sampled conclusion: commutator residuals of (phi, psi_t).
    pub conclusion_residuals: Vec<(f64, f64)>,
    pub conclusion_holds: bool,
}

const IRRATIONAL_T: f64 = std::f64::consts::SQRT_2 - 1.0;

/// Evaluate the sufficient conditions (a)-(f) and the sampled conclusion
/// that the whole semigroup commutes with phi.
pub fn criteria_battery(
    phi: &MapDescriptor,
    spec: &Arc<SemigroupSpec>,
    grid: &[Complex64],
) -> Result<CriteriaReport> {
    let psi1 = spec.element(1.0);
    let pre = commutator_residual(phi, &psi1, grid)?;
    if pre > 1e-6 {
        return Err(Error::NotCommuting(pre));
    }
    // (a) affinity through the Koenigs map
    let affine = match spec.koenigs() {
        Some(k) if matches!(spec.step(), Some(crate::semigroup::ModelStep::Translation)) => {
            let (c, residual) = affinity_constant(k.as_ref(), phi, grid)?;
            CriterionFlag {
                holds: residual < 1e-8,
                evidence: residual,
                point: Some(c),
                note: "H(phi) - H - c residual".into(),
            }
        }
        _ => CriterionFlag {
            holds: false,
            evidence: f64::NAN,
            point: None,
            note: "no Abel-form Koenigs data".into(),
        },
    };
    // (b) class of psi_1
    let cls = classify(&psi1)?;
    let hyperbolic_or_zero_step = CriterionFlag {
        holds: matches!(cls.kind, MapKind::Hyperbolic | MapKind::ParabolicZeroStep),
        evidence: cls.multiplier.norm(),
        point: Some(cls.dw_point),
        note: format!("psi_1 classified {:?}", cls.kind),
    };
    // (c) one irrational time
    let r_res = commutator_residual(phi, &spec.element(IRRATIONAL_T), grid)?;
    let irrational_time = CriterionFlag {
        holds: r_res < 1e-6,
        evidence: r_res,
        point: None,
        note: format!("commutator with psi_r at r = {IRRATIONAL_T}"),
    };
    // (d) unrestricted-limit proxy along three approach curves. This is a
    // heuristic: full unrestricted limits are not computable from samples,
    // and the flag can be a false positive on tangentially wild maps.
    let tau = spec.dw_point;
    let unrestricted_limit = unrestricted_proxy(phi, &psi1, tau)?;
    // (e) repelling point of psi_1 at which phi is isogonal
    let records = brfp_scan(&psi1, 256);
    let mut isogonal_repelling = CriterionFlag {
        holds: false,
        evidence: f64::NAN,
        point: None,
        note: "no repelling point of psi_1 found".into(),
    };
    for rec in records.iter().filter(|r| r.regular) {
        if let Ok(iso) = isogonality_test(phi, rec.sigma) {
            isogonal_repelling = CriterionFlag {
                holds: iso.isogonal,
                evidence: iso.tail_args.iter().fold(0.0_f64, |m, a| m.max(a.abs())),
                point: Some(rec.sigma),
                note: "argument tails along radius and Stolz rays".into(),
            };
            if iso.isogonal {
                break;
            }
        }
    }
    // (f) common boundary fixed point away from tau
    let phi_records = brfp_scan(phi, 256);
    let mut common_boundary_point = CriterionFlag {
        holds: false,
        evidence: f64::NAN,
        point: None,
        note: "no shared boundary fixed point away from tau".into(),
    };
    for rec in records.iter() {
        if (rec.sigma - tau).norm() < 1e-4 {
            continue;
        }
        if let Some(hit) = phi_records
            .iter()
            .find(|p| (p.sigma - rec.sigma).norm() < 1e-4)
        {
            common_boundary_point = CriterionFlag {
                holds: true,
                evidence: (hit.sigma - rec.sigma).norm(),
                point: Some(rec.sigma),
                note: "matched boundary fixed points".into(),
            };
            break;
        }
    }
    // sampled conclusion
    let ts = [0.25, 1.0 / 3.0, std::f64::consts::E - 2.0, IRRATIONAL_T];
    let mut conclusion_residuals = Vec::new();
    let mut conclusion_holds = true;
    for &t in &ts {
        let r = commutator_residual(phi, &spec.element(t), grid)?;
        conclusion_holds &= r < 1e-6;
        conclusion_residuals.push((t, r));
    }
    Ok(CriteriaReport {
        affine,
        hyperbolic_or_zero_step,
        irrational_time,
        unrestricted_limit,
        isogonal_repelling,
        common_boundary_point,
        conclusion_residuals,
        conclusion_holds,
    })
}

/// Quotient (phi - id)/(psi - id) along the radius and two internally
/// tangent circles at tau; agreement of the three limits within 1e-3 is the
/// computable proxy for the unrestricted limit.
fn unrestricted_proxy(
    phi: &MapDescriptor,
    psi: &MapDescriptor,
    tau: Complex64,
) -> Result<CriterionFlag> {
    let mut limits = Vec::new();
    // radial curve
    let mut radial = Vec::new();
    for k in 6..=20 {
        let z = tau * (1.0 - 2f64.powi(-k));
        if let Some(q) = quotient_at(phi, psi, z)? {
            radial.push(q);
        }
    }
    if radial.len() >= 3 {
        limits.push(accelerated_tail(&radial));
    }
    // two horocycle-like curves internally tangent at tau
    for sign in [1.0, -1.0] {
        let rho = 0.35;
        let mut vals = Vec::new();
        for k in 2..=14 {
            let alpha = sign * 2f64.powi(-k);
            let z = tau * Complex64::new(1.0 - rho, 0.0)
                + tau * Complex64::from_polar(rho, alpha);
            if z.norm() >= 1.0 {
                continue;
            }
            if let Some(q) = quotient_at(phi, psi, z)? {
                vals.push(q);
            }
        }
        if vals.len() >= 3 {
            limits.push(accelerated_tail(&vals));
        }
    }
    if limits.len() < 3 {
        return Ok(CriterionFlag {
            holds: false,
            evidence: f64::NAN,
            point: None,
            note: "approach curves left the evaluable region".into(),
        });
    }
    let mean = limits.iter().sum::<Complex64>() / limits.len() as f64;
    let spread = limits
        .iter()
        .map(|l| (l - mean).norm())
        .fold(0.0, f64::max);
    Ok(CriterionFlag {
        holds: spread < 1e-3,
        evidence: spread,
        point: Some(mean),
        note: "heuristic three-curve proxy for the unrestricted limit".into(),
    })
}

fn quotient_at(
    phi: &MapDescriptor,
    psi: &MapDescriptor,
    z: Complex64,
) -> Result<Option<Complex64>> {
    let (p, q) = match (phi.eval(z), psi.eval(z)) {
        (Ok(p), Ok(q)) => (p, q),
        _ => return Ok(None),
    };
    let den = q - z;
    if den.norm() < 1e-13 {
        return Ok(None);
    }
    Ok(Some((p - z) / den))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SemigroupCommuteReport {
    pub hypothesis: CriterionFlag,
    pub residuals: Vec<(f64, f64, f64)>,
    pub commute: bool,
}

/// Two-semigroup commutation check: verifies the unrestricted-limit
/// hypothesis for (phi_1 - id)/(psi_1 - id) and then samples the
/// commutators phi_s ∘ psi_t - psi_t ∘ phi_s.
pub fn semigroups_commute_check(
    s1: &Arc<SemigroupSpec>,
    s2: &Arc<SemigroupSpec>,
    grid: &[Complex64],
) -> Result<SemigroupCommuteReport> {
    let phi1 = s1.element(1.0);
    let psi1 = s2.element(1.0);
    let pre = commutator_residual(&phi1, &psi1, grid)?;
    if pre > 1e-6 {
        return Err(Error::NotCommuting(pre));
    }
    let hypothesis = unrestricted_proxy(&phi1, &psi1, s1.dw_point)?;
    let times = [0.5, 1.0, std::f64::consts::SQRT_2];
    let mut residuals = Vec::new();
    let mut commute = true;
    for &s in &times {
        for &t in &times {
            let r = commutator_residual(&s1.element(s), &s2.element(t), grid)?;
            commute &= r < 1e-6;
            residuals.push((s, t, r));
        }
    }
    Ok(SemigroupCommuteReport {
        hypothesis,
        residuals,
        commute,
    })
}

/// Elliptic criterion: for an elliptic semigroup whose time-1 map is not an
/// automorphism, a commuting phi must satisfy H ∘ phi = c H; the residual
/// certifies that the whole semigroup commutes with phi.
pub fn elliptic_centralizer_check(
    spec: &Arc<SemigroupSpec>,
    phi: &MapDescriptor,
    grid: &[Complex64],
) -> Result<(Complex64, f64)> {
    if spec.kind != MapKind::Elliptic {
        return Err(Error::WrongClass {
            expected: "elliptic semigroup",
            found: format!("{:?}", spec.kind),
        });
    }
    let psi1 = spec.element(1.0);
    if is_disc_automorphism(&psi1)? {
        return Err(Error::WrongClass {
            expected: "elliptic non-automorphism",
            found: "automorphism".into(),
        });
    }
    let pre = commutator_residual(phi, &psi1, grid)?;
    if pre > 1e-6 {
        return Err(Error::NotCommuting(pre));
    }
    let h = spec.koenigs().ok_or(Error::PredicateUnavailable)?;
    let z0 = grid
        .iter()
        .find(|z| h.eval(**z).map(|v| v.norm() > 0.1).unwrap_or(false))
        .copied()
        .unwrap_or(Complex64::new(0.3, 0.0));
    let c = h.eval(phi.eval(z0)?)? / h.eval(z0)?;
    let mut sup = 0.0_f64;
    for &z in grid {
        let lhs = h.eval(phi.eval(z)?)?;
        let rhs = c * h.eval(z)?;
        sup = sup.max((lhs - rhs).norm());
    }
    Ok((c, sup))
}

fn is_disc_automorphism(m: &MapDescriptor) -> Result<bool> {
    Ok(crate::map::disc_automorphism_fit(m, 1e-9).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::map::{DomainTag, Mobius};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn koebe() -> Arc<SemigroupSpec> {
        catalog::build("koebe-zero-step").unwrap().semigroup().unwrap()
    }

    fn grid() -> Vec<Complex64> {
        util::disc_grid(48, 0.85)
    }

    #[test]
    fn commutator_examples() {
        let s = koebe();
        let r = commutator_residual(&s.element(1.0), &s.element(0.7), &grid()).unwrap();
        assert!(r < 1e-9, "same-semigroup residual {r}");

        let phi = MapDescriptor::Mobius(
            Mobius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap(),
        );
        let rot = MapDescriptor::parse_formula("i*z", DomainTag::Disc).unwrap();
        let mut pts = grid();
        pts.push(c(0.0, 0.0));
        let r = commutator_residual(&phi, &rot, &pts).unwrap();
        // pointwise oracle at z = 0: |phi(0) - i phi(0)| = 0.5 |1 - i|
        let at_zero = (phi.eval(c(0.0, 0.0)).unwrap()
            - rot.eval(phi.eval(c(0.0, 0.0)).unwrap()).unwrap())
        .norm();
        assert!((at_zero - 0.5 * 2f64.sqrt()).abs() < 1e-12);
        assert!(r >= at_zero - 1e-12 && r > 0.1);

        let id = MapDescriptor::identity();
        assert_eq!(commutator_residual(&id, &rot, &grid()).unwrap(), 0.0);
    }

    #[test]
    fn affinity_examples() {
        let s = koebe();
        let k = s.koenigs().unwrap();
        let (cst, res) = affinity_constant(k.as_ref(), &s.element(1.5), &grid()).unwrap();
        assert!((cst - c(1.5, 0.0)).norm() < 1e-10);
        assert!(res < 1e-9);

        let (cst, res) = affinity_constant(k.as_ref(), &MapDescriptor::identity(), &grid()).unwrap();
        assert!(cst.norm() < 1e-14 && res < 1e-12);

        let phi = MapDescriptor::Mobius(
            Mobius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap(),
        );
        let (_, res) = affinity_constant(k.as_ref(), &phi, &grid()).unwrap();
        assert!(res > 0.1, "Möbius map is not in the Koebe centralizer: {res}");
    }

    #[test]
    fn c_formula_hyperbolic_and_parabolic() {
        let hyp = catalog::build("mobius-hyperbolic").unwrap().semigroup().unwrap();
        let tau = c(1.0, 0.0);
        for s in [0.5, 2.0] {
            let got = c_formula(&hyp.element(1.0), &hyp.element(s), tau).unwrap();
            assert!((got - c(s, 0.0)).norm() < 1e-5, "s={s}: {got}");
        }
        let got = c_formula(&hyp.element(1.0), &hyp.element(1.0), tau).unwrap();
        assert!((got - c(1.0, 0.0)).norm() < 1e-6);

        let s = koebe();
        let got = c_formula(&s.element(1.0), &s.element(0.5), tau).unwrap();
        assert!((got - c(0.5, 0.0)).norm() < 1e-4, "{got}");
    }

    #[test]
    fn elliptic_criterion() {
        let ell = catalog::build("elliptic").unwrap().semigroup().unwrap();
        let (cst, res) = elliptic_centralizer_check(&ell, &ell.element(0.5), &grid()).unwrap();
        assert!((cst - c(2f64.powf(-0.5), 0.0)).norm() < 1e-9, "{cst}");
        assert!(res < 1e-9);
        let (cst, res) =
            elliptic_centralizer_check(&ell, &MapDescriptor::identity(), &grid()).unwrap();
        assert!((cst - c(1.0, 0.0)).norm() < 1e-12 && res < 1e-12);
    }

    #[test]
    fn rotation_counter_demo() {
        // psi_1 = -z commutes with phi(z) = z(1+z^2)/2, but the half-turn
        // psi_{1/2} = iz does not: the elliptic criterion preconditions
        // exclude automorphisms for exactly this reason.
        let phi = MapDescriptor::parse_formula("z*(1+z^2)/2", DomainTag::Disc).unwrap();
        let half = MapDescriptor::parse_formula("-z", DomainTag::Disc).unwrap();
        let quarter = MapDescriptor::parse_formula("i*z", DomainTag::Disc).unwrap();
        let r_full = commutator_residual(&phi, &half, &grid()).unwrap();
        assert!(r_full < 1e-14, "phi commutes with -z: {r_full}");
        let z = c(0.5, 0.0);
        let gap = (phi.eval(quarter.eval(z).unwrap()).unwrap()
            - quarter.eval(phi.eval(z).unwrap()).unwrap())
        .norm();
        assert!((gap - 0.125).abs() < 1e-12, "gap {gap}");
    }

    #[test]
    fn proposition_equivalence_on_catalog() {
        // affinity residual small <=> sampled conclusion residuals small
        let s = koebe();
        let k = s.koenigs().unwrap();
        let g = grid();
        // positive case: an element of the semigroup
        let phi = s.element(1.3);
        let (_, res) = affinity_constant(k.as_ref(), &phi, &g).unwrap();
        assert!(res < 1e-8);
        for t in [0.25, 0.7, std::f64::consts::SQRT_2] {
            let r = commutator_residual(&phi, &s.element(t), &g).unwrap();
            assert!(r < 1e-7);
        }
        // negative case: a commuting-with-nothing Möbius map
        let bad = MapDescriptor::Mobius(
            Mobius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap(),
        );
        let (_, res) = affinity_constant(k.as_ref(), &bad, &g).unwrap();
        assert!(res > 1e-2);
        let r = commutator_residual(&bad, &s.element(1.0), &g).unwrap();
        assert!(r > 1e-7);
    }

    #[test]
    fn criteria_battery_on_semigroup_elements() {
        // phi an element of the semigroup itself: the affinity criterion
        // holds and the sampled conclusion passes
        let s = koebe();
        let g = grid();
        let rep = criteria_battery(&s.element(0.8), &s, &g).unwrap();
        assert!(rep.affine.holds, "{:?}", rep.affine);
        assert!((rep.affine.point.unwrap() - c(0.8, 0.0)).norm() < 1e-8);
        assert!(rep.hyperbolic_or_zero_step.holds);
        assert!(rep.irrational_time.holds);
        assert!(rep.conclusion_holds, "{:?}", rep.conclusion_residuals);
        for (_, r) in &rep.conclusion_residuals {
            assert!(*r < 1e-8);
        }

        // hyperbolic group with phi = psi_1: class criterion and the common
        // boundary fixed point at -1 both fire
        let hyp = catalog::build("mobius-hyperbolic").unwrap().semigroup().unwrap();
        let rep = criteria_battery(&hyp.element(1.0), &hyp, &g).unwrap();
        assert!(rep.hyperbolic_or_zero_step.holds);
        assert!(rep.common_boundary_point.holds, "{:?}", rep.common_boundary_point);
        assert!((rep.common_boundary_point.point.unwrap() - c(-1.0, 0.0)).norm() < 1e-4);
        assert!(rep.isogonal_repelling.holds);
        assert!(rep.unrestricted_limit.holds, "{:?}", rep.unrestricted_limit);
        assert!(rep.conclusion_holds);
    }

    #[test]
    fn two_semigroup_commutation() {
        let s = koebe();
        let g = grid();
        let rep = semigroups_commute_check(&s, &s, &g).unwrap();
        assert!(rep.commute);
        for (_, _, r) in &rep.residuals {
            assert!(*r < 1e-9);
        }
        // time-rescaled Koebe flow: psi_t = phi_{2t}, same trajectories
        let k2 = crate::map::KoenigsDescriptor {
            forward: crate::map::KoenigsFn::Formula(Arc::new(
                crate::formula::parse("z/(1-z)^2/2").unwrap(),
            )),
            inverse: crate::map::Inversion::Formula(Arc::new(
                crate::formula::parse("4*z/(1+4*z+sqrt(1+8*z))").unwrap(),
            )),
            base_space: crate::map::BaseSpace::Plane,
            omega: crate::map::OmegaPredicate::PlaneSlitLeft { re_max: -0.125 },
        };
        let rescaled = SemigroupSpec::with_metadata(
            crate::semigroup::SemigroupForm::Koenigs {
                koenigs: Arc::new(k2),
                step: crate::semigroup::ModelStep::Translation,
            },
            c(1.0, 0.0),
            MapKind::ParabolicZeroStep,
            false,
            Some("koebe-double-speed".into()),
        );
        // sanity: the rescaled time-1 map equals the original time-2 map
        for &z in &g {
            let a = crate::semigroup::flow(&rescaled, 1.0, z).unwrap();
            let b = crate::semigroup::flow(&s, 2.0, z).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
        let rep = semigroups_commute_check(&s, &rescaled, &g).unwrap();
        assert!(rep.commute);
    }

    #[test]
    fn synthetic_injectivity_violation_is_detected() {
        // g(w) = w + 2 e^{4 pi i w} has period 1/2 and huge oscillation:
        // the audit must find a genuine collision
        let g = |w: Complex64| -> Result<Complex64> {
            Ok(w + (Complex64::new(0.0, 4.0 * std::f64::consts::PI) * w).exp() * 2.0)
        };
        let gp = |w: Complex64| -> Result<Complex64> {
            Ok(Complex64::new(1.0, 0.0)
                + Complex64::new(0.0, 4.0 * std::f64::consts::PI)
                    * (Complex64::new(0.0, 4.0 * std::f64::consts::PI) * w).exp()
                    * 2.0)
        };
        let mut samples = Vec::new();
        for j in 0..30 {
            for k in 0..10 {
                samples.push(c(j as f64 / 30.0, 0.05 + 0.6 * k as f64 / 10.0));
            }
        }
        let audit = injectivity_audit(g, gp, &samples, 1e-4);
        assert!(!audit.injective, "collision must be found: {audit:?}");

        // and a genuinely injective translation passes
        let id_shift = |w: Complex64| -> Result<Complex64> { Ok(w + c(2.0, 0.0)) };
        let one = |_w: Complex64| -> Result<Complex64> { Ok(c(1.0, 0.0)) };
        let audit = injectivity_audit(id_shift, one, &samples, 1e-4);
        assert!(audit.injective);
    }
}
