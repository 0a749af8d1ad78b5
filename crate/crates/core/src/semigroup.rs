//! Continuous one-parameter semigroups of the disc, given either by a
//! Koenigs descriptor (Abel form h ∘ ψ_t = h + t, or Schröder form
//! h ∘ ψ_t = e^{μt} h for the elliptic case) or by an infinitesimal
//! generator integrated as an ODE.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{Dual, Expr};
use crate::koenigs::QuadratureKoenigs;
use crate::map::{KoenigsDescriptor, MapDescriptor};
use crate::metric::MapKind;
use crate::util;

/// Model automorphism the Koenigs map conjugates the semigroup to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelStep {
    /// alpha_t(w) = w + t (non-elliptic canonical model).
    Translation,
    /// alpha_t(w) = e^{mu t} w with Re mu < 0 (elliptic model).
    Dilation { mu: Complex64 },
}

#[derive(Debug, Clone)]
pub enum SemigroupForm {
    Koenigs {
        koenigs: Arc<KoenigsDescriptor>,
        step: ModelStep,
    },
    Generator {
        g: Arc<Expr>,
    },
}

/// An evaluable one-parameter semigroup with cached classification data.
#[derive(Debug, Clone)]
pub struct SemigroupSpec {
    pub form: SemigroupForm,
    pub dw_point: Complex64,
    pub kind: MapKind,
    pub is_group: bool,
    pub name: Option<String>,
}

impl SemigroupSpec {
    /// Build from exact metadata (catalog path; nothing is re-derived here,
    /// the audits live in the catalog builder and the test suite).
    pub fn with_metadata(
        form: SemigroupForm,
        dw_point: Complex64,
        kind: MapKind,
        is_group: bool,
        name: Option<String>,
    ) -> Arc<Self> {
        Arc::new(SemigroupSpec {
            form,
            dw_point,
            kind,
            is_group,
            name,
        })
    }

    /// Build from a Koenigs descriptor, inferring the classification of the
    /// time-1 map and the group property.
    pub fn infer_koenigs(koenigs: KoenigsDescriptor, step: ModelStep, name: Option<String>) -> Result<Arc<Self>> {
        let provisional = Arc::new(SemigroupSpec {
            form: SemigroupForm::Koenigs {
                koenigs: Arc::new(koenigs),
                step,
            },
            dw_point: Complex64::default(),
            kind: MapKind::Elliptic,
            is_group: false,
            name: name.clone(),
        });
        let psi1 = MapDescriptor::semigroup_element(provisional.clone(), 1.0);
        let report = crate::metric::classify(&psi1)?;
        let is_group = match &provisional.form {
            SemigroupForm::Koenigs { koenigs, step } => match step {
                ModelStep::Translation => {
                    if koenigs.omega.is_exact() {
                        koenigs.omega.backward_translation_invariant()
                    } else {
                        crate::map::disc_automorphism_fit(&psi1, 1e-9).is_some()
                    }
                }
                ModelStep::Dilation { .. } => {
                    crate::map::disc_automorphism_fit(&psi1, 1e-9).is_some()
                }
            },
            _ => unreachable!(),
        };
        Ok(Arc::new(SemigroupSpec {
            form: provisional.form.clone(),
            dw_point: report.dw_point,
            kind: report.kind,
            is_group,
            name,
        }))
    }

    /// Build from a Berkson-Porta style generator expression. The generator
    /// is audited on boundary-adjacent samples: the outward radial component
    /// of the field must not push orbits out of the disc.
    pub fn from_generator(g: Expr, name: Option<String>) -> Result<Arc<Self>> {
        let g = Arc::new(g);
        for k in 0..96 {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.29) / 96.0;
            let z = Complex64::from_polar(0.999, th);
            let v = g.eval(z)?;
            // d|z|^2/dt = 2 Re(conj(z) G(z)) must be <= 0 up to slack near
            // the boundary for the flow to stay in the disc
            if (z.conj() * v).re > 1e-6 {
                return Err(Error::BuildAuditFailed(format!(
                    "generator pushes outward at {z}: Re(conj(z) G(z)) = {}",
                    (z.conj() * v).re
                )));
            }
        }
        let provisional = Arc::new(SemigroupSpec {
            form: SemigroupForm::Generator { g: g.clone() },
            dw_point: Complex64::default(),
            kind: MapKind::Elliptic,
            is_group: false,
            name: name.clone(),
        });
        let psi1 = MapDescriptor::semigroup_element(provisional.clone(), 1.0);
        let report = crate::metric::classify(&psi1)?;
        let is_group = crate::map::disc_automorphism_fit(&psi1, 1e-9).is_some();
        Ok(Arc::new(SemigroupSpec {
            form: SemigroupForm::Generator { g },
            dw_point: report.dw_point,
            kind: report.kind,
            is_group,
            name,
        }))
    }

    pub fn koenigs(&self) -> Option<Arc<KoenigsDescriptor>> {
        match &self.form {
            SemigroupForm::Koenigs { koenigs, .. } => Some(koenigs.clone()),
            SemigroupForm::Generator { .. } => None,
        }
    }

    pub fn step(&self) -> Option<ModelStep> {
        match &self.form {
            SemigroupForm::Koenigs { step, .. } => Some(*step),
            SemigroupForm::Generator { .. } => None,
        }
    }

    /// Quadrature Koenigs evaluator for the generator form (h' = 1/G).
    pub fn quadrature_h(&self) -> Option<QuadratureKoenigs> {
        match &self.form {
            SemigroupForm::Generator { g } => Some(QuadratureKoenigs { g: g.clone() }),
            _ => None,
        }
    }

    /// Time-t element as a map descriptor.
    pub fn element(self: &Arc<Self>, t: f64) -> MapDescriptor {
        MapDescriptor::semigroup_element(self.clone(), t)
    }
}

/// Forward flow psi_t(z).
pub fn flow(spec: &SemigroupSpec, t: f64, z: Complex64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::OutsideDomain);
    }
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    if t == 0.0 {
        return Ok(z);
    }
    match &spec.form {
        SemigroupForm::Koenigs { koenigs, step } => {
            let target = |w: Complex64, dt: f64| match step {
                ModelStep::Translation => w + dt,
                ModelStep::Dilation { mu } => (mu * dt).exp() * w,
            };
            let hz = koenigs.eval(z)?;
            match koenigs.invert(target(hz, t), z) {
                Ok(v) => Ok(v),
                Err(_) => {
                    // continuation in time for stiff targets
                    let mut cur = z;
                    let steps = 64usize;
                    for j in 1..=steps {
                        let dt = t * (j as f64 / steps as f64) - t * ((j - 1) as f64 / steps as f64);
                        let w = koenigs.eval(cur)?;
                        cur = koenigs.invert(target(w, dt), cur)?;
                    }
                    Ok(cur)
                }
            }
        }
        SemigroupForm::Generator { g } => {
            let field = |w: Complex64| -> Result<Complex64> {
                if w.norm() >= 1.0 {
                    return Err(Error::StepSizeUnderflow);
                }
                g.eval(w)
            };
            util::rk45(&field, z, t, 1e-12)
        }
    }
}

/// Forward flow with derivative in z, using h'(z)/h'(psi_t(z)) for Koenigs
/// forms and G(psi_t(z))/G(z) for generator forms.
pub fn flow_dual(spec: &SemigroupSpec, t: f64, z: Dual) -> Result<Dual> {
    let v = flow(spec, t, z.value)?;
    let ratio = match &spec.form {
        SemigroupForm::Koenigs { koenigs, step } => {
            let dz = koenigs.eval_dual(z.value)?;
            let dv = koenigs.eval_dual(v)?;
            if dv.deriv.norm() < 1e-300 {
                return Err(Error::EvalSingular("h' vanishes at flow image"));
            }
            match step {
                ModelStep::Translation => dz.deriv / dv.deriv,
                ModelStep::Dilation { mu } => (mu * t).exp() * dz.deriv / dv.deriv,
            }
        }
        SemigroupForm::Generator { g } => {
            let gz = g.eval(z.value)?;
            if gz.norm() < 1e-300 {
                return Err(Error::EvalSingular("generator vanishes at base point"));
            }
            g.eval(v)? / gz
        }
    };
    Ok(Dual {
        value: v,
        deriv: ratio * z.deriv,
    })
}

/// Backward flow psi_{-t}(z) where defined; `None` means the backward orbit
/// exits the Koenigs domain (a meaningful verdict, not an error).
pub fn backward_flow(spec: &SemigroupSpec, t: f64, z: Complex64) -> Result<Option<Complex64>> {
    if !(t >= 0.0) || z.norm() >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    if t == 0.0 {
        return Ok(Some(z));
    }
    match &spec.form {
        SemigroupForm::Koenigs { koenigs, step } => {
            let hz = koenigs.eval(z)?;
            let target = match step {
                ModelStep::Translation => hz - t,
                ModelStep::Dilation { mu } => (-mu * t).exp() * hz,
            };
            if koenigs.omega.is_exact() {
                if !koenigs.omega.contains(target) {
                    return Ok(None);
                }
                Ok(Some(koenigs.invert(target, z)?))
            } else {
                match koenigs.invert(target, z) {
                    Ok(v) => Ok(Some(v)),
                    Err(e) => Err(e),
                }
            }
        }
        SemigroupForm::Generator { g } => {
            // integrate the reversed field and watch for boundary exit
            let field = |w: Complex64| -> Result<Complex64> { Ok(-(g.eval(w)?)) };
            let mut cur = z;
            let steps = 32usize;
            for _ in 0..steps {
                match util::rk45(&field, cur, t / steps as f64, 1e-12) {
                    Ok(v) if v.norm() < 1.0 - 1e-9 => cur = v,
                    _ => return Ok(None),
                }
            }
            Ok(Some(cur))
        }
    }
}

/// Infinitesimal generator at z: 1/h' for Abel forms, mu h/h' for Schröder
/// forms, G itself for generator forms. Orientation follows
/// d psi_t / dt = G ∘ psi_t.
pub fn generator_eval(spec: &SemigroupSpec, z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    match &spec.form {
        SemigroupForm::Koenigs { koenigs, step } => {
            let d = koenigs.eval_dual(z)?;
            if d.deriv.norm() < 1e-300 {
                return Err(Error::EvalSingular("h' ~ 0"));
            }
            match step {
                ModelStep::Translation => Ok(Complex64::new(1.0, 0.0) / d.deriv),
                ModelStep::Dilation { mu } => Ok(mu * d.value / d.deriv),
            }
        }
        SemigroupForm::Generator { g } => g.eval(z),
    }
}

/// Group test: the Koenigs domain must also be invariant under backward
/// translations (equivalently, psi_1 is an automorphism of the disc).
pub fn is_group(spec: &Arc<SemigroupSpec>) -> bool {
    match &spec.form {
        SemigroupForm::Koenigs { koenigs, step } => match step {
            ModelStep::Translation if koenigs.omega.is_exact() => {
                koenigs.omega.backward_translation_invariant()
            }
            _ => crate::map::disc_automorphism_fit(&spec.element(1.0), 1e-9).is_some(),
        },
        SemigroupForm::Generator { .. } => {
            crate::map::disc_automorphism_fit(&spec.element(1.0), 1e-9).is_some()
        }
    }
}

/// Sup over the grid of |psi_t(psi_s(z)) - psi_{t+s}(z)|.
pub fn semigroup_law_residual(
    spec: &SemigroupSpec,
    t: f64,
    s: f64,
    grid: &[Complex64],
) -> Result<f64> {
    let mut sup = 0.0_f64;
    for &z in grid {
        let a = flow(spec, t, flow(spec, s, z)?)?;
        let b = flow(spec, t + s, z)?;
        sup = sup.max((a - b).norm());
    }
    Ok(sup)
}
