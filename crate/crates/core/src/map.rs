//! Composable descriptors for holomorphic self-maps of the disc and
//! half-planes, with uniform evaluation, analytic derivatives, composition
//! and iteration.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{Dual, Expr};
use crate::semigroup::SemigroupSpec;

/// Domain a formula-backed map acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainTag {
    Disc,
    UpperHalfPlane,
    RightHalfPlane,
    LowerHalfPlane,
}

/// Linear-fractional map z -> (az + b)/(cz + d), stored with ad - bc = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

impl Mobius {
    /// Build and normalize so that ad - bc = 1, dividing by the principal
    /// square root of the determinant.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Mobius> {
        let det = a * d - b * c;
        if det.norm() < 1e-14 {
            return Err(Error::DegenerateMobius);
        }
        let s = det.sqrt();
        Ok(Mobius {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Mobius {
        Mobius {
            a: ONE,
            b: Complex64::default(),
            c: Complex64::default(),
            d: ONE,
        }
    }

    /// Translation w -> w + c as a Möbius map.
    pub fn translation(c: Complex64) -> Mobius {
        Mobius::new(ONE, c, Complex64::default(), ONE).unwrap()
    }

    /// Dilation w -> k w.
    pub fn dilation(k: Complex64) -> Result<Mobius> {
        Mobius::new(k, Complex64::default(), Complex64::default(), ONE)
    }

    /// Standard Cayley map C(z) = (tau + z)/(tau - z) of the disc onto the
    /// right half-plane, sending tau -> infinity and 0 -> 1.
    pub fn cayley(tau: Complex64) -> Result<Mobius> {
        if (tau.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::OutsideDomain);
        }
        Mobius::new(ONE, tau, -ONE, tau)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() < 1e-300 {
            return Err(Error::EvalSingular("Möbius pole"));
        }
        Ok((self.a * z + self.b) / den)
    }

    pub fn eval_dual(&self, z: Dual) -> Result<Dual> {
        let den = self.c * z.value + self.d;
        if den.norm() < 1e-300 {
            return Err(Error::EvalSingular("Möbius pole"));
        }
        // derivative of the normalized map is 1/(cz+d)^2
        Ok(Dual {
            value: (self.a * z.value + self.b) / den,
            deriv: z.deriv / (den * den),
        })
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() < 1e-300 {
            return Err(Error::EvalSingular("Möbius pole"));
        }
        Ok(ONE / (den * den))
    }

    /// Matrix product: (self ∘ other)(z) = self(other(z)).
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn powi(&self, n: u32) -> Mobius {
        let mut acc = Mobius::identity();
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        // up to the +/- sign ambiguity of the normalization
        let close = |m: &Mobius, s: f64| {
            (m.a - ONE * s).norm() < tol
                && m.b.norm() < tol
                && m.c.norm() < tol
                && (m.d - ONE * s).norm() < tol
        };
        close(self, 1.0) || close(self, -1.0)
    }

    /// Fixed points: roots of c z^2 + (d - a) z - b = 0, tagged by location.
    /// A parabolic map yields a double root; an affine map (c = 0) has one
    /// finite fixed point and one at infinity.
    pub fn fixed_points(&self) -> Result<[MobiusFixedPoint; 2]> {
        if self.is_identity(1e-14) {
            return Err(Error::IsIdentity);
        }
        if self.c.norm() < 1e-14 {
            // affine: a z + b = d z  =>  z = b/(d - a), plus infinity
            let lin = self.d - self.a;
            let finite = if lin.norm() < 1e-14 {
                None // pure translation: double fixed point at infinity
            } else {
                Some(self.b / lin)
            };
            let fin_fp = match finite {
                Some(p) => MobiusFixedPoint::finite(p),
                None => MobiusFixedPoint::infinite(),
            };
            return Ok([fin_fp, MobiusFixedPoint::infinite()]);
        }
        let disc = (self.d - self.a) * (self.d - self.a) + self.c * self.b * 4.0;
        let s = disc.sqrt();
        let r1 = (self.a - self.d + s) / (self.c * 2.0);
        let r2 = (self.a - self.d - s) / (self.c * 2.0);
        Ok([MobiusFixedPoint::finite(r1), MobiusFixedPoint::finite(r2)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointLocation {
    Interior,
    Boundary,
    Exterior,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusFixedPoint {
    /// `None` encodes the point at infinity.
    pub point: Option<Complex64>,
    pub location: PointLocation,
}

impl MobiusFixedPoint {
    fn finite(p: Complex64) -> Self {
        let loc = if (p.norm() - 1.0).abs() <= 1e-9 {
            PointLocation::Boundary
        } else if p.norm() < 1.0 {
            PointLocation::Interior
        } else {
            PointLocation::Exterior
        };
        MobiusFixedPoint {
            point: Some(p),
            location: loc,
        }
    }

    fn infinite() -> Self {
        MobiusFixedPoint {
            point: None,
            location: PointLocation::Infinity,
        }
    }
}

/// Anything that can be evaluated with a first derivative. Implemented by
/// expression trees, Möbius maps, descriptors and the numeric Koenigs
/// evaluators.
pub trait Holomorphic: Send + Sync {
    fn eval_dual(&self, z: Complex64) -> Result<Dual>;

    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_dual(z)?.value)
    }
}

impl Holomorphic for Expr {
    fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        Expr::eval_dual(self, z)
    }
}

impl Holomorphic for Mobius {
    fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        Mobius::eval_dual(self, Dual::var(z))
    }
}

/// The intertwining map of a holomorphic model: either a closed-form
/// expression or an on-demand numeric evaluator.
#[derive(Clone)]
pub enum KoenigsFn {
    Formula(Arc<Expr>),
    Numeric(Arc<dyn Holomorphic>),
}

impl std::fmt::Debug for KoenigsFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KoenigsFn::Formula(e) => write!(f, "Formula({e})"),
            KoenigsFn::Numeric(_) => write!(f, "Numeric(..)"),
        }
    }
}

/// How to compute the inverse of a Koenigs map.
#[derive(Clone)]
pub enum Inversion {
    /// Closed-form inverse as an expression in the model variable.
    Formula(Arc<Expr>),
    /// Newton iteration on the forward map, with damping and horizontal
    /// path continuation as fallbacks.
    Newton,
}

impl std::fmt::Debug for Inversion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Inversion::Formula(e) => write!(f, "Formula({e})"),
            Inversion::Newton => write!(f, "Newton"),
        }
    }
}

/// Base space of a canonical model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseSpace {
    Plane,
    Strip { a: f64, b: f64 },
    UpperHalfPlane,
    LowerHalfPlane,
    Disc,
}

/// Exact membership test for the Koenigs domain. The catalog entries carry
/// exact predicates; `Unknown` triggers the sampled fallback paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaPredicate {
    /// The complex plane minus the real ray (-inf, re_max].
    PlaneSlitLeft { re_max: f64 },
    /// The plane minus the two rays (-inf, re_max] +/- i*im.
    TwoHorizontalRays { re_max: f64, im: f64 },
    /// Full horizontal strip a < Im w < b.
    Strip { a: f64, b: f64 },
    /// Upper (Im > 0) or lower (Im < 0) half-plane.
    HalfPlane { upper: bool },
    /// Half-plane Re w > re_min (elliptic catalog domain).
    RightOfLine { re_min: f64 },
    /// No exact predicate available.
    Unknown,
}

impl OmegaPredicate {
    pub fn is_exact(&self) -> bool {
        !matches!(self, OmegaPredicate::Unknown)
    }

    pub fn contains(&self, w: Complex64) -> bool {
        match *self {
            OmegaPredicate::PlaneSlitLeft { re_max } => w.im != 0.0 || w.re > re_max,
            OmegaPredicate::TwoHorizontalRays { re_max, im } => {
                w.im.abs() != im || w.re > re_max
            }
            OmegaPredicate::Strip { a, b } => w.im > a && w.im < b,
            OmegaPredicate::HalfPlane { upper } => {
                if upper {
                    w.im > 0.0
                } else {
                    w.im < 0.0
                }
            }
            OmegaPredicate::RightOfLine { re_min } => w.re > re_min,
            OmegaPredicate::Unknown => true,
        }
    }

    /// Does `w - t` stay inside for every t >= 0? This carves out the image
    /// of the backward-invariant set under translation dynamics.
    pub fn backward_core_contains(&self, w: Complex64) -> bool {
        match *self {
            OmegaPredicate::PlaneSlitLeft { .. } => w.im != 0.0,
            OmegaPredicate::TwoHorizontalRays { im, .. } => w.im.abs() != im,
            OmegaPredicate::Strip { a, b } => w.im > a && w.im < b,
            OmegaPredicate::HalfPlane { upper } => {
                if upper {
                    w.im > 0.0
                } else {
                    w.im < 0.0
                }
            }
            OmegaPredicate::RightOfLine { .. } => false,
            OmegaPredicate::Unknown => false,
        }
    }

    /// Exact test of Omega + c ⊆ Omega.
    pub fn translation_invariant(&self, c: Complex64) -> bool {
        match *self {
            OmegaPredicate::PlaneSlitLeft { .. } | OmegaPredicate::TwoHorizontalRays { .. } => {
                c.im == 0.0 && c.re >= 0.0
            }
            OmegaPredicate::Strip { .. } | OmegaPredicate::HalfPlane { .. } => c.im == 0.0,
            OmegaPredicate::RightOfLine { .. } => c.re >= 0.0,
            OmegaPredicate::Unknown => false,
        }
    }

    /// True when Omega - t ⊆ Omega for all t >= 0 as well, i.e. the
    /// translation semigroup extends to a group.
    pub fn backward_translation_invariant(&self) -> bool {
        matches!(
            self,
            OmegaPredicate::Strip { .. } | OmegaPredicate::HalfPlane { .. }
        )
    }

    /// Identifier of the connected component of the backward core containing
    /// `w`, when the predicate is exact.
    pub fn petal_component(&self, w: Complex64) -> Option<PetalComponent> {
        if !self.backward_core_contains(w) {
            return None;
        }
        match *self {
            OmegaPredicate::PlaneSlitLeft { .. } => Some(if w.im > 0.0 {
                PetalComponent::Upper
            } else {
                PetalComponent::Lower
            }),
            OmegaPredicate::TwoHorizontalRays { im, .. } => Some(if w.im > im {
                PetalComponent::Upper
            } else if w.im < -im {
                PetalComponent::Lower
            } else {
                PetalComponent::Middle
            }),
            OmegaPredicate::Strip { .. } | OmegaPredicate::HalfPlane { .. } => {
                Some(PetalComponent::Whole)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PetalComponent {
    Upper,
    Middle,
    Lower,
    Whole,
}

/// A Koenigs map together with its inversion strategy, base space and the
/// membership predicate for Omega = h(D).
#[derive(Debug, Clone)]
pub struct KoenigsDescriptor {
    pub forward: KoenigsFn,
    pub inverse: Inversion,
    pub base_space: BaseSpace,
    pub omega: OmegaPredicate,
}

impl KoenigsDescriptor {
    pub fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        match &self.forward {
            KoenigsFn::Formula(e) => e.eval_dual(z),
            KoenigsFn::Numeric(h) => h.eval_dual(z),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_dual(z)?.value)
    }

    /// Invert the Koenigs map at `w`. `seed` starts the Newton iteration
    /// (and anchors the continuation fallback); closed-form inverses ignore it.
    pub fn invert(&self, w: Complex64, seed: Complex64) -> Result<Complex64> {
        crate::koenigs::invert_koenigs(self, w, seed)
    }
}

impl Holomorphic for KoenigsDescriptor {
    fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        KoenigsDescriptor::eval_dual(self, z)
    }
}

/// Evaluable description of a holomorphic map.
#[derive(Debug, Clone)]
pub enum MapDescriptor {
    Mobius(Mobius),
    Formula {
        expr: Arc<Expr>,
        domain: DomainTag,
    },
    /// outer^{-1} ∘ inner ∘ outer, where `outer` has an exact inverse.
    Conjugate {
        outer: Arc<MapDescriptor>,
        inner: Arc<MapDescriptor>,
    },
    /// Left-to-right composition: Compose([f, g]) applies f first.
    Compose(Vec<MapDescriptor>),
    Iterate {
        base: Arc<MapDescriptor>,
        n: u32,
    },
    SemigroupElement {
        spec: Arc<SemigroupSpec>,
        t: f64,
    },
    /// h^{-1} ∘ g ∘ h for a Koenigs map h and a model map g.
    ModelConjugate {
        koenigs: Arc<KoenigsDescriptor>,
        model_map: Arc<MapDescriptor>,
    },
}

impl MapDescriptor {
    pub fn identity() -> MapDescriptor {
        MapDescriptor::Mobius(Mobius::identity())
    }

    pub fn formula(expr: Expr, domain: DomainTag) -> MapDescriptor {
        MapDescriptor::Formula {
            expr: Arc::new(expr),
            domain,
        }
    }

    /// Parse a formula map from source text.
    pub fn parse_formula(src: &str, domain: DomainTag) -> Result<MapDescriptor> {
        Ok(MapDescriptor::formula(crate::formula::parse(src)?, domain))
    }

    /// outer^{-1} ∘ inner ∘ outer; fails unless `outer` has an exact inverse.
    pub fn conjugate(outer: MapDescriptor, inner: MapDescriptor) -> Result<MapDescriptor> {
        if outer.exact_inverse().is_none() {
            return Err(Error::NoExactInverse);
        }
        Ok(MapDescriptor::Conjugate {
            outer: Arc::new(outer),
            inner: Arc::new(inner),
        })
    }

    pub fn semigroup_element(spec: Arc<SemigroupSpec>, t: f64) -> MapDescriptor {
        MapDescriptor::SemigroupElement { spec, t }
    }

    /// n-th iterate as a descriptor; n = 0 yields the identity. Iteration is
    /// pushed through conjugations and semigroup elements where that is an
    /// exact algebraic identity.
    pub fn iterate_n(&self, n: u32) -> MapDescriptor {
        if n == 0 {
            return MapDescriptor::identity();
        }
        if n == 1 {
            return self.clone();
        }
        match self {
            MapDescriptor::Mobius(m) => MapDescriptor::Mobius(m.powi(n)),
            MapDescriptor::SemigroupElement { spec, t } => MapDescriptor::SemigroupElement {
                spec: spec.clone(),
                t: t * n as f64,
            },
            MapDescriptor::Conjugate { outer, inner } => MapDescriptor::Conjugate {
                outer: outer.clone(),
                inner: Arc::new(inner.iterate_n(n)),
            },
            MapDescriptor::ModelConjugate { koenigs, model_map } => {
                MapDescriptor::ModelConjugate {
                    koenigs: koenigs.clone(),
                    model_map: Arc::new(model_map.iterate_n(n)),
                }
            }
            MapDescriptor::Iterate { base, n: m } => MapDescriptor::Iterate {
                base: base.clone(),
                n: m * n,
            },
            _ => MapDescriptor::Iterate {
                base: Arc::new(self.clone()),
                n,
            },
        }
    }

    /// Domain the map acts on (by construction of the descriptor).
    pub fn domain(&self) -> DomainTag {
        match self {
            MapDescriptor::Mobius(_) => DomainTag::Disc,
            MapDescriptor::Formula { domain, .. } => *domain,
            MapDescriptor::Conjugate { outer, .. } => outer.domain(),
            MapDescriptor::Compose(list) => list
                .first()
                .map(|m| m.domain())
                .unwrap_or(DomainTag::Disc),
            MapDescriptor::Iterate { base, .. } => base.domain(),
            MapDescriptor::SemigroupElement { .. } => DomainTag::Disc,
            MapDescriptor::ModelConjugate { .. } => DomainTag::Disc,
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            MapDescriptor::Mobius(m) => m.eval(z),
            MapDescriptor::Formula { expr, .. } => expr.eval(z),
            MapDescriptor::Conjugate { outer, inner } => {
                let w = outer.eval(z)?;
                let v = inner.eval(w)?;
                outer
                    .exact_inverse()
                    .ok_or(Error::NoExactInverse)?
                    .eval(v)
            }
            MapDescriptor::Compose(list) => {
                let mut w = z;
                for m in list {
                    w = m.eval(w)?;
                }
                Ok(w)
            }
            MapDescriptor::Iterate { base, n } => {
                let mut w = z;
                for _ in 0..*n {
                    w = base.eval(w)?;
                }
                Ok(w)
            }
            MapDescriptor::SemigroupElement { spec, t } => {
                crate::semigroup::flow(spec, *t, z)
            }
            MapDescriptor::ModelConjugate { koenigs, model_map } => {
                let w = koenigs.eval(z)?;
                let v = model_map.eval(w)?;
                koenigs.invert(v, z)
            }
        }
    }

    pub fn eval_dual_from(&self, z: Dual) -> Result<Dual> {
        match self {
            MapDescriptor::Mobius(m) => m.eval_dual(z),
            MapDescriptor::Formula { expr, .. } => {
                let d = expr.eval_dual(z.value)?;
                Ok(Dual {
                    value: d.value,
                    deriv: d.deriv * z.deriv,
                })
            }
            MapDescriptor::Conjugate { outer, inner } => {
                let w = outer.eval_dual_from(z)?;
                let v = inner.eval_dual_from(w)?;
                let inv = outer.exact_inverse().ok_or(Error::NoExactInverse)?;
                inv.eval_dual_from(v)
            }
            MapDescriptor::Compose(list) => {
                let mut w = z;
                for m in list {
                    w = m.eval_dual_from(w)?;
                }
                Ok(w)
            }
            MapDescriptor::Iterate { base, n } => {
                let mut w = z;
                for _ in 0..*n {
                    w = base.eval_dual_from(w)?;
                }
                Ok(w)
            }
            MapDescriptor::SemigroupElement { spec, t } => {
                crate::semigroup::flow_dual(spec, *t, z)
            }
            MapDescriptor::ModelConjugate { koenigs, model_map } => {
                // derivative through h, g, h^{-1} with the inverse-function rule
                let hz = koenigs.eval_dual(z.value)?;
                let g = model_map.eval_dual_from(Dual {
                    value: hz.value,
                    deriv: hz.deriv * z.deriv,
                })?;
                let out = koenigs.invert(g.value, z.value)?;
                let h_out = koenigs.eval_dual(out)?;
                if h_out.deriv.norm() < 1e-300 {
                    return Err(Error::EvalSingular("vanishing h' at inverse point"));
                }
                Ok(Dual {
                    value: out,
                    deriv: g.deriv / h_out.deriv,
                })
            }
        }
    }

    pub fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        self.eval_dual_from(Dual::var(z))
    }

    /// Analytic derivative at `z` (dual numbers through the whole tree;
    /// inverse branches use 1/h'(h^{-1}(w))).
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_dual(z)?.deriv)
    }

    /// Exact inverse as a descriptor, when one exists structurally.
    pub fn exact_inverse(&self) -> Option<MapDescriptor> {
        match self {
            MapDescriptor::Mobius(m) => Some(MapDescriptor::Mobius(m.inverse())),
            MapDescriptor::Conjugate { outer, inner } => {
                let inner_inv = inner.exact_inverse()?;
                Some(MapDescriptor::Conjugate {
                    outer: outer.clone(),
                    inner: Arc::new(inner_inv),
                })
            }
            MapDescriptor::Compose(list) => {
                let mut inv = Vec::with_capacity(list.len());
                for m in list.iter().rev() {
                    inv.push(m.exact_inverse()?);
                }
                Some(MapDescriptor::Compose(inv))
            }
            MapDescriptor::Iterate { base, n } => {
                let base_inv = base.exact_inverse()?;
                Some(MapDescriptor::Iterate {
                    base: Arc::new(base_inv),
                    n: *n,
                })
            }
            _ => None,
        }
    }

    /// Try to identify the map with a Möbius transformation by fitting three
    /// point images and validating on a grid. Returns the fit if the map
    /// agrees with it to `tol` on 24 interior sample points.
    pub fn mobius_fit(&self, tol: f64) -> Option<Mobius> {
        if let MapDescriptor::Mobius(m) = self {
            return Some(*m);
        }
        let zs = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.2, -0.45),
        ];
        let mut ws = [Complex64::default(); 3];
        for (k, z) in zs.iter().enumerate() {
            ws[k] = self.eval(*z).ok()?;
        }
        let fit = mobius_through(zs, ws)?;
        for p in crate::util::disc_grid(24, 0.8) {
            let lhs = self.eval(p).ok()?;
            let rhs = fit.eval(p).ok()?;
            if (lhs - rhs).norm() > tol {
                return None;
            }
        }
        Some(fit)
    }
}

/// Möbius audit for disc automorphy: the map must fit a Möbius
/// transformation that carries the unit circle to itself.
pub fn disc_automorphism_fit(m: &MapDescriptor, tol: f64) -> Option<Mobius> {
    let fit = m.mobius_fit(tol)?;
    for k in 0..12 {
        let th = 0.37 + k as f64 * 0.5;
        let v = fit.eval(Complex64::from_polar(1.0, th)).ok()?;
        if (v.norm() - 1.0).abs() > 1e-9 {
            return None;
        }
    }
    Some(fit)
}

/// Möbius map sending the pairwise-distinct points z_k to w_k, k = 1..3.
pub fn mobius_through(z: [Complex64; 3], w: [Complex64; 3]) -> Option<Mobius> {
    // A maps (z1,z2,z3) to (0,1,inf); the target map is B^{-1} A.
    fn to_standard(p: [Complex64; 3]) -> Option<Mobius> {
        let [p1, p2, p3] = p;
        Mobius::new(p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1)).ok()
    }
    let a = to_standard(z)?;
    let b = to_standard(w)?;
    Some(b.inverse().compose(&a))
}

/// Sampled self-map audit: evaluates the descriptor at boundary-adjacent
/// points (|z| = 0.999 by default) and fails fast on any value outside the
/// closed unit disc.
pub fn audit_disc_self_map(m: &MapDescriptor, samples: usize, radius: f64) -> Result<()> {
    for k in 0..samples {
        let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.37) / samples as f64;
        let z = Complex64::from_polar(radius, th);
        let w = m.eval(z)?;
        if w.norm() >= 1.0 + 1e-12 {
            return Err(Error::BuildAuditFailed(format!(
                "self-map audit: |f({z})| = {} >= 1",
                w.norm()
            )));
        }
    }
    Ok(())
}
