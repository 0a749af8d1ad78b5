use num_complex::Complex64;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("singular evaluation: {0}")]
    EvalSingular(&'static str),

    #[error("point outside the map's domain")]
    OutsideDomain,

    #[error("Möbius coefficients are degenerate (ad - bc ~ 0)")]
    DegenerateMobius,

    #[error("map is the identity")]
    IsIdentity,

    #[error("conjugation requires an outer map with an exact inverse")]
    NoExactInverse,

    #[error("iteration did not converge within {0} steps")]
    NoConvergence(usize),

    #[error("map is an elliptic automorphism; iterates have no Denjoy-Wolff limit")]
    EllipticAutomorphism,

    #[error("{point} is not a boundary fixed point (radial displacement {displacement:.3e})")]
    NotAFixedPoint { point: Complex64, displacement: f64 },

    #[error("wrong dynamical class: expected {expected}, found {found}")]
    WrongClass {
        expected: &'static str,
        found: String,
    },

    #[error("model construction stalled at depth {depth} (residual {residual:.3e})")]
    SlowConvergence { depth: usize, residual: f64 },

    #[error("Newton inversion failed: best iterate {best} with residual {residual:.3e}")]
    InversionFailed { best: Complex64, residual: f64 },

    #[error("target point lies outside the Koenigs domain")]
    OutsideOmega,

    #[error("maps do not commute (residual {0:.3e})")]
    NotCommuting(f64),

    #[error("{0} is not a repelling fixed point")]
    NotRepelling(Complex64),

    #[error("petal strip is unknown and could not be fitted")]
    StripUnknown,

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("catalog build audit failed: {0}")]
    BuildAuditFailed(String),

    #[error("no omega predicate available for this semigroup")]
    PredicateUnavailable,

    #[error("backward orbit exited the petal (predicate inconsistency)")]
    BackwardExit,

    #[error("radial quotient diverges")]
    DivergentQuotient,

    #[error("no contact point: the radial limit does not exist on the boundary")]
    NoContactPoint,

    #[error("ODE step size underflow near the boundary")]
    StepSizeUnderflow,

    #[error("numerical underflow near the boundary")]
    NumericalUnderflow,
}

pub type Result<T> = std::result::Result<T, Error>;
