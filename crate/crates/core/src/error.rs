use thiserror::Error;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The caller supplied values outside an operation's domain of definition.
    Input,
    /// The physics forbids the request (forbidden region, empty allowed set, ...).
    Domain,
    /// A numerical method failed to deliver (step collapse, non-convergence).
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error("invalid physical system: {0}")]
    InvalidSystem(&'static str),

    #[error("first potential requires a = q^2 = {expected}, got {got}")]
    CoulombMismatch { expected: f64, got: f64 },

    #[error("coefficient `{0}` is required for this potential kind")]
    MissingCoefficient(&'static str),

    #[error("coefficient `{0}` is not used by this potential kind")]
    UnexpectedCoefficient(&'static str),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("position is at the origin")]
    AtOrigin,

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("polynomial has non-finite coefficients")]
    NonFiniteCoefficients,

    #[error("polynomial degree {0} exceeds the supported maximum of 8")]
    DegreeTooHigh(usize),

    #[error("expected a polynomial of degree at most {max}, got {got}")]
    DegreeMismatch { max: usize, got: usize },

    #[error("restriction formula undefined: {0}")]
    RestrictionDomain(&'static str),

    #[error("start radius {gamma} lies in a classically forbidden region")]
    ForbiddenStart { gamma: f64 },

    #[error("no classically allowed radii for these constants of motion")]
    EmptyAllowedSet,

    #[error("allowed interval {index} does not exist ({count} available)")]
    NoSuchInterval { index: usize, count: usize },

    #[error("allowed interval reaches the origin; no inner turning point")]
    NoInnerTurningPoint,

    #[error("interval is unbounded; a finite outer turning point is required")]
    UnboundedInterval,

    #[error("orbit is circular (double turning point); apsidal angle is undefined")]
    CircularOrbit,

    #[error("G is not positive inside the interval (at gamma = {gamma})")]
    InconsistentInterval { gamma: f64 },

    #[error("invalid centre-of-mass state: H_cm = {h_cm}, p_theta_cm = {p_theta_cm}")]
    InvalidCmState { h_cm: f64, p_theta_cm: f64 },

    #[error("integration step collapsed at t = {t} (gamma = {gamma})")]
    StepCollapse { t: f64, gamma: f64 },

    #[error("quadrature did not converge (estimated error {estimated_error})")]
    QuadratureNonConvergence { estimated_error: f64 },

    #[error("trajectory has {found} radial minima; at least two are required")]
    InsufficientApsides { found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl OrbitError {
    pub fn class(&self) -> ErrorClass {
        use OrbitError::*;
        match self {
            InvalidSystem(_)
            | CoulombMismatch { .. }
            | MissingCoefficient(_)
            | UnexpectedCoefficient(_)
            | NonPositiveRadius(_)
            | AtOrigin
            | ZeroPolynomial
            | NonFiniteCoefficients
            | DegreeTooHigh(_)
            | DegreeMismatch { .. }
            | RestrictionDomain(_)
            | NoSuchInterval { .. }
            | InvalidArgument(_) => ErrorClass::Input,
            ForbiddenStart { .. }
            | EmptyAllowedSet
            | NoInnerTurningPoint
            | UnboundedInterval
            | CircularOrbit
            | InconsistentInterval { .. }
            | InvalidCmState { .. }
            | InsufficientApsides { .. } => ErrorClass::Domain,
            StepCollapse { .. } | QuadratureNonConvergence { .. } => ErrorClass::Numerical,
        }
    }

    /// Stable snake_case identifier for machine consumers.
    pub fn code(&self) -> &'static str {
        use OrbitError::*;
        match self {
            InvalidSystem(_) => "invalid_system",
            CoulombMismatch { .. } => "coulomb_mismatch",
            MissingCoefficient(_) => "missing_coefficient",
            UnexpectedCoefficient(_) => "unexpected_coefficient",
            NonPositiveRadius(_) => "non_positive_radius",
            AtOrigin => "at_origin",
            ZeroPolynomial => "zero_polynomial",
            NonFiniteCoefficients => "non_finite_coefficients",
            DegreeTooHigh(_) => "degree_too_high",
            DegreeMismatch { .. } => "degree_mismatch",
            RestrictionDomain(_) => "restriction_domain",
            ForbiddenStart { .. } => "forbidden_start",
            EmptyAllowedSet => "empty_allowed_set",
            NoSuchInterval { .. } => "no_such_interval",
            NoInnerTurningPoint => "no_inner_turning_point",
            UnboundedInterval => "unbounded_interval",
            CircularOrbit => "circular_orbit",
            InconsistentInterval { .. } => "inconsistent_interval",
            InvalidCmState { .. } => "invalid_cm_state",
            StepCollapse { .. } => "step_collapse",
            QuadratureNonConvergence { .. } => "quadrature_non_convergence",
            InsufficientApsides { .. } => "insufficient_apsides",
            InvalidArgument(_) => "invalid_argument",
        }
    }
}

pub type Result<T> = std::result::Result<T, OrbitError>;
