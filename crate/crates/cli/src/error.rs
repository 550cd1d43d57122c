use std::fmt;

use speccert_core::descent::DescentError;
use speccert_core::ellcurve::CurveError;
use speccert_core::extend::ExtendError;
use speccert_core::poly::PolyError;

/// A failure with a stable code, printed as `error[CODE]: message`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

fn curve_code(e: &CurveError) -> &'static str {
    match e {
        CurveError::Singular => "E-SINGULAR",
        CurveError::SingularFiber(_) => "E-SINGULAR-FIBER",
        CurveError::UndefinedFiber(_) => "E-UNDEFINED-FIBER",
        CurveError::NotOnCurve(_) => "E-OFF-CURVE",
        CurveError::NotShort | CurveError::NotTwoTorsion(_) => "E-MODEL",
        CurveError::Infinity | CurveError::OrderTwo(_) => "E-POINT",
        CurveError::TorsionBound(_) => "E-TORSION",
        CurveError::Poly(_) | CurveError::Exact(_) => "E-ARITH",
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::new(curve_code(&e), e.to_string())
    }
}

impl From<DescentError> for CliError {
    fn from(e: DescentError) -> Self {
        let code = match &e {
            DescentError::RepeatedRoot(..) => "E-SINGULAR",
            DescentError::SquareDiscriminant => "E-SQUARE-DISC",
            DescentError::Vanishes { .. } => "E-VANISHES",
            DescentError::BaseTooLarge(_) => "E-LIMIT",
            DescentError::Poly(_) | DescentError::Exact(_) => "E-ARITH",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        let code = match &e {
            PolyError::Pole(_) => "E-POLE",
            _ => "E-ARITH",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<ExtendError> for CliError {
    fn from(e: ExtendError) -> Self {
        let code = match &e {
            ExtendError::Curve(c) => curve_code(c),
            ExtendError::Descent(d) => return d.clone().into(),
            ExtendError::Poly(p) => return p.clone().into(),
            ExtendError::BadParametrization | ExtendError::ConstantParametrization => "E-PARAM",
            ExtendError::HasTwoTorsion(_)
            | ExtendError::NotFullTwoTorsion
            | ExtendError::NoTwoTorsion
            | ExtendError::NotPolynomial(_) => "E-ROUTE",
            ExtendError::SpecialPointOffCurve(_) => "E-OFF-CURVE",
            ExtendError::HalvingMismatch(_) => "E-HALVING",
            ExtendError::FactorDoesNotDivide => "E-FACTOR",
            ExtendError::TwoTorsionPoint(_) | ExtendError::TorsionGenerator(_) => "E-POINT",
            ExtendError::PointDivisible(_) => "E-DIVISIBLE",
            ExtendError::PoleOfU(_) => "E-POLE",
            ExtendError::DependentGenerators(_) => "E-DEPENDENT",
            ExtendError::NoGenerators | ExtendError::TooManyGenerators(_) => "E-GENERATORS",
            ExtendError::CommutationFailure(_) => "E-INTERNAL",
        };
        CliError::new(code, e.to_string())
    }
}
