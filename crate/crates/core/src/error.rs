use alloc::string::String;
use core::fmt;

/// Everything that can go wrong in this crate. Variants are deliberately
/// fine-grained: callers dispatch on them (the CLI maps mathematical
/// findings, usage problems and precision exhaustion to different exit
/// codes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The reduction mod p of a polynomial has a repeated factor, so the
    /// lift cannot separate factors at this operator.
    NotSquarefreeModP,
    /// Operation requires a monic polynomial.
    NonMonic,
    /// The linear system has no solution over the given ring.
    NoSolution,
    /// Two operands live over different rings.
    RingMismatch,
    /// Added/compared series of different weights, or an expression mixes
    /// weights. Carries the two offending weights.
    WeightMismatch(i64, i64),
    /// Not enough q-expansion (or ring) precision to do what was asked.
    PrecisionTooSmall { needed: usize, have: usize },
    /// E_k does not have integer coefficients for this k.
    NonIntegralEisenstein(u64),
    /// A series expected to lie in a given span does not.
    NotInSpan,
    /// The operation needs a weight tag and the series has none.
    MissingWeightTag,
    /// The prime is outside the supported range for this operation.
    UnsupportedPrime(u64),
    /// The exponent m is outside the supported range for this operation.
    UnsupportedExponent(u32),
    /// a_p is zero at the working precision and the weight is too large for
    /// the Newton polygon to be decided.
    IndeterminateValuation,
    /// No candidate Hecke operator separates the eigensystems.
    GeneratorNotFound(String),
    /// a_1 is not a unit, so the form cannot be normalized.
    NotNormalized,
    /// h_{a,b} inputs must be congruent mod p.
    NotCongruentModP,
    /// h_{a,b} inputs must differ mod p^2.
    CongruentModPSquared,
    /// a + b is not a unit.
    NonUnitDenominator,
    /// The two weights are not congruent mod phi~(p^m), so the forms are
    /// not comparable at this modulus.
    NotComparable,
    /// A theorem-hypothesis check failed, so the conclusion is not tested.
    HypothesisNotMet(String),
    /// An iterative computation hit its cap before stabilizing.
    CapNotStabilized(String),
    /// A bounded search finished without finding a witness. Reported, not
    /// treated as a refutation.
    NotFoundWithinCap,
    /// Working precision was exhausted (slack doubling hit its cap).
    PrecisionLoss(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquarefreeModP => write!(f, "reduction mod p is not squarefree"),
            Error::NonMonic => write!(f, "polynomial is not monic"),
            Error::NoSolution => write!(f, "linear system has no solution"),
            Error::RingMismatch => write!(f, "operands live over different rings"),
            Error::WeightMismatch(a, b) => write!(f, "weight mismatch: {} vs {}", a, b),
            Error::PrecisionTooSmall { needed, have } => {
                write!(f, "precision too small: need {}, have {}", needed, have)
            }
            Error::NonIntegralEisenstein(k) => {
                write!(f, "E_{} does not have integer coefficients", k)
            }
            Error::NotInSpan => write!(f, "series does not lie in the expected span"),
            Error::MissingWeightTag => write!(f, "series carries no weight tag"),
            Error::UnsupportedPrime(p) => write!(f, "prime {} not supported here", p),
            Error::UnsupportedExponent(m) => write!(f, "exponent m = {} not supported here", m),
            Error::IndeterminateValuation => {
                write!(f, "valuation indeterminate at working precision")
            }
            Error::GeneratorNotFound(diag) => {
                write!(f, "no generating Hecke operator found: {}", diag)
            }
            Error::NotNormalized => write!(f, "a_1 is not a unit"),
            Error::NotCongruentModP => write!(f, "forms are not congruent mod p"),
            Error::CongruentModPSquared => write!(f, "forms are congruent mod p^2"),
            Error::NonUnitDenominator => write!(f, "a + b is not a unit"),
            Error::NotComparable => write!(f, "weights not congruent mod phi~(p^m)"),
            Error::HypothesisNotMet(s) => write!(f, "hypothesis not met: {}", s),
            Error::CapNotStabilized(s) => write!(f, "cap exhausted before stabilizing: {}", s),
            Error::NotFoundWithinCap => write!(f, "no witness found within the cap"),
            Error::PrecisionLoss(s) => write!(f, "working precision exhausted: {}", s),
        }
    }
}

impl core::error::Error for Error {}
