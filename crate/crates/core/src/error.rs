use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration field is out of its valid range.
    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    /// The user and base-station heights coincide; the LoS model is singular there.
    #[error("degenerate geometry: |h_user - h_b| = {diff:e} m is below {min:e} m")]
    DegenerateHeight { diff: f64, min: f64 },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge in {context}: estimated error {error:e} after {intervals} intervals")]
    NumericFailure {
        context: String,
        error: f64,
        intervals: usize,
    },

    #[error("the strongest association rule has no analytic form; use the Monte Carlo estimator")]
    UnsupportedAnalytic,

    #[error("association probability of tier {tier} ({link}) is zero; the conditional distance density is undefined")]
    UndefinedConditional { tier: usize, link: &'static str },

    #[error("no eligible base station in the field")]
    NoCandidate,

    #[error(
        "no sign change on bracket [{lo:e}, {hi:e}]: delta(lo) = {delta_lo:e}, delta(hi) = {delta_hi:e}"
    )]
    NoSignChange {
        lo: f64,
        hi: f64,
        delta_lo: f64,
        delta_hi: f64,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }

    /// Prefixes the context of a numeric failure, leaving other variants untouched.
    pub fn in_context(self, ctx: impl AsRef<str>) -> Self {
        match self {
            Error::NumericFailure {
                context,
                error,
                intervals,
            } => Error::NumericFailure {
                context: format!("{}: {}", ctx.as_ref(), context),
                error,
                intervals,
            },
            other => other,
        }
    }
}
