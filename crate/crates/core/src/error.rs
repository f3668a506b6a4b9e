use thiserror::Error;

/// Errors raised while building, validating or decomposing behaviors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("negative probability {value} at lambda {lambda}, setting {setting}, outcome {outcome}")]
    NegativeProbability {
        lambda: usize,
        setting: u8,
        outcome: usize,
        value: f64,
    },
    #[error("distribution at lambda {lambda}, setting {setting} sums to {sum}")]
    NotNormalized { lambda: usize, setting: u8, sum: f64 },
    #[error("hidden-variable weights sum to {sum}")]
    WeightsNotNormalized { sum: f64 },
    #[error("negative weight {value} at lambda {lambda}")]
    NegativeWeight { lambda: usize, value: f64 },
    #[error("lambda {lambda} has no table for setting {setting}")]
    MissingSetting { lambda: usize, setting: String },
    #[error("behavior has no hidden-variable states")]
    Empty,
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("profile reconstructs to entry {outcome} = {value} < 0")]
    InfeasibleProfile { outcome: usize, value: f64 },
    #[error("empty c range: lower {lower} > upper {upper}")]
    EmptyRange { lower: f64, upper: f64 },
    #[error("correlator routes disagree: {from_distribution} vs {from_profile}")]
    CrossCheck {
        from_distribution: f64,
        from_profile: f64,
    },
    #[error("malformed behavior document: {0}")]
    Parse(String),
}

/// Errors from the closed-form bound and requirement calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("{name} = {value} outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

/// Errors from the tightness oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("I = {indeterminism} lies outside the band {band}")]
    RegimeMismatch { indeterminism: f64, band: String },
    #[error("no explicit witness is available for {0}")]
    UnsupportedRegime(String),
    #[error("constraint set is empty")]
    InfeasibleConstraints,
    #[error("search exceeded its budget of {limit} nodes")]
    BudgetExceeded { limit: u64 },
    #[error("invalid oracle configuration: {0}")]
    Config(String),
}
