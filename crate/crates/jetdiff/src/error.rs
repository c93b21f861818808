use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing variable in evaluation point: {0}")]
    MissingVariable(String),
    #[error("polynomial has mixed weighted degree: {0}")]
    MixedWeight(String),
    #[error("bracket requires nonzero weighted degree, got {0}")]
    ZeroDegree(String),
    #[error("problem size exceeds limit: {needed} monomials, limit {limit} (set JETDIFF_MAX_MONOMIALS to raise)")]
    SizeLimit { needed: usize, limit: usize },
    #[error("Wronskian vanishes at the expansion point")]
    VanishingWronskian,
    #[error("series truncation order {have} insufficient, need {need}")]
    InsufficientPrecision { have: usize, need: usize },
    #[error("series has non-constant coefficient where a rational value is required")]
    NonConstantCoefficient,
    #[error("series constant term is not an invertible rational")]
    NonUnitSeries,
    #[error("{0}")]
    Invalid(String),
}
