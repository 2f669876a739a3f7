use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A representation spec (family tag + parameters) failed validation.
    #[error("invalid representation spec: {0}")]
    InvalidSpec(String),

    /// An argument violated a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical routine failed to converge or produced non-finite values.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// A Hamiltonian or jump operator lies outside the traceless image of
    /// the derived representation, so no kit can reproduce it.
    #[error("not representable: {0}")]
    NotRepresentable(String),

    /// The jump-thinning step probability exceeds the accuracy bound.
    #[error("step too coarse: {0}")]
    StepTooCoarse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
