use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("degenerate reflection: generating column is within 1e-12 of e_1")]
    DegenerateReflection,
    #[error("pivots must be 0, 1, 2, ... in order; found pivot {found} at position {position}")]
    PivotOrder { position: usize, found: usize },
    #[error("matrix is not unitary: max |u*u - Id| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("expected at least {expected} eigenvalues at 1, found {found}")]
    Conditioning { expected: usize, found: usize },
    #[error("characteristic polynomial factor vanishes; logarithm is singular")]
    Singular,
    #[error("rejection sampler gave up after {attempts} attempts")]
    RejectionExhausted { attempts: u64 },
    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),
    #[error("numerical routine failed to converge: {0}")]
    NoConvergence(&'static str),
}
