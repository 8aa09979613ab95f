use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("basis position {position} outside the enumeration of {available} multi-indices")]
    BasisOutOfRange { position: usize, available: usize },
    #[error("Charlier functional of order {0} is not supported (only orders 0 and 1)")]
    UnsupportedCharlierOrder(u32),
    #[error("basis tags differ between operands")]
    BasisMismatch,
    #[error("coefficient spaces differ between operands")]
    SpaceMismatch,
    #[error("index set mismatch: {0}")]
    IndexSetMismatch(String),
    #[error("multi-index {0} is not a member of the index set")]
    NotInIndexSet(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("grid axis of {0} nodes is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("CFL condition violated: courant number {courant:.4} exceeds {limit}")]
    Cfl { courant: f64, limit: f64 },
    #[error("blow-up guard tripped at t = {time}: sup-norm {sup} exceeds {bound}")]
    BlowUp { time: f64, sup: f64, bound: f64 },
    #[error("closed-form characteristic solution requires space-independent noise")]
    SpaceDependentNoise,
    #[error("unsupported equation for this operation: {0}")]
    UnsupportedEquation(&'static str),
    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudget(String),
    #[error("inadmissible Strichartz pair (q = {q}, r = {r}, d = {d})")]
    InadmissiblePair { q: f64, r: f64, d: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("fixed-point iteration did not converge at t = {0}")]
    NoConvergence(f64),
}
