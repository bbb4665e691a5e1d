use thiserror::Error;

/// Errors produced by graph construction, solvers and experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge ({x}, {y}) has non-positive weight {weight}")]
    NonPositiveWeight { x: usize, y: usize, weight: f64 },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex id {id} out of range for graph with {vertex_count} vertices")]
    IdOutOfRange { id: usize, vertex_count: usize },
    #[error("vertex set belongs to a different graph")]
    ForeignVertexSet,
    #[error("vertex {0} is not a member of the set")]
    XNotInSet(usize),
    #[error("invalid vertex measure: {0}")]
    InvalidMeasure(String),

    #[error("lattice of {requested} vertices exceeds the vertex budget {budget}")]
    SizeOverflow { requested: u128, budget: usize },
    #[error("invalid lattice parameters: {0}")]
    InvalidLattice(String),
    #[error("set specification error: {0}")]
    SetSpec(String),

    #[error("exponent p must be a finite real > 1, got {0}")]
    InvalidExponent(f64),
    #[error("a component of the free region containing vertex {0} has an empty boundary")]
    EmptyBoundary(usize),
    #[error("non-finite boundary value {value} at vertex {vertex}")]
    NonFinite { vertex: usize, value: f64 },
    #[error("solver stopped after {sweeps} sweeps with residual {residual:e}")]
    MaxSweepsExceeded { sweeps: usize, residual: f64 },
    #[error("free component containing vertex {0} touches neither plate")]
    DisconnectedFreeComponent(usize),
    #[error("invalid condenser: {0}")]
    InvalidCondenser(String),
    #[error("ball of radius {radius} around vertex {center} does not fit inside the window")]
    WindowTooSmall { center: usize, radius: usize },
    #[error("closure of the level set reaches the sink")]
    ClosureEscapesU,
    #[error("zero denominator capacity in a Wiener term")]
    ZeroDenominator,
    #[error("x0 = {0} is not in the set")]
    X0OutsideOmega(usize),
    #[error("the subset is not contained in the domain")]
    Omega1NotSubset,
    #[error("the two sets intersect")]
    SetsIntersect,
    #[error("brute-force oracle supports at most {max} free vertices, got {got}")]
    TooManyFreeVertices { max: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
