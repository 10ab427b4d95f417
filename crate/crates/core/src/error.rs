use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate direction: all coordinates are zero")]
    DegenerateDirection,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionError { expected: usize, found: usize },

    #[error("invalid size {0:?}: every extent must be at least 1")]
    InvalidSize(Vec<u64>),

    #[error("direction {0:?} does not have coprime coordinates")]
    NotADirection(Vec<u64>),

    #[error("letter {letter} is outside an alphabet of size {alphabet}")]
    LetterOutOfRange { letter: u32, alphabet: usize },

    #[error("morphism is not prolongable on letter {0}")]
    NotProlongable(u32),

    #[error("construction conflict at {position:?}: {existing} vs {incoming}")]
    ConstructionBug {
        position: Vec<u64>,
        existing: u32,
        incoming: u32,
    },

    #[error("no admissible b for direction {direction:?} at step {step} (cap {cap})")]
    ScheduleExhausted {
        step: u64,
        direction: Vec<u64>,
        cap: u64,
    },

    #[error("residue vector {0:?} does not have coprime coordinates")]
    NotCoprime(Vec<u64>),

    #[error("position {position:?} lies on the line spanned by {direction:?}")]
    OnLine {
        direction: Vec<u64>,
        position: Vec<u64>,
    },

    #[error("morphism size {0} is not prime")]
    CompositeSize(u64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("prefix letter along {direction:?} recurs fewer than {needed} times within horizon {horizon}")]
    ReturnScanFailed {
        direction: Vec<u64>,
        needed: usize,
        horizon: u64,
    },

    #[error("no visit to the interval up to horizon {0}")]
    EmptyVisit(u64),

    #[error("nothing found within search cap {0}")]
    NotFound(u64),

    #[error("integer overflow while computing a lattice position")]
    Overflow,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
