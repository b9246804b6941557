use thiserror::Error;

/// Every failure the engine can report.
///
/// Several variants are mathematical findings rather than bugs: a
/// `NotDivisible` from a Drinfeld transform means the input does not have
/// the shape the functor needs.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("not divisible: {context}")]
    NotDivisible { context: String },

    #[error("exp needs an argument of h-valuation >= 1: {context}")]
    NotTopologicallyNilpotent { context: String },

    #[error("elements from different presentations: {left} and {right}")]
    MixedPresentations { left: String, right: String },

    #[error("rewriting fuel exhausted after {spent} steps (budget {budget}) on {word}")]
    FuelExceeded {
        word: String,
        spent: u64,
        budget: u64,
    },

    #[error("negative h-valuation where a power series was expected: {0}")]
    NegativeValuation(String),

    #[error("bracket modulo h is not Lie type: {0}")]
    NotLieType(String),

    #[error("cobracket does not lie in g ^ g: {0}")]
    CobracketNotInWedge(String),

    #[error("presentation is not commutative modulo h: {0}")]
    NotCommutativeModH(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("basis map is not invertible")]
    SingularBasisMap,

    #[error("gauge map is not a Hopf map: {0}")]
    NotAHopfMap(String),

    #[error("unknown example {0:?}")]
    UnknownExample(String),

    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),

    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("inadmissible presentation: {0}")]
    Inadmissible(String),

    #[error("wrong model: {0}")]
    WrongModel(String),

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("manifest error: {0}")]
    Manifest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
