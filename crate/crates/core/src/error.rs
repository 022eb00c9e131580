use thiserror::Error;

pub type AgentId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("negative distance {0} m")]
    NegativeDistance(f64),

    #[error("no cluster member of anchor {anchor} has a conflict with it")]
    NoConflictingMember { anchor: AgentId },

    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),

    #[error("missing time-to-collision for T^c({from}, {to})")]
    MissingTtc { from: AgentId, to: AgentId },

    #[error("missing time-of-safe-crossing for agent {0}")]
    MissingTosc(AgentId),

    #[error("undefined arrival order between agents {0} and {1}")]
    UndefinedArrival(AgentId, AgentId),

    #[error("game with {players} players exceeds the enumeration cap of {cap}")]
    PlayerCapExceeded { players: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("scenario error at `{path}`: {message}")]
    Scenario { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
