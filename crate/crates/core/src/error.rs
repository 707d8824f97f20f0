use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge references unknown vertex `{0}`")]
    UnknownEndpoint(String),

    #[error("vertex id `{0}` declared twice")]
    DuplicateNodeId(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("label sets must be nonempty")]
    EmptyLabelSet,

    #[error("L_C and L_B share label(s): {0}")]
    DisjointnessViolation(String),

    #[error("no pattern connects terminals {terminals} ({from} -> {to})")]
    Unconnectable {
        from: String,
        to: String,
        terminals: String,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("selection is empty")]
    EmptySelection,

    #[error("vertex `{0}` is not visible in the current minimal view")]
    SelectionOutsideView(String),

    #[error("illegal {op} step: {reason}")]
    IllegalStep { op: &'static str, reason: String },

    #[error("graph too large for exhaustive enumeration ({vertices} vertices, {labels} labels)")]
    TooLarge { vertices: usize, labels: usize },
}

impl Error {
    /// Stable machine-readable code, surfaced by the HTTP API and the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse_error",
            Error::UnknownEndpoint(_) => "unknown_endpoint",
            Error::DuplicateNodeId(_) => "duplicate_node_id",
            Error::UnknownVertex(_) => "unknown_vertex",
            Error::UnknownLabel(_) => "unknown_label",
            Error::EmptyLabelSet => "empty_label_set",
            Error::DisjointnessViolation(_) => "disjointness_violation",
            Error::Unconnectable { .. } => "unconnectable",
            Error::PreconditionViolation(_) => "precondition_violation",
            Error::EmptySelection => "empty_selection",
            Error::SelectionOutsideView(_) => "selection_outside_view",
            Error::IllegalStep { .. } => "illegal_step",
            Error::TooLarge { .. } => "too_large",
        }
    }

    /// True for errors caused by malformed input text rather than by
    /// semantically invalid requests.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}
