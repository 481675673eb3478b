use std::fmt;

/// Byte range in an input expression, used to point at parse errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bytes {}..{}", self.start, self.end)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A raw forest violates the one-outgoing-edge/root bookkeeping, or
    /// covertex labels are not exactly {1, ..., p} with each label used once.
    #[error("malformed forest: {0}")]
    Structure(String),

    /// Requested order exceeds the configured global capacity bound.
    #[error("order {requested} exceeds the capacity bound {bound} (raise AROMATIC_MAX_ORDER to override)")]
    Capacity { requested: usize, bound: usize },

    /// An operation received operands of an unexpected grade.
    #[error("grade mismatch: {0}")]
    Grade(String),

    /// An operation was asked something outside its mathematical domain
    /// (e.g. a contraction against something that is not a vector field).
    #[error("{0}")]
    Domain(String),

    /// Text input that does not match the expression grammar.
    #[error("parse error at {span}: {message}")]
    Parse { span: SourceSpan, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
