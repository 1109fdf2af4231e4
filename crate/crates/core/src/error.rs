use thiserror::Error;

/// Errors produced by the core pipeline and graph operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A structured input (ingestion source, dump, resource file) violated
    /// its format at a specific line.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    /// Ingestion source contained no content units.
    #[error("document contains no content")]
    EmptyDocument,

    /// A referenced entity does not exist.
    #[error("not found: {0}")]
    NotFound(String),

    /// A tagger group was run without the resources it needs.
    #[error("missing resource for tag type {0}")]
    MissingResource(String),

    /// An operation was invoked outside its domain (e.g. glossary tagging
    /// requested for a non-DEF type).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter failed validation.
    #[error("invalid argument: {0}")]
    Invalid(String),

    /// Referential integrity was violated (dangling edge, overlapping
    /// replacement, schema breach).
    #[error("integrity error: {0}")]
    Integrity(String),

    /// A query needed exactly one match but found zero or several.
    #[error("ambiguous match for {pattern:?}: {} candidate(s): {}", candidates.len(), candidates.join(", "))]
    Ambiguous { pattern: String, candidates: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format { line, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
