use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A data row could not be parsed. `row` is 1-based over data rows.
    #[error("{file}: row {row}, column `{column}`: {message}")]
    Ingest {
        file: &'static str,
        row: usize,
        column: String,
        message: String,
    },

    #[error("{file}: bad header, expected `{expected}`, found `{found}`")]
    Header {
        file: &'static str,
        expected: String,
        found: String,
    },

    #[error("duplicate {kind} `{key}`")]
    DuplicateKey { kind: &'static str, key: String },

    /// A value lies outside its allowed range.
    #[error("{entity}: {field} {message}")]
    Range {
        entity: String,
        field: &'static str,
        message: String,
    },

    #[error("catalog has no {0}")]
    EmptyCatalog(&'static str),

    #[error("unknown {kind} `{key}`{}", fmt_suggestions(.suggestions))]
    NotFound {
        kind: &'static str,
        key: String,
        suggestions: Vec<String>,
    },

    #[error("no regions match the comparison filter")]
    EmptyComparison,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_suggestions(suggestions: &[String]) -> String {
    if suggestions.is_empty() {
        String::new()
    } else {
        format!(" (did you mean: {})", suggestions.join(", "))
    }
}

impl Error {
    pub(crate) fn range(entity: impl Into<String>, field: &'static str, message: impl Into<String>) -> Self {
        Error::Range {
            entity: entity.into(),
            field,
            message: message.into(),
        }
    }

    pub fn suggestions(&self) -> &[String] {
        match self {
            Error::NotFound { suggestions, .. } => suggestions,
            _ => &[],
        }
    }
}
