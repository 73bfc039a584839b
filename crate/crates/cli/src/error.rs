use serde::Serialize;
use smote_reg::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Usage,
    Config,
    Io,
    Data,
    Schema,
    Model,
    Numeric,
    Invariant,
}

impl Category {
    pub fn exit_code(self) -> u8 {
        match self {
            Category::Usage => 2,
            Category::Config => 3,
            Category::Io => 4,
            Category::Data => 5,
            Category::Schema => 6,
            Category::Model => 7,
            Category::Numeric => 8,
            Category::Invariant => 9,
        }
    }
}

#[derive(Debug, Clone, Serialize, thiserror::Error)]
#[error("{category:?}: {message}")]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn new(category: Category, message: impl Into<String>) -> Self {
        CliError { category, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Category::Usage, message)
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Category::Config, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(Category::Io, message)
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let category = match &e {
            Error::Io { .. } => Category::Io,
            Error::Csv(_) | Error::BadCell { .. } | Error::EmptyDataset => Category::Data,
            Error::MissingColumn(_) | Error::DimensionMismatch { .. } => Category::Schema,
            Error::InvalidConfig(_) => Category::Config,
            Error::Divergence { .. } | Error::Singular => Category::Numeric,
            Error::ModelFormat { .. } => Category::Model,
            Error::Invariant(_) => Category::Invariant,
        };
        CliError::new(category, e.to_string())
    }
}
