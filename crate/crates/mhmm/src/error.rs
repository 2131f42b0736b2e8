use std::fmt;
use std::path::PathBuf;

use mhmm_core::ErrorCategory;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] mhmm_core::Error),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Category names used in the `error:<category>:` prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Domain,
    Numerical,
    Capacity,
    Parse,
    Io,
    Usage,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Domain => "domain",
            Category::Numerical => "numerical",
            Category::Capacity => "capacity",
            Category::Parse => "parse",
            Category::Io => "io",
            Category::Usage => "usage",
        })
    }
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Parse { .. } => Category::Parse,
            Error::Io { .. } => Category::Io,
            Error::Usage(_) => Category::Usage,
            Error::Core(e) => match e.category() {
                ErrorCategory::Domain => Category::Domain,
                ErrorCategory::Numerical => Category::Numerical,
                ErrorCategory::Capacity => Category::Capacity,
            },
        }
    }

    /// 3 for numerical failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        if self.category() == Category::Numerical {
            3
        } else {
            2
        }
    }

    pub(crate) fn parse(path: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
