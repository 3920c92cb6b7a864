use std::fmt;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad arguments or model configuration (exit 2).
    Config(String),
    /// Degenerate point or non-identifiable setup (exit 3).
    Degenerate(String),
    /// File system failure (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Degenerate(m) => write!(f, "degenerate or non-identifiable: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<anticross::Error> for CliError {
    fn from(e: anticross::Error) -> Self {
        use anticross::Error as E;
        let class = match &e {
            E::Batch { source, .. } => return annotate(CliError::from((**source).clone()), &e),
            E::DegenerateBundle
            | E::DeterministicOutcome { .. }
            | E::ZeroDerivative
            | E::ZeroQfi
            | E::NonIdentifiable(_) => CliError::Degenerate,
            E::DomainExceeded { .. }
            | E::InvalidProbability(_)
            | E::Precondition(_)
            | E::InvalidInput(_)
            | E::Config(_) => CliError::Config,
        };
        class(e.to_string())
    }
}

fn annotate(inner: CliError, outer: &anticross::Error) -> CliError {
    let msg = outer.to_string();
    match inner {
        CliError::Config(_) => CliError::Config(msg),
        CliError::Degenerate(_) => CliError::Degenerate(msg),
        CliError::Io(_) => CliError::Io(msg),
    }
}
