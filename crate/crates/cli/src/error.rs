use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("invalid parameters: {0}")]
    Parameters(optomech::Error),

    #[error("numerical failure: {0}")]
    Numerical(optomech::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<optomech::Error> for CliError {
    fn from(e: optomech::Error) -> Self {
        use optomech::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::ActiveElement { .. }
            | E::UnreachableAbsorption { .. }
            | E::NonMonotonePositions { .. }
            | E::LossyPerfectCavity
            | E::PerfectMirrors
            | E::EtalonResonance => CliError::Parameters(e),
            _ => CliError::Numerical(e),
        }
    }
}

impl CliError {
    /// 1 for configuration and parameter errors, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}
