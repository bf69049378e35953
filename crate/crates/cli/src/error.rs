use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", config_message(*line, message))]
    Config { line: Option<usize>, message: String },
    #[error("solver failure: {0}")]
    Solver(#[from] rotcost_core::Error),
    #[error("verification failed: {0} check(s) did not pass")]
    Verify(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn config_message(line: Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("config error at line {l}: {message}"),
        None => format!("config error: {message}"),
    }
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            line: None,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Config { .. } => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
        }
    }
}
