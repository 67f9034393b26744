use std::fmt;
use std::process::ExitCode;

use tropinit::compiler::CompileError;
use tropinit::dataset::DatasetError;
use tropinit::geometry::GeometryError;
use tropinit::harness::HarnessError;
use tropinit::metrics::MetricError;
use tropinit::network::NetworkError;
use tropinit::tropical::TropicalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    /// Unknown, missing or malformed command-line flags.
    Flag,
    /// Input files or parameters that fail validation.
    Input,
    Io,
    /// Numerical failure: non-finite loss, ill-conditioned solve, failed check.
    Numeric,
}

impl Code {
    pub fn as_str(&self) -> &'static str {
        match self {
            Code::Flag => "E_FLAG",
            Code::Input => "E_INPUT",
            Code::Io => "E_IO",
            Code::Numeric => "E_NUMERIC",
        }
    }

    pub fn exit(&self) -> ExitCode {
        match self {
            Code::Numeric => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: Code,
    pub detail: String,
}

impl CliError {
    pub fn new(code: Code, detail: impl Into<String>) -> Self {
        CliError { code, detail: detail.into() }
    }

    pub fn input(detail: impl Into<String>) -> Self {
        CliError::new(Code::Input, detail)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ERROR {}: {}", self.code.as_str(), self.detail.replace('\n', " "))
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn network_code(e: &NetworkError) -> Code {
    match e {
        NetworkError::NonFiniteLoss { .. } => Code::Numeric,
        _ => Code::Input,
    }
}

fn compile_code(e: &CompileError) -> Code {
    match e {
        CompileError::IllConditioned { .. } => Code::Numeric,
        CompileError::Network(n) => network_code(n),
        _ => Code::Input,
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        CliError::new(network_code(&e), e.to_string())
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        CliError::new(compile_code(&e), e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        let code = match &e {
            HarnessError::Io(_) => Code::Io,
            HarnessError::Network(n) => network_code(n),
            HarnessError::Compile(c) => compile_code(c),
            _ => Code::Input,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        let code = if matches!(e, DatasetError::Io(_)) { Code::Io } else { Code::Input };
        CliError::new(code, e.to_string())
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::input(e.to_string())
            }
        }
    )*};
}

input_error!(GeometryError, TropicalError, MetricError);
