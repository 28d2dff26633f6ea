use metric_lab::boundary::BoundaryError;
use metric_lab::fractal::FractalError;
use metric_lab::gh::GhError;
use metric_lab::metric::MetricError;
use metric_lab::parse::ParseError;
use metric_lab::qs::QsError;
use metric_lab::tangent::TangentError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or unparseable input; exit code 2.
    #[error("usage: {0}")]
    Usage(String),
    /// A well-formed request the library refused; exit code 1.
    #[error("{module}: {msg}")]
    Domain { module: &'static str, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain { .. } | CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn domain(module: &'static str, msg: impl Into<String>) -> Self {
        CliError::Domain { module, msg: msg.into() }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::Json { .. } | MetricError::Malformed(_) => CliError::Usage(e.to_string()),
            other => CliError::domain("metric", other.to_string()),
        }
    }
}

impl From<GhError> for CliError {
    fn from(e: GhError) -> Self {
        CliError::domain("gh", e.to_string())
    }
}

impl From<FractalError> for CliError {
    fn from(e: FractalError) -> Self {
        match e {
            FractalError::Spec(_) | FractalError::Parse(_) => CliError::Usage(e.to_string()),
            FractalError::Metric(m) => m.into(),
            other => CliError::domain("fractal", other.to_string()),
        }
    }
}

impl From<BoundaryError> for CliError {
    fn from(e: BoundaryError) -> Self {
        match e {
            BoundaryError::Alphabet(_) => CliError::Usage(e.to_string()),
            other => CliError::domain("boundary", other.to_string()),
        }
    }
}

impl From<QsError> for CliError {
    fn from(e: QsError) -> Self {
        match e {
            QsError::Json { .. } => CliError::Usage(e.to_string()),
            other => CliError::domain("qs", other.to_string()),
        }
    }
}

impl From<TangentError> for CliError {
    fn from(e: TangentError) -> Self {
        match e {
            TangentError::Fractal(f) => f.into(),
            TangentError::Gh(g) => g.into(),
            TangentError::Metric(m) => m.into(),
            other => CliError::domain("tangent", other.to_string()),
        }
    }
}
