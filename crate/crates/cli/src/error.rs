//! Exit-code classification: 1 for validation problems (bad input, bad
//! arguments, unsatisfiable preconditions), 2 for numerical or
//! internal-consistency failures.

use mtensor::fundamental::FundamentalError;
use mtensor::graph::GraphError;
use mtensor::influence::InfluenceError;
use mtensor::metrics::MetricsError;
use mtensor::reachability::ReachError;
use mtensor::simulate::SimulateError;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("io error: {e}"))
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Numerical(_) => CliError::Numerical(format!("graph: {e}")),
            other => CliError::Validation(format!("graph: {other}")),
        }
    }
}

impl From<FundamentalError> for CliError {
    fn from(e: FundamentalError) -> Self {
        match e {
            FundamentalError::Numerical(_) => CliError::Numerical(format!("fundamental: {e}")),
            other => CliError::Validation(format!("fundamental: {other}")),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::RouteDisagreement { .. } => {
                CliError::Numerical(format!("metrics: {e}"))
            }
            MetricsError::Numerical(_) => CliError::Numerical(format!("metrics: {e}")),
            MetricsError::Fundamental(inner) => CliError::from(inner),
            MetricsError::Graph(inner) => CliError::from(inner),
            other => CliError::Validation(format!("metrics: {other}")),
        }
    }
}

impl From<InfluenceError> for CliError {
    fn from(e: InfluenceError) -> Self {
        match e {
            InfluenceError::Fundamental(inner) => CliError::from(inner),
            InfluenceError::Graph(inner) => CliError::from(inner),
            other => CliError::Validation(format!("influence: {other}")),
        }
    }
}

impl From<ReachError> for CliError {
    fn from(e: ReachError) -> Self {
        match e {
            ReachError::Numerical(_) => CliError::Numerical(format!("reach: {e}")),
            ReachError::Fundamental(inner) => CliError::from(inner),
            other => CliError::Validation(format!("reach: {other}")),
        }
    }
}

impl From<SimulateError> for CliError {
    fn from(e: SimulateError) -> Self {
        match e {
            SimulateError::ExcessiveTruncation { .. } => {
                CliError::Numerical(format!("simulate: {e}"))
            }
            other => CliError::Validation(format!("simulate: {other}")),
        }
    }
}
