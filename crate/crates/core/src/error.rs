use std::fmt;

use thiserror::Error;

/// Pipeline stage that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Polygon,
    Init,
    Dynamics,
    Boundary,
    Metrics,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Polygon => "polygon",
            Stage::Init => "init",
            Stage::Dynamics => "dynamics",
            Stage::Boundary => "boundary",
            Stage::Metrics => "metrics",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("polygon too small to fit the lattice (scale factor {beta})")]
    InfeasibleFit { beta: f64 },

    #[error("circles {i} and {j} have coincident centers")]
    CoincidentCenters { i: usize, j: usize },

    #[error("velocity {speed} exceeds stability bound {limit}; reduce the time step")]
    NumericalBlowup { speed: f64, limit: f64 },

    #[error("no convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Innermost error, with stage labels stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code for the CLI: 2 invalid input, 3 non-convergence, 4 IO.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::NonConvergence { .. } => 3,
            Error::Io(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
