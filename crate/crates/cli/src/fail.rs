//! Exit-code discipline.  Validation problems (unreadable or invalid
//! configuration, resource guards) exit 2; computations that ran but
//! missed a numerical tolerance exit 3.

use anholonomy::Error;

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }

    /// Anyhow errors reaching the CLI are configuration or I/O problems.
    pub fn validation(e: anyhow::Error) -> Self {
        Failure::Validation(format!("{e:#}"))
    }

    /// Library errors: tolerance misses keep exit 3, everything else is a
    /// mis-configured computation.
    pub fn from_core(e: Error) -> Self {
        match e {
            Error::Accuracy { .. } | Error::Truncation { .. } | Error::LoopResolution { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}
