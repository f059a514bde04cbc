use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Caps on wall time and on the number of distinct weights held by a single
/// intermediate character. Exceeding either aborts with
/// [`Error::BudgetExceeded`]; nothing is ever truncated.
#[derive(Clone, Debug, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    max_seconds: Option<f64>,
    max_weights: Option<usize>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn new(max_seconds: Option<f64>, max_weights: Option<usize>) -> Self {
        Budget {
            deadline: max_seconds.map(|s| Instant::now() + Duration::from_secs_f64(s)),
            max_seconds,
            max_weights,
        }
    }

    pub fn max_seconds(&self) -> Option<f64> {
        self.max_seconds
    }

    pub fn max_weights(&self) -> Option<usize> {
        self.max_weights
    }

    pub fn check_time(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::BudgetExceeded(format!(
                "wall time above {} s",
                self.max_seconds.unwrap_or_default()
            ))),
            _ => Ok(()),
        }
    }

    pub fn check_weights(&self, n: usize) -> Result<()> {
        match self.max_weights {
            Some(cap) if n > cap => Err(Error::BudgetExceeded(format!(
                "{n} distinct weights above the cap of {cap}"
            ))),
            _ => self.check_time(),
        }
    }
}
