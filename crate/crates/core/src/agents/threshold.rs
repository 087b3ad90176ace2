use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-step thresholds `γ_t`. A constant schedule is stored as a scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThresholdSchedule {
    Constant(f64),
    PerStep(Vec<f64>),
}

impl ThresholdSchedule {
    pub fn at(&self, t: usize) -> f64 {
        match self {
            ThresholdSchedule::Constant(g) => *g,
            ThresholdSchedule::PerStep(gs) => gs[t],
        }
    }

    /// Check that decisions `t = 0..=horizon` all have a threshold.
    pub fn check_covers(&self, horizon: usize) -> Result<()> {
        match self {
            ThresholdSchedule::Constant(_) => Ok(()),
            ThresholdSchedule::PerStep(gs) if gs.len() > horizon => Ok(()),
            ThresholdSchedule::PerStep(gs) => Err(Error::ScheduleLength {
                got: gs.len(),
                need: horizon + 1,
            }),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ThresholdSchedule::Constant(_))
    }
}

impl From<f64> for ThresholdSchedule {
    fn from(g: f64) -> Self {
        ThresholdSchedule::Constant(g)
    }
}
