use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the temperature enters the Metropolis test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureScale {
    /// `accept if u < exp(-(c' - c) / T)`.
    Absolute,
    /// As `Absolute` with `T` multiplied by the initial cost.
    InitialCost,
    /// `accept if u < exp(-(ln c' - ln c) / T)`: scale-free, so the search
    /// stays equally selective as the cost falls by orders of magnitude.
    #[default]
    LogCost,
}

/// Geometric cooling: the temperature at step `k` is
/// `T0 * cooling^(k / steps_per_temperature)` (integer division).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealSchedule {
    pub initial_temperature: f64,
    pub cooling: f64,
    pub steps_per_temperature: usize,
    pub budget: usize,
    pub seed: u64,
    #[serde(default)]
    pub scale: TemperatureScale,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            initial_temperature: 1e-2,
            cooling: 0.9,
            steps_per_temperature: 100,
            budget: 2_000,
            seed: 0,
            scale: TemperatureScale::LogCost,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_temperature.is_finite() && self.initial_temperature >= 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "initial temperature must be finite and nonnegative, got {}",
                self.initial_temperature
            )));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.cooling
            )));
        }
        if self.steps_per_temperature == 0 {
            return Err(Error::InvalidSchedule("steps_per_temperature must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn temperature(&self, t0: f64, step: usize) -> f64 {
        t0 * self.cooling.powi((step / self.steps_per_temperature) as i32)
    }
}
