//! The reward the agent optimizes: MIPS^gamma per watt.
//!
//! With gamma = 1 the reward is plain performance per watt and optimizing it
//! favors energy. With gamma = 2 it is the reciprocal of the energy-delay
//! product per instruction (watt / IPS^2), so maximizing it minimizes both
//! time and energy at once.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parameters of the reward function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardParams {
    /// Performance-boosting exponent applied to MIPS. Must be positive.
    pub gamma: f64,
    /// Minimum power in watts used as the denominator on (near-)idle
    /// intervals, so the reward stays finite when no energy was drawn.
    pub watt_floor: f64,
}

impl RewardParams {
    /// Preset that optimizes for energy: gamma = 1.
    pub fn energy() -> Self {
        RewardParams {
            gamma: 1.0,
            ..Default::default()
        }
    }

    /// Preset that emphasizes performance: gamma = 2, i.e. inverse
    /// energy-delay product per instruction.
    pub fn performance() -> Self {
        RewardParams::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Invalid(format!("non-positive gamma {}", self.gamma)));
        }
        if !(self.watt_floor.is_finite() && self.watt_floor > 0.0) {
            return Err(Error::Invalid(format!(
                "non-positive watt floor {}",
                self.watt_floor
            )));
        }
        Ok(())
    }
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams {
            gamma: 2.0,
            watt_floor: 1e-3,
        }
    }
}

/// Reward observed over one monitoring interval:
/// `(instructions / interval_s / 10^6)^gamma / max(energy_j / interval_s, watt_floor)`.
pub fn reward(
    energy_j: f64,
    instructions: u64,
    interval_s: f64,
    params: &RewardParams,
) -> Result<f64> {
    if !interval_s.is_finite() || interval_s <= 0.0 {
        return Err(Error::InvalidInterval(interval_s));
    }
    if !energy_j.is_finite() || energy_j < 0.0 {
        return Err(Error::InvalidEnergy(energy_j));
    }
    let mips = instructions as f64 / interval_s / 1e6;
    let watt = (energy_j / interval_s).max(params.watt_floor);
    Ok(mips.powf(params.gamma) / watt)
}
