//! Distance-dependent millimeter-wave propagation: power-law exponent,
//! shadowing spread and Nakagami fading parameter all move between a
//! line-of-sight and a non-line-of-sight value along `tanh(mu * d)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Converts a decibel quantity to a linear power ratio, `10^(x/10)`.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// How the reference link's Nakagami parameter is turned into the integer
/// shape the closed-form outage expression needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundingMode {
    Floor,
    #[default]
    Nearest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationParams {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub sigma_min_db: f64,
    pub sigma_max_db: f64,
    pub m_min: f64,
    pub m_max: f64,
    /// Transition rate, 1/km.
    pub mu_per_km: f64,
    /// Reference distance, km.
    pub d0_km: f64,
}

impl Default for PropagationParams {
    /// Urban millimeter-wave values.
    fn default() -> Self {
        Self {
            alpha_min: 2.3,
            alpha_max: 4.7,
            sigma_min_db: 6.1,
            sigma_max_db: 12.6,
            m_min: 1.0,
            m_max: 2.0,
            mu_per_km: 40.0,
            d0_km: 0.004,
        }
    }
}

impl PropagationParams {
    /// The same parameters with shadowing switched off.
    pub fn without_shadowing(mut self) -> Self {
        self.sigma_min_db = 0.0;
        self.sigma_max_db = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.alpha_min,
            self.alpha_max,
            self.sigma_min_db,
            self.sigma_max_db,
            self.m_min,
            self.m_max,
            self.mu_per_km,
            self.d0_km,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(invalid("propagation parameters must be finite"));
        }
        if self.alpha_min > self.alpha_max {
            return Err(invalid("alpha_min must not exceed alpha_max"));
        }
        if self.sigma_min_db < 0.0 || self.sigma_min_db > self.sigma_max_db {
            return Err(invalid("need 0 <= sigma_min <= sigma_max"));
        }
        if self.m_min < 0.5 || self.m_min > self.m_max {
            return Err(invalid("need 0.5 <= m_min <= m_max"));
        }
        if self.mu_per_km <= 0.0 {
            return Err(invalid("mu must be positive"));
        }
        if self.d0_km <= 0.0 {
            return Err(invalid("reference distance d0 must be positive"));
        }
        Ok(())
    }

    #[inline]
    fn transition(&self, d: f64) -> f64 {
        (self.mu_per_km * d).tanh()
    }

    /// Power-law exponent at distance `d` km.
    pub fn alpha(&self, d: f64) -> Result<f64> {
        check_distance(d)?;
        Ok(self.alpha_unchecked(d))
    }

    #[inline]
    pub(crate) fn alpha_unchecked(&self, d: f64) -> f64 {
        self.alpha_min + (self.alpha_max - self.alpha_min) * self.transition(d)
    }

    /// Area-mean path gain `(d/d0)^-alpha(d)`; defined for `d >= d0` only.
    pub fn path_loss(&self, d: f64) -> Result<f64> {
        if !(d >= self.d0_km) {
            return Err(invalid(format!(
                "path loss is defined for d >= d0 = {} km, got {d}",
                self.d0_km
            )));
        }
        Ok(self.path_loss_clamped(d))
    }

    /// Path gain with distances below `d0` clamped up to `d0`.
    #[inline]
    pub fn path_loss_clamped(&self, d: f64) -> f64 {
        self.log_path_gain(d).exp()
    }

    /// Natural log of the clamped path gain, `-alpha(d) ln(d/d0)`.
    #[inline]
    pub fn log_path_gain(&self, d: f64) -> f64 {
        let d = d.max(self.d0_km);
        -self.alpha_unchecked(d) * (d / self.d0_km).ln()
    }

    /// Shadowing standard deviation in dB.
    pub fn shadow_sigma(&self, d: f64) -> Result<f64> {
        check_distance(d)?;
        Ok(self.shadow_sigma_unchecked(d))
    }

    #[inline]
    pub(crate) fn shadow_sigma_unchecked(&self, d: f64) -> f64 {
        self.sigma_min_db + (self.sigma_max_db - self.sigma_min_db) * self.transition(d)
    }

    pub fn shadowing_enabled(&self) -> bool {
        self.sigma_max_db > 0.0
    }

    /// Nakagami parameter of a link of length `d` km.
    pub fn nakagami_m(&self, d: f64) -> Result<f64> {
        check_distance(d)?;
        Ok(self.nakagami_m_unchecked(d))
    }

    #[inline]
    pub(crate) fn nakagami_m_unchecked(&self, d: f64) -> f64 {
        self.m_max - (self.m_max - self.m_min) * self.transition(d)
    }

    /// Draws a shadowing factor in dB from `Normal(0, sigma_s(d)^2)`.
    pub fn sample_shadow<R: Rng + ?Sized>(&self, d: f64, rng: &mut R) -> Result<f64> {
        let sigma = self.shadow_sigma(d)?;
        if sigma == 0.0 {
            return Ok(0.0);
        }
        let z: f64 = rng.sample(StandardNormal);
        Ok(sigma * z)
    }

    /// Integer Nakagami parameter of a reference link of length `d_r`, never below 1.
    pub fn reference_m0(&self, d_r: f64, mode: RoundingMode) -> Result<u32> {
        let m = self.nakagami_m(d_r)?;
        let k = match mode {
            RoundingMode::Floor => m.floor(),
            RoundingMode::Nearest => m.round(),
        };
        Ok(k.max(1.0) as u32)
    }
}

fn check_distance(d: f64) -> Result<()> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(invalid(format!(
            "distance must be finite and >= 0, got {d}"
        )));
    }
    Ok(())
}
