//! Toy model mapping a mass to its number of spatial degrees of freedom
//! and the effective discreteness scale of its collective displacement.
//!
//! Degrees of freedom grow as a power law above a threshold scale `mu`:
//! `f(m) = max{1, (m/mu)^alpha}`, and the effective grid spacing shrinks
//! as `l_eff(m) = l_P / f(m)^beta`. Below `mu` both are flat (`f = 1`,
//! `l_eff = l_P`), so both are continuous at the threshold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logq::{LogQuantity, PhysicalConstants, Unit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("alpha must be strictly positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("beta must be strictly positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("threshold scale must be a mass in GeV, got unit {0}")]
    InvalidThresholdUnit(Unit),
}

/// Default exponents used for all illustrative numbers: `f ~ m` and
/// `l_eff ~ 1/sqrt(f)`.
pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_BETA: f64 = 0.5;
pub const DEFAULT_MU_GEV: f64 = 1.0;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu_gev: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            mu_gev: DEFAULT_MU_GEV,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DiscretenessModel {
    mu: LogQuantity,
    alpha: f64,
    beta: f64,
    constants: PhysicalConstants,
}

impl DiscretenessModel {
    pub fn new(
        mu: LogQuantity,
        alpha: f64,
        beta: f64,
        constants: PhysicalConstants,
    ) -> Result<Self, ModelError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(ModelError::InvalidAlpha(alpha));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(ModelError::InvalidBeta(beta));
        }
        if mu.unit() != Unit::GEV {
            return Err(ModelError::InvalidThresholdUnit(mu.unit()));
        }
        Ok(DiscretenessModel {
            mu,
            alpha,
            beta,
            constants,
        })
    }

    pub fn from_params(params: &ModelParams) -> Result<Self, ModelError> {
        let mu = LogQuantity::from_linear(params.mu_gev, Unit::GEV)
            .map_err(|_| ModelError::InvalidThresholdUnit(Unit::GEV))?;
        DiscretenessModel::new(mu, params.alpha, params.beta, PhysicalConstants::default())
    }

    pub fn with_defaults() -> Self {
        DiscretenessModel::from_params(&ModelParams::default()).expect("defaults are valid")
    }

    pub fn mu(&self) -> LogQuantity {
        self.mu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    /// Number of spatial degrees of freedom, `max{1, (m/mu)^alpha}`.
    pub fn dof(&self, m: LogQuantity) -> LogQuantity {
        debug_assert_eq!(m.unit(), Unit::GEV);
        if m.log10() <= self.mu.log10() {
            LogQuantity::from_log10(0.0, Unit::DIMENSIONLESS)
        } else {
            (m / self.mu)
                .powf(self.alpha)
                .expect("dimensionless power is always valid")
        }
    }

    /// Effective discreteness scale `l_P / f(m)^beta`.
    pub fn l_eff(&self, m: LogQuantity) -> LogQuantity {
        let suppression = self
            .dof(m)
            .powf(self.beta)
            .expect("dimensionless power is always valid");
        self.constants.planck_length / suppression
    }

    /// Effective number of cells `d / l_eff(m)` crossed by a displacement.
    pub fn n_eff(&self, m: LogQuantity, d: LogQuantity) -> LogQuantity {
        debug_assert_eq!(d.unit(), Unit::METER);
        d / self.l_eff(m)
    }
}
