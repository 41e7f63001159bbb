//! Closed-form detectability thresholds for displacement statistics on a
//! discrete grid.
//!
//! All thresholds are reported as bare right-hand-side values; no safety
//! factor is baked in here. Feasibility margins are applied only in CLI
//! verdicts. Floors (`max{lambda_C, l_P}`) are reported alongside the
//! bounds, never used to clamp them.

use thiserror::Error;

use crate::logq::{LogQuantity, Unit};
use crate::model::DiscretenessModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("accuracy must satisfy 0 < a < 1, got {0}")]
    AccuracyOutOfRange(f64),
}

/// Standard deviation of a displacement realized as a Poisson number of
/// grid cells: `sqrt(grid * d)`.
pub fn poisson_std(d: LogQuantity, grid: LogQuantity) -> LogQuantity {
    debug_assert_eq!(d.unit(), Unit::METER);
    debug_assert_eq!(grid.unit(), Unit::METER);
    (grid * d).sqrt().expect("meter^2 has an exact square root")
}

/// Thresholds implied by a fixed relative accuracy `a`: at most `1/a^2`
/// cells, displacement below `l_P/a^2`, precision below `l_P/a`.
#[derive(Debug, Clone, Copy)]
pub struct AccuracyThresholds {
    pub n_max: f64,
    pub d_max: LogQuantity,
    pub delta_d_max: LogQuantity,
}

pub fn accuracy_fixed_thresholds(
    model: &DiscretenessModel,
    a: f64,
) -> Result<AccuracyThresholds, BoundsError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(BoundsError::AccuracyOutOfRange(a));
    }
    let lp = model.constants().planck_length;
    let a_log = LogQuantity::from_linear(a, Unit::DIMENSIONLESS)
        .map_err(|_| BoundsError::AccuracyOutOfRange(a))?;
    Ok(AccuracyThresholds {
        n_max: 1.0 / (a * a),
        d_max: lp / a_log.powi(2),
        delta_d_max: lp / a_log,
    })
}

/// Minimum displacement measurable to a fixed absolute precision:
/// `delta_d^2 / grid`.
pub fn precision_fixed_min_displacement(delta_d: LogQuantity, grid: LogQuantity) -> LogQuantity {
    debug_assert_eq!(delta_d.unit(), Unit::METER);
    debug_assert_eq!(grid.unit(), Unit::METER);
    delta_d.powi(2) / grid
}

/// Lower bound on an independent displacement for its statistical variance
/// to clear both the Compton and Planck floors.
pub fn min_displacement_independent(model: &DiscretenessModel, m: LogQuantity) -> LogQuantity {
    let c = model.constants();
    let numerator = if m.log10() <= c.planck_mass.log10() {
        c.compton(m)
    } else {
        c.planck_length
    };
    numerator.powi(2) / model.l_eff(m)
}

/// Worst relative accuracy that still resolves the variance of an
/// independent displacement. Dimensionless.
pub fn worst_accuracy_independent(model: &DiscretenessModel, m: LogQuantity) -> LogQuantity {
    let c = model.constants();
    let denominator = if m.log10() <= c.planck_mass.log10() {
        c.compton(m)
    } else {
        c.planck_length
    };
    model.l_eff(m) / denominator
}

/// Variance transferred to the light particle by dipole conservation:
/// `sqrt(M * l_eff(M) * d / m)`.
pub fn coupled_delta_d(
    model: &DiscretenessModel,
    m: LogQuantity,
    big_m: LogQuantity,
    d: LogQuantity,
) -> LogQuantity {
    poisson_std(d, transfer_scale(model, m, big_m))
}

/// Effective grid spacing seen by the particle through the coupling,
/// `M * l_eff(M) / m`. Eq-of-motion shorthand: `coupled_delta_d` is
/// `poisson_std` on this scale.
pub fn transfer_scale(
    model: &DiscretenessModel,
    m: LogQuantity,
    big_m: LogQuantity,
) -> LogQuantity {
    (big_m * model.l_eff(big_m)) / m
}

/// Lower bound on the particle displacement for transferred variance to be
/// in principle observable.
pub fn min_displacement_coupled(
    model: &DiscretenessModel,
    m: LogQuantity,
    big_m: LogQuantity,
) -> LogQuantity {
    let c = model.constants();
    let mass_factor = if big_m.log10() < c.planck_mass.log10() {
        c.planck_mass / big_m
    } else {
        big_m / c.planck_mass
    };
    mass_factor * (c.planck_length / model.l_eff(big_m)) * c.compton(m)
}

/// Variance-amplification factor `M * l_eff(M) / (m * l_eff(m))`.
pub fn amplification_ratio(
    model: &DiscretenessModel,
    m: LogQuantity,
    big_m: LogQuantity,
) -> LogQuantity {
    (big_m * model.l_eff(big_m)) / (m * model.l_eff(m))
}

/// Unmeasurable-in-principle region: `max{lambda_C(m), l_P}`.
pub fn floor(model: &DiscretenessModel, m: LogQuantity) -> LogQuantity {
    let c = model.constants();
    c.compton(m)
        .max(&c.planck_length)
        .expect("both floors are meters")
}

/// All independent-measurement thresholds for one mass.
#[derive(Debug, Clone, Copy)]
pub struct IndependentBounds {
    pub mass: LogQuantity,
    pub min_displacement: LogQuantity,
    pub worst_accuracy: LogQuantity,
    pub floor: LogQuantity,
}

pub fn independent_bounds(model: &DiscretenessModel, m: LogQuantity) -> IndependentBounds {
    IndependentBounds {
        mass: m,
        min_displacement: min_displacement_independent(model, m),
        worst_accuracy: worst_accuracy_independent(model, m),
        floor: floor(model, m),
    }
}

/// Thresholds for a particle of mass `m` coupled to an object of mass `M`.
#[derive(Debug, Clone, Copy)]
pub struct CoupledBounds {
    pub m: LogQuantity,
    pub big_m: LogQuantity,
    pub min_displacement: LogQuantity,
    pub amplification: LogQuantity,
    pub floor: LogQuantity,
    transfer_scale: LogQuantity,
}

impl CoupledBounds {
    /// Transferred standard deviation at a given particle displacement.
    pub fn delta_d_at(&self, d: LogQuantity) -> LogQuantity {
        poisson_std(d, self.transfer_scale)
    }
}

pub fn coupled_bounds(
    model: &DiscretenessModel,
    m: LogQuantity,
    big_m: LogQuantity,
) -> CoupledBounds {
    CoupledBounds {
        m,
        big_m,
        min_displacement: min_displacement_coupled(model, m, big_m),
        amplification: amplification_ratio(model, m, big_m),
        floor: floor(model, m),
        transfer_scale: transfer_scale(model, m, big_m),
    }
}
