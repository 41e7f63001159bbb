//! Bound curves sampled over mass grids, plus CSV/JSON emission.
//!
//! Values are stored and emitted as log10 so a single series can span the
//! full Planck-to-astronomical range without loss. Floors (the gray
//! regions of the displacement figures) are carried as separate overlay
//! columns, never folded into the curve values.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds;
use crate::logq::{LogQuantity, Unit, ELECTRON_MASS_GEV};
use crate::model::DiscretenessModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("unknown figure id {0:?} (expected 1a, 1b, 1c, 1d, or 4)")]
    UnknownFigure(String),
    #[error("mass grid must contain at least 2 points, got {0}")]
    EmptyGrid(usize),
    #[error("mass grid bounds must be positive with min < max, got [{0:e}, {1:e}]")]
    BadGridBounds(f64, f64),
    #[error("{0} must be finite and positive, got {1:e}")]
    BadParameter(&'static str, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigureId {
    #[serde(rename = "fig1a")]
    Fig1a,
    #[serde(rename = "fig1b")]
    Fig1b,
    #[serde(rename = "fig1c")]
    Fig1c,
    #[serde(rename = "fig1d")]
    Fig1d,
    #[serde(rename = "fig4")]
    Fig4,
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig1c => "fig1c",
            FigureId::Fig1d => "fig1d",
            FigureId::Fig4 => "fig4",
        };
        f.write_str(s)
    }
}

impl FromStr for FigureId {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim_start_matches("fig") {
            "1a" => Ok(FigureId::Fig1a),
            "1b" => Ok(FigureId::Fig1b),
            "1c" => Ok(FigureId::Fig1c),
            "1d" => Ok(FigureId::Fig1d),
            "4" => Ok(FigureId::Fig4),
            _ => Err(SweepError::UnknownFigure(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueUnit {
    Meter,
    Dimensionless,
}

impl fmt::Display for ValueUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueUnit::Meter => f.write_str("meter"),
            ValueUnit::Dimensionless => f.write_str("dimensionless"),
        }
    }
}

/// Log-uniform mass grid in GeV.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MassGrid {
    pub min_gev: f64,
    pub max_gev: f64,
    pub points: usize,
}

impl Default for MassGrid {
    fn default() -> Self {
        MassGrid {
            min_gev: 1e-6,
            max_gev: 1e25,
            points: 400,
        }
    }
}

impl MassGrid {
    pub fn masses_log10(&self) -> Result<Vec<f64>, SweepError> {
        if self.points < 2 {
            return Err(SweepError::EmptyGrid(self.points));
        }
        if !(self.min_gev > 0.0 && self.max_gev > self.min_gev) {
            return Err(SweepError::BadGridBounds(self.min_gev, self.max_gev));
        }
        let lo = self.min_gev.log10();
        let hi = self.max_gev.log10();
        let step = (hi - lo) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| lo + step * i as f64).collect())
    }
}

/// Extra figure parameters: the measurement precision for fig1c/fig1d and
/// the probe (light-particle) mass for fig4.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FigureParams {
    pub precision_m: f64,
    pub probe_mass_gev: f64,
}

impl Default for FigureParams {
    fn default() -> Self {
        FigureParams {
            precision_m: 1e-15,
            probe_mass_gev: ELECTRON_MASS_GEV,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub mass_log10_gev: f64,
    pub value_log10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub figure_id: FigureId,
    pub mu_gev: f64,
    pub alpha: f64,
    pub beta: f64,
    pub unit: ValueUnit,
    pub points: Vec<CurvePoint>,
    /// Floor overlay (gray region) as (mass_log10_gev, floor_log10) pairs.
    pub floor: Option<Vec<(f64, f64)>>,
}

/// Curve value at one mass, in log10. Shared by grid sweeps and landmark
/// evaluation so emitted points always match the pointwise bounds.
pub fn curve_value_log10(
    figure_id: FigureId,
    model: &DiscretenessModel,
    extra: &FigureParams,
    mass_log10_gev: f64,
) -> f64 {
    let mass = LogQuantity::from_log10(mass_log10_gev, Unit::GEV);
    match figure_id {
        FigureId::Fig1a => bounds::min_displacement_independent(model, mass).log10(),
        FigureId::Fig1b => bounds::worst_accuracy_independent(model, mass).log10(),
        FigureId::Fig1c => {
            let delta_d = LogQuantity::from_log10(extra.precision_m.log10(), Unit::METER);
            bounds::precision_fixed_min_displacement(delta_d, model.l_eff(mass)).log10()
        }
        FigureId::Fig1d => {
            // worst accuracy delta_d / d at the fig1c minimum displacement
            model.l_eff(mass).log10() - extra.precision_m.log10()
        }
        FigureId::Fig4 => {
            let probe = LogQuantity::from_log10(extra.probe_mass_gev.log10(), Unit::GEV);
            bounds::min_displacement_coupled(model, probe, mass).log10()
        }
    }
}

fn value_unit(figure_id: FigureId) -> ValueUnit {
    match figure_id {
        FigureId::Fig1a | FigureId::Fig1c | FigureId::Fig4 => ValueUnit::Meter,
        FigureId::Fig1b | FigureId::Fig1d => ValueUnit::Dimensionless,
    }
}

pub fn generate_curve(
    figure_id: FigureId,
    model: &DiscretenessModel,
    grid: &MassGrid,
    extra: &FigureParams,
) -> Result<CurveSeries, SweepError> {
    if !(extra.precision_m > 0.0) || !extra.precision_m.is_finite() {
        return Err(SweepError::BadParameter("precision", extra.precision_m));
    }
    if !(extra.probe_mass_gev > 0.0) || !extra.probe_mass_gev.is_finite() {
        return Err(SweepError::BadParameter("probe mass", extra.probe_mass_gev));
    }
    let masses = grid.masses_log10()?;
    let points: Vec<CurvePoint> = masses
        .iter()
        .map(|&mlog| CurvePoint {
            mass_log10_gev: mlog,
            value_log10: curve_value_log10(figure_id, model, extra, mlog),
        })
        .collect();
    for p in &points {
        debug_assert!(p.value_log10.is_finite());
    }
    let floor = match figure_id {
        FigureId::Fig1a | FigureId::Fig1c => Some(
            masses
                .iter()
                .map(|&mlog| {
                    let mass = LogQuantity::from_log10(mlog, Unit::GEV);
                    (mlog, bounds::floor(model, mass).log10())
                })
                .collect(),
        ),
        FigureId::Fig4 => {
            let probe = LogQuantity::from_log10(extra.probe_mass_gev.log10(), Unit::GEV);
            let compton_log10 = model.constants().compton(probe).log10();
            Some(masses.iter().map(|&mlog| (mlog, compton_log10)).collect())
        }
        FigureId::Fig1b | FigureId::Fig1d => None,
    };
    Ok(CurveSeries {
        figure_id,
        mu_gev: model.mu().to_linear().unwrap_or(f64::NAN),
        alpha: model.alpha(),
        beta: model.beta(),
        unit: value_unit(figure_id),
        points,
        floor,
    })
}

pub const CSV_HEADER: &str = "figure_id,mu_gev,alpha,beta,mass_gev,value,unit,floor";

/// 12 significant digits, enough for an exact round trip of the log10
/// columns at the documented precision.
fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn emit_csv<W: Write>(series: &CurveSeries, sink: &mut W) -> io::Result<()> {
    writeln!(sink, "{CSV_HEADER}")?;
    for (i, p) in series.points.iter().enumerate() {
        let floor = series
            .floor
            .as_ref()
            .map(|f| sig12(f[i].1))
            .unwrap_or_default();
        writeln!(
            sink,
            "{},{},{},{},{},{},{},{}",
            series.figure_id,
            series.mu_gev,
            series.alpha,
            series.beta,
            sig12(p.mass_log10_gev),
            sig12(p.value_log10),
            series.unit,
            floor
        )?;
    }
    Ok(())
}

pub fn emit_json<W: Write>(series: &CurveSeries, sink: &mut W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *sink, series)?;
    writeln!(sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logq::PhysicalConstants;

    fn default_model() -> DiscretenessModel {
        DiscretenessModel::with_defaults()
    }

    fn assert_log10_close(actual: f64, expected_linear: f64, tol_log10: f64) {
        assert!(
            (actual - expected_linear.log10()).abs() < tol_log10,
            "log10 {actual} vs expected log10 {}",
            expected_linear.log10()
        );
    }

    #[test]
    fn figure_id_parsing() {
        assert_eq!("1a".parse::<FigureId>().unwrap(), FigureId::Fig1a);
        assert_eq!("fig4".parse::<FigureId>().unwrap(), FigureId::Fig4);
        assert!("9".parse::<FigureId>().is_err());
    }

    #[test]
    fn fig1c_landmarks() {
        let model = default_model();
        let extra = FigureParams::default();
        let at_mu = curve_value_log10(FigureId::Fig1c, &model, &extra, 0.0);
        assert_log10_close(at_mu, 6.19e4, 1e-3);
        let mp_log = model.constants().planck_mass.log10();
        let at_mp = curve_value_log10(FigureId::Fig1c, &model, &extra, mp_log);
        assert_log10_close(at_mp, 2.16e14, 1e-3);
    }

    #[test]
    fn fig4_landmark_and_minimum() {
        let model = default_model();
        let extra = FigureParams::default();
        let mp_log = model.constants().planck_mass.log10();
        let at_mp = curve_value_log10(FigureId::Fig4, &model, &extra, mp_log);
        assert_log10_close(at_mp, 1.35e-3, 1e-3);

        let series = generate_curve(
            FigureId::Fig4,
            &model,
            &MassGrid::default(),
            &extra,
        )
        .unwrap();
        let argmin = series
            .points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.value_log10.total_cmp(&b.1.value_log10))
            .unwrap()
            .0;
        let nearest = series
            .points
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1.mass_log10_gev - mp_log)
                    .abs()
                    .total_cmp(&(b.1.mass_log10_gev - mp_log).abs())
            })
            .unwrap()
            .0;
        assert_eq!(argmin, nearest);
    }

    #[test]
    fn fig1b_peaks_near_planck_mass() {
        let extra = FigureParams::default();
        for mu in [1e-3, 1.0, 1e3, 1e6] {
            let model = DiscretenessModel::from_params(&crate::model::ModelParams {
                mu_gev: mu,
                alpha: 1.0,
                beta: 0.5,
            })
            .unwrap();
            let series =
                generate_curve(FigureId::Fig1b, &model, &MassGrid::default(), &extra).unwrap();
            let mp_log = PhysicalConstants::default().planck_mass.log10();
            let argmax = series
                .points
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.value_log10.total_cmp(&b.1.value_log10))
                .unwrap()
                .0;
            let nearest = series
                .points
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1.mass_log10_gev - mp_log)
                        .abs()
                        .total_cmp(&(b.1.mass_log10_gev - mp_log).abs())
                })
                .unwrap()
                .0;
            assert_eq!(argmax, nearest, "mu = {mu}");
        }
    }

    #[test]
    fn points_match_bounds_module() {
        let model = default_model();
        let extra = FigureParams::default();
        let series =
            generate_curve(FigureId::Fig1a, &model, &MassGrid::default(), &extra).unwrap();
        for p in series.points.iter().step_by(37) {
            let mass = LogQuantity::from_log10(p.mass_log10_gev, Unit::GEV);
            let direct = bounds::min_displacement_independent(&model, mass).log10();
            assert!((p.value_log10 - direct).abs() < 1e-12);
        }
        // monotone mass axis, finite values
        for w in series.points.windows(2) {
            assert!(w[1].mass_log10_gev > w[0].mass_log10_gev);
        }
        assert!(series.points.iter().all(|p| p.value_log10.is_finite()));
    }

    #[test]
    fn fig1b_series_contains_worst_accuracy_landmark() {
        let model = default_model();
        let extra = FigureParams::default();
        let mp_log = model.constants().planck_mass.log10();
        let v = curve_value_log10(FigureId::Fig1b, &model, &extra, mp_log);
        assert!((v - (-9.5434)).abs() < 1e-3, "log10 value {v}");
    }

    #[test]
    fn empty_grid_rejected() {
        let model = default_model();
        let grid = MassGrid {
            min_gev: 1e-6,
            max_gev: 1e25,
            points: 1,
        };
        assert!(matches!(
            generate_curve(FigureId::Fig1a, &model, &grid, &FigureParams::default()),
            Err(SweepError::EmptyGrid(1))
        ));
    }

    #[test]
    fn empty_points_emit_header_only() {
        let series = CurveSeries {
            figure_id: FigureId::Fig1a,
            mu_gev: 1.0,
            alpha: 1.0,
            beta: 0.5,
            unit: ValueUnit::Meter,
            points: vec![],
            floor: None,
        };
        let mut out = Vec::new();
        emit_csv(&series, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_round_trip() {
        let model = default_model();
        let series = generate_curve(
            FigureId::Fig1c,
            &model,
            &MassGrid {
                min_gev: 1e-3,
                max_gev: 1e21,
                points: 25,
            },
            &FigureParams::default(),
        )
        .unwrap();
        let mut out = Vec::new();
        emit_csv(&series, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        for (line, p) in lines.zip(series.points.iter()) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 8);
            assert_eq!(cols[0], "fig1c");
            assert_eq!(cols[1].parse::<f64>().unwrap(), series.mu_gev);
            let mass: f64 = cols[4].parse().unwrap();
            let value: f64 = cols[5].parse().unwrap();
            assert!((mass - p.mass_log10_gev).abs() <= p.mass_log10_gev.abs() * 1e-11 + 1e-11);
            assert!((value - p.value_log10).abs() <= p.value_log10.abs() * 1e-11 + 1e-11);
            assert_eq!(cols[6], "meter");
            assert!(!cols[7].is_empty());
        }
    }

    #[test]
    fn json_round_trip() {
        let model = default_model();
        let series = generate_curve(
            FigureId::Fig4,
            &model,
            &MassGrid {
                min_gev: 1e-3,
                max_gev: 1e21,
                points: 10,
            },
            &FigureParams::default(),
        )
        .unwrap();
        let mut out = Vec::new();
        emit_json(&series, &mut out).unwrap();
        let back: CurveSeries = serde_json::from_slice(&out).unwrap();
        assert_eq!(back, series);
    }
}
