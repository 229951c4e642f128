//! Single evolution with a time series and profile snapshots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hasimoto_core::flow_geo::{advance_geo, energy, GeoFlowState};
use hasimoto_core::flow_q::{QIntegrator, QSystem};
use hasimoto_core::frames::{build_frame, hasimoto_transform, reconstruct, DiscreteCurve, ProfileDocument};
use hasimoto_core::params::FlowParams;
use serde::Serialize;

use crate::backend::Backend;
use crate::config::{Command, ExperimentConfig, SystemKind};
use crate::error::{BenchError, Result};
use crate::profiles::initial_profile;
use crate::report::{to_stable_json, write_text, Check, Report};
use crate::with_backend;

pub const CSV_HEADER: &str = "t,energy,mass,constraint";

#[derive(Clone, Debug, Default, Serialize)]
pub struct Sample {
    pub t: f64,
    pub energy: Option<f64>,
    pub mass: f64,
    pub constraint: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub samples: Vec<Sample>,
    pub snapshots: Vec<ProfileDocument>,
}

impl RunOutput {
    pub fn csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(String::new, number);
        let mut out = format!("{CSV_HEADER}\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{}", number(s.t), opt(s.energy), number(s.mass), opt(s.constraint));
        }
        out
    }

    /// Writes `timeseries.csv`, `snapshots/snapshot_NNN.json` and `run_report.json`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        write_text(&dir.join("timeseries.csv"), &self.csv())?;
        let snap_dir = dir.join("snapshots");
        std::fs::create_dir_all(&snap_dir).map_err(|e| BenchError::io(&snap_dir, e))?;
        for (k, doc) in self.snapshots.iter().enumerate() {
            write_text(&snap_dir.join(format!("snapshot_{k:03}.json")), &to_stable_json(doc))?;
        }
        self.report.write(dir)
    }
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e6)`.
fn number(x: f64) -> String {
    if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn geo_sample<M: Backend>(m: &M, curve: &DiscreteCurve<M::Elem>, t: f64, params: &FlowParams) -> Result<(Sample, ProfileDocument)> {
    let frame = build_frame(m, curve, &m.origin_frame())?;
    let q = hasimoto_transform(m, curve, &frame)?;
    let sample = Sample {
        t,
        energy: if params.is_hamiltonian() { Some(energy(m, curve, params)?) } else { None },
        mass: q.mass(),
        constraint: Some(curve.constraint_violation(m)),
    };
    Ok((sample, ProfileDocument::new(m.label(), Some(curve), Some(&q), Some(t))?))
}

fn run_backend<M: Backend>(m: &M, cfg: &ExperimentConfig, params: &FlowParams) -> Result<(Vec<Sample>, Vec<ProfileDocument>)> {
    let grid = cfg.grid;
    let q0 = initial_profile(&cfg.initial, grid, m.complex_dim())?;
    let interval = cfg.horizon / cfg.samples as f64;
    let mut samples = vec![];
    let mut docs = vec![];
    match cfg.system {
        SystemKind::Geo => {
            let (curve, _) = reconstruct(m, &q0, &m.origin(), &m.origin_frame())?;
            let mut state = GeoFlowState::new(curve);
            let dt = cfg.dt.geo(&grid, params);
            for k in 0..=cfg.samples {
                if k > 0 {
                    state = advance_geo(m, &state, params, interval * k as f64, dt, |_| {})?;
                }
                let (s, d) = geo_sample(m, &state.curve, state.t, params)?;
                samples.push(s);
                docs.push(d);
            }
        }
        SystemKind::Q => {
            let steps = (interval / cfg.dt.q(&grid)).ceil().max(1.0) as usize;
            let integrator = QIntegrator::new(QSystem::new(m.q_variant(), *params)?, grid, interval / steps as f64)?;
            let mut q = q0;
            for k in 0..=cfg.samples {
                if k > 0 {
                    q = integrator.advance(&q, steps)?;
                }
                let t = interval * k as f64;
                samples.push(Sample { t, energy: None, mass: q.mass(), constraint: None });
                docs.push(ProfileDocument::new::<M::Elem>(m.label(), None, Some(&q), Some(t))?);
            }
        }
    }
    Ok((samples, docs))
}

pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let params = cfg.params.flow_params()?;
    let spec = &cfg.backend;
    let (samples, snapshots) = with_backend!(spec, m => run_backend(&m, cfg, &params))?;

    let tol = cfg.tolerances;
    let finite = samples.iter().all(|s| s.mass.is_finite() && s.energy.is_none_or(f64::is_finite));
    let mut checks = vec![Check::holds("run.finite", finite)];
    if let Some(worst) = samples.iter().filter_map(|s| s.constraint).reduce(f64::max) {
        checks.push(Check::at_most("run.constraint", worst, tol.identity));
    }
    if let Some(e0) = samples[0].energy {
        let drift = samples
            .iter()
            .filter_map(|s| s.energy)
            .map(|e| ((e - e0) / e0.abs().max(f64::MIN_POSITIVE)).abs())
            .fold(0.0, f64::max);
        checks.push(Check::at_most("run.energy_drift", drift, tol.energy_drift));
    }
    let details = serde_json::json!({
        "backend": spec.to_string(),
        "system": cfg.system,
        "samples": samples,
    });
    let report = Report::new(Command::Run, cfg, checks, details)?;
    Ok(RunOutput { report, samples, snapshots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::BackendSpec;

    #[test]
    fn numbers_use_exponents_only_at_the_extremes() {
        assert_eq!(number(0.0), "0");
        assert_eq!(number(0.25), "0.25");
        assert_eq!(number(1.5e-12), "1.5e-12");
        assert_eq!(number(f64::from_bits(0x3ff0_0000_0000_0001)).parse::<f64>().unwrap().to_bits(), 0x3ff0_0000_0000_0001);
    }

    #[test]
    fn q_run_leaves_geometric_columns_blank() {
        let mut cfg = ExperimentConfig::default_for(Command::Run);
        cfg.system = SystemKind::Q;
        cfg.backend = BackendSpec::ConstK { n: 2, k: 1.0 };
        cfg.samples = 2;
        let out = cmd_run(&cfg).unwrap();
        let csv = out.csv();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[1].starts_with("0,,") && rows[1].ends_with(','));
        assert_eq!(out.snapshots.len(), 3);
        assert!(out.snapshots[0].points.is_empty());
        assert!(out.report.passed);
    }

    #[test]
    fn geo_run_tracks_all_columns() {
        let mut cfg = ExperimentConfig::default_for(Command::Run);
        cfg.samples = 2;
        cfg.horizon = 0.02;
        let out = cmd_run(&cfg).unwrap();
        assert!(out.samples.iter().all(|s| s.energy.is_some() && s.constraint.unwrap() < 1e-12));
        assert_eq!(out.snapshots[2].t, Some(0.02));
        assert!(out.report.check("run.energy_drift").unwrap().passed);
    }
}
