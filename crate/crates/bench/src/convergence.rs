//! Self-convergence of either flow under grid refinement.

use hasimoto_core::ambient::Ambient;
use hasimoto_core::flow_geo::{advance_geo, GeoFlowState};
use hasimoto_core::flow_q::{QIntegrator, QSystem};
use hasimoto_core::frames::reconstruct;
use hasimoto_core::grid::Grid;
use hasimoto_core::params::FlowParams;
use serde::Serialize;

use crate::backend::Backend;
use crate::config::{Command, ExperimentConfig, SystemKind};
use crate::error::{BenchError, Result};
use crate::profiles::initial_profile;
use crate::report::{Check, Report};
use crate::with_backend;

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceDetails {
    pub backend: String,
    pub system: SystemKind,
    pub m: Vec<usize>,
    pub differences: Vec<f64>,
    pub ratios: Vec<f64>,
    pub orders: Vec<f64>,
}

/// Final state at `horizon` as flat per-node vectors.
fn final_state<M: Backend>(m: &M, cfg: &ExperimentConfig, grid: Grid, params: &FlowParams) -> Result<Vec<Vec<f64>>> {
    let q0 = initial_profile(&cfg.initial, grid, m.complex_dim())?;
    match cfg.system {
        SystemKind::Geo => {
            let (curve, _) = reconstruct(m, &q0, &m.origin(), &m.origin_frame())?;
            let end = advance_geo(m, &GeoFlowState::new(curve), params, cfg.horizon, cfg.dt.geo(&grid, params), |_| {})?;
            Ok(end.curve.points.iter().map(Ambient::to_flat).collect())
        }
        SystemKind::Q => {
            let steps = (cfg.horizon / cfg.dt.q(&grid)).ceil().max(1.0) as usize;
            let integrator = QIntegrator::new(QSystem::new(m.q_variant(), *params)?, grid, cfg.horizon / steps as f64)?;
            let q = integrator.advance(&q0, steps)?;
            Ok(q.q.iter().map(|v| v.iter().flat_map(|z| [z.re, z.im]).collect()).collect())
        }
    }
}

/// Largest nodewise gap between a coarse state and the fine state at shared nodes.
fn coarse_gap(coarse: &[Vec<f64>], fine: &[Vec<f64>]) -> f64 {
    coarse
        .iter()
        .enumerate()
        .map(|(i, a)| a.iter().zip(&fine[2 * i]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

pub fn cmd_convergence(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.levels < 3 {
        return Err(BenchError::Config(format!("convergence needs at least 3 levels, got {}", cfg.levels)));
    }
    let params = cfg.params.flow_params()?;
    let spec = &cfg.backend;
    let grids = cfg.grids();
    let states = grids
        .iter()
        .map(|g| with_backend!(spec, m => final_state(&m, cfg, *g, &params)))
        .collect::<Result<Vec<_>>>()?;
    let differences: Vec<f64> = states.windows(2).map(|w| coarse_gap(&w[0], &w[1])).collect();
    let ratios: Vec<f64> = differences.windows(2).map(|w| w[0] / w[1]).collect();
    let orders = ratios.iter().map(|r| r.log2()).collect();
    let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let at_roundoff = differences.iter().all(|d| *d <= 1e-13);
    let checks = vec![
        Check::holds("convergence.finite", differences.iter().all(|d| d.is_finite())),
        if at_roundoff {
            Check::holds("convergence.ratio", true)
        } else {
            Check::at_least("convergence.ratio", worst, cfg.tolerances.min_ratio)
        },
    ];
    let details = ConvergenceDetails {
        backend: spec.to_string(),
        system: cfg.system,
        m: grids.iter().map(|g| g.m).collect(),
        differences,
        ratios,
        orders,
    };
    Report::new(Command::Convergence, cfg, checks, details)
}
