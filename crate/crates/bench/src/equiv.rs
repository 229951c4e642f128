//! Geometric flow against the transformed system on matching data.

use hasimoto_core::flow_geo::{advance_geo, energy, GeoFlowState};
use hasimoto_core::flow_q::{gauge_apply, gauge_evolve, GaugeState, QIntegrator, QSystem};
use hasimoto_core::frames::{build_frame, hasimoto_transform, reconstruct, ComplexProfile};
use hasimoto_core::grid::Grid;
use hasimoto_core::params::FlowParams;
use serde::{Deserialize, Serialize};

use crate::backend::{Backend, BackendSpec};
use crate::config::{Command, ExperimentConfig};
use crate::error::{BenchError, Result};
use crate::profiles::initial_profile;
use crate::report::{Check, Report};
use crate::with_backend;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivLevel {
    pub m: usize,
    pub dx: f64,
    pub dt_geo: f64,
    pub dt_q: f64,
    pub modulus_distance: f64,
    pub phase_distance: f64,
    pub energy_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge_modulus_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge_unitarity: Option<f64>,
}

/// Gauge bookkeeping for Grassmannian runs.
struct Gauge {
    k0: usize,
    m0: usize,
    state: GaugeState,
}

/// Both flows on one grid, compared at `cfg.samples` equally spaced times.
pub fn equivalence_level<M: Backend>(m: &M, spec: &BackendSpec, cfg: &ExperimentConfig, grid: Grid, params: &FlowParams) -> Result<EquivLevel> {
    let q_init = initial_profile(&cfg.initial, grid, m.complex_dim())?;
    let (curve, _) = reconstruct(m, &q_init, &m.origin(), &m.origin_frame())?;
    let frame = build_frame(m, &curve, &m.origin_frame())?;
    let mut q = hasimoto_transform(m, &curve, &frame)?;
    let mut geo = GeoFlowState::new(curve);
    let e0 = energy(m, &geo.curve, params)?;

    let dt_geo = cfg.dt.geo(&grid, params);
    let interval = cfg.horizon / cfg.samples as f64;
    let steps = (interval / cfg.dt.q(&grid)).ceil().max(1.0) as usize;
    let dt_q = interval / steps as f64;
    let integrator = QIntegrator::new(QSystem::new(m.q_variant(), *params)?, grid, dt_q)?;
    let mut gauge = match *spec {
        BackendSpec::Grassmann { n0, k0 } => Some(Gauge { k0, m0: n0 - k0, state: GaugeState::identity(k0, n0 - k0) }),
        _ => None,
    };

    let mut level = EquivLevel {
        m: grid.m,
        dx: grid.dx(),
        dt_geo,
        dt_q,
        modulus_distance: 0.0,
        phase_distance: 0.0,
        energy_drift: 0.0,
        gauge_modulus_defect: gauge.as_ref().map(|_| 0.0),
        gauge_unitarity: gauge.as_ref().map(|_| 0.0),
    };
    for k in 1..=cfg.samples {
        let t = interval * k as f64;
        geo = advance_geo(m, &geo, params, t, dt_geo, |_| {})?;
        for _ in 0..steps {
            let (next, mid) = integrator.step_with_midpoint(&q)?;
            if let Some(g) = gauge.as_mut() {
                g.state = gauge_evolve(&g.state, &mid, g.k0, g.m0, params, dt_q)?;
            }
            q = next;
        }
        let f = build_frame(m, &geo.curve, &m.origin_frame())?;
        let q_geo = hasimoto_transform(m, &geo.curve, &f)?;
        level.modulus_distance = level.modulus_distance.max(q_geo.modulus_distance(&q)?);
        level.phase_distance = level.phase_distance.max(q_geo.phase_aligned_distance(&q)?);
        let e = energy(m, &geo.curve, params)?;
        level.energy_drift = level.energy_drift.max(((e - e0) / e0.abs().max(f64::MIN_POSITIVE)).abs());
        if let Some(g) = gauge.as_ref() {
            let p = gauge_apply(&g.state, &q)?;
            let defect = moduli_gap(&q, &p);
            level.gauge_modulus_defect = level.gauge_modulus_defect.map(|d| d.max(defect));
            level.gauge_unitarity = level.gauge_unitarity.map(|d| d.max(g.state.unitarity_defect()));
        }
    }
    Ok(level)
}

fn moduli_gap(a: &ComplexProfile, b: &ComplexProfile) -> f64 {
    a.moduli().iter().zip(b.moduli()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Successive refinement ratios of the modulus distance.
pub fn refinement_ratios(levels: &[EquivLevel]) -> Vec<f64> {
    levels.windows(2).map(|w| w[0].modulus_distance / w[1].modulus_distance).collect()
}

pub fn cmd_equiv(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let params = cfg.params.flow_params()?;
    if !params.is_hamiltonian() {
        return Err(BenchError::Config(format!(
            "equivalence on {} needs c = 3(a - b)/2, got a = {}, b = {}, c = {}",
            cfg.backend, params.a, params.b, params.c
        )));
    }
    let spec = &cfg.backend;
    let levels = cfg
        .grids()
        .into_iter()
        .map(|g| with_backend!(spec, m => equivalence_level(&m, spec, cfg, g, &params)))
        .collect::<Result<Vec<_>>>()?;

    let tol = cfg.tolerances;
    let last = levels.last().expect("at least one level");
    let mut checks = vec![
        Check::at_most("equiv.modulus_distance", last.modulus_distance, tol.equivalence),
        Check::at_most("equiv.energy_drift", last.energy_drift, tol.energy_drift),
    ];
    if levels.len() > 1 {
        let dist: Vec<f64> = levels.iter().map(|l| l.modulus_distance).collect();
        let drift: Vec<f64> = levels.iter().map(|l| l.energy_drift).collect();
        checks.push(Check::holds("equiv.modulus_distance.decreasing", dist.windows(2).all(|w| w[1] < w[0] || w[0] <= 1e-14)));
        checks.push(Check::holds("equiv.energy_drift.decreasing", drift.windows(2).all(|w| w[1] < w[0] || w[0] <= 1e-14)));
    }
    if let (Some(defect), Some(unit)) = (last.gauge_modulus_defect, last.gauge_unitarity) {
        let worst_defect = levels.iter().filter_map(|l| l.gauge_modulus_defect).fold(defect, f64::max);
        let worst_unit = levels.iter().filter_map(|l| l.gauge_unitarity).fold(unit, f64::max);
        checks.push(Check::at_most("equiv.gauge.modulus", worst_defect, tol.gauge_modulus));
        checks.push(Check::at_most("equiv.gauge.unitarity", worst_unit, tol.unitarity));
    }
    Report::new(Command::Equiv, cfg, checks, serde_json::json!({
            "backend": spec.to_string(),
            "levels": levels,
            "ratios": refinement_ratios(&levels),
        }))
}
