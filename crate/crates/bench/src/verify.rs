//! Curvature identities, closed forms, contraction, specialization
//! agreements, block identity and roundtrip checks.

use std::collections::BTreeMap;

use hasimoto_core::flow_q::{QSystem, QVariant};
use hasimoto_core::frames::{build_frame, hasimoto_transform, reconstruct, ComplexProfile, FramedCurve};
use hasimoto_core::geometry::{coordinates, from_coordinates, KahlerManifold};
use hasimoto_core::grid::Grid;
use hasimoto_core::params::FlowParams;
use hasimoto_core::tensor::{
    contract, curvature_arrays, identity_report, s_const_k, s_from_frame, s_grassmann, CurvatureArrays, IdentityReport,
    STensorField, Tensor4, FRAME_TOL,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::backend::{Backend, BackendSpec};
use crate::config::{Command, ExperimentConfig, InitialSpec};
use crate::error::Result;
use crate::profiles::random_smooth;
use crate::report::{Check, Report};
use crate::with_backend;

#[derive(Clone, Debug, Default, Serialize)]
pub struct BackendDetails {
    pub identities_frame: BTreeMap<&'static str, f64>,
    pub identities_closed_form: BTreeMap<&'static str, f64>,
    pub closed_form_agreement: f64,
    pub transport_deviation: Vec<f64>,
    pub contraction: f64,
    pub block_identity: Vec<f64>,
    pub roundtrip: Vec<f64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyDetails {
    pub backends: BTreeMap<String, BackendDetails>,
    pub specialization: BTreeMap<&'static str, f64>,
    pub injected: Option<BTreeMap<&'static str, f64>>,
}

fn curve_seed(cfg: &ExperimentConfig) -> (u64, f64) {
    match cfg.initial {
        InitialSpec::RandomSmooth { seed, amplitude } => (seed, amplitude),
        _ => (cfg.seed, 0.5),
    }
}

/// Smooth test curve and its reconstruction frame, from seeded random data.
pub fn test_curve<M: KahlerManifold>(
    m: &M,
    grid: Grid,
    seed: u64,
    amplitude: f64,
) -> Result<FramedCurve<M::Elem>> {
    let q = random_smooth(grid, m.complex_dim(), seed, amplitude)?;
    Ok(reconstruct(m, &q, &m.origin(), &m.origin_frame())?)
}

fn ratios(errors: &[f64]) -> f64 {
    errors.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min)
}

fn report_map(r: &IdentityReport) -> BTreeMap<&'static str, f64> {
    r.checks.iter().map(|c| (c.name, c.max_violation)).collect()
}

fn random_c(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// All per-backend checks.
pub fn verify_backend<M: Backend>(m: &M, label: &str, exact_closed_form: bool, cfg: &ExperimentConfig) -> Result<(Vec<Check>, BackendDetails)> {
    let tol = cfg.tolerances;
    let (seed, amplitude) = curve_seed(cfg);
    let grids: Vec<Grid> = {
        let mut g = vec![cfg.grid];
        g.push(g[0].refined());
        g.push(g[1].refined());
        g
    };
    let mut checks = vec![];
    let mut d = BackendDetails::default();
    let (curve, frame) = test_curve(m, cfg.grid, seed, amplitude)?;
    let stride = (curve.points.len() / 16).max(1);

    let reports = (0..curve.points.len())
        .step_by(stride)
        .map(|i| Ok(identity_report(&curvature_arrays(m, &curve.points[i], &frame.frames[i], FRAME_TOL)?)))
        .collect::<Result<Vec<_>>>()?;
    d.identities_frame = report_map(&IdentityReport::merge(&reports));
    let closed = m.closed_form_s();
    d.identities_closed_form = report_map(&identity_report(&CurvatureArrays::from_s(closed.clone())));
    let closed_tol = if exact_closed_form { 0.0 } else { tol.identity };
    for (name, v) in &d.identities_frame {
        checks.push(Check::at_most(format!("{label}.identity.{name}"), *v, tol.identity));
    }
    for (name, v) in &d.identities_closed_form {
        checks.push(Check::at_most(format!("{label}.closed_form_identity.{name}"), *v, closed_tol));
    }

    // Closed form in lifted frames (or any parallel frame when S is frame-free).
    let based = match m.lift_frames(&curve) {
        Some(f) => f?,
        None => curve.points.iter().cloned().zip(frame.frames.iter().cloned()).collect(),
    };
    d.closed_form_agreement = based
        .iter()
        .map(|(p, f)| Ok(s_from_frame(m, p, f, FRAME_TOL)?.max_diff(&closed)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::at_most(format!("{label}.closed_form.agreement"), d.closed_form_agreement, tol.closed_form));

    // Deviation of S in transported frames, and the roundtrip / block identity.
    for g in &grids {
        let (c, _) = test_curve(m, *g, seed, amplitude)?;
        let f = build_frame(m, &c, &m.origin_frame())?;
        let dev = c
            .points
            .iter()
            .zip(&f.frames)
            .map(|(p, e)| Ok(s_from_frame(m, p, e, FRAME_TOL)?.max_diff(&closed)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        d.transport_deviation.push(dev);
        let q = hasimoto_transform(m, &c, &f)?;
        let (back, _) = reconstruct(m, &q, &c.u_inf, &m.origin_frame())?;
        d.roundtrip.push(c.max_distance(&back));
        if let Some(lq) = m.lift_q(&c) {
            d.block_identity.push(lq?.max_diff(&q));
        }
    }
    if d.transport_deviation.last().copied().unwrap_or(0.0) <= tol.closed_form {
        checks.push(Check::at_most(format!("{label}.closed_form.transport"), d.transport_deviation[2], tol.closed_form));
    } else {
        checks.push(Check::at_least(format!("{label}.closed_form.transport_ratio"), ratios(&d.transport_deviation), tol.min_ratio));
    }
    checks.push(Check::at_least(format!("{label}.roundtrip.ratio"), ratios(&d.roundtrip), tol.min_ratio));
    if !d.block_identity.is_empty() {
        checks.push(Check::at_least(format!("{label}.block_identity.ratio"), ratios(&d.block_identity), tol.min_ratio));
    }

    // Contraction against the curvature operator on random triples.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = m.complex_dim();
    let mut s_cache: BTreeMap<usize, Tensor4> = BTreeMap::new();
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.contraction_triples {
        let i = rng.gen_range(0..curve.points.len());
        let (p, f) = (&curve.points[i], &frame.frames[i]);
        if let std::collections::btree_map::Entry::Vacant(e) = s_cache.entry(i) {
            e.insert(s_from_frame(m, p, f, FRAME_TOL)?);
        }
        let (u, v, w) = (random_c(&mut rng, n), random_c(&mut rng, n), random_c(&mut rng, n));
        let lhs = contract(&s_cache[&i], &u, &v, &w)?;
        let r = m.curvature(p, &from_coordinates(m, p, f, &u), &from_coordinates(m, p, f, &v), &from_coordinates(m, p, f, &w));
        let rhs = coordinates(m, p, f, &r);
        worst = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(worst, f64::max);
    }
    d.contraction = worst;
    checks.push(Check::at_most(format!("{label}.contraction"), worst, tol.contraction));
    Ok((checks, d))
}

fn random_params(rng: &mut ChaCha8Rng) -> Result<FlowParams> {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    Ok(FlowParams::new(
        sign * rng.gen_range(0.5..1.5),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )?)
}

fn relative_gap(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let diff = a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let scale = a.iter().flatten().chain(b.iter().flatten()).map(|z| z.norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Worst relative gap between the nonlinear parts of two systems over
/// `count` random profiles.
fn specialization_gap(
    cfg: &ExperimentConfig,
    salt: u64,
    n: usize,
    pair: impl Fn(&mut ChaCha8Rng, FlowParams) -> (QVariant, QVariant),
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9).wrapping_add(salt));
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.random_profiles {
        let params = random_params(&mut rng)?;
        let (va, vb) = pair(&mut rng, params);
        let q: ComplexProfile = random_smooth(cfg.grid, n, rng.gen(), 0.5)?;
        let a = QSystem::new(va, params)?.nonlinear(&q)?;
        let b = QSystem::new(vb, params)?.nonlinear(&q)?;
        worst = worst.max(relative_gap(&a, &b));
    }
    Ok(worst)
}

pub fn specialization_checks(cfg: &ExperimentConfig) -> Result<(Vec<Check>, BTreeMap<&'static str, f64>)> {
    let m = cfg.grid.m;
    let constant = |s: Tensor4| QVariant::Generic(STensorField::constant(s, m));
    let mut out = BTreeMap::new();
    out.insert(
        "generic_vs_riemann",
        specialization_gap(cfg, 1, 1, |rng, _| {
            let kappa = rng.gen_range(-3.0..3.0);
            (
                constant(Tensor4::from_fn(1, |_, _, _, _| Complex64::new(0.5 * kappa, 0.0))),
                QVariant::Riemann { kappa },
            )
        })?,
    );
    out.insert(
        "generic_vs_constk",
        specialization_gap(cfg, 2, 3, |rng, _| {
            let k = rng.gen_range(-4.0..4.0);
            (constant(s_const_k(3, k)), QVariant::ConstK { n: 3, k })
        })?,
    );
    out.insert(
        "grassmann_vs_constk",
        specialization_gap(cfg, 3, 3, |_, _| (QVariant::Grassmann { k0: 1, m0: 3 }, QVariant::ConstK { n: 3, k: 4.0 }))?,
    );
    out.insert(
        "grassmann_vs_riemann",
        specialization_gap(cfg, 4, 1, |_, _| (QVariant::Grassmann { k0: 1, m0: 1 }, QVariant::Riemann { kappa: 4.0 }))?,
    );
    out.insert(
        "generic_vs_grassmann",
        specialization_gap(cfg, 5, 4, |_, _| (constant(s_grassmann(2, 2)), QVariant::Grassmann { k0: 2, m0: 2 }))?,
    );
    let checks = out
        .iter()
        .map(|(k, v)| Check::at_most(format!("specialization.{k}"), *v, cfg.tolerances.specialization))
        .collect();
    Ok((checks, out))
}

/// Identity suite on a closed form with one slot perturbed by `eps`.
pub fn injected_checks(cfg: &ExperimentConfig, eps: f64) -> (Vec<Check>, BTreeMap<&'static str, f64>) {
    let mut s = s_const_k(3, 4.0);
    s[[0, 0, 1, 2]] += Complex64::new(eps, 0.0);
    let map = report_map(&identity_report(&CurvatureArrays::from_s(s)));
    let checks = map
        .iter()
        .map(|(k, v)| Check::at_most(format!("injected.{k}"), *v, cfg.tolerances.identity))
        .collect();
    (checks, map)
}

pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut checks = vec![];
    let mut details = VerifyDetails::default();
    for spec in &cfg.verify_backends {
        let label = spec.to_string();
        let exact = matches!(spec, BackendSpec::Grassmann { .. });
        let (c, d) = with_backend!(spec, m => verify_backend(&m, &label, exact, cfg))?;
        checks.extend(c);
        details.backends.insert(label, d);
    }
    let (c, s) = specialization_checks(cfg)?;
    checks.extend(c);
    details.specialization = s;
    if let Some(eps) = cfg.perturbation {
        let (c, map) = injected_checks(cfg, eps);
        checks.extend(c);
        details.injected = Some(map);
    }
    Report::new(Command::Verify, cfg, checks, details)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hasimoto_core::geometry::Sphere2;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            grid: Grid::new(8.0, 65).unwrap(),
            random_profiles: 3,
            contraction_triples: 50,
            ..ExperimentConfig::default_for(Command::Verify)
        }
    }

    #[test]
    fn sphere_backend_passes_every_check() {
        let (checks, d) = verify_backend(&Sphere2, "S2", false, &small()).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{:?}", checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        assert_eq!(d.roundtrip.len(), 3);
        assert!(d.block_identity.is_empty());
    }

    #[test]
    fn specialization_gaps_are_round_off() {
        let (checks, gaps) = specialization_checks(&small()).unwrap();
        assert_eq!(gaps.len(), 5);
        assert!(checks.iter().all(|c| c.passed));
    }

    #[test]
    fn injected_perturbation_names_the_broken_identities() {
        let (checks, map) = injected_checks(&small(), 1e-3);
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"injected.tsu3"));
        assert!((map["tsu3"] - 1e-3).abs() < 1e-12);
        let (clean, _) = injected_checks(&small(), 0.0);
        assert!(clean.iter().all(|c| c.passed));
    }

    #[test]
    fn ratios_take_the_worst_refinement() {
        assert_eq!(ratios(&[16.0, 4.0, 2.0]), 2.0);
    }
}
