//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;

use hasimoto_bench::backend::BackendSpec;
use hasimoto_bench::config::{Command, ExperimentConfig, InitialSpec, ParamSpec};
use hasimoto_bench::equiv::{equivalence_level, EquivLevel};
use hasimoto_bench::verify::{specialization_checks, verify_backend, BackendDetails};
use hasimoto_bench::{with_backend, Result};
use hasimoto_core::flow_q::{gauge_apply, gauge_evolve, GaugeState, QIntegrator, QSystem, QVariant};
use hasimoto_core::grid::Grid;
use hasimoto_core::params::FlowParams;
use hasimoto_core::profiles::gaussian_envelope;
use nalgebra::DMatrix;
use num_complex::Complex64;

struct Outcome {
    passed: bool,
    summary: String,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Self { passed, summary: summary.into() }
    }
}

fn g(n0: usize, k0: usize) -> BackendSpec {
    BackendSpec::Grassmann { n0, k0 }
}

fn ratios(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[0] / w[1]).collect()
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

type Verified = BTreeMap<String, (BackendDetails, bool)>;

/// Per-backend verification on the default verify configuration, keyed by label.
/// The flag records whether every frame-identity check passed.
fn verified(cfg: &ExperimentConfig) -> Result<Verified> {
    let mut out = BTreeMap::new();
    for spec in [BackendSpec::Sphere2, g(2, 1), g(3, 1), g(4, 2), BackendSpec::ConstK { n: 3, k: 4.0 }] {
        let label = spec.to_string();
        let exact = spec.is_grassmann();
        let (checks, details) = with_backend!(&spec, m => verify_backend(&m, &label, exact, cfg))?;
        let identities_ok = checks.iter().filter(|c| c.name.contains("identity.")).all(|c| c.passed);
        out.insert(label, (details, identities_ok));
    }
    Ok(out)
}

fn identities(v: &Verified) -> Outcome {
    let labels = ["G(2,1)", "G(3,1)", "G(4,2)", "ConstK(n=3,K=4)"];
    let mut worst: f64 = 0.0;
    let mut exact = true;
    let mut ok = true;
    for l in labels {
        let (d, passed) = &v[l];
        ok &= passed;
        worst = d.identities_frame.values().copied().fold(worst, f64::max);
        exact &= d.identities_closed_form.values().all(|x| *x == 0.0);
    }
    Outcome::new(ok && worst <= 1e-10 && exact, format!("max frame violation {worst:.2e}, closed forms exact: {exact}"))
}

fn closed_form(v: &Verified) -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for l in ["G(2,1)", "G(3,1)", "G(4,2)"] {
        let d = &v[l].0;
        let dev = &d.transport_deviation;
        let along = dev.iter().all(|x| *x <= 1e-10) || ratios(dev).iter().all(|r| *r >= 3.0);
        ok &= d.closed_form_agreement <= 1e-10 && along;
        parts.push(format!("{l} lift {:.2e} transported [{}]", d.closed_form_agreement, fmt(dev)));
    }
    Outcome::new(ok, parts.join("; "))
}

fn contraction(v: &Verified) -> Outcome {
    let worst = v.values().map(|(d, _)| d.contraction).fold(0.0, f64::max);
    Outcome::new(worst <= 1e-10, format!("max deviation {worst:.2e} over 1000 triples on {} backends", v.len()))
}

fn specialization(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (checks, gaps) = specialization_checks(cfg)?;
    let worst = gaps.values().copied().fold(0.0, f64::max);
    Ok(Outcome::new(
        checks.iter().all(|c| c.passed),
        format!("max relative gap {worst:.2e} over {} cases x {} profiles", gaps.len(), cfg.random_profiles),
    ))
}

fn block_identity(v: &Verified) -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for l in ["G(3,1)", "G(4,2)"] {
        let e = &v[l].0.block_identity;
        let r = ratios(e);
        ok &= e.len() == 3 && r.iter().all(|x| *x >= 3.0);
        parts.push(format!("{l} errors [{}] ratios [{}]", fmt(e), fmt(&r)));
    }
    Outcome::new(ok, parts.join("; "))
}

fn roundtrip(v: &Verified) -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for l in ["S2", "G(2,1)", "G(3,1)", "G(4,2)"] {
        let r = ratios(&v[l].0.roundtrip);
        ok &= r.iter().all(|x| (3.0..=5.0).contains(x));
        parts.push(format!("{l} [{}]", fmt(&r)));
    }
    Outcome::new(ok, format!("ratios {}", parts.join(", ")))
}

/// Three-level equivalence runs on G(2,1) and G(3,1) for gamma in {0, -1/8}.
fn equivalence_runs() -> Result<Vec<(String, Vec<EquivLevel>)>> {
    let mut out = vec![];
    for spec in [g(2, 1), g(3, 1)] {
        for gamma in [0.0, -0.125] {
            let mut cfg = ExperimentConfig::default_for(Command::Equiv);
            cfg.backend = spec.clone();
            cfg.params = ParamSpec::Energy { alpha: 1.0, beta: 1.0, gamma };
            cfg.initial = InitialSpec::GaussianEnvelope { amplitude: 0.3, width: 3.0, carrier: 0.5 };
            let params = cfg.params.flow_params()?;
            let levels = cfg
                .grids()
                .into_iter()
                .map(|grid| with_backend!(&spec, m => equivalence_level(&m, &spec, &cfg, grid, &params)))
                .collect::<Result<Vec<_>>>()?;
            out.push((format!("{spec} gamma={gamma}"), levels));
        }
    }
    Ok(out)
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn equivalence(runs: &[(String, Vec<EquivLevel>)]) -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for (label, levels) in runs {
        let d: Vec<f64> = levels.iter().map(|l| l.modulus_distance).collect();
        let gauge = levels.iter().filter_map(|l| l.gauge_modulus_defect).fold(0.0, f64::max);
        ok &= decreasing(&d) && d[2] <= 1e-2 && gauge <= 1e-12;
        parts.push(format!("{label} [{}]", fmt(&d)));
    }
    Outcome::new(ok, parts.join("; "))
}

fn energy(runs: &[(String, Vec<EquivLevel>)]) -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for (label, levels) in runs {
        let d: Vec<f64> = levels.iter().map(|l| l.energy_drift).collect();
        ok &= decreasing(&d) && d[2] <= 1e-3;
        parts.push(format!("{label} [{}]", fmt(&d)));
    }
    Outcome::new(ok, parts.join("; "))
}

fn identity_defect(s: &GaugeState) -> f64 {
    let y = &s.y - DMatrix::<Complex64>::identity(s.y.nrows(), s.y.ncols());
    let z = &s.z - DMatrix::<Complex64>::identity(s.z.nrows(), s.z.ncols());
    y.norm().max(z.norm())
}

/// 1000 coupled steps of the transformed system and the gauge.
/// Returns (identity defect, unitarity defect, node-wise trace defect).
fn gauge_run(k0: usize, m0: usize, gamma: f64) -> Result<(f64, f64, f64)> {
    let grid = Grid::new(20.0, 129)?;
    let params = FlowParams::from_energy(1.0, 1.0, gamma)?;
    let dt = 0.05 * grid.dx().powi(2);
    let integrator = QIntegrator::new(QSystem::new(QVariant::Grassmann { k0, m0 }, params)?, grid, dt)?;
    let mut q = gaussian_envelope(grid, k0 * m0, 0.3, 3.0, 0.5)?;
    let mut gauge = GaugeState::identity(k0, m0);
    let (mut unitarity, mut trace): (f64, f64) = (0.0, 0.0);
    for step in 1..=1000 {
        let (next, mid) = integrator.step_with_midpoint(&q)?;
        gauge = gauge_evolve(&gauge, &mid, k0, m0, &params, dt)?;
        q = next;
        unitarity = unitarity.max(gauge.unitarity_defect());
        if step % 100 == 0 {
            let p = gauge_apply(&gauge, &q)?;
            for (u, v) in q.q.iter().zip(&p.q) {
                let tu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
                let tv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                trace = trace.max((tu - tv).abs());
            }
        }
    }
    Ok((identity_defect(&gauge), unitarity, trace))
}

fn gauge() -> Result<Outcome> {
    let (trivial, ..) = gauge_run(1, 2, -0.125)?;
    let (id_31, u_31, t_31) = gauge_run(1, 2, 0.0)?;
    let (id_42, u_42, t_42) = gauge_run(2, 2, 0.0)?;
    let ok = trivial <= 1e-14 && id_31 > 1e-6 && id_42 > 1e-6 && u_31.max(u_42) <= 1e-10 && t_31.max(t_42) <= 1e-12;
    Ok(Outcome::new(
        ok,
        format!(
            "identity defect at b=0 {trivial:.2e}; general case unitarity {:.2e}, trace {:.2e}",
            u_31.max(u_42),
            t_31.max(t_42)
        ),
    ))
}

fn main() -> ExitCode {
    let report = |n: usize, name: &str, outcome: Result<Outcome>| -> bool {
        let (passed, summary) = match outcome {
            Ok(o) => (o.passed, o.summary),
            Err(e) => (false, format!("error: {e}")),
        };
        println!("criterion {n} {name}: {} ({summary})", if passed { "PASS" } else { "FAIL" });
        passed
    };
    let cfg = ExperimentConfig::default_for(Command::Verify);
    let mut all = true;
    match verified(&cfg) {
        Ok(v) => {
            all &= report(1, "curvature identities", Ok(identities(&v)));
            all &= report(2, "closed-form agreement", Ok(closed_form(&v)));
            all &= report(3, "contraction oracle", Ok(contraction(&v)));
            all &= report(4, "specialization equalities", specialization(&cfg));
            all &= report(5, "block identity", Ok(block_identity(&v)));
            all &= report(6, "roundtrip", Ok(roundtrip(&v)));
        }
        Err(e) => {
            all = false;
            for (n, name) in [(1, "curvature identities"), (2, "closed-form agreement"), (3, "contraction oracle")] {
                println!("criterion {n} {name}: FAIL (error: {e})");
            }
            report(4, "specialization equalities", specialization(&cfg));
            for (n, name) in [(5, "block identity"), (6, "roundtrip")] {
                println!("criterion {n} {name}: FAIL (error: {e})");
            }
        }
    }
    match equivalence_runs() {
        Ok(runs) => {
            all &= report(7, "equivalence", Ok(equivalence(&runs)));
            all &= report(8, "energy conservation", Ok(energy(&runs)));
        }
        Err(e) => {
            println!("criterion 7 equivalence: FAIL (error: {e})");
            println!("criterion 8 energy conservation: FAIL (error: {e})");
            all = false;
        }
    }
    all &= report(9, "gauge correctness", gauge());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
