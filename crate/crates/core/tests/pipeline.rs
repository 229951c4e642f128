//! End-to-end checks through the public API: curve reconstruction, frames,
//! the transformed profile, both flows and serialization.

use hasimoto_core::flow_geo::{advance_geo, energy, stable_dt, GeoFlowState};
use hasimoto_core::flow_q::{QIntegrator, QSystem, QVariant};
use hasimoto_core::frames::{build_frame, hasimoto_transform, reconstruct, ComplexProfile, ProfileDocument};
use hasimoto_core::geometry::{ConstK, Grassmann, KahlerManifold, Sphere2};
use hasimoto_core::grid::Grid;
use hasimoto_core::params::FlowParams;
use hasimoto_core::profiles::gaussian_envelope;
use hasimoto_core::tensor::{s_const_k, s_from_frame, s_grassmann, FRAME_TOL};

/// Sup error of transform(reconstruct(q)) against q.
fn roundtrip_error<M: KahlerManifold>(m: &M, grid: Grid) -> f64 {
    let q = gaussian_envelope(grid, m.complex_dim(), 0.4, 1.5, 0.5).unwrap();
    let (curve, _) = reconstruct(m, &q, &m.origin(), &m.origin_frame()).unwrap();
    assert!(curve.constraint_violation(m) < 1e-12);
    let frame = build_frame(m, &curve, &m.origin_frame()).unwrap();
    hasimoto_transform(m, &curve, &frame).unwrap().max_diff(&q)
}

fn roundtrip_ratio<M: KahlerManifold>(m: &M) -> f64 {
    let g = Grid::new(10.0, 129).unwrap();
    roundtrip_error(m, g) / roundtrip_error(m, g.refined())
}

#[test]
fn transform_inverts_reconstruction_at_second_order() {
    for r in [
        roundtrip_ratio(&Sphere2),
        roundtrip_ratio(&Grassmann::<3>::new(1).unwrap()),
        roundtrip_ratio(&Grassmann::<4>::new(2).unwrap()),
        roundtrip_ratio(&ConstK::<3>::new(2.0).unwrap()),
    ] {
        assert!((3.5..4.5).contains(&r), "ratio {r}");
    }
}

#[test]
fn parallel_frames_see_the_closed_form_tensor() {
    let g = Grid::new(10.0, 129).unwrap();
    let gr = Grassmann::<4>::new(2).unwrap();
    let q = gaussian_envelope(g, 4, 0.4, 1.5, 0.5).unwrap();
    let (curve, frame) = reconstruct(&gr, &q, &gr.origin(), &gr.origin_frame()).unwrap();
    let closed = s_grassmann(2, 2);
    for i in (0..g.m).step_by(16) {
        let s = s_from_frame(&gr, &curve.points[i], &frame.frames[i], FRAME_TOL).unwrap();
        assert!(s.max_diff(&closed) < 1e-10);
    }
    let ck = ConstK::<3>::new(-1.5).unwrap();
    let q = gaussian_envelope(g, 2, 0.4, 1.5, 0.5).unwrap();
    let (curve, frame) = reconstruct(&ck, &q, &ck.origin(), &ck.origin_frame()).unwrap();
    let s = s_from_frame(&ck, &curve.points[64], &frame.frames[64], FRAME_TOL).unwrap();
    assert!(s.max_diff(&s_const_k(2, -1.5)) < 1e-10);
}

#[test]
fn sphere_flow_tracks_the_transformed_system() {
    let grid = Grid::new(20.0, 129).unwrap();
    let params = FlowParams::from_energy(1.0, 1.0, 0.0).unwrap();
    let data = gaussian_envelope(grid, 1, 0.3, 3.0, 0.5).unwrap();
    let (curve, _) = reconstruct(&Sphere2, &data, &Sphere2.origin(), &Sphere2.origin_frame()).unwrap();
    let q0 = hasimoto_transform(&Sphere2, &curve, &build_frame(&Sphere2, &curve, &Sphere2.origin_frame()).unwrap()).unwrap();
    let e0 = energy(&Sphere2, &curve, &params).unwrap();
    let geo = advance_geo(&Sphere2, &GeoFlowState::new(curve), &params, 0.05, stable_dt(&grid, &params), |_| {}).unwrap();

    let it = QIntegrator::new(QSystem::new(QVariant::Riemann { kappa: 1.0 }, params).unwrap(), grid, 0.05 / 160.0).unwrap();
    let q = it.advance(&q0, 160).unwrap();
    let frame = build_frame(&Sphere2, &geo.curve, &Sphere2.origin_frame()).unwrap();
    let q_geo = hasimoto_transform(&Sphere2, &geo.curve, &frame).unwrap();
    let moved = q.modulus_distance(&q0).unwrap();
    let gap = q_geo.modulus_distance(&q).unwrap();
    assert!(gap < 0.03 * moved, "gap {gap:e}, moved {moved:e}");
    let e1 = energy(&Sphere2, &geo.curve, &params).unwrap();
    assert!(((e1 - e0) / e0).abs() < 1e-5);
    assert!(geo.curve.constraint_violation(&Sphere2) < 1e-10);
}

#[test]
fn profile_documents_roundtrip_through_json() {
    let grid = Grid::new(8.0, 33).unwrap();
    let gr = Grassmann::<3>::new(1).unwrap();
    let q = gaussian_envelope(grid, 2, 0.2, 1.0, 0.0).unwrap();
    let (curve, _) = reconstruct(&gr, &q, &gr.origin(), &gr.origin_frame()).unwrap();
    let doc = ProfileDocument::new(gr.label(), Some(&curve), Some(&q), Some(0.25)).unwrap();
    let back: ProfileDocument = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.profile().unwrap(), q);
    assert!(back.curve(gr.origin()).unwrap().max_distance(&curve) < 1e-15);
    let only_q = ProfileDocument::new::<f64>("q".into(), None, Some(&q), None).unwrap();
    let p: ComplexProfile = only_q.profile().unwrap();
    assert_eq!(p, q);
}
