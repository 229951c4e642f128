use nalgebra::Vector3;

use super::*;
use crate::geometry::{Grassmann, Sphere2};

fn bump(m: usize, l: f64) -> DiscreteCurve<Vector3<f64>> {
    let grid = Grid::new(l, m).unwrap();
    let points = grid
        .xs()
        .iter()
        .map(|&x| {
            let theta = 0.9 * (-x * x / 2.0).exp();
            let phi = 0.5 * x;
            Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
        })
        .collect();
    DiscreteCurve::new(grid, points, Vector3::z()).unwrap()
}

fn interior_max(a: &[Vector3<f64>], b: &[Vector3<f64>], skip: usize) -> f64 {
    (skip..a.len() - skip).map(|i| (a[i] - b[i]).norm()).fold(0.0, f64::max)
}

#[test]
fn constant_curve_is_stationary() {
    let grid = Grid::new(5.0, 41).unwrap();
    let curve = DiscreteCurve::constant(grid, Vector3::z());
    let p = FlowParams::new(1.0, 2.0, -1.0, 0.5).unwrap();
    let r = rhs_geo(&Sphere2, &curve.points, &p, grid.dx());
    assert!(r.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn geodesic_is_stationary_in_the_interior() {
    let p = FlowParams::new(1.0, 2.0, -1.0, 0.5).unwrap();
    for m in [65, 129, 257] {
        let grid = Grid::new(std::f64::consts::PI, m).unwrap();
        let points: Vec<_> = grid.xs().iter().map(|&x| Vector3::new(x.cos(), x.sin(), 0.0)).collect();
        let r = rhs_geo(&Sphere2, &points, &p, grid.dx());
        // Boundary stencils reach 8 nodes inward through the four derivatives.
        let err = r[12..m - 12].iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-7, "m {m}: {err}");
    }
}

#[test]
fn rhs_is_tangent() {
    let curve = bump(129, 8.0);
    let p = FlowParams::new(1.0, 0.4, 0.9, -1.0).unwrap();
    let r = rhs_geo(&Sphere2, &curve.points, &p, curve.grid.dx());
    for (u, v) in curve.points.iter().zip(&r) {
        assert!(Sphere2.tangent_defect(u, v) < 1e-12);
    }
}

#[test]
fn sphere_intrinsic_matches_extrinsic() {
    let (a, b) = (1.0, 0.2);
    let p = FlowParams::new(a, b, 1.5 * (a - b), 1.0).unwrap();
    let mut errs = vec![];
    for m in [129, 257, 513] {
        let curve = bump(m, 8.0);
        let h = curve.grid.dx();
        let intr = rhs_geo(&Sphere2, &curve.points, &p, h);
        let extr = rhs_sphere_extrinsic(&curve.points, a, b, h);
        let skip = (m - 1) / 8;
        let scale = extr.iter().map(|v| v.norm()).fold(0.0, f64::max);
        errs.push(interior_max(&intr, &extr, skip) / scale);
    }
    assert!(errs[2] < 1e-4, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
}

#[test]
fn great_circle_energy_closed_form() {
    let grid = Grid::new(std::f64::consts::PI, 257).unwrap();
    let points: Vec<_> = grid.xs().iter().map(|&x| Vector3::new(x.cos(), x.sin(), 0.0)).collect();
    let curve = DiscreteCurve::new(grid, points.clone(), points[0]).unwrap();
    let (alpha, beta, gamma) = (1.5, 1.0, -0.25);
    let p = FlowParams::from_energy(alpha, beta, gamma).unwrap();
    let e = energy(&Sphere2, &curve, &p).unwrap();
    let exact = (0.5 * alpha + gamma) * 2.0 * std::f64::consts::PI;
    assert!((e - exact).abs() < 1e-4, "{e} vs {exact}");
}

#[test]
fn energy_requires_hamiltonian_parameters() {
    let curve = bump(65, 8.0);
    let p = FlowParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
    assert!(matches!(energy(&Sphere2, &curve, &p), Err(Error::Config(_))));
}

#[test]
fn step_preserves_constraint_anchors_and_energy() {
    let curve = bump(97, 8.0);
    let p = FlowParams::from_energy(1.0, 1.0, -0.05).unwrap();
    let state = GeoFlowState::new(curve);
    let e0 = energy(&Sphere2, &state.curve, &p).unwrap();
    let dt = stable_dt(&state.curve.grid, &p);
    let out = advance_geo(&Sphere2, &state, &p, 200.0 * dt, dt, |_| {}).unwrap();
    assert!(out.curve.constraint_violation(&Sphere2) < 1e-14);
    assert_eq!(out.curve.points[0], Vector3::z());
    assert_eq!(out.curve.points[96], state.curve.points[96]);
    assert!(out.curve.max_distance(&state.curve) > 1e-4);
    // Dispersive radiation reaching the fixed ends exchanges some energy.
    let e1 = energy(&Sphere2, &out.curve, &p).unwrap();
    assert!(((e1 - e0) / e0).abs() < 5e-4, "{e0} -> {e1}");
}

#[test]
fn grassmann_step_stays_on_manifold() {
    let g = Grassmann::<3>::new(1).unwrap();
    let sphere = bump(65, 8.0);
    // Embed the sphere curve as rank-one projectors (1 + u·σ)/2.
    let to_proj = |u: &Vector3<f64>| {
        use num_complex::Complex64 as C;
        crate::ambient::CMat::<3>::from_fn(|r, c| match (r, c) {
            (0, 0) => C::new(0.5 * (1.0 + u.z), 0.0),
            (1, 1) => C::new(0.5 * (1.0 - u.z), 0.0),
            (0, 1) => C::new(0.5 * u.x, -0.5 * u.y),
            (1, 0) => C::new(0.5 * u.x, 0.5 * u.y),
            _ => C::new(0.0, 0.0),
        })
    };
    let points: Vec<_> = sphere.points.iter().map(to_proj).collect();
    let curve = DiscreteCurve::new(sphere.grid, points, g.origin()).unwrap();
    let p = FlowParams::from_energy(1.0, 1.0, 0.1).unwrap();
    let state = GeoFlowState::new(curve);
    let dt = stable_dt(&state.curve.grid, &p);
    let out = advance_geo(&g, &state, &p, 20.0 * dt, dt, |_| {}).unwrap();
    assert!(out.curve.constraint_violation(&g) < 1e-12);
    assert!((out.t - 20.0 * dt).abs() < 1e-15);
}

#[test]
fn oversized_step_is_rejected() {
    let curve = bump(65, 8.0);
    let p = FlowParams::from_energy(1.0, 1.0, 0.0).unwrap();
    let state = GeoFlowState::new(curve);
    let err = step_geo(&Sphere2, &state, &p, 1e9).unwrap_err();
    assert!(matches!(err, Error::StepRejected { rejections: 10, .. }), "{err:?}");
}
