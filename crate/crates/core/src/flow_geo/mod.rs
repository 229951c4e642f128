//! Geometric flow `u_t = a J∇³u_x + λ J∇u_x + b R(∇u_x,u_x)Ju_x + c R(Ju_x,u_x)∇u_x`
//! integrated directly on the discrete curve.
//!
//! Covariant derivatives are tangent projections of the finite-difference
//! derivatives. Time stepping is classical RK4 in the ambient space with a
//! retraction after every stage. The two outermost nodes at each end are
//! held fixed: on the left at `u_inf`, on the right at their initial values.

use nalgebra::Vector3;

use crate::ambient::Ambient;
use crate::error::{Error, Result};
use crate::frames::DiscreteCurve;
use crate::geometry::KahlerManifold;
use crate::grid::{d1, d2, trapezoid, Grid};
use crate::params::FlowParams;

/// Nodes held fixed at each end.
pub const PINNED: usize = 2;
/// `dt = CFL Δx⁴ / |a|`.
pub const CFL: f64 = 0.2;
/// Successive step halvings before a step is rejected.
pub const MAX_HALVINGS: u32 = 10;
/// Largest ambient displacement of a node accepted in one step.
pub const MAX_INCREMENT: f64 = 0.5;
/// Constraint violation tolerated after a step.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Stable explicit step for the fourth-order term.
pub fn stable_dt(grid: &Grid, params: &FlowParams) -> f64 {
    CFL * grid.dx().powi(4) / params.a.abs()
}

/// `∇_x V = Π_u(∂_x V)` node-wise.
pub fn covariant_dx<M: KahlerManifold>(m: &M, points: &[M::Elem], field: &[M::Elem], h: f64) -> Vec<M::Elem> {
    d1(field, h).iter().zip(points).map(|(v, p)| m.project(p, v)).collect()
}

/// `u_x` and its covariant derivatives up to `∇³u_x`.
pub struct CovariantJet<E> {
    pub ux: Vec<E>,
    pub v1: Vec<E>,
    pub v2: Vec<E>,
    pub v3: Vec<E>,
}

pub fn covariant_jet<M: KahlerManifold>(m: &M, points: &[M::Elem], h: f64) -> CovariantJet<M::Elem> {
    let ux = covariant_dx(m, points, points, h);
    let v1 = covariant_dx(m, points, &ux, h);
    let v2 = covariant_dx(m, points, &v1, h);
    let v3 = covariant_dx(m, points, &v2, h);
    CovariantJet { ux, v1, v2, v3 }
}

fn pinned(i: usize, len: usize) -> bool {
    i < PINNED || i + PINNED >= len
}

/// Right-hand side at every node, zero on the pinned nodes.
pub fn rhs_geo<M: KahlerManifold>(m: &M, points: &[M::Elem], params: &FlowParams, h: f64) -> Vec<M::Elem> {
    let jet = covariant_jet(m, points, h);
    let len = points.len();
    (0..len)
        .map(|i| {
            if pinned(i, len) {
                return M::Elem::zero();
            }
            let p = &points[i];
            let (ux, v1, v3) = (&jet.ux[i], &jet.v1[i], &jet.v3[i]);
            let jux = m.complex_structure(p, ux);
            let out = m.complex_structure(p, &(*v3 * params.a + *v1 * params.lambda))
                + m.curvature(p, v1, ux, &jux) * params.b
                + m.curvature(p, &jux, ux, v1) * params.c;
            m.project(p, &out)
        })
        .collect()
}

/// Extrinsic form on the unit sphere with `λ = 1`, `c = 3(a - b)/2`:
/// `u ∧ (a u_xxxx + u_xx + (5a - b)(u_xx·u_x)u_x + (5a - b)/2 |u_x|² u_xx)`.
pub fn rhs_sphere_extrinsic(points: &[Vector3<f64>], a: f64, b: f64, h: f64) -> Vec<Vector3<f64>> {
    let ux = d1(points, h);
    let uxx = d2(points, h);
    let uxxxx = d2(&uxx, h);
    let k = 5.0 * a - b;
    let len = points.len();
    (0..len)
        .map(|i| {
            if pinned(i, len) {
                return Vector3::zeros();
            }
            let inner = uxxxx[i] * a
                + uxx[i]
                + ux[i] * (k * uxx[i].dot(&ux[i]))
                + uxx[i] * (0.5 * k * ux[i].norm_squared());
            points[i].cross(&inner)
        })
        .collect()
}

/// `E = α/2 ∫h(u_x,u_x) + β/2 ∫h(∇u_x,∇u_x) + γ ∫h(R(u_x,Ju_x)Ju_x,u_x)`.
pub fn energy<M: KahlerManifold>(m: &M, curve: &DiscreteCurve<M::Elem>, params: &FlowParams) -> Result<f64> {
    let w = params
        .energy_weights()
        .ok_or_else(|| Error::Config("energy is defined only for c = 3(a - b)/2".into()))?;
    let h = curve.grid.dx();
    let jet = covariant_jet(m, &curve.points, h);
    let density: Vec<f64> = curve
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (ux, v1) = (&jet.ux[i], &jet.v1[i]);
            let jux = m.complex_structure(p, ux);
            0.5 * w.alpha * m.metric(p, ux, ux)
                + 0.5 * w.beta * m.metric(p, v1, v1)
                + w.gamma * m.metric(p, &m.curvature(p, ux, &jux, &jux), ux)
        })
        .collect();
    Ok(trapezoid(&density, h))
}

/// Curve, time and the fixed right-end values.
#[derive(Clone, Debug, PartialEq)]
pub struct GeoFlowState<E> {
    pub curve: DiscreteCurve<E>,
    pub t: f64,
    pub right_anchor: Vec<E>,
}

impl<E: Ambient> GeoFlowState<E> {
    /// Initial state; the left pinned nodes are snapped to `u_inf`.
    pub fn new(mut curve: DiscreteCurve<E>) -> Self {
        let len = curve.points.len();
        for p in curve.points.iter_mut().take(PINNED) {
            *p = curve.u_inf;
        }
        let right_anchor = curve.points[len - PINNED..].to_vec();
        Self { curve, t: 0.0, right_anchor }
    }
}

fn stage<M: KahlerManifold>(m: &M, base: &[M::Elem], k: &[M::Elem], dt: f64) -> Result<Vec<M::Elem>> {
    base.iter().zip(k).map(|(p, v)| m.retract(p, &(*p + *v * dt))).collect()
}

fn rk4_step<M: KahlerManifold>(m: &M, state: &GeoFlowState<M::Elem>, params: &FlowParams, dt: f64) -> Result<GeoFlowState<M::Elem>> {
    let h = state.curve.grid.dx();
    let u = &state.curve.points;
    let k1 = rhs_geo(m, u, params, h);
    let u2 = stage(m, u, &k1, 0.5 * dt)?;
    let k2 = rhs_geo(m, &u2, params, h);
    let u3 = stage(m, u, &k2, 0.5 * dt)?;
    let k3 = rhs_geo(m, &u3, params, h);
    let u4 = stage(m, u, &k3, dt)?;
    let k4 = rhs_geo(m, &u4, params, h);
    let incr: Vec<M::Elem> = (0..u.len()).map(|i| (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (1.0 / 6.0)).collect();
    let largest = incr.iter().map(|v| v.norm() * dt).fold(0.0, f64::max);
    if !(largest <= MAX_INCREMENT) {
        return Err(Error::Retraction(format!("increment {largest:e} exceeds {MAX_INCREMENT}")));
    }
    let mut points = stage(m, u, &incr, dt)?;
    let len = points.len();
    for p in points.iter_mut().take(PINNED) {
        *p = state.curve.u_inf;
    }
    points[len - PINNED..].copy_from_slice(&state.right_anchor);
    let curve = DiscreteCurve { points, ..state.curve.clone() };
    let defect = curve.constraint_violation(m);
    if !(defect <= CONSTRAINT_TOL) || curve.points.iter().any(|p| !p.to_flat().iter().all(|v| v.is_finite())) {
        return Err(Error::Retraction(format!("constraint violation {defect:e} after step")));
    }
    Ok(GeoFlowState {
        curve,
        t: state.t + dt,
        right_anchor: state.right_anchor.clone(),
    })
}

fn step_halving<M: KahlerManifold>(
    m: &M,
    state: &GeoFlowState<M::Elem>,
    params: &FlowParams,
    dt: f64,
    depth: u32,
) -> Result<GeoFlowState<M::Elem>> {
    match rk4_step(m, state, params, dt) {
        Ok(s) => Ok(s),
        Err(Error::Retraction(reason)) => {
            if depth >= MAX_HALVINGS {
                return Err(Error::StepRejected {
                    t: state.t,
                    rejections: depth as usize,
                    reason,
                });
            }
            let mid = step_halving(m, state, params, 0.5 * dt, depth + 1)?;
            step_halving(m, &mid, params, 0.5 * dt, depth + 1)
        }
        Err(e) => Err(e),
    }
}

/// One step of size `dt`, halved up to [`MAX_HALVINGS`] times when a
/// retraction fails.
pub fn step_geo<M: KahlerManifold>(m: &M, state: &GeoFlowState<M::Elem>, params: &FlowParams, dt: f64) -> Result<GeoFlowState<M::Elem>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    step_halving(m, state, params, dt, 0)
}

/// Advance to `t_end` in equal steps no larger than `dt_max`, calling
/// `observe` after each step.
pub fn advance_geo<M: KahlerManifold>(
    m: &M,
    state: &GeoFlowState<M::Elem>,
    params: &FlowParams,
    t_end: f64,
    dt_max: f64,
    mut observe: impl FnMut(&GeoFlowState<M::Elem>),
) -> Result<GeoFlowState<M::Elem>> {
    let span = t_end - state.t;
    if span <= 0.0 {
        return Ok(state.clone());
    }
    let steps = (span / dt_max).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let mut s = state.clone();
    for _ in 0..steps {
        s = step_geo(m, &s, params, dt)?;
        observe(&s);
    }
    Ok(s)
}

#[cfg(test)]
mod tests;
