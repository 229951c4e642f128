//! Unitary gauge `p = z q y` relating the matrix form with integrals from
//! the left end to the form with integrals based at `x = 0`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::kernels::{from_matrix, grassmann_integrals, to_matrix};
use crate::error::{Error, Result};
use crate::frames::ComplexProfile;
use crate::grid::Grid;
use crate::linalg::{expm_skew_hermitian, inv_sqrt_hermitian, unitary_defect};
use crate::params::FlowParams;

type C = Complex64;

/// Node nearest to `x = 0`.
pub fn origin_node(grid: &Grid) -> usize {
    (grid.m - 1) / 2
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeState {
    /// `m0 x m0`, acting on the right.
    pub y: DMatrix<C>,
    /// `k0 x k0`, acting on the left.
    pub z: DMatrix<C>,
    pub t: f64,
}

impl GaugeState {
    pub fn identity(k0: usize, m0: usize) -> Self {
        Self {
            y: DMatrix::identity(m0, m0),
            z: DMatrix::identity(k0, k0),
            t: 0.0,
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitary_defect(&self.y).max(unitary_defect(&self.z))
    }
}

/// `(A, B) = 2b i (∫_{-∞}^0 q*(qq*)_s q, ∫_{-∞}^0 q(q*q)_s q*)`.
pub fn gauge_generators(q: &ComplexProfile, k0: usize, m0: usize, params: &FlowParams) -> Result<(DMatrix<C>, DMatrix<C>)> {
    if q.n() != k0 * m0 {
        return Err(Error::Domain(format!("profile has {} components, expected {}", q.n(), k0 * m0)));
    }
    let o = origin_node(&q.grid);
    let (ia, ib) = grassmann_integrals(q, k0, m0);
    let s = Complex64::new(0.0, 2.0 * params.b);
    let herm = |m: &DMatrix<C>| (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Ok((herm(&ia[o]) * s, herm(&ib[o]) * s))
}

/// Advance `dy/dt = A y`, `dz/dt = z B` by `dt` with generators frozen at
/// the supplied snapshot, using the exact exponential.
pub fn gauge_evolve(gauge: &GaugeState, q: &ComplexProfile, k0: usize, m0: usize, params: &FlowParams, dt: f64) -> Result<GaugeState> {
    let (a, b) = gauge_generators(q, k0, m0, params)?;
    let ey = expm_skew_hermitian(&(a * Complex64::new(dt, 0.0)));
    let ez = expm_skew_hermitian(&(b * Complex64::new(dt, 0.0)));
    Ok(GaugeState {
        y: polar(ey * &gauge.y)?,
        z: polar(&gauge.z * ez)?,
        t: gauge.t + dt,
    })
}

/// Nearest unitary `U (U* U)^{-1/2}`, removing accumulated round-off.
fn polar(u: DMatrix<C>) -> Result<DMatrix<C>> {
    let g = u.adjoint() * &u;
    Ok(u * inv_sqrt_hermitian(&g, 0.5)?)
}

/// `p = z q y` node-wise.
pub fn gauge_apply(gauge: &GaugeState, q: &ComplexProfile) -> Result<ComplexProfile> {
    let (k0, m0) = (gauge.z.nrows(), gauge.y.nrows());
    if q.n() != k0 * m0 {
        return Err(Error::Domain(format!("profile has {} components, expected {}", q.n(), k0 * m0)));
    }
    let out = q
        .q
        .iter()
        .map(|v| from_matrix(&(&gauge.z * to_matrix(v, k0, m0) * &gauge.y)))
        .collect();
    ComplexProfile::new(q.grid, out)
}
