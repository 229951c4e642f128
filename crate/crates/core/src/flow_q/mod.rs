//! Evolution of the complex profile `Q` under the transformed systems
//! `i Q_t + (a∂⁴ + λ∂²) Q = N(Q)`.
//!
//! The linear part is discretized with the three- and five-point stencils
//! on the interior nodes under homogeneous Dirichlet data, and integrated by
//! Crank-Nicolson; the nonlinear part is advanced explicitly with a
//! midpoint predictor-corrector, which is second order in time.

mod gauge;
mod kernels;

pub use gauge::{gauge_apply, gauge_evolve, gauge_generators, origin_node, GaugeState};
pub use kernels::{
    from_matrix, grassmann_integrals, nls_deltas, nonlinear_4shro, nonlinear_constk, nonlinear_generic,
    nonlinear_grassmann, nonlinear_mns, nonlinear_riemann, to_matrix,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frames::ComplexProfile;
use crate::params::{DCoeffs, FlowParams};
use crate::tensor::STensorField;

type C = Complex64;

const I: C = Complex64::new(0.0, 1.0);
const ZERO: C = Complex64::new(0.0, 0.0);

pub fn d_coeffs(params: &FlowParams) -> DCoeffs {
    params.d_coeffs()
}

/// Which right-hand side is evolved.
#[derive(Clone, Debug, PartialEq)]
pub enum QVariant {
    /// Generic kernel with a curvature coefficient field.
    Generic(STensorField),
    /// Riemann surface of constant curvature `κ`, `n = 1`.
    Riemann { kappa: f64 },
    /// Constant holomorphic sectional curvature `K` in dimension `n`.
    ConstK { n: usize, k: f64 },
    /// Matrix form on `G(k0 + m0, k0)`.
    Grassmann { k0: usize, m0: usize },
    /// Matrix form with nonlocal integrals based at `x = 0`.
    Mns { k0: usize, m0: usize },
    /// Scalar fourth-order NLS with its own coefficients `(γ1, γ2)`.
    FourthOrderNls { gamma1: f64, gamma2: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct QSystem {
    pub variant: QVariant,
    pub params: FlowParams,
}

impl QSystem {
    pub fn new(variant: QVariant, params: FlowParams) -> Result<Self> {
        match &variant {
            QVariant::Generic(f) if f.is_empty() => return Err(Error::Config("empty S field".into())),
            QVariant::ConstK { n: 0, .. } => return Err(Error::Config("ConstK requires n >= 1".into())),
            QVariant::Grassmann { k0, m0 } | QVariant::Mns { k0, m0 } if *k0 == 0 || *m0 == 0 => {
                return Err(Error::Config("matrix form requires k0, m0 >= 1".into()))
            }
            QVariant::FourthOrderNls { gamma1, .. } if *gamma1 == 0.0 => {
                return Err(Error::Config("fourth-order NLS requires gamma1 != 0".into()))
            }
            _ => {}
        }
        Ok(Self { variant, params })
    }

    /// Number of complex components of `Q`.
    pub fn n(&self) -> usize {
        match &self.variant {
            QVariant::Generic(f) => f.n(),
            QVariant::Riemann { .. } | QVariant::FourthOrderNls { .. } => 1,
            QVariant::ConstK { n, .. } => *n,
            QVariant::Grassmann { k0, m0 } | QVariant::Mns { k0, m0 } => k0 * m0,
        }
    }

    /// `(a, λ)` of the linear operator `a∂⁴ + λ∂²`.
    pub fn linear_coeffs(&self) -> (f64, f64) {
        match &self.variant {
            QVariant::FourthOrderNls { gamma1, .. } => (*gamma1, 1.0),
            _ => (self.params.a, self.params.lambda),
        }
    }

    pub fn check(&self, q: &ComplexProfile) -> Result<()> {
        if q.n() != self.n() {
            return Err(Error::Domain(format!("system has dimension {}, profile has {}", self.n(), q.n())));
        }
        if let QVariant::Generic(f) = &self.variant {
            q.grid.check_len(f.len())?;
        }
        Ok(())
    }

    /// `N(Q)` node-wise.
    pub fn nonlinear(&self, q: &ComplexProfile) -> Result<Vec<Vec<C>>> {
        self.check(q)?;
        let p = &self.params;
        match &self.variant {
            QVariant::Generic(f) => nonlinear_generic(q, f, p),
            QVariant::Riemann { kappa } => nonlinear_riemann(q, *kappa, p),
            QVariant::ConstK { k, .. } => nonlinear_constk(q, *k, p),
            QVariant::Grassmann { k0, m0 } => nonlinear_grassmann(q, *k0, *m0, p),
            QVariant::Mns { k0, m0 } => nonlinear_mns(q, *k0, *m0, p, origin_node(&q.grid)),
            QVariant::FourthOrderNls { gamma1, gamma2 } => nonlinear_4shro(q, *gamma1, *gamma2),
        }
    }

    /// `∂_t Q = i L Q - i N(Q)` with the discrete linear operator; zero at
    /// the two boundary nodes.
    pub fn rhs(&self, q: &ComplexProfile) -> Result<ComplexProfile> {
        let nl = self.nonlinear(q)?;
        let (a, lambda) = self.linear_coeffs();
        let lq = apply_linear(q, a, lambda);
        let m = q.grid.m;
        let out = (0..m)
            .map(|i| {
                if i == 0 || i == m - 1 {
                    vec![ZERO; q.n()]
                } else {
                    lq[i].iter().zip(&nl[i]).map(|(l, n)| I * l - I * n).collect()
                }
            })
            .collect();
        ComplexProfile::new(q.grid, out)
    }
}

pub fn rhs_generic(q: &ComplexProfile, field: &STensorField, params: &FlowParams) -> Result<ComplexProfile> {
    QSystem::new(QVariant::Generic(field.clone()), *params)?.rhs(q)
}

pub fn rhs_riemann(q: &ComplexProfile, kappa: f64, params: &FlowParams) -> Result<ComplexProfile> {
    QSystem::new(QVariant::Riemann { kappa }, *params)?.rhs(q)
}

pub fn rhs_constk(q: &ComplexProfile, k: f64, params: &FlowParams) -> Result<ComplexProfile> {
    QSystem::new(QVariant::ConstK { n: q.n(), k }, *params)?.rhs(q)
}

pub fn rhs_grassmann(q: &ComplexProfile, k0: usize, m0: usize, params: &FlowParams) -> Result<ComplexProfile> {
    QSystem::new(QVariant::Grassmann { k0, m0 }, *params)?.rhs(q)
}

pub fn rhs_mns(q: &ComplexProfile, k0: usize, m0: usize, params: &FlowParams) -> Result<ComplexProfile> {
    QSystem::new(QVariant::Mns { k0, m0 }, *params)?.rhs(q)
}

/// Time derivative of the scalar fourth-order NLS.
pub fn ode_4shro(q: &ComplexProfile, gamma1: f64, gamma2: f64) -> Result<ComplexProfile> {
    let p = FlowParams::new(gamma1, 0.0, 0.0, 1.0)?;
    QSystem::new(QVariant::FourthOrderNls { gamma1, gamma2 }, p)?.rhs(q)
}

/// Stencil weights `(w0, w1, w2)` of `a D4 + λ D2`.
fn linear_band(a: f64, lambda: f64, h: f64) -> [f64; 3] {
    let (h2, h4) = (h * h, h * h * h * h);
    [6.0 * a / h4 - 2.0 * lambda / h2, -4.0 * a / h4 + lambda / h2, a / h4]
}

/// `(a D4 + λ D2) Q` on interior nodes, with zero boundary and ghost values.
fn apply_linear(q: &ComplexProfile, a: f64, lambda: f64) -> Vec<Vec<C>> {
    let m = q.grid.m;
    let w = linear_band(a, lambda, q.grid.dx());
    let at = |i: isize, j: usize| -> C {
        if i <= 0 || i >= m as isize - 1 {
            ZERO
        } else {
            q.q[i as usize][j]
        }
    };
    (0..m)
        .map(|i| {
            (0..q.n())
                .map(|j| {
                    if i == 0 || i == m - 1 {
                        return ZERO;
                    }
                    let i = i as isize;
                    at(i, j) * w[0] + (at(i - 1, j) + at(i + 1, j)) * w[1] + (at(i - 2, j) + at(i + 2, j)) * w[2]
                })
                .collect()
        })
        .collect()
}

/// LU factors of a pentadiagonal matrix, no pivoting.
#[derive(Clone, Debug)]
struct BandedLu {
    n: usize,
    // band[i][k] holds entry (i, i + k - 2)
    band: Vec<[C; 5]>,
}

impl BandedLu {
    /// Factor the symmetric Toeplitz band `diag, off1, off2`.
    fn factor(n: usize, diag: C, off1: C, off2: C) -> Result<Self> {
        let mut band = vec![[off2, off1, diag, off1, off2]; n];
        for k in 0..n {
            let pivot = band[k][2];
            if pivot.norm() < 1e-14 {
                return Err(Error::Config(format!("singular linear operator at row {k}")));
            }
            for i in k + 1..(k + 3).min(n) {
                let l = band[i][k + 2 - i] / pivot;
                band[i][k + 2 - i] = l;
                for j in k + 1..(k + 3).min(n) {
                    let u = band[k][j + 2 - k];
                    band[i][j + 2 - i] -= l * u;
                }
            }
        }
        Ok(Self { n, band })
    }

    fn solve(&self, rhs: &mut [C]) {
        let n = self.n;
        for i in 0..n {
            for j in i.saturating_sub(2)..i {
                let l = self.band[i][j + 2 - i];
                rhs[i] -= l * rhs[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..(i + 3).min(n) {
                let u = self.band[i][j + 2 - i];
                rhs[i] -= u * rhs[j];
            }
            rhs[i] /= self.band[i][2];
        }
    }
}

/// Fixed-step IMEX integrator with cached factorizations.
#[derive(Clone, Debug)]
pub struct QIntegrator {
    pub system: QSystem,
    pub dt: f64,
    grid: crate::grid::Grid,
    lu: BandedLu,
}

impl QIntegrator {
    pub fn new(system: QSystem, grid: crate::grid::Grid, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        let (a, lambda) = system.linear_coeffs();
        let w = linear_band(a, lambda, grid.dx());
        let s = -I * (dt / 2.0);
        Ok(Self {
            lu: BandedLu::factor(grid.m - 2, Complex64::new(1.0, 0.0) + s * w[0], s * w[1], s * w[2])?,
            system,
            dt,
            grid,
        })
    }

    /// Solve `(I - i dt/2 L) X = Q + iθ LQ - i τ N` on the interior.
    fn solve(&self, q: &ComplexProfile, lq: &[Vec<C>], nl: &[Vec<C>], theta: f64, tau: f64) -> Result<ComplexProfile> {
        let (m, n) = (self.grid.m, q.n());
        let mut out = vec![vec![ZERO; n]; m];
        let mut col = vec![ZERO; m - 2];
        for j in 0..n {
            for i in 1..m - 1 {
                col[i - 1] = q.q[i][j] + I * theta * lq[i][j] - I * tau * nl[i][j];
            }
            self.lu.solve(&mut col);
            for i in 1..m - 1 {
                out[i][j] = col[i - 1];
            }
        }
        ComplexProfile::new(self.grid, out)
    }

    /// One step, also returning the midpoint predictor. The predictor is a
    /// backward-Euler half step, which damps unresolved modes instead of
    /// flipping their sign as a Crank-Nicolson predictor would.
    pub fn step_with_midpoint(&self, q: &ComplexProfile) -> Result<(ComplexProfile, ComplexProfile)> {
        self.system.check(q)?;
        self.grid.check_len(q.q.len())?;
        let (a, lambda) = self.system.linear_coeffs();
        let lq = apply_linear(q, a, lambda);
        let n0 = self.system.nonlinear(q)?;
        let mid = self.solve(q, &lq, &n0, 0.0, self.dt / 2.0)?;
        let nm = self.system.nonlinear(&mid)?;
        let next = self.solve(q, &lq, &nm, self.dt / 2.0, self.dt)?;
        if next.q.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::StepRejected {
                t: f64::NAN,
                rejections: 0,
                reason: "non-finite profile".into(),
            });
        }
        Ok((next, mid))
    }

    pub fn step(&self, q: &ComplexProfile) -> Result<ComplexProfile> {
        Ok(self.step_with_midpoint(q)?.0)
    }

    pub fn advance(&self, q: &ComplexProfile, steps: usize) -> Result<ComplexProfile> {
        let mut q = q.clone();
        for _ in 0..steps {
            q = self.step(&q)?;
        }
        Ok(q)
    }
}

/// Single IMEX step of size `dt`.
pub fn step_q(q: &ComplexProfile, system: &QSystem, dt: f64) -> Result<ComplexProfile> {
    QIntegrator::new(system.clone(), q.grid, dt)?.step(q)
}
