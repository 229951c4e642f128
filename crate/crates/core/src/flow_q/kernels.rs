//! Nonlinear parts `N(Q)` of the transformed systems, written as
//! `i Q_t + (a∂⁴ + λ∂²) Q = N(Q)`.
//!
//! Nonlocal terms `∫_{x_0}^x ω` integrate the polynomial one-form `ω(Q, dQ)`
//! exactly along the piecewise-linear interpolant of the nodal values. Exact
//! derivatives such as `d(|Q|⁴)` therefore integrate to their endpoint
//! differences, which keeps the specialized kernels identical to the generic
//! one to round-off.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frames::ComplexProfile;
use crate::grid::{cumulative_trapezoid, GAUSS2};
use crate::params::FlowParams;
use crate::tensor::{STensorField, Tensor4};

type C = Complex64;
type Nodes = Vec<Vec<C>>;

const ZERO: C = Complex64::new(0.0, 0.0);

fn cr(x: f64) -> C {
    Complex64::new(x, 0.0)
}

fn check_dim(profile: &ComplexProfile, n: usize) -> Result<()> {
    if profile.n() != n {
        return Err(Error::Domain(format!("system has dimension {n}, profile has {}", profile.n())));
    }
    Ok(())
}

fn lerp(a: &[C], b: &[C], s: f64) -> Vec<C> {
    a.iter().zip(b).map(|(x, y)| x * (1.0 - s) + y * s).collect()
}

fn diff(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().zip(b).map(|(x, y)| y - x).collect()
}

/// Cumulative line integral of a matrix-valued one-form along the
/// interpolant. `form(q, dq, i, s)` is evaluated on segment `i` at `s`.
fn cumulative_form(
    q: &[Vec<C>],
    rows: usize,
    cols: usize,
    form: impl Fn(&[C], &[C], usize, f64) -> DMatrix<C>,
) -> Vec<DMatrix<C>> {
    let mut acc = DMatrix::zeros(rows, cols);
    let mut out = vec![acc.clone()];
    for (i, w) in q.windows(2).enumerate() {
        let dq = diff(&w[0], &w[1]);
        for s in GAUSS2 {
            acc += form(&lerp(&w[0], &w[1], s), &dq, i, s) * cr(0.5);
        }
        out.push(acc.clone());
    }
    out
}

/// Generic kernel with a per-node curvature coefficient field.
pub fn nonlinear_generic(profile: &ComplexProfile, field: &STensorField, params: &FlowParams) -> Result<Nodes> {
    let n = field.n();
    check_dim(profile, n)?;
    let grid = profile.grid;
    let derivs = field.derivatives(&grid)?;
    let d = params.d_coeffs();
    let (a, b, c, lambda) = (params.a, params.b, params.c, params.lambda);
    let (qx, qxx) = profile.derivatives();
    let q = &profile.q;

    // f¹ through the intermediate sums X_q and Y_p.
    let f1 = cumulative_form(q, n, n, |qs, dq, i, s| {
        let interpolated;
        let st: &Tensor4 = if field.is_constant() {
            field.node(i)
        } else {
            let (s0, s1) = (field.node(i), field.node(i + 1));
            interpolated = Tensor4::from_fn(n, |j, p, qq, r| {
                s0[[j, p, qq, r]] * (1.0 - s) + s1[[j, p, qq, r]] * s
            });
            &interpolated
        };
        let mut x = vec![ZERO; n];
        let mut y = vec![ZERO; n];
        for k in 0..n {
            for al in 0..n {
                for be in 0..n {
                    for ga in 0..n {
                        let sk = st[[k, al, be, ga]];
                        if sk == ZERO {
                            continue;
                        }
                        x[k] += sk.conj()
                            * (-(b + 2.0 * c) * dq[al].conj() * qs[be] * qs[ga].conj()
                                + b * qs[al].conj() * dq[be] * qs[ga].conj());
                        y[k] += sk
                            * (-(b + 2.0 * c) * dq[al] * qs[be].conj() * qs[ga]
                                + b * qs[al] * dq[be].conj() * qs[ga]);
                    }
                }
            }
        }
        DMatrix::from_fn(n, n, |j, r| {
            let mut acc = ZERO;
            for p in 0..n {
                for qq in 0..n {
                    let sj = st[[j, p, qq, r]];
                    if sj != ZERO {
                        acc += sj * (x[qq] * qs[p] + y[p] * qs[qq].conj());
                    }
                }
            }
            acc
        })
    });

    // f² only exists for a varying S.
    let f2: Option<Vec<DMatrix<C>>> = derivs.as_ref().map(|(ds, dds)| {
        let nodal: Vec<DMatrix<C>> = (0..grid.m)
            .map(|i| {
                let (qi, qxi) = (&q[i], &qx[i]);
                DMatrix::from_fn(n, n, |j, r| {
                    let mut acc = ZERO;
                    for p in 0..n {
                        for qq in 0..n {
                            acc += -a * dds[i][[j, p, qq, r]] * (qxi[p] * qi[qq].conj() + qi[p] * qxi[qq].conj())
                                - 3.0 * a * ds[i][[j, p, qq, r]] * qxi[p] * qxi[qq].conj()
                                + lambda * ds[i][[j, p, qq, r]] * qi[p] * qi[qq].conj();
                        }
                    }
                    acc
                })
            })
            .collect();
        let flat: Vec<Vec<C>> = nodal.iter().map(|m| m.as_slice().to_vec()).collect();
        let mut out = vec![DMatrix::zeros(n, n); grid.m];
        for k in 0..n * n {
            let col: Vec<C> = flat.iter().map(|v| v[k]).collect();
            for (i, v) in cumulative_trapezoid(&col, grid.dx()).into_iter().enumerate() {
                out[i].as_mut_slice()[k] = v;
            }
        }
        out
    });

    let mut out = vec![vec![ZERO; n]; grid.m];
    for i in 0..grid.m {
        let s = field.node(i);
        let (qi, qxi, qxxi) = (&q[i], &qx[i], &qxx[i]);
        for j in 0..n {
            let mut acc = ZERO;
            for r in 0..n {
                let mut coeff = ZERO;
                let mut coeff_x = ZERO;
                for p in 0..n {
                    for qq in 0..n {
                        let sv = s[[j, p, qq, r]];
                        if sv != ZERO {
                            coeff += sv
                                * (d.d1 * qxxi[p] * qi[qq].conj()
                                    + d.d2 * qi[p] * qxxi[qq].conj()
                                    + d.d3 * qxi[p] * qxi[qq].conj()
                                    - lambda * qi[p] * qi[qq].conj());
                            coeff_x += sv * d.d4 * qxi[p] * qi[qq].conj();
                        }
                        if let Some((ds, _)) = &derivs {
                            let dv = ds[i][[j, p, qq, r]];
                            coeff += dv * (d.d5 * qxi[p] * qi[qq].conj() + d.d6 * qi[p] * qxi[qq].conj());
                        }
                    }
                }
                let mut nonlocal = f1[i][(j, r)];
                if let Some(f2) = &f2 {
                    nonlocal += f2[i][(j, r)];
                }
                acc += (coeff + nonlocal) * qi[r] + coeff_x * qxi[r];
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// Compact Riemann surface with constant Gaussian curvature `κ` (`n = 1`).
pub fn nonlinear_riemann(profile: &ComplexProfile, kappa: f64, params: &FlowParams) -> Result<Nodes> {
    check_dim(profile, 1)?;
    let d = params.d_coeffs();
    let (qx, qxx) = profile.derivatives();
    let h = 0.5 * kappa;
    Ok(profile
        .q
        .iter()
        .zip(qx.iter().zip(&qxx))
        .map(|(q, (qx, qxx))| {
            let (q, qx, qxx) = (q[0], qx[0], qxx[0]);
            let m2 = q.norm_sqr();
            vec![
                h * (d.d1 * qxx * m2
                    + d.d2 * qxx.conj() * q * q
                    + d.d3 * qx.norm_sqr() * q
                    + d.d4 * qx * qx * q.conj()
                    - params.lambda * m2 * q)
                    - 0.25 * params.c * kappa * kappa * m2 * m2 * q,
            ]
        })
        .collect())
}

/// Constant holomorphic sectional curvature `K`, any `n`.
pub fn nonlinear_constk(profile: &ComplexProfile, k: f64, params: &FlowParams) -> Result<Nodes> {
    let n = profile.n();
    let d = params.d_coeffs();
    let (b, c, lambda) = (params.b, params.c, params.lambda);
    let (qx, qxx) = profile.derivatives();
    let q = &profile.q;
    // ∫ Q_j conj(Q_r) d(|Q|²)
    let g = cumulative_form(q, n, n, |qs, dq, _, _| {
        let dm: C = qs.iter().zip(dq).map(|(z, dz)| dz * z.conj() + z * dz.conj()).sum();
        DMatrix::from_fn(n, n, |j, r| qs[j] * qs[r].conj() * dm)
    });
    Ok((0..q.len())
        .map(|i| {
            let (qi, qxi, qxxi) = (&q[i], &qx[i], &qxx[i]);
            let m2: f64 = qi.iter().map(|z| z.norm_sqr()).sum();
            let mx2: f64 = qxi.iter().map(|z| z.norm_sqr()).sum();
            let dot = |u: &[C], v: &[C]| -> C { u.iter().zip(v).map(|(x, y)| x * y.conj()).sum() };
            let s_xx = dot(qxxi, qi); // Σ Q_xx,r conj(Q_r)
            let s_x = dot(qxi, qi); // Σ Q_x,r conj(Q_r)
            (0..n)
                .map(|j| {
                    let mut v = 0.25 * k * d.d1 * (m2 * qxxi[j] + s_xx * qi[j])
                        + 0.5 * k * d.d2 * s_xx.conj() * qi[j]
                        + 0.25 * k * d.d3 * (s_x.conj() * qxi[j] + mx2 * qi[j])
                        + 0.5 * k * d.d4 * s_x * qxi[j]
                        - 0.5 * k * lambda * m2 * qi[j]
                        - (b + 4.0 * c) * k * k / 16.0 * m2 * m2 * qi[j];
                    for r in 0..n {
                        v += b * k * k / 8.0 * g[i][(j, r)] * qi[r];
                    }
                    v
                })
                .collect()
        })
        .collect())
}

/// `k0 x m0` block `q` with `q[(j1, j2)] = Q[j2 * k0 + j1]`.
pub fn to_matrix(v: &[C], k0: usize, m0: usize) -> DMatrix<C> {
    DMatrix::from_column_slice(k0, m0, v)
}

pub fn from_matrix(m: &DMatrix<C>) -> Vec<C> {
    m.as_slice().to_vec()
}

/// `(∫ q*(qq*)_s q, ∫ q(q*q)_s q*)` from the left end, node-wise.
pub fn grassmann_integrals(profile: &ComplexProfile, k0: usize, m0: usize) -> (Vec<DMatrix<C>>, Vec<DMatrix<C>>) {
    let ia = cumulative_form(&profile.q, m0, m0, |qs, dq, _, _| {
        let (q, dq) = (to_matrix(qs, k0, m0), to_matrix(dq, k0, m0));
        let qa = q.adjoint();
        &qa * (&dq * &qa + &q * dq.adjoint()) * &q
    });
    let ib = cumulative_form(&profile.q, k0, k0, |qs, dq, _, _| {
        let (q, dq) = (to_matrix(qs, k0, m0), to_matrix(dq, k0, m0));
        let qa = q.adjoint();
        &q * (&qa * &dq + dq.adjoint() * &q) * &qa
    });
    (ia, ib)
}

fn grassmann_local(q: &DMatrix<C>, qx: &DMatrix<C>, qxx: &DMatrix<C>, params: &FlowParams) -> DMatrix<C> {
    let d = params.d_coeffs();
    let (b, c, lambda) = (params.b, params.c, params.lambda);
    let (qa, qxa, qxxa) = (q.adjoint(), qx.adjoint(), qxx.adjoint());
    let qqa = q * &qa;
    (qxx * &qa * q + &qqa * qxx) * cr(d.d1)
        + q * &qxxa * q * cr(2.0 * d.d2)
        + (qx * &qxa * q + q * &qxa * qx) * cr(d.d3)
        + qx * &qa * qx * cr(2.0 * d.d4)
        - &qqa * q * cr(2.0 * lambda)
        + &qqa * &qqa * q * cr(-2.0 * b - 4.0 * c)
}

fn matrix_kernel(profile: &ComplexProfile, k0: usize, m0: usize, params: &FlowParams, origin: Option<usize>) -> Result<Nodes> {
    check_dim(profile, k0 * m0)?;
    let (qx, qxx) = profile.derivatives();
    let (mut ia, mut ib) = grassmann_integrals(profile, k0, m0);
    if let Some(o) = origin {
        let (a0, b0) = (ia[o].clone(), ib[o].clone());
        ia.iter_mut().for_each(|m| *m -= &a0);
        ib.iter_mut().for_each(|m| *m -= &b0);
    }
    let two_b = cr(2.0 * params.b);
    Ok((0..profile.q.len())
        .map(|i| {
            let q = to_matrix(&profile.q[i], k0, m0);
            let local = grassmann_local(&q, &to_matrix(&qx[i], k0, m0), &to_matrix(&qxx[i], k0, m0), params);
            from_matrix(&(local + (&q * &ia[i] + &ib[i] * &q) * two_b))
        })
        .collect())
}

/// Matrix form on `G(k0 + m0, k0)` with integrals from the left end.
pub fn nonlinear_grassmann(profile: &ComplexProfile, k0: usize, m0: usize, params: &FlowParams) -> Result<Nodes> {
    matrix_kernel(profile, k0, m0, params, None)
}

/// Matrix NLS form with integrals `∫_0^x`; `origin` is the node at `x = 0`.
pub fn nonlinear_mns(profile: &ComplexProfile, k0: usize, m0: usize, params: &FlowParams, origin: usize) -> Result<Nodes> {
    if origin >= profile.grid.m {
        return Err(Error::Domain(format!("origin node {origin} outside the grid")));
    }
    matrix_kernel(profile, k0, m0, params, Some(origin))
}

/// `δ1..δ5` of the scalar fourth-order NLS.
pub fn nls_deltas(gamma1: f64, gamma2: f64) -> [f64; 5] {
    [
        3.0 * gamma1 + 2.0 * gamma2,
        2.0 * gamma1 + gamma2,
        9.0 * gamma1 + 4.0 * gamma2,
        3.5 * gamma1 + 2.0 * gamma2,
        gamma1 + 0.5 * gamma2,
    ]
}

/// Nonlinear part of `i q_t + γ1 q_xxxx + q_xx = N(q)` for the scalar
/// fourth-order NLS.
pub fn nonlinear_4shro(profile: &ComplexProfile, gamma1: f64, gamma2: f64) -> Result<Nodes> {
    check_dim(profile, 1)?;
    let [d1, d2, d3, d4, d5] = nls_deltas(gamma1, gamma2);
    let (qx, qxx) = profile.derivatives();
    Ok(profile
        .q
        .iter()
        .zip(qx.iter().zip(&qxx))
        .map(|(q, (qx, qxx))| {
            let (q, qx, qxx) = (q[0], qx[0], qxx[0]);
            let m2 = q.norm_sqr();
            vec![
                -2.0 * m2 * q
                    + 4.0 * d1 * m2 * qxx
                    + 4.0 * d2 * q * q * qxx.conj()
                    + 4.0 * d3 * q * qx.norm_sqr()
                    + 4.0 * d4 * qx * qx * q.conj()
                    + 24.0 * d5 * m2 * m2 * q,
            ]
        })
        .collect())
}
