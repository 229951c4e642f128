//! Parallel frames along discrete curves, the Hasimoto transformation
//! `Q_j = ⟨u_x⟩_j`, its inverse, and the co-diagonal lift on Grassmannians.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, CMat};
use crate::error::{Error, Result};
use crate::geometry::{frame_defect, Grassmann, KahlerManifold};
use crate::grid::{d1, d2, Grid};
use crate::linalg::{expm_skew_hermitian, hermitian_eigen, hermitian_function};

/// Smallest Gram eigenvalue accepted when re-orthonormalizing a frame.
pub const PIVOT_TOL: f64 = 1e-10;

/// Default relative decay tolerance at the ends of the interval.
pub const DECAY_TOL: f64 = 1e-8;

/// Orthonormality tolerance for reference frames.
pub const FRAME_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Points of a curve on a uniform grid, anchored at `u_inf` on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCurve<E> {
    pub grid: Grid,
    pub points: Vec<E>,
    pub u_inf: E,
}

impl<E: Ambient> DiscreteCurve<E> {
    /// Only the node count is checked here; decay at the ends is validated
    /// separately by [`DiscreteCurve::validate_anchoring`] so that
    /// non-decaying oracle curves (great circles) remain representable.
    pub fn new(grid: Grid, points: Vec<E>, u_inf: E) -> Result<Self> {
        grid.check_len(points.len())?;
        Ok(Self { grid, points, u_inf })
    }

    pub fn constant(grid: Grid, u: E) -> Self {
        Self {
            grid,
            points: vec![u; grid.m],
            u_inf: u,
        }
    }

    /// `u_x` at every node by finite differences.
    pub fn tangent(&self) -> Vec<E> {
        d1(&self.points, self.grid.dx())
    }

    /// Largest constraint violation over the nodes.
    pub fn constraint_violation<M: KahlerManifold<Elem = E>>(&self, m: &M) -> f64 {
        self.points.iter().map(|p| m.point_defect(p)).fold(0.0, f64::max)
    }

    pub fn validate<M: KahlerManifold<Elem = E>>(&self, m: &M, tol: f64) -> Result<()> {
        let v = self.constraint_violation(m).max(m.point_defect(&self.u_inf));
        if !(v <= tol) {
            return Err(Error::Domain(format!("curve leaves {} (defect {v:e})", m.label())));
        }
        Ok(())
    }

    /// Checks `u(x_0) = u_inf` and that `|u_x|` is negligible at both ends,
    /// relative to its maximum.
    pub fn validate_anchoring<M: KahlerManifold<Elem = E>>(&self, m: &M, tol: f64) -> Result<()> {
        let d = m.dist(&self.points[0], &self.u_inf);
        if !(d <= tol) {
            return Err(Error::Domain(format!("left end is {d:e} away from u_inf")));
        }
        let ux = self.tangent();
        let scale = ux.iter().map(Ambient::norm).fold(1.0, f64::max);
        let ends = ux[0].norm().max(ux[ux.len() - 1].norm());
        if !(ends <= tol * scale) {
            return Err(Error::Domain(format!("|u_x| = {ends:e} at the ends does not decay")));
        }
        Ok(())
    }

    /// Sup over nodes of the ambient distance to another curve.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max)
    }
}

/// Orthonormal frames `e_1..e_n` at every node; `Je_j` is derived.
#[derive(Clone, Debug, PartialEq)]
pub struct ParallelFrame<E> {
    pub frames: Vec<Vec<E>>,
    pub frame_inf: Vec<E>,
}

impl<E: Ambient> ParallelFrame<E> {
    pub fn n(&self) -> usize {
        self.frame_inf.len()
    }

    /// Max over nodes of the deviation of `{e_j, Je_j}` from orthonormality.
    pub fn orthonormality_defect<M: KahlerManifold<Elem = E>>(&self, m: &M, curve: &DiscreteCurve<E>) -> f64 {
        curve
            .points
            .iter()
            .zip(&self.frames)
            .map(|(p, f)| frame_defect(m, p, f))
            .fold(0.0, f64::max)
    }
}

/// Complex `n`-vector `Q` at every grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexProfile {
    pub grid: Grid,
    pub q: Vec<Vec<Complex64>>,
}

impl ComplexProfile {
    pub fn new(grid: Grid, q: Vec<Vec<Complex64>>) -> Result<Self> {
        grid.check_len(q.len())?;
        let n = q[0].len();
        if n == 0 || q.iter().any(|v| v.len() != n) {
            return Err(Error::Domain("profile components must have one common length n >= 1".into()));
        }
        Ok(Self { grid, q })
    }

    pub fn zeros(grid: Grid, n: usize) -> Self {
        Self {
            grid,
            q: vec![vec![ZERO; n]; grid.m],
        }
    }

    /// Profile `f(x)` sampled on the grid.
    pub fn from_fn(grid: Grid, n: usize, f: impl Fn(f64) -> Vec<Complex64>) -> Result<Self> {
        let q: Vec<_> = grid.xs().into_iter().map(f).collect();
        if q.iter().any(|v| v.len() != n) {
            return Err(Error::Domain(format!("profile function must return {n} components")));
        }
        Self::new(grid, q)
    }

    pub fn n(&self) -> usize {
        self.q[0].len()
    }

    pub fn component(&self, j: usize) -> Vec<Complex64> {
        self.q.iter().map(|v| v[j]).collect()
    }

    /// `(∂_x Q, ∂_x² Q)` node-wise.
    pub fn derivatives(&self) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
        let (m, n, h) = (self.grid.m, self.n(), self.grid.dx());
        let mut q1 = vec![vec![ZERO; n]; m];
        let mut q2 = vec![vec![ZERO; n]; m];
        for j in 0..n {
            let c = self.component(j);
            for (i, (a, b)) in d1(&c, h).into_iter().zip(d2(&c, h)).enumerate() {
                q1[i][j] = a;
                q2[i][j] = b;
            }
        }
        (q1, q2)
    }

    /// Discrete mass `Σ_i |Q_i|² Δx`.
    pub fn mass(&self) -> f64 {
        self.q.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Largest `|Q|` at the two end nodes.
    pub fn end_magnitude(&self) -> f64 {
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        norm(&self.q[0]).max(norm(&self.q[self.q.len() - 1]))
    }

    pub fn max_abs(&self) -> f64 {
        self.q.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Node-wise Euclidean length `|Q(x_i)|`.
    pub fn moduli(&self) -> Vec<f64> {
        self.q
            .iter()
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    /// `‖ |Q| - |P| ‖ / ‖Q‖` on the common grid; invariant under any
    /// node-wise unitary change of frame.
    pub fn modulus_distance(&self, other: &Self) -> Result<f64> {
        self.grid.check_len(other.q.len())?;
        let diff: f64 = self
            .moduli()
            .iter()
            .zip(other.moduli())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            * self.grid.dx();
        Ok(relative(diff.sqrt(), self.l2_norm()))
    }

    /// `min_θ ‖Q - e^{iθ} P‖ / ‖Q‖`.
    pub fn phase_aligned_distance(&self, other: &Self) -> Result<f64> {
        self.grid.check_len(other.q.len())?;
        if self.n() != other.n() {
            return Err(Error::Domain("profiles of different dimension".into()));
        }
        let overlap: Complex64 = self
            .q
            .iter()
            .flatten()
            .zip(other.q.iter().flatten())
            .map(|(a, b)| b.conj() * a)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let diff: f64 = self
            .q
            .iter()
            .flatten()
            .zip(other.q.iter().flatten())
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            * self.grid.dx();
        Ok(relative(diff.sqrt(), self.l2_norm()))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.q
            .iter()
            .flatten()
            .zip(other.q.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Re-orthonormalizes `vectors` at `p` with the Hermitian Gram matrix
/// `G_ab = h(v_a, v_b) + i h(v_a, J v_b)`: `f_a = Σ_b (G^{-1/2})_ab v_b`,
/// complex scalars acting through `J`. Keeps the `J`-pairing exact.
pub fn orthonormalize<M: KahlerManifold>(m: &M, p: &M::Elem, vectors: &[M::Elem], node: usize) -> Result<Vec<M::Elem>> {
    let n = vectors.len();
    let g = DMatrix::from_fn(n, n, |a, b| m.hermitian(p, &vectors[a], &vectors[b]));
    let (values, _) = hermitian_eigen(&g);
    let pivot = values[n - 1];
    if !(pivot >= PIVOT_TOL) {
        return Err(Error::FrameCollapse { node, pivot });
    }
    let w = hermitian_function(&g, |l| Complex64::new(l.powf(-0.5), 0.0));
    Ok((0..n)
        .map(|a| {
            (0..n).fold(M::Elem::zero(), |acc, b| acc + m.complex_scale(p, w[(a, b)], &vectors[b]))
        })
        .collect())
}

/// One transport step from `p_prev` to `p_next`: reflect the frame across
/// the tangent space at the midpoint, project onto `T_{p_next}`, and
/// re-orthonormalize. The reflection cancels the `O(Δx²)` defect that plain
/// projection leaves in the transported vectors.
pub fn transport_frame<M: KahlerManifold>(
    m: &M,
    p_prev: &M::Elem,
    p_next: &M::Elem,
    frame: &[M::Elem],
    node: usize,
) -> Result<Vec<M::Elem>> {
    let mid = m.retract(p_prev, &((*p_prev + *p_next) * 0.5))?;
    let moved: Vec<_> = frame
        .iter()
        .map(|e| m.project(p_next, &(m.project(&mid, e) * 2.0 - *e)))
        .collect();
    orthonormalize(m, p_next, &moved, node)
}

fn check_reference_frame<M: KahlerManifold>(m: &M, u_inf: &M::Elem, frame_inf: &[M::Elem]) -> Result<()> {
    if frame_inf.len() != m.complex_dim() {
        return Err(Error::Domain(format!(
            "reference frame has {} vectors, {} needed",
            frame_inf.len(),
            m.complex_dim()
        )));
    }
    let defect = frame_defect(m, u_inf, frame_inf);
    if !(defect <= FRAME_TOL) {
        return Err(Error::FrameQuality { defect, tol: FRAME_TOL });
    }
    Ok(())
}

/// Discrete parallel frame along `curve` starting from `frame_inf` at `u_inf`.
pub fn build_frame<M: KahlerManifold>(
    m: &M,
    curve: &DiscreteCurve<M::Elem>,
    frame_inf: &[M::Elem],
) -> Result<ParallelFrame<M::Elem>> {
    check_reference_frame(m, &curve.u_inf, frame_inf)?;
    let mut frames = Vec::with_capacity(curve.points.len());
    let mut current = transport_frame(m, &curve.u_inf, &curve.points[0], frame_inf, 0)?;
    frames.push(current.clone());
    for (i, w) in curve.points.windows(2).enumerate() {
        current = transport_frame(m, &w[0], &w[1], &current, i + 1)?;
        frames.push(current.clone());
    }
    Ok(ParallelFrame {
        frames,
        frame_inf: frame_inf.to_vec(),
    })
}

/// `Q_j(x_i) = h(u_x, e_j) + i h(u_x, J e_j)`.
pub fn hasimoto_transform<M: KahlerManifold>(
    m: &M,
    curve: &DiscreteCurve<M::Elem>,
    frame: &ParallelFrame<M::Elem>,
) -> Result<ComplexProfile> {
    curve.grid.check_len(frame.frames.len())?;
    let ux = curve.tangent();
    let q = curve
        .points
        .iter()
        .zip(&ux)
        .zip(&frame.frames)
        .map(|((p, v), f)| f.iter().map(|e| m.hermitian(p, v, e)).collect())
        .collect();
    ComplexProfile::new(curve.grid, q)
}

fn velocity<M: KahlerManifold>(m: &M, p: &M::Elem, frame: &[M::Elem], q: &[Complex64]) -> M::Elem {
    frame
        .iter()
        .zip(q)
        .fold(M::Elem::zero(), |acc, (e, c)| acc + m.complex_scale(p, *c, e))
}

/// A curve together with its parallel frame.
pub type FramedCurve<E> = (DiscreteCurve<E>, ParallelFrame<E>);

/// Integrates `u_x = Σ (Re Q_p + Im Q_p J) e_p` from the left end together
/// with the parallel frame, using a Heun predictor-corrector per cell.
pub fn reconstruct<M: KahlerManifold>(
    m: &M,
    profile: &ComplexProfile,
    u_inf: &M::Elem,
    frame_inf: &[M::Elem],
) -> Result<FramedCurve<M::Elem>> {
    check_reference_frame(m, u_inf, frame_inf)?;
    if profile.n() != frame_inf.len() {
        return Err(Error::Domain(format!(
            "profile has {} components, frame has {}",
            profile.n(),
            frame_inf.len()
        )));
    }
    let h = profile.grid.dx();
    let mut u = *u_inf;
    let mut frame = frame_inf.to_vec();
    let mut points = vec![u];
    let mut frames = vec![frame.clone()];
    for i in 0..profile.grid.m - 1 {
        let v = velocity(m, &u, &frame, &profile.q[i]);
        let u_pred = m.retract(&u, &(u + v * h))?;
        let f_pred = transport_frame(m, &u, &u_pred, &frame, i + 1)?;
        let v_pred = velocity(m, &u_pred, &f_pred, &profile.q[i + 1]);
        let u_next = m.retract(&u, &(u + (v + v_pred) * (0.5 * h)))?;
        frame = transport_frame(m, &u, &u_next, &frame, i + 1)?;
        u = u_next;
        points.push(u);
        frames.push(frame.clone());
    }
    Ok((
        DiscreteCurve::new(profile.grid, points, *u_inf)?,
        ParallelFrame {
            frames,
            frame_inf: frame_inf.to_vec(),
        },
    ))
}

fn to_dmatrix<const N: usize>(a: &CMat<N>) -> DMatrix<Complex64> {
    DMatrix::from_fn(N, N, |r, c| a[(r, c)])
}

/// Unitary lift `C` with `C_x = [u_x, u] C`, `C(x_0) = I`, so that
/// `C A0 C* = u`. Integrated with the exponential midpoint rule, which keeps
/// `C` unitary to round-off.
pub fn co_diagonal_lift<const N: usize>(g: &Grassmann<N>, curve: &DiscreteCurve<CMat<N>>) -> Result<Vec<CMat<N>>> {
    let d = g.dist(&curve.u_inf, &g.origin());
    if !(d <= 1e-12) {
        return Err(Error::Domain(format!("the lift needs u_inf = A0 (distance {d:e})")));
    }
    let d0 = g.dist(&curve.points[0], &curve.u_inf);
    if !(d0 <= DECAY_TOL) {
        return Err(Error::Domain(format!("left end is {d0:e} away from u_inf")));
    }
    let h = curve.grid.dx();
    let mut c = CMat::<N>::identity();
    let mut out = vec![c];
    for w in curve.points.windows(2) {
        let omega = ((w[1] - w[0]) * (1.0 / h)).commutator(&((w[0] + w[1]) * 0.5)) * h;
        let step = expm_skew_hermitian(&to_dmatrix(&omega));
        c = CMat::<N>::from_fn(|r, col| step[(r, col)]).mm(&c);
        out.push(c);
    }
    Ok(out)
}

/// `C* C_x` per node, evaluated as `C* [Π(u_x), û] C` with `û = C A0 C*`.
pub fn lift_connection<const N: usize>(
    g: &Grassmann<N>,
    curve: &DiscreteCurve<CMat<N>>,
    lift: &[CMat<N>],
) -> Vec<CMat<N>> {
    let a0 = g.origin();
    curve
        .tangent()
        .iter()
        .zip(lift)
        .map(|(ux, c)| {
            let u_hat = c.mm(&a0).mm(&c.adjoint());
            let v = g.project(&u_hat, ux);
            c.adjoint().mm(&v.commutator(&u_hat)).mm(c)
        })
        .collect()
}

/// `-C12` per node, flattened like the profile: the lift's prediction of `Q`.
pub fn lift_profile<const N: usize>(g: &Grassmann<N>, grid: Grid, connection: &[CMat<N>]) -> Result<ComplexProfile> {
    let q = connection
        .iter()
        .map(|k| g.upper_block(k).into_iter().map(|z| -z).collect())
        .collect();
    ComplexProfile::new(grid, q)
}

/// Largest diagonal-block entry of the lift connection (zero in exact arithmetic).
pub fn connection_diagonal_defect<const N: usize>(g: &Grassmann<N>, connection: &[CMat<N>]) -> f64 {
    let k0 = g.k0();
    connection
        .iter()
        .map(|k| {
            let mut worst: f64 = 0.0;
            for r in 0..N {
                for c in 0..N {
                    if (r < k0) == (c < k0) {
                        worst = worst.max(k[(r, c)].norm());
                    }
                }
            }
            worst
        })
        .fold(0.0, f64::max)
}

/// Serialized curve and profile snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub grid: Grid,
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    #[serde(rename = "Q", default)]
    pub q: Vec<Vec<[f64; 2]>>,
}

impl ProfileDocument {
    pub fn new<E: Ambient>(backend: String, curve: Option<&DiscreteCurve<E>>, profile: Option<&ComplexProfile>, t: Option<f64>) -> Result<Self> {
        let grid = match (curve, profile) {
            (Some(c), Some(p)) => {
                c.grid.check_len(p.q.len())?;
                c.grid
            }
            (Some(c), None) => c.grid,
            (None, Some(p)) => p.grid,
            (None, None) => return Err(Error::Domain("nothing to serialize".into())),
        };
        Ok(Self {
            grid,
            backend,
            t,
            points: curve.map_or_else(Vec::new, |c| c.points.iter().map(Ambient::to_flat).collect()),
            q: profile.map_or_else(Vec::new, |p| {
                p.q.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect()
            }),
        })
    }

    pub fn profile(&self) -> Result<ComplexProfile> {
        let q = self
            .q
            .iter()
            .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        ComplexProfile::new(self.grid, q)
    }

    pub fn curve<E: Ambient>(&self, u_inf: E) -> Result<DiscreteCurve<E>> {
        let points = self
            .points
            .iter()
            .map(|v| E::from_flat(v).ok_or_else(|| Error::Domain("point has the wrong number of coordinates".into())))
            .collect::<Result<Vec<_>>>()?;
        DiscreteCurve::new(self.grid, points, u_inf)
    }
}
