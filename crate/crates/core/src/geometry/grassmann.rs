use nalgebra::DMatrix;
use num_complex::Complex64;

use super::KahlerManifold;
use crate::ambient::{Ambient, CMat};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;

/// Complex Grassmannian `G(N, k0)` of `k0`-planes in `ℂ^N`, modelled as
/// rank-`k0` Hermitian projectors. Tangent vectors at `A` are the Hermitian
/// `H` with `HA + AH = H`; the metric is `h(X, Y) = Re tr(x y*)` in block
/// coordinates, i.e. half the real Frobenius product; curvature is
/// `R(X,Y)Z = [[X,Y],Z]`, giving holomorphic sectional curvature 4 for `k0 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grassmann<const N: usize> {
    k0: usize,
}

/// Spectral gap below which the projector retraction is declared singular.
pub const SPECTRAL_GAP_TOL: f64 = 1e-8;

const PURIFY_ENTRY: f64 = 0.1;
const PURIFY_TOL: f64 = 1e-14;
const PURIFY_MAX_ITERS: usize = 40;

impl<const N: usize> Grassmann<N> {
    pub fn new(k0: usize) -> Result<Self> {
        if k0 == 0 || k0 >= N {
            return Err(Error::Config(format!("G({N},{k0}) requires 1 <= k0 < {N}")));
        }
        Ok(Self { k0 })
    }

    pub fn k0(&self) -> usize {
        self.k0
    }

    pub fn m0(&self) -> usize {
        N - self.k0
    }

    /// Index of block entry `(j1, j2)` in the flattened frame, column-major
    /// over the `k0 x m0` block.
    pub fn flat_index(&self, j1: usize, j2: usize) -> usize {
        j2 * self.k0 + j1
    }

    pub fn block_index(&self, j: usize) -> (usize, usize) {
        (j % self.k0, j / self.k0)
    }

    /// `[[0, v], [v*, 0]]` for a `k0 x m0` block `v` given column-major.
    pub fn off_diagonal(&self, v: &[Complex64]) -> CMat<N> {
        debug_assert_eq!(v.len(), self.k0 * self.m0());
        let mut out = CMat::<N>::zero();
        for j2 in 0..self.m0() {
            for j1 in 0..self.k0 {
                let z = v[self.flat_index(j1, j2)];
                out[(j1, self.k0 + j2)] = z;
                out[(self.k0 + j2, j1)] = z.conj();
            }
        }
        out
    }

    /// Upper-right `k0 x m0` block, column-major.
    pub fn upper_block(&self, x: &CMat<N>) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.k0 * self.m0()];
        for j2 in 0..self.m0() {
            for j1 in 0..self.k0 {
                out[self.flat_index(j1, j2)] = x[(j1, self.k0 + j2)];
            }
        }
        out
    }

    /// `B A0 B*` for unitary `B`.
    pub fn point_from_unitary(&self, b: &CMat<N>) -> CMat<N> {
        b.mm(&self.origin()).mm(&b.adjoint())
    }

    /// `B e_j^0 B*`, the canonical frame transported by `B`.
    pub fn frame_from_unitary(&self, b: &CMat<N>) -> Vec<CMat<N>> {
        self.origin_frame()
            .iter()
            .map(|e| b.mm(e).mm(&b.adjoint()))
            .collect()
    }

    fn spectral_projector(&self, h: &CMat<N>) -> Result<CMat<N>> {
        let dm = DMatrix::from_fn(N, N, |r, c| h[(r, c)]);
        let (values, vectors) = hermitian_eigen(&dm);
        let gap = values[self.k0 - 1] - values[self.k0];
        if !(gap >= SPECTRAL_GAP_TOL) {
            return Err(Error::Retraction(format!(
                "spectral gap {gap:e} at eigenvalue {} too small",
                self.k0
            )));
        }
        let mut p = CMat::<N>::zero();
        for col in 0..self.k0 {
            for r in 0..N {
                for c in 0..N {
                    p[(r, c)] += vectors[(r, col)] * vectors[(c, col)].conj();
                }
            }
        }
        Ok(p)
    }

    /// McWeeny purification `P <- 3P^2 - 2P^3`; converges to the spectral
    /// projector onto eigenvalues above 1/2 when started near a projector.
    fn purify(&self, h: &CMat<N>) -> Option<CMat<N>> {
        let mut p = *h;
        for _ in 0..PURIFY_MAX_ITERS {
            let p2 = p.mm(&p);
            let defect = (p2 - p).frobenius();
            if defect < PURIFY_TOL {
                let p = (p + p.adjoint()) * 0.5;
                let rank = p.trace().re;
                return ((rank - self.k0 as f64).abs() < 1e-6).then_some(p);
            }
            if defect > PURIFY_ENTRY {
                return None;
            }
            p = p2 * 3.0 - p2.mm(&p) * 2.0;
        }
        None
    }
}

impl<const N: usize> KahlerManifold for Grassmann<N> {
    type Elem = CMat<N>;

    fn label(&self) -> String {
        format!("G({N},{})", self.k0)
    }

    fn complex_dim(&self) -> usize {
        self.k0 * self.m0()
    }

    fn origin(&self) -> CMat<N> {
        CMat::from_fn(|r, c| {
            if r == c && r < self.k0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    fn origin_frame(&self) -> Vec<CMat<N>> {
        let n = self.complex_dim();
        (0..n)
            .map(|j| {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[j] = Complex64::new(1.0, 0.0);
                self.off_diagonal(&v)
            })
            .collect()
    }

    fn point_defect(&self, a: &CMat<N>) -> f64 {
        let idem = (a.mm(a) - *a).frobenius();
        let rank = (a.trace() - Complex64::new(self.k0 as f64, 0.0)).norm();
        a.hermitian_defect().max(idem).max(rank)
    }

    fn tangent_defect(&self, a: &CMat<N>, v: &CMat<N>) -> f64 {
        let split = (v.mm(a) + a.mm(v) - *v).frobenius();
        v.hermitian_defect().max(split)
    }

    fn check_ambient(&self, h: &CMat<N>) -> Result<()> {
        let scale = h.frobenius().max(1.0);
        let d = h.hermitian_defect();
        if !(d <= 1e-10 * scale) {
            return Err(Error::Domain(format!("ambient matrix is not Hermitian (defect {d:e})")));
        }
        Ok(())
    }

    fn metric(&self, _a: &CMat<N>, x: &CMat<N>, y: &CMat<N>) -> f64 {
        0.5 * x.dot(y)
    }

    fn complex_structure(&self, a: &CMat<N>, x: &CMat<N>) -> CMat<N> {
        // At A0 this maps [[0, v], [v*, 0]] to [[0, iv], [(iv)*, 0]].
        a.commutator(x).scale_c(Complex64::new(0.0, 1.0))
    }

    fn project(&self, a: &CMat<N>, h: &CMat<N>) -> CMat<N> {
        let ah = a.mm(h);
        ah + h.mm(a) - ah.mm(a) * 2.0
    }

    fn curvature(&self, _a: &CMat<N>, x: &CMat<N>, y: &CMat<N>, z: &CMat<N>) -> CMat<N> {
        x.commutator(y).commutator(z)
    }

    fn retract(&self, _a: &CMat<N>, h: &CMat<N>) -> Result<CMat<N>> {
        let hs = (*h + h.adjoint()) * 0.5;
        if let Some(p) = self.purify(&hs) {
            return Ok(p);
        }
        self.spectral_projector(&hs)
    }
}
