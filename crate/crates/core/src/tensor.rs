//! Frame-relative curvature coefficients `S^j_{pqr}` and their companions
//! `R^A`, `R^B`, `T`, with closed forms and an identity checker.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{frame_defect, KahlerManifold};
use crate::grid::{d1, d2, Grid};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default orthonormality tolerance for frames fed to [`s_from_frame`].
pub const FRAME_TOL: f64 = 1e-8;

/// Dense complex array `A[j][p][q][r]` with all indices in `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<Complex64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut t = Self::zeros(n);
        for j in 0..n {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        t[[j, p, q, r]] = f(j, p, q, r);
                    }
                }
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Sup-norm of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    fn offset(&self, [j, p, q, r]: [usize; 4]) -> usize {
        ((j * self.n + p) * self.n + q) * self.n + r
    }
}

impl Index<[usize; 4]> for Tensor4 {
    type Output = Complex64;
    fn index(&self, idx: [usize; 4]) -> &Complex64 {
        &self.data[self.offset(idx)]
    }
}

impl IndexMut<[usize; 4]> for Tensor4 {
    fn index_mut(&mut self, idx: [usize; 4]) -> &mut Complex64 {
        let o = self.offset(idx);
        &mut self.data[o]
    }
}

/// The coefficient arrays at one node. `r_a[j][p][q][r] = ⟨R(e_p,e_q)e_r⟩_j`,
/// `r_b[j][p][q][r] = ⟨R(e_p,Je_q)e_r⟩_j`, `s = (r_a + i r_b)/2`,
/// `t = (-r_a + i r_b)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureArrays {
    pub s: Tensor4,
    pub t: Tensor4,
    pub r_a: Tensor4,
    pub r_b: Tensor4,
}

impl CurvatureArrays {
    /// Assembles all four arrays from independently computed `R^A`, `R^B`.
    pub fn from_r(r_a: Tensor4, r_b: Tensor4) -> Self {
        let n = r_a.n();
        let s = Tensor4::from_fn(n, |j, p, q, r| 0.5 * (r_a[[j, p, q, r]] + I * r_b[[j, p, q, r]]));
        let t = Tensor4::from_fn(n, |j, p, q, r| 0.5 * (-r_a[[j, p, q, r]] + I * r_b[[j, p, q, r]]));
        Self { s, t, r_a, r_b }
    }

    /// Derived views of an `S` array: `R^A = S - S_{qpr}`, `R^B = -i(S + S_{qpr})`.
    pub fn from_s(s: Tensor4) -> Self {
        let n = s.n();
        let r_a = Tensor4::from_fn(n, |j, p, q, r| s[[j, p, q, r]] - s[[j, q, p, r]]);
        let r_b = Tensor4::from_fn(n, |j, p, q, r| -I * (s[[j, p, q, r]] + s[[j, q, p, r]]));
        let t = Tensor4::from_fn(n, |j, p, q, r| s[[j, q, p, r]]);
        Self { s, t, r_a, r_b }
    }
}

/// Curvature arrays in an orthonormal frame `e_1..e_n` at `p`.
pub fn curvature_arrays<M: KahlerManifold>(
    m: &M,
    p: &M::Elem,
    frame: &[M::Elem],
    tol: f64,
) -> Result<CurvatureArrays> {
    let defect = frame_defect(m, p, frame);
    if !(defect <= tol) {
        return Err(Error::FrameQuality { defect, tol });
    }
    let n = frame.len();
    let jframe: Vec<_> = frame.iter().map(|e| m.complex_structure(p, e)).collect();
    let mut r_a = Tensor4::zeros(n);
    let mut r_b = Tensor4::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let ra = m.curvature(p, &frame[a], &frame[b], &frame[c]);
                let rb = m.curvature(p, &frame[a], &jframe[b], &frame[c]);
                for j in 0..n {
                    r_a[[j, a, b, c]] = m.hermitian(p, &ra, &frame[j]);
                    r_b[[j, a, b, c]] = m.hermitian(p, &rb, &frame[j]);
                }
            }
        }
    }
    Ok(CurvatureArrays::from_r(r_a, r_b))
}

/// `S^j_{pqr} = ½(⟨R(e_p,e_q)e_r⟩_j + i⟨R(e_p,Je_q)e_r⟩_j)`.
pub fn s_from_frame<M: KahlerManifold>(m: &M, p: &M::Elem, frame: &[M::Elem], tol: f64) -> Result<Tensor4> {
    Ok(curvature_arrays(m, p, frame, tol)?.s)
}

/// Constant holomorphic sectional curvature `K`: `K/4 (δ_qr δ_pj + δ_pq δ_rj)`.
pub fn s_const_k(n: usize, k: f64) -> Tensor4 {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    Tensor4::from_fn(n, |j, p, q, r| {
        Complex64::new(0.25 * k * (d(q, r) * d(p, j) + d(p, q) * d(r, j)), 0.0)
    })
}

/// Grassmannian `G(k0 + m0, k0)` in the canonical frame. Flat index
/// `j = j2 * k0 + j1` for block entry `(j1, j2)`.
pub fn s_grassmann(k0: usize, m0: usize) -> Tensor4 {
    let n = k0 * m0;
    let split = |j: usize| (j % k0, j / k0);
    Tensor4::from_fn(n, |j, p, q, r| {
        let (j1, j2) = split(j);
        let (p1, p2) = split(p);
        let (q1, q2) = split(q);
        let (r1, r2) = split(r);
        let first = p2 == q2 && r2 == j2 && q1 == r1 && p1 == j1;
        let second = r2 == q2 && p2 == j2 && q1 == p1 && r1 == j1;
        Complex64::new(f64::from(u8::from(first) + u8::from(second)), 0.0)
    })
}

/// `⟨R(U,V)W⟩_j = Σ S^j_{pqr} (U_p conj(V_q) - V_p conj(U_q)) W_r`.
pub fn contract(s: &Tensor4, u: &[Complex64], v: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = s.n();
    for len in [u.len(), v.len(), w.len()] {
        if len != n {
            return Err(Error::Domain(format!("expected {n} coordinates, got {len}")));
        }
    }
    let mut out = vec![ZERO; n];
    for (j, o) in out.iter_mut().enumerate() {
        for p in 0..n {
            for q in 0..n {
                let bracket = u[p] * v[q].conj() - v[p] * u[q].conj();
                if bracket == ZERO {
                    continue;
                }
                for r in 0..n {
                    *o += s[[j, p, q, r]] * bracket * w[r];
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn max_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.max_violation).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.max_violation)
    }

    /// Names of checks whose violation exceeds `tol`.
    pub fn failures(&self, tol: f64) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !(c.max_violation <= tol))
            .map(|c| c.name)
            .collect()
    }

    /// Node-wise maximum of several reports over the same identities.
    pub fn merge(reports: &[IdentityReport]) -> IdentityReport {
        let mut out = reports.first().cloned().unwrap_or(IdentityReport { checks: vec![] });
        for r in reports.iter().skip(1) {
            for (o, c) in out.checks.iter_mut().zip(&r.checks) {
                o.max_violation = o.max_violation.max(c.max_violation);
            }
        }
        out
    }
}

/// Sup-norm violations of the algebraic identities satisfied by the
/// coefficient arrays of a Kähler curvature tensor in a unitary frame.
pub fn identity_report(arr: &CurvatureArrays) -> IdentityReport {
    let (s, t, ra, rb) = (&arr.s, &arr.t, &arr.r_a, &arr.r_b);
    let n = s.n();
    let mut v = [0.0f64; 9];
    let mut bump = |k: usize, z: f64| v[k] = v[k].max(z);
    for j in 0..n {
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    let a = ra[[j, p, q, r]];
                    bump(0, (a + ra[[j, q, p, r]]).norm());
                    bump(1, (rb[[j, p, q, r]] - rb[[j, q, p, r]]).norm());
                    bump(2, (a + ra[[j, q, r, p]] + ra[[j, r, p, q]]).norm());
                    bump(3, (a - I * (rb[[j, q, r, p]] - rb[[j, r, p, q]])).norm());
                    bump(
                        4,
                        (a.re - ra[[q, r, j, p]].re).abs().max((a.re - ra[[p, j, r, q]].re).abs()),
                    );
                    let b = rb[[j, p, q, r]];
                    bump(
                        5,
                        (b.im - rb[[q, r, j, p]].im).abs().max((b.im - rb[[p, j, r, q]].im).abs()),
                    );
                    bump(
                        6,
                        (a.im - rb[[q, r, j, p]].re).abs().max((a.im + rb[[p, j, r, q]].re).abs()),
                    );
                    bump(7, (t[[j, p, q, r]] - s[[j, q, p, r]]).norm());
                    bump(8, (s[[j, p, q, r]] - s[[j, r, q, p]]).norm());
                }
            }
        }
    }
    let names = ["R1", "R2", "R3", "R4", "R6", "R7", "R8", "TtoS", "tsu3"];
    IdentityReport {
        checks: names
            .iter()
            .zip(v)
            .map(|(&name, max_violation)| IdentityCheck { name, max_violation })
            .collect(),
    }
}

/// `S` sampled at every grid node, with its first two `x`-derivatives.
/// When `constant` is set the derivatives are exactly zero and never
/// evaluated from differences.
#[derive(Clone, Debug, PartialEq)]
pub struct STensorField {
    n: usize,
    nodes: Vec<Tensor4>,
    constant: bool,
}

impl STensorField {
    /// The same array at all `m` nodes.
    pub fn constant(s: Tensor4, m: usize) -> Self {
        Self {
            n: s.n(),
            nodes: vec![s; m],
            constant: true,
        }
    }

    pub fn from_nodes(nodes: Vec<Tensor4>) -> Result<Self> {
        let n = nodes.first().map(Tensor4::n).ok_or_else(|| Error::Domain("empty S field".into()))?;
        if nodes.iter().any(|s| s.n() != n) {
            return Err(Error::Domain("S arrays of different sizes".into()));
        }
        Ok(Self {
            n,
            nodes,
            constant: false,
        })
    }

    /// `S` in the frames of a curve, one array per node.
    pub fn from_frames<M: KahlerManifold>(m: &M, points: &[M::Elem], frames: &[Vec<M::Elem>], tol: f64) -> Result<Self> {
        let nodes = points
            .iter()
            .zip(frames)
            .map(|(p, f)| s_from_frame(m, p, f, tol))
            .collect::<Result<Vec<_>>>()?;
        Self::from_nodes(nodes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn node(&self, i: usize) -> &Tensor4 {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Tensor4] {
        &self.nodes
    }

    /// Node-wise `∂_x S` and `∂_x² S`, or `None` under the constant flag.
    pub fn derivatives(&self, grid: &Grid) -> Result<Option<(Vec<Tensor4>, Vec<Tensor4>)>> {
        grid.check_len(self.nodes.len())?;
        if self.constant {
            return Ok(None);
        }
        let n = self.n;
        let len = n * n * n * n;
        let mut ds = vec![Tensor4::zeros(n); self.nodes.len()];
        let mut dds = vec![Tensor4::zeros(n); self.nodes.len()];
        for k in 0..len {
            let column: Vec<Complex64> = self.nodes.iter().map(|s| s.as_slice()[k]).collect();
            let c1 = d1(&column, grid.dx());
            let c2 = d2(&column, grid.dx());
            for i in 0..self.nodes.len() {
                ds[i].as_mut_slice()[k] = c1[i];
                dds[i].as_mut_slice()[k] = c2[i];
            }
        }
        Ok(Some((ds, dds)))
    }

    /// `max_i ‖S(x_{i+1}) - S(x_i)‖_∞ / Δx`.
    pub fn max_variation(&self, dx: f64) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1].max_diff(&w[0]) / dx)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::geometry::{coordinates, from_coordinates, ConstK, Grassmann, Sphere2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_c(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(s_const_k(1, 4.0)[[0, 0, 0, 0]], c(2.0, 0.0));
        let s = s_const_k(2, 4.0);
        assert_eq!(s[[0, 1, 0, 1]], c(0.0, 0.0));
        assert_eq!(s[[0, 0, 1, 1]], c(1.0, 0.0));
        assert_eq!(s[[0, 1, 1, 0]], c(1.0, 0.0));
        let s = s_const_k(2, 1.3);
        for j in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    for r in 0..2 {
                        assert_eq!(s[[j, p, q, r]], s[[j, r, q, p]]);
                    }
                }
            }
        }
        let g = s_grassmann(2, 2);
        // j=(1,1), p=(1,1), q=(2,1), r=(2,1) in one-based block indices
        assert_eq!(g[[0, 0, 1, 1]], c(1.0, 0.0));
        // j=(1,1), p=(2,2) share no row or column
        assert_eq!(g[[0, 3, 3, 0]], c(0.0, 0.0));
        assert!(g.as_slice().iter().all(|z| z.im == 0.0 && [0.0, 1.0, 2.0].contains(&z.re)));
        assert_eq!(s_grassmann(1, 3), s_const_k(3, 4.0));
    }

    #[test]
    fn closed_forms_satisfy_identities_exactly() {
        for s in [s_grassmann(2, 2), s_grassmann(1, 3), s_grassmann(2, 3), s_const_k(3, 4.0)] {
            let report = identity_report(&CurvatureArrays::from_s(s));
            assert_eq!(report.max_violation(), 0.0, "{report:?}");
        }
    }

    #[test]
    fn frame_values_match_closed_forms() {
        let s = Sphere2;
        let arr = s_from_frame(&s, &Vector3::z(), &[Vector3::x()], FRAME_TOL).unwrap();
        assert!((arr[[0, 0, 0, 0]] - c(0.5, 0.0)).norm() < 1e-15);

        let g = Grassmann::<2>::new(1).unwrap();
        let arr = s_from_frame(&g, &g.origin(), &g.origin_frame(), FRAME_TOL).unwrap();
        assert!((arr[[0, 0, 0, 0]] - c(2.0, 0.0)).norm() < 1e-14);

        let g = Grassmann::<4>::new(2).unwrap();
        let arr = s_from_frame(&g, &g.origin(), &g.origin_frame(), FRAME_TOL).unwrap();
        assert!(arr.max_diff(&s_grassmann(2, 2)) < 1e-14);

        let k = ConstK::<4>::new(1.5).unwrap();
        let arr = s_from_frame(&k, &k.origin(), &k.origin_frame(), FRAME_TOL).unwrap();
        assert!(arr.max_diff(&s_const_k(3, 1.5)) < 1e-14);
    }

    #[test]
    fn frame_identities_and_j_rotated_frame() {
        let g = Grassmann::<4>::new(2).unwrap();
        let p = g.origin();
        let frame = g.origin_frame();
        let report = identity_report(&curvature_arrays(&g, &p, &frame, FRAME_TOL).unwrap());
        assert!(report.max_violation() < 1e-12);
        let rotated: Vec<_> = frame.iter().map(|e| g.complex_structure(&p, e)).collect();
        let report = identity_report(&curvature_arrays(&g, &p, &rotated, FRAME_TOL).unwrap());
        assert!(report.max_violation() < 1e-12);
    }

    #[test]
    fn non_orthonormal_frame_rejected() {
        let s = Sphere2;
        let err = s_from_frame(&s, &Vector3::z(), &[Vector3::x() * 1.1], FRAME_TOL).unwrap_err();
        assert!(matches!(err, Error::FrameQuality { .. }));
    }

    #[test]
    fn perturbation_is_detected() {
        let mut s = s_grassmann(2, 2);
        s[[0, 0, 1, 2]] += c(1e-3, 0.0);
        let report = identity_report(&CurvatureArrays::from_s(s));
        let v = report.get("tsu3").unwrap();
        assert!((v - 1e-3).abs() < 1e-12);
        assert!(report.failures(1e-10).contains(&"tsu3"));
    }

    #[test]
    fn contract_examples() {
        let k = 2.5;
        let s = s_const_k(1, k);
        let out = contract(&s, &[c(1.0, 0.0)], &[c(0.0, 1.0)], &[c(1.0, 0.0)]).unwrap();
        assert!((out[0] - c(0.0, -k)).norm() < 1e-15);
        let m = ConstK::<2>::new(k).unwrap();
        let (p, e) = (m.origin(), m.origin_frame()[0]);
        let je = m.complex_structure(&p, &e);
        let direct = m.hermitian(&p, &m.curvature(&p, &e, &je, &e), &e);
        assert!((direct - out[0]).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = s_grassmann(2, 2);
        let u = random_c(&mut rng, 4);
        assert!(contract(&s, &u, &u, &random_c(&mut rng, 4)).unwrap().iter().all(|z| z.norm() < 1e-15));
        assert!(matches!(contract(&s, &u, &u, &u[..3]), Err(Error::Domain(_))));
    }

    #[test]
    fn contract_matches_curvature_on_g31() {
        let g = Grassmann::<3>::new(1).unwrap();
        let (p, frame) = (g.origin(), g.origin_frame());
        let s = s_from_frame(&g, &p, &frame, FRAME_TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let (u, v, w) = (random_c(&mut rng, 2), random_c(&mut rng, 2), random_c(&mut rng, 2));
            let x = |z: &[Complex64]| from_coordinates(&g, &p, &frame, z);
            let direct = coordinates(&g, &p, &frame, &g.curvature(&p, &x(&u), &x(&v), &x(&w)));
            let via = contract(&s, &u, &v, &w).unwrap();
            for (a, b) in direct.iter().zip(&via) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_field_has_no_derivatives() {
        let grid = Grid::new(1.0, 9).unwrap();
        let field = STensorField::constant(s_const_k(2, 4.0), 9);
        assert!(field.derivatives(&grid).unwrap().is_none());
        assert_eq!(field.max_variation(grid.dx()), 0.0);
        assert!(field.derivatives(&Grid::new(1.0, 11).unwrap()).is_err());

        let nodes: Vec<_> = grid.xs().iter().map(|&x| s_const_k(1, x * x)).collect();
        let field = STensorField::from_nodes(nodes).unwrap();
        let (ds, dds) = field.derivatives(&grid).unwrap().unwrap();
        for (i, x) in grid.xs().into_iter().enumerate() {
            assert!((ds[i][[0, 0, 0, 0]].re - x).abs() < 1e-12);
            assert!((dds[i][[0, 0, 0, 0]].re - 1.0).abs() < 1e-10);
        }
    }
}
