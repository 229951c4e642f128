//! Kähler manifold backends behind one interface.
//!
//! Every backend is embedded in a real inner-product space (`Ambient`): the
//! unit sphere in ℝ³, and rank-`k0` Hermitian projectors in the space of
//! `n0 x n0` complex matrices. Points and tangent vectors share the ambient
//! representation; the Levi-Civita connection of the induced metric is the
//! tangential projection of the ambient derivative.

mod constk;
mod grassmann;
mod sphere;

pub use constk::ConstK;
pub use grassmann::Grassmann;
pub use sphere::Sphere2;

use std::fmt::Debug;

use num_complex::Complex64;

use crate::ambient::Ambient;
use crate::error::{Error, Result};

/// Two base points closer than this (ambient norm) are considered equal.
pub const BASE_POINT_TOL: f64 = 1e-12;

pub trait KahlerManifold: Clone + Debug + Send + Sync {
    type Elem: Ambient;

    /// Short human readable name, e.g. `G(3,1)`.
    fn label(&self) -> String;

    /// Complex dimension `n`.
    fn complex_dim(&self) -> usize;

    /// Reference point (north pole, or the block projector `A0`).
    fn origin(&self) -> Self::Elem;

    /// Orthonormal `e_1, .., e_n` at `origin()` such that `{e_j, J e_j}` is a
    /// real orthonormal basis of the tangent space.
    fn origin_frame(&self) -> Vec<Self::Elem>;

    /// Constraint violation of a candidate point.
    fn point_defect(&self, p: &Self::Elem) -> f64;

    /// Violation of the tangency condition of `v` at `p`.
    fn tangent_defect(&self, p: &Self::Elem, v: &Self::Elem) -> f64;

    /// Validates an arbitrary ambient element as input for projection.
    fn check_ambient(&self, h: &Self::Elem) -> Result<()>;

    fn metric(&self, p: &Self::Elem, x: &Self::Elem, y: &Self::Elem) -> f64;

    fn complex_structure(&self, p: &Self::Elem, x: &Self::Elem) -> Self::Elem;

    /// Orthogonal projection of an ambient element onto `T_p N`.
    fn project(&self, p: &Self::Elem, h: &Self::Elem) -> Self::Elem;

    /// Riemann curvature `R(x, y) z` with the convention
    /// `R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_[X,Y] Z`.
    fn curvature(&self, p: &Self::Elem, x: &Self::Elem, y: &Self::Elem, z: &Self::Elem)
        -> Self::Elem;

    /// Maps an ambient element near the manifold back onto it.
    fn retract(&self, p: &Self::Elem, h: &Self::Elem) -> Result<Self::Elem>;

    /// Ambient distance between two points.
    fn dist(&self, p: &Self::Elem, q: &Self::Elem) -> f64 {
        (*p - *q).norm()
    }

    /// `h(x, y) + i h(x, J y)`; complex linear in `x` for the complex
    /// structure and conjugate linear in `y`. `⟨x⟩_j` is `hermitian(p, x, e_j)`.
    fn hermitian(&self, p: &Self::Elem, x: &Self::Elem, y: &Self::Elem) -> Complex64 {
        let jy = self.complex_structure(p, y);
        Complex64::new(self.metric(p, x, y), self.metric(p, x, &jy))
    }

    /// `(Re c) x + (Im c) J x`.
    fn complex_scale(&self, p: &Self::Elem, c: Complex64, x: &Self::Elem) -> Self::Elem {
        if c.im == 0.0 {
            return *x * c.re;
        }
        *x * c.re + self.complex_structure(p, x) * c.im
    }
}

/// A tangent vector together with its base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector<E> {
    pub base: E,
    pub v: E,
}

impl<E: Ambient> TangentVector<E> {
    pub fn new(base: E, v: E) -> Self {
        Self { base, v }
    }
}

fn same_base<M: KahlerManifold>(m: &M, a: &M::Elem, b: &M::Elem) -> Result<()> {
    let d = m.dist(a, b);
    if d > BASE_POINT_TOL {
        return Err(Error::Domain(format!(
            "tangent vectors based at different points (distance {d:e})"
        )));
    }
    Ok(())
}

/// Validated constructor: checks the base point and tangency.
pub fn tangent_vector<M: KahlerManifold>(
    m: &M,
    base: M::Elem,
    v: M::Elem,
    tol: f64,
) -> Result<TangentVector<M::Elem>> {
    let pd = m.point_defect(&base);
    if pd > tol {
        return Err(Error::Domain(format!("base is not on {} (defect {pd:e})", m.label())));
    }
    let td = m.tangent_defect(&base, &v);
    if td > tol {
        return Err(Error::Domain(format!("vector is not tangent (defect {td:e})")));
    }
    Ok(TangentVector::new(base, v))
}

pub fn metric<M: KahlerManifold>(
    m: &M,
    x: &TangentVector<M::Elem>,
    y: &TangentVector<M::Elem>,
) -> Result<f64> {
    same_base(m, &x.base, &y.base)?;
    Ok(m.metric(&x.base, &x.v, &y.v))
}

pub fn complex_structure<M: KahlerManifold>(
    m: &M,
    x: &TangentVector<M::Elem>,
) -> TangentVector<M::Elem> {
    TangentVector::new(x.base, m.complex_structure(&x.base, &x.v))
}

pub fn tangent_project<M: KahlerManifold>(
    m: &M,
    base: &M::Elem,
    h: &M::Elem,
) -> Result<TangentVector<M::Elem>> {
    m.check_ambient(h)?;
    Ok(TangentVector::new(*base, m.project(base, h)))
}

pub fn curvature<M: KahlerManifold>(
    m: &M,
    x: &TangentVector<M::Elem>,
    y: &TangentVector<M::Elem>,
    z: &TangentVector<M::Elem>,
) -> Result<TangentVector<M::Elem>> {
    same_base(m, &x.base, &y.base)?;
    same_base(m, &x.base, &z.base)?;
    Ok(TangentVector::new(x.base, m.curvature(&x.base, &x.v, &y.v, &z.v)))
}

pub fn retract<M: KahlerManifold>(m: &M, base: &M::Elem, h: &M::Elem) -> Result<M::Elem> {
    m.check_ambient(h)?;
    m.retract(base, h)
}

/// Complex coordinates `⟨x⟩_j = h(x, e_j) + i h(x, J e_j)` in a frame.
pub fn coordinates<M: KahlerManifold>(
    m: &M,
    p: &M::Elem,
    frame: &[M::Elem],
    x: &M::Elem,
) -> Vec<Complex64> {
    frame.iter().map(|e| m.hermitian(p, x, e)).collect()
}

/// Inverse of `coordinates`: `sum_j (Re c_j + Im c_j J) e_j`.
pub fn from_coordinates<M: KahlerManifold>(
    m: &M,
    p: &M::Elem,
    frame: &[M::Elem],
    coords: &[Complex64],
) -> M::Elem {
    frame
        .iter()
        .zip(coords)
        .fold(M::Elem::zero(), |acc, (e, c)| acc + m.complex_scale(p, *c, e))
}

/// Largest deviation of `{e_j, J e_j}` from a real orthonormal basis.
pub fn frame_defect<M: KahlerManifold>(m: &M, p: &M::Elem, frame: &[M::Elem]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, ei) in frame.iter().enumerate() {
        for (j, ej) in frame.iter().enumerate() {
            let g = m.hermitian(p, ei, ej);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g.re - target).abs()).max(g.im.abs());
        }
    }
    worst
}
