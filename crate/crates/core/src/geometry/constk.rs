use num_complex::Complex64;

use super::{Grassmann, KahlerManifold};
use crate::ambient::CMat;
use crate::error::{Error, Result};

/// Kähler manifold of complex dimension `N - 1` with constant holomorphic
/// sectional curvature `K`, realized on the projector model of `G(N, 1)`
/// (complex projective space) with the curvature tensor rescaled by `K / 4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstK<const N: usize> {
    k: f64,
    inner: Grassmann<N>,
}

impl<const N: usize> ConstK<N> {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::Config("holomorphic sectional curvature must be finite".into()));
        }
        Ok(Self {
            k,
            inner: Grassmann::new(1)?,
        })
    }

    pub fn curvature_constant(&self) -> f64 {
        self.k
    }

    pub fn projector_model(&self) -> &Grassmann<N> {
        &self.inner
    }
}

impl<const N: usize> KahlerManifold for ConstK<N> {
    type Elem = CMat<N>;

    fn label(&self) -> String {
        format!("ConstK(n={}, K={})", N - 1, self.k)
    }

    fn complex_dim(&self) -> usize {
        N - 1
    }

    fn origin(&self) -> CMat<N> {
        self.inner.origin()
    }

    fn origin_frame(&self) -> Vec<CMat<N>> {
        self.inner.origin_frame()
    }

    fn point_defect(&self, p: &CMat<N>) -> f64 {
        self.inner.point_defect(p)
    }

    fn tangent_defect(&self, p: &CMat<N>, v: &CMat<N>) -> f64 {
        self.inner.tangent_defect(p, v)
    }

    fn check_ambient(&self, h: &CMat<N>) -> Result<()> {
        self.inner.check_ambient(h)
    }

    fn metric(&self, p: &CMat<N>, x: &CMat<N>, y: &CMat<N>) -> f64 {
        self.inner.metric(p, x, y)
    }

    fn complex_structure(&self, p: &CMat<N>, x: &CMat<N>) -> CMat<N> {
        self.inner.complex_structure(p, x)
    }

    fn project(&self, p: &CMat<N>, h: &CMat<N>) -> CMat<N> {
        self.inner.project(p, h)
    }

    fn curvature(&self, p: &CMat<N>, x: &CMat<N>, y: &CMat<N>, z: &CMat<N>) -> CMat<N> {
        self.inner
            .curvature(p, x, y, z)
            .scale_c(Complex64::new(self.k / 4.0, 0.0))
    }

    fn retract(&self, p: &CMat<N>, h: &CMat<N>) -> Result<CMat<N>> {
        self.inner.retract(p, h)
    }
}
