use nalgebra::Vector3;

use super::KahlerManifold;
use crate::error::{Error, Result};

/// Unit sphere `S² ⊂ ℝ³` with `J_u = u ∧` and Gaussian curvature 1.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Sphere2;

impl Sphere2 {
    pub const GAUSSIAN_CURVATURE: f64 = 1.0;

    /// Smallest ambient norm accepted by the normalizing retraction.
    pub const MIN_NORM: f64 = 1e-8;
}

impl KahlerManifold for Sphere2 {
    type Elem = Vector3<f64>;

    fn label(&self) -> String {
        "S2".into()
    }

    fn complex_dim(&self) -> usize {
        1
    }

    fn origin(&self) -> Vector3<f64> {
        Vector3::z()
    }

    fn origin_frame(&self) -> Vec<Vector3<f64>> {
        vec![Vector3::x()]
    }

    fn point_defect(&self, p: &Vector3<f64>) -> f64 {
        (p.norm() - 1.0).abs()
    }

    fn tangent_defect(&self, p: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        p.dot(v).abs()
    }

    fn check_ambient(&self, h: &Vector3<f64>) -> Result<()> {
        if h.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain("non-finite ambient vector".into()))
        }
    }

    fn metric(&self, _p: &Vector3<f64>, x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
        x.dot(y)
    }

    fn complex_structure(&self, p: &Vector3<f64>, x: &Vector3<f64>) -> Vector3<f64> {
        p.cross(x)
    }

    fn project(&self, p: &Vector3<f64>, h: &Vector3<f64>) -> Vector3<f64> {
        h - p * p.dot(h)
    }

    fn curvature(
        &self,
        _p: &Vector3<f64>,
        x: &Vector3<f64>,
        y: &Vector3<f64>,
        z: &Vector3<f64>,
    ) -> Vector3<f64> {
        (x * y.dot(z) - y * x.dot(z)) * Self::GAUSSIAN_CURVATURE
    }

    fn retract(&self, _p: &Vector3<f64>, h: &Vector3<f64>) -> Result<Vector3<f64>> {
        let n = h.norm();
        if !(n >= Self::MIN_NORM) {
            return Err(Error::Retraction(format!("ambient vector too short ({n:e})")));
        }
        Ok(h / n)
    }
}
