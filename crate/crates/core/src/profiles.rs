//! Deterministic initial profiles `Q(x)` used to seed experiments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::ComplexProfile;
use crate::grid::Grid;

/// One modulated Gaussian `amplitude · exp(-(x - center)² / (2 width²)) · e^{i(carrier x + phase)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMode {
    pub component: usize,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub carrier: f64,
    pub phase: f64,
}

impl GaussianMode {
    pub fn eval(&self, x: f64) -> Complex64 {
        let s = (x - self.center) / self.width;
        Complex64::from_polar(self.amplitude * (-0.5 * s * s).exp(), self.carrier * x + self.phase)
    }
}

fn check_width(width: f64) -> Result<()> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Config(format!("profile width must be positive, got {width}")));
    }
    Ok(())
}

/// Sum of Gaussian modes.
pub fn gaussian_mixture(grid: Grid, n: usize, modes: &[GaussianMode]) -> Result<ComplexProfile> {
    for m in modes {
        check_width(m.width)?;
        if m.component >= n {
            return Err(Error::Config(format!("mode component {} out of range for n = {n}", m.component)));
        }
    }
    ComplexProfile::from_fn(grid, n, |x| {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for m in modes {
            v[m.component] += m.eval(x);
        }
        v
    })
}

/// Gaussian envelope in every component, centers spread by `width / 2` and
/// phases by `π/3`, so that no component is a multiple of another.
pub fn gaussian_envelope(grid: Grid, n: usize, amplitude: f64, width: f64, carrier: f64) -> Result<ComplexProfile> {
    let modes: Vec<_> = (0..n)
        .map(|j| GaussianMode {
            component: j,
            amplitude,
            center: (j as f64 - 0.5 * (n as f64 - 1.0)) * 0.5 * width,
            width,
            carrier,
            phase: j as f64 * std::f64::consts::FRAC_PI_3,
        })
        .collect();
    gaussian_mixture(grid, n, &modes)
}

/// Real Gaussian in the first component: the curve runs along one geodesic.
pub fn great_circle_bump(grid: Grid, n: usize, amplitude: f64, width: f64) -> Result<ComplexProfile> {
    let mode = GaussianMode {
        component: 0,
        amplitude,
        center: 0.0,
        width,
        carrier: 0.0,
        phase: 0.0,
    };
    gaussian_mixture(grid, n, &[mode])
}
