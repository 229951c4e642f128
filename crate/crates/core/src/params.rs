//! Flow coefficients and their derived constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights of the energy `E = α/2 ∫h(u_x,u_x) + β/2 ∫h(∇u_x,∇u_x) + γ ∫h(R(u_x,Ju_x)Ju_x,u_x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Coefficients of `u_t = a J∇³u_x + λ J∇u_x + b R(∇u_x,u_x)Ju_x + c R(Ju_x,u_x)∇u_x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<EnergyWeights>,
}

/// The six cubic-term coefficients of the transformed system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DCoeffs {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    pub d6: f64,
}

impl DCoeffs {
    pub fn as_array(&self) -> [f64; 6] {
        [self.d1, self.d2, self.d3, self.d4, self.d5, self.d6]
    }
}

impl FlowParams {
    pub fn new(a: f64, b: f64, c: f64, lambda: f64) -> Result<Self> {
        if ![a, b, c, lambda].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("flow coefficients must be finite".into()));
        }
        if a == 0.0 {
            return Err(Error::Config("the fourth-order coefficient a must be nonzero".into()));
        }
        Ok(Self {
            a,
            b,
            c,
            lambda,
            source: None,
        })
    }

    /// Hamiltonian parameters: `a = β`, `b = β + 8γ`, `c = 3(a - b)/2`, `λ = -α`.
    pub fn from_energy(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let a = beta;
        let b = beta + 8.0 * gamma;
        let mut p = Self::new(a, b, 1.5 * (a - b), -alpha)?;
        p.source = Some(EnergyWeights { alpha, beta, gamma });
        Ok(p)
    }

    pub fn d_coeffs(&self) -> DCoeffs {
        let (a, b, c) = (self.a, self.b, self.c);
        DCoeffs {
            d1: -a - b - 2.0 * c,
            d2: -a + b,
            d3: a + b - 2.0 * c,
            d4: -b - 2.0 * c,
            d5: a - b - 2.0 * c,
            d6: a + b,
        }
    }

    /// Whether `c = 3(a - b)/2`, the relation under which the flow is the
    /// Hamiltonian flow of an energy.
    pub fn is_hamiltonian(&self) -> bool {
        let target = 1.5 * (self.a - self.b);
        (self.c - target).abs() <= 1e-14 * (1.0 + target.abs())
    }

    /// Energy weights generating this flow, when it is Hamiltonian.
    pub fn energy_weights(&self) -> Option<EnergyWeights> {
        if let Some(w) = self.source {
            return Some(w);
        }
        self.is_hamiltonian().then(|| EnergyWeights {
            alpha: -self.lambda,
            beta: self.a,
            gamma: (self.b - self.a) / 8.0,
        })
    }

    /// `(γ1, γ2) = (a, -(5a - b)/2)` of the scalar fourth-order NLS.
    pub fn nls_gammas(&self) -> (f64, f64) {
        (self.a, -(5.0 * self.a - self.b) / 2.0)
    }
}
