//! Uniform grids on `[-L, L]`, finite-difference stencils and quadratures.

use serde::{Deserialize, Serialize};

use crate::ambient::Ambient;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

impl Grid {
    /// Smallest node count supported by the five-point stencils.
    pub const MIN_NODES: usize = 7;

    pub fn new(l: f64, m: usize) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Config(format!("half-width L must be positive, got {l}")));
        }
        if m < Self::MIN_NODES {
            return Err(Error::Config(format!(
                "at least {} nodes required, got {m}",
                Self::MIN_NODES
            )));
        }
        Ok(Self { l, m })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / (self.m - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.x(i)).collect()
    }

    /// Grid with half the spacing on the same interval.
    pub fn refined(&self) -> Self {
        Self {
            l: self.l,
            m: 2 * self.m - 1,
        }
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.m {
            return Err(Error::GridMismatch {
                expected: self.m,
                actual: len,
            });
        }
        Ok(())
    }
}

fn stencil<A: Ambient>(f: &[A], i: usize, offsets: &[(isize, f64)], scale: f64) -> A {
    offsets
        .iter()
        .fold(A::zero(), |acc, &(o, w)| acc + f[(i as isize + o) as usize] * w)
        * scale
}

/// First derivative: fourth-order centered in the interior, second-order at
/// the two outermost nodes on each side.
pub fn d1<A: Ambient>(f: &[A], h: f64) -> Vec<A> {
    let m = f.len();
    assert!(m >= Grid::MIN_NODES, "d1 needs at least {} nodes", Grid::MIN_NODES);
    let s = 1.0 / h;
    (0..m)
        .map(|i| match i {
            0 => stencil(f, i, &[(0, -1.5), (1, 2.0), (2, -0.5)], s),
            1 => stencil(f, i, &[(-1, -0.5), (1, 0.5)], s),
            _ if i == m - 2 => stencil(f, i, &[(-1, -0.5), (1, 0.5)], s),
            _ if i == m - 1 => stencil(f, i, &[(0, 1.5), (-1, -2.0), (-2, 0.5)], s),
            _ => stencil(
                f,
                i,
                &[(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)],
                s,
            ),
        })
        .collect()
}

/// Second derivative with the same order pattern as [`d1`].
pub fn d2<A: Ambient>(f: &[A], h: f64) -> Vec<A> {
    let m = f.len();
    assert!(m >= Grid::MIN_NODES, "d2 needs at least {} nodes", Grid::MIN_NODES);
    let s = 1.0 / (h * h);
    (0..m)
        .map(|i| match i {
            0 => stencil(f, i, &[(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)], s),
            1 => stencil(f, i, &[(-1, 1.0), (0, -2.0), (1, 1.0)], s),
            _ if i == m - 2 => stencil(f, i, &[(-1, 1.0), (0, -2.0), (1, 1.0)], s),
            _ if i == m - 1 => stencil(f, i, &[(0, 2.0), (-1, -5.0), (-2, 4.0), (-3, -1.0)], s),
            _ => stencil(
                f,
                i,
                &[
                    (-2, -1.0 / 12.0),
                    (-1, 16.0 / 12.0),
                    (0, -30.0 / 12.0),
                    (1, 16.0 / 12.0),
                    (2, -1.0 / 12.0),
                ],
                s,
            ),
        })
        .collect()
}

pub fn trapezoid<A: Ambient>(f: &[A], h: f64) -> A {
    let m = f.len();
    if m < 2 {
        return A::zero();
    }
    let inner = f[1..m - 1].iter().fold(A::zero(), |acc, v| acc + *v);
    (inner + (f[0] + f[m - 1]) * 0.5) * h
}

/// `F_i = ∫_{x_0}^{x_i} f` by the trapezoid rule, `F_0 = 0`.
pub fn cumulative_trapezoid<A: Ambient>(f: &[A], h: f64) -> Vec<A> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = A::zero();
    out.push(acc);
    for w in f.windows(2) {
        acc = acc + (w[0] + w[1]) * (0.5 * h);
        out.push(acc);
    }
    out
}

/// Nodes of the two-point Gauss–Legendre rule on `[0, 1]`.
pub const GAUSS2: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];

/// Cumulative line integral along a piecewise-linear path. `seg(i, s)`
/// evaluates the integrand on segment `i` at local parameter `s ∈ [0, 1]`,
/// already multiplied by the segment's parameter increment. Exact for
/// integrands of degree at most three in `s`. Returns `segments + 1` values
/// starting from zero.
pub fn cumulative_line_integral<A: Ambient>(segments: usize, seg: impl Fn(usize, f64) -> A) -> Vec<A> {
    let mut out = Vec::with_capacity(segments + 1);
    let mut acc = A::zero();
    out.push(acc);
    for i in 0..segments {
        acc = acc + (seg(i, GAUSS2[0]) + seg(i, GAUSS2[1])) * 0.5;
        out.push(acc);
    }
    out
}
