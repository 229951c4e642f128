//! Linear ambient spaces that host manifold points and tangent vectors.

use std::fmt::Debug;
use std::ops::{Add, Deref, DerefMut, Mul, Neg, Sub};

use nalgebra::{SMatrix, Vector3};
use num_complex::Complex64;

/// A finite-dimensional real inner-product space used as the embedding
/// space of a backend. Points and tangent vectors share this representation.
pub trait Ambient:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + 'static
{
    fn zero() -> Self;

    /// Real Euclidean (Frobenius) inner product of the embedding space.
    fn dot(&self, other: &Self) -> f64;

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Largest absolute entry; used for sup-norm diagnostics.
    fn max_abs(&self) -> f64;

    /// Real coordinates for serialization (complex entries as re, im pairs,
    /// matrices row-major).
    fn to_flat(&self) -> Vec<f64>;

    /// Inverse of [`Ambient::to_flat`]; `None` on a length mismatch.
    fn from_flat(v: &[f64]) -> Option<Self>;
}

impl Ambient for f64 {
    fn zero() -> Self {
        0.0
    }

    fn dot(&self, other: &Self) -> f64 {
        self * other
    }

    fn max_abs(&self) -> f64 {
        self.abs()
    }

    fn to_flat(&self) -> Vec<f64> {
        vec![*self]
    }

    fn from_flat(v: &[f64]) -> Option<Self> {
        match v {
            [x] => Some(*x),
            _ => None,
        }
    }
}

impl Ambient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn dot(&self, other: &Self) -> f64 {
        self.re * other.re + self.im * other.im
    }

    fn max_abs(&self) -> f64 {
        self.norm()
    }

    fn to_flat(&self) -> Vec<f64> {
        vec![self.re, self.im]
    }

    fn from_flat(v: &[f64]) -> Option<Self> {
        match v {
            [re, im] => Some(Complex64::new(*re, *im)),
            _ => None,
        }
    }
}

impl Ambient for Vector3<f64> {
    fn zero() -> Self {
        Vector3::zeros()
    }

    fn dot(&self, other: &Self) -> f64 {
        Vector3::dot(self, other)
    }

    fn max_abs(&self) -> f64 {
        self.amax()
    }

    fn to_flat(&self) -> Vec<f64> {
        self.iter().copied().collect()
    }

    fn from_flat(v: &[f64]) -> Option<Self> {
        (v.len() == 3).then(|| Vector3::new(v[0], v[1], v[2]))
    }
}

/// Dense complex `N x N` matrix stored inline. Used for Hermitian projectors,
/// tangent vectors of the projector model, and unitary lifts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub SMatrix<Complex64, N, N>);

impl<const N: usize> CMat<N> {
    pub fn identity() -> Self {
        CMat(SMatrix::identity())
    }

    pub fn from_fn(f: impl FnMut(usize, usize) -> Complex64) -> Self {
        CMat(SMatrix::from_fn(f))
    }

    pub fn adjoint(&self) -> Self {
        CMat(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale_c(&self, c: Complex64) -> Self {
        CMat(self.0 * c)
    }

    /// `self * rhs` as matrices.
    pub fn mm(&self, rhs: &Self) -> Self {
        CMat(self.0 * rhs.0)
    }

    /// Matrix commutator `[self, rhs]`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        CMat(self.0 * rhs.0 - rhs.0 * self.0)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }

    /// Frobenius norm of the anti-Hermitian part.
    pub fn hermitian_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).norm()
    }
}

impl<const N: usize> Deref for CMat<N> {
    type Target = SMatrix<Complex64, N, N>;
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<const N: usize> DerefMut for CMat<N> {
    fn deref_mut(&mut self) -> &mut Self::Target {
        &mut self.0
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        CMat(self.0 + rhs.0)
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        CMat(self.0 - rhs.0)
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        CMat(-self.0)
    }
}

impl<const N: usize> Mul<f64> for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        CMat(self.0 * Complex64::new(rhs, 0.0))
    }
}

impl<const N: usize> Ambient for CMat<N> {
    fn zero() -> Self {
        CMat(SMatrix::zeros())
    }

    fn dot(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * N * N);
        for r in 0..N {
            for c in 0..N {
                out.push(self.0[(r, c)].re);
                out.push(self.0[(r, c)].im);
            }
        }
        out
    }

    fn from_flat(v: &[f64]) -> Option<Self> {
        (v.len() == 2 * N * N)
            .then(|| CMat::from_fn(|r, c| Complex64::new(v[2 * (r * N + c)], v[2 * (r * N + c) + 1])))
    }
}

/// Linear combination `sum_k w_k * x_k`.
pub fn combine<A: Ambient>(terms: &[(f64, A)]) -> A {
    terms.iter().fold(A::zero(), |acc, (w, x)| acc + *x * *w)
}
