//! Backend selection and the per-backend data the harness needs.

use std::fmt;

use hasimoto_core::ambient::CMat;
use hasimoto_core::flow_q::QVariant;
use hasimoto_core::frames::{co_diagonal_lift, lift_connection, lift_profile, ComplexProfile, DiscreteCurve};
use hasimoto_core::geometry::{ConstK, Grassmann, KahlerManifold, Sphere2};
use hasimoto_core::tensor::{s_const_k, s_grassmann, Tensor4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Largest ambient matrix size compiled in.
pub const MAX_N0: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendSpec {
    Sphere2,
    Grassmann { n0: usize, k0: usize },
    ConstK { n: usize, k: f64 },
}

impl BackendSpec {
    pub fn complex_dim(&self) -> usize {
        match self {
            Self::Sphere2 => 1,
            Self::Grassmann { n0, k0 } => k0 * (n0 - k0),
            Self::ConstK { n, .. } => *n,
        }
    }

    pub fn is_grassmann(&self) -> bool {
        matches!(self, Self::Grassmann { .. })
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sphere2 => write!(f, "S2"),
            Self::Grassmann { n0, k0 } => write!(f, "G({n0},{k0})"),
            Self::ConstK { n, k } => write!(f, "ConstK(n={n},K={k})"),
        }
    }
}

/// Closed forms and transformed systems attached to a backend.
pub trait Backend: KahlerManifold {
    /// `S` in any parallel frame, when it is frame-independent in closed form.
    fn closed_form_s(&self) -> Tensor4;

    /// The transformed system solved by `Q`.
    fn q_variant(&self) -> QVariant;

    /// Base points `C A0 C*` and frames `C e_j^0 C*` from the co-diagonal
    /// lift, on Grassmannians.
    #[allow(clippy::type_complexity)]
    fn lift_frames(&self, _curve: &DiscreteCurve<Self::Elem>) -> Option<Result<Vec<(Self::Elem, Vec<Self::Elem>)>>> {
        None
    }

    /// `-C12` from the co-diagonal lift, on Grassmannians.
    fn lift_q(&self, _curve: &DiscreteCurve<Self::Elem>) -> Option<Result<ComplexProfile>> {
        None
    }
}

impl Backend for Sphere2 {
    fn closed_form_s(&self) -> Tensor4 {
        Tensor4::from_fn(1, |_, _, _, _| Complex64::new(0.5, 0.0))
    }

    fn q_variant(&self) -> QVariant {
        QVariant::Riemann { kappa: 1.0 }
    }
}

impl<const N: usize> Backend for ConstK<N> {
    fn closed_form_s(&self) -> Tensor4 {
        s_const_k(N - 1, self.curvature_constant())
    }

    fn q_variant(&self) -> QVariant {
        QVariant::ConstK {
            n: N - 1,
            k: self.curvature_constant(),
        }
    }
}

impl<const N: usize> Backend for Grassmann<N> {
    fn closed_form_s(&self) -> Tensor4 {
        s_grassmann(self.k0(), self.m0())
    }

    fn q_variant(&self) -> QVariant {
        QVariant::Grassmann {
            k0: self.k0(),
            m0: self.m0(),
        }
    }

    fn lift_frames(&self, curve: &DiscreteCurve<CMat<N>>) -> Option<Result<Vec<(CMat<N>, Vec<CMat<N>>)>>> {
        let a0 = self.origin();
        Some(
            co_diagonal_lift(self, curve)
                .map(|lift| {
                    lift.iter()
                        .map(|c| (c.mm(&a0).mm(&c.adjoint()), self.frame_from_unitary(c)))
                        .collect()
                })
                .map_err(Into::into),
        )
    }

    fn lift_q(&self, curve: &DiscreteCurve<CMat<N>>) -> Option<Result<ComplexProfile>> {
        Some((|| {
            let lift = co_diagonal_lift(self, curve)?;
            let conn = lift_connection(self, curve, &lift);
            Ok(lift_profile(self, curve.grid, &conn)?)
        })())
    }
}

/// Runs `$body` with `$m` bound to the concrete backend selected by `$spec`.
/// The enclosing function must return [`crate::error::Result`].
#[macro_export]
macro_rules! with_backend {
    ($spec:expr, $m:ident => $body:expr) => {{
        use ::hasimoto_core::geometry::{ConstK, Grassmann, Sphere2};
        use $crate::backend::BackendSpec as B;
        match $spec {
            B::Sphere2 => {
                let $m = Sphere2;
                $body
            }
            B::Grassmann { n0, k0 } => match *n0 {
                2 => {
                    let $m = Grassmann::<2>::new(*k0)?;
                    $body
                }
                3 => {
                    let $m = Grassmann::<3>::new(*k0)?;
                    $body
                }
                4 => {
                    let $m = Grassmann::<4>::new(*k0)?;
                    $body
                }
                5 => {
                    let $m = Grassmann::<5>::new(*k0)?;
                    $body
                }
                6 => {
                    let $m = Grassmann::<6>::new(*k0)?;
                    $body
                }
                other => Err($crate::error::BenchError::Config(format!(
                    "Grassmannian ambient size {other} outside 2..={}",
                    $crate::backend::MAX_N0
                ))),
            },
            B::ConstK { n, k } => match *n + 1 {
                2 => {
                    let $m = ConstK::<2>::new(*k)?;
                    $body
                }
                3 => {
                    let $m = ConstK::<3>::new(*k)?;
                    $body
                }
                4 => {
                    let $m = ConstK::<4>::new(*k)?;
                    $body
                }
                5 => {
                    let $m = ConstK::<5>::new(*k)?;
                    $body
                }
                6 => {
                    let $m = ConstK::<6>::new(*k)?;
                    $body
                }
                _ => Err($crate::error::BenchError::Config(format!(
                    "ConstK dimension {n} outside 1..={}",
                    $crate::backend::MAX_N0 - 1
                ))),
            },
        }
    }};
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::BenchError;
    use hasimoto_core::frames::reconstruct;
    use hasimoto_core::grid::Grid;
    use hasimoto_core::profiles::gaussian_envelope;

    fn dims(spec: &BackendSpec) -> Result<(usize, String)> {
        with_backend!(spec, m => Ok((m.complex_dim(), m.label())))
    }

    #[test]
    fn dispatch_matches_spec() {
        for spec in [
            BackendSpec::Sphere2,
            BackendSpec::Grassmann { n0: 5, k0: 2 },
            BackendSpec::ConstK { n: 2, k: -1.0 },
        ] {
            let (n, _) = dims(&spec).unwrap();
            assert_eq!(n, spec.complex_dim());
        }
        assert_eq!(BackendSpec::Grassmann { n0: 4, k0: 2 }.to_string(), "G(4,2)");
        let too_big = BackendSpec::Grassmann { n0: 9, k0: 1 };
        assert!(matches!(dims(&too_big), Err(BenchError::Config(_))));
    }

    #[test]
    fn spec_serializes_with_kind_tag() {
        let text = serde_json::to_string(&BackendSpec::Grassmann { n0: 3, k0: 1 }).unwrap();
        assert_eq!(text, r#"{"kind":"grassmann","n0":3,"k0":1}"#);
        let back: BackendSpec = serde_json::from_str(r#"{"kind":"const_k","n":3,"k":4.0}"#).unwrap();
        assert_eq!(back, BackendSpec::ConstK { n: 3, k: 4.0 });
    }

    #[test]
    fn lift_data_exists_only_on_grassmannians() {
        let grid = Grid::new(8.0, 65).unwrap();
        let g = Grassmann::<3>::new(1).unwrap();
        let q = gaussian_envelope(grid, 2, 0.3, 1.0, 0.0).unwrap();
        let (curve, _) = reconstruct(&g, &q, &g.origin(), &g.origin_frame()).unwrap();
        let frames = g.lift_frames(&curve).unwrap().unwrap();
        assert_eq!(frames.len(), grid.m);
        assert_eq!(frames[0].1.len(), g.complex_dim());
        assert!(g.lift_q(&curve).unwrap().unwrap().max_diff(&q) < 1e-2);

        let (curve, _) = reconstruct(&Sphere2, &gaussian_envelope(grid, 1, 0.3, 1.0, 0.0).unwrap(), &Sphere2.origin(), &Sphere2.origin_frame()).unwrap();
        assert!(Sphere2.lift_frames(&curve).is_none());
        assert!(Sphere2.lift_q(&curve).is_none());
    }
}
