//! Flat 3-dimensional entries (Euclidean and Minkowski) and their explicit
//! solutions: planar circles and lines, constant-acceleration hyperbolae and
//! the null-acceleration parabola.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CGDeriv, CatalogEntry, CatalogId, KillingQData, KillingQField, SpecializedRhs};
use crate::error::{Error, Result};
use crate::frame::{frame_norm, CGState, Chart, CurveClass, FrameMetric, NamedInvariant, Vector, MAX_DIM};

fn identity_frame() -> [[f64; MAX_DIM]; MAX_DIM] {
    let mut e = [[0.0; MAX_DIM]; MAX_DIM];
    for (i, row) in e.iter_mut().enumerate().take(3) {
        row[i] = 1.0;
    }
    e
}

fn flat_metric(eta: Vector) -> FrameMetric {
    FrameMetric::new(
        3,
        eta,
        Chart::unrestricted(vec!["x", "y", "z"]),
        |_x| [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM],
        |_x| [[0.0; MAX_DIM]; MAX_DIM],
        |_x| identity_frame(),
    )
}

/// Einstein-space specialized system: udot = a, adot = -eps |a|^2 u.
fn einstein_flat_rhs(eta: Vector) -> SpecializedRhs {
    SpecializedRhs {
        rhs: Arc::new(move |s: &CGState, sig| {
            let a2 = frame_norm(&eta[..3], &s.a[..3]).unwrap();
            let mut adot = [0.0; MAX_DIM];
            for i in 0..3 {
                adot[i] = -sig.epsilon * a2 * s.u[i];
            }
            CGDeriv {
                xdot: s.u,
                udot: s.a,
                adot,
            }
        }),
        applies: Arc::new(|_s| true),
    }
}

/// Rotation Killing fields about the coordinate axes plus the translations.
fn e3_killing_q() -> Vec<KillingQField> {
    let mut out = Vec::new();
    for (axis, name) in [(0usize, "rot-x"), (1, "rot-y"), (2, "rot-z")] {
        out.push(KillingQField {
            name: name.to_string(),
            eval: Arc::new(move |x: &[f64]| {
                let mut n = [0.0f64; 3];
                n[axis] = 1.0;
                // K = n x x, M_ab = d_a K_b
                let k = [
                    n[1] * x[2] - n[2] * x[1],
                    n[2] * x[0] - n[0] * x[2],
                    n[0] * x[1] - n[1] * x[0],
                ];
                let mut m = [[0.0; MAX_DIM]; MAX_DIM];
                // M_{ab} = eps_{bca} n^c
                m[0][1] = n[2];
                m[1][0] = -n[2];
                m[1][2] = n[0];
                m[2][1] = -n[0];
                m[2][0] = n[1];
                m[0][2] = -n[1];
                KillingQData {
                    k: [k[0], k[1], k[2], 0.0],
                    m,
                }
            }),
        });
    }
    for (axis, name) in [(0usize, "trans-x"), (1, "trans-y"), (2, "trans-z")] {
        out.push(KillingQField {
            name: name.to_string(),
            eval: Arc::new(move |_x: &[f64]| {
                let mut k = [0.0; MAX_DIM];
                k[axis] = 1.0;
                KillingQData {
                    k,
                    m: [[0.0; MAX_DIM]; MAX_DIM],
                }
            }),
        });
    }
    out
}

pub fn e3_entry() -> CatalogEntry {
    let eta = [1.0, 1.0, 1.0, 0.0];
    CatalogEntry {
        id: CatalogId::E3,
        params: BTreeMap::new(),
        metric: flat_metric(eta),
        curve_classes: vec![CurveClass::Riemannian],
        specialized: Some(einstein_flat_rhs(eta)),
        invariants: vec![NamedInvariant::new("a_norm2", move |s: &CGState| {
            frame_norm(&eta[..3], &s.a[..3]).unwrap()
        })],
        killing_fields: Vec::new(),
        killing_q: e3_killing_q(),
        radial: Some(Arc::new(|s: &CGState| {
            (s.x[0] * s.x[0] + s.x[1] * s.x[1] + s.x[2] * s.x[2]).sqrt()
        })),
        degenerate_flags: Vec::new(),
    }
}

pub fn m3_entry() -> CatalogEntry {
    let eta = [-1.0, 1.0, 1.0, 0.0];
    CatalogEntry {
        id: CatalogId::M3,
        params: BTreeMap::new(),
        metric: flat_metric(eta),
        curve_classes: vec![CurveClass::LorentzTimelike, CurveClass::LorentzSpacelike],
        specialized: Some(einstein_flat_rhs(eta)),
        invariants: vec![NamedInvariant::new("a_norm2", move |s: &CGState| {
            frame_norm(&eta[..3], &s.a[..3]).unwrap()
        })],
        killing_fields: Vec::new(),
        killing_q: Vec::new(),
        radial: None,
        degenerate_flags: Vec::new(),
    }
}

/// Closed-form flat-space conformal geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatKind {
    Circle,
    Geodesic,
    TimelikeHyperbola,
    SpacelikeHyperbola,
    NullAccelParabola,
}

/// Position at parameter `t` of the explicit flat-space solution with initial
/// data `(x0, u0, a0)`. The applicable kind depends on the causal character
/// of `a0`; mismatched data is rejected.
pub fn flat_explicit(
    kind: FlatKind,
    eta: &[f64],
    x0: &Vector,
    u0: &Vector,
    a0: &Vector,
    t: f64,
) -> Result<Vector> {
    let n = eta.len();
    let a_norm2 = frame_norm(eta, &a0[..n])?;
    let mut x = [0.0; MAX_DIM];
    match kind {
        FlatKind::Geodesic => {
            for i in 0..n {
                x[i] = x0[i] + t * u0[i];
            }
        }
        FlatKind::Circle => {
            if a_norm2 <= 0.0 {
                return Err(Error::Infeasible(
                    "Circle requires space-like acceleration; use Geodesic for a = 0".into(),
                ));
            }
            let am = a_norm2.sqrt();
            for i in 0..n {
                x[i] = x0[i] + u0[i] * (am * t).sin() / am
                    + a0[i] * (1.0 - (am * t).cos()) / (am * am);
            }
        }
        FlatKind::TimelikeHyperbola | FlatKind::SpacelikeHyperbola => {
            // time-like u with space-like a, or space-like u with time-like a;
            // either way udotdot = +A^2 u with A^2 = |g(a,a)|
            let expected_sign = if kind == FlatKind::TimelikeHyperbola {
                1.0
            } else {
                -1.0
            };
            if a_norm2 * expected_sign <= 0.0 {
                return Err(Error::Infeasible(
                    "hyperbola kinds need a non-null acceleration of the matching character"
                        .into(),
                ));
            }
            let am = a_norm2.abs().sqrt();
            for i in 0..n {
                x[i] = x0[i] + u0[i] * (am * t).sinh() / am
                    + a0[i] * ((am * t).cosh() - 1.0) / (am * am);
            }
        }
        FlatKind::NullAccelParabola => {
            if a_norm2.abs() > 1e-12 {
                return Err(Error::Infeasible("parabola requires a null acceleration".into()));
            }
            for i in 0..n {
                x[i] = x0[i] + t * u0[i] + 0.5 * t * t * a0[i];
            }
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::frame_inner;

    #[test]
    fn circle_closes_after_period() {
        let eta = [1.0, 1.0, 1.0];
        let x0 = [0.0; MAX_DIM];
        let u0 = [1.0, 0.0, 0.0, 0.0];
        let a0 = [0.0, 1.0, 0.0, 0.0];
        let x = flat_explicit(FlatKind::Circle, &eta, &x0, &u0, &a0, 2.0 * std::f64::consts::PI)
            .unwrap();
        for i in 0..3 {
            assert!((x[i] - x0[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn geodesic_is_linear() {
        let eta = [1.0, 1.0, 1.0];
        let x = flat_explicit(
            FlatKind::Geodesic,
            &eta,
            &[1.0, 2.0, 3.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0; MAX_DIM],
            2.5,
        )
        .unwrap();
        assert_eq!(&x[..3], &[1.0, 2.0, 5.5]);
    }

    #[test]
    fn circle_with_zero_acceleration_directs_to_geodesic() {
        let eta = [1.0, 1.0, 1.0];
        let err = flat_explicit(
            FlatKind::Circle,
            &eta,
            &[0.0; MAX_DIM],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0; MAX_DIM],
            1.0,
        );
        assert!(matches!(err, Err(Error::Infeasible(_))));
    }

    #[test]
    fn null_parabola_stays_in_null_hyperplane() {
        let eta = [-1.0, 1.0, 1.0];
        let x0 = [0.0; MAX_DIM];
        // space-like u orthogonal to the null a = (1, 1, 0)
        let u0 = [0.0, 0.0, 1.0, 0.0];
        let a0 = [1.0, 1.0, 0.0, 0.0];
        assert!(frame_norm(&eta, &a0[..3]).unwrap().abs() < 1e-15);
        for k in 0..20 {
            let t = k as f64 * 0.37;
            let x = flat_explicit(FlatKind::NullAccelParabola, &eta, &x0, &u0, &a0, t).unwrap();
            let dx = [x[0] - x0[0], x[1] - x0[1], x[2] - x0[2]];
            let plane = frame_inner(&eta, &a0[..3], &dx).unwrap();
            assert!(plane.abs() < 1e-12, "t={t} plane={plane}");
        }
    }

    #[test]
    fn timelike_hyperbola_preserves_norms() {
        let eta = [-1.0, 1.0, 1.0];
        let x0 = [0.0; MAX_DIM];
        let u0 = [1.0, 0.0, 0.0, 0.0];
        let a0 = [0.0, 0.5, 0.0, 0.0];
        // velocity from differentiating the closed form
        let am = 0.5;
        for k in 1..10 {
            let t = k as f64 * 0.3;
            let u = [
                u0[0] * (am * t).cosh() + a0[0] * (am * t).sinh() / am,
                u0[1] * (am * t).cosh() + a0[1] * (am * t).sinh() / am,
                u0[2] * (am * t).cosh() + a0[2] * (am * t).sinh() / am,
            ];
            let n = frame_norm(&eta, &u).unwrap();
            assert!((n + 1.0).abs() < 1e-12, "|u|^2 = {n}");
            let x = flat_explicit(FlatKind::TimelikeHyperbola, &eta, &x0, &u0, &a0, t).unwrap();
            assert!(x[0] > 0.0 && x[1] > 0.0);
        }
    }
}
