//! Riemannian and Lorentzian *Nil*: metric `dx^2 + eps dy^2 + (dz - lambda x dy)^2`
//! with the orthonormal frame `e1 = d/dx, e2 = d/dy + lambda x d/dz, e3 = d/dz`.
//!
//! Frame connection (Riemannian):
//!   `G^1_23 = G^1_32 = G^3_12 = lambda/2, G^2_13 = G^2_31 = G^3_21 = -lambda/2`
//! and Ricci `diag(-l^2/2, -l^2/2, l^2/2)`; Lorentzian flips the signs of
//! `G^2_13, G^2_31` and has Ricci `diag(l^2/2, -l^2/2, -l^2/2)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CGDeriv, CatalogEntry, CatalogId, KillingField, KillingSample, SpecializedRhs};
use crate::error::{Error, Result};
use crate::frame::{CGState, Chart, Connection, CurveClass, FrameMetric, NamedInvariant, MAX_DIM};

fn nil_connection(lambda: f64, eps: i32) -> Connection {
    let h = lambda / 2.0;
    let mut g = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    g[0][1][2] = h;
    g[0][2][1] = h;
    g[2][0][1] = h;
    g[2][1][0] = -h;
    let s = if eps == 1 { -h } else { h };
    g[1][0][2] = s;
    g[1][2][0] = s;
    g
}

/// Conserved quantity `E` of the Nil reduction.
pub fn nil_e(s: &CGState, lambda: f64, eps: i32) -> f64 {
    let (a1, a2, a3) = (s.a[0], s.a[1], s.a[2]);
    let g = s.u[2];
    if eps == 1 {
        a1 * a1 + a2 * a2 + a3 * a3 - lambda * lambda * g * g
    } else {
        a1 * a1 - a2 * a2 + a3 * a3 + lambda * lambda * g * g
    }
}

/// Conserved quantity `J` of the Nil reduction.
pub fn nil_j(s: &CGState, lambda: f64, eps: i32) -> f64 {
    let half = 0.5 * lambda * s.u[2];
    s.a[0] * s.u[1] - s.a[1] * s.u[0] + if eps == 1 { half } else { -half }
}

fn nil_specialized(lambda: f64, eps: i32) -> SpecializedRhs {
    SpecializedRhs {
        rhs: Arc::new(move |s: &CGState, _sig| {
            let (alpha, beta, gamma) = (s.u[0], s.u[1], s.u[2]);
            let (a1, a2, a3) = (s.a[0], s.a[1], s.a[2]);
            let l = lambda;
            let h = l / 2.0;
            let xdot = [alpha, beta, gamma + l * s.x[0] * beta, 0.0];
            let mut udot = [0.0; MAX_DIM];
            let mut adot = [0.0; MAX_DIM];
            if eps == 1 {
                let a2n = a1 * a1 + a2 * a2 + a3 * a3;
                udot[0] = a1 - l * beta * gamma;
                udot[1] = a2 + l * alpha * gamma;
                udot[2] = a3;
                adot[0] = -h * gamma * a2 - h * beta * a3 - alpha * a2n
                    - l * l * alpha * gamma * gamma;
                adot[1] =
                    h * gamma * a1 + h * alpha * a3 - beta * a2n - l * l * beta * gamma * gamma;
                adot[2] = h * beta * a1 - h * alpha * a2 - gamma * a2n
                    + l * l * gamma * (alpha * alpha + beta * beta);
            } else {
                let a2n = a1 * a1 - a2 * a2 + a3 * a3;
                udot[0] = a1 - l * beta * gamma;
                udot[1] = a2 - l * alpha * gamma;
                udot[2] = a3;
                adot[0] = -h * gamma * a2 - h * beta * a3 - alpha * a2n
                    + l * l * alpha * gamma * gamma;
                adot[1] =
                    -h * gamma * a1 - h * alpha * a3 - beta * a2n + l * l * beta * gamma * gamma;
                adot[2] = h * beta * a1 - h * alpha * a2 - gamma * a2n
                    - l * l * gamma * (1.0 - gamma * gamma);
            }
            CGDeriv { xdot, udot, adot }
        }),
        applies: Arc::new(|_s| true),
    }
}

/// Killing field `K = beta d/dy + gamma d/dz` (constant beta, gamma) along
/// its x = 0 trajectory; frame components of `u` and `a` are constant there.
pub fn nil_killing_field(lambda: f64, beta: f64, gamma: f64) -> KillingField {
    KillingField {
        name: format!("b*dy+g*dz(b={beta},g={gamma})"),
        eval: Arc::new(move |_x: &[f64]| KillingSample {
            k: [0.0, beta, gamma, 0.0],
            accel: [lambda * beta * gamma, 0.0, 0.0, 0.0],
            udot: [0.0; MAX_DIM],
            adot: [0.0; MAX_DIM],
        }),
    }
}

/// Build the Nil entry. `epsilon` selects the signature of the `dy^2` term:
/// +1 Riemannian, -1 Lorentzian (space-like curves).
pub fn nil_entry(epsilon: i32, lambda: f64) -> Result<CatalogEntry> {
    if epsilon != 1 && epsilon != -1 {
        return Err(Error::Config("nil epsilon must be +1 or -1".into()));
    }
    let eps = epsilon;
    let l = lambda;
    let eta = if eps == 1 {
        [1.0, 1.0, 1.0, 0.0]
    } else {
        [1.0, -1.0, 1.0, 0.0]
    };
    let l2 = l * l;
    let ricci = move |_x: &[f64]| {
        let mut r = [[0.0; MAX_DIM]; MAX_DIM];
        if eps == 1 {
            r[0][0] = -l2 / 2.0;
            r[1][1] = -l2 / 2.0;
            r[2][2] = l2 / 2.0;
        } else {
            r[0][0] = l2 / 2.0;
            r[1][1] = -l2 / 2.0;
            r[2][2] = -l2 / 2.0;
        }
        r
    };
    let frame = move |x: &[f64]| {
        let mut e = [[0.0; MAX_DIM]; MAX_DIM];
        e[0][0] = 1.0;
        e[1][1] = 1.0;
        e[1][2] = l * x[0];
        e[2][2] = 1.0;
        e
    };
    let metric = FrameMetric::new(
        3,
        eta,
        Chart::unrestricted(vec!["x", "y", "z"]),
        move |_x| nil_connection(l, eps),
        ricci,
        frame,
    );
    let mut params = BTreeMap::new();
    params.insert("lambda".to_string(), lambda);
    params.insert("epsilon".to_string(), epsilon as f64);
    let mut flags = Vec::new();
    if lambda == 0.0 {
        flags.push("lambda=0 degenerates to a flat reference case".to_string());
    }
    Ok(CatalogEntry {
        id: if eps == 1 {
            CatalogId::NilRiem
        } else {
            CatalogId::NilLor
        },
        params,
        metric,
        curve_classes: vec![if eps == 1 {
            CurveClass::Riemannian
        } else {
            CurveClass::LorentzSpacelike
        }],
        specialized: Some(nil_specialized(l, eps)),
        invariants: vec![
            NamedInvariant::new("E", move |s: &CGState| nil_e(s, l, eps)),
            NamedInvariant::new("J", move |s: &CGState| nil_j(s, l, eps)),
        ],
        killing_fields: vec![nil_killing_field(l, 1.0, 0.0), nil_killing_field(l, 0.0, 1.0)],
        killing_q: Vec::new(),
        radial: Some(Arc::new(|s: &CGState| s.u[2])),
        degenerate_flags: flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{validate_state, Signature};

    #[test]
    fn ricci_matches_quoted_values() {
        let entry = nil_entry(1, 1.3).unwrap();
        let r = entry.metric.ricci(&[0.4, -2.0, 7.0]);
        let l2 = 1.3f64 * 1.3;
        assert_eq!(r[0][0], -l2 / 2.0);
        assert_eq!(r[1][1], -l2 / 2.0);
        assert_eq!(r[2][2], l2 / 2.0);
    }

    #[test]
    fn acceleration_components_match_quoted_forms() {
        // eps=+1: a1 = alphadot + l beta gamma means udot[0] = a1 - l beta gamma
        let entry = nil_entry(1, 2.0).unwrap();
        let s = CGState::new(
            [0.0; MAX_DIM],
            [0.2, 0.3, (1.0f64 - 0.13).sqrt(), 0.0],
            [0.5, -0.1, 0.05, 0.0],
        );
        let rhs = (entry.specialized.as_ref().unwrap().rhs)(&s, &Signature::riemannian());
        assert!((rhs.udot[0] - (0.5 - 2.0 * 0.3 * s.u[2])).abs() < 1e-15);
        assert!((rhs.udot[1] - (-0.1 + 2.0 * 0.2 * s.u[2])).abs() < 1e-15);
        // eps=-1 sign flip: a2 = betadot + l alpha gamma
        let entry = nil_entry(-1, 2.0).unwrap();
        let rhs = (entry.specialized.as_ref().unwrap().rhs)(&s, &Signature::spacelike());
        assert!((rhs.udot[1] - (-0.1 - 2.0 * 0.2 * s.u[2])).abs() < 1e-15);
    }

    #[test]
    fn constants_on_simple_states() {
        let lambda = 1.7;
        // u = e3, a = 0: E = -l^2, J = l/2
        let s = CGState::new([0.0; MAX_DIM], [0.0, 0.0, 1.0, 0.0], [0.0; MAX_DIM]);
        assert!((nil_e(&s, lambda, 1) + lambda * lambda).abs() < 1e-15);
        assert!((nil_j(&s, lambda, 1) - lambda / 2.0).abs() < 1e-15);
        // u = e1, a = q e2: E = q^2, J = -q
        let q = 0.83;
        let s = CGState::new([0.0; MAX_DIM], [1.0, 0.0, 0.0, 0.0], [0.0, q, 0.0, 0.0]);
        assert!((nil_e(&s, lambda, 1) - q * q).abs() < 1e-15);
        assert!((nil_j(&s, lambda, 1) + q).abs() < 1e-15);
    }

    #[test]
    fn killing_state_validates() {
        let entry = nil_entry(1, 1.0).unwrap();
        let kf = nil_killing_field(1.0, 0.6, 0.8);
        let sample = (kf.eval)(&[0.0, 0.0, 0.0]);
        let s = CGState::new([0.0; MAX_DIM], sample.k, sample.accel);
        let rep = validate_state(&entry.metric, &s, &Signature::riemannian(), 1e-12);
        assert!(rep.pass);
    }
}
