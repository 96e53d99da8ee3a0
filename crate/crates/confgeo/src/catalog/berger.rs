//! Berger sphere: `g = (s1)^2 + (s2)^2 + lambda^2 (s3)^2` in the
//! left-invariant one-forms of SU(2), Euler-angle chart (theta, phi, psi).
//! Orthonormal coframe `t1 = s1, t2 = s2, t3 = lambda s3`; connection
//! `w^1_2 = C t3, w^2_3 = A t1, w^3_1 = A t2` with `A = lambda/2`,
//! `C = (2 - lambda^2)/(2 lambda)`; Ricci `diag(1 - l^2/2, 1 - l^2/2, l^2/2)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CGDeriv, CatalogEntry, CatalogId, SpecializedRhs};
use crate::error::{Error, Result};
use crate::frame::{CGState, Chart, Connection, CurveClass, FrameMetric, NamedInvariant, MAX_DIM};

/// `A = lambda/2`.
pub fn coeff_a(lambda: f64) -> f64 {
    lambda / 2.0
}

/// `C = (2 - lambda^2) / (2 lambda)`.
pub fn coeff_c(lambda: f64) -> f64 {
    (2.0 - lambda * lambda) / (2.0 * lambda)
}

/// Conserved quantity `E = |a|^2 + (1 - lambda^2) gamma^2`.
pub fn berger_e(s: &CGState, lambda: f64) -> f64 {
    let a2 = s.a[0] * s.a[0] + s.a[1] * s.a[1] + s.a[2] * s.a[2];
    a2 + (1.0 - lambda * lambda) * s.u[2] * s.u[2]
}

/// Conserved quantity `J = a1 beta - a2 alpha - A gamma`.
pub fn berger_j(s: &CGState, lambda: f64) -> f64 {
    s.a[0] * s.u[1] - s.a[1] * s.u[0] - coeff_a(lambda) * s.u[2]
}

fn berger_connection(lambda: f64) -> Connection {
    let a = coeff_a(lambda);
    let c = coeff_c(lambda);
    let mut g = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    g[0][2][1] = c; // G^1_32
    g[1][2][0] = -c; // G^2_31
    g[1][0][2] = a; // G^2_13
    g[2][0][1] = -a; // G^3_12
    g[2][1][0] = a; // G^3_21
    g[0][1][2] = -a; // G^1_23
    g
}

fn berger_frame(x: &[f64]) -> [[f64; MAX_DIM]; MAX_DIM] {
    let (theta, _phi, psi) = (x[0], x[1], x[2]);
    let st = theta.sin();
    let ct = theta.cos();
    let (sp, cp) = psi.sin_cos();
    let mut e = [[0.0; MAX_DIM]; MAX_DIM];
    // e1 = cos(psi) d/dtheta + (sin(psi)/sin(theta)) d/dphi - sin(psi) cot(theta) d/dpsi
    e[0][0] = cp;
    e[0][1] = sp / st;
    e[0][2] = -sp * ct / st;
    // e2 = sin(psi) d/dtheta - (cos(psi)/sin(theta)) d/dphi + cos(psi) cot(theta) d/dpsi
    e[1][0] = sp;
    e[1][1] = -cp / st;
    e[1][2] = cp * ct / st;
    e
}

fn berger_specialized(lambda: f64) -> SpecializedRhs {
    let a = coeff_a(lambda);
    let c = coeff_c(lambda);
    let r11 = 1.0 - lambda * lambda / 2.0;
    let r33 = lambda * lambda / 2.0;
    SpecializedRhs {
        rhs: Arc::new(move |s: &CGState, _sig| {
            let (alpha, beta, gamma) = (s.u[0], s.u[1], s.u[2]);
            let (a1, a2, a3) = (s.a[0], s.a[1], s.a[2]);
            let a2n = a1 * a1 + a2 * a2 + a3 * a3;
            let planar = 1.0 - alpha * alpha - beta * beta;
            let mut e = berger_frame(&s.x[..3]);
            e[2][2] = 1.0 / lambda;
            let mut xdot = [0.0; MAX_DIM];
            for mu in 0..3 {
                for i in 0..3 {
                    xdot[mu] += s.u[i] * e[i][mu];
                }
            }
            let udot = [
                a1 - (c - a) * beta * gamma,
                a2 + (c - a) * gamma * alpha,
                a3,
                0.0,
            ];
            let adot = [
                -c * gamma * a2 + a * beta * a3 - alpha * a2n + r11 * alpha * planar
                    - r33 * alpha * gamma * gamma,
                -a * alpha * a3 + c * gamma * a1 - beta * a2n + r11 * beta * planar
                    - r33 * beta * gamma * gamma,
                -a * beta * a1 + a * alpha * a2 - gamma * a2n
                    - r11 * gamma * (alpha * alpha + beta * beta)
                    + r33 * gamma * (1.0 - gamma * gamma),
                0.0,
            ];
            CGDeriv { xdot, udot, adot }
        }),
        applies: Arc::new(|_s| true),
    }
}

/// Build the Berger-sphere entry. `lambda = 1` is the round S^3 (flagged as a
/// conformally flat reference case).
pub fn berger_entry(lambda: f64) -> Result<CatalogEntry> {
    if lambda <= 0.0 {
        return Err(Error::Config("berger lambda must be positive".into()));
    }
    let l = lambda;
    let l2 = l * l;
    let metric = FrameMetric::new(
        3,
        [1.0, 1.0, 1.0, 0.0],
        Chart::new(vec!["theta", "phi", "psi"], |x: &[f64]| {
            x[0].sin().abs() > 1e-12
        }),
        move |_x| berger_connection(l),
        move |_x| {
            let mut r = [[0.0; MAX_DIM]; MAX_DIM];
            r[0][0] = 1.0 - l2 / 2.0;
            r[1][1] = 1.0 - l2 / 2.0;
            r[2][2] = l2 / 2.0;
            r
        },
        move |x| {
            let mut e = berger_frame(x);
            e[2][2] = 1.0 / l;
            e
        },
    );
    let mut params = BTreeMap::new();
    params.insert("lambda".to_string(), lambda);
    let mut flags = Vec::new();
    if (lambda - 1.0).abs() < 1e-14 {
        flags.push("lambda=1 is the round S3, a conformally flat reference case".to_string());
    }
    Ok(CatalogEntry {
        id: CatalogId::Berger,
        params,
        metric,
        curve_classes: vec![CurveClass::Riemannian],
        specialized: Some(berger_specialized(l)),
        invariants: vec![
            NamedInvariant::new("E", move |s: &CGState| berger_e(s, l)),
            NamedInvariant::new("J", move |s: &CGState| berger_j(s, l)),
        ],
        killing_fields: Vec::new(),
        killing_q: Vec::new(),
        radial: Some(Arc::new(|s: &CGState| s.u[2])),
        degenerate_flags: flags,
    })
}
