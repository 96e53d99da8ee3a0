//! Round S^3 and hyperbolic H^3 as conformal rescalings of E^3 on the
//! stereographic / ball charts: `g = Omega^2 delta` with
//! `Omega = 2/(1 + |x|^2)` (S^3) and `Omega = 2/(1 - |x|^2)` (H^3, |x| < 1).
//!
//! The orthonormal frame is `e_i = Omega^{-1} d/dx^i`, with connection
//! `Gamma^i_{jk} = ups_k d^i_j - ups_i d_jk` where `ups_i = (d_i Omega)/Omega^2`
//! are the frame components of `Upsilon = Omega^{-1} dOmega`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CatalogEntry, CatalogId};
use crate::frame::{CGState, Chart, Connection, CurveClass, FrameMetric, NamedInvariant, Vector, MAX_DIM};

/// Analytic conformal factor shipped with the catalog: the scalar `Omega` and
/// the coordinate components of `Upsilon_a = Omega^{-1} d_a Omega`.
#[derive(Clone)]
pub struct ConformalPair {
    pub name: &'static str,
    pub omega: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub upsilon: Arc<dyn Fn(&[f64]) -> Vector + Send + Sync>,
}

fn r2(x: &[f64]) -> f64 {
    x[..3].iter().map(|v| v * v).sum()
}

/// `Omega = 2/(1+|x|^2)`: E^3 -> round S^3.
pub fn s3_factor() -> ConformalPair {
    ConformalPair {
        name: "e3-to-s3",
        omega: Arc::new(|x| 2.0 / (1.0 + r2(x))),
        upsilon: Arc::new(|x| {
            let om = 2.0 / (1.0 + r2(x));
            let mut u = [0.0; MAX_DIM];
            for i in 0..3 {
                u[i] = -om * x[i];
            }
            u
        }),
    }
}

/// `Omega = 2/(1-|x|^2)` on the unit ball: E^3 -> H^3.
pub fn h3_factor() -> ConformalPair {
    ConformalPair {
        name: "e3-to-h3",
        omega: Arc::new(|x| 2.0 / (1.0 - r2(x))),
        upsilon: Arc::new(|x| {
            let om = 2.0 / (1.0 - r2(x));
            let mut u = [0.0; MAX_DIM];
            for i in 0..3 {
                u[i] = om * x[i];
            }
            u
        }),
    }
}

fn conformal_metric(pair: &ConformalPair, ricci_diag: f64, chart: Chart) -> FrameMetric {
    let omega = pair.omega.clone();
    let omega2 = pair.omega.clone();
    let upsilon = pair.upsilon.clone();
    FrameMetric::new(
        3,
        [1.0, 1.0, 1.0, 0.0],
        chart,
        move |x| {
            let om = omega(x);
            let ups = upsilon(x);
            // frame components of Upsilon: ups_coord / Omega
            let uf: Vec<f64> = (0..3).map(|i| ups[i] / om).collect();
            let mut g: Connection = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
            for a in 0..3 {
                for b in 0..3 {
                    for k in 0..3 {
                        let mut v = 0.0;
                        if a == b {
                            v += uf[k];
                        }
                        if b == k {
                            v -= uf[a];
                        }
                        g[a][b][k] = v;
                    }
                }
            }
            g
        },
        move |_x| {
            let mut r = [[0.0; MAX_DIM]; MAX_DIM];
            for (i, row) in r.iter_mut().enumerate().take(3) {
                row[i] = ricci_diag;
            }
            r
        },
        move |x| {
            let inv = 1.0 / omega2(x);
            let mut e = [[0.0; MAX_DIM]; MAX_DIM];
            for (i, row) in e.iter_mut().enumerate().take(3) {
                row[i] = inv;
            }
            e
        },
    )
}

pub fn s3_entry() -> CatalogEntry {
    let metric = conformal_metric(
        &s3_factor(),
        2.0,
        Chart::unrestricted(vec!["x", "y", "z"]),
    );
    CatalogEntry {
        id: CatalogId::S3,
        params: BTreeMap::new(),
        metric,
        curve_classes: vec![CurveClass::Riemannian],
        specialized: None,
        invariants: vec![NamedInvariant::new("a_norm2", |s: &CGState| {
            s.a[..3].iter().map(|v| v * v).sum()
        })],
        killing_fields: Vec::new(),
        killing_q: Vec::new(),
        radial: None,
        degenerate_flags: Vec::new(),
    }
}

pub fn h3_entry() -> CatalogEntry {
    let metric = conformal_metric(
        &h3_factor(),
        -2.0,
        Chart::new(vec!["x", "y", "z"], |x: &[f64]| r2(x) < 1.0),
    );
    CatalogEntry {
        id: CatalogId::H3,
        params: BTreeMap::new(),
        metric,
        curve_classes: vec![CurveClass::Riemannian],
        specialized: None,
        invariants: vec![NamedInvariant::new("a_norm2", |s: &CGState| {
            s.a[..3].iter().map(|v| v * v).sum()
        })],
        killing_fields: Vec::new(),
        killing_q: Vec::new(),
        radial: None,
        degenerate_flags: Vec::new(),
    }
}
