//! Axisymmetric metrics `ds^2 = dr^2 + F^2 dphi^2 + H^2 dz^2` on the chart
//! (r, phi, z), orthonormal frame `e1 = d/dr, e2 = F^{-1} d/dphi,
//! e3 = H^{-1} d/dz`. Covers the product form (`F = F(r), H = 1`) and the
//! general form with z-dependent even profiles.
//!
//! Profiles are supplied as smooth callables with analytic first and second
//! derivatives; `f(r)` and the planar curvature combination `Q` need exact
//! derivatives, so nothing here differentiates numerically.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CGDeriv, CatalogEntry, CatalogId, KillingField, KillingSample, SpecializedRhs};
use crate::error::{Error, Result};
use crate::frame::{CGState, Chart, Connection, CurveClass, FrameMetric, NamedInvariant, MAX_DIM};

/// Value and partial derivatives of a profile at (r, z).
#[derive(Debug, Clone, Copy, Default)]
pub struct Jet2 {
    pub v: f64,
    pub dr: f64,
    pub dz: f64,
    pub drr: f64,
    pub drz: f64,
    pub dzz: f64,
}

/// Radial profile F(r) with derivatives and its antiderivative G(r) = int F.
#[derive(Clone)]
pub struct RadialProfile {
    pub name: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d2f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Closed-form antiderivative with G(0) = 0, when available.
    pub g: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    /// Open interval of validity in r.
    pub r_domain: (f64, f64),
}

impl RadialProfile {
    pub fn flat() -> Self {
        RadialProfile {
            name: "flat".into(),
            f: Arc::new(|r| r),
            df: Arc::new(|_| 1.0),
            d2f: Arc::new(|_| 0.0),
            g: Some(Arc::new(|r| r * r / 2.0)),
            r_domain: (0.0, f64::INFINITY),
        }
    }

    pub fn sin() -> Self {
        RadialProfile {
            name: "sin".into(),
            f: Arc::new(f64::sin),
            df: Arc::new(f64::cos),
            d2f: Arc::new(|r| -r.sin()),
            g: Some(Arc::new(|r| 1.0 - r.cos())),
            r_domain: (0.0, std::f64::consts::PI),
        }
    }

    pub fn sinh() -> Self {
        RadialProfile {
            name: "sinh".into(),
            f: Arc::new(f64::sinh),
            df: Arc::new(f64::cosh),
            d2f: Arc::new(f64::sinh),
            g: Some(Arc::new(|r| r.cosh() - 1.0)),
            r_domain: (0.0, f64::INFINITY),
        }
    }

    /// `F = r (1 + s r^2/(1 + r^4))`: asymptotically flat at both ends with a
    /// curvature bump in between.
    pub fn bump(s: f64) -> Self {
        RadialProfile {
            name: format!("bump({s})"),
            f: Arc::new(move |r| {
                let r4 = r.powi(4);
                r + s * r.powi(3) / (1.0 + r4)
            }),
            df: Arc::new(move |r| {
                let d = 1.0 + r.powi(4);
                1.0 + s * (3.0 * r * r - r.powi(6)) / (d * d)
            }),
            d2f: Arc::new(move |r| {
                let d = 1.0 + r.powi(4);
                s * (6.0 * r - 24.0 * r.powi(5) + 2.0 * r.powi(9)) / (d * d * d)
            }),
            g: Some(Arc::new(move |r| {
                r * r / 2.0 + s / 4.0 * (1.0 + r.powi(4)).ln()
            })),
            r_domain: (0.0, f64::INFINITY),
        }
    }

    pub fn from_params(params: &BTreeMap<String, f64>) -> Result<Self> {
        if params.contains_key("sin") {
            Ok(Self::sin())
        } else if params.contains_key("sinh") {
            Ok(Self::sinh())
        } else if let Some(s) = params.get("bump") {
            Ok(Self::bump(*s))
        } else {
            Ok(Self::flat())
        }
    }

    /// `G(r) = int_0^r F`, closed form or adaptive quadrature.
    pub fn antiderivative(&self, r: f64) -> f64 {
        match &self.g {
            Some(g) => g(r),
            None => {
                let f = self.f.clone();
                crate::numeric::integrate_adaptive(move |s| f(s), 0.0, r, 1e-12)
            }
        }
    }
}

/// Pair of surface profiles F(r,z), H(r,z) for the general form.
#[derive(Clone)]
pub struct SurfaceProfile {
    pub name: String,
    pub f: Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync>,
    pub h: Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync>,
    pub r_domain: (f64, f64),
    /// Planar antiderivative `G(r) = int_0^r F(s, 0) ds`, when closed-form.
    pub g_planar: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

fn const_one() -> Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync> {
    Arc::new(|_r, _z| Jet2 {
        v: 1.0,
        ..Default::default()
    })
}

impl SurfaceProfile {
    /// `F = r cosh z, H = 1`.
    pub fn cosh() -> Self {
        SurfaceProfile {
            name: "cosh".into(),
            f: Arc::new(|r, z| Jet2 {
                v: r * z.cosh(),
                dr: z.cosh(),
                dz: r * z.sinh(),
                drr: 0.0,
                drz: z.sinh(),
                dzz: r * z.cosh(),
            }),
            h: const_one(),
            r_domain: (0.0, f64::INFINITY),
            g_planar: Some(Arc::new(|r| r * r / 2.0)),
        }
    }

    /// `F = r (1 + z), H = 1`: odd-perturbed profile with `F_z(r,0) != 0`;
    /// the plane z = 0 is not totally-conformally-geodesic here.
    pub fn odd_perturbed() -> Self {
        SurfaceProfile {
            name: "odd".into(),
            f: Arc::new(|r, z| Jet2 {
                v: r * (1.0 + z),
                dr: 1.0 + z,
                dz: r,
                drr: 0.0,
                drz: 1.0,
                dzz: 0.0,
            }),
            h: const_one(),
            r_domain: (0.0, f64::INFINITY),
            g_planar: Some(Arc::new(|r| r * r / 2.0)),
        }
    }

    /// `F = r, H = 1` (flat space in cylindrical coordinates).
    pub fn flat() -> Self {
        SurfaceProfile {
            name: "flat".into(),
            f: Arc::new(|r, _z| Jet2 {
                v: r,
                dr: 1.0,
                ..Default::default()
            }),
            h: const_one(),
            r_domain: (0.0, f64::INFINITY),
            g_planar: Some(Arc::new(|r| r * r / 2.0)),
        }
    }

    /// Lift a radial profile to the product form `H = 1`.
    pub fn from_radial(p: &RadialProfile) -> Self {
        let f = p.f.clone();
        let df = p.df.clone();
        let d2f = p.d2f.clone();
        let g = p.g.clone();
        SurfaceProfile {
            name: p.name.clone(),
            f: Arc::new(move |r, _z| Jet2 {
                v: f(r),
                dr: df(r),
                drr: d2f(r),
                ..Default::default()
            }),
            h: const_one(),
            r_domain: p.r_domain,
            g_planar: g.map(|g| g as Arc<dyn Fn(f64) -> f64 + Send + Sync>),
        }
    }

    pub fn from_params(params: &BTreeMap<String, f64>) -> Result<Self> {
        if params.contains_key("cosh") {
            Ok(Self::cosh())
        } else if params.contains_key("odd") {
            Ok(Self::odd_perturbed())
        } else {
            Ok(Self::flat())
        }
    }

    pub fn g_planar(&self, r: f64) -> f64 {
        match &self.g_planar {
            Some(g) => g(r),
            None => {
                let f = self.f.clone();
                crate::numeric::integrate_adaptive(move |s| f(s, 0.0).v, 0.0, r, 1e-12)
            }
        }
    }

    /// Planar curvature combination `Q = -H''/H + F_zz/(F H^2) + F' H'/(F H)`
    /// (primes are d/dr), evaluated at (r, 0).
    pub fn q_planar(&self, r: f64) -> f64 {
        let f = (self.f)(r, 0.0);
        let h = (self.h)(r, 0.0);
        -h.drr / h.v + f.dzz / (f.v * h.v * h.v) + f.dr * h.dr / (f.v * h.v)
    }
}

#[derive(Clone)]
pub enum AxisymForm {
    Met1 { f: RadialProfile },
    Met3 { fh: SurfaceProfile },
}

fn metric_from_profiles(p: &SurfaceProfile) -> FrameMetric {
    let fp = p.f.clone();
    let hp = p.h.clone();
    let fp2 = p.f.clone();
    let hp2 = p.h.clone();
    let fp3 = p.f.clone();
    let hp3 = p.h.clone();
    let (rlo, rhi) = p.r_domain;
    FrameMetric::new(
        3,
        [1.0, 1.0, 1.0, 0.0],
        Chart::new(vec!["r", "phi", "z"], move |x: &[f64]| {
            x[0] > rlo && x[0] < rhi
        }),
        move |x| {
            let f = fp(x[0], x[2]);
            let h = hp(x[0], x[2]);
            let mut g: Connection = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
            g[0][1][1] = -f.dr / f.v; // G^1_22
            g[0][2][2] = -h.dr / h.v; // G^1_33
            g[1][1][0] = f.dr / f.v; // G^2_21
            g[1][1][2] = f.dz / (f.v * h.v); // G^2_23
            g[2][1][1] = -f.dz / (f.v * h.v); // G^3_22
            g[2][2][0] = h.dr / h.v; // G^3_31
            g
        },
        move |x| {
            let f = fp2(x[0], x[2]);
            let h = hp2(x[0], x[2]);
            let mut ric = [[0.0; MAX_DIM]; MAX_DIM];
            ric[0][0] = -h.drr / h.v - f.drr / f.v;
            ric[0][2] = -f.drz / (f.v * h.v) + f.dz * h.dr / (f.v * h.v * h.v);
            ric[2][0] = ric[0][2];
            ric[1][1] = -f.drr / f.v - f.dr * h.dr / (f.v * h.v) - f.dzz / (f.v * h.v * h.v)
                + f.dz * h.dz / (f.v * h.v * h.v * h.v);
            ric[2][2] = -h.drr / h.v - f.dr * h.dr / (f.v * h.v) - f.dzz / (f.v * h.v * h.v)
                + f.dz * h.dz / (f.v * h.v * h.v * h.v);
            ric
        },
        move |x| {
            let f = fp3(x[0], x[2]);
            let h = hp3(x[0], x[2]);
            let mut e = [[0.0; MAX_DIM]; MAX_DIM];
            e[0][0] = 1.0;
            e[1][1] = 1.0 / f.v;
            e[2][2] = 1.0 / h.v;
            e
        },
    )
}

const PLANAR_TOL: f64 = 1e-12;

/// Planar (z = 0) specialized system with the collapse `qdot = alpha beta Q`.
fn planar_specialized(p: &SurfaceProfile) -> SpecializedRhs {
    let prof = p.clone();
    SpecializedRhs {
        rhs: Arc::new(move |s: &CGState, _sig| {
            let r = s.x[0];
            let f = (prof.f)(r, 0.0);
            let fp_over_f = f.dr / f.v;
            let q = prof.q_planar(r);
            let (alpha, beta) = (s.u[0], s.u[1]);
            let (a1, a2) = (s.a[0], s.a[1]);
            let a2n = a1 * a1 + a2 * a2;
            CGDeriv {
                xdot: [alpha, beta / f.v, 0.0, 0.0],
                udot: [
                    a1 + beta * beta * fp_over_f,
                    a2 - alpha * beta * fp_over_f,
                    0.0,
                    0.0,
                ],
                adot: [
                    beta * a2 * fp_over_f - a2n * alpha + alpha * beta * beta * q,
                    -beta * a1 * fp_over_f - a2n * beta - alpha * alpha * beta * q,
                    0.0,
                    0.0,
                ],
            }
        }),
        applies: Arc::new(|s: &CGState| {
            s.x[2].abs() < PLANAR_TOL && s.u[2].abs() < PLANAR_TOL && s.a[2].abs() < PLANAR_TOL
        }),
    }
}

/// Trajectories of `d/dphi` are circles; frame components of u and a are
/// constant along them.
fn axial_killing(p: &SurfaceProfile) -> KillingField {
    let prof = p.clone();
    KillingField {
        name: "d/dphi".into(),
        eval: Arc::new(move |x: &[f64]| {
            let f = (prof.f)(x[0], x[2]);
            let h = (prof.h)(x[0], x[2]);
            KillingSample {
                k: [0.0, f.v, 0.0, 0.0],
                accel: [-f.dr / f.v, 0.0, -f.dz / (f.v * h.v), 0.0],
                udot: [0.0; MAX_DIM],
                adot: [0.0; MAX_DIM],
            }
        }),
    }
}

/// Build an axisymmetric entry from either form, enforcing axis regularity
/// `F/r -> 1 as r -> 0`.
pub fn axisym_entry(form: AxisymForm) -> Result<CatalogEntry> {
    let (id, surface) = match &form {
        AxisymForm::Met1 { f } => (CatalogId::AxisymPlane, SurfaceProfile::from_radial(f)),
        AxisymForm::Met3 { fh } => (CatalogId::AxisymGeneral, fh.clone()),
    };
    let eps_r = 1e-6;
    let ratio = (surface.f)(eps_r, 0.0).v / eps_r;
    if (ratio - 1.0).abs() > 1e-4 {
        return Err(Error::Config(format!(
            "profile '{}' violates axis regularity: F(r)/r -> {ratio} as r -> 0",
            surface.name
        )));
    }
    let metric = metric_from_profiles(&surface);
    let specialized = Some(planar_specialized(&surface));
    let prof_q = surface.clone();
    let prof_c = surface.clone();
    Ok(CatalogEntry {
        id,
        params: BTreeMap::new(),
        metric,
        curve_classes: vec![CurveClass::Riemannian],
        specialized,
        invariants: vec![
            // planar acceleration magnitude with sign, q = a2 alpha - a1 beta
            NamedInvariant::new("q", |s: &CGState| s.a[1] * s.u[0] - s.a[0] * s.u[1]),
            NamedInvariant::new("C", move |s: &CGState| {
                let fv = (prof_c.f)(s.x[0], 0.0).v;
                let q = s.a[1] * s.u[0] - s.a[0] * s.u[1];
                fv * s.u[1] - q * prof_c.g_planar(s.x[0])
            }),
        ],
        killing_fields: vec![axial_killing(&surface)],
        killing_q: Vec::new(),
        radial: Some(Arc::new(|s: &CGState| s.x[0])),
        degenerate_flags: if prof_q.name == "flat" {
            vec!["flat profile: conformal geodesics are circles and lines".to_string()]
        } else {
            Vec::new()
        },
    })
}

/// The stored surface profile of an entry is not recoverable from the
/// `FrameMetric` closures, so axisym helpers take the profile directly.
pub fn entry_with_profile(form: AxisymForm) -> Result<(CatalogEntry, SurfaceProfile)> {
    let surface = match &form {
        AxisymForm::Met1 { f } => SurfaceProfile::from_radial(f),
        AxisymForm::Met3 { fh } => fh.clone(),
    };
    let entry = axisym_entry(form)?;
    Ok((entry, surface))
}
