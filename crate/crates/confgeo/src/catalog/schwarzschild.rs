//! Schwarzschild exterior in the static orthonormal tetrad
//! `t0 = V dt, t1 = dr/V, t2 = r dtheta, t3 = r sin(theta) dphi`,
//! `V^2 = 1 - 2m/r`, restricted to r > 2m — plus the horizon-regular system
//! in the null-frame variables `lam = V(alpha+beta)/2, nu = (alpha-beta)/V`,
//! `a_L = V(a0+a1)/2, a_N = (a0-a1)/V` on the chart (u, r, theta, phi) with
//! the retarded null coordinate from `du = dt - dr/V^2`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CGDeriv, CatalogEntry, CatalogId, KillingField, KillingQField, KillingSample, SpecializedRhs};
use crate::error::{Error, Result};
use crate::frame::{CGState, Chart, Connection, CurveClass, FrameMetric, NamedInvariant, Vector, MAX_DIM};
use crate::integrator::{OdeSystem, RhsFailure};

fn v2(m: f64, r: f64) -> f64 {
    1.0 - 2.0 * m / r
}

fn v(m: f64, r: f64) -> f64 {
    v2(m, r).sqrt()
}

/// `V' = m / (r^2 V)`.
fn vprime(m: f64, r: f64) -> f64 {
    m / (r * r * v(m, r))
}

/// Real part of the Killing-spinor constant: `r (beta a0 - alpha a1) - eps alpha V`.
pub fn q_real(m: f64, s: &CGState, epsilon: f64) -> f64 {
    let r = s.x[1];
    r * (s.u[1] * s.a[0] - s.u[0] * s.a[1]) - epsilon * s.u[0] * v(m, r)
}

/// Imaginary part: `r (delta a2 - gamma a3)`.
pub fn q_imag(s: &CGState) -> f64 {
    s.x[1] * (s.u[3] * s.a[2] - s.u[2] * s.a[3])
}

fn schw_connection(m: f64, x: &[f64]) -> Connection {
    let r = x[1];
    let theta = x[2];
    let vv = v(m, r);
    let vp = vprime(m, r);
    let cot = theta.cos() / theta.sin();
    let mut g: Connection = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    g[0][0][1] = vp; // G^0_01
    g[1][0][0] = vp; // G^1_00
    g[2][2][1] = vv / r; // G^2_21
    g[1][2][2] = -vv / r; // G^1_22
    g[3][3][1] = vv / r; // G^3_31
    g[1][3][3] = -vv / r; // G^1_33
    g[3][3][2] = cot / r; // G^3_32
    g[2][3][3] = -cot / r; // G^2_33
    g
}

fn schw_frame(m: f64, x: &[f64]) -> [[f64; MAX_DIM]; MAX_DIM] {
    let r = x[1];
    let vv = v(m, r);
    let mut e = [[0.0; MAX_DIM]; MAX_DIM];
    e[0][0] = 1.0 / vv; // e0 = V^{-1} d/dt
    e[1][1] = vv; // e1 = V d/dr
    e[2][2] = 1.0 / r; // e2 = r^{-1} d/dtheta
    e[3][3] = 1.0 / (r * x[2].sin()); // e3
    e
}

fn schw_specialized(m: f64) -> SpecializedRhs {
    SpecializedRhs {
        rhs: Arc::new(move |s: &CGState, sig| {
            let eps = sig.epsilon;
            let r = s.x[1];
            let theta = s.x[2];
            let vv = v(m, r);
            let vp = vprime(m, r);
            let cot = theta.cos() / theta.sin();
            let (al, be, ga, de) = (s.u[0], s.u[1], s.u[2], s.u[3]);
            let (a0, a1, a2, a3) = (s.a[0], s.a[1], s.a[2], s.a[3]);
            let big_a = -a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3;
            CGDeriv {
                xdot: [al / vv, vv * be, ga / r, de / (r * theta.sin())],
                udot: [
                    a0 - al * be * vp,
                    a1 - al * al * vp + (ga * ga + de * de) * vv / r,
                    a2 - be * ga * vv / r + de * de * cot / r,
                    a3 - be * de * vv / r - ga * de * cot / r,
                ],
                adot: [
                    -eps * big_a * al - al * a1 * vp,
                    -eps * big_a * be - al * a0 * vp + (ga * a2 + de * a3) * vv / r,
                    -eps * big_a * ga - ga * a1 * vv / r + de * a3 * cot / r,
                    -eps * big_a * de - de * a1 * vv / r - de * a2 * cot / r,
                ],
            }
        }),
        applies: Arc::new(|_s| true),
    }
}

/// Static Killing field `d/dt`: u = e0, acceleration `V' e1`, frame
/// components constant along the orbit. Any static trajectory is a conformal
/// geodesic (hypersurface-orthogonal Killing vector).
pub fn static_killing(m: f64) -> KillingField {
    KillingField {
        name: "d/dt".into(),
        eval: Arc::new(move |x: &[f64]| KillingSample {
            k: [1.0, 0.0, 0.0, 0.0],
            accel: [0.0, vprime(m, x[1]), 0.0, 0.0],
            udot: [0.0; MAX_DIM],
            adot: [0.0; MAX_DIM],
        }),
    }
}

/// Axial Killing field `d/dphi` (space-like circles).
pub fn axial_killing(m: f64) -> KillingField {
    KillingField {
        name: "d/dphi".into(),
        eval: Arc::new(move |x: &[f64]| {
            let r = x[1];
            let theta = x[2];
            KillingSample {
                k: [0.0, 0.0, 0.0, 1.0],
                accel: [0.0, -v(m, r) / r, -theta.cos() / (theta.sin() * r), 0.0],
                udot: [0.0; MAX_DIM],
                adot: [0.0; MAX_DIM],
            }
        }),
    }
}

/// Killing-spinor constant as a formal `KillingQField` so the monitor can use
/// the same plumbing; `M(u,a) - (R/6) K u` is not the origin here, the two
/// scalars are supplied directly by `q_real`/`q_imag`.
fn q_invariants(m: f64) -> Vec<NamedInvariant> {
    vec![
        NamedInvariant::new("a_norm2", |s: &CGState| {
            -s.a[0] * s.a[0] + s.a[1] * s.a[1] + s.a[2] * s.a[2] + s.a[3] * s.a[3]
        }),
        NamedInvariant::new("Q_im", q_imag),
        NamedInvariant::new("Q_re_timelike", move |s: &CGState| q_real(m, s, -1.0)),
    ]
}

const POLE_MARGIN: f64 = 1e-9;

/// Exterior entry, chart restricted to r > 2m and theta away from the poles.
pub fn schwarzschild_entry(m: f64) -> Result<CatalogEntry> {
    if m <= 0.0 {
        return Err(Error::Config("schwarzschild mass must be positive".into()));
    }
    let metric = FrameMetric::new(
        4,
        [-1.0, 1.0, 1.0, 1.0],
        Chart::new(vec!["t", "r", "theta", "phi"], move |x: &[f64]| {
            x[1] > 2.0 * m && x[2].sin() > POLE_MARGIN
        }),
        move |x| schw_connection(m, x),
        |_x| [[0.0; MAX_DIM]; MAX_DIM],
        move |x| schw_frame(m, x),
    );
    let mut params = BTreeMap::new();
    params.insert("m".to_string(), m);
    Ok(CatalogEntry {
        id: CatalogId::SchwarzschildExt,
        params,
        metric,
        curve_classes: vec![CurveClass::LorentzTimelike, CurveClass::LorentzSpacelike],
        specialized: Some(schw_specialized(m)),
        invariants: q_invariants(m),
        killing_fields: vec![static_killing(m), axial_killing(m)],
        killing_q: Vec::<KillingQField>::new(),
        radial: Some(Arc::new(|s: &CGState| s.x[1])),
        degenerate_flags: Vec::new(),
    })
}

/// State layout of the horizon-regular system:
/// `[u, r, theta, phi, lam, nu, gamma, delta, aL, aN, a2, a3]`.
pub const HORIZON_DIM: usize = 12;

/// Horizon-regular system. All coefficients involve only `V^2` and
/// `V V' = m/r^2`, so the right-hand side extends smoothly through r = 2m;
/// the chart degenerates only at r = 0 and at crossings where the null-frame
/// components themselves diverge.
pub struct HorizonSystem {
    pub m: f64,
    /// epsilon = -2 lam nu + gamma^2 + delta^2, fixed by the initial state.
    pub epsilon: f64,
}

impl HorizonSystem {
    pub fn new(m: f64, epsilon: f64) -> Self {
        HorizonSystem { m, epsilon }
    }

    /// `A = -2 aL aN + a2^2 + a3^2`, the (constant) acceleration norm.
    pub fn accel_norm(y: &[f64]) -> f64 {
        -2.0 * y[8] * y[9] + y[10] * y[10] + y[11] * y[11]
    }

    /// First Killing-spinor constant in regular variables:
    /// `r (lam aN - nu aL) - eps (lam + V^2 nu / 2)`.
    pub fn q_real(&self, y: &[f64]) -> f64 {
        let r = y[1];
        y[1] * (y[4] * y[9] - y[5] * y[8]) - self.epsilon * (y[4] + 0.5 * v2(self.m, r) * y[5])
    }

    pub fn q_imag(y: &[f64]) -> f64 {
        y[1] * (y[7] * y[10] - y[6] * y[11])
    }
}

impl OdeSystem for HorizonSystem {
    fn dim(&self) -> usize {
        HORIZON_DIM
    }

    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> std::result::Result<(), RhsFailure> {
        let m = self.m;
        let eps = self.epsilon;
        let r = y[1];
        if r <= 0.0 {
            return Err(RhsFailure::new("reached the r = 0 singularity"));
        }
        let theta = y[2];
        if theta.sin().abs() < POLE_MARGIN {
            return Err(RhsFailure::new("polar chart singularity sin(theta) = 0"));
        }
        let vv2 = v2(m, r);
        let vvp = m / (r * r); // V V'
        let cot = theta.cos() / theta.sin();
        let (lam, nu, ga, de) = (y[4], y[5], y[6], y[7]);
        let (al_l, al_n, a2, a3) = (y[8], y[9], y[10], y[11]);
        let big_a = Self::accel_norm(y);
        // coordinates: udot = nu, rdot = lam - V^2 nu / 2
        dydt[0] = nu;
        dydt[1] = lam - 0.5 * vv2 * nu;
        dydt[2] = ga / r;
        dydt[3] = de / (r * theta.sin());
        dydt[4] = al_l + vv2 / (2.0 * r) * (2.0 * lam * nu + eps) - vvp * lam * nu;
        dydt[5] = al_n - (2.0 * lam * nu + eps) / r + vvp * nu * nu;
        dydt[6] = a2 - ga / r * (lam - 0.5 * nu * vv2) + de * de * cot / r;
        dydt[7] = a3 - de / r * (lam - 0.5 * nu * vv2) - ga * de * cot / r;
        dydt[8] = -eps * big_a * lam - vvp * nu * al_l + vv2 / (2.0 * r) * (nu * al_l + lam * al_n);
        dydt[9] = -eps * big_a * nu + vvp * nu * al_n - (nu * al_l + lam * al_n) / r;
        dydt[10] = -eps * big_a * ga - ga / r * (al_l - 0.5 * al_n * vv2) + de * a3 * cot / r;
        dydt[11] = -eps * big_a * de - de / r * (al_l - 0.5 * al_n * vv2) - de * a2 * cot / r;
        Ok(())
    }
}

/// Tortoise coordinate `r* = r + 2m ln|r/2m - 1|`, fixing `u = t - r*`.
pub fn tortoise(m: f64, r: f64) -> f64 {
    r + 2.0 * m * (r / (2.0 * m) - 1.0).abs().ln()
}

/// Exterior third-order state -> horizon variables (r > 2m).
pub fn to_horizon_state(m: f64, s: &CGState) -> Result<[f64; HORIZON_DIM]> {
    let r = s.x[1];
    if r <= 2.0 * m {
        return Err(Error::ChartDomain { t: s.t });
    }
    let vv = v(m, r);
    let u_null = s.x[0] - tortoise(m, r);
    Ok([
        u_null,
        r,
        s.x[2],
        s.x[3],
        vv * (s.u[0] + s.u[1]) / 2.0,
        (s.u[0] - s.u[1]) / vv,
        s.u[2],
        s.u[3],
        vv * (s.a[0] + s.a[1]) / 2.0,
        (s.a[0] - s.a[1]) / vv,
        s.a[2],
        s.a[3],
    ])
}

/// Horizon variables -> exterior third-order state (r > 2m); `t` is recovered
/// from the null coordinate by `t = u + r*`.
pub fn from_horizon_state(m: f64, y: &[f64]) -> Result<CGState> {
    let r = y[1];
    if r <= 2.0 * m {
        return Err(Error::ChartDomain { t: 0.0 });
    }
    let vv = v(m, r);
    let x = [y[0] + tortoise(m, r), r, y[2], y[3]];
    let u: Vector = [
        y[4] / vv + vv * y[5] / 2.0,
        y[4] / vv - vv * y[5] / 2.0,
        y[6],
        y[7],
    ];
    let a: Vector = [
        y[8] / vv + vv * y[9] / 2.0,
        y[8] / vv - vv * y[9] / 2.0,
        y[10],
        y[11],
    ];
    Ok(CGState { x, u, a, t: 0.0 })
}

/// Radial time-like state in horizon variables from `(r, chi, a)` where
/// `lam = e^chi / 2, nu = e^{-chi}, aL = a e^chi / 2, aN = -a e^{-chi}`.
pub fn radial_horizon_state(m: f64, r: f64, chi: f64, a: f64) -> [f64; HORIZON_DIM] {
    let ec = chi.exp();
    [
        -tortoise(m, r),
        r,
        std::f64::consts::FRAC_PI_2,
        0.0,
        0.5 * ec,
        1.0 / ec,
        0.0,
        0.0,
        0.5 * a * ec,
        -a / ec,
        0.0,
        0.0,
    ]
}
