//! Conformal-geodesic dynamics: the third-order form in (x, u, a), the
//! second-order (v, b) form, conversions between them, the chi equation and
//! projective parameter, Moebius reparametrization, conformal rescaling and
//! the acceleration-magnitude evolution law.
//!
//! Sign conventions are unified over the curve class through
//! `eps = g(u,u)`:
//!   third order: `adot^i = -G^i(u,a) + u^i(-eps |a|^2 - L(u,u)) + eps L^i_j u^j`
//!   chi:         `chidd = -(eps/4)(|a|^2 + 2 eps L(u,u)) chi`
//!   b:           `b# = eps (a + (u.b) u)`, `u.b = -2 chidot/chi`
//! which reduce to the separate Riemannian/space-like and time-like forms.

use std::sync::Arc;

use crate::catalog::{CGDeriv, CatalogEntry, CatalogId, KillingQData};
use crate::error::{Error, Result};
use crate::frame::{
    CGState, FrameMetric, Signature, VBState, Vector, MAX_DIM,
};
use crate::integrator::{
    integrate, EventKind, EventSpec, IntegratorConfig, OdeSystem, RhsFailure, Trajectory,
};

/// Generic third-order right-hand side from the frame data of any catalog
/// metric. Used whenever no specialized system exists, and as the
/// cross-validation target for every specialized system.
///
/// The coefficient of the `u^i` force term carries a factor
/// `eps/eta(u,u)` (identically 1 on valid states). The equations only fix
/// the flow on the constraint surface `eta(u,u) = eps, eta(u,a) = 0`; this
/// off-shell extension makes both constraints exact first integrals of the
/// extended flow, where the naive extension lets rounding-seeded constraint
/// violations grow exponentially whenever `|a|^2 + L(u,u) < 0` and ruins
/// long conserved-quantity measurements.
pub fn third_order_rhs(metric: &FrameMetric, s: &CGState, sig: &Signature) -> Result<CGDeriv> {
    let n = metric.dim;
    if !metric.chart.contains(&s.x[..n]) {
        return Err(Error::ChartDomain { t: s.t });
    }
    let eps = sig.epsilon;
    let gamma = metric.gamma(&s.x[..n]);
    let schouten = metric.schouten(&s.x[..n]);
    let a_norm2 = metric.norm(&s.a[..n]);
    let u_norm = metric.norm(&s.u[..n]);
    if u_norm.abs() < 1e-300 {
        return Err(Error::InvalidState("velocity has zero frame norm".into()));
    }
    let shell = eps / u_norm;
    let mut l_uu = 0.0;
    for i in 0..n {
        for j in 0..n {
            l_uu += schouten[i][j] * s.u[i] * s.u[j];
        }
    }
    let xdot = metric.coord_velocity(&s.x[..n], &s.u[..n]);
    let mut udot = [0.0; MAX_DIM];
    let mut adot = [0.0; MAX_DIM];
    for i in 0..n {
        let mut conn_u = 0.0;
        let mut conn_a = 0.0;
        for j in 0..n {
            for k in 0..n {
                conn_u += gamma[i][j][k] * s.u[j] * s.u[k];
                conn_a += gamma[i][j][k] * s.u[j] * s.a[k];
            }
        }
        let mut l_up = 0.0;
        for j in 0..n {
            l_up += metric.eta[i] * schouten[i][j] * s.u[j];
        }
        udot[i] = s.a[i] - conn_u;
        adot[i] = -conn_a + s.u[i] * shell * (-eps * a_norm2 - l_uu) + eps * l_up;
    }
    Ok(CGDeriv { xdot, udot, adot })
}

/// Recover the one-form `b` (lowered frame components) and the scalar `u.b`
/// from a third-order state and a choice of representative `(chi, chidot)`.
pub fn b_from_state(
    metric: &FrameMetric,
    s: &CGState,
    sig: &Signature,
    chi: f64,
    chi_dot: f64,
) -> Result<(Vector, f64)> {
    if chi == 0.0 {
        return Err(Error::RepresentativeSingular);
    }
    let n = metric.dim;
    let ub = -2.0 * chi_dot / chi;
    let mut b = [0.0; MAX_DIM];
    for i in 0..n {
        let upper = sig.epsilon * (s.a[i] + ub * s.u[i]);
        b[i] = metric.eta[i] * upper;
    }
    Ok((b, ub))
}

/// Derivative of a (v, b) state with respect to the projective parameter.
#[derive(Debug, Clone, Copy)]
pub struct VBDeriv {
    pub xdot: Vector,
    pub vdot: Vector,
    pub bdot: Vector,
    pub taudot: f64,
}

/// The coupled first-order system for `(v, b)` in frame components
/// (`v` contravariant, `b` covariant), parametrized by `tau`.
pub fn vb_rhs(metric: &FrameMetric, s: &VBState) -> Result<VBDeriv> {
    let n = metric.dim;
    if !metric.chart.contains(&s.x[..n]) {
        return Err(Error::ChartDomain { t: s.tau });
    }
    let gvv = metric.norm(&s.v[..n]);
    if gvv.abs() < 1e-300 {
        return Err(Error::DegenerateRepresentative);
    }
    let gamma = metric.gamma(&s.x[..n]);
    let schouten = metric.schouten(&s.x[..n]);
    let vb: f64 = (0..n).map(|i| s.v[i] * s.b[i]).sum();
    let bb: f64 = (0..n).map(|i| metric.eta[i] * s.b[i] * s.b[i]).sum();
    let xdot = metric.coord_velocity(&s.x[..n], &s.v[..n]);
    let mut vdot = [0.0; MAX_DIM];
    let mut bdot = [0.0; MAX_DIM];
    for i in 0..n {
        let mut conn_v = 0.0;
        for j in 0..n {
            for k in 0..n {
                conn_v += gamma[i][j][k] * s.v[j] * s.v[k];
            }
        }
        vdot[i] = -conn_v - 2.0 * vb * s.v[i] + metric.eta[i] * s.b[i] * gvv;
        let mut conn_b = 0.0;
        for j in 0..n {
            for k in 0..n {
                conn_b += gamma[k][j][i] * s.v[j] * s.b[k];
            }
        }
        let mut l_v = 0.0;
        for j in 0..n {
            l_v += schouten[i][j] * s.v[j];
        }
        bdot[i] = conn_b + vb * s.b[i] - 0.5 * metric.eta[i] * s.v[i] * bb + l_v;
    }
    Ok(VBDeriv {
        xdot,
        vdot,
        bdot,
        taudot: 1.0,
    })
}

/// Moebius map of the projective parameter, `tau -> (a tau + b)/(c tau + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MobiusMap {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if (a * d - b * c).abs() < 1e-300 {
            return Err(Error::Config("Moebius map must have ad - bc != 0".into()));
        }
        Ok(MobiusMap { a, b, c, d })
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn inverse(&self) -> Self {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }
}

/// Accompanying transformation of `(v, b, tau)` under a Moebius
/// reparametrization: `vhat = (c tau + d)^2 v / (ad - bc)`,
/// `bhat = b + f g(v, .)` with `f = -2 (g(v,v))^{-1} c (c tau + d)^{-1}`.
/// The determinant factor keeps `v = dx/dtau` for unnormalized maps (it is 1
/// for a unit-determinant map) and makes the transformations compose as the
/// group does.
pub fn mobius_reparametrize(
    metric: &FrameMetric,
    map: &MobiusMap,
    s: &VBState,
) -> Result<VBState> {
    let n = metric.dim;
    let denom = map.c * s.tau + map.d;
    if denom.abs() < 1e-300 {
        return Err(Error::MobiusPole);
    }
    let det = map.a * map.d - map.b * map.c;
    let gvv = metric.norm(&s.v[..n]);
    if gvv.abs() < 1e-300 {
        return Err(Error::DegenerateRepresentative);
    }
    let f = -2.0 * map.c / (gvv * denom);
    let mut out = *s;
    for i in 0..n {
        out.v[i] = denom * denom * s.v[i] / det;
        out.b[i] = s.b[i] + f * metric.eta[i] * s.v[i];
    }
    out.tau = (map.a * s.tau + map.b) / denom;
    Ok(out)
}

/// Conformal rescaling `g -> Omega^2 g` of a (v, b) state over a flat entry
/// whose frame is the coordinate basis: `v` and `b` keep their coordinate
/// values (`vtilde = v`, `btilde = b - Upsilon`), re-expressed here in the
/// rescaled orthonormal frame `e_i = Omega^{-1} d_i` so the result can be
/// integrated directly under the matching conformal catalog entry.
/// `upsilon` is the coordinate covariant gradient `Omega^{-1} dOmega` at `s.x`.
pub fn conformal_transform(s: &VBState, omega: f64, upsilon: &Vector, dim: usize) -> Result<VBState> {
    if omega <= 0.0 {
        return Err(Error::InvalidConformalFactor(omega));
    }
    let mut out = *s;
    for i in 0..dim {
        out.v[i] = omega * s.v[i];
        out.b[i] = (s.b[i] - upsilon[i]) / omega;
    }
    Ok(out)
}

/// Rate of change of the acceleration magnitude `q = |g(a,a)|^{1/2}`:
/// `qdot = +- L(w, u)` with `w = a/q`, the sign fixed by the curve class and
/// the causal character of `a`. Returns 0 at `a = 0` by convention (q has a
/// minimum there; the unit vector w is undefined).
pub fn accel_magnitude_rate(metric: &FrameMetric, s: &CGState, sig: &Signature) -> f64 {
    let n = metric.dim;
    let a2 = metric.norm(&s.a[..n]);
    if a2.abs() < 1e-300 {
        return 0.0;
    }
    let q = a2.abs().sqrt();
    let sigma = a2.signum();
    let schouten = metric.schouten(&s.x[..n]);
    let mut l_wu = 0.0;
    for i in 0..n {
        for j in 0..n {
            l_wu += schouten[i][j] * (s.a[i] / q) * s.u[j];
        }
    }
    sig.epsilon * sigma * l_wu
}

/// Constant-curvature Killing constant `Q = M_ab u^a a^b - (R/6) K_a u^a`.
pub fn killing_constant_q(kq: &KillingQData, r_scalar: f64, s: &CGState, dim: usize) -> f64 {
    let mut m_ua = 0.0;
    let mut ku = 0.0;
    for i in 0..dim {
        ku += kq.k[i] * s.u[i];
        for j in 0..dim {
            m_ua += kq.m[i][j] * s.u[i] * s.a[j];
        }
    }
    m_ua - r_scalar / 6.0 * ku
}

/// How the integrable right-hand side is selected. The generic
/// constraint-stable form is the canonical propagator; the specialized
/// source-quoted systems serve as pointwise oracles and can be integrated
/// directly for cross-checks over bounded windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsChoice {
    /// The generic frame equations (alias of `Generic`).
    Auto,
    /// The generic frame equations.
    Generic,
    /// The entry's specialized system verbatim, falling back to generic
    /// outside its domain of applicability.
    Specialized,
}

/// Third-order conformal-geodesic flow of a catalog entry as a flat ODE
/// system, state layout `[x(0..n), u(n..2n), a(2n..3n)]`.
pub struct CgSystem {
    pub entry: CatalogEntry,
    pub sig: Signature,
    pub choice: RhsChoice,
}

impl CgSystem {
    pub fn new(entry: CatalogEntry, sig: Signature) -> Self {
        CgSystem {
            entry,
            sig,
            choice: RhsChoice::Auto,
        }
    }

    pub fn generic(entry: CatalogEntry, sig: Signature) -> Self {
        CgSystem {
            entry,
            sig,
            choice: RhsChoice::Generic,
        }
    }

    pub fn pack(&self, s: &CGState) -> Vec<f64> {
        pack_cg(s, self.entry.metric.dim)
    }

    pub fn unpack(&self, t: f64, y: &[f64]) -> CGState {
        unpack_cg(t, y, self.entry.metric.dim)
    }
}

pub fn pack_cg(s: &CGState, dim: usize) -> Vec<f64> {
    let mut y = Vec::with_capacity(3 * dim);
    y.extend_from_slice(&s.x[..dim]);
    y.extend_from_slice(&s.u[..dim]);
    y.extend_from_slice(&s.a[..dim]);
    y
}

pub fn unpack_cg(t: f64, y: &[f64], dim: usize) -> CGState {
    let mut s = CGState {
        x: [0.0; MAX_DIM],
        u: [0.0; MAX_DIM],
        a: [0.0; MAX_DIM],
        t,
    };
    s.x[..dim].copy_from_slice(&y[..dim]);
    s.u[..dim].copy_from_slice(&y[dim..2 * dim]);
    s.a[..dim].copy_from_slice(&y[2 * dim..3 * dim]);
    s
}

impl OdeSystem for CgSystem {
    fn dim(&self) -> usize {
        3 * self.entry.metric.dim
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> std::result::Result<(), RhsFailure> {
        let n = self.entry.metric.dim;
        let s = unpack_cg(t, y, n);
        let deriv = match (&self.entry.specialized, self.choice) {
            (Some(spec), RhsChoice::Specialized) if (spec.applies)(&s) => {
                if !self.entry.metric.chart.contains(&s.x[..n]) {
                    return Err(RhsFailure::new("chart domain exit"));
                }
                (spec.rhs)(&s, &self.sig)
            }
            _ => third_order_rhs(&self.entry.metric, &s, &self.sig)
                .map_err(|e| RhsFailure::new(e.to_string()))?,
        };
        dydt[..n].copy_from_slice(&deriv.xdot[..n]);
        dydt[n..2 * n].copy_from_slice(&deriv.udot[..n]);
        dydt[2 * n..3 * n].copy_from_slice(&deriv.adot[..n]);
        Ok(())
    }
}

/// The (v, b) flow of a catalog entry, state layout
/// `[x(0..n), v(n..2n), b(2n..3n), tau]`.
pub struct VbSystem {
    pub entry: CatalogEntry,
}

impl VbSystem {
    pub fn pack(s: &VBState, dim: usize) -> Vec<f64> {
        let mut y = Vec::with_capacity(3 * dim + 1);
        y.extend_from_slice(&s.x[..dim]);
        y.extend_from_slice(&s.v[..dim]);
        y.extend_from_slice(&s.b[..dim]);
        y.push(s.tau);
        y
    }

    pub fn unpack(y: &[f64], dim: usize) -> VBState {
        let mut s = VBState {
            x: [0.0; MAX_DIM],
            v: [0.0; MAX_DIM],
            b: [0.0; MAX_DIM],
            tau: y[3 * dim],
        };
        s.x[..dim].copy_from_slice(&y[..dim]);
        s.v[..dim].copy_from_slice(&y[dim..2 * dim]);
        s.b[..dim].copy_from_slice(&y[2 * dim..3 * dim]);
        s
    }
}

impl OdeSystem for VbSystem {
    fn dim(&self) -> usize {
        3 * self.entry.metric.dim + 1
    }

    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> std::result::Result<(), RhsFailure> {
        let n = self.entry.metric.dim;
        let s = Self::unpack(y, n);
        let d = vb_rhs(&self.entry.metric, &s).map_err(|e| RhsFailure::new(e.to_string()))?;
        dydt[..n].copy_from_slice(&d.xdot[..n]);
        dydt[n..2 * n].copy_from_slice(&d.vdot[..n]);
        dydt[2 * n..3 * n].copy_from_slice(&d.bdot[..n]);
        dydt[3 * n] = d.taudot;
        Ok(())
    }
}

/// Default event set for an entry: turning points of the confinement
/// variable, the gamma^2 = 1 frame singularity on Lorentzian Nil, and a
/// non-terminal flag when the velocity norm drifts beyond 1e-6.
pub fn default_events(entry: &CatalogEntry, sig: &Signature) -> Vec<EventSpec> {
    let n = entry.metric.dim;
    let mut events = Vec::new();
    match entry.id {
        CatalogId::NilRiem | CatalogId::NilLor | CatalogId::Berger => {
            events.push(EventSpec::new(EventKind::TurningPoint, move |_t, y: &[f64]| {
                y[2 * 3 + 2] // a3 = gammadot
            }));
        }
        CatalogId::AxisymPlane | CatalogId::AxisymGeneral => {
            events.push(EventSpec::new(EventKind::TurningPoint, move |_t, y: &[f64]| {
                y[3] // u1 = rdot
            }));
        }
        CatalogId::SchwarzschildExt => {
            events.push(EventSpec::new(EventKind::TurningPoint, move |_t, y: &[f64]| {
                y[5] // beta, rdot = V beta
            }));
        }
        CatalogId::E3 | CatalogId::M3 | CatalogId::S3 | CatalogId::H3 => {
            // turning points of |x| from the chart origin: d|x|^2/dt ~ x.u
            events.push(EventSpec::new(EventKind::TurningPoint, move |_t, y: &[f64]| {
                (0..3).map(|i| y[i] * y[3 + i]).sum::<f64>()
            }));
        }
        _ => {}
    }
    if entry.id == CatalogId::NilLor {
        events.push(EventSpec::new(EventKind::FrameSingularity, |_t, y: &[f64]| {
            y[5] * y[5] - 1.0 // gamma^2 - 1
        }));
    }
    let eta = entry.metric.eta;
    let eps = sig.epsilon;
    events.push(
        EventSpec::new(EventKind::NormDriftExceeded, move |_t, y: &[f64]| {
            let mut norm = 0.0;
            for i in 0..n {
                norm += eta[i] * y[n + i] * y[n + i];
            }
            (norm - eps).abs() - 1e-6
        })
        .direction(crate::integrator::EventDirection::Up),
    );
    events
}

/// Monitor closures for an entry: the metric pairings `eta(u,u)`, `eta(u,a)`
/// plus every catalogued conserved quantity.
pub fn monitor_quantities(
    entry: &CatalogEntry,
    _sig: &Signature,
) -> Vec<(String, Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>)> {
    let n = entry.metric.dim;
    let eta = entry.metric.eta;
    let mut out: Vec<(String, Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>)> = vec![
        (
            "u_norm".to_string(),
            Arc::new(move |_t, y: &[f64]| {
                (0..n).map(|i| eta[i] * y[n + i] * y[n + i]).sum()
            }),
        ),
        (
            "u_dot_a".to_string(),
            Arc::new(move |_t, y: &[f64]| {
                (0..n).map(|i| eta[i] * y[n + i] * y[2 * n + i]).sum()
            }),
        ),
    ];
    for inv in &entry.invariants {
        let f = inv.eval.clone();
        out.push((
            inv.name.clone(),
            Arc::new(move |t, y: &[f64]| f(&unpack_cg(t, y, n))),
        ));
    }
    out
}

/// Validate, integrate and monitor a third-order initial state on an entry.
pub fn integrate_entry(
    entry: &CatalogEntry,
    sig: &Signature,
    s0: &CGState,
    cfg: &IntegratorConfig,
    choice: RhsChoice,
) -> Result<Trajectory> {
    let report = crate::frame::validate_state(&entry.metric, s0, sig, 1e-6);
    if !report.pass {
        return Err(Error::InvalidState(format!(
            "initial data inconsistent with the {:?} signature: |eta(u,u)-eps| = {:.3e}, |eta(u,a)| = {:.3e}",
            sig.kind, report.norm_defect, report.orthogonality_defect
        )));
    }
    let sys = CgSystem {
        entry: entry.clone(),
        sig: *sig,
        choice,
    };
    let y0 = sys.pack(s0);
    let events = default_events(entry, sig);
    let mut traj = integrate(&sys, &y0, cfg, &events);
    traj.drift = crate::integrator::monitor(&traj, &monitor_quantities(entry, sig));
    Ok(traj)
}

/// Two solutions of the chi equation with unit Wronskian, sampled along a
/// trajectory, and the projective parameter `tau = chi2/chi1`.
#[derive(Debug, Clone)]
pub struct ChiPair {
    pub ts: Vec<f64>,
    pub chi1: Vec<f64>,
    pub chi1_dot: Vec<f64>,
    pub chi2: Vec<f64>,
    pub chi2_dot: Vec<f64>,
    /// max |W - W(0)| along the trajectory, W = chi1 chi2' - chi2 chi1'.
    pub wronskian_drift: f64,
    /// Zeros of chi1 (poles of tau).
    pub tau_poles: Vec<f64>,
}

impl ChiPair {
    pub fn tau(&self, k: usize) -> f64 {
        self.chi2[k] / self.chi1[k]
    }
}

struct ChiSystem<'a> {
    traj: &'a Trajectory,
    entry: &'a CatalogEntry,
    eps: f64,
}

impl ChiSystem<'_> {
    fn coefficient(&self, t: f64) -> f64 {
        let n = self.entry.metric.dim;
        let y = self.traj.eval(t);
        let s = unpack_cg(t, &y, n);
        let a2 = self.entry.metric.norm(&s.a[..n]);
        let schouten = self.entry.metric.schouten(&s.x[..n]);
        let mut l_uu = 0.0;
        for i in 0..n {
            for j in 0..n {
                l_uu += schouten[i][j] * s.u[i] * s.u[j];
            }
        }
        -(self.eps / 4.0) * (a2 + 2.0 * self.eps * l_uu)
    }
}

impl OdeSystem for ChiSystem<'_> {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> std::result::Result<(), RhsFailure> {
        let c = self.coefficient(t);
        dydt[0] = y[1];
        dydt[1] = c * y[0];
        dydt[2] = y[3];
        dydt[3] = c * y[2];
        Ok(())
    }
}

/// Integrate the chi equation along a previously computed trajectory with the
/// default basis `chi1(0) = 1, chi1'(0) = 0, chi2(0) = 0, chi2'(0) = 1`
/// (unit Wronskian). The basis is a choice; alternatives go through
/// [`chi_evolve_with_basis`].
pub fn chi_evolve(traj: &Trajectory, entry: &CatalogEntry, sig: &Signature) -> ChiPair {
    chi_evolve_with_basis(traj, entry, sig, [[1.0, 0.0], [0.0, 1.0]])
}

/// `basis[0] = (chi1(0), chi1'(0))`, `basis[1] = (chi2(0), chi2'(0))`;
/// the Wronskian of the basis must be nonzero (1 for a unit-Wronskian pair).
pub fn chi_evolve_with_basis(
    traj: &Trajectory,
    entry: &CatalogEntry,
    sig: &Signature,
    basis: [[f64; 2]; 2],
) -> ChiPair {
    let sys = ChiSystem {
        traj,
        entry,
        eps: sig.epsilon,
    };
    let span = traj.end_time() - traj.start_time();
    let cfg = IntegratorConfig {
        t_max: span,
        ..Default::default()
    };
    let y0 = [basis[0][0], basis[0][1], basis[1][0], basis[1][1]];
    let pole_events = vec![EventSpec::new(EventKind::FrameSingularity, |_t, y: &[f64]| y[0])];
    let chi_traj = crate::integrator::integrate_from(&sys, traj.start_time(), &y0, &cfg, &pole_events);
    let w0 = basis[0][0] * basis[1][1] - basis[1][0] * basis[0][1];
    let mut wdrift = 0.0f64;
    for y in &chi_traj.ys {
        let w = y[0] * y[3] - y[2] * y[1];
        wdrift = wdrift.max((w - w0).abs());
    }
    ChiPair {
        ts: chi_traj.ts.clone(),
        chi1: chi_traj.ys.iter().map(|y| y[0]).collect(),
        chi1_dot: chi_traj.ys.iter().map(|y| y[1]).collect(),
        chi2: chi_traj.ys.iter().map(|y| y[2]).collect(),
        chi2_dot: chi_traj.ys.iter().map(|y| y[3]).collect(),
        wronskian_drift: wdrift,
        tau_poles: chi_traj
            .events
            .iter()
            .filter(|e| e.kind == EventKind::FrameSingularity)
            .map(|e| e.t)
            .collect(),
    }
}
