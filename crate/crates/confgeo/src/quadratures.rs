//! Reductions to quadratures and closed-form special solutions: the Nil and
//! Berger quartics `gammadot^2 = F(gamma)` with their conserved pairs (E, J),
//! the axisymmetric radial potential `f(r)`, and the Schwarzschild radial and
//! equatorial reductions. These serve as independent oracles for the full
//! integrator.


use crate::catalog::axisym::{RadialProfile, SurfaceProfile};
use crate::error::{Error, Result};
use crate::frame::CGState;
use crate::integrator::{
    integrate, EventKind, EventSpec, IntegratorConfig, OdeSystem, RhsFailure, Termination,
    Trajectory,
};
use crate::numeric::{brent, integrate_adaptive, linear_fit, poly_roots, polyval, Root};

/// Which quartic reduction a [`QuarticReduction`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum QuarticCase {
    NilRiem,
    NilLor,
    Berger,
}

/// An interval of gamma values with `F >= 0` accessible to the evolution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AllowedInterval {
    pub lo: f64,
    pub hi: f64,
    /// Unbounded intervals (Lorentzian Nil) carry infinite endpoints.
    pub bounded: bool,
}

/// Coefficients, constants and classified real roots of `F(gamma)`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct QuarticReduction {
    /// (c4, c3, c2, c1, c0), highest degree first.
    pub coeffs: [f64; 5],
    pub e: f64,
    pub j: f64,
    pub lambda: f64,
    pub case: QuarticCase,
    pub roots: Vec<crate::numeric::Root>,
    pub allowed: Vec<AllowedInterval>,
}

impl QuarticReduction {
    pub fn f(&self, gamma: f64) -> f64 {
        polyval(&self.coeffs, gamma)
    }

    pub fn f_prime(&self, gamma: f64) -> f64 {
        let c = &self.coeffs;
        ((4.0 * c[0] * gamma + 3.0 * c[1]) * gamma + 2.0 * c[2]) * gamma + c[3]
    }
}

/// The conserved pair (E, J) of the Nil reduction, signature-correct.
pub fn nil_constants(s: &CGState, lambda: f64, epsilon: i32) -> (f64, f64) {
    (
        crate::catalog::nil::nil_e(s, lambda, epsilon),
        crate::catalog::nil::nil_j(s, lambda, epsilon),
    )
}

fn classify_allowed(coeffs: &[f64; 5], roots: &[Root], clamp_unit: bool) -> Vec<AllowedInterval> {
    // sorted breakpoints; F is sign-definite between consecutive simple roots
    let mut pts: Vec<f64> = roots.iter().map(|r| r.x).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo_bound = if clamp_unit { -1.0 } else { f64::NEG_INFINITY };
    let hi_bound = if clamp_unit { 1.0 } else { f64::INFINITY };
    let mut nodes = vec![lo_bound];
    for p in &pts {
        if *p > lo_bound && *p < hi_bound {
            nodes.push(*p);
        }
    }
    nodes.push(hi_bound);
    let mut out = Vec::new();
    for w in nodes.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let probe = if lo.is_infinite() {
            hi - 1.0
        } else if hi.is_infinite() {
            lo + 1.0
        } else {
            0.5 * (lo + hi)
        };
        if polyval(coeffs, probe) > 0.0 {
            out.push(AllowedInterval {
                lo,
                hi,
                bounded: lo.is_finite() && hi.is_finite(),
            });
        }
    }
    // isolated double roots (constant solutions) count as degenerate intervals
    for r in roots.iter().filter(|r| r.multiplicity > 1) {
        let inside = out.iter().any(|iv| iv.lo <= r.x && r.x <= iv.hi);
        if !inside && r.x >= lo_bound && r.x <= hi_bound {
            out.push(AllowedInterval {
                lo: r.x,
                hi: r.x,
                bounded: true,
            });
        }
    }
    out.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    out
}

const DOUBLE_ROOT_TOL: f64 = 1e-10;

/// Quartic reduction for Nil:
/// `F = -l^2 g^4 + (3/4 l^2 - E) g^2 + l J g + E - J^2` (Riemannian) or
/// `F = +l^2 g^4 - (3/4 l^2 + E) g^2 + l J g + E + J^2` (Lorentzian).
pub fn nil_quartic(e: f64, j: f64, lambda: f64, epsilon: i32) -> Result<QuarticReduction> {
    if lambda == 0.0 {
        return Err(Error::Config("nil quartic needs lambda != 0".into()));
    }
    let l2 = lambda * lambda;
    let (coeffs, case, clamp) = if epsilon == 1 {
        (
            [-l2, 0.0, 0.75 * l2 - e, lambda * j, e - j * j],
            QuarticCase::NilRiem,
            true,
        )
    } else {
        (
            [l2, 0.0, -(0.75 * l2 + e), lambda * j, e + j * j],
            QuarticCase::NilLor,
            false,
        )
    };
    let roots = poly_roots(&coeffs, DOUBLE_ROOT_TOL);
    let allowed = classify_allowed(&coeffs, &roots, clamp);
    Ok(QuarticReduction {
        coeffs,
        e,
        j,
        lambda,
        case,
        roots,
        allowed,
    })
}

/// Berger quartic
/// `F = (1-l^2)(g^4 - g^2) - (E + A^2) g^2 - 2 A J g + E - J^2`, `A = l/2`.
pub fn berger_quartic(e: f64, j: f64, lambda: f64) -> Result<QuarticReduction> {
    if lambda <= 0.0 {
        return Err(Error::Config("berger lambda must be positive".into()));
    }
    let a = lambda / 2.0;
    let one_m_l2 = 1.0 - lambda * lambda;
    let coeffs = [
        one_m_l2,
        0.0,
        -one_m_l2 - (e + a * a),
        -2.0 * a * j,
        e - j * j,
    ];
    let roots = poly_roots(&coeffs, DOUBLE_ROOT_TOL);
    let allowed = classify_allowed(&coeffs, &roots, true);
    Ok(QuarticReduction {
        coeffs,
        e,
        j,
        lambda,
        case: QuarticCase::Berger,
        roots,
        allowed,
    })
}

/// gamma evolution by the regularized second-order form
/// `gammadd = F'(gamma)/2` (exact for polynomial F), which handles turning
/// points without square-root sign bookkeeping.
struct GammaSystem {
    q: QuarticReduction,
}

impl OdeSystem for GammaSystem {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> std::result::Result<(), RhsFailure> {
        dydt[0] = y[1];
        dydt[1] = 0.5 * self.q.f_prime(y[0]);
        Ok(())
    }
}

/// Result of a 1-D quadrature evolution.
#[derive(Debug, Clone)]
pub struct GammaEvolution {
    pub ts: Vec<f64>,
    pub gammas: Vec<f64>,
    pub gamma_dots: Vec<f64>,
    pub turning_points: Vec<f64>,
    /// Fitted finite escape time, with the rms residual of the 1/gamma fit.
    pub blowup: Option<BlowupFit>,
    pub constant: bool,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct BlowupFit {
    pub t0: f64,
    pub residual: f64,
}

/// Fit `1/gamma ~ +-lambda (t0 - t)` by least squares over the last decade of
/// growth of |gamma|.
pub fn fit_blowup_time(ts: &[f64], gammas: &[f64]) -> Option<BlowupFit> {
    let gmax = gammas.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if !gmax.is_finite() || gmax < 10.0 {
        return None;
    }
    let cutoff = gmax / 10.0;
    let sel: Vec<(f64, f64)> = ts
        .iter()
        .zip(gammas)
        .filter(|(_, g)| g.abs() >= cutoff)
        .map(|(t, g)| (*t, 1.0 / *g))
        .collect();
    if sel.len() < 4 {
        return None;
    }
    let (p, q, residual) = linear_fit(
        &sel.iter().map(|s| s.0).collect::<Vec<_>>(),
        &sel.iter().map(|s| s.1).collect::<Vec<_>>(),
    );
    if q.abs() < 1e-300 {
        return None;
    }
    Some(BlowupFit {
        t0: -p / q,
        residual,
    })
}

/// Evolve `gammadot^2 = F(gamma)` from `gamma(0) = gamma0` with the initial
/// sign of gammadot chosen by `dgamma0_sign` (ignored at turning points,
/// where `F(gamma0) = 0` forces gammadot = 0). Stalls at double roots;
/// detects finite-time escape on the Lorentzian branch and fits the blow-up
/// time.
pub fn gamma_evolve(
    q: &QuarticReduction,
    gamma0: f64,
    dgamma0_sign: f64,
    t_span: f64,
) -> Result<GammaEvolution> {
    let f0 = q.f(gamma0);
    let scale = q.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
    if f0 < -1e-12 * scale {
        return Err(Error::Infeasible(format!(
            "F(gamma0) = {f0} < 0: no real evolution from gamma0 = {gamma0}"
        )));
    }
    // double-root stall: the constant solutions of the paper's families
    if let Some(r) = q
        .roots
        .iter()
        .find(|r| r.multiplicity > 1 && (r.x - gamma0).abs() < DOUBLE_ROOT_TOL)
    {
        let ts = vec![0.0, t_span];
        return Ok(GammaEvolution {
            ts: ts.clone(),
            gammas: vec![r.x; 2],
            gamma_dots: vec![0.0; 2],
            turning_points: Vec::new(),
            blowup: None,
            constant: true,
            trajectory: Trajectory {
                ts,
                ys: vec![vec![r.x, 0.0]; 2],
                dense: Vec::new(),
                events: Vec::new(),
                termination: Termination::TMaxReached,
                drift: Default::default(),
                n_steps: 0,
                n_rejected: 0,
                n_rhs: 0,
            },
        });
    }
    let gdot0 = if f0 > 0.0 {
        dgamma0_sign.signum() * f0.sqrt()
    } else {
        0.0
    };
    let sys = GammaSystem { q: q.clone() };
    let cfg = IntegratorConfig {
        t_max: t_span,
        blowup_threshold: 1e8,
        ..Default::default()
    };
    let events = vec![EventSpec::new(EventKind::TurningPoint, |_t, y: &[f64]| y[1])];
    let traj = integrate(&sys, &[gamma0, gdot0], &cfg, &events);
    let gammas: Vec<f64> = traj.ys.iter().map(|y| y[0]).collect();
    let gamma_dots: Vec<f64> = traj.ys.iter().map(|y| y[1]).collect();
    let blowup = match traj.termination {
        Termination::Blowup { .. } | Termination::MinStep { .. } => {
            fit_blowup_time(&traj.ts, &gammas)
        }
        _ => None,
    };
    Ok(GammaEvolution {
        ts: traj.ts.clone(),
        gammas,
        gamma_dots,
        turning_points: traj
            .events
            .iter()
            .filter(|e| e.kind == EventKind::TurningPoint)
            .map(|e| e.t)
            .collect(),
        blowup,
        constant: false,
        trajectory: traj,
    })
}

/// The chi rate of the angular quadrature, case-correct:
///   Nil Riemannian: `(-J + 3/2 l g - l g^3) / (1 - g^2)`
///   Nil Lorentzian: `(J + 3/2 l g - l g^3) / (g^2 - 1)`
///   Berger:         `-(J + A g - (C - A) g (1 - g^2)) / (1 - g^2)`
/// Removable singularities at `g^2 = 1` are evaluated by their limit; genuine
/// poles are an error (the parametrization must switch charts there).
pub fn chi_rate(gamma: f64, j: f64, lambda: f64, case: QuarticCase) -> Result<f64> {
    let l = lambda;
    let near_unit = (gamma * gamma - 1.0).abs() < 1e-9;
    match case {
        QuarticCase::NilRiem => {
            let num = -j + 1.5 * l * gamma - l * gamma * gamma * gamma;
            if near_unit {
                return chi_rate_limit(gamma, num, |g| 1.5 * l - 3.0 * l * g * g, -2.0);
            }
            Ok(num / (1.0 - gamma * gamma))
        }
        QuarticCase::NilLor => {
            let num = j + 1.5 * l * gamma - l * gamma * gamma * gamma;
            if near_unit {
                return chi_rate_limit(gamma, num, |g| 1.5 * l - 3.0 * l * g * g, 2.0);
            }
            Ok(num / (gamma * gamma - 1.0))
        }
        QuarticCase::Berger => {
            let a = l / 2.0;
            let c = (2.0 - l * l) / (2.0 * l);
            let num = -(j + a * gamma - (c - a) * gamma * (1.0 - gamma * gamma));
            if near_unit {
                // d/dg of the numerator over d/dg of (1 - g^2)
                return chi_rate_limit(
                    gamma,
                    num,
                    |g| -(a - (c - a) * (1.0 - 3.0 * g * g)),
                    -2.0,
                );
            }
            Ok(num / (1.0 - gamma * gamma))
        }
    }
}

fn chi_rate_limit(
    gamma: f64,
    num: f64,
    dnum: impl Fn(f64) -> f64,
    dden_coeff: f64,
) -> Result<f64> {
    if num.abs() > 1e-7 {
        return Err(Error::SingularParametrization { gamma });
    }
    // l'Hopital at the nearest unit point
    let g = gamma.signum();
    Ok(dnum(g) / (dden_coeff * g))
}

/// Closed-form special solutions of the Lorentzian Nil system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NilLorSpecial {
    /// E = J = 0: `gamma = (sqrt3/2) sec(omega)`, `omega = (l sqrt3 / 2) t`,
    /// with `alpha + beta` and `alpha - beta` fixed by `C1 C2 = 1`.
    SecSolution { lambda: f64, c1: f64 },
    /// Constant gamma0 (gamma0^2 != 1): `alphadot = Omega beta`,
    /// `betadot = Omega alpha`, `Omega = k - l gamma0`,
    /// `k = (J + l gamma0/2)/(gamma0^2 - 1)`.
    ConstGamma {
        lambda: f64,
        gamma0: f64,
        j: f64,
        alpha0: f64,
        beta0: f64,
    },
    /// alpha = beta, gamma = 1: `alphadd + (3/2) l alphadot - (1/2) l^2 alpha = 0`,
    /// null acceleration `a1 = a2 = alphadot + l alpha`, `a3 = 0`.
    AlphaEqBeta { lambda: f64, c_plus: f64, c_minus: f64 },
}

/// Velocity components (alpha, beta, gamma) and acceleration (a1, a2, a3) of
/// a special solution at parameter t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialSample {
    pub u: [f64; 3],
    pub a: [f64; 3],
}

/// Characteristic roots of the alpha = beta family,
/// `s^2 + (3/2) l s - (1/2) l^2 = 0`.
pub fn alpha_eq_beta_roots(lambda: f64) -> (f64, f64) {
    let disc = (2.25 * lambda * lambda + 2.0 * lambda * lambda).sqrt();
    ((-1.5 * lambda + disc) / 2.0, (-1.5 * lambda - disc) / 2.0)
}

pub fn nil_lor_special(kind: &NilLorSpecial, t: f64) -> Result<SpecialSample> {
    match *kind {
        NilLorSpecial::SecSolution { lambda, c1 } => {
            if c1 == 0.0 {
                return Err(Error::Config("sec solution needs C1 != 0 (C1 C2 = 1)".into()));
            }
            let c2 = 1.0 / c1;
            let omega = lambda * 3.0f64.sqrt() / 2.0 * t;
            let (s, c) = omega.sin_cos();
            if (1.0 + s).abs() < 1e-14 || (1.0 - s).abs() < 1e-14 || c.abs() < 1e-14 {
                return Err(Error::SingularParametrization { gamma: f64::INFINITY });
            }
            let gamma = 3.0f64.sqrt() / 2.0 / c;
            let apb = c1 * (1.0 - 2.0 * s) / (2.0 * (1.0 + s));
            let amb = c2 * (1.0 + 2.0 * s) / (2.0 * (1.0 - s));
            let alpha = 0.5 * (apb + amb);
            let beta = 0.5 * (apb - amb);
            // derivatives for the acceleration (ac11)
            let od = lambda * 3.0f64.sqrt() / 2.0;
            let dapb = c1 * od * (-2.0 * c * (1.0 + s) - (1.0 - 2.0 * s) * c) / (2.0 * (1.0 + s) * (1.0 + s));
            let damb = c2 * od * (2.0 * c * (1.0 - s) + (1.0 + 2.0 * s) * c) / (2.0 * (1.0 - s) * (1.0 - s));
            let adot = 0.5 * (dapb + damb);
            let bdot = 0.5 * (dapb - damb);
            let gdot = 3.0f64.sqrt() / 2.0 * od * s / (c * c);
            Ok(SpecialSample {
                u: [alpha, beta, gamma],
                a: [
                    adot + lambda * beta * gamma,
                    bdot + lambda * alpha * gamma,
                    gdot,
                ],
            })
        }
        NilLorSpecial::ConstGamma {
            lambda,
            gamma0,
            j,
            alpha0,
            beta0,
        } => {
            if (gamma0 * gamma0 - 1.0).abs() < 1e-12 {
                return Err(Error::Config("constant-gamma family needs gamma0^2 != 1".into()));
            }
            if (alpha0 * alpha0 - beta0 * beta0 - (1.0 - gamma0 * gamma0)).abs() > 1e-9 {
                return Err(Error::Config(
                    "initial (alpha0, beta0) must satisfy alpha^2 - beta^2 = 1 - gamma0^2".into(),
                ));
            }
            let k = (j + 0.5 * lambda * gamma0) / (gamma0 * gamma0 - 1.0);
            let om = k - lambda * gamma0;
            let (ch, sh) = ((om * t).cosh(), (om * t).sinh());
            let alpha = alpha0 * ch + beta0 * sh;
            let beta = beta0 * ch + alpha0 * sh;
            Ok(SpecialSample {
                u: [alpha, beta, gamma0],
                a: [k * beta, k * alpha, 0.0],
            })
        }
        NilLorSpecial::AlphaEqBeta {
            lambda,
            c_plus,
            c_minus,
        } => {
            let (s1, s2) = alpha_eq_beta_roots(lambda);
            let alpha = c_plus * (s1 * t).exp() + c_minus * (s2 * t).exp();
            let adot = c_plus * s1 * (s1 * t).exp() + c_minus * s2 * (s2 * t).exp();
            let a12 = adot + lambda * alpha;
            Ok(SpecialSample {
                u: [alpha, alpha, 1.0],
                a: [a12, a12, 0.0],
            })
        }
    }
}

/// Berger reduction: constants from a state, the quartic, and the E = J = 0
/// sech special solution (exists only for lambda^2 > 4/3).
pub fn berger_reduction(s: &CGState, lambda: f64) -> Result<QuarticReduction> {
    berger_quartic(
        crate::catalog::berger::berger_e(s, lambda),
        crate::catalog::berger::berger_j(s, lambda),
        lambda,
    )
}

/// Parameters (k, mu) of the Berger sech solution `gamma = k sech(mu t)`.
pub fn berger_sech_params(lambda: f64) -> Result<(f64, f64)> {
    let l2 = lambda * lambda;
    if l2 <= 4.0 / 3.0 {
        return Err(Error::Nonexistence(format!(
            "the E = J = 0 special solution does not exist for lambda^2 = {l2} <= 4/3"
        )));
    }
    let k2 = (0.75 * l2 - 1.0) / (l2 - 1.0);
    let k = k2.sqrt();
    Ok((k, k * (l2 - 1.0).sqrt()))
}

/// Radial reduction of the planar axisymmetric dynamics:
/// `rdot^2 = 1 - (C + q G)^2 / F^2 =: f(r)`.
#[derive(Clone)]
pub struct RadialReduction {
    profile: SurfaceProfile,
    pub q: f64,
    pub c: f64,
}

impl RadialReduction {
    pub fn new(profile: SurfaceProfile, q: f64, c: f64) -> Self {
        RadialReduction { profile, q, c }
    }

    pub fn f(&self, r: f64) -> f64 {
        let fv = (self.profile.f)(r, 0.0).v;
        let g = self.profile.g_planar(r);
        1.0 - ((self.c + self.q * g) / fv).powi(2)
    }

    /// Orbit integrand `dphi/dr = (C + qG) / (F sqrt(F^2 - (C+qG)^2))`.
    pub fn orbit_integrand(&self, r: f64) -> Result<f64> {
        let fv = (self.profile.f)(r, 0.0).v;
        let g = self.c + self.q * self.profile.g_planar(r);
        let rad = fv * fv - g * g;
        if rad <= 0.0 {
            return Err(Error::Infeasible(format!(
                "orbit radicand negative at r = {r}"
            )));
        }
        Ok(g / (fv * rad.sqrt()))
    }

    /// Accumulated phi between two radii inside an allowed band.
    pub fn orbit_angle(&self, r0: f64, r1: f64) -> Result<f64> {
        // validate the band first
        for k in 0..=20 {
            let r = r0 + (r1 - r0) * k as f64 / 20.0;
            self.orbit_integrand(r)?;
        }
        Ok(integrate_adaptive(
            |r| self.orbit_integrand(r).unwrap_or(0.0),
            r0,
            r1,
            1e-10,
        ))
    }

    /// Roots of f(r) bracketing `r_start` (the radial band of the orbit).
    pub fn radial_band(&self, r_start: f64, r_max_search: f64) -> Result<(f64, f64)> {
        if self.f(r_start) < 0.0 {
            return Err(Error::Infeasible(format!(
                "f(r) < 0 at the requested start radius {r_start}"
            )));
        }
        let n = 4000;
        let mut lo = None;
        let mut r_prev = r_start;
        let mut f_prev = self.f(r_start);
        // march downwards
        for k in 1..=n {
            let r = r_start * (1.0 - k as f64 / n as f64) + 1e-9 * k as f64 / n as f64;
            let fv = self.f(r);
            if f_prev >= 0.0 && fv < 0.0 {
                lo = Some(brent(|x| self.f(x), r, r_prev, 1e-13));
                break;
            }
            r_prev = r;
            f_prev = fv;
        }
        let mut hi = None;
        r_prev = r_start;
        f_prev = self.f(r_start);
        for k in 1..=n {
            let r = r_start + (r_max_search - r_start) * k as f64 / n as f64;
            let fv = self.f(r);
            if f_prev >= 0.0 && fv < 0.0 {
                hi = Some(brent(|x| self.f(x), r_prev, r, 1e-13));
                break;
            }
            r_prev = r;
            f_prev = fv;
        }
        match (lo, hi) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Infeasible(
                "no bounded radial band around the start radius".into(),
            )),
        }
    }
}

/// Circular-orbit parameters at radius `a`:
/// `q = +-F'(a)/F(a)`, `C = +-(F(a)^2 - F'(a) G(a))/F(a)`.
pub fn circular_params(profile: &SurfaceProfile, a: f64, sign: f64) -> (f64, f64) {
    let f = (profile.f)(a, 0.0);
    let g = profile.g_planar(a);
    let q = sign * f.dr / f.v;
    let c = sign * (f.v * f.v - f.dr * g) / f.v;
    (q, c)
}

/// Stability discriminant of the circular orbit,
/// `f''(a) = 2 (F F'' - F'^2) / F^2`.
pub fn circular_stability(profile: &SurfaceProfile, a: f64) -> f64 {
    let f = (profile.f)(a, 0.0);
    2.0 * (f.v * f.drr - f.dr * f.dr) / (f.v * f.v)
}

/// Axisymmetric reduction from a radial profile and the conserved (q, C).
pub fn axisym_reduction(profile: &RadialProfile, q: f64, c: f64) -> RadialReduction {
    RadialReduction::new(SurfaceProfile::from_radial(profile), q, c)
}

/// Schwarzschild radial time-like reduction,
/// `rdot^2 = a^2 (r - r0)^2 - 1 + 2m/r`.
#[derive(Debug, Clone, Copy)]
pub struct SchwRadial {
    pub m: f64,
    pub a: f64,
    pub r0: f64,
}

/// Root-count regimes of the radial turning-point equation on r > 2m.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum RadialRegime {
    /// Two turning points, both greater than 2m.
    TwoRoots { inner: f64, outer: f64 },
    /// Graphs of V^2 and a^2 (r - r0)^2 tangent: a static conformal geodesic
    /// sits at the tangency radius.
    Tangency { radius: f64 },
    /// No turning point: purely incoming or outgoing radial geodesics.
    NoRoot,
}

impl SchwRadial {
    pub fn rdot2(&self, r: f64) -> f64 {
        self.a * self.a * (r - self.r0) * (r - self.r0) - 1.0 + 2.0 * self.m / r
    }

    /// Classify the turning-point structure on (2m, infinity) by locating the
    /// interior minimum of rdot^2 and bracketing sign changes around it.
    pub fn classify(&self, tangency_tol: f64) -> RadialRegime {
        let m = self.m;
        let r_lo = 2.0 * m * (1.0 + 1e-12);
        // W' = 2 a^2 (r - r0) - 2m/r^2; find the interior critical point
        let wp = |r: f64| 2.0 * self.a * self.a * (r - self.r0) - 2.0 * m / (r * r);
        let mut r_hi = 2.0 * m + 1.0;
        let mut iter = 0;
        while wp(r_hi) < 0.0 && iter < 200 {
            r_hi *= 2.0;
            iter += 1;
        }
        if wp(r_lo) >= 0.0 {
            // monotone increasing: W(2m+) = a^2(2m - r0)^2 >= 0, no interior dip
            return RadialRegime::NoRoot;
        }
        let rc = brent(wp, r_lo, r_hi, 1e-12);
        let wmin = self.rdot2(rc);
        if wmin.abs() <= tangency_tol {
            RadialRegime::Tangency { radius: rc }
        } else if wmin > 0.0 {
            RadialRegime::NoRoot
        } else {
            let inner = brent(|r| self.rdot2(r), r_lo, rc, 1e-13);
            let mut r_out = rc + 1.0;
            let mut iter = 0;
            while self.rdot2(r_out) < 0.0 && iter < 200 {
                r_out *= 2.0;
                iter += 1;
            }
            let outer = brent(|r| self.rdot2(r), rc, r_out, 1e-13);
            RadialRegime::TwoRoots { inner, outer }
        }
    }
}

/// Critical `r0` at fixed acceleration `a`: the tangency condition
/// `V' = a` fixes the radius, then `r0 = r - V/a`.
pub fn schwarzschild_tangency(m: f64, a: f64) -> Result<(f64, f64)> {
    if a <= 0.0 {
        return Err(Error::Config("tangency needs a > 0".into()));
    }
    // V'(r) = m / (r^2 V) decreases from +inf at the horizon to 0: one root
    let vp = |r: f64| m / (r * r * (1.0 - 2.0 * m / r).sqrt()) - a;
    let mut r_hi = 2.0 * m + 1.0;
    let mut iter = 0;
    while vp(r_hi) > 0.0 && iter < 200 {
        r_hi *= 2.0;
        iter += 1;
    }
    let rc = brent(vp, 2.0 * m * (1.0 + 1e-13), r_hi, 1e-13);
    let v = (1.0 - 2.0 * m / rc).sqrt();
    Ok((rc, rc - v / a))
}

/// Equatorial space-like reduction: `rdot^2 = V^2 (1 - (G + C)^2 / r^2)` with
/// `G' = q r / V`, `G(ref_radius) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct SchwEquatorial {
    pub m: f64,
    pub q: f64,
    pub c: f64,
    pub ref_radius: f64,
}

impl SchwEquatorial {
    pub fn g(&self, r: f64) -> f64 {
        if self.q == 0.0 {
            return 0.0;
        }
        let m = self.m;
        let q = self.q;
        integrate_adaptive(
            move |s| q * s / (1.0 - 2.0 * m / s).sqrt(),
            self.ref_radius,
            r,
            1e-12,
        )
    }

    pub fn rdot2(&self, r: f64) -> f64 {
        let v2 = 1.0 - 2.0 * self.m / r;
        let g = self.g(r) + self.c;
        v2 * (1.0 - g * g / (r * r))
    }
}
