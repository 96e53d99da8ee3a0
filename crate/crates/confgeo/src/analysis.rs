//! Trajectory classification (closure, confinement, blow-up, spiral verdicts)
//! and numerical verification of the Killing-trajectory and
//! totally-conformally-geodesic statements.

use serde::{Deserialize, Serialize};

use crate::catalog::axisym::SurfaceProfile;
use crate::catalog::{CatalogEntry, KillingField};
use crate::dynamics::{third_order_rhs, unpack_cg};
use crate::error::{Error, Result};
use crate::frame::{CGState, Signature, MAX_DIM};
use crate::integrator::{Termination, Trajectory};
use crate::quadratures::{circular_params, circular_stability, fit_blowup_time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Closed,
    RosetteAnnulus,
    AsymptoticToGeodesic,
    BlowupFiniteTime,
    SecularDivergent,
    ConstantFamily,
    Undetermined,
}

/// Evidence fields are populated only when relevant to the verdict kind.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OrbitEvidence {
    pub period: Option<f64>,
    pub annulus: Option<(f64, f64)>,
    pub blowup_t0: Option<f64>,
    pub blowup_residual: Option<f64>,
    pub secular_rate: Option<f64>,
    pub final_accel: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitVerdict {
    pub kind: VerdictKind,
    pub evidence: OrbitEvidence,
}

const CLOSURE_TOL: f64 = 1e-6;
const CONSTANT_TOL: f64 = 1e-8;
const ASYMPTOTIC_ACCEL: f64 = 1e-4;

fn state_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Detect full-state recurrence: first dense local minimum below tolerance,
/// confirmed by a second recurrence at twice the period (guards against
/// near-resonant rosettes).
fn detect_closure(traj: &Trajectory) -> Option<f64> {
    let t0 = traj.start_time();
    let t1 = traj.end_time();
    let span = t1 - t0;
    if span <= 0.0 {
        return None;
    }
    let y0 = &traj.ys[0];
    let n_grid = 4000;
    let dt = span / n_grid as f64;
    let mut best: Option<f64> = None;
    let mut prev_d = f64::INFINITY;
    let mut falling = false;
    for k in 1..=n_grid {
        let t = t0 + k as f64 * dt;
        let d = state_distance(&traj.eval(t), y0);
        if d < prev_d {
            falling = true;
        } else if falling {
            // local minimum near t - dt
            if prev_d < CLOSURE_TOL * 10.0 && (t - dt - t0) > 10.0 * dt {
                // refine by golden-section around the bracket
                let f = |tt: f64| state_distance(&traj.eval(tt), y0);
                let mut lo = t - 2.0 * dt;
                let mut hi = t;
                for _ in 0..60 {
                    let m1 = lo + (hi - lo) * 0.382;
                    let m2 = lo + (hi - lo) * 0.618;
                    if f(m1) < f(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                let tm = 0.5 * (lo + hi);
                if f(tm) < CLOSURE_TOL {
                    best = Some(tm - t0);
                    break;
                }
            }
            falling = false;
        }
        prev_d = d;
    }
    let period = best?;
    // period-doubling confirmation
    if t0 + 2.0 * period <= t1 {
        let window = period * 0.05;
        let mut ok = false;
        for k in 0..=100 {
            let t = t0 + 2.0 * period - window + 2.0 * window * k as f64 / 100.0;
            if t <= t1 && state_distance(&traj.eval(t), y0) < CLOSURE_TOL {
                ok = true;
                break;
            }
        }
        if !ok {
            return None;
        }
    }
    Some(period)
}

/// Classify a trajectory on its entry. Requires either at least three turning
/// points of the confinement variable or a blow-up termination.
pub fn classify_orbit(
    traj: &Trajectory,
    entry: &CatalogEntry,
    _sig: &Signature,
) -> Result<OrbitVerdict> {
    let n = entry.metric.dim;
    let radial = entry
        .radial
        .clone()
        .unwrap_or(std::sync::Arc::new(|s: &CGState| s.x[0]));
    let radial_series: Vec<f64> = traj
        .ts
        .iter()
        .zip(&traj.ys)
        .map(|(t, y)| radial(&unpack_cg(*t, y, n)))
        .collect();

    let blowup = matches!(
        traj.termination,
        Termination::Blowup { .. } | Termination::MinStep { .. }
    );
    let turning_points = traj
        .events
        .iter()
        .filter(|e| e.kind == crate::integrator::EventKind::TurningPoint)
        .count();

    if blowup {
        let fit = fit_blowup_time(&traj.ts, &radial_series).or_else(|| {
            // fall back to the fastest-growing velocity component
            let grow: Vec<f64> = traj
                .ys
                .iter()
                .map(|y| (0..n).map(|i| y[n + i].abs()).fold(0.0, f64::max))
                .collect();
            fit_blowup_time(&traj.ts, &grow)
        });
        return Ok(OrbitVerdict {
            kind: VerdictKind::BlowupFiniteTime,
            evidence: OrbitEvidence {
                blowup_t0: fit.as_ref().map(|f| f.t0),
                blowup_residual: fit.as_ref().map(|f| f.residual),
                ..Default::default()
            },
        });
    }

    if let Some(period) = detect_closure(traj) {
        return Ok(OrbitVerdict {
            kind: VerdictKind::Closed,
            evidence: OrbitEvidence {
                period: Some(period),
                ..Default::default()
            },
        });
    }

    let r_min = radial_series.iter().cloned().fold(f64::INFINITY, f64::min);
    let r_max = radial_series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    // |a| at the end, decreasing over the final quarter -> metric-geodesic limit
    let accel_mag = |y: &[f64]| -> f64 {
        let s = unpack_cg(0.0, y, n);
        entry.metric.norm(&s.a[..n]).abs().sqrt()
    };
    let final_a = accel_mag(traj.ys.last().unwrap());
    let quarter = traj.ys.len() * 3 / 4;
    let decreasing = {
        let window = &traj.ys[quarter..];
        let first = accel_mag(&window[0]);
        let mid = accel_mag(&window[window.len() / 2]);
        final_a <= mid && mid <= first * 1.01
    };
    if final_a < ASYMPTOTIC_ACCEL && decreasing {
        return Ok(OrbitVerdict {
            kind: VerdictKind::AsymptoticToGeodesic,
            evidence: OrbitEvidence {
                final_accel: Some(final_a),
                ..Default::default()
            },
        });
    }

    if r_max - r_min < CONSTANT_TOL {
        return Ok(OrbitVerdict {
            kind: VerdictKind::ConstantFamily,
            evidence: OrbitEvidence {
                annulus: Some((r_min, r_max)),
                ..Default::default()
            },
        });
    }

    // the confinement verdicts below need enough radial oscillation to judge
    if turning_points < 3 {
        return Err(Error::InsufficientData(format!(
            "need >= 3 turning points of the confinement variable, a blow-up, closure, \
             a constant confinement variable or acceleration decay; got {turning_points}"
        )));
    }

    // secular velocity growth with a confined radial variable
    let umax = |y: &[f64]| (0..n).map(|i| y[n + i].abs()).fold(0.0, f64::max);
    let head = traj.ys[..traj.ys.len() / 10 + 1]
        .iter()
        .map(|y| umax(y))
        .fold(0.0, f64::max);
    let tail = traj.ys[traj.ys.len() * 9 / 10..]
        .iter()
        .map(|y| umax(y))
        .fold(0.0, f64::max);
    if tail > 5.0 * head.max(1.0) {
        let rate = (tail / head.max(1e-300)).ln() / (0.9 * (traj.end_time() - traj.start_time()));
        return Ok(OrbitVerdict {
            kind: VerdictKind::SecularDivergent,
            evidence: OrbitEvidence {
                secular_rate: Some(rate),
                ..Default::default()
            },
        });
    }

    if r_min.is_finite() && r_max.is_finite() {
        return Ok(OrbitVerdict {
            kind: VerdictKind::RosetteAnnulus,
            evidence: OrbitEvidence {
                annulus: Some((r_min, r_max)),
                ..Default::default()
            },
        });
    }

    Ok(OrbitVerdict {
        kind: VerdictKind::Undetermined,
        evidence: OrbitEvidence::default(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpiralVerdict {
    NoSpiral,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpiralReport {
    pub shrinking_neighbourhood_detected: bool,
    pub acceleration_bounded: bool,
    pub verdict: SpiralVerdict,
    /// Window diameters around the candidate limit point, outermost first.
    pub window_diameters: Vec<f64>,
}

const BOUNDED_LIMIT: f64 = 1e6;

/// Spiral heuristic: a candidate limit point is the mean of the final 10% of
/// samples; the trajectory is flagged as shrinking when the maximal distance
/// to it over dyadic time windows decreases monotonically by a factor below
/// 0.9. Combined with the signature-specific boundedness criterion:
/// spiralling requires a divergent acceleration (Riemannian) or divergent
/// velocity/acceleration (Lorentzian), so bounded data yields NoSpiral.
pub fn spiral_check(traj: &Trajectory, entry: &CatalogEntry, sig: &Signature) -> SpiralReport {
    let n = entry.metric.dim;
    let len = traj.ys.len();
    let tail_start = len * 9 / 10;
    let mut limit = [0.0f64; MAX_DIM];
    let tail = &traj.ys[tail_start..];
    for y in tail {
        for i in 0..n {
            limit[i] += y[i] / tail.len() as f64;
        }
    }
    let t0 = traj.start_time();
    let t1 = traj.end_time();
    let span = t1 - t0;
    let mut diameters = Vec::new();
    for k in 1..=5 {
        let w_lo = t1 - span / (1 << k) as f64;
        let w_hi = t1 - span / (1 << (k + 1)) as f64;
        let mut diam = 0.0f64;
        for (t, y) in traj.ts.iter().zip(&traj.ys) {
            if *t >= w_lo && *t <= w_hi {
                let d: f64 = (0..n)
                    .map(|i| (y[i] - limit[i]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                diam = diam.max(d);
            }
        }
        diameters.push(diam);
    }
    let shrinking = diameters.windows(2).all(|w| w[1] < 0.9 * w[0]) && diameters[0] > 0.0;

    let mut a_max = 0.0f64;
    let mut u_max = 0.0f64;
    for y in &traj.ys {
        for i in 0..n {
            u_max = u_max.max(y[n + i].abs());
            a_max = a_max.max(y[2 * n + i].abs());
        }
    }
    let blew_up = matches!(
        traj.termination,
        Termination::Blowup { .. } | Termination::MinStep { .. }
    );
    let acceleration_bounded = match sig.kind {
        crate::frame::CurveClass::Riemannian => a_max < BOUNDED_LIMIT && !blew_up,
        _ => a_max < BOUNDED_LIMIT && u_max < BOUNDED_LIMIT && !blew_up,
    };
    let verdict = if acceleration_bounded || !shrinking {
        SpiralVerdict::NoSpiral
    } else {
        SpiralVerdict::Inconclusive
    };
    SpiralReport {
        shrinking_neighbourhood_detected: shrinking,
        acceleration_bounded,
        verdict,
        window_diameters: diameters,
    }
}

/// Default residual tolerance for the Killing trajectory test.
pub const KILLING_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KillingTestResult {
    pub pass: bool,
    pub residual: f64,
}

/// Test whether the trajectory of a catalogued Killing field through `x0` is
/// a conformal geodesic: build `u = K/|K|`, `a = nabla_u u` and measure the
/// residual of the third-order equations against the field's flow rates.
pub fn killing_trajectory_test(
    entry: &CatalogEntry,
    field: &KillingField,
    x0: &[f64],
    sig: &Signature,
    tol: f64,
) -> Result<KillingTestResult> {
    let n = entry.metric.dim;
    let sample = (field.eval)(x0);
    let knorm2 = entry.metric.norm(&sample.k[..n]);
    if knorm2.abs() < 1e-300 {
        return Err(Error::DegenerateKilling);
    }
    let km = knorm2.abs().sqrt();
    let mut s = CGState::new([0.0; MAX_DIM], [0.0; MAX_DIM], sample.accel);
    s.x[..n].copy_from_slice(&x0[..n]);
    for i in 0..n {
        s.u[i] = sample.k[i] / km;
    }
    let d = third_order_rhs(&entry.metric, &s, sig)?;
    let mut residual = 0.0f64;
    for i in 0..n {
        residual = residual.max((d.udot[i] - sample.udot[i]).abs());
        residual = residual.max((d.adot[i] - sample.adot[i]).abs());
    }
    Ok(KillingTestResult {
        pass: residual < tol,
        residual,
    })
}

/// A coordinate level set of an entry with a frame vector as unit normal.
#[derive(Debug, Clone)]
pub struct LevelSurface {
    pub name: &'static str,
    /// Index of the level coordinate in the chart.
    pub coord_index: usize,
    pub level: f64,
    /// Frame index of the unit normal.
    pub normal: usize,
}

impl LevelSurface {
    pub fn axisym_plane() -> Self {
        LevelSurface {
            name: "z = 0",
            coord_index: 2,
            level: 0.0,
            normal: 2,
        }
    }

    pub fn schwarzschild_equator() -> Self {
        LevelSurface {
            name: "theta = pi/2",
            coord_index: 2,
            level: std::f64::consts::FRAC_PI_2,
            normal: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TotallyCgReport {
    /// max |K_jk| over tangent directions and sample points.
    pub max_second_fundamental: f64,
    /// max |L_Nj| over tangent directions and sample points.
    pub max_normal_schouten: f64,
    pub algebraic_pass: bool,
    /// max |level-coordinate deviation| along a confined integration, when run.
    pub confinement: Option<f64>,
    pub pass: bool,
}

/// Second-fundamental-form test of a level surface: `K_jk = eta_kk G^k_{jN}`
/// over tangent frame indices, plus the normal Schouten components, sampled
/// at `points`; optionally followed by a dynamic confinement measurement.
pub fn totally_cg_test(
    entry: &CatalogEntry,
    surface: &LevelSurface,
    points: &[Vec<f64>],
    confinement: Option<&Trajectory>,
    tol: f64,
) -> Result<TotallyCgReport> {
    let n = entry.metric.dim;
    if surface.normal >= n || surface.coord_index >= n {
        return Err(Error::Unsupported(
            "level surface indices out of range for this entry".into(),
        ));
    }
    let mut max_k = 0.0f64;
    let mut max_l = 0.0f64;
    for x in points {
        if (x[surface.coord_index] - surface.level).abs() > 1e-12 {
            return Err(Error::Unsupported(format!(
                "sample point not on the level set {}",
                surface.name
            )));
        }
        let gamma = entry.metric.gamma(x);
        let schouten = entry.metric.schouten(x);
        for j in 0..n {
            if j == surface.normal {
                continue;
            }
            for k in 0..n {
                if k == surface.normal {
                    continue;
                }
                // K_jk = eta(nabla_{e_j} N, e_k)
                let kjk = entry.metric.eta[k] * gamma[k][j][surface.normal];
                max_k = max_k.max(kjk.abs());
            }
            max_l = max_l.max(schouten[surface.normal][j].abs());
        }
    }
    let algebraic_pass = max_k < tol && max_l < tol;
    let confinement_dev = confinement.map(|traj| {
        traj.ys
            .iter()
            .map(|y| (y[surface.coord_index] - surface.level).abs())
            .fold(0.0, f64::max)
    });
    let pass = algebraic_pass && confinement_dev.map_or(true, |d| d < 1e-8);
    Ok(TotallyCgReport {
        max_second_fundamental: max_k,
        max_normal_schouten: max_l,
        algebraic_pass,
        confinement: confinement_dev,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityFlag {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RadiusStability {
    pub radius: f64,
    pub q: f64,
    pub c: f64,
    pub f_second: f64,
    pub flag: StabilityFlag,
}

/// Circular-orbit parameters and the stability discriminant `f''(a)` over a
/// list of radii.
pub fn stability_scan(profile: &SurfaceProfile, radii: &[f64]) -> Vec<RadiusStability> {
    radii
        .iter()
        .map(|&a| {
            let (q, c) = circular_params(profile, a, 1.0);
            let f2 = circular_stability(profile, a);
            let flag = if f2 < -1e-12 {
                StabilityFlag::Stable
            } else if f2 > 1e-12 {
                StabilityFlag::Unstable
            } else {
                StabilityFlag::Marginal
            };
            RadiusStability {
                radius: a,
                q,
                c,
                f_second: f2,
                flag,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::axisym::RadialProfile;
    use crate::catalog::flat::e3_entry;
    use crate::catalog::nil::{nil_entry, nil_killing_field};
    use crate::dynamics::{integrate_entry, RhsChoice};
    use crate::integrator::IntegratorConfig;

    fn circle_traj(periods: f64) -> (Trajectory, CatalogEntry) {
        let entry = e3_entry();
        let sig = Signature::riemannian();
        let s0 = CGState::new(
            [0.0; MAX_DIM],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        );
        let cfg = IntegratorConfig::with_t_max(2.0 * std::f64::consts::PI * periods);
        let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
        (traj, entry)
    }

    #[test]
    fn flat_circle_classified_closed() {
        let (traj, entry) = circle_traj(5.0);
        let v = classify_orbit(&traj, &entry, &Signature::riemannian()).unwrap();
        assert_eq!(v.kind, VerdictKind::Closed);
        let period = v.evidence.period.unwrap();
        let rel = (period - 2.0 * std::f64::consts::PI).abs() / (2.0 * std::f64::consts::PI);
        assert!(rel < 1e-6, "period {period}, rel err {rel}");
    }

    #[test]
    fn flat_circle_no_spiral() {
        let (traj, entry) = circle_traj(5.0);
        let rep = spiral_check(&traj, &entry, &Signature::riemannian());
        assert_eq!(rep.verdict, SpiralVerdict::NoSpiral);
        assert!(rep.acceleration_bounded);
    }

    #[test]
    fn short_trajectory_insufficient() {
        let (traj, entry) = circle_traj(0.2);
        assert!(matches!(
            classify_orbit(&traj, &entry, &Signature::riemannian()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn nil_killing_grid_iff_beta_gamma_zero() {
        let lambda = 1.0;
        let entry = nil_entry(1, lambda).unwrap();
        let sig = Signature::riemannian();
        for k in 0..20 {
            let phi = std::f64::consts::PI * 2.0 * k as f64 / 20.0;
            let (beta, gamma) = (phi.cos(), phi.sin());
            let field = nil_killing_field(lambda, beta, gamma);
            let res =
                killing_trajectory_test(&entry, &field, &[0.0, 0.0, 0.0], &sig, KILLING_RESIDUAL_TOL)
                    .unwrap();
            let expect = (beta * gamma).abs() < 1e-12;
            assert_eq!(res.pass, expect, "beta={beta} gamma={gamma} residual={}", res.residual);
        }
    }

    #[test]
    fn axisym_circle_killing_pass() {
        use crate::catalog::axisym::{axisym_entry, AxisymForm};
        let profile = RadialProfile::bump(0.6);
        let entry = axisym_entry(AxisymForm::Met1 { f: profile }).unwrap();
        let sig = Signature::riemannian();
        let field = entry.killing_fields[0].clone();
        for a in [0.5, 1.3, 2.8] {
            let res =
                killing_trajectory_test(&entry, &field, &[a, 0.0, 0.0], &sig, KILLING_RESIDUAL_TOL)
                    .unwrap();
            assert!(res.pass, "r = {a}: residual {}", res.residual);
        }
    }

    #[test]
    fn stability_flat_profile_always_stable() {
        let p = SurfaceProfile::from_radial(&RadialProfile::flat());
        for s in stability_scan(&p, &[0.1, 0.5, 1.0, 3.0, 10.0]) {
            assert_eq!(s.flag, StabilityFlag::Stable);
            assert!((s.f_second + 2.0 / (s.radius * s.radius)).abs() < 1e-12);
        }
    }

    #[test]
    fn stability_sinh_profile() {
        // F = sinh r: F F'' - F'^2 = sinh^2 - cosh^2 = -1 < 0, always stable
        let p = SurfaceProfile::from_radial(&RadialProfile::sinh());
        for s in stability_scan(&p, &[0.5, 2.0, 5.0]) {
            assert_eq!(s.flag, StabilityFlag::Stable);
            let expect = -2.0 / (s.radius.sinh() * s.radius.sinh());
            assert!((s.f_second - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn totally_cg_even_profile_passes_odd_fails() {
        use crate::catalog::axisym::{axisym_entry, AxisymForm};
        let surface = LevelSurface::axisym_plane();
        let points: Vec<Vec<f64>> = (1..6).map(|k| vec![k as f64 * 0.7, 0.3, 0.0]).collect();
        let even = axisym_entry(AxisymForm::Met3 {
            fh: SurfaceProfile::cosh(),
        })
        .unwrap();
        let rep = totally_cg_test(&even, &surface, &points, None, 1e-10).unwrap();
        assert!(rep.pass, "even profile should pass: {:?}", rep);
        let odd = axisym_entry(AxisymForm::Met3 {
            fh: SurfaceProfile::odd_perturbed(),
        })
        .unwrap();
        let rep = totally_cg_test(&odd, &surface, &points, None, 1e-10).unwrap();
        assert!(!rep.pass, "odd profile must fail: {:?}", rep);
        assert!(rep.max_second_fundamental > 1e-3);
    }
}
