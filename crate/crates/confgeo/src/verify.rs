//! Machine-checkable invariant suites per catalog entry, exposed through the
//! CLI `verify` subcommand. Randomized states use a fixed-seed generator so
//! results are reproducible.

use serde::{Deserialize, Serialize};

use crate::catalog::{CatalogEntry, CatalogId};
use crate::dynamics::{integrate_entry, third_order_rhs, unpack_cg, RhsChoice};
use crate::error::Result;
use crate::frame::{CGState, Signature, MAX_DIM};
use crate::integrator::IntegratorConfig;
use crate::numeric::SplitMix64;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub metric: String,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

fn check(name: &str, measured: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        pass: measured <= tolerance,
        measured,
        tolerance,
    }
}

/// Random unit-velocity state with orthogonal acceleration for an entry.
pub fn random_state(entry: &CatalogEntry, sig: &Signature, rng: &mut SplitMix64) -> CGState {
    let n = entry.metric.dim;
    let eta = entry.metric.eta;
    let x = match entry.id {
        CatalogId::SchwarzschildExt => {
            let m = entry.param("m");
            [
                rng.uniform(-1.0, 1.0),
                rng.uniform(3.0 * m, 15.0 * m),
                rng.uniform(0.8, std::f64::consts::PI - 0.8),
                rng.uniform(0.0, 6.0),
            ]
        }
        CatalogId::Berger => [
            rng.uniform(0.7, std::f64::consts::PI - 0.7),
            rng.uniform(0.0, 6.0),
            rng.uniform(0.0, 6.0),
            0.0,
        ],
        CatalogId::AxisymPlane | CatalogId::AxisymGeneral => {
            [rng.uniform(0.5, 2.5), rng.uniform(0.0, 6.0), 0.0, 0.0]
        }
        CatalogId::H3 => [
            rng.uniform(-0.4, 0.4),
            rng.uniform(-0.4, 0.4),
            rng.uniform(-0.4, 0.4),
            0.0,
        ],
        _ => [
            rng.uniform(-2.0, 2.0),
            rng.uniform(-2.0, 2.0),
            rng.uniform(-2.0, 2.0),
            0.0,
        ],
    };
    // draw u on the unit shell of the signature
    let mut u = [0.0; MAX_DIM];
    loop {
        let mut norm = 0.0;
        for i in 0..n {
            u[i] = rng.uniform(-1.0, 1.0);
            norm += eta[i] * u[i] * u[i];
        }
        if sig.epsilon * norm > 0.05 {
            let scale = (sig.epsilon * norm).sqrt();
            for ui in u.iter_mut().take(n) {
                *ui /= scale;
            }
            break;
        }
    }
    // orthogonal a via projection
    let mut a = [0.0; MAX_DIM];
    for ai in a.iter_mut().take(n) {
        *ai = rng.uniform(-1.0, 1.0);
    }
    let ua: f64 = (0..n).map(|i| eta[i] * u[i] * a[i]).sum();
    for i in 0..n {
        a[i] -= sig.epsilon * ua * u[i];
    }
    CGState::new(x, u, a)
}

/// Maximum componentwise disagreement between the specialized and generic
/// right-hand sides over randomized valid states.
pub fn rhs_agreement(entry: &CatalogEntry, sig: &Signature, samples: usize, seed: u64) -> f64 {
    let spec = match &entry.specialized {
        Some(s) => s,
        None => return 0.0,
    };
    let n = entry.metric.dim;
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    let mut tested = 0;
    while tested < samples {
        let s = random_state(entry, sig, &mut rng);
        if !(spec.applies)(&s) || !entry.metric.chart.contains(&s.x[..n]) {
            continue;
        }
        tested += 1;
        let d_spec = (spec.rhs)(&s, sig);
        let d_gen = match third_order_rhs(&entry.metric, &s, sig) {
            Ok(d) => d,
            Err(_) => continue,
        };
        for i in 0..n {
            worst = worst.max((d_spec.xdot[i] - d_gen.xdot[i]).abs());
            worst = worst.max((d_spec.udot[i] - d_gen.udot[i]).abs());
            worst = worst.max((d_spec.adot[i] - d_gen.adot[i]).abs());
        }
    }
    worst
}

/// Schouten consistency: the stored Ricci must reproduce the Schouten
/// combination with the frame trace, and Ricci must be symmetric.
fn schouten_checks(entry: &CatalogEntry, rng: &mut SplitMix64, sig: &Signature) -> Vec<CheckResult> {
    let n = entry.metric.dim;
    let mut asym = 0.0f64;
    let mut schouten_dev = 0.0f64;
    for _ in 0..20 {
        let s = random_state(entry, sig, rng);
        if !entry.metric.chart.contains(&s.x[..n]) {
            continue;
        }
        let ric = entry.metric.ricci(&s.x[..n]);
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((ric[i][j] - ric[j][i]).abs());
            }
        }
        let l = entry.metric.schouten(&s.x[..n]);
        let rs = entry.metric.scalar_curvature(&s.x[..n]);
        let nn = n as f64;
        for i in 0..n {
            for j in 0..n {
                let eta_ij = if i == j { entry.metric.eta[i] } else { 0.0 };
                let expect = (ric[i][j] - rs * eta_ij / (2.0 * (nn - 1.0))) / (nn - 2.0);
                schouten_dev = schouten_dev.max((l[i][j] - expect).abs());
            }
        }
    }
    vec![
        check("ricci_symmetric", asym, 1e-12),
        check("schouten_from_ricci", schouten_dev, 1e-12),
    ]
}

/// Conserved-quantity drift along a default integration from a random state.
fn drift_checks(entry: &CatalogEntry, sig: &Signature, rng: &mut SplitMix64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let t_max = match entry.id {
        CatalogId::NilLor | CatalogId::M3 => 1.0,
        CatalogId::SchwarzschildExt => 5.0,
        _ => 20.0,
    };
    let cfg = IntegratorConfig::with_t_max(t_max);
    for attempt in 0..10 {
        let _ = attempt;
        let s0 = random_state(entry, sig, rng);
        let traj = match integrate_entry(entry, sig, &s0, &cfg, RhsChoice::Auto) {
            Ok(t) => t,
            Err(_) => continue,
        };
        for (name, rec) in &traj.drift {
            out.push(check(&format!("drift_{name}"), rec.max_drift, 1e-7));
        }
        break;
    }
    out
}

/// Norm conservation of parallel transport along geodesics (metric
/// compatibility of the hard-coded connection).
fn geodesic_norm_check(entry: &CatalogEntry, sig: &Signature, rng: &mut SplitMix64) -> CheckResult {
    let n = entry.metric.dim;
    let cfg = IntegratorConfig::with_t_max(2.0);
    for _ in 0..10 {
        let mut s0 = random_state(entry, sig, rng);
        s0.a = [0.0; MAX_DIM];
        let traj = match integrate_entry(entry, sig, &s0, &cfg, RhsChoice::Generic) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let mut worst = 0.0f64;
        for (t, y) in traj.ts.iter().zip(&traj.ys) {
            let s = unpack_cg(*t, y, n);
            worst = worst.max((entry.metric.norm(&s.u[..n]) - sig.epsilon).abs());
        }
        return check("geodesic_norm_conservation", worst, 1e-8);
    }
    check("geodesic_norm_conservation", f64::INFINITY, 1e-8)
}

/// Run the invariant suite of one entry.
pub fn verify_entry(entry: &CatalogEntry, sig: &Signature, seed: u64) -> Result<VerifyReport> {
    let mut rng = SplitMix64::new(seed);
    let mut checks = Vec::new();
    checks.push(check(
        "specialized_vs_generic_rhs",
        rhs_agreement(entry, sig, 100, seed ^ 0xabcdef),
        1e-10,
    ));
    checks.extend(schouten_checks(entry, &mut rng, sig));
    checks.push(geodesic_norm_check(entry, sig, &mut rng));
    checks.extend(drift_checks(entry, sig, &mut rng));
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        metric: entry.id.as_str().to_string(),
        checks,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::berger::berger_entry;
    use crate::catalog::nil::nil_entry;
    use crate::catalog::schwarzschild::schwarzschild_entry;

    #[test]
    fn nil_suite_passes() {
        let entry = nil_entry(1, 1.0).unwrap();
        let rep = verify_entry(&entry, &Signature::riemannian(), 7).unwrap();
        assert!(rep.all_pass, "failures: {:?}", rep.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }

    #[test]
    fn berger_specialized_agrees_with_generic() {
        let entry = berger_entry(2.0).unwrap();
        let worst = rhs_agreement(&entry, &Signature::riemannian(), 100, 3);
        assert!(worst < 1e-10, "worst disagreement {worst}");
    }

    #[test]
    fn schwarzschild_specialized_agrees_with_generic() {
        let entry = schwarzschild_entry(1.0).unwrap();
        for sig in [Signature::timelike(), Signature::spacelike()] {
            let worst = rhs_agreement(&entry, &sig, 100, 5);
            assert!(worst < 1e-10, "worst disagreement {worst} ({:?})", sig.kind);
        }
    }

    #[test]
    fn corrupted_rhs_detected() {
        // negative control: corrupt the specialized system and expect the
        // oracle-equivalence check to fail
        let mut entry = nil_entry(1, 1.0).unwrap();
        let original = entry.specialized.take().unwrap();
        let rhs = original.rhs.clone();
        entry.specialized = Some(crate::catalog::SpecializedRhs {
            rhs: std::sync::Arc::new(move |s, sig| {
                let mut d = rhs(s, sig);
                d.adot[0] += 1e-3;
                d
            }),
            applies: original.applies.clone(),
        });
        let worst = rhs_agreement(&entry, &Signature::riemannian(), 50, 11);
        assert!(worst > 1e-4, "corruption must be visible, got {worst}");
    }
}
