//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use confgeo::analysis::{
    classify_orbit, killing_trajectory_test, spiral_check, totally_cg_test, LevelSurface,
    SpiralVerdict, VerdictKind, KILLING_RESIDUAL_TOL,
};
use confgeo::catalog::axisym::{axisym_entry, AxisymForm, RadialProfile, SurfaceProfile};
use confgeo::catalog::berger::berger_entry;
use confgeo::catalog::conformal::{s3_entry, s3_factor};
use confgeo::catalog::flat::{e3_entry, flat_explicit, FlatKind};
use confgeo::catalog::nil::{nil_entry, nil_killing_field};
use confgeo::catalog::schwarzschild::{schwarzschild_entry, static_killing};
use confgeo::catalog::CatalogEntry;
use confgeo::dynamics::{
    b_from_state, chi_evolve, conformal_transform, integrate_entry, unpack_cg, RhsChoice,
    VbSystem,
};
use confgeo::frame::MAX_DIM;
use confgeo::integrator::integrate;
use confgeo::numeric::SplitMix64;
use confgeo::quadratures::{
    berger_sech_params, gamma_evolve, nil_constants, nil_quartic, schwarzschild_tangency,
    RadialRegime, RadialReduction, SchwRadial,
};
use confgeo::verify::random_state;
use confgeo::{CGState, IntegratorConfig, Signature, Termination, Trajectory, VBState};

const SQ3: f64 = 1.7320508075688772;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn circle_state() -> CGState {
    CGState::new(
        [0.0; MAX_DIM],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    )
}

/// Riemannian Nil E = J = 0 data at the sech maximum.
fn nil_sech_state(lambda: f64) -> CGState {
    CGState::new(
        [0.0; MAX_DIM],
        [0.5, 0.0, SQ3 / 2.0, 0.0],
        [0.0, lambda * SQ3 / 2.0, 0.0, 0.0],
    )
}

/// Lorentzian Nil E = J = 0 data at the sec minimum (C1 = C2 = 1).
fn nil_sec_state(lambda: f64) -> CGState {
    CGState::new(
        [0.0; MAX_DIM],
        [0.5, 0.0, SQ3 / 2.0, 0.0],
        [0.0, -lambda * SQ3 / 2.0, 0.0, 0.0],
    )
}

/// Berger lambda = 2, E = J = 0 data at the sech maximum.
fn berger_sech_state() -> CGState {
    let k = (2.0f64 / 3.0).sqrt();
    CGState::new(
        [std::f64::consts::FRAC_PI_2, 0.0, 0.0, 0.0],
        [(1.0f64 / 3.0).sqrt(), 0.0, k, 0.0],
        [0.0, -2.0f64.sqrt(), 0.0, 0.0],
    )
}

#[test]
fn criterion_01_flat_space_closure() {
    let start = Instant::now();
    let entry = e3_entry();
    let sig = Signature::riemannian();
    let s0 = circle_state();
    let t_max = 20.0 * 2.0 * std::f64::consts::PI;
    let cfg = IntegratorConfig::with_t_max(t_max);
    let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
    assert_eq!(traj.termination, Termination::TMaxReached);
    let mut max_err = 0.0f64;
    for k in 0..=4000 {
        let t = t_max * k as f64 / 4000.0;
        let y = traj.eval(t);
        let exact = flat_explicit(
            FlatKind::Circle,
            &[1.0, 1.0, 1.0],
            &s0.x,
            &s0.u,
            &s0.a,
            t,
        )
        .unwrap();
        for i in 0..3 {
            max_err = max_err.max((y[i] - exact[i]).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "1 (flat-space closure)",
        max_err < 1e-7 && elapsed < 1.0,
        &format!("max position error {max_err:.3e} over 20 periods, {elapsed:.2} s"),
    );
}

#[test]
fn criterion_02_nil_conservation() {
    let start = Instant::now();
    let lambda = 1.0;
    let entry = nil_entry(1, lambda).unwrap();
    let sig = Signature::riemannian();
    let cfg = IntegratorConfig::with_t_max(100.0);
    let mut rng = SplitMix64::new(2024);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let s0 = random_state(&entry, &sig, &mut rng);
        let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
        assert_eq!(traj.termination, Termination::TMaxReached);
        worst = worst.max(traj.drift["E"].max_drift);
        worst = worst.max(traj.drift["J"].max_drift);
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "2 (Riemannian Nil conservation)",
        worst < 1e-8 && elapsed < 30.0,
        &format!("max (E, J) drift {worst:.3e} over 50 states, {elapsed:.1} s"),
    );
}

#[test]
fn criterion_03_nil_quadrature_oracle() {
    let lambda = 1.0;
    let entry = nil_entry(1, lambda).unwrap();
    let sig = Signature::riemannian();
    let mut rng = SplitMix64::new(333);
    let mut tested = 0;
    let mut worst = 0.0f64;
    while tested < 20 {
        let s0 = random_state(&entry, &sig, &mut rng);
        let (e, j) = nil_constants(&s0, lambda, 1);
        let q = nil_quartic(e, j, lambda, 1).unwrap();
        let gamma0 = s0.u[2];
        let sign = if s0.a[2] >= 0.0 { 1.0 } else { -1.0 };
        if s0.a[2].abs() < 1e-3 {
            continue; // start too close to a turning point
        }
        // 1-D oracle first: find two full cycles
        let ev = gamma_evolve(&q, gamma0, sign, 200.0).unwrap();
        if ev.constant || ev.turning_points.len() < 5 {
            continue;
        }
        let t_end = ev.turning_points[4];
        let cfg = IntegratorConfig::with_t_max(t_end);
        let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
        for k in 0..=1000 {
            let t = t_end * k as f64 / 1000.0;
            let g_full = traj.eval(t)[5]; // u3 component
            let g_oracle = ev.trajectory.eval(t)[0];
            worst = worst.max((g_full - g_oracle).abs());
        }
        tested += 1;
    }
    report(
        "3 (Nil quadrature oracle)",
        worst < 1e-6,
        &format!("max |gamma_full - gamma_oracle| = {worst:.3e} over 20 (E, J) draws"),
    );
}

#[test]
fn criterion_04_sech_solution() {
    let lambda = 1.0;
    let entry = nil_entry(1, lambda).unwrap();
    let sig = Signature::riemannian();
    let s0 = nil_sech_state(lambda);
    let cfg = IntegratorConfig::with_t_max(30.0);
    let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
    let mut max_err = 0.0f64;
    for k in 0..=3000 {
        let t = 30.0 * k as f64 / 3000.0;
        let gamma = traj.eval(t)[5];
        let exact = SQ3 / 2.0 / (lambda * SQ3 / 2.0 * t).cosh();
        max_err = max_err.max((gamma - exact).abs());
    }
    let s_end = unpack_cg(0.0, traj.ys.last().unwrap(), 3);
    let a_end = entry.metric.norm(&s_end.a[..3]).sqrt();
    let verdict = classify_orbit(&traj, &entry, &sig).unwrap();
    report(
        "4 (explicit sech solution)",
        max_err < 1e-6 && a_end < 1e-4 && verdict.kind == VerdictKind::AsymptoticToGeodesic,
        &format!(
            "max gamma error {max_err:.3e}, |a|(30) = {a_end:.3e}, verdict {:?}",
            verdict.kind
        ),
    );
}

#[test]
fn criterion_05_lorentzian_blowup() {
    let lambda = 1.0;
    let entry = nil_entry(-1, lambda).unwrap();
    let sig = Signature::spacelike();
    let s0 = nil_sec_state(lambda);
    let cfg = IntegratorConfig::with_t_max(3.0);
    let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
    let blew = matches!(
        traj.termination,
        Termination::Blowup { .. } | Termination::MinStep { .. }
    );
    let verdict = classify_orbit(&traj, &entry, &sig).unwrap();
    let t0_exact = std::f64::consts::PI / (lambda * SQ3);
    let t0 = verdict.evidence.blowup_t0.unwrap_or(f64::NAN);
    report(
        "5 (Lorentzian Nil blow-up)",
        blew && verdict.kind == VerdictKind::BlowupFiniteTime && (t0 - t0_exact).abs() < 1e-3,
        &format!(
            "termination {:?}, fitted t0 = {t0:.6} vs pi/(lambda sqrt3) = {t0_exact:.6}",
            traj.termination
        ),
    );
}

#[test]
fn criterion_06_endpoint_identities() {
    let mut rng = SplitMix64::new(4096);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let e = rng.uniform(-3.0, 3.0);
        let j = rng.uniform(-3.0, 3.0);
        let l = rng.uniform(0.1, 3.0);
        let a = l / 2.0;
        let qr = nil_quartic(e, j, l, 1).unwrap();
        worst = worst.max((qr.f(1.0) + (j - a) * (j - a)).abs());
        worst = worst.max((qr.f(-1.0) + (j + a) * (j + a)).abs());
        let ql = nil_quartic(e, j, l, -1).unwrap();
        worst = worst.max((ql.f(1.0) - (j + a) * (j + a)).abs());
        worst = worst.max((ql.f(-1.0) - (j - a) * (j - a)).abs());
        let qb = confgeo::quadratures::berger_quartic(e, j, l).unwrap();
        worst = worst.max((qb.f(1.0) + (j + a) * (j + a)).abs());
        worst = worst.max((qb.f(-1.0) + (j - a) * (j - a)).abs());
    }
    report(
        "6 (endpoint identities)",
        worst < 1e-12,
        &format!("max |F(+-1) - identity| = {worst:.3e} over 1000 draws"),
    );
}

#[test]
fn criterion_07_berger_special_solution() {
    let entry = berger_entry(2.0).unwrap();
    let sig = Signature::riemannian();
    let (k, mu) = berger_sech_params(2.0).unwrap();
    assert!((k * k - 2.0 / 3.0).abs() < 1e-14 && (mu - 2.0f64.sqrt()).abs() < 1e-14);
    let s0 = berger_sech_state();
    let cfg = IntegratorConfig::with_t_max(8.0);
    let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
    assert_eq!(traj.termination, Termination::TMaxReached);
    let mut max_err = 0.0f64;
    for kk in 0..=2000 {
        let t = 8.0 * kk as f64 / 2000.0;
        let gamma = traj.eval(t)[5];
        let exact = k / (mu * t).cosh();
        max_err = max_err.max((gamma - exact).abs());
    }
    let nonexist = berger_sech_params(1.1).is_err();
    report(
        "7 (Berger special solution)",
        max_err < 1e-6 && nonexist,
        &format!("max gamma error {max_err:.3e}; lambda = 1.1 correctly nonexistent: {nonexist}"),
    );
}

#[test]
fn criterion_08_axisym_confinement_and_stability() {
    let profile = RadialProfile::bump(1.0);
    let entry = axisym_entry(AxisymForm::Met1 {
        f: profile.clone(),
    })
    .unwrap();
    let sig = Signature::riemannian();
    // planar state with q, C both nonzero
    let r0 = 1.2;
    let chi0 = 1.0f64;
    let q_mag = 0.4;
    let s0 = CGState::new(
        [r0, 0.0, 0.0, 0.0],
        [chi0.cos(), chi0.sin(), 0.0, 0.0],
        [-q_mag * chi0.sin(), q_mag * chi0.cos(), 0.0, 0.0],
    );
    // conserved q and C from the initial data
    let q_inv = s0.a[1] * s0.u[0] - s0.a[0] * s0.u[1];
    let g0 = profile.antiderivative(r0);
    let c_inv = (profile.f)(r0) * s0.u[1] - q_inv * g0;
    assert!(q_inv.abs() > 1e-6 && c_inv.abs() > 1e-6);
    let red = RadialReduction::new(SurfaceProfile::from_radial(&profile), q_inv, c_inv);
    let (root_lo, root_hi) = red.radial_band(r0, 100.0).unwrap();
    let cfg = IntegratorConfig::with_t_max(200.0);
    let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
    let mut r_min = f64::INFINITY;
    let mut r_max = f64::NEG_INFINITY;
    for y in &traj.ys {
        r_min = r_min.min(y[0]);
        r_max = r_max.max(y[0]);
    }
    let inside = r_min >= root_lo - 1e-6 && r_max <= root_hi + 1e-6;
    let attained = (r_min - root_lo).abs() < 1e-6 && (r_max - root_hi).abs() < 1e-6;

    // stability scan: all circular orbits below a threshold radius are stable
    let radii: Vec<f64> = (1..200).map(|k| k as f64 * 0.025).collect();
    let scan = confgeo::analysis::stability_scan(&SurfaceProfile::from_radial(&profile), &radii);
    let threshold = scan
        .iter()
        .take_while(|s| s.flag == confgeo::analysis::StabilityFlag::Stable)
        .last()
        .map(|s| s.radius)
        .unwrap_or(0.0);
    let all_stable_below = scan
        .iter()
        .filter(|s| s.radius < threshold)
        .all(|s| s.f_second < 0.0);
    report(
        "8 (axisymmetric confinement and stability)",
        inside && attained && threshold > 0.0 && all_stable_below,
        &format!(
            "trajectory r in [{r_min:.8}, {r_max:.8}] vs roots [{root_lo:.8}, {root_hi:.8}]; \
             stable below r = {threshold}"
        ),
    );
}

fn schwarzschild_bound_state() -> CGState {
    let r0 = 10.0;
    let (beta, gamma, delta) = (0.05, 0.02, 0.45);
    let alpha = (1.0f64 + beta * beta + gamma * gamma + delta * delta).sqrt();
    let (a1, a2, a3) = (0.01, 0.005, 0.02);
    let a0 = (beta * a1 + gamma * a2 + delta * a3) / alpha;
    CGState::new(
        [0.0, r0, std::f64::consts::FRAC_PI_2, 0.0],
        [alpha, beta, gamma, delta],
        [a0, a1, a2, a3],
    )
}

#[test]
fn criterion_09_schwarzschild_constants() {
    let m = 1.0;
    let entry = schwarzschild_entry(m).unwrap();
    let sig = Signature::timelike();
    let s0 = schwarzschild_bound_state();
    let cfg = IntegratorConfig::with_t_max(50.0 * m);
    let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
    assert_eq!(traj.termination, Termination::TMaxReached);
    let qre = traj.drift["Q_re_timelike"].max_drift;
    let qim = traj.drift["Q_im"].max_drift;
    report(
        "9 (Schwarzschild Killing-spinor constants)",
        qre < 1e-7 && qim < 1e-7,
        &format!("drift Re Q = {qre:.3e}, Im Q = {qim:.3e} over t in [0, 50m]"),
    );
}

#[test]
fn criterion_10_schwarzschild_radial_regimes() {
    let m = 1.0;
    let a = 0.5;
    let (rc, r0c) = schwarzschild_tangency(m, a).unwrap();
    let two = SchwRadial { m, a, r0: r0c + 1.0 }.classify(1e-9);
    let tan = SchwRadial { m, a, r0: r0c }.classify(1e-8);
    let none = SchwRadial { m, a, r0: r0c - 1.0 }.classify(1e-9);
    let progression = matches!(two, RadialRegime::TwoRoots { .. })
        && matches!(tan, RadialRegime::Tangency { .. })
        && matches!(none, RadialRegime::NoRoot);
    // the static trajectory at the tangency radius is a conformal geodesic
    // with acceleration magnitude V'(rc) = a
    let entry = schwarzschild_entry(m).unwrap();
    let sig = Signature::timelike();
    let field = static_killing(m);
    let res = killing_trajectory_test(
        &entry,
        &field,
        &[0.0, rc, std::f64::consts::FRAC_PI_2, 0.0],
        &sig,
        1e-8,
    )
    .unwrap();
    let vprime = m / (rc * rc * (1.0 - 2.0 * m / rc).sqrt());
    let accel_matches = (vprime - a).abs() < 1e-9;
    report(
        "10 (Schwarzschild radial regimes)",
        progression && res.pass && accel_matches,
        &format!(
            "two/tangency/none at r0 = {:.4}/{:.4}/{:.4}; static residual {:.3e}; V'(rc) - a = {:.3e}",
            r0c + 1.0,
            r0c,
            r0c - 1.0,
            res.residual,
            vprime - a
        ),
    );
}

#[test]
fn criterion_11_theorem_tests() {
    // Killing trajectories on Nil: conformal geodesic iff beta*gamma = 0
    let lambda = 1.0;
    let entry = nil_entry(1, lambda).unwrap();
    let sig = Signature::riemannian();
    let mut boolean_agreement = true;
    for k in 0..20 {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / 20.0;
        let (beta, gamma) = (phi.cos(), phi.sin());
        let field = nil_killing_field(lambda, beta, gamma);
        let res = killing_trajectory_test(
            &entry,
            &field,
            &[0.0, 0.0, 0.0],
            &sig,
            KILLING_RESIDUAL_TOL,
        )
        .unwrap();
        let expect = (beta * gamma).abs() < 1e-12;
        if res.pass != expect {
            boolean_agreement = false;
        }
    }
    // z-confinement on the even met3 profile, generic right-hand side
    let met3 = axisym_entry(AxisymForm::Met3 {
        fh: SurfaceProfile::cosh(),
    })
    .unwrap();
    let chi0 = 0.6f64;
    let s0 = CGState::new(
        [1.5, 0.0, 0.0, 0.0],
        [chi0.cos(), chi0.sin(), 0.0, 0.0],
        [-0.3 * chi0.sin(), 0.3 * chi0.cos(), 0.0, 0.0],
    );
    let cfg = IntegratorConfig::with_t_max(50.0);
    let traj = integrate_entry(&met3, &sig, &s0, &cfg, RhsChoice::Generic).unwrap();
    let points: Vec<Vec<f64>> = (1..8).map(|k| vec![0.4 * k as f64, 0.1, 0.0]).collect();
    let rep = totally_cg_test(
        &met3,
        &LevelSurface::axisym_plane(),
        &points,
        Some(&traj),
        1e-10,
    )
    .unwrap();
    report(
        "11 (theorem tests)",
        boolean_agreement && rep.pass,
        &format!(
            "Killing grid agreement {boolean_agreement}; |z| confinement {:?}",
            rep.confinement
        ),
    );
}

/// Representative trajectories from criteria 1-10 for the no-spiral sweep.
fn suite_trajectories() -> Vec<(String, CatalogEntry, Signature, Trajectory)> {
    let mut out = Vec::new();
    {
        let entry = e3_entry();
        let sig = Signature::riemannian();
        let cfg = IntegratorConfig::with_t_max(20.0 * 2.0 * std::f64::consts::PI);
        let traj = integrate_entry(&entry, &sig, &circle_state(), &cfg, RhsChoice::Auto).unwrap();
        out.push(("flat-circle".to_string(), entry, sig, traj));
    }
    {
        let entry = nil_entry(1, 1.0).unwrap();
        let sig = Signature::riemannian();
        let mut rng = SplitMix64::new(2024);
        let cfg = IntegratorConfig::with_t_max(100.0);
        for k in 0..5 {
            let s0 = random_state(&entry, &sig, &mut rng);
            let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
            out.push((format!("nil-r random {k}"), entry.clone(), sig, traj));
        }
        let cfg = IntegratorConfig::with_t_max(30.0);
        let traj = integrate_entry(&entry, &sig, &nil_sech_state(1.0), &cfg, RhsChoice::Auto)
            .unwrap();
        out.push(("nil-r sech".to_string(), entry, sig, traj));
    }
    {
        let entry = nil_entry(-1, 1.0).unwrap();
        let sig = Signature::spacelike();
        let cfg = IntegratorConfig::with_t_max(3.0);
        let traj =
            integrate_entry(&entry, &sig, &nil_sec_state(1.0), &cfg, RhsChoice::Auto).unwrap();
        out.push(("nil-l blow-up".to_string(), entry, sig, traj));
    }
    {
        let entry = berger_entry(2.0).unwrap();
        let sig = Signature::riemannian();
        let cfg = IntegratorConfig::with_t_max(8.0);
        let traj =
            integrate_entry(&entry, &sig, &berger_sech_state(), &cfg, RhsChoice::Auto).unwrap();
        out.push(("berger sech".to_string(), entry, sig, traj));
    }
    {
        let profile = RadialProfile::bump(1.0);
        let entry = axisym_entry(AxisymForm::Met1 { f: profile }).unwrap();
        let sig = Signature::riemannian();
        let chi0 = 1.0f64;
        let s0 = CGState::new(
            [1.2, 0.0, 0.0, 0.0],
            [chi0.cos(), chi0.sin(), 0.0, 0.0],
            [-0.4 * chi0.sin(), 0.4 * chi0.cos(), 0.0, 0.0],
        );
        let cfg = IntegratorConfig::with_t_max(200.0);
        let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
        out.push(("axisym rosette".to_string(), entry, sig, traj));
    }
    {
        let entry = schwarzschild_entry(1.0).unwrap();
        let sig = Signature::timelike();
        let cfg = IntegratorConfig::with_t_max(50.0);
        let traj = integrate_entry(&entry, &sig, &schwarzschild_bound_state(), &cfg, RhsChoice::Auto)
            .unwrap();
        out.push(("schwarzschild bound".to_string(), entry, sig, traj));
    }
    out
}

#[test]
fn criterion_12_no_spiral_suite() {
    let mut all_no_spiral = true;
    let mut lines = Vec::new();
    for (name, entry, sig, traj) in suite_trajectories() {
        let rep = spiral_check(&traj, &entry, &sig);
        if rep.verdict != SpiralVerdict::NoSpiral {
            all_no_spiral = false;
        }
        lines.push(format!("{name}: {:?}", rep.verdict));
    }
    report(
        "12 (no-spiral suite)",
        all_no_spiral,
        &lines.join("; "),
    );
}

/// One-directional distance from each sample of `from` to the polyline `to`.
fn directed_max_distance(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    confgeo::numeric::hausdorff_distance_directed(from, to)
}

#[test]
fn criterion_13_form_equivalence() {
    // (a) flat circle: third-order vs (v, b) with b built at chi == 1
    let entry = e3_entry();
    let sig = Signature::riemannian();
    let s0 = circle_state();
    let t_star = 2.5f64; // stay below the tau pole at t = pi
    let cfg = IntegratorConfig::with_t_max(2.6);
    let third = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
    let (b0, _) = b_from_state(&entry.metric, &s0, &sig, 1.0, 0.0).unwrap();
    let vb0 = VBState {
        x: s0.x,
        v: s0.u,
        b: b0,
        tau: 0.0,
    };
    let tau_star = 2.0 * (t_star / 2.0).tan();
    let sys = VbSystem {
        entry: e3_entry(),
    };
    let vb_cfg = IntegratorConfig::with_t_max(tau_star);
    let vb_traj = integrate(&sys, &VbSystem::pack(&vb0, 3), &vb_cfg, &[]);
    assert_eq!(vb_traj.termination, Termination::TMaxReached);
    let third_pts: Vec<Vec<f64>> = (0..=12000)
        .map(|k| third.eval(2.6 * k as f64 / 12000.0)[..3].to_vec())
        .collect();
    let vb_pts: Vec<Vec<f64>> = (0..=12000)
        .map(|k| vb_traj.eval(tau_star * k as f64 / 12000.0)[..3].to_vec())
        .collect();
    let vb_probe: Vec<Vec<f64>> = vb_pts.iter().step_by(10).cloned().collect();
    let third_pts_common: Vec<Vec<f64>> = (0..=1200)
        .map(|k| third.eval(t_star * 0.98 * k as f64 / 1200.0)[..3].to_vec())
        .collect();
    let d_flat = directed_max_distance(&vb_probe, &third_pts)
        .max(directed_max_distance(&third_pts_common, &vb_pts));

    // (b) Nil: same comparison, window chosen before the first tau pole
    let nil = nil_entry(1, 1.0).unwrap();
    let s0n = {
        let mut rng = SplitMix64::new(77);
        random_state(&nil, &sig, &mut rng)
    };
    let cfg_n = IntegratorConfig::with_t_max(6.0);
    let third_n = integrate_entry(&nil, &sig, &s0n, &cfg_n, RhsChoice::Auto).unwrap();
    let chi = chi_evolve(&third_n, &nil, &sig);
    let t_lim = chi
        .tau_poles
        .first()
        .map(|p| 0.7 * p)
        .unwrap_or(6.0)
        .min(6.0);
    // tau at t_lim from the chi samples
    let idx = chi
        .ts
        .iter()
        .position(|t| *t >= t_lim)
        .unwrap_or(chi.ts.len() - 1);
    let tau_lim = chi.tau(idx);
    let t_common = chi.ts[idx];
    let (b0n, _) = b_from_state(&nil.metric, &s0n, &sig, 1.0, 0.0).unwrap();
    let vb0n = VBState {
        x: s0n.x,
        v: s0n.u,
        b: b0n,
        tau: 0.0,
    };
    let sys_n = VbSystem {
        entry: nil_entry(1, 1.0).unwrap(),
    };
    let vb_cfg_n = IntegratorConfig::with_t_max(tau_lim);
    let vb_n = integrate(&sys_n, &VbSystem::pack(&vb0n, 3), &vb_cfg_n, &[]);
    let third_pts_n: Vec<Vec<f64>> = (0..=12000)
        .map(|k| third_n.eval(t_common * k as f64 / 12000.0)[..3].to_vec())
        .collect();
    let vb_pts_n: Vec<Vec<f64>> = (0..=12000)
        .map(|k| vb_n.eval(tau_lim * k as f64 / 12000.0)[..3].to_vec())
        .collect();
    let vb_probe_n: Vec<Vec<f64>> = vb_pts_n.iter().step_by(10).cloned().collect();
    let third_trim: Vec<Vec<f64>> = third_pts_n[..11600].iter().step_by(10).cloned().collect();
    let d_nil = directed_max_distance(&vb_probe_n, &third_pts_n)
        .max(directed_max_distance(&third_trim, &vb_pts_n));

    // (c) conformal transport E3 -> S3 reproduces the circle point set
    let s3 = s3_entry();
    let pair = s3_factor();
    let om0 = (pair.omega)(&s0.x[..3]);
    let ups0 = (pair.upsilon)(&s0.x[..3]);
    let vb_s3_0 = conformal_transform(&vb0, om0, &ups0, 3).unwrap();
    let sys_s3 = VbSystem { entry: s3 };
    let vb_s3 = integrate(&sys_s3, &VbSystem::pack(&vb_s3_0, 3), &vb_cfg, &[]);
    assert_eq!(vb_s3.termination, Termination::TMaxReached);
    let s3_pts: Vec<Vec<f64>> = (0..=2000)
        .map(|k| vb_s3.eval(tau_star * k as f64 / 2000.0)[..3].to_vec())
        .collect();
    let d_conf = directed_max_distance(&s3_pts, &third_pts)
        .max(directed_max_distance(&third_pts_common, &s3_pts));

    report(
        "13 (form equivalence)",
        d_flat < 1e-6 && d_nil < 1e-6 && d_conf < 1e-6,
        &format!("Hausdorff flat {d_flat:.3e}, nil {d_nil:.3e}, conformal {d_conf:.3e}"),
    );
}
