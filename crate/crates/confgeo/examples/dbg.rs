use confgeo::catalog::nil::nil_entry;
use confgeo::dynamics::{integrate_entry, RhsChoice};
use confgeo::numeric::SplitMix64;
use confgeo::verify::random_state;
use confgeo::{IntegratorConfig, Signature};

fn main() {
    let entry = nil_entry(1, 1.0).unwrap();
    let sig = Signature::riemannian();
    let cfg = IntegratorConfig::with_t_max(100.0);
    let mut rng = SplitMix64::new(2024);
    for k in 0..50 {
        let s0 = random_state(&entry, &sig, &mut rng);
        let traj = integrate_entry(&entry, &sig, &s0, &cfg, RhsChoice::Auto).unwrap();
        let de = traj.drift["E"].max_drift;
        let dj = traj.drift["J"].max_drift;
        if de > 1e-8 || dj > 1e-8 {
            println!("state {k}: dE={de:.3e} dJ={dj:.3e} at tE={} steps={} rej={} term={:?}",
                traj.drift["E"].t_at_max, traj.n_steps, traj.n_rejected, traj.termination);
            println!("  u0={:?} a0={:?} x0={:?}", &s0.u[..3], &s0.a[..3], &s0.x[..3]);
            println!("  unorm drift={:.3e} ua drift={:.3e}", traj.drift["u_norm"].max_drift, traj.drift["u_dot_a"].max_drift);
        }
    }
    println!("done");
}
