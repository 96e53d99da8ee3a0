//! Adaptive explicit ODE integration with dense output, event detection,
//! invariant monitoring and blow-up handling.
//!
//! The integrator is the Dormand-Prince 5(4) embedded pair with the standard
//! fourth-order dense-output interpolant and a PI step-size controller. It is
//! deterministic: identical inputs and configuration produce bitwise-identical
//! trajectories on one platform.

use std::sync::Arc;

use crate::frame::{DriftLedger, DriftRecord};

/// Right-hand side of an ODE system on a flat state vector.
pub trait OdeSystem: Send + Sync {
    fn dim(&self) -> usize;
    /// Fill `dydt`; return `Err` if the state left the chart domain.
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<(), RhsFailure>;
}

/// RHS evaluation failure (chart exit). Carried on the trajectory as a
/// domain-exit event rather than an error.
#[derive(Debug, Clone)]
pub struct RhsFailure {
    pub reason: String,
}

impl RhsFailure {
    pub fn new(reason: impl Into<String>) -> Self {
        RhsFailure {
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Steps below `min_step` terminate the run (stiff escape guard).
    pub min_step: f64,
    pub t_max: f64,
    /// Any state component above this magnitude terminates by blow-up.
    pub blowup_threshold: f64,
    /// Time tolerance for event localization.
    pub event_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_step: f64::INFINITY,
            min_step: 0.0, // resolved to 1e-14 * t_max at run time
            t_max: 10.0,
            blowup_threshold: 1e12,
            event_tol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_t_max(t_max: f64) -> Self {
        IntegratorConfig {
            t_max,
            ..Default::default()
        }
    }

    fn resolved_min_step(&self) -> f64 {
        if self.min_step > 0.0 {
            self.min_step
        } else {
            1e-14 * self.t_max.abs().max(1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum EventKind {
    FrameSingularity,
    Blowup,
    TurningPoint,
    NormDriftExceeded,
    DomainExit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    Any,
    Up,
    Down,
}

/// Sign-change guard along the solution.
#[derive(Clone)]
pub struct EventSpec {
    pub kind: EventKind,
    pub guard: Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>,
    pub direction: EventDirection,
    pub terminal: bool,
}

impl EventSpec {
    pub fn new(
        kind: EventKind,
        guard: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        EventSpec {
            kind,
            guard: Arc::new(guard),
            direction: EventDirection::Any,
            terminal: false,
        }
    }

    pub fn terminal(mut self) -> Self {
        self.terminal = true;
        self
    }

    pub fn direction(mut self, d: EventDirection) -> Self {
        self.direction = d;
        self
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Termination {
    TMaxReached,
    /// A state component exceeded the blow-up threshold.
    Blowup { t: f64 },
    /// Step size collapsed below the minimum.
    MinStep { t: f64 },
    TerminalEvent { t: f64, kind: EventKind },
    DomainExit { t: f64, reason: String },
}

/// Dense-output coefficients for one accepted step.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseSegment {
    /// Interpolate at `t` inside [t0, t0+h].
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        for i in 0..out.len() {
            out[i] = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + theta1
                            * (self.rcont[2][i]
                                + theta * (self.rcont[3][i] + theta1 * self.rcont[4][i])));
        }
    }
}

/// Integration result: samples at accepted steps, per-step dense output,
/// events, termination reason and (after `monitor`) an invariant drift ledger.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub dense: Vec<DenseSegment>,
    pub events: Vec<Event>,
    pub termination: Termination,
    pub drift: DriftLedger,
    pub n_steps: usize,
    pub n_rejected: usize,
    pub n_rhs: usize,
}

impl Trajectory {
    pub fn start_time(&self) -> f64 {
        self.ts[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    pub fn dim(&self) -> usize {
        self.ys[0].len()
    }

    /// Dense evaluation anywhere inside the integrated span.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        if self.dense.is_empty() || t <= self.ts[0] {
            out.copy_from_slice(&self.ys[0]);
            return out;
        }
        if t >= self.end_time() {
            out.copy_from_slice(self.ys.last().unwrap());
            return out;
        }
        // binary search for the segment with ts[k] <= t < ts[k+1]
        let k = match self.ts.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.dense.len() - 1),
            Err(i) => i - 1,
        };
        self.dense[k.min(self.dense.len() - 1)].eval(t, &mut out);
        out
    }

    /// Resample on a uniform grid of `n` points over the integrated span.
    pub fn resample(&self, n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let t0 = self.start_time();
        let t1 = self.end_time();
        let ts: Vec<f64> = (0..n)
            .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1).max(1) as f64)
            .collect();
        let ys = ts.iter().map(|&t| self.eval(t)).collect();
        (ts, ys)
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// b - b_hat (error weights), 7 stages with FSAL
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// dense output weights
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Initial step size heuristic (Hairer's HINIT).
fn initial_step(
    sys: &dyn OdeSystem,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    cfg: &IntegratorConfig,
) -> f64 {
    let n = y0.len();
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..n {
        let sk = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y0[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(cfg.max_step);
    // explicit Euler probe
    let mut y1 = vec![0.0; n];
    for i in 0..n {
        y1[i] = y0[i] + h * f0[i];
    }
    let mut f1 = vec![0.0; n];
    if sys.rhs(t0 + h, &y1, &mut f1).is_err() {
        return h * 1e-3;
    }
    let mut der2 = 0.0;
    for i in 0..n {
        let sk = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (1e-6f64).max(h * 1e-3)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(cfg.max_step)
}

struct StepResult {
    y1: Vec<f64>,
    /// Raw local error estimate per component (already scaled by h).
    err_vec: Vec<f64>,
    /// Derivative at (t+h, y1), reused as k1 of the next step (FSAL).
    k_last: Vec<f64>,
    stages: [Vec<f64>; 6],
}

fn try_step(
    sys: &dyn OdeSystem,
    t: f64,
    y: &[f64],
    f: &[f64],
    h: f64,
) -> Result<StepResult, RhsFailure> {
    let n = y.len();
    let mut k: [Vec<f64>; 6] = [
        f.to_vec(),
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    ];
    let mut ys = vec![0.0; n];
    for s in 0..5 {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                acc += A[s][j] * kj[i];
            }
            ys[i] = y[i] + h * acc;
        }
        let (_, tail) = k.split_at_mut(s + 1);
        sys.rhs(t + C[s] * h, &ys, &mut tail[0])?;
    }
    // 6th stage combination is the 5th-order solution (row 6 of A = b)
    let mut y1 = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for (j, kj) in k.iter().enumerate() {
            acc += A[5][j] * kj[i];
        }
        y1[i] = y[i] + h * acc;
    }
    let mut k7 = vec![0.0; n];
    sys.rhs(t + h, &y1, &mut k7)?;
    let err_vec: Vec<f64> = (0..n)
        .map(|i| {
            h * (E[0] * k[0][i]
                + E[2] * k[2][i]
                + E[3] * k[3][i]
                + E[4] * k[4][i]
                + E[5] * k[5][i]
                + E[6] * k7[i])
        })
        .collect();
    Ok(StepResult {
        y1,
        err_vec,
        k_last: k7,
        stages: k,
    })
}

/// Integrates `sys` from `(0, y0)` forward to `cfg.t_max` (or an earlier
/// termination). Every accepted step is sampled and carries a dense-output
/// interpolant; guards in `events` are localized on the dense output.
pub fn integrate(
    sys: &dyn OdeSystem,
    y0: &[f64],
    cfg: &IntegratorConfig,
    events: &[EventSpec],
) -> Trajectory {
    integrate_from(sys, 0.0, y0, cfg, events)
}

/// As `integrate`, starting from time `t0`.
pub fn integrate_from(
    sys: &dyn OdeSystem,
    t0: f64,
    y0: &[f64],
    cfg: &IntegratorConfig,
    events: &[EventSpec],
) -> Trajectory {
    let n = y0.len();
    assert_eq!(n, sys.dim());
    let min_step = cfg.resolved_min_step();
    let t_end = t0 + cfg.t_max;

    let mut ts = vec![t0];
    let mut ys = vec![y0.to_vec()];
    let mut dense: Vec<DenseSegment> = Vec::new();
    let mut recorded: Vec<Event> = Vec::new();
    let mut n_steps = 0usize;
    let mut n_rejected = 0usize;
    let mut n_rhs = 1usize;

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; n];
    if let Err(e) = sys.rhs(t, &y, &mut f) {
        return Trajectory {
            ts,
            ys,
            dense,
            events: vec![Event {
                t,
                kind: EventKind::DomainExit,
                detail: e.reason.clone(),
            }],
            termination: Termination::DomainExit { t, reason: e.reason },
            drift: DriftLedger::new(),
            n_steps: 0,
            n_rejected: 0,
            n_rhs: 1,
        };
    }

    let mut guard_vals: Vec<f64> = events.iter().map(|ev| (ev.guard)(t, &y)).collect();
    let mut h = initial_step(sys, t, &y, &f, cfg).min(t_end - t);
    n_rhs += 2;
    let mut facold: f64 = 1e-4;

    let termination;
    'outer: loop {
        if t >= t_end {
            termination = Termination::TMaxReached;
            break;
        }
        if n_steps + n_rejected >= cfg.max_steps {
            termination = Termination::MinStep { t };
            break;
        }
        h = h.min(cfg.max_step).min(t_end - t);
        if h < min_step {
            termination = Termination::MinStep { t };
            break;
        }

        let step = match try_step(sys, t, &y, &f, h) {
            Ok(s) => s,
            Err(e) => {
                // domain exit inside the step: shrink toward the boundary
                if h > min_step * 4.0 {
                    h *= 0.25;
                    n_rejected += 1;
                    continue;
                }
                recorded.push(Event {
                    t,
                    kind: EventKind::DomainExit,
                    detail: e.reason.clone(),
                });
                termination = Termination::DomainExit { t, reason: e.reason };
                break;
            }
        };
        n_rhs += 6;

        // weighted RMS error norm
        let mut err = 0.0;
        for i in 0..n {
            let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(step.y1[i].abs());
            let r = step.err_vec[i] / sk;
            err += r * r;
        }
        let err = (err / n as f64).sqrt();

        if err <= 1.0 {
            // accept; build dense output
            let ydiff: Vec<f64> = (0..n).map(|i| step.y1[i] - y[i]).collect();
            let bspl: Vec<f64> = (0..n).map(|i| h * f[i] - ydiff[i]).collect();
            let rcont = [
                y.clone(),
                ydiff.clone(),
                bspl.clone(),
                (0..n)
                    .map(|i| ydiff[i] - h * step.k_last[i] - bspl[i])
                    .collect(),
                (0..n)
                    .map(|i| {
                        h * (D[0] * step.stages[0][i]
                            + D[2] * step.stages[2][i]
                            + D[3] * step.stages[3][i]
                            + D[4] * step.stages[4][i]
                            + D[5] * step.stages[5][i]
                            + D[6] * step.k_last[i])
                    })
                    .collect(),
            ];
            let seg = DenseSegment { t0: t, h, rcont };
            let t_new = t + h;

            // event detection on this step
            let mut terminal_hit: Option<(f64, EventKind)> = None;
            for (idx, ev) in events.iter().enumerate() {
                let g0 = guard_vals[idx];
                let g1 = (ev.guard)(t_new, &step.y1);
                let crossed = match ev.direction {
                    EventDirection::Any => g0 * g1 < 0.0,
                    EventDirection::Up => g0 < 0.0 && g1 > 0.0,
                    EventDirection::Down => g0 > 0.0 && g1 < 0.0,
                };
                if crossed {
                    let dense_guard = |tt: f64| {
                        let mut yb = vec![0.0; n];
                        seg.eval(tt, &mut yb);
                        (ev.guard)(tt, &yb)
                    };
                    // the interpolant can lose the bracket near blow-up;
                    // fall back to the step endpoint in that case
                    let (fa, fb) = (dense_guard(t), dense_guard(t_new));
                    let te = if fa.is_finite() && fb.is_finite() && fa * fb < 0.0 {
                        crate::numeric::brent(dense_guard, t, t_new, cfg.event_tol.max(1e-15 * h))
                    } else {
                        t_new
                    };
                    recorded.push(Event {
                        t: te,
                        kind: ev.kind,
                        detail: String::new(),
                    });
                    if ev.terminal {
                        match terminal_hit {
                            Some((tprev, _)) if tprev <= te => {}
                            _ => terminal_hit = Some((te, ev.kind)),
                        }
                    }
                }
                guard_vals[idx] = g1;
            }

            if let Some((te, kind)) = terminal_hit {
                // final sample at the event; the stored interpolant keeps the
                // full-step scaling so evaluation inside [t, te] stays exact
                let mut ye = vec![0.0; n];
                seg.eval(te, &mut ye);
                ts.push(te);
                ys.push(ye);
                dense.push(seg);
                termination = Termination::TerminalEvent { t: te, kind };
                n_steps += 1;
                break 'outer;
            }

            t = t_new;
            y = step.y1;
            f = step.k_last;
            ts.push(t);
            ys.push(y.clone());
            dense.push(seg);
            n_steps += 1;

            if y.iter().any(|v| !v.is_finite() || v.abs() > cfg.blowup_threshold) {
                recorded.push(Event {
                    t,
                    kind: EventKind::Blowup,
                    detail: "state component exceeded blow-up threshold".into(),
                });
                termination = Termination::Blowup { t };
                break;
            }

            // PI controller (accepted)
            let fac11 = err.max(1e-16).powf(0.2 - BETA * 0.75);
            let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            h /= fac;
            facold = err.max(1e-4);
        } else {
            n_rejected += 1;
            let fac11 = err.powf(0.2 - BETA * 0.75);
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }

    Trajectory {
        ts,
        ys,
        dense,
        events: recorded,
        termination,
        drift: DriftLedger::new(),
        n_steps,
        n_rejected,
        n_rhs,
    }
}

/// Max absolute drift of each named quantity relative to its initial value,
/// evaluated at every sample.
pub fn monitor(
    traj: &Trajectory,
    quantities: &[(String, Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>)],
) -> DriftLedger {
    let mut ledger = DriftLedger::new();
    for (name, q) in quantities {
        let v0 = q(traj.ts[0], &traj.ys[0]);
        let mut rec = DriftRecord {
            initial: v0,
            max_drift: 0.0,
            t_at_max: traj.ts[0],
        };
        for (t, y) in traj.ts.iter().zip(&traj.ys) {
            let d = (q(*t, y) - v0).abs();
            if d > rec.max_drift {
                rec.max_drift = d;
                rec.t_at_max = *t;
            }
        }
        ledger.insert(name.clone(), rec);
    }
    ledger
}
