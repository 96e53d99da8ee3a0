//! Small numerical utilities: root bracketing and polishing, polynomial
//! evaluation, adaptive quadrature, least-squares line fits, polyline
//! distances and a deterministic splittable RNG for randomized suites.

/// SplitMix64. Deterministic, seedable, no external state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Evaluate a polynomial with coefficients ordered highest degree first.
pub fn polyval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * x + c)
}

/// Derivative coefficients, highest degree first.
pub fn polyder(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n <= 1 {
        return vec![0.0];
    }
    coeffs[..n - 1]
        .iter()
        .enumerate()
        .map(|(i, c)| c * (n - 1 - i) as f64)
        .collect()
}

/// Bisection/secant hybrid polish of a bracketed root. `f(a)` and `f(b)` must
/// have opposite signs (or one endpoint be an exact root).
pub fn brent(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa * fb < 0.0, "brent requires a sign change");
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut mflag = true;
    let mut d = c;
    for _ in 0..200 {
        if (b - a).abs() < xtol || fb == 0.0 {
            break;
        }
        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let cond = !((lo.min(b) < s && s < lo.max(b))
            && !(mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            && !(!mflag && (s - b).abs() >= (c - d).abs() / 2.0));
        if cond {
            s = (a + b) / 2.0;
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    b
}

/// A classified real root.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Root {
    pub x: f64,
    pub multiplicity: usize,
}

/// Real roots of a polynomial on the whole line, by splitting into monotone
/// intervals at the critical points (roots of the derivative, found
/// recursively) and bracketing sign changes. Near-critical values within
/// `double_tol` of zero are reported as double roots.
pub fn poly_roots(coeffs: &[f64], double_tol: f64) -> Vec<Root> {
    // strip leading zeros
    let mut cs: Vec<f64> = coeffs.to_vec();
    while cs.len() > 1 && cs[0] == 0.0 {
        cs.remove(0);
    }
    let deg = cs.len() - 1;
    if deg == 0 {
        return vec![];
    }
    if deg == 1 {
        return vec![Root {
            x: -cs[1] / cs[0],
            multiplicity: 1,
        }];
    }
    let scale = cs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let crit = {
        let mut c = poly_roots(&polyder(&cs), 0.0);
        c.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap());
        c
    };
    // Cauchy bound on root magnitudes
    let bound = 1.0 + cs[1..].iter().map(|c| (c / cs[0]).abs()).fold(0.0f64, f64::max);
    let mut nodes = vec![-bound - 1.0];
    for c in &crit {
        if c.x > nodes[nodes.len() - 1] + 1e-300 {
            nodes.push(c.x);
        }
    }
    nodes.push(bound + 1.0);

    let f = |x: f64| polyval(&cs, x);
    let mut roots: Vec<Root> = Vec::new();
    // double/multiple roots sit at critical points with |F| ~ 0
    for c in &crit {
        if f(c.x).abs() <= double_tol * scale.max(1.0) {
            roots.push(Root {
                x: c.x,
                multiplicity: 2,
            });
        }
    }
    for w in nodes.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo * fhi < 0.0 {
            let r = brent(f, lo, hi, 1e-13 * (1.0 + hi.abs()));
            // skip if it coincides with an already recorded double root
            if !roots
                .iter()
                .any(|q| q.multiplicity > 1 && (q.x - r).abs() <= 1e-7 * (1.0 + r.abs()))
            {
                roots.push(Root {
                    x: r,
                    multiplicity: 1,
                });
            }
        }
    }
    roots.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap());
    roots
}

/// Real roots of `c4 x^4 + c3 x^3 + c2 x^2 + c1 x + c0` via the resolvent
/// cubic (Ferrari). Used as a cross-check on `poly_roots` for
/// well-conditioned quartics; multiplicities are not classified.
pub fn quartic_roots_closed_form(c: &[f64; 5]) -> Vec<f64> {
    let (a4, a3, a2, a1, a0) = (c[0], c[1], c[2], c[3], c[4]);
    if a4.abs() < 1e-300 {
        return poly_roots(&[a3, a2, a1, a0], 0.0).iter().map(|r| r.x).collect();
    }
    // depressed quartic y^4 + p y^2 + q y + r, x = y - a3/(4 a4)
    let b = a3 / a4;
    let cc = a2 / a4;
    let d = a1 / a4;
    let e = a0 / a4;
    let p = cc - 3.0 * b * b / 8.0;
    let q = d - b * cc / 2.0 + b * b * b / 8.0;
    let r = e - b * d / 4.0 + b * b * cc / 16.0 - 3.0 * b * b * b * b / 256.0;
    let shift = -b / 4.0;
    let mut out = Vec::new();
    if q.abs() < 1e-12 * (1.0 + p.abs() + r.abs()) {
        // biquadratic
        for z in poly_roots(&[1.0, p, r], 0.0) {
            if z.x >= -1e-15 {
                let y = z.x.max(0.0).sqrt();
                out.push(shift + y);
                out.push(shift - y);
            }
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return out;
    }
    // resolvent cubic 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0
    let res = poly_roots(&[8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q], 0.0);
    let m = res
        .iter()
        .map(|z| z.x)
        .filter(|&z| z > 0.0)
        .fold(f64::NAN, f64::max);
    if !m.is_finite() {
        return out;
    }
    let s = (2.0 * m).sqrt();
    // y^2 +/- s y + (p/2 + m -/+ q/(2s)) = 0
    for (sig, cq) in [(1.0, p / 2.0 + m - q / (2.0 * s)), (-1.0, p / 2.0 + m + q / (2.0 * s))] {
        let disc = s * s - 4.0 * cq;
        if disc >= 0.0 {
            let rt = disc.sqrt();
            out.push(shift + (-sig * s + rt) / 2.0);
            out.push(shift + (-sig * s - rt) / 2.0);
        }
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

/// Gauss-Kronrod (7,15) nodes and weights on [-1, 1].
const GK_NODES: [f64; 15] = [
    -0.991455371120813,
    -0.949107912342759,
    -0.864864423359769,
    -0.741531185599394,
    -0.586087235467691,
    -0.405845151377397,
    -0.207784955007898,
    0.0,
    0.207784955007898,
    0.405845151377397,
    0.586087235467691,
    0.741531185599394,
    0.864864423359769,
    0.949107912342759,
    0.991455371120813,
];
const GK_WK: [f64; 15] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
    0.204432940075298,
    0.190350578064785,
    0.169004726639267,
    0.140653259715525,
    0.104790010322250,
    0.063092092629979,
    0.022935322010529,
];
const GK_WG: [f64; 7] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
    0.381830050505119,
    0.279705391489277,
    0.129484966168870,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let h = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    let mut k = 0.0;
    let mut g = 0.0;
    for (i, (&x, &wk)) in GK_NODES.iter().zip(GK_WK.iter()).enumerate() {
        let v = f(mid + h * x);
        k += wk * v;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * v;
        }
    }
    (h * k, (h * (k - g)).abs())
}

/// Adaptive Gauss-Kronrod quadrature with absolute tolerance.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let (val, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 {
            return val;
        }
        let mid = (a + b) / 2.0;
        recurse(f, a, mid, tol / 2.0, depth + 1) + recurse(f, mid, b, tol / 2.0, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    recurse(&f, a, b, abs_tol, 0)
}

/// Least-squares fit `y = p + q t`; returns (p, q, rms residual).
pub fn linear_fit(ts: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = ts.len() as f64;
    let st: f64 = ts.iter().sum();
    let sy: f64 = ys.iter().sum();
    let stt: f64 = ts.iter().map(|t| t * t).sum();
    let sty: f64 = ts.iter().zip(ys).map(|(t, y)| t * y).sum();
    let det = n * stt - st * st;
    let q = (n * sty - st * sy) / det;
    let p = (sy - q * st) / n;
    let rms = (ts
        .iter()
        .zip(ys)
        .map(|(t, y)| {
            let r = y - (p + q * t);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (p, q, rms)
}

/// Distance from a point to the segment [p, q].
fn point_segment_distance(x: &[f64], p: &[f64], q: &[f64]) -> f64 {
    let mut qp2 = 0.0;
    let mut dot = 0.0;
    for i in 0..x.len() {
        let d = q[i] - p[i];
        qp2 += d * d;
        dot += (x[i] - p[i]) * d;
    }
    let t = if qp2 > 0.0 { (dot / qp2).clamp(0.0, 1.0) } else { 0.0 };
    let mut d2 = 0.0;
    for i in 0..x.len() {
        let c = p[i] + t * (q[i] - p[i]);
        let d = x[i] - c;
        d2 += d * d;
    }
    d2.sqrt()
}

fn directed_polyline_distance(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for x in from {
        let mut best = f64::INFINITY;
        if to.len() == 1 {
            best = point_segment_distance(x, &to[0], &to[0]);
        }
        for w in to.windows(2) {
            let d = point_segment_distance(x, &w[0], &w[1]);
            if d < best {
                best = d;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// Symmetric Hausdorff distance between two polylines (sampled curves).
pub fn hausdorff_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    directed_polyline_distance(a, b).max(directed_polyline_distance(b, a))
}

/// One-sided Hausdorff distance: max over samples of `from` of the distance
/// to the polyline `to`. Used when the curves cover different parameter
/// windows of the same point set.
pub fn hausdorff_distance_directed(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    directed_polyline_distance(from, to)
}
