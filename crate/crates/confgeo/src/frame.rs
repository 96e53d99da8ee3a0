//! Shared geometric state types and frame algebra.
//!
//! A metric is presented as an orthonormal (or pseudo-orthonormal) frame over
//! a coordinate chart: the diagonal frame metric `eta`, the frame connection
//! coefficients `Gamma^a_{bc}` (convention: `nabla_{e_b} e_c = Gamma^a_{bc} e_a`),
//! the frame Ricci components, and the matrix of frame vectors in coordinates.
//! All vector quantities along curves are stored as frame components.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Maximum chart dimension in the catalog.
pub const MAX_DIM: usize = 4;

/// Fixed-capacity component vector; entries past `dim` are zero.
pub type Vector = [f64; MAX_DIM];

/// `m[i][j]`, row-major, entries past `dim` are zero.
pub type Matrix = [[f64; MAX_DIM]; MAX_DIM];

/// Frame connection coefficients `g[a][b][c] = Gamma^a_{bc}`.
pub type Connection = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// Curve class, fixing the sign `epsilon = g_ab u^a u^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CurveClass {
    Riemannian,
    LorentzSpacelike,
    LorentzTimelike,
}

/// Signature data for a curve class.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Signature {
    pub kind: CurveClass,
    /// +1 for Riemannian and Lorentzian space-like, -1 for Lorentzian time-like.
    pub epsilon: f64,
}

impl Signature {
    pub fn new(kind: CurveClass) -> Self {
        let epsilon = match kind {
            CurveClass::Riemannian | CurveClass::LorentzSpacelike => 1.0,
            CurveClass::LorentzTimelike => -1.0,
        };
        Signature { kind, epsilon }
    }

    pub fn riemannian() -> Self {
        Self::new(CurveClass::Riemannian)
    }

    pub fn spacelike() -> Self {
        Self::new(CurveClass::LorentzSpacelike)
    }

    pub fn timelike() -> Self {
        Self::new(CurveClass::LorentzTimelike)
    }
}

/// `sum_i eta_i (w^i)^2`.
pub fn frame_norm(eta: &[f64], w: &[f64]) -> Result<f64> {
    if eta.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: eta.len(),
            got: w.len(),
        });
    }
    Ok(eta.iter().zip(w).map(|(e, x)| e * x * x).sum())
}

/// `sum_i eta_i w^i z^i`.
pub fn frame_inner(eta: &[f64], w: &[f64], z: &[f64]) -> Result<f64> {
    if eta.len() != w.len() || eta.len() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: eta.len(),
            got: w.len().max(z.len()),
        });
    }
    Ok(eta
        .iter()
        .zip(w.iter().zip(z))
        .map(|(e, (x, y))| e * x * y)
        .sum())
}

/// Coordinate chart: names plus a validity predicate.
#[derive(Clone)]
pub struct Chart {
    pub names: Vec<&'static str>,
    contains: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>,
}

impl Chart {
    pub fn new(
        names: Vec<&'static str>,
        contains: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Chart {
            names,
            contains: Arc::new(contains),
        }
    }

    pub fn unrestricted(names: Vec<&'static str>) -> Self {
        Chart::new(names, |_| true)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (self.contains)(x)
    }
}

/// A metric presented as an orthonormal frame over a chart.
#[derive(Clone)]
pub struct FrameMetric {
    pub dim: usize,
    /// Diagonal frame metric entries, each +1 or -1.
    pub eta: Vector,
    pub chart: Chart,
    gamma: Arc<dyn Fn(&[f64]) -> Connection + Send + Sync>,
    ricci: Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>,
    /// `frame(x)[i]` = coordinate components of the frame vector `e_i`.
    frame: Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>,
}

impl FrameMetric {
    pub fn new(
        dim: usize,
        eta: Vector,
        chart: Chart,
        gamma: impl Fn(&[f64]) -> Connection + Send + Sync + 'static,
        ricci: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static,
        frame: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        assert!(dim == 3 || dim == 4, "catalog metrics are 3- or 4-dimensional");
        FrameMetric {
            dim,
            eta,
            chart,
            gamma: Arc::new(gamma),
            ricci: Arc::new(ricci),
            frame: Arc::new(frame),
        }
    }

    pub fn gamma(&self, x: &[f64]) -> Connection {
        (self.gamma)(x)
    }

    pub fn ricci(&self, x: &[f64]) -> Matrix {
        (self.ricci)(x)
    }

    pub fn frame(&self, x: &[f64]) -> Matrix {
        (self.frame)(x)
    }

    pub fn eta_slice(&self) -> &[f64] {
        &self.eta[..self.dim]
    }

    /// Frame scalar curvature `eta^{ij} R_ij`.
    pub fn scalar_curvature(&self, x: &[f64]) -> f64 {
        let r = self.ricci(x);
        (0..self.dim).map(|i| self.eta[i] * r[i][i]).sum()
    }

    /// Schouten tensor `L_ij = (R_ij - R eta_ij / (2(n-1))) / (n-2)` in the frame.
    pub fn schouten(&self, x: &[f64]) -> Matrix {
        let n = self.dim as f64;
        let r = self.ricci(x);
        let rs = self.scalar_curvature(x);
        let mut l = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let eta_ij = if i == j { self.eta[i] } else { 0.0 };
                l[i][j] = (r[i][j] - rs * eta_ij / (2.0 * (n - 1.0))) / (n - 2.0);
            }
        }
        l
    }

    /// Coordinate derivatives `xdot^mu = u^i e_i^mu(x)` of a curve with frame
    /// velocity components `u`.
    pub fn coord_velocity(&self, x: &[f64], u: &[f64]) -> Vector {
        let e = self.frame(x);
        let mut xdot = [0.0; MAX_DIM];
        for mu in 0..self.dim {
            for i in 0..self.dim {
                xdot[mu] += u[i] * e[i][mu];
            }
        }
        xdot
    }

    pub fn norm(&self, w: &[f64]) -> f64 {
        frame_norm(self.eta_slice(), w).expect("component count fixed by metric")
    }

    pub fn inner(&self, w: &[f64], z: &[f64]) -> f64 {
        frame_inner(self.eta_slice(), w, z).expect("component count fixed by metric")
    }
}

/// Third-order phase point: position, unit frame velocity, frame acceleration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CGState {
    pub x: Vector,
    pub u: Vector,
    pub a: Vector,
    pub t: f64,
}

impl CGState {
    pub fn new(x: Vector, u: Vector, a: Vector) -> Self {
        CGState { x, u, a, t: 0.0 }
    }
}

/// Second-order phase point: position, velocity `v`, one-form `b`, projective
/// parameter `tau`. Components are frame components (`b` with lowered index).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VBState {
    pub x: Vector,
    pub v: Vector,
    pub b: Vector,
    pub tau: f64,
}

/// Outcome of a state validation.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct StateReport {
    /// `|eta(u,u) - epsilon|`
    pub norm_defect: f64,
    /// `|eta(u,a)|`
    pub orthogonality_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Report the unit-norm and orthogonality defects of a third-order state.
pub fn validate_state(
    metric: &FrameMetric,
    s: &CGState,
    sig: &Signature,
    tol: f64,
) -> StateReport {
    debug_assert!(tol > 0.0);
    let norm_defect = (metric.norm(&s.u[..metric.dim]) - sig.epsilon).abs();
    let orthogonality_defect = metric
        .inner(&s.u[..metric.dim], &s.a[..metric.dim])
        .abs();
    StateReport {
        norm_defect,
        orthogonality_defect,
        tol,
        pass: norm_defect <= tol && orthogonality_defect <= tol,
    }
}

/// Default validation tolerance after integration at default integrator
/// tolerances.
pub const STATE_TOL: f64 = 1e-9;

/// Named conserved quantity evaluated on third-order states.
#[derive(Clone)]
pub struct NamedInvariant {
    pub name: String,
    pub eval: Arc<dyn Fn(&CGState) -> f64 + Send + Sync>,
}

impl NamedInvariant {
    pub fn new(name: &str, eval: impl Fn(&CGState) -> f64 + Send + Sync + 'static) -> Self {
        NamedInvariant {
            name: name.to_string(),
            eval: Arc::new(eval),
        }
    }
}

/// Per-invariant drift measurement: max |value - value(0)| and where it occurred.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct DriftRecord {
    pub initial: f64,
    pub max_drift: f64,
    pub t_at_max: f64,
}

pub type DriftLedger = BTreeMap<String, DriftRecord>;
