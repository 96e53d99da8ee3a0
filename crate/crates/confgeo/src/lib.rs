//! Numerical engine for conformal geodesics in a catalog of 3- and
//! 4-dimensional metrics: frame-based integration of the third-order and
//! (v, b) forms of the equations, quadrature reductions with their conserved
//! quantities, and trajectory classification (closure, confinement, blow-up,
//! spiral verdicts).

pub mod analysis;
pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod frame;
pub mod integrator;
pub mod numeric;
pub mod quadratures;
pub mod verify;

pub use error::{Error, Result};
pub use frame::{
    frame_inner, frame_norm, validate_state, CGState, Chart, CurveClass, DriftLedger,
    DriftRecord, FrameMetric, NamedInvariant, Signature, StateReport, VBState, Vector,
};
pub use integrator::{
    integrate, monitor, Event, EventKind, EventSpec, IntegratorConfig, OdeSystem, Termination,
    Trajectory,
};
