//! Metric catalog: every metric is hard-coded as a [`FrameMetric`] plus,
//! where available, a specialized frame-component ODE system and closed-form
//! solutions. Entries are addressable by string id and a parameter map.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::{CGState, CurveClass, FrameMetric, NamedInvariant, Signature, Vector, MAX_DIM};

pub mod axisym;
pub mod berger;
pub mod conformal;
pub mod flat;
pub mod nil;
pub mod schwarzschild;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CatalogId {
    E3,
    M3,
    S3,
    H3,
    AxisymPlane,
    AxisymGeneral,
    NilRiem,
    NilLor,
    Berger,
    SchwarzschildExt,
    SchwarzschildHorizon,
}

impl CatalogId {
    pub fn as_str(&self) -> &'static str {
        match self {
            CatalogId::E3 => "e3",
            CatalogId::M3 => "m3",
            CatalogId::S3 => "s3",
            CatalogId::H3 => "h3",
            CatalogId::AxisymPlane => "axisym-plane",
            CatalogId::AxisymGeneral => "axisym-general",
            CatalogId::NilRiem => "nil-r",
            CatalogId::NilLor => "nil-l",
            CatalogId::Berger => "berger",
            CatalogId::SchwarzschildExt => "schw-ext",
            CatalogId::SchwarzschildHorizon => "schw-horizon",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "e3" => CatalogId::E3,
            "m3" => CatalogId::M3,
            "s3" => CatalogId::S3,
            "h3" => CatalogId::H3,
            "axisym-plane" => CatalogId::AxisymPlane,
            "axisym-general" => CatalogId::AxisymGeneral,
            "nil-r" => CatalogId::NilRiem,
            "nil-l" => CatalogId::NilLor,
            "berger" => CatalogId::Berger,
            "schw-ext" => CatalogId::SchwarzschildExt,
            "schw-horizon" => CatalogId::SchwarzschildHorizon,
            other => return Err(Error::Config(format!("unknown metric id '{other}'"))),
        })
    }
}

/// Time derivative of a third-order state in frame components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CGDeriv {
    pub xdot: Vector,
    pub udot: Vector,
    pub adot: Vector,
}

/// Specialized frame ODE system quoted directly from a source, restricted to
/// the states it is written for.
#[derive(Clone)]
pub struct SpecializedRhs {
    pub rhs: Arc<dyn Fn(&CGState, &Signature) -> CGDeriv + Send + Sync>,
    /// States the specialized form applies to (e.g. planar only).
    pub applies: Arc<dyn Fn(&CGState) -> bool + Send + Sync>,
}

/// A catalogued Killing field, evaluated at a point: frame components of
/// `K`, of the unit-tangent acceleration `a = nabla_{K/|K|} (K/|K|)`, and the
/// frame-component rates of `u` and `a` along the flow (zero for all
/// catalogued fields; kept explicit so the trajectory test stays honest).
#[derive(Debug, Clone, Copy)]
pub struct KillingSample {
    pub k: Vector,
    pub accel: Vector,
    pub udot: Vector,
    pub adot: Vector,
}

#[derive(Clone)]
pub struct KillingField {
    pub name: String,
    pub eval: Arc<dyn Fn(&[f64]) -> KillingSample + Send + Sync>,
}

/// Killing data for the constant-curvature constant `Q`: frame components of
/// `K` (index lowered) and of `M_ab = nabla_a K_b`.
#[derive(Debug, Clone, Copy)]
pub struct KillingQData {
    pub k: Vector,
    pub m: [[f64; MAX_DIM]; MAX_DIM],
}

#[derive(Clone)]
pub struct KillingQField {
    pub name: String,
    pub eval: Arc<dyn Fn(&[f64]) -> KillingQData + Send + Sync>,
}

/// One metric of the catalog with everything the engine knows about it.
#[derive(Clone)]
pub struct CatalogEntry {
    pub id: CatalogId,
    pub params: BTreeMap<String, f64>,
    pub metric: FrameMetric,
    /// Curve classes this entry supports.
    pub curve_classes: Vec<CurveClass>,
    pub specialized: Option<SpecializedRhs>,
    /// Conserved quantities to monitor along integrations.
    pub invariants: Vec<NamedInvariant>,
    pub killing_fields: Vec<KillingField>,
    pub killing_q: Vec<KillingQField>,
    /// Confinement variable for orbit classification (r, or gamma = u3).
    pub radial: Option<Arc<dyn Fn(&CGState) -> f64 + Send + Sync>>,
    /// Flagged degenerate reference cases (lambda=0 Nil, lambda=1 Berger).
    pub degenerate_flags: Vec<String>,
}

impl CatalogEntry {
    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn default_signature(&self) -> Signature {
        Signature::new(self.curve_classes[0])
    }
}

fn get_param(params: &BTreeMap<String, f64>, key: &str, default: Option<f64>) -> Result<f64> {
    match (params.get(key), default) {
        (Some(v), _) => Ok(*v),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::Config(format!("missing parameter '{key}'"))),
    }
}

/// Build a catalog entry from a string id and parameter map (the CLI/config
/// addressing surface).
pub fn build_entry(id: &str, params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    let id = CatalogId::parse(id)?;
    match id {
        CatalogId::E3 => Ok(flat::e3_entry()),
        CatalogId::M3 => Ok(flat::m3_entry()),
        CatalogId::S3 => Ok(conformal::s3_entry()),
        CatalogId::H3 => Ok(conformal::h3_entry()),
        CatalogId::NilRiem => nil::nil_entry(1, get_param(params, "lambda", Some(1.0))?),
        CatalogId::NilLor => nil::nil_entry(-1, get_param(params, "lambda", Some(1.0))?),
        CatalogId::Berger => berger::berger_entry(get_param(params, "lambda", Some(2.0))?),
        CatalogId::SchwarzschildExt => {
            schwarzschild::schwarzschild_entry(get_param(params, "m", Some(1.0))?)
        }
        CatalogId::SchwarzschildHorizon => Err(Error::Config(
            "the horizon chart is a dedicated system; use catalog::schwarzschild::horizon_system"
                .into(),
        )),
        CatalogId::AxisymPlane => {
            let profile = axisym::RadialProfile::from_params(params)?;
            axisym::axisym_entry(axisym::AxisymForm::Met1 { f: profile })
        }
        CatalogId::AxisymGeneral => {
            let profile = axisym::SurfaceProfile::from_params(params)?;
            axisym::axisym_entry(axisym::AxisymForm::Met3 { fh: profile })
        }
    }
}
