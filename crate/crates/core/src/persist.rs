//! Versioned JSON persistence for trained models.
//!
//! Two document kinds, discriminated by `model_type`:
//!
//! - `"lssvm"`: `{format_version, model_type, kernel{type, params}, C,
//!   alpha[], b, train_x[[]], feature_names[], norm{mean[], std[]},
//!   lagged}`
//! - `"hybrid_valve"`: the lssvm document embedded under `lssvm`, plus
//!   `{geom, fluid, feature_set, pvc_convention, density_law}`
//!
//! Numbers are serialized as decimal with full double-precision round
//! trip, so a saved-then-loaded model predicts bit-identically. `train_x`
//! is stored in the model's internal (normalized) coordinates; `norm`
//! holds the statistics applied to raw queries.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::hybrid::{DensityLaw, FeatureSet, HybridError, HybridValveModel};
use crate::lssvm::{KernelSpec, LssvmError, NormStats, TrainedLssvm};
use crate::mechanism::{FluidProperties, ValveGeometry};

/// Current model document version.
pub const FORMAT_VERSION: u32 = 1;

/// Default vena-contracta pressure convention recorded in hybrid
/// documents: the proxy is the measured downstream pressure.
pub const PVC_CONVENTION_P2: &str = "p2";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PersistError {
    #[error("model format version {found} is not supported (this build reads version {supported})")]
    VersionMismatch { found: i64, supported: u32 },
    #[error("unknown model_type `{0}` (expected `lssvm` or `hybrid_valve`)")]
    UnknownModelType(String),
    #[error("model document is missing `{0}`")]
    MissingField(&'static str),
    #[error("feature_names has {names} entries but the model takes {dim} inputs")]
    FeatureNameCount { names: usize, dim: usize },
    #[error("malformed model JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Lssvm(#[from] LssvmError),
    #[error(transparent)]
    Hybrid(#[from] HybridError),
}

impl From<serde_json::Error> for PersistError {
    fn from(e: serde_json::Error) -> Self {
        Self::Json(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
enum KernelDoc {
    Rbf { sigma: f64 },
    Linear,
    Polynomial { degree: u32, offset: f64 },
}

impl From<&KernelSpec<f64>> for KernelDoc {
    fn from(k: &KernelSpec<f64>) -> Self {
        match *k {
            KernelSpec::Rbf { sigma } => Self::Rbf { sigma },
            KernelSpec::Linear => Self::Linear,
            KernelSpec::Polynomial { degree, offset } => Self::Polynomial { degree, offset },
        }
    }
}

impl From<KernelDoc> for KernelSpec<f64> {
    fn from(doc: KernelDoc) -> Self {
        match doc {
            KernelDoc::Rbf { sigma } => Self::Rbf { sigma },
            KernelDoc::Linear => Self::Linear,
            KernelDoc::Polynomial { degree, offset } => Self::Polynomial { degree, offset },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NormDoc {
    mean: Vec<f64>,
    std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LssvmDoc {
    format_version: u32,
    model_type: String,
    kernel: KernelDoc,
    #[serde(rename = "C")]
    c: f64,
    alpha: Vec<f64>,
    b: f64,
    train_x: Vec<Vec<f64>>,
    feature_names: Vec<String>,
    #[serde(default)]
    norm: Option<NormDoc>,
    #[serde(default)]
    lagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct HybridDoc {
    format_version: u32,
    model_type: String,
    lssvm: LssvmDoc,
    geom: ValveGeometry<f64>,
    fluid: FluidProperties<f64>,
    feature_set: FeatureSet,
    pvc_convention: String,
    density_law: Option<DensityLaw<f64>>,
    #[serde(default)]
    lagged: usize,
}

/// A direct-regression model as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedLssvm {
    pub model: TrainedLssvm<f64>,
    pub feature_names: Vec<String>,
    /// Number of previous samples whose features were appended during
    /// training (0 = plain static regression).
    pub lagged: usize,
}

/// A hybrid valve model as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedHybrid {
    pub model: HybridValveModel<f64>,
    pub feature_names: Vec<String>,
    pub lagged: usize,
    pub pvc_convention: String,
}

/// Any model document this build can read.
#[derive(Debug, Clone, PartialEq)]
pub enum SavedModel {
    Lssvm(SavedLssvm),
    Hybrid(SavedHybrid),
}

impl SavedModel {
    pub fn feature_names(&self) -> &[String] {
        match self {
            Self::Lssvm(m) => &m.feature_names,
            Self::Hybrid(m) => &m.feature_names,
        }
    }

    pub fn lagged(&self) -> usize {
        match self {
            Self::Lssvm(m) => m.lagged,
            Self::Hybrid(m) => m.lagged,
        }
    }
}

fn lssvm_doc(
    model: &TrainedLssvm<f64>,
    feature_names: &[String],
    lagged: usize,
) -> Result<LssvmDoc, PersistError> {
    if feature_names.len() != model.dim() {
        return Err(PersistError::FeatureNameCount {
            names: feature_names.len(),
            dim: model.dim(),
        });
    }
    let dim = model.dim();
    let train_x = model.train_x().chunks(dim).map(<[f64]>::to_vec).collect();
    Ok(LssvmDoc {
        format_version: FORMAT_VERSION,
        model_type: "lssvm".to_string(),
        kernel: model.kernel().into(),
        c: model.regularization(),
        alpha: model.alpha().to_vec(),
        b: model.bias(),
        train_x,
        feature_names: feature_names.to_vec(),
        norm: model.norm_stats().map(|n| NormDoc {
            mean: n.mean.clone(),
            std: n.std.clone(),
        }),
        lagged,
    })
}

fn lssvm_from_doc(doc: LssvmDoc) -> Result<SavedLssvm, PersistError> {
    let dim = doc.feature_names.len();
    if dim == 0 {
        return Err(PersistError::MissingField("feature_names"));
    }
    let mut flat = Vec::with_capacity(doc.alpha.len() * dim);
    for row in &doc.train_x {
        if row.len() != dim {
            return Err(PersistError::Lssvm(LssvmError::DimensionMismatch {
                expected: dim,
                got: row.len(),
            }));
        }
        flat.extend_from_slice(row);
    }
    let norm = doc.norm.map(|n| NormStats {
        mean: n.mean,
        std: n.std,
    });
    let model = TrainedLssvm::from_raw_parts(
        doc.kernel.into(),
        doc.c,
        doc.alpha,
        doc.b,
        flat,
        dim,
        norm,
    )?;
    Ok(SavedLssvm {
        model,
        feature_names: doc.feature_names,
        lagged: doc.lagged,
    })
}

/// Serializes a direct-regression model.
pub fn lssvm_to_json(
    model: &TrainedLssvm<f64>,
    feature_names: &[String],
    lagged: usize,
) -> Result<String, PersistError> {
    Ok(serde_json::to_string_pretty(&lssvm_doc(model, feature_names, lagged)?)?)
}

/// Serializes a hybrid valve model.
pub fn hybrid_to_json(
    model: &HybridValveModel<f64>,
    feature_names: &[String],
    lagged: usize,
) -> Result<String, PersistError> {
    let doc = HybridDoc {
        format_version: FORMAT_VERSION,
        model_type: "hybrid_valve".to_string(),
        lssvm: lssvm_doc(&model.area_model, feature_names, lagged)?,
        geom: model.geom,
        fluid: model.fluid,
        feature_set: model.feature_set,
        pvc_convention: PVC_CONVENTION_P2.to_string(),
        density_law: model.density_law,
        lagged,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Parses either model document, checking `format_version` before the
/// full schema so future versions fail with a version message rather than
/// a shape error.
pub fn model_from_json(text: &str) -> Result<SavedModel, PersistError> {
    let value: Value = serde_json::from_str(text)?;
    let version = value
        .get("format_version")
        .and_then(Value::as_i64)
        .ok_or(PersistError::MissingField("format_version"))?;
    if version != FORMAT_VERSION as i64 {
        return Err(PersistError::VersionMismatch {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let model_type = value
        .get("model_type")
        .and_then(Value::as_str)
        .ok_or(PersistError::MissingField("model_type"))?;
    match model_type {
        "lssvm" => {
            let doc: LssvmDoc = serde_json::from_value(value)?;
            Ok(SavedModel::Lssvm(lssvm_from_doc(doc)?))
        }
        "hybrid_valve" => {
            let doc: HybridDoc = serde_json::from_value(value)?;
            let saved = lssvm_from_doc(doc.lssvm)?;
            let model = HybridValveModel::from_parts(
                doc.geom,
                doc.fluid,
                saved.model,
                doc.feature_set,
                doc.density_law,
            )?;
            Ok(SavedModel::Hybrid(SavedHybrid {
                model,
                feature_names: saved.feature_names,
                lagged: doc.lagged,
                pvc_convention: doc.pvc_convention,
            }))
        }
        other => Err(PersistError::UnknownModelType(other.to_string())),
    }
}
