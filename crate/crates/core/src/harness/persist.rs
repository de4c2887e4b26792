use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::multilabel::MultiLabelModel;
use crate::preprocess::Pipeline;

pub const FORMAT_VERSION: i64 = 1;

/// Everything needed to label raw text: the fitted pipeline and the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub pipeline: Pipeline,
    pub model: MultiLabelModel,
}

impl SavedModel {
    /// Labels one line of raw text.
    pub fn predict_text(&self, text: &str) -> Result<Vec<String>> {
        let x = self.pipeline.transform(text);
        let p = self.model.predict(&x)?;
        let space = self.model.space();
        Ok(p.labels.iter().map(|l| space.name(l).to_string()).collect())
    }
}

fn checksum(payload: &Value) -> String {
    hex::encode(Sha256::digest(payload.to_string().as_bytes()))
}

pub fn to_json(saved: &SavedModel) -> Result<String> {
    let payload = serde_json::to_value(saved).map_err(|e| Error::Invariant(e.to_string()))?;
    let doc = serde_json::json!({
        "format_version": FORMAT_VERSION,
        "checksum": checksum(&payload),
        "payload": payload,
    });
    Ok(doc.to_string())
}

/// Parses a model document. The version is checked before the checksum so
/// files from other format versions report as incompatible.
pub fn from_json(text: &str) -> Result<SavedModel> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Integrity(format!("unreadable model file: {e}")))?;
    let version = doc
        .get("format_version")
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::Integrity("missing integer `format_version`".into()))?;
    if version != FORMAT_VERSION {
        return Err(Error::Incompatible {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let stored = doc
        .get("checksum")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Integrity("missing `checksum`".into()))?;
    let payload = doc
        .get("payload")
        .ok_or_else(|| Error::Integrity("missing `payload`".into()))?;
    if checksum(payload) != stored {
        return Err(Error::Integrity("checksum mismatch".into()));
    }
    serde_json::from_value(payload.clone()).map_err(|e| Error::Integrity(format!("malformed payload: {e}")))
}

pub fn save_model(saved: &SavedModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(saved)?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SavedModel> {
    from_json(&fs::read_to_string(path)?)
}
