//! Channel files: JSON documents with complex entries as `[re, im]` pairs and
//! matrices as row-major nested arrays.
//!
//! ```json
//! {
//!   "dim": 4,
//!   "dim_a": 2,
//!   "basis_a": [[[1, 0], [0, 0]], ...],   // optional, d × d_A
//!   "tolerance": 1e-9,                    // optional
//!   "kraus": [ [[[0.7, 0], ...], ...], ... ]
//! }
//! ```
//!
//! Unknown top-level fields are ignored, so documents written by
//! `decompose` (which add `u_a` and `corrections`) parse as channel files.

use std::path::Path;

use dfs_core::{Complex64, ComplexMatrix, KrausChannel, SubspaceSplit, Tolerance};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Why a channel file was rejected.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    /// Malformed structure at a JSON path such as `kraus[0][0][2]`.
    #[error("malformed field {path}: {message}")]
    Field { path: String, message: String },
    /// Sizes disagree with the declared `dim` / `dim_a`.
    #[error("dimension error at {path}: {message}")]
    Dimension { path: String, message: String },
    /// Well-formed input that violates a split or channel invariant.
    #[error("invalid {field}: {source}")]
    Invariant {
        field: &'static str,
        source: dfs_core::Error,
    },
}

/// A parsed and validated channel file.
#[derive(Debug, Clone)]
pub struct ChannelFile {
    pub channel: KrausChannel,
    pub split: SubspaceSplit,
    /// Tolerance declared in the file, if any.
    pub tolerance: Option<Tolerance>,
    /// `sha256:<hex>` over the canonical (sorted-key, compact) JSON.
    pub digest: String,
}

pub fn read_channel_file(path: &Path) -> Result<ChannelFile, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_channel_str(&text)
}

pub fn parse_channel_str(text: &str) -> Result<ChannelFile, InputError> {
    let value: Value = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    parse_channel_value(&value)
}

/// Canonical digest of a JSON document.
pub fn digest(value: &Value) -> String {
    // serde_json's default map is ordered by key, so this is canonical
    let canonical = serde_json::to_string(value).expect("values always serialise");
    format!("sha256:{}", hex::encode(Sha256::digest(canonical.as_bytes())))
}

pub fn parse_channel_value(value: &Value) -> Result<ChannelFile, InputError> {
    let obj = value.as_object().ok_or_else(|| field("$", "expected a JSON object"))?;
    let dim = count(obj, "dim")?;
    let dim_a = count(obj, "dim_a")?;
    if dim == 0 {
        return Err(field("dim", "must be ≥ 1"));
    }

    let tolerance = match obj.get("tolerance") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let eps = v.as_f64().ok_or_else(|| field("tolerance", "expected a number"))?;
            Some(Tolerance::new(eps).map_err(|source| InputError::Invariant {
                field: "tolerance",
                source,
            })?)
        }
    };
    let tol = tolerance.unwrap_or_default();

    let basis_a = match obj.get("basis_a") {
        None | Some(Value::Null) => None,
        Some(v) => Some(matrix(v, "basis_a", dim, dim_a)?),
    };

    let kraus_value = obj.get("kraus").ok_or_else(|| field("kraus", "missing"))?;
    let list = kraus_value
        .as_array()
        .ok_or_else(|| field("kraus", "expected an array of matrices"))?;
    if list.is_empty() {
        return Err(field("kraus", "needs at least one Kraus operator"));
    }
    let kraus = list
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(m, &format!("kraus[{i}]"), dim, dim))
        .collect::<Result<Vec<_>, _>>()?;

    let split = SubspaceSplit::new(dim, dim_a, basis_a, tol).map_err(|source| InputError::Invariant {
        field: if matches!(source, dfs_core::Error::SplitDimension { .. }) {
            "dim_a"
        } else {
            "basis_a"
        },
        source,
    })?;
    let channel = KrausChannel::new(kraus).map_err(|source| InputError::Invariant { field: "kraus", source })?;
    Ok(ChannelFile {
        channel,
        split,
        tolerance,
        digest: digest(value),
    })
}

fn field(path: &str, message: &str) -> InputError {
    InputError::Field {
        path: path.to_owned(),
        message: message.to_owned(),
    }
}

fn count(obj: &Map<String, Value>, key: &str) -> Result<usize, InputError> {
    let v = obj.get(key).ok_or_else(|| field(key, "missing"))?;
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| field(key, "expected a non-negative integer"))
}

fn complex(v: &Value, path: &str) -> Result<Complex64, InputError> {
    let pair = v
        .as_array()
        .ok_or_else(|| field(path, "complex entry must be a two-element array [re, im]"))?;
    if pair.len() != 2 {
        return Err(field(
            path,
            &format!(
                "complex entry must be a two-element array [re, im], got {} elements",
                pair.len()
            ),
        ));
    }
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| field(&format!("{path}[0]"), "expected a number"))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| field(&format!("{path}[1]"), "expected a number"))?;
    Ok(Complex64::new(re, im))
}

fn matrix(v: &Value, path: &str, rows: usize, cols: usize) -> Result<ComplexMatrix, InputError> {
    let row_values = v
        .as_array()
        .ok_or_else(|| field(path, "expected a matrix (array of rows)"))?;
    let mut m = ComplexMatrix::zeros(rows, cols);
    // entries are checked before shapes so malformed numbers are reported first
    for (i, row) in row_values.iter().enumerate() {
        let row_path = format!("{path}[{i}]");
        let entries = row.as_array().ok_or_else(|| field(&row_path, "expected a row array"))?;
        for (j, e) in entries.iter().enumerate() {
            let z = complex(e, &format!("{row_path}[{j}]"))?;
            if i < rows && j < cols {
                m[(i, j)] = z;
            }
        }
        if entries.len() != cols {
            return Err(InputError::Dimension {
                path: row_path,
                message: format!("row has {} entries, expected {cols}", entries.len()),
            });
        }
    }
    if row_values.len() != rows {
        return Err(InputError::Dimension {
            path: path.to_owned(),
            message: format!("matrix has {} rows, expected {rows}", row_values.len()),
        });
    }
    Ok(m)
}

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Channel file document for a channel and split. `basis_a` is written only
/// for non-standard splits.
pub fn channel_to_json(channel: &KrausChannel, split: &SubspaceSplit, tolerance: Option<Tolerance>) -> Value {
    let mut obj = Map::new();
    obj.insert("dim".into(), json!(split.dim()));
    obj.insert("dim_a".into(), json!(split.dim_a()));
    if split.basis_a() != &ComplexMatrix::identity(split.dim(), split.dim_a()) {
        obj.insert("basis_a".into(), matrix_to_json(split.basis_a()));
    }
    if let Some(t) = tolerance {
        obj.insert("tolerance".into(), json!(t.eps()));
    }
    obj.insert(
        "kraus".into(),
        Value::Array(channel.kraus().iter().map(matrix_to_json).collect()),
    );
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dfs_core::generators::counterexample_channel;

    #[test]
    fn round_trip_counterexample() {
        let (ch, split) = counterexample_channel();
        let doc = channel_to_json(&ch, &split, None);
        let parsed = parse_channel_value(&doc).unwrap();
        assert_eq!(parsed.channel, ch);
        assert_eq!(parsed.split, split);
        assert!(parsed.tolerance.is_none());
        assert!(!doc.as_object().unwrap().contains_key("basis_a"));
    }

    #[test]
    fn three_element_entry_names_its_path() {
        let text = r#"{"dim": 2, "dim_a": 1, "kraus": [[[[1,0],[0,0,0]],[[0,0],[1,0]]]]}"#;
        let err = parse_channel_str(text).unwrap_err();
        assert!(err.to_string().contains("kraus[0][0][1]"), "{err}");
        let text = r#"{"dim": 2, "dim_a": 1, "kraus": [[[[1,0],[0,0],[0,0,1]],[[0,0],[1,0]]]]}"#;
        let err = parse_channel_str(text).unwrap_err();
        assert!(err.to_string().contains("kraus[0][0][2]"), "{err}");
    }

    #[test]
    fn error_kinds_are_distinct() {
        assert!(matches!(parse_channel_str("{"), Err(InputError::Json(_))));
        assert!(matches!(
            parse_channel_str(r#"{"dim_a": 1, "kraus": []}"#),
            Err(InputError::Field { .. })
        ));
        let short_row = r#"{"dim": 2, "dim_a": 1, "kraus": [[[[1,0]],[[0,0],[1,0]]]]}"#;
        assert!(matches!(
            parse_channel_str(short_row),
            Err(InputError::Dimension { .. })
        ));
        let full = r#"{"dim": 2, "dim_a": 2, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        match parse_channel_str(full) {
            Err(e @ InputError::Invariant { field: "dim_a", .. }) => assert!(e.to_string().contains("d_A < d")),
            other => panic!("unexpected {other:?}"),
        }
        let bad_basis =
            r#"{"dim": 2, "dim_a": 1, "basis_a": [[[1,0]],[[1,0]]], "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        assert!(matches!(
            parse_channel_str(bad_basis),
            Err(InputError::Invariant { field: "basis_a", .. })
        ));
        let bad_tol = r#"{"dim": 2, "dim_a": 1, "tolerance": -1, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        assert!(matches!(
            parse_channel_str(bad_tol),
            Err(InputError::Invariant { field: "tolerance", .. })
        ));
    }

    #[test]
    fn digest_ignores_key_order_and_whitespace() {
        let a: Value = serde_json::from_str(r#"{"dim": 2, "dim_a": 1, "kraus": []}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{ "kraus":[], "dim_a":1,"dim":2 }"#).unwrap();
        assert_eq!(digest(&a), digest(&b));
        assert!(digest(&a).starts_with("sha256:"));
    }
}
