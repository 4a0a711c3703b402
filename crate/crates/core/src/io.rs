//! The JSON channel format.
//!
//! ```json
//! {"dim": 2, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}
//! ```
//!
//! Exactly one of `kraus` (list of `d × d` matrices), `choi` or `natural`
//! (`d² × d²`) must be present. Matrices are row-major nested arrays and each
//! complex entry is a `[re, im]` pair. An optional `meta` object is carried
//! through untouched.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::{Representation, SuperOperator};
use crate::numerics::{CMatrix, C64};
use crate::{Error, Result};

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    dim: usize,
    #[serde(default)]
    kraus: Option<Vec<RawMatrix>>,
    #[serde(default)]
    choi: Option<RawMatrix>,
    #[serde(default)]
    natural: Option<RawMatrix>,
    #[serde(default)]
    meta: Option<Value>,
}

#[derive(Debug, Serialize)]
struct ChannelOut<'a> {
    dim: usize,
    natural: RawMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<&'a Value>,
}

fn to_matrix(name: &str, raw: &RawMatrix) -> Result<CMatrix> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    if let Some((k, row)) = raw.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(Error::Input(format!(
            "{name}: row {k} has {} entries, expected {cols}",
            row.len()
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |a, b| {
        let [re, im] = raw[a][b];
        C64::new(re, im)
    }))
}

fn from_matrix(m: &CMatrix) -> RawMatrix {
    (0..m.nrows())
        .map(|a| {
            (0..m.ncols())
                .map(|b| [m[(a, b)].re, m[(a, b)].im])
                .collect()
        })
        .collect()
}

/// Parses a channel file; returns the map and its `meta` object, if any.
pub fn parse_channel(text: &str) -> Result<(SuperOperator, Option<Value>)> {
    let file: ChannelFile = serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let given = [
        file.kraus.is_some(),
        file.choi.is_some(),
        file.natural.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if given != 1 {
        return Err(Error::Input(
            "exactly one of \"kraus\", \"choi\", \"natural\" is required".into(),
        ));
    }
    let rep = if let Some(k) = &file.kraus {
        let ops = k
            .iter()
            .enumerate()
            .map(|(i, m)| to_matrix(&format!("kraus[{i}]"), m))
            .collect::<Result<Vec<_>>>()?;
        Representation::Kraus(ops)
    } else if let Some(j) = &file.choi {
        Representation::Choi(to_matrix("choi", j)?)
    } else {
        Representation::Natural(to_matrix(
            "natural",
            file.natural.as_ref().expect("checked"),
        )?)
    };
    Ok((SuperOperator::build(rep, file.dim)?, file.meta))
}

/// Serializes a map in the natural representation.
pub fn channel_to_json(psi: &SuperOperator, meta: Option<&Value>) -> String {
    let out = ChannelOut {
        dim: psi.dim(),
        natural: from_matrix(psi.natural()),
        meta,
    };
    let mut s = serde_json::to_string(&out).expect("plain data serializes");
    s.push('\n');
    s
}

/// `[re, im]` pairs of a vector, for reports.
pub fn vector_to_json(v: &crate::numerics::CVector) -> Value {
    Value::Array(v.iter().map(|z| serde_json::json!([z.re, z.im])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn round_trip_is_exact() {
        for (name, psi) in zoo::corpus().unwrap() {
            let text = channel_to_json(&psi, None);
            let (back, meta) = parse_channel(&text).unwrap();
            assert!(meta.is_none());
            assert_eq!(back.natural(), psi.natural(), "{name}");
        }
    }

    #[test]
    fn meta_is_carried() {
        let psi = zoo::depolarizing(2, 0.5).unwrap();
        let meta = serde_json::json!({"kind": "depolarizing", "p": 0.5});
        let (_, back) = parse_channel(&channel_to_json(&psi, Some(&meta))).unwrap();
        assert_eq!(back, Some(meta));
    }

    #[test]
    fn kraus_and_choi_inputs() {
        let text = r#"{"dim": 2, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        let (psi, _) = parse_channel(text).unwrap();
        assert_eq!(psi.natural(), &CMatrix::identity(4, 4));

        let j = from_matrix(&psi.choi());
        let text = serde_json::json!({"dim": 2, "choi": j}).to_string();
        let (back, _) = parse_channel(&text).unwrap();
        assert_eq!(back.natural(), psi.natural());
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let cases = [
            ("{\"dim\": 2,\n \"natural\": [[[1,0]]", "line 2"),
            (r#"{"dim": 2}"#, "exactly one"),
            (
                r#"{"dim": 1, "natural": [[[1,0]]], "choi": [[[1,0]]]}"#,
                "exactly one",
            ),
            (
                r#"{"dim": 2, "natural": [[[1,0]]]}"#,
                "natural matrix must be 4x4",
            ),
            (r#"{"dim": 2, "kraus": [[[[1,0],[0,0]],[[0,0]]]]}"#, "row 1"),
            (
                r#"{"dim": 1, "natural": [[[1,0]]], "extra": 1}"#,
                "unknown field",
            ),
        ];
        for (text, needle) in cases {
            match parse_channel(text) {
                Err(Error::Input(msg)) => assert!(msg.contains(needle), "{msg}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
