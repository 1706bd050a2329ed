//! Matrix text files and the JSON records emitted by the command-line tool.

use std::sync::Arc;

use serde::Serialize;

use crate::budget::BoundReport;
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};
use crate::linalg::Matrix;
use crate::matgen::PrimaryCyclicSpec;
use crate::minpoly::{MinPolyResult, Status};
use crate::poly::{FactoredPoly, Poly};
use crate::spin::CharPolyData;
use crate::verify::{Strategy, Verdict, VerifyOutcome};

/// Version of every JSON record.
pub const SCHEMA: u32 = 1;

/// `matrix q n m` followed by `m` rows of `n` entries.
pub fn write_matrix(q: u32, m: &Matrix) -> String {
    let mut out = format!("matrix {q} {} {}\n", m.cols(), m.rows());
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|e| e.value().to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the text format. Entries may wrap across lines; only the count matters.
pub fn parse_matrix(text: &str) -> Result<(Arc<FieldSpec>, Matrix)> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, line)| line.split_whitespace().map(move |t| (i + 1, t)));
    let bad = |line: usize, message: String| Error::Parse { line, message };
    let (line, magic) = tokens.next().ok_or_else(|| bad(1, "empty input".into()))?;
    if magic != "matrix" {
        return Err(bad(line, format!("expected `matrix`, found `{magic}`")));
    }
    let mut header = [0u64; 3];
    for (slot, name) in header.iter_mut().zip(["q", "n", "m"]) {
        let (l, t) = tokens
            .next()
            .ok_or_else(|| bad(line, format!("header is missing {name}")))?;
        *slot = t.parse().map_err(|_| {
            bad(
                l,
                format!("{name} must be a non-negative integer, found `{t}`"),
            )
        })?;
    }
    let [q, cols, rows] = header;
    let spec = FieldSpec::from_order(q).map_err(|e| bad(line, e.to_string()))?;
    let (cols, rows) = (cols as usize, rows as usize);
    let mut data = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for _ in 0..cols {
            let (l, t) = tokens
                .next()
                .ok_or_else(|| bad(line, format!("expected {} entries", rows * cols)))?;
            let v: u64 = t.parse().map_err(|_| bad(l, format!("bad entry `{t}`")))?;
            row.push(spec.elem(v).map_err(|e| bad(l, e.to_string()))?);
        }
        data.push(row);
    }
    if let Some((l, t)) = tokens.next() {
        return Err(bad(l, format!("trailing token `{t}`")));
    }
    let m = if rows == 0 {
        Matrix::zero(0, cols)
    } else {
        Matrix::from_rows(data)?
    };
    Ok((spec, m))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub k: u32,
    pub q: u32,
    /// Least primitive element.
    pub zeta: u32,
}

impl FieldInfo {
    pub fn new(spec: &FieldSpec) -> FieldInfo {
        FieldInfo {
            p: spec.p(),
            k: spec.k(),
            q: spec.order(),
            zeta: spec.primitive_element().value(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpCountsRecord {
    pub spin: u64,
    pub factor: u64,
    pub ordpoly: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyRecord {
    pub strategy: Strategy,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refuted_index: Option<usize>,
    pub op_count: u64,
}

impl VerifyRecord {
    pub fn new(o: &VerifyOutcome) -> VerifyRecord {
        let (verdict, refuted_index) = match o.verdict {
            Verdict::Verified => ("verified", None),
            Verdict::Refuted(j) => ("refuted", Some(j)),
        };
        VerifyRecord {
            strategy: o.strategy,
            verdict,
            refuted_index,
            op_count: o.ops.total(),
        }
    }
}

/// Cross-check against the brute-force oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleRecord {
    pub agrees: bool,
    pub poly: Poly,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinPolyRecord {
    pub schema: u32,
    pub command: &'static str,
    pub field: FieldInfo,
    pub n: usize,
    pub status: Status,
    pub minpoly: FactoredPoly,
    pub u: usize,
    pub k: usize,
    pub epsilon: String,
    pub failure_bound: String,
    pub degrees: Vec<usize>,
    pub op_counts: OpCountsRecord,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundReport>>,
}

impl MinPolyRecord {
    /// The record for a run, with the verified minimal polynomial substituted
    /// when verification produced one.
    pub fn new(
        spec: &FieldSpec,
        r: &MinPolyResult,
        verify: Option<&VerifyOutcome>,
    ) -> MinPolyRecord {
        let (status, minpoly) = match verify.and_then(|v| v.minpoly.clone()) {
            Some(mu) => (Status::True, mu),
            None if verify.is_some_and(|v| v.verified()) => (Status::True, r.minpoly.clone()),
            None => (r.status, r.minpoly.clone()),
        };
        MinPolyRecord {
            schema: SCHEMA,
            command: "minpoly",
            field: FieldInfo::new(spec),
            n: r.n(),
            status,
            minpoly,
            u: r.u,
            k: r.k(),
            epsilon: r.epsilon.to_string(),
            failure_bound: r.failure_bound.to_string(),
            degrees: r.degrees().to_vec(),
            op_counts: OpCountsRecord {
                spin: r.ops.spin.total(),
                factor: r.ops.factor.total(),
                ordpoly: r.ops.ordpoly.total(),
                verify: verify.map(|v| v.ops.total()),
            },
            seed: r.seed(),
            verify: verify.map(VerifyRecord::new),
            oracle: None,
            bounds: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CharPolyRecord {
    pub schema: u32,
    pub command: &'static str,
    pub field: FieldInfo,
    pub n: usize,
    pub k: usize,
    /// `p^(1), ..., p^(k)`.
    pub factors: Vec<Poly>,
    pub degrees: Vec<usize>,
    pub b: Vec<Vec<Elem>>,
    /// Expanded product.
    pub charpoly: Poly,
    pub op_count: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundReport>>,
}

impl CharPolyRecord {
    pub fn new(
        spec: &FieldSpec,
        data: &CharPolyData,
        charpoly: Poly,
        op_count: u64,
    ) -> CharPolyRecord {
        CharPolyRecord {
            schema: SCHEMA,
            command: "charpoly",
            field: FieldInfo::new(spec),
            n: data.n(),
            k: data.k(),
            factors: data.factors.clone(),
            degrees: data.degrees().to_vec(),
            b: data
                .b
                .iter()
                .zip(data.partial_sums()[1..].iter())
                .map(|(b, &s)| b[..s].to_vec())
                .collect(),
            charpoly,
            op_count,
            seed: data.seed,
            oracle: None,
            bounds: None,
        }
    }
}

/// The output of `verify`: a candidate checked against a fresh run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyCommandRecord {
    pub schema: u32,
    pub command: &'static str,
    pub field: FieldInfo,
    pub n: usize,
    pub candidate: FactoredPoly,
    pub verify: VerifyRecord,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundReport>>,
}

/// Sidecar written next to a generated matrix.
#[derive(Clone, Debug, Serialize)]
pub struct GenRecord {
    pub schema: u32,
    pub command: &'static str,
    pub family: String,
    pub scale: u32,
    pub field: FieldInfo,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<PrimaryCyclicSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_min: Option<FactoredPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_char: Option<FactoredPoly>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorRecord {
    pub schema: u32,
    pub error: ErrorBody,
}

impl ErrorRecord {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> ErrorRecord {
        ErrorRecord {
            schema: SCHEMA,
            error: ErrorBody {
                kind: kind.into(),
                message: message.into(),
            },
        }
    }
}

/// Short machine-readable name of an error variant.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::EpsilonOutOfRange(_) => "epsilon_out_of_range",
        Error::DimensionMismatch { .. } | Error::NotSquare { .. } => "dimension",
        Error::InvalidCandidate(_) => "invalid_candidate",
        Error::InvalidSpec(_) => "invalid_spec",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::FieldMismatch { .. } => "field_mismatch",
        Error::OracleLimit { .. } => "oracle_limit",
        Error::NotPrime(_)
        | Error::NotPrimePower(_)
        | Error::OrderTooLarge { .. }
        | Error::ZeroDegree => "field",
        Error::ElementOutOfRange { .. } => "element_out_of_range",
        _ => "internal",
    }
}
