//! Line-delimited JSON records.

use std::io::{self, BufRead, Write};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use qpg_core::poly::IntPoly;
use qpg_core::record::{FeasibilityRecord, Status};
use qpg_core::spectral::Check;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DbError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error("line {line}: schema version {found}, expected {SCHEMA_VERSION}")]
    Schema { line: usize, found: u32 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub handshake: Option<bool>,
    pub multiplicities: Option<bool>,
    pub frame: Option<bool>,
    pub disc_square: Option<bool>,
    pub trace: Option<bool>,
    pub trace_standard: Option<bool>,
    pub orthogonality: Option<String>,
    pub krein: Option<String>,
    pub absolute_bound: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorLine {
    pub degree: usize,
    /// Lowest degree first.
    pub coefficients: Vec<i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordLine {
    pub schema_version: u32,
    pub rank: usize,
    pub order: u64,
    /// Canonical text.
    pub array: String,
    pub valencies: Vec<u64>,
    pub status: String,
    pub failure_reason: Option<String>,
    pub flags: Flags,
    pub noncyclotomic: bool,
    pub minimal_poly: Vec<i128>,
    pub factors: Vec<FactorLine>,
    pub multiplicities: Option<Vec<u64>>,
    pub frame_number: Option<String>,
    pub polynomial_in: Vec<usize>,
    pub copolynomial_in_e: Vec<usize>,
    pub copolynomial_in_idempotent: bool,
    pub idempotent_witness: Option<Vec<usize>>,
    pub distance_partition: Vec<Vec<usize>>,
    pub p_polynomial: bool,
}

fn coefficients(p: &IntPoly) -> Vec<i128> {
    p.coeffs().iter().map(|c: &BigInt| c.to_i128().expect("coefficient fits in 128 bits")).collect()
}

fn check_name(c: Check) -> String {
    match c {
        Check::Pass => "pass",
        Check::Fail => "fail",
        Check::Indeterminate => "indeterminate",
    }
    .to_string()
}

impl RecordLine {
    pub fn from_record(r: &FeasibilityRecord) -> Self {
        let (array, valencies) = match &r.canonical {
            Some((a, key)) => (key.0.clone(), a.valencies().to_vec()),
            None => (r.array.to_string(), r.array.valencies().to_vec()),
        };
        let failure_reason = match &r.status {
            Status::Invalid(why) => Some(why.clone()),
            Status::Infeasible(reason) => Some(reason.as_str().to_string()),
            Status::Feasible => None,
        };
        RecordLine {
            schema_version: SCHEMA_VERSION,
            rank: r.array.rank(),
            order: r.array.order(),
            array,
            valencies,
            status: r.status.label().to_string(),
            failure_reason,
            flags: Flags {
                handshake: r.handshake,
                multiplicities: r.multiplicities_exist,
                frame: r.frame_integral,
                disc_square: r.disc_over_frame_square,
                trace: r.trace_integral,
                trace_standard: r.trace_standard,
                orthogonality: r.orthogonality.map(check_name),
                krein: r.krein.map(check_name),
                absolute_bound: r.absolute_bound,
            },
            noncyclotomic: r.noncyclotomic,
            minimal_poly: r.minimal_polynomial.as_ref().map(coefficients).unwrap_or_default(),
            factors: r
                .factors
                .iter()
                .map(|g| FactorLine { degree: g.deg(), coefficients: coefficients(g) })
                .collect(),
            multiplicities: r.profile.as_ref().map(|p| p.multiplicities.clone()),
            frame_number: r.frame_number().map(|f| f.to_string()),
            polynomial_in: r.polynomial_in.clone(),
            copolynomial_in_e: r.copolynomial_in_e.clone(),
            copolynomial_in_idempotent: r.copolynomial_in_idempotent,
            idempotent_witness: r.idempotent_witness.clone(),
            distance_partition: r.distance_partition.clone(),
            p_polynomial: r.p_polynomial,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn parse(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }

    pub fn is_feasible(&self) -> bool {
        self.status == "FEASIBLE"
    }
}

/// Writes one line per record and returns the count.
pub fn write_records<'a, W: Write>(records: impl IntoIterator<Item = &'a RecordLine>, sink: &mut W) -> io::Result<usize> {
    let mut n = 0;
    for r in records {
        writeln!(sink, "{}", r.to_line())?;
        n += 1;
    }
    sink.flush()?;
    Ok(n)
}

/// Reads every complete record. A final line without a newline is treated
/// as an interrupted write and ignored when `tolerate_partial` is set.
pub fn read_records<R: BufRead>(mut source: R, tolerate_partial: bool) -> Result<Vec<RecordLine>, DbError> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut line = 0;
    loop {
        buf.clear();
        if source.read_line(&mut buf)? == 0 {
            break;
        }
        line += 1;
        let complete = buf.ends_with('\n');
        let text = buf.trim_end_matches(['\n', '\r']);
        if text.is_empty() {
            continue;
        }
        match RecordLine::parse(text) {
            Ok(r) if r.schema_version != SCHEMA_VERSION => {
                return Err(DbError::Schema { line, found: r.schema_version })
            }
            Ok(r) => out.push(r),
            Err(_) if !complete && tolerate_partial => break,
            Err(source) => return Err(DbError::Parse { line, source }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpg_core::array::parse_array;
    use qpg_core::record::run_all;

    #[test]
    fn pentagon_line() {
        let r = RecordLine::from_record(&run_all(&parse_array("[[2,2],[1]]").unwrap()));
        assert_eq!(r.status, "FEASIBLE");
        assert_eq!(r.minimal_poly, [2, -3, -1, 1]);
        assert_eq!(r.multiplicities, Some(vec![2]));
        assert_eq!(r.failure_reason, None);
        assert_eq!(RecordLine::parse(&r.to_line()).unwrap(), r);
    }

    #[test]
    fn partial_tail_is_dropped_only_when_tolerated() {
        let r = RecordLine::from_record(&run_all(&parse_array("[[2,2],[1]]").unwrap()));
        let mut text = String::new();
        text.push_str(&r.to_line());
        text.push('\n');
        text.push_str(&r.to_line()[..20]);
        assert_eq!(read_records(text.as_bytes(), true).unwrap().len(), 1);
        assert!(read_records(text.as_bytes(), false).is_err());
    }
}
