//! Tables in the layout of the published lists: order, parameter array, status.

use std::fmt::Write;
use std::str::FromStr;

use thiserror::Error;

use crate::db::RecordLine;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filter {
    All,
    Feasible,
    Noncyclotomic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown {what} {name:?}")]
pub struct UnknownName {
    what: &'static str,
    name: String,
}

impl FromStr for Filter {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, UnknownName> {
        match s {
            "all" => Ok(Filter::All),
            "feasible" => Ok(Filter::Feasible),
            "noncyclotomic" => Ok(Filter::Noncyclotomic),
            _ => Err(UnknownName { what: "filter", name: s.to_string() }),
        }
    }
}

impl FromStr for Format {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, UnknownName> {
        match s {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            _ => Err(UnknownName { what: "format", name: s.to_string() }),
        }
    }
}

impl Filter {
    pub fn keeps(self, r: &RecordLine) -> bool {
        match self {
            Filter::All => true,
            Filter::Feasible => r.is_feasible(),
            Filter::Noncyclotomic => r.noncyclotomic,
        }
    }
}

/// `F` for feasible, `nr-xF` for a failed check.
pub fn status_label(r: &RecordLine) -> &'static str {
    match r.status.as_str() {
        "FEASIBLE" => "F",
        "INFEASIBLE" => "nr-xF",
        _ => "invalid",
    }
}

pub const FOOTNOTE: &str = "F: passes every implemented feasibility check. \
nr-xF: fails at least one of them. Non-realizability known only from a \
classification (nr-xC) is outside what these checks decide; such arrays are listed as F.";

/// Rows sorted by order and then array text. `extended` adds the failing
/// check and the cyclotomicity flag.
pub fn emit_table(records: &[RecordLine], filter: Filter, format: Format, extended: bool) -> String {
    let mut rows: Vec<&RecordLine> = records.iter().filter(|r| filter.keeps(r)).collect();
    rows.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| a.array.cmp(&b.array)));
    let mut out = String::new();
    match format {
        Format::Markdown => {
            if extended {
                out.push_str("| Order | Parameter Array | Status | Failed check | Noncyclotomic |\n");
                out.push_str("|---|---|---|---|---|\n");
            } else {
                out.push_str("| Order | Parameter Array | Status |\n");
                out.push_str("|---|---|---|\n");
            }
            for r in &rows {
                write!(out, "| {} | {} | {} |", r.order, r.array, status_label(r)).unwrap();
                if extended {
                    let reason = r.failure_reason.as_deref().unwrap_or("");
                    write!(out, " {} | {} |", reason, if r.noncyclotomic { "yes" } else { "no" }).unwrap();
                }
                out.push('\n');
            }
            if !rows.is_empty() {
                out.push('\n');
                out.push_str(FOOTNOTE);
                out.push('\n');
            }
        }
        Format::Csv => {
            out.push_str("order,array,status");
            if extended {
                out.push_str(",failed_check,noncyclotomic");
            }
            out.push('\n');
            for r in &rows {
                write!(out, "{},\"{}\",{}", r.order, r.array, status_label(r)).unwrap();
                if extended {
                    write!(out, ",{},{}", r.failure_reason.as_deref().unwrap_or(""), r.noncyclotomic).unwrap();
                }
                out.push('\n');
            }
        }
    }
    out
}
