//! Flat key-value output records and their CSV and JSON encodings.
//!
//! Numbers are written in Rust's shortest round-trip form, so parsing any
//! output field gives back the exact `f64`. With `round4` every real is
//! rounded to four decimals first, and both encodings carry the rounded value.

use serde_json::{Map, Number, Value};

use crate::bounds::BoundsResult;
use crate::experiments::{AggregateRow, CellReport, FigurePoint};
use crate::measures::PerformanceMeasures;
use crate::params::SystemParams;
use crate::sim::{IdentityCheck, SimEstimate};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Real(f64),
    Int(i64),
    UInt(u64),
    Bool(bool),
    Text(String),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(String, Field)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Style {
    pub round4: bool,
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn real(mut self, key: &str, v: f64) -> Self {
        self.fields.push((key.to_owned(), Field::Real(v)));
        self
    }

    pub fn int(mut self, key: &str, v: impl Into<i64>) -> Self {
        self.fields.push((key.to_owned(), Field::Int(v.into())));
        self
    }

    pub fn uint(mut self, key: &str, v: u64) -> Self {
        self.fields.push((key.to_owned(), Field::UInt(v)));
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.fields.push((key.to_owned(), Field::Bool(v)));
        self
    }

    pub fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.fields.push((key.to_owned(), Field::Text(v.into())));
        self
    }

    pub fn extend(mut self, other: Record) -> Self {
        self.fields.extend(other.fields);
        self
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|(k, _)| k.as_str())
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn get_real(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            Field::Real(v) => Some(*v),
            Field::Int(v) => Some(*v as f64),
            Field::UInt(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn csv_values(&self, style: Style) -> Vec<String> {
        self.fields
            .iter()
            .map(|(_, v)| match v {
                Field::Real(x) if style.round4 => format!("{:.4}", round4(*x)),
                Field::Real(x) => format!("{x:?}"),
                Field::Int(i) => i.to_string(),
                Field::UInt(i) => i.to_string(),
                Field::Bool(b) => b.to_string(),
                Field::Text(s) => s.clone(),
            })
            .collect()
    }

    pub fn to_json(&self, style: Style) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.fields {
            let value = match v {
                Field::Real(x) => {
                    let x = if style.round4 { round4(*x) } else { *x };
                    Number::from_f64(x).map_or(Value::Null, Value::Number)
                }
                Field::Int(i) => Value::from(*i),
                Field::UInt(i) => Value::from(*i),
                Field::Bool(b) => Value::Bool(*b),
                Field::Text(s) => Value::String(s.clone()),
            };
            map.insert(k.clone(), value);
        }
        Value::Object(map)
    }
}

/// Header plus one line per record, `\n` terminated. Records are expected
/// to share the key order of the first one.
pub fn to_csv(records: &[Record], style: Style) -> String {
    let mut out = String::new();
    if let Some(first) = records.first() {
        out.push_str(&first.keys().collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    for r in records {
        out.push_str(&r.csv_values(style).join(","));
        out.push('\n');
    }
    out
}

/// A single record becomes an object, several become an array.
pub fn to_json(records: &[Record], style: Style) -> String {
    let value = match records {
        [one] => one.to_json(style),
        many => Value::Array(many.iter().map(|r| r.to_json(style)).collect()),
    };
    let mut s = serde_json::to_string_pretty(&value).expect("records serialize");
    s.push('\n');
    s
}

pub fn params_record(p: &SystemParams) -> Record {
    Record::new()
        .uint("r", p.r())
        .uint("q", p.q())
        .real("lambda", p.lambda())
        .real("tau", p.tau())
        .real("x", p.x())
}

pub fn bounds_record(p: &SystemParams, b: &BoundsResult) -> Record {
    params_record(p)
        .real("loss", b.loss)
        .real("erlang", b.erlang)
        .real("lb", b.lb)
        .real("ub", b.ub)
        .real("sl_upper", b.service_level_upper())
        .real("sl_lower", b.service_level_lower())
        .real("gap", b.gap())
}

pub fn measures_record(p: &SystemParams, m: &PerformanceMeasures) -> Record {
    params_record(p)
        .real("gamma", m.gamma)
        .real("L", m.l)
        .real("P", m.p)
        .real("U", m.u)
}

pub fn estimate_record(e: &SimEstimate) -> Record {
    let hw = &e.half_widths;
    Record::new()
        .real("gamma_time", e.gamma_time)
        .real("gamma_time_hw", hw.gamma_time)
        .real("gamma_lost", e.gamma_lost)
        .real("gamma_lost_hw", hw.gamma_lost)
        .real("L_hat", e.l_hat)
        .real("L_hw", hw.l)
        .real("U_hat", e.u_hat)
        .real("U_hw", hw.u)
        .real("P_hat", e.p_hat)
        .real("P_hw", hw.p)
        .uint("demands_observed", e.demands_observed)
        .uint("lost", e.lost)
        .real("duration", e.duration)
}

pub fn aggregate_record(row: &AggregateRow) -> Record {
    Record::new()
        .uint("r", row.r)
        .real("K", row.k)
        .real("avg_ub_sl_pct", row.avg_ub_sl_pct)
        .real("avg_lb_sl_pct", row.avg_lb_sl_pct)
        .real("avg_diff", row.avg_diff)
        .real("max_diff", row.max_diff)
        .real("min_diff", row.min_diff)
}

pub fn figure_record(pt: &FigurePoint) -> Record {
    Record::new()
        .uint("r", pt.r)
        .real("worst_gap", pt.worst_gap)
        .real("worst_K", pt.worst_k)
        .uint("worst_q", pt.worst_q)
}

fn check_fields(rec: Record, prefix: &str, check: Option<&IdentityCheck>) -> Record {
    // Cells without the check get NaN-free placeholders so every row has the same columns.
    let (applies, disc, tol, passed) = match check {
        Some(c) => (true, c.discrepancy, c.tolerance, c.passed),
        None => (false, 0.0, 0.0, true),
    };
    rec.flag(&format!("{prefix}_applies"), applies)
        .real(&format!("{prefix}_discrepancy"), disc)
        .real(&format!("{prefix}_tolerance"), tol)
        .flag(&format!("{prefix}_passed"), passed)
}

/// One row per verification cell, with a fixed column set.
pub fn cell_record(cell: &CellReport) -> Record {
    let rec = params_record(&cell.config.params)
        .uint("seed", cell.config.seed)
        .uint("n_demands", cell.config.n_demands);
    match &cell.outcome {
        Err(e) => rec.flag("passed", false).text("error", e.to_string().replace(',', ";")),
        Ok(c) => {
            let mut rec = rec
                .flag("passed", c.passed())
                .real("lb", c.bounds.lb)
                .real("ub", c.bounds.ub)
                .real("erlang", c.bounds.erlang)
                .extend(estimate_record(&c.estimate))
                .real("bracket_lower_margin", c.bracket.lower_margin)
                .real("bracket_upper_margin", c.bracket.upper_margin)
                .flag("bracket_passed", c.bracket.passed);
            rec = check_fields(rec, "erlang_equality", c.erlang_equality.as_ref());
            rec = check_fields(rec, "lower_equality", c.lower_equality.as_ref());
            rec = check_fields(rec, "conditioned_level", c.conditioned_level.as_ref());
            for name in ["on_order", "position", "level", "pasta"] {
                rec = check_fields(rec, name, c.theorem1.get(name));
            }
            rec
        }
    }
}
