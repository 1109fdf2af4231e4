//! Span-level evaluation: exact or overlap matching, per-type reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::taggers::SpanTag;
use crate::taxonomy::TagType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Exact,
    Overlap,
}

impl std::str::FromStr for MatchMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "exact" => Ok(MatchMode::Exact),
            "overlap" => Ok(MatchMode::Overlap),
            other => Err(crate::error::Error::Invalid(format!(
                "unknown match mode {other:?}; expected exact or overlap"
            ))),
        }
    }
}

/// Per-type counts and derived metrics. `precision`/`recall` are `None`
/// when their denominator is zero (no predictions / no gold).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub ttype: TagType,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: f64,
}

impl EvalReport {
    pub fn from_counts(ttype: TagType, tp: usize, fp: usize, fn_: usize) -> EvalReport {
        let precision = (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64);
        let recall = (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => 2.0 * p * r / (p + r),
            _ => 0.0,
        };
        EvalReport { ttype, tp, fp, fn_, precision, recall, f1 }
    }

    pub fn precision_pct(&self) -> Option<f64> {
        self.precision.map(to_pct)
    }

    pub fn recall_pct(&self) -> Option<f64> {
        self.recall.map(to_pct)
    }

    pub fn f1_pct(&self) -> f64 {
        to_pct(self.f1)
    }
}

/// Fraction to percentage, rounded half-up to 2 decimals. `f64::round`
/// rounds halves away from zero, which is half-up for the non-negative
/// values used here (the format machinery would round halves to even).
pub fn to_pct(fraction: f64) -> f64 {
    (fraction * 10_000.0).round() / 100.0
}

fn overlaps(a: &SpanTag, b: &SpanTag) -> bool {
    a.para_id == b.para_id && a.start < b.end && b.start < a.end
}

fn count_matches(gold: &[&SpanTag], predicted: &[&SpanTag], mode: MatchMode) -> usize {
    let mut consumed = vec![false; gold.len()];
    let mut tp = 0;
    for pred in predicted {
        let hit = gold.iter().enumerate().position(|(gi, g)| {
            !consumed[gi]
                && match mode {
                    MatchMode::Exact => {
                        g.para_id == pred.para_id && g.start == pred.start && g.end == pred.end
                    }
                    MatchMode::Overlap => overlaps(g, pred),
                }
        });
        if let Some(gi) = hit {
            consumed[gi] = true;
            tp += 1;
        }
    }
    tp
}

fn by_position(spans: &[SpanTag], ttype: TagType) -> Vec<&SpanTag> {
    let mut filtered: Vec<&SpanTag> = spans.iter().filter(|s| s.ttype == ttype).collect();
    filtered.sort_by(|a, b| {
        a.para_id.cmp(&b.para_id).then(a.start.cmp(&b.start)).then(a.end.cmp(&b.end))
    });
    filtered
}

/// Evaluate predicted spans against gold, one report per tag type present
/// in either list. Matching is greedy in position order; each gold span is
/// consumed at most once.
pub fn evaluate_spans(gold: &[SpanTag], predicted: &[SpanTag], mode: MatchMode) -> Vec<EvalReport> {
    let mut types: BTreeMap<TagType, ()> = BTreeMap::new();
    for s in gold.iter().chain(predicted) {
        types.insert(s.ttype, ());
    }
    types
        .into_keys()
        .map(|ttype| {
            let g = by_position(gold, ttype);
            let p = by_position(predicted, ttype);
            let tp = count_matches(&g, &p, mode);
            EvalReport::from_counts(ttype, tp, p.len() - tp, g.len() - tp)
        })
        .collect()
}
