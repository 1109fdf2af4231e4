//! Plain-text table rendering for run, clean, and evaluation reports.

use regkg_core::eval::EvalReport;
use regkg_core::graph::GraphCensus;
use regkg_core::taxonomy::group_of;
use serde::Serialize;

use crate::stages::{DegenerateRow, RunReport};

/// Left-aligned columns, two-space gutter, one header row.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let render_row = |cells: &[String]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            if i + 1 == cells.len() {
                line.push_str(cell);
            } else {
                line.push_str(cell);
                for _ in cell.chars().count()..widths[i] {
                    line.push(' ');
                }
            }
        }
        line
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    let mut out = render_row(&header_cells);
    out.push('\n');
    for row in rows {
        out.push_str(&render_row(row));
        out.push('\n');
    }
    out
}

/// The per-concept canonical Tag counts, most frequent first.
pub fn render_tag_counts(counts: &[crate::stages::TagCount]) -> String {
    let rows: Vec<Vec<String>> =
        counts.iter().map(|c| vec![c.ttype.clone(), c.count.to_string()]).collect();
    render_table(&["(Tag concept)", "counts"], &rows)
}

/// Degenerate occurrence texts with their counts, most frequent first.
pub fn render_degenerate(rows: &[DegenerateRow]) -> String {
    let cells: Vec<Vec<String>> =
        rows.iter().map(|r| vec![format!("{:?}", r.text), r.count.to_string()]).collect();
    render_table(&["(Tag text)", "counts"], &cells)
}

pub fn render_census(census: &GraphCensus) -> String {
    let mut out = String::new();
    out.push_str(&format!("nodes total  {}\n", census.nodes_total));
    out.push_str(&format!("edges total  {}\n", census.edges_total));
    let join = |map: &std::collections::BTreeMap<String, usize>| {
        map.iter().map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>().join(", ")
    };
    out.push_str(&format!("node kinds   {}\n", join(&census.node_kinds)));
    out.push_str(&format!("edge kinds   {}\n", join(&census.edge_kinds)));
    out
}

pub fn render_run_report(report: &RunReport) -> String {
    let timing_rows: Vec<Vec<String>> =
        report.stages.iter().map(|s| vec![s.stage.clone(), s.millis.to_string()]).collect();
    let mut out = String::new();
    out.push_str(&render_table(&["stage", "millis"], &timing_rows));
    out.push('\n');
    out.push_str(&render_census(&report.census));
    out.push('\n');
    out.push_str(&render_tag_counts(&report.tag_counts));
    if !report.degenerate_preview.is_empty() {
        out.push('\n');
        out.push_str(&render_degenerate(&report.degenerate_preview));
    }
    out.push('\n');
    out.push_str(&format!("dump written to {}\n", report.dump));
    out
}

/// One evaluation row in the report layout: per-tag precision, recall and
/// F1 with the gold span count and the owning model group.
#[derive(Debug, Clone, Serialize)]
pub struct EvalRow {
    pub tag: String,
    pub dataset_length: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: f64,
    pub model: String,
}

pub fn eval_rows(reports: &[EvalReport]) -> Vec<EvalRow> {
    reports
        .iter()
        .map(|r| EvalRow {
            tag: r.ttype.code().to_string(),
            dataset_length: r.tp + r.fn_,
            precision: r.precision_pct(),
            recall: r.recall_pct(),
            f1: r.f1_pct(),
            model: group_of(r.ttype).code().to_string(),
        })
        .collect()
}

fn pct(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.2}"),
        None => "-".to_string(),
    }
}

pub fn render_eval(rows: &[EvalRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.tag.clone(),
                r.dataset_length.to_string(),
                pct(r.precision),
                pct(r.recall),
                format!("{:.2}", r.f1),
                r.model.clone(),
            ]
        })
        .collect();
    render_table(&["Tag", "Dataset length", "Precision", "Recall", "F1", "Model"], &cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use regkg_core::taxonomy::TagType;

    #[test]
    fn table_columns_align() {
        let rendered = render_table(
            &["a", "bb"],
            &[vec!["wide cell".into(), "1".into()], vec!["x".into(), "22".into()]],
        );
        let lines: Vec<&str> = rendered.lines().collect();
        assert_eq!(lines[0], "a          bb");
        assert_eq!(lines[1], "wide cell  1");
        assert_eq!(lines[2], "x          22");
    }

    #[test]
    fn eval_row_reproduces_known_metrics() {
        let report = EvalReport::from_counts(TagType::Perm, 2, 1, 0);
        let rows = eval_rows(&[report]);
        assert_eq!(rows[0].tag, "PERM");
        assert_eq!(rows[0].dataset_length, 2);
        assert_eq!(rows[0].precision, Some(66.67));
        assert_eq!(rows[0].recall, Some(100.0));
        assert_eq!(rows[0].f1, 80.0);
        assert_eq!(rows[0].model, "PERM");
        let rendered = render_eval(&rows);
        assert!(rendered.contains("66.67"), "{rendered}");
        assert!(rendered.contains("80.00"), "{rendered}");
    }

    #[test]
    fn risk_rows_carry_their_model_group() {
        let report = EvalReport::from_counts(TagType::Risk, 1, 0, 0);
        let rows = eval_rows(&[report]);
        assert_eq!(rows[0].model, "RISK_MIT");
    }

    #[test]
    fn degenerate_rows_render_quoted() {
        let rows = vec![
            DegenerateRow { text: "unless".into(), count: 75 },
            DegenerateRow { text: "c)".into(), count: 25 },
        ];
        let rendered = render_degenerate(&rows);
        let lines: Vec<&str> = rendered.lines().collect();
        assert_eq!(lines[0], "(Tag text)  counts");
        assert_eq!(lines[1], "\"unless\"    75");
        assert_eq!(lines[2], "\"c)\"        25");
    }
}
