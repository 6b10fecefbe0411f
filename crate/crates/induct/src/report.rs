//! Report tables over persisted run directories.
//!
//! Numbers are shown in percent space with one decimal; the footer holds
//! the unweighted mean of the present per-task values. Re-emitting a
//! report over the same run directories is byte-identical.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::Result;
use crate::evalrunner::load_summary;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportRow {
    pub icl_accuracy: Option<f64>,
    pub exec_accuracy: Option<f64>,
    pub ref_score: Option<f64>,
    pub n_items: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportTable {
    pub rows: BTreeMap<String, ReportRow>,
    pub footer: ReportRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<ReportFormat> {
        match s {
            "md" | "markdown" => Some(ReportFormat::Markdown),
            "csv" => Some(ReportFormat::Csv),
            _ => None,
        }
    }
}

/// Merge the summaries of one or more run directories into a single table.
/// Later runs override earlier values for the same task and metric; task
/// sets are unioned, with a warning when they differ.
pub fn build_report(run_dirs: &[&Path]) -> Result<(ReportTable, Vec<String>)> {
    let mut table = ReportTable::default();
    let mut warnings = Vec::new();
    let mut task_sets: Vec<(String, Vec<String>)> = Vec::new();

    for dir in run_dirs {
        let summary = load_summary(dir)?;
        task_sets.push((
            dir.display().to_string(),
            summary.tasks.keys().cloned().collect(),
        ));
        for (task, task_summary) in summary.tasks {
            let row = table.rows.entry(task).or_default();
            if task_summary.icl_accuracy.is_some() {
                row.icl_accuracy = task_summary.icl_accuracy;
            }
            if task_summary.exec_accuracy.is_some() {
                row.exec_accuracy = task_summary.exec_accuracy;
            }
            if task_summary.ref_score.is_some() {
                row.ref_score = task_summary.ref_score;
            }
            row.n_items = row.n_items.max(task_summary.n_items);
            row.failures += task_summary.failures;
        }
    }

    if task_sets.windows(2).any(|w| w[0].1 != w[1].1) {
        warnings.push(
            "run directories cover different task sets; reporting the union with blanks".into(),
        );
    }

    table.footer = ReportRow {
        icl_accuracy: column_mean(&table, |r| r.icl_accuracy),
        exec_accuracy: column_mean(&table, |r| r.exec_accuracy),
        ref_score: column_mean(&table, |r| r.ref_score),
        n_items: table.rows.values().map(|r| r.n_items).sum(),
        failures: table.rows.values().map(|r| r.failures).sum(),
    };
    Ok((table, warnings))
}

fn column_mean(table: &ReportTable, pick: impl Fn(&ReportRow) -> Option<f64>) -> Option<f64> {
    let values: Vec<f64> = table.rows.values().filter_map(pick).collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// A [0,1] value in percent space with one decimal ("43.6"), or blank.
fn pct(value: Option<f64>) -> String {
    value
        .map(|v| format!("{:.1}", v * 100.0))
        .unwrap_or_default()
}

pub fn render(table: &ReportTable, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => render_markdown(table),
        ReportFormat::Csv => render_csv(table),
    }
}

fn render_markdown(table: &ReportTable) -> String {
    let mut out = String::new();
    out.push_str("| task | icl_accuracy | exec_accuracy | ref_score | n | failures |\n");
    out.push_str("|---|---:|---:|---:|---:|---:|\n");
    for (task, row) in &table.rows {
        out.push_str(&format!(
            "| {task} | {} | {} | {} | {} | {} |\n",
            pct(row.icl_accuracy),
            pct(row.exec_accuracy),
            pct(row.ref_score),
            row.n_items,
            row.failures,
        ));
    }
    let f = &table.footer;
    out.push_str(&format!(
        "| **average** | {} | {} | {} | {} | {} |\n",
        pct(f.icl_accuracy),
        pct(f.exec_accuracy),
        pct(f.ref_score),
        f.n_items,
        f.failures,
    ));
    out
}

fn render_csv(table: &ReportTable) -> String {
    let mut out = String::from("task,icl_accuracy,exec_accuracy,ref_score,n,failures\n");
    for (task, row) in &table.rows {
        out.push_str(&format!(
            "{task},{},{},{},{},{}\n",
            pct(row.icl_accuracy),
            pct(row.exec_accuracy),
            pct(row.ref_score),
            row.n_items,
            row.failures,
        ));
    }
    let f = &table.footer;
    out.push_str(&format!(
        "average,{},{},{},{},{}\n",
        pct(f.icl_accuracy),
        pct(f.exec_accuracy),
        pct(f.ref_score),
        f.n_items,
        f.failures,
    ));
    out
}

/// Bar-chart data: tab-separated per-task metric values (no rendering,
/// values only).
pub fn render_chart_data(table: &ReportTable) -> String {
    let mut out = String::from("task\ticl_accuracy\texec_accuracy\tref_score\n");
    for (task, row) in &table.rows {
        out.push_str(&format!(
            "{task}\t{}\t{}\t{}\n",
            pct(row.icl_accuracy),
            pct(row.exec_accuracy),
            pct(row.ref_score),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_with(rows: &[(&str, Option<f64>, Option<f64>)]) -> ReportTable {
        let mut table = ReportTable::default();
        for (task, icl, exec) in rows {
            table.rows.insert(
                task.to_string(),
                ReportRow {
                    icl_accuracy: *icl,
                    exec_accuracy: *exec,
                    ref_score: None,
                    n_items: 100,
                    failures: 0,
                },
            );
        }
        table.footer = ReportRow {
            icl_accuracy: column_mean(&table, |r| r.icl_accuracy),
            exec_accuracy: column_mean(&table, |r| r.exec_accuracy),
            ref_score: None,
            n_items: 0,
            failures: 0,
        };
        table
    }

    #[test]
    fn markdown_and_csv_carry_identical_numbers() {
        let table = table_with(&[("sum", Some(1.0), Some(0.436)), ("diff", Some(0.95), None)]);
        let md = render(&table, ReportFormat::Markdown);
        let csv = render(&table, ReportFormat::Csv);
        for value in ["100.0", "43.6", "95.0", "97.5"] {
            assert!(md.contains(value), "markdown missing {value}:\n{md}");
            assert!(csv.contains(value), "csv missing {value}:\n{csv}");
        }
    }

    #[test]
    fn footer_of_single_task_equals_that_task() {
        let table = table_with(&[("sum", Some(0.5), Some(0.25))]);
        assert_eq!(table.footer.icl_accuracy, Some(0.5));
        assert_eq!(table.footer.exec_accuracy, Some(0.25));
    }

    #[test]
    fn percent_rounding_matches_presentation() {
        assert_eq!(pct(Some(0.43649)), "43.6");
        assert_eq!(pct(Some(1.0)), "100.0");
        assert_eq!(pct(None), "");
    }
}
