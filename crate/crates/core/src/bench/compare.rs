//! Method-vs-method summary recomputed from run reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::runner::median;
use super::tables::best_classifier;
use super::BenchError;
use crate::classifiers::ClassifierKind;
use crate::dataset::Task;
use crate::metrics::{round2, EvalReport};
use crate::reduction::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Selection,
    Extraction,
    Tie,
}

impl Verdict {
    /// Winner when higher is better. Values equal at two decimals tie.
    fn higher(selection: f64, extraction: f64) -> Self {
        let (s, e) = (round2(selection), round2(extraction));
        if s > e {
            Verdict::Selection
        } else if e > s {
            Verdict::Extraction
        } else {
            Verdict::Tie
        }
    }

    fn lower(selection: f64, extraction: f64) -> Self {
        if selection < extraction {
            Verdict::Selection
        } else if extraction < selection {
            Verdict::Extraction
        } else {
            Verdict::Tie
        }
    }

    fn lower_rounded(selection: f64, extraction: f64) -> Self {
        Self::lower(round2(selection), round2(extraction))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestCell {
    pub classifier: ClassifierKind,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KComparison {
    pub k: usize,
    pub selection: BestCell,
    pub extraction: BestCell,
    pub f1_winner: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskComparison {
    pub task: Task,
    /// Ascending K, only K values both methods were run at.
    pub per_k: Vec<KComparison>,
    pub higher_f1_at_smallest_k: Verdict,
    pub higher_f1_at_largest_k: Verdict,
    /// Max minus min of the best F1 across K.
    pub selection_f1_range: f64,
    pub extraction_f1_range: f64,
    pub less_sensitive_to_k: Verdict,
    /// Median over every run of the method, seconds.
    pub selection_median_training_time: f64,
    pub extraction_median_training_time: f64,
    pub lower_training_time: Verdict,
    /// Median over every run of the method, microseconds per sample.
    pub selection_median_inference_time: f64,
    pub extraction_median_inference_time: f64,
    pub lower_inference_time: Verdict,
    /// Highest mean F1 across K.
    pub selection_best_classifier: ClassifierKind,
    pub extraction_best_classifier: ClassifierKind,
}

impl TaskComparison {
    pub fn at_k(&self, k: usize) -> Option<&KComparison> {
        self.per_k.iter().find(|c| c.k == k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub tasks: Vec<TaskComparison>,
}

impl ComparisonSummary {
    pub fn task(&self, task: Task) -> Option<&TaskComparison> {
        self.tasks.iter().find(|t| t.task == task)
    }

    pub fn render_markdown(&self) -> String {
        let mut s = String::new();
        for t in &self.tasks {
            let _ = writeln!(s, "## {}\n", t.task);
            let _ = writeln!(s, "| K | Selection best | F1 | Extraction best | F1 | Winner |");
            let _ = writeln!(s, "|---|---|---|---|---|---|");
            for c in &t.per_k {
                let _ = writeln!(
                    s,
                    "| {} | {} | {:.2} | {} | {:.2} | {:?} |",
                    c.k,
                    c.selection.classifier.display_name(),
                    c.selection.f1,
                    c.extraction.classifier.display_name(),
                    c.extraction.f1,
                    c.f1_winner
                );
            }
            let _ = writeln!(s);
            let _ = writeln!(s, "| Property | Selection | Extraction | Verdict |");
            let _ = writeln!(s, "|---|---|---|---|");
            let rows = [
                ("Higher F1 at smallest K", String::new(), String::new(), t.higher_f1_at_smallest_k),
                ("Higher F1 at largest K", String::new(), String::new(), t.higher_f1_at_largest_k),
                (
                    "Less sensitive to K (F1 range)",
                    format!("{:.2}", t.selection_f1_range),
                    format!("{:.2}", t.extraction_f1_range),
                    t.less_sensitive_to_k,
                ),
                (
                    "Lower training time (median s)",
                    format!("{:.4}", t.selection_median_training_time),
                    format!("{:.4}", t.extraction_median_training_time),
                    t.lower_training_time,
                ),
                (
                    "Lower inference time (median μs)",
                    format!("{:.2}", t.selection_median_inference_time),
                    format!("{:.2}", t.extraction_median_inference_time),
                    t.lower_inference_time,
                ),
                (
                    "Best classifier",
                    t.selection_best_classifier.display_name().to_string(),
                    t.extraction_best_classifier.display_name().to_string(),
                    Verdict::Tie,
                ),
            ];
            for (name, a, b, v) in rows {
                let v = if name == "Best classifier" { String::new() } else { format!("{v:?}") };
                let _ = writeln!(s, "| {name} | {a} | {b} | {v} |");
            }
            let _ = writeln!(s);
        }
        s
    }
}

/// Builds the summary. Every task present must have both methods at two or
/// more common K values; runs without reduction are ignored.
pub fn compare_runs(reports: &[EvalReport]) -> Result<ComparisonSummary, BenchError> {
    if reports.is_empty() {
        return Err(BenchError::NoReports);
    }
    let tasks: BTreeSet<Task> = reports
        .iter()
        .filter(|r| r.label.method != Method::None)
        .map(|r| r.label.task)
        .collect();
    if tasks.is_empty() {
        return Err(BenchError::InsufficientCoverage("no selection or extraction runs".into()));
    }
    let mut out = Vec::new();
    for task in tasks {
        out.push(compare_task(task, reports)?);
    }
    Ok(ComparisonSummary { tasks: out })
}

fn compare_task(task: Task, reports: &[EvalReport]) -> Result<TaskComparison, BenchError> {
    let mut by: BTreeMap<(Method, usize), Vec<&EvalReport>> = BTreeMap::new();
    for r in reports.iter().filter(|r| r.label.task == task) {
        by.entry((r.label.method, r.label.k)).or_default().push(r);
    }
    let ks: Vec<usize> = by
        .keys()
        .filter(|(m, _)| *m == Method::Selection)
        .map(|&(_, k)| k)
        .filter(|k| by.contains_key(&(Method::Extraction, *k)))
        .collect();
    if ks.len() < 2 {
        return Err(BenchError::InsufficientCoverage(format!(
            "{task}: need both methods at two or more K values, have {}",
            ks.len()
        )));
    }

    let best = |m: Method, k: usize| -> BestCell {
        // highest F1; earlier classifier wins ties
        let mut cells = by[&(m, k)].clone();
        cells.sort_by_key(|r| r.label.classifier);
        let mut top = cells[0];
        for r in &cells[1..] {
            if r.f1 > top.f1 {
                top = r;
            }
        }
        BestCell {
            classifier: top.label.classifier,
            f1: top.f1,
        }
    };
    let per_k: Vec<KComparison> = ks
        .iter()
        .map(|&k| {
            let (s, e) = (best(Method::Selection, k), best(Method::Extraction, k));
            KComparison {
                k,
                f1_winner: Verdict::higher(s.f1, e.f1),
                selection: s,
                extraction: e,
            }
        })
        .collect();

    let range = |pick: fn(&KComparison) -> f64| {
        let v: Vec<f64> = per_k.iter().map(pick).collect();
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let selection_f1_range = range(|c| c.selection.f1);
    let extraction_f1_range = range(|c| c.extraction.f1);

    let runs = |m: Method| -> Vec<&EvalReport> {
        ks.iter().flat_map(|&k| by[&(m, k)].iter().copied()).collect()
    };
    let (sel, ext) = (runs(Method::Selection), runs(Method::Extraction));
    let med = |rs: &[&EvalReport], f: fn(&EvalReport) -> f64| median(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
    let selection_median_training_time = med(&sel, |r| r.timing.training_time);
    let extraction_median_training_time = med(&ext, |r| r.timing.training_time);
    let selection_median_inference_time = med(&sel, |r| r.timing.inference_time_per_sample);
    let extraction_median_inference_time = med(&ext, |r| r.timing.inference_time_per_sample);

    Ok(TaskComparison {
        task,
        higher_f1_at_smallest_k: per_k[0].f1_winner,
        higher_f1_at_largest_k: per_k[per_k.len() - 1].f1_winner,
        less_sensitive_to_k: Verdict::lower_rounded(selection_f1_range, extraction_f1_range),
        selection_f1_range,
        extraction_f1_range,
        lower_training_time: Verdict::lower(selection_median_training_time, extraction_median_training_time),
        lower_inference_time: Verdict::lower(selection_median_inference_time, extraction_median_inference_time),
        selection_median_training_time,
        extraction_median_training_time,
        selection_median_inference_time,
        extraction_median_inference_time,
        selection_best_classifier: best_classifier(&sel).expect("non-empty"),
        extraction_best_classifier: best_classifier(&ext).expect("non-empty"),
        per_k,
    })
}
