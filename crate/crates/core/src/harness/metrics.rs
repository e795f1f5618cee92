//! Minority-class F1, per-seed results and their mean ± std aggregation.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DataError;

/// Binary confusion counts with respect to a chosen positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    /// Counts with `positive` as the class of interest.
    pub fn from_labels(predicted: &[u8], truth: &[u8], positive: u8) -> Self {
        assert_eq!(predicted.len(), truth.len());
        let mut c = Confusion::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p == positive, t == positive) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    /// `2tp / (2tp + fp + fn)`; 1.0 when the class never occurs and is never predicted.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            1.0
        } else {
            (2 * self.tp) as f64 / denom as f64
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Rarer class given the positive ratio on the training split (label 1 on ties).
pub fn minority_class(positive_ratio: f64) -> u8 {
    if positive_ratio > 0.5 {
        0
    } else {
        1
    }
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Outcome of training one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub test_f1: Vec<f64>,
    pub val_f1: Vec<f64>,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub final_train_loss: f64,
    pub loss_curve: Vec<f64>,
    pub val_curve: Vec<f64>,
    pub runtime_secs: f64,
    pub diverged: Option<String>,
}

/// Per-task minority F1 aggregated over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub variant: String,
    pub tasks: Vec<String>,
    pub mean_f1: Vec<f64>,
    pub std_f1: Vec<f64>,
    pub seeds: Vec<SeedResult>,
    pub config_hash: String,
    pub runtime_secs: f64,
}

impl MetricsReport {
    /// Aggregates the non-diverged seeds.
    pub fn aggregate(
        variant: String,
        tasks: Vec<String>,
        seeds: Vec<SeedResult>,
        config_hash: String,
    ) -> Self {
        let ok: Vec<&SeedResult> = seeds.iter().filter(|s| s.diverged.is_none()).collect();
        let (mut mean_f1, mut std_f1) = (Vec::new(), Vec::new());
        for t in 0..tasks.len() {
            let xs: Vec<f64> = ok.iter().map(|s| s.test_f1[t]).collect();
            let (m, s) = mean_std(&xs);
            mean_f1.push(m);
            std_f1.push(s);
        }
        let runtime_secs = seeds.iter().map(|s| s.runtime_secs).sum();
        Self {
            variant,
            tasks,
            mean_f1,
            std_f1,
            seeds,
            config_hash,
            runtime_secs,
        }
    }

    pub fn task_mean(&self, task: &str) -> Option<f64> {
        self.tasks
            .iter()
            .position(|t| t == task)
            .map(|i| self.mean_f1[i])
    }

    /// Mean over tasks of the per-task mean F1.
    pub fn overall_mean(&self) -> f64 {
        mean_std(&self.mean_f1).0
    }
}

/// Rows = model variants, columns = tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub tasks: Vec<String>,
    pub rows: Vec<MetricsReport>,
}

impl MetricsTable {
    pub fn new(tasks: Vec<String>) -> Self {
        Self {
            tasks,
            rows: Vec::new(),
        }
    }

    /// CSV with a `variant` column then one mean-F1 column per task, 4 decimals.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["variant".to_string()];
        header.extend(self.tasks.iter().cloned());
        out.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.variant.clone()];
            rec.extend(row.mean_f1.iter().map(|x| format!("{x:.4}")));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory csv");
        String::from_utf8(buf).expect("utf8")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

/// Writes `table` as CSV (means, 4 decimals) or JSON (lossless, per-seed detail).
pub fn export_metrics(
    table: &MetricsTable,
    path: &Path,
    format: ExportFormat,
) -> Result<(), DataError> {
    match format {
        ExportFormat::Json => crate::io::write_json(path, table),
        ExportFormat::Csv => {
            std::fs::write(path, table.to_csv_string()).map_err(|source| DataError::Io {
                path: path.display().to_string(),
                source,
            })
        }
    }
}
