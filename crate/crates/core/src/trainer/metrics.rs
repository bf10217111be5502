//! Metric files: one CSV per run, an optional parameter trajectory CSV and a
//! JSON summary per experiment.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use super::run::{Aggregate, RunMetrics, TrainConfig};
use crate::circuit::NetworkConfig;
use crate::error::{Error, Result};

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

/// CSV writer that starts the file with `# <comment>` when one is given
/// (config echo; pandas reads it with `comment="#"`).
fn open_csv(path: &Path, comment: Option<&str>) -> Result<csv::Writer<fs::File>> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    if let Some(c) = comment {
        if c.contains('\n') {
            return Err(Error::Usage("CSV comment must be a single line".into()));
        }
        writeln!(file, "# {c}").map_err(|e| Error::io(path, e))?;
    }
    Ok(csv::Writer::from_writer(file))
}

/// Columns `iteration,train_loss,test_loss,test_accuracy`, one row per
/// iteration from 0. Cells are empty where nothing was measured.
pub fn write_run_csv(path: &Path, run: &RunMetrics, comment: Option<&str>) -> Result<()> {
    let mut w = open_csv(path, comment)?;
    w.write_record(["iteration", "train_loss", "test_loss", "test_accuracy"])
        .map_err(|e| csv_err(path, e))?;
    let mut evals = run.evals.iter().peekable();
    for it in 0..=run.train_loss.len() {
        let train = if it == 0 {
            String::new()
        } else {
            run.train_loss[it - 1].to_string()
        };
        let (loss, acc) = match evals.next_if(|e| e.iteration == it) {
            Some(e) => (e.test_loss.to_string(), e.test_accuracy.to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([it.to_string(), train, loss, acc])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Columns `iteration,p0,p1,...`. Fails if the run kept no trajectory.
pub fn write_trajectory_csv(path: &Path, run: &RunMetrics, comment: Option<&str>) -> Result<()> {
    let traj = run
        .trajectory
        .as_ref()
        .ok_or_else(|| Error::Usage("run was trained without trajectory recording".into()))?;
    let mut w = open_csv(path, comment)?;
    let n = traj.first().map_or(0, Vec::len);
    let mut header = vec!["iteration".to_string()];
    header.extend((0..n).map(|i| format!("p{i}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (it, p) in traj.iter().enumerate() {
        let mut row = vec![it.to_string()];
        row.extend(p.iter().map(f64::to_string));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct SeedSummary {
    seed: u64,
    final_accuracy: f64,
    best_accuracy: f64,
    initial_train_loss: f64,
    final_train_loss: f64,
    final_confusion: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct Summary<'a, X: Serialize> {
    config: &'a X,
    network: &'a NetworkConfig,
    training: &'a TrainConfig,
    param_count: usize,
    layout_hash: String,
    seeds: Vec<u64>,
    per_seed: Vec<SeedSummary>,
    mean_accuracy: f64,
    std_accuracy: f64,
    mean_best_accuracy: f64,
    wall_time_seconds: f64,
}

/// Summary JSON. `config` is echoed verbatim next to the resolved network and
/// training settings.
pub fn write_summary<X: Serialize>(
    path: &Path,
    config: &X,
    network: &NetworkConfig,
    training: &TrainConfig,
    agg: &Aggregate,
    wall_time_seconds: f64,
) -> Result<()> {
    let layout = crate::circuit::ParamLayout::for_config(network)?;
    let summary = Summary {
        config,
        network,
        training,
        param_count: layout.len(),
        layout_hash: layout.hash(),
        seeds: agg.runs.iter().map(|r| r.seed).collect(),
        per_seed: agg
            .runs
            .iter()
            .map(|r| SeedSummary {
                seed: r.seed,
                final_accuracy: r.final_accuracy,
                best_accuracy: r.best_accuracy,
                initial_train_loss: r.initial_train_loss,
                final_train_loss: r.final_train_loss,
                final_confusion: r.final_confusion.clone(),
            })
            .collect(),
        mean_accuracy: agg.mean_accuracy,
        std_accuracy: agg.std_accuracy,
        mean_best_accuracy: agg.mean_best_accuracy,
        wall_time_seconds,
    };
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Usage(format!("cannot serialize summary: {e}")))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::run::EvalRecord;

    fn run() -> RunMetrics {
        RunMetrics {
            seed: 4,
            train_loss: vec![0.9, 0.8, 0.7],
            evals: vec![
                EvalRecord { iteration: 0, test_loss: 1.0, test_accuracy: 0.25 },
                EvalRecord { iteration: 2, test_loss: 0.75, test_accuracy: 0.5 },
                EvalRecord { iteration: 3, test_loss: 0.5, test_accuracy: 0.75 },
            ],
            initial_train_loss: 1.0,
            final_train_loss: 0.7,
            final_accuracy: 0.75,
            best_accuracy: 0.75,
            final_confusion: vec![vec![1, 0], vec![1, 2]],
            final_params: vec![0.1, 0.2],
            trajectory: Some(vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![0.1, 0.1], vec![0.1, 0.2]]),
        }
    }

    #[test]
    fn run_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        write_run_csv(&p, &run(), None).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(
            text,
            "iteration,train_loss,test_loss,test_accuracy\n0,,1,0.25\n1,0.9,,\n2,0.8,0.75,0.5\n3,0.7,0.5,0.75\n"
        );
        write_run_csv(&p, &run(), Some("config: {\"a\":1}")).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# config: {\"a\":1}\niteration,"));
        assert!(write_run_csv(&p, &run(), Some("two\nlines")).is_err());
    }

    #[test]
    fn trajectory_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_trajectory_csv(&p, &run(), None).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("iteration,p0,p1\n0,0,0\n1,0.1,0\n"));
        let mut r = run();
        r.trajectory = None;
        assert!(write_trajectory_csv(&p, &r, None).is_err());
    }
}
