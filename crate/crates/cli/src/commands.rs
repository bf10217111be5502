use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qcnn_core::circuit::ParamLayout;
use qcnn_core::datapipe::{prepare_cached, Prepared};
use qcnn_core::trainer::metrics::{write_run_csv, write_summary, write_trajectory_csv};
use qcnn_core::trainer::{
    aggregate, evaluate, gradcheck as run_gradcheck, multi_run, train_run, Aggregate, Evaluation,
    Example, ShiftRules,
};
use qcnn_core::{Encoding, NetworkConfig, Program};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Trained angles as written by `train` and read by `eval`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub layout_hash: String,
    pub param_count: usize,
    pub seed: Option<u64>,
    pub values: Vec<f64>,
    #[serde(default)]
    pub config: Option<serde_json::Value>,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

fn create_out(cfg: &ExperimentConfig) -> Result<&Path, CliError> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| io_err(&cfg.out_dir, e))?;
    Ok(&cfg.out_dir)
}

fn load_data(cfg: &ExperimentConfig) -> Result<(Prepared, bool), CliError> {
    Ok(prepare_cached(&cfg.data, &cfg.paths(), &cfg.cache_dir())?)
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let started = Instant::now();
    let (p, hit) = load_data(cfg)?;
    Ok(format!(
        "{}: {} train / {} test rows of length {} in {} ({:.1}s)\n",
        if hit { "cache hit" } else { "prepared" },
        p.train.len(),
        p.test.len(),
        cfg.data.feature_len(),
        cfg.cache_dir().display(),
        started.elapsed().as_secs_f64()
    ))
}

pub struct TrainOutcome {
    pub aggregate: Aggregate,
    pub report: String,
}

pub fn train(cfg: &ExperimentConfig) -> Result<TrainOutcome, CliError> {
    cfg.validate()?;
    let out = create_out(cfg)?;
    let (data, hit) = load_data(cfg)?;
    log::info!("data {}: {} train, {} test", if hit { "from cache" } else { "prepared" }, data.train.len(), data.test.len());

    let started = Instant::now();
    let seeds = &cfg.training.seeds;
    let agg = if seeds.len() >= 2 {
        multi_run(&cfg.network, &cfg.training, &data.train, &data.test)?
    } else {
        aggregate(vec![train_run(&cfg.network, &cfg.training, &data.train, &data.test, seeds[0])?])
    };
    let wall = started.elapsed().as_secs_f64();

    let echo = format!("config: {}", cfg.echo());
    let layout = ParamLayout::for_config(&cfg.network)?;
    let config_value = serde_json::to_value(cfg).expect("config serializes");
    let mut report = String::new();
    for run in &agg.runs {
        let k = run.seed;
        write_run_csv(&out.join(format!("metrics_seed{k}.csv")), run, Some(&echo))?;
        if run.trajectory.is_some() {
            write_trajectory_csv(&out.join(format!("trajectory_seed{k}.csv")), run, Some(&echo))?;
        }
        write_json(
            &out.join(format!("params_seed{k}.json")),
            &ParamsFile {
                layout_hash: layout.hash(),
                param_count: layout.len(),
                seed: Some(k),
                values: run.final_params.clone(),
                config: Some(config_value.clone()),
            },
        )?;
        let _ = writeln!(
            report,
            "seed {k}: final accuracy {:.4} (best {:.4}), train loss {:.4} -> {:.4}",
            run.final_accuracy, run.best_accuracy, run.initial_train_loss, run.final_train_loss
        );
    }
    write_summary(&out.join("summary.json"), cfg, &cfg.network, &cfg.training, &agg, wall)?;
    let _ = writeln!(
        report,
        "{} parameters, {} seed(s): mean final accuracy {:.4} +- {:.4} ({wall:.1}s) -> {}",
        layout.len(),
        agg.runs.len(),
        agg.mean_accuracy,
        agg.std_accuracy,
        out.display()
    );
    Ok(TrainOutcome { aggregate: agg, report })
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    config: &'a ExperimentConfig,
    params_file: &'a Path,
    seed: Option<u64>,
    test_rows: usize,
    #[serde(flatten)]
    evaluation: &'a Evaluation,
}

pub fn eval(cfg: &ExperimentConfig, params_path: &Path) -> Result<(Evaluation, String), CliError> {
    cfg.validate()?;
    let text = fs::read_to_string(params_path).map_err(|e| io_err(params_path, e))?;
    let params: ParamsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", params_path.display())))?;
    let layout = ParamLayout::for_config(&cfg.network)?;
    if params.layout_hash != layout.hash() || params.values.len() != layout.len() {
        return Err(CliError::Validation(format!(
            "{} was saved for a different network layout ({} parameters, hash {}); this config has {} parameters, hash {}",
            params_path.display(),
            params.values.len(),
            short(&params.layout_hash),
            layout.len(),
            short(&layout.hash())
        )));
    }
    let program = Program::build(&cfg.network)?;
    let (data, _) = load_data(cfg)?;
    let e = evaluate(&program, &params.values, &data.test)?;

    let out = create_out(cfg)?;
    let stem = params_path.file_stem().and_then(|s| s.to_str()).unwrap_or("params");
    let target = out.join(format!("eval_{stem}.json"));
    write_json(
        &target,
        &EvalOutput {
            config: cfg,
            params_file: params_path,
            seed: params.seed,
            test_rows: data.test.len(),
            evaluation: &e,
        },
    )?;

    let mut report = format!("test accuracy {:.4}, mean loss {:.4} over {} rows\n", e.accuracy, e.loss, data.test.len());
    report.push_str("confusion (rows true, columns predicted):\n");
    for row in &e.confusion {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>6}")).collect();
        let _ = writeln!(report, "{}", cells.join(""));
    }
    let _ = writeln!(report, "written to {}", target.display());
    Ok((e, report))
}

fn short(hash: &str) -> &str {
    &hash[..hash.len().min(12)]
}

/// Random inputs shaped for the network's encoder.
fn random_inputs(net: &NetworkConfig, rng: &mut ChaCha8Rng, n: usize) -> Vec<(Vec<f64>, usize)> {
    (0..n)
        .map(|_| {
            let x = match net.encoding {
                Encoding::Angle => (0..net.input_len()).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect(),
                Encoding::Amplitude => {
                    let v: Vec<f64> = (0..net.input_len()).map(|_| rng.random_range(0.0..1.0)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.iter().map(|x| x / norm).collect()
                }
            };
            (x, rng.random_range(0..net.num_classes))
        })
        .collect()
}

/// Parameter shift against central differences at random angles and inputs.
pub fn gradcheck(cfg: &ExperimentConfig, rules: &ShiftRules) -> Result<String, CliError> {
    cfg.validate()?;
    let g = &cfg.gradcheck;
    let program = Program::build(&cfg.network)?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let params: Vec<f64> = (0..program.num_params())
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    let data = random_inputs(&cfg.network, &mut rng, g.samples);
    let batch: Vec<Example<'_>> = data.iter().map(|(x, y)| (x.as_slice(), *y)).collect();
    let report = run_gradcheck(&program, &params, &batch, rules, g.step, g.tolerance)?;
    let text = report.render();
    if report.passed() {
        Ok(text)
    } else {
        Err(CliError::Numeric(text))
    }
}

pub fn describe(cfg: &ExperimentConfig) -> Result<String, CliError> {
    cfg.network.validate()?;
    let program = Program::build(&cfg.network)?;
    let mut s = program.describe();
    let _ = writeln!(s, "layout hash {}", ParamLayout::for_config(&cfg.network)?.hash());
    Ok(s)
}

/// `<out>/params_seed<k>.json` for the first configured seed.
pub fn default_params_path(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out_dir.join(format!("params_seed{}.json", cfg.training.seeds.first().copied().unwrap_or(0)))
}
