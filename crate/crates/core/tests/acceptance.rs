//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Data comes from `QCNN_DATA_DIR` (default `<workspace>/data`). The process
//! exits 0 after printing every line so the suite can live inside
//! `cargo test`; set `QCNN_ACCEPTANCE_STRICT=1` to exit 1 on any FAIL.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use common::{angle_state, c, compose, reduced, z_expectation};
use nalgebra::DVector;
use qcnn_core::circuit::layers;
use qcnn_core::datapipe::{prepare, DataPaths, DataSpec, Prepared, ReducerKind, Source};
use qcnn_core::qstate::{gate_matrix, C64};
use qcnn_core::trainer::{finite_diff_grad, multi_run, parameter_shift_grad, Aggregate, Example, TrainConfig};
use qcnn_core::{build_forward, param_count, Ansatz, Encoding, GateKind, GateSpec, NetworkConfig, Program, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(bool, String), String>;

fn data_paths() -> DataPaths {
    let root = std::env::var_os("QCNN_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"));
    DataPaths::new(root)
}

fn load(spec: &DataSpec) -> Result<Prepared, String> {
    let paths = data_paths();
    if let Some(missing) = paths.inputs(spec.source).into_iter().find(|p| !p.exists()) {
        return Err(format!("missing {}", missing.display()));
    }
    prepare(spec, &paths).map_err(|e| e.to_string())
}

fn seeds_line(agg: &Aggregate) -> String {
    agg.runs
        .iter()
        .map(|r| format!("{}:{:.4}", r.seed, r.final_accuracy))
        .collect::<Vec<_>>()
        .join(" ")
}

fn param_accounting() -> Check {
    let a1 = param_count(&NetworkConfig::binary(Encoding::Amplitude, Ansatz::A1)).map_err(|e| e.to_string())?;
    let a2 = param_count(&NetworkConfig::binary(Encoding::Amplitude, Ansatz::A2)).map_err(|e| e.to_string())?;
    let k3 = param_count(&NetworkConfig::multiclass(Encoding::Angle, Ansatz::A1, 3)).map_err(|e| e.to_string())?;
    Ok(((a1, a2, k3) == (50, 40, 53), format!("A1 binary {a1}, A2 binary {a2}, A1 3-class {k3}")))
}

fn gate_catalogue() -> Check {
    let angles = [-3.1, -1.0, -0.2, 0.0, 0.7, 1.9, 3.0, 5.0];
    let mut worst: f64 = 0.0;
    for kind in GateKind::ALL {
        let qubits = [0, 1, 2];
        let arity = 1 + kind.num_controls() + kind.num_open_controls();
        for (i, &t) in angles.iter().enumerate() {
            let a = [t, angles[(i + 3) % 8], angles[(i + 5) % 8]];
            let m = gate_matrix(&GateSpec::with_kind(kind, &qubits[..arity], &a[..kind.num_params()]));
            let d = m.adjoint() * &m - common::Dense::identity(m.nrows(), m.ncols());
            worst = d.iter().map(|x| x.norm()).fold(worst, f64::max);
        }
    }
    let mut table_errors = 0;
    let n = 4;
    let mut check = |gate: GateSpec, want: &dyn Fn(usize) -> usize| -> Result<(), String> {
        for i in 0..1usize << n {
            let mut s = StateVector::basis(n, i).map_err(|e| e.to_string())?;
            s.apply_gate(&gate).map_err(|e| e.to_string())?;
            table_errors += usize::from(s.probabilities()[want(i)] != 1.0);
        }
        Ok(())
    };
    for a in 0..n {
        for b in (0..n).filter(|&b| b != a) {
            check(GateSpec::cnot(a, b), &|i| i ^ ((i >> a & 1) << b))?;
            for t in (0..n).filter(|&t| t != a && t != b) {
                check(GateSpec::toffoli(a, b, t), &|i| i ^ ((i >> a & i >> b & 1) << t))?;
            }
        }
    }
    Ok((
        worst <= 1e-12 && table_errors == 0,
        format!("max |U^dag U - I| = {worst:.1e}, truth-table mismatches {table_errors}"),
    ))
}

fn gradient_oracle() -> Check {
    let configs = [
        NetworkConfig::binary(Encoding::Amplitude, Ansatz::A1),
        NetworkConfig::binary(Encoding::Angle, Ansatz::A2),
        NetworkConfig::multiclass(Encoding::Angle, Ansatz::A1, 3),
        NetworkConfig::iris(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut draws = 0;
    for config in &configs {
        let program = Program::build(config).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let params: Vec<f64> = (0..program.num_params()).map(|_| rng.random_range(-3.2..3.2)).collect();
            let data: Vec<(Vec<f64>, usize)> = (0..3)
                .map(|_| {
                    let x = match config.encoding {
                        Encoding::Angle => (0..config.input_len()).map(|_| rng.random_range(0.0..3.2)).collect(),
                        Encoding::Amplitude => {
                            let v: Vec<f64> = (0..256).map(|_| rng.random_range(0.0..1.0)).collect();
                            let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                            v.iter().map(|x| x / s).collect()
                        }
                    };
                    (x, rng.random_range(0..config.num_classes))
                })
                .collect();
            let batch: Vec<Example<'_>> = data.iter().map(|(x, y)| (x.as_slice(), *y)).collect();
            let (_, shift) = parameter_shift_grad(&program, &params, &batch).map_err(|e| e.to_string())?;
            let (_, fd) = finite_diff_grad(&program, &params, &batch, 1e-4).map_err(|e| e.to_string())?;
            worst = shift.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
            draws += 1;
        }
    }
    Ok((
        worst <= 1e-6,
        format!("{} configurations, {draws} draws, max |shift - fd| = {worst:.2e} (tol 1e-6)", configs.len()),
    ))
}

fn small_instance_oracle() -> Check {
    let config = NetworkConfig::iris();
    let program = Program::build(&config).map_err(|e| e.to_string())?;
    let n = config.total_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let params: Vec<f64> = (0..program.num_params()).map(|_| rng.random_range(-3.2..3.2)).collect();
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..7.0)).collect();
        let psi = compose(n, &program.ops, &params) * angle_state(&x, n);
        let got = build_forward(&config, &params, &x).map_err(|e| e.to_string())?;
        for (k, &a) in program.ancillas.iter().enumerate() {
            worst = worst.max((got[k] - z_expectation(&psi, a)).abs());
        }
    }
    Ok((worst <= 1e-10, format!("20 draws, max deviation {worst:.1e} (tol 1e-10)")))
}

fn pooling_semantics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let amps: Vec<C64> = (0..16).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<C64> = amps.iter().map(|a| a / norm).collect();
        let params: Vec<f64> = (0..2).map(|_| rng.random_range(-3.2..3.2)).collect();
        let (ops, kept) = layers::pooling_layer(&[0, 1, 2, 3], 0).map_err(|e| e.to_string())?;
        let mut state = StateVector::from_amplitudes(amps.clone()).map_err(|e| e.to_string())?;
        for op in &ops {
            state.apply_gate(&op.bind(&params)).map_err(|e| e.to_string())?;
        }
        let rho = reduced(&(compose(4, &ops, &params) * DVector::from_vec(amps)), 4, &kept);
        for (b, &q) in kept.iter().enumerate() {
            let z: f64 = (0..1 << kept.len())
                .map(|i| if i >> b & 1 == 0 { rho[(i, i)].re } else { -rho[(i, i)].re })
                .sum();
            worst = worst.max((state.expectation_z(q).map_err(|e| e.to_string())? - z).abs());
        }
    }
    Ok((worst <= 1e-10, format!("25 states, kept qubits 0,2, max deviation {worst:.1e} (tol 1e-10)")))
}

fn binary_config(seeds: std::ops::Range<u64>) -> TrainConfig {
    // only the final evaluation is scored
    TrainConfig {
        seeds: seeds.collect(),
        eval_every: 1000,
        ..TrainConfig::binary()
    }
}

fn mnist_binary() -> Check {
    let mut spec = DataSpec::images(Source::Mnist, vec![0, 1], ReducerKind::Resize16);
    spec.train_per_class = Some(2000);
    let data = load(&spec)?;
    let net = NetworkConfig::binary(Encoding::Amplitude, Ansatz::A1);
    let agg = multi_run(&net, &binary_config(0..5), &data.train, &data.test).map_err(|e| e.to_string())?;
    Ok((
        agg.mean_accuracy >= 0.97,
        format!(
            "mean {:.4} +- {:.4} over 5 seeds (need >= 0.97) [{}]",
            agg.mean_accuracy,
            agg.std_accuracy,
            seeds_line(&agg)
        ),
    ))
}

struct FashionRuns {
    with_il: Aggregate,
    without_il: Aggregate,
}

fn fashion_runs() -> Result<FashionRuns, String> {
    let data = load(&DataSpec::images(Source::FashionMnist, vec![0, 1], ReducerKind::Pca8))?;
    let net = NetworkConfig::binary(Encoding::Angle, Ansatz::A1);
    let with_il = multi_run(&net, &binary_config(0..5), &data.train, &data.test).map_err(|e| e.to_string())?;
    let without_il = multi_run(
        &net.with_interaction_layers(false),
        &binary_config(0..3),
        &data.train,
        &data.test,
    )
    .map_err(|e| e.to_string())?;
    Ok(FashionRuns { with_il, without_il })
}

fn fashion_binary(runs: &Result<FashionRuns, String>) -> Check {
    let agg = &runs.as_ref().map_err(Clone::clone)?.with_il;
    Ok((
        agg.mean_accuracy >= 0.90,
        format!(
            "mean {:.4} +- {:.4} over 5 seeds (need >= 0.90) [{}]",
            agg.mean_accuracy,
            agg.std_accuracy,
            seeds_line(agg)
        ),
    ))
}

fn interaction_ablation(runs: &Result<FashionRuns, String>) -> Check {
    let runs = runs.as_ref().map_err(Clone::clone)?;
    let shared: Vec<f64> = runs.with_il.runs[..3].iter().map(|r| r.final_accuracy).collect();
    let on = shared.iter().sum::<f64>() / 3.0;
    let off = runs.without_il.mean_accuracy;
    let gap = 100.0 * (on - off);
    Ok((
        gap >= 1.0,
        format!(
            "seeds 0-2: with {on:.4}, without {off:.4}, gap {gap:.2} pp (need >= 1.00) [without: {}]",
            seeds_line(&runs.without_il)
        ),
    ))
}

fn iris() -> Check {
    let data = load(&DataSpec::iris())?;
    let agg = multi_run(&NetworkConfig::iris(), &TrainConfig::iris(), &data.train, &data.test)
        .map_err(|e| e.to_string())?;
    Ok((
        agg.mean_accuracy >= 0.90,
        format!(
            "mean {:.4} +- {:.4} over 10 seeds (need >= 0.90) [{}]",
            agg.mean_accuracy,
            agg.std_accuracy,
            seeds_line(&agg)
        ),
    ))
}

fn report(id: u32, name: &str, started: Instant, outcome: Check) -> bool {
    let secs = started.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    println!("{} {id}. {name}: {detail} ({secs:.1}s)", if pass { "PASS" } else { "FAIL" });
    pass
}

fn main() {
    // `cargo test -- <filter>` passes a filter; an unrelated filter skips the run.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    if std::env::args().any(|a| a == "--list") {
        return;
    }

    let mut results = Vec::new();
    let t = Instant::now();
    results.push(report(1, "parameter accounting", t, param_accounting()));
    let t = Instant::now();
    results.push(report(2, "gate catalogue", t, gate_catalogue()));
    let t = Instant::now();
    results.push(report(3, "parameter-shift vs finite differences", t, gradient_oracle()));
    let t = Instant::now();
    results.push(report(4, "Iris forward vs composed matrix", t, small_instance_oracle()));
    let t = Instant::now();
    results.push(report(5, "pooling vs partial trace", t, pooling_semantics()));
    let t = Instant::now();
    results.push(report(6, "MNIST 0/1, resize + amplitude + ansatz 1", t, mnist_binary()));
    let t = Instant::now();
    let fashion = fashion_runs();
    results.push(report(7, "Fashion-MNIST 0/1, PCA + angle + ansatz 1", t, fashion_binary(&fashion)));
    results.push(report(8, "interaction-layer ablation", t, interaction_ablation(&fashion)));
    let t = Instant::now();
    results.push(report(9, "Iris 3-class", t, iris()));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    let strict = std::env::var("QCNN_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed < results.len() {
        std::process::exit(1);
    }
}
