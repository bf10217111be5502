use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcnn_cli::commands;
use qcnn_cli::{CliError, ExperimentConfig, Overrides};
use qcnn_core::datapipe::ReducerKind;
use qcnn_core::trainer::ShiftRules;
use qcnn_core::{Ansatz, Encoding};

#[derive(Parser)]
#[command(name = "qcnn", version, about = "Quantum convolutional network experiments on a simulated statevector")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load, reduce and cache the dataset.
    Prepare(Common),
    /// Train every configured seed and write metrics, parameters and a summary.
    Train(Common),
    /// Score saved parameters on the test split.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Parameter file written by `train` (default: <out>/params_seed<first seed>.json).
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Compare parameter-shift gradients with central finite differences.
    Gradcheck {
        #[command(flatten)]
        common: Common,
        /// Replace the two-term shift coefficient (negative-control fixture).
        #[arg(long, hide = true)]
        corrupt_shift: Option<f64>,
    },
    /// Print the gate program and the per-layer parameter table.
    Describe(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, replaces `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run this single seed instead of `training.seeds`.
    #[arg(long)]
    seed_override: Option<u64>,
    #[arg(long)]
    no_interaction_layers: bool,
    #[arg(long, value_enum)]
    ansatz: Option<AnsatzArg>,
    #[arg(long, value_enum)]
    encoding: Option<EncodingArg>,
    #[arg(long, value_enum)]
    reducer: Option<ReducerArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnsatzArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Amplitude,
    Angle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReducerArg {
    Resize,
    Pca,
    Autoencoder,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            out: self.out.clone(),
            seed: self.seed_override,
            no_interaction_layers: self.no_interaction_layers,
            ansatz: self.ansatz.map(|a| match a {
                AnsatzArg::One => Ansatz::A1,
                AnsatzArg::Two => Ansatz::A2,
            }),
            encoding: self.encoding.map(|e| match e {
                EncodingArg::Amplitude => Encoding::Amplitude,
                EncodingArg::Angle => Encoding::Angle,
            }),
            reducer: self.reducer.map(|r| match r {
                ReducerArg::Resize => ReducerKind::Resize16,
                ReducerArg::Pca => ReducerKind::Pca8,
                ReducerArg::Autoencoder => ReducerKind::Autoencoder8,
            }),
        });
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Prepare(c) => commands::prepare(&c.load()?),
        Command::Train(c) => Ok(commands::train(&c.load()?)?.report),
        Command::Eval { common, params } => {
            let cfg = common.load()?;
            let path = params.unwrap_or_else(|| commands::default_params_path(&cfg));
            Ok(commands::eval(&cfg, &path)?.1)
        }
        Command::Gradcheck { common, corrupt_shift } => {
            let mut rules = ShiftRules::default();
            if let Some(c) = corrupt_shift {
                rules.two_term = c;
            }
            commands::gradcheck(&common.load()?, &rules)
        }
        Command::Describe(c) => commands::describe(&c.load()?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version are not errors; bad arguments are validation failures
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Numeric(report) => {
                    print!("{report}");
                    eprintln!("error: numeric check failed");
                }
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
