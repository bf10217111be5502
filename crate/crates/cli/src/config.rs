use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use qcnn_core::datapipe::{DataPaths, DataSpec, ReducerKind, Source};
use qcnn_core::trainer::TrainConfig;
use qcnn_core::{Ansatz, Encoding, NetworkConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One experiment: data, architecture, optimizer settings and where files go.
///
/// Relative paths are resolved against the directory holding the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub data: DataSpec,
    pub network: NetworkConfig,
    pub training: TrainConfig,
    #[serde(default = "default_data_dir")]
    pub data_dir: PathBuf,
    /// Defaults to `<out_dir>/cache`.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub gradcheck: GradcheckOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradcheckOptions {
    pub samples: usize,
    pub seed: u64,
    pub step: f64,
    pub tolerance: f64,
}

impl Default for GradcheckOptions {
    fn default() -> Self {
        GradcheckOptions {
            samples: 4,
            seed: 0,
            step: 1e-4,
            tolerance: 1e-6,
        }
    }
}

fn default_data_dir() -> PathBuf {
    PathBuf::from("data")
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("runs/experiment")
}

/// Command-line replacements for individual fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub no_interaction_layers: bool,
    pub ansatz: Option<Ansatz>,
    pub encoding: Option<Encoding>,
    pub reducer: Option<ReducerKind>,
}

/// A validation failure tied to a dotted field path.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn field(path: &str, message: impl Into<String>) -> FieldError {
    FieldError {
        path: path.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Parse JSON, reporting the path of the offending field on failure.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Validation(format!("config field {path}: {}", e.inner()))
        })
    }

    /// Read a config file and make its relative paths absolute.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.data_dir = base.join(&cfg.data_dir);
        cfg.out_dir = base.join(&cfg.out_dir);
        cfg.cache_dir = cfg.cache_dir.map(|c| base.join(c));
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.out_dir = out.clone();
        }
        if let Some(seed) = o.seed {
            self.training.seeds = vec![seed];
        }
        if o.no_interaction_layers {
            self.network.interaction_layers_enabled = false;
        }
        if let Some(a) = o.ansatz {
            self.network.ansatz = a;
        }
        if let Some(e) = o.encoding {
            self.network.encoding = e;
        }
        if let Some(r) = o.reducer {
            self.data.reducer = Some(r);
        }
    }

    pub fn paths(&self) -> DataPaths {
        DataPaths::new(&self.data_dir)
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir.clone().unwrap_or_else(|| self.out_dir.join("cache"))
    }

    /// Every field-level and cross-field problem, not just the first.
    pub fn check(&self) -> Vec<FieldError> {
        let mut errs = Vec::new();
        if let Err(e) = self.network.validate() {
            errs.push(field("network", e.to_string()));
        }
        if let Err(e) = self.training.validate() {
            errs.push(field("training", e.to_string()));
        }
        if let Err(e) = self.data.validate() {
            errs.push(field("data", e.to_string()));
        }

        let net = &self.network;
        let iris = self.data.source == Source::Iris;
        match (net.encoding, self.data.reducer, iris) {
            (Encoding::Amplitude, Some(ReducerKind::Resize16), false) => {}
            (Encoding::Amplitude, _, _) => errs.push(field(
                "data.reducer",
                "amplitude encoding takes 16x16 resized images (reducer \"resize\")",
            )),
            (Encoding::Angle, Some(ReducerKind::Resize16), _) => errs.push(field(
                "data.reducer",
                "angle encoding takes 8 reduced features (reducer \"pca\" or \"autoencoder\")",
            )),
            (Encoding::Angle, _, _) => {}
        }
        if iris != net.iris_variant {
            errs.push(field(
                "network.iris_variant",
                if iris {
                    "Iris data needs the four-qubit Iris network"
                } else {
                    "the Iris network only runs on Iris data"
                },
            ));
        }
        if self.data.classes.len() != net.num_classes {
            errs.push(field(
                "data.classes",
                format!(
                    "{} classes selected but network.num_classes is {}",
                    self.data.classes.len(),
                    net.num_classes
                ),
            ));
        }
        if errs.is_empty() && self.data.feature_len() != net.input_len() {
            errs.push(field(
                "network.data_qubits",
                format!(
                    "network expects {} inputs but the data pipeline produces {}",
                    net.input_len(),
                    self.data.feature_len()
                ),
            ));
        }

        let seeds = &self.training.seeds;
        if seeds.is_empty() {
            errs.push(field("training.seeds", "at least one seed is required"));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = seeds.iter().find(|s| !seen.insert(**s)) {
            errs.push(field("training.seeds", format!("seed {dup} is listed twice")));
        }

        let g = &self.gradcheck;
        if g.samples == 0 {
            errs.push(field("gradcheck.samples", "must be >= 1"));
        }
        if !(g.step > 0.0 && g.step.is_finite()) {
            errs.push(field("gradcheck.step", "must be positive"));
        }
        if !(g.tolerance > 0.0 && g.tolerance.is_finite()) {
            errs.push(field("gradcheck.tolerance", "must be positive"));
        }
        errs
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let errs = self.check();
        if errs.is_empty() {
            return Ok(());
        }
        let lines: Vec<String> = errs.iter().map(ToString::to_string).collect();
        Err(CliError::Validation(format!("invalid config:\n  {}", lines.join("\n  "))))
    }

    /// Compact single-line JSON of the effective config.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mnist() -> ExperimentConfig {
        ExperimentConfig {
            name: None,
            data: DataSpec::images(Source::Mnist, vec![0, 1], ReducerKind::Resize16),
            network: NetworkConfig::binary(Encoding::Amplitude, Ansatz::A1),
            training: TrainConfig::binary(),
            data_dir: default_data_dir(),
            cache_dir: None,
            out_dir: default_out_dir(),
            gradcheck: GradcheckOptions::default(),
        }
    }

    fn paths_of(cfg: &ExperimentConfig) -> Vec<String> {
        cfg.check().into_iter().map(|e| e.path).collect()
    }

    #[test]
    fn preset_is_valid_and_round_trips() {
        let cfg = mnist();
        assert!(cfg.check().is_empty());
        let back = ExperimentConfig::from_json(&cfg.echo()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn encoding_reducer_pairings() {
        let mut cfg = mnist();
        cfg.apply(&Overrides {
            encoding: Some(Encoding::Angle),
            ..Overrides::default()
        });
        assert_eq!(paths_of(&cfg), ["data.reducer"]);
        cfg.data.reducer = Some(ReducerKind::Pca8);
        assert!(cfg.check().is_empty());
        cfg.network.encoding = Encoding::Amplitude;
        assert_eq!(paths_of(&cfg), ["data.reducer"]);
    }

    #[test]
    fn cross_field_errors_name_their_fields() {
        let mut cfg = mnist();
        cfg.data.classes = vec![0, 1, 2];
        cfg.training.seeds = vec![1, 1];
        cfg.gradcheck.samples = 0;
        assert_eq!(paths_of(&cfg), ["data.classes", "training.seeds", "gradcheck.samples"]);

        let mut iris = mnist();
        iris.data = DataSpec::iris();
        iris.network = NetworkConfig::binary(Encoding::Angle, Ansatz::A2);
        let p = paths_of(&iris);
        assert!(p.contains(&"network.iris_variant".to_string()), "{p:?}");
    }

    #[test]
    fn parse_errors_carry_the_path() {
        let mut v: serde_json::Value = serde_json::from_str(&mnist().echo()).unwrap();
        v["training"]["batch_size"] = serde_json::json!("fifty");
        let err = ExperimentConfig::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("training.batch_size"), "{err}");

        let mut v: serde_json::Value = serde_json::from_str(&mnist().echo()).unwrap();
        v["network"]["qubits"] = serde_json::json!(8);
        let err = ExperimentConfig::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("network") && err.contains("qubits"), "{err}");
    }

    #[test]
    fn overrides() {
        let mut cfg = mnist();
        cfg.apply(&Overrides {
            seed: Some(9),
            no_interaction_layers: true,
            ansatz: Some(Ansatz::A2),
            out: Some(PathBuf::from("/tmp/x")),
            ..Overrides::default()
        });
        assert_eq!(cfg.training.seeds, [9]);
        assert!(!cfg.network.interaction_layers_enabled);
        assert_eq!(cfg.network.ansatz, Ansatz::A2);
        assert_eq!(cfg.cache_dir(), PathBuf::from("/tmp/x/cache"));
    }
}
