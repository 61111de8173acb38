//! TOML experiment configuration.
//!
//! ```toml
//! seed = 7
//! encoding = "rotation"          # basis | rotation | amplitude
//! scenario = "pure"              # pure | noisy | noisy_dd
//! noise_preset = "torino_like"   # none | torino_like | legacy_like | coherent_idle
//! output_dir = "runs/rotation"
//!
//! [noise]                        # optional overrides of the preset
//! p_depol_2q = 0.02
//!
//! [dd]
//! sequence = ["x", "x"]
//! min_idle_duration = 1.0
//!
//! [train]
//! learning_rate = 0.01
//! epochs_per_class = 5
//! batch_size = 1
//! gradient_method = "parameter_shift"
//! record_wall_time = false
//!
//! [model]
//! layers = ["dual", "cz", "single"]
//!
//! [data]
//! source = "idx"                 # idx | synthetic
//! dir = "data/mnist-36"
//! train_size = 1000
//! test_size = 187
//! rotation_range = "pi"          # pi | two_pi
//!
//! [grid]                         # used by the `grid` subcommand
//! encodings = ["basis", "rotation", "amplitude"]
//! scenarios = ["pure", "noisy", "noisy_dd"]
//! repeats = 1
//! ```
//!
//! Relative paths are resolved against the working directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qenc_core::data::RotationRange;
use qenc_core::encoders::EncodingMethod;
use qenc_core::model::LayerSpec;
use qenc_core::noise::{DdPolicy, NoiseConfig};
use qenc_core::sim::GateKind;
use qenc_core::train::{GradientMethod, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{RunError, RunResult};

/// Serde adapter for types with `Display` + `FromStr`.
mod text {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
        where
            T: FromStr,
            T::Err: Display,
            D: Deserializer<'de>,
        {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| s.parse().map_err(de::Error::custom))
                .collect()
        }
    }
}

/// Where the trained classifier is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    #[serde(alias = "pure_sim")]
    Pure,
    #[serde(alias = "noisy_sim")]
    Noisy,
    #[serde(alias = "noisy_sim_dd")]
    NoisyDd,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Pure, Scenario::Noisy, Scenario::NoisyDd];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Pure => "pure",
            Scenario::Noisy => "noisy",
            Scenario::NoisyDd => "noisy_dd",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = RunError;

    fn from_str(s: &str) -> RunResult<Self> {
        match s {
            "pure" | "pure_sim" => Ok(Scenario::Pure),
            "noisy" | "noisy_sim" => Ok(Scenario::Noisy),
            "noisy_dd" | "noisy_sim_dd" => Ok(Scenario::NoisyDd),
            other => Err(RunError::Config(format!("unknown scenario '{other}'"))),
        }
    }
}

/// Optional per-field overrides applied on top of the noise preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_depol_1q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_depol_2q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_amp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherent_z_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readout_flip: Option<f64>,
}

impl NoiseOverrides {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DdSection {
    /// Pulse names: `x`, `y`, `z`.
    pub sequence: Vec<String>,
    pub min_idle_duration: f64,
}

impl Default for DdSection {
    fn default() -> Self {
        Self {
            sequence: vec!["x".into(), "x".into()],
            min_idle_duration: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub learning_rate: f64,
    pub epochs_per_class: usize,
    pub batch_size: usize,
    #[serde(with = "text")]
    pub gradient_method: GradientMethod,
    /// Write measured seconds into `wall_time_s`; when false the column is
    /// 0 so metrics files are byte-reproducible.
    pub record_wall_time: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            learning_rate: t.learning_rate,
            epochs_per_class: t.epochs_per_class,
            batch_size: t.batch_size,
            gradient_method: t.gradient_method,
            record_wall_time: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    #[serde(with = "text::vec")]
    pub layers: Vec<LayerSpec>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            layers: LayerSpec::default_stack(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// IDX files in `dir`.
    Idx,
    /// Generated two-class blobs; `dir` is ignored.
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub source: DataSource,
    pub dir: PathBuf,
    pub train_size: usize,
    pub test_size: usize,
    #[serde(with = "text")]
    pub rotation_range: RotationRange,
    /// Pool size for the synthetic source.
    pub synthetic_size: usize,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            source: DataSource::Idx,
            dir: PathBuf::from("data/mnist-36"),
            train_size: 1000,
            test_size: 187,
            rotation_range: RotationRange::Pi,
            synthetic_size: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    #[serde(with = "text::vec")]
    pub encodings: Vec<EncodingMethod>,
    pub scenarios: Vec<Scenario>,
    pub repeats: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            encodings: EncodingMethod::ALL.to_vec(),
            scenarios: Scenario::ALL.to_vec(),
            repeats: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(with = "text")]
    pub encoding: EncodingMethod,
    pub scenario: Scenario,
    pub noise_preset: String,
    pub output_dir: PathBuf,
    #[serde(skip_serializing_if = "NoiseOverrides::is_empty")]
    pub noise: NoiseOverrides,
    pub dd: DdSection,
    pub train: TrainSection,
    pub model: ModelSection,
    pub data: DataSection,
    pub grid: GridSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            encoding: EncodingMethod::Rotation,
            scenario: Scenario::Pure,
            noise_preset: "torino_like".into(),
            output_dir: PathBuf::from("runs/default"),
            noise: NoiseOverrides::default(),
            dd: DdSection::default(),
            train: TrainSection::default(),
            model: ModelSection::default(),
            data: DataSection::default(),
            grid: GridSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> RunResult<Self> {
        toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> RunResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            RunError::Config(m) => RunError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.train.learning_rate,
            epochs_per_class: self.train.epochs_per_class,
            batch_size: self.train.batch_size,
            gradient_method: self.train.gradient_method,
            seed: self.seed,
        }
    }

    /// The preset with overrides applied.
    pub fn noise_config(&self) -> RunResult<NoiseConfig> {
        let mut c = NoiseConfig::preset(&self.noise_preset)?;
        let o = &self.noise;
        let set = |field: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *field = v;
            }
        };
        set(&mut c.p_depol_1q, o.p_depol_1q);
        set(&mut c.p_depol_2q, o.p_depol_2q);
        set(&mut c.gamma_amp, o.gamma_amp);
        set(&mut c.gamma_phase, o.gamma_phase);
        set(&mut c.coherent_z_rate, o.coherent_z_rate);
        set(&mut c.readout_flip, o.readout_flip);
        c.validate()?;
        Ok(c)
    }

    pub fn dd_policy(&self) -> RunResult<DdPolicy> {
        let sequence = self
            .dd
            .sequence
            .iter()
            .map(|s| match s.to_ascii_lowercase().as_str() {
                "x" => Ok(GateKind::X),
                "y" => Ok(GateKind::Y),
                "z" => Ok(GateKind::Z),
                other => Err(RunError::Config(format!("unknown DD pulse '{other}'"))),
            })
            .collect::<RunResult<Vec<_>>>()?;
        let policy = DdPolicy {
            enabled: true,
            sequence,
            min_idle_duration: self.dd.min_idle_duration,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Checks everything a run needs before any file is written.
    pub fn validate(&self) -> RunResult<()> {
        self.train_config().validate()?;
        let noise = self.noise_config()?;
        if self.scenario != Scenario::Pure && noise == NoiseConfig::zero() {
            return Err(RunError::Config(format!(
                "scenario '{}' needs a noise preset other than 'none' or noise overrides",
                self.scenario
            )));
        }
        if self.scenario == Scenario::NoisyDd {
            self.dd_policy()?;
        }
        if self.model.layers.is_empty() {
            return Err(RunError::Config("model.layers is empty".into()));
        }
        if self.data.train_size < 2 || self.data.test_size < 2 {
            return Err(RunError::Config(
                "data.train_size and data.test_size must be at least 2".into(),
            ));
        }
        match self.data.source {
            DataSource::Idx if !self.data.dir.is_dir() => {
                return Err(RunError::Config(format!(
                    "dataset directory {} does not exist",
                    self.data.dir.display()
                )));
            }
            DataSource::Synthetic
                if self.data.synthetic_size < self.data.train_size + self.data.test_size =>
            {
                return Err(RunError::Config(
                    "data.synthetic_size is smaller than train_size + test_size".into(),
                ));
            }
            _ => {}
        }
        if self.output_dir.is_file() {
            return Err(RunError::Config(format!(
                "output_dir {} is a file",
                self.output_dir.display()
            )));
        }
        Ok(())
    }

    /// Checks the grid section on top of [`validate`](Self::validate).
    pub fn validate_grid(&self) -> RunResult<()> {
        let g = &self.grid;
        if g.encodings.is_empty() || g.scenarios.is_empty() || g.repeats == 0 {
            return Err(RunError::Config(
                "grid needs at least one encoding, one scenario and repeats >= 1".into(),
            ));
        }
        for &scenario in &g.scenarios {
            ExperimentConfig {
                scenario,
                ..self.clone()
            }
            .validate()?;
        }
        Ok(())
    }
}
