use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qenc_core::data::{
    balanced_split, fit_pca, load_idx_dir, make_synthetic_dataset, normalize_for, PcaModel,
    NUM_COMPONENTS,
};
use qenc_core::encoders::EncodedInput;
use qenc_core::model::{Backend, ClassLabel, ClassModel};
use qenc_core::train::{train_class_with, MetricsRecord, Phase};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{DataSource, ExperimentConfig, Scenario};
use crate::error::{RunError, RunResult};

pub const METRICS_FILE: &str = "metrics.csv";
pub const REPORT_FILE: &str = "report.json";
pub const METRICS_HEADER: [&str; 6] = [
    "epoch",
    "class_phase",
    "accuracy",
    "loss",
    "entropy",
    "wall_time_s",
];

// Independent ChaCha streams derived from the run seed.
const STREAM_DATA: u64 = 0;
const STREAM_INIT: u64 = 1;
const STREAM_TRAIN: u64 = 2;

fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn checkpoint_file(label: ClassLabel) -> String {
    format!("model_{}.ckpt", label.digit())
}

/// Everything that only depends on the data settings and the seed: the
/// split, the fitted PCA and the projected features.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub pca: PcaModel,
    pub train: Vec<([f64; NUM_COMPONENTS], ClassLabel)>,
    pub test: Vec<([f64; NUM_COMPONENTS], ClassLabel)>,
}

/// Identifies configs that share a [`PreparedData`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DataKey {
    source: DataSource,
    dir: PathBuf,
    train_size: usize,
    test_size: usize,
    synthetic_size: usize,
    seed: u64,
}

impl DataKey {
    pub fn of(cfg: &ExperimentConfig) -> Self {
        let d = &cfg.data;
        Self {
            source: d.source,
            dir: if d.source == DataSource::Idx {
                d.dir.clone()
            } else {
                PathBuf::new()
            },
            train_size: d.train_size,
            test_size: d.test_size,
            synthetic_size: if d.source == DataSource::Synthetic {
                d.synthetic_size
            } else {
                0
            },
            seed: cfg.seed,
        }
    }
}

pub fn prepare_data(cfg: &ExperimentConfig) -> RunResult<PreparedData> {
    let d = &cfg.data;
    let pool = match d.source {
        DataSource::Idx => load_idx_dir(&d.dir)?,
        DataSource::Synthetic => make_synthetic_dataset(cfg.seed, d.synthetic_size)?,
    };
    let mut rng = rng_stream(cfg.seed, STREAM_DATA);
    let split = balanced_split(&pool, d.train_size, d.test_size, &mut rng)?;
    let images: Vec<&[f64]> = split.train.iter().map(|(s, _)| s.pixels.as_slice()).collect();
    let pca = fit_pca(&images)?;
    let project = |set: &[(qenc_core::data::ImageSample, ClassLabel)]| {
        set.iter()
            .map(|(s, l)| (pca.project(&s.pixels), *l))
            .collect::<Vec<_>>()
    };
    let train = project(&split.train);
    let test = project(&split.test);
    Ok(PreparedData { pca, train, test })
}

#[derive(Debug, Clone, Serialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub class_phase: u8,
    pub accuracy: f64,
    pub loss: f64,
    pub entropy: f64,
    pub train_fidelity: f64,
    pub wall_time_s: f64,
}

impl From<&MetricsRecord> for EpochMetrics {
    fn from(r: &MetricsRecord) -> Self {
        Self {
            epoch: r.epoch,
            class_phase: r.class_phase.digit(),
            accuracy: r.accuracy,
            loss: r.loss,
            entropy: r.entropy,
            train_fidelity: r.train_fidelity,
            wall_time_s: r.wall_time,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifacts {
    pub metrics_csv: PathBuf,
    pub checkpoints: Vec<PathBuf>,
    pub report: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    /// Split the accuracy, loss and entropy columns are scored on.
    pub metrics_split: &'static str,
    pub metrics: Vec<EpochMetrics>,
    pub final_accuracy: f64,
    pub pca_explained_variance: f64,
    pub total_wall_time_s: f64,
    pub artifacts: Artifacts,
}

/// Validates `cfg`, prepares the data and runs one experiment. Nothing is
/// written when validation or data loading fails.
pub fn run_experiment(cfg: &ExperimentConfig) -> RunResult<RunReport> {
    cfg.validate()?;
    let data = prepare_data(cfg)?;
    run_prepared(cfg, &data)
}

pub fn backend_for(cfg: &ExperimentConfig) -> RunResult<Backend> {
    Ok(match cfg.scenario {
        Scenario::Pure => Backend::Pure,
        Scenario::Noisy => Backend::noisy(cfg.noise_config()?, None)?,
        Scenario::NoisyDd => Backend::noisy(cfg.noise_config()?, Some(cfg.dd_policy()?))?,
    })
}

/// Trains and evaluates on already prepared data. `cfg` must be valid.
pub fn run_prepared(cfg: &ExperimentConfig, data: &PreparedData) -> RunResult<RunReport> {
    let started = Instant::now();
    let encode = |features: &[f64; NUM_COMPONENTS]| {
        normalize_for(cfg.encoding, features, &data.pca, cfg.data.rotation_range)
    };
    let train: Vec<(EncodedInput, ClassLabel)> = data
        .train
        .iter()
        .map(|(f, l)| Ok((encode(f)?, *l)))
        .collect::<RunResult<_>>()?;
    let test: Vec<(EncodedInput, ClassLabel)> = data
        .test
        .iter()
        .map(|(f, l)| Ok((encode(f)?, *l)))
        .collect::<RunResult<_>>()?;
    let backend = backend_for(cfg)?;
    let train_cfg = cfg.train_config();

    let mut init_rng = rng_stream(cfg.seed, STREAM_INIT);
    let mut m3 = ClassModel::random(ClassLabel::Three, cfg.model.layers.clone(), &mut init_rng);
    let mut m6 = ClassModel::random(ClassLabel::Six, cfg.model.layers.clone(), &mut init_rng);
    let mut train_rng = rng_stream(cfg.seed, STREAM_TRAIN);

    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(|e| RunError::io(out, e))?;
    let csv_path = out.join(METRICS_FILE);
    let mut csv = csv::Writer::from_path(&csv_path).map_err(|e| csv_error(&csv_path, e))?;
    csv.write_record(METRICS_HEADER)
        .map_err(|e| csv_error(&csv_path, e))?;

    let mut records = Vec::new();
    let mut io_error = None;
    for label in ClassLabel::BOTH {
        let samples: Vec<EncodedInput> = train
            .iter()
            .filter(|(_, l)| *l == label)
            .map(|(x, _)| *x)
            .collect();
        let phase = Phase {
            samples: &samples,
            test: &test,
            backend: &backend,
            cfg: &train_cfg,
            first_epoch: records.len() + 1,
            started,
        };
        let (model, other) = match label {
            ClassLabel::Three => (&mut m3, &m6),
            ClassLabel::Six => (&mut m6, &m3),
        };
        let ckpt = out.join(checkpoint_file(label));
        let mut on_epoch = |m: &ClassModel, r: &MetricsRecord| {
            let wall = if cfg.train.record_wall_time { r.wall_time } else { 0.0 };
            let written = write_metrics_row(&mut csv, r, wall)
                .map_err(|e| csv_error(&csv_path, e))
                .and_then(|_| fs::write(&ckpt, m.to_checkpoint()).map_err(|e| RunError::io(&ckpt, e)));
            if let Err(e) = written {
                let msg = e.to_string();
                io_error = Some(e);
                return Err(qenc_core::Error::Metrics(msg));
            }
            Ok(())
        };
        let phase_records = train_class_with(model, other, &phase, &mut train_rng, &mut on_epoch);
        if let Some(e) = io_error.take() {
            return Err(e);
        }
        records.extend(phase_records?);
    }
    drop(csv);

    let final_accuracy = records.last().map(|r| r.accuracy).unwrap_or(0.0);
    let report_path = out.join(REPORT_FILE);
    let report = RunReport {
        config: cfg.clone(),
        metrics_split: "test",
        metrics: records.iter().map(EpochMetrics::from).collect(),
        final_accuracy,
        pca_explained_variance: data.pca.explained_variance_ratio(),
        total_wall_time_s: started.elapsed().as_secs_f64(),
        artifacts: Artifacts {
            metrics_csv: csv_path,
            checkpoints: ClassLabel::BOTH
                .iter()
                .map(|l| out.join(checkpoint_file(*l)))
                .collect(),
            report: report_path.clone(),
        },
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let mut f = File::create(&report_path).map_err(|e| RunError::io(&report_path, e))?;
    writeln!(f, "{json}").map_err(|e| RunError::io(&report_path, e))?;
    Ok(report)
}

fn write_metrics_row(
    csv: &mut csv::Writer<File>,
    r: &MetricsRecord,
    wall: f64,
) -> Result<(), csv::Error> {
    csv.write_record([
        r.epoch.to_string(),
        r.class_phase.digit().to_string(),
        r.accuracy.to_string(),
        r.loss.to_string(),
        r.entropy.to_string(),
        wall.to_string(),
    ])?;
    csv.flush()?;
    Ok(())
}

fn csv_error(path: &Path, e: csv::Error) -> RunError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => RunError::io(path, io),
        other => RunError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}
