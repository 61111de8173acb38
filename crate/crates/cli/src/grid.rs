use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qenc_core::encoders::EncodingMethod;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Scenario};
use crate::error::{RunError, RunResult};
use crate::runner::{prepare_data, run_prepared, DataKey, PreparedData};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const DETAIL_FILE: &str = "summary_detail.csv";

/// One config per (scenario, encoding, repeat) of `base.grid`. Repeat `k`
/// uses seed `base.seed + k` for every scenario and encoding, so cells that
/// differ only in scenario see the same split and initial parameters.
pub fn expand_grid(base: &ExperimentConfig) -> Vec<ExperimentConfig> {
    let g = &base.grid;
    let mut out = Vec::new();
    for &scenario in &g.scenarios {
        for &encoding in &g.encodings {
            for k in 0..g.repeats {
                let seed = base.seed.wrapping_add(k as u64);
                out.push(ExperimentConfig {
                    scenario,
                    encoding,
                    seed,
                    output_dir: base
                        .output_dir
                        .join(scenario.name())
                        .join(encoding.name())
                        .join(format!("seed_{seed}")),
                    ..base.clone()
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub scenario: Scenario,
    pub encoding: EncodingMethod,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Final accuracy, or the error message.
    pub result: Result<f64, String>,
}

/// Aggregate of all repeats of one (scenario, encoding) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub runs: usize,
    pub failed: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone)]
pub struct GridSummary {
    pub cells: Vec<CellOutcome>,
    pub scenarios: Vec<Scenario>,
    pub summary_csv: PathBuf,
    pub detail_csv: PathBuf,
}

impl GridSummary {
    /// `None` when the pair was not part of the grid.
    pub fn stats(&self, scenario: Scenario, encoding: EncodingMethod) -> Option<CellStats> {
        let runs: Vec<&CellOutcome> = self
            .cells
            .iter()
            .filter(|c| c.scenario == scenario && c.encoding == encoding)
            .collect();
        if runs.is_empty() {
            return None;
        }
        let ok: Vec<f64> = runs.iter().filter_map(|c| c.result.clone().ok()).collect();
        let n = ok.len() as f64;
        let mean = ok.iter().sum::<f64>() / n;
        let var = ok.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
        Some(CellStats {
            runs: runs.len(),
            failed: runs.len() - ok.len(),
            mean,
            std: var.sqrt(),
            min: ok.iter().copied().fold(f64::INFINITY, f64::min),
            max: ok.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Summary-table entry: mean accuracy, `error` if any repeat failed,
    /// empty if the pair was not run.
    pub fn cell_text(&self, scenario: Scenario, encoding: EncodingMethod) -> String {
        match self.stats(scenario, encoding) {
            None => String::new(),
            Some(s) if s.failed > 0 => "error".into(),
            Some(s) => s.mean.to_string(),
        }
    }
}

/// Runs every config (in parallel) and writes `summary.csv` (scenarios as
/// rows, encodings as columns) and `summary_detail.csv` into `summary_dir`.
/// A failing cell is reported as `error` and does not stop the others.
pub fn run_grid(configs: &[ExperimentConfig], summary_dir: &Path) -> RunResult<GridSummary> {
    if configs.is_empty() {
        return Err(RunError::Config("grid needs at least one configuration".into()));
    }
    let valid: Vec<Result<(), String>> = configs
        .iter()
        .map(|c| c.validate().map_err(|e| e.to_string()))
        .collect();

    let mut keys: Vec<DataKey> = Vec::new();
    for (c, v) in configs.iter().zip(&valid) {
        let k = DataKey::of(c);
        if v.is_ok() && !keys.contains(&k) {
            keys.push(k);
        }
    }
    let prepared: HashMap<DataKey, Result<Arc<PreparedData>, String>> = keys
        .par_iter()
        .map(|k| {
            let c = configs
                .iter()
                .find(|c| DataKey::of(c) == *k)
                .expect("key comes from a config");
            (k.clone(), prepare_data(c).map(Arc::new).map_err(|e| e.to_string()))
        })
        .collect();

    let cells: Vec<CellOutcome> = configs
        .par_iter()
        .zip(valid.par_iter())
        .map(|(c, v)| {
            let result = v.clone().and_then(|_| {
                let data = prepared[&DataKey::of(c)].clone()?;
                run_prepared(c, &data)
                    .map(|r| r.final_accuracy)
                    .map_err(|e| e.to_string())
            });
            CellOutcome {
                scenario: c.scenario,
                encoding: c.encoding,
                seed: c.seed,
                output_dir: c.output_dir.clone(),
                result,
            }
        })
        .collect();

    let mut scenarios = Vec::new();
    for c in &cells {
        if !scenarios.contains(&c.scenario) {
            scenarios.push(c.scenario);
        }
    }
    let summary = GridSummary {
        cells,
        scenarios,
        summary_csv: summary_dir.join(SUMMARY_FILE),
        detail_csv: summary_dir.join(DETAIL_FILE),
    };
    write_summaries(&summary)?;
    Ok(summary)
}

fn write_summaries(s: &GridSummary) -> RunResult<()> {
    let dir = s.summary_csv.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;

    let mut table = String::from("scenario,basis,rotation,amplitude\n");
    for &sc in &s.scenarios {
        table.push_str(sc.name());
        for enc in EncodingMethod::ALL {
            table.push(',');
            table.push_str(&s.cell_text(sc, enc));
        }
        table.push('\n');
    }
    fs::write(&s.summary_csv, table).map_err(|e| RunError::io(&s.summary_csv, e))?;

    let mut detail = String::from("scenario,encoding,runs,failed,mean,std,min,max\n");
    for &sc in &s.scenarios {
        for enc in EncodingMethod::ALL {
            let Some(st) = s.stats(sc, enc) else { continue };
            if st.failed == st.runs {
                detail.push_str(&format!("{sc},{enc},{},{},,,,\n", st.runs, st.failed));
            } else {
                detail.push_str(&format!(
                    "{sc},{enc},{},{},{},{},{},{}\n",
                    st.runs, st.failed, st.mean, st.std, st.min, st.max
                ));
            }
        }
    }
    fs::write(&s.detail_csv, detail).map_err(|e| RunError::io(&s.detail_csv, e))?;
    Ok(())
}
