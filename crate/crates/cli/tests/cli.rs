use std::fs;
use std::path::Path;
use std::process::Command;

use qenc_cli::config::{DataSource, ExperimentConfig, Scenario};
use qenc_cli::grid::{expand_grid, run_grid, SUMMARY_FILE};
use qenc_cli::runner::{checkpoint_file, METRICS_FILE, REPORT_FILE};
use qenc_cli::{emit_plots, run_experiment};
use qenc_core::encoders::EncodingMethod;
use qenc_core::model::ClassLabel;

fn synthetic(out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        output_dir: out.to_path_buf(),
        ..ExperimentConfig::default()
    };
    c.data.source = DataSource::Synthetic;
    c.data.train_size = 60;
    c.data.test_size = 20;
    c.data.synthetic_size = 100;
    c.train.epochs_per_class = 2;
    c
}

fn qenc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qenc")).args(args).output().unwrap()
}

fn toml_file(dir: &Path, cfg: &ExperimentConfig) -> String {
    let path = dir.join("cfg.toml");
    fs::write(&path, cfg.to_toml()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_metrics_checkpoints_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let report = run_experiment(&synthetic(&out)).unwrap();
    assert_eq!(report.metrics.len(), 4);
    let csv = fs::read_to_string(out.join(METRICS_FILE)).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "epoch,class_phase,accuracy,loss,entropy,wall_time_s");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,3,") && lines[4].starts_with("4,6,"));
    for label in ClassLabel::BOTH {
        assert!(out.join(checkpoint_file(label)).is_file());
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join(REPORT_FILE)).unwrap()).unwrap();
    assert_eq!(json["final_accuracy"].as_f64().unwrap(), report.final_accuracy);
    assert_eq!(json["metrics_split"], "test");
    assert_eq!(report.final_accuracy, report.metrics.last().unwrap().accuracy);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_experiment(&synthetic(&a)).unwrap();
    run_experiment(&synthetic(&b)).unwrap();
    for name in [METRICS_FILE.to_string(), checkpoint_file(ClassLabel::Three), checkpoint_file(ClassLabel::Six)] {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn missing_dataset_is_a_config_error_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let mut cfg = ExperimentConfig {
        output_dir: out.clone(),
        ..ExperimentConfig::default()
    };
    cfg.data.dir = tmp.path().join("no-such-dir");
    let e = run_experiment(&cfg).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert_eq!(e.category(), "config");
    assert!(!out.exists());

    let output = qenc(&["run", "--config", &toml_file(tmp.path(), &cfg)]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("error [config]"));
    assert!(!out.exists());
}

#[test]
fn grid_summary_matches_each_report() {
    let tmp = tempfile::tempdir().unwrap();
    let mut base = synthetic(tmp.path());
    base.train.epochs_per_class = 1;
    base.grid.scenarios = vec![Scenario::Pure, Scenario::Noisy];
    base.noise_preset = "legacy_like".into();
    let summary = run_grid(&expand_grid(&base), tmp.path()).unwrap();
    let table = fs::read_to_string(tmp.path().join(SUMMARY_FILE)).unwrap();
    let rows: Vec<Vec<&str>> = table.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["scenario", "basis", "rotation", "amplitude"]);
    assert_eq!(rows.len(), 3);
    for cell in &summary.cells {
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(cell.output_dir.join(REPORT_FILE)).unwrap()).unwrap();
        let reported = json["final_accuracy"].as_f64().unwrap();
        assert_eq!(cell.result, Ok(reported));
        let row = rows.iter().find(|r| r[0] == cell.scenario.name()).unwrap();
        let col = 1 + EncodingMethod::ALL.iter().position(|e| *e == cell.encoding).unwrap();
        assert_eq!(row[col].parse::<f64>().unwrap(), reported);
    }
}

#[test]
fn plot_command_renders_each_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    run_experiment(&synthetic(&out)).unwrap();
    let csv = out.join(METRICS_FILE);
    let svgs = emit_plots(std::slice::from_ref(&csv)).unwrap();
    let svg = fs::read_to_string(&svgs[0]).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert_eq!(svg.matches("<circle").count(), 12);

    let output = qenc(&["plot", csv.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(fs::read_to_string(&svgs[0]).unwrap(), svg);

    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "epoch,class_phase,accuracy,loss,entropy,wall_time_s\n1,3,x,0,0,0\n").unwrap();
    let output = qenc(&["plot", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("line 2"));
}

#[test]
fn binary_reports_usage_errors() {
    assert_eq!(qenc(&["run", "--encoding", "qram"]).status.code(), Some(2));
    assert_eq!(qenc(&["frobnicate"]).status.code(), Some(2));

    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = synthetic(&tmp.path().join("grid"));
    cfg.grid.encodings.clear();
    let output = qenc(&["grid", "--config", &toml_file(tmp.path(), &cfg)]);
    assert_eq!(output.status.code(), Some(2));

    fs::write(tmp.path().join("typo.toml"), "seeed = 3\n").unwrap();
    let output = qenc(&["run", "--config", tmp.path().join("typo.toml").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn binary_run_succeeds_on_synthetic_data() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg = synthetic(&out);
    let output = qenc(&["run", "--config", &toml_file(tmp.path(), &cfg), "--seed", "3"]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    assert!(String::from_utf8_lossy(&output.stdout).contains("final accuracy"));
    assert!(out.join(METRICS_FILE).is_file());
}
