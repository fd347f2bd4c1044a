//! Exit-code contract and subcommand flows driven through the library entry
//! point exactly as the binary would invoke it.

use std::fs;

fn run(args: &[&str]) -> i32 {
    vqsafe_cli::run(args.iter().map(|s| s.to_string()))
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(run(&["vqsafe", "full-run", "--bogus", "x"]), 1);
    assert_eq!(run(&["vqsafe", "not-a-command"]), 1);
    assert_eq!(run(&["vqsafe"]), 1);
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run(&["vqsafe", "--help"]), 0);
    assert_eq!(run(&["vqsafe", "generate", "--help"]), 0);
}

#[test]
fn missing_and_malformed_data_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        run(&["vqsafe", "train", "--data", "/nonexistent/x.csv", "--out", out.to_str().unwrap()]),
        2
    );

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "f0,f1,label\n1.0,oops,0\n").unwrap();
    assert_eq!(
        run(&["vqsafe", "train", "--data", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]),
        2
    );
}

#[test]
fn invalid_synthetic_spec_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&[
            "vqsafe",
            "generate",
            "--out",
            dir.path().to_str().unwrap(),
            "--classes",
            "1",
        ]),
        2
    );
}

#[test]
fn full_run_without_a_data_source_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["vqsafe", "full-run", "--out", dir.path().to_str().unwrap()]), 1);
}

#[test]
fn missing_checkpoint_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    fs::write(&data, "f0,f1,label\n1.0,2.0,0\n0.5,1.5,1\n2.0,0.1,0\n0.1,0.2,1\n").unwrap();
    assert_eq!(
        run(&[
            "vqsafe",
            "evaluate",
            "--data",
            data.to_str().unwrap(),
            "--models",
            dir.path().to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]),
        2
    );
}

#[test]
fn generate_train_evaluate_curves_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert_eq!(
        run(&[
            "vqsafe",
            "generate",
            "--out",
            root.join("data").to_str().unwrap(),
            "--samples",
            "120",
            "--features",
            "6",
            "--classes",
            "2",
            "--separation",
            "5",
            "--seed",
            "11",
        ]),
        0
    );
    let data = root.join("data/dataset.csv");

    assert_eq!(
        run(&[
            "vqsafe",
            "train",
            "--data",
            data.to_str().unwrap(),
            "--out",
            root.join("models").to_str().unwrap(),
            "--kinds",
            "qml,linear",
            "--seed",
            "2",
        ]),
        0
    );
    assert!(root.join("models/model_qml.json").exists());
    assert!(root.join("models/model_linear.json").exists());

    assert_eq!(
        run(&[
            "vqsafe",
            "evaluate",
            "--data",
            data.to_str().unwrap(),
            "--models",
            root.join("models").to_str().unwrap(),
            "--out",
            root.join("eval").to_str().unwrap(),
            "--kinds",
            "qml,linear",
        ]),
        0
    );
    let eval: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("eval/evaluation.json")).unwrap())
            .unwrap();
    let f1 = eval["models"][0]["f1_macro"].as_f64().unwrap();
    assert!(f1 > 0.95, "training-set F1 {}", f1);

    assert_eq!(
        run(&[
            "vqsafe",
            "curves",
            "--data",
            data.to_str().unwrap(),
            "--models",
            root.join("models").to_str().unwrap(),
            "--out",
            root.join("curves").to_str().unwrap(),
            "--kinds",
            "linear",
            "--seed",
            "4",
        ]),
        0
    );
    for variant in ["rga_removal", "rgr_noise", "rgr_fgsm", "rge_removal"] {
        let path = root.join(format!("curves/curve_linear_{}.csv", variant));
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("level,score"));
        assert!(lines.clone().count() >= 2);
        // Robustness/explainability variants start at score exactly 1.
        if variant != "rga_removal" {
            assert!(text.lines().nth(1).unwrap().ends_with(",1"));
        }
    }
}

#[test]
fn curve_csv_row_count_matches_grid_length() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let config = root.join("config.json");
    fs::write(
        &config,
        r#"{
  "synthetic": {"n_samples": 90, "n_features": 5, "n_classes": 2, "separation": 5.0, "seed": 3},
  "kinds": ["linear"],
  "train": {"epochs": 3},
  "curves": {
    "noise_multipliers": [0.0, 1.0, 2.0],
    "fgsm_epsilons": [0.0, 0.1],
    "sample_removal_fractions": [0.0, 0.2],
    "feature_removal_fractions": [0.0, 0.5, 1.0]
  },
  "folds": 3,
  "seed": 5
}"#,
    )
    .unwrap();
    assert_eq!(
        run(&[
            "vqsafe",
            "full-run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            root.join("out").to_str().unwrap(),
        ]),
        0
    );
    let count = |name: &str| -> usize {
        fs::read_to_string(root.join("out").join(name)).unwrap().lines().count() - 1
    };
    assert_eq!(count("curve_linear_rgr_noise.csv"), 3);
    assert_eq!(count("curve_linear_rgr_fgsm.csv"), 2);
    assert_eq!(count("curve_linear_rga_removal.csv"), 2);
    assert_eq!(count("curve_linear_rge_removal.csv"), 3);

    let text = fs::read_to_string(root.join("out/report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["folds"], 3);
    assert_eq!(report["models"][0]["per_fold"].as_array().unwrap().len(), 3);
    assert!(report["models"][0]["summary"]["aurgr_noise"]["mean"].is_f64());
    assert!(report["dataset"].as_str().unwrap().starts_with("synthetic("));

    // The typed report round-trips through parse with identical values.
    let typed: vqsafe_cli::report::ReportJson = serde_json::from_str(&text).unwrap();
    let mut reserialized = serde_json::to_string_pretty(&typed).unwrap();
    reserialized.push('\n');
    assert_eq!(reserialized, text);
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    fs::write(&config, "{ not json").unwrap();
    assert_eq!(
        run(&[
            "vqsafe",
            "full-run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]),
        1
    );

    fs::write(&config, r#"{"unknown_field": 1}"#).unwrap();
    assert_eq!(
        run(&[
            "vqsafe",
            "full-run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]),
        1
    );
}
