use std::path::Path;

use anosov_lab::{parse_str, run, write_atomic, write_atomic_with};

fn config(kind_body: &str, out: &Path) -> anosov_lab::ExperimentConfig {
    let text = format!("out = {}\n{kind_body}\n", out.display());
    parse_str(&text, Path::new(".")).unwrap()
}

const DEVIATION: &str = "\
kind = deviation
seed = 3
[observable]
terms = 1 0 1 0; -1 0 1 0
[sweep]
n = 64, 128, 256, 512
delta = 0.25, 0.5
theta = uniform 3
[run]
order = 12";

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn deviation_sweep_writes_one_csv_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(DEVIATION, dir.path());
    let m = run(&cfg, 2).unwrap();
    assert_eq!(files(dir.path()), vec!["deviation.csv", "manifest.json"]);
    assert_eq!(m.tasks.len(), 4);
    assert!(m.tasks.iter().all(|t| t.status == "ok" && t.rows == 2));
    let csv = std::fs::read_to_string(dir.path().join("deviation.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], format!("# config_hash={}", cfg.hash()));
    assert_eq!(
        lines[1],
        "N,hbar,delta,prob,mean,second_moment,chebyshev_bound"
    );
    assert_eq!(lines.len(), 2 + 8);
    assert!(lines[2].starts_with("64,"));
    assert!(lines[9].starts_with("512,"));

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], cfg.hash());
    assert_eq!(manifest["outputs"][0], "deviation.csv");
    let reports = manifest["summary"]["rate_reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
}

#[test]
fn reruns_and_thread_counts_give_identical_bytes() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut csvs = Vec::new();
    for (d, threads) in dirs.iter().zip([1, 1, 4]) {
        run(&config(DEVIATION, d.path()), threads).unwrap();
        csvs.push(std::fs::read(d.path().join("deviation.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);
}

#[test]
fn failing_cell_is_recorded_and_siblings_complete() {
    let dir = tempfile::tempdir().unwrap();
    let body = DEVIATION.replace("n = 64, 128, 256, 512", "n = 64, 65, 128");
    let m = run(&config(&body, dir.path()), 2).unwrap();
    let skipped: Vec<_> = m.skipped().collect();
    assert_eq!(skipped.len(), 1);
    assert_eq!(skipped[0].cell, "N=65");
    assert!(skipped[0].error.as_ref().unwrap().contains("parities"));
    let csv = std::fs::read_to_string(dir.path().join("deviation.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 4);
    assert!(!csv.contains("\n65,"));
}

#[test]
fn every_kind_runs() {
    let sin8 = "terms = 0 0 0.2734375 0; 1 0 -0.21875 0; -1 0 -0.21875 0; 2 0 0.109375 0; \
                -2 0 0.109375 0; 3 0 -0.03125 0; -3 0 -0.03125 0; 4 0 0.00390625 0; -4 0 0.00390625 0";
    let cos = "terms = 1 0 1 0; -1 0 1 0";
    let cases = [
        ("pressure", "", "[run]\norder = 6", "pressure.csv", 6),
        (
            "rate",
            cos,
            "[sweep]\ndelta = -0.5, 0, 0.5\n[run]\norder = 8",
            "rate.csv",
            3,
        ),
        ("variance", cos, "[run]\norder = 8", "variance.csv", 2),
        (
            "egorov",
            cos,
            "[sweep]\nn = 32\n[run]\nsteps = 4",
            "egorov.csv",
            4,
        ),
        (
            "uncertainty",
            "",
            "[sweep]\nn = 64\n[run]\nsteps = 2\nstates = 3",
            "uncertainty.csv",
            6,
        ),
        (
            "norm-decay",
            "",
            "[sweep]\nn = 64\n[run]\nsteps = 2",
            "norm_decay.csv",
            3,
        ),
        (
            "subadditivity",
            "",
            "[sweep]\nn = 256\n[run]\nstates = 2",
            "subadditivity.csv",
            2,
        ),
        (
            "observability",
            sin8,
            "[sweep]\nn = 32, 64\n[run]\nsteps = 4",
            "observability.csv",
            2,
        ),
        (
            "survivor",
            sin8,
            "[run]\nsteps = 4\nresolution = 64",
            "survivor.csv",
            0,
        ),
        (
            "entropy",
            "",
            "[sweep]\nn = 64\n[run]\nsteps = 2\nstates = 2",
            "entropy.csv",
            2,
        ),
    ];
    for (kind, obs, rest, file, rows) in cases {
        let dir = tempfile::tempdir().unwrap();
        let obs = if obs.is_empty() {
            String::new()
        } else {
            format!("[observable]\n{obs}\n")
        };
        let text = format!(
            "kind = {kind}\nout = {}\n{obs}{rest}\n",
            dir.path().display()
        );
        let cfg = parse_str(&text, Path::new(".")).unwrap();
        let m = run(&cfg, 1).unwrap();
        assert_eq!(m.skipped().count(), 0, "{kind}: {:?}", m.tasks);
        let csv = std::fs::read_to_string(dir.path().join(file)).unwrap();
        assert!(csv.starts_with("# config_hash="), "{kind}");
        if kind != "survivor" {
            assert_eq!(csv.lines().count(), 2 + rows, "{kind}:\n{csv}");
        }
    }
}

#[test]
fn atomic_write_leaves_no_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("table.csv");
    write_atomic(&target, b"old\n").unwrap();
    let failed = write_atomic_with(&target, |f| {
        use std::io::Write;
        f.write_all(b"half a ro")?;
        Err(std::io::Error::other("simulated crash"))
    });
    assert!(failed.is_err());
    assert_eq!(std::fs::read(&target).unwrap(), b"old\n");
    assert_eq!(files(dir.path()), vec!["table.csv"]);
    write_atomic(&target, b"new\n").unwrap();
    assert_eq!(std::fs::read(&target).unwrap(), b"new\n");
}

#[test]
fn manifest_is_written_last() {
    let dir = tempfile::tempdir().unwrap();
    run(&config(DEVIATION, dir.path()), 1).unwrap();
    let t = |f: &str| {
        std::fs::metadata(dir.path().join(f))
            .unwrap()
            .modified()
            .unwrap()
    };
    assert!(t("manifest.json") >= t("deviation.csv"));
}
