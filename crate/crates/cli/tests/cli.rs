use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use absorder::generators::families::{gen_map, Fault, MapFamilySpec};
use absorder::io::{write_map, MapDoc};
use absorder::SpaceModel;
use serde_json::Value;

fn absorder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_absorder"))
        .args(args)
        .env_remove("ABSORDER_CONFIG")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn machine(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn map_file(dir: &Path, name: &str, spec: MapFamilySpec) -> PathBuf {
    let path = dir.join(name);
    write_map(&path, &gen_map(&spec).unwrap().0).unwrap();
    path
}

#[test]
fn verify_axioms_exit_codes() {
    let ok = absorder(&[
        "verify-axioms",
        "--model",
        "hermitian:3",
        "--samples",
        "500",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(
        code(&absorder(&["verify-axioms", "--model", "lattice:5"])),
        0
    );

    let bad = absorder(&["verify-axioms", "--model", "hermitian:three"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("hermitian:three"));
    assert_eq!(code(&absorder(&["verify-axioms"])), 2);
    assert_eq!(code(&absorder(&["no-such-command"])), 2);
}

#[test]
fn verify_axioms_catches_unclamped_root() {
    let out = absorder(&[
        "verify-axioms",
        "--model",
        "hermitian:3",
        "--samples",
        "100",
        "--inject-fault",
        "no-clamp",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"description\""));
}

#[test]
fn classify_transpose_levels() {
    let dir = tempfile::tempdir().unwrap();
    let path = map_file(dir.path(), "t.json", MapFamilySpec::Transpose { k: 2 });
    let out = absorder(&[
        "classify-map",
        "--map",
        path.to_str().unwrap(),
        "--levels",
        "2",
        "--format",
        "machine",
    ]);
    assert_eq!(code(&out), 0);
    let report = machine(&out);
    let verdicts = &report["result"]["verdicts"];
    assert_eq!(verdicts["abs_preserving@1"]["status"], "pass");
    assert_eq!(verdicts["abs_preserving@2"]["status"], "fail");
    assert_eq!(verdicts["order_isometry@2"]["status"], "fail");
    assert_eq!(report["exit_code"], 0);
}

#[test]
fn classify_identity_and_doubling() {
    let dir = tempfile::tempdir().unwrap();
    let m = SpaceModel::hermitian(2);
    let id = map_file(
        dir.path(),
        "id.json",
        MapFamilySpec::Identity { model: m.clone() },
    );
    let out = absorder(&[
        "classify-map",
        "--map",
        id.to_str().unwrap(),
        "--format",
        "machine",
    ]);
    assert_eq!(code(&out), 0);
    let verdicts = machine(&out)["result"]["verdicts"].clone();
    for (key, v) in verdicts.as_object().unwrap() {
        assert_eq!(v["status"], "pass", "{key}");
    }

    let double = map_file(
        dir.path(),
        "d.json",
        MapFamilySpec::Scaling { model: m, t: 2.0 },
    );
    let out = absorder(&[
        "classify-map",
        "--map",
        double.to_str().unwrap(),
        "--format",
        "machine",
    ]);
    assert_eq!(code(&out), 0);
    let iso = &machine(&out)["result"]["verdicts"]["isometry@1"];
    assert_eq!(iso["status"], "fail");
    assert!(iso["witness"]["elements"]
        .as_array()
        .is_some_and(|e| !e.is_empty()));
}

#[test]
fn classify_rejects_bad_map_files() {
    let dir = tempfile::tempdir().unwrap();
    let (t, _) = gen_map(&MapFamilySpec::Transpose { k: 2 }).unwrap();
    let broken = dir.path().join("nostar.json");
    let doc = MapDoc::from_map(&Fault::NoStar.apply(t));
    fs::write(&broken, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = absorder(&["classify-map", "--map", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{\"domain\": \"hermitian:2\"}").unwrap();
    assert_eq!(
        code(&absorder(&[
            "classify-map",
            "--map",
            garbage.to_str().unwrap()
        ])),
        2
    );
    assert_eq!(
        code(&absorder(&[
            "classify-map",
            "--map",
            "/nonexistent/map.json"
        ])),
        2
    );
    assert_eq!(code(&absorder(&["classify-map"])), 2);
}

#[test]
fn theorem_suite_small_matrix_passes() {
    let out = absorder(&["theorem-suite", "--map-count", "26", "--samples", "80"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn theorem_suite_faults_exit_one_with_witness() {
    for fault in ["no-clamp", "no-star"] {
        let out = absorder(&[
            "theorem-suite",
            "--map-count",
            "13",
            "--samples",
            "60",
            "--inject-fault",
            fault,
            "--format",
            "machine",
        ]);
        assert_eq!(code(&out), 1, "{fault}");
        let report = machine(&out);
        assert_eq!(report["status"], "fail");
        assert_eq!(report["config"]["fault"], fault);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains("\"description\""), "{fault}: {stderr}");
    }
}

#[test]
fn empty_map_list_is_vacuous() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    fs::write(&cfg, "maps = []\n").unwrap();
    let out = absorder(&["theorem-suite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn config_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "models = [\"lattice:3\"]\nsamples = 25\nseed = 4\nformat = \"machine\"\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_absorder"))
        .arg("verify-axioms")
        .env("ABSORDER_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let report = machine(&out);
    assert_eq!(report["config"]["models"][0], "lattice:3");
    assert_eq!(report["config"]["tolerance"]["samples"], 25);

    fs::write(&cfg, "models = [\"lattice:3\"\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_absorder"))
        .arg("verify-axioms")
        .env("ABSORDER_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn counterexample_search_finds_witnesses() {
    let out = absorder(&[
        "counterexample-search",
        "--samples",
        "200",
        "--format",
        "machine",
    ]);
    assert_eq!(code(&out), 0);
    let entries = machine(&out)["result"]["entries"]
        .as_array()
        .unwrap()
        .clone();
    assert!(entries.iter().all(|e| e["found"] == e["expect_witness"]));
    assert!(entries.iter().any(|e| e["expect_witness"] == false));
}

#[test]
fn machine_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = map_file(
        dir.path(),
        "p.json",
        MapFamilySpec::PositiveNonpreserver { k: 2, seed: 5 },
    );
    let runs: [&[&str]; 4] = [
        &[
            "verify-axioms",
            "--model",
            "hermitian:2",
            "--samples",
            "50",
            "--seed",
            "3",
        ],
        &[
            "classify-map",
            "--map",
            path.to_str().unwrap(),
            "--seed",
            "3",
        ],
        &[
            "theorem-suite",
            "--map-count",
            "13",
            "--samples",
            "40",
            "--seed",
            "3",
        ],
        &["counterexample-search", "--samples", "50", "--seed", "3"],
    ];
    for args in runs {
        let args: Vec<&str> = args
            .iter()
            .copied()
            .chain(["--format", "machine"])
            .collect();
        let a = absorder(&args);
        let b = absorder(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
        assert_eq!(machine(&a)["version"], absorder::VERSION);
    }
}

#[test]
fn report_written_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.txt");
    let out = absorder(&[
        "verify-axioms",
        "--model",
        "lattice:2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(&out_path)
        .unwrap()
        .contains("all axioms hold"));
}
