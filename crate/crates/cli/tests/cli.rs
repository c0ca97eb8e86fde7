use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rnshell"))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn text(o: &Output) -> (String, String) {
    (String::from_utf8_lossy(&o.stdout).into_owned(), String::from_utf8_lossy(&o.stderr).into_owned())
}

#[test]
fn shipped_configs_validate() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        rnshell::harness::ExperimentConfig::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn shell_eig_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("shell_eig.toml");
    let out = run(&["shell-eig", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    let (stdout, stderr) = text(&out);
    assert!(out.status.success(), "{stdout}\n{stderr}");
    assert!(stdout.contains("PASS lambda_nondecreasing_in_beta"));
    let csv = std::fs::read_to_string(dir.path().join("shell_eig.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("shell_eig_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn asymmetry_presets_exit_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["shell", "translated_hole", "parallel_hole"] {
        let cfg = configs().join(format!("asymmetry_{preset}.toml"));
        let out = run(&["asymmetry", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        let (stdout, stderr) = text(&out);
        assert!(out.status.success(), "{preset}: {stdout}\n{stderr}");
        assert!(stdout.contains("\"branch\""));
        assert!(stdout.contains("PASS expected_branch"));
    }
}

#[test]
fn configuration_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "schema_version = 1\n[geometry]\nn = 2\nbeta = -1.0\nr1 = 1.0\nr2 = 2.0\n[solver]\nh_targt = 0.1\n",
    )
    .unwrap();
    let out = run(&["shell-eig", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out).1.contains("solver.h_targt"));

    let out = run(&["shell-eig"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out).1.contains("--config"));
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lemma.toml");
    std::fs::write(
        &path,
        "schema_version = 1\n[geometry]\nn = 2\nbeta = -1.0\nr1 = 1.0\nr2 = 2.0\n\
         [family]\nkind = \"random\"\nsamples = 4\nseed = 1\n",
    )
    .unwrap();
    let outdir = dir.path().join("out");
    let go = || {
        let out = run(&[
            "lemma-checks",
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "99",
            "--workers",
            "2",
            "--out",
            outdir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{:?}", text(&out));
        std::fs::read_to_string(outdir.join("lemma_checks.csv")).unwrap()
    };
    let a = go();
    let b = go();
    assert_eq!(a, b);
    let header: Vec<&str> = a.lines().next().unwrap().split(',').collect();
    let seed_col = header.iter().position(|h| *h == "seed").unwrap();
    assert!(a.lines().skip(1).all(|l| l.split(',').nth(seed_col) == Some("99")));
}
