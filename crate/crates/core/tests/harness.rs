use rnshell::harness::{
    cmd_asymmetry, cmd_lemma_checks, cmd_shell_eig, cmd_stability_sweep, cmd_steklov_gap, cmd_verify_isoperimetric,
    ExperimentConfig,
};
use rnshell::shell::shell_eigenvalue;
use rnshell::steklov_radial::sigma1_shell;
use rnshell::{Error, ShellGeometry};

const GEOMETRY: &str = r#"
schema_version = 1
[geometry]
n = 2
beta = -1.0
r1 = 1.0
r2 = 2.0
"#;

fn config(extra: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(&format!("{GEOMETRY}{extra}")).unwrap()
}

#[test]
fn shell_eig_rows_pass_through() {
    let c = ExperimentConfig::from_toml(&format!("betas = [-4.0, -0.25, -1.0]\n{GEOMETRY}")).unwrap();
    let r = cmd_shell_eig(&c).unwrap();
    assert!(r.passed());
    assert_eq!(r.records.len(), 3);
    let betas: Vec<f64> = r.records.iter().map(|x| x.beta).collect();
    assert_eq!(betas, vec![-4.0, -1.0, -0.25]);
    let row = &r.records[1];
    let g = ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap();
    assert_eq!(row.lambda1, shell_eigenvalue(&g).unwrap());
    assert_eq!(row.sigma1_shell, sigma1_shell(2, 1.0, 2.0).unwrap());
    assert!(r.records.windows(2).all(|w| w[0].lambda1 <= w[1].lambda1));
    let csv = r.to_csv().unwrap();
    assert!(csv.starts_with("beta,lambda1,z_m,z_max,sigma1_shell\n"));
}

#[test]
fn asymmetry_presets_select_their_branches() {
    for preset in ["shell", "translated_hole", "parallel_hole"] {
        let c = config(&format!("[domain]\npreset = \"{preset}\"\n"));
        let (report, assertions) = cmd_asymmetry(&c).unwrap();
        assert_eq!(assertions.len(), 1);
        assert!(assertions[0].passed, "{preset}: {report:?}");
    }
    let c = config("[domain]\nouter_cos = [0.0, 0.0, 0.0, 0.02]\nhole_center = [0.05, 0.0]\n");
    let (report, assertions) = cmd_asymmetry(&c).unwrap();
    assert!(assertions.is_empty());
    assert!(report.alpha > 0.0);
}

#[test]
fn command_without_family_reports_the_missing_section() {
    let c = config("");
    match cmd_verify_isoperimetric(&c) {
        Err(Error::Config { path, .. }) => assert_eq!(path, "family"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn isoperimetric_sweep_is_deterministic_across_worker_counts() {
    let extra = "[family]\nkind = \"random\"\nsamples = 3\nseed = 11\n[solver]\nh_target = 0.08\nlevels = 3\n";
    let one = config(extra);
    let mut two = one.clone();
    two.workers = 2;
    let a = cmd_verify_isoperimetric(&one).unwrap();
    let b = cmd_verify_isoperimetric(&one).unwrap();
    let c = cmd_verify_isoperimetric(&two).unwrap();
    assert!(a.passed(), "{:?}", a.summary_json());
    assert!(a.failures.is_empty());
    assert_eq!(a.records.len(), 3);
    let csv = a.to_csv().unwrap();
    assert_eq!(csv, b.to_csv().unwrap());
    // the worker count is part of the config hash, so compare without it
    let strip = |s: String| s.replace(&one.hash(), "").replace(&two.hash(), "");
    assert_eq!(strip(csv), strip(c.to_csv().unwrap()));
    assert!(a.records.iter().all(|r| r.config_hash == one.hash() && r.seed == 11));
}

#[test]
fn inner_stability_sweep_on_a_small_family() {
    let c = config(
        "[family]\nkind = \"inner\"\nsamples = 3\nseed = 5\nhole_amplitude = 0.02\nmc_samples = 100000\n\
         [solver]\nh_target = 0.08\nlevels = 3\n",
    );
    let r = cmd_stability_sweep(&c).unwrap();
    assert!(r.passed(), "{:#?}", r.summary_json());
    for rec in &r.records {
        assert!(rec.g_of_asym.unwrap() < 1e-20);
        assert!(rec.weak_fraenkel.unwrap() > 0.0);
    }
    let dir = std::env::temp_dir().join(format!("rnshell-harness-{}", std::process::id()));
    let (csv, json) = r.write(&dir).unwrap();
    assert!(std::fs::read_to_string(csv).unwrap().lines().count() == 4);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn steklov_gap_on_single_modes() {
    let c = config(
        "[family]\nkind = \"single_mode\"\nmodes = [2, 4]\namplitudes = [0.04, 0.02, 0.01]\nfem_subsample = 2\n\
         [solver]\nh_target = 0.08\nlevels = 3\n",
    );
    let r = cmd_steklov_gap(&c).unwrap();
    assert!(r.passed(), "{:#?}", r.summary_json());
    assert_eq!(r.records.len(), 6);
    assert_eq!(r.records.iter().filter(|x| x.sigma_fem.is_some()).count(), 2);
}

#[test]
fn lemma_checks_on_random_profiles() {
    let c = config("[family]\nkind = \"random\"\nsamples = 10\nseed = 3\n");
    let r = cmd_lemma_checks(&c).unwrap();
    assert!(r.passed(), "{:#?}", r.summary_json());
    assert_eq!(r.records.len(), 40);
}
