use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hidpos"));
    c.env_remove("HIDPOS_SEED");
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_script(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_accepts_fixtures_and_rejects_syntax_errors() {
    let o = bin().arg("check").arg(fixture("abs_indicator.pos")).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ok, 7 statements"));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_script(dir.path(), "bad.pos", "domain t in [-1, 1]\nadjoin u = evenroot(t^2, 2);");
    let o = bin().arg("check").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("line 2, column 1: expected `;`"), "{}", stderr(&o));
    let empty = write_script(dir.path(), "empty.pos", "");
    let o = bin().arg("check").arg(&empty).output().unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("expected domain"));
}

#[test]
fn syntax_error_run_still_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_script(dir.path(), "bad.pos", "domain t in [-1, 1]; adjoin u = sqrt(t);");
    let out = dir.path().join("out");
    let o = bin().arg("run").arg(&bad).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(4));
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("syntax error: line 1, column 33"), "{report}");
    assert!(report.ends_with("exit 4\n"));
}

#[test]
fn run_writes_outputs_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = bin()
            .args(["run", "--samples", "2000", "--seed", "11", "--out"])
            .arg(d)
            .arg(fixture("abs_indicator.pos"))
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let mut files: Vec<String> =
        std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    files.sort();
    assert_eq!(files, ["certificate.txt", "image.csv", "report.txt", "tower.txt", "variety.csv"]);
    for f in &files {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let report = std::fs::read_to_string(a.join("report.txt")).unwrap();
    assert!(report.contains("seed 11 samples 2000"));
    assert!(report.contains("level exact-verified"));
}

#[test]
fn regularity_failure_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().arg("run").arg(fixture("isolated_zero_bad.pos")).arg("-o").arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("witness [0.0]"));
    assert!(report.contains("status regularity-failed"));
}

#[test]
fn force_flag_applies_to_every_adjunction() {
    let o = bin().args(["run", "--force", "--samples", "2000"]).arg(fixture("isolated_zero_bad.pos")).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("adjunction forced, mode unverified"));
}

#[test]
fn seed_comes_from_flag_then_file_then_environment() {
    let dir = tempfile::tempdir().unwrap();
    let script = write_script(dir.path(), "s.pos", "domain t in [-1, 1]; base_gen 1 - t^2 check; report;");
    let run = |args: &[&str], env: Option<&str>| {
        let mut c = bin();
        if let Some(v) = env {
            c.env("HIDPOS_SEED", v);
        }
        let o = c.arg("run").args(args).arg(&script).output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o)
    };
    assert!(run(&[], None).contains("seed 1 samples 10000"));
    assert!(run(&[], Some("7")).contains("seed 7 "));
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "seed = 5\nsamples = 300\ndmax = 2\neps = \"1/4\"\n").unwrap();
    let cfg_arg = cfg.to_str().unwrap();
    let out = run(&["--config", cfg_arg], Some("7"));
    assert!(out.contains("seed 5 samples 300"), "{out}");
    assert!(out.contains("dmax 2 eps 1/4"));
    assert!(run(&["--config", cfg_arg, "--seed", "3", "--samples", "400"], Some("7")).contains("seed 3 samples 400"));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_script(dir.path(), "cfg.toml", "samples = \"many\"\n");
    let o = bin().arg("run").arg("--config").arg(&cfg).arg(fixture("circle.pos")).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cfg.toml"));
}

#[test]
fn certify_subcommand_overrides_shift_and_degree() {
    let o = bin()
        .args(["certify", "--eps", "0", "--dmax", "3", "--samples", "2000"])
        .arg(fixture("abs_indicator.pos"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("certify u eps=0 dmax=3;"));
    assert!(out.contains("property p1"));
    assert!(!out.contains("explore"));
    let o = bin().arg("certify").arg(fixture("circle_indicator.pos")).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no certify statement"));
}

#[test]
fn failed_certification_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let script = write_script(dir.path(), "neg.pos", "domain t in [-1, 1];\nbase_gen 1 - t^2 check;\ncertify t - 1 eps=1/2;\n");
    let o = bin().args(["run", "--samples", "2000"]).arg(&script).output().unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("not certified"));
}

#[test]
fn explore_subcommand_overrides_sampling() {
    let o = bin().args(["explore", "--samples", "1500", "--delta", "0.1"]).arg(fixture("circle.pos")).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("explore samples=1500 delta=0.1;"));
    assert!(out.contains("verdict image-equals-variety"));
    assert!(!out.contains("certify"));
}

#[test]
fn fmt_prints_the_normalized_script() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_script(dir.path(), "s.pos", "domain t in[ -1,1 ];adjoin u=evenroot( t^2,2 ) ;\n");
    let o = bin().arg("fmt").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "domain t in [-1, 1];\nadjoin u = evenroot(t^2, 2);\n");
    let o = bin().arg("fmt").arg("--write").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "domain t in [-1, 1];\nadjoin u = evenroot(t^2, 2);\n");
}
