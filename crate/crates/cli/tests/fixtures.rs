use std::path::{Path, PathBuf};
use std::time::Instant;

use hidpos::sos::verify_certificate;
use hidpos::{Certificate, TowerState};
use hidpos_cli::golden::compare_tolerant;
use hidpos_cli::runner::Status;
use hidpos_cli::{emit_outputs, parse_script, run_script, ExitKind, RunConfig, RunReport};

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn source(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(format!("{name}.pos"))).unwrap()
}

fn run_fixture(name: &str) -> RunReport {
    let script = parse_script(&source(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    run_script(&script, &RunConfig::default(), &format!("{name}.pos"))
}

fn check_golden(name: &str, exit: ExitKind) -> RunReport {
    let report = run_fixture(name);
    let expected = std::fs::read_to_string(fixture_dir().join(format!("{name}.expected"))).unwrap();
    if let Err(diff) = compare_tolerant(&expected, &report.render(), 1e-3, 1e-6) {
        panic!("{name} differs from its golden at {diff}\n{}", report.render());
    }
    assert_eq!(report.exit, exit, "{name}");
    report
}

macro_rules! golden {
    ($($test:ident => $name:literal, $exit:expr;)*) => {
        $(
            #[test]
            fn $test() {
                check_golden($name, $exit);
            }
        )*
    };
}

golden! {
    circle_matches_golden => "circle", ExitKind::Success;
    hyperbola_matches_golden => "hyperbola", ExitKind::Success;
    sign_line_matches_golden => "sign_line", ExitKind::Success;
    rational_bump_matches_golden => "rational_bump", ExitKind::Success;
    abs_difference_matches_golden => "abs_difference", ExitKind::Success;
    cube_root_piecewise_matches_golden => "cube_root_piecewise", ExitKind::Success;
    circle_indicator_matches_golden => "circle_indicator", ExitKind::Success;
    mismatched_piecewise_matches_golden => "mismatched_piecewise", ExitKind::Success;
    two_indicator_square_matches_golden => "two_indicator_square", ExitKind::Success;
    two_indicator_simple_matches_golden => "two_indicator_simple", ExitKind::Success;
}

fn last_verdict(report: &RunReport) -> String {
    report
        .outcomes
        .iter()
        .flat_map(|o| o.details.iter())
        .rfind(|d| d.starts_with("verdict "))
        .cloned()
        .unwrap_or_default()
}

#[test]
fn abs_indicator_is_certified_exactly_and_writes_its_outputs() {
    let report = check_golden("abs_indicator", ExitKind::Success);
    let certify = report.outcomes.iter().find(|o| o.text.starts_with("certify")).unwrap();
    assert!(certify.details[0].contains("level exact-verified"), "{:?}", certify.details);
    let dir = tempfile::tempdir().unwrap();
    let written = emit_outputs(&report, dir.path()).unwrap();
    let mut names: Vec<String> = written.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names, ["certificate.txt", "image.csv", "report.txt", "tower.txt", "variety.csv"]);
    let tw = TowerState::from_text(&std::fs::read_to_string(dir.path().join("tower.txt")).unwrap()).unwrap();
    let cert = Certificate::from_text(&std::fs::read_to_string(dir.path().join("certificate.txt")).unwrap()).unwrap();
    let rep = verify_certificate(&tw, &tw.parse_poly("u").unwrap(), &cert).unwrap();
    assert!(rep.is_exact(), "{rep}");
    let image = std::fs::read_to_string(dir.path().join("image.csv")).unwrap();
    assert!(image.starts_with("t,u,c\n"));
}

#[test]
fn isolated_zero_halts_at_the_indicator() {
    let report = check_golden("isolated_zero_bad", ExitKind::RegularityFailed);
    let adjoin = &report.outcomes[3];
    match &adjoin.status {
        Status::Error(e) => assert!(e.contains("comp") && e.contains("witness [0.0]"), "{e}"),
        other => panic!("{other:?}"),
    }
    assert_eq!(report.outcomes[4].status, Status::Skipped);
    assert!(report.artifacts.image.is_none());
}

#[test]
fn excluding_the_spurious_point_closes_the_gap() {
    let report = check_golden("isolated_zero_fixed", ExitKind::Success);
    assert_eq!(last_verdict(&report), "verdict image-equals-variety");
}

#[test]
fn reruns_give_identical_reports() {
    let a = run_fixture("hyperbola").render();
    let b = run_fixture("hyperbola").render();
    assert_eq!(a, b);
}

#[test]
fn fixtures_round_trip_through_the_printer() {
    for entry in std::fs::read_dir(fixture_dir()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "pos") {
            let s = parse_script(&std::fs::read_to_string(&p).unwrap()).unwrap();
            let printed = s.to_string();
            assert_eq!(parse_script(&printed).unwrap(), s, "{}", p.display());
            assert_eq!(parse_script(&printed).unwrap().to_string(), printed);
        }
    }
}

#[test]
fn reciprocal_of_a_vanishing_function_fails_with_a_witness() {
    let script = parse_script("domain t in [-1, 1]; base_gen 1 - t^2 check; adjoin v = recip(t);").unwrap();
    let report = run_script(&script, &RunConfig::default(), "recip.pos");
    assert_eq!(report.exit, ExitKind::Error);
    match &report.outcomes[2].status {
        Status::Error(e) => assert!(e.contains("witness"), "{e}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn failed_certification_continues_and_exits_three() {
    let script =
        parse_script("domain t in [-1, 1]; base_gen 1 - t^2 check; certify t eps=1/2 dmax=2; explore samples=500;").unwrap();
    let report = run_script(&script, &RunConfig::default(), "negative.pos");
    assert_eq!(report.outcomes[2].status, Status::NotCertified);
    assert_eq!(report.outcomes[3].status, Status::Ok);
    assert_eq!(report.exit, ExitKind::CertificationFailed);
    assert_eq!(report.exit.code(), 3);
}

/// The tower constructions with indicators, roots and piecewise functions.
#[test]
fn construction_fixtures_run_within_a_minute() {
    let names = [
        "cube_root_piecewise",
        "abs_indicator",
        "circle_indicator",
        "isolated_zero_bad",
        "isolated_zero_fixed",
        "mismatched_piecewise",
        "two_indicator_square",
        "two_indicator_simple",
    ];
    let start = Instant::now();
    for n in names {
        run_fixture(n);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1} s");
}
