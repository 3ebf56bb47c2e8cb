mod common;

use common::*;
use hidpos::algebra::normal_form;
use hidpos::algebra::rational::{int, ratio};
use hidpos::explore::{gap_report, image_points, GapOptions, GapVerdict};
use hidpos::tower::{check_regularity, CharVariant, Method, Mode, RegularityCase, RegularityData, Verdict};
use hidpos::Error;

fn gens_text(tw: &hidpos::TowerState) -> Vec<String> {
    tw.generators().iter().map(|g| tw.display(g)).collect()
}

#[test]
fn every_fixture_builds() {
    for (name, tw) in all_fixtures() {
        assert!(tw.nvars() >= 1, "{name}");
    }
}

#[test]
fn abs_indicator_generators_and_mode() {
    let tw = abs_indicator();
    let expected = ["1 - t^2", "u", "t*c", "t*c - t"];
    let got: Vec<_> = tw.generators().iter().map(|g| normal_form(g, tw.ideal())).collect();
    for e in expected {
        let p = normal_form(&poly(&tw, e), tw.ideal());
        assert!(got.contains(&p), "missing generator {e}; have {:?}", gens_text(&tw));
    }
    assert_eq!(got.len(), 4);
    assert!(tw.is_archimedean());
    assert_eq!(tw.mode(), Mode::Closure);
}

#[test]
fn relation_ideal_of_two_indicators() {
    let tw = two_indicator_square();
    for r in ["y^2 - y", "z^2 - z", "t*y*z"] {
        assert!(normal_form(&poly(&tw, r), tw.ideal()).is_zero(), "{r}");
    }
    assert_eq!(tw.mode(), Mode::Unverified);
}

#[test]
fn image_points_match_hand_values() {
    let tw = circle();
    let p = image_points(&tw, &[vec![0.0]]).unwrap();
    assert_eq!(p[0], vec![1.0, 0.0]);
    let tw = isolated_zero_forced();
    let p = image_points(&tw, &[vec![0.5]]).unwrap();
    assert_eq!(p[0], vec![0.5, 1.0]);
    let tw = hyperbola();
    let p = image_points(&tw, &[vec![0.0]]).unwrap();
    assert_eq!(p[0], vec![1.0, 1.0]);
}

#[test]
fn isolated_zero_regularity_is_decided_exactly() {
    let tw = two_box();
    let data = RegularityData { g: None, h: None, q: poly(&tw, ISOLATED_ZERO_Q) };
    let res = check_regularity(&tw, &data, RegularityCase::Comp);
    assert_eq!(res.method, Method::SturmExact);
    match res.verdict {
        Verdict::Fail(w) => assert!(w[0].abs() < 1e-9, "witness {w:?}"),
        v => panic!("expected failure, got {v:?}"),
    }
    let good = RegularityData { g: None, h: None, q: poly(&tw, "1 - t^2") };
    assert_eq!(check_regularity(&tw, &good, RegularityCase::Comp).verdict, Verdict::Pass);
    let err = tw.adjoin_characteristic("f", &poly(&tw, ISOLATED_ZERO_Q), CharVariant::CompactContinuous, false);
    assert!(matches!(err, Err(Error::RegularityFailed { .. })));
}

#[test]
fn mismatched_piecewise_fails_injectivity_and_leaves_a_gap() {
    let tw = two_box();
    let data = RegularityData {
        g: Some(poly(&tw, "1 - t^2")),
        h: Some(poly(&tw, "t^2 - 1")),
        q: poly(&tw, ISOLATED_ZERO_Q),
    };
    match check_regularity(&tw, &data, RegularityCase::InjCase4).verdict {
        Verdict::Fail(w) => assert!(w[0].abs() < 1e-9),
        v => panic!("expected failure, got {v:?}"),
    }
    let tw = mismatched_piecewise_forced();
    assert_eq!(tw.mode(), Mode::Unverified);
    let rep = gap_report(&tw, &GapOptions::from_tower(&tw)).unwrap();
    assert_eq!(rep.verdict, GapVerdict::GapDetected);
    let top = &rep.spurious[0];
    assert!(top.point[0].abs() < 1e-3 && (top.point[1] + 1.0).abs() < 1e-3, "{:?}", top.point);
}

#[test]
fn circle_indicator_passes_closure_regularity() {
    let tw = circle_indicator();
    assert_eq!(tw.mode(), Mode::Closure);
}

#[test]
fn cube_root_piecewise_keeps_exact_mode() {
    let tw = cube_root_piecewise();
    assert_eq!(tw.mode(), Mode::Exact);
    assert!(tw.is_archimedean());
    let rep = gap_report(&tw, &GapOptions::from_tower(&tw)).unwrap();
    assert_eq!(rep.verdict, GapVerdict::ImageEqualsVariety, "{rep}");
}

#[test]
fn circle_and_bump_images_fill_their_varieties() {
    for tw in [circle(), rational_bump()] {
        let rep = gap_report(&tw, &GapOptions::from_tower(&tw)).unwrap();
        assert_eq!(rep.verdict, GapVerdict::ImageEqualsVariety, "{rep}");
    }
}

#[test]
fn sign_line_gap_closes_with_product_generator() {
    let tw = sign_line();
    let rep = gap_report(&tw, &GapOptions::from_tower(&tw)).unwrap();
    assert_eq!(rep.verdict, GapVerdict::GapDetected);
    let tw = tw.add_generator(&poly(&tw, "x*y"), true, None).unwrap();
    let rep = gap_report(&tw, &GapOptions::from_tower(&tw)).unwrap();
    assert_eq!(rep.verdict, GapVerdict::ImageEqualsVariety, "{rep}");
}

#[test]
fn simple_two_indicator_has_spurious_origin() {
    let tw = two_indicator_simple();
    let rep = gap_report(&tw, &GapOptions::from_tower(&tw)).unwrap();
    assert_eq!(rep.verdict, GapVerdict::GapDetected);
    for s in &rep.spurious {
        let d = s.point.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(d < 1e-3, "unexpected spurious point {:?}", s.point);
    }
}

#[test]
fn hyperbola_negative_branch_exclusion() {
    let tw = hyperbola();
    let out = hidpos::explore::exclude_point(&tw, &[int(-1), int(-1)], &int(1)).unwrap();
    assert_eq!(out.generators().len(), 3);
    let near = hidpos::explore::exclude_point(&tw, &[int(1), int(1)], &ratio(1, 100));
    assert!(matches!(near, Err(Error::Precondition { .. })));
}
