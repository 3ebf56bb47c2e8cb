#![allow(dead_code)]

use hidpos::algebra::rational::{int, ratio};
use hidpos::explore::DomainDescription;
use hidpos::expr::ScalarExpr;
use hidpos::tower::{BaseCoord, BaseSpec, CharVariant, Mode, SamplingConfig, TowerState};
use hidpos::{Polynomial, Rational};

pub fn names(ns: &[&str]) -> Vec<String> {
    ns.iter().map(|s| s.to_string()).collect()
}

pub fn poly(tw: &TowerState, text: &str) -> Polynomial {
    tw.parse_poly(text).unwrap_or_else(|e| panic!("bad polynomial `{text}`: {e}"))
}

fn map(text: &str, domain: &[&str]) -> BaseCoord {
    BaseCoord::Map(ScalarExpr::parse(text, &names(domain)).expect("valid map"))
}

fn interval(lo: i64, hi: i64) -> (Rational, Rational) {
    (int(lo), int(hi))
}

/// Line with `x = cos t`, `y = sin t`, the relation `x^2 + y^2 = 1` and the
/// sums of squares as quadratic module.
pub fn circle() -> TowerState {
    let dom = DomainDescription::new(names(&["t"])).with_window(vec![interval(-4, 4)]);
    let mut spec = BaseSpec::new(dom);
    spec.coords = vec![("x".into(), map("cos(t)", &["t"])), ("y".into(), map("sin(t)", &["t"]))];
    spec.relations = vec![Polynomial::parse("x^2 + y^2 - 1", &names(&["x", "y"])).unwrap()];
    spec.assumed_mode = Some(Mode::Exact);
    TowerState::init(spec, SamplingConfig::default()).expect("circle tower")
}

/// `x = exp(t)`, `y = exp(-t)` with `Q = QM(2 - x^2, 2 - y^2)`.
pub fn hyperbola() -> TowerState {
    let dom = DomainDescription::new(names(&["t"])).with_window(vec![interval(-1, 1)]);
    let mut spec = BaseSpec::new(dom);
    spec.coords = vec![("x".into(), map("exp(t)", &["t"])), ("y".into(), map("exp(-t)", &["t"]))];
    let xy = names(&["x", "y"]);
    spec.relations = vec![Polynomial::parse("x*y - 1", &xy).unwrap()];
    spec.gens = vec![
        (Polynomial::parse("2 - x^2", &xy).unwrap(), false),
        (Polynomial::parse("2 - y^2", &xy).unwrap(), false),
    ];
    TowerState::init(spec, SamplingConfig::default()).expect("hyperbola tower")
}

/// Punctured line with `x = t`, `y = |t|/t` and `Q = QM(1 - x^2)`.
pub fn sign_line() -> TowerState {
    let dom = DomainDescription::new(names(&["t"]))
        .with_window(vec![interval(-2, 2)])
        .with_exclusion(Polynomial::var(1, 0));
    let mut spec = BaseSpec::new(dom);
    spec.coords = vec![("x".into(), map("t", &["t"])), ("y".into(), map("abs(t)/t", &["t"]))];
    let xy = names(&["x", "y"]);
    spec.relations = vec![Polynomial::parse("y^2 - 1", &xy).unwrap()];
    spec.gens = vec![(Polynomial::parse("1 - x^2", &xy).unwrap(), false)];
    TowerState::init(spec, SamplingConfig::default()).expect("sign tower")
}

/// `x = 1/(1 + t^2)` with `Q = QM(x, 1 - x)`.
pub fn rational_bump() -> TowerState {
    let dom = DomainDescription::new(names(&["t"])).with_window(vec![interval(-100, 100)]);
    let mut spec = BaseSpec::new(dom);
    spec.coords = vec![("x".into(), map("1/(1 + t^2)", &["t"]))];
    let x = names(&["x"]);
    spec.gens = vec![(Polynomial::parse("x", &x).unwrap(), true), (Polynomial::parse("1 - x", &x).unwrap(), true)];
    TowerState::init(spec, SamplingConfig::default()).expect("bump tower")
}

/// `u = x`, `v = |x| - |y|` on the plane with `Q = QM(1 - u^2, 1 - v^2)`.
pub fn abs_difference() -> TowerState {
    let dom = DomainDescription::new(names(&["x", "y"])).with_box(vec![interval(-2, 2), interval(-2, 2)]);
    let mut spec = BaseSpec::new(dom);
    spec.coords = vec![("u".into(), map("x", &["x", "y"])), ("v".into(), map("abs(x) - abs(y)", &["x", "y"]))];
    let uv = names(&["u", "v"]);
    spec.gens = vec![
        (Polynomial::parse("1 - u^2", &uv).unwrap(), false),
        (Polynomial::parse("1 - v^2", &uv).unwrap(), false),
    ];
    TowerState::init(spec, SamplingConfig::default()).expect("abs difference tower")
}

/// Line with the real cube root `u` and `f = u` for `t >= 0`, `t^2` for `t < 0`,
/// then restricted by `1 - t^2`.
pub fn cube_root_piecewise() -> TowerState {
    let dom = DomainDescription::new(names(&["t"])).with_window(vec![interval(-2, 2)]);
    let mut spec = BaseSpec::new(dom);
    spec.assumed_mode = Some(Mode::Exact);
    let tw = TowerState::init(spec, SamplingConfig::default()).expect("line");
    let tw = tw.adjoin_odd_root("u", &poly(&tw, "t"), 3).expect("cube root");
    let tw = tw
        .adjoin_piecewise("f", &poly(&tw, "u"), &poly(&tw, "t^2"), &poly(&tw, "t"), Mode::Exact, false)
        .expect("piecewise");
    tw.add_generator(&poly(&tw, "1 - t^2"), false, Some(Mode::Exact)).expect("restriction")
}

/// `[-1, 1]` with `1 - t^2`.
pub fn unit_interval() -> TowerState {
    let dom = DomainDescription::interval("t", int(-1), int(1));
    let mut spec = BaseSpec::new(dom);
    spec.gens = vec![(Polynomial::parse("1 - t^2", &names(&["t"])).unwrap(), true)];
    TowerState::init(spec, SamplingConfig::default()).expect("interval")
}

/// `R[t, |t|, chi_[0,1]]` on `[-1, 1]`.
pub fn abs_indicator() -> TowerState {
    let tw = unit_interval();
    let tw = tw.adjoin_even_root("u", &poly(&tw, "t^2"), 2).expect("abs");
    tw.adjoin_characteristic("c", &poly(&tw, "t"), CharVariant::CompactContinuous, false).expect("indicator")
}

/// `x = sin t`, `y = cos t` with the indicator of `cos t >= 0`.
pub fn circle_indicator() -> TowerState {
    let dom = DomainDescription::new(names(&["t"])).with_window(vec![interval(-4, 4)]);
    let mut spec = BaseSpec::new(dom);
    spec.coords = vec![("x".into(), map("sin(t)", &["t"])), ("y".into(), map("cos(t)", &["t"]))];
    spec.relations = vec![Polynomial::parse("x^2 + y^2 - 1", &names(&["x", "y"])).unwrap()];
    spec.assumed_mode = Some(Mode::Exact);
    let tw = TowerState::init(spec, SamplingConfig::default()).expect("circle");
    tw.adjoin_characteristic("c", &poly(&tw, "y"), CharVariant::GeneralClosure, false).expect("indicator")
}

/// `[-2, 2]` with `2 - t`, `2 + t`.
pub fn two_box() -> TowerState {
    let dom = DomainDescription::interval("t", int(-2), int(2));
    let mut spec = BaseSpec::new(dom);
    let t = names(&["t"]);
    spec.gens = vec![(Polynomial::parse("2 - t", &t).unwrap(), true), (Polynomial::parse("2 + t", &t).unwrap(), true)];
    TowerState::init(spec, SamplingConfig::default()).expect("box")
}

pub const ISOLATED_ZERO_Q: &str = "-t^2*(t + 1)*(t - 1)";

/// Indicator of `q >= 0` for `q` with an isolated zero at 0, adjoined by force.
pub fn isolated_zero_forced() -> TowerState {
    let tw = two_box();
    tw.adjoin_characteristic("f", &poly(&tw, ISOLATED_ZERO_Q), CharVariant::CompactContinuous, true)
        .expect("forced indicator")
}

/// Piecewise `1 - t^2` / `t^2 - 1` switched by the same `q`, adjoined by force.
pub fn mismatched_piecewise_forced() -> TowerState {
    let tw = two_box();
    tw.adjoin_piecewise("f", &poly(&tw, "1 - t^2"), &poly(&tw, "t^2 - 1"), &poly(&tw, ISOLATED_ZERO_Q), Mode::Exact, true)
        .expect("forced piecewise")
}

/// `[-2, 2]` with `y = chi_[0,2]` and the generators `2 +- t`, `t*y`, `t*(y - 1)`.
pub fn step_base() -> TowerState {
    let tw = two_box();
    tw.adjoin_characteristic("y", &poly(&tw, "t"), CharVariant::CompactContinuous, false).expect("step")
}

/// Second indicator `z = chi(q >= 0)` over [`step_base`], forced, with `t*y*z = 0`.
pub fn two_indicator(q: &str) -> TowerState {
    let tw = step_base();
    let tw = tw.adjoin_characteristic("z", &poly(&tw, q), CharVariant::GeneralClosure, true).expect("forced indicator");
    tw.add_relation(&poly(&tw, "t*y*z")).expect("relation t*y*z")
}

pub fn two_indicator_square() -> TowerState {
    two_indicator("-t^2*(t + 1)")
}

pub fn two_indicator_simple() -> TowerState {
    two_indicator("-t*(t + 1)")
}

pub fn half() -> Rational {
    ratio(1, 2)
}

pub fn tenth() -> Rational {
    ratio(1, 10)
}

/// Every fixture tower, by name.
pub fn all_fixtures() -> Vec<(&'static str, TowerState)> {
    vec![
        ("circle", circle()),
        ("hyperbola", hyperbola()),
        ("sign_line", sign_line()),
        ("rational_bump", rational_bump()),
        ("abs_difference", abs_difference()),
        ("cube_root_piecewise", cube_root_piecewise()),
        ("abs_indicator", abs_indicator()),
        ("circle_indicator", circle_indicator()),
        ("isolated_zero", isolated_zero_forced()),
        ("mismatched_piecewise", mismatched_piecewise_forced()),
        ("two_indicator_square", two_indicator_square()),
        ("two_indicator_simple", two_indicator_simple()),
    ]
}
