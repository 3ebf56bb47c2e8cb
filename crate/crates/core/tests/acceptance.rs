//! Acceptance criteria, one line each. Runs without the test harness so the
//! report reads top to bottom; exits nonzero when any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use hidpos::algebra::rational::{int, ratio};
use hidpos::algebra::{buchberger, normal_form, s_polynomial};
use hidpos::explore::compiled::CompiledPoly;
use hidpos::explore::gap::NearestIndex;
use hidpos::explore::{
    exclude_point, gap_report, image_cloud, sample_variety, surjectivity_check, GapOptions, GapVerdict, VarietyOptions,
};
use hidpos::sos::{
    certify_positivity, lower_bound, solve_sdp, verify_certificate, Certificate, GramBlock, SdpOptions, SdpProblem,
    SdpStatus, SparseSym, VerificationLevel,
};
use hidpos::tower::{check_regularity, Method, RegularityCase, RegularityData, Verdict};
use hidpos::{Monomial, Polynomial, TermOrder};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !{ $cond } {
            return Err(format!($($msg)+));
        }
    };
}

fn gap_opts(tw: &hidpos::TowerState) -> GapOptions {
    GapOptions { n: 10_000, delta: 0.05, ..GapOptions::from_tower(tw) }
}

fn circle_identity() -> Check {
    let tw = circle();
    let hand = normal_form(&poly(&tw, "x^2 + (y + 1)^2"), tw.ideal());
    ensure!(hand == normal_form(&poly(&tw, "2*y + 2"), tw.ideal()), "hand reduction differs: {}", tw.display(&hand));
    let basis = vec![Monomial::one(2), Monomial::var(2, 0, 1), Monomial::var(2, 1, 1)];
    let gram = [[1, 0, 1], [0, 1, 0], [1, 0, 1]].iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
    let cert = Certificate {
        names: tw.names(),
        eps: int(0),
        degree: 1,
        blocks: vec![GramBlock { generator: Polynomial::one(2), basis, gram }],
        rationalized: true,
    };
    let rep = verify_certificate(&tw, &poly(&tw, "2 + 2*y"), &cert).map_err(|e| e.to_string())?;
    ensure!(rep.level == VerificationLevel::ExactVerified, "{rep}");
    Ok(rep.to_string())
}

fn abs_indicator_pipeline() -> Check {
    let tw = abs_indicator();
    let got: Vec<Polynomial> = tw.generators().iter().map(|g| normal_form(g, tw.ideal())).collect();
    let want: Vec<Polynomial> =
        ["1 - t^2", "u", "t*c", "t*(c - 1)"].iter().map(|s| normal_form(&poly(&tw, s), tw.ideal())).collect();
    ensure!(got.len() == want.len() && want.iter().all(|w| got.contains(w)), "generators {:?}", got.iter().map(|g| tw.display(g)).collect::<Vec<_>>());
    ensure!(tw.is_archimedean(), "tower not archimedean");
    let out = certify_positivity(&tw, &poly(&tw, "u"), &ratio(1, 10), 3).map_err(|e| e.to_string())?;
    let rep = out.report().ok_or_else(|| out.to_string())?;
    ensure!(rep.is_exact(), "{rep}");
    Ok(rep.to_string())
}

fn isolated_zero() -> Check {
    let base = two_box();
    let bad = RegularityData { g: None, h: None, q: poly(&base, ISOLATED_ZERO_Q) };
    let res = check_regularity(&base, &bad, RegularityCase::Comp);
    ensure!(res.method == Method::SturmExact, "method {}", res.method);
    match &res.verdict {
        Verdict::Fail(w) => ensure!(w[0].abs() < 1e-9, "witness {w:?}"),
        v => return Err(format!("expected failure, got {v:?}")),
    }
    let good = RegularityData { g: None, h: None, q: poly(&base, "1 - t^2") };
    ensure!(check_regularity(&base, &good, RegularityCase::Comp).verdict == Verdict::Pass, "1 - t^2 did not pass");
    let tw = isolated_zero_forced();
    let rep = gap_report(&tw, &gap_opts(&tw)).map_err(|e| e.to_string())?;
    ensure!(rep.verdict == GapVerdict::GapDetected, "no gap");
    let top = &rep.spurious[0];
    ensure!(top.point.iter().all(|v| v.abs() < 1e-3), "top point {:?}", top.point);
    ensure!(top.distance >= 0.9, "distance {}", top.distance);
    let cleared = exclude_point(&tw, &[int(0), int(0)], &half()).map_err(|e| e.to_string())?;
    let after = gap_report(&cleared, &gap_opts(&cleared)).map_err(|e| e.to_string())?;
    ensure!(after.verdict == GapVerdict::ImageEqualsVariety, "after exclusion: max distance {}", after.max_distance);
    Ok(format!("top spurious {:?} at distance {:.3}; cleared max distance {:.4}", top.point, top.distance, after.max_distance))
}

fn hyperbola_branch() -> Check {
    let tw = hyperbola();
    let rep = gap_report(&tw, &gap_opts(&tw)).map_err(|e| e.to_string())?;
    ensure!(rep.verdict == GapVerdict::GapDetected, "no gap");
    let negative = rep.spurious.iter().filter(|s| s.point[0] < 0.0 && (s.point[0] * s.point[1] - 1.0).abs() < 1e-6).count();
    ensure!(negative > 0, "no spurious point with x < 0 on xy = 1");
    let tw2 = tw.add_generator(&poly(&tw, "x + y"), true, None).map_err(|e| e.to_string())?;
    let after = gap_report(&tw2, &gap_opts(&tw2)).map_err(|e| e.to_string())?;
    ensure!(after.verdict == GapVerdict::ImageEqualsVariety, "after x + y: max distance {}", after.max_distance);
    Ok(format!("{negative} spurious points with x < 0; after x + y max distance {:.4}", after.max_distance))
}

fn two_indicator_branch() -> Check {
    let tw = two_indicator_square();
    let opts = gap_opts(&tw);
    let image = image_cloud(&tw, opts.n, opts.seed).map_err(|e| e.to_string())?;
    let vopts = VarietyOptions { n: opts.n, tau_rel: opts.tau_rel, tau_pos: opts.tau_pos, seed: opts.seed + 1, bbox: None };
    let variety = sample_variety(&tw, &vopts).map_err(|e| e.to_string())?;
    let index = NearestIndex::new(&image.points);
    let mut found: Option<(f64, f64)> = None;
    let (mut stray, mut cluster) = (0, 0);
    for p in &variety.points {
        let d = index.nearest(p);
        let in_branch = p[1].abs() < 1e-6 && (p[2] - 1.0).abs() < 1e-6;
        if in_branch && p[0].abs() < 1e-3 {
            cluster += 1;
            if d > 0.5 {
                found = Some(found.map_or((p[0], d), |f| if d > f.1 { (p[0], d) } else { f }));
            }
        } else if d > opts.delta {
            stray += 1;
        }
    }
    let (t, d) = found.ok_or("no isolated branch point near t = 0")?;
    ensure!(stray == 0, "{stray} other variety points farther than delta from the image");
    Ok(format!("branch (0,1) point t={t:.2e} at distance {d:.3}; all {} other points within delta", variety.len() - cluster))
}

fn abs_difference_gap() -> Check {
    let tw = abs_difference();
    let rep = gap_report(&tw, &gap_opts(&tw)).map_err(|e| e.to_string())?;
    ensure!(rep.verdict == GapVerdict::GapDetected, "no gap");
    let above = rep.spurious.iter().filter(|s| s.point[1] > s.point[0].abs() + 0.1).count();
    ensure!(above > 0, "no spurious point with v > |u| + 0.1");
    Ok(format!("{above} spurious points with v > |u| + 0.1; max distance {:.3}", rep.max_distance))
}

fn random_poly(rng: &mut ChaCha8Rng) -> Polynomial {
    let terms = (0..rng.random_range(0..8)).filter_map(|_| {
        let e = [rng.random_range(0..=4u32), rng.random_range(0..=4u32), rng.random_range(0..=4u32)];
        (e.iter().sum::<u32>() <= 4).then(|| (Monomial::new(e.to_vec()), ratio(rng.random_range(-5..=5), rng.random_range(1..=3))))
    });
    Polynomial::from_terms(3, terms)
}

fn property_suites() -> Check {
    let mut ideals: Vec<hidpos::GroebnerBasis> = all_fixtures().into_iter().map(|(_, tw)| tw.ideal().clone()).collect();
    let xyz = names(&["x", "y", "z"]);
    let p3 = |s: &str| Polynomial::parse(s, &xyz).unwrap();
    let three = buchberger(&[p3("y^2 - y"), p3("z^2 - z"), p3("x*y*z")], &TermOrder::tower(3));
    ideals.push(three.clone());
    for gb in &ideals {
        let g = gb.generators();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                ensure!(normal_form(&s_polynomial(&g[i], &g[j], gb.order()), gb).is_zero(), "S-polynomial does not reduce to 0");
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for _ in 0..1000 {
        let (p, q) = (random_poly(&mut rng), random_poly(&mut rng));
        let np = normal_form(&p, &three);
        ensure!(normal_form(&np, &three) == np, "normal form not idempotent");
        let nq = normal_form(&q, &three);
        ensure!(normal_form(&(&p * &q), &three) == normal_form(&(&np * &nq), &three), "normal form not multiplicative");
    }
    for (tw, fs) in [(circle(), ["2 + y", "x*y"]), (abs_indicator(), ["u", "u - t"])] {
        for fs in fs {
            let f = poly(&tw, fs);
            let cloud = image_cloud(&tw, 10_000, 5).map_err(|e| e.to_string())?;
            let cp = CompiledPoly::new(&f);
            let sampled = cloud.points.iter().map(|p| cp.eval(p)).fold(f64::INFINITY, f64::min);
            let mut prev = f64::NEG_INFINITY;
            for d in 1..=3 {
                let lb = lower_bound(&tw, &f, d).map_err(|e| e.to_string())?;
                ensure!(lb.value >= prev - 1e-7, "{fs}: bound decreased at degree {d}");
                ensure!(lb.value <= sampled + 1e-5, "{fs}: bound {} above sampled minimum {sampled}", lb.value);
                prev = lb.value;
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut c = SparseSym::new();
    c.push(0, 0, 0, 1.0);
    c.push(0, 1, 1, 2.0);
    let mut tr = SparseSym::new();
    tr.push(0, 0, 0, 1.0);
    tr.push(0, 1, 1, 1.0);
    let mut instances = vec![(SdpProblem { block_sizes: vec![2], c, constraints: vec![tr], b: vec![1.0] }, 1.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let sizes: Vec<usize> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(1..=5)).collect();
        let (mut c, mut tr, mut oracle) = (SparseSym::new(), SparseSym::new(), f64::INFINITY);
        for (k, &n) in sizes.iter().enumerate() {
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                    c.push(k, i, j, v);
                }
                tr.push(k, i, i, 1.0);
            }
            oracle = oracle.min(m.symmetric_eigenvalues().min());
        }
        instances.push((SdpProblem { block_sizes: sizes, c, constraints: vec![tr], b: vec![1.0] }, oracle));
    }
    for (p, oracle) in &instances {
        let sol = solve_sdp(p, &SdpOptions::default());
        ensure!(sol.status == SdpStatus::Optimal, "solver status {:?}", sol.status);
        let r = sol.primal_residual.max(sol.dual_residual);
        ensure!(r <= 1e-7, "residual {r:e}");
        ensure!((sol.primal_objective - oracle).abs() <= 1e-6, "objective {} vs oracle {oracle}", sol.primal_objective);
        worst = worst.max(r);
    }
    Ok(format!("{} ideals, 1000 normal-form pairs, 4 bound trajectories, 21 SDPs (worst residual {worst:.1e})", ideals.len()))
}

fn surjectivity() -> Check {
    let tw = abs_indicator();
    let mut lines = Vec::new();
    let mut stage = Some(&tw);
    while let Some(s) = stage {
        if s.parent().is_none() {
            break;
        }
        let rep = surjectivity_check(s, &gap_opts(s)).map_err(|e| e.to_string())?;
        ensure!(rep.holds(), "stage with {} variables: max distance {} at {:?}", s.nvars(), rep.max_distance, rep.worst);
        lines.push(format!("{} vars: {:.4}", s.nvars(), rep.max_distance));
        stage = s.parent();
    }
    Ok(format!("max distances {}", lines.join(", ")))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("circle identity", Duration::from_secs(1), circle_identity),
        ("abs/indicator pipeline", Duration::from_secs(5), abs_indicator_pipeline),
        ("isolated zero", Duration::from_secs(10), isolated_zero),
        ("hyperbola branch", Duration::from_secs(5), hyperbola_branch),
        ("two-indicator branch", Duration::from_secs(10), two_indicator_branch),
        ("abs-difference gap", Duration::from_secs(10), abs_difference_gap),
        ("property suites", Duration::MAX, property_suites),
        ("surjectivity", Duration::from_secs(10), surjectivity),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let result = match result {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            r => r,
        };
        match result {
            Ok(msg) => println!("criterion {} {name}: PASS ({took:.2?}) {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({took:.2?}) {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
