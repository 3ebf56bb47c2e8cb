//! Executes a parsed script against the core library and collects a report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use hidpos::algebra::rational;
use hidpos::explore::{exclude_point, gap_analysis, DomainDescription};
use hidpos::expr::ScalarExpr;
use hidpos::tower::BaseCoord;
use hidpos::{
    certify_positivity, BaseSpec, Certificate, CertifyOutcome, Error, GapOptions, PointCloud, Polynomial, Rational, TowerState,
};

use crate::config::RunConfig;
use crate::script::{AdjoinKind, Bounds, ProblemScript, Statement, StmtKind};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitKind {
    Success = 0,
    Error = 1,
    RegularityFailed = 2,
    CertificationFailed = 3,
    Syntax = 4,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn name(self) -> &'static str {
        match self {
            ExitKind::Success => "success",
            ExitKind::Error => "error",
            ExitKind::RegularityFailed => "regularity-failed",
            ExitKind::CertificationFailed => "certification-failed",
            ExitKind::Syntax => "syntax-error",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Ok,
    /// A certification search that ended without a certificate.
    NotCertified,
    /// A hard error; execution stopped here.
    Error(String),
    /// Not executed because an earlier statement stopped the run.
    Skipped,
}

#[derive(Clone, Debug)]
pub struct StatementOutcome {
    pub index: usize,
    pub line: usize,
    pub text: String,
    pub status: Status,
    pub details: Vec<String>,
    pub elapsed: Duration,
}

/// Files produced by a run, kept in memory until written.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub tower: Option<String>,
    pub image: Option<PointCloud>,
    pub variety: Option<PointCloud>,
    /// Certificates with the index of the statement that produced them.
    pub certificates: Vec<(usize, Certificate)>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub script: String,
    pub config: RunConfig,
    pub outcomes: Vec<StatementOutcome>,
    pub exit: ExitKind,
    pub artifacts: Artifacts,
    /// Set when the script did not parse; nothing ran.
    pub syntax_error: Option<String>,
}

impl RunReport {
    pub fn from_syntax_error(script: &str, config: &RunConfig, err: &crate::ScriptError) -> RunReport {
        RunReport {
            script: script.to_string(),
            config: config.clone(),
            outcomes: Vec::new(),
            exit: ExitKind::Syntax,
            artifacts: Artifacts::default(),
            syntax_error: Some(err.to_string()),
        }
    }

    /// The report text; contains no timings, so equal seeds give equal bytes.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let s = &c.sampling;
        let _ = writeln!(out, "hidpos run report");
        let _ = writeln!(out, "script {}", self.script);
        let _ = writeln!(out, "seed {} samples {} delta {}", s.seed, s.samples, s.delta);
        let _ = writeln!(
            out,
            "zero_tol {:e} sign_tol {:e} tau_rel {:e} tau_pos {:e}",
            s.zero_tol, s.sign_tol, s.tau_rel, s.tau_pos
        );
        let _ = writeln!(out, "dmax {} eps {} force {}", c.dmax, rational::format(&c.eps), c.force);
        if let Some(e) = &self.syntax_error {
            let _ = writeln!(out);
            let _ = writeln!(out, "syntax error: {e}");
        }
        for o in &self.outcomes {
            let _ = writeln!(out);
            let _ = writeln!(out, "[{}] line {}: {}", o.index, o.line, o.text);
            let status = match &o.status {
                Status::Ok => "ok".to_string(),
                Status::NotCertified => "not certified".to_string(),
                Status::Error(e) => format!("error: {e}"),
                Status::Skipped => "skipped".to_string(),
            };
            let _ = writeln!(out, "  {status}");
            for d in &o.details {
                let _ = writeln!(out, "  {d}");
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "status {}", self.exit.name());
        let _ = writeln!(out, "exit {}", self.exit.code());
        out
    }

    pub fn render_timings(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let _ = writeln!(out, "[{}] {:>10.3} ms  {}", o.index, o.elapsed.as_secs_f64() * 1e3, o.text);
        }
        let total: Duration = self.outcomes.iter().map(|o| o.elapsed).sum();
        let _ = writeln!(out, "total {:.3} ms", total.as_secs_f64() * 1e3);
        out
    }
}

/// Writes the report, the final tower, the last explored clouds and every
/// certificate into `dir`, returning the written paths.
pub fn emit_outputs(report: &RunReport, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, text: &str| -> std::io::Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, text)?;
        written.push(p);
        Ok(())
    };
    put("report.txt".into(), &report.render())?;
    let a = &report.artifacts;
    if let Some(t) = &a.tower {
        put("tower.txt".into(), t)?;
    }
    if let Some(c) = &a.image {
        put("image.csv".into(), &c.to_csv())?;
    }
    if let Some(c) = &a.variety {
        put("variety.csv".into(), &c.to_csv())?;
    }
    let single = a.certificates.len() == 1;
    for (i, cert) in &a.certificates {
        let name = if single { "certificate.txt".to_string() } else { format!("certificate-{i}.txt") };
        put(name, &cert.to_text())?;
    }
    Ok(written)
}

/// Drops `explore` statements and applies the given shift and degree budget
/// to every `certify` statement.
pub fn certify_only(script: &ProblemScript, eps: Option<Rational>, dmax: Option<u32>) -> ProblemScript {
    let statements = script
        .statements
        .iter()
        .filter(|s| !matches!(s.kind, StmtKind::Explore { .. }))
        .map(|s| {
            let mut s = s.clone();
            if let StmtKind::Certify { eps: e, dmax: d, .. } = &mut s.kind {
                if eps.is_some() {
                    *e = eps.clone();
                }
                if dmax.is_some() {
                    *d = dmax;
                }
            }
            s
        })
        .collect();
    ProblemScript { statements }
}

/// Drops `certify` statements, applies the sample size and radius to every
/// `explore` statement and appends one when the script has none.
pub fn explore_only(script: &ProblemScript, samples: Option<usize>, delta: Option<f64>) -> ProblemScript {
    let mut statements: Vec<Statement> = script
        .statements
        .iter()
        .filter(|s| !matches!(s.kind, StmtKind::Certify { .. }))
        .map(|s| {
            let mut s = s.clone();
            if let StmtKind::Explore { samples: n, delta: d, .. } = &mut s.kind {
                if samples.is_some() {
                    *n = samples;
                }
                if delta.is_some() {
                    *d = delta;
                }
            }
            s
        })
        .collect();
    if !statements.iter().any(|s| matches!(s.kind, StmtKind::Explore { .. })) {
        let loc = statements.last().map(|s| s.loc).unwrap_or(crate::script::Loc { line: 1, col: 1 });
        statements.push(Statement { loc, kind: StmtKind::Explore { samples, delta, seed: None } });
    }
    ProblemScript { statements }
}

enum Stage {
    Base { spec: BaseSpec, scope: Vec<String> },
    Tower(TowerState),
}

struct Runner<'a> {
    config: &'a RunConfig,
    stage: Option<Stage>,
    artifacts: Artifacts,
    /// Lines describing a base stage built during the current statement.
    pending: Vec<String>,
}

/// What a statement produced besides its status.
struct Step {
    details: Vec<String>,
    certified: bool,
}

impl Step {
    fn ok(details: Vec<String>) -> Step {
        Step { details, certified: true }
    }
}

/// Executes the statements in order. A hard error stops the run; a failed
/// certification is recorded and the run continues.
pub fn run_script(script: &ProblemScript, config: &RunConfig, script_name: &str) -> RunReport {
    let mut r = Runner { config, stage: None, artifacts: Artifacts::default(), pending: Vec::new() };
    let mut outcomes = Vec::new();
    let mut exit = ExitKind::Success;
    let mut halted = false;
    for (i, stmt) in script.statements.iter().enumerate() {
        let mut o = StatementOutcome {
            index: i + 1,
            line: stmt.loc.line,
            text: stmt.to_string(),
            status: Status::Skipped,
            details: Vec::new(),
            elapsed: Duration::ZERO,
        };
        if halted {
            outcomes.push(o);
            continue;
        }
        log::info!("statement {} at line {}: {}", i + 1, stmt.loc.line, o.text);
        let start = Instant::now();
        let res = r.execute(i + 1, stmt);
        o.elapsed = start.elapsed();
        match res {
            Ok(step) => {
                o.details = step.details;
                o.status = if step.certified { Status::Ok } else { Status::NotCertified };
                if !step.certified {
                    exit = exit.max(ExitKind::CertificationFailed);
                }
            }
            Err(e) => {
                o.status = Status::Error(format!("{}: {e}", stmt.loc));
                exit = match e {
                    Error::RegularityFailed { .. } => ExitKind::RegularityFailed,
                    _ => ExitKind::Error,
                };
                halted = true;
            }
        }
        outcomes.push(o);
    }
    if !halted {
        if let Err(e) = r.tower() {
            exit = ExitKind::Error;
            if let Some(last) = outcomes.last_mut() {
                last.status = Status::Error(format!("building the base stage: {e}"));
            }
        }
    }
    if let Some(Stage::Tower(tw)) = &r.stage {
        r.artifacts.tower = Some(tw.to_text());
    }
    RunReport { script: script_name.to_string(), config: config.clone(), outcomes, exit, artifacts: r.artifacts, syntax_error: None }
}

fn describe_mode(tw: &TowerState) -> String {
    format!("mode {}; archimedean {}", tw.mode(), tw.is_archimedean())
}

fn new_notes(before: &TowerState, after: &TowerState) -> Vec<String> {
    let skip = before.notes().len().min(after.notes().len());
    after.notes()[skip..].iter().map(|n| format!("note {n}")).collect()
}

impl Runner<'_> {
    fn base(&mut self) -> hidpos::Result<(&mut BaseSpec, &mut Vec<String>)> {
        match &mut self.stage {
            Some(Stage::Base { spec, scope }) => Ok((spec, scope)),
            _ => Err(Error::InvalidArgument("base-stage statement after the base stage".into())),
        }
    }

    /// The tower, building the base stage on first use.
    fn tower(&mut self) -> hidpos::Result<&TowerState> {
        if let Some(Stage::Base { spec, .. }) = &self.stage {
            let tw = TowerState::init(spec.clone(), self.config.sampling.clone())?;
            self.pending.push(format!("base stage: variables {}; {}", tw.names().join(", "), describe_mode(&tw)));
            self.pending.extend(tw.notes().iter().map(|n| format!("note {n}")));
            self.stage = Some(Stage::Tower(tw));
        }
        match &self.stage {
            Some(Stage::Tower(tw)) => Ok(tw),
            _ => Err(Error::InvalidArgument("no domain declared".into())),
        }
    }

    fn execute(&mut self, index: usize, stmt: &Statement) -> hidpos::Result<Step> {
        let res = self.execute_inner(index, stmt);
        let mut head = std::mem::take(&mut self.pending);
        let mut step = res?;
        head.append(&mut step.details);
        step.details = head;
        Ok(step)
    }

    fn execute_inner(&mut self, index: usize, stmt: &Statement) -> hidpos::Result<Step> {
        match &stmt.kind {
            StmtKind::Domain { vars, bounds, constraints, exclusions } => {
                let mut dom = DomainDescription::new(vars.clone());
                dom = match bounds {
                    Bounds::Box(b) => dom.with_box(b.clone()),
                    Bounds::Window(w) => dom.with_window(w.clone()),
                };
                for c in constraints {
                    dom = dom.with_constraint(Polynomial::parse(&c.text, vars)?);
                }
                for e in exclusions {
                    dom = dom.with_exclusion(Polynomial::parse(&e.text, vars)?);
                }
                self.stage = Some(Stage::Base { spec: BaseSpec::new(dom), scope: vars.clone() });
                Ok(Step::ok(vec![]))
            }
            StmtKind::Coords(cs) => {
                let (spec, scope) = self.base()?;
                let dnames = spec.domain.names.clone();
                spec.coords = cs
                    .iter()
                    .map(|(n, e)| {
                        let c = match Polynomial::parse(&e.text, &dnames) {
                            Ok(p) => BaseCoord::Poly(p),
                            Err(_) => BaseCoord::Map(ScalarExpr::parse(&e.text, &dnames)?),
                        };
                        Ok((n.clone(), c))
                    })
                    .collect::<hidpos::Result<_>>()?;
                *scope = cs.iter().map(|(n, _)| n.clone()).collect();
                Ok(Step::ok(vec![]))
            }
            StmtKind::Relation(e) => {
                if let Some(Stage::Base { spec, scope }) = &mut self.stage {
                    spec.relations.push(Polynomial::parse(&e.text, scope)?);
                    return Ok(Step::ok(vec![]));
                }
                let tw = self.tower()?;
                let next = tw.add_relation(&tw.parse_poly(&e.text)?)?;
                self.advance(next)
            }
            StmtKind::BaseGen { poly, check } => {
                let (spec, scope) = self.base()?;
                let p = Polynomial::parse(&poly.text, scope)?;
                spec.gens.push((p, *check));
                Ok(Step::ok(vec![]))
            }
            StmtKind::BallBound(b) => {
                self.base()?.0.ball_bound = Some(b.clone());
                Ok(Step::ok(vec![]))
            }
            StmtKind::AssumeMode(m) => {
                self.base()?.0.assumed_mode = Some(*m);
                Ok(Step::ok(vec![]))
            }
            StmtKind::Adjoin { name, kind, force } => {
                let force = *force || self.config.force;
                let tw = self.tower()?;
                let p = |e: &crate::script::Expr| tw.parse_poly(&e.text);
                let next = match kind {
                    AdjoinKind::OddRoot { g, r } => tw.adjoin_odd_root(name, &p(g)?, *r)?,
                    AdjoinKind::EvenRoot { g, s } => tw.adjoin_even_root(name, &p(g)?, *s)?,
                    AdjoinKind::Recip { g, bound } => tw.adjoin_reciprocal(name, &p(g)?, bound.clone())?,
                    AdjoinKind::Piecewise { g, h, q, mode } => tw.adjoin_piecewise(name, &p(g)?, &p(h)?, &p(q)?, *mode, force)?,
                    AdjoinKind::Chi { q, variant } => tw.adjoin_characteristic(name, &p(q)?, *variant, force)?,
                };
                self.advance(next)
            }
            StmtKind::AddGen { poly, check, assert } => {
                let tw = self.tower()?;
                let next = tw.add_generator(&tw.parse_poly(&poly.text)?, *check, *assert)?;
                self.advance(next)
            }
            StmtKind::Exclude { point, eps } => {
                let next = exclude_point(self.tower()?, point, eps)?;
                self.advance(next)
            }
            StmtKind::Explore { samples, delta, seed } => {
                let tw = self.tower()?;
                let base = GapOptions::from_tower(tw);
                let opts = GapOptions {
                    n: samples.unwrap_or(base.n),
                    delta: delta.unwrap_or(base.delta),
                    seed: seed.unwrap_or(base.seed),
                    ..base
                };
                let (rep, image, variety) = gap_analysis(tw, &opts)?;
                self.artifacts.image = Some(image);
                self.artifacts.variety = Some(variety);
                Ok(Step::ok(rep.to_string().lines().map(str::to_string).collect()))
            }
            StmtKind::Certify { poly, eps, dmax } => {
                let config = self.config;
                let tw = self.tower()?;
                let f = tw.parse_poly(&poly.text)?;
                let eps = eps.clone().unwrap_or_else(|| config.eps.clone());
                let dmax = dmax.unwrap_or(config.dmax);
                let out = certify_positivity(tw, &f, &eps, dmax)?;
                let mut details: Vec<String> = out.to_string().lines().map(str::to_string).collect();
                match out {
                    CertifyOutcome::Certified { certificate, .. } => {
                        let sizes: Vec<String> = certificate.blocks.iter().map(|b| b.basis.len().to_string()).collect();
                        details.push(format!(
                            "certificate: {} blocks, basis sizes {}, rationalized {}",
                            certificate.blocks.len(),
                            sizes.join(" "),
                            certificate.rationalized
                        ));
                        self.artifacts.certificates.push((index, certificate));
                        Ok(Step::ok(details))
                    }
                    CertifyOutcome::Failure { .. } => Ok(Step { details, certified: false }),
                }
            }
            StmtKind::Report => {
                let tw = self.tower()?;
                Ok(Step::ok(summary(tw)))
            }
        }
    }

    fn advance(&mut self, next: TowerState) -> hidpos::Result<Step> {
        let prev = match &self.stage {
            Some(Stage::Tower(tw)) => tw.clone(),
            _ => unreachable!("advance needs a tower"),
        };
        let mut details = new_notes(&prev, &next);
        details.push(describe_mode(&next));
        self.stage = Some(Stage::Tower(next));
        Ok(Step::ok(details))
    }
}

/// Variables, relations, generators and witness of a tower.
fn summary(tw: &TowerState) -> Vec<String> {
    let mut out = Vec::new();
    let vars: Vec<String> = tw.symbols().iter().map(|s| format!("{}:{}", s.name, s.kind.tag())).collect();
    out.push(format!("variables {}", vars.join(" ")));
    for g in tw.ideal().generators() {
        out.push(format!("ideal {}", tw.display(g)));
    }
    for g in &tw.qmodule().generators {
        out.push(format!("generator {} [{}]", tw.display(&g.poly), g.provenance));
    }
    out.push(describe_mode(tw));
    out.extend(tw.archimedean_status().to_string().lines().skip(1).map(|l| format!("witness {}", l.trim())));
    out
}
