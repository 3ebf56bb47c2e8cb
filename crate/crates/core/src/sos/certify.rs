use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use super::certificate::{
    certificate_from_grams, extract_certificate, rationalize_certificate, verify_certificate, Certificate, VerificationReport,
};
use super::relaxation::{build_relaxation, RelaxationProblem};
use super::sdp::{solve_sdp, SdpOptions, SdpSolution, SdpStatus};
use crate::algebra::rational::{self, Rational};
use crate::algebra::{normal_form, Polynomial};
use crate::error::{Error, Result};
use crate::explore::compiled::CompiledPoly;
use crate::explore::image::image_cloud;
use crate::tower::TowerState;

/// Numeric lower bound `lambda_d` with `f - lambda_d` in the degree-`d`
/// truncation of the quadratic module (modulo the ideal).
#[derive(Clone, Debug)]
pub struct LowerBound {
    /// `-inf` when the relaxation is infeasible.
    pub value: f64,
    pub solution: SdpSolution,
    pub relaxation: RelaxationProblem,
}

pub fn lower_bound(tw: &TowerState, f: &Polynomial, d: u32) -> Result<LowerBound> {
    let relaxation = build_relaxation(tw, &f.extended(tw.nvars()), d)?;
    let solution = solve_sdp(&relaxation.to_sdp(), &SdpOptions::default());
    let value = match solution.status {
        SdpStatus::Infeasible => f64::NEG_INFINITY,
        SdpStatus::Unbounded => {
            return Err(Error::Solver("relaxation dual is unbounded".into()));
        }
        _ => rational::to_f64(relaxation.constant_term()) - solution.primal_objective,
    };
    Ok(LowerBound { value, solution, relaxation })
}

/// One relaxation degree tried by [`certify_positivity`].
#[derive(Clone, Debug, PartialEq)]
pub struct Attempt {
    pub degree: u32,
    /// `lambda_d + eps`; negative means the degree cannot certify.
    pub margin: f64,
    /// Residual norm of the extracted certificate, if one was extracted.
    pub residual: Option<f64>,
}

#[derive(Clone, Debug)]
pub enum CertifyOutcome {
    Certified { certificate: Certificate, report: VerificationReport },
    Failure { d_max: u32, best_residual: Option<f64>, trajectory: Vec<Attempt>, witness: Option<Vec<f64>> },
}

impl CertifyOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            CertifyOutcome::Certified { certificate, .. } => Some(certificate),
            CertifyOutcome::Failure { .. } => None,
        }
    }

    pub fn report(&self) -> Option<&VerificationReport> {
        match self {
            CertifyOutcome::Certified { report, .. } => Some(report),
            CertifyOutcome::Failure { .. } => None,
        }
    }
}

impl fmt::Display for CertifyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyOutcome::Certified { report, .. } => write!(f, "certified: {report}"),
            CertifyOutcome::Failure { d_max, best_residual, trajectory, witness } => {
                write!(f, "failure up to degree {d_max}")?;
                if let Some(r) = best_residual {
                    write!(f, "; best residual {r:.3e}")?;
                }
                if let Some(w) = witness {
                    let c: Vec<String> = w.iter().map(|v| format!("{v:.6}")).collect();
                    write!(f, "; negative at ({})", c.join(", "))?;
                }
                for a in trajectory {
                    write!(f, "\n  degree {} margin {:.3e}", a.degree, a.margin)?;
                    if let Some(r) = a.residual {
                        write!(f, " residual {r:.3e}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Searches for a certificate of `f + eps >= 0` on the tower's semialgebraic
/// set, raising the relaxation degree up to `d_max`.
pub fn certify_positivity(tw: &TowerState, f: &Polynomial, eps: &Rational, d_max: u32) -> Result<CertifyOutcome> {
    if eps.is_negative() {
        return Err(Error::InvalidArgument("eps must be nonnegative".into()));
    }
    if !tw.is_archimedean() {
        return Err(Error::NotArchimedean(
            "the quadratic module has no archimedean witness; add a ball constraint".into(),
        ));
    }
    let n = tw.nvars();
    let f = f.extended(n);
    let cfg = tw.config();
    let shifted = &f + &Polynomial::constant(n, eps.clone());
    let cp = CompiledPoly::new(&shifted);
    let cloud = image_cloud(tw, cfg.samples, cfg.seed)?;
    let worst = cloud.points.iter().map(|p| (cp.eval(p), p)).min_by(|a, b| a.0.total_cmp(&b.0));
    if let Some((v, p)) = worst {
        if v < -1e-9 {
            return Ok(CertifyOutcome::Failure {
                d_max,
                best_residual: None,
                trajectory: vec![],
                witness: Some(p.clone()),
            });
        }
    }

    let start = normal_form(&f, tw.ideal()).total_degree().div_ceil(2).max(1);
    let max_den = BigInt::from(1u64 << 32);
    let mut trajectory = Vec::new();
    let mut best_residual: Option<f64> = None;
    for d in start..=d_max {
        let lb = match lower_bound(tw, &f, d) {
            Ok(lb) => lb,
            Err(Error::RelaxationTooLarge { count, cap }) => {
                log::warn!("degree {d}: {count} moments exceeds cap {cap}");
                break;
            }
            Err(e) => return Err(e),
        };
        let margin = lb.value + rational::to_f64(eps);
        if margin.is_nan() || margin < -1e-9 {
            trajectory.push(Attempt { degree: d, margin, residual: None });
            continue;
        }
        let numeric = match extract_certificate(tw, &lb.relaxation, &lb.solution, eps) {
            Ok(c) => {
                let report = verify_certificate(tw, &f, &c)?;
                best_residual = Some(best_residual.map_or(report.residual, |b: f64| b.min(report.residual)));
                trajectory.push(Attempt { degree: d, margin, residual: Some(report.residual) });
                if !report.is_refuted() && report.residual <= 1e-3 {
                    if let Some(done) = exact_outcome(tw, &f, &c, &max_den)? {
                        return Ok(done);
                    }
                }
                Some((c, report))
            }
            Err(e) => {
                log::debug!("degree {d}: {e}");
                trajectory.push(Attempt { degree: d, margin, residual: None });
                None
            }
        };
        if margin > 1e-7 {
            match centered_certificate(tw, &lb.relaxation, lb.value - margin / 2.0, eps) {
                Ok(c) => {
                    if let Some(done) = exact_outcome(tw, &f, &c, &max_den)? {
                        return Ok(done);
                    }
                }
                Err(e) => log::debug!("degree {d}: centered solve: {e}"),
            }
        }
        if let Some((certificate, report)) = numeric {
            if !report.is_refuted() && report.residual <= 1e-6 {
                return Ok(CertifyOutcome::Certified { certificate, report });
            }
        }
    }
    Ok(CertifyOutcome::Failure { d_max, best_residual, trajectory, witness: None })
}

fn exact_outcome(tw: &TowerState, f: &Polynomial, cert: &Certificate, max_den: &BigInt) -> Result<Option<CertifyOutcome>> {
    let Ok(exact) = rationalize_certificate(tw, f, cert, max_den) else { return Ok(None) };
    let report = verify_certificate(tw, f, &exact)?;
    Ok(report.is_exact().then_some(CertifyOutcome::Certified { certificate: exact, report }))
}

/// Certificate from the analytic center of the Gram matrices for
/// `f - lambda`; strictly below the optimum this point is interior and
/// survives rounding better than the optimal face.
pub fn centered_certificate(tw: &TowerState, relax: &RelaxationProblem, lambda: f64, eps: &Rational) -> Result<Certificate> {
    let sol = solve_sdp(&relax.to_feasibility_sdp(lambda), &SdpOptions::default());
    if !matches!(sol.status, SdpStatus::Optimal | SdpStatus::Inaccurate) || sol.primal_residual > 1e-6 {
        return Err(Error::Solver(format!("centered solve ended {:?}", sol.status)));
    }
    certificate_from_grams(tw, relax, &sol.x, eps)
}
