pub mod certificate;
pub mod certify;
pub mod relaxation;
pub mod sdp;

pub use certificate::{
    absorb_residual, certificate_from_grams, certificate_residual, exact_psd, extract_certificate, rationalize_certificate, verify_certificate, Certificate,
    ClaimedProperty, GramBlock, VerificationLevel, VerificationReport,
};
pub use certify::{centered_certificate, certify_positivity, lower_bound, Attempt, CertifyOutcome, LowerBound};
pub use relaxation::{build_relaxation, build_relaxation_capped, RelaxationBlock, RelaxationProblem, DEFAULT_MONOMIAL_CAP};
pub use sdp::{solve_sdp, SdpOptions, SdpProblem, SdpSolution, SdpStatus, SparseSym};
