//! Positivity certificates for finitely generated algebras of real functions.
//!
//! A tower of algebras is built by adjoining roots, reciprocals, piecewise
//! functions and characteristic functions to a polynomial algebra on a domain
//! `X`. Each step extends the presentation ideal, the quadratic-module
//! generators and the archimedean witness. The [`explore`] module compares the
//! sampled image `m(X)` against the algebraic positivity set `K_{Q,Y}`, and the
//! [`sos`] module searches for and verifies sum-of-squares certificates with a
//! built-in semidefinite solver.

pub mod algebra;
pub mod error;
pub mod explore;
pub mod expr;
pub mod sos;
pub mod tower;

pub use algebra::{GroebnerBasis, Monomial, Polynomial, Rational, TermOrder};
pub use error::{Error, Result};
pub use explore::{gap_report, image_cloud, sample_variety, GapOptions, GapReport, GapVerdict, PointCloud};
pub use sos::{certify_positivity, lower_bound, verify_certificate, Certificate, CertifyOutcome, VerificationReport};
pub use tower::{BaseSpec, CharVariant, Mode, SamplingConfig, TowerState};
