//! Exact polynomial arithmetic, Gröbner bases and univariate sign analysis.

pub mod groebner;
pub mod monomial;
pub mod order;
pub mod polynomial;
pub mod rational;
pub mod univariate;

pub use groebner::{buchberger, normal_form, s_polynomial, standard_monomials, GroebnerBasis, NormalFormCache};
pub use monomial::Monomial;
pub use order::TermOrder;
pub use polynomial::{poly_arith, ArithOp, Polynomial};
pub use rational::Rational;
pub use univariate::{sturm_profile, IsolatedRoot, SignPiece, SignProfile, UniPoly};
