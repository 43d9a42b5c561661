//! Numerical checks of the integral lemmas and connection bounds.

mod connection;
pub mod lemmas;
pub mod quadrature;
mod report;

pub use lemmas::{
    default_grid, lemma_integral, verify_appendix_lemma, verify_appendix_lemma_with, verify_default_grid, Lemma,
    LemmaPoint, VerifyOptions,
};
pub use report::{Method, Relation, VerificationReport};
pub use connection::{
    i_rho_details, random_admissible_configuration, two_connection_detail, two_connection_threshold, verify_i_rho,
    verify_two_connection, IRhoReport, TwoConnectionDetail,
};
