//! Factorability, decomposition matching, blind extraction and instance
//! generation.

mod demo;
mod extract;
mod factorable;
mod generate;
mod matching;

pub use demo::{demo_degeneracy, DegeneracyReport};
pub use extract::{
    extract_decomposition, ExtractionReport, ExtractionSide, ACCEPTANCE_ERROR, MAX_RETRIES,
};
pub use factorable::{is_factorable, schmidt_values, Factorization, ProductFactors};
pub use generate::{generate_instance, generate_tri_instance, twin_bi, twin_tri, Profile};
pub use matching::{
    match_bidecomposition, match_tridecomposition, MatchResult, TermCertificate, WEIGHT_TOL,
};
