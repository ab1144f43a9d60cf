//! Unique sum-of-products decompositions of bipartite state operators and
//! tripartite vectors.
//!
//! A state operator of the form `ρ = Σⱼ wⱼ |aⱼ⟩⟨aⱼ| ⊗ |bⱼ⟩⟨bⱼ|`, with both ket
//! sets non-collinear and one of them linearly independent, has exactly one
//! such decomposition up to term order and per-ket phases. This crate builds
//! those operators, extracts the decomposition back out of a bare `ρ`, and
//! certifies equivalence of two decompositions by lifting them to tripartite
//! vectors and matching term-by-term.
//!
//! Composite indices are row-major throughout: for `H1 ⊗ H2` the first factor
//! is the slow index, `|x⟩ ⊗ |y⟩` has amplitude `x[j]·y[k]` at `j·dim(y) + k`.

pub mod decomp;
pub mod error;
pub(crate) mod linalg;
pub mod purification;
pub mod subspace;
pub mod tensor;

pub use decomp::{
    demo_degeneracy, extract_decomposition, generate_instance, generate_tri_instance,
    is_factorable, match_bidecomposition, match_tridecomposition, schmidt_values, twin_bi,
    twin_tri, DegeneracyReport, ExtractionReport, ExtractionSide, Factorization, MatchResult,
    ProductFactors, Profile, TermCertificate,
};
pub use error::{Error, ErrorKind, Result};
pub use purification::{apply_on_factor, purify, relating_unitary, UnitaryMatrix};
pub use subspace::{
    dual_basis, find_collinear_pair, is_collinear, is_noncollinear_set, rank_and_independence,
    support_and_null, RankReport, SubspaceBasis, ToleranceConfig,
};
pub use tensor::{
    build_rho, build_tri_vector, partial_trace, tensor_product, FactoredDims, Ket,
    ProductDecomposition, ProductTerm, StateOperator, TriDecomposition, TriTerm, TriVector,
};

/// Complex scalar used everywhere.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
