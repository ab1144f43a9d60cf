//! Blind recovery of `ρ = Σⱼ wⱼ |aⱼ⟩⟨aⱼ| ⊗ |bⱼ⟩⟨bⱼ|` from `ρ` alone.
//!
//! Two probes `X₁, X₂` on the second factor give contractions
//! `Mᵢ = Tr₂[ρ (I ⊗ Xᵢ)] = A diag(wⱼ⟨bⱼ|Xᵢ|bⱼ⟩) A†`, which share the
//! non-orthogonal eigenvectors `aⱼ` of `M₁ M₂⁺`. `X₂` is drawn positive
//! definite, so `M₂` can be whitened on the support of `Tr₂ ρ` and the
//! problem becomes a Hermitian eigendecomposition of `T M₁ T†` with
//! eigenvalues `⟨bⱼ|X₁|bⱼ⟩ / ⟨bⱼ|X₂|bⱼ⟩`. Given the `aⱼ`, their dual basis
//! isolates `wⱼ |bⱼ⟩⟨bⱼ| = (ãⱼ† ⊗ I) ρ (ãⱼ ⊗ I)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, fix_phase, hermitian_eigen, random_hermitian};
use crate::subspace::{dual_basis, support_and_null, ToleranceConfig};
use crate::tensor::{build_rho, Ket, ProductDecomposition, ProductTerm, StateOperator};
use crate::{CMatrix, CVector};

/// Fresh probe draws per side after the first attempt.
pub const MAX_RETRIES: usize = 8;
/// Largest relative Frobenius reconstruction error accepted as success.
pub const ACCEPTANCE_ERROR: f64 = 1e-6;

/// Which factor carried the linearly independent set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractionSide {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionReport {
    pub decomposition: ProductDecomposition,
    /// `‖build_rho(decomposition) − ρ‖_F / ‖ρ‖_F`.
    pub reconstruction_error: f64,
    pub probes_used: usize,
    pub side: ExtractionSide,
}

/// `Tr₂[ρ (I ⊗ X)]`.
fn contract_second(rho: &CMatrix, d1: usize, d2: usize, x: &CMatrix) -> CMatrix {
    CMatrix::from_fn(d1, d1, |a, ap| {
        let mut acc = c(0.0, 0.0);
        for b in 0..d2 {
            for bp in 0..d2 {
                acc += rho[(a * d2 + b, ap * d2 + bp)] * x[(bp, b)];
            }
        }
        acc
    })
}

/// `(v† ⊗ I) ρ (v ⊗ I)` on the second factor.
fn sandwich_first(rho: &CMatrix, d1: usize, d2: usize, v: &CVector) -> CMatrix {
    CMatrix::from_fn(d2, d2, |b, bp| {
        let mut acc = c(0.0, 0.0);
        for a in 0..d1 {
            for ap in 0..d1 {
                acc += v[a].conj() * rho[(a * d2 + b, ap * d2 + bp)] * v[ap];
            }
        }
        acc
    })
}

/// Hermitian probe with spectrum in `[0.5, 1.5]`.
fn positive_probe(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let h = random_hermitian(rng, dim);
    let (vals, _) = hermitian_eigen(&h);
    let spread = vals
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    CMatrix::identity(dim, dim) + h.scale(0.5 / spread)
}

enum Attempt {
    Done(ProductDecomposition, f64),
    Retry(String),
}

/// One probe draw with the independent set assumed on the first factor.
fn attempt(
    rho: &StateOperator,
    support: &CMatrix,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Result<Attempt> {
    let (d1, d2) = (rho.dims().factor(0), rho.dims().factor(1));
    let n = support.ncols();
    let m = rho.matrix();

    let x1 = random_hermitian(rng, d2);
    let x2 = positive_probe(rng, d2);
    let m1 = support.adjoint() * contract_second(m, d1, d2, &x1) * support;
    let m2 = support.adjoint() * contract_second(m, d1, d2, &x2) * support;

    let (lambda, e) = hermitian_eigen(&m2);
    let floor = tol.rank * lambda[0];
    if lambda[n - 1] <= floor {
        return Ok(Attempt::Retry(format!(
            "second probe contraction is singular on the support (λ_min = {:.3e})",
            lambda[n - 1]
        )));
    }
    let whiten = CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        lambda.iter().map(|&l| c(l.powf(-0.5), 0.0)),
    )) * e.adjoint();
    let unwhiten = &e
        * CMatrix::from_diagonal(&CVector::from_iterator(
            n,
            lambda.iter().map(|&l| c(l.sqrt(), 0.0)),
        ));
    let h = &whiten * m1 * whiten.adjoint();
    let (mu, q) = hermitian_eigen(&h);
    let gap = mu
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    if gap < 1e3 * tol.rank {
        return Ok(Attempt::Retry(format!(
            "probe responses nearly degenerate (gap {gap:.3e})"
        )));
    }

    let directions = support * unwhiten * q;
    let a: Vec<Ket> = directions
        .column_iter()
        .map(|col| Ket::new(col.into_owned()))
        .collect::<Result<_>>()?;
    let duals = match dual_basis(&a, tol) {
        Ok(d) => d,
        Err(e) => return Ok(Attempt::Retry(e.to_string())),
    };

    let mut terms = Vec::with_capacity(n);
    for (aj, dual) in a.iter().zip(&duals) {
        let block = sandwich_first(m, d1, d2, dual);
        let weight = block.trace().re;
        if weight.is_nan() || weight <= 0.0 {
            return Ok(Attempt::Retry(format!(
                "recovered weight {weight:.3e} is not positive"
            )));
        }
        let (_, vecs) = hermitian_eigen(&block);
        let mut b = vecs.column(0).into_owned();
        fix_phase(&mut b, tol.rank);
        terms.push(ProductTerm {
            weight,
            a: aj.canonical(tol.rank),
            b: Ket::new(b)?,
        });
    }
    let decomposition = match ProductDecomposition::new(rho.dims().clone(), terms, tol) {
        Ok(d) => d,
        Err(e) => return Ok(Attempt::Retry(e.to_string())),
    };
    let error = build_rho(&decomposition).relative_distance(rho);
    if error > ACCEPTANCE_ERROR {
        return Ok(Attempt::Retry(format!("reconstruction error {error:.3e}")));
    }
    Ok(Attempt::Done(decomposition, error))
}

/// Recovers the product decomposition of `ρ`, trying the first factor as
/// the independent side and then the second. Each side gets one probe draw
/// plus up to [`MAX_RETRIES`] redraws. All randomness comes from `seed`.
pub fn extract_decomposition(
    rho: &StateOperator,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<ExtractionReport> {
    if rho.dims().count() != 2 {
        return Err(Error::InvalidDims(format!(
            "extraction needs a bipartite operator, got {:?}",
            rho.dims().as_slice()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes_used = 0;
    let mut reasons = Vec::new();
    for side in [ExtractionSide::First, ExtractionSide::Second] {
        let oriented = match side {
            ExtractionSide::First => rho.clone(),
            ExtractionSide::Second => rho.swap_factors()?,
        };
        let (support, _) = support_and_null(&oriented, 0, tol)?;
        if support.dim() == 0 {
            return Err(Error::NotExtractable("operator is zero".into()));
        }
        let basis = CMatrix::from_columns(
            &support
                .vectors
                .iter()
                .map(|k| k.amplitudes().clone())
                .collect::<Vec<_>>(),
        );
        let mut last = String::new();
        for _ in 0..=MAX_RETRIES {
            probes_used += 1;
            match attempt(&oriented, &basis, &mut rng, tol)? {
                Attempt::Done(d, reconstruction_error) => {
                    let decomposition = match side {
                        ExtractionSide::First => d,
                        ExtractionSide::Second => d.swapped(),
                    };
                    return Ok(ExtractionReport {
                        decomposition,
                        reconstruction_error,
                        probes_used,
                        side,
                    });
                }
                Attempt::Retry(why) => last = why,
            }
        }
        reasons.push(format!("{side:?} side: {last}"));
    }
    Err(Error::NotExtractable(reasons.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::generate::{generate_instance, Profile};
    use crate::decomp::matching::match_bidecomposition;
    use crate::tensor::FactoredDims;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn two_term_example_is_recovered() {
        let e = |i| Ket::basis(2, i);
        let truth = ProductDecomposition::new(
            FactoredDims::bipartite(2, 2).unwrap(),
            vec![
                ProductTerm {
                    weight: 0.5,
                    a: e(0),
                    b: e(0),
                },
                ProductTerm {
                    weight: 0.5,
                    a: e(1),
                    b: e(1),
                },
            ],
            &tol(),
        )
        .unwrap();
        let rep = extract_decomposition(&build_rho(&truth), &tol(), 1).unwrap();
        assert_eq!(rep.decomposition.len(), 2);
        assert!(rep.reconstruction_error < 1e-12);
        let m = match_bidecomposition(&truth, &rep.decomposition, &tol()).unwrap();
        assert!(m.residual < 1e-8);
    }

    #[test]
    fn product_projector_gives_one_term() {
        let a = Ket::from_real(&[1.0, 2.0, 2.0]).unwrap();
        let b = Ket::from_slice(&[c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        let dims = FactoredDims::bipartite(3, 2).unwrap();
        let truth =
            ProductDecomposition::new(dims, vec![ProductTerm { weight: 1.0, a, b }], &tol())
                .unwrap();
        let rep = extract_decomposition(&build_rho(&truth), &tol(), 3).unwrap();
        assert_eq!(rep.decomposition.len(), 1);
        assert!((rep.decomposition.terms()[0].weight - 1.0).abs() < 1e-12);
        assert_eq!(rep.probes_used, 1);
    }

    #[test]
    fn b_side_only_needs_swap() {
        let truth = generate_instance(4, 3, 5, 17, Profile::BIndependentOnly).unwrap();
        let rep = extract_decomposition(&build_rho(&truth), &tol(), 5).unwrap();
        assert_eq!(rep.side, ExtractionSide::Second);
        assert!(rep.probes_used > MAX_RETRIES);
        match_bidecomposition(&truth, &rep.decomposition, &tol()).unwrap();
    }

    #[test]
    fn maximally_mixed_is_not_extractable() {
        let dims = FactoredDims::bipartite(2, 2).unwrap();
        let rho = StateOperator::new(dims, CMatrix::identity(4, 4).scale(0.25)).unwrap();
        let err = extract_decomposition(&rho, &tol(), 0).unwrap_err();
        assert!(matches!(err, Error::NotExtractable(_)));
    }
}
