use crate::error::{Error, Result};
use crate::linalg::{fix_phase, kron_vec, numerical_rank, reshape, svd, Svd};
use crate::subspace::ToleranceConfig;
use crate::tensor::{FactoredDims, Ket};
use crate::{CVector, C64};

/// `x ≈ scale · left ⊗ right`, both factors phase-fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFactors {
    pub left: Ket,
    pub right: Ket,
    pub scale: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub factorable: bool,
    /// Singular values of the `d1 × d2` reshape, descending.
    pub schmidt_values: Vec<f64>,
    pub factors: Option<ProductFactors>,
}

fn split_dims(split: &FactoredDims, len: usize) -> Result<(usize, usize)> {
    if split.count() != 2 {
        return Err(Error::InvalidDims(format!(
            "factorability needs a two-factor split, got {:?}",
            split.as_slice()
        )));
    }
    if split.total() != len {
        return Err(Error::DimensionMismatch {
            expected: split.total(),
            found: len,
        });
    }
    Ok((split.factor(0), split.factor(1)))
}

/// Singular values of the row-major reshape of `x` over `split`.
pub fn schmidt_values(x: &CVector, split: &FactoredDims) -> Result<Vec<f64>> {
    let (d1, d2) = split_dims(split, x.len())?;
    Ok(svd(&reshape(x, d1, d2)).s)
}

/// Schmidt-rank-one test: factorable iff `σ₂ < ε_rank · σ₁`.
pub fn is_factorable(
    x: &Ket,
    split: &FactoredDims,
    tol: &ToleranceConfig,
) -> Result<Factorization> {
    let (d1, d2) = split_dims(split, x.dim())?;
    let Svd { u, s, v } = svd(&reshape(x.amplitudes(), d1, d2));
    let factorable = numerical_rank(&s, tol.rank) == 1;
    let factors = factorable.then(|| {
        let mut left = u.column(0).into_owned();
        // M = Σ σ u v†, so the right factor is conj(v)
        let mut right = v.column(0).map(|z| z.conj());
        fix_phase(&mut left, tol.rank);
        fix_phase(&mut right, tol.rank);
        let scale = kron_vec(&left, &right).dotc(x.amplitudes());
        ProductFactors {
            left: Ket::from_unit(left),
            right: Ket::from_unit(right),
            scale,
        }
    });
    Ok(Factorization {
        factorable,
        schmidt_values: s,
        factors,
    })
}
