//! Collinearity, rank, support/null spaces and dual bases.
//!
//! "Distinct 1-projectors" and "non-collinear" are the same condition here:
//! `|a⟩⟨a| = |b⟩⟨b|` exactly when `|a⟩ = e^{iα}|b⟩`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, numerical_rank, pinv, svd};
use crate::tensor::{partial_trace, Ket, StateOperator};
use crate::{CMatrix, CVector};

/// Numerical thresholds for every predicate in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Two unit kets are collinear when `|⟨x|y⟩| ≥ 1 − collinear`.
    pub collinear: f64,
    /// Singular values below `rank · σ_max` count as zero.
    pub rank: f64,
    /// Relative tolerance for operator and vector equality.
    pub equality: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            collinear: 1e-8,
            rank: 1e-8,
            equality: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn new(collinear: f64, rank: f64, equality: f64) -> Result<Self> {
        let out = Self {
            collinear,
            rank,
            equality,
        };
        out.validate()?;
        Ok(out)
    }

    /// All three thresholds set to `tol`.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol, tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("collinear", self.collinear),
            ("rank", self.rank),
            ("equality", self.equality),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {v} not in (0, 1)"
                )));
            }
        }
        if self.rank < 100.0 * f64::EPSILON {
            return Err(Error::InvalidTolerance(format!(
                "rank = {} below 100 machine epsilons",
                self.rank
            )));
        }
        Ok(())
    }
}

/// Orthonormal basis of a subspace of `C^ambient_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    pub vectors: Vec<Ket>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        let mut p = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for v in &self.vectors {
            p += v.projector();
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub independent: bool,
}

fn check_same_dim(x: &Ket, y: &Ket) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

/// `|x⟩ = e^{iα}|y⟩` up to tolerance, i.e. `|⟨x|y⟩| ≥ 1 − ε_col`.
pub fn is_collinear(x: &Ket, y: &Ket, tol: &ToleranceConfig) -> Result<bool> {
    check_same_dim(x, y)?;
    Ok(x.inner(y).norm() >= 1.0 - tol.collinear)
}

/// First collinear pair `(i, j)` with `i < j`, 0-based.
pub fn find_collinear_pair(set: &[Ket], tol: &ToleranceConfig) -> Result<Option<(usize, usize)>> {
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            if is_collinear(&set[i], &set[j], tol)? {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

pub fn is_noncollinear_set(set: &[Ket], tol: &ToleranceConfig) -> Result<bool> {
    Ok(find_collinear_pair(set, tol)?.is_none())
}

/// Columns are the kets of `set`.
pub(crate) fn stack(set: &[Ket]) -> CMatrix {
    let cols: Vec<CVector> = set.iter().map(|k| k.amplitudes().clone()).collect();
    CMatrix::from_columns(&cols)
}

fn check_common_dim(set: &[Ket]) -> Result<()> {
    let Some(first) = set.first() else {
        return Err(Error::InvalidDims("empty ket set".into()));
    };
    for k in &set[1..] {
        check_same_dim(first, k)?;
    }
    Ok(())
}

/// Numerical rank of the stacked matrix, cutoff `ε_rank · σ_max`.
pub fn rank_and_independence(set: &[Ket], tol: &ToleranceConfig) -> Result<RankReport> {
    check_common_dim(set)?;
    let s = svd(&stack(set)).s;
    let rank = numerical_rank(&s, tol.rank);
    Ok(RankReport {
        rank,
        independent: rank == set.len(),
    })
}

/// Support and null space of `ρ` on one factor, from the reduced operator.
/// Eigenvectors with eigenvalue below `ε_rank · λ_max` span the null space.
pub fn support_and_null(
    rho: &StateOperator,
    subsystem: usize,
    tol: &ToleranceConfig,
) -> Result<(SubspaceBasis, SubspaceBasis)> {
    let reduced = if rho.dims().count() == 1 {
        if subsystem != 0 {
            return Err(Error::InvalidSubsystem(format!("factor {subsystem} of 1")));
        }
        rho.clone()
    } else {
        partial_trace(rho, &[subsystem])?
    };
    let (values, vectors) = hermitian_eigen(reduced.matrix());
    let d = values.len();
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let rank = values
        .iter()
        .filter(|&&x| top > 0.0 && x >= tol.rank * top)
        .count();
    let col = |k: usize| Ket::from_unit(vectors.column(k).into_owned());
    Ok((
        SubspaceBasis {
            ambient_dim: d,
            vectors: (0..rank).map(col).collect(),
        },
        SubspaceBasis {
            ambient_dim: d,
            vectors: (rank..d).map(col).collect(),
        },
    ))
}

/// Vectors `ãᵢ` in `span(set)` with `⟨ãᵢ|aⱼ⟩ = δᵢⱼ`, taken from the
/// pseudoinverse of the stacked matrix.
pub fn dual_basis(set: &[Ket], tol: &ToleranceConfig) -> Result<Vec<CVector>> {
    let r = rank_and_independence(set, tol)?;
    if !r.independent {
        return Err(Error::NoDualBasis {
            rank: r.rank,
            count: set.len(),
        });
    }
    let p = pinv(&stack(set), tol.rank);
    Ok((0..set.len()).map(|i| p.row(i).adjoint()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, frobenius};
    use crate::tensor::{build_rho, FactoredDims, ProductDecomposition, ProductTerm};
    use crate::C64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn k(v: &[f64]) -> Ket {
        Ket::from_real(v).unwrap()
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::uniform(1e-8).is_ok());
        assert!(ToleranceConfig::uniform(0.0).is_err());
        assert!(ToleranceConfig::uniform(1.0).is_err());
        assert!(ToleranceConfig::new(1e-8, 1e-15, 1e-8).is_err());
    }

    #[test]
    fn collinear_examples() {
        let x = k(&[1.0, 0.0]);
        let y = Ket::from_slice(&[C64::from_polar(1.0, PI / 3.0), c(0.0, 0.0)]).unwrap();
        assert!(is_collinear(&x, &y, &tol()).unwrap());
        assert!(!is_collinear(&x, &k(&[0.0, 1.0]), &tol()).unwrap());
        assert!(is_collinear(&x, &k(&[1.0, 0.0, 0.0]), &tol()).is_err());
    }

    #[test]
    fn collinear_threshold_band() {
        // |⟨x|y⟩| = 1 − 2ε: δ = sqrt(1 − (1 − 2ε)²) = sqrt(4ε − 4ε²)
        let eps = tol().collinear;
        let delta = (4.0 * eps - 4.0 * eps * eps).sqrt();
        let x = k(&[1.0, 0.0]);
        let y = Ket::from_slice(&[c((1.0 - delta * delta).sqrt(), 0.0), c(delta, 0.0)]).unwrap();
        assert!((x.inner(&y).norm() - (1.0 - 2.0 * eps)).abs() < 1e-14);
        assert!(!is_collinear(&x, &y, &tol()).unwrap());
        // half the gap is inside the band
        let delta = (eps - eps * eps / 4.0).sqrt();
        let y = Ket::from_slice(&[c((1.0 - delta * delta).sqrt(), 0.0), c(delta, 0.0)]).unwrap();
        assert!(is_collinear(&x, &y, &tol()).unwrap());
    }

    #[test]
    fn noncollinear_set_examples() {
        assert!(is_noncollinear_set(&[k(&[1.0, 0.0]), k(&[0.0, 1.0])], &tol()).unwrap());
        let phase_pair = [
            k(&[1.0, 0.0]),
            Ket::from_slice(&[c(0.0, 1.0), c(0.0, 0.0)]).unwrap(),
        ];
        assert!(!is_noncollinear_set(&phase_pair, &tol()).unwrap());
        assert_eq!(
            find_collinear_pair(&phase_pair, &tol()).unwrap(),
            Some((0, 1))
        );
        let three = [k(&[1.0, 0.0]), k(&[0.0, 1.0]), k(&[1.0, 1.0])];
        assert!(is_noncollinear_set(&three, &tol()).unwrap());
    }

    #[test]
    fn rank_examples() {
        let r = rank_and_independence(&[k(&[1.0, 0.0]), k(&[0.0, 1.0])], &tol()).unwrap();
        assert_eq!((r.rank, r.independent), (2, true));
        let r = rank_and_independence(&[k(&[1.0, 0.0]), k(&[1.0, 0.0])], &tol()).unwrap();
        assert_eq!((r.rank, r.independent), (1, false));
        let set = [
            k(&[1.0, 0.0, 0.0]),
            k(&[0.0, 1.0, 0.0]),
            k(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]),
        ];
        let r = rank_and_independence(&set, &tol()).unwrap();
        assert_eq!((r.rank, r.independent), (2, false));
        assert!(rank_and_independence(&[], &tol()).is_err());
    }

    fn decomposition(dims: (usize, usize), terms: Vec<(f64, Ket, Ket)>) -> ProductDecomposition {
        ProductDecomposition::new(
            FactoredDims::bipartite(dims.0, dims.1).unwrap(),
            terms
                .into_iter()
                .map(|(weight, a, b)| ProductTerm { weight, a, b })
                .collect(),
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn support_of_two_term_example_is_full() {
        let e = |i| Ket::basis(2, i);
        let rho = build_rho(&decomposition(
            (2, 2),
            vec![(0.5, e(0), e(0)), (0.5, e(1), e(1))],
        ));
        for sub in 0..2 {
            let (s, n) = support_and_null(&rho, sub, &tol()).unwrap();
            assert_eq!((s.dim(), n.dim()), (2, 0));
        }
    }

    #[test]
    fn support_of_two_terms_in_three_dims() {
        let a1 = k(&[1.0, 1.0, 0.0]);
        let a2 = Ket::from_slice(&[c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rho = build_rho(&decomposition(
            (3, 2),
            vec![
                (0.4, a1.clone(), k(&[1.0, 0.0])),
                (0.6, a2.clone(), k(&[1.0, 1.0])),
            ],
        ));
        let (s, n) = support_and_null(&rho, 0, &tol()).unwrap();
        assert_eq!((s.dim(), n.dim()), (2, 1));
        // oracle: projector onto span{a1, a2} by Gram-Schmidt
        let v1 = a1.amplitudes().clone();
        let mut v2 = a2.amplitudes().clone();
        v2 -= &v1 * v1.dotc(&v2);
        let v2 = v2.normalize();
        let want = &v1 * v1.adjoint() + &v2 * v2.adjoint();
        assert!(frobenius(&(s.projector() - want)) < 1e-12);
        // the null vector is orthogonal to both
        let z = &n.vectors[0];
        assert!(z.inner(&a1).norm() < 1e-12 && z.inner(&a2).norm() < 1e-12);
    }

    #[test]
    fn support_of_product_projector() {
        let rho = build_rho(&decomposition(
            (3, 2),
            vec![(1.0, k(&[1.0, 2.0, 3.0]), k(&[1.0, -1.0]))],
        ));
        let (s1, _) = support_and_null(&rho, 0, &tol()).unwrap();
        let (s2, _) = support_and_null(&rho, 1, &tol()).unwrap();
        assert_eq!((s1.dim(), s2.dim()), (1, 1));
    }

    #[test]
    fn dual_basis_examples() {
        let on = [k(&[1.0, 0.0]), k(&[0.0, 1.0])];
        let d = dual_basis(&on, &tol()).unwrap();
        for (x, y) in d.iter().zip(&on) {
            assert!((x - y.amplitudes()).norm() < 1e-14);
        }

        // Gram G = [[1, s], [s, 1]] with s = 1/√2; duals are Σ (G⁻¹)ᵢⱼ aⱼ,
        // G⁻¹ = [[1, −s], [−s, 1]] / (1 − s²) = [[2, −2s], [−2s, 2]]
        let s = FRAC_1_SQRT_2;
        let set = [k(&[1.0, 0.0]), k(&[s, s])];
        let d = dual_basis(&set, &tol()).unwrap();
        let a1 = set[0].amplitudes();
        let a2 = set[1].amplitudes();
        let want1 = a1.scale(2.0) - a2.scale(2.0 * s);
        let want2 = a2.scale(2.0) - a1.scale(2.0 * s);
        assert!((&d[0] - want1).norm() < 1e-12);
        assert!((&d[1] - want2).norm() < 1e-12);
        assert!(d[0].dotc(a2).norm() < 1e-10);
        assert!((d[0].dotc(a1) - c(1.0, 0.0)).norm() < 1e-10);

        let dep = [k(&[1.0, 0.0]), k(&[0.0, 1.0]), k(&[1.0, 1.0])];
        assert!(matches!(
            dual_basis(&dep, &tol()),
            Err(Error::NoDualBasis { rank: 2, count: 3 })
        ));
    }
}
