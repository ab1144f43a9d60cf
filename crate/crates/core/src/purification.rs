//! Lifting product decompositions to tripartite vectors, and the unitary on
//! the auxiliary factor relating two purifications of the same operator.

use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, numerical_rank, orthonormal_complement, reshape, svd, Svd};
use crate::subspace::ToleranceConfig;
use crate::tensor::{FactoredDims, Ket, ProductDecomposition, TriDecomposition, TriTerm};
use crate::{CMatrix, CVector};

const UNITARY_TOL: f64 = 1e-8;

/// Square matrix with `‖U†U − I‖_F ≤ 1e-8`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let u = Self { matrix };
        let dev = u.unitarity_defect();
        if dev > UNITARY_TOL {
            return Err(Error::Hypothesis(format!(
                "matrix is not unitary (defect {dev:.3e})"
            )));
        }
        Ok(u)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        frobenius(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n)))
    }

    pub fn apply(&self, x: &Ket) -> Ket {
        Ket::from_unit(&self.matrix * x.amplitudes())
    }
}

/// `Σⱼ √wⱼ |aⱼ bⱼ eⱼ⟩` with `eⱼ` the first `n` standard basis kets of a
/// `dim3`-dimensional auxiliary space.
pub fn purify(d: &ProductDecomposition, dim3: usize) -> Result<TriDecomposition> {
    let n = d.len();
    if dim3 < n {
        return Err(Error::AuxiliaryTooSmall { dim3, n });
    }
    let dims = FactoredDims::new(vec![d.dims().factor(0), d.dims().factor(1), dim3])?;
    let terms = d
        .terms()
        .iter()
        .enumerate()
        .map(|(j, t)| TriTerm {
            coeff: c(t.weight.sqrt(), 0.0),
            a: t.a.clone(),
            b: t.b.clone(),
            c: Ket::basis(dim3, j),
        })
        .collect();
    // orthonormal c-set plus the independent side of d: hypotheses hold
    TriDecomposition::new_unchecked(dims, terms)
}

fn bipartite(split: &FactoredDims, len: usize) -> Result<(usize, usize)> {
    if split.count() != 2 {
        return Err(Error::InvalidDims(format!(
            "split must have two factors, got {:?}",
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

/// Unitary `U` on the second factor of `split` with `ψ = (I ⊗ U) φ`.
///
/// With `φ, ψ` reshaped row-major to `d1 × d2` matrices this reads
/// `M_ψ = M_φ Uᵀ`. On the row support `Uᵀ = M_φ⁺ M_ψ = Q R†` where
/// `M_φ = P Σ Q†` and `R = (Σ⁻¹ P† M_ψ)†`; the orthogonal complements of
/// `Q` and `R` are paired up to complete `U`.
pub fn relating_unitary(
    psi: &CVector,
    phi: &CVector,
    split: &FactoredDims,
    tol: &ToleranceConfig,
) -> Result<UnitaryMatrix> {
    let (d1, d2) = bipartite(split, psi.len())?;
    bipartite(split, phi.len())?;
    let m_psi = reshape(psi, d1, d2);
    let m_phi = reshape(phi, d1, d2);

    let red_psi = &m_psi * m_psi.adjoint();
    let red_phi = &m_phi * m_phi.adjoint();
    let scale = frobenius(&red_psi).max(frobenius(&red_phi));
    let gap = frobenius(&(&red_psi - &red_phi));
    if gap > tol.equality * scale || scale == 0.0 {
        return Err(Error::NotCoPurifications(if scale > 0.0 {
            gap / scale
        } else {
            gap
        }));
    }

    let Svd { u: p, s, v: q } = svd(&m_phi);
    let r = numerical_rank(&s, tol.rank);
    let p_r = p.columns(0, r).into_owned();
    let q_r = q.columns(0, r).into_owned();
    let inv_sigma = CMatrix::from_diagonal(&CVector::from_iterator(
        r,
        s[..r].iter().map(|&x| c(1.0 / x, 0.0)),
    ));
    let r_raw = (inv_sigma * p_r.adjoint() * &m_psi).adjoint();
    // nearest matrix with orthonormal columns
    let Svd { u: w, v: vt, .. } = svd(&r_raw);
    let r_cols = &w * vt.adjoint();

    let q_perp = orthonormal_complement(&q_r, d2);
    let r_perp = orthonormal_complement(&r_cols, d2);
    let u_t = &q_r * r_cols.adjoint() + &q_perp * r_perp.adjoint();
    let u = u_t.transpose();

    let residual = (psi - flatten_apply(&u, &m_phi)).norm();
    if residual > tol.equality.sqrt() * psi.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::CompletionFailure(residual));
    }
    UnitaryMatrix::new(u).map_err(|_| Error::CompletionFailure(residual))
}

fn flatten_apply(u: &CMatrix, m_phi: &CMatrix) -> CVector {
    crate::linalg::flatten(&(m_phi * u.transpose()))
}

/// `(I ⊗ … ⊗ U ⊗ … ⊗ I) x` with `U` on factor `factor` of `split`.
pub fn apply_on_factor(
    u: &UnitaryMatrix,
    x: &Ket,
    split: &FactoredDims,
    factor: usize,
) -> Result<Ket> {
    Ok(Ket::from_unit(apply_on_factor_raw(
        u.matrix(),
        x.amplitudes(),
        split,
        factor,
    )?))
}

pub(crate) fn apply_on_factor_raw(
    u: &CMatrix,
    x: &CVector,
    split: &FactoredDims,
    factor: usize,
) -> Result<CVector> {
    let dims = split.as_slice();
    if factor >= dims.len() {
        return Err(Error::InvalidSubsystem(format!(
            "factor {factor} of {}",
            dims.len()
        )));
    }
    if x.len() != split.total() {
        return Err(Error::DimensionMismatch {
            expected: split.total(),
            found: x.len(),
        });
    }
    let d = dims[factor];
    if u.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.nrows(),
        });
    }
    let right: usize = dims[factor + 1..].iter().product();
    let left: usize = dims[..factor].iter().product();
    let mut out = CVector::zeros(x.len());
    for l in 0..left {
        for r in 0..right {
            for i in 0..d {
                let mut acc = c(0.0, 0.0);
                for j in 0..d {
                    acc += u[(i, j)] * x[(l * d + j) * right + r];
                }
                out[(l * d + i) * right + r] = acc;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron_vec, random_complex_vector, random_unitary};
    use crate::tensor::{
        build_rho, build_tri_vector, partial_trace, tensor_product, ProductTerm, StateOperator,
    };
    use crate::C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn two_term() -> ProductDecomposition {
        let e = |i| Ket::basis(2, i);
        ProductDecomposition::new(
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
        .unwrap()
    }

    #[test]
    fn reshape_of_product_is_rank_one() {
        let x = Ket::from_real(&[1.0, 2.0, -1.0]).unwrap();
        let y = Ket::from_slice(&[c(0.0, 1.0), c(1.0, 1.0)]).unwrap();
        let m = reshape(tensor_product(&x, &y).amplitudes(), 3, 2);
        let s = svd(&m).s;
        assert!((s[0] - 1.0).abs() < 1e-14 && s[1] < 1e-14);
    }

    #[test]
    fn purify_two_term_example() {
        let t = purify(&two_term(), 2).unwrap();
        let v = build_tri_vector(&t, &tol()).unwrap();
        let e = |i| Ket::basis(2, i);
        let term = |i| {
            kron_vec(
                &kron_vec(e(i).amplitudes(), e(i).amplitudes()),
                e(i).amplitudes(),
            )
        };
        let want = (term(0) + term(1)).scale(FRAC_1_SQRT_2);
        assert!((v.amplitudes - want).norm() < 1e-15);
    }

    #[test]
    fn purify_round_trip_and_errors() {
        let d = two_term();
        assert!(matches!(
            purify(&d, 1),
            Err(Error::AuxiliaryTooSmall { dim3: 1, n: 2 })
        ));
        let t = purify(&d, 3).unwrap();
        let v = build_tri_vector(&t, &tol()).unwrap();
        let rho3 = StateOperator::from_pure(t.dims().clone(), &v.amplitudes).unwrap();
        let reduced = partial_trace(&rho3, &[0, 1]).unwrap();
        assert!(frobenius(&(reduced.matrix() - build_rho(&d).matrix())) < 1e-12);
    }

    #[test]
    fn purify_single_term_is_product() {
        let a = Ket::from_real(&[3.0, 4.0]).unwrap();
        let b = Ket::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let d = ProductDecomposition::new(
            FactoredDims::bipartite(2, 3).unwrap(),
            vec![ProductTerm {
                weight: 1.0,
                a: a.clone(),
                b: b.clone(),
            }],
            &tol(),
        )
        .unwrap();
        let v = build_tri_vector(&purify(&d, 1).unwrap(), &tol()).unwrap();
        let want = tensor_product(&tensor_product(&a, &b), &Ket::basis(1, 0));
        assert!((v.amplitudes - want.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn relating_unitary_identity_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = random_complex_vector(&mut rng, 12).normalize();
        let split = FactoredDims::bipartite(4, 3).unwrap();
        let u = relating_unitary(&psi, &psi, &split, &tol()).unwrap();
        let out = apply_on_factor_raw(u.matrix(), &psi, &split, 1).unwrap();
        assert!((out - &psi).norm() < 1e-12);
    }

    #[test]
    fn relating_unitary_recovers_action_of_random_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (d1, d2) in [(2, 3), (3, 3), (4, 2), (1, 3)] {
            let split = FactoredDims::bipartite(d1, d2).unwrap();
            let phi = random_complex_vector(&mut rng, d1 * d2).normalize();
            let v = random_unitary(&mut rng, d2);
            let psi = apply_on_factor_raw(&v, &phi, &split, 1).unwrap();
            let u = relating_unitary(&psi, &phi, &split, &tol()).unwrap();
            let out = apply_on_factor_raw(u.matrix(), &phi, &split, 1).unwrap();
            assert!((out - &psi).norm() < 1e-8, "({d1},{d2})");
            assert!(u.unitarity_defect() < 1e-8);
        }
    }

    #[test]
    fn relating_unitary_rejects_non_copurifications() {
        let split = FactoredDims::bipartite(2, 2).unwrap();
        let product = Ket::basis(4, 0).into_amplitudes();
        let h = c(FRAC_1_SQRT_2, 0.0);
        let bell = CVector::from_vec(vec![h, c(0.0, 0.0), c(0.0, 0.0), h]);
        assert!(matches!(
            relating_unitary(&product, &bell, &split, &tol()),
            Err(Error::NotCoPurifications(_))
        ));
        assert!(relating_unitary(
            &product,
            &bell,
            &FactoredDims::bipartite(1, 4).unwrap(),
            &tol()
        )
        .is_ok());
        assert!(relating_unitary(
            &product,
            &bell,
            &FactoredDims::bipartite(2, 3).unwrap(),
            &tol()
        )
        .is_err());
    }

    #[test]
    fn apply_on_factor_examples() {
        let split = FactoredDims::bipartite(2, 2).unwrap();
        let x = tensor_product(&Ket::basis(2, 0), &Ket::basis(2, 1));
        let id = UnitaryMatrix::identity(2);
        assert_eq!(apply_on_factor(&id, &x, &split, 1).unwrap(), x);

        let theta = 0.7;
        let mut m = CMatrix::identity(2, 2);
        m[(1, 1)] = C64::from_polar(1.0, theta);
        let u = UnitaryMatrix::new(m).unwrap();
        let out = apply_on_factor(&u, &x, &split, 1).unwrap();
        let want = x.amplitudes() * C64::from_polar(1.0, theta);
        assert!((out.amplitudes() - want).norm() < 1e-15);

        assert!(apply_on_factor(&u, &x, &split, 2).is_err());
        assert!(apply_on_factor(&UnitaryMatrix::identity(3), &x, &split, 0).is_err());
    }

    #[test]
    fn apply_on_factor_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let split = FactoredDims::tripartite(2, 3, 2).unwrap();
        for factor in 0..3 {
            let u = UnitaryMatrix::new(random_unitary(&mut rng, split.factor(factor))).unwrap();
            let x = Ket::new(random_complex_vector(&mut rng, 12)).unwrap();
            let out = apply_on_factor(&u, &x, &split, factor).unwrap();
            assert!((out.amplitudes().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_matrix_validation() {
        assert!(UnitaryMatrix::new(CMatrix::identity(2, 2).scale(2.0)).is_err());
        assert!(UnitaryMatrix::new(CMatrix::zeros(2, 3)).is_err());
    }
}
