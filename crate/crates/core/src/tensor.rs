//! Kets and operators on factored finite-dimensional spaces.

use std::fmt;

use crate::decomp::is_factorable;
use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, hermitian_eigen, kron_vec, symmetrize};
use crate::subspace::{find_collinear_pair, rank_and_independence, ToleranceConfig};
use crate::{CMatrix, CVector, C64};

/// Largest ambient dimension accepted by [`FactoredDims::new`].
pub const DEFAULT_MAX_AMBIENT: usize = 4096;

/// A unit vector in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: CVector,
}

impl Ket {
    /// Normalizes `amps`. Fails on an empty, zero or non-finite vector.
    pub fn new(amps: CVector) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ZeroVector("ket must have dimension >= 1".into()));
        }
        let norm = amps.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ZeroVector(format!("ket norm is {norm}")));
        }
        // already-unit vectors are kept bit-for-bit
        if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(Self { amps });
        }
        Ok(Self {
            amps: amps.unscale(norm),
        })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(
            amps.len(),
            amps.iter().map(|&x| c(x, 0.0)),
        ))
    }

    /// Standard basis ket `e_index` in `C^dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dimension {dim}"
        );
        let mut amps = CVector::zeros(dim);
        amps[index] = c(1.0, 0.0);
        Self { amps }
    }

    /// Wraps a vector already known to be of unit norm.
    pub(crate) fn from_unit(amps: CVector) -> Self {
        debug_assert!((amps.norm() - 1.0).abs() < 1e-8);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// Multiply by a unit-modulus phase (renormalizes away any drift).
    pub fn with_phase(&self, phase: C64) -> Ket {
        Ket::from_unit(self.amps.map(|z| z * phase).unscale(phase.norm()))
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    /// Phase-fixed copy: the first component of magnitude above `tol` is made
    /// real and positive.
    pub fn canonical(&self, tol: f64) -> Ket {
        let mut amps = self.amps.clone();
        crate::linalg::fix_phase(&mut amps, tol);
        Ket::from_unit(amps)
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, ")")
    }
}

/// Factor dimensions of a composite space, first factor slowest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredDims(Vec<usize>);

impl FactoredDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_limit(dims, DEFAULT_MAX_AMBIENT)
    }

    pub fn with_limit(dims: Vec<usize>, max_ambient: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("at least one factor required".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidDims(format!(
                "zero factor dimension in {dims:?}"
            )));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&t| t <= max_ambient)
            .ok_or_else(|| {
                Error::InvalidDims(format!(
                    "ambient dimension of {dims:?} exceeds {max_ambient}"
                ))
            })?;
        debug_assert!(total >= 1);
        Ok(Self(dims))
    }

    pub fn bipartite(d1: usize, d2: usize) -> Result<Self> {
        Self::new(vec![d1, d2])
    }

    pub fn tripartite(d1: usize, d2: usize, d3: usize) -> Result<Self> {
        Self::new(vec![d1, d2, d3])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn factor(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn count(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    fn require_count(&self, n: usize) -> Result<()> {
        if self.count() != n {
            return Err(Error::InvalidDims(format!(
                "expected {n} factors, got {:?}",
                self.0
            )));
        }
        Ok(())
    }
}

/// Hermitian positive-semidefinite operator on a factored space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateOperator {
    dims: FactoredDims,
    matrix: CMatrix,
}

const HERMITIAN_REL_TOL: f64 = 1e-10;
const PSD_REL_TOL: f64 = 1e-10;

impl StateOperator {
    /// Validates Hermiticity and positivity, then stores the symmetrized
    /// matrix.
    pub fn new(dims: FactoredDims, matrix: CMatrix) -> Result<Self> {
        let n = dims.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidDims("matrix has non-finite entries".into()));
        }
        let scale = frobenius(&matrix);
        let skew = frobenius(&(&matrix - matrix.adjoint()));
        if skew > HERMITIAN_REL_TOL * scale {
            return Err(Error::NotHermitian(if scale > 0.0 {
                skew / scale
            } else {
                skew
            }));
        }
        let op = Self::from_hermitian(dims, matrix);
        let eig = op.eigenvalues();
        let (max, min) = (eig[0], eig[eig.len() - 1]);
        if min < -PSD_REL_TOL * max.max(0.0) {
            return Err(Error::NotPsd(min));
        }
        Ok(op)
    }

    /// Internal constructor for operators that are PSD by construction.
    pub(crate) fn from_hermitian(dims: FactoredDims, matrix: CMatrix) -> Self {
        Self {
            dims,
            matrix: symmetrize(&matrix),
        }
    }

    /// `|v⟩⟨v|` for a (not necessarily normalized) vector.
    pub fn from_pure(dims: FactoredDims, v: &CVector) -> Result<Self> {
        if v.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: v.len(),
            });
        }
        Ok(Self::from_hermitian(dims, v * v.adjoint()))
    }

    pub fn dims(&self) -> &FactoredDims {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    /// Relative Frobenius distance `‖self − other‖ / ‖self‖`.
    pub fn relative_distance(&self, other: &StateOperator) -> f64 {
        let scale = frobenius(&self.matrix).max(f64::MIN_POSITIVE);
        frobenius(&(&self.matrix - &other.matrix)) / scale
    }

    /// Same operator with the two factors of a bipartite space exchanged.
    pub fn swap_factors(&self) -> Result<StateOperator> {
        self.dims.require_count(2)?;
        let (d1, d2) = (self.dims.factor(0), self.dims.factor(1));
        let idx = |i: usize| (i % d2) * d1 + i / d2;
        let n = d1 * d2;
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            for s in 0..n {
                m[(idx(r), idx(s))] = self.matrix[(r, s)];
            }
        }
        Ok(Self::from_hermitian(FactoredDims(vec![d2, d1]), m))
    }
}

/// One term `w |a⟩⟨a| ⊗ |b⟩⟨b|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub a: Ket,
    pub b: Ket,
}

/// `ρ = Σⱼ wⱼ |aⱼ⟩⟨aⱼ| ⊗ |bⱼ⟩⟨bⱼ|` with positive weights, non-collinear ket
/// sets and at least one linearly independent set.
///
/// Weights are stored as given; [`ProductDecomposition::normalized`] rescales
/// them to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDecomposition {
    dims: FactoredDims,
    terms: Vec<ProductTerm>,
}

impl ProductDecomposition {
    pub fn new(dims: FactoredDims, terms: Vec<ProductTerm>, tol: &ToleranceConfig) -> Result<Self> {
        dims.require_count(2)?;
        if terms.is_empty() {
            return Err(Error::Hypothesis("decomposition has no terms".into()));
        }
        for (j, t) in terms.iter().enumerate() {
            check_dim(dims.factor(0), t.a.dim())?;
            check_dim(dims.factor(1), t.b.dim())?;
            if !(t.weight > 0.0 && t.weight.is_finite()) {
                return Err(Error::NonPositiveWeight {
                    index: j + 1,
                    value: t.weight,
                });
            }
        }
        let a: Vec<Ket> = terms.iter().map(|t| t.a.clone()).collect();
        let b: Vec<Ket> = terms.iter().map(|t| t.b.clone()).collect();
        check_noncollinear("a", &a, tol)?;
        check_noncollinear("b", &b, tol)?;
        let ra = rank_and_independence(&a, tol)?;
        let rb = rank_and_independence(&b, tol)?;
        if !ra.independent && !rb.independent {
            return Err(Error::NotIndependent(format!(
                "neither {{a}} (rank {}) nor {{b}} (rank {}) is linearly independent over {} terms",
                ra.rank,
                rb.rank,
                terms.len()
            )));
        }
        Ok(Self { dims, terms })
    }

    pub fn dims(&self) -> &FactoredDims {
        &self.dims
    }

    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn a_kets(&self) -> Vec<Ket> {
        self.terms.iter().map(|t| t.a.clone()).collect()
    }

    pub fn b_kets(&self) -> Vec<Ket> {
        self.terms.iter().map(|t| t.b.clone()).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// Copy with weights rescaled to sum to one.
    pub fn normalized(&self) -> Self {
        let total = self.total_weight();
        Self {
            dims: self.dims.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| ProductTerm {
                    weight: t.weight / total,
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// Same decomposition with the roles of the two factors exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            dims: FactoredDims(vec![self.dims.factor(1), self.dims.factor(0)]),
            terms: self
                .terms
                .iter()
                .map(|t| ProductTerm {
                    weight: t.weight,
                    a: t.b.clone(),
                    b: t.a.clone(),
                })
                .collect(),
        }
    }
}

/// One term `φ |a b c⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriTerm {
    pub coeff: C64,
    pub a: Ket,
    pub b: Ket,
    pub c: Ket,
}

impl TriTerm {
    pub fn kets(&self) -> [&Ket; 3] {
        [&self.a, &self.b, &self.c]
    }
}

/// `Σⱼ φⱼ |aⱼ bⱼ cⱼ⟩` with nonzero coefficients, three non-collinear ket sets
/// and at least two linearly independent sets.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDecomposition {
    dims: FactoredDims,
    terms: Vec<TriTerm>,
}

const SLOT_NAMES: [&str; 3] = ["a", "b", "c"];

impl TriDecomposition {
    pub fn new(dims: FactoredDims, terms: Vec<TriTerm>, tol: &ToleranceConfig) -> Result<Self> {
        let out = Self::new_unchecked(dims, terms)?;
        for (j, t) in out.terms.iter().enumerate() {
            if t.coeff.norm() == 0.0 || !t.coeff.norm().is_finite() {
                return Err(Error::ZeroCoefficient { index: j + 1 });
            }
        }
        let mut independent = 0;
        let mut ranks = Vec::with_capacity(3);
        for (slot, name) in SLOT_NAMES.iter().enumerate() {
            let set = out.slot_kets(slot);
            check_noncollinear(name, &set, tol)?;
            let r = rank_and_independence(&set, tol)?;
            independent += usize::from(r.independent);
            ranks.push(r.rank);
        }
        if independent < 2 {
            return Err(Error::NotIndependent(format!(
                "fewer than two of {{a}}, {{b}}, {{c}} are linearly independent (ranks {ranks:?} over {} terms)",
                out.terms.len()
            )));
        }
        Ok(out)
    }

    /// Only checks factor dimensions. Used for inputs that deliberately
    /// violate the hypotheses (cancellation checks, demonstrations).
    pub fn new_unchecked(dims: FactoredDims, terms: Vec<TriTerm>) -> Result<Self> {
        dims.require_count(3)?;
        if terms.is_empty() {
            return Err(Error::Hypothesis("decomposition has no terms".into()));
        }
        for t in &terms {
            for (slot, k) in t.kets().into_iter().enumerate() {
                check_dim(dims.factor(slot), k.dim())?;
            }
        }
        Ok(Self { dims, terms })
    }

    /// Builds a tridecomposition from terms whose first two factors are given
    /// as one joint vector on `H1 ⊗ H2`. Each joint vector must factor into a
    /// product; its norm and phase are absorbed into the coefficient.
    pub fn from_grouped(
        dims: FactoredDims,
        terms: Vec<(C64, CVector, Ket)>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        dims.require_count(3)?;
        let split = FactoredDims(vec![dims.factor(0), dims.factor(1)]);
        let mut out = Vec::with_capacity(terms.len());
        for (j, (coeff, joint, c3)) in terms.into_iter().enumerate() {
            check_dim(split.total(), joint.len())?;
            let norm = joint.norm();
            let ket = Ket::new(joint)?;
            let f = is_factorable(&ket, &split, tol)?;
            let Some(parts) = f.factors else {
                return Err(Error::FactorabilityViolated {
                    term: j + 1,
                    schmidt: f.schmidt_values,
                });
            };
            out.push(TriTerm {
                coeff: coeff * parts.scale * norm,
                a: parts.left,
                b: parts.right,
                c: c3,
            });
        }
        Self::new(dims, out, tol)
    }

    pub fn dims(&self) -> &FactoredDims {
        &self.dims
    }

    pub fn terms(&self) -> &[TriTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Kets of one factor slot (0, 1 or 2) in term order.
    pub fn slot_kets(&self, slot: usize) -> Vec<Ket> {
        self.terms.iter().map(|t| t.kets()[slot].clone()).collect()
    }

    pub fn coeffs(&self) -> Vec<C64> {
        self.terms.iter().map(|t| t.coeff).collect()
    }

    /// Which of the three slots hold a linearly independent set.
    pub fn independent_slots(&self, tol: &ToleranceConfig) -> [bool; 3] {
        let mut out = [false; 3];
        for (slot, flag) in out.iter_mut().enumerate() {
            *flag = rank_and_independence(&self.slot_kets(slot), tol)
                .map(|r| r.independent)
                .unwrap_or(false);
        }
        out
    }
}

/// Raw sum of a tridecomposition and its norm before any renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct TriVector {
    pub dims: FactoredDims,
    pub amplitudes: CVector,
    pub raw_norm: f64,
}

impl TriVector {
    pub fn normalized(&self) -> Ket {
        Ket::from_unit(self.amplitudes.unscale(self.raw_norm))
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn check_noncollinear(name: &str, set: &[Ket], tol: &ToleranceConfig) -> Result<()> {
    if let Some((i, j)) = find_collinear_pair(set, tol)? {
        return Err(Error::CollinearPair {
            set: name.to_string(),
            first: i + 1,
            second: j + 1,
        });
    }
    Ok(())
}

/// Kronecker product, `out[j·dim(y) + k] = x[j]·y[k]`.
pub fn tensor_product(x: &Ket, y: &Ket) -> Ket {
    Ket::from_unit(kron_vec(&x.amps, &y.amps))
}

/// `ρ = Σⱼ wⱼ |aⱼ bⱼ⟩⟨aⱼ bⱼ|`.
pub fn build_rho(d: &ProductDecomposition) -> StateOperator {
    let n = d.dims.total();
    let mut m = CMatrix::zeros(n, n);
    for t in &d.terms {
        let v = kron_vec(&t.a.amps, &t.b.amps);
        m += (&v * v.adjoint()).scale(t.weight);
    }
    StateOperator::from_hermitian(d.dims.clone(), m)
}

/// Reduced operator on the factors listed in `keep` (in ascending order of
/// factor index, whatever order they are given in).
pub fn partial_trace(rho: &StateOperator, keep: &[usize]) -> Result<StateOperator> {
    let dims = rho.dims.as_slice();
    let nf = dims.len();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::InvalidSubsystem(format!(
            "repeated index in {keep:?}"
        )));
    }
    if kept.is_empty() || kept.len() >= nf {
        return Err(Error::InvalidSubsystem(format!(
            "keep {keep:?} must be a nonempty proper subset of {nf} factors"
        )));
    }
    if let Some(&bad) = kept.iter().find(|&&i| i >= nf) {
        return Err(Error::InvalidSubsystem(format!(
            "factor {bad} out of range 0..{nf}"
        )));
    }
    let traced: Vec<usize> = (0..nf).filter(|i| !kept.contains(i)).collect();

    let mut strides = vec![1usize; nf];
    for i in (0..nf.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    // full index = offset(kept digits) + offset(traced digits)
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &f in factors {
            let (stride, df) = (strides[f], dims[f]);
            out = out
                .iter()
                .flat_map(|&base| (0..df).map(move |d| base + d * stride))
                .collect();
        }
        out
    };
    let keep_off = offsets(&kept);
    let trace_off = offsets(&traced);
    let n = keep_off.len();
    let m = &rho.matrix;
    let out = CMatrix::from_fn(n, n, |r, s| {
        trace_off
            .iter()
            .map(|&t| m[(keep_off[r] + t, keep_off[s] + t)])
            .sum()
    });
    let kept_dims = FactoredDims(kept.iter().map(|&i| dims[i]).collect());
    Ok(StateOperator::from_hermitian(kept_dims, out))
}

/// `Σⱼ φⱼ |aⱼ⟩ ⊗ |bⱼ⟩ ⊗ |cⱼ⟩`, not renormalized. Fails when the terms cancel
/// to a vector of norm at most `ε_rank · Σ|φⱼ|`.
pub fn build_tri_vector(t: &TriDecomposition, tol: &ToleranceConfig) -> Result<TriVector> {
    let n = t.dims.total();
    let mut v = CVector::zeros(n);
    for term in &t.terms {
        let abc = kron_vec(&kron_vec(&term.a.amps, &term.b.amps), &term.c.amps);
        v.axpy(term.coeff, &abc, c(1.0, 0.0));
    }
    let raw_norm = v.norm();
    let scale: f64 = t.terms.iter().map(|x| x.coeff.norm()).sum();
    if raw_norm <= tol.rank * scale {
        return Err(Error::ZeroVector(format!(
            "terms cancel: norm {raw_norm:.3e} against coefficient mass {scale:.3e}"
        )));
    }
    Ok(TriVector {
        dims: t.dims.clone(),
        amplitudes: v,
        raw_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn assert_amps(k: &Ket, want: &[C64]) {
        assert_eq!(k.dim(), want.len());
        for (x, y) in k.amplitudes().iter().zip(want) {
            assert!((x - y).norm() < 1e-15, "{x} vs {y}");
        }
    }

    #[test]
    fn tensor_product_examples() {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let e1 = Ket::basis(2, 0);
        let e2 = Ket::basis(2, 1);
        assert_amps(&tensor_product(&e1, &e2), &[z, one, z, z]);

        let plus = Ket::from_real(&[1.0, 1.0]).unwrap();
        let h = c(FRAC_1_SQRT_2, 0.0);
        assert_amps(&tensor_product(&plus, &e1), &[h, z, h, z]);

        let ie1 = Ket::from_slice(&[c(0.0, 1.0), z]).unwrap();
        assert_amps(&tensor_product(&ie1, &e1), &[c(0.0, 1.0), z, z, z]);
    }

    #[test]
    fn ket_rejects_zero_and_empty() {
        assert!(matches!(
            Ket::from_real(&[0.0, 0.0]),
            Err(Error::ZeroVector(_))
        ));
        assert!(Ket::from_real(&[]).is_err());
        assert!(Ket::from_real(&[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn factored_dims_limits() {
        assert!(FactoredDims::new(vec![2, 0]).is_err());
        assert!(FactoredDims::new(vec![]).is_err());
        assert!(FactoredDims::new(vec![64, 65]).is_err());
        assert!(FactoredDims::new(vec![64, 64]).is_ok());
        assert!(FactoredDims::with_limit(vec![3, 3], 8).is_err());
    }

    fn two_term() -> ProductDecomposition {
        ProductDecomposition::new(
            FactoredDims::bipartite(2, 2).unwrap(),
            vec![
                ProductTerm {
                    weight: 0.5,
                    a: Ket::basis(2, 0),
                    b: Ket::basis(2, 0),
                },
                ProductTerm {
                    weight: 0.5,
                    a: Ket::basis(2, 1),
                    b: Ket::basis(2, 1),
                },
            ],
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn build_rho_two_term_spectrum() {
        let rho = build_rho(&two_term());
        let ev = rho.eigenvalues();
        for (x, y) in ev.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((rho.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn build_rho_single_term_is_projector() {
        let a = Ket::from_slice(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = Ket::from_real(&[1.0, 2.0, 2.0]).unwrap();
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
        let rho = build_rho(&d);
        let want = tensor_product(&a, &b).projector();
        assert!(frobenius(&(rho.matrix() - want)) < 1e-15);
    }

    #[test]
    fn product_decomposition_rejects_bad_weights_and_dims() {
        let dims = FactoredDims::bipartite(2, 2).unwrap();
        let t = |w| ProductTerm {
            weight: w,
            a: Ket::basis(2, 0),
            b: Ket::basis(2, 0),
        };
        assert!(matches!(
            ProductDecomposition::new(dims.clone(), vec![t(0.0)], &tol()),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        let wrong = ProductTerm {
            weight: 1.0,
            a: Ket::basis(3, 0),
            b: Ket::basis(2, 0),
        };
        assert!(matches!(
            ProductDecomposition::new(dims.clone(), vec![wrong], &tol()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(ProductDecomposition::new(dims, vec![], &tol()).is_err());
    }

    #[test]
    fn product_decomposition_names_collinear_pair() {
        let dims = FactoredDims::bipartite(3, 2).unwrap();
        let b1 = Ket::basis(2, 0);
        let b3 = b1.with_phase(C64::from_polar(1.0, 0.4));
        let terms = vec![
            ProductTerm {
                weight: 0.3,
                a: Ket::basis(3, 0),
                b: b1,
            },
            ProductTerm {
                weight: 0.3,
                a: Ket::basis(3, 1),
                b: Ket::basis(2, 1),
            },
            ProductTerm {
                weight: 0.4,
                a: Ket::basis(3, 2),
                b: b3,
            },
        ];
        let err = ProductDecomposition::new(dims, terms, &tol()).unwrap_err();
        assert_eq!(err.to_string(), "set {b} collinear pair (1,3)");
    }

    #[test]
    fn partial_trace_product_state() {
        let a = Ket::from_slice(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = Ket::from_real(&[1.0, -1.0, 0.5]).unwrap();
        let ab = tensor_product(&a, &b);
        let rho = StateOperator::from_pure(FactoredDims::bipartite(2, 3).unwrap(), ab.amplitudes())
            .unwrap();
        let r1 = partial_trace(&rho, &[0]).unwrap();
        assert!(frobenius(&(r1.matrix() - a.projector())) < 1e-15);
        let r2 = partial_trace(&rho, &[1]).unwrap();
        assert!(frobenius(&(r2.matrix() - b.projector())) < 1e-15);
        assert_eq!(r2.dims().as_slice(), &[3]);
    }

    #[test]
    fn partial_trace_rejects_bad_selection() {
        let rho = build_rho(&two_term());
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[0, 1]).is_err());
        assert!(partial_trace(&rho, &[2]).is_err());
        assert!(partial_trace(&rho, &[0, 0]).is_err());
    }

    #[test]
    fn partial_trace_middle_factor_of_three() {
        // Tr over factor 1 of |x y z⟩⟨x y z| leaves |x z⟩⟨x z|
        let x = Ket::from_real(&[1.0, 2.0]).unwrap();
        let y = Ket::from_real(&[0.0, 1.0, 1.0]).unwrap();
        let z = Ket::from_slice(&[c(1.0, 1.0), c(0.0, -1.0)]).unwrap();
        let xyz = tensor_product(&tensor_product(&x, &y), &z);
        let rho =
            StateOperator::from_pure(FactoredDims::tripartite(2, 3, 2).unwrap(), xyz.amplitudes())
                .unwrap();
        let r = partial_trace(&rho, &[2, 0]).unwrap();
        let want = tensor_product(&x, &z).projector();
        assert!(frobenius(&(r.matrix() - want)) < 1e-14);
    }

    #[test]
    fn state_operator_validation() {
        let dims = FactoredDims::bipartite(1, 2).unwrap();
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            StateOperator::new(dims.clone(), m),
            Err(Error::NotHermitian(_))
        ));
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(-0.5, 0.0)]));
        assert!(matches!(
            StateOperator::new(dims.clone(), neg),
            Err(Error::NotPsd(_))
        ));
        assert!(StateOperator::new(dims, CMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn swap_factors_matches_swapped_decomposition() {
        let a1 = Ket::from_real(&[1.0, 0.5, 0.0]).unwrap();
        let a2 = Ket::from_slice(&[c(0.0, 1.0), c(1.0, 0.0), c(0.3, 0.0)]).unwrap();
        let d = ProductDecomposition::new(
            FactoredDims::bipartite(3, 2).unwrap(),
            vec![
                ProductTerm {
                    weight: 0.7,
                    a: a1,
                    b: Ket::basis(2, 0),
                },
                ProductTerm {
                    weight: 0.2,
                    a: a2,
                    b: Ket::from_real(&[1.0, 1.0]).unwrap(),
                },
            ],
            &tol(),
        )
        .unwrap();
        let swapped = build_rho(&d).swap_factors().unwrap();
        let direct = build_rho(&d.swapped());
        assert!(swapped.relative_distance(&direct) < 1e-15);
    }

    #[test]
    fn tri_vector_single_term_and_two_term() {
        let (a, b, cc) = (
            Ket::basis(2, 1),
            Ket::from_real(&[1.0, 1.0]).unwrap(),
            Ket::basis(3, 2),
        );
        let t = TriDecomposition::new(
            FactoredDims::tripartite(2, 2, 3).unwrap(),
            vec![TriTerm {
                coeff: c(1.0, 0.0),
                a: a.clone(),
                b: b.clone(),
                c: cc.clone(),
            }],
            &tol(),
        )
        .unwrap();
        let v = build_tri_vector(&t, &tol()).unwrap();
        let want = tensor_product(&tensor_product(&a, &b), &cc);
        assert!((v.amplitudes.clone() - want.amplitudes()).norm() < 1e-15);

        let h = c(FRAC_1_SQRT_2, 0.0);
        let e = |i| Ket::basis(2, i);
        let ghz = TriDecomposition::new(
            FactoredDims::tripartite(2, 2, 2).unwrap(),
            vec![
                TriTerm {
                    coeff: h,
                    a: e(0),
                    b: e(0),
                    c: e(0),
                },
                TriTerm {
                    coeff: h,
                    a: e(1),
                    b: e(1),
                    c: e(1),
                },
            ],
            &tol(),
        )
        .unwrap();
        let v = build_tri_vector(&ghz, &tol()).unwrap();
        assert!((v.raw_norm - 1.0).abs() < 1e-15);
        assert!((v.normalized().amplitudes().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tri_vector_cancellation_is_an_error() {
        let e = |i| Ket::basis(2, i);
        let t = TriDecomposition::new_unchecked(
            FactoredDims::tripartite(2, 2, 2).unwrap(),
            vec![
                TriTerm {
                    coeff: c(1.0, 0.0),
                    a: e(0),
                    b: e(1),
                    c: e(0),
                },
                TriTerm {
                    coeff: c(-1.0, 0.0),
                    a: e(0),
                    b: e(1),
                    c: e(0),
                },
            ],
        )
        .unwrap();
        assert!(matches!(
            build_tri_vector(&t, &tol()),
            Err(Error::ZeroVector(_))
        ));
    }

    #[test]
    fn tri_decomposition_needs_two_independent_sets() {
        // three terms in dimension 2 on slots a and b: only c is independent
        let dims = FactoredDims::tripartite(2, 2, 3).unwrap();
        let k = |v: [f64; 2]| Ket::from_real(&v).unwrap();
        let terms = vec![
            TriTerm {
                coeff: c(1.0, 0.0),
                a: k([1.0, 0.0]),
                b: k([1.0, 0.0]),
                c: Ket::basis(3, 0),
            },
            TriTerm {
                coeff: c(1.0, 0.0),
                a: k([0.0, 1.0]),
                b: k([0.0, 1.0]),
                c: Ket::basis(3, 1),
            },
            TriTerm {
                coeff: c(1.0, 0.0),
                a: k([1.0, 1.0]),
                b: k([1.0, -1.0]),
                c: Ket::basis(3, 2),
            },
        ];
        assert!(matches!(
            TriDecomposition::new(dims, terms, &tol()),
            Err(Error::NotIndependent(_))
        ));
    }
}
