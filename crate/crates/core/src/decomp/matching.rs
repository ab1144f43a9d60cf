//! Term-by-term equivalence of two decompositions of the same vector or
//! operator.
//!
//! Only what uniqueness guarantees is certified: a permutation, collinearity
//! of matched kets in every slot, and equal coefficient magnitudes (or equal
//! weights). Coefficient phases are reported, never asserted equal.

use crate::error::{Error, Result};
use crate::linalg::pinv;
use crate::purification::{purify, relating_unitary};
use crate::subspace::{stack, ToleranceConfig};
use crate::tensor::{
    build_rho, build_tri_vector, FactoredDims, Ket, ProductDecomposition, TriDecomposition, TriTerm,
};
use crate::C64;

/// Absolute tolerance on normalized weights / coefficient magnitudes.
pub const WEIGHT_TOL: f64 = 1e-6;

const SLOT_NAMES: [&str; 3] = ["a", "b", "c"];
/// The auxiliary slot first, then the other two.
const SLOT_ORDER: [usize; 3] = [2, 0, 1];

/// Certificates for term `j` of the second decomposition against term
/// `π(j)` of the first. Overlaps are `⟨X_j|x_π(j)⟩`, so `x_π(j) ≈ overlap · X_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TermCertificate {
    pub overlap_a: C64,
    pub overlap_b: C64,
    pub overlap_c: Option<C64>,
    /// `w_π(j)` (bipartite) or `|φ_π(j)|` (tripartite).
    pub weight_first: f64,
    /// `W_j` or `|φ'_j|`.
    pub weight_second: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub n: usize,
    /// `permutation[j]` is the index in the first decomposition matched to
    /// term `j` of the second.
    pub permutation: Vec<usize>,
    pub per_term: Vec<TermCertificate>,
    /// Largest constraint violation seen while certifying.
    pub residual: f64,
    /// Factor slot (0, 1, 2) whose sets were expanded against each other.
    pub expansion_slot: usize,
}

impl MatchResult {
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(j, &p)| j == p)
    }
}

fn same_dims(first: &FactoredDims, second: &FactoredDims) -> Result<()> {
    if first != second {
        return Err(Error::InvalidDims(format!(
            "factorings differ: {:?} vs {:?}",
            first.as_slice(),
            second.as_slice()
        )));
    }
    Ok(())
}

/// Matches two tridecompositions of the same vector.
///
/// Picks a slot where both ket sets are linearly independent, expands the
/// first decomposition's kets there in the second's (`c_j = Σ_k γ_jk C_k`),
/// and reads the permutation off the single nonzero `γ` in each column.
pub fn match_tridecomposition(
    first: &TriDecomposition,
    second: &TriDecomposition,
    tol: &ToleranceConfig,
) -> Result<MatchResult> {
    same_dims(first.dims(), second.dims())?;
    let v1 = build_tri_vector(first, tol)?;
    let v2 = build_tri_vector(second, tol)?;
    let distance = (&v1.amplitudes - &v2.amplitudes).norm() / v1.raw_norm;
    if distance > tol.equality {
        return Err(Error::VectorsDiffer(distance));
    }

    let ind1 = first.independent_slots(tol);
    let ind2 = second.independent_slots(tol);
    for (name, ind) in [("first", ind1), ("second", ind2)] {
        if ind.iter().filter(|&&b| b).count() < 2 {
            return Err(Error::NotIndependent(format!(
                "{name} decomposition has fewer than two linearly independent sets"
            )));
        }
    }
    let slot = SLOT_ORDER
        .into_iter()
        .find(|&s| ind1[s] && ind2[s])
        .ok_or_else(|| {
            Error::Hypothesis("no factor slot where both decompositions are independent".into())
        })?;

    let (n, big_n) = (first.len(), second.len());
    if n != big_n {
        return Err(Error::TermCountMismatch {
            first: n,
            second: big_n,
        });
    }

    // gamma[(k, j)] = γ_jk
    let small = stack(&first.slot_kets(slot));
    let big = stack(&second.slot_kets(slot));
    let gamma = pinv(&big, tol.rank) * &small;
    let span_residual = (&big * &gamma - &small).norm();
    if span_residual > tol.equality.sqrt() {
        return Err(Error::Hypothesis(format!(
            "slot {{{}}} sets span different subspaces (residual {span_residual:.3e})",
            SLOT_NAMES[slot]
        )));
    }

    let mut permutation = Vec::with_capacity(n);
    let mut off_pattern = 0.0f64;
    for k in 0..n {
        let nonzero: Vec<usize> = (0..n)
            .filter(|&j| gamma[(k, j)].norm() > tol.rank)
            .collect();
        if nonzero.len() != 1 {
            return Err(Error::Hypothesis(format!(
                "expansion of {}{} has {} nonzero coefficients; the product-form terms are not factorable",
                SLOT_NAMES[slot].to_uppercase(),
                k + 1,
                nonzero.len()
            )));
        }
        let j = nonzero[0];
        for i in (0..n).filter(|&i| i != j) {
            off_pattern = off_pattern.max(gamma[(k, i)].norm());
        }
        permutation.push(j);
    }
    let mut seen = vec![false; n];
    for &j in &permutation {
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::Hypothesis(format!(
                "candidate permutation {:?} is not a bijection",
                permutation.iter().map(|p| p + 1).collect::<Vec<_>>()
            )));
        }
    }

    let mut residual = distance.max(off_pattern);
    let mut per_term = Vec::with_capacity(n);
    let scale = v1.raw_norm;
    for (k, &j) in permutation.iter().enumerate() {
        let g = gamma[(k, j)];
        residual = residual.max((g.norm() - 1.0).abs());

        let t1 = &first.terms()[j];
        let t2 = &second.terms()[k];
        let mut overlaps = [C64::new(0.0, 0.0); 3];
        for s in 0..3 {
            let (x, y): (&Ket, &Ket) = (t1.kets()[s], t2.kets()[s]);
            let ov = y.inner(x);
            let defect = 1.0 - ov.norm();
            if defect > tol.collinear {
                return Err(Error::Hypothesis(format!(
                    "slot {{{}}}: matched kets {} and {} are not collinear (|overlap| = {:.12})",
                    SLOT_NAMES[s],
                    j + 1,
                    k + 1,
                    ov.norm()
                )));
            }
            residual = residual.max(defect.max(0.0));
            overlaps[s] = ov;
        }

        let (w1, w2) = (t1.coeff.norm(), t2.coeff.norm());
        let mismatch = (w1 - w2).abs() / scale;
        if mismatch > WEIGHT_TOL {
            return Err(Error::Hypothesis(format!(
                "coefficient magnitudes differ for matched terms {} and {}: {w1} vs {w2}",
                j + 1,
                k + 1
            )));
        }
        residual = residual.max(mismatch);
        per_term.push(TermCertificate {
            overlap_a: overlaps[0],
            overlap_b: overlaps[1],
            overlap_c: Some(overlaps[2]),
            weight_first: w1,
            weight_second: w2,
        });
    }

    Ok(MatchResult {
        n,
        permutation,
        per_term,
        residual,
        expansion_slot: slot,
    })
}

/// Matches two product decompositions of the same operator by purifying
/// both, rotating the second purification's auxiliary kets onto the first
/// with the relating unitary, and matching the resulting tridecompositions.
pub fn match_bidecomposition(
    first: &ProductDecomposition,
    second: &ProductDecomposition,
    tol: &ToleranceConfig,
) -> Result<MatchResult> {
    same_dims(first.dims(), second.dims())?;
    let rho1 = build_rho(first);
    let rho2 = build_rho(second);
    let distance = rho1.relative_distance(&rho2);
    if distance > tol.equality {
        return Err(Error::OperatorsDiffer(distance));
    }

    let dim3 = first.len().max(second.len());
    let t1 = purify(first, dim3)?;
    let t2 = purify(second, dim3)?;
    let psi = build_tri_vector(&t1, tol)?.amplitudes;
    let phi = build_tri_vector(&t2, tol)?.amplitudes;
    let split = FactoredDims::bipartite(first.dims().total(), dim3)?;
    let u = relating_unitary(&psi, &phi, &split, tol)?;

    let rotated: Vec<TriTerm> = t2
        .terms()
        .iter()
        .map(|t| TriTerm {
            c: u.apply(&t.c),
            ..t.clone()
        })
        .collect();
    let t2 = TriDecomposition::new(t2.dims().clone(), rotated, tol)?;
    let tri = match_tridecomposition(&t1, &t2, tol)?;

    let (total1, total2) = (first.total_weight(), second.total_weight());
    let mut residual = tri.residual;
    let mut per_term = Vec::with_capacity(tri.n);
    for (k, &j) in tri.permutation.iter().enumerate() {
        let (w1, w2) = (first.terms()[j].weight, second.terms()[k].weight);
        let mismatch = (w1 / total1 - w2 / total2).abs();
        if mismatch > WEIGHT_TOL {
            return Err(Error::Hypothesis(format!(
                "weights differ for matched terms {} and {}: {w1} vs {w2}",
                j + 1,
                k + 1
            )));
        }
        residual = residual.max(mismatch);
        let cert = &tri.per_term[k];
        per_term.push(TermCertificate {
            overlap_a: cert.overlap_a,
            overlap_b: cert.overlap_b,
            overlap_c: None,
            weight_first: w1,
            weight_second: w2,
        });
    }
    Ok(MatchResult {
        n: tri.n,
        permutation: tri.permutation,
        per_term,
        residual,
        expansion_slot: tri.expansion_slot,
    })
}
