//! Dense complex kernels shared by the public modules.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{CMatrix, CVector, C64};

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `(M + M†) / 2`.
pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending
/// order with eigenvectors as matching columns. The input is symmetrized
/// first.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = symmetrize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Thin SVD `M = U diag(s) V†` with singular values descending.
pub(crate) struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

pub(crate) fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            u: CMatrix::zeros(rows, 0),
            s: Vec::new(),
            v: CMatrix::zeros(cols, 0),
        };
    }
    let raw = m.clone().svd(true, true);
    let u = raw.u.expect("u requested");
    let v_t = raw.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| raw.singular_values[j].total_cmp(&raw.singular_values[i]));
    Svd {
        u: CMatrix::from_fn(rows, k, |r, i| u[(r, order[i])]),
        s: order.iter().map(|&i| raw.singular_values[i]).collect(),
        v: CMatrix::from_fn(cols, k, |r, i| v_t[(order[i], r)].conj()),
    }
}

/// Number of singular values at or above `rel_tol · s_max`.
pub(crate) fn numerical_rank(s: &[f64], rel_tol: f64) -> usize {
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x >= rel_tol * top).count(),
        _ => 0,
    }
}

/// Moore-Penrose pseudoinverse with a relative singular-value cutoff.
pub(crate) fn pinv(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let Svd { u, s, v } = svd(m);
    let r = numerical_rank(&s, rel_tol);
    let mut out = CMatrix::zeros(m.ncols(), m.nrows());
    for (i, si) in s.iter().take(r).enumerate() {
        out += (v.column(i) * u.column(i).adjoint()).scale(1.0 / si);
    }
    out
}

/// Orthonormal basis of the complement of the column span of `basis`
/// (columns assumed orthonormal) in `C^dim`. Standard basis vectors are
/// projected and the largest remaining residual is taken each step, so the
/// result depends only on the input.
pub(crate) fn orthonormal_complement(basis: &CMatrix, dim: usize) -> CMatrix {
    let want = dim - basis.ncols();
    let mut kept: Vec<CVector> = basis.column_iter().map(|c| c.into_owned()).collect();
    let mut out = Vec::with_capacity(want);
    let mut candidates: Vec<CVector> = (0..dim)
        .map(|i| {
            let mut e = CVector::zeros(dim);
            e[i] = c(1.0, 0.0);
            e
        })
        .collect();
    for _ in 0..want {
        let mut best: Option<(usize, CVector, f64)> = None;
        for (i, cand) in candidates.iter().enumerate() {
            let mut r = cand.clone();
            // two passes of Gram-Schmidt
            for _ in 0..2 {
                for k in &kept {
                    let proj = k.dotc(&r);
                    r -= k * proj;
                }
            }
            let n = r.norm();
            if best.as_ref().is_none_or(|b| n > b.2) {
                best = Some((i, r, n));
            }
        }
        let (i, r, n) = best.expect("candidates remain");
        let q = r.unscale(n);
        candidates.remove(i);
        kept.push(q.clone());
        out.push(q);
    }
    if out.is_empty() {
        CMatrix::zeros(dim, 0)
    } else {
        CMatrix::from_columns(&out)
    }
}

/// Multiply by the phase that makes the first component of magnitude above
/// `tol` real and positive.
pub(crate) fn fix_phase(v: &mut CVector, tol: f64) {
    if let Some(z) = v.iter().copied().find(|z| z.norm() > tol) {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// Row-major reshape of a vector into a `rows × cols` matrix.
pub(crate) fn reshape(x: &CVector, rows: usize, cols: usize) -> CMatrix {
    debug_assert_eq!(x.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, k| x[i * cols + k])
}

pub(crate) fn flatten(m: &CMatrix) -> CVector {
    let (rows, cols) = m.shape();
    CVector::from_fn(rows * cols, |idx, _| m[(idx / cols, idx % cols)])
}

pub(crate) fn kron_vec(x: &CVector, y: &CVector) -> CVector {
    let dy = y.len();
    CVector::from_fn(x.len() * dy, |idx, _| x[idx / dy] * y[idx % dy])
}

pub(crate) fn random_complex_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub(crate) fn random_complex_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    random_complex_matrix(rng, dim, 1).column(0).into_owned()
}

pub(crate) fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    symmetrize(&random_complex_matrix(rng, dim, dim))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the diagonal phases
/// of R divided out.
pub(crate) fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = random_complex_matrix(rng, dim, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    q
}

pub(crate) fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(1.0, theta)
}
