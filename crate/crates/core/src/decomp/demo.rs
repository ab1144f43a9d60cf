//! Worked example of the basis-degeneracy objection.
//!
//! `ρ = ½|a₁b₁⟩⟨a₁b₁| + ½|a₂b₂⟩⟨a₂b₂|` with orthonormal pairs has the doubly
//! degenerate spectrum `(½, ½, 0, 0)`, so it can also be written with the
//! rotated eigenvectors `|q₁,₂⟩ = (|a₁b₁⟩ ± |a₂b₂⟩)/√2`. Those are not
//! products, so the rotated form is not a competing sum of products. The same
//! holds one level up for `(|a₁b₁c₁⟩ + |a₂b₂c₂⟩)/√2 = (|q₁d₁⟩ + |q₂d₂⟩)/√2`
//! with `|d₁,₂⟩ = (|c₁⟩ ± |c₂⟩)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::decomp::factorable::is_factorable;
use crate::decomp::matching::{match_bidecomposition, MatchResult};
use crate::error::Error;
use crate::linalg::{c, frobenius, kron_vec};
use crate::subspace::ToleranceConfig;
use crate::tensor::{
    build_rho, tensor_product, FactoredDims, Ket, ProductDecomposition, ProductTerm,
    TriDecomposition,
};
use crate::CVector;

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    /// Spectrum of the two-term operator, descending.
    pub eigenvalues: Vec<f64>,
    /// `‖ρ − ½|q₁⟩⟨q₁| − ½|q₂⟩⟨q₂|‖_F`.
    pub q_form_residual: f64,
    /// Schmidt values of `q₁` and `q₂`.
    pub q_schmidt: [Vec<f64>; 2],
    pub q_factorable: [bool; 2],
    /// Self-match of the product form.
    pub product_form_match: MatchResult,
    /// `‖(|a₁b₁c₁⟩ + |a₂b₂c₂⟩)/√2 − (|q₁d₁⟩ + |q₂d₂⟩)/√2‖`.
    pub tri_residual: f64,
    /// Error raised when the `q`/`d` form is offered as a tridecomposition.
    pub recast_error: Error,
}

impl DegeneracyReport {
    /// The rotated form is no counterexample when its vectors are not
    /// products while it still reproduces the operator.
    pub fn rotated_form_is_not_a_counterexample(&self) -> bool {
        !self.q_factorable[0]
            && !self.q_factorable[1]
            && matches!(self.recast_error, Error::FactorabilityViolated { .. })
    }
}

pub fn demo_degeneracy() -> DegeneracyReport {
    let tol = ToleranceConfig::default();
    let e = |i| Ket::basis(2, i);
    let half = c(0.5, 0.0);
    let h = c(FRAC_1_SQRT_2, 0.0);

    let product_form = ProductDecomposition::new(
        FactoredDims::bipartite(2, 2).expect("static dims"),
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
        &tol,
    )
    .expect("orthonormal pairs satisfy the hypotheses");
    let rho = build_rho(&product_form);
    let eigenvalues = rho.eigenvalues();

    let ab = |i: usize| tensor_product(&e(i), &e(i)).into_amplitudes();
    let q1: CVector = (ab(0) + ab(1)) * h;
    let q2: CVector = (ab(0) - ab(1)) * h;
    let q_form = (&q1 * q1.adjoint()) * half + (&q2 * q2.adjoint()) * half;
    let q_form_residual = frobenius(&(rho.matrix() - q_form));

    let split = FactoredDims::bipartite(2, 2).expect("static dims");
    let f1 = is_factorable(&Ket::from_unit(q1.clone()), &split, &tol).expect("dims agree");
    let f2 = is_factorable(&Ket::from_unit(q2.clone()), &split, &tol).expect("dims agree");

    let product_form_match = match_bidecomposition(&product_form, &product_form, &tol)
        .expect("a decomposition matches itself");

    let d1: CVector = (e(0).into_amplitudes() + e(1).into_amplitudes()) * h;
    let d2: CVector = (e(0).into_amplitudes() - e(1).into_amplitudes()) * h;
    let abc = |i: usize| kron_vec(&ab(i), e(i).amplitudes());
    let lhs = (abc(0) + abc(1)) * h;
    let rhs = (kron_vec(&q1, &d1) + kron_vec(&q2, &d2)) * h;
    let tri_residual = (lhs - rhs).norm();

    let recast_error = TriDecomposition::from_grouped(
        FactoredDims::tripartite(2, 2, 2).expect("static dims"),
        vec![(h, q1, Ket::from_unit(d1)), (h, q2, Ket::from_unit(d2))],
        &tol,
    )
    .expect_err("rotated vectors are entangled");

    DegeneracyReport {
        eigenvalues,
        q_form_residual,
        q_schmidt: [f1.schmidt_values, f2.schmidt_values],
        q_factorable: [f1.factorable, f2.factorable],
        product_form_match,
        tri_residual,
        recast_error,
    }
}
