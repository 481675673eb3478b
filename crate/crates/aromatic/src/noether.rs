//! Symmetries, conservation laws, and the volume-preservation pipeline.
//!
//! A vector field `τ` is a symmetry of a form `γ` when the Lie derivative
//! `L_τγ` vanishes, and a divergence symmetry when `L_τγ` is a horizontal
//! boundary.  For Lagrangians (rootless, covertex-free forms) the two
//! solvability questions "is `τ` a divergence symmetry of `γ`" and "is
//! `i_τ δ_V γ` a horizontal boundary" are equivalent, and this module checks
//! that equivalence, produces the witnesses, and carries the machinery over
//! to the study of volume preservation: solenoidal fields, modified
//! measures, and the modified-field expansion `L_{exp(τ)} γ` against the
//! exact-flow series.
//!
//! Solver witnesses are canonical outputs of the exact linear solver, not
//! unique objects: two valid witnesses differ by a horizontal kernel
//! element, so tests compare their images under the horizontal differential
//! rather than the witnesses themselves.

use std::collections::BTreeMap;

use crate::calculus::{bracket, contract, d_h, d_v, delta_v, lie};
use crate::envelope::{exact_flow, exp_lie, Series};
use crate::error::{Error, Result};
use crate::forest::Grade;
use crate::form::{concat, Form};
use crate::linalg::{solve_horizontal, GradedMatrix, OperatorTag};

/// The outcome of testing whether a field is a (divergence) symmetry.
#[derive(Clone, Debug)]
pub struct SymmetryVerdict {
    pub status: SymmetryStatus,
    /// The Lie derivative `L_τγ` whose exactness was decided.
    pub residual: Form,
}

#[derive(Clone, Debug)]
pub enum SymmetryStatus {
    /// `L_τγ = 0`.
    Symmetry,
    /// `L_τγ = d_H η` for the recorded witness `η`.
    DivergenceSymmetry(Form),
    /// `L_τγ` is not a horizontal boundary.
    Neither,
}

impl SymmetryVerdict {
    /// True for both plain and divergence symmetries.
    pub fn is_divergence_symmetry(&self) -> bool {
        !matches!(self.status, SymmetryStatus::Neither)
    }
}

/// Classifies `τ` against `γ`: symmetry, divergence symmetry (with a
/// horizontal witness), or neither.
pub fn classify_symmetry(tau: &Form, gamma: &Form) -> Result<SymmetryVerdict> {
    let residual = lie(tau, gamma)?;
    if residual.is_zero() {
        return Ok(SymmetryVerdict { status: SymmetryStatus::Symmetry, residual });
    }
    let status = match solve_horizontal(&residual)? {
        Some(eta) => SymmetryStatus::DivergenceSymmetry(eta),
        None => SymmetryStatus::Neither,
    };
    Ok(SymmetryVerdict { status, residual })
}

/// True when the field has vanishing horizontal differential, i.e. when it
/// is a symmetry of the one-loop Lagrangian.
pub fn is_solenoidal(tau: &Form) -> Result<bool> {
    Ok(d_h(tau)?.is_zero())
}

/// Basis of the solenoidal fields of one order: the kernel of the horizontal
/// differential on the one-root slice.
pub fn solenoidal_basis(order: usize) -> Result<Vec<Form>> {
    let matrix = GradedMatrix::of_operator(OperatorTag::Horizontal, Grade::new(1, 0, order))?;
    matrix.kernel_forms()
}

/// Splits the vertical differential of a Lagrangian into its source part and
/// a horizontal remainder: `d_V γ = δ_V γ + d_H η`, returning `(δ_V γ, η)`.
pub fn first_variational_split(gamma: &Form) -> Result<(Form, Form)> {
    let g = gamma.grade();
    if g.roots != 0 || g.covertices != 0 {
        return Err(Error::Grade(format!(
            "the first variational split expects a Lagrangian, got grade {g:?}"
        )));
    }
    let source = delta_v(gamma)?;
    let defect = d_v(gamma)?.sub(&source)?;
    match solve_horizontal(&defect)? {
        Some(eta) => Ok((source, eta)),
        None => Err(Error::Domain(
            "the first variational split found no horizontal witness; \
             this contradicts the variational identity and indicates an internal inconsistency"
                .into(),
        )),
    }
}

/// Witness `η` with `d_H η = i_τ δ_V γ`, or `None` when no conservation law
/// is generated.
pub fn conservation_law(tau: &Form, gamma: &Form) -> Result<Option<Form>> {
    let source = delta_v(gamma)?;
    let moved = contract(tau, &source)?;
    solve_horizontal(&moved)
}

/// Checks that "`τ` is a divergence symmetry of `γ`" and "`τ` generates a
/// conservation law for `δ_V γ`" give the same verdict.
pub fn noether_equivalence_check(tau: &Form, gamma: &Form) -> Result<bool> {
    let symmetry = classify_symmetry(tau, gamma)?.is_divergence_symmetry();
    let law = conservation_law(tau, gamma)?.is_some();
    Ok(symmetry == law)
}

/// Given a divergence symmetry `τ₁` of `γ`, checks that the bracket
/// `⟦τ₁,τ₂⟧` is again a divergence symmetry of `γ`, and — when `τ₁` is a
/// plain symmetry — that `τ₁` is a symmetry of `L_{τ₂}γ` exactly when the
/// bracket is a symmetry of `γ`.
pub fn bracket_propagation_check(tau1: &Form, tau2: &Form, gamma: &Form) -> Result<bool> {
    let first = classify_symmetry(tau1, gamma)?;
    if !first.is_divergence_symmetry() {
        return Err(Error::Domain(
            "bracket propagation expects the first field to be a divergence symmetry".into(),
        ));
    }
    let bracketed = bracket(tau1, tau2)?;
    if !classify_symmetry(&bracketed, gamma)?.is_divergence_symmetry() {
        return Ok(false);
    }
    if matches!(first.status, SymmetryStatus::Symmetry) {
        let moved = lie(tau2, gamma)?;
        let symmetry_of_moved = lie(tau1, &moved)?.is_zero();
        let bracket_symmetry = lie(&bracketed, gamma)?.is_zero();
        if symmetry_of_moved != bracket_symmetry {
            return Ok(false);
        }
    }
    Ok(true)
}

/// If `L_τ γ̂` is a horizontal boundary (with `γ̂` a two-root form), then `τ`
/// must be a symmetry of `d_H γ̂`; returns whether that implication held.
pub fn symmetry_descent_check(gamma_hat: &Form, tau: &Form) -> Result<bool> {
    let moved = lie(tau, gamma_hat)?;
    if solve_horizontal(&moved)?.is_none() {
        return Ok(true);
    }
    let gamma = d_h(gamma_hat)?;
    Ok(lie(tau, &gamma)?.is_zero())
}

/// True when `τ + μτ` has vanishing horizontal differential gradewise, i.e.
/// when the field is solenoidal for the measure modified by the Lagrangian
/// `μ`.
pub fn modified_measure_check(mu: &Form, tau: &Form) -> Result<bool> {
    let scaled = concat(mu, tau)?;
    Ok(is_solenoidal(tau)? && d_h(&scaled)?.is_zero())
}

/// The modified-field expansion together with its per-order divergence.
#[derive(Clone, Debug)]
pub struct ModifiedFieldReport {
    /// `L_{exp(τ)} γ` with `γ` the exact-flow series, truncated.
    pub field: Series,
    /// `d_H` of each homogeneous component of the field — the obstruction to
    /// volume preservation, order by order.
    pub divergence: BTreeMap<usize, Form>,
}

/// Expands the modified field `L_{exp(τ)} γ` against the exact-flow series,
/// after checking that every component of the exponent is solenoidal.
pub fn vp_modified_field(tau: &Series, max_order: usize) -> Result<ModifiedFieldReport> {
    for order in tau.orders() {
        if !is_solenoidal(&tau.component(order))? {
            return Err(Error::Domain(format!(
                "the exponent component at order {order} is not solenoidal"
            )));
        }
    }
    let gamma = exact_flow(max_order)?;
    let field = exp_lie(tau, &gamma, max_order)?;
    let mut divergence = BTreeMap::new();
    for order in field.orders() {
        divergence.insert(order, d_h(&field.component(order))?);
    }
    Ok(ModifiedFieldReport { field, divergence })
}
