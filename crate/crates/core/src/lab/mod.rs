//! Checkers: one function per inequality or identity, each computing both
//! sides on concrete inputs and returning a [`CheckResult`] or
//! [`ChainResult`] with signed slacks. Also home to the Lie-Trotter study
//! and the open-conjecture explorer.
//!
//! Operators named `Ω` below are always `exp` of a Hermitian combination of
//! logarithms; whenever a chain through `Ω` is reported, `Tr Ω ≤ 1` is
//! recorded as a side condition because the chain links rely on it.

mod channel;
mod divergence;
pub mod explore;
mod result;
mod trace;
mod tripartite;
mod trotter;

pub use channel::{
    check_dw_alpha, check_dw_alpha_tripartite, check_monotonicity, check_ptrace_strengthening,
    check_sbw_limit, check_stronger_monotonicity, check_unital_trace_bound, dw_operator,
    unital_omega,
};
pub use divergence::{check_overlap_chain, check_pinsker, check_renyi_monotonicity};
pub use explore::{
    explore_conjecture, replay_exploration, ConjectureKind, Ensemble, ExploreConfig, ExploreDump, Exploration,
};
pub use result::{ChainResult, CheckResult, Condition, Meta, TrotterResult, Verdict};
pub use trace::{
    check_audenaert_ps, check_cl_concavity, check_golden_thompson, check_lieb_concavity,
    check_twirl_identity,
};
pub use tripartite::{
    check_bsw_identity, check_squashed_proxy, check_ssa_strengthened, check_subadd_exp,
    check_super_ssa, check_three_state_chain, check_trace_exp_bound, markov_characterizations,
    markov_residuals, ssa_omega, MarkovResiduals, DEFAULT_T_SAMPLES,
};
pub use trotter::{trotter_sequence, trotter_term};

use crate::linalg::{herm_eig, schatten_norm, ComplexMatrix, Norm};
use crate::states::{DensityMatrix, MultipartiteState};
use crate::{Error, Result};

/// Labels of the four-link chain shared by most checkers.
pub const LINK_OVERLAP: &str = "neg2_log_overlap";
pub const LINK_HS: &str = "sqrt_hs_sq";
pub const LINK_TRACE: &str = "quarter_trace_sq";
pub const COND_TRACE: &str = "trace_omega_le_1";

pub(crate) fn psd_sqrt(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_eig(&x.hermitize())?.pow(0.5)
}

pub(crate) fn trace_norm(x: &ComplexMatrix) -> Result<f64> {
    schatten_norm(x, Norm::One)
}

/// `[−2 ln Tr √ρ√Ω, ‖√ρ − √Ω‖₂², ¼‖ρ − Ω‖₁²]`.
pub(crate) fn overlap_links(rho: &ComplexMatrix, omega: &ComplexMatrix) -> Result<[f64; 3]> {
    let a = psd_sqrt(rho)?;
    let b = psd_sqrt(omega)?;
    let fidelity = a.trace_product(&b).re;
    let overlap = if fidelity > 0.0 {
        -2.0 * fidelity.ln()
    } else {
        f64::INFINITY
    };
    let hs = (&a - &b).frobenius().powi(2);
    let t = trace_norm(&(rho - omega))?;
    Ok([overlap, hs, 0.25 * t * t])
}

/// Four-link chain `first ≥ −2 ln Tr√ρ√Ω ≥ ‖√ρ−√Ω‖₂² ≥ ¼‖ρ−Ω‖₁²` with the
/// `Tr Ω ≤ 1` side condition and `Tr Ω` recorded.
pub(crate) fn omega_chain(
    name: &str,
    first: (&str, f64),
    rho: &ComplexMatrix,
    omega: &ComplexMatrix,
    tolerance: f64,
) -> Result<ChainResult> {
    let [o, h, t] = overlap_links(rho, omega)?;
    let trace = omega.trace().re;
    Ok(ChainResult::new(
        name,
        vec![
            (first.0.to_string(), first.1),
            (LINK_OVERLAP.to_string(), o),
            (LINK_HS.to_string(), h),
            (LINK_TRACE.to_string(), t),
        ],
        tolerance,
    )
    .condition(COND_TRACE, 1.0 - trace)
    .with("trace_omega", trace))
}

pub(crate) fn require_parts(state: &MultipartiteState, parts: usize) -> Result<()> {
    if parts == 3 {
        return state.require_tripartite();
    }
    if state.parts() != parts {
        return Err(Error::DimMismatch(format!(
            "expected {parts} subsystems, got {}",
            state.parts()
        )));
    }
    Ok(())
}

pub(crate) fn require_same_dims(a: &MultipartiteState, b: &MultipartiteState) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimMismatch(format!(
            "subsystem dims {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

pub(crate) fn require_same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(format!("dimension {} vs {}", a.dim(), b.dim())));
    }
    Ok(())
}
