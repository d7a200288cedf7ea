//! Two-state divergence checks: Rényi monotonicity in `α`, the overlap
//! chain below relative entropy, and Pinsker.

use super::{omega_chain, require_same_dim, trace_norm, ChainResult, CheckResult};
use crate::entropy::{relative_entropy, renyi};
use crate::states::{DensityMatrix, SubnormalizedOperator};
use crate::{Error, Result};

/// `S_{α_k}(ρ‖σ) ≥ … ≥ S_{α_1}(ρ‖σ)` for ascending `alphas` in `(0, 1)`;
/// links are listed from the largest `α` down.
pub fn check_renyi_monotonicity(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alphas: &[f64],
    tolerance: f64,
) -> Result<ChainResult> {
    require_same_dim(rho, sigma)?;
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("α grid must be strictly ascending".into()));
    }
    let mut links = alphas
        .iter()
        .map(|&a| Ok((format!("S_{a}"), renyi(a, rho, sigma)?.to_f64())))
        .collect::<Result<Vec<_>>>()?;
    links.reverse();
    Ok(ChainResult::new("renyi_monotonicity", links, tolerance))
}

/// `S(ρ‖σ) ≥ −2 ln Tr√ρ√σ ≥ ‖√ρ−√σ‖₂² ≥ ¼‖ρ−σ‖₁²` for `Tr σ ≤ 1`.
pub fn check_overlap_chain(
    rho: &DensityMatrix,
    sigma: &SubnormalizedOperator,
    tolerance: f64,
) -> Result<ChainResult> {
    let s = relative_entropy(rho, sigma)?.to_f64();
    omega_chain("overlap_chain", ("rel_entropy", s), rho.matrix(), sigma.matrix(), tolerance)
}

/// `S(ρ‖σ) ≥ ½‖ρ − σ‖₁²`.
pub fn check_pinsker(rho: &DensityMatrix, sigma: &DensityMatrix, tolerance: f64) -> Result<CheckResult> {
    require_same_dim(rho, sigma)?;
    let s = relative_entropy(rho, &sigma.into())?.to_f64();
    let t = trace_norm(&(rho.matrix() - sigma.matrix()))?;
    Ok(CheckResult::at_least("pinsker", s, 0.5 * t * t, tolerance))
}
