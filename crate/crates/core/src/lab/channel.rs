//! Channel checkers: data processing, its strengthening for unital
//! channels and partial traces, and the `α`-family whose `α → 0` limit
//! produces the strengthened bound.

use super::{omega_chain, require_parts, require_same_dim, require_same_dims, ChainResult, CheckResult};
use crate::channels::KrausChannel;
use crate::entropy::{relative_entropy, relative_entropy_op};
use crate::linalg::{embed, expm, herm_eig, schatten_norm, ComplexMatrix, Norm};
use crate::states::{DensityMatrix, MultipartiteState};
use crate::{Error, Result};

fn log_pd(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_eig(&x.hermitize())?.log()
}

fn pow_psd(x: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    herm_eig(&x.hermitize())?.pow(p)
}

fn check_channel_input(rho: &DensityMatrix, sigma: &DensityMatrix, phi: &KrausChannel) -> Result<()> {
    require_same_dim(rho, sigma)?;
    if rho.dim() != phi.d_in() {
        return Err(Error::DimMismatch(format!(
            "states are {}-dimensional, channel input is {}",
            rho.dim(),
            phi.d_in()
        )));
    }
    Ok(())
}

/// `S(ρ‖σ) ≥ S(Φρ‖Φσ)`.
pub fn check_monotonicity(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    phi: &KrausChannel,
    tolerance: f64,
) -> Result<CheckResult> {
    check_channel_input(rho, sigma, phi)?;
    let before = relative_entropy(rho, &sigma.into())?.to_f64();
    let after = relative_entropy(&phi.apply_state(rho)?, &phi.apply_state(sigma)?.into())?.to_f64();
    Ok(CheckResult::at_least("monotonicity", before, after, tolerance))
}

/// `Ω = exp(log σ + Φ*(log Φρ) − Φ*(log Φσ))`.
pub fn unital_omega(rho: &DensityMatrix, sigma: &DensityMatrix, phi: &KrausChannel) -> Result<ComplexMatrix> {
    check_channel_input(rho, sigma, phi)?;
    let dual = phi.dual();
    let up = dual.apply(&log_pd(&phi.apply(rho.matrix())?)?)?;
    let down = dual.apply(&log_pd(&phi.apply(sigma.matrix())?)?)?;
    let exponent = &(&log_pd(sigma.matrix())? + &up) - &down;
    expm(&exponent.hermitize())
}

/// `S(ρ‖σ) − S(Φρ‖Φσ) ≥ −2 ln Tr√ρ√Ω ≥ ‖√ρ−√Ω‖₂² ≥ ¼‖ρ−Ω‖₁²` for unital
/// `Φ`, with `Tr Ω ≤ 1`. `S(ρ‖Ω)` is recorded alongside; it equals the
/// first link identically.
pub fn check_stronger_monotonicity(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    phi: &KrausChannel,
    tolerance: f64,
) -> Result<ChainResult> {
    phi.require_unital()?;
    let omega = unital_omega(rho, sigma, phi)?;
    let before = relative_entropy(rho, &sigma.into())?.to_f64();
    let after = relative_entropy(&phi.apply_state(rho)?, &phi.apply_state(sigma)?.into())?.to_f64();
    let s_omega = relative_entropy_op(rho, &omega)?.to_f64();
    Ok(omega_chain(
        "stronger_monotonicity",
        ("rel_entropy_drop", before - after),
        rho.matrix(),
        &omega,
        tolerance,
    )?
    .with("rel_entropy_omega", s_omega))
}

/// `Tr exp(log σ + Φ*(log Φρ) − Φ*(log Φσ)) ≤ 1` for unital `Φ`.
pub fn check_unital_trace_bound(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    phi: &KrausChannel,
    tolerance: f64,
) -> Result<CheckResult> {
    phi.require_unital()?;
    let trace = unital_omega(rho, sigma, phi)?.trace().re;
    Ok(CheckResult::at_least("unital_trace_bound", 1.0, trace, tolerance).with("trace_omega", trace))
}

/// Bipartite strengthening of monotonicity under `Tr_B`:
/// `S(ρ_AB‖σ_AB) − S(ρ_A‖σ_A) ≥ −2 ln Tr√ρ_AB√Ω ≥ … ` with
/// `Ω = exp(log σ_AB − log σ_A ⊗ 1 + log ρ_A ⊗ 1)`.
pub fn check_ptrace_strengthening(
    rho: &MultipartiteState,
    sigma: &MultipartiteState,
    tolerance: f64,
) -> Result<ChainResult> {
    require_parts(rho, 2)?;
    require_same_dims(rho, sigma)?;
    let dims = rho.dims();
    let (rho_a, sigma_a) = (rho.marginal(&[0])?, sigma.marginal(&[0])?);
    let exponent = &(&log_pd(sigma.matrix())? - &embed(&log_pd(sigma_a.matrix())?, dims, &[0])?)
        + &embed(&log_pd(rho_a.matrix())?, dims, &[0])?;
    let omega = expm(&exponent.hermitize())?;
    let full = relative_entropy(rho.state(), &sigma.state().into())?.to_f64();
    let reduced = relative_entropy(&rho_a, &(&sigma_a).into())?.to_f64();
    omega_chain(
        "ptrace_strengthening",
        ("rel_entropy_drop", full - reduced),
        rho.matrix(),
        &omega,
        tolerance,
    )
}

fn require_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::BadAlpha { alpha })
    }
}

/// `{σ^{α/2} Φ*(Φσ^{−α/2} (Φρ)^α Φσ^{−α/2}) σ^{α/2}}^{1/α}`.
pub fn dw_operator(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    phi: &KrausChannel,
    alpha: f64,
) -> Result<ComplexMatrix> {
    require_alpha(alpha)?;
    check_channel_input(rho, sigma, phi)?;
    let phi_sigma = pow_psd(&phi.apply(sigma.matrix())?, -alpha / 2.0)?;
    let phi_rho = pow_psd(&phi.apply(rho.matrix())?, alpha)?;
    let inner = phi.dual().apply(&phi_rho.conjugate_by(&phi_sigma))?;
    let outer = inner.conjugate_by(&pow_psd(sigma.matrix(), alpha / 2.0)?);
    pow_psd(&outer, 1.0 / alpha)
}

/// `Tr {σ^{α/2} Φ*(Φσ^{−α/2} (Φρ)^α Φσ^{−α/2}) σ^{α/2}}^{1/α} ≤ 1`.
pub fn check_dw_alpha(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    phi: &KrausChannel,
    alpha: f64,
    tolerance: f64,
) -> Result<CheckResult> {
    let q = dw_operator(rho, sigma, phi, alpha)?.trace().re;
    Ok(CheckResult::at_least("dw_alpha", 1.0, q, tolerance)
        .with("alpha", alpha)
        .with("q_alpha", q))
}

/// `Tr (ρ_AB^{α/2} ρ_B^{−α/2} ρ_BC^α ρ_B^{−α/2} ρ_AB^{α/2})^{1/α} ≤ 1`.
pub fn check_dw_alpha_tripartite(state: &MultipartiteState, alpha: f64, tolerance: f64) -> Result<CheckResult> {
    require_alpha(alpha)?;
    require_parts(state, 3)?;
    let dims = state.dims();
    let ab = embed(&pow_psd(state.marginal(&[0, 1])?.matrix(), alpha / 2.0)?, dims, &[0, 1])?;
    let b = embed(&pow_psd(state.marginal(&[1])?.matrix(), -alpha / 2.0)?, dims, &[1])?;
    let bc = embed(&pow_psd(state.marginal(&[1, 2])?.matrix(), alpha)?, dims, &[1, 2])?;
    let left = &ab * &b;
    let q = pow_psd(&bc.conjugate_by(&left), 1.0 / alpha)?.trace().re;
    Ok(CheckResult::at_least("dw_alpha_tripartite", 1.0, q, tolerance)
        .with("alpha", alpha)
        .with("q_alpha", q))
}

/// Error of the `α`-family against its `α → 0` limit,
/// `e_α = ‖dw_operator(α) − Ω‖_∞`, along a descending `α` grid. Links are
/// the `e_α` in grid order, so the chain asserts they decrease; a side
/// condition asserts the last one is below `final_bound`.
pub fn check_sbw_limit(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    phi: &KrausChannel,
    alphas: &[f64],
    final_bound: f64,
    tolerance: f64,
) -> Result<ChainResult> {
    if alphas.is_empty() || alphas.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidParameter("α grid must be non-empty and strictly descending".into()));
    }
    let omega = unital_omega(rho, sigma, phi)?;
    let mut links = Vec::with_capacity(alphas.len());
    let mut last_trace = f64::NAN;
    for &a in alphas {
        let op = dw_operator(rho, sigma, phi, a)?;
        last_trace = op.trace().re;
        links.push((format!("e_{a}"), schatten_norm(&(&op - &omega), Norm::Inf)?));
    }
    let last = links.last().map(|l| l.1).unwrap_or(f64::NAN);
    Ok(ChainResult::new("sbw_limit", links, tolerance)
        .condition("final_error_below_bound", final_bound - last)
        .with("trace_omega", omega.trace().re)
        .with("trace_last_alpha", last_trace))
}
