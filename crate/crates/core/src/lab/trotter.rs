//! Generalized Lie-Trotter sequence
//! `t_n = Tr (ρ_AB^{1/2n} ρ_B^{−1/2n} ρ_BC^{1/n} ρ_B^{−1/2n} ρ_AB^{1/2n})^n`,
//! which is bounded by one and tends to `Tr exp(log ρ_AB − log ρ_B + log ρ_BC)`.

use super::{require_parts, ssa_omega, Meta, TrotterResult};
use crate::linalg::{embed, herm_eig, ComplexMatrix};
use crate::states::MultipartiteState;
use crate::{Error, Result};

fn power(x: &ComplexMatrix, n: u64) -> Result<ComplexMatrix> {
    if n.is_power_of_two() {
        let mut acc = x.hermitize();
        for _ in 0..n.trailing_zeros() {
            acc = (&acc * &acc).hermitize();
        }
        Ok(acc)
    } else {
        herm_eig(&x.hermitize())?.pow(n as f64)
    }
}

/// `t_n` for a single `n ≥ 1`.
pub fn trotter_term(state: &MultipartiteState, n: u64) -> Result<f64> {
    require_parts(state, 3)?;
    if n == 0 {
        return Err(Error::InvalidParameter("Trotter index must be ≥ 1".into()));
    }
    let dims = state.dims();
    let inv = 1.0 / n as f64;
    let pow_of = |keep: &[usize], p: f64| -> Result<ComplexMatrix> {
        let eig = state.marginal(keep)?.eig()?;
        embed(&eig.pow(p)?, dims, keep)
    };
    let a = &pow_of(&[0, 1], inv / 2.0)? * &pow_of(&[1], -inv / 2.0)?;
    let x = pow_of(&[1, 2], inv)?.conjugate_by(&a);
    Ok(power(&x, n)?.trace().re)
}

/// Evaluates `t_n` along an ascending list of indices.
///
/// Asserted: `t_n ≤ 1 + tolerance` for all `n`, and
/// `|t_N − Tr Ω| ≤ |t_1 − Tr Ω|` (strictly smaller unless both vanish
/// within tolerance). Whether `t_n` is monotone is only recorded.
pub fn trotter_sequence(state: &MultipartiteState, n_values: &[u64], tolerance: f64) -> Result<TrotterResult> {
    if n_values.is_empty() || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("n values must be non-empty and strictly ascending".into()));
    }
    let t_values = n_values
        .iter()
        .map(|&n| trotter_term(state, n))
        .collect::<Result<Vec<_>>>()?;
    let trace_omega = ssa_omega(state)?.trace().re;
    let deviations: Vec<f64> = t_values.iter().map(|t| (t - trace_omega).abs()).collect();
    let (first, last) = (deviations[0], deviations[deviations.len() - 1]);
    let converging = last < first || last <= tolerance;
    let nonincreasing = t_values.windows(2).all(|w| w[1] <= w[0] + tolerance);
    let slack = t_values.iter().fold(f64::INFINITY, |m, t| m.min(1.0 - t));
    let mut out = TrotterResult {
        name: "trotter".into(),
        n_values: n_values.to_vec(),
        t_values,
        trace_omega,
        deviations,
        nonincreasing,
        converging,
        slack,
        pass: false,
        tolerance,
        meta: Meta::dims(state.dims()),
    };
    out.pass = out.recompute_pass();
    Ok(out)
}
