//! Tripartite checkers built on `exp(log ρ_AB − log ρ_B + log ρ_BC)` and
//! its three-state generalizations, plus the Markov-chain
//! characterizations.

use serde::{Deserialize, Serialize};

use super::{omega_chain, require_parts, require_same_dims, trace_norm, ChainResult, CheckResult};
use crate::entropy::{cmi, exp_log_combination, relative_entropy, relative_entropy_op, von_neumann};
use crate::linalg::{embed, ptrace, schatten_norm, ComplexMatrix, Norm};
use crate::states::{DensityMatrix, MultipartiteState};
use crate::{Error, Result};

/// Times at which the rotated-Petz identity is sampled.
pub const DEFAULT_T_SAMPLES: [f64; 4] = [0.3, 0.7, 1.1, 1.9];

/// Two B-marginals count as equal below this trace distance.
const MARGINAL_MATCH: f64 = 1e-8;
/// `I(A:C|B)` below this is treated as a Markov chain.
const MARKOV_CMI: f64 = 1e-10;
/// Characterization residuals below this count as vanishing.
const MARKOV_RESIDUAL: f64 = 1e-7;
/// Tolerance for `Tr ρ_AB ρ_BC = Tr ρ_B²`.
const TRACE_PRODUCT_IDENTITY: f64 = 1e-10;

fn embedded(state: &MultipartiteState, keep: &[usize]) -> Result<ComplexMatrix> {
    embed(state.marginal(keep)?.matrix(), state.dims(), keep)
}

/// `exp(log σ_AB − log τ_B + log ω_BC)` on the common space.
fn three_state_omega(
    sigma: &MultipartiteState,
    tau: &MultipartiteState,
    omega: &MultipartiteState,
) -> Result<ComplexMatrix> {
    let ab = embedded(sigma, &[0, 1])?;
    let b = embedded(tau, &[1])?;
    let bc = embedded(omega, &[1, 2])?;
    exp_log_combination(&[(1.0, &ab), (-1.0, &b), (1.0, &bc)])
}

/// `Ω = exp(log ρ_AB − log ρ_B + log ρ_BC)`.
pub fn ssa_omega(state: &MultipartiteState) -> Result<ComplexMatrix> {
    require_parts(state, 3)?;
    three_state_omega(state, state, state)
}

fn b_distance(x: &MultipartiteState, y: &MultipartiteState) -> Result<f64> {
    trace_norm(&(x.marginal(&[1])?.matrix() - y.marginal(&[1])?.matrix()))
}

/// Succeeds when `x_B = y_B` or `y_B = z_B`.
fn require_matching(x: &MultipartiteState, y: &MultipartiteState, z: &MultipartiteState) -> Result<f64> {
    for s in [x, y, z] {
        require_parts(s, 3)?;
    }
    require_same_dims(x, y)?;
    require_same_dims(y, z)?;
    let distance = b_distance(x, y)?.min(b_distance(y, z)?);
    if distance > MARGINAL_MATCH {
        return Err(Error::MarginalMismatch { distance });
    }
    Ok(distance)
}

/// `I(A:C|B) ≥ −2 ln Tr√ρ√Ω ≥ ‖√ρ−√Ω‖₂² ≥ ¼‖ρ−Ω‖₁²`, `Tr Ω ≤ 1`.
pub fn check_ssa_strengthened(state: &MultipartiteState, tolerance: f64) -> Result<ChainResult> {
    let omega = ssa_omega(state)?;
    let i = cmi(state)?;
    let distance = trace_norm(&(state.matrix() - &omega))?;
    Ok(omega_chain("ssa_strengthened", ("cmi", i), state.matrix(), &omega, tolerance)?
        .with("omega_trace_distance", distance))
}

/// `Tr exp(log ρ_AB − log σ_B + log τ_BC) ≤ 1` when `ρ_B = σ_B` or
/// `σ_B = τ_B`.
pub fn check_trace_exp_bound(
    rho: &MultipartiteState,
    sigma: &MultipartiteState,
    tau: &MultipartiteState,
    tolerance: f64,
) -> Result<CheckResult> {
    let distance = require_matching(rho, sigma, tau)?;
    let trace = three_state_omega(rho, sigma, tau)?.trace().re;
    Ok(CheckResult::at_least("trace_exp_bound", 1.0, trace, tolerance)
        .with("trace_omega", trace)
        .with("marginal_distance", distance))
}

/// `S(ρ‖exp(log σ_AB + log τ_BC − log ω_B)) =
///  I(A:C|B)_ρ + S(ρ_AB‖σ_AB) + S(ρ_BC‖τ_BC) − S(ρ_B‖ω_B)`.
pub fn check_bsw_identity(
    rho: &MultipartiteState,
    sigma: &MultipartiteState,
    tau: &MultipartiteState,
    omega: &MultipartiteState,
    tolerance: f64,
) -> Result<CheckResult> {
    for s in [rho, sigma, tau, omega] {
        require_parts(s, 3)?;
        require_same_dims(rho, s)?;
    }
    let op = three_state_omega(sigma, omega, tau)?;
    let lhs = relative_entropy_op(rho.state(), &op)?.to_f64();
    let rel = |x: &MultipartiteState, y: &MultipartiteState, keep: &[usize]| -> Result<f64> {
        Ok(relative_entropy(&x.marginal(keep)?, &(&y.marginal(keep)?).into())?.to_f64())
    };
    let rhs = cmi(rho)? + rel(rho, sigma, &[0, 1])? + rel(rho, tau, &[1, 2])? - rel(rho, omega, &[1])?;
    Ok(CheckResult::identity("bsw_identity", lhs, rhs, tolerance).with("trace_omega", op.trace().re))
}

/// `S(ρ‖exp(log σ_AB + log σ_BC − log σ_B)) ≥
///  I(A:C|B)_ρ + ½S(ρ_AB‖σ_AB) + ½S(ρ_BC‖σ_BC)`.
pub fn check_super_ssa(rho: &MultipartiteState, sigma: &MultipartiteState, tolerance: f64) -> Result<CheckResult> {
    require_parts(rho, 3)?;
    require_parts(sigma, 3)?;
    require_same_dims(rho, sigma)?;
    let op = ssa_omega(sigma)?;
    let lhs = relative_entropy_op(rho.state(), &op)?.to_f64();
    let rel = |keep: &[usize]| -> Result<f64> {
        Ok(relative_entropy(&rho.marginal(keep)?, &(&sigma.marginal(keep)?).into())?.to_f64())
    };
    let rhs = cmi(rho)? + 0.5 * rel(&[0, 1])? + 0.5 * rel(&[1, 2])?;
    Ok(CheckResult::at_least("super_ssa", lhs, rhs, tolerance))
}

/// `S(ρ‖Ω) ≥ −2 ln Tr√ρ√Ω ≥ ‖√ρ−√Ω‖₂² ≥ ¼‖ρ−Ω‖₁²` with
/// `Ω = exp(log σ_AB − log τ_B + log ω_BC)`, `σ_B = τ_B` or `τ_B = ω_B`.
pub fn check_three_state_chain(
    rho: &MultipartiteState,
    sigma: &MultipartiteState,
    tau: &MultipartiteState,
    omega: &MultipartiteState,
    tolerance: f64,
) -> Result<ChainResult> {
    require_parts(rho, 3)?;
    require_same_dims(rho, sigma)?;
    let distance = require_matching(sigma, tau, omega)?;
    let op = three_state_omega(sigma, tau, omega)?;
    let s = relative_entropy_op(rho.state(), &op)?.to_f64();
    Ok(omega_chain("three_state_chain", ("rel_entropy_omega", s), rho.matrix(), &op, tolerance)?
        .with("marginal_distance", distance))
}

/// `S(AB) + S(BC) − S(ABC) ≥ −2 ln Tr√ρ√Ω' ≥ ‖√ρ−√Ω'‖₂² ≥ ¼‖ρ−Ω'‖₁²`
/// with `Ω' = exp(log ρ_AB + log ρ_BC)`, plus the conditions
/// `Tr Ω' ≤ Tr ρ_AB ρ_BC` (Golden-Thompson), `Tr ρ_AB ρ_BC = Tr ρ_B²`,
/// and `Tr ρ_B² ≤ 1`.
pub fn check_subadd_exp(state: &MultipartiteState, tolerance: f64) -> Result<ChainResult> {
    require_parts(state, 3)?;
    let ab = embedded(state, &[0, 1])?;
    let bc = embedded(state, &[1, 2])?;
    let b = state.marginal(&[1])?;
    let op = exp_log_combination(&[(1.0, &ab), (1.0, &bc)])?;
    let lhs = von_neumann(&state.marginal(&[0, 1])?) + von_neumann(&state.marginal(&[1, 2])?)
        - von_neumann(state.state());
    let product = ab.trace_product(&bc).re;
    let purity = b.matrix().trace_product(b.matrix()).re;
    let residual = (product - purity).abs();
    let trace = op.trace().re;
    Ok(omega_chain("subadd_exp", ("entropy_excess", lhs), state.matrix(), &op, tolerance)?
        .condition("golden_thompson", product - trace)
        .condition("trace_product_identity", TRACE_PRODUCT_IDENTITY - residual)
        .condition("purity_le_1", 1.0 - purity)
        .with("trace_product", product)
        .with("purity_b", purity)
        .with("cmi", cmi(state)?))
}

/// `½ I(A:C|B) ≥ ⅛ ‖ρ_AC − Tr_B Ω‖₁²`.
pub fn check_squashed_proxy(state: &MultipartiteState, tolerance: f64) -> Result<CheckResult> {
    let omega = ssa_omega(state)?;
    let reduced = ptrace(&omega, state.dims(), &[0, 2])?;
    let rho_ac = state.marginal(&[0, 2])?;
    let t = trace_norm(&(rho_ac.matrix() - &reduced))?;
    Ok(
        CheckResult::at_least("squashed_proxy", 0.5 * cmi(state)?, t * t / 8.0, tolerance)
            .with("trace_tr_b_omega", reduced.trace().re),
    )
}

/// Defects of the four Markov-chain characterizations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovResiduals {
    /// `‖log ρ_ABC + log ρ_B − log ρ_AB − log ρ_BC‖_∞`.
    pub r_log: f64,
    /// `max_t ‖ρ_ABC^{it} ρ_BC^{−it} − ρ_AB^{it} ρ_B^{−it}‖_∞`.
    pub r_petz: f64,
    /// `‖ρ_ABC − M M†‖₁` with `M = ρ_AB^{1/2} ρ_B^{−1/2} ρ_BC^{1/2}`.
    pub r_mm_dag: f64,
    /// `‖ρ_ABC − M† M‖₁`.
    pub r_m_dag_m: f64,
    pub cmi: f64,
}

impl MarkovResiduals {
    pub fn max_residual(&self) -> f64 {
        self.r_log.max(self.r_petz).max(self.r_mm_dag).max(self.r_m_dag_m)
    }

    pub fn min_residual(&self) -> f64 {
        self.r_log.min(self.r_petz).min(self.r_mm_dag).min(self.r_m_dag_m)
    }
}

fn eig_of(state: &DensityMatrix) -> Result<crate::linalg::HermitianEigen> {
    let eig = state.eig()?;
    if !eig.is_full_rank() {
        return Err(Error::SingularInput {
            min_eigenvalue: eig.min_eigenvalue(),
        });
    }
    Ok(eig)
}

pub fn markov_residuals(state: &MultipartiteState, t_samples: &[f64]) -> Result<MarkovResiduals> {
    require_parts(state, 3)?;
    let dims = state.dims();
    let abc = eig_of(state.state())?;
    let ab = eig_of(&state.marginal(&[0, 1])?)?;
    let bc = eig_of(&state.marginal(&[1, 2])?)?;
    let b = eig_of(&state.marginal(&[1])?)?;

    let lift = |x: ComplexMatrix, on: &[usize]| embed(&x, dims, on);
    let log_defect = &(&(&abc.log()? + &lift(b.log()?, &[1])?) - &lift(ab.log()?, &[0, 1])?)
        - &lift(bc.log()?, &[1, 2])?;
    let r_log = schatten_norm(&log_defect.hermitize(), Norm::Inf)?;

    let mut r_petz = 0.0f64;
    for &t in t_samples {
        let left = &abc.imag_pow(t) * &lift(bc.imag_pow(-t), &[1, 2])?;
        let right = &lift(ab.imag_pow(t), &[0, 1])? * &lift(b.imag_pow(-t), &[1])?;
        r_petz = r_petz.max(schatten_norm(&(&left - &right), Norm::Inf)?);
    }

    let m = &(&lift(ab.pow(0.5)?, &[0, 1])? * &lift(b.pow(-0.5)?, &[1])?) * &lift(bc.pow(0.5)?, &[1, 2])?;
    let mm = (&m * &m.dagger()).hermitize();
    let mtm = (&m.dagger() * &m).hermitize();
    Ok(MarkovResiduals {
        r_log,
        r_petz,
        r_mm_dag: trace_norm(&(state.matrix() - &mm))?,
        r_m_dag_m: trace_norm(&(state.matrix() - &mtm))?,
        cmi: cmi(state)?,
    })
}

/// Consistency of the Markov characterizations with `I(A:C|B)`.
///
/// When `I(A:C|B) < 1e-10` every residual must be below `1e-7`
/// (`slack = 1e-7 − max residual`); otherwise every residual must exceed
/// `1e-7` (`slack = min residual − 1e-7`). Tolerance is zero: the
/// thresholds already carry the numerical margin.
pub fn markov_characterizations(state: &MultipartiteState, t_samples: &[f64]) -> Result<CheckResult> {
    let r = markov_residuals(state, t_samples)?;
    let markov = r.cmi < MARKOV_CMI;
    let slack = if markov {
        MARKOV_RESIDUAL - r.max_residual()
    } else {
        r.min_residual() - MARKOV_RESIDUAL
    };
    Ok(CheckResult::new("markov_characterizations", slack, 0.0)
        .with("r_log", r.r_log)
        .with("r_petz", r.r_petz)
        .with("r_mm_dag", r.r_mm_dag)
        .with("r_m_dag_m", r.r_m_dag_m)
        .with("cmi", r.cmi)
        .with("markov", if markov { 1.0 } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        markov_state, random_density, random_tripartite, regularize, regularize_multipartite,
        transplant_marginal, MarkovSpec,
    };
    use crate::tol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn full_rank(r: &mut ChaCha8Rng) -> MultipartiteState {
        regularize_multipartite(&random_tripartite(2, 2, 2, 8, r).unwrap(), 1e-6).unwrap()
    }

    fn product(r: &mut ChaCha8Rng) -> MultipartiteState {
        let parts: Vec<DensityMatrix> = (0..3)
            .map(|_| regularize(&random_density(2, 2, r).unwrap(), 1e-6).unwrap())
            .collect();
        MultipartiteState::product(&[&parts[0], &parts[1], &parts[2]]).unwrap()
    }

    fn markov(r: &mut ChaCha8Rng) -> MultipartiteState {
        let spec = MarkovSpec::random(2, 2, &[(1, 2), (2, 1)], 1e-6, r).unwrap();
        markov_state(&spec).unwrap()
    }

    fn diag_state(p: &[f64]) -> MultipartiteState {
        MultipartiteState::new(DensityMatrix::diagonal(p).unwrap(), vec![2, 2, 2]).unwrap()
    }

    #[test]
    fn ssa_chain_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(1);
        let p = product(&mut r);
        let ch = check_ssa_strengthened(&p, tol::INEQ).unwrap();
        assert!(ch.links.iter().all(|(_, v)| v.abs() < 1e-9), "{ch:?}");
        assert!(ssa_omega(&p).unwrap().max_abs_diff(p.matrix()) < 1e-10);

        let m = markov(&mut r);
        let ch = check_ssa_strengthened(&m, tol::INEQ).unwrap();
        assert!(ch.links[0].1 < 1e-8);
        assert!(ch.quantities["omega_trace_distance"] < 1e-7);

        for _ in 0..30 {
            let ch = check_ssa_strengthened(&full_rank(&mut r), tol::INEQ).unwrap();
            assert!(ch.pass, "{ch:?}");
        }
    }

    #[test]
    fn trace_exp_bound_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(2);
        let rho = full_rank(&mut r);
        assert!(check_trace_exp_bound(&rho, &rho, &rho, tol::INEQ).unwrap().pass);

        for _ in 0..20 {
            let rho = full_rank(&mut r);
            let sigma = transplant_marginal(&full_rank(&mut r), 1, &rho.marginal(&[1]).unwrap()).unwrap();
            let tau = full_rank(&mut r);
            assert!(check_trace_exp_bound(&rho, &sigma, &tau, tol::INEQ).unwrap().pass);
            let tau = transplant_marginal(&full_rank(&mut r), 1, &sigma.marginal(&[1]).unwrap()).unwrap();
            let rho = full_rank(&mut r);
            assert!(check_trace_exp_bound(&rho, &sigma, &tau, tol::INEQ).unwrap().pass);
        }
        let (a, b, c) = (full_rank(&mut r), full_rank(&mut r), full_rank(&mut r));
        assert!(matches!(
            check_trace_exp_bound(&a, &b, &c, tol::INEQ),
            Err(Error::MarginalMismatch { .. })
        ));
    }

    #[test]
    fn trace_exp_bound_classical_oracle() {
        // ρ and σ share the B-marginal; τ arbitrary
        let rho = [0.05, 0.1, 0.15, 0.2, 0.1, 0.15, 0.1, 0.15];
        let sigma = [0.1, 0.1, 0.05, 0.15, 0.1, 0.1, 0.2, 0.2];
        let tau = [0.2, 0.05, 0.1, 0.15, 0.1, 0.1, 0.05, 0.25];
        let m = |p: &[f64], f: &dyn Fn(usize, usize, usize) -> usize, n: usize| {
            let mut out = vec![0.0; n];
            for i in 0..8 {
                out[f(i / 4, (i / 2) % 2, i % 2)] += p[i];
            }
            out
        };
        let r_ab = m(&rho, &|a, b, _| a * 2 + b, 4);
        let s_b = m(&sigma, &|_, b, _| b, 2);
        let t_bc = m(&tau, &|_, b, c| b * 2 + c, 4);
        assert!((s_b[0] - m(&rho, &|_, b, _| b, 2)[0]).abs() < 1e-14);
        let mut expect = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    expect += r_ab[a * 2 + b] * t_bc[b * 2 + c] / s_b[b];
                }
            }
        }
        let got = check_trace_exp_bound(&diag_state(&rho), &diag_state(&sigma), &diag_state(&tau), tol::INEQ).unwrap();
        assert!((got.quantities["trace_omega"] - expect).abs() < 1e-12);
        assert!(expect <= 1.0 + 1e-12);
    }

    #[test]
    fn bsw_identity_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(3);
        let rho = full_rank(&mut r);
        let c = check_bsw_identity(&rho, &rho, &rho, &rho, tol::IDENTITY).unwrap();
        assert!((c.quantities["lhs"] - cmi(&rho).unwrap()).abs() < 1e-9);
        for _ in 0..30 {
            let s: Vec<_> = (0..4).map(|_| full_rank(&mut r)).collect();
            let c = check_bsw_identity(&s[0], &s[1], &s[2], &s[3], tol::IDENTITY).unwrap();
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn bsw_identity_classical_oracle() {
        let ps: [[f64; 8]; 4] = [
            [0.05, 0.1, 0.15, 0.2, 0.1, 0.15, 0.1, 0.15],
            [0.1, 0.1, 0.05, 0.15, 0.05, 0.1, 0.2, 0.25],
            [0.2, 0.05, 0.1, 0.15, 0.1, 0.1, 0.05, 0.25],
            [0.125; 8],
        ];
        let st: Vec<_> = ps.iter().map(|p| diag_state(p)).collect();
        let c = check_bsw_identity(&st[0], &st[1], &st[2], &st[3], tol::IDENTITY).unwrap();
        // lhs by scalar loop: Σ ρ ln(ρ / (σ_ab τ_bc / ω_b))
        let marg = |p: &[f64; 8], f: &dyn Fn(usize) -> usize, n: usize| {
            let mut out = vec![0.0; n];
            for (i, v) in p.iter().enumerate() {
                out[f(i)] += v;
            }
            out
        };
        let s_ab = marg(&ps[1], &|i| i / 2, 4);
        let t_bc = marg(&ps[2], &|i| i % 4, 4);
        let w_b = marg(&ps[3], &|i| (i / 2) % 2, 2);
        let lhs: f64 = (0..8)
            .map(|i| {
                let q = s_ab[i / 2] * t_bc[i % 4] / w_b[(i / 2) % 2];
                ps[0][i] * (ps[0][i] / q).ln()
            })
            .sum();
        assert!((c.quantities["lhs"] - lhs).abs() < 1e-12);
        assert!(c.pass);
    }

    #[test]
    fn super_ssa_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(4);
        let rho = full_rank(&mut r);
        assert!(check_super_ssa(&rho, &rho, tol::INEQ).unwrap().slack.abs() < 1e-9);
        for _ in 0..30 {
            let (a, b) = (full_rank(&mut r), full_rank(&mut r));
            assert!(check_super_ssa(&a, &b, tol::INEQ).unwrap().pass);
        }
        let sigma = markov(&mut r);
        let noise = random_tripartite(2, 4, 2, 16, &mut r).unwrap();
        let mixed = &sigma.matrix().scale(0.99) + &noise.matrix().scale(0.01);
        let rho = MultipartiteState::new(DensityMatrix::normalized(mixed).unwrap(), vec![2, 4, 2]).unwrap();
        assert!(check_super_ssa(&rho, &sigma, tol::INEQ).unwrap().pass);
    }

    #[test]
    fn three_state_chain_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(5);
        let rho = full_rank(&mut r);
        let ch = check_three_state_chain(&rho, &rho, &rho, &rho, tol::INEQ).unwrap();
        assert!((ch.links[0].1 - cmi(&rho).unwrap()).abs() < 1e-9);
        for trial in 0..30 {
            let rho = full_rank(&mut r);
            let sigma = full_rank(&mut r);
            let (tau, omega) = if trial % 2 == 0 {
                let tau = transplant_marginal(&full_rank(&mut r), 1, &sigma.marginal(&[1]).unwrap()).unwrap();
                (tau, full_rank(&mut r))
            } else {
                let tau = full_rank(&mut r);
                let omega = transplant_marginal(&full_rank(&mut r), 1, &tau.marginal(&[1]).unwrap()).unwrap();
                (tau, omega)
            };
            let ch = check_three_state_chain(&rho, &sigma, &tau, &omega, tol::INEQ).unwrap();
            assert!(ch.pass, "{ch:?}");
        }
    }

    #[test]
    fn subadd_exp_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let st = full_rank(&mut r);
            let ch = check_subadd_exp(&st, tol::INEQ).unwrap();
            assert!(ch.pass, "{ch:?}");
            assert!((ch.quantities["trace_product"] - ch.quantities["purity_b"]).abs() < 1e-10);
        }
        let m = markov(&mut r);
        let ch = check_subadd_exp(&m, tol::INEQ).unwrap();
        assert!(ch.pass);
        let b = von_neumann(&m.marginal(&[1]).unwrap());
        assert!((ch.links[0].1 - b - ch.quantities["cmi"]).abs() < 1e-10);

        // trivial B: Tr ρ_B² = 1 and Ω' = ρ_A ⊗ ρ_C
        let a = regularize(&random_density(2, 2, &mut r).unwrap(), 1e-6).unwrap();
        let c = regularize(&random_density(3, 3, &mut r).unwrap(), 1e-6).unwrap();
        let one = DensityMatrix::maximally_mixed(1);
        let st = MultipartiteState::product(&[&a, &one, &c]).unwrap();
        let ch = check_subadd_exp(&st, tol::INEQ).unwrap();
        assert!(ch.pass);
        assert!((ch.quantities["purity_b"] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn squashed_proxy_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(7);
        let m = markov(&mut r);
        let c = check_squashed_proxy(&m, tol::INEQ).unwrap();
        assert!(c.quantities["lhs"] < 1e-10 && c.quantities["rhs"] < 1e-10);
        let c = check_squashed_proxy(&product(&mut r), tol::INEQ).unwrap();
        assert!(c.quantities["lhs"].abs() < 1e-10 && c.quantities["rhs"] < 1e-10);
        for _ in 0..30 {
            assert!(check_squashed_proxy(&full_rank(&mut r), tol::INEQ).unwrap().pass);
        }
    }

    #[test]
    fn markov_characterization_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let c = markov_characterizations(&markov(&mut r), &DEFAULT_T_SAMPLES).unwrap();
            assert!(c.pass, "{c:?}");
            assert_eq!(c.quantities["markov"], 1.0);
        }
        let c = markov_characterizations(&product(&mut r), &DEFAULT_T_SAMPLES).unwrap();
        assert!(c.pass && c.quantities["r_mm_dag"] < 1e-12);
        for _ in 0..20 {
            let c = markov_characterizations(&full_rank(&mut r), &DEFAULT_T_SAMPLES).unwrap();
            assert!(c.pass, "{c:?}");
            assert!(c.quantities["cmi"] > 1e-3);
        }
    }
}
