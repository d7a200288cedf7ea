//! Search for counterexamples to open conjectures. Nothing here asserts:
//! the explorer reports the slack distribution, the worst instance and any
//! trial whose slack falls below `−10 · tolerance`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trace_norm, tripartite::markov_residuals, trotter::trotter_term, DEFAULT_T_SAMPLES};
use crate::channels::{ptrace_channel, random_channel, ChannelJson, KrausChannel};
use crate::entropy::{cmi, relative_entropy};
use crate::linalg::herm_eig;
use crate::states::{
    markov_state, random_density, regularize, trial_rng, DensityMatrix, MarkovSpec, MultipartiteState, StateJson,
};
use crate::{Error, Result};

/// Conjectured strengthenings with the Petz recovery map, and monotonicity
/// of the Lie-Trotter sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConjectureKind {
    /// `S(ρ‖σ) − S(Φρ‖Φσ) ≥ ¼‖ρ − Φ*_σ(Φρ)‖₁²`.
    StrongerMono,
    /// `S(ρ_AB‖σ_AB) − S(ρ_A‖σ_A) ≥ ¼‖ρ_AB − σ_AB^{1/2} σ_A^{−1/2} ρ_A σ_A^{−1/2} σ_AB^{1/2}‖₁²`.
    PtracePetz,
    /// `I(A:C|B) ≥ ¼‖ρ_ABC − ρ_AB^{1/2} ρ_B^{−1/2} ρ_BC ρ_B^{−1/2} ρ_AB^{1/2}‖₁²`.
    CmiPetz,
    /// `t_n ≥ t_{n+1}` for the Lie-Trotter sequence.
    TrotterMonotone,
}

impl ConjectureKind {
    pub const ALL: [Self; 4] = [Self::StrongerMono, Self::PtracePetz, Self::CmiPetz, Self::TrotterMonotone];

    pub fn name(&self) -> &'static str {
        match self {
            Self::StrongerMono => "stronger-mono",
            Self::PtracePetz => "ptrace-petz",
            Self::CmiPetz => "cmi-petz",
            Self::TrotterMonotone => "trotter-monotone",
        }
    }
}

impl fmt::Display for ConjectureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConjectureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown conjecture kind `{s}`")))
    }
}

/// Input distribution. `Markov` draws from families on which the
/// conjecture is saturated: exact Markov chains for the tripartite kinds,
/// `Φ = Tr_A` with `σ = ρ_AB ⊗ ρ_C` for `stronger-mono`, and
/// `ρ_A ⊗ τ_B`, `σ_A ⊗ τ_B` for `ptrace-petz`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Random,
    Markov,
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Self::Random),
            "markov" => Ok(Self::Markov),
            _ => Err(Error::InvalidParameter(format!("unknown ensemble `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploreConfig {
    pub kind: ConjectureKind,
    pub ensemble: Ensemble,
    pub trials: u64,
    /// Tripartite dims `(d_A, d_B, d_C)`.
    pub dims: Vec<usize>,
    pub seed: u64,
    pub eps: f64,
    pub tolerance: f64,
    /// Largest `n` for `trotter-monotone`.
    pub n_max: u64,
}

impl ExploreConfig {
    pub fn new(kind: ConjectureKind, trials: u64, dims: &[usize], seed: u64) -> Self {
        Self {
            kind,
            ensemble: Ensemble::Random,
            trials,
            dims: dims.to_vec(),
            seed,
            eps: crate::tol::DEFAULT_EPS,
            tolerance: crate::tol::INEQ,
            n_max: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize) -> Self {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if values.is_empty() || !lo.is_finite() || !hi.is_finite() {
            return Self {
                edges: Vec::new(),
                counts: Vec::new(),
            };
        }
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let idx = (((v - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Self { edges, counts }
    }
}

/// A reproducible input: the states (and channel, if any) of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploreInstance {
    pub trial: u64,
    pub slack: f64,
    pub states: Vec<StateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub trial: u64,
    pub seed: u64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exploration {
    pub config: ExploreConfig,
    pub completed: u64,
    /// Trials whose inputs were numerically unusable (e.g. singular).
    pub failed: u64,
    pub min_slack: f64,
    pub max_slack: f64,
    pub mean_slack: f64,
    pub histogram: Histogram,
    pub worst: Option<ExploreInstance>,
    /// Trials with slack below `−10 · tolerance`.
    pub candidates: Vec<Candidate>,
}

pub const HISTOGRAM_BINS: usize = 20;

/// Worst-case dump of an exploration: the configuration that produced it
/// plus the trial's inputs. Replaying regenerates the trial from the config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploreDump {
    pub config: ExploreConfig,
    #[serde(flatten)]
    pub instance: ExploreInstance,
}

/// Recomputes the slack of `dump`'s trial.
pub fn replay_exploration(dump: &ExploreDump) -> Result<f64> {
    Ok(run_trial(&dump.config, dump.instance.trial)?.slack)
}

struct Trial {
    slack: f64,
    states: Vec<DensityMatrix>,
    channel: Option<KrausChannel>,
}

fn full_rank<R: Rng + ?Sized>(d: usize, eps: f64, rng: &mut R) -> Result<DensityMatrix> {
    regularize(&random_density(d, d, rng)?, eps)
}

fn tripartite<R: Rng + ?Sized>(cfg: &ExploreConfig, rng: &mut R) -> Result<MultipartiteState> {
    let (a, b, c) = (cfg.dims[0], cfg.dims[1], cfg.dims[2]);
    match cfg.ensemble {
        Ensemble::Random => MultipartiteState::new(full_rank(a * b * c, cfg.eps, rng)?, cfg.dims.clone()),
        Ensemble::Markov => markov_state(&MarkovSpec::random_for_dims(a, b, c, 3, cfg.eps, rng)?),
    }
}

fn psd_pow(x: &crate::ComplexMatrix, p: f64) -> Result<crate::ComplexMatrix> {
    herm_eig(&x.hermitize())?.pow(p)
}

fn stronger_mono<R: Rng + ?Sized>(cfg: &ExploreConfig, rng: &mut R) -> Result<Trial> {
    let d: usize = cfg.dims.iter().product();
    let (rho, sigma, phi) = match cfg.ensemble {
        Ensemble::Random => (
            full_rank(d, cfg.eps, rng)?,
            full_rank(d, cfg.eps, rng)?,
            random_channel(d, d, 2, rng)?,
        ),
        Ensemble::Markov => {
            let st = tripartite(cfg, rng)?;
            let sigma = st.marginal(&[0, 1])?.kron(&st.marginal(&[2])?);
            (st.state().clone(), sigma, ptrace_channel(&cfg.dims, 0)?)
        }
    };
    let drop = relative_entropy(&rho, &(&sigma).into())?.to_f64()
        - relative_entropy(&phi.apply_state(&rho)?, &phi.apply_state(&sigma)?.into())?.to_f64();
    let recovered = phi.petz_map(&sigma)?.apply(&phi.apply(rho.matrix())?)?;
    let t = trace_norm(&(rho.matrix() - &recovered))?;
    Ok(Trial {
        slack: drop - 0.25 * t * t,
        states: vec![rho, sigma],
        channel: Some(phi),
    })
}

fn ptrace_petz<R: Rng + ?Sized>(cfg: &ExploreConfig, rng: &mut R) -> Result<Trial> {
    let (da, db) = (cfg.dims[0], cfg.dims[1..].iter().product::<usize>());
    let (rho, sigma) = match cfg.ensemble {
        Ensemble::Random => (full_rank(da * db, cfg.eps, rng)?, full_rank(da * db, cfg.eps, rng)?),
        Ensemble::Markov => {
            let tau = full_rank(db, cfg.eps, rng)?;
            (
                full_rank(da, cfg.eps, rng)?.kron(&tau),
                full_rank(da, cfg.eps, rng)?.kron(&tau),
            )
        }
    };
    let dims = vec![da, db];
    let r = MultipartiteState::new(rho.clone(), dims.clone())?;
    let s = MultipartiteState::new(sigma.clone(), dims.clone())?;
    let (ra, sa) = (r.marginal(&[0])?, s.marginal(&[0])?);
    let drop = relative_entropy(&rho, &(&sigma).into())?.to_f64() - relative_entropy(&ra, &(&sa).into())?.to_f64();
    let lift = |x: crate::ComplexMatrix| crate::linalg::embed(&x, &dims, &[0]);
    let inner = lift(ra.matrix().conjugate_by(&psd_pow(sa.matrix(), -0.5)?))?;
    let recovered = inner.conjugate_by(&psd_pow(sigma.matrix(), 0.5)?);
    let t = trace_norm(&(rho.matrix() - &recovered))?;
    Ok(Trial {
        slack: drop - 0.25 * t * t,
        states: vec![rho, sigma],
        channel: None,
    })
}

fn cmi_petz<R: Rng + ?Sized>(cfg: &ExploreConfig, rng: &mut R) -> Result<Trial> {
    let st = tripartite(cfg, rng)?;
    let res = markov_residuals(&st, &DEFAULT_T_SAMPLES[..0])?;
    Ok(Trial {
        slack: cmi(&st)? - 0.25 * res.r_mm_dag * res.r_mm_dag,
        states: vec![st.state().clone()],
        channel: None,
    })
}

fn trotter_monotone<R: Rng + ?Sized>(cfg: &ExploreConfig, rng: &mut R) -> Result<Trial> {
    let st = tripartite(cfg, rng)?;
    let t = (1..=cfg.n_max)
        .map(|n| trotter_term(&st, n))
        .collect::<Result<Vec<_>>>()?;
    let slack = t.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    Ok(Trial {
        slack,
        states: vec![st.state().clone()],
        channel: None,
    })
}

fn run_trial(cfg: &ExploreConfig, trial: u64) -> Result<Trial> {
    let mut rng = trial_rng(cfg.seed, cfg.kind.name(), trial);
    match cfg.kind {
        ConjectureKind::StrongerMono => stronger_mono(cfg, &mut rng),
        ConjectureKind::PtracePetz => ptrace_petz(cfg, &mut rng),
        ConjectureKind::CmiPetz => cmi_petz(cfg, &mut rng),
        ConjectureKind::TrotterMonotone => trotter_monotone(cfg, &mut rng),
    }
}

/// Runs `trials` independent trials (in parallel, deterministically) and
/// summarizes the slack distribution. Per-trial numerical failures are
/// counted, not propagated.
pub fn explore_conjecture(cfg: &ExploreConfig) -> Result<Exploration> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("exploration needs at least one trial".into()));
    }
    if cfg.dims.len() != 3 || cfg.dims.iter().any(|&d| d == 0) {
        return Err(Error::NotTripartite { parts: cfg.dims.len() });
    }
    if !(cfg.tolerance > 0.0) || !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need tolerance > 0 and ε in (0, 1), got {} and {}",
            cfg.tolerance, cfg.eps
        )));
    }
    if cfg.kind == ConjectureKind::TrotterMonotone && cfg.n_max < 2 {
        return Err(Error::InvalidParameter("trotter-monotone needs n_max ≥ 2".into()));
    }
    let slacks: Vec<Option<f64>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t).ok().map(|r| r.slack).filter(|s| !s.is_nan()))
        .collect();
    let ok: Vec<(u64, f64)> = slacks
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|s| (i as u64, s)))
        .collect();
    let values: Vec<f64> = ok.iter().map(|p| p.1).collect();
    let worst_trial = ok.iter().min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))).copied();
    let worst = match worst_trial {
        Some((trial, slack)) => {
            let t = run_trial(cfg, trial)?;
            Some(ExploreInstance {
                trial,
                slack,
                states: t.states.iter().map(StateJson::from).collect(),
                channel: t.channel.as_ref().map(KrausChannel::to_json),
            })
        }
        None => None,
    };
    let threshold = -10.0 * cfg.tolerance;
    let candidates = ok
        .iter()
        .filter(|p| p.1 < threshold)
        .map(|&(trial, slack)| Candidate {
            trial,
            seed: cfg.seed,
            slack,
        })
        .collect();
    let n = values.len();
    Ok(Exploration {
        config: cfg.clone(),
        completed: n as u64,
        failed: cfg.trials - n as u64,
        min_slack: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max_slack: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        mean_slack: if n > 0 { values.iter().sum::<f64>() / n as f64 } else { f64::NAN },
        histogram: Histogram::new(&values, HISTOGRAM_BINS),
        worst,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_trials_and_bad_kind() {
        let cfg = ExploreConfig::new(ConjectureKind::CmiPetz, 0, &[2, 2, 2], 1);
        assert!(explore_conjecture(&cfg).is_err());
        assert!("bogus".parse::<ConjectureKind>().is_err());
        assert_eq!("cmi-petz".parse::<ConjectureKind>().unwrap(), ConjectureKind::CmiPetz);
    }

    #[test]
    fn markov_inputs_saturate() {
        for kind in ConjectureKind::ALL {
            let mut cfg = ExploreConfig::new(kind, 20, &[2, 2, 2], 3);
            cfg.ensemble = Ensemble::Markov;
            let ex = explore_conjecture(&cfg).unwrap();
            assert_eq!(ex.completed, 20, "{kind}");
            assert!(ex.min_slack.abs() < 1e-7 && ex.max_slack.abs() < 1e-7, "{kind}: {ex:?}");
        }
    }

    #[test]
    fn random_run_is_deterministic() {
        for kind in ConjectureKind::ALL {
            let cfg = ExploreConfig::new(kind, 16, &[2, 2, 2], 11);
            let a = explore_conjecture(&cfg).unwrap();
            let b = explore_conjecture(&cfg).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.completed + a.failed, 16);
            assert_eq!(a.histogram.counts.iter().sum::<u64>(), a.completed);
            let worst = a.worst.as_ref().unwrap();
            assert_eq!(worst.slack, a.min_slack);
            let dump = ExploreDump {
                config: cfg.clone(),
                instance: worst.clone(),
            };
            let text = serde_json::to_string(&dump).unwrap();
            let back: ExploreDump = serde_json::from_str(&text).unwrap();
            assert_eq!(replay_exploration(&back).unwrap(), worst.slack);
        }
    }

    #[test]
    fn histogram_edges() {
        let h = Histogram::new(&[0.0, 1.0, 0.5, 0.25], 4);
        assert_eq!(h.edges.len(), 5);
        assert_eq!(h.counts, vec![1, 1, 1, 1]);
        let flat = Histogram::new(&[2.0, 2.0], 3);
        assert_eq!(flat.counts, vec![2, 0, 0]);
    }
}
