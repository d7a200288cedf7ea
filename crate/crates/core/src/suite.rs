//! Seeded checker suites.
//!
//! Every checker has a generator that draws one [`Instance`] per trial from
//! `trial_rng(seed, checker, trial)`, and an evaluator that turns an instance
//! into a [`Verdict`]. Instances hold the exact (already regularized) inputs,
//! so a dumped instance replays to the same verdict bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{random_channel, random_unital_channel, ChannelJson, KrausChannel, MatrixJson};
use crate::lab::{self, CheckResult, Meta, Verdict, DEFAULT_T_SAMPLES};
use crate::linalg::ComplexMatrix;
use crate::states::{
    ginibre, markov_state, random_density, regularize, transplant_marginal, trial_rng,
    DensityMatrix, MarkovSpec, MultipartiteState, StateJson, SubnormalizedOperator,
};
use crate::{tol, Error, Result};

/// Upper bound on the final SBW error `e_α` at the smallest grid point.
pub const SBW_FINAL_BOUND: f64 = 1e-4;
/// Most blocks drawn for a random Markov spec.
pub const MARKOV_MAX_BLOCKS: usize = 3;
/// Monte Carlo sample count for the twirl checker in suite runs.
pub const TWIRL_SAMPLES: usize = 10_000;

/// `0.1, 0.2, …, 0.9`.
pub fn renyi_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// `0.9, 0.5, 0.1` and `2^{−k}` for `k ≤ k_max`, strictly descending.
pub fn alpha_grid(k_max: i32) -> Vec<f64> {
    let mut grid: Vec<f64> = [0.9, 0.5, 0.1]
        .into_iter()
        .chain((1..=k_max).map(|k| 2f64.powi(-k)))
        .collect();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    grid
}

/// `0, 0.1, …, 1`.
pub fn t_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

/// `1, 2, 4, …` up to `n_max`.
pub fn power_grid(n_max: u64) -> Vec<u64> {
    std::iter::successors(Some(1u64), |n| n.checked_mul(2))
        .take_while(|&n| n <= n_max)
        .collect()
}

/// How a checker reads `--dims`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// One system of dimension `d_A·d_B` (or `d_A` if only one dim is given).
    Single,
    /// `(d_A, d_B)`.
    Bipartite,
    /// `(d_A, d_B, d_C)`.
    Tripartite,
}

macro_rules! checkers {
    ($($variant:ident => $name:literal, $shape:ident;)*) => {
        /// Named checker available to suite runs.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Checker {
            $($variant,)*
        }

        impl Checker {
            pub const ALL: &'static [Checker] = &[$(Checker::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Checker::$variant => $name,)*
                }
            }

            pub fn shape(self) -> Shape {
                match self {
                    $(Checker::$variant => Shape::$shape,)*
                }
            }
        }
    };
}

checkers! {
    RenyiMonotone => "renyi-monotone", Single;
    OverlapChain => "overlap-chain", Single;
    Pinsker => "pinsker", Single;
    Monotonicity => "monotonicity", Single;
    StrongerMono => "stronger-mono", Single;
    UnitalTrace => "unital-trace", Single;
    DwAlpha => "dw-alpha", Single;
    Sbw => "sbw", Single;
    PtraceStrengthening => "ptrace-strengthening", Bipartite;
    Ssa => "ssa", Tripartite;
    TraceExp => "trace-exp", Tripartite;
    Bsw => "bsw", Tripartite;
    SuperSsa => "super-ssa", Tripartite;
    ThreeState => "three-state", Tripartite;
    SubaddExp => "subadd-exp", Tripartite;
    Squashed => "squashed", Tripartite;
    DwTripartite => "dw-tripartite", Tripartite;
    Markov => "markov", Tripartite;
    Trotter => "trotter", Tripartite;
    Lieb => "lieb", Single;
    CarlenLieb => "carlen-lieb", Single;
    GoldenThompson => "golden-thompson", Single;
    Audenaert => "audenaert", Single;
    Twirl => "twirl", Bipartite;
}

impl fmt::Display for Checker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Checker {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Checker::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown checker `{s}`")))
    }
}

/// Parses a comma-separated checker list; `all` selects every checker.
pub fn parse_suite(list: &str) -> Result<Vec<Checker>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == "all" {
            out.extend_from_slice(Checker::ALL);
        } else {
            out.push(item.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("empty suite".into()));
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|c| seen.insert(*c));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub checkers: Vec<Checker>,
    pub dims: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub eps: f64,
    /// Fixed `α` for the `dw-*` checkers; cycles through [`alpha_grid`]`(10)`
    /// when unset.
    pub alpha: Option<f64>,
    pub t_samples: Vec<f64>,
    /// Largest Trotter index.
    pub n_max: u64,
    pub twirl_samples: usize,
}

impl SuiteConfig {
    pub fn new(checkers: Vec<Checker>, dims: &[usize], trials: u64, seed: u64) -> Self {
        Self {
            checkers,
            dims: dims.to_vec(),
            trials,
            seed,
            tolerance: tol::INEQ,
            eps: tol::DEFAULT_EPS,
            alpha: None,
            t_samples: DEFAULT_T_SAMPLES.to_vec(),
            n_max: 64,
            twirl_samples: TWIRL_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.checkers.is_empty() {
            return bad("no checkers selected".into());
        }
        if self.trials == 0 {
            return bad("trials must be ≥ 1".into());
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return bad(format!("dims must be non-empty and ≥ 1, got {:?}", self.dims));
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be > 0, got {}", self.tolerance));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("ε must lie in (0, 1), got {}", self.eps));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return bad(format!("α must lie in (0, 1), got {a}"));
            }
        }
        if self.n_max == 0 {
            return bad("n_max must be ≥ 1".into());
        }
        if self.twirl_samples == 0 {
            return bad("twirl sample count must be ≥ 1".into());
        }
        for &c in &self.checkers {
            self.shape_dims(c)?;
        }
        Ok(())
    }

    /// Subsystem dims `c` runs on.
    pub fn shape_dims(&self, c: Checker) -> Result<Vec<usize>> {
        let d = &self.dims;
        match c.shape() {
            Shape::Single => Ok(vec![d.iter().take(2).product()]),
            Shape::Bipartite if d.len() >= 2 => Ok(vec![d[0], d[1]]),
            Shape::Tripartite if d.len() == 3 => Ok(d.clone()),
            shape => Err(Error::InvalidParameter(format!(
                "checker `{c}` needs {} dims, got {:?}",
                if shape == Shape::Bipartite { "at least 2" } else { "exactly 3" },
                d
            ))),
        }
    }
}

/// Concrete inputs of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub checker: String,
    pub seed: u64,
    pub trial: u64,
    pub tolerance: f64,
    pub states: Vec<StateJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelJson>,
    /// Parameter grid (α values, `t` samples, Trotter indices).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl Instance {
    fn new(c: Checker, cfg: &SuiteConfig, trial: u64) -> Self {
        Self {
            checker: c.name().into(),
            seed: cfg.seed,
            trial,
            tolerance: cfg.tolerance,
            states: Vec::new(),
            matrices: Vec::new(),
            channel: None,
            grid: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    fn state(mut self, s: &MultipartiteState) -> Self {
        self.states.push(s.to_json());
        self
    }

    fn density(mut self, s: &DensityMatrix) -> Self {
        self.states.push(s.into());
        self
    }

    fn matrix(mut self, m: &ComplexMatrix) -> Self {
        let (re, im) = m.to_parts();
        self.matrices.push(MatrixJson { re, im });
        self
    }

    fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    fn states_multi(&self) -> Result<Vec<MultipartiteState>> {
        self.states.iter().map(MultipartiteState::from_json).collect()
    }

    fn densities(&self) -> Result<Vec<DensityMatrix>> {
        self.states
            .iter()
            .map(|j| DensityMatrix::new(ComplexMatrix::from_parts(&j.re, &j.im)?))
            .collect()
    }

    fn matrices(&self) -> Result<Vec<ComplexMatrix>> {
        self.matrices
            .iter()
            .map(|m| ComplexMatrix::from_parts(&m.re, &m.im))
            .collect()
    }

    fn channel(&self) -> Result<KrausChannel> {
        let json = self
            .channel
            .as_ref()
            .ok_or_else(|| Error::Serialization("instance has no channel".into()))?;
        KrausChannel::from_json(json)
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::Serialization(format!("instance lacks parameter `{key}`")))
    }

    fn need(&self, states: usize, matrices: usize) -> Result<()> {
        if self.states.len() < states || self.matrices.len() < matrices {
            return Err(Error::Serialization(format!(
                "`{}` needs {states} states and {matrices} matrices",
                self.checker
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }
}

fn full_rank<R: Rng + ?Sized>(d: usize, eps: f64, rng: &mut R) -> Result<DensityMatrix> {
    regularize(&random_density(d, d, rng)?, eps)
}

fn full_rank_multi<R: Rng + ?Sized>(dims: &[usize], eps: f64, rng: &mut R) -> Result<MultipartiteState> {
    MultipartiteState::new(full_rank(dims.iter().product(), eps, rng)?, dims.to_vec())
}

fn hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(d, d, rng).hermitize()
}

/// Positive definite operator with trace drawn from `[lo, hi)`.
fn positive<R: Rng + ?Sized>(d: usize, eps: f64, lo: f64, hi: f64, rng: &mut R) -> Result<ComplexMatrix> {
    let scale = rng.random_range(lo..hi);
    Ok(full_rank(d, eps, rng)?.matrix().scale(scale))
}

fn dw_alpha(cfg: &SuiteConfig, trial: u64) -> f64 {
    cfg.alpha.unwrap_or_else(|| {
        let grid = alpha_grid(10);
        grid[(trial % grid.len() as u64) as usize]
    })
}

/// Triple `(ρ, σ, τ)` with `ρ_B = σ_B` on even trials and `σ_B = τ_B` on odd.
fn matched_triple<R: Rng + ?Sized>(
    dims: &[usize],
    eps: f64,
    trial: u64,
    rng: &mut R,
) -> Result<[MultipartiteState; 3]> {
    let mut s: Vec<MultipartiteState> = (0..3)
        .map(|_| full_rank_multi(dims, eps, rng))
        .collect::<Result<_>>()?;
    let (src, dst) = if trial % 2 == 0 { (0, 1) } else { (1, 2) };
    let target = s[src].marginal(&[1])?;
    s[dst] = transplant_marginal(&s[dst], 1, &target)?;
    let [a, b, c]: [MultipartiteState; 3] = s.try_into().expect("three states");
    Ok([a, b, c])
}

/// Draws the inputs of trial `trial` of checker `c`.
pub fn generate(c: Checker, cfg: &SuiteConfig, trial: u64) -> Result<Instance> {
    let dims = cfg.shape_dims(c)?;
    let rng = &mut trial_rng(cfg.seed, c.name(), trial);
    let eps = cfg.eps;
    let base = Instance::new(c, cfg, trial);
    let d = dims[0];
    Ok(match c {
        Checker::RenyiMonotone | Checker::Pinsker => base
            .density(&full_rank(d, eps, rng)?)
            .density(&full_rank(d, eps, rng)?)
            .with_grid(if c == Checker::RenyiMonotone { renyi_grid() } else { Vec::new() }),
        Checker::OverlapChain => {
            let mu = if trial % 2 == 0 { 1.0 } else { rng.random_range(0.05..1.0) };
            base.density(&full_rank(d, eps, rng)?)
                .density(&full_rank(d, eps, rng)?)
                .param("mu", mu)
        }
        Checker::Monotonicity => {
            let phi = random_channel(d, d, 2, rng)?;
            base.density(&full_rank(d, eps, rng)?)
                .density(&full_rank(d, eps, rng)?)
                .with_channel(&phi)
        }
        Checker::StrongerMono | Checker::UnitalTrace | Checker::DwAlpha | Checker::Sbw => {
            let phi = random_unital_channel(d, 3, rng)?;
            let inst = base
                .density(&full_rank(d, eps, rng)?)
                .density(&full_rank(d, eps, rng)?)
                .with_channel(&phi);
            match c {
                Checker::DwAlpha => inst.param("alpha", dw_alpha(cfg, trial)),
                Checker::Sbw => inst.with_grid(alpha_grid(12)).param("final_bound", SBW_FINAL_BOUND),
                _ => inst,
            }
        }
        Checker::PtraceStrengthening => base
            .state(&full_rank_multi(&dims, eps, rng)?)
            .state(&full_rank_multi(&dims, eps, rng)?),
        Checker::Ssa | Checker::SubaddExp | Checker::Squashed => base.state(&full_rank_multi(&dims, eps, rng)?),
        Checker::DwTripartite => base
            .state(&full_rank_multi(&dims, eps, rng)?)
            .param("alpha", dw_alpha(cfg, trial)),
        Checker::SuperSsa => base
            .state(&full_rank_multi(&dims, eps, rng)?)
            .state(&full_rank_multi(&dims, eps, rng)?),
        Checker::Bsw => (0..4).try_fold(base, |inst, _| Ok::<_, Error>(inst.state(&full_rank_multi(&dims, eps, rng)?)))?,
        Checker::TraceExp => {
            let [a, b, c3] = matched_triple(&dims, eps, trial, rng)?;
            base.state(&a).state(&b).state(&c3)
        }
        Checker::ThreeState => {
            let rho = full_rank_multi(&dims, eps, rng)?;
            let [a, b, c3] = matched_triple(&dims, eps, trial, rng)?;
            base.state(&rho).state(&a).state(&b).state(&c3)
        }
        Checker::Markov => {
            let spec = MarkovSpec::random_for_dims(dims[0], dims[1], dims[2], MARKOV_MAX_BLOCKS, eps, rng)?;
            base.state(&markov_state(&spec)?).with_grid(cfg.t_samples.clone())
        }
        Checker::Trotter => base
            .state(&full_rank_multi(&dims, eps, rng)?)
            .with_grid(power_grid(cfg.n_max).into_iter().map(|n| n as f64).collect()),
        Checker::Lieb | Checker::CarlenLieb => {
            let lead = if c == Checker::Lieb {
                hermitian(d, rng)
            } else {
                ginibre(d, d, rng)
            };
            let inst = base
                .matrix(&lead)
                .matrix(&positive(d, eps, 0.5, 2.0, rng)?)
                .matrix(&positive(d, eps, 0.5, 2.0, rng)?)
                .param("lambda", 0.5);
            if c == Checker::CarlenLieb {
                inst.param("alpha", [1.5, 2.0, 4.0][(trial % 3) as usize])
            } else {
                inst
            }
        }
        Checker::GoldenThompson => base.matrix(&hermitian(d, rng)).matrix(&hermitian(d, rng)),
        Checker::Audenaert => {
            let t = t_grid();
            base.matrix(&positive(d, eps, 0.1, 2.0, rng)?)
                .matrix(&positive(d, eps, 0.1, 2.0, rng)?)
                .param("t", t[(trial % t.len() as u64) as usize])
        }
        Checker::Twirl => {
            let x = hermitian(dims[0] * dims[1], rng);
            base.matrix(&x)
                .param("d_a", dims[0] as f64)
                .param("d_b", dims[1] as f64)
                .param("samples", cfg.twirl_samples as f64)
        }
    })
}

impl Instance {
    fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.grid = grid;
        self
    }

    fn with_channel(mut self, phi: &KrausChannel) -> Self {
        self.channel = Some(phi.to_json());
        self
    }
}

/// Runs the checker named in `inst` on its stored inputs.
pub fn evaluate(inst: &Instance) -> Result<Verdict> {
    let c: Checker = inst.checker.parse()?;
    let tol = inst.tolerance;
    let mut verdict: Verdict = match c {
        Checker::RenyiMonotone => {
            inst.need(2, 0)?;
            let s = inst.densities()?;
            lab::check_renyi_monotonicity(&s[0], &s[1], &inst.grid, tol)?.into()
        }
        Checker::OverlapChain => {
            inst.need(2, 0)?;
            let s = inst.densities()?;
            let sigma = SubnormalizedOperator::scaled(&s[1], inst.get("mu")?)?;
            lab::check_overlap_chain(&s[0], &sigma, tol)?.into()
        }
        Checker::Pinsker => {
            inst.need(2, 0)?;
            let s = inst.densities()?;
            lab::check_pinsker(&s[0], &s[1], tol)?.into()
        }
        Checker::Monotonicity => {
            inst.need(2, 0)?;
            let s = inst.densities()?;
            lab::check_monotonicity(&s[0], &s[1], &inst.channel()?, tol)?.into()
        }
        Checker::StrongerMono => {
            inst.need(2, 0)?;
            let s = inst.densities()?;
            lab::check_stronger_monotonicity(&s[0], &s[1], &inst.channel()?, tol)?.into()
        }
        Checker::UnitalTrace => {
            inst.need(2, 0)?;
            let s = inst.densities()?;
            lab::check_unital_trace_bound(&s[0], &s[1], &inst.channel()?, tol)?.into()
        }
        Checker::DwAlpha => {
            inst.need(2, 0)?;
            let s = inst.densities()?;
            lab::check_dw_alpha(&s[0], &s[1], &inst.channel()?, inst.get("alpha")?, tol)?.into()
        }
        Checker::Sbw => {
            inst.need(2, 0)?;
            let s = inst.densities()?;
            lab::check_sbw_limit(&s[0], &s[1], &inst.channel()?, &inst.grid, inst.get("final_bound")?, tol)?.into()
        }
        Checker::PtraceStrengthening => {
            inst.need(2, 0)?;
            let s = inst.states_multi()?;
            lab::check_ptrace_strengthening(&s[0], &s[1], tol)?.into()
        }
        Checker::Ssa => {
            inst.need(1, 0)?;
            lab::check_ssa_strengthened(&inst.states_multi()?[0], tol)?.into()
        }
        Checker::SubaddExp => {
            inst.need(1, 0)?;
            lab::check_subadd_exp(&inst.states_multi()?[0], tol)?.into()
        }
        Checker::Squashed => {
            inst.need(1, 0)?;
            lab::check_squashed_proxy(&inst.states_multi()?[0], tol)?.into()
        }
        Checker::DwTripartite => {
            inst.need(1, 0)?;
            lab::check_dw_alpha_tripartite(&inst.states_multi()?[0], inst.get("alpha")?, tol)?.into()
        }
        Checker::SuperSsa => {
            inst.need(2, 0)?;
            let s = inst.states_multi()?;
            lab::check_super_ssa(&s[0], &s[1], tol)?.into()
        }
        Checker::Bsw => {
            inst.need(4, 0)?;
            let s = inst.states_multi()?;
            lab::check_bsw_identity(&s[0], &s[1], &s[2], &s[3], tol)?.into()
        }
        Checker::TraceExp => {
            inst.need(3, 0)?;
            let s = inst.states_multi()?;
            lab::check_trace_exp_bound(&s[0], &s[1], &s[2], tol)?.into()
        }
        Checker::ThreeState => {
            inst.need(4, 0)?;
            let s = inst.states_multi()?;
            lab::check_three_state_chain(&s[0], &s[1], &s[2], &s[3], tol)?.into()
        }
        Checker::Markov => {
            inst.need(1, 0)?;
            let s = &inst.states_multi()?[0];
            let ssa = lab::check_ssa_strengthened(s, tol)?;
            let distance = ssa.quantities.get("omega_trace_distance").copied().unwrap_or(f64::NAN);
            lab::markov_characterizations(s, &inst.grid)?
                .with("omega_trace_distance", distance)
                .into()
        }
        Checker::Trotter => {
            inst.need(1, 0)?;
            let n: Vec<u64> = inst.grid.iter().map(|&n| n as u64).collect();
            lab::trotter_sequence(&inst.states_multi()?[0], &n, tol)?.into()
        }
        Checker::Lieb => {
            inst.need(0, 3)?;
            let m = inst.matrices()?;
            lab::check_lieb_concavity(&m[0], &m[1], &m[2], inst.get("lambda")?, tol)?.into()
        }
        Checker::CarlenLieb => {
            inst.need(0, 3)?;
            let m = inst.matrices()?;
            lab::check_cl_concavity(&m[0], &m[1], &m[2], inst.get("lambda")?, inst.get("alpha")?, tol)?.into()
        }
        Checker::GoldenThompson => {
            inst.need(0, 2)?;
            let m = inst.matrices()?;
            lab::check_golden_thompson(&m[0], &m[1], tol)?.into()
        }
        Checker::Audenaert => {
            inst.need(0, 2)?;
            let m = inst.matrices()?;
            lab::check_audenaert_ps(&m[0], &m[1], inst.get("t")?, tol)?.into()
        }
        Checker::Twirl => {
            inst.need(0, 1)?;
            let x = &inst.matrices()?[0];
            let dims = (inst.get("d_a")? as usize, inst.get("d_b")? as usize);
            let rng = &mut trial_rng(inst.seed, "twirl/sampling", inst.trial);
            lab::check_twirl_identity(x, dims, inst.get("samples")? as usize, rng, tol)?.into()
        }
    };
    let dims = match c.shape() {
        Shape::Single => vec![inst.states.first().map_or_else(|| inst.matrices[0].re.len(), |s| s.re.len())],
        _ if c == Checker::Twirl => vec![inst.get("d_a")? as usize, inst.get("d_b")? as usize],
        _ => inst.states[0].dims.clone(),
    };
    verdict.set_meta(Meta {
        dims,
        seed: Some(inst.seed),
        trial: Some(inst.trial),
    });
    Ok(verdict)
}

/// Verdict recorded for a trial whose evaluation raised an error.
fn error_verdict(c: Checker, cfg: &SuiteConfig, trial: u64) -> Verdict {
    let mut v: Verdict = CheckResult::new(c.name(), f64::NAN, cfg.tolerance)
        .with("error", 1.0)
        .into();
    v.set_meta(Meta {
        dims: cfg.shape_dims(c).unwrap_or_default(),
        seed: Some(cfg.seed),
        trial: Some(trial),
    });
    v
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialError {
    pub checker: String,
    pub trial: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckerSummary {
    pub checker: String,
    pub trials: u64,
    pub passed: u64,
    pub errors: u64,
    pub min_slack: f64,
    pub worst_trial: u64,
}

impl fmt::Display for CheckerSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} {:>6}/{:<6} passed  min slack {:+.3e} (trial {})",
            self.checker, self.passed, self.trials, self.min_slack, self.worst_trial
        )?;
        if self.errors > 0 {
            write!(f, "  errors {}", self.errors)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    /// One verdict per `(checker, trial)`, checkers in suite order and
    /// trials ascending.
    pub records: Vec<(Checker, Verdict)>,
    pub errors: Vec<TrialError>,
    pub summaries: Vec<CheckerSummary>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.errors.is_empty() && self.records.iter().all(|(_, v)| v.pass())
    }

    /// Failing record with the smallest slack (errors rank below everything).
    pub fn worst_failure(&self) -> Option<(Checker, u64)> {
        self.records
            .iter()
            .filter(|(_, v)| !v.pass())
            .min_by(|(_, a), (_, b)| rank(a.slack()).total_cmp(&rank(b.slack())))
            .map(|(c, v)| (*c, v.meta().trial.unwrap_or(0)))
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.records.iter().map(|(_, v)| v)
    }
}

fn rank(slack: f64) -> f64 {
    if slack.is_nan() {
        f64::NEG_INFINITY
    } else {
        slack
    }
}

/// Generates and evaluates one trial.
pub fn run_trial(c: Checker, cfg: &SuiteConfig, trial: u64) -> Result<Verdict> {
    evaluate(&generate(c, cfg, trial)?)
}

/// Runs every selected checker over `cfg.trials` trials. Trials run in
/// parallel; the report is assembled in trial order, so its contents depend
/// only on `cfg`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut summaries = Vec::new();
    for &c in &cfg.checkers {
        let outcomes: Vec<Result<Verdict>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(c, cfg, t))
            .collect();
        let mut summary = CheckerSummary {
            checker: c.name().into(),
            trials: cfg.trials,
            passed: 0,
            errors: 0,
            min_slack: f64::INFINITY,
            worst_trial: 0,
        };
        for (trial, outcome) in (0..cfg.trials).zip(outcomes) {
            let verdict = match outcome {
                Ok(v) => v,
                Err(e) => {
                    summary.errors += 1;
                    errors.push(TrialError {
                        checker: c.name().into(),
                        trial,
                        message: e.to_string(),
                    });
                    error_verdict(c, cfg, trial)
                }
            };
            if verdict.pass() {
                summary.passed += 1;
            }
            if rank(verdict.slack()) < summary.min_slack {
                summary.min_slack = rank(verdict.slack());
                summary.worst_trial = trial;
            }
            records.push((c, verdict));
        }
        summaries.push(summary);
    }
    Ok(SuiteReport {
        records,
        errors,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(checkers: Vec<Checker>, dims: &[usize], trials: u64) -> SuiteConfig {
        SuiteConfig::new(checkers, dims, trials, 7)
    }

    #[test]
    fn names_round_trip() {
        for &c in Checker::ALL {
            assert_eq!(c.name().parse::<Checker>().unwrap(), c);
        }
        assert!("nope".parse::<Checker>().is_err());
        assert_eq!(parse_suite("all").unwrap().len(), Checker::ALL.len());
        assert_eq!(parse_suite("ssa, ssa,bsw").unwrap(), vec![Checker::Ssa, Checker::Bsw]);
        assert!(parse_suite(" , ").is_err());
    }

    #[test]
    fn grids() {
        let g = alpha_grid(10);
        assert_eq!(g.len(), 12);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(g[0], 0.9);
        assert_eq!(*g.last().unwrap(), 2f64.powi(-10));
        assert_eq!(power_grid(64), vec![1, 2, 4, 8, 16, 32, 64]);
        assert_eq!(power_grid(1), vec![1]);
        assert_eq!(t_grid().len(), 11);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(vec![Checker::Ssa], &[2, 2, 2], 0).validate().is_err());
        assert!(cfg(vec![Checker::Ssa], &[2, 2], 3).validate().is_err());
        assert!(cfg(vec![Checker::Twirl], &[2], 3).validate().is_err());
        assert!(cfg(vec![Checker::Pinsker], &[3], 3).validate().is_ok());
        assert!(cfg(vec![Checker::Pinsker], &[0], 3).validate().is_err());
        let mut c = cfg(vec![Checker::Pinsker], &[3], 3);
        c.tolerance = 0.0;
        assert!(c.validate().is_err());
        assert_eq!(cfg(vec![], &[2, 2, 2], 1).shape_dims(Checker::Monotonicity).unwrap(), vec![4]);
    }

    #[test]
    fn every_checker_passes_a_few_trials() {
        let mut c = cfg(Checker::ALL.to_vec(), &[2, 2, 2], 4);
        c.twirl_samples = 500;
        let report = run_suite(&c).unwrap();
        assert!(report.errors.is_empty(), "{:?}", report.errors);
        for (checker, v) in &report.records {
            assert!(v.pass(), "{checker}: {v:?}");
        }
        assert_eq!(report.records.len(), 4 * Checker::ALL.len());
        assert_eq!(report.summaries.len(), Checker::ALL.len());
    }

    #[test]
    fn instances_replay_exactly() {
        let mut c = cfg(Checker::ALL.to_vec(), &[2, 2, 2], 2);
        c.twirl_samples = 200;
        for &checker in Checker::ALL {
            let inst = generate(checker, &c, 1).unwrap();
            let back = Instance::from_json(&inst.to_json().unwrap()).unwrap();
            assert_eq!(back, inst, "{checker}");
            let a = serde_json::to_string(&evaluate(&inst).unwrap()).unwrap();
            let b = serde_json::to_string(&evaluate(&back).unwrap()).unwrap();
            assert_eq!(a, b, "{checker}");
        }
    }

    #[test]
    fn matched_families_share_marginals() {
        let c = cfg(vec![Checker::TraceExp], &[2, 2, 2], 2);
        for trial in 0..2 {
            let inst = generate(Checker::TraceExp, &c, trial).unwrap();
            let v = evaluate(&inst).unwrap();
            let q = v.flat_quantities();
            let dist = q.iter().find(|(k, _)| k == "marginal_distance").unwrap().1;
            assert!(dist < 1e-10, "{dist}");
        }
    }

    #[test]
    fn trial_streams_are_independent_of_order() {
        let c = cfg(vec![Checker::Ssa], &[2, 2, 2], 5);
        let forward: Vec<_> = (0..5).map(|t| generate(Checker::Ssa, &c, t).unwrap()).collect();
        let backward: Vec<_> = (0..5).rev().map(|t| generate(Checker::Ssa, &c, t).unwrap()).collect();
        for (a, b) in forward.iter().zip(backward.iter().rev()) {
            assert_eq!(a, b);
        }
        assert_ne!(forward[0].states, forward[1].states);
    }
}
