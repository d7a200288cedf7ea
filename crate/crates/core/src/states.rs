//! Quantum states, subnormalized operators, multipartite bookkeeping,
//! seeded random ensembles and exact quantum Markov chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, herm_eig, ComplexMatrix, HermitianEigen, C64};
use crate::{tol, Error, Result};

/// Hermitian PSD operator of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

fn validate_positive(mat: &ComplexMatrix) -> Result<(f64, HermitianEigen)> {
    if !mat.is_square() {
        return Err(Error::DimMismatch(format!(
            "state must be square, got {}x{}",
            mat.rows(),
            mat.cols()
        )));
    }
    if !mat.is_finite() {
        return Err(Error::InvalidParameter("non-finite state entry".into()));
    }
    let eig = herm_eig(mat)?;
    if eig.min_eigenvalue() < -tol::PSD {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min_eigenvalue(),
        });
    }
    Ok((mat.trace().re, eig))
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let (trace, _) = validate_positive(&mat)?;
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::BadTrace { trace });
        }
        Ok(Self {
            mat: mat.hermitize(),
        })
    }

    /// Normalizes a nonzero PSD matrix to unit trace.
    pub fn normalized(mat: ComplexMatrix) -> Result<Self> {
        let t = mat.trace().re;
        if !(t > 0.0) {
            return Err(Error::BadTrace { trace: t });
        }
        Self::new(mat.scale(1.0 / t))
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(d).scale(1.0 / d as f64),
        }
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(probs))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = psi.len();
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        Ok(Self {
            mat: ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / norm2).hermitize(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eig(&self) -> Result<HermitianEigen> {
        herm_eig(&self.mat)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            mat: linalg::kron(&self.mat, &other.mat),
        }
    }
}

/// Hermitian PSD operator with trace at most one.
#[derive(Clone, Debug, PartialEq)]
pub struct SubnormalizedOperator {
    mat: ComplexMatrix,
}

impl SubnormalizedOperator {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let (trace, _) = validate_positive(&mat)?;
        if trace > 1.0 + tol::TRACE {
            return Err(Error::BadTrace { trace });
        }
        Ok(Self {
            mat: mat.hermitize(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `μ σ` for `0 < μ ≤ 1`.
    pub fn scaled(state: &DensityMatrix, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::InvalidParameter(format!("scale {mu} not in (0, 1]")));
        }
        Ok(Self {
            mat: state.matrix().scale(mu),
        })
    }
}

impl From<DensityMatrix> for SubnormalizedOperator {
    fn from(s: DensityMatrix) -> Self {
        Self { mat: s.mat }
    }
}

impl From<&DensityMatrix> for SubnormalizedOperator {
    fn from(s: &DensityMatrix) -> Self {
        Self { mat: s.mat.clone() }
    }
}

/// A state on `H_1 ⊗ … ⊗ H_n` with its subsystem structure.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipartiteState {
    state: DensityMatrix,
    dims: Vec<usize>,
    labels: Vec<String>,
}

const DEFAULT_LABELS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

impl MultipartiteState {
    pub fn new(state: DensityMatrix, dims: Vec<usize>) -> Result<Self> {
        let labels = (0..dims.len())
            .map(|i| {
                DEFAULT_LABELS
                    .get(i)
                    .map_or_else(|| format!("S{i}"), |s| s.to_string())
            })
            .collect();
        Self::with_labels(state, dims, labels)
    }

    pub fn with_labels(state: DensityMatrix, dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimMismatch(format!("invalid subsystem dims {dims:?}")));
        }
        if dims.iter().product::<usize>() != state.dim() {
            return Err(Error::DimMismatch(format!(
                "dims {dims:?} do not multiply to {}",
                state.dim()
            )));
        }
        if labels.len() != dims.len() {
            return Err(Error::DimMismatch("one label per subsystem".into()));
        }
        Ok(Self { state, dims, labels })
    }

    /// Tensor product of single-party states.
    pub fn product(parts: &[&DensityMatrix]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::DimMismatch("empty product".into()))?;
        let state = parts[1..].iter().fold((*first).clone(), |acc, p| acc.kron(p));
        Self::new(state, parts.iter().map(|p| p.dim()).collect())
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parts(&self) -> usize {
        self.dims.len()
    }

    /// Reduced state on the listed subsystems.
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let red = linalg::ptrace(self.state.matrix(), &self.dims, keep)?;
        Ok(DensityMatrix::from_trusted(red.hermitize()))
    }

    pub fn require_tripartite(&self) -> Result<()> {
        if self.parts() == 3 {
            Ok(())
        } else {
            Err(Error::NotTripartite {
                parts: self.parts(),
            })
        }
    }

    pub fn to_json(&self) -> StateJson {
        let (re, im) = self.state.matrix().to_parts();
        StateJson {
            dims: self.dims.clone(),
            re,
            im,
        }
    }

    pub fn from_json(json: &StateJson) -> Result<Self> {
        let mat = ComplexMatrix::from_parts(&json.re, &json.im)?;
        Self::new(DensityMatrix::new(mat)?, json.dims.clone())
    }
}

/// Wire format for states: `{dims, re, im}` with row-major nested rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for StateJson {
    fn from(s: &DensityMatrix) -> Self {
        let (re, im) = s.matrix().to_parts();
        StateJson {
            dims: vec![s.dim()],
            re,
            im,
        }
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `r × c` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// `G G† / Tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    let g = ginibre(d, rank, rng);
    let p = &g * &g.dagger();
    let t = p.trace().re;
    Ok(DensityMatrix::from_trusted(p.scale(1.0 / t).hermitize()))
}

/// Haar-distributed unitary: Gram-Schmidt QR of a Ginibre matrix.
///
/// Gram-Schmidt yields `R` with a positive real diagonal, which is exactly
/// the phase normalization that makes `Q` Haar distributed.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    let mut cols: Vec<Vec<C64>> = (0..d).map(|j| (0..d).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..d {
        // Two passes of modified Gram-Schmidt keep Q orthonormal to ~1e-15.
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let qk = &done[k];
                let proj: C64 = qk.iter().zip(rest[0].iter()).map(|(q, v)| q.conj() * v).sum();
                for (v, q) in rest[0].iter_mut().zip(qk) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Generator for one trial of a named experiment: seeded from
/// `seed ⊕ FNV-1a(label)`, with the trial index selecting the stream, so
/// trials are independent of evaluation order.
pub fn trial_rng(seed: u64, label: &str, trial: u64) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ h);
    rng.set_stream(trial);
    rng
}

/// Random probability vector, uniform on the simplex.
pub fn random_probabilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub fn random_tripartite<R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    d_c: usize,
    rank: usize,
    rng: &mut R,
) -> Result<MultipartiteState> {
    let rho = random_density(d_a * d_b * d_c, rank, rng)?;
    MultipartiteState::new(rho, vec![d_a, d_b, d_c])
}

/// `(1 - ε) ρ + ε 1/d`.
pub fn regularize(rho: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("regularization ε = {eps} not in (0, 1)")));
    }
    let d = rho.dim();
    let mixed = ComplexMatrix::identity(d).scale(eps / d as f64);
    Ok(DensityMatrix::from_trusted(&rho.matrix().scale(1.0 - eps) + &mixed))
}

pub fn regularize_multipartite(state: &MultipartiteState, eps: f64) -> Result<MultipartiteState> {
    MultipartiteState::with_labels(
        regularize(state.state(), eps)?,
        state.dims.clone(),
        state.labels.clone(),
    )
}

/// Replaces the marginal on `subsystem` by `target` through a local
/// similarity `K = target^{1/2} current^{-1/2}` acting on that subsystem.
///
/// A local operator on one subsystem commutes with tracing out the others,
/// so the new marginal is `K current K† = target` exactly while the
/// correlations with the remaining subsystems are only locally distorted.
pub fn transplant_marginal(
    state: &MultipartiteState,
    subsystem: usize,
    target: &DensityMatrix,
) -> Result<MultipartiteState> {
    let current = state.marginal(&[subsystem])?;
    if current.dim() != target.dim() {
        return Err(Error::DimMismatch(format!(
            "target marginal has dimension {}, subsystem has {}",
            target.dim(),
            current.dim()
        )));
    }
    let k = &target.eig()?.pow(0.5)? * &current.eig()?.pow(-0.5)?;
    let lifted = linalg::embed(&k, &state.dims, &[subsystem])?;
    let mat = state.matrix().conjugate_by(&lifted).hermitize();
    MultipartiteState::with_labels(
        DensityMatrix::from_trusted(mat),
        state.dims.clone(),
        state.labels.clone(),
    )
}

/// One summand `p_k ρ_{A b^L_k} ⊗ ρ_{b^R_k C}` of a Markov decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovBlock {
    pub p: f64,
    pub d_bl: usize,
    pub d_br: usize,
    /// State on `A ⊗ b^L_k`.
    pub rho_a_bl: DensityMatrix,
    /// State on `b^R_k ⊗ C`.
    pub rho_br_c: DensityMatrix,
}

/// Block structure `⊕_k p_k ρ_{A b^L_k} ⊗ ρ_{b^R_k C}` with
/// `H_B = ⊕_k H_{b^L_k} ⊗ H_{b^R_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovSpec {
    d_a: usize,
    d_c: usize,
    blocks: Vec<MarkovBlock>,
}

impl MarkovSpec {
    /// Validates block dimensions; probabilities summing to one within the
    /// trace tolerance are renormalized exactly.
    pub fn new(d_a: usize, d_c: usize, mut blocks: Vec<MarkovBlock>) -> Result<Self> {
        if d_a == 0 || d_c == 0 || blocks.is_empty() {
            return Err(Error::InconsistentBlocks("need d_A, d_C ≥ 1 and at least one block".into()));
        }
        for (k, b) in blocks.iter().enumerate() {
            if !(b.p >= 0.0) {
                return Err(Error::InconsistentBlocks(format!("block {k}: p = {}", b.p)));
            }
            if b.d_bl == 0 || b.d_br == 0 {
                return Err(Error::InconsistentBlocks(format!("block {k}: zero-dimensional factor")));
            }
            if b.rho_a_bl.dim() != d_a * b.d_bl {
                return Err(Error::InconsistentBlocks(format!(
                    "block {k}: ρ_AbL has dimension {}, expected {}",
                    b.rho_a_bl.dim(),
                    d_a * b.d_bl
                )));
            }
            if b.rho_br_c.dim() != b.d_br * d_c {
                return Err(Error::InconsistentBlocks(format!(
                    "block {k}: ρ_bRC has dimension {}, expected {}",
                    b.rho_br_c.dim(),
                    b.d_br * d_c
                )));
            }
        }
        let total: f64 = blocks.iter().map(|b| b.p).sum();
        if (total - 1.0).abs() > tol::TRACE {
            return Err(Error::InconsistentBlocks(format!("probabilities sum to {total}")));
        }
        for b in blocks.iter_mut() {
            b.p /= total;
        }
        Ok(Self { d_a, d_c, blocks })
    }

    /// Random spec with full-rank blocks regularized by `eps`.
    pub fn random<R: Rng + ?Sized>(
        d_a: usize,
        d_c: usize,
        block_dims: &[(usize, usize)],
        eps: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let probs = random_probabilities(block_dims.len(), rng);
        let blocks = block_dims
            .iter()
            .zip(probs)
            .map(|(&(d_bl, d_br), p)| {
                let l = d_a * d_bl;
                let r = d_br * d_c;
                Ok(MarkovBlock {
                    p,
                    d_bl,
                    d_br,
                    rho_a_bl: regularize(&random_density(l, l, rng)?, eps)?,
                    rho_br_c: regularize(&random_density(r, r, rng)?, eps)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d_a, d_c, blocks)
    }

    /// Random spec with B of total dimension `d_b`: one to
    /// `min(max_blocks, d_b)` blocks of random sizes, each split into a
    /// random factorization `d_bL · d_bR`.
    pub fn random_for_dims<R: Rng + ?Sized>(
        d_a: usize,
        d_b: usize,
        d_c: usize,
        max_blocks: usize,
        eps: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if d_b == 0 || max_blocks == 0 {
            return Err(Error::InvalidParameter("need d_b ≥ 1 and at least one block".into()));
        }
        let k = rng.random_range(1..=max_blocks.min(d_b));
        // k − 1 distinct cut points in 1..d_b
        let mut cuts = rand::seq::index::sample(rng, d_b - 1, k - 1)
            .into_iter()
            .map(|c| c + 1)
            .collect::<Vec<_>>();
        cuts.sort_unstable();
        cuts.push(d_b);
        let mut start = 0;
        let mut block_dims = Vec::with_capacity(k);
        for end in cuts {
            let size = end - start;
            let divisors: Vec<usize> = (1..=size).filter(|d| size % d == 0).collect();
            let d_bl = divisors[rng.random_range(0..divisors.len())];
            block_dims.push((d_bl, size / d_bl));
            start = end;
        }
        Self::random(d_a, d_c, &block_dims, eps, rng)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_c(&self) -> usize {
        self.d_c
    }

    pub fn d_b(&self) -> usize {
        self.blocks.iter().map(|b| b.d_bl * b.d_br).sum()
    }

    pub fn blocks(&self) -> &[MarkovBlock] {
        &self.blocks
    }
}

/// Builds `⊕_k p_k ρ_{A b^L_k} ⊗ ρ_{b^R_k C}` in the global `(A, B, C)`
/// ordering. Blocks occupy consecutive ranges of B's index; within block
/// `k` the local B index is `b_L * d_bR + b_R`.
pub fn markov_state(spec: &MarkovSpec) -> Result<MultipartiteState> {
    let (d_a, d_c, d_b) = (spec.d_a, spec.d_c, spec.d_b());
    let n = d_a * d_b * d_c;
    let mut mat = ComplexMatrix::zeros(n, n);
    let mut offset = 0;
    for blk in &spec.blocks {
        let (l, r) = (blk.d_bl, blk.d_br);
        let left = blk.rho_a_bl.matrix();
        let right = blk.rho_br_c.matrix();
        for a in 0..d_a {
            for bl in 0..l {
                for br in 0..r {
                    for c in 0..d_c {
                        let row = (a * d_b + offset + bl * r + br) * d_c + c;
                        for a2 in 0..d_a {
                            for bl2 in 0..l {
                                let lv = left[(a * l + bl, a2 * l + bl2)];
                                for br2 in 0..r {
                                    for c2 in 0..d_c {
                                        let col = (a2 * d_b + offset + bl2 * r + br2) * d_c + c2;
                                        mat[(row, col)] =
                                            lv * right[(br * d_c + c, br2 * d_c + c2)] * blk.p;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        offset += l * r;
    }
    MultipartiteState::new(DensityMatrix::new(mat.hermitize())?, vec![d_a, d_b, d_c])
}

/// Wire format for a Markov spec. Missing block states are drawn at random
/// from `seed` (full rank, regularized by `eps`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkovSpecJson {
    pub d_a: usize,
    pub d_c: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    pub blocks: Vec<MarkovBlockJson>,
}

fn default_eps() -> f64 {
    tol::DEFAULT_EPS
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkovBlockJson {
    pub p: f64,
    pub d_bl: usize,
    pub d_br: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_a_bl: Option<StateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_br_c: Option<StateJson>,
}

impl MarkovSpecJson {
    pub fn build(&self) -> Result<MarkovSpec> {
        use rand::SeedableRng;
        if self.d_a == 0 || self.d_c == 0 {
            return Err(Error::InconsistentBlocks("need d_A, d_C ≥ 1".into()));
        }
        if let Some(k) = self.blocks.iter().position(|b| b.d_bl == 0 || b.d_br == 0) {
            return Err(Error::InconsistentBlocks(format!("block {k}: zero-dimensional factor")));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
        let mut draw = |json: &Option<StateJson>, d: usize| -> Result<DensityMatrix> {
            match json {
                Some(j) => DensityMatrix::new(ComplexMatrix::from_parts(&j.re, &j.im)?),
                None => regularize(&random_density(d, d, &mut rng)?, self.eps),
            }
        };
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                Ok(MarkovBlock {
                    p: b.p,
                    d_bl: b.d_bl,
                    d_br: b.d_br,
                    rho_a_bl: draw(&b.rho_a_bl, self.d_a * b.d_bl)?,
                    rho_br_c: draw(&b.rho_br_c, b.d_br * self.d_c)?,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::DimMismatch(m) => Error::InconsistentBlocks(m),
                other => other,
            })?;
        MarkovSpec::new(self.d_a, self.d_c, blocks)
    }
}
