//! Entropy functionals: von Neumann, Umegaki relative entropy, Petz-Rényi
//! divergences, conditional mutual information and `exp(Σ c_i log X_i)`.

use serde::{Deserialize, Serialize};

use crate::linalg::{herm_eig, ComplexMatrix, HermitianEigen};
use crate::states::{DensityMatrix, MultipartiteState, SubnormalizedOperator};
use crate::{tol, Error, Result};

/// A divergence value in nats, possibly `+∞`.
///
/// Serialized as `{"value": x}` or `{"infinite": true}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EntropyJson", into = "EntropyJson")]
pub enum EntropyValue {
    Finite(f64),
    Infinite,
}

impl EntropyValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }

    /// The value as an `f64`, with `+∞` for the infinite case.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

#[derive(Serialize, Deserialize)]
struct EntropyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    infinite: bool,
}

impl From<EntropyValue> for EntropyJson {
    fn from(v: EntropyValue) -> Self {
        match v {
            EntropyValue::Finite(x) => Self {
                value: Some(x),
                infinite: false,
            },
            EntropyValue::Infinite => Self {
                value: None,
                infinite: true,
            },
        }
    }
}

impl TryFrom<EntropyJson> for EntropyValue {
    type Error = String;

    fn try_from(j: EntropyJson) -> std::result::Result<Self, String> {
        match (j.infinite, j.value) {
            (true, _) => Ok(Self::Infinite),
            (false, Some(x)) => Ok(Self::Finite(x)),
            (false, None) => Err("entropy value needs `value` or `infinite: true`".into()),
        }
    }
}

fn entropy_of_spectrum(eig: &HermitianEigen) -> f64 {
    let cut = eig.cutoff();
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| -l * l.ln())
        .sum()
}

/// `S(ρ) = −Tr ρ ln ρ`.
pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    match rho.eig() {
        Ok(eig) => entropy_of_spectrum(&eig).max(0.0),
        Err(_) => f64::NAN,
    }
}

fn require_hermitian(x: &ComplexMatrix) -> Result<()> {
    if x.is_hermitian() {
        Ok(())
    } else {
        Err(Error::NotHermitian {
            deviation: x.hermiticity_defect(),
        })
    }
}

fn require_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimMismatch(format!(
            "{}x{} against {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `‖(1 − P_σ) ρ (1 − P_σ)‖_∞` from `σ`'s eigendecomposition.
fn off_support_weight(rho: &ComplexMatrix, sigma: &HermitianEigen) -> Result<f64> {
    let n = sigma.dim();
    let kernel = &ComplexMatrix::identity(n) - &sigma.support_projector();
    let leak = rho.conjugate_by(&kernel).hermitize();
    Ok(herm_eig(&leak)?.max_abs_eigenvalue())
}

/// `S(ρ‖σ)` for a subnormalized second argument.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &SubnormalizedOperator) -> Result<EntropyValue> {
    relative_entropy_op(rho, sigma.matrix())
}

/// `S(ρ‖X) = Tr ρ (ln ρ − ln X)` for any positive semi-definite `X`,
/// including operators with trace above one such as `exp(Σ ± log)` outputs.
pub fn relative_entropy_op(rho: &DensityMatrix, x: &ComplexMatrix) -> Result<EntropyValue> {
    require_same_dim(rho.matrix(), x)?;
    require_hermitian(x)?;
    let x_eig = herm_eig(x)?;
    if x_eig.max_abs_eigenvalue() == 0.0 || off_support_weight(rho.matrix(), &x_eig)? >= tol::SUPPORT {
        return Ok(EntropyValue::Infinite);
    }
    let neg_entropy = -entropy_of_spectrum(&rho.eig()?);
    let cut = x_eig.cutoff();
    let v = &x_eig.eigenvectors;
    let m = rho.matrix();
    let n = x_eig.dim();
    let mut cross = 0.0;
    for (k, &mu) in x_eig.eigenvalues.iter().enumerate() {
        if mu <= cut {
            continue;
        }
        // ⟨v_k|ρ|v_k⟩
        let mut w = 0.0;
        for i in 0..n {
            let mut row = crate::C64::new(0.0, 0.0);
            for j in 0..n {
                row += m[(i, j)] * v[(j, k)];
            }
            w += (v[(i, k)].conj() * row).re;
        }
        cross += w * mu.ln();
    }
    Ok(EntropyValue::Finite(neg_entropy - cross))
}

/// `Tr ρ^α σ^{1−α}` evaluated on supports, via
/// `Σ_{ij} λ_i^α μ_j^{1−α} |⟨u_i|v_j⟩|²`.
pub fn renyi_trace(alpha: f64, rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadAlpha { alpha });
    }
    require_same_dim(rho, sigma)?;
    require_hermitian(rho)?;
    require_hermitian(sigma)?;
    let r = herm_eig(rho)?;
    let s = herm_eig(sigma)?;
    let overlap = &r.eigenvectors.dagger() * &s.eigenvectors;
    let (rc, sc) = (r.cutoff(), s.cutoff());
    let mut acc = 0.0;
    for (i, &l) in r.eigenvalues.iter().enumerate() {
        if l <= rc {
            continue;
        }
        let la = l.powf(alpha);
        for (j, &mu) in s.eigenvalues.iter().enumerate() {
            if mu <= sc {
                continue;
            }
            acc += la * mu.powf(1.0 - alpha) * overlap[(i, j)].norm_sqr();
        }
    }
    Ok(acc)
}

/// Petz-Rényi divergence `S_α(ρ‖σ) = ln Tr(ρ^α σ^{1−α}) / (α − 1)` for
/// `α ∈ (0, 1)`; infinite when the trace functional vanishes.
pub fn renyi(alpha: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropyValue> {
    renyi_op(alpha, rho, sigma.matrix())
}

/// [`renyi`] with an arbitrary positive semi-definite second argument.
pub fn renyi_op(alpha: f64, rho: &DensityMatrix, sigma: &ComplexMatrix) -> Result<EntropyValue> {
    let q = renyi_trace(alpha, rho.matrix(), sigma)?;
    Ok(if q > 0.0 {
        EntropyValue::Finite(q.ln() / (alpha - 1.0))
    } else {
        EntropyValue::Infinite
    })
}

/// `Tr √ρ √X` (the fidelity-type overlap) for PSD `ρ`, `X`.
pub fn sqrt_overlap(rho: &ComplexMatrix, x: &ComplexMatrix) -> Result<f64> {
    require_same_dim(rho, x)?;
    let a = herm_eig(&rho.hermitize())?.pow(0.5)?;
    let b = herm_eig(&x.hermitize())?.pow(0.5)?;
    Ok(a.trace_product(&b).re)
}

/// `−2 ln Tr √ρ √σ`, a lower bound on `S(ρ‖σ)`.
pub fn overlap_lower_bound(rho: &DensityMatrix, sigma: &SubnormalizedOperator) -> Result<f64> {
    overlap_lower_bound_op(rho, sigma.matrix())
}

pub fn overlap_lower_bound_op(rho: &DensityMatrix, x: &ComplexMatrix) -> Result<f64> {
    let f = sqrt_overlap(rho.matrix(), x)?;
    if f <= 0.0 {
        return Err(Error::ZeroOverlap);
    }
    Ok(-2.0 * f.ln())
}

/// `I(A:C|B) = S(AB) + S(BC) − S(ABC) − S(B)`.
pub fn cmi(state: &MultipartiteState) -> Result<f64> {
    state.require_tripartite()?;
    let ab = state.marginal(&[0, 1])?;
    let bc = state.marginal(&[1, 2])?;
    let b = state.marginal(&[1])?;
    Ok(von_neumann(&ab) + von_neumann(&bc) - von_neumann(state.state()) - von_neumann(&b))
}

/// `I(A:C|B) = S(ρ_ABC ‖ ρ_AB ⊗ ρ_C) − S(ρ_BC ‖ ρ_B ⊗ ρ_C)`.
pub fn cmi_relative_form(state: &MultipartiteState) -> Result<f64> {
    state.require_tripartite()?;
    let ab = state.marginal(&[0, 1])?;
    let bc = state.marginal(&[1, 2])?;
    let b = state.marginal(&[1])?;
    let c = state.marginal(&[2])?;
    let full = relative_entropy_op(state.state(), ab.kron(&c).matrix())?;
    let reduced = relative_entropy_op(&bc, b.kron(&c).matrix())?;
    match (full, reduced) {
        (EntropyValue::Finite(x), EntropyValue::Finite(y)) => Ok(x - y),
        _ => Err(Error::InvalidParameter(
            "marginal product does not contain the state's support".into(),
        )),
    }
}

/// `exp(Σ c_i ln X_i)`, Hermitized. Every `X_i` must be Hermitian and full
/// rank on the common space; embedding into that space is the caller's job.
pub fn exp_log_combination(terms: &[(f64, &ComplexMatrix)]) -> Result<ComplexMatrix> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty exp-log combination".into()))?;
    let n = first.1.rows();
    let mut acc = ComplexMatrix::zeros(n, n);
    for (index, &(c, x)) in terms.iter().enumerate() {
        require_same_dim(first.1, x)?;
        require_hermitian(x)?;
        let eig = herm_eig(x)?;
        if !eig.is_full_rank() {
            return Err(Error::SingularTerm {
                index,
                min_eigenvalue: eig.min_eigenvalue(),
            });
        }
        acc = &acc + &eig.map(|l| c * l.ln());
    }
    Ok(herm_eig(&acc.hermitize())?.map(f64::exp))
}
