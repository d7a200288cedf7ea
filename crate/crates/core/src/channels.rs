//! Quantum channels in Kraus form, Hilbert-Schmidt duals, the Petz recovery
//! map, partial-trace channels and Haar twirls.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, herm_eig, ComplexMatrix, C64};
use crate::states::{self, DensityMatrix};
use crate::{tol, Error, Result};

/// Completely positive trace-preserving map `X ↦ Σ K X K†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
    unital: bool,
}

fn gram_defect(sum: &ComplexMatrix) -> f64 {
    sum.max_abs_diff(&ComplexMatrix::identity(sum.rows()))
}

impl KrausChannel {
    /// Validates shapes and trace preservation, and records whether the
    /// channel is unital.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus family".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(Error::DimMismatch("Kraus operators differ in shape".into()));
        }
        let mut tp = ComplexMatrix::zeros(d_in, d_in);
        let mut un = ComplexMatrix::zeros(d_out, d_out);
        for k in &kraus {
            tp = &tp + &(&k.dagger() * k);
            un = &un + &(k * &k.dagger());
        }
        let deviation = gram_defect(&tp);
        if deviation > tol::CHANNEL {
            return Err(Error::NotTracePreserving { deviation });
        }
        let unital = d_in == d_out && gram_defect(&un) <= tol::CHANNEL;
        Ok(Self {
            kraus,
            d_in,
            d_out,
            unital,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(d)).expect("identity is unitary")
    }

    /// `X ↦ U X U†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// `X ↦ Tr(X) 1/d`, with Kraus operators `|i⟩⟨j| / √d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let s = 1.0 / (d as f64).sqrt();
        let kraus = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut k = ComplexMatrix::zeros(d, d);
                k[(i, j)] = C64::new(s, 0.0);
                k
            })
            .collect();
        Self::new(kraus).expect("depolarizing family is trace preserving")
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn require_unital(&self) -> Result<()> {
        if self.unital {
            return Ok(());
        }
        let deviation = if self.d_in == self.d_out {
            let mut un = ComplexMatrix::zeros(self.d_out, self.d_out);
            for k in &self.kraus {
                un = &un + &(k * &k.dagger());
            }
            gram_defect(&un)
        } else {
            f64::INFINITY
        };
        Err(Error::NotUnital { deviation })
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !x.is_square() || x.rows() != self.d_in {
            return Err(Error::DimMismatch(format!(
                "channel input is {0}x{0}, got {1}x{2}",
                self.d_in,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = &out + &x.conjugate_by(k);
        }
        Ok(out)
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(self.apply(rho.matrix())?.hermitize()))
    }

    pub fn dual(&self) -> DualMap {
        DualMap {
            kraus: self.kraus.clone(),
            d_in: self.d_in,
            d_out: self.d_out,
        }
    }

    /// `Φ*_σ = Ad_{σ^{1/2}} ∘ Φ* ∘ Ad_{Φ(σ)^{-1/2}}`.
    pub fn petz_map(&self, sigma: &DensityMatrix) -> Result<PetzMap> {
        if sigma.dim() != self.d_in {
            return Err(Error::DimMismatch("σ does not match the channel input".into()));
        }
        let s_eig = sigma.eig()?;
        if !s_eig.is_full_rank() {
            return Err(Error::SingularSigma);
        }
        let mut image = self.apply(sigma.matrix())?.hermitize();
        let mut i_eig = herm_eig(&image)?;
        if !i_eig.is_full_rank() {
            let d = self.d_out as f64;
            image = &image.scale(1.0 - tol::PETZ_EPS)
                + &ComplexMatrix::identity(self.d_out).scale(tol::PETZ_EPS / d);
            i_eig = herm_eig(&image)?;
            if !i_eig.is_full_rank() {
                return Err(Error::SingularSigma);
            }
        }
        Ok(PetzMap {
            sigma_sqrt: s_eig.pow(0.5)?,
            image_inv_sqrt: i_eig.pow(-0.5)?,
            dual: self.dual(),
        })
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson {
            d_in: self.d_in,
            d_out: self.d_out,
            kraus: self
                .kraus
                .iter()
                .map(|k| {
                    let (re, im) = k.to_parts();
                    MatrixJson { re, im }
                })
                .collect(),
        }
    }

    pub fn from_json(json: &ChannelJson) -> Result<Self> {
        let kraus = json
            .kraus
            .iter()
            .map(|m| ComplexMatrix::from_parts(&m.re, &m.im))
            .collect::<Result<Vec<_>>>()?;
        let ch = Self::new(kraus)?;
        if ch.d_in != json.d_in || ch.d_out != json.d_out {
            return Err(Error::DimMismatch("declared channel dims disagree with Kraus shapes".into()));
        }
        Ok(ch)
    }
}

/// `Y ↦ Σ K† Y K`, the Hilbert-Schmidt adjoint of a Kraus channel.
#[derive(Clone, Debug)]
pub struct DualMap {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
}

impl DualMap {
    /// Maps `d_out × d_out` operators to `d_in × d_in` operators.
    pub fn apply(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !y.is_square() || y.rows() != self.d_out {
            return Err(Error::DimMismatch(format!(
                "dual map input is {0}x{0}, got {1}x{2}",
                self.d_out,
                y.rows(),
                y.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            out = &out + &(&(&k.dagger() * y) * k);
        }
        Ok(out)
    }
}

/// Petz recovery map for a fixed channel and reference state.
#[derive(Clone, Debug)]
pub struct PetzMap {
    sigma_sqrt: ComplexMatrix,
    image_inv_sqrt: ComplexMatrix,
    dual: DualMap,
}

impl PetzMap {
    /// `σ^{1/2} Φ*(Φ(σ)^{-1/2} X Φ(σ)^{-1/2}) σ^{1/2}`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let inner = x.conjugate_by(&self.image_inv_sqrt);
        Ok(self.dual.apply(&inner)?.conjugate_by(&self.sigma_sqrt).hermitize())
    }
}

/// Kraus family `{1 ⊗ ⟨i| ⊗ 1}` tracing out subsystem `traced`.
pub fn ptrace_channel(dims: &[usize], traced: usize) -> Result<KrausChannel> {
    if traced >= dims.len() || dims.iter().any(|&d| d == 0) {
        return Err(Error::DimMismatch(format!(
            "cannot trace subsystem {traced} of {dims:?}"
        )));
    }
    let before: usize = dims[..traced].iter().product();
    let after: usize = dims[traced + 1..].iter().product();
    let dt = dims[traced];
    let (d_in, d_out) = (before * dt * after, before * after);
    let kraus = (0..dt)
        .map(|i| {
            let mut k = ComplexMatrix::zeros(d_out, d_in);
            for x in 0..before {
                for y in 0..after {
                    k[(x * after + y, (x * dt + i) * after + y)] = C64::new(1.0, 0.0);
                }
            }
            k
        })
        .collect();
    KrausChannel::new(kraus)
}

/// Mixed-unitary channel `Σ_i p_i U_i · U_i†` with random weights and Haar
/// unitaries; unital and trace preserving by construction.
pub fn random_unital_channel<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Result<KrausChannel> {
    if m == 0 {
        return Err(Error::InvalidParameter("mixed-unitary channel needs m ≥ 1".into()));
    }
    let probs = states::random_probabilities(m, rng);
    let kraus = probs
        .iter()
        .map(|&p| states::random_unitary(d, rng).scale(p.sqrt()))
        .collect();
    KrausChannel::new(kraus)
}

/// Random channel from a Haar isometry `V: C^{d_in} → C^{d_out} ⊗ C^m`;
/// the Kraus operators are the `m` row blocks of `V`.
pub fn random_channel<R: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    m: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if m == 0 || d_out * m < d_in {
        return Err(Error::InvalidParameter(format!(
            "need d_out·m ≥ d_in, got {d_out}·{m} < {d_in}"
        )));
    }
    let u = states::random_unitary(d_out * m, rng);
    let kraus = (0..m)
        .map(|mu| ComplexMatrix::from_fn(d_out, d_in, |i, j| u[(mu * d_out + i, j)]))
        .collect();
    KrausChannel::new(kraus)
}

/// Which factor of a bipartite space a twirl averages over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwirlOver {
    First,
    Second,
}

fn check_bipartite(x: &ComplexMatrix, dims: (usize, usize)) -> Result<()> {
    if !x.is_square() || x.rows() != dims.0 * dims.1 {
        return Err(Error::DimMismatch(format!(
            "{}x{} operator on a {}x{} bipartite space",
            x.rows(),
            x.cols(),
            dims.0,
            dims.1
        )));
    }
    Ok(())
}

/// Closed-form Haar twirl: `Tr_B(X) ⊗ 1_B/d_B` (or the mirror image).
pub fn twirl_exact(x: &ComplexMatrix, dims: (usize, usize), over: TwirlOver) -> Result<ComplexMatrix> {
    check_bipartite(x, dims)?;
    let (da, db) = dims;
    Ok(match over {
        TwirlOver::Second => {
            let red = linalg::ptrace(x, &[da, db], &[0])?;
            linalg::kron(&red, &ComplexMatrix::identity(db).scale(1.0 / db as f64))
        }
        TwirlOver::First => {
            let red = linalg::ptrace(x, &[da, db], &[1])?;
            linalg::kron(&ComplexMatrix::identity(da).scale(1.0 / da as f64), &red)
        }
    })
}

/// Monte Carlo twirl: mean of `(1 ⊗ U) X (1 ⊗ U)†` over `n` Haar samples.
pub fn twirl_mc<R: Rng + ?Sized>(
    x: &ComplexMatrix,
    dims: (usize, usize),
    over: TwirlOver,
    n: usize,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    check_bipartite(x, dims)?;
    if n == 0 {
        return Err(Error::InvalidParameter("twirl needs n ≥ 1 samples".into()));
    }
    let (da, db) = dims;
    let mut acc = ComplexMatrix::zeros(x.rows(), x.cols());
    for _ in 0..n {
        let local = match over {
            TwirlOver::Second => {
                linalg::kron(&ComplexMatrix::identity(da), &states::random_unitary(db, rng))
            }
            TwirlOver::First => {
                linalg::kron(&states::random_unitary(da, rng), &ComplexMatrix::identity(db))
            }
        };
        acc = &acc + &x.conjugate_by(&local);
    }
    let mean = acc.scale(1.0 / n as f64);
    Ok(if x.is_hermitian() { mean.hermitize() } else { mean })
}

/// Wire format for channels: `{d_in, d_out, kraus: [{re, im}, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub d_in: usize,
    pub d_out: usize,
    pub kraus: Vec<MatrixJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}
