//! Dense complex linear algebra.
//!
//! Matrices are stored row-major. For multipartite operators the first
//! subsystem is the slowest-varying index: on `A ⊗ B ⊗ C` the composite
//! index is `(a * d_B + b) * d_C + c`. [`kron`], [`ptrace`] and [`embed`]
//! all follow this convention.
//!
//! The Hermitian eigensolver is a cyclic complex Jacobi iteration. At the
//! sizes used here (d ≤ 64) it is fast enough and it resolves small
//! eigenvalues to high relative accuracy, which matters for matrix logarithms.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{tol, Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Rejects non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = C64::new(d, 0.0);
        }
        m
    }

    /// Splits into real and imaginary parts as nested rows.
    pub fn to_parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let re = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].re).collect())
            .collect();
        let im = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].im).collect())
            .collect();
        (re, im)
    }

    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let rows = re.len();
        if im.len() != rows {
            return Err(Error::DimMismatch("re/im row counts differ".into()));
        }
        let cols = re.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * cols);
        for (r, i) in re.iter().zip(im) {
            if r.len() != cols || i.len() != cols {
                return Err(Error::DimMismatch("ragged matrix rows".into()));
            }
            data.extend(r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)));
        }
        Self::from_vec(rows, cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_entries(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map_entries(|z| z * s)
    }

    pub fn map_entries(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `(X + X†) / 2`.
    pub fn hermitize(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// `max |X - X†|` over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= tol::HERM * self.max_abs().max(1.0)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `A X A†`.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        a.matmul(self).matmul(&a.dagger())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Maximum entrywise distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Spectral decomposition `H = V diag(λ) V†` with ascending `λ`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Columns are the orthonormal eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

const MAX_SWEEPS: usize = 100;

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            h.rows, h.cols
        )));
    }
    let scale = h.max_abs();
    let defect = h.hermiticity_defect();
    if defect > tol::HERM * scale.max(f64::MIN_POSITIVE) && defect > 0.0 {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let n = h.rows;
    let mut a = h.hermitize();
    let mut v = ComplexMatrix::identity(n);

    let total = a.frobenius();
    let mut converged = n <= 1 || total == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { iterations: sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        converged = off <= 1e-16 * total;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating `a[p][q]`; `a ← J† a J`, `v ← v J`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let jpq = phase * s;
    let jqp = -phase.conj() * s;
    let n = a.rows;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * jqp;
        a[(k, q)] = akp * jpq + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * jqp.conj();
        a[(q, k)] = apk * jpq.conj() + aqk * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * c;
    }
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// Absolute threshold below which an eigenvalue is treated as zero.
    pub fn cutoff(&self) -> f64 {
        tol::RANK_CUTOFF * self.max_abs_eigenvalue()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn is_full_rank(&self) -> bool {
        self.min_eigenvalue() > self.cutoff()
    }

    /// `V diag(f(λ)) V†` for a complex-valued spectral function.
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let vals: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, &fk) in vals.iter().enumerate() {
                    if fk != ZERO {
                        acc += v[(i, k)] * fk * v[(j, k)].conj();
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// `V diag(f(λ)) V†`, Hermitized.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.map_complex(|l| C64::new(f(l), 0.0)).hermitize()
    }

    /// Like [`map`](Self::map) but eigenvalues below the rank cutoff are sent to 0.
    pub fn map_on_support(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let cut = self.cutoff();
        self.map(|l| if l > cut { f(l) } else { 0.0 })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }

    /// Orthogonal projector onto the eigenspace above the rank cutoff.
    pub fn support_projector(&self) -> ComplexMatrix {
        let cut = self.cutoff();
        self.map(|l| if l > cut { 1.0 } else { 0.0 })
    }

    fn require_full_rank(&self) -> Result<()> {
        if self.is_full_rank() {
            Ok(())
        } else {
            Err(Error::SingularInput {
                min_eigenvalue: self.min_eigenvalue(),
            })
        }
    }

    pub fn log(&self) -> Result<ComplexMatrix> {
        self.require_full_rank()?;
        Ok(self.map(f64::ln))
    }

    /// Real power. Negative exponents require full rank; non-negative ones
    /// clamp roundoff-negative eigenvalues to zero.
    pub fn pow(&self, p: f64) -> Result<ComplexMatrix> {
        if p < 0.0 {
            self.require_full_rank()?;
            Ok(self.map(|l| l.powf(p)))
        } else {
            Ok(self.map(|l| l.max(0.0).powf(p)))
        }
    }

    /// `H^{it}` on the support, identity on the kernel.
    pub fn imag_pow(&self, t: f64) -> ComplexMatrix {
        let cut = self.cutoff();
        self.map_complex(|l| {
            if l > cut {
                C64::from_polar(1.0, t * l.ln())
            } else {
                ONE
            }
        })
    }
}

/// `f(H)` for real `f`. With `support_only`, eigenvalues below the rank
/// cutoff map to 0 instead of `f(λ)`.
pub fn matrix_fn(
    h: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
    support_only: bool,
) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    Ok(if support_only {
        eig.map_on_support(f)
    } else {
        eig.map(f)
    })
}

pub fn expm(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(herm_eig(h)?.map(f64::exp))
}

/// Matrix logarithm of a positive definite matrix.
pub fn logm(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_eig(h)?.log()
}

/// Logarithm on the support; the kernel maps to 0.
pub fn logm_support(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(herm_eig(h)?.map_on_support(f64::ln))
}

pub fn powm(h: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    herm_eig(h)?.pow(p)
}

/// Power on the support only: kernel eigenvalues map to 0 even for `p < 0`.
pub fn powm_support(h: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    Ok(herm_eig(h)?.map_on_support(|l| l.powf(p)))
}

pub fn sqrtm(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    powm(h, 0.5)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Index bookkeeping for a split of a tensor product into kept and traced
/// subsystems.
struct Split {
    kept_dim: usize,
    rest_dim: usize,
    /// `full[k * rest_dim + r]` is the composite index for kept index `k`
    /// and traced index `r`.
    full: Vec<usize>,
}

impl Split {
    fn new(dims: &[usize], keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::DimMismatch("no subsystem selected".into()));
        }
        let mut mask = vec![false; dims.len()];
        for &k in keep {
            if k >= dims.len() {
                return Err(Error::DimMismatch(format!(
                    "subsystem {k} out of range for {} parts",
                    dims.len()
                )));
            }
            if mask[k] {
                return Err(Error::DimMismatch(format!("subsystem {k} listed twice")));
            }
            mask[k] = true;
        }
        let total: usize = dims.iter().product();
        let kept_dim: usize = dims.iter().zip(&mask).filter(|(_, &m)| m).map(|(d, _)| d).product();
        let rest_dim = total / kept_dim;
        let mut full = vec![0; total];
        for idx in 0..total {
            let mut rem = idx;
            let (mut k, mut r) = (0, 0);
            let (mut kstride, mut rstride) = (1, 1);
            for (d, &m) in dims.iter().zip(&mask).rev() {
                let digit = rem % d;
                rem /= d;
                if m {
                    k += digit * kstride;
                    kstride *= d;
                } else {
                    r += digit * rstride;
                    rstride *= d;
                }
            }
            full[k * rest_dim + r] = idx;
        }
        Ok(Self {
            kept_dim,
            rest_dim,
            full,
        })
    }
}

fn check_dims(x: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if !x.is_square() || x.rows != total || dims.is_empty() {
        return Err(Error::DimMismatch(format!(
            "{}x{} operator on subsystems {dims:?}",
            x.rows, x.cols
        )));
    }
    Ok(())
}

/// Partial trace keeping the listed subsystems (in their global order).
pub fn ptrace(x: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(x, dims)?;
    let s = Split::new(dims, keep)?;
    Ok(ComplexMatrix::from_fn(s.kept_dim, s.kept_dim, |i, j| {
        (0..s.rest_dim)
            .map(|r| x[(s.full[i * s.rest_dim + r], s.full[j * s.rest_dim + r])])
            .sum()
    }))
}

/// Lifts `x`, acting on the listed subsystems, to the full space by
/// tensoring with identities elsewhere.
pub fn embed(x: &ComplexMatrix, dims: &[usize], on: &[usize]) -> Result<ComplexMatrix> {
    let s = Split::new(dims, on)?;
    if !x.is_square() || x.rows != s.kept_dim {
        return Err(Error::DimMismatch(format!(
            "{}x{} operator embedded on subsystems {on:?} of {dims:?}",
            x.rows, x.cols
        )));
    }
    let total = s.kept_dim * s.rest_dim;
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..s.kept_dim {
        for j in 0..s.kept_dim {
            let z = x[(i, j)];
            if z == ZERO {
                continue;
            }
            for r in 0..s.rest_dim {
                out[(s.full[i * s.rest_dim + r], s.full[j * s.rest_dim + r])] = z;
            }
        }
    }
    Ok(out)
}

/// Schatten norm index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    One,
    Two,
    Inf,
}

/// Singular values in descending order.
///
/// Hermitian inputs use `|λ|`; general inputs use the Hermitian dilation
/// `[[0, X], [X†, 0]]`, whose eigenvalues are `±σ_i`. This avoids the
/// square-root precision floor of `eig(X†X)`.
pub fn singular_values(x: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut sv = if x.is_square() && x.hermiticity_defect() <= 1e-14 * x.max_abs() {
        herm_eig(x)?.eigenvalues.iter().map(|l| l.abs()).collect::<Vec<_>>()
    } else {
        let (r, c) = (x.rows, x.cols);
        let n = r + c;
        let mut dil = ComplexMatrix::zeros(n, n);
        for i in 0..r {
            for j in 0..c {
                dil[(i, r + j)] = x[(i, j)];
                dil[(r + j, i)] = x[(i, j)].conj();
            }
        }
        let eig = herm_eig(&dil)?;
        eig.eigenvalues.iter().rev().take(r.min(c)).map(|l| l.max(0.0)).collect()
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

pub fn schatten_norm(x: &ComplexMatrix, p: Norm) -> Result<f64> {
    match p {
        Norm::Two => Ok(x.frobenius()),
        Norm::One => Ok(singular_values(x)?.iter().sum()),
        Norm::Inf => Ok(singular_values(x)?.first().copied().unwrap_or(0.0)),
    }
}
