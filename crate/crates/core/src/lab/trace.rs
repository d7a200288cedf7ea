//! Matrix trace inequalities used as lemmas: Lieb and Carlen-Lieb
//! concavity, Golden-Thompson, Audenaert / Powers-Størmer, and the Haar
//! twirl identity.

use rand::Rng;

use super::{psd_sqrt, trace_norm, ChainResult, CheckResult};
use crate::channels::{twirl_exact, twirl_mc, TwirlOver};
use crate::linalg::{expm, herm_eig, schatten_norm, ComplexMatrix, Norm};
use crate::{tol, Error, Result};

fn require_psd(x: &ComplexMatrix) -> Result<()> {
    if !x.is_hermitian() {
        return Err(Error::NotHermitian {
            deviation: x.hermiticity_defect(),
        });
    }
    let min = herm_eig(x)?.min_eigenvalue();
    if min < -tol::PSD * x.max_abs().max(1.0) {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}

fn require_unit_interval(what: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} = {v} is not in [0, 1]")))
    }
}

fn mix(lambda: f64, x1: &ComplexMatrix, x2: &ComplexMatrix) -> ComplexMatrix {
    (&x1.scale(lambda) + &x2.scale(1.0 - lambda)).hermitize()
}

fn concavity(name: &str, f: impl Fn(&ComplexMatrix) -> Result<f64>, x1: &ComplexMatrix, x2: &ComplexMatrix, lambda: f64, tolerance: f64) -> Result<CheckResult> {
    require_unit_interval("λ", lambda)?;
    let lhs = f(&mix(lambda, x1, x2))?;
    let rhs = lambda * f(x1)? + (1.0 - lambda) * f(x2)?;
    Ok(CheckResult::at_least(name, lhs, rhs, tolerance).with("lambda", lambda))
}

/// Concavity of `X ↦ Tr exp(H + log X)` between `X₁` and `X₂`.
pub fn check_lieb_concavity(
    h: &ComplexMatrix,
    x1: &ComplexMatrix,
    x2: &ComplexMatrix,
    lambda: f64,
    tolerance: f64,
) -> Result<CheckResult> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian {
            deviation: h.hermiticity_defect(),
        });
    }
    let f = |x: &ComplexMatrix| -> Result<f64> {
        let log = herm_eig(x)?.log()?;
        Ok(expm(&(h + &log).hermitize())?.trace().re)
    };
    concavity("lieb_concavity", f, x1, x2, lambda, tolerance)
}

/// Concavity of `X ↦ Tr (M X^{1/α} M†)^α` for `α ≥ 1`.
pub fn check_cl_concavity(
    m: &ComplexMatrix,
    x1: &ComplexMatrix,
    x2: &ComplexMatrix,
    lambda: f64,
    alpha: f64,
    tolerance: f64,
) -> Result<CheckResult> {
    if !(alpha >= 1.0) {
        return Err(Error::BadAlpha { alpha });
    }
    let f = |x: &ComplexMatrix| -> Result<f64> {
        let root = herm_eig(x)?.pow(1.0 / alpha)?;
        Ok(herm_eig(&root.conjugate_by(m).hermitize())?.pow(alpha)?.trace().re)
    };
    Ok(concavity("cl_concavity", f, x1, x2, lambda, tolerance)?.with("alpha", alpha))
}

/// `Tr e^{A+B} ≤ Tr e^A e^B`.
pub fn check_golden_thompson(a: &ComplexMatrix, b: &ComplexMatrix, tolerance: f64) -> Result<CheckResult> {
    let sum = expm(&(a + b).hermitize())?.trace().re;
    let product = expm(a)?.trace_product(&expm(b)?).re;
    Ok(CheckResult::at_least("golden_thompson", product, sum, tolerance))
}

/// For PSD `M`, `N`: the chain
/// `‖√M−√N‖₂‖√M+√N‖₂ ≥ ‖M−N‖₁ ≥ ‖√M−√N‖₂²` (the second link is
/// Powers-Størmer), with Audenaert's
/// `Tr M^t N^{1−t} ≥ ½ Tr(M + N − |M − N|)` as a side condition, and, when
/// both traces are at most one, `−2 ln Tr√M√N ≥ ‖√M−√N‖₂²`.
pub fn check_audenaert_ps(m: &ComplexMatrix, n: &ComplexMatrix, t: f64, tolerance: f64) -> Result<ChainResult> {
    require_psd(m)?;
    require_psd(n)?;
    require_unit_interval("t", t)?;
    let (sm, sn) = (psd_sqrt(m)?, psd_sqrt(n)?);
    let minus = (&sm - &sn).frobenius();
    let plus = (&sm + &sn).frobenius();
    let dist = trace_norm(&(m - n))?;
    let (tm, tn) = (m.trace().re, n.trace().re);
    let power = herm_eig(m)?.pow(t)?.trace_product(&herm_eig(n)?.pow(1.0 - t)?).re;
    let audenaert = power - 0.5 * (tm + tn - dist);
    let mut out = ChainResult::new(
        "audenaert_ps",
        vec![
            ("sqrt_product_bound".into(), minus * plus),
            ("trace_distance".into(), dist),
            ("sqrt_hs_sq".into(), minus * minus),
        ],
        tolerance,
    )
    .condition("audenaert", audenaert)
    .with("t", t);
    if tm <= 1.0 + tol::TRACE && tn <= 1.0 + tol::TRACE {
        let overlap = sm.trace_product(&sn).re;
        let bound = if overlap > 0.0 { -2.0 * overlap.ln() } else { f64::INFINITY };
        out = out.condition("overlap_bound", bound - minus * minus);
    }
    Ok(out)
}

/// `‖twirl_mc(X, n) − Tr_B X ⊗ 1/d_B‖_max < 5 ‖X‖_∞ / √n`.
pub fn check_twirl_identity<R: Rng + ?Sized>(
    x: &ComplexMatrix,
    dims: (usize, usize),
    samples: usize,
    rng: &mut R,
    tolerance: f64,
) -> Result<CheckResult> {
    let exact = twirl_exact(x, dims, TwirlOver::Second)?;
    let mc = twirl_mc(x, dims, TwirlOver::Second, samples, rng)?;
    let error = mc.max_abs_diff(&exact);
    let bound = 5.0 * schatten_norm(x, Norm::Inf)? / (samples as f64).sqrt();
    Ok(CheckResult::at_least("twirl_identity", bound, error, tolerance).with("samples", samples as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ginibre, random_density, regularize};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hermitian(d: usize, r: &mut ChaCha8Rng) -> ComplexMatrix {
        ginibre(d, d, r).hermitize()
    }

    fn pd(d: usize, r: &mut ChaCha8Rng) -> ComplexMatrix {
        regularize(&random_density(d, d, r).unwrap(), 1e-3).unwrap().into_matrix()
    }

    #[test]
    fn lieb_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(1);
        let (x1, x2) = (pd(4, &mut r), pd(4, &mut r));
        let h = hermitian(4, &mut r);
        assert!(check_lieb_concavity(&h, &x1, &x1, 0.3, tol::INEQ).unwrap().slack.abs() < 1e-10);
        let zero = ComplexMatrix::zeros(4, 4);
        assert!(check_lieb_concavity(&zero, &x1, &x2, 0.3, tol::INEQ).unwrap().slack.abs() < 1e-10);
        for _ in 0..50 {
            let (h, x1, x2) = (hermitian(4, &mut r), pd(4, &mut r), pd(4, &mut r));
            assert!(check_lieb_concavity(&h, &x1, &x2, 0.5, tol::INEQ).unwrap().pass);
        }
    }

    #[test]
    fn cl_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(2);
        let m = ginibre(4, 4, &mut r);
        let (x1, x2) = (pd(4, &mut r), pd(4, &mut r));
        assert!(check_cl_concavity(&m, &x1, &x2, 0.5, 1.0, tol::INEQ).unwrap().slack.abs() < 1e-10);
        assert!(check_cl_concavity(&m, &x1, &x1, 0.5, 2.0, tol::INEQ).unwrap().slack.abs() < 1e-10);
        for alpha in [1.5, 2.0, 4.0] {
            for _ in 0..20 {
                let (m, x1, x2) = (ginibre(4, 4, &mut r), pd(4, &mut r), pd(4, &mut r));
                assert!(check_cl_concavity(&m, &x1, &x2, 0.5, alpha, tol::INEQ).unwrap().pass);
            }
        }
        assert!(matches!(
            check_cl_concavity(&m, &x1, &x2, 0.5, 0.5, tol::INEQ),
            Err(Error::BadAlpha { .. })
        ));
    }

    #[test]
    fn golden_thompson_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(3);
        let a = ComplexMatrix::from_real_diag(&[0.1, -0.4, 1.0]);
        let b = ComplexMatrix::from_real_diag(&[0.3, 0.2, -2.0]);
        assert!(check_golden_thompson(&a, &b, tol::INEQ).unwrap().slack.abs() < 1e-12);
        let h = hermitian(6, &mut r);
        let zero = ComplexMatrix::zeros(6, 6);
        assert!(check_golden_thompson(&h, &zero, tol::INEQ).unwrap().slack.abs() < 1e-10);
        for _ in 0..50 {
            let c = check_golden_thompson(&hermitian(6, &mut r), &hermitian(6, &mut r), tol::INEQ).unwrap();
            assert!(c.pass);
        }
    }

    #[test]
    fn audenaert_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(4);
        let m = pd(3, &mut r);
        let ch = check_audenaert_ps(&m, &m, 0.5, tol::INEQ).unwrap();
        assert!(ch.pass && ch.links.iter().all(|(_, v)| v.abs() < 1e-10));

        // commuting pair, scalar oracle
        let (p, q) = ([0.5, 0.3, 0.2], [0.1, 0.6, 0.3]);
        let ch = check_audenaert_ps(&ComplexMatrix::from_real_diag(&p), &ComplexMatrix::from_real_diag(&q), 0.3, tol::INEQ).unwrap();
        let dist: f64 = p.iter().zip(&q).map(|(a, b): (&f64, &f64)| (a - b).abs()).sum();
        let hs: f64 = p.iter().zip(&q).map(|(a, b): (&f64, &f64)| (a.sqrt() - b.sqrt()).powi(2)).sum();
        assert!((ch.link("trace_distance").unwrap() - dist).abs() < 1e-12);
        assert!((ch.link("sqrt_hs_sq").unwrap() - hs).abs() < 1e-12);
        assert!(ch.pass && ch.conditions.len() == 2);

        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for _ in 0..20 {
                let (a, b) = (ginibre(4, 2, &mut r), ginibre(4, 4, &mut r));
                let ch = check_audenaert_ps(&(&a * &a.dagger()).hermitize(), &(&b * &b.dagger()).hermitize(), t, tol::INEQ).unwrap();
                assert!(ch.pass, "{ch:?}");
            }
        }
        let neg = ComplexMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(check_audenaert_ps(&neg, &neg, 0.5, tol::INEQ), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn twirl_identity_fixtures() {
        let mut r = ChaCha8Rng::seed_from_u64(5);
        let id = ComplexMatrix::identity(6);
        let c = check_twirl_identity(&id, (2, 3), 3, &mut r, tol::INEQ).unwrap();
        assert!(c.quantities["rhs"] < 1e-14);
        let x = hermitian(6, &mut r);
        assert!(check_twirl_identity(&x, (2, 3), 10_000, &mut r, tol::INEQ).unwrap().pass);
        assert!(matches!(
            check_twirl_identity(&x, (3, 3), 10, &mut r, tol::INEQ),
            Err(Error::DimMismatch(_))
        ));
    }
}
