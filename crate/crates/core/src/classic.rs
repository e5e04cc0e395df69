//! Classical Padé denominators of the regular part `f̂` of `f = F∘Ψ` and the
//! correspondence `Φ(λ_j) ↔ τ_j` between their poles and those of the
//! Padé-orthogonal approximants.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::expr::ComplexFunction;
use crate::linalg::CMatrix;
use crate::measure::OrthoBasis;
use crate::padeortho::{approximant, denominator, MomentBlock, RANK_TOL};
use crate::poly::{cluster_roots, match_points, sort_points, Polynomial};
use crate::scalar::{czero, Real};
use crate::series::{laurent_coeffs, CoeffSeries};

#[derive(Clone, Debug)]
pub struct ClassicalDenominator<T: Real> {
    pub n: usize,
    pub m: usize,
    /// Monic in `w`, coefficients low → high.
    pub q: Polynomial<T>,
    pub unique: bool,
    pub nullspace_dim: usize,
}

/// Monic `Q` with `Σ_{i=0}^{m} q_i f̂_{n+j-i} = 0` for `j = 1..m`
/// (coefficients with negative index read as zero).
pub fn classical_denominator<T: Real>(fhat: &CoeffSeries<T>, n: usize, m: usize) -> Result<ClassicalDenominator<T>> {
    if fhat.len() <= n + m {
        return Err(Error::InsufficientData(format!(
            "[{n}/{m}] needs coefficients up to index {}, got {}",
            n + m,
            fhat.len().saturating_sub(1)
        )));
    }
    let coeff = |k: isize| {
        if k < 0 {
            czero()
        } else {
            fhat.coeffs[k as usize]
        }
    };
    let entries = CMatrix::from_fn(m, m + 1, |j, i| coeff((n + j + 1) as isize - i as isize));
    let moment_scale = fhat.coeffs[..=n + m].iter().fold(T::zero(), |acc, c| acc.max(c.norm()));
    let block = MomentBlock {
        n,
        m,
        entries,
        noise: fhat.noise_floor,
        moment_scale,
    };
    let sol = denominator(&block, T::lit(RANK_TOL))?;
    Ok(ClassicalDenominator {
        n,
        m,
        q: sol.q,
        unique: sol.unique,
        nullspace_dim: sol.nullspace_dim,
    })
}

/// Poles of both approximants matched through `Φ`.
#[derive(Clone, Debug)]
pub struct PoleCorrespondence<T: Real> {
    pub n: usize,
    pub m: usize,
    /// Poles of the Padé-orthogonal approximant, ordered by modulus then argument.
    pub lambda: Vec<Complex<T>>,
    /// Poles of the classical approximant of `f̂`, in the same order.
    pub tau: Vec<Complex<T>>,
    /// Matched pairs `(index into lambda, index into tau)`.
    pub pairs: Vec<(usize, usize)>,
    /// `max |Φ(λ_i) - τ_j|` over matched pairs.
    pub matched_residual: T,
    /// The two pole lists have different lengths (degenerate degree).
    pub length_mismatch: bool,
    map: ConformalMap<T>,
}

impl<T: Real> PoleCorrespondence<T> {
    /// CSV with columns
    /// `n,j,re_lambda,im_lambda,re_tau,im_tau,abs_phi_lambda_minus_tau`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,j,re_lambda,im_lambda,re_tau,im_tau,abs_phi_lambda_minus_tau\n");
        self.write_rows(&mut out);
        out
    }

    /// Appends the CSV rows (no header).
    pub fn write_rows(&self, out: &mut String) {
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let (l, t) = (self.lambda[i], self.tau[j]);
            let d = (self.map.phi(l) - t).norm();
            let _ = writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.n,
                k + 1,
                l.re.to_f64_lossy(),
                l.im.to_f64_lossy(),
                t.re.to_f64_lossy(),
                t.im.to_f64_lossy(),
                d.to_f64_lossy()
            );
        }
    }
}

/// Runs both pipelines at `(n, m)` and matches `{Φ(λ_j)}` with `{τ_j}` by
/// minimal total distance. `r` is the Laurent sampling radius.
pub fn compare_theorem6<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    basis: &OrthoBasis<T>,
    map: &ConformalMap<T>,
    n: usize,
    m: usize,
    r: T,
) -> Result<PoleCorrespondence<T>> {
    if m == 0 {
        return Err(Error::InvalidInput("pole correspondence needs m ≥ 1".into()));
    }
    let ortho = approximant(f, basis, n, m)?;
    let fhat = laurent_coeffs(f, map, r, n + m)?;
    let classical = classical_denominator(&fhat, n, m)?;
    if !ortho.unique || !classical.unique {
        let describe = |q: &Polynomial<T>| {
            q.coeffs()
                .iter()
                .map(|c| format!("{}", Complex::new(c.re.to_f64_lossy(), c.im.to_f64_lossy())))
                .collect::<Vec<_>>()
                .join(", ")
        };
        return Err(Error::ComparisonUnavailable(format!(
            "non-unique denominator at [{n}/{m}]: orthogonal unique={} (nullspace {}, Q = [{}]); classical unique={} (nullspace {}, Q = [{}])",
            ortho.unique,
            ortho.nullspace_dim,
            describe(&ortho.q),
            classical.unique,
            classical.nullspace_dim,
            describe(&classical.q)
        )));
    }
    let lambda = ortho.poles.clone();
    let mut tau: Vec<Complex<T>> = cluster_roots(&classical.q.roots(), T::lit(crate::padeortho::POLE_CLUSTER_RADIUS))
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.value, c.multiplicity))
        .collect();
    sort_points(&mut tau);
    let phi: Vec<Complex<T>> = lambda.iter().map(|&l| map.phi(l)).collect();
    let pairs = match_points(&phi, &tau);
    let matched_residual = pairs
        .iter()
        .fold(T::zero(), |acc, &(i, j)| acc.max((phi[i] - tau[j]).norm()));
    Ok(PoleCorrespondence {
        n,
        m,
        length_mismatch: lambda.len() != tau.len(),
        lambda,
        tau,
        pairs,
        matched_residual,
        map: *map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::measure::{make_basis, MeasureSpec};
    use crate::series::SeriesKind;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn geometric_series_gives_its_pole() {
        // 1/(w-4) = -Σ 4^{-k-1} w^k
        let coeffs: Vec<_> = (0..30).map(|k| c(-(4f64.powi(-(k + 1))), 0.0)).collect();
        let s = CoeffSeries::new(SeriesKind::LaurentRegular, coeffs, 1e-18);
        for n in [0, 5, 12] {
            let d = classical_denominator(&s, n, 1).unwrap();
            assert!(d.unique);
            assert!(d.q.coeff_distance(&Polynomial::new(vec![c(-4.0, 0.0), c(1.0, 0.0)])) < 1e-10);
        }
        assert!(classical_denominator(&s, 28, 2).is_err());
    }

    #[test]
    fn polynomial_series_is_not_unique() {
        let mut coeffs = vec![c(1.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)];
        coeffs.resize(12, c(0.0, 0.0));
        let s = CoeffSeries::new(SeriesKind::LaurentRegular, coeffs, 1e-16);
        let d = classical_denominator(&s, 4, 2).unwrap();
        assert!(!d.unique);
    }

    #[test]
    fn single_pole_correspondence() {
        let b = make_basis(&MeasureSpec::chebyshev(-1.0, 1.0).unwrap(), 16).unwrap();
        let map = b.measure().conformal_map();
        let f = parse("1/(z-2)").unwrap();
        let pc = compare_theorem6(&f, &b, &map, 10, 1, 1.9).unwrap();
        assert!(pc.matched_residual < 1e-8, "{}", pc.matched_residual);
        assert!((pc.tau[0] - c(2.0 + 3f64.sqrt(), 0.0)).norm() < 1e-8);
        let csv = pc.to_csv();
        assert!(csv.starts_with("n,j,re_lambda"));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn disk_pipelines_coincide() {
        let b = make_basis(&MeasureSpec::circle(), 12).unwrap();
        let map = ConformalMap::unit_disk();
        let f = parse("1/(z-2) + 1/(z+2.5)").unwrap();
        let pc = compare_theorem6(&f, &b, &map, 8, 2, 1.5).unwrap();
        assert!(pc.matched_residual < 1e-12, "{}", pc.matched_residual);
    }

    #[test]
    fn two_pole_correspondence_double_double() {
        // double precision resolves the weaker pole only to about 5e-3 at n = 18
        use crate::DoubleDouble as D;
        let b = make_basis(&MeasureSpec::chebyshev(D::from(-1.0), D::from(1.0)).unwrap(), 24).unwrap();
        let map = b.measure().conformal_map();
        let f = parse("1/(z-2) + 1/(z+2.5)").unwrap();
        let pc = compare_theorem6(&f, &b, &map, 18, 2, D::from(2.0)).unwrap();
        assert_eq!(pc.pairs.len(), 2);
        assert!(!pc.length_mismatch);
        assert!(pc.matched_residual.hi() < 1e-5, "{:?}", pc.matched_residual);
    }
}
