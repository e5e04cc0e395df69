//! Padé-orthogonal approximants `[n/m]` of a function with respect to a
//! measure: the denominator `Q` (deg ≤ m) and numerator `P` (deg ≤ n) make
//! the defect `QF - P` orthogonal to `p_0, …, p_{n+m}`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::expr::{ComplexFunction, EvalError};
use crate::linalg::{CMatrix, Svd};
use crate::measure::OrthoBasis;
use crate::poly::{cluster_roots, Polynomial, RootCluster};
use crate::scalar::{cr, czero, Real};
use crate::series::{fourier_coeffs, MomentTable};

/// Relative rank tolerance on the singular values of the `Δ` submatrix.
pub const RANK_TOL: f64 = 1e-8;

/// Radius within which roots of `Q` count as one multiple pole.
pub const POLE_CLUSTER_RADIUS: f64 = 1e-7;

/// Block `M[j][i] = ⟨z^i F, p_{n+j}⟩`, `j = 1..m` (rows), `i = 0..m` (columns).
#[derive(Clone, Debug)]
pub struct MomentBlock<T: Real> {
    pub n: usize,
    pub m: usize,
    pub entries: CMatrix<T>,
    /// Absolute quadrature error estimate of the entries.
    pub noise: T,
    /// Largest `|⟨z^i F, p_k⟩|` over `i ≤ m`, `k ≤ n + m`; zero only for `F ≡ 0`.
    pub moment_scale: T,
}

impl<T: Real> MomentBlock<T> {
    /// Columns `0..m-1`, the matrix whose determinant is `Δ_{n,m}`.
    pub fn delta_matrix(&self) -> CMatrix<T> {
        let cols: Vec<usize> = (0..self.m).collect();
        self.entries.select_columns(&cols)
    }

    /// `max_j |Σ_i q_i M[j][i]|` for power-basis coefficients `q`.
    pub fn residual(&self, q: &Polynomial<T>) -> T {
        let coeffs = q.padded(self.m + 1);
        if coeffs.len() > self.m + 1 {
            return T::infinity();
        }
        (0..self.m).fold(T::zero(), |acc, j| {
            let s = (0..=self.m).fold(czero(), |s, i| s + self.entries[(j, i)] * coeffs[i]);
            acc.max(s.norm())
        })
    }
}

pub fn moment_block<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    basis: &OrthoBasis<T>,
    n: usize,
    m: usize,
) -> Result<MomentBlock<T>> {
    if n + m > basis.n_max() {
        return Err(Error::OutOfRange {
            index: n + m,
            max: basis.n_max(),
        });
    }
    let table = MomentTable::compute(f, basis, m, n + m)?;
    Ok(block_from_table(&table, n, m))
}

fn block_from_table<T: Real>(table: &MomentTable<T>, n: usize, m: usize) -> MomentBlock<T> {
    let entries = CMatrix::from_fn(m, m + 1, |j, i| table.get(i, n + j + 1));
    let moment_scale = (0..=m).fold(T::zero(), |acc, i| {
        table.row(i)[..=n + m].iter().fold(acc, |a, v| a.max(v.norm()))
    });
    MomentBlock {
        n,
        m,
        entries,
        noise: table.noise,
        moment_scale,
    }
}

/// `Δ_{n,m}`: determinant of columns `0..m-1`; `1` for `m = 0`.
pub fn delta<T: Real>(block: &MomentBlock<T>) -> Complex<T> {
    if block.m == 0 {
        return cr(T::one());
    }
    block.delta_matrix().det()
}

/// Evidence that `[n/m]` is not unique: several monic denominators, none a
/// multiple of another, satisfy the defining conditions.
#[derive(Clone, Debug)]
pub struct NonUniqueCertificate<T: Real> {
    /// Rank deficiency of the `Δ` submatrix.
    pub nullspace_dim: usize,
    /// Distinct monic solutions; the first is the minimal-degree representative.
    pub sample_denominators: Vec<Polynomial<T>>,
    pub delta_value: Complex<T>,
}

/// Outcome of the denominator solve.
#[derive(Clone, Debug)]
pub struct DenominatorSolution<T: Real> {
    /// Monic denominator used for the approximant. When the solution is not
    /// unique this is the minimal-degree representative.
    pub q: Polynomial<T>,
    pub unique: bool,
    /// Rank deficiency of the `Δ` submatrix.
    pub nullspace_dim: usize,
    pub certificate: Option<NonUniqueCertificate<T>>,
}

/// Solves `Σ_i q_i M[j][i] = 0`, `j = 1..m`, for a monic `Q`.
///
/// Singular values of the `Δ` submatrix at or below
/// `max(tol_rank · σ_max, 10 · noise)` are treated as zero.
pub fn denominator<T: Real>(block: &MomentBlock<T>, tol_rank: T) -> Result<DenominatorSolution<T>> {
    let m = block.m;
    if block.moment_scale == T::zero() {
        return Err(Error::Degenerate("all moments vanish (F ≡ 0 on the support)".into()));
    }
    if m == 0 {
        return Ok(DenominatorSolution {
            q: Polynomial::one(),
            unique: true,
            nullspace_dim: 0,
            certificate: None,
        });
    }
    let floor = T::lit(10.0) * block.noise;
    let a = block.delta_matrix();
    let svd_a = Svd::new(&a);
    let rank_a = numerical_rank(&svd_a, tol_rank, floor);
    let rhs: Vec<Complex<T>> = (0..m).map(|j| -block.entries[(j, m)]).collect();
    if rank_a == m {
        let mut q = svd_a.solve(&rhs, m);
        q.push(cr(T::one()));
        return Ok(DenominatorSolution {
            q: Polynomial::new(q),
            unique: true,
            nullspace_dim: 0,
            certificate: None,
        });
    }
    let nullspace_dim = m - rank_a;
    // homogeneous system over all m + 1 coefficients
    let svd_full = Svd::new(&block.entries);
    let rank_full = numerical_rank(&svd_full, tol_rank, floor);
    let null = svd_full.nullspace(rank_full);
    let cut = T::lit(RANK_TOL).sqrt();
    let q_min = minimal_degree_representative(&null, cut)
        .ok_or_else(|| Error::Numerical("no nonzero denominator in the nullspace".into()))?;
    let mut samples = vec![q_min.clone()];
    let push_distinct = |p: Polynomial<T>, samples: &mut Vec<Polynomial<T>>| {
        if samples.iter().all(|s| s.coeff_distance(&p) > cut) {
            samples.push(p);
        }
    };
    // minimal-norm monic degree-m solution, when the monic reduction is consistent
    let x = svd_a.solve(&rhs, rank_a);
    let mut monic = x.clone();
    monic.push(cr(T::one()));
    let monic = Polynomial::new(monic);
    let tol = cut * (block.entries.max_abs() * (T::one() + crate::linalg::vec_norm(&x)));
    if block.residual(&monic) <= tol.max(floor) {
        push_distinct(monic, &mut samples);
    }
    for v in &null {
        if let Some(p) = monic_of(v, cut) {
            push_distinct(p, &mut samples);
        }
    }
    let certificate = (samples.len() >= 2).then(|| NonUniqueCertificate {
        nullspace_dim,
        sample_denominators: samples,
        delta_value: a.det(),
    });
    Ok(DenominatorSolution {
        q: q_min,
        unique: false,
        nullspace_dim,
        certificate,
    })
}

fn numerical_rank<T: Real>(svd: &Svd<T>, tol_rank: T, floor: T) -> usize {
    let cut = (tol_rank * svd.sigma_max()).max(floor);
    svd.sigma.iter().filter(|&&s| s > cut).count()
}

/// Highest coefficient above `cut` relative to the vector's max entry.
fn effective_degree<T: Real>(v: &[Complex<T>], cut: T) -> Option<usize> {
    let top = v.iter().fold(T::zero(), |acc, c| acc.max(c.norm()));
    if top == T::zero() {
        return None;
    }
    v.iter().rposition(|c| c.norm() > cut * top)
}

fn monic_of<T: Real>(v: &[Complex<T>], cut: T) -> Option<Polynomial<T>> {
    let d = effective_degree(v, cut)?;
    let lead = v[d];
    Some(Polynomial::new(v[..=d].iter().map(|&c| c / lead).collect()))
}

/// Monic element of `span(null)` of least degree.
fn minimal_degree_representative<T: Real>(null: &[Vec<Complex<T>>], cut: T) -> Option<Polynomial<T>> {
    if null.is_empty() {
        return None;
    }
    let len = null[0].len();
    let dim = null.len();
    for k in 0..len {
        // combinations y with (N y)_i = 0 for i > k
        let ys: Vec<Vec<Complex<T>>> = if k + 1 == len {
            (0..dim).map(|c| unit(dim, c)).collect()
        } else {
            let upper = CMatrix::from_fn(len - k - 1, dim, |r, c| null[c][k + 1 + r]);
            let svd = Svd::new(&upper);
            let rank = svd.rank(cut);
            svd.nullspace(rank)
        };
        for coef in ys {
            let v: Vec<Complex<T>> = (0..len)
                .map(|i| (0..dim).fold(czero(), |acc, c| acc + null[c][i] * coef[c]))
                .collect();
            if let Some(p) = monic_of(&v, cut) {
                if p.coeffs().len() <= k + 1 {
                    return Some(p);
                }
            }
        }
    }
    None
}

fn unit<T: Real>(dim: usize, c: usize) -> Vec<Complex<T>> {
    (0..dim).map(|i| if i == c { cr(T::one()) } else { czero() }).collect()
}

/// `Q·F` as a function.
struct Product<'a, T: Real, F: ?Sized> {
    q: &'a Polynomial<T>,
    f: &'a F,
}

impl<T: Real, F: ComplexFunction<T> + ?Sized> ComplexFunction<T> for Product<'_, T, F> {
    fn eval(&self, z: Complex<T>) -> std::result::Result<Complex<T>, EvalError> {
        Ok(self.q.eval(z) * self.f.eval(z)?)
    }
}

/// `⟨QF, p_k⟩`, `k = 0..n`, by quadrature.
pub fn numerator<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    q: &Polynomial<T>,
    basis: &OrthoBasis<T>,
    n: usize,
) -> Result<Vec<Complex<T>>> {
    Ok(fourier_coeffs(&Product { q, f }, basis, n)?.coeffs)
}

/// `[n/m]` with its denominator, numerator and diagnostics.
#[derive(Clone, Debug)]
pub struct RationalApproximant<T: Real> {
    pub n: usize,
    pub m: usize,
    /// Monic denominator, coefficients low → high.
    pub q: Polynomial<T>,
    /// `⟨QF, p_k⟩`, `k = 0..n`.
    pub p_coeffs: Vec<Complex<T>>,
    pub unique: bool,
    pub nullspace_dim: usize,
    pub certificate: Option<NonUniqueCertificate<T>>,
    pub delta: Complex<T>,
    /// `max_{n < j ≤ n+m} |⟨QF - P, p_j⟩|`; the conditions for `j ≤ n` hold by construction.
    pub defect: T,
    /// Quadrature noise of the moments entering the solve.
    pub noise: T,
    /// First-order bound on the coefficient error of `Q` caused by `noise`;
    /// infinite when the block is singular.
    pub q_noise: T,
    pub poles: Vec<Complex<T>>,
    basis: OrthoBasis<T>,
}

impl<T: Real> RationalApproximant<T> {
    /// `Σ P_k p_k(z) / Q(z)`.
    pub fn eval_at(&self, z: Complex<T>) -> Complex<T> {
        let p = self.basis.eval_all(z);
        let num = self
            .p_coeffs
            .iter()
            .zip(&p)
            .fold(czero::<T>(), |acc, (c, v)| acc + c * v);
        num / self.q.eval(z)
    }

    pub fn basis(&self) -> &OrthoBasis<T> {
        &self.basis
    }

    /// Poles grouped into clusters with multiplicity.
    pub fn pole_clusters(&self) -> Vec<RootCluster<T>> {
        cluster_roots(&self.q.roots(), T::lit(POLE_CLUSTER_RADIUS))
    }
}

/// Computes `[n/m]`. Requires `n + m ≤ basis.n_max()`.
pub fn approximant<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    basis: &OrthoBasis<T>,
    n: usize,
    m: usize,
) -> Result<RationalApproximant<T>> {
    let block = moment_block(f, basis, n, m)?;
    let sol = denominator(&block, T::lit(RANK_TOL))?;
    assemble(f, basis, &block, sol)
}

/// Builds the approximant for a caller-chosen denominator, e.g. one of the
/// samples of a [`NonUniqueCertificate`].
pub fn approximant_with_denominator<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    basis: &OrthoBasis<T>,
    n: usize,
    m: usize,
    q: Polynomial<T>,
) -> Result<RationalApproximant<T>> {
    if q.degree() > m {
        return Err(Error::InvalidInput(format!(
            "denominator degree {} exceeds m = {m}",
            q.degree()
        )));
    }
    let block = moment_block(f, basis, n, m)?;
    let sol = DenominatorSolution {
        q,
        unique: false,
        nullspace_dim: 0,
        certificate: None,
    };
    let mut a = assemble(f, basis, &block, sol)?;
    let full = denominator(&block, T::lit(RANK_TOL))?;
    a.unique = full.unique;
    a.nullspace_dim = full.nullspace_dim;
    Ok(a)
}

fn assemble<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    basis: &OrthoBasis<T>,
    block: &MomentBlock<T>,
    sol: DenominatorSolution<T>,
) -> Result<RationalApproximant<T>> {
    let p_coeffs = numerator(f, &sol.q, basis, block.n)?;
    let mut a = RationalApproximant {
        n: block.n,
        m: block.m,
        defect: block.residual(&sol.q),
        delta: delta(block),
        noise: block.noise,
        q_noise: denominator_noise(block, &sol.q),
        q: sol.q,
        p_coeffs,
        unique: sol.unique,
        nullspace_dim: sol.nullspace_dim,
        certificate: sol.certificate,
        poles: Vec::new(),
        basis: basis.clone(),
    };
    a.poles = poles_of(&a);
    Ok(a)
}

/// `noise·‖Q‖ / σ_min(Δ)`: coefficient perturbation of the monic solve
/// induced by an entrywise block perturbation of size `noise`.
fn denominator_noise<T: Real>(block: &MomentBlock<T>, q: &Polynomial<T>) -> T {
    if block.m == 0 {
        return T::zero();
    }
    let svd = Svd::new(&block.delta_matrix());
    let smin = svd.sigma.iter().fold(T::infinity(), |a, &s| a.min(s));
    if smin == T::zero() {
        return T::infinity();
    }
    let qn = q.coeffs().iter().fold(T::zero(), |a, c| a + c.norm_sqr()).sqrt();
    block.noise * qn * T::from_usize_exact(block.m + 1).sqrt() / smin
}

/// Roots of `Q` with multiplicity; members of a cluster are replaced by the
/// cluster mean.
pub fn poles_of<T: Real>(approx: &RationalApproximant<T>) -> Vec<Complex<T>> {
    approx
        .pole_clusters()
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.value, c.multiplicity))
        .collect()
}

/// Determinant-formula denominator.
#[derive(Clone, Debug)]
pub struct QTilde<T: Real> {
    /// Unnormalized determinant polynomial; its `z^m` coefficient is `Δ`.
    pub raw: Polynomial<T>,
    /// Monic normalization, absent when the oracle is degenerate.
    pub monic: Option<Polynomial<T>>,
    /// Leading coefficient negligible: the determinant has degree < m or
    /// vanishes identically.
    pub degenerate: bool,
}

/// Expands the `(m+1)×(m+1)` determinant whose first `m` rows are the moment
/// block and whose last row is `(1, z, …, z^m)` along that last row.
pub fn qtilde_oracle<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    basis: &OrthoBasis<T>,
    n: usize,
    m: usize,
) -> Result<QTilde<T>> {
    if m == 0 {
        return Err(Error::InvalidInput("qtilde_oracle needs m ≥ 1".into()));
    }
    let block = moment_block(f, basis, n, m)?;
    Ok(qtilde_from_block(&block))
}

pub fn qtilde_from_block<T: Real>(block: &MomentBlock<T>) -> QTilde<T> {
    let m = block.m;
    let coeffs: Vec<Complex<T>> = (0..=m)
        .map(|i| {
            let cols: Vec<usize> = (0..=m).filter(|&c| c != i).collect();
            let minor = block.entries.select_columns(&cols).det();
            if (m + i).is_multiple_of(2) {
                minor
            } else {
                -minor
            }
        })
        .collect();
    let scale = block.entries.frobenius().powi(m as i32);
    let lead = coeffs[m];
    let degenerate = !(lead.norm() > T::lit(RANK_TOL) * scale);
    let monic = (!degenerate).then(|| Polynomial::new(coeffs.iter().map(|&c| c / lead).collect()));
    QTilde {
        raw: Polynomial::new(coeffs),
        monic,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::measure::{make_basis, MeasureSpec};
    use crate::series::partial_sum;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cheb(n: usize) -> OrthoBasis<f64> {
        make_basis(&MeasureSpec::chebyshev(-1.0, 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn simple_pole_is_recovered_exactly() {
        let b = cheb(12);
        let f = parse("1/(z-2)").unwrap();
        for n in [0, 3, 8] {
            let a = approximant(&f, &b, n, 1).unwrap();
            assert!(a.unique);
            assert!(a.q.coeff_distance(&Polynomial::new(vec![c(-2.0, 0.0), c(1.0, 0.0)])) < 1e-10);
            assert!((a.p_coeffs[0] - c(std::f64::consts::PI.sqrt(), 0.0)).norm() < 1e-12);
            for v in &a.p_coeffs[1..] {
                assert!(v.norm() < 1e-12);
            }
            assert_eq!(a.poles.len(), 1);
            assert!((a.poles[0] - c(2.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn m1_root_is_moment_ratio() {
        let b = cheb(12);
        let f = parse("1/(z-2) + 1/(z-5)").unwrap();
        let block = moment_block(&f, &b, 6, 1).unwrap();
        let sol = denominator(&block, RANK_TOL).unwrap();
        let ratio = block.entries[(0, 1)] / block.entries[(0, 0)];
        assert!((-sol.q.coeffs()[0] - ratio).norm() < 1e-12);
        assert_eq!(delta(&block), block.entries[(0, 0)]);
    }

    #[test]
    fn polynomial_input_has_vanishing_block() {
        let b = cheb(10);
        let p3 = |z: Complex<f64>| b.eval_p(3, z).unwrap();
        let block = moment_block(&p3, &b, 5, 1).unwrap();
        assert!(delta(&block).norm() < 1e-12);
        let sol = denominator(&block, RANK_TOL).unwrap();
        assert!(!sol.unique);
    }

    #[test]
    fn zero_function_is_degenerate() {
        let b = cheb(6);
        let zero = |_: Complex<f64>| c(0.0, 0.0);
        let block = moment_block(&zero, &b, 2, 2).unwrap();
        assert!(matches!(denominator(&block, RANK_TOL), Err(Error::Degenerate(_))));
    }

    #[test]
    fn m0_is_the_partial_sum() {
        let b = cheb(12);
        let f = parse("exp(z)/(z-3)").unwrap();
        let a = approximant(&f, &b, 7, 0).unwrap();
        let s = fourier_coeffs(&f, &b, 7).unwrap();
        assert_eq!(a.p_coeffs, s.coeffs);
        assert_eq!(a.q, Polynomial::one());
        for z in [c(0.2, 0.0), c(-0.7, 0.3)] {
            assert_eq!(a.eval_at(z), partial_sum(&s, &b, z, 7).unwrap());
        }
    }

    #[test]
    fn determinant_oracle_matches_solve() {
        let b = cheb(16);
        let f = parse("1/(z-2) + 1/(z+2.5)").unwrap();
        let a = approximant(&f, &b, 12, 2).unwrap();
        let qt = qtilde_oracle(&f, &b, 12, 2).unwrap();
        let monic = qt.monic.unwrap();
        assert!(monic.coeff_distance(&a.q) < 1e-8);
        let r = monic.roots();
        for (x, y) in r.iter().zip(&a.poles) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn double_pole_is_clustered() {
        let b = cheb(10);
        let f = parse("1/(z-3)^2").unwrap();
        let exact = Polynomial::from_roots(&[c(3.0, 0.0), c(3.0, 0.0)]);
        let a = approximant_with_denominator(&f, &b, 4, 2, exact).unwrap();
        assert_eq!(a.poles, vec![c(3.0, 0.0); 2]);
        assert_eq!(a.pole_clusters()[0].multiplicity, 2);
        // computed double roots split by about sqrt(coefficient error)
        let a = approximant(&f, &b, 4, 2).unwrap();
        let mean = (a.poles[0] + a.poles[1]) / 2.0;
        assert!((mean - c(3.0, 0.0)).norm() < 1e-9, "{:?}", a.poles);
        assert!((a.poles[0] - a.poles[1]).norm() < 1e-4);
    }

    const EXAMPLE_F: &str = "37/(x-3) + 37/sqrt(pi) \
        + 6*(-271*sqrt(pi) + 192*sqrt(2*pi))*sqrt(2/pi)*x \
        + (-sqrt(2) + 315*sqrt(pi) - 222*sqrt(2*pi))*sqrt(2/pi)*(2*x^2 - 1) \
        + (3513*sqrt(pi) - 2484*sqrt(2*pi))*sqrt(2/pi)*(4*x^3 - 3*x) \
        + (sqrt(2) + 10674*sqrt(pi) - 7548*sqrt(2*pi))*sqrt(2/pi)*(8*x^4 - 8*x^2 + 1)";

    #[test]
    fn two_denominators_for_the_same_row() {
        let b = cheb(6);
        let f = parse(EXAMPLE_F).unwrap();
        let block = moment_block(&f, &b, 1, 2).unwrap();
        let d = delta(&block);
        assert!(d.norm() < 1e-8 * block.entries.frobenius(), "{d}");
        let sol = denominator(&block, RANK_TOL).unwrap();
        assert!(!sol.unique);
        assert!(sol.nullspace_dim >= 1);
        let cert = sol.certificate.expect("certificate");
        let x = Polynomial::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let sq = Polynomial::from_roots(&[c(3.0, 0.0), c(3.0, 0.0)]);
        assert!(sol.q.coeff_distance(&x) < 1e-8, "{:?}", sol.q);
        for q in [&x, &sq] {
            assert!(block.residual(q) < 1e-8);
        }
        for s in &cert.sample_denominators {
            assert!(block.residual(s) < 1e-8);
        }
        let qt = qtilde_from_block(&block);
        assert!(qt.degenerate);

        let sp = std::f64::consts::PI.sqrt();
        let s2p = (2.0 * std::f64::consts::PI).sqrt();
        let r1 = |x: f64| (4756.0 * sp - 3363.0 * s2p - 36.0 * s2p * x + 144.0 * x) / (4.0 * sp * x);
        let r2 = |x: f64| {
            (1404.0 - 28536.0 * sp + 19827.0 * s2p - 864.0 * x + 90364.0 * sp * x - 63681.0 * s2p * x)
                / (4.0 * sp * (x - 3.0).powi(2))
        };
        let a1 = approximant_with_denominator(&f, &b, 1, 2, x).unwrap();
        let a2 = approximant_with_denominator(&f, &b, 1, 2, sq).unwrap();
        for k in 0..10 {
            let t = -0.95 + 0.2 * k as f64 + 0.013;
            let v1 = a1.eval_at(c(t, 0.0));
            let v2 = a2.eval_at(c(t, 0.0));
            assert!((v1 / r1(t) - 1.0).norm() < 1e-6, "{t}: {v1} vs {}", r1(t));
            assert!((v2 / r2(t) - 1.0).norm() < 1e-6, "{t}: {v2} vs {}", r2(t));
        }
    }
}
