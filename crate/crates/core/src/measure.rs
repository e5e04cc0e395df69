//! Measures, quadrature rules and orthonormal polynomial bases.

use num_complex::Complex;

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigen;
use crate::scalar::{cis_pi_ratio, cr, czero, Real};

/// Tolerance of the orthonormality check performed by [`make_basis`].
pub const TOL_ORTH: f64 = 1e-10;

/// Largest node count reached by [`adaptive`] with the default cap.
pub const MAX_NODES: usize = 8192;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    /// `dx / sqrt((x-a)(b-x))` on `[a, b]`.
    ChebyshevFirstKind,
    /// `dθ / 2π` on the unit circle.
    CircleLebesgue,
    /// Measure on a real interval given by its Jacobi-matrix coefficients.
    CustomRecurrence,
}

/// Declared asymptotic class of the orthonormal polynomials. Informational
/// only; it is never verified.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AsymptoticsClass {
    #[default]
    Regular,
    Ratio,
    Szego,
}

/// A finite positive measure with one of the supported supports.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec<T: Real> {
    kind: MeasureKind,
    interval: Option<(T, T)>,
    recurrence: Vec<(T, T)>,
    asymptotics_class: AsymptoticsClass,
}

impl<T: Real> MeasureSpec<T> {
    /// Chebyshev measure of the first kind on `[a, b]`.
    pub fn chebyshev(a: T, b: T) -> Result<Self> {
        check_interval(a, b)?;
        Ok(Self {
            kind: MeasureKind::ChebyshevFirstKind,
            interval: Some((a, b)),
            recurrence: Vec::new(),
            asymptotics_class: AsymptoticsClass::Szego,
        })
    }

    /// Normalized arc length on the unit circle.
    pub fn circle() -> Self {
        Self {
            kind: MeasureKind::CircleLebesgue,
            interval: None,
            recurrence: Vec::new(),
            asymptotics_class: AsymptoticsClass::Szego,
        }
    }

    /// Measure defined by monic recurrence coefficients `(alpha_k, beta_k)`:
    /// `π_{k+1}(x) = (x - alpha_k) π_k(x) - beta_k π_{k-1}(x)`, with `beta_0`
    /// the total mass.
    ///
    /// When `interval` is `None` it defaults to the asymptotic spectrum of
    /// the last pair, `[alpha - 2 sqrt(beta), alpha + 2 sqrt(beta)]`.
    pub fn recurrence(coeffs: Vec<(T, T)>, interval: Option<(T, T)>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InsufficientData(
                "recurrence needs at least one coefficient pair".into(),
            ));
        }
        for (k, &(alpha, beta)) in coeffs.iter().enumerate() {
            if !alpha.is_finite() || !beta.is_finite() || beta <= T::zero() {
                return Err(Error::InvalidInput(format!(
                    "recurrence coefficient beta_{k} must be finite and positive"
                )));
            }
        }
        let (a, b) = match interval {
            Some(ab) => ab,
            None => {
                let (alpha, beta) = coeffs[coeffs.len() - 1];
                let half = T::lit(2.0) * beta.sqrt();
                (alpha - half, alpha + half)
            }
        };
        check_interval(a, b)?;
        Ok(Self {
            kind: MeasureKind::CustomRecurrence,
            interval: Some((a, b)),
            recurrence: coeffs,
            asymptotics_class: AsymptoticsClass::Regular,
        })
    }

    pub fn with_class(mut self, class: AsymptoticsClass) -> Self {
        self.asymptotics_class = class;
        self
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn interval(&self) -> Option<(T, T)> {
        self.interval
    }

    pub fn recurrence_coeffs(&self) -> &[(T, T)] {
        &self.recurrence
    }

    pub fn asymptotics_class(&self) -> AsymptoticsClass {
        self.asymptotics_class
    }

    /// `μ(E)`.
    pub fn total_mass(&self) -> T {
        match self.kind {
            MeasureKind::ChebyshevFirstKind => T::PI(),
            MeasureKind::CircleLebesgue => T::one(),
            MeasureKind::CustomRecurrence => self.recurrence[0].1,
        }
    }

    /// Exterior conformal map of the support.
    pub fn conformal_map(&self) -> ConformalMap<T> {
        match self.interval {
            Some((a, b)) => ConformalMap::interval(a, b).expect("interval validated"),
            None => ConformalMap::unit_disk(),
        }
    }

    /// Jacobi coefficients `(alpha_k, beta_k)` in the internal coordinate.
    /// Custom recurrences are extended with their last pair.
    fn jacobi(&self, k: usize) -> (T, T) {
        match self.kind {
            MeasureKind::ChebyshevFirstKind => {
                let beta = match k {
                    0 => T::PI(),
                    1 => T::lit(0.5),
                    _ => T::lit(0.25),
                };
                (T::zero(), beta)
            }
            MeasureKind::CustomRecurrence => self.recurrence[k.min(self.recurrence.len() - 1)],
            MeasureKind::CircleLebesgue => unreachable!("circle has no Jacobi matrix"),
        }
    }

    /// Affine change of variable onto the internal coordinate (`[-1, 1]` for
    /// the Chebyshev kind, identity otherwise).
    fn to_internal(&self, z: Complex<T>) -> Complex<T> {
        match (self.kind, self.interval) {
            (MeasureKind::ChebyshevFirstKind, Some((a, b))) => (z * T::lit(2.0) - cr(a + b)) / (b - a),
            _ => z,
        }
    }

    fn from_internal(&self, t: T) -> T {
        match (self.kind, self.interval) {
            (MeasureKind::ChebyshevFirstKind, Some((a, b))) => (t * (b - a) + a + b) / T::lit(2.0),
            _ => t,
        }
    }

    /// Distance from `z` to the support.
    pub fn distance_to_support(&self, z: Complex<T>) -> T {
        match self.interval {
            Some((a, b)) => {
                let x = z.re.max(a).min(b);
                (z - cr(x)).norm()
            }
            None => (z.norm() - T::one()).abs(),
        }
    }
}

fn check_interval<T: Real>(a: T, b: T) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "interval must satisfy a < b, got [{a}, {b}]"
        )))
    }
}

/// Nodes on the support with positive weights summing to `μ(E)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule<T: Real> {
    pub nodes: Vec<Complex<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    /// Gauss–Chebyshev, trapezoid on the circle, or Golub–Welsch for custom
    /// recurrences, with `node_count` nodes.
    pub fn for_measure(measure: &MeasureSpec<T>, node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidInput("node count must be positive".into()));
        }
        let n = node_count as i64;
        match measure.kind {
            MeasureKind::ChebyshevFirstKind => {
                let w = T::PI() / T::from_usize_exact(node_count);
                let nodes = (1..=n)
                    .map(|k| cr(measure.from_internal(cis_pi_ratio::<T>(2 * k - 1, 2 * n).re)))
                    .collect();
                Ok(Self {
                    nodes,
                    weights: vec![w; node_count],
                })
            }
            MeasureKind::CircleLebesgue => {
                let w = T::one() / T::from_usize_exact(node_count);
                let nodes = (0..n).map(|j| cis_pi_ratio(2 * j, n)).collect();
                Ok(Self {
                    nodes,
                    weights: vec![w; node_count],
                })
            }
            MeasureKind::CustomRecurrence => {
                let diag: Vec<T> = (0..node_count).map(|k| measure.jacobi(k).0).collect();
                let off: Vec<T> = (1..node_count).map(|k| measure.jacobi(k).1.sqrt()).collect();
                let pairs = tridiagonal_eigen(&diag, &off)
                    .ok_or_else(|| Error::Numerical("Jacobi matrix eigenvalues did not converge".into()))?;
                let mass = measure.total_mass();
                Ok(Self {
                    nodes: pairs.iter().map(|&(x, _)| cr(x)).collect(),
                    weights: pairs.iter().map(|&(_, v)| mass * v).collect(),
                })
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ w_k f(x_k)`.
    pub fn integrate(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Complex<T> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(czero(), |acc, (&x, &w)| acc + f(x) * w)
    }

    /// `⟨g, h⟩ = Σ w_k g(x_k) conj(h(x_k))`.
    pub fn inner_product(
        &self,
        g: impl Fn(Complex<T>) -> Complex<T>,
        h: impl Fn(Complex<T>) -> Complex<T>,
    ) -> Complex<T> {
        self.integrate(|x| g(x) * h(x).conj())
    }
}

/// Default starting node count for degree `n_max + m` work.
pub fn default_node_count(n_max: usize, m: usize) -> usize {
    256usize.max(4 * (n_max + m + 2))
}

/// Relative change below which node doubling stops.
pub(crate) fn doubling_tol<T: Real>() -> T {
    T::epsilon() * T::lit(450.0)
}

/// Result of a node-doubling computation.
#[derive(Clone, Debug)]
pub(crate) struct Adaptive<T: Real> {
    pub values: Vec<Complex<T>>,
    /// Largest absolute change across the final doubling.
    pub delta: T,
    pub rule: QuadratureRule<T>,
}

/// Evaluates `compute` on rules with `start, 2·start, …` nodes until the
/// vector of results changes by less than [`doubling_tol`] relative to its
/// largest entry, or `cap` is exceeded.
pub(crate) fn adaptive<T: Real>(
    measure: &MeasureSpec<T>,
    start: usize,
    cap: usize,
    mut compute: impl FnMut(&QuadratureRule<T>) -> Result<Vec<Complex<T>>>,
) -> Result<Adaptive<T>> {
    let mut n = start.max(1);
    let mut rule = QuadratureRule::for_measure(measure, n)?;
    let mut prev = compute(&rule)?;
    let tol = doubling_tol::<T>();
    loop {
        if 2 * n > cap.max(start) {
            return Err(Error::Quadrature(format!(
                "values still changing at {n} nodes; is the function analytic near the support?"
            )));
        }
        n *= 2;
        let next_rule = QuadratureRule::for_measure(measure, n)?;
        let next = compute(&next_rule)?;
        let scale = next.iter().fold(T::zero(), |acc, v| acc.max(v.norm()));
        let delta = next
            .iter()
            .zip(&prev)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()));
        if !delta.is_finite() || next.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Quadrature("non-finite quadrature value".into()));
        }
        rule = next_rule;
        prev = next;
        if delta <= tol * scale {
            return Ok(Adaptive {
                values: prev,
                delta,
                rule,
            });
        }
    }
}

/// Orthonormal polynomials `p_0, …, p_{n_max}` of a measure.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoBasis<T: Real> {
    measure: MeasureSpec<T>,
    n_max: usize,
    kappa: Vec<T>,
    /// `alpha_k` of the internal-coordinate recurrence, `k < n_max`.
    alpha: Vec<T>,
    /// `sqrt(beta_k)`, `k ≤ n_max`.
    sqrt_beta: Vec<T>,
}

/// Builds the orthonormal basis up to degree `n_max` and checks
/// orthonormality by quadrature.
pub fn make_basis<T: Real>(measure: &MeasureSpec<T>, n_max: usize) -> Result<OrthoBasis<T>> {
    let basis = OrthoBasis::new(measure, n_max)?;
    let rule = QuadratureRule::for_measure(measure, default_node_count(n_max, 0))?;
    let defect = basis.orthonormality_defect(&rule);
    if !(defect < T::lit(TOL_ORTH)) {
        return Err(Error::Numerical(format!(
            "basis fails the orthonormality check (defect {defect})"
        )));
    }
    Ok(basis)
}

impl<T: Real> OrthoBasis<T> {
    /// Builds the basis without the quadrature check.
    pub fn new(measure: &MeasureSpec<T>, n_max: usize) -> Result<Self> {
        if measure.kind == MeasureKind::CircleLebesgue {
            return Ok(Self {
                measure: measure.clone(),
                n_max,
                kappa: vec![T::one(); n_max + 1],
                alpha: Vec::new(),
                sqrt_beta: Vec::new(),
            });
        }
        if measure.kind == MeasureKind::CustomRecurrence && measure.recurrence.len() < n_max + 1 {
            return Err(Error::InsufficientData(format!(
                "degree {n_max} needs {} recurrence pairs, got {}",
                n_max + 1,
                measure.recurrence.len()
            )));
        }
        let alpha: Vec<T> = (0..n_max).map(|k| measure.jacobi(k).0).collect();
        let sqrt_beta: Vec<T> = (0..=n_max).map(|k| measure.jacobi(k).1.sqrt()).collect();
        let scale = match (measure.kind, measure.interval) {
            (MeasureKind::ChebyshevFirstKind, Some((a, b))) => T::lit(2.0) / (b - a),
            _ => T::one(),
        };
        let mut kappa = Vec::with_capacity(n_max + 1);
        let mut k_int = T::one() / sqrt_beta[0];
        let mut s = T::one();
        kappa.push(k_int);
        for sb in sqrt_beta.iter().skip(1) {
            k_int = k_int / *sb;
            s = s * scale;
            kappa.push(k_int * s);
        }
        Ok(Self {
            measure: measure.clone(),
            n_max,
            kappa,
            alpha,
            sqrt_beta,
        })
    }

    pub fn measure(&self) -> &MeasureSpec<T> {
        &self.measure
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Leading coefficients `κ_0, …, κ_{n_max}`.
    pub fn kappa(&self) -> &[T] {
        &self.kappa
    }

    /// `p_n(z)`.
    pub fn eval_p(&self, n: usize, z: Complex<T>) -> Result<Complex<T>> {
        if n > self.n_max {
            return Err(Error::OutOfRange {
                index: n,
                max: self.n_max,
            });
        }
        Ok(self.eval_upto(n, z)[n])
    }

    /// `p_0(z), …, p_{n_max}(z)`.
    pub fn eval_all(&self, z: Complex<T>) -> Vec<Complex<T>> {
        self.eval_upto(self.n_max, z)
    }

    /// `p_0(z), …, p_n(z)` for `n ≤ n_max`.
    pub(crate) fn eval_upto(&self, n: usize, z: Complex<T>) -> Vec<Complex<T>> {
        debug_assert!(n <= self.n_max);
        let mut out = Vec::with_capacity(n + 1);
        if self.measure.kind == MeasureKind::CircleLebesgue {
            let mut p = cr(T::one());
            for _ in 0..=n {
                out.push(p);
                p = p * z;
            }
            return out;
        }
        let t = self.measure.to_internal(z);
        let mut prev = czero();
        let mut cur = cr(T::one() / self.sqrt_beta[0]);
        out.push(cur);
        for k in 0..n {
            let next = ((t - cr(self.alpha[k])) * cur - prev * self.sqrt_beta[k]) / self.sqrt_beta[k + 1];
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// `max_{i,j ≤ n_max} |⟨p_i, p_j⟩ - δ_ij|` under `rule`.
    pub fn orthonormality_defect(&self, rule: &QuadratureRule<T>) -> T {
        let n = self.n_max + 1;
        let mut gram = vec![czero::<T>(); n * n];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let p = self.eval_all(x);
            for i in 0..n {
                let pi = p[i] * w;
                for j in 0..n {
                    gram[i * n + j] = gram[i * n + j] + pi * p[j].conj();
                }
            }
        }
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { cr(T::one()) } else { czero() };
                worst = worst.max((gram[i * n + j] - target).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cheb() -> MeasureSpec<f64> {
        MeasureSpec::chebyshev(-1.0, 1.0).unwrap()
    }

    #[test]
    fn chebyshev_p0_is_inverse_sqrt_pi() {
        let b = make_basis(&cheb(), 2).unwrap();
        assert_relative_eq!(
            b.eval_p(0, c(0.3, 0.0)).unwrap().re,
            0.5641895835477563,
            epsilon = 1e-15
        );
    }

    #[test]
    fn circle_basis_is_monomials() {
        let b = make_basis(&MeasureSpec::<f64>::circle(), 5).unwrap();
        assert_eq!(b.kappa()[3], 1.0);
        assert_eq!(b.eval_p(4, c(2.0, 0.0)).unwrap(), c(16.0, 0.0));
    }

    #[test]
    fn chebyshev_p1_at_half() {
        let b = make_basis(&cheb(), 3).unwrap();
        let v = b.eval_p(1, c(0.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, (2.0 / std::f64::consts::PI).sqrt() * 0.5, epsilon = 1e-15);
        assert_relative_eq!(v.re, 0.398942, epsilon = 1e-6);
    }

    #[test]
    fn chebyshev_closed_form_off_interval() {
        let b = make_basis(&cheb(), 10).unwrap();
        let phi = 3.0 + 8f64.sqrt();
        let want = (2.0 / std::f64::consts::PI).sqrt() * (phi.powi(10) + phi.powi(-10)) / 2.0;
        let got = b.eval_p(10, c(3.0, 0.0)).unwrap().re;
        assert!(((got - want) / want).abs() < 1e-9);
    }

    #[test]
    fn orthonormal_to_degree_thirty() {
        for m in [cheb(), MeasureSpec::circle(), MeasureSpec::chebyshev(0.5, 4.0).unwrap()] {
            let b = make_basis(&m, 30).unwrap();
            for nodes in [default_node_count(30, 0), 4 * default_node_count(30, 0)] {
                let rule = QuadratureRule::for_measure(&m, nodes).unwrap();
                assert!(b.orthonormality_defect(&rule) < 1e-10);
            }
        }
    }

    #[test]
    fn weights_sum_to_mass() {
        for (m, mass) in [(cheb(), std::f64::consts::PI), (MeasureSpec::circle(), 1.0)] {
            let rule = QuadratureRule::for_measure(&m, 37).unwrap();
            let s: f64 = rule.weights.iter().sum();
            assert!((s - mass).abs() < 1e-12 * mass);
        }
    }

    #[test]
    fn inner_products() {
        let rule = QuadratureRule::for_measure(&cheb(), 256).unwrap();
        let one = rule.inner_product(|_| c(1.0, 0.0), |_| c(1.0, 0.0));
        assert!((one.re - std::f64::consts::PI).abs() < 1e-12);
        let circle = QuadratureRule::for_measure(&MeasureSpec::circle(), 64).unwrap();
        let zz = circle.inner_product(|z: Complex<f64>| z, |z: Complex<f64>| z);
        assert!((zz - c(1.0, 0.0)).norm() < 1e-15);
        let b = make_basis(&cheb(), 3).unwrap();
        let fine = QuadratureRule::for_measure(&cheb(), 1024).unwrap();
        let v = fine.inner_product(|x| b.eval_p(2, x).unwrap(), |x| b.eval_p(3, x).unwrap());
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn gauss_chebyshev_exact_to_degree_2n_minus_1() {
        let n = 8;
        let rule = QuadratureRule::for_measure(&cheb(), n).unwrap();
        // ∫ x^{2k} dμ = π (2k)! / (4^k k!^2)
        for k in 0..n {
            let got = rule.integrate(|x| x.powu(2 * k as u32)).re;
            let mut want = std::f64::consts::PI;
            for j in 0..k {
                want *= (2 * j + 1) as f64 / (2 * j + 2) as f64;
            }
            assert!((got - want).abs() < 1e-12 * want, "k={k}");
            let odd = rule.integrate(|x| x.powu(2 * k as u32 + 1)).re;
            assert!(odd.abs() < 1e-14);
        }
    }

    #[test]
    fn trapezoid_exact_for_laurent_polynomials() {
        let n = 16;
        let rule = QuadratureRule::for_measure(&MeasureSpec::<f64>::circle(), n).unwrap();
        for k in -(n as i32 - 1)..(n as i32) {
            let v = rule.integrate(|z| z.powi(k));
            let want = if k == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
            assert!((v - want).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn recurrence_matches_chebyshev() {
        let mut pairs = vec![(0.0, std::f64::consts::PI), (0.0, 0.5)];
        pairs.extend(std::iter::repeat_n((0.0, 0.25), 20));
        let m = MeasureSpec::recurrence(pairs, None).unwrap();
        assert_eq!(m.interval(), Some((-1.0, 1.0)));
        let custom = make_basis(&m, 20).unwrap();
        let reference = make_basis(&cheb(), 20).unwrap();
        let z = c(0.3, 0.7);
        for (a, b) in custom.eval_all(z).iter().zip(reference.eval_all(z)) {
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
        }
        let rule = QuadratureRule::for_measure(&m, 24).unwrap();
        assert!((rule.weights.iter().sum::<f64>() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn recurrence_errors() {
        assert!(matches!(
            MeasureSpec::recurrence(vec![(0.0, 1.0), (0.0, -0.5)], None),
            Err(Error::InvalidInput(_))
        ));
        let m = MeasureSpec::recurrence(vec![(0.0, 1.0), (0.0, 0.25)], None).unwrap();
        assert!(matches!(make_basis(&m, 5), Err(Error::InsufficientData(_))));
        let b = make_basis(&cheb(), 4).unwrap();
        assert!(matches!(b.eval_p(5, c(0.0, 0.0)), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn shifted_interval_kappa() {
        let m = MeasureSpec::chebyshev(0.0, 4.0).unwrap();
        let b = make_basis(&m, 3).unwrap();
        // T_3(t) = 4t^3 - 3t with t = (x - 2)/2
        let want = (2.0 / std::f64::consts::PI).sqrt() * 4.0 / 8.0;
        assert_relative_eq!(b.kappa()[3], want, epsilon = 1e-14);
    }
}
