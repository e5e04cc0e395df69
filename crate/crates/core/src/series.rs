//! Expansion coefficients: Fourier coefficients in an orthonormal basis,
//! Laurent coefficients of `F∘Ψ`, second-kind functions and `ρ_0` estimates.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::expr::ComplexFunction;
use crate::fit::{line_fit, lstsq};
use crate::measure::{adaptive, default_node_count, doubling_tol, OrthoBasis, MAX_NODES};
use crate::scalar::{cis_pi_ratio, cr, czero, CompSum, Real};

/// Factor between the noise floor and the smallest reliable coefficient.
pub const RELIABLE_FACTOR: f64 = 10.0;

/// Node cap for second-kind quadrature close to the support.
pub const SECOND_KIND_MAX_NODES: usize = 65536;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    FourierOrtho,
    LaurentRegular,
}

/// Coefficients `c_0, …, c_N` with an absolute noise estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSeries<T: Real> {
    pub kind: SeriesKind,
    pub coeffs: Vec<Complex<T>>,
    /// Largest index whose coefficient exceeds the reliability threshold.
    pub reliable_upto: usize,
    pub noise_floor: T,
}

impl<T: Real> CoeffSeries<T> {
    pub fn new(kind: SeriesKind, coeffs: Vec<Complex<T>>, noise_floor: T) -> Self {
        let threshold = noise_floor * T::lit(RELIABLE_FACTOR);
        let reliable_upto = coeffs.iter().rposition(|c| c.norm() > threshold).unwrap_or(0);
        Self {
            kind,
            coeffs,
            reliable_upto,
            noise_floor,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether `c_n` is above the noise threshold and within the reliable range.
    pub fn is_reliable(&self, n: usize) -> bool {
        n <= self.reliable_upto
            && n < self.coeffs.len()
            && self.coeffs[n].norm() > self.noise_floor * T::lit(RELIABLE_FACTOR)
    }

    /// Indices `n` for which `c_n` is reliable and at least `rel_floor`
    /// times the largest coefficient.
    pub fn usable_indices(&self, rel_floor: T) -> Vec<usize> {
        let top = self.coeffs.iter().fold(T::zero(), |acc, c| acc.max(c.norm()));
        (0..self.coeffs.len())
            .filter(|&n| self.is_reliable(n) && self.coeffs[n].norm() > rel_floor * top)
            .collect()
    }

    /// CSV with columns `n,re,im,abs,reliable`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re,im,abs,reliable\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(
                out,
                "{n},{:.16e},{:.16e},{:.16e},{}",
                c.re.to_f64_lossy(),
                c.im.to_f64_lossy(),
                c.norm().to_f64_lossy(),
                u8::from(self.is_reliable(n))
            );
        }
        out
    }
}

/// Table `G[i][k] = ⟨z^i F, p_k⟩` for `i ≤ max_power`, `k ≤ k_max`.
#[derive(Clone, Debug)]
pub struct MomentTable<T: Real> {
    rows: Vec<Vec<Complex<T>>>,
    /// Absolute error estimate shared by all entries.
    pub noise: T,
    pub node_count: usize,
}

impl<T: Real> MomentTable<T> {
    pub fn compute<F: ComplexFunction<T> + ?Sized>(
        f: &F,
        basis: &OrthoBasis<T>,
        max_power: usize,
        k_max: usize,
    ) -> Result<Self> {
        if k_max > basis.n_max() {
            return Err(Error::OutOfRange {
                index: k_max,
                max: basis.n_max(),
            });
        }
        let width = k_max + 1;
        let measure = basis.measure();
        let ad = adaptive(measure, default_node_count(k_max, max_power), MAX_NODES, |rule| {
            let mut acc = vec![CompSum::<T>::new(); (max_power + 1) * width];
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let p = basis.eval_upto(k_max, x);
                let mut zf = f.eval(x)? * w;
                for i in 0..=max_power {
                    for k in 0..width {
                        acc[i * width + k].add(zf * p[k].conj());
                    }
                    zf = zf * x;
                }
            }
            Ok(acc.iter().map(CompSum::value).collect())
        })?;
        // rounding level of the final sums
        let mut mass = T::zero();
        for (&x, &w) in ad.rule.nodes.iter().zip(&ad.rule.weights) {
            let p = basis.eval_upto(k_max, x);
            let pmax = p.iter().fold(T::zero(), |acc, v| acc.max(v.norm()));
            let scale = x.norm().max(T::one()).powi(max_power as i32);
            mass = mass + w * f.eval(x)?.norm() * pmax * scale;
        }
        let rounding = T::lit(8.0) * T::epsilon() * mass;
        let rows = ad.values.chunks(width).map(|c| c.to_vec()).collect();
        Ok(Self {
            rows,
            noise: ad.delta.max(rounding),
            node_count: ad.rule.node_count(),
        })
    }

    /// `⟨z^i F, p_k⟩`.
    pub fn get(&self, i: usize, k: usize) -> Complex<T> {
        self.rows[i][k]
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.rows[i]
    }

    pub fn max_power(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn k_max(&self) -> usize {
        self.rows[0].len() - 1
    }
}

/// Fourier coefficients `F_n = ⟨F, p_n⟩`, `n ≤ n_max`, by node doubling.
pub fn fourier_coeffs<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    basis: &OrthoBasis<T>,
    n_max: usize,
) -> Result<CoeffSeries<T>> {
    let table = MomentTable::compute(f, basis, 0, n_max)?;
    Ok(CoeffSeries::new(
        SeriesKind::FourierOrtho,
        table.row(0).to_vec(),
        table.noise,
    ))
}

/// `Σ_{n ≤ upto} c_n p_n(z)`.
pub fn partial_sum<T: Real>(
    series: &CoeffSeries<T>,
    basis: &OrthoBasis<T>,
    z: Complex<T>,
    upto: usize,
) -> Result<Complex<T>> {
    if upto >= series.len() || upto > basis.n_max() {
        return Err(Error::OutOfRange {
            index: upto,
            max: (series.len().saturating_sub(1)).min(basis.n_max()),
        });
    }
    let p = basis.eval_upto(upto, z);
    Ok(series.coeffs[..=upto]
        .iter()
        .zip(&p)
        .fold(czero(), |acc, (c, pv)| acc + c * pv))
}

/// Estimated holomorphy index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rho0<T> {
    Finite(T),
    /// Entire function, polynomial, or super-geometric decay.
    Infinite,
}

impl<T: Real> Rho0<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Rho0::Finite(r) => Some(r),
            Rho0::Infinite => None,
        }
    }
}

/// Minimum series length accepted by [`rho0_estimate`].
pub const MIN_RHO0_POINTS: usize = 8;

/// Estimates `ρ_0 = 1 / limsup |c_n|^{1/n}`.
///
/// Fits `log|c_n| ≈ A - n log ρ + γ log(n+1)` over the upper half of the
/// reliable window; the `log(n+1)` column absorbs algebraic prefactors such
/// as those of branch points.
pub fn rho0_estimate<T: Real>(series: &CoeffSeries<T>) -> Result<Rho0<T>> {
    if series.len() < MIN_RHO0_POINTS {
        return Err(Error::InsufficientData(format!(
            "rho0 estimate needs at least {MIN_RHO0_POINTS} coefficients, got {}",
            series.len()
        )));
    }
    let idx = series.usable_indices(T::zero());
    if idx.len() < MIN_RHO0_POINTS {
        // finitely many coefficients above the noise: polynomial-like
        return Ok(Rho0::Infinite);
    }
    let logs: Vec<f64> = idx
        .iter()
        .map(|&n| series.coeffs[n].norm().to_f64_lossy().ln())
        .collect();
    let xs: Vec<f64> = idx.iter().map(|&n| n as f64).collect();
    let half = idx.len() / 2;
    let head = line_fit(&xs[..half.max(2)], &logs[..half.max(2)]);
    let tail = line_fit(&xs[half..], &logs[half..]);
    if let (Some(h), Some(t)) = (head, tail) {
        let (rh, rt) = ((-h.slope).exp(), (-t.slope).exp());
        if rt > 1.5 * rh {
            return Ok(Rho0::Infinite);
        }
    }
    let hi = *idx.last().unwrap();
    let window: Vec<usize> = (0..idx.len()).filter(|&j| 2 * idx[j] >= hi).collect();
    let slope = if window.len() >= 6 {
        let ones = vec![1.0; window.len()];
        let n: Vec<f64> = window.iter().map(|&j| xs[j]).collect();
        let logn: Vec<f64> = n.iter().map(|v| (v + 1.0).ln()).collect();
        let y: Vec<f64> = window.iter().map(|&j| logs[j]).collect();
        lstsq(&[ones, n, logn], &y).map(|c| c[1])
    } else {
        None
    };
    let slope = match slope {
        Some(s) => s,
        None => {
            line_fit(&xs, &logs)
                .ok_or_else(|| Error::Numerical("rho0 fit failed".into()))?
                .slope
        }
    };
    let rho = (-slope).exp();
    if !rho.is_finite() || rho > 1e6 {
        return Ok(Rho0::Infinite);
    }
    Ok(Rho0::Finite(T::lit(rho)))
}

/// `s_n(z) = ∫ conj(p_n(ζ)) / (z - ζ) dμ(ζ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondKindValue<T: Real> {
    pub n: usize,
    pub z: Complex<T>,
    pub value: Complex<T>,
}

/// Second-kind function by quadrature.
///
/// Evaluated as `(1/p_n(z)) ∫ |p_n(ζ)|² / (z - ζ) dμ(ζ)`, which equals the
/// definition because `(p_n(z) - p_n(ζ)) / (z - ζ)` has degree `n - 1` and is
/// orthogonal to `p_n`; the rewritten integrand does not cancel for large `n`.
pub fn second_kind<T: Real>(basis: &OrthoBasis<T>, n: usize, z: Complex<T>) -> Result<SecondKindValue<T>> {
    if n > basis.n_max() {
        return Err(Error::OutOfRange {
            index: n,
            max: basis.n_max(),
        });
    }
    let measure = basis.measure();
    let dist = measure.distance_to_support(z);
    if !(dist > T::lit(1e-6)) {
        return Err(Error::InvalidInput(format!("z = {z} is within 1e-6 of the support")));
    }
    let pz = basis.eval_upto(n, z)[n];
    let by_identity = pz != czero();
    let from_dist = (64.0 / dist.to_f64_lossy()).ceil().min(SECOND_KIND_MAX_NODES as f64) as usize;
    let start = default_node_count(n, 0).max(from_dist.next_power_of_two());
    let ad = adaptive(measure, start, SECOND_KIND_MAX_NODES, |rule| {
        let mut acc = CompSum::new();
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let p = basis.eval_upto(n, x)[n];
            let num = if by_identity { cr(p.norm_sqr()) } else { p.conj() };
            acc.add(num * w / (z - x));
        }
        Ok(vec![acc.value()])
    })?;
    let value = if by_identity { ad.values[0] / pz } else { ad.values[0] };
    Ok(SecondKindValue { n, z, value })
}

/// `|p_n(z) s_n(z) - Φ'(z)/Φ(z)|`.
pub fn second_kind_defect<T: Real>(basis: &OrthoBasis<T>, map: &ConformalMap<T>, n: usize, z: Complex<T>) -> Result<T> {
    let s = second_kind(basis, n, z)?;
    let pz = basis.eval_p(n, z)?;
    Ok((pz * s.value - map.dlog_phi(z)).norm())
}

/// Default Laurent radius `sqrt(ρ̂_0)` clamped to `[1.05, 0.95 ρ̂_0]`; `2`
/// when the function is entire.
pub fn laurent_radius<T: Real>(rho0: Rho0<T>) -> T {
    match rho0 {
        Rho0::Infinite => T::lit(2.0),
        Rho0::Finite(r) => r.sqrt().max(T::lit(1.05)).min(r * T::lit(0.95)),
    }
}

/// Laurent coefficients `f_k`, `0 ≤ k ≤ k_max`, of `f = F∘Ψ` on `|w| = r`
/// by discrete Fourier transform, doubling the sample count until the
/// retained coefficients settle.
pub fn laurent_coeffs<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    map: &ConformalMap<T>,
    r: T,
    k_max: usize,
) -> Result<CoeffSeries<T>> {
    if !(r > T::one()) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("Laurent radius must exceed 1, got {r}")));
    }
    let mut n = (8 * k_max.max(1)).max(64).next_power_of_two();
    let tol = doubling_tol::<T>();
    let mut prev: Option<Vec<Complex<T>>> = None;
    loop {
        let (coeffs, fmax) = laurent_dft(f, map, r, k_max, n)?;
        if let Some(p) = &prev {
            let scale = coeffs.iter().fold(T::zero(), |acc, c| acc.max(c.norm()));
            let delta = coeffs
                .iter()
                .zip(p)
                .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()));
            if delta <= tol * scale {
                let noise = delta.max(T::lit(8.0) * T::epsilon() * fmax);
                return Ok(CoeffSeries::new(SeriesKind::LaurentRegular, coeffs, noise));
            }
        }
        if n >= SECOND_KIND_MAX_NODES {
            return Err(Error::Quadrature(format!(
                "Laurent coefficients still changing at {n} samples; is r below rho0?"
            )));
        }
        prev = Some(coeffs);
        n *= 2;
    }
}

fn laurent_dft<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    map: &ConformalMap<T>,
    r: T,
    k_max: usize,
    n: usize,
) -> Result<(Vec<Complex<T>>, T)> {
    let ni = n as i64;
    // roots[m] = exp(-2πi m / n)
    let roots: Vec<Complex<T>> = (0..ni).map(|m| cis_pi_ratio(-2 * m, ni)).collect();
    let mut acc = vec![CompSum::<T>::new(); k_max + 1];
    let mut fmax = T::zero();
    for j in 0..n {
        let w = roots[(n - j) % n] * r;
        let v = f.eval(map.psi(w)?)?;
        fmax = fmax.max(v.norm());
        for (k, a) in acc.iter_mut().enumerate() {
            a.add(v * roots[(j * k) % n]);
        }
    }
    let inv_n = T::one() / T::from_usize_exact(n);
    let mut rk = T::one();
    let mut out = Vec::with_capacity(k_max + 1);
    for a in &acc {
        out.push(a.value() * inv_n / rk);
        rk = rk * r;
    }
    Ok((out, fmax))
}
