//! Inverse-direction diagnostics: coefficient-ratio estimators of the
//! boundary singularity, pole tracking along a row, and the Montessus rate
//! harness.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::accel::{select_limit, AccelMethod, LimitEstimate};
use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::expr::ComplexFunction;
use crate::fit::{line_fit, LineFit};
use crate::measure::OrthoBasis;
use crate::padeortho::approximant;
use crate::poly::{match_points, sort_points, Polynomial};
use crate::scalar::{ratio_window_floor, Real};
use crate::series::{CoeffSeries, MomentTable};

/// Minimum number of usable coefficients for a ratio estimate.
pub const MIN_RATIO_POINTS: usize = 8;
/// Relative agreement of three consecutive estimates that counts as converged.
pub const LIMIT_TOL: f64 = 1e-4;
/// Relative width of the band around `ρ_{m-1}` treated as its boundary.
pub const BOUNDARY_BAND: f64 = 0.03;
/// Largest step-contraction rate accepted as geometric convergence.
pub const CONTRACTION_THRESHOLD: f64 = 0.97;
/// Minimum number of points for a rate fit.
pub const MIN_FIT_POINTS: usize = 6;
/// Errors below this multiple of the approximant's noise are excluded from fits.
pub const FLOOR_FACTOR: f64 = 100.0;
/// Rows whose denominator noise bound exceeds this are skipped by [`pole_track`].
pub const Q_NOISE_MAX: f64 = 1e-4;

/// Longest run of consecutive usable indices (earliest on ties).
fn ratio_window<T: Real>(series: &CoeffSeries<T>) -> Vec<usize> {
    let idx = series.usable_indices(ratio_window_floor());
    let mut best: &[usize] = &[];
    let mut start = 0;
    for k in 1..=idx.len() {
        if k == idx.len() || idx[k] != idx[k - 1] + 1 {
            if k - start > best.len() {
                best = &idx[start..k];
            }
            start = k;
        }
    }
    best.to_vec()
}

fn estimate<T: Real>(ns: &[usize], seq: &[Complex<T>]) -> Result<LimitEstimate<T>> {
    select_limit(ns, seq, T::lit(LIMIT_TOL)).ok_or_else(|| Error::Numerical("no finite limit estimate".into()))
}

fn diverging<T: Real>(seq: &[Complex<T>], est: &LimitEstimate<T>) -> bool {
    !est.converged && seq.len() >= 4 && seq[seq.len() - 4..].windows(2).all(|w| w[1].norm() > w[0].norm())
}

/// Ratio estimate of the singularity closest to `E`.
#[derive(Clone, Debug)]
pub struct FabryReport<T: Real> {
    /// Indices `n` of the ratios `τ_n = c_n / c_{n+1}`.
    pub ns: Vec<usize>,
    pub tau_seq: Vec<Complex<T>>,
    pub tau_limit: Complex<T>,
    pub converged: bool,
    /// Not converged and the ratio moduli keep growing.
    pub diverging: bool,
    pub method: AccelMethod,
    /// Relative spread of the final three accelerated values.
    pub spread: T,
    /// `Ψ(τ_limit)`, absent when `|τ_limit| ≤ 1`.
    pub singularity: Option<Complex<T>>,
    pub rho0: T,
}

impl<T: Real> FabryReport<T> {
    /// CSV with columns `n,re_tau,im_tau,abs_tau`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re_tau,im_tau,abs_tau\n");
        for (n, t) in self.ns.iter().zip(&self.tau_seq) {
            let _ = writeln!(
                out,
                "{n},{:.16e},{:.16e},{:.16e}",
                t.re.to_f64_lossy(),
                t.im.to_f64_lossy(),
                t.norm().to_f64_lossy()
            );
        }
        out
    }

    /// `τ_n` for the given `n`, if inside the window.
    pub fn tau_at(&self, n: usize) -> Option<Complex<T>> {
        self.ns.iter().position(|&k| k == n).map(|i| self.tau_seq[i])
    }
}

/// Ratios `c_n / c_{n+1}` over the reliable window, their accelerated limit
/// `τ`, the singularity `Ψ(τ)` and `ρ_0 = |τ|`.
pub fn fabry_ratio<T: Real>(series: &CoeffSeries<T>, map: &ConformalMap<T>) -> Result<FabryReport<T>> {
    let window = ratio_window(series);
    if window.len() < MIN_RATIO_POINTS {
        return Err(Error::InsufficientData(format!(
            "ratio estimate needs {MIN_RATIO_POINTS} consecutive usable coefficients, found {}",
            window.len()
        )));
    }
    let ns: Vec<usize> = window[..window.len() - 1].to_vec();
    let tau_seq: Vec<Complex<T>> = ns.iter().map(|&n| series.coeffs[n] / series.coeffs[n + 1]).collect();
    let est = estimate(&ns, &tau_seq)?;
    let singularity = if est.value.norm() > T::one() {
        map.psi(est.value).ok()
    } else {
        None
    };
    Ok(FabryReport {
        diverging: diverging(&tau_seq, &est),
        ns,
        tau_seq,
        tau_limit: est.value,
        converged: est.converged,
        method: est.method,
        spread: est.spread,
        singularity,
        rho0: est.value.norm(),
    })
}

/// Ratio estimate `λ_n = ⟨zF, p_n⟩ / F_n` of the singularity itself.
#[derive(Clone, Debug)]
pub struct LambdaReport<T: Real> {
    pub ns: Vec<usize>,
    pub lambda_seq: Vec<Complex<T>>,
    pub lambda_limit: Complex<T>,
    pub converged: bool,
    pub diverging: bool,
    pub method: AccelMethod,
    pub spread: T,
    /// `|Φ(λ_limit)|`.
    pub rho0: T,
    /// `|Φ(λ_limit) - τ_limit|`, filled by [`LambdaReport::cross_check`].
    pub cross_check: Option<T>,
    phi_lambda: Complex<T>,
}

impl<T: Real> LambdaReport<T> {
    /// `Φ(λ_limit)`.
    pub fn phi_lambda(&self) -> Complex<T> {
        self.phi_lambda
    }

    /// Records and returns `|Φ(λ_limit) - τ_limit|`.
    pub fn cross_check(&mut self, fabry: &FabryReport<T>) -> T {
        let d = (self.phi_lambda - fabry.tau_limit).norm();
        self.cross_check = Some(d);
        d
    }

    /// CSV with columns `n,re_lambda,im_lambda`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re_lambda,im_lambda\n");
        for (n, l) in self.ns.iter().zip(&self.lambda_seq) {
            let _ = writeln!(out, "{n},{:.16e},{:.16e}", l.re.to_f64_lossy(), l.im.to_f64_lossy());
        }
        out
    }
}

pub fn lambda_ratio<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    basis: &OrthoBasis<T>,
    map: &ConformalMap<T>,
    n_range: std::ops::RangeInclusive<usize>,
) -> Result<LambdaReport<T>> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo > hi {
        return Err(Error::InvalidInput("empty n range".into()));
    }
    let table = MomentTable::compute(f, basis, 1, hi)?;
    let series = CoeffSeries::new(
        crate::series::SeriesKind::FourierOrtho,
        table.row(0).to_vec(),
        table.noise,
    );
    let ns: Vec<usize> = ratio_window(&series)
        .into_iter()
        .filter(|n| (lo..=hi).contains(n))
        .collect();
    if ns.len() < MIN_RATIO_POINTS {
        return Err(Error::InsufficientData(format!(
            "ratio estimate needs {MIN_RATIO_POINTS} consecutive usable coefficients, found {}",
            ns.len()
        )));
    }
    let lambda_seq: Vec<Complex<T>> = ns.iter().map(|&n| table.get(1, n) / table.get(0, n)).collect();
    let est = estimate(&ns, &lambda_seq)?;
    let phi_lambda = map.phi(est.value);
    Ok(LambdaReport {
        diverging: diverging(&lambda_seq, &est),
        ns,
        lambda_seq,
        lambda_limit: est.value,
        converged: est.converged,
        method: est.method,
        spread: est.spread,
        rho0: map.rho_of(est.value),
        cross_check: None,
        phi_lambda,
    })
}

/// Heuristic label of a tracked pole limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleClass {
    /// Converges geometrically strictly inside `D_{ρ_{m-1}}`.
    PoleLike,
    /// Converges onto the boundary level `ρ_{m-1}` (pole or other singularity).
    OtherSingularity,
    Unresolved,
}

impl std::fmt::Display for PoleClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PoleClass::PoleLike => "pole-like",
            PoleClass::OtherSingularity => "other-singularity",
            PoleClass::Unresolved => "unresolved",
        })
    }
}

/// Note attached to every classification: it is a finite-`n` heuristic.
pub const CLASSIFICATION_NOTE: &str =
    "classification is a heuristic: 3% boundary band around rho_m_minus_1, contraction threshold 0.97";

#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    /// Pole positions aligned with [`PoleTrack::ns`].
    pub points: Vec<Complex<T>>,
    pub limit: Complex<T>,
    pub converged: bool,
    /// Geometric rate of the step sizes `|λ_{n+1} - λ_n|`; `None` when the
    /// steps sit at the rounding floor from the start.
    pub contraction: Option<f64>,
    /// `|Φ(limit)|`.
    pub rho: T,
    pub class: PoleClass,
}

#[derive(Clone, Debug)]
pub struct PoleTrack<T: Real> {
    pub m: usize,
    /// Row indices used, ascending.
    pub ns: Vec<usize>,
    /// Row indices skipped, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub trajectories: Vec<Trajectory<T>>,
    pub rho_min: T,
    pub rho_m_minus_1: T,
}

impl<T: Real> PoleTrack<T> {
    /// CSV with columns `n,j,re_lambda,im_lambda`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,j,re_lambda,im_lambda\n");
        for (k, n) in self.ns.iter().enumerate() {
            for (j, t) in self.trajectories.iter().enumerate() {
                let p = t.points[k];
                let _ = writeln!(
                    out,
                    "{n},{},{:.16e},{:.16e}",
                    j + 1,
                    p.re.to_f64_lossy(),
                    p.im.to_f64_lossy()
                );
            }
        }
        out
    }
}

/// Number of trailing points averaged into a trajectory limit.
const TAIL: usize = 3;

/// Tracks the `m` poles of `[n/m]` over `ns`, matching them between
/// consecutive rows by minimal total displacement.
pub fn pole_track<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    basis: &OrthoBasis<T>,
    map: &ConformalMap<T>,
    m: usize,
    ns: &[usize],
) -> Result<PoleTrack<T>> {
    if m == 0 {
        return Err(Error::InvalidInput("pole tracking needs m ≥ 1".into()));
    }
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    let mut rows: Vec<Vec<Complex<T>>> = Vec::new();
    for &n in ns {
        match approximant(f, basis, n, m) {
            Ok(a) if !a.unique => skipped.push((n, format!("non-unique (nullspace {})", a.nullspace_dim))),
            Ok(a) if a.poles.len() != m => skipped.push((n, format!("degree {} < m", a.poles.len()))),
            Ok(a) if !(a.q_noise <= T::lit(Q_NOISE_MAX)) => skipped.push((
                n,
                format!("noise-dominated denominator (bound {:.3e})", a.q_noise.to_f64_lossy()),
            )),
            Ok(a) => {
                let mut cur = a.poles.clone();
                match rows.last() {
                    None => sort_points(&mut cur),
                    Some(prev) => {
                        let pairs = match_points(prev, &cur);
                        cur = pairs.iter().map(|&(_, j)| cur[j]).collect();
                    }
                }
                used.push(n);
                rows.push(cur);
            }
            Err(e) if e.is_validation() => return Err(e),
            Err(e) => skipped.push((n, e.to_string())),
        }
    }
    if used.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "pole tracking needs at least 4 usable rows, got {}",
            used.len()
        )));
    }
    let mut trajectories: Vec<Trajectory<T>> = (0..m)
        .map(|j| {
            let points: Vec<Complex<T>> = rows.iter().map(|r| r[j]).collect();
            let tail = &points[points.len() - TAIL..];
            let limit = tail.iter().fold(Complex::new(T::zero(), T::zero()), |a, &p| a + p) / T::from_usize_exact(TAIL);
            let scale = limit.norm().max(T::one());
            let spread = tail.iter().fold(T::zero(), |acc, p| acc.max((p - limit).norm())) / scale;
            Trajectory {
                contraction: contraction_rate(&points, scale.to_f64_lossy()),
                converged: spread <= T::lit(LIMIT_TOL),
                rho: map.rho_of(limit),
                points,
                limit,
                class: PoleClass::Unresolved,
            }
        })
        .collect();
    let rho_min = trajectories.iter().fold(T::infinity(), |a, t| a.min(t.rho));
    let rho_m_minus_1 = trajectories.iter().fold(T::zero(), |a, t| a.max(t.rho));
    for t in &mut trajectories {
        t.class = if !t.converged {
            PoleClass::Unresolved
        } else if t.rho >= rho_m_minus_1 * T::lit(1.0 - BOUNDARY_BAND) {
            PoleClass::OtherSingularity
        } else if t.contraction.is_none_or(|r| r < CONTRACTION_THRESHOLD) {
            PoleClass::PoleLike
        } else {
            PoleClass::Unresolved
        };
    }
    Ok(PoleTrack {
        m,
        ns: used,
        skipped,
        trajectories,
        rho_min,
        rho_m_minus_1,
    })
}

fn contraction_rate<T: Real>(points: &[Complex<T>], scale: f64) -> Option<f64> {
    let floor = T::epsilon().to_f64_lossy().sqrt() * scale;
    let half = points.len() / 2;
    if points[half..]
        .windows(2)
        .all(|w| (w[1] - w[0]).norm().to_f64_lossy() <= floor)
    {
        // stationary at the working-precision floor
        return None;
    }
    let steps: Vec<(f64, f64)> = points
        .windows(2)
        .enumerate()
        .map(|(k, w)| (k as f64, (w[1] - w[0]).norm().to_f64_lossy()))
        .filter(|&(_, d)| d > floor)
        .collect();
    if steps.len() < 3 {
        return None;
    }
    let x: Vec<f64> = steps.iter().map(|s| s.0).collect();
    let y: Vec<f64> = steps.iter().map(|s| s.1.ln()).collect();
    line_fit(&x, &y).map(|f| f.slope.exp())
}

/// Ground truth supplied to the Montessus harness.
#[derive(Clone, Debug)]
pub struct KnownPoles<T: Real> {
    /// Roots of `Q_m`, with multiplicity.
    pub roots: Vec<Complex<T>>,
    /// `ρ_m(F)`; infinite for a rational function with exactly `m` poles.
    pub rho_m: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    pub r2: f64,
    pub points: usize,
}

impl RateFit {
    fn from_line(f: LineFit, points: usize) -> Self {
        Self {
            rate: f.slope.exp(),
            r2: f.r2,
            points,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MontessusRow {
    pub n: usize,
    pub sup_err: f64,
    pub q_dist: f64,
    /// Noise bound on `q_dist`; rows at or below it are excluded from the `q` fit.
    pub q_noise: f64,
    /// Error ignored by the fits (at the noise floor, or failure).
    pub floor_limited: bool,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug)]
pub struct MontessusReport {
    pub m: usize,
    pub rows: Vec<MontessusRow>,
    /// Geometric fit of `sup_err` over the rows above the floor.
    pub fitted_rate: Option<RateFit>,
    pub bound: f64,
    pub q_rate: Option<RateFit>,
    pub q_bound: f64,
    /// Fewer than [`MIN_FIT_POINTS`] rows above the floor for `fitted_rate`.
    pub floor_limited: bool,
}

impl MontessusReport {
    /// CSV with columns `n,sup_err,sup_err_pow_1_over_n,q_dist,skipped`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,sup_err,sup_err_pow_1_over_n,q_dist,skipped\n");
        for r in &self.rows {
            let root = if r.n == 0 {
                f64::NAN
            } else {
                r.sup_err.powf(1.0 / r.n as f64)
            };
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{}",
                r.n,
                r.sup_err,
                root,
                r.q_dist,
                u8::from(r.skipped.is_some())
            );
        }
        out
    }
}

/// Sup-norm errors of `[n/m]` on `k_points` and denominator distances to
/// the true `Q_m`, with geometric rates fitted over `ns`.
pub fn montessus_report<T: Real, F: ComplexFunction<T> + ?Sized>(
    f: &F,
    known: &KnownPoles<T>,
    basis: &OrthoBasis<T>,
    map: &ConformalMap<T>,
    m: usize,
    ns: &[usize],
    k_points: &[Complex<T>],
) -> Result<MontessusReport> {
    if known.roots.len() != m {
        return Err(Error::InvalidInput(format!(
            "expected {m} known roots, got {}",
            known.roots.len()
        )));
    }
    if k_points.is_empty() {
        return Err(Error::InvalidInput("empty point set K".into()));
    }
    let q_true = Polynomial::from_roots(&known.roots);
    let f_on_k: Vec<Complex<T>> = k_points.iter().map(|&z| f.eval(z)).collect::<Result<_, _>>()?;
    let f_scale = f_on_k.iter().fold(T::zero(), |a, v| a.max(v.norm())).to_f64_lossy();
    let eps = T::epsilon().to_f64_lossy();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let row = match approximant(f, basis, n, m) {
            Ok(a) => {
                let sup_err = k_points
                    .iter()
                    .zip(&f_on_k)
                    .fold(T::zero(), |acc, (&z, &fz)| acc.max((fz - a.eval_at(z)).norm()))
                    .to_f64_lossy();
                let len = (m + 1).max(a.q.coeffs().len());
                let q_dist =
                    a.q.padded(len)
                        .iter()
                        .zip(q_true.padded(len))
                        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm().to_f64_lossy()));
                let floor = FLOOR_FACTOR * a.noise.to_f64_lossy().max(eps * f_scale);
                MontessusRow {
                    n,
                    sup_err,
                    q_dist,
                    q_noise: a.q_noise.to_f64_lossy(),
                    floor_limited: !(sup_err > floor),
                    skipped: None,
                }
            }
            Err(e) if e.is_validation() => return Err(e),
            Err(e) => MontessusRow {
                n,
                sup_err: f64::NAN,
                q_dist: f64::NAN,
                q_noise: f64::INFINITY,
                floor_limited: true,
                skipped: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    let fit = |sel: &dyn Fn(&MontessusRow) -> Option<f64>| -> Option<RateFit> {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| {
                sel(r)
                    .filter(|v| *v > 0.0 && v.is_finite())
                    .map(|v| (r.n as f64, v.ln()))
            })
            .collect();
        if pts.len() < MIN_FIT_POINTS {
            return None;
        }
        let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        line_fit(&x, &y).map(|l| RateFit::from_line(l, pts.len()))
    };
    let fitted_rate = fit(&|r| (!r.floor_limited).then_some(r.sup_err));
    let q_rate = fit(&|r| (r.skipped.is_none() && r.q_dist > r.q_noise).then_some(r.q_dist));
    let max_level = k_points
        .iter()
        .fold(T::one(), |a, &z| a.max(map.rho_of(z)))
        .to_f64_lossy();
    let rho_m = known.rho_m.to_f64_lossy();
    let pole_level = known
        .roots
        .iter()
        .fold(0.0f64, |a, &z| a.max(map.rho_of(z).to_f64_lossy()));
    Ok(MontessusReport {
        m,
        floor_limited: fitted_rate.is_none(),
        rows,
        fitted_rate,
        bound: max_level / rho_m,
        q_rate,
        q_bound: pole_level / rho_m,
    })
}

/// `n` Chebyshev points of the first kind mapped onto `[a, b]`.
pub fn chebyshev_points<T: Real>(a: T, b: T, n: usize) -> Vec<Complex<T>> {
    let half = T::lit(0.5);
    (0..n)
        .map(|k| {
            let c = crate::scalar::cis_pi_ratio::<T>((2 * k + 1) as i64, (2 * n) as i64).re;
            Complex::new((a + b) * half + (b - a) * half * c, T::zero())
        })
        .collect()
}
