//! Serializable `f64` records of the library's reports.

use num_complex::Complex;
use serde::Serialize;

use crate::classic::PoleCorrespondence;
use crate::inverse::{FabryReport, LambdaReport, MontessusReport, PoleTrack, RateFit, CLASSIFICATION_NOTE};
use crate::padeortho::RationalApproximant;
use crate::poly::Polynomial;
use crate::scalar::Real;

/// `[re, im]`.
pub type Pair = [f64; 2];

pub fn pair<T: Real>(z: Complex<T>) -> Pair {
    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
}

fn pairs<T: Real>(zs: &[Complex<T>]) -> Vec<Pair> {
    zs.iter().map(|&z| pair(z)).collect()
}

fn poly<T: Real>(q: &Polynomial<T>) -> Vec<Pair> {
    pairs(q.coeffs())
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateRecord {
    pub nullspace_dim: usize,
    pub delta: Pair,
    /// Monic denominators, coefficients low → high.
    pub sample_denominators: Vec<Vec<Pair>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproximantRecord {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "Q")]
    pub q: Vec<Pair>,
    #[serde(rename = "P")]
    pub p: Vec<Pair>,
    pub unique: bool,
    pub poles: Vec<Pair>,
    pub nullspace_dim: usize,
    pub delta: Pair,
    pub defect: f64,
    pub noise: f64,
    pub certificate: Option<CertificateRecord>,
}

impl<T: Real> From<&RationalApproximant<T>> for ApproximantRecord {
    fn from(a: &RationalApproximant<T>) -> Self {
        Self {
            n: a.n,
            m: a.m,
            q: poly(&a.q),
            p: pairs(&a.p_coeffs),
            unique: a.unique,
            poles: pairs(&a.poles),
            nullspace_dim: a.nullspace_dim,
            delta: pair(a.delta),
            defect: a.defect.to_f64_lossy(),
            noise: a.noise.to_f64_lossy(),
            certificate: a.certificate.as_ref().map(|c| CertificateRecord {
                nullspace_dim: c.nullspace_dim,
                delta: pair(c.delta_value),
                sample_denominators: c.sample_denominators.iter().map(poly).collect(),
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FabryRecord {
    pub tau_limit: Pair,
    pub converged: bool,
    pub diverging: bool,
    pub method: String,
    pub spread: f64,
    pub singularity: Option<Pair>,
    pub rho0: f64,
    pub n_first: usize,
    pub n_last: usize,
}

impl<T: Real> From<&FabryReport<T>> for FabryRecord {
    fn from(r: &FabryReport<T>) -> Self {
        Self {
            tau_limit: pair(r.tau_limit),
            converged: r.converged,
            diverging: r.diverging,
            method: r.method.to_string(),
            spread: r.spread.to_f64_lossy(),
            singularity: r.singularity.map(pair),
            rho0: r.rho0.to_f64_lossy(),
            n_first: r.ns[0],
            n_last: *r.ns.last().unwrap(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaRecord {
    pub lambda_limit: Pair,
    pub converged: bool,
    pub diverging: bool,
    pub method: String,
    pub spread: f64,
    pub phi_lambda: Pair,
    pub rho0: f64,
    pub abs_phi_lambda_minus_tau: Option<f64>,
}

impl<T: Real> From<&LambdaReport<T>> for LambdaRecord {
    fn from(r: &LambdaReport<T>) -> Self {
        Self {
            lambda_limit: pair(r.lambda_limit),
            converged: r.converged,
            diverging: r.diverging,
            method: r.method.to_string(),
            spread: r.spread.to_f64_lossy(),
            phi_lambda: pair(r.phi_lambda()),
            rho0: r.rho0.to_f64_lossy(),
            abs_phi_lambda_minus_tau: r.cross_check.map(|v| v.to_f64_lossy()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRecord {
    pub limit: Pair,
    pub converged: bool,
    pub contraction: Option<f64>,
    pub rho: f64,
    pub classification: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoleTrackRecord {
    pub m: usize,
    pub ns: Vec<usize>,
    pub skipped: Vec<(usize, String)>,
    pub trajectories: Vec<TrajectoryRecord>,
    pub rho_min: f64,
    pub rho_m_minus_1: f64,
    pub classification_note: &'static str,
}

impl<T: Real> From<&PoleTrack<T>> for PoleTrackRecord {
    fn from(t: &PoleTrack<T>) -> Self {
        Self {
            m: t.m,
            ns: t.ns.clone(),
            skipped: t.skipped.clone(),
            trajectories: t
                .trajectories
                .iter()
                .map(|tr| TrajectoryRecord {
                    limit: pair(tr.limit),
                    converged: tr.converged,
                    contraction: tr.contraction,
                    rho: tr.rho.to_f64_lossy(),
                    classification: tr.class.to_string(),
                })
                .collect(),
            rho_min: t.rho_min.to_f64_lossy(),
            rho_m_minus_1: t.rho_m_minus_1.to_f64_lossy(),
            classification_note: CLASSIFICATION_NOTE,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RateRecord {
    pub rate: f64,
    pub r2: f64,
    pub points: usize,
}

impl From<&RateFit> for RateRecord {
    fn from(r: &RateFit) -> Self {
        Self {
            rate: r.rate,
            r2: r.r2,
            points: r.points,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MontessusRecord {
    pub m: usize,
    pub fitted_rate: Option<RateRecord>,
    pub bound: f64,
    pub q_rate: Option<RateRecord>,
    pub q_bound: f64,
    pub floor_limited: bool,
    pub skipped: Vec<(usize, String)>,
}

impl From<&MontessusReport> for MontessusRecord {
    fn from(r: &MontessusReport) -> Self {
        Self {
            m: r.m,
            fitted_rate: r.fitted_rate.as_ref().map(RateRecord::from),
            bound: r.bound,
            q_rate: r.q_rate.as_ref().map(RateRecord::from),
            q_bound: r.q_bound,
            floor_limited: r.floor_limited,
            skipped: r
                .rows
                .iter()
                .filter_map(|row| row.skipped.clone().map(|s| (row.n, s)))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceRecord {
    pub n: usize,
    pub m: usize,
    pub lambda: Vec<Pair>,
    pub tau: Vec<Pair>,
    pub pairs: Vec<(usize, usize)>,
    pub matched_residual: f64,
    pub length_mismatch: bool,
}

impl<T: Real> From<&PoleCorrespondence<T>> for CorrespondenceRecord {
    fn from(c: &PoleCorrespondence<T>) -> Self {
        Self {
            n: c.n,
            m: c.m,
            lambda: pairs(&c.lambda),
            tau: pairs(&c.tau),
            pairs: c.pairs.clone(),
            matched_residual: c.matched_residual.to_f64_lossy(),
            length_mismatch: c.length_mismatch,
        }
    }
}
