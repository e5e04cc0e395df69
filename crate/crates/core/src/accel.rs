//! Sequence acceleration and limit selection for ratio sequences.

use num_complex::Complex;

use crate::scalar::Real;

/// Highest Richardson order tried by [`select_limit`].
pub const MAX_RICHARDSON_ORDER: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccelMethod {
    Raw,
    Aitken,
    /// Polynomial extrapolation in `1/n` through `order + 1` consecutive terms.
    Richardson {
        order: usize,
    },
}

impl AccelMethod {
    fn rank(self) -> usize {
        match self {
            AccelMethod::Raw => 0,
            AccelMethod::Aitken => 1,
            AccelMethod::Richardson { order } => 1 + order,
        }
    }
}

impl std::fmt::Display for AccelMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AccelMethod::Raw => write!(f, "raw"),
            AccelMethod::Aitken => write!(f, "aitken"),
            AccelMethod::Richardson { order } => write!(f, "richardson{order}"),
        }
    }
}

/// Selected limit estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitEstimate<T: Real> {
    pub value: Complex<T>,
    pub method: AccelMethod,
    /// Index `n` of the last sequence term entering the estimate.
    pub index: usize,
    /// Relative spread of the three consecutive estimates ending at `index`.
    pub spread: T,
    pub converged: bool,
}

/// Aitken Δ² transform; entry `k` uses `x_k, x_{k+1}, x_{k+2}`.
pub fn aitken<T: Real>(seq: &[Complex<T>]) -> Vec<Complex<T>> {
    seq.windows(3)
        .map(|w| {
            let d1 = w[1] - w[0];
            let d2 = w[2] - w[1] - d1;
            if d2.norm() == T::zero() {
                w[2]
            } else {
                w[0] - d1 * d1 / d2
            }
        })
        .collect()
}

/// Neville extrapolation to `h = 0` of `(1/n_k, x_k)` for the given points.
pub fn extrapolate_in_inverse_n<T: Real>(ns: &[usize], xs: &[Complex<T>]) -> Complex<T> {
    let h: Vec<T> = ns.iter().map(|&n| T::one() / T::from_usize_exact(n.max(1))).collect();
    let mut p: Vec<Complex<T>> = xs.to_vec();
    let k = p.len();
    for level in 1..k {
        for i in 0..k - level {
            let (hi, hj) = (h[i], h[i + level]);
            // value at 0 of the line through (hi, p[i]) and (hj, p[i+1])
            p[i] = (p[i + 1] * hi - p[i] * hj) / (hi - hj);
        }
    }
    p[0]
}

/// Richardson estimates of the given order; entry `(n, v)` uses the terms
/// with indices `n - order ..= n`.
pub fn richardson<T: Real>(ns: &[usize], seq: &[Complex<T>], order: usize) -> Vec<(usize, Complex<T>)> {
    if seq.len() <= order {
        return Vec::new();
    }
    (order..seq.len())
        .map(|end| {
            let lo = end - order;
            (ns[end], extrapolate_in_inverse_n(&ns[lo..=end], &seq[lo..=end]))
        })
        .collect()
}

fn spread3<T: Real>(w: &[Complex<T>]) -> T {
    let scale = w[2].norm();
    if scale == T::zero() {
        return T::infinity();
    }
    let d = (w[0] - w[1]).norm().max((w[1] - w[2]).norm()).max((w[0] - w[2]).norm());
    d / scale
}

/// Picks the candidate (method, index) whose three consecutive estimates
/// agree best. `ns` must be consecutive integers.
///
/// Candidates are the raw sequence, its Aitken transform when the last four
/// raw terms are monotone in modulus, and Richardson extrapolation in `1/n`
/// of orders `1..=MAX_RICHARDSON_ORDER`. Ties prefer the simpler method.
pub fn select_limit<T: Real>(ns: &[usize], seq: &[Complex<T>], rel_tol: T) -> Option<LimitEstimate<T>> {
    assert_eq!(ns.len(), seq.len());
    if seq.len() < 3 {
        return None;
    }
    let mut candidates: Vec<(AccelMethod, Vec<(usize, Complex<T>)>)> = Vec::new();
    candidates.push((AccelMethod::Raw, ns.iter().copied().zip(seq.iter().copied()).collect()));
    if monotone_modulus_tail(seq, 4) {
        let a = aitken(seq);
        candidates.push((AccelMethod::Aitken, ns[2..].iter().copied().zip(a).collect()));
    }
    for order in 1..=MAX_RICHARDSON_ORDER {
        candidates.push((AccelMethod::Richardson { order }, richardson(ns, seq, order)));
    }
    let mut best: Option<LimitEstimate<T>> = None;
    for (method, vals) in candidates {
        if vals.len() < 3 {
            continue;
        }
        let values: Vec<Complex<T>> = vals.iter().map(|v| v.1).collect();
        for (k, w) in values.windows(3).enumerate() {
            let s = spread3(w);
            if !s.is_finite() {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => s < b.spread || (s == b.spread && method.rank() < b.method.rank()),
            };
            if better {
                best = Some(LimitEstimate {
                    value: w[2],
                    method,
                    index: vals[k + 2].0,
                    spread: s,
                    converged: s <= rel_tol,
                });
            }
        }
    }
    best
}

/// Whether the moduli of the last `k` terms are strictly monotone.
pub fn monotone_modulus_tail<T: Real>(seq: &[Complex<T>], k: usize) -> bool {
    if seq.len() < k || k < 2 {
        return false;
    }
    let tail: Vec<T> = seq[seq.len() - k..].iter().map(|v| v.norm()).collect();
    tail.windows(2).all(|w| w[1] > w[0]) || tail.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn aitken_is_exact_on_geometric_tails() {
        let seq: Vec<_> = (0..6).map(|n| c(2.0 + 0.5f64.powi(n))).collect();
        for v in aitken(&seq) {
            assert!((v - c(2.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn richardson_removes_polynomial_terms_in_inverse_n() {
        let ns: Vec<usize> = (5..12).collect();
        let seq: Vec<_> = ns
            .iter()
            .map(|&n| {
                let h = 1.0 / n as f64;
                c(3.0 + 2.0 * h - 5.0 * h * h)
            })
            .collect();
        let r = richardson(&ns, &seq, 2);
        assert_eq!(r.len(), 5);
        assert_eq!(r[0].0, 7);
        for (_, v) in r {
            assert!((v - c(3.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn selection_prefers_raw_on_constant_sequences() {
        let ns: Vec<usize> = (0..8).collect();
        let seq = vec![c(1.5); 8];
        let e = select_limit(&ns, &seq, 1e-4).unwrap();
        assert_eq!(e.method, AccelMethod::Raw);
        assert!(e.converged);
        assert_eq!(e.value, c(1.5));
    }

    #[test]
    fn selection_accelerates_slow_sequences() {
        let ns: Vec<usize> = (4..20).collect();
        let seq: Vec<_> = ns
            .iter()
            .map(|&n| c(4.0 - 3.0 / n as f64 + 1.0 / (n * n) as f64))
            .collect();
        let e = select_limit(&ns, &seq, 1e-4).unwrap();
        assert_ne!(e.method, AccelMethod::Raw);
        assert!((e.value - c(4.0)).norm() < 1e-9, "{e:?}");
    }

    #[test]
    fn diverging_sequence_is_not_converged() {
        let ns: Vec<usize> = (0..10).collect();
        // ratios of exp's coefficients grow roughly like 2n
        let seq: Vec<_> = ns
            .iter()
            .map(|&n| c(2.0 * (n + 1) as f64 + 0.3 / (n + 1) as f64))
            .collect();
        let e = select_limit(&ns, &seq, 1e-4).unwrap();
        assert!(!e.converged);
        assert!(monotone_modulus_tail(&seq, 4));
    }
}
