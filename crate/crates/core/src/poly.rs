//! Complex polynomials in the power basis and their roots.

use num_complex::Complex;

use crate::linalg::{hessenberg_eigenvalues, min_cost_assignment, CMatrix};
use crate::scalar::{cr, czero, Real};

/// Polynomial with coefficients stored low → high.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(coeffs: Vec<Complex<T>>) -> Self {
        let mut p = Self { coeffs };
        if p.coeffs.is_empty() {
            p.coeffs.push(czero());
        }
        p
    }

    pub fn one() -> Self {
        Self::new(vec![cr(T::one())])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        let mut coeffs = vec![cr(T::one())];
        for &r in roots {
            let mut next = vec![czero(); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] = next[i + 1] + c;
                next[i] = next[i] - c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Index of the highest exactly-nonzero coefficient (0 for constants).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != czero()).unwrap_or(0)
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs.iter().rev().fold(czero(), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::new(vec![czero()]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * T::from_usize_exact(i))
                .collect(),
        )
    }

    /// Divides by the leading coefficient and drops exact zeros above it.
    pub fn monic(&self) -> Self {
        let d = self.degree();
        let lead = self.coeffs[d];
        Self::new(self.coeffs[..=d].iter().map(|&c| c / lead).collect())
    }

    /// Coefficient vector padded with zeros to `len` entries.
    pub fn padded(&self, len: usize) -> Vec<Complex<T>> {
        let mut v = self.coeffs.clone();
        v.resize(len.max(v.len()), czero());
        v
    }

    /// Max-abs coefficient distance (the coefficient norm used for rates).
    pub fn coeff_distance(&self, other: &Self) -> T {
        let n = self.coeffs.len().max(other.coeffs.len());
        let a = self.padded(n);
        let b = other.padded(n);
        a.iter()
            .zip(b.iter())
            .fold(T::zero(), |acc, (x, y)| acc.max((x - y).norm()))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Roots via eigenvalues of the companion matrix, each polished by one
    /// Newton step. Multiple roots come back as separate nearby values; use
    /// [`cluster_roots`] to group them.
    pub fn roots(&self) -> Vec<Complex<T>> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let p = self.monic();
        let q = p.coeffs();
        let mut roots = if d == 1 {
            vec![-q[0]]
        } else {
            let mut h = CMatrix::zeros(d, d);
            for i in 0..d {
                h[(i, d - 1)] = -q[i];
                if i > 0 {
                    h[(i, i - 1)] = cr(T::one());
                }
            }
            hessenberg_eigenvalues(&h).unwrap_or_else(|| vec![cr(T::nan()); d])
        };
        let dp = p.derivative();
        for r in roots.iter_mut() {
            let f = p.eval(*r);
            let fp = dp.eval(*r);
            // skip the polish at (near-)multiple roots where Q' vanishes
            if fp.norm() > T::epsilon().sqrt() * (T::one() + r.norm()).powi(d as i32 - 1) {
                let step = f / fp;
                let candidate = *r - step;
                if p.eval(candidate).norm() <= f.norm() {
                    *r = candidate;
                }
            }
        }
        sort_points(&mut roots);
        roots
    }
}

/// Deterministic ordering: by modulus, then by argument.
pub fn sort_points<T: Real>(pts: &mut [Complex<T>]) {
    pts.sort_by(|a, b| {
        let ka = (a.norm(), a.im.atan2(a.re));
        let kb = (b.norm(), b.im.atan2(b.re));
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Pairs points of `a` with points of `b` minimizing the total distance.
/// Returns `(i, j)` index pairs ordered by `i`; when the lengths differ only
/// `min(len)` pairs are formed.
pub fn match_points<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<(usize, usize)> {
    let n = a.len().max(b.len());
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (a.get(i), b.get(j)) {
                    (Some(x), Some(y)) => (x - y).norm().to_f64_lossy(),
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    let assign = min_cost_assignment(&cost);
    assign
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < a.len() && j < b.len())
        .map(|(i, &j)| (i, j))
        .collect()
}

/// A root together with its multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster<T: Real> {
    pub value: Complex<T>,
    pub multiplicity: usize,
}

/// Groups roots lying within `radius` of each other (single-linkage) and
/// replaces each group by its mean.
pub fn cluster_roots<T: Real>(roots: &[Complex<T>], radius: T) -> Vec<RootCluster<T>> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut j = i;
        while label[j] != r {
            let next = label[j];
            label[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut out: Vec<RootCluster<T>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        if let Some(pos) = seen.iter().position(|&s| s == r) {
            out[pos].value = out[pos].value + roots[i];
            out[pos].multiplicity += 1;
        } else {
            seen.push(r);
            out.push(RootCluster {
                value: roots[i],
                multiplicity: 1,
            });
        }
    }
    for c in out.iter_mut() {
        c.value = c.value / T::from_usize_exact(c.multiplicity);
    }
    out
}
