//! Small dense complex linear algebra: LU determinants, one-sided Jacobi SVD,
//! minimum-norm least squares, nullspaces, Hessenberg QR eigenvalues and the
//! symmetric tridiagonal eigensolver behind Gauss rules.
//!
//! Matrices here are tiny (moment blocks of order `m`, companion matrices of
//! degree `m`) except for the Jacobi matrices, which only need eigenvalues and
//! first eigenvector components.

use num_complex::Complex;

use crate::scalar::{czero, Real};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Submatrix made of the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self[(r, cols[c])])
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).fold(czero(), |acc, c| acc + self[(r, c)] * x[c]))
            .collect()
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex<T> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Complex::new(T::one(), T::zero());
        }
        let mut a = self.clone();
        let mut det = Complex::new(T::one(), T::zero());
        for k in 0..n {
            let mut piv = k;
            let mut best = a[(k, k)].norm();
            for r in k + 1..n {
                let v = a[(r, k)].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == T::zero() {
                return czero();
            }
            if piv != k {
                for c in 0..n {
                    let tmp = a[(k, c)];
                    a[(k, c)] = a[(piv, c)];
                    a[(piv, c)] = tmp;
                }
                det = -det;
            }
            let pivot = a[(k, k)];
            det = det * pivot;
            for r in k + 1..n {
                let f = a[(r, k)] / pivot;
                if f == czero() {
                    continue;
                }
                for c in k..n {
                    let v = a[(k, c)];
                    a[(r, c)] = a[(r, c)] - f * v;
                }
            }
        }
        det
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Singular value decomposition `A = U·diag(σ)·Vᴴ` with `V` square.
///
/// `sigma` has one entry per column of `A`, sorted in decreasing order; the
/// trailing entries are zero when `A` has more columns than rows.
#[derive(Clone, Debug)]
pub struct Svd<T: Real> {
    /// Columns `u_j = A v_j / σ_j` (zero column when `σ_j = 0`).
    pub u: CMatrix<T>,
    pub sigma: Vec<T>,
    pub v: CMatrix<T>,
}

impl<T: Real> Svd<T> {
    /// One-sided (Hestenes) Jacobi SVD.
    pub fn new(a: &CMatrix<T>) -> Self {
        let (m, n) = (a.rows, a.cols);
        let mut w = a.clone();
        let mut v = CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex::new(T::one(), T::zero())
            } else {
                czero()
            }
        });
        let tol = T::epsilon() * T::from_usize_exact(m.max(1));
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma = czero();
                    for r in 0..m {
                        alpha = alpha + w[(r, p)].norm_sqr();
                        beta = beta + w[(r, q)].norm_sqr();
                        gamma = gamma + w[(r, p)].conj() * w[(r, q)];
                    }
                    let g = gamma.norm();
                    if g == T::zero() || g <= tol * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (T::lit(2.0) * g);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    for r in 0..m {
                        let wp = w[(r, p)];
                        let wq = w[(r, q)] * phase.conj();
                        w[(r, p)] = wp * c - wq * s;
                        w[(r, q)] = wp * s + wq * c;
                    }
                    for r in 0..n {
                        let vp = v[(r, p)];
                        let vq = v[(r, q)] * phase.conj();
                        v[(r, p)] = vp * c - vq * s;
                        v[(r, q)] = vp * s + vq * c;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sigma: Vec<T> = (0..n)
            .map(|c| (0..m).fold(T::zero(), |acc, r| acc + w[(r, c)].norm_sqr()).sqrt())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap_or(std::cmp::Ordering::Equal));
        let u = CMatrix::from_fn(m, n, |r, c| {
            let j = order[c];
            if sigma[j] > T::zero() {
                w[(r, j)] / sigma[j]
            } else {
                czero()
            }
        });
        let v = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
        sigma = order.iter().map(|&j| sigma[j]).collect();
        Self { u, sigma, v }
    }

    pub fn sigma_max(&self) -> T {
        self.sigma.first().copied().unwrap_or_else(T::zero)
    }

    /// Number of singular values above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let cut = rel_tol * self.sigma_max();
        self.sigma.iter().filter(|&&s| s > cut && s > T::zero()).count()
    }

    /// Minimum-norm least-squares solution of `A x = b` at the given rank.
    pub fn solve(&self, b: &[Complex<T>], rank: usize) -> Vec<Complex<T>> {
        let n = self.v.rows();
        let mut x = vec![czero(); n];
        for j in 0..rank {
            let coef = (0..self.u.rows()).fold(czero(), |acc, r| acc + self.u[(r, j)].conj() * b[r]) / self.sigma[j];
            for (r, xr) in x.iter_mut().enumerate() {
                *xr = *xr + self.v[(r, j)] * coef;
            }
        }
        x
    }

    /// Orthonormal basis of the numerical nullspace (columns of `V` beyond `rank`).
    pub fn nullspace(&self, rank: usize) -> Vec<Vec<Complex<T>>> {
        (rank..self.v.cols()).map(|j| self.v.column(j)).collect()
    }
}

pub fn vec_norm<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Eigenvalues of a complex upper Hessenberg matrix by shifted QR with
/// Wilkinson shifts and deflation.
pub fn hessenberg_eigenvalues<T: Real>(h: &CMatrix<T>) -> Option<Vec<Complex<T>>> {
    let n = h.rows();
    assert_eq!(n, h.cols());
    let mut h = h.clone();
    let mut eig = vec![czero(); n];
    if n == 0 {
        return Some(eig);
    }
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // locate the active block [lo..=hi]
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == T::zero() { h.max_abs() } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = czero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n.max(4) {
            return None;
        }
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift
            h[(hi, hi)] + Complex::new(h[(hi, hi - 1)].norm() * T::lit(0.75), T::zero())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Some(eig)
}

fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let tr = (a + d) * half;
    let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
    let l1 = tr + disc;
    let l2 = tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn givens<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let na = a.norm();
    let nb = b.norm();
    if nb == T::zero() {
        return (T::one(), czero());
    }
    if na == T::zero() {
        return (T::zero(), Complex::new(T::one(), T::zero()));
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

fn qr_step<T: Real>(h: &mut CMatrix<T>, lo: usize, hi: usize, shift: Complex<T>) {
    for k in lo..=hi {
        h[(k, k)] = h[(k, k)] - shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -(s.conj() * x) + y * c;
        }
        rots.push((c, s));
    }
    for (idx, k) in (lo..hi).enumerate() {
        let (c, s) = rots[idx];
        let last = (k + 1).min(hi);
        for i in lo..=last {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -(x * s) + y * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] = h[(k, k)] + shift;
    }
}

/// Eigenvalues and squared first eigenvector components of the symmetric
/// tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off[k]` couples rows `k` and `k+1`). Implicit QL with Wilkinson shifts.
///
/// Returns pairs sorted by eigenvalue.
pub fn tridiagonal_eigen<T: Real>(diag: &[T], off: &[T]) -> Option<Vec<(T, T)>> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e: Vec<T> = off.to_vec();
    e.push(T::zero());
    // first components of the eigenvector matrix
    let mut z = vec![T::zero(); n];
    if n > 0 {
        z[0] = T::one();
    }
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.abs() * g.signum());
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if early {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    let mut pairs: Vec<(T, T)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Some(pairs)
}

/// Minimum-cost perfect assignment for a square cost matrix (Hungarian
/// algorithm, O(n³)). Returns `assign[row] = col`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cr;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let a = CMatrix::from_fn(3, 3, |r, k| c((r * 3 + k) as f64 + 0.5, (r as f64 - k as f64) * 0.3));
        let m = |r: usize, k: usize| a[(r, k)];
        let expected = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        assert!((a.det() - expected).norm() < 1e-12 * expected.norm().max(1.0));
    }

    #[test]
    fn svd_reconstructs_and_orders() {
        let a = CMatrix::from_fn(2, 3, |r, k| c(1.0 + r as f64 * k as f64, 0.2 * k as f64 - r as f64));
        let svd = Svd::new(&a);
        assert_eq!(svd.sigma.len(), 3);
        assert!(svd.sigma[0] >= svd.sigma[1] && svd.sigma[1] >= svd.sigma[2]);
        assert!(svd.sigma[2] < 1e-13);
        // A v_j = σ_j u_j
        for j in 0..3 {
            let av = a.mul_vec(&svd.v.column(j));
            for r in 0..2 {
                assert!((av[r] - svd.u[(r, j)] * svd.sigma[j]).norm() < 1e-12);
            }
        }
        // null vector really is null
        let null = svd.nullspace(svd.rank(1e-10));
        assert_eq!(null.len(), 1);
        assert!(vec_norm(&a.mul_vec(&null[0])) < 1e-13);
    }

    #[test]
    fn min_norm_solution_of_rank_deficient_system() {
        // x + y = 2 (twice): min-norm solution (1, 1)
        let a = CMatrix::from_fn(2, 2, |_, _| cr(1.0));
        let svd = Svd::new(&a);
        let rank = svd.rank(1e-10);
        assert_eq!(rank, 1);
        let x = svd.solve(&[cr(2.0), cr(2.0)], rank);
        assert!((x[0] - cr(1.0)).norm() < 1e-14 && (x[1] - cr(1.0)).norm() < 1e-14);
    }

    #[test]
    fn hessenberg_eigenvalues_of_companion() {
        // (z-1)(z+2)(z-3i) = z^3 + (1-3i) z^2 + (-2-3i) z + 6i
        let q = [c(0.0, 6.0), c(-2.0, -3.0), c(1.0, -3.0)];
        let mut h = CMatrix::zeros(3, 3);
        for i in 0..3 {
            h[(i, 2)] = -q[i];
            if i > 0 {
                h[(i, i - 1)] = cr(1.0);
            }
        }
        let mut ev = hessenberg_eigenvalues(&h).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let want = [c(-2.0, 0.0), c(0.0, 3.0), c(1.0, 0.0)];
        for (e, w) in ev.iter().zip(want.iter()) {
            assert!((e - w).norm() < 1e-12, "{e} vs {w}");
        }
    }

    #[test]
    fn tridiagonal_gauss_legendre_three_points() {
        // Legendre Jacobi matrix: off-diagonal k/sqrt(4k^2-1), mass 2
        let off: Vec<f64> = (1..3).map(|k| k as f64 / ((4 * k * k - 1) as f64).sqrt()).collect();
        let pairs = tridiagonal_eigen(&[0.0; 3], &off).unwrap();
        let nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let weights: Vec<f64> = pairs.iter().map(|p| 2.0 * p.1).collect();
        let x = (0.6f64).sqrt();
        assert!((nodes[0] + x).abs() < 1e-14 && nodes[1].abs() < 1e-14 && (nodes[2] - x).abs() < 1e-14);
        assert!((weights[0] - 5.0 / 9.0).abs() < 1e-14 && (weights[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn assignment_finds_optimum() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = min_cost_assignment(&cost);
        let total: f64 = a.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
        assert_eq!(total, 5.0);
    }
}
