//! Small least-squares fits used by the rate estimators.

use num_complex::Complex;

use crate::linalg::{CMatrix, Svd};

/// Straight-line fit `y ≈ intercept + slope·x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination.
    pub r2: f64,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let coef = lstsq(&[x.iter().map(|_| 1.0).collect(), x.to_vec()], y)?;
    let (intercept, slope) = (coef[0], coef[1]);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(LineFit { slope, intercept, r2 })
}

/// Least-squares coefficients for the given regressor columns. `None` when
/// there are fewer rows than columns or the design is rank deficient.
pub fn lstsq(columns: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let rows = y.len();
    let cols = columns.len();
    if rows < cols || columns.iter().any(|c| c.len() != rows) {
        return None;
    }
    let a = CMatrix::from_fn(rows, cols, |r, c| Complex::new(columns[c][r], 0.0));
    let svd = Svd::new(&a);
    if svd.rank(1e-12) < cols {
        return None;
    }
    let b: Vec<Complex<f64>> = y.iter().map(|&v| Complex::new(v, 0.0)).collect();
    Some(svd.solve(&b, cols).into_iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = line_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-13);
        assert!((f.intercept - 1.0).abs() < 1e-13);
        assert!((f.r2 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn underdetermined_is_none() {
        assert!(line_fit(&[1.0], &[2.0]).is_none());
        assert!(line_fit(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }
}
