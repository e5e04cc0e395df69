//! Exterior conformal maps of an interval and of the closed unit disk.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cr, csqrt, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapKind<T: Real> {
    Interval { a: T, b: T },
    UnitDisk,
}

/// `Φ` maps the complement of `E` onto `|w| > 1` with `Φ(∞) = ∞` and
/// `Φ'(∞) > 0`; `Ψ` is its inverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalMap<T: Real> {
    kind: MapKind<T>,
}

impl<T: Real> ConformalMap<T> {
    pub fn interval(a: T, b: T) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInput(format!(
                "interval must satisfy a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self {
            kind: MapKind::Interval { a, b },
        })
    }

    pub fn unit_disk() -> Self {
        Self {
            kind: MapKind::UnitDisk,
        }
    }

    pub fn kind(&self) -> MapKind<T> {
        self.kind
    }

    /// Logarithmic capacity of `E`.
    pub fn cap(&self) -> T {
        match self.kind {
            MapKind::Interval { a, b } => (b - a) / T::lit(4.0),
            MapKind::UnitDisk => T::one(),
        }
    }

    fn to_unit(&self, z: Complex<T>, a: T, b: T) -> Complex<T> {
        let _ = self;
        (z * T::lit(2.0) - cr(a + b)) / (b - a)
    }

    fn on_segment(z: Complex<T>, a: T, b: T) -> bool {
        z.im == T::zero() && z.re >= a && z.re <= b
    }

    /// `Φ(z)`. On the interval itself the upper-edge boundary value is
    /// returned.
    pub fn phi(&self, z: Complex<T>) -> Complex<T> {
        match self.kind {
            MapKind::UnitDisk => z,
            MapKind::Interval { a, b } => {
                let t = self.to_unit(z, a, b);
                let s = csqrt(t * t - cr(T::one()));
                if Self::on_segment(z, a, b) {
                    // s = i sqrt(1 - t^2), upper edge
                    return Complex::new(t.re, s.im.abs());
                }
                let plus = t + s;
                let minus = t - s;
                if plus.norm() >= minus.norm() {
                    plus
                } else {
                    minus
                }
            }
        }
    }

    /// `Ψ(w)` for `|w| ≥ 1`.
    pub fn psi(&self, w: Complex<T>) -> Result<Complex<T>> {
        if w.norm() < T::one() - T::lit(1e-12) {
            return Err(Error::InvalidInput(format!(
                "psi is defined for |w| >= 1, got |w| = {}",
                w.norm()
            )));
        }
        Ok(match self.kind {
            MapKind::UnitDisk => w,
            MapKind::Interval { a, b } => {
                let t = (w + cr(T::one()) / w) / T::lit(2.0);
                (t * (b - a) + cr(a + b)) / T::lit(2.0)
            }
        })
    }

    /// Level index `|Φ(z)|`, exactly 1 on `E`.
    pub fn rho_of(&self, z: Complex<T>) -> T {
        match self.kind {
            MapKind::UnitDisk => z.norm().max(T::one()),
            MapKind::Interval { a, b } => {
                if Self::on_segment(z, a, b) {
                    T::one()
                } else {
                    self.phi(z).norm().max(T::one())
                }
            }
        }
    }

    /// Logarithmic derivative `Φ'(z)/Φ(z)` off `E`.
    pub fn dlog_phi(&self, z: Complex<T>) -> Complex<T> {
        match self.kind {
            MapKind::UnitDisk => cr(T::one()) / z,
            MapKind::Interval { a, b } => {
                let t = self.to_unit(z, a, b);
                let scale = T::lit(2.0) / (b - a);
                cr(scale) / (self.phi(z) - t)
            }
        }
    }
}

/// Index `ρ ≥ 1` of the level curve `Γ_ρ = {|Φ(z)| = ρ}`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LevelIndex<T: Real> {
    rho: T,
}

impl<T: Real> LevelIndex<T> {
    pub fn new(rho: T) -> Result<Self> {
        if rho >= T::one() {
            Ok(Self { rho })
        } else {
            Err(Error::InvalidInput(format!("level index must be >= 1, got {rho}")))
        }
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    /// Whether `z` lies in the canonical domain `D_ρ`.
    pub fn contains(&self, map: &ConformalMap<T>, z: Complex<T>) -> bool {
        map.rho_of(z) < self.rho
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn unit() -> ConformalMap<f64> {
        ConformalMap::interval(-1.0, 1.0).unwrap()
    }

    #[test]
    fn phi_examples() {
        let m = unit();
        assert!((m.phi(c(3.0, 0.0)) - c(3.0 + 8f64.sqrt(), 0.0)).norm() < 1e-14);
        assert_eq!(m.phi(c(1.0, 0.0)), c(1.0, 0.0));
        assert_eq!(ConformalMap::unit_disk().phi(c(2.0, 1.0)), c(2.0, 1.0));
    }

    #[test]
    fn psi_examples() {
        let m = unit();
        let w = c(3.0 + 8f64.sqrt(), 0.0);
        assert!((m.psi(w).unwrap() - c(3.0, 0.0)).norm() < 1e-12);
        assert_eq!(m.psi(c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(ConformalMap::unit_disk().psi(c(0.0, 5.0)).unwrap(), c(0.0, 5.0));
        assert!(m.psi(c(0.5, 0.0)).is_err());
    }

    #[test]
    fn rho_examples() {
        let m = unit();
        assert!((m.rho_of(c(3.0, 0.0)) - 5.828_427_124_746_19).abs() < 1e-12);
        assert_eq!(m.rho_of(c(0.25, 0.0)), 1.0);
        let z = c(0.0, 2.0);
        assert!((m.rho_of(z) - (2.0 + 5f64.sqrt())).abs() < 1e-12);
        assert!((m.psi(m.phi(z)).unwrap() - z).norm() < 1e-12);
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [
            unit(),
            ConformalMap::interval(-0.5, 3.0).unwrap(),
            ConformalMap::unit_disk(),
        ] {
            for _ in 0..200 {
                let r: f64 = rng.gen_range(1.0..10.0);
                let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let w = Complex::from_polar(r, th);
                let back = m.phi(m.psi(w).unwrap());
                assert!((back - w).norm() < 1e-11 * r, "{w} -> {back}");
            }
        }
    }

    #[test]
    fn positive_derivative_at_infinity() {
        let m = ConformalMap::interval(-2.0, 5.0).unwrap();
        let z = c(1e8, 0.0);
        let q = m.phi(z) / z;
        assert!(q.re > 0.0 && q.im.abs() < 1e-6 * q.re);
    }

    #[test]
    fn monotone_and_symmetric() {
        let m = unit();
        let mut last = 1.0;
        for k in 1..50 {
            let r = m.rho_of(c(1.0 + 0.1 * k as f64, 0.0));
            assert!(r > last);
            last = r;
        }
        for z in [c(0.3, 0.4), c(-2.0, -1.0), c(0.0, -0.01)] {
            assert!((m.phi(z.conj()) - m.phi(z).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn outside_modulus_exceeds_one() {
        let m = unit();
        for z in [c(0.0, 1e-9), c(-1.0 - 1e-9, 0.0), c(0.5, -0.2)] {
            assert!(m.phi(z).norm() > 1.0);
        }
    }

    #[test]
    fn log_derivative_on_interval() {
        let m = unit();
        let v = m.dlog_phi(c(3.0, 0.0));
        assert!((v.re - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        // finite difference check at a complex point
        let z = c(0.4, 0.9);
        let h = 1e-6;
        let fd = (m.phi(z + h).ln() - m.phi(z - h).ln()) / (2.0 * h);
        assert!((fd - m.dlog_phi(z)).norm() < 1e-8);
    }

    #[test]
    fn level_index() {
        assert!(LevelIndex::new(0.5).is_err());
        let l = LevelIndex::new(4.0).unwrap();
        assert!(l.contains(&unit(), c(2.0, 0.0)));
        assert!(!l.contains(&unit(), c(3.0, 0.0)));
    }
}
