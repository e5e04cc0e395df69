//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which is satisfied by `f32`,
//! `f64` and the double-double type [`DoubleDouble`](crate::DoubleDouble).

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point scalar usable by the library.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count or index into the scalar type.
    #[inline]
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("index representable in scalar type")
    }

    /// Lossy conversion used only for reporting and for `f64`-level heuristics.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {}

/// Complex number over the scalar type.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Relative window floor for ratio estimators: `1e-10` in double precision,
/// scaled by `eps^(2/3)` for other precisions.
pub fn ratio_window_floor<T: Real>() -> T {
    let scale = (T::epsilon().to_f64_lossy() / f64::EPSILON).powf(2.0 / 3.0);
    T::lit(1e-10 * scale)
}

/// Principal square root, cut along the negative real axis.
///
/// Computed algebraically so that it keeps full accuracy for scalar types
/// with weak transcendental functions.
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.re == T::zero() && z.im == T::zero() {
        return czero();
    }
    let r = z.norm();
    let two = T::lit(2.0);
    if z.re >= T::zero() {
        let s = ((r + z.re) / two).sqrt();
        Complex::new(s, z.im / (two * s))
    } else {
        let t = ((r - z.re) / two).sqrt();
        let im = if z.im < T::zero() { -t } else { t };
        Complex::new(z.im.abs() / (two * t), im)
    }
}

/// `exp(i·π·num/den)` with exact integer range reduction.
///
/// The reduced angle lies in `[0, π/4]` and is evaluated by Taylor series in
/// the scalar's own arithmetic, so the result is accurate to the working
/// precision even for types whose transcendental functions are not.
pub fn cis_pi_ratio<T: Real>(num: i64, den: i64) -> Complex<T> {
    assert!(den > 0, "denominator must be positive");
    // angle = π·q/den with q in [0, 2·den)
    let q = num.rem_euclid(2 * den);
    // octant index and remainder: 4q = o·den + r
    let four_q = 4 * q as i128;
    let den128 = den as i128;
    let o = (four_q / den128) as i64;
    let r = (four_q % den128) as i64;
    let quarter_pi = T::FRAC_PI_4();
    let (quadrant, base) = if o % 2 == 0 {
        let x = quarter_pi * T::from_i64(r).unwrap() / T::from_i64(den).unwrap();
        (o / 2, taylor_cis(x))
    } else {
        let x = quarter_pi * T::from_i64(den - r).unwrap() / T::from_i64(den).unwrap();
        let c = taylor_cis(x);
        ((o + 1) / 2, Complex::new(c.re, -c.im))
    };
    match quadrant.rem_euclid(4) {
        0 => base,
        1 => Complex::new(-base.im, base.re),
        2 => Complex::new(-base.re, -base.im),
        _ => Complex::new(base.im, -base.re),
    }
}

fn taylor_cis<T: Real>(x: T) -> Complex<T> {
    let x2 = x * x;
    let tiny = T::epsilon() * T::lit(1e-3);
    // cos
    let mut term = T::one();
    let mut cos = T::one();
    let mut k = 0usize;
    loop {
        k += 2;
        term = -term * x2 / T::from_usize_exact(k * (k - 1));
        cos = cos + term;
        if term.abs() <= tiny {
            break;
        }
    }
    // sin
    let mut term = x;
    let mut sin = x;
    let mut k = 1usize;
    loop {
        k += 2;
        term = -term * x2 / T::from_usize_exact(k * (k - 1));
        sin = sin + term;
        if term.abs() <= tiny {
            break;
        }
    }
    Complex::new(cos, sin)
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CompSum<T: Real> {
    sum: Complex<T>,
    carry: Complex<T>,
}

impl<T: Real> CompSum<T> {
    pub(crate) fn new() -> Self {
        Self {
            sum: czero(),
            carry: czero(),
        }
    }

    pub(crate) fn add(&mut self, v: Complex<T>) {
        self.sum.re = neumaier(self.sum.re, v.re, &mut self.carry.re);
        self.sum.im = neumaier(self.sum.im, v.im, &mut self.carry.im);
    }

    pub(crate) fn value(&self) -> Complex<T> {
        self.sum + self.carry
    }
}

#[inline]
fn neumaier<T: Real>(sum: T, v: T, carry: &mut T) -> T {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *carry = *carry + ((sum - t) + v);
    } else {
        *carry = *carry + ((v - t) + sum);
    }
    t
}
