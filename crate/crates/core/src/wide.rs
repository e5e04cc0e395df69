//! 256-bit software floating point.
//!
//! Slow, but with about 77 significant digits it can resolve quantities that
//! sit far below double-double rounding, such as exponentially small
//! diagnostic defects. Addition, subtraction, multiplication and division
//! are correctly rounded; square root and the transcendental functions are
//! accurate to a few units in the last place.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::sync::OnceLock;

use num_traits::{
    Float, FloatConst, FloatErrorKind, FromPrimitive, Num, NumCast, One, ParseFloatError, ToPrimitive, Zero,
};

/// Binary exponent range of `|x|`, i.e. `2^(E-1) ≤ |x| < 2^E` with `E` in it.
const MAX_E: i64 = 1 << 40;
const MIN_E: i64 = -(1 << 40);

const PI_DIGITS: &str =
    "3.1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421";
const LN2_DIGITS: &str =
    "0.69314718055994530941723212145817656807550013436025525412068000949339362196969471560586332699642";
const LN10_DIGITS: &str =
    "2.3025850929940456840179914546843642076011014886287729760333279009675726096773524802359972050896";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Finite,
    Inf,
    Nan,
}

/// Binary floating point with a 256-bit significand.
///
/// A finite value is `mant · 2^exp`, where `mant` (little-endian limbs) is
/// either zero or has its top bit set.
#[derive(Clone, Copy)]
pub struct Float256 {
    class: Class,
    neg: bool,
    exp: i64,
    mant: [u64; 4],
}

fn leading_zeros(m: &[u64]) -> usize {
    let mut n = 0;
    for &limb in m.iter().rev() {
        if limb == 0 {
            n += 64;
        } else {
            return n + limb.leading_zeros() as usize;
        }
    }
    n
}

fn shl(m: &mut [u64], s: usize) {
    let (q, r) = (s / 64, (s % 64) as u32);
    for i in (0..m.len()).rev() {
        let v = if i >= q {
            let hi = m[i - q] << r;
            let lo = if r > 0 && i > q { m[i - q - 1] >> (64 - r) } else { 0 };
            hi | lo
        } else {
            0
        };
        m[i] = v;
    }
}

/// Shifts right and reports whether any set bit was shifted out.
fn shr_sticky(m: &mut [u64], s: usize) -> bool {
    let len = m.len();
    if s >= 64 * len {
        let sticky = m.iter().any(|&v| v != 0);
        m.iter_mut().for_each(|v| *v = 0);
        return sticky;
    }
    let (q, r) = (s / 64, (s % 64) as u32);
    let mut sticky = m[..q].iter().any(|&v| v != 0);
    if r > 0 {
        sticky |= m[q] & ((1u64 << r) - 1) != 0;
    }
    for i in 0..len {
        let v = if i + q < len {
            let lo = m[i + q] >> r;
            let hi = if r > 0 && i + q + 1 < len {
                m[i + q + 1] << (64 - r)
            } else {
                0
            };
            lo | hi
        } else {
            0
        };
        m[i] = v;
    }
    sticky
}

fn add_limbs(a: &mut [u64], b: &[u64]) -> bool {
    let mut carry = false;
    for (x, &y) in a.iter_mut().zip(b) {
        let (s1, c1) = x.overflowing_add(y);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        *x = s2;
        carry = c1 || c2;
    }
    carry
}

fn sub_limbs(a: &mut [u64], b: &[u64]) {
    let mut borrow = false;
    for (x, &y) in a.iter_mut().zip(b) {
        let (d1, b1) = x.overflowing_sub(y);
        let (d2, b2) = d1.overflowing_sub(borrow as u64);
        *x = d2;
        borrow = b1 || b2;
    }
}

fn cmp_limbs(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

fn ldexp_f64(mut v: f64, mut e: i64) -> f64 {
    let big = 2f64.powi(1000);
    let small = 2f64.powi(-1000);
    while e > 1000 && v.is_finite() && v != 0.0 {
        v *= big;
        e -= 1000;
    }
    while e < -1000 && v != 0.0 {
        v *= small;
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl Float256 {
    const ZERO: Self = Self {
        class: Class::Finite,
        neg: false,
        exp: 0,
        mant: [0; 4],
    };

    const NAN: Self = Self {
        class: Class::Nan,
        neg: false,
        exp: 0,
        mant: [0; 4],
    };

    fn signed_zero(neg: bool) -> Self {
        Self { neg, ..Self::ZERO }
    }

    fn inf(neg: bool) -> Self {
        Self {
            class: Class::Inf,
            neg,
            ..Self::ZERO
        }
    }

    fn is_zero_value(&self) -> bool {
        self.class == Class::Finite && self.mant == [0; 4]
    }

    /// Normalizes and rounds `m · 2^exp` to nearest, ties to even.
    fn pack(neg: bool, mut exp: i64, mut m: [u64; 8]) -> Self {
        let lz = leading_zeros(&m);
        if lz == 512 {
            return Self::signed_zero(neg);
        }
        shl(&mut m, lz);
        exp -= lz as i64;
        let mut mant = [m[4], m[5], m[6], m[7]];
        let half = m[3] >> 63 == 1;
        let rest = (m[3] << 1) != 0 || m[2] != 0 || m[1] != 0 || m[0] != 0;
        if half && (rest || mant[0] & 1 == 1) && add_limbs(&mut mant, &[1, 0, 0, 0]) {
            mant = [0, 0, 0, 1 << 63];
            exp += 1;
        }
        exp += 256;
        let e = exp + 256;
        if e > MAX_E {
            return Self::inf(neg);
        }
        if e < MIN_E {
            return Self::signed_zero(neg);
        }
        Self {
            class: Class::Finite,
            neg,
            exp,
            mant,
        }
    }

    fn from_parts(neg: bool, m: u64, exp: i64) -> Self {
        let mut w = [0u64; 8];
        w[0] = m;
        Self::pack(neg, exp, w)
    }

    /// `self · 2^k`.
    pub fn ldexp(self, k: i64) -> Self {
        if self.class != Class::Finite || self.is_zero_value() {
            return self;
        }
        let e = self.exp + 256 + k;
        if e > MAX_E {
            return Self::inf(self.neg);
        }
        if e < MIN_E {
            return Self::signed_zero(self.neg);
        }
        Self {
            exp: self.exp + k,
            ..self
        }
    }

    /// Nearest `f64`.
    pub fn to_f64_nearest(self) -> f64 {
        match self.class {
            Class::Nan => f64::NAN,
            Class::Inf => {
                if self.neg {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
            Class::Finite => {
                if self.is_zero_value() {
                    return if self.neg { -0.0 } else { 0.0 };
                }
                let sticky = self.mant[..3].iter().any(|&v| v != 0);
                let top = self.mant[3] | (sticky as u64);
                let v = ldexp_f64(top as f64, self.exp + 192);
                if self.neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    fn mag_cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero_value(), other.is_zero_value()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        self.exp
            .cmp(&other.exp)
            .then_with(|| cmp_limbs(&self.mant, &other.mant))
    }

    fn add_signed(a: Self, b: Self, b_neg: bool) -> Self {
        match (a.class, b.class) {
            (Class::Nan, _) | (_, Class::Nan) => return Self::NAN,
            (Class::Inf, Class::Inf) => {
                return if a.neg == b_neg { a } else { Self::NAN };
            }
            (Class::Inf, _) => return a,
            (_, Class::Inf) => return Self::inf(b_neg),
            _ => {}
        }
        if b.is_zero_value() {
            if a.is_zero_value() {
                return Self::signed_zero(a.neg && b_neg);
            }
            return a;
        }
        if a.is_zero_value() {
            return Self { neg: b_neg, ..b };
        }
        let (big, big_neg, small, small_neg) = if a.mag_cmp(&b) != Ordering::Less {
            (a, a.neg, b, b_neg)
        } else {
            (b, b_neg, a, a.neg)
        };
        let d = (big.exp - small.exp) as usize;
        let mut x = [0u64; 8];
        x[4..].copy_from_slice(&big.mant);
        shr_sticky(&mut x, 1);
        let mut y = [0u64; 8];
        y[4..].copy_from_slice(&small.mant);
        shr_sticky(&mut y, 1);
        if shr_sticky(&mut y, d) {
            y[0] |= 1;
        }
        let exp = big.exp - 255;
        if big_neg == small_neg {
            add_limbs(&mut x, &y);
        } else {
            sub_limbs(&mut x, &y);
            if x == [0; 8] {
                return Self::ZERO;
            }
        }
        Self::pack(big_neg, exp, x)
    }

    fn mul_finite(a: Self, b: Self) -> Self {
        let neg = a.neg != b.neg;
        match (a.class, b.class) {
            (Class::Nan, _) | (_, Class::Nan) => return Self::NAN,
            (Class::Inf, _) | (_, Class::Inf) => {
                return if a.is_zero_value() || b.is_zero_value() {
                    Self::NAN
                } else {
                    Self::inf(neg)
                };
            }
            _ => {}
        }
        if a.is_zero_value() || b.is_zero_value() {
            return Self::signed_zero(neg);
        }
        let mut p = [0u64; 8];
        for i in 0..4 {
            let mut carry: u128 = 0;
            for j in 0..4 {
                let t = (a.mant[i] as u128) * (b.mant[j] as u128) + (p[i + j] as u128) + carry;
                p[i + j] = t as u64;
                carry = t >> 64;
            }
            p[i + 4] = carry as u64;
        }
        Self::pack(neg, a.exp + b.exp, p)
    }

    fn div_finite(a: Self, b: Self) -> Self {
        let neg = a.neg != b.neg;
        match (a.class, b.class) {
            (Class::Nan, _) | (_, Class::Nan) | (Class::Inf, Class::Inf) => return Self::NAN,
            (Class::Inf, _) => return Self::inf(neg),
            (_, Class::Inf) => return Self::signed_zero(neg),
            _ => {}
        }
        if b.is_zero_value() {
            return if a.is_zero_value() { Self::NAN } else { Self::inf(neg) };
        }
        if a.is_zero_value() {
            return Self::signed_zero(neg);
        }
        // restoring long division, one quotient bit per step
        let mut r = [0u64; 5];
        r[..4].copy_from_slice(&a.mant);
        let mut d = [0u64; 5];
        d[..4].copy_from_slice(&b.mant);
        let mut q = [0u64; 5];
        for _ in 0..300 {
            shl(&mut q, 1);
            if cmp_limbs(&r, &d) != Ordering::Less {
                sub_limbs(&mut r, &d);
                q[0] |= 1;
            }
            shl(&mut r, 1);
        }
        let mut m = [0u64; 8];
        m[..5].copy_from_slice(&q);
        shl(&mut m, 1);
        if r.iter().any(|&v| v != 0) {
            m[0] |= 1;
        }
        Self::pack(neg, a.exp - b.exp - 300, m)
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first()? {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (digits, exp10) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
            None => (body, 0),
        };
        let ten = Self::from_parts(false, 10, 0);
        let mut acc = Self::ZERO;
        let mut frac_digits = 0i64;
        let mut seen_point = false;
        let mut seen_digit = false;
        for ch in digits.chars() {
            match ch {
                '.' if !seen_point => seen_point = true,
                '0'..='9' => {
                    seen_digit = true;
                    let d = Self::from_parts(false, (ch as u8 - b'0') as u64, 0);
                    acc = acc * ten + d;
                    if seen_point {
                        frac_digits += 1;
                    }
                }
                _ => return None,
            }
        }
        if !seen_digit {
            return None;
        }
        let e = exp10 - frac_digits;
        let scale = ten.powi(i32::try_from(e.abs()).ok()?);
        let v = if e < 0 { acc / scale } else { acc * scale };
        Some(if neg { -v } else { v })
    }

    fn cached(cell: &'static OnceLock<Float256>, init: fn() -> Float256) -> Float256 {
        *cell.get_or_init(init)
    }

    fn pi() -> Self {
        static CELL: OnceLock<Float256> = OnceLock::new();
        Self::cached(&CELL, || Self::parse_decimal(PI_DIGITS).unwrap())
    }

    fn ln2() -> Self {
        static CELL: OnceLock<Float256> = OnceLock::new();
        Self::cached(&CELL, || Self::parse_decimal(LN2_DIGITS).unwrap())
    }

    fn ln10() -> Self {
        static CELL: OnceLock<Float256> = OnceLock::new();
        Self::cached(&CELL, || Self::parse_decimal(LN10_DIGITS).unwrap())
    }

    fn tiny() -> Self {
        Self::one().ldexp(-265)
    }

    fn sin_cos_reduced(r: Self) -> (Self, Self) {
        let r2 = r * r;
        let tiny = Self::tiny();
        let mut term = Self::one();
        let mut cos = Self::one();
        let mut k = 0u64;
        loop {
            k += 2;
            term = -term * r2 / Self::from_parts(false, k * (k - 1), 0);
            cos += term;
            if term.abs() <= tiny {
                break;
            }
        }
        let mut term = r;
        let mut sin = r;
        let mut k = 1u64;
        loop {
            k += 2;
            term = -term * r2 / Self::from_parts(false, k * (k - 1), 0);
            sin += term;
            if term.abs() <= tiny {
                break;
            }
        }
        (sin, cos)
    }
}

impl Default for Float256 {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for Float256 {
    fn from(x: f64) -> Self {
        if x.is_nan() {
            return Self::NAN;
        }
        if x.is_infinite() {
            return Self::inf(x < 0.0);
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let ebits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if ebits == 0 {
            (frac, -1074)
        } else {
            (frac | 1 << 52, ebits - 1075)
        };
        Self::from_parts(neg, m, e)
    }
}

impl fmt::Display for Float256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64_nearest(), f)
    }
}

impl fmt::Debug for Float256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Float256({:e})", self.to_f64_nearest())
    }
}

impl PartialEq for Float256 {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Float256 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.class == Class::Nan || other.class == Class::Nan {
            return None;
        }
        let a_neg = self.neg && !self.is_zero_value();
        let b_neg = other.neg && !other.is_zero_value();
        if a_neg != b_neg {
            return Some(if a_neg { Ordering::Less } else { Ordering::Greater });
        }
        let mag = match (self.class, other.class) {
            (Class::Inf, Class::Inf) => Ordering::Equal,
            (Class::Inf, _) => Ordering::Greater,
            (_, Class::Inf) => Ordering::Less,
            _ => self.mag_cmp(other),
        };
        Some(if a_neg { mag.reverse() } else { mag })
    }
}

impl Add for Float256 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::add_signed(self, rhs, rhs.neg)
    }
}

impl Sub for Float256 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::add_signed(self, rhs, !rhs.neg)
    }
}

impl Mul for Float256 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::mul_finite(self, rhs)
    }
}

impl Div for Float256 {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::div_finite(self, rhs)
    }
}

impl Rem for Float256 {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        self - (self / rhs).trunc() * rhs
    }
}

impl Neg for Float256 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { neg: !self.neg, ..self }
    }
}

macro_rules! assign_op {
    ($($tr:ident $f:ident $op:tt),*) => {
        $(impl $tr for Float256 {
            fn $f(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        })*
    };
}

assign_op!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl Zero for Float256 {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.is_zero_value()
    }
}

impl One for Float256 {
    fn one() -> Self {
        Self::from_parts(false, 1, 0)
    }
}

impl Num for Float256 {
    type FromStrRadixErr = ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let invalid = ParseFloatError {
            kind: FloatErrorKind::Invalid,
        };
        if radix != 10 {
            return Err(invalid);
        }
        Self::parse_decimal(s).ok_or(invalid)
    }
}

impl ToPrimitive for Float256 {
    fn to_i64(&self) -> Option<i64> {
        let mag = self.trunc().abs().to_u64()?;
        if self.neg {
            if mag <= 1 << 63 {
                Some((mag as i64).wrapping_neg())
            } else {
                None
            }
        } else {
            i64::try_from(mag).ok()
        }
    }

    fn to_u64(&self) -> Option<u64> {
        if self.class != Class::Finite {
            return None;
        }
        let t = self.trunc();
        if t.is_zero_value() {
            return Some(0);
        }
        if t.neg {
            return None;
        }
        let e = t.exp + 256;
        if e > 64 {
            return None;
        }
        Some(t.mant[3] >> (64 - e))
    }

    fn to_f64(&self) -> Option<f64> {
        Some(self.to_f64_nearest())
    }
}

impl NumCast for Float256 {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        let f = n.to_f64()?;
        if f.fract() == 0.0 {
            if let Some(i) = n.to_i64() {
                return Self::from_i64(i);
            }
        }
        Some(<Self as From<f64>>::from(f))
    }
}

impl FromPrimitive for Float256 {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::from_parts(n < 0, n.unsigned_abs(), 0))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::from_parts(false, n, 0))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(<Self as From<f64>>::from(n))
    }
}

impl FloatConst for Float256 {
    fn E() -> Self {
        static CELL: OnceLock<Float256> = OnceLock::new();
        Self::cached(&CELL, || Self::one().exp())
    }
    fn FRAC_1_PI() -> Self {
        Self::one() / Self::pi()
    }
    fn FRAC_1_SQRT_2() -> Self {
        Self::one().ldexp(-1).sqrt()
    }
    fn FRAC_2_PI() -> Self {
        Self::one().ldexp(1) / Self::pi()
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Self::one().ldexp(1) / Self::pi().sqrt()
    }
    fn FRAC_PI_2() -> Self {
        Self::pi().ldexp(-1)
    }
    fn FRAC_PI_3() -> Self {
        Self::pi() / Self::from_parts(false, 3, 0)
    }
    fn FRAC_PI_4() -> Self {
        Self::pi().ldexp(-2)
    }
    fn FRAC_PI_6() -> Self {
        Self::pi() / Self::from_parts(false, 6, 0)
    }
    fn FRAC_PI_8() -> Self {
        Self::pi().ldexp(-3)
    }
    fn LN_10() -> Self {
        Self::ln10()
    }
    fn LN_2() -> Self {
        Self::ln2()
    }
    fn LOG10_E() -> Self {
        Self::one() / Self::ln10()
    }
    fn LOG2_E() -> Self {
        Self::one() / Self::ln2()
    }
    fn PI() -> Self {
        Self::pi()
    }
    fn SQRT_2() -> Self {
        Self::from_parts(false, 2, 0).sqrt()
    }
}

impl Float for Float256 {
    fn nan() -> Self {
        Self::NAN
    }
    fn infinity() -> Self {
        Self::inf(false)
    }
    fn neg_infinity() -> Self {
        Self::inf(true)
    }
    fn neg_zero() -> Self {
        Self::signed_zero(true)
    }
    fn min_value() -> Self {
        -Self::max_value()
    }
    fn min_positive_value() -> Self {
        Self {
            class: Class::Finite,
            neg: false,
            exp: MIN_E - 256,
            mant: [0, 0, 0, 1 << 63],
        }
    }
    fn epsilon() -> Self {
        Self::one().ldexp(-255)
    }
    fn max_value() -> Self {
        Self {
            class: Class::Finite,
            neg: false,
            exp: MAX_E - 256,
            mant: [u64::MAX; 4],
        }
    }
    fn is_nan(self) -> bool {
        self.class == Class::Nan
    }
    fn is_infinite(self) -> bool {
        self.class == Class::Inf
    }
    fn is_finite(self) -> bool {
        self.class == Class::Finite
    }
    fn is_normal(self) -> bool {
        self.class == Class::Finite && !self.is_zero_value()
    }
    fn classify(self) -> FpCategory {
        match self.class {
            Class::Nan => FpCategory::Nan,
            Class::Inf => FpCategory::Infinite,
            Class::Finite if self.is_zero_value() => FpCategory::Zero,
            Class::Finite => FpCategory::Normal,
        }
    }
    fn floor(self) -> Self {
        let t = self.trunc();
        if self.neg && t != self {
            t - Self::one()
        } else {
            t
        }
    }
    fn ceil(self) -> Self {
        let t = self.trunc();
        if !self.neg && t != self {
            t + Self::one()
        } else {
            t
        }
    }
    fn round(self) -> Self {
        let half = Self::one().ldexp(-1);
        if self.neg {
            -(-self + half).floor()
        } else {
            (self + half).floor()
        }
    }
    fn trunc(self) -> Self {
        if self.class != Class::Finite || self.is_zero_value() {
            return self;
        }
        let e = self.exp + 256;
        if e <= 0 {
            return Self::signed_zero(self.neg);
        }
        if e >= 256 {
            return self;
        }
        let mut mant = self.mant;
        let frac_bits = (256 - e) as usize;
        for (i, limb) in mant.iter_mut().enumerate() {
            let lo = i * 64;
            if lo + 64 <= frac_bits {
                *limb = 0;
            } else if lo < frac_bits {
                *limb &= !((1u64 << (frac_bits - lo)) - 1);
            }
        }
        Self { mant, ..self }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        Self { neg: false, ..self }
    }
    fn signum(self) -> Self {
        if self.is_nan() {
            self
        } else if self.neg {
            -Self::one()
        } else {
            Self::one()
        }
    }
    fn is_sign_positive(self) -> bool {
        !self.neg
    }
    fn is_sign_negative(self) -> bool {
        self.neg
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
    fn powf(self, n: Self) -> Self {
        if n.is_zero_value() {
            return Self::one();
        }
        if self.is_zero_value() {
            return if n.neg { Self::inf(false) } else { Self::ZERO };
        }
        (n * self.ln()).exp()
    }
    fn sqrt(self) -> Self {
        match self.class {
            Class::Nan => return self,
            Class::Inf => return if self.neg { Self::NAN } else { self },
            Class::Finite => {}
        }
        if self.is_zero_value() {
            return self;
        }
        if self.neg {
            return Self::NAN;
        }
        let e = self.exp + 256;
        let k = e.div_euclid(2);
        let a = self.ldexp(-2 * k);
        let mut x = <Self as From<f64>>::from(a.to_f64_nearest().sqrt());
        for _ in 0..4 {
            x = (x + a / x).ldexp(-1);
        }
        x.ldexp(k)
    }
    fn exp(self) -> Self {
        match self.class {
            Class::Nan => return self,
            Class::Inf => return if self.neg { Self::ZERO } else { self },
            Class::Finite => {}
        }
        if self.is_zero_value() {
            return Self::one();
        }
        let approx = self.to_f64_nearest();
        if approx > 1e12 {
            return Self::inf(false);
        }
        if approx < -1e12 {
            return Self::ZERO;
        }
        let ln2 = Self::ln2();
        let k = (self / ln2).round();
        let r = (self - k * ln2).ldexp(-8);
        let tiny = Self::tiny();
        let mut term = Self::one();
        let mut sum = Self::one();
        let mut n = 1u64;
        loop {
            term = term * r / Self::from_parts(false, n, 0);
            sum += term;
            if term.abs() <= tiny {
                break;
            }
            n += 1;
        }
        for _ in 0..8 {
            sum = sum * sum;
        }
        sum.ldexp(k.to_i64().unwrap_or(0))
    }
    fn exp2(self) -> Self {
        (self * Self::ln2()).exp()
    }
    fn ln(self) -> Self {
        match self.class {
            Class::Nan => return self,
            Class::Inf => return if self.neg { Self::NAN } else { self },
            Class::Finite => {}
        }
        if self.is_zero_value() {
            return Self::inf(true);
        }
        if self.neg {
            return Self::NAN;
        }
        // self = m · 2^e with m in [0.5, 2)
        let mut e = self.exp + 256;
        if e == 1 {
            e = 0;
        }
        let m = self.ldexp(-e);
        let mut y = <Self as From<f64>>::from(m.to_f64_nearest().ln());
        for _ in 0..3 {
            let ey = y.exp();
            y += ((m - ey) / (m + ey)).ldexp(1);
        }
        y + Self::ln2() * Self::from_i64(e).unwrap()
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn log2(self) -> Self {
        self.ln() / Self::ln2()
    }
    fn log10(self) -> Self {
        self.ln() / Self::ln10()
    }
    fn max(self, other: Self) -> Self {
        if self.is_nan() || other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if self.is_nan() || other < self {
            other
        } else {
            self
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        (self - other).max(Self::ZERO)
    }
    fn cbrt(self) -> Self {
        if self.is_zero_value() || !self.is_finite() {
            return self;
        }
        let a = self.abs();
        let mut y = (a.ln() / Self::from_parts(false, 3, 0)).exp();
        y = y - (y * y * y - a) / (Self::from_parts(false, 3, 0) * y * y);
        if self.neg {
            -y
        } else {
            y
        }
    }
    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn tan(self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }
    fn asin(self) -> Self {
        let one = Self::one();
        self.atan2(((one - self) * (one + self)).sqrt())
    }
    fn acos(self) -> Self {
        let one = Self::one();
        ((one - self) * (one + self)).sqrt().atan2(self)
    }
    fn atan(self) -> Self {
        match self.class {
            Class::Nan => return self,
            Class::Inf => {
                let h = Self::pi().ldexp(-1);
                return if self.neg { -h } else { h };
            }
            Class::Finite => {}
        }
        if self.is_zero_value() {
            return self;
        }
        let one = Self::one();
        let mut x = self.abs();
        let invert = x > one;
        if invert {
            x = one / x;
        }
        // three argument halvings bring x below tan(π/32)
        for _ in 0..3 {
            x = x / (one + (one + x * x).sqrt());
        }
        let x2 = x * x;
        let tiny = Self::tiny();
        let mut power = x;
        let mut sum = x;
        let mut k = 1u64;
        loop {
            power = -power * x2;
            let term = power / Self::from_parts(false, 2 * k + 1, 0);
            sum += term;
            if term.abs() <= tiny {
                break;
            }
            k += 1;
        }
        let mut y = sum.ldexp(3);
        if invert {
            y = Self::pi().ldexp(-1) - y;
        }
        if self.neg {
            -y
        } else {
            y
        }
    }
    fn atan2(self, other: Self) -> Self {
        let (y, x) = (self, other);
        if y.is_nan() || x.is_nan() {
            return Self::NAN;
        }
        let pi = Self::pi();
        if x.is_zero_value() {
            if y.is_zero_value() {
                return if x.neg {
                    if y.neg {
                        -pi
                    } else {
                        pi
                    }
                } else {
                    y
                };
            }
            let h = pi.ldexp(-1);
            return if y.neg { -h } else { h };
        }
        let base = (y / x).atan();
        if !x.neg {
            base
        } else if y.neg {
            base - pi
        } else {
            base + pi
        }
    }
    fn sin_cos(self) -> (Self, Self) {
        if !self.is_finite() {
            return (Self::NAN, Self::NAN);
        }
        let half_pi = Self::pi().ldexp(-1);
        let k = (self / half_pi).round();
        let r = self - k * half_pi;
        let (s, c) = Self::sin_cos_reduced(r);
        let q = k.rem(Self::from_parts(false, 4, 0)).to_i64().unwrap_or(0).rem_euclid(4);
        match q {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
    fn exp_m1(self) -> Self {
        if self.abs() < Self::one().ldexp(-1) {
            let tiny = Self::tiny() * self.abs();
            let mut term = self;
            let mut sum = self;
            let mut n = 1u64;
            loop {
                n += 1;
                term = term * self / Self::from_parts(false, n, 0);
                sum += term;
                if term.abs() <= tiny {
                    break;
                }
            }
            sum
        } else {
            self.exp() - Self::one()
        }
    }
    fn ln_1p(self) -> Self {
        let u = Self::one() + self;
        let d = u - Self::one();
        if d.is_zero_value() {
            self
        } else {
            u.ln() * self / d
        }
    }
    fn sinh(self) -> Self {
        let e = self.exp();
        (e - e.recip()).ldexp(-1)
    }
    fn cosh(self) -> Self {
        let e = self.exp();
        (e + e.recip()).ldexp(-1)
    }
    fn tanh(self) -> Self {
        let e2 = self.ldexp(1).exp();
        (e2 - Self::one()) / (e2 + Self::one())
    }
    fn asinh(self) -> Self {
        let a = self.abs();
        let y = (a + (a * a + Self::one()).sqrt()).ln();
        if self.neg {
            -y
        } else {
            y
        }
    }
    fn acosh(self) -> Self {
        (self + (self * self - Self::one()).sqrt()).ln()
    }
    fn atanh(self) -> Self {
        let one = Self::one();
        ((one + self) / (one - self)).ln().ldexp(-1)
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        Float::integer_decode(self.to_f64_nearest())
    }
}
