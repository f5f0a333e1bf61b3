//! Range-extended products and compensated summation.
//!
//! Eigenfunction tables multiply polynomial growth (|u|^m) by weights that
//! decay like exp(-c log^2 |u|). Evaluated separately both factors leave the
//! double range on wide windows, so products are carried as a complex
//! mantissa times an explicit power of two and only collapsed at the end.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Mul};

/// `mant * 2^exp`, with `mant` kept in `[1, 2)` (by its larger component).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    mant: Complex64,
    exp: i32,
}

/// Multiply by `2^k` for any `k`, stepping so the scale factor never overflows.
pub fn ldexp(mut x: f64, mut k: i32) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(k)
}

// Binary exponent of a finite nonzero value.
fn ilogb(x: f64) -> i32 {
    let bits = x.abs().to_bits();
    let e = ((bits >> 52) & 0x7ff) as i32;
    if e == 0 {
        // subnormal
        ilogb(x * 2f64.powi(64)) - 64
    } else {
        e - 1023
    }
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mant: Complex64::new(0.0, 0.0),
        exp: 0,
    };
    pub const ONE: Scaled = Scaled {
        mant: Complex64::new(1.0, 0.0),
        exp: 0,
    };

    pub fn new(z: Complex64) -> Self {
        Scaled { mant: z, exp: 0 }.normalized()
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0))
    }

    fn normalized(self) -> Self {
        let m = self.mant.re.abs().max(self.mant.im.abs());
        if m == 0.0 {
            return Scaled::ZERO;
        }
        if !m.is_finite() {
            return self;
        }
        let e = ilogb(m);
        Scaled {
            mant: Complex64::new(ldexp(self.mant.re, -e), ldexp(self.mant.im, -e)),
            exp: self.exp + e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mant.re.is_finite() && self.mant.im.is_finite()
    }

    pub fn recip(self) -> Self {
        Scaled {
            mant: self.mant.inv(),
            exp: -self.exp,
        }
        .normalized()
    }

    pub fn conj(self) -> Self {
        Scaled {
            mant: self.mant.conj(),
            exp: self.exp,
        }
    }

    pub fn scale(self, z: Complex64) -> Self {
        Scaled {
            mant: self.mant * z,
            exp: self.exp,
        }
        .normalized()
    }

    /// `base^n` by repeated squaring, immune to overflow.
    pub fn powi(base: f64, n: i64) -> Self {
        let mut result = Scaled::ONE;
        let mut b = Scaled::from_real(base);
        if n < 0 {
            b = b.recip();
        }
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result * b;
            }
            b = b * b;
            e >>= 1;
        }
        result
    }

    /// `log2 |value|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mant.norm().log2() + self.exp as f64
    }

    pub fn abs(&self) -> Scaled {
        Scaled {
            mant: Complex64::new(self.mant.norm(), 0.0),
            exp: self.exp,
        }
        .normalized()
    }

    /// Collapse to an ordinary complex number (may underflow to 0 or overflow).
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(ldexp(self.mant.re, self.exp), ldexp(self.mant.im, self.exp))
    }

    /// Real part of the collapsed value.
    pub fn to_f64(self) -> f64 {
        ldexp(self.mant.re, self.exp)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled {
            mant: self.mant * rhs.mant,
            exp: self.exp + rhs.exp,
        }
        .normalized()
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let e = self.exp.max(rhs.exp);
        let a = self.mant * ldexp(1.0, self.exp - e);
        let b = rhs.mant * ldexp(1.0, rhs.exp - e);
        Scaled { mant: a + b, exp: e }.normalized()
    }
}

impl Scaled {
    /// Exponent of the leading binary digit (`i32::MIN` for zero).
    pub fn exponent(&self) -> i32 {
        if self.is_zero() {
            i32::MIN
        } else {
            self.exp
        }
    }

    /// Mantissa rescaled to `2^exp`, i.e. `value / 2^exp`.
    pub fn mantissa_at(&self, exp: i32) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let d = self.exp.saturating_sub(exp);
        Complex64::new(ldexp(self.mant.re, d), ldexp(self.mant.im, d))
    }

    /// Rebuild from a mantissa expressed at `2^exp`.
    pub fn from_parts(mant: Complex64, exp: i32) -> Self {
        Scaled { mant, exp }.normalized()
    }
}

/// Compensated sum of range-extended values, aligned to the largest exponent.
pub fn scaled_sum(values: &[Scaled]) -> Scaled {
    let e = values.iter().map(Scaled::exponent).max().unwrap_or(i32::MIN);
    if e == i32::MIN {
        return Scaled::ZERO;
    }
    let s: CompensatedSum = values.iter().map(|v| v.mantissa_at(e)).collect();
    Scaled::from_parts(s.value(), e)
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Self {
        Scaled::from_real(x)
    }
}

impl From<Complex64> for Scaled {
    fn from(z: Complex64) -> Self {
        Scaled::new(z)
    }
}

/// Kahan–Babuška–Neumaier summation on both components of a complex sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

#[inline]
fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl AddAssign<Complex64> for CompensatedSum {
    fn add_assign(&mut self, rhs: Complex64) {
        self.add(rhs);
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for z in iter {
            s.add(z);
        }
        s
    }
}
