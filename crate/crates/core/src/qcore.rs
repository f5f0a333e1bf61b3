//! Foundational q-calculus: deformation constants, q-Pochhammer symbols,
//! the q-exponential, the symmetric q-derivative and Jackson sums.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, Scaled};

/// Accepted range for the deformation parameter.
pub const Q_MIN: f64 = 1.0 + 1e-6;
pub const Q_MAX: f64 = 1e6;

/// Factors of `(z; q^-2)_inf` below this magnitude are treated as poles of `e_q`.
pub const POLE_GUARD: f64 = 1e-300;

/// The deformation parameter `q > 1` and the constants derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QParams {
    q: f64,
    lambda: f64,
    base2: f64,
    base4: f64,
}

impl QParams {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || !(Q_MIN..=Q_MAX).contains(&q) {
            return Err(Error::InvalidParameter(format!(
                "q must lie in [{Q_MIN}, {Q_MAX}], got {q}"
            )));
        }
        Ok(QParams {
            q,
            lambda: q - 1.0 / q,
            base2: 1.0 / (q * q),
            base4: 1.0 / (q * q * q * q),
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `lambda = q - 1/q`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `q^-2`.
    pub fn base2(&self) -> f64 {
        self.base2
    }

    /// `q^-4`.
    pub fn base4(&self) -> f64 {
        self.base4
    }

    /// `q^n` for integer `n`.
    pub fn pow(&self, n: i64) -> f64 {
        self.q.powi(n as i32)
    }

    /// `q^s` for real `s`.
    pub fn powf(&self, s: f64) -> f64 {
        self.q.powf(s)
    }

    /// `1/(1 - q^-2)`, the common limit of both spectral families.
    pub fn accumulation_point(&self) -> f64 {
        1.0 / (1.0 - self.base2)
    }
}

/// Truncation control shared by every series and product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub rel: f64,
    pub max_terms: usize,
}

impl Tolerance {
    pub fn new(rel: f64, max_terms: usize) -> Result<Self> {
        if !(rel > 0.0 && rel < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "relative tolerance must lie in (0, 1), got {rel}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be at least 1".into()));
        }
        Ok(Tolerance { rel, max_terms })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-16,
            max_terms: 10_000,
        }
    }
}

/// `(a; base)_n = prod_{i<n} (1 - a base^i)`.
pub fn qpoch_finite(a: Complex64, base: f64, n: usize) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    let mut t = a;
    for _ in 0..n {
        prod *= 1.0 - t;
        t *= base;
    }
    prod
}

/// Real-argument convenience wrapper around [`qpoch_finite`].
pub fn qpoch_finite_real(a: f64, base: f64, n: usize) -> f64 {
    qpoch_finite(Complex64::new(a, 0.0), base, n).re
}

// Walks the factors of (a; base)_inf under the tail-bound stopping rule:
// stop at N once |a| |base|^N < rel (1 - |base|).
fn for_each_factor<F: FnMut(usize, Complex64) -> Result<()>>(
    a: Complex64,
    base: f64,
    tol: &Tolerance,
    mut visit: F,
) -> Result<usize> {
    if !(base.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "infinite q-Pochhammer needs |base| < 1, got {base}"
        )));
    }
    let bound = tol.rel * (1.0 - base.abs());
    let mut t = a;
    let mut i = 0usize;
    while t.norm() >= bound {
        if i >= tol.max_terms {
            return Err(Error::Convergence {
                terms: i,
                partial: Complex64::new(f64::NAN, f64::NAN),
            });
        }
        visit(i, 1.0 - t)?;
        t *= base;
        i += 1;
    }
    Ok(i)
}

/// `(a; base)_inf`, truncated by the tail bound. Range-extended result.
pub fn qpoch_inf_scaled(a: Complex64, base: f64, tol: &Tolerance) -> Result<Scaled> {
    let mut prod = Scaled::ONE;
    let r = for_each_factor(a, base, tol, |_, f| {
        prod = prod.scale(f);
        Ok(())
    });
    match r {
        Ok(_) => Ok(prod),
        Err(Error::Convergence { terms, .. }) => Err(Error::Convergence {
            terms,
            partial: prod.to_complex(),
        }),
        Err(e) => Err(e),
    }
}

/// `(a; base)_inf` for `|base| < 1`.
pub fn qpoch_inf(a: Complex64, base: f64, tol: &Tolerance) -> Result<Complex64> {
    qpoch_inf_scaled(a, base, tol).map(Scaled::to_complex)
}

/// Real-argument convenience wrapper around [`qpoch_inf`].
pub fn qpoch_inf_real(a: f64, base: f64, tol: &Tolerance) -> Result<f64> {
    qpoch_inf(Complex64::new(a, 0.0), base, tol).map(|z| z.re)
}

/// Product of several infinite q-Pochhammer symbols sharing one base.
pub fn qpoch_inf_product(args: &[f64], base: f64, tol: &Tolerance) -> Result<Scaled> {
    let mut prod = Scaled::ONE;
    for &a in args {
        prod = prod * qpoch_inf_scaled(Complex64::new(a, 0.0), base, tol)?;
    }
    Ok(prod)
}

/// `e_q(z) = 1/(z; q^-2)_inf`, range-extended.
pub fn q_exponential_scaled(z: Complex64, qp: &QParams, tol: &Tolerance) -> Result<Scaled> {
    let mut prod = Scaled::ONE;
    let r = for_each_factor(z, qp.base2(), tol, |i, f| {
        if f.norm() < POLE_GUARD {
            return Err(Error::Pole(format!(
                "e_q({z}): factor {i} (1 - z q^-{}) vanishes",
                2 * i
            )));
        }
        prod = prod.scale(f);
        Ok(())
    });
    match r {
        Ok(_) => Ok(prod.recip()),
        Err(Error::Convergence { terms, .. }) => Err(Error::Convergence {
            terms,
            partial: prod.recip().to_complex(),
        }),
        Err(e) => Err(e),
    }
}

/// `e_q(z) = 1/(z; q^-2)_inf`.
pub fn q_exponential(z: Complex64, qp: &QParams, tol: &Tolerance) -> Result<Complex64> {
    q_exponential_scaled(z, qp, tol).map(Scaled::to_complex)
}

/// Symmetric q-derivative `(f(qx) - f(x/q)) / (x (q - 1/q))`.
pub fn q_derivative_at<F>(f: F, x: f64, qp: &QParams) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("q-derivative needs finite x != 0, got {x}")));
    }
    let q = qp.q();
    Ok((f(q * x) - f(x / q)) / (x * qp.lambda()))
}

/// Result of a windowed Jackson sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacksonSum {
    pub value: Complex64,
    /// Set when the index window was empty and the sum defaulted to zero.
    pub empty: bool,
}

/// `sum_{n=n_min}^{n_max} v(n) base^n`, compensated.
pub fn jackson_sum<F>(values: F, base: f64, n_min: i64, n_max: i64) -> Result<JacksonSum>
where
    F: Fn(i64) -> Complex64,
{
    if !(base > 0.0 && base.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Jackson sum needs base > 0, got {base}"
        )));
    }
    if n_min > n_max {
        return Ok(JacksonSum {
            value: Complex64::new(0.0, 0.0),
            empty: true,
        });
    }
    let sum: CompensatedSum = (n_min..=n_max)
        .map(|n| values(n) * Scaled::powi(base, n).to_f64())
        .collect();
    Ok(JacksonSum {
        value: sum.value(),
        empty: false,
    })
}
