//! Basic hypergeometric series `1phi1` and `2phi1` with truncation control.
//!
//! Terms are generated by their ratio recurrence and carried in [`Scaled`]
//! form, so arguments far outside the double range of the individual terms
//! still produce a finite mantissa/exponent result.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{scaled_sum, Scaled};
use crate::qcore::Tolerance;

/// Factors `1 - a b^n` this close to zero count as exact zeros.
pub const SNAP: f64 = 64.0 * f64::EPSILON;

/// Argument bound for `2phi1` outside which only terminating series are accepted.
pub const PHI21_GUARD: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phi11Spec {
    pub a: Complex64,
    pub c: Complex64,
    pub base: f64,
    pub z: Complex64,
}

impl Phi11Spec {
    pub fn real(a: f64, c: f64, base: f64, z: f64) -> Self {
        Phi11Spec {
            a: a.into(),
            c: c.into(),
            base,
            z: z.into(),
        }
    }

    pub fn with_z(self, z: Complex64) -> Self {
        Phi11Spec { z, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phi21Spec {
    pub a1: Complex64,
    pub a2: Complex64,
    pub c: Complex64,
    pub base: f64,
    pub z: Complex64,
}

impl Phi21Spec {
    pub fn real(a1: f64, a2: f64, c: f64, base: f64, z: f64) -> Self {
        Phi21Spec {
            a1: a1.into(),
            a2: a2.into(),
            c: c.into(),
            base,
            z: z.into(),
        }
    }
}

/// Value of a series together with the size of its terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesEval {
    pub value: Scaled,
    /// `sum |term_n|`, the scale against which cancellation is measured.
    pub abs_sum: Scaled,
    /// Number of terms summed.
    pub terms: usize,
    /// The series terminated exactly (a numerator factor vanished).
    pub terminated: bool,
}

impl SeriesEval {
    /// `sum |term| / |value|`; infinite when the value cancels to zero.
    pub fn condition(&self) -> f64 {
        if self.value.is_zero() {
            return if self.abs_sum.is_zero() { 1.0 } else { f64::INFINITY };
        }
        (self.abs_sum.log2_abs() - self.value.log2_abs()).exp2()
    }
}

fn check_base(base: f64) -> Result<()> {
    if base > 0.0 && base < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("series base must lie in (0,1), got {base}")))
    }
}

// 1 - a b^n with b^n formed directly, snapped to zero when within SNAP.
fn factor(a: Complex64, base: f64, n: usize) -> Complex64 {
    let t = a * base.powi(n as i32);
    let f = 1.0 - t;
    if f.norm() <= SNAP * t.norm().max(1.0) {
        Complex64::new(0.0, 0.0)
    } else {
        f
    }
}

/// Smallest `n` with `a b^n = 1` (up to [`SNAP`]), searching while `|a b^n| >= 1/2`.
pub fn termination_index(a: Complex64, base: f64, max_terms: usize) -> Option<usize> {
    if a.norm() == 0.0 {
        return None;
    }
    let mut n = 0usize;
    loop {
        let t = a * base.powi(n as i32);
        if t.norm() < 0.5 || n > max_terms {
            return None;
        }
        if factor(a, base, n) == Complex64::new(0.0, 0.0) {
            return Some(n);
        }
        n += 1;
    }
}

// Generic driver: `ratio(n)` maps term_n to term_{n+1}; a zero numerator ends
// the series, a zero denominator is reported by `ratio` itself.
fn sum_series<R>(tol: &Tolerance, mut ratio: R) -> Result<SeriesEval>
where
    R: FnMut(usize) -> Result<(Complex64, bool)>,
{
    let mut terms = vec![Scaled::ONE];
    let mut partial = Scaled::ONE;
    let mut small_run = 0usize;
    let log_rel = tol.rel.log2();
    let mut term = Scaled::ONE;
    let mut terminated = false;
    let mut n = 0usize;
    loop {
        if n + 1 >= tol.max_terms {
            return Err(Error::Convergence {
                terms: n + 1,
                partial: scaled_sum(&terms).to_complex(),
            });
        }
        let (r, ends) = ratio(n)?;
        if ends {
            terminated = true;
            break;
        }
        term = term.scale(r);
        n += 1;
        if term.is_zero() {
            break;
        }
        terms.push(term);
        partial = partial + term;
        if term.log2_abs() < log_rel + partial.log2_abs() {
            small_run += 1;
            if small_run == 3 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    let abs: Vec<Scaled> = terms.iter().map(Scaled::abs).collect();
    let _ = term;
    Ok(SeriesEval {
        value: scaled_sum(&terms),
        abs_sum: scaled_sum(&abs),
        terms: terms.len(),
        terminated,
    })
}

/// `1phi1(a; c; b, z) = sum (a;b)_n / ((b;b)_n (c;b)_n) (-1)^n b^{n(n-1)/2} z^n`.
pub fn phi11_eval(spec: &Phi11Spec, tol: &Tolerance) -> Result<SeriesEval> {
    check_base(spec.base)?;
    let b = spec.base;
    sum_series(tol, |n| {
        let num = factor(spec.a, b, n);
        let den_c = factor(spec.c, b, n);
        if den_c == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter(format!(
                "1phi1: denominator factor (1 - c b^{n}) vanishes for c = {}",
                spec.c
            )));
        }
        if num == Complex64::new(0.0, 0.0) {
            return Ok((num, true));
        }
        let den_b = 1.0 - b.powi(n as i32 + 1);
        Ok((-num * b.powi(n as i32) * spec.z / (den_c * den_b), false))
    })
}

pub fn phi11_scaled(spec: &Phi11Spec, tol: &Tolerance) -> Result<Scaled> {
    phi11_eval(spec, tol).map(|e| e.value)
}

pub fn phi11(spec: &Phi11Spec, tol: &Tolerance) -> Result<Complex64> {
    phi11_scaled(spec, tol).map(Scaled::to_complex)
}

/// `2phi1(a1, a2; c; b, z) = sum (a1;b)_n (a2;b)_n / ((b;b)_n (c;b)_n) z^n`.
pub fn phi21_eval(spec: &Phi21Spec, tol: &Tolerance) -> Result<SeriesEval> {
    check_base(spec.base)?;
    let b = spec.base;
    if spec.z.norm() >= PHI21_GUARD
        && termination_index(spec.a1, b, tol.max_terms).is_none()
        && termination_index(spec.a2, b, tol.max_terms).is_none()
    {
        return Err(Error::Divergence(spec.z.norm()));
    }
    sum_series(tol, |n| {
        let num = factor(spec.a1, b, n) * factor(spec.a2, b, n);
        let den_c = factor(spec.c, b, n);
        if den_c == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter(format!(
                "2phi1: denominator factor (1 - c b^{n}) vanishes for c = {}",
                spec.c
            )));
        }
        if num == Complex64::new(0.0, 0.0) {
            return Ok((num, true));
        }
        let den_b = 1.0 - b.powi(n as i32 + 1);
        Ok((num * spec.z / (den_c * den_b), false))
    })
}

pub fn phi21_scaled(spec: &Phi21Spec, tol: &Tolerance) -> Result<Scaled> {
    phi21_eval(spec, tol).map(|e| e.value)
}

pub fn phi21(spec: &Phi21Spec, tol: &Tolerance) -> Result<Complex64> {
    phi21_scaled(spec, tol).map(Scaled::to_complex)
}

/// Residual of the three-term recurrence and the largest of its three terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecurrenceResidual {
    pub residual: f64,
    pub scale: f64,
    pub value: Complex64,
}

/// `(c - a z) f(bz) + (z - c - b) f(z) + b f(z/b)` for `f = 1phi1(a; c; b, .)`.
pub fn phi11_recurrence_stats(spec: &Phi11Spec, tol: &Tolerance) -> Result<RecurrenceResidual> {
    let b = spec.base;
    let f0 = phi11(spec, tol)?;
    let fb = phi11(&spec.with_z(spec.z * b), tol)?;
    let fi = phi11(&spec.with_z(spec.z / b), tol)?;
    let t1 = (spec.c - spec.a * spec.z) * fb;
    let t2 = (spec.z - spec.c - b) * f0;
    let t3 = b * fi;
    Ok(RecurrenceResidual {
        residual: (t1 + t2 + t3).norm(),
        scale: t1.norm().max(t2.norm()).max(t3.norm()),
        value: f0,
    })
}

pub fn phi11_recurrence_residual(spec: &Phi11Spec, tol: &Tolerance) -> Result<f64> {
    phi11_recurrence_stats(spec, tol).map(|r| r.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn phi11_trivial_cases() {
        let tol = Tolerance::default();
        assert_eq!(phi11(&Phi11Spec::real(0.3, 0.2, 0.5, 0.0), &tol).unwrap(), c(1.0));
        assert_eq!(phi11(&Phi11Spec::real(1.0, 0.2, 0.5, 17.0), &tol).unwrap(), c(1.0));
    }

    #[test]
    fn phi11_zero_denominator() {
        let tol = Tolerance::default();
        let r = phi11(&Phi11Spec::real(0.3, 4.0, 0.5, 1.0), &tol);
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn phi11_matches_direct_sum() {
        // oracle: explicit Pochhammer products, 60 terms
        let (a, cc, b, z): (f64, f64, f64, f64) = (-0.7, 0.3, 0.4, 2.5);
        let mut direct = 0.0;
        for n in 0..60 {
            let num = crate::qcore::qpoch_finite_real(a, b, n);
            let den = crate::qcore::qpoch_finite_real(b, b, n) * crate::qcore::qpoch_finite_real(cc, b, n);
            let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
            direct += num / den * sgn * b.powf((n * (n.max(1) - 1)) as f64 / 2.0) * z.powi(n as i32);
        }
        let v = phi11(&Phi11Spec::real(a, cc, b, z), &Tolerance::default()).unwrap();
        assert_relative_eq!(v.re, direct, max_relative = 1e-13);
    }

    #[test]
    fn phi11_huge_argument_stays_finite() {
        let spec = Phi11Spec::real(-0.5, 0.25, 1.0 / 16.0, -1e60);
        let e = phi11_eval(&spec, &Tolerance::default()).unwrap();
        assert!(e.value.is_finite());
        assert!(e.value.log2_abs() > 1024.0);
    }

    #[test]
    fn recurrence_trivial_cases() {
        let tol = Tolerance::default();
        let z0 = phi11_recurrence_residual(&Phi11Spec::real(0.3, 0.2, 0.5, 0.0), &tol).unwrap();
        assert!(z0 < 1e-15);
        let a1 = phi11_recurrence_residual(&Phi11Spec::real(1.0, 0.2, 0.5, 3.0), &tol).unwrap();
        assert!(a1 < 1e-14);
    }

    #[test]
    fn recurrence_eigen_parameters() {
        let q: f64 = 1.5;
        let eps = q.powf(0.6);
        let spec = Phi11Spec::real(-1.0 / eps, q.powi(-2), q.powi(-4), -eps * 0.8);
        let r = phi11_recurrence_stats(&spec, &Tolerance::default()).unwrap();
        assert!(r.residual < 1e-10 * r.scale);
    }

    #[test]
    fn phi21_trivial_and_guard() {
        let tol = Tolerance::default();
        assert_eq!(phi21(&Phi21Spec::real(0.3, 0.4, 0.0, 0.5, 0.0), &tol).unwrap(), c(1.0));
        assert_eq!(phi21(&Phi21Spec::real(1.0, 0.4, 0.0, 0.5, 0.95), &tol).unwrap(), c(1.0));
        assert!(matches!(
            phi21(&Phi21Spec::real(0.3, 0.4, 0.0, 0.5, 0.995), &tol),
            Err(Error::Divergence(_))
        ));
        // terminating series are fine at any argument
        let t = phi21(&Phi21Spec::real(16.0, 0.4, 0.0, 0.25, 50.0), &tol).unwrap();
        let direct = 1.0 + (1.0 - 16.0) * (1.0 - 0.4) / (1.0 - 0.25) * 50.0
            + (1.0 - 16.0) * (1.0 - 4.0) * (1.0 - 0.4) * (1.0 - 0.1) / ((1.0 - 0.25) * (1.0 - 0.0625)) * 2500.0;
        assert_relative_eq!(t.re, direct, max_relative = 1e-13);
    }

    #[test]
    fn phi21_geometric_case() {
        // 2phi1(a, b; 0; b, z) with a2 = base collapses (b;b)_n: sum (a;b)_n z^n
        // and with a = 0 this is 1/(1-z)
        let v = phi21(&Phi21Spec::real(0.0, 0.3, 0.0, 0.3, 0.6), &Tolerance::default()).unwrap();
        assert_relative_eq!(v.re, 1.0 / 0.4, max_relative = 1e-14);
    }

    #[test]
    fn termination_snapping() {
        let q: f64 = 1.5;
        let b = q.powi(-4);
        assert_eq!(termination_index(c(q.powi(8)), b, 100), Some(2));
        assert_eq!(termination_index(c(q.powi(7)), b, 100), None);
        assert_eq!(termination_index(c(0.0), b, 100), None);
    }
}
