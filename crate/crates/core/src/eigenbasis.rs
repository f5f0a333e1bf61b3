//! Eigenfunctions of `H`: the `1phi1` solutions, the q-Hermite family
//! `h_m`, the non-Fock family `k_m`, connection coefficients and norms.
//!
//! The special functions take the scaled coordinate `u = kappa x` with
//! `kappa = q^{-gamma-1/2} lambda`. On a lattice view of fixed index parity
//! the points are `u = sigma sqrt(c) q^{n - anchor}`, so the sublattice
//! `n = anchor - 2k` carries `u = sigma sqrt(c) q^{-2k}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeFunction, Parity, Sign};
use crate::numeric::Scaled;
use crate::oscillator::{check_lattice, ground_state_at, OscillatorParams, SpectrumLabel};
use crate::qcore::{qpoch_finite_real, qpoch_inf_product, QParams, Tolerance};
use crate::qhyper::{phi11_eval, phi21_eval, termination_index, Phi11Spec, Phi21Spec, SeriesEval};

/// Relative mismatch below which `c` counts as calibrated.
const CALIBRATION_TOL: f64 = 1e-12;

/// Crossover for the `2phi1` route: `|q^-4 / u^2| < ROUTE_BOUND`.
pub const ROUTE_BOUND: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenproblemParams {
    pub op: OscillatorParams,
    c: f64,
    calibrated: bool,
    anchor: i64,
}

/// `xi0` in `[1, q)` and anchor index with `xi0 q^anchor = sqrt(q) / lambda`.
pub fn calibrated_xi0(qp: &QParams) -> (f64, i64) {
    let target = qp.q().sqrt() / qp.lambda();
    let mut anchor = (target.ln() / qp.q().ln()).floor() as i64;
    let mut xi0 = target * qp.q().powi(-anchor as i32);
    // guard the floor against rounding at the interval ends
    if xi0 >= qp.q() {
        anchor += 1;
        xi0 /= qp.q();
    } else if xi0 < 1.0 {
        anchor -= 1;
        xi0 *= qp.q();
    }
    (xi0, anchor)
}

impl EigenproblemParams {
    /// Free-standing parameters with lattice constant `c` (anchor 0).
    pub fn new(op: OscillatorParams, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        let target = op.qp.powf(-2.0 * op.gamma);
        Ok(EigenproblemParams {
            op,
            c,
            calibrated: (c / target - 1.0).abs() < CALIBRATION_TOL,
            anchor: 0,
        })
    }

    /// `c = q^{-2 gamma}`.
    pub fn calibrated(op: OscillatorParams) -> Self {
        EigenproblemParams {
            op,
            c: op.qp.powf(-2.0 * op.gamma),
            calibrated: true,
            anchor: 0,
        }
    }

    /// Parameters for the sublattice of `lat` with the given index parity.
    ///
    /// The anchor is the index of that parity closest to the calibration
    /// point, so a calibrated `xi0` yields `c = q^{-2 gamma}` on the matching
    /// sublattice and `c = q^{-2 gamma -+ 2}` on the other one.
    pub fn for_lattice(op: OscillatorParams, lat: &Lattice, parity: Parity) -> Result<Self> {
        check_lattice(lat, &op)?;
        let parity = match (parity, lat.parity()) {
            (Parity::All, Parity::All) => {
                return Err(Error::Parity("eigenproblem needs a fixed index parity".into()))
            }
            (Parity::All, p) => p,
            (p, Parity::All) => p,
            (p, l) if p == l => p,
            (p, l) => return Err(Error::Parity(format!("requested {p:?} on a {l:?} view"))),
        };
        let qp = op.qp;
        let t = ((qp.q().sqrt() / qp.lambda()) / lat.xi0()).ln() / qp.q().ln();
        let mut anchor = t.round() as i64;
        if !parity.admits(anchor) {
            anchor += if t >= anchor as f64 { 1 } else { -1 };
        }
        let sqrt_c = op.kappa() * lat.xi0() * qp.q().powi(anchor as i32);
        let mut ep = Self::new(op, sqrt_c * sqrt_c)?;
        ep.anchor = anchor;
        Ok(ep)
    }

    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn sqrt_c(&self) -> f64 {
        self.c.sqrt()
    }
    pub fn is_calibrated(&self) -> bool {
        self.calibrated
    }
    pub fn anchor(&self) -> i64 {
        self.anchor
    }
    pub fn qp(&self) -> &QParams {
        &self.op.qp
    }

    /// Sublattice index `k` of lattice index `n` (`u = sigma sqrt(c) q^{-2k}`).
    pub fn k_of(&self, n: i64) -> Result<i64> {
        let d = self.anchor - n;
        if d.rem_euclid(2) != 0 {
            return Err(Error::Parity(format!(
                "index {n} is not on the sublattice anchored at {}",
                self.anchor
            )));
        }
        Ok(d / 2)
    }

    /// `u` at sublattice index `k` and sign `sigma`.
    pub fn u_at(&self, s: Sign, k: i64) -> f64 {
        s.value() * self.sqrt_c() * self.qp().q().powi(-2 * k as i32)
    }

    /// Ratio of the lattice inner product to the sublattice weighted sum:
    /// `(psi0 f, psi0 g) = factor * sum_{sigma,k} q^{-2k} f g / (-c q^{-4k}; q^-4)_inf`.
    pub fn jackson_factor(&self, lat: &Lattice) -> f64 {
        lat.xi0() * lat.qp().lambda() * lat.qp().q().powi(self.anchor as i32)
    }

    fn require_calibrated(&self) -> Result<()> {
        if self.calibrated {
            Ok(())
        } else {
            Err(Error::NotCalibrated {
                c: self.c,
                expected: self.op.qp.powf(-2.0 * self.op.gamma),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConnectionCoefficients {
    pub c_e: f64,
    pub c_o: f64,
}

/// `phi_e(u) = 1phi1(-1/eps; q^-2; q^-4, eps q^-2 u^2)`.
pub fn phi_even_u(u: f64, eps: f64, qp: &QParams, tol: &Tolerance) -> Result<SeriesEval> {
    check_eps(eps)?;
    let spec = Phi11Spec::real(-1.0 / eps, qp.base2(), qp.base4(), eps * qp.base2() * u * u);
    phi11_eval(&spec, tol)
}

/// `phi_o(u) = 1phi1(-q^-2/eps; q^-6; q^-4, eps q^-4 u^2)`; the odd solution is `u phi_o(u)`.
pub fn phi_odd_u(u: f64, eps: f64, qp: &QParams, tol: &Tolerance) -> Result<SeriesEval> {
    check_eps(eps)?;
    let b2 = qp.base2();
    let spec = Phi11Spec::real(-b2 / eps, b2 * b2 * b2, qp.base4(), eps * qp.base4() * u * u);
    phi11_eval(&spec, tol)
}

/// `phi_e` at the lattice coordinate `x`.
pub fn phi_even(x: f64, eps: f64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Scaled> {
    Ok(phi_even_u(ep.op.kappa() * x, eps, ep.qp(), tol)?.value)
}

/// `phi_o` at the lattice coordinate `x`.
pub fn phi_odd(x: f64, eps: f64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Scaled> {
    Ok(phi_odd_u(ep.op.kappa() * x, eps, ep.qp(), tol)?.value)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be finite and nonzero, got {eps}")));
    }
    Ok(())
}

/// Normalized residual of the eigenvalue equation for `g` in the scaled coordinate:
/// `g(u){q + 1/q - eps q u^2} - g(q^2 u)/q - q g(u/q^2){1 + u^2}`.
pub fn ev_eq_residual_u<G>(g: G, u: f64, eps: f64, qp: &QParams) -> Result<f64>
where
    G: Fn(f64) -> Result<Complex64>,
{
    let q = qp.q();
    let t0 = g(u)? * (q + 1.0 / q - eps * q * u * u);
    let t1 = -g(q * q * u)? / q;
    let t2 = -g(u / (q * q))? * q * (1.0 + u * u);
    let scale = t0.norm().max(t1.norm()).max(t2.norm());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((t0 + t1 + t2).norm() / scale)
}

/// `h_m(u)` through `u^m 2phi1(q^{2m-2}, q^{2m}; 0; q^-4, -q^-4/u^2)`.
pub fn htilde_phi21(m: u32, u: f64, qp: &QParams, tol: &Tolerance) -> Result<Scaled> {
    if u == 0.0 {
        return Err(Error::Domain("the 2phi1 route needs u != 0".into()));
    }
    let m = m as i64;
    let spec = Phi21Spec::real(
        qp.pow(2 * m - 2),
        qp.pow(2 * m),
        0.0,
        qp.base4(),
        -qp.base4() / (u * u),
    );
    let s = phi21_eval(&spec, tol)?.value;
    Ok(s * Scaled::powi(u, m))
}

/// `h_m(u)` through the terminating `1phi1` representation:
/// `h_2n = (-1)^n q^{4n^2-2n} (q^-2; q^-4)_n 1phi1(q^{4n}; q^-2; q^-4, -q^{-4n-2} u^2)`,
/// `h_2n+1 = (-1)^n u q^{4n^2+2n} (q^-6; q^-4)_n 1phi1(q^{4n}; q^-6; q^-4, -q^{-4n-6} u^2)`.
pub fn htilde_phi11(m: u32, u: f64, qp: &QParams, tol: &Tolerance) -> Result<Scaled> {
    let n = (m / 2) as i64;
    let b4 = qp.base4();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let a = qp.pow(4 * n);
    if m.is_multiple_of(2) {
        let pre = Scaled::from_real(sign * qpoch_finite_real(qp.base2(), b4, n as usize)) * Scaled::powi(qp.q(), 4 * n * n - 2 * n);
        let spec = Phi11Spec::real(a, qp.base2(), b4, -qp.pow(-4 * n - 2) * u * u);
        Ok(pre * phi11_eval(&spec, tol)?.value)
    } else {
        let b6 = qp.pow(-6);
        let pre = Scaled::from_real(sign * u * qpoch_finite_real(b6, b4, n as usize)) * Scaled::powi(qp.q(), 4 * n * n + 2 * n);
        let spec = Phi11Spec::real(a, b6, b4, -qp.pow(-4 * n - 6) * u * u);
        Ok(pre * phi11_eval(&spec, tol)?.value)
    }
}

/// True when `u` is in the convergence band of the `2phi1` route.
pub fn in_phi21_band(u: f64, qp: &QParams) -> bool {
    u != 0.0 && qp.base4() / (u * u) < ROUTE_BOUND
}

/// q-Hermite function `h_m(u)`, range-extended.
pub fn htilde_scaled(m: u32, u: f64, qp: &QParams, tol: &Tolerance) -> Result<Scaled> {
    if in_phi21_band(u, qp) {
        htilde_phi21(m, u, qp, tol)
    } else {
        htilde_phi11(m, u, qp, tol)
    }
}

pub fn htilde(m: u32, u: f64, qp: &QParams, tol: &Tolerance) -> Result<f64> {
    htilde_scaled(m, u, qp, tol).map(Scaled::to_f64)
}

/// `eps = q^{2 gamma - 2m}` of the non-Fock level `m`.
pub fn ktilde_eps(m: i64, ep: &EigenproblemParams) -> f64 {
    ep.qp().powf(2.0 * ep.op.gamma - 2.0 * m as f64)
}

fn parity_sign(s: Sign, m: i64) -> f64 {
    if s == Sign::Minus && (m + 1).rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `k_m` at `u = sigma sqrt(c) q^{-2k}` through
/// `sigma^{m+1} (-1)^k q^{-2k(m-gamma)} 2phi1(-q^{2m-2gamma-2}, -q^{2m-2gamma}; 0; q^-4, -q^-4/u^2)`.
pub fn ktilde_phi21(m: i64, s: Sign, k: i64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Scaled> {
    ep.require_calibrated()?;
    let qp = ep.qp();
    let g = ep.op.gamma;
    let u = ep.u_at(Sign::Plus, k);
    let spec = Phi21Spec::real(
        -qp.powf(2.0 * (m as f64 - g) - 2.0),
        -qp.powf(2.0 * (m as f64 - g)),
        0.0,
        qp.base4(),
        -qp.base4() / (u * u),
    );
    let v = phi21_eval(&spec, tol)?.value;
    let sign = parity_sign(s, m) * if k.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let pow = Scaled::from_real(qp.powf(-2.0 * (m as f64 - g) * k as f64));
    Ok(Scaled::from_real(sign) * pow * v)
}

/// A value together with its cancellation ratio `sum |parts| / |value|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conditioned {
    pub value: Scaled,
    pub condition: f64,
}

/// Left side of the connection formula at `u = sqrt(c) q^{-2k}`:
/// `(-eps)^k 2phi1(-q^-2/eps, -1/eps; 0; q^-4, -q^-4/u^2)`.
pub fn connection_lhs(eps: f64, k: i64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Scaled> {
    check_eps(eps)?;
    let qp = ep.qp();
    let u = ep.u_at(Sign::Plus, k);
    let spec = Phi21Spec::real(-qp.base2() / eps, -1.0 / eps, 0.0, qp.base4(), -qp.base4() / (u * u));
    let v = phi21_eval(&spec, tol)?.value;
    Ok(Scaled::powi(-eps, k) * v)
}

/// Right side of the connection formula at `u = sqrt(c) q^{-2k}`:
/// `C_e phi_e(u) + C_o (u / sqrt(c)) phi_o(u)`.
pub fn connection_rhs(eps: f64, k: i64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Conditioned> {
    let cc = connection_coeffs(eps, ep, tol)?;
    let u = ep.u_at(Sign::Plus, k);
    let mut parts = Vec::new();
    let mut abs = Vec::new();
    if cc.c_e != 0.0 {
        let e = phi_even_u(u, eps, ep.qp(), tol)?;
        let w = Scaled::from_real(cc.c_e);
        parts.push(w * e.value);
        abs.push(w.abs() * e.abs_sum);
    }
    if cc.c_o != 0.0 {
        let o = phi_odd_u(u, eps, ep.qp(), tol)?;
        let w = Scaled::from_real(cc.c_o * u / ep.sqrt_c());
        parts.push(w * o.value);
        abs.push(w.abs() * o.abs_sum);
    }
    let value = crate::numeric::scaled_sum(&parts);
    let total = crate::numeric::scaled_sum(&abs);
    let condition = if value.is_zero() {
        if total.is_zero() { 1.0 } else { f64::INFINITY }
    } else {
        (total.log2_abs() - value.log2_abs()).exp2()
    };
    Ok(Conditioned { value, condition })
}

/// `k_m` at `u = sigma sqrt(c) q^{-2k}` through the connection formula
/// `sigma^{m+1} (C_e phi_e(u) + C_o (u / sqrt(c)) phi_o(u))`, with its cancellation ratio.
pub fn ktilde_phi11_conditioned(m: i64, s: Sign, k: i64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Conditioned> {
    ep.require_calibrated()?;
    let r = connection_rhs(ktilde_eps(m, ep), k, ep, tol)?;
    Ok(Conditioned {
        value: Scaled::from_real(parity_sign(s, m)) * r.value,
        condition: r.condition,
    })
}

pub fn ktilde_phi11(m: i64, s: Sign, k: i64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Scaled> {
    ktilde_phi11_conditioned(m, s, k, ep, tol).map(|r| r.value)
}

/// Non-Fock function `k_m` at sublattice index `k`, range-extended.
pub fn ktilde_at(m: i64, s: Sign, k: i64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Scaled> {
    if in_phi21_band(ep.u_at(Sign::Plus, k), ep.qp()) {
        ktilde_phi21(m, s, k, ep, tol)
    } else {
        ktilde_phi11(m, s, k, ep, tol)
    }
}

/// `k_m(sigma |u|)` for `|u|` on the calibrated sublattice.
pub fn ktilde(m: i64, s: Sign, magnitude: f64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<f64> {
    ep.require_calibrated()?;
    if !(magnitude > 0.0) {
        return Err(Error::Domain(format!("k_m needs |u| > 0, got {magnitude}")));
    }
    let t = (ep.sqrt_c() / magnitude).ln() / (2.0 * ep.qp().q().ln());
    let k = t.round();
    if (t - k).abs() > 1e-9 {
        return Err(Error::OutOfRange(format!("|u| = {magnitude} is not a sublattice point")));
    }
    ktilde_at(m, s, k as i64, ep, tol).map(Scaled::to_f64)
}

// Product of (a; q^-4)_inf over `num` divided by the same over `den`,
// exactly zero when a numerator terminates.
fn product_ratio(num: &[f64], den: &[f64], qp: &QParams, tol: &Tolerance) -> Result<Scaled> {
    let b = qp.base4();
    if num
        .iter()
        .any(|&a| termination_index(a.into(), b, tol.max_terms).is_some())
    {
        return Ok(Scaled::ZERO);
    }
    if let Some(&a) = den
        .iter()
        .find(|&&a| termination_index(a.into(), b, tol.max_terms).is_some())
    {
        return Err(Error::Pole(format!("infinite product ({a}; q^-4) vanishes in a denominator")));
    }
    Ok(qpoch_inf_product(num, b, tol)? * qpoch_inf_product(den, b, tol)?.recip())
}

/// General coefficients of the connection formula, valid for any `eps`:
/// `C_e = (-q^-2/eps, q^-4/(eps c), eps c; q^-4)_inf / (q^-2, -c, -q^-4/c; q^-4)_inf`,
/// `C_o = (-1/eps, q^-6/(eps c), eps c q^2; q^-4)_inf / (q^2, -c, -q^-4/c; q^-4)_inf`.
pub fn connection_coeffs_general(eps: f64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<ConnectionCoefficients> {
    check_eps(eps)?;
    let qp = ep.qp();
    let c = ep.c;
    let (b2, b4) = (qp.base2(), qp.base4());
    let ce = product_ratio(&[-b2 / eps, b4 / (eps * c), eps * c], &[b2, -c, -b4 / c], qp, tol)?;
    let co = product_ratio(
        &[-1.0 / eps, b4 * b2 / (eps * c), eps * c * qp.pow(2)],
        &[qp.pow(2), -c, -b4 / c],
        qp,
        tol,
    )?;
    Ok(ConnectionCoefficients {
        c_e: ce.to_f64(),
        c_o: co.to_f64(),
    })
}

/// Which special family, if any, `eps` belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EpsFamily {
    FockEven(i64),
    FockOdd(i64),
    NonFockEven(i64),
    NonFockOdd(i64),
    Generic,
}

fn near_integer(t: f64) -> Option<i64> {
    let r = t.round();
    ((t - r).abs() < 1e-9).then_some(r as i64)
}

pub fn classify_eps(eps: f64, ep: &EigenproblemParams) -> EpsFamily {
    let lq = ep.qp().q().ln();
    if eps < 0.0 {
        if let Some(m) = near_integer(-(-eps).ln() / (2.0 * lq)) {
            if m >= 0 {
                return if m % 2 == 0 {
                    EpsFamily::FockEven(m / 2)
                } else {
                    EpsFamily::FockOdd(m / 2)
                };
            }
        }
    } else if ep.calibrated {
        if let Some(m) = near_integer(-(eps * ep.c).ln() / (2.0 * lq)) {
            return if m.rem_euclid(2) == 1 {
                EpsFamily::NonFockEven(m.div_euclid(2))
            } else {
                EpsFamily::NonFockOdd(m / 2)
            };
        }
    }
    EpsFamily::Generic
}

/// Closed forms of the coefficients on the special families.
pub fn connection_coeffs_closed(family: EpsFamily, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Option<ConnectionCoefficients>> {
    let qp = ep.qp();
    let c = ep.c;
    let (b2, b4) = (qp.base2(), qp.base4());
    let b6 = b4 * b2;
    let pw = |base: f64, e: i64| Scaled::powi(base, e);
    let out = match family {
        EpsFamily::FockEven(n) => {
            let v = pw(-c, -n) * pw(qp.q(), 4 * n * n - 2 * n) * Scaled::from_real(qpoch_finite_real(b2, b4, n as usize));
            ConnectionCoefficients { c_e: v.to_f64(), c_o: 0.0 }
        }
        EpsFamily::FockOdd(n) => {
            let v = pw(-c, -n) * pw(qp.q(), 4 * n * n + 2 * n) * Scaled::from_real(qpoch_finite_real(b6, b4, n as usize));
            ConnectionCoefficients { c_e: 0.0, c_o: v.to_f64() }
        }
        EpsFamily::NonFockEven(p) => {
            let r = product_ratio(&[b2], &[-qp.pow(-4 * p - 4) / c], qp, tol)?;
            let v = pw(-c, p) * pw(qp.q(), 4 * p * p + 2 * p) * r;
            ConnectionCoefficients { c_e: v.to_f64(), c_o: 0.0 }
        }
        EpsFamily::NonFockOdd(p) => {
            let r = product_ratio(&[b6], &[-qp.pow(-4 * p - 4) / c], qp, tol)?;
            let v = pw(-c, p) * pw(qp.q(), 4 * p * p - 2 * p) * r;
            ConnectionCoefficients { c_e: 0.0, c_o: v.to_f64() }
        }
        EpsFamily::Generic => return Ok(None),
    };
    Ok(Some(out))
}

/// Connection coefficients for `eps`. On a special family the closed form is
/// returned after checking it against the general product formula.
pub fn connection_coeffs(eps: f64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<ConnectionCoefficients> {
    let general = connection_coeffs_general(eps, ep, tol)?;
    let family = classify_eps(eps, ep);
    match connection_coeffs_closed(family, ep, tol)? {
        None => Ok(general),
        Some(closed) => {
            let scale = closed.c_e.abs().max(closed.c_o.abs());
            let diff = (closed.c_e - general.c_e).abs().max((closed.c_o - general.c_o).abs());
            if diff > 1e-8 * scale {
                return Err(Error::Inconsistent(format!(
                    "closed-form coefficients {closed:?} disagree with the product formula {general:?} for {family:?}"
                )));
            }
            Ok(closed)
        }
    }
}

/// `N_c = (q^-4, -c q^-2, -q^-2/c; q^-4)_inf / (q^-2, -c, -q^-4/c; q^-4)_inf`.
pub fn n_c(ep: &EigenproblemParams, tol: &Tolerance) -> Result<f64> {
    let (b2, b4, c) = (ep.qp().base2(), ep.qp().base4(), ep.c);
    Ok(product_ratio(&[b4, -c * b2, -b2 / c], &[b2, -c, -b4 / c], ep.qp(), tol)?.to_f64())
}

/// `M_c = (q^-4, q^-4, -q^-2/c, -c q^-2; q^-4)_inf / (-c, -q^-4/c; q^-4)_inf`.
pub fn m_c(ep: &EigenproblemParams, tol: &Tolerance) -> Result<f64> {
    let (b2, b4, c) = (ep.qp().base2(), ep.qp().base4(), ep.c);
    Ok(product_ratio(&[b4, b4, -b2 / c, -c * b2], &[-c, -b4 / c], ep.qp(), tol)?.to_f64())
}

/// Squared norm in the weight `q^{-2k} / (-c q^{-4k}; q^-4)_inf` summed over
/// both signs: `2 N_c (q^-2; q^-2)_m q^{2m^2}` (Fock) and
/// `2 M_c c^m q^{2m^2} / (-q^{-2m-2}/c; q^-2)_inf` (non-Fock).
pub fn norm_closed_form(label: &SpectrumLabel, ep: &EigenproblemParams, tol: &Tolerance) -> Result<f64> {
    let qp = ep.qp();
    match *label {
        SpectrumLabel::Fock { m } => {
            let m = m as i64;
            let v = Scaled::from_real(2.0 * n_c(ep, tol)? * qpoch_finite_real(qp.base2(), qp.base2(), m as usize))
                * Scaled::powi(qp.q(), 2 * m * m);
            Ok(v.to_f64())
        }
        SpectrumLabel::NonFock { m, gamma } => {
            check_gamma(gamma, ep)?;
            ep.require_calibrated()?;
            let m = m as i64;
            let tail = crate::qcore::qpoch_inf_scaled((-qp.pow(-2 * m - 2) / ep.c).into(), qp.base2(), tol)?;
            let v = Scaled::from_real(2.0 * m_c(ep, tol)?) * Scaled::powi(ep.c, m) * Scaled::powi(qp.q(), 2 * m * m) * tail.recip();
            Ok(v.to_f64())
        }
    }
}

fn check_gamma(gamma: f64, ep: &EigenproblemParams) -> Result<()> {
    if gamma != ep.op.gamma {
        return Err(Error::Inconsistent(format!(
            "label gamma {gamma} differs from oscillator gamma {}",
            ep.op.gamma
        )));
    }
    Ok(())
}

/// `h_m` or `k_m` at sublattice index `k` and sign `s`.
pub fn basis_value(label: &SpectrumLabel, s: Sign, k: i64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Scaled> {
    match *label {
        SpectrumLabel::Fock { m } => htilde_scaled(m, ep.u_at(s, k), ep.qp(), tol),
        SpectrumLabel::NonFock { m, gamma } => {
            check_gamma(gamma, ep)?;
            ktilde_at(m as i64, s, k, ep, tol)
        }
    }
}

/// Eigenfunction `psi0 h_m` or `psi0 k_m` on the sublattice selected by `ep`.
pub fn eigenfunction(label: &SpectrumLabel, lat: &Lattice, ep: &EigenproblemParams, tol: &Tolerance) -> Result<LatticeFunction> {
    check_lattice(lat, &ep.op)?;
    let expected = Parity::of(ep.anchor);
    let view = match lat.parity() {
        Parity::All => lat.sublattice(expected),
        p if p == expected => *lat,
        p => {
            return Err(Error::Parity(format!(
                "lattice view {p:?} does not match the eigenproblem sublattice {expected:?}"
            )))
        }
    };
    let check = EigenproblemParams::for_lattice(ep.op, &view, expected)?;
    if (check.c / ep.c - 1.0).abs() > CALIBRATION_TOL || check.anchor != ep.anchor {
        return Err(Error::Inconsistent(format!(
            "eigenproblem c = {} does not describe this lattice (c = {})",
            ep.c, check.c
        )));
    }
    if !label.is_fock() {
        ep.require_calibrated()?;
    }
    LatticeFunction::try_from_fn(&view, |s, n, x| {
        let k = ep.k_of(n)?;
        let g = basis_value(label, s, k, ep, tol)?;
        let psi = ground_state_at(x, &ep.op, tol)?;
        Ok((psi * g).to_complex())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{energy, ev_difference_residual};
    use approx::assert_relative_eq;

    fn op(q: f64, gamma: f64) -> OscillatorParams {
        OscillatorParams::new(QParams::new(q).unwrap(), gamma).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn calibrated_xi0_examples() {
        let (xi, a) = calibrated_xi0(&QParams::new(2.0).unwrap());
        assert_eq!(a, -1);
        assert_relative_eq!(xi, 2.0 * 2f64.sqrt() / 1.5, max_relative = 1e-15);
        let (xi, a) = calibrated_xi0(&QParams::new(1.5).unwrap());
        assert_eq!(a, 0);
        assert_relative_eq!(xi, 1.5f64.sqrt() / (1.5 - 1.0 / 1.5), max_relative = 1e-15);
    }

    #[test]
    fn lattice_calibration() {
        for &(q, gamma) in &[(2.0, 0.0), (1.5, 0.3)] {
            let o = op(q, gamma);
            let (xi, anchor) = calibrated_xi0(&o.qp);
            let lat = Lattice::new(o.qp, xi, -20, 20).unwrap();
            let ep = EigenproblemParams::for_lattice(o, &lat, Parity::of(anchor)).unwrap();
            assert!(ep.is_calibrated());
            assert_eq!(ep.anchor(), anchor);
            let other = EigenproblemParams::for_lattice(o, &lat, Parity::of(anchor + 1)).unwrap();
            assert!(!other.is_calibrated());
            let shift = other.c() / ep.c();
            assert!((shift / q.powi(2) - 1.0).abs() < 1e-12 || (shift * q.powi(2) - 1.0).abs() < 1e-12);
        }
        let o = op(2.0, 0.0);
        let lat = Lattice::new(o.qp, 1.0, -5, 5).unwrap();
        let ep = EigenproblemParams::for_lattice(o, &lat, Parity::Even).unwrap();
        assert!(!ep.is_calibrated());
    }

    #[test]
    fn phi_trivial_cases() {
        let qp = QParams::new(1.7).unwrap();
        assert_eq!(phi_even_u(0.0, 0.3, &qp, &tol()).unwrap().value.to_f64(), 1.0);
        assert_eq!(phi_odd_u(0.0, 0.3, &qp, &tol()).unwrap().value.to_f64(), 1.0);
        assert_eq!(phi_even_u(3.0, -1.0, &qp, &tol()).unwrap().value.to_f64(), 1.0);
        assert_eq!(phi_odd_u(3.0, -qp.base2(), &qp, &tol()).unwrap().value.to_f64(), 1.0);
        assert!(phi_even_u(1.0, 0.0, &qp, &tol()).is_err());
    }

    #[test]
    fn phi_solutions_satisfy_ev_eq() {
        let qp = QParams::new(1.5).unwrap();
        for &eps in &[-0.37, -qp.pow(-3), 0.37, 2.2] {
            for &u in &[0.05, 0.4, 1.3, 4.0] {
                let re = ev_eq_residual_u(|v| Ok(phi_even_u(v, eps, &qp, &tol())?.value.to_complex()), u, eps, &qp).unwrap();
                let ro = ev_eq_residual_u(|v| Ok(phi_odd_u(v, eps, &qp, &tol())?.value.to_complex() * v), u, eps, &qp).unwrap();
                assert!(re < 1e-9 && ro < 1e-9, "eps={eps} u={u} {re} {ro}");
            }
        }
    }

    #[test]
    fn htilde_low_orders() {
        let qp = QParams::new(2.0).unwrap();
        for &u in &[0.01, 0.3, 1.0, 7.0, -2.5] {
            assert_eq!(htilde(0, u, &qp, &tol()).unwrap(), 1.0);
            assert_relative_eq!(htilde(1, u, &qp, &tol()).unwrap(), u, max_relative = 1e-15);
        }
    }

    #[test]
    fn htilde_routes_agree_and_have_parity() {
        for &q in &[1.5, 2.0] {
            let qp = QParams::new(q).unwrap();
            for m in 0..=8u32 {
                for &u in &[0.5, 0.9, 1.7, 3.0] {
                    if !in_phi21_band(u, &qp) {
                        continue;
                    }
                    let a = htilde_phi21(m, u, &qp, &tol()).unwrap().to_f64();
                    let b = htilde_phi11(m, u, &qp, &tol()).unwrap().to_f64();
                    assert!((a - b).abs() <= 1e-8 * a.abs().max(b.abs()), "q={q} m={m} u={u}: {a} {b}");
                    let neg = htilde(m, -u, &qp, &tol()).unwrap();
                    let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
                    assert_relative_eq!(neg, sgn * htilde(m, u, &qp, &tol()).unwrap(), max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn htilde_solves_ev_eq() {
        let qp = QParams::new(1.5).unwrap();
        for m in 0..=8u32 {
            let eps = -qp.pow(-2 * m as i64);
            for &u in &[0.02, 0.7, 2.0, 40.0] {
                let r = ev_eq_residual_u(|v| Ok(htilde_scaled(m, v, &qp, &tol())?.to_complex()), u, eps, &qp).unwrap();
                assert!(r < 1e-9, "m={m} u={u} r={r}");
            }
        }
    }

    #[test]
    fn connection_coefficient_examples() {
        let ep = EigenproblemParams::new(op(1.5, 0.0), 0.8).unwrap();
        let qp = *ep.qp();
        let c0 = connection_coeffs(-1.0, &ep, &tol()).unwrap();
        assert_relative_eq!(c0.c_e, 1.0, max_relative = 1e-12);
        assert_eq!(c0.c_o, 0.0);
        for n in 0..4 {
            let e = connection_coeffs(-qp.pow(-4 * n), &ep, &tol()).unwrap();
            assert_eq!(e.c_o, 0.0);
            let o = connection_coeffs(-qp.pow(-4 * n - 2), &ep, &tol()).unwrap();
            assert_eq!(o.c_e, 0.0);
            assert!(o.c_o != 0.0);
        }
        let cal = EigenproblemParams::calibrated(op(2.0, 0.25));
        for m in -4..=4i64 {
            let eps = ktilde_eps(m, &cal);
            let cc = connection_coeffs(eps, &cal, &tol()).unwrap();
            if m.rem_euclid(2) == 1 {
                assert_eq!(cc.c_o, 0.0);
            } else {
                assert_eq!(cc.c_e, 0.0);
            }
        }
    }

    #[test]
    fn ktilde_routes_agree_and_parity() {
        let ep = EigenproblemParams::calibrated(op(2.0, 0.0));
        let mut compared = 0;
        for m in -4..=4i64 {
            for k in -8..=0 {
                if !in_phi21_band(ep.u_at(Sign::Plus, k), ep.qp()) {
                    continue;
                }
                let a = ktilde_phi21(m, Sign::Plus, k, &ep, &tol()).unwrap().to_f64();
                let b = ktilde_phi11_conditioned(m, Sign::Plus, k, &ep, &tol()).unwrap();
                // the 1phi1 side cancels catastrophically at large |u|
                if b.condition > 1e5 {
                    continue;
                }
                compared += 1;
                let b = b.value.to_f64();
                assert!((a - b).abs() <= 1e-8 * a.abs().max(b.abs()), "m={m} k={k}: {a} {b}");
            }
            let p = ktilde_at(m, Sign::Plus, 1, &ep, &tol()).unwrap().to_f64();
            let n = ktilde_at(m, Sign::Minus, 1, &ep, &tol()).unwrap().to_f64();
            assert_eq!(n, if (m + 1) % 2 == 0 { p } else { -p });
        }
        assert!(compared >= 20);
        let off = EigenproblemParams::new(op(2.0, 0.0), 0.5).unwrap();
        assert!(matches!(ktilde_at(0, Sign::Plus, 0, &off, &tol()), Err(Error::NotCalibrated { .. })));
    }

    #[test]
    fn ktilde_is_bounded_below_gamma() {
        let ep = EigenproblemParams::calibrated(op(2.0, 0.0));
        for m in -3..=0i64 {
            let max_over = |r: std::ops::RangeInclusive<i64>| {
                r.map(|k| ktilde_at(m, Sign::Plus, k, &ep, &tol()).unwrap().to_f64().abs())
                    .fold(0.0, f64::max)
            };
            let inner = max_over(-10..=10);
            assert!(inner.is_finite() && inner > 0.0);
            assert!(max_over(-40..=40) <= inner * (1.0 + 1e-6), "m={m}");
        }
    }

    #[test]
    fn norm_examples() {
        let ep = EigenproblemParams::new(op(2.0, 0.0), 1.0).unwrap();
        let n0 = norm_closed_form(&SpectrumLabel::Fock { m: 0 }, &ep, &tol()).unwrap();
        assert_relative_eq!(n0, 2.0 * n_c(&ep, &tol()).unwrap(), max_relative = 1e-15);
        let cal = EigenproblemParams::calibrated(op(2.0, 0.0));
        let k0 = norm_closed_form(&SpectrumLabel::NonFock { m: 0, gamma: 0.0 }, &cal, &tol()).unwrap();
        let tail = crate::qcore::qpoch_inf_real(-0.25, 0.25, &tol()).unwrap();
        assert_relative_eq!(k0, 2.0 * m_c(&cal, &tol()).unwrap() / tail, max_relative = 1e-14);
        // brute force Jackson sum for the Fock m = 1 diagonal at c = 1
        let mut sum = 0.0;
        for k in -60..=60i64 {
            let u = ep.u_at(Sign::Plus, k);
            let w = 2f64.powi(-2 * k as i32) / crate::qcore::qpoch_inf_real(-u * u, 1.0 / 16.0, &tol()).unwrap();
            sum += 2.0 * w * u * u;
        }
        let n1 = norm_closed_form(&SpectrumLabel::Fock { m: 1 }, &ep, &tol()).unwrap();
        assert_relative_eq!(sum, n1, max_relative = 1e-7);
    }

    #[test]
    fn eigenfunctions_satisfy_difference_equation() {
        for &q in &[1.5, 2.0] {
            let o = op(q, 0.0);
            let (xi, anchor) = calibrated_xi0(&o.qp);
            let lat = Lattice::new(o.qp, xi, -40, 40).unwrap();
            let ep = EigenproblemParams::for_lattice(o, &lat, Parity::of(anchor)).unwrap();
            let mut labels: Vec<SpectrumLabel> = (0..=8).map(|m| SpectrumLabel::Fock { m }).collect();
            labels.extend((-4..=4).map(|m| SpectrumLabel::NonFock { m, gamma: 0.0 }));
            for label in labels {
                let f = eigenfunction(&label, &lat, &ep, &tol()).unwrap();
                let r = ev_difference_residual(&f, energy(&label, &o.qp), &o).unwrap();
                assert!(r < 1e-8, "q={q} {label}: {r}");
            }
        }
    }

    #[test]
    fn fock_zero_is_ground_state() {
        let o = op(2.0, 0.0);
        let (xi, anchor) = calibrated_xi0(&o.qp);
        let lat = Lattice::new(o.qp, xi, -10, 10).unwrap();
        let ep = EigenproblemParams::for_lattice(o, &lat, Parity::of(anchor)).unwrap();
        let f = eigenfunction(&SpectrumLabel::Fock { m: 0 }, &lat, &ep, &tol()).unwrap();
        let psi = crate::oscillator::ground_state(&lat.sublattice(Parity::of(anchor)), &o, &tol()).unwrap();
        assert_eq!(f, psi);
    }
}
