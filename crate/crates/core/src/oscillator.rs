//! The q-oscillator `a`, `a+`, `H = a+ a` on the lattice, the ground state,
//! the spectrum and the eigenvalue difference equation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{apply_p, apply_u, Lattice, LatticeFunction};
use crate::numeric::Scaled;
use crate::qcore::{q_exponential_scaled, QParams, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OscillatorParams {
    pub qp: QParams,
    pub gamma: f64,
    pub theta: f64,
}

impl OscillatorParams {
    pub fn new(qp: QParams, gamma: f64) -> Result<Self> {
        Self::with_phase(qp, gamma, 0.0)
    }

    pub fn with_phase(qp: QParams, gamma: f64, theta: f64) -> Result<Self> {
        if !gamma.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma and theta must be finite, got {gamma}, {theta}"
            )));
        }
        Ok(OscillatorParams { qp, gamma, theta })
    }

    /// `alpha = e^{i theta} sqrt(q / lambda)`.
    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar((self.qp.q() / self.qp.lambda()).sqrt(), self.theta)
    }

    /// `beta = alpha q^gamma`.
    pub fn beta(&self) -> Complex64 {
        self.alpha() * self.qp.powf(self.gamma)
    }

    /// Scale `kappa = q^{-gamma-1/2} lambda` of the coordinate `u = kappa x`.
    pub fn kappa(&self) -> f64 {
        self.qp.powf(-self.gamma - 0.5) * self.qp.lambda()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SpectrumLabel {
    Fock { m: u32 },
    NonFock { m: i32, gamma: f64 },
}

impl SpectrumLabel {
    /// `-q^{-2m}` (Fock) or `q^{2 gamma - 2m}` (non-Fock).
    pub fn epsilon(&self, qp: &QParams) -> f64 {
        match *self {
            SpectrumLabel::Fock { m } => -qp.powf(-2.0 * m as f64),
            SpectrumLabel::NonFock { m, gamma } => qp.powf(2.0 * gamma - 2.0 * m as f64),
        }
    }

    pub fn m(&self) -> i64 {
        match *self {
            SpectrumLabel::Fock { m } => m as i64,
            SpectrumLabel::NonFock { m, .. } => m as i64,
        }
    }

    pub fn is_fock(&self) -> bool {
        matches!(self, SpectrumLabel::Fock { .. })
    }
}

impl std::fmt::Display for SpectrumLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumLabel::Fock { m } => write!(f, "fock:{m}"),
            SpectrumLabel::NonFock { m, .. } => write!(f, "nonfock:{m}"),
        }
    }
}

/// `E = (1 + eps) / (1 - q^-2)`.
pub fn energy(label: &SpectrumLabel, qp: &QParams) -> f64 {
    (1.0 + label.epsilon(qp)) / (1.0 - qp.base2())
}

/// `a = alpha U^-2 + beta U^-1 P`.
pub fn apply_a(f: &LatticeFunction, op: &OscillatorParams) -> Result<LatticeFunction> {
    let u2 = apply_u(f, -2)?;
    let up = apply_u(&apply_p(f)?, -1)?;
    LatticeFunction::combine(&[(op.alpha(), &u2), (op.beta(), &up)])
}

/// `a+ = conj(alpha) U^2 + conj(beta) P U`.
pub fn apply_adag(f: &LatticeFunction, op: &OscillatorParams) -> Result<LatticeFunction> {
    let u2 = apply_u(f, 2)?;
    let pu = apply_p(&apply_u(f, 1)?)?;
    LatticeFunction::combine(&[(op.alpha().conj(), &u2), (op.beta().conj(), &pu)])
}

// D_q = i P
fn apply_dq(f: &LatticeFunction) -> Result<LatticeFunction> {
    Ok(apply_p(f)?.scale(Complex64::new(0.0, 1.0)))
}

/// `H = |alpha|^2 - |beta|^2 D_q^2 - i alpha conj(beta) (U + q U^-1) D_q`.
pub fn apply_h(f: &LatticeFunction, op: &OscillatorParams) -> Result<LatticeFunction> {
    let (al, be) = (op.alpha(), op.beta());
    let q = op.qp.q();
    let dq = apply_dq(f)?;
    let dq2 = apply_dq(&dq)?;
    let udq = apply_u(&dq, 1)?;
    let uidq = apply_u(&dq, -1)?;
    let mix = -Complex64::new(0.0, 1.0) * al * be.conj();
    LatticeFunction::combine(&[
        ((al * al.conj()), f),
        (-(be * be.conj()), &dq2),
        (mix, &udq),
        (mix * q, &uidq),
    ])
}

/// `a+ (a f)`, the composed route to `H`.
pub fn apply_h_composed(f: &LatticeFunction, op: &OscillatorParams) -> Result<LatticeFunction> {
    apply_adag(&apply_a(f, op)?, op)
}

/// `psi0(x) = e_q(-i q^-gamma lambda q^{-1/2} x)` with unit normalization.
pub fn ground_state_at(x: f64, op: &OscillatorParams, tol: &Tolerance) -> Result<Scaled> {
    q_exponential_scaled(Complex64::new(0.0, -op.kappa() * x), &op.qp, tol)
}

pub fn ground_state(lat: &Lattice, op: &OscillatorParams, tol: &Tolerance) -> Result<LatticeFunction> {
    check_lattice(lat, op)?;
    LatticeFunction::try_from_fn(lat, |_, _, x| ground_state_at(x, op, tol).map(Scaled::to_complex))
}

pub(crate) fn check_lattice(lat: &Lattice, op: &OscillatorParams) -> Result<()> {
    if lat.qp() != &op.qp {
        return Err(Error::Inconsistent(format!(
            "lattice q = {} differs from oscillator q = {}",
            lat.qp().q(),
            op.qp.q()
        )));
    }
    Ok(())
}

/// Values below this carry too few significant digits to test.
const TINY: f64 = 1e-290;

/// Largest normalized violation of the three-term eigenvalue equation
///
/// ```text
/// E x^2 l^2 f(x) = f(x){|a|^2 x^2 l^2 + |b|^2 (q + 1/q)}
///   + f(q^2 x){-|b|^2/q - i a conj(b) q^{1/2} x l}
///   + f(x/q^2){-q |b|^2 + i a conj(b) q^{1/2} x l}
/// ```
///
/// over interior points. Each point is normalized by its largest term;
/// points whose values underflow, or whose scale is negligible next to the
/// largest local scale, are skipped.
pub fn ev_difference_residual(f: &LatticeFunction, e: f64, op: &OscillatorParams) -> Result<f64> {
    Ok(ev_difference_stats(f, e, op)?.residual)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvResidual {
    pub residual: f64,
    pub points: usize,
    pub skipped: usize,
}

pub fn ev_difference_stats(f: &LatticeFunction, e: f64, op: &OscillatorParams) -> Result<EvResidual> {
    let q = op.qp.q();
    let lam = op.qp.lambda();
    let (al, be) = (op.alpha(), op.beta());
    let aa = al.norm_sqr();
    let bb = be.norm_sqr();
    let ab = al * be.conj();
    let i = Complex64::new(0.0, 1.0);
    let (lo, hi) = f.window();
    let mut rows = Vec::new();
    for (s, n, x, v) in f.entries() {
        if n - 2 < lo || n + 2 > hi {
            continue;
        }
        let up = f.get(s, n + 2)?;
        let down = f.get(s, n - 2)?;
        let xl = x * lam;
        let lhs = e * xl * xl * v;
        let t0 = v * (aa * xl * xl + bb * (q + 1.0 / q));
        let t1 = up * (-bb / q - i * ab * q.sqrt() * xl);
        let t2 = down * (-q * bb + i * ab * q.sqrt() * xl);
        let scale = lhs.norm().max(t0.norm()).max(t1.norm()).max(t2.norm());
        let tiny = [v, up, down].iter().any(|z| z.norm() < TINY);
        rows.push(((t0 + t1 + t2 - lhs).norm(), scale, tiny));
    }
    if rows.is_empty() {
        return Err(Error::WindowExhausted(
            "no interior points for the eigenvalue difference equation".into(),
        ));
    }
    let global = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut out = EvResidual {
        residual: 0.0,
        points: 0,
        skipped: 0,
    };
    for (r, scale, tiny) in rows {
        if tiny || scale < 1e-250 * global || scale == 0.0 {
            out.skipped += 1;
            continue;
        }
        out.points += 1;
        out.residual = out.residual.max(r / scale);
    }
    Ok(out)
}
