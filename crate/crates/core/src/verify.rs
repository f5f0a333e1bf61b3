//! Verification harness: Gram matrices against closed-form norms, the
//! connection formula, the moment problem, completeness projections and the
//! operator-algebra residuals, collected into reports.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eigenbasis::{
    basis_value, calibrated_xi0, connection_lhs, connection_rhs, eigenfunction, htilde_phi11,
    htilde_phi21, in_phi21_band, ktilde_at, ktilde_eps, norm_closed_form, EigenproblemParams,
};
use crate::error::{Error, Result};
use crate::lattice::{heisenberg_residual, inner_product, Lattice, LatticeFunction, Parity, Sign};
use crate::numeric::{CompensatedSum, Scaled};
use crate::oscillator::{
    apply_a, apply_adag, apply_h, apply_h_composed, energy, ev_difference_stats, ground_state_at,
    OscillatorParams, SpectrumLabel,
};
use crate::qcore::{qpoch_inf_scaled, QParams, Tolerance};
use crate::qhyper::{phi11_recurrence_stats, Phi11Spec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReportParams {
    pub q: f64,
    pub gamma: f64,
    pub xi0: f64,
    pub window: i64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub params: ReportParams,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(name: &str, params: ReportParams) -> Self {
        VerificationReport {
            name: name.to_string(),
            params,
            checks: Vec::new(),
        }
    }

    /// Record a residual; it passes when finite, nonnegative and within `tolerance`.
    pub fn push(&mut self, id: impl Into<String>, value: f64, tolerance: f64) -> &mut Check {
        let pass = value.is_finite() && value >= 0.0 && value <= tolerance;
        self.checks.push(Check {
            id: id.into(),
            value,
            tolerance,
            pass,
            detail: None,
        });
        self.checks.last_mut().unwrap()
    }

    pub fn push_detail(&mut self, id: impl Into<String>, value: f64, tolerance: f64, detail: String) {
        self.push(id, value, tolerance).detail = Some(detail);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect()
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "params": self.params,
            "checks": self.checks,
            "pass": self.pass(),
        })
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = format!(
            "{} (q={}, gamma={}, xi0={}, window={}, tol={:e})\n",
            self.name, p.q, p.gamma, p.xi0, p.window, p.tol
        );
        for c in &self.checks {
            s += &format!(
                "  {} {:<40} {:.3e} <= {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.value,
                c.tolerance
            );
            if let Some(d) = &c.detail {
                s += &format!("  ({d})");
            }
            s.push('\n');
        }
        s += if self.pass() { "overall: PASS\n" } else { "overall: FAIL\n" };
        s
    }
}

/// Parameters shared by the verification suites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub op: OscillatorParams,
    pub xi0: f64,
    /// Half-width `K` of the lattice window `[-K, K]`.
    pub window: i64,
    pub tol: Tolerance,
    pub seed: u64,
}

impl VerifyConfig {
    /// Calibrated scale and default window for `q` and `gamma`.
    pub fn calibrated(q: f64, gamma: f64) -> Result<Self> {
        let qp = QParams::new(q)?;
        Ok(VerifyConfig {
            op: OscillatorParams::new(qp, gamma)?,
            xi0: calibrated_xi0(&qp).0,
            window: Lattice::default_half_width(&qp),
            tol: Tolerance::default(),
            seed: 2024,
        })
    }

    pub fn with_window(self, window: i64) -> Self {
        VerifyConfig { window, ..self }
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.op.qp, self.xi0, -self.window, self.window)
    }

    /// Eigenproblem on the sublattice closest to calibration.
    pub fn eigenproblem(&self) -> Result<(Lattice, EigenproblemParams)> {
        let lat = self.lattice()?;
        let ep = nearest_eigenproblem(self.op, &lat)?;
        Ok((lat.sublattice(Parity::of(ep.anchor())), ep))
    }

    pub fn params(&self) -> ReportParams {
        ReportParams {
            q: self.op.qp.q(),
            gamma: self.op.gamma,
            xi0: self.xi0,
            window: self.window,
            tol: self.tol.rel,
        }
    }
}

/// Eigenproblem on the sublattice whose anchor is nearest to calibration.
pub fn nearest_eigenproblem(op: OscillatorParams, lat: &Lattice) -> Result<EigenproblemParams> {
    let qp = op.qp;
    let t = ((qp.q().sqrt() / qp.lambda()) / lat.xi0()).ln() / qp.q().ln();
    EigenproblemParams::for_lattice(op, &lat.sublattice(Parity::All), Parity::of(t.round() as i64))
}

// Sublattice points (sign, k) of the view, ordered by ascending |k| then sign.
fn sub_points(lat: &Lattice, ep: &EigenproblemParams) -> Vec<(Sign, i64)> {
    let mut ks: Vec<i64> = (lat.n_min()..=lat.n_max())
        .filter_map(|n| ep.k_of(n).ok())
        .collect();
    ks.sort_by_key(|&k| (k.abs(), k));
    ks.into_iter()
        .flat_map(|k| lat.signs().iter().map(move |s| (s, k)))
        .collect()
}

/// `q^{-2k} / (-c q^{-4k}; q^-4)_inf`.
fn moment_weight(k: i64, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Scaled> {
    let qp = ep.qp();
    let p = qpoch_inf_scaled((-ep.c() * qp.pow(-4 * k)).into(), qp.base4(), tol)?;
    Ok(Scaled::powi(qp.q(), -2 * k) * p.recip())
}

/// Gram matrix of the basis functions in the weight `q^{-2k}/(-c q^{-4k}; q^-4)_inf`,
/// summed over both signs and every sublattice point of the window.
pub fn gram_matrix(labels: &[SpectrumLabel], lat: &Lattice, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Vec<Vec<f64>>> {
    let pts = sub_points(lat, ep);
    let weights: Vec<Scaled> = pts
        .iter()
        .map(|&(_, k)| moment_weight(k, ep, tol))
        .collect::<Result<_>>()?;
    let table: Vec<Vec<Scaled>> = labels
        .iter()
        .map(|l| pts.iter().map(|&(s, k)| basis_value(l, s, k, ep, tol)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let n = labels.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut acc = CompensatedSum::new();
            for (p, w) in weights.iter().enumerate() {
                acc.add(Complex64::new((*w * table[i][p] * table[j][p]).to_f64(), 0.0));
            }
            g[i][j] = acc.value().re;
            g[j][i] = g[i][j];
        }
    }
    Ok(g)
}

/// The same Gram matrix through lattice eigenfunctions and the Jackson inner
/// product, divided by the Jackson factor.
pub fn gram_matrix_lattice(labels: &[SpectrumLabel], lat: &Lattice, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Vec<Vec<Complex64>>> {
    let fs: Vec<LatticeFunction> = labels
        .iter()
        .map(|l| eigenfunction(l, lat, ep, tol))
        .collect::<Result<_>>()?;
    let factor = ep.jackson_factor(lat);
    fs.iter()
        .map(|f| fs.iter().map(|g| Ok(inner_product(f, g)? / factor)).collect())
        .collect()
}

/// Diagonal against closed-form norms and normalized off-diagonals.
pub fn orthogonality_report(labels: &[SpectrumLabel], cfg: &VerifyConfig) -> Result<VerificationReport> {
    let (lat, ep) = cfg.eigenproblem()?;
    let g = gram_matrix(labels, &lat, &ep, &cfg.tol)?;
    let mut rep = VerificationReport::new("orthogonality", cfg.params());
    let mut worst_off: f64 = 0.0;
    let mut worst_pair = String::new();
    for (i, li) in labels.iter().enumerate() {
        let norm = norm_closed_form(li, &ep, &cfg.tol)?;
        rep.push(format!("norm:{li}"), ((g[i][i] - norm) / norm).abs(), 1e-7);
        for (j, lj) in labels.iter().enumerate().skip(i + 1) {
            let r = g[i][j].abs() / (g[i][i] * g[j][j]).abs().sqrt();
            if !(r <= worst_off) {
                worst_off = r;
                worst_pair = format!("{li} x {lj}");
            }
        }
    }
    if labels.len() > 1 {
        rep.push_detail("offdiag:max", worst_off, 1e-8, worst_pair);
    }
    Ok(rep)
}

/// Connection-formula residuals for the Fock families `n <= n_max` and three
/// generic `eps` samples at every sublattice point whose `2phi1` argument has
/// modulus below 0.9. Points where the `1phi1` side cancels by more than a
/// factor `1e5` are excluded and counted.
pub fn connection_check(n_max: i64, window: i64, ep: &EigenproblemParams, tol: &Tolerance, params: ReportParams) -> Result<VerificationReport> {
    let qp = *ep.qp();
    let mut rep = VerificationReport::new("connection", params);
    let mut samples: Vec<(String, f64)> = Vec::new();
    for n in 0..=n_max {
        samples.push((format!("connection:fock-even:{n}"), -qp.pow(-4 * n)));
        samples.push((format!("connection:fock-odd:{n}"), -qp.pow(-4 * n - 2)));
    }
    let g2 = qp.powf(2.0 * ep.op.gamma);
    for (name, e) in [("a", 0.37 * g2), ("b", 1.9 * g2), ("c", -0.61)] {
        samples.push((format!("connection:generic-{name}"), e));
    }
    let k_half = window / 2 + 1;
    for (id, eps) in samples {
        let mut worst: f64 = 0.0;
        let mut used = 0;
        let mut excluded = 0;
        for k in -k_half..=k_half {
            if !in_phi21_band(ep.u_at(Sign::Plus, k), &qp) {
                continue;
            }
            let lhs = connection_lhs(eps, k, ep, tol)?;
            let rhs = connection_rhs(eps, k, ep, tol)?;
            if rhs.condition > 1e5 {
                excluded += 1;
                continue;
            }
            used += 1;
            let l = lhs.to_complex();
            let r = rhs.value.to_complex();
            worst = worst.max(if r.norm() == 0.0 { l.norm() } else { (l - r).norm() / r.norm() });
        }
        if used == 0 {
            worst = f64::INFINITY;
        }
        rep.push_detail(id, worst, 1e-8, format!("eps={eps:.6}, {used} points, {excluded} excluded"));
    }
    // the two routes for h_m in the overlap band
    let mut worst: f64 = 0.0;
    for m in 0..=(2 * n_max + 1) as u32 {
        for k in -k_half..=k_half {
            let u = ep.u_at(Sign::Plus, k);
            if !in_phi21_band(u, &qp) {
                continue;
            }
            let a = htilde_phi21(m, u, &qp, tol)?;
            let b = htilde_phi11(m, u, &qp, tol)?;
            let d = (a.log2_abs() - b.log2_abs()).exp2();
            let same_sign = (a.to_complex().re >= 0.0) == (b.to_complex().re >= 0.0) || a.log2_abs() < -1000.0;
            worst = worst.max(if same_sign { (d - 1.0).abs() } else { 2.0 });
        }
    }
    rep.push("connection:htilde-routes", worst, 1e-8);
    Ok(rep)
}

/// Moments of `w(u) = q^{-2k}/(-u^2; q^-4)_inf` and of `w (1 + k_s / C)`,
/// `C = 1.01 max |k_s|` over the window. Reports
/// `max_j |mu_j - mu'_j| / max(1, |mu_j|, sum |u^j w|)` for `j = 0..=big_j`;
/// the detail carries the same maximum normalized by `max(1, |mu_j|)` alone.
pub fn moment_indeterminacy(s: i64, big_j: u32, lat: &Lattice, ep: &EigenproblemParams, tol: &Tolerance, params: ReportParams) -> Result<VerificationReport> {
    let m = moment_drift(s, big_j, lat, ep, tol)?;
    let mut rep = VerificationReport::new("moments", params);
    let worst = m.iter().map(|d| d.normalized).fold(0.0, f64::max);
    let plain = m.iter().map(|d| d.relative).fold(0.0, f64::max);
    rep.push_detail(
        format!("moments:s={s}"),
        worst,
        1e-7,
        format!("J={big_j}, C={:.6e}, unscaled {plain:.3e}", m.first().map(|d| d.c).unwrap_or(0.0)),
    );
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentDrift {
    pub j: u32,
    pub mu: f64,
    pub mu_perturbed: f64,
    /// `|mu_j - mu'_j| / max(1, |mu_j|)`.
    pub relative: f64,
    /// `sum |u^j w|`.
    pub abs_moment: f64,
    /// `|mu_j - mu'_j| / max(1, |mu_j|, abs_moment)`.
    pub normalized: f64,
    /// `sum |u^j w k_s / C|`, the size of the terms that cancel in the drift.
    pub abs_scale: f64,
    pub c: f64,
}

pub fn moment_drift(s: i64, big_j: u32, lat: &Lattice, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Vec<MomentDrift>> {
    if !ep.is_calibrated() {
        return Err(Error::NotCalibrated {
            c: ep.c(),
            expected: ep.qp().powf(-2.0 * ep.op.gamma),
        });
    }
    let pts = sub_points(lat, ep);
    let ks: Vec<Scaled> = pts
        .iter()
        .map(|&(sg, k)| ktilde_at(s, sg, k, ep, tol))
        .collect::<Result<_>>()?;
    let c = 1.01 * ks.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let weights: Vec<Scaled> = pts
        .iter()
        .map(|&(_, k)| moment_weight(k, ep, tol))
        .collect::<Result<_>>()?;
    let inv_c = Scaled::from_real(1.0 / c);
    let mut out = Vec::new();
    for j in 0..=big_j {
        let mut mu = CompensatedSum::new();
        let mut mu_p = CompensatedSum::new();
        let mut abs = 0.0;
        let mut abs_mu = 0.0;
        for (p, &(sg, k)) in pts.iter().enumerate() {
            let uj = Scaled::powi(ep.u_at(sg, k), j as i64);
            let base = uj * weights[p];
            let pert = base * ks[p] * inv_c;
            mu.add(base.to_complex());
            mu_p.add((base + pert).to_complex());
            abs += pert.to_f64().abs();
            abs_mu += base.to_f64().abs();
        }
        let (a, b) = (mu.value().re, mu_p.value().re);
        out.push(MomentDrift {
            j,
            mu: a,
            mu_perturbed: b,
            relative: (a - b).abs() / a.abs().max(1.0),
            abs_moment: abs_mu,
            normalized: (a - b).abs() / a.abs().max(abs_mu).max(1.0),
            abs_scale: abs,
            c,
        });
    }
    Ok(out)
}

/// Relative L2 residual of `f` after projection onto the listed basis functions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Projection {
    pub residual: f64,
    pub retained: f64,
    pub max_offdiag: f64,
}

/// Expand `f` over `{psi0 h_m}_{m <= m_fock}` and `{psi0 k_m}_{|m| <= m_nonfock}`
/// (`None` leaves out the non-Fock family) with closed-form norms.
pub fn completeness_projection(f: &LatticeFunction, m_fock: u32, m_nonfock: Option<u32>, lat: &Lattice, ep: &EigenproblemParams, tol: &Tolerance) -> Result<Projection> {
    let mut labels: Vec<SpectrumLabel> = (0..=m_fock).map(|m| SpectrumLabel::Fock { m }).collect();
    if let Some(mn) = m_nonfock {
        let mn = mn as i32;
        labels.extend((-mn..=mn).map(|m| SpectrumLabel::NonFock { m, gamma: ep.op.gamma }));
    }
    let factor = ep.jackson_factor(lat);
    let basis: Vec<LatticeFunction> = labels
        .iter()
        .map(|l| eigenfunction(l, lat, ep, tol))
        .collect::<Result<_>>()?;
    let norms: Vec<f64> = labels
        .iter()
        .map(|l| Ok(norm_closed_form(l, ep, tol)? * factor))
        .collect::<Result<_>>()?;
    let mut max_off: f64 = 0.0;
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let g = inner_product(&basis[i], &basis[j])?.norm() / (norms[i] * norms[j]).sqrt();
            max_off = max_off.max(g);
        }
    }
    let mut terms: Vec<(Complex64, &LatticeFunction)> = vec![(Complex64::new(1.0, 0.0), f)];
    for (b, &n) in basis.iter().zip(&norms) {
        terms.push((-inner_product(b, f)? / n, b));
    }
    let r = LatticeFunction::combine(&terms)?;
    let ff = inner_product(f, f)?.re;
    let rr = inner_product(&r, &r)?.re;
    Ok(Projection {
        residual: (rr / ff).sqrt(),
        retained: rr / ff,
        max_offdiag: max_off,
    })
}

/// `psi0` restricted to the sublattice points with index `k0`, both signs.
pub fn shell_function(k0: i64, lat: &Lattice, ep: &EigenproblemParams, tol: &Tolerance) -> Result<LatticeFunction> {
    let view = lat.sublattice(Parity::of(ep.anchor()));
    LatticeFunction::try_from_fn(&view, |_, n, x| {
        if ep.k_of(n)? == k0 {
            Ok(ground_state_at(x, &ep.op, tol)?.to_complex())
        } else {
            Ok(Complex64::new(0.0, 0.0))
        }
    })
}

/// Threshold for the shell-function residual at cutoffs (8, 4).
pub const SHELL_THRESHOLD: f64 = 0.05;

pub fn completeness_report(cfg: &VerifyConfig) -> Result<VerificationReport> {
    let (lat, ep) = cfg.eigenproblem()?;
    let tol = &cfg.tol;
    let g = ep.op.gamma;
    let mut rep = VerificationReport::new("completeness", cfg.params());
    let h2 = eigenfunction(&SpectrumLabel::Fock { m: 2 }, &lat, &ep, tol)?;
    rep.push("completeness:h2", completeness_projection(&h2, 2, None, &lat, &ep, tol)?.residual, 1e-8);
    let k1 = eigenfunction(&SpectrumLabel::NonFock { m: 1, gamma: g }, &lat, &ep, tol)?;
    rep.push("completeness:k1", completeness_projection(&k1, 0, Some(1), &lat, &ep, tol)?.residual, 1e-8);
    let k0 = eigenfunction(&SpectrumLabel::NonFock { m: 0, gamma: g }, &lat, &ep, tol)?;
    let p = completeness_projection(&k0, 12, None, &lat, &ep, tol)?;
    rep.push_detail(
        "completeness:fock-only-k0",
        (1.0 - p.retained).max(0.0),
        0.01,
        format!("retained fraction {:.6}", p.retained),
    );
    let shell = shell_function(0, &lat, &ep, tol)?;
    let mut prev = f64::INFINITY;
    let mut monotone = 0.0;
    let mut last = f64::NAN;
    for (mf, mn) in [(0, 0), (2, 1), (4, 2), (6, 3), (8, 4)] {
        let r = completeness_projection(&shell, mf, Some(mn), &lat, &ep, tol)?.residual;
        if r > prev * (1.0 + 1e-12) {
            monotone = f64::max(monotone, r - prev);
        }
        prev = r;
        last = r;
    }
    rep.push("completeness:shell-monotone", monotone, 0.0);
    rep.push("completeness:shell(8,4)", last, SHELL_THRESHOLD);
    Ok(rep)
}

/// Support half-width of the random functions: `|x| / xi0` in `[e^-3, e^3]`.
pub fn random_support(qp: &QParams) -> i64 {
    (3.0 / qp.q().ln()).ceil() as i64
}

/// Random complex values on `|n| <= random_support(q)`, zero elsewhere.
pub fn random_function(lat: &Lattice, rng: &mut ChaCha8Rng) -> LatticeFunction {
    let width = random_support(lat.qp());
    LatticeFunction::from_fn(lat, |_, n, _| {
        if n.abs() <= width {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Oscillator relation residual `||(a a+ - q^-2 a+ a - 1) f|| / ||f||`.
pub fn oscillator_relation_residual(f: &LatticeFunction, op: &OscillatorParams) -> Result<f64> {
    let aad = apply_a(&apply_adag(f, op)?, op)?;
    let ada = apply_adag(&apply_a(f, op)?, op)?;
    let c = |x: f64| Complex64::new(x, 0.0);
    let r = LatticeFunction::combine(&[(c(1.0), &aad), (c(-op.qp.base2()), &ada), (c(-1.0), f)])?;
    Ok(r.norm_inf() / f.norm_inf())
}

/// Random admissible `1phi1` parameters: complex `a`, `c` and `z`, base `q^-4`.
pub fn random_phi11_spec(rng: &mut ChaCha8Rng) -> Phi11Spec {
    let q: f64 = [1.1, 1.5, 2.0, 3.0][rng.gen_range(0..4)];
    let base = q.powi(-4);
    let disk = |rng: &mut ChaCha8Rng, r: f64| Complex64::from_polar(r * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
    let a = disk(rng, 2.0);
    // keep (c; base)_n away from zero
    let c = loop {
        let c = disk(rng, 2.0);
        if (0..64).all(|n| (1.0 - c * base.powi(n)).norm() > 1e-2) {
            break c;
        }
    };
    Phi11Spec { a, c, base, z: disk(rng, 3.0) }
}

/// Operator-algebra residuals over random functions on the configured q:
/// the oscillator relation, the three lattice relations, the two routes to
/// `H` (each draw with random gamma and theta) and the `1phi1` recurrence.
pub fn algebra_report(cfg: &VerifyConfig, draws: usize) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let qp = cfg.op.qp;
    let lat = cfg.lattice()?;
    let mut osc: f64 = 0.0;
    let mut heis: f64 = 0.0;
    let mut paths: f64 = 0.0;
    for _ in 0..draws {
        let op = OscillatorParams::with_phase(qp, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU))?;
        let f = random_function(&lat, &mut rng);
        osc = osc.max(oscillator_relation_residual(&f, &op)?);
        heis = heis.max(heisenberg_residual(&f)? / f.norm_inf());
        let h1 = apply_h(&f, &op)?;
        let h2 = apply_h_composed(&f, &op)?;
        paths = paths.max(h1.sub(&h2)?.norm_inf() / h1.norm_inf().max(f.norm_inf()));
    }
    let mut rep = VerificationReport::new("algebra", cfg.params());
    rep.push("algebra:oscillator-relation", osc, 1e-10);
    rep.push("algebra:heisenberg", heis, 1e-11);
    rep.push("algebra:h-paths", paths, 1e-12);
    let mut rec: f64 = 0.0;
    for _ in 0..100 {
        let spec = random_phi11_spec(&mut rng);
        let r = phi11_recurrence_stats(&spec, &cfg.tol)?;
        rec = rec.max(r.residual / r.value.norm().max(1.0));
    }
    rep.push("algebra:phi11-recurrence", rec, 1e-9);
    Ok(rep)
}

/// Difference-equation residuals of `psi0 h_m` (`m <= m_fock`) and
/// `psi0 k_m` (`|m| <= m_nonfock`) on the calibrated sublattice.
pub fn eigen_residual_report(cfg: &VerifyConfig, m_fock: u32, m_nonfock: i32) -> Result<VerificationReport> {
    let (lat, ep) = cfg.eigenproblem()?;
    let mut rep = VerificationReport::new("eigen", cfg.params());
    let mut labels: Vec<SpectrumLabel> = (0..=m_fock).map(|m| SpectrumLabel::Fock { m }).collect();
    if ep.is_calibrated() {
        labels.extend((-m_nonfock..=m_nonfock).map(|m| SpectrumLabel::NonFock { m, gamma: cfg.op.gamma }));
    }
    for l in labels {
        let f = eigenfunction(&l, &lat, &ep, &cfg.tol)?;
        let r = ev_difference_stats(&f, energy(&l, &cfg.op.qp), &cfg.op)?;
        rep.push_detail(format!("ev:{l}"), r.residual, 1e-8, format!("{} points, {} skipped", r.points, r.skipped));
    }
    Ok(rep)
}

pub fn standard_labels(m_fock: u32, m_nonfock: i32, gamma: f64) -> Vec<SpectrumLabel> {
    let mut v: Vec<SpectrumLabel> = (0..=m_fock).map(|m| SpectrumLabel::Fock { m }).collect();
    v.extend((-m_nonfock..=m_nonfock).map(|m| SpectrumLabel::NonFock { m, gamma }));
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Orthogonality,
    Connection,
    Moments,
    Completeness,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "algebra" => Suite::Algebra,
            "orthogonality" => Suite::Orthogonality,
            "connection" => Suite::Connection,
            "moments" => Suite::Moments,
            "completeness" => Suite::Completeness,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

/// Run one suite (or all) with the configured parameters.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let name = format!("{suite:?}").to_lowercase();
    let mut rep = VerificationReport::new(&name, cfg.params());
    let want = |s: Suite| suite == s || suite == Suite::All;
    if want(Suite::Algebra) {
        rep.merge(algebra_report(cfg, 50)?);
    }
    if want(Suite::Orthogonality) {
        let (_, ep) = cfg.eigenproblem()?;
        let labels = if ep.is_calibrated() {
            standard_labels(5, 3, cfg.op.gamma)
        } else {
            standard_labels(5, -1, cfg.op.gamma)
        };
        rep.merge(orthogonality_report(&labels, cfg)?);
        rep.merge(eigen_residual_report(cfg, 8, 4)?);
    }
    if want(Suite::Connection) {
        let (_, ep) = cfg.eigenproblem()?;
        let cal = if ep.is_calibrated() {
            ep
        } else {
            EigenproblemParams::calibrated(cfg.op)
        };
        rep.merge(connection_check(3, cfg.window, &cal, &cfg.tol, cfg.params())?);
    }
    if want(Suite::Moments) {
        let (lat, ep) = cfg.eigenproblem()?;
        for s in [0, 1] {
            rep.merge(moment_indeterminacy(s, 10, &lat, &ep, &cfg.tol, cfg.params())?);
        }
    }
    if want(Suite::Completeness) {
        rep.merge(completeness_report(cfg)?);
    }
    Ok(rep)
}

/// Non-Fock eigenvalue parameter of a label (used by reports and the CLI).
pub fn label_eps(label: &SpectrumLabel, ep: &EigenproblemParams) -> f64 {
    match *label {
        SpectrumLabel::Fock { .. } => label.epsilon(ep.qp()),
        SpectrumLabel::NonFock { m, .. } => ktilde_eps(m as i64, ep),
    }
}
