//! The two-sided q-lattice `{sigma xi0 q^n}`, functions on it, the X, P, U
//! operators and the Jackson inner product.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::qcore::QParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(s: i64) -> Result<Sign> {
        match s {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("sign must be +1 or -1, got {s}"))),
        }
    }

    fn slot(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// Which half-lines of the lattice are carried.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Signs {
    Both,
    Only(Sign),
}

impl Signs {
    pub fn contains(self, s: Sign) -> bool {
        match self {
            Signs::Both => true,
            Signs::Only(t) => s == t,
        }
    }

    pub fn iter(self) -> impl Iterator<Item = Sign> {
        [Sign::Plus, Sign::Minus].into_iter().filter(move |&s| self.contains(s))
    }
}

/// Restriction of the index `n` to one residue class mod 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    All,
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, n: i64) -> bool {
        match self {
            Parity::All => true,
            Parity::Even => n.rem_euclid(2) == 0,
            Parity::Odd => n.rem_euclid(2) == 1,
        }
    }

    /// The class reached after shifting every index by `k`.
    pub fn shifted(self, k: i64) -> Parity {
        match (self, k.rem_euclid(2)) {
            (Parity::All, _) | (_, 0) => self,
            (Parity::Even, _) => Parity::Odd,
            (Parity::Odd, _) => Parity::Even,
        }
    }

    pub fn of(n: i64) -> Parity {
        if n.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lattice {
    xi0: f64,
    n_min: i64,
    n_max: i64,
    signs: Signs,
    parity: Parity,
    qp: QParams,
}

impl Lattice {
    pub fn new(qp: QParams, xi0: f64, n_min: i64, n_max: i64) -> Result<Self> {
        if !(xi0 >= 1.0 && xi0 < qp.q()) {
            return Err(Error::InvalidParameter(format!(
                "xi0 must lie in [1, q) = [1, {}), got {xi0}",
                qp.q()
            )));
        }
        if n_min > n_max {
            return Err(Error::InvalidParameter(format!("empty window [{n_min}, {n_max}]")));
        }
        let lo = xi0 * qp.q().powf(n_min as f64);
        let hi = xi0 * qp.q().powf(n_max as f64);
        if !(lo >= f64::MIN_POSITIVE && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "window [{n_min}, {n_max}] leaves the double range at q = {}",
                qp.q()
            )));
        }
        Ok(Lattice {
            xi0,
            n_min,
            n_max,
            signs: Signs::Both,
            parity: Parity::All,
            qp,
        })
    }

    /// Window `[-K, K]` with `K = max(40, ceil(60 / ln q))`.
    pub fn default_half_width(qp: &QParams) -> i64 {
        40.max((60.0 / qp.q().ln()).ceil() as i64)
    }

    pub fn with_default_window(qp: QParams, xi0: f64) -> Result<Self> {
        let k = Self::default_half_width(&qp);
        Self::new(qp, xi0, -k, k)
    }

    pub fn single_sign(self, s: Sign) -> Self {
        Lattice {
            signs: Signs::Only(s),
            ..self
        }
    }

    /// View restricted to indices of one parity.
    pub fn sublattice(self, parity: Parity) -> Self {
        Lattice { parity, ..self }
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }
    pub fn n_min(&self) -> i64 {
        self.n_min
    }
    pub fn n_max(&self) -> i64 {
        self.n_max
    }
    pub fn signs(&self) -> Signs {
        self.signs
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }
    pub fn qp(&self) -> &QParams {
        &self.qp
    }

    /// Same point set (scale, q, signs), ignoring window and parity view.
    pub fn compatible(&self, other: &Lattice) -> bool {
        self.xi0 == other.xi0 && self.qp == other.qp && self.signs == other.signs
    }

    fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    /// `sigma xi0 q^n`.
    pub fn point(&self, s: Sign, n: i64) -> Result<f64> {
        if !self.signs.contains(s) {
            return Err(Error::OutOfRange(format!("sign {s:?} not carried by this lattice")));
        }
        if n < self.n_min || n > self.n_max {
            return Err(Error::OutOfRange(format!(
                "index {n} outside [{}, {}]",
                self.n_min, self.n_max
            )));
        }
        Ok(self.coord(s, n))
    }

    pub(crate) fn coord(&self, s: Sign, n: i64) -> f64 {
        s.value() * self.xi0 * self.qp.q().powi(n as i32)
    }

    /// Jackson measure `xi0 (q - 1/q) q^n` of the point with index `n`.
    pub fn measure(&self, n: i64) -> f64 {
        self.xi0 * self.qp.lambda() * self.qp.q().powi(n as i32)
    }

    /// Indices of the view in ascending order.
    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (self.n_min..=self.n_max).filter(move |&n| self.parity.admits(n))
    }
}

/// A function on a finite window of the lattice.
///
/// Values exist for every carried sign and every index in `[lo, hi]` that
/// matches `parity`. Operators return new functions on shrunken windows.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeFunction {
    lattice: Lattice,
    lo: i64,
    hi: i64,
    parity: Parity,
    values: [Vec<Complex64>; 2],
}

impl LatticeFunction {
    pub fn from_fn<F>(lattice: &Lattice, mut f: F) -> Self
    where
        F: FnMut(Sign, i64, f64) -> Complex64,
    {
        let len = lattice.len();
        let mut values = [vec![Complex64::new(0.0, 0.0); len], vec![Complex64::new(0.0, 0.0); len]];
        for s in lattice.signs.iter() {
            for n in lattice.indices() {
                values[s.slot()][(n - lattice.n_min) as usize] = f(s, n, lattice.coord(s, n));
            }
        }
        LatticeFunction {
            lattice: *lattice,
            lo: lattice.n_min,
            hi: lattice.n_max,
            parity: lattice.parity,
            values,
        }
    }

    pub fn try_from_fn<F>(lattice: &Lattice, mut f: F) -> Result<Self>
    where
        F: FnMut(Sign, i64, f64) -> Result<Complex64>,
    {
        let mut err = None;
        let out = Self::from_fn(lattice, |s, n, x| match f(s, n, x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    pub fn zeros(lattice: &Lattice) -> Self {
        Self::from_fn(lattice, |_, _, _| Complex64::new(0.0, 0.0))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Valid index window `(lo, hi)`.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn contains(&self, s: Sign, n: i64) -> bool {
        self.lattice.signs.contains(s) && n >= self.lo && n <= self.hi && self.parity.admits(n)
    }

    pub fn get(&self, s: Sign, n: i64) -> Result<Complex64> {
        if !self.contains(s, n) {
            return Err(Error::OutOfRange(format!(
                "({s:?}, {n}) outside valid window [{}, {}] ({:?})",
                self.lo, self.hi, self.parity
            )));
        }
        Ok(self.at(s, n))
    }

    fn at(&self, s: Sign, n: i64) -> Complex64 {
        self.values[s.slot()][(n - self.lattice.n_min) as usize]
    }

    /// Valid `(sign, n, x, value)` entries, signs outermost.
    pub fn entries(&self) -> impl Iterator<Item = (Sign, i64, f64, Complex64)> + '_ {
        self.lattice.signs.iter().flat_map(move |s| {
            (self.lo..=self.hi)
                .filter(move |&n| self.parity.admits(n))
                .map(move |n| (s, n, self.lattice.coord(s, n), self.at(s, n)))
        })
    }

    pub fn point_count(&self) -> usize {
        self.entries().count()
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries().map(|e| e.3.norm()).fold(0.0, f64::max)
    }

    // New function on `[lo, hi]` with the given parity, values from `f`.
    fn derive<F>(&self, lo: i64, hi: i64, parity: Parity, mut f: F) -> Result<Self>
    where
        F: FnMut(Sign, i64, f64) -> Complex64,
    {
        let lo = lo.max(self.lattice.n_min);
        let hi = hi.min(self.lattice.n_max);
        if lo > hi || !(lo..=hi).any(|n| parity.admits(n)) {
            return Err(Error::WindowExhausted(format!(
                "no valid points left after operator application (window [{lo}, {hi}])"
            )));
        }
        let len = self.lattice.len();
        let mut values = [vec![Complex64::new(0.0, 0.0); len], vec![Complex64::new(0.0, 0.0); len]];
        for s in self.lattice.signs.iter() {
            for n in (lo..=hi).filter(|&n| parity.admits(n)) {
                values[s.slot()][(n - self.lattice.n_min) as usize] = f(s, n, self.lattice.coord(s, n));
            }
        }
        Ok(LatticeFunction {
            lattice: self.lattice,
            lo,
            hi,
            parity,
            values,
        })
    }

    pub fn map<F: FnMut(Sign, i64, f64, Complex64) -> Complex64>(&self, mut f: F) -> Self {
        self.derive(self.lo, self.hi, self.parity, |s, n, x| f(s, n, x, self.at(s, n)))
            .expect("non-empty window")
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, _, _, v| c * v)
    }

    /// Restrict to a narrower window.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self> {
        self.derive(lo.max(self.lo), hi.min(self.hi), self.parity, |s, n, _| self.at(s, n))
    }

    /// `sum_k c_k f_k` on the intersection of the windows.
    pub fn combine(terms: &[(Complex64, &LatticeFunction)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty combination".into()))?
            .1;
        let mut lo = first.lo;
        let mut hi = first.hi;
        for (_, f) in terms {
            if !f.lattice.compatible(&first.lattice) || f.lattice.n_min != first.lattice.n_min {
                return Err(Error::LatticeMismatch);
            }
            if f.parity != first.parity {
                return Err(Error::Parity(format!(
                    "cannot combine {:?} and {:?} functions",
                    first.parity, f.parity
                )));
            }
            lo = lo.max(f.lo);
            hi = hi.min(f.hi);
        }
        first.derive(lo, hi, first.parity, |s, n, _| {
            let mut acc = CompensatedSum::new();
            for (c, f) in terms {
                acc.add(c * f.at(s, n));
            }
            acc.value()
        })
    }

    pub fn sub(&self, other: &LatticeFunction) -> Result<Self> {
        Self::combine(&[(Complex64::new(1.0, 0.0), self), (Complex64::new(-1.0, 0.0), other)])
    }
}

/// `(U^p f)(x) = q^{-p/2} f(q^{-p} x)`.
pub fn apply_u(f: &LatticeFunction, power: i64) -> Result<LatticeFunction> {
    if power == 0 {
        return Ok(f.clone());
    }
    let factor = f.lattice.qp.q().powf(-(power as f64) / 2.0);
    let (lo, hi) = if power > 0 {
        (f.lo + power, f.hi)
    } else {
        (f.lo, f.hi + power)
    };
    f.derive(lo, hi, f.parity.shifted(power), |s, n, _| factor * f.at(s, n - power))
}

/// `(Pf)(x) = -i (f(qx) - f(x/q)) / (x (q - 1/q))`.
pub fn apply_p(f: &LatticeFunction) -> Result<LatticeFunction> {
    let lam = f.lattice.qp.lambda();
    f.derive(f.lo + 1, f.hi - 1, f.parity.shifted(1), |s, n, x| {
        let d = (f.at(s, n + 1) - f.at(s, n - 1)) / (x * lam);
        Complex64::new(d.im, -d.re)
    })
}

/// `(Xf)(x) = x f(x)`.
pub fn apply_x(f: &LatticeFunction) -> LatticeFunction {
    f.map(|_, _, x, v| x * v)
}

/// Jackson inner product `xi0 (q - 1/q) sum conj(f) g q^n`, conjugate-linear in `f`.
pub fn inner_product(f: &LatticeFunction, g: &LatticeFunction) -> Result<Complex64> {
    if !f.lattice.compatible(&g.lattice) {
        return Err(Error::LatticeMismatch);
    }
    let lo = f.lo.max(g.lo);
    let hi = f.hi.min(g.hi);
    let mut idx: Vec<i64> = (lo..=hi)
        .filter(|&n| f.parity.admits(n) && g.parity.admits(n))
        .collect();
    idx.sort_by_key(|n| (n.abs(), *n));
    let mut acc = CompensatedSum::new();
    for n in idx {
        let w = f.lattice.measure(n);
        for s in f.lattice.signs.iter() {
            acc.add(f.at(s, n).conj() * g.at(s, n) * w);
        }
    }
    Ok(acc.value())
}

/// Largest pointwise violation of
/// `q^{1/2} XP - q^{-1/2} PX = iU`, `UX = q^{-1} XU` and `UP = q PU` applied to `f`.
pub fn heisenberg_residual(f: &LatticeFunction) -> Result<f64> {
    let q = f.lattice.qp.q();
    let c = |x: f64| Complex64::new(x, 0.0);
    let xp = apply_x(&apply_p(f)?);
    let px = apply_p(&apply_x(f))?;
    let iu = apply_u(f, 1)?.scale(Complex64::new(0.0, 1.0));
    let r1 = LatticeFunction::combine(&[(c(q.sqrt()), &xp), (c(-1.0 / q.sqrt()), &px), (c(-1.0), &iu)])?;
    let ux = apply_u(&apply_x(f), 1)?;
    let xu = apply_x(&apply_u(f, 1)?);
    let r2 = LatticeFunction::combine(&[(c(1.0), &ux), (c(-1.0 / q), &xu)])?;
    let up = apply_u(&apply_p(f)?, 1)?;
    let pu = apply_p(&apply_u(f, 1)?)?;
    let r3 = LatticeFunction::combine(&[(c(1.0), &up), (c(-q), &pu)])?;
    Ok(r1.norm_inf().max(r2.norm_inf()).max(r3.norm_inf()))
}

/// Write `sign,n,x,re,im` rows with 17 significant digits.
pub fn write_csv<W: Write>(f: &LatticeFunction, mut w: W) -> std::io::Result<()> {
    writeln!(w, "sign,n,x,re,im")?;
    for (s, n, x, v) in f.entries() {
        writeln!(w, "{},{},{:.16e},{:.16e},{:.16e}", s.value() as i64, n, x, v.re, v.im)?;
    }
    Ok(())
}

/// Read rows written by [`write_csv`] back onto `lattice`.
///
/// The valid window becomes the index range present in the file; every
/// carried sign must be present at every index of that range.
pub fn read_csv<R: BufRead>(lattice: &Lattice, r: R) -> Result<LatticeFunction> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if i == 0 {
            if line.trim() != "sign,n,x,re,im" {
                return Err(Error::Parse(format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::Parse(format!("line {}: expected 5 columns", i + 1)));
        }
        let num = |k: usize| -> Result<f64> {
            cols[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))
        };
        let s: i64 = cols[0].trim().parse().map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        let n: i64 = cols[1].trim().parse().map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        rows.push((Sign::from_value(s)?, n, Complex64::new(num(3)?, num(4)?)));
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    let lo = rows.iter().map(|r| r.1).min().unwrap();
    let hi = rows.iter().map(|r| r.1).max().unwrap();
    let mut f = LatticeFunction::zeros(lattice).restrict(lo, hi)?;
    let mut seen = std::collections::HashSet::new();
    for (s, n, v) in rows {
        if !f.contains(s, n) {
            return Err(Error::OutOfRange(format!("({s:?}, {n}) not on the lattice view")));
        }
        f.values[s.slot()][(n - lattice.n_min) as usize] = v;
        seen.insert((s, n));
    }
    if seen.len() != f.point_count() {
        return Err(Error::Parse("missing points in window".into()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lat(q: f64, xi0: f64, k: i64) -> Lattice {
        Lattice::new(QParams::new(q).unwrap(), xi0, -k, k).unwrap()
    }

    fn random(l: &Lattice, seed: u64) -> LatticeFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        LatticeFunction::from_fn(l, |_, _, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn point_examples() {
        assert_eq!(lat(2.0, 1.0, 3).point(Sign::Plus, 0).unwrap(), 1.0);
        assert_eq!(lat(2.0, 1.2, 3).point(Sign::Minus, 2).unwrap(), -4.8);
        assert_eq!(lat(2.0, 1.0, 3).point(Sign::Plus, -1).unwrap(), 0.5);
        assert!(lat(2.0, 1.0, 3).point(Sign::Plus, 4).is_err());
        assert!(lat(2.0, 1.0, 3).single_sign(Sign::Plus).point(Sign::Minus, 0).is_err());
    }

    #[test]
    fn lattice_validation() {
        let qp = QParams::new(2.0).unwrap();
        assert!(Lattice::new(qp, 0.9, -1, 1).is_err());
        assert!(Lattice::new(qp, 2.0, -1, 1).is_err());
        assert!(Lattice::new(qp, 1.0, 1, -1).is_err());
        assert!(Lattice::new(qp, 1.0, -2000, 0).is_err());
        assert_eq!(Lattice::default_half_width(&qp), 87);
        assert_eq!(Lattice::default_half_width(&QParams::new(1e6).unwrap()), 40);
    }

    #[test]
    fn u_examples() {
        let l = lat(2.0, 1.3, 5);
        let f = random(&l, 1);
        assert_eq!(apply_u(&f, 0).unwrap(), f);
        let back = apply_u(&apply_u(&f, 1).unwrap(), -1).unwrap();
        assert_eq!(back.window(), (-4, 4));
        for (s, n, _, v) in back.entries() {
            assert_relative_eq!((v - f.get(s, n).unwrap()).norm(), 0.0, epsilon = 1e-15);
        }
        let x = LatticeFunction::from_fn(&l, |_, _, x| x.into());
        let ux = apply_u(&x, 1).unwrap();
        assert_eq!(ux.window(), (-4, 5));
        for (_, _, xv, v) in ux.entries() {
            assert_relative_eq!(v.re, 2f64.powf(-1.5) * xv, max_relative = 1e-15);
        }
    }

    #[test]
    fn p_examples() {
        let l = lat(1.5, 1.1, 6);
        let one = LatticeFunction::from_fn(&l, |_, _, _| 1.0.into());
        assert_eq!(apply_p(&one).unwrap().norm_inf(), 0.0);
        let x = LatticeFunction::from_fn(&l, |_, _, x| x.into());
        for (_, _, _, v) in apply_p(&x).unwrap().entries() {
            assert_relative_eq!(v.im, -1.0, max_relative = 1e-14);
            assert!(v.re.abs() < 1e-14);
        }
        let x2 = LatticeFunction::from_fn(&l, |_, _, x| (x * x).into());
        for (_, _, xv, v) in apply_p(&x2).unwrap().entries() {
            assert_relative_eq!(v.im, -(1.5 + 1.0 / 1.5) * xv, max_relative = 1e-13);
        }
        assert_eq!(apply_p(&x).unwrap().window(), (-5, 5));
    }

    #[test]
    fn x_examples() {
        let l = lat(2.0, 1.0, 3);
        let x = apply_x(&LatticeFunction::from_fn(&l, |_, _, _| 1.0.into()));
        let xx = apply_x(&x);
        for (_, _, xv, v) in xx.entries() {
            assert_eq!(v.re, xv * xv);
        }
        assert_eq!(apply_x(&LatticeFunction::zeros(&l)).norm_inf(), 0.0);
    }

    #[test]
    fn inner_product_examples() {
        let l = lat(2.0, 1.25, 4);
        let f = random(&l, 2);
        let g = random(&l, 3);
        assert_eq!(inner_product(&LatticeFunction::zeros(&l), &g).unwrap(), Complex64::new(0.0, 0.0));
        let fg = inner_product(&f, &g).unwrap();
        let gf = inner_product(&g, &f).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-14 * fg.norm());
        let v = Complex64::new(0.3, -0.4);
        let ind = LatticeFunction::from_fn(&l, |s, n, _| if s == Sign::Minus && n == 2 { v } else { 0.0.into() });
        let ip = inner_product(&ind, &ind).unwrap();
        assert_relative_eq!(ip.re, 1.25 * 1.5 * 4.0 * 0.25, max_relative = 1e-15);
        let other = lat(2.0, 1.5, 4);
        assert!(matches!(
            inner_product(&f, &LatticeFunction::zeros(&other)),
            Err(Error::LatticeMismatch)
        ));
    }

    #[test]
    fn heisenberg_examples() {
        for &q in &[1.1, 1.5, 2.0, 3.0] {
            let l = lat(q, 1.05, 8);
            let f = random(&l, 7);
            let r = heisenberg_residual(&f).unwrap();
            assert!(r < 1e-12 * f.norm_inf(), "q={q} r={r}");
        }
        let l = lat(1.5, 1.0, 4);
        assert_eq!(heisenberg_residual(&LatticeFunction::zeros(&l)).unwrap(), 0.0);
        assert!(matches!(
            heisenberg_residual(&LatticeFunction::zeros(&lat(1.5, 1.0, 1))),
            Err(Error::WindowExhausted(_))
        ));
    }

    #[test]
    fn parity_views_flip_under_odd_shifts() {
        let l = lat(2.0, 1.0, 6).sublattice(Parity::Even);
        let f = LatticeFunction::from_fn(&l, |_, n, _| (n as f64).into());
        assert_eq!(f.point_count(), 2 * 7);
        let pf = apply_p(&f).unwrap();
        assert_eq!(pf.parity(), Parity::Odd);
        assert!(pf.entries().all(|(_, n, _, _)| n.rem_euclid(2) == 1));
        let u2 = apply_u(&f, 2).unwrap();
        assert_eq!(u2.parity(), Parity::Even);
    }

    #[test]
    fn csv_round_trip() {
        let l = lat(1.5, 1.2, 5);
        let f = apply_p(&random(&l, 11)).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let back = read_csv(&l, buf.as_slice()).unwrap();
        assert_eq!(back.window(), f.window());
        for (s, n, _, v) in f.entries() {
            assert_eq!(back.get(s, n).unwrap(), v);
        }
        assert!(read_csv(&l, "a,b\n".as_bytes()).is_err());
    }
}
