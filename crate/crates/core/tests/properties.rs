use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use qline::eigenbasis::{htilde, EigenproblemParams};
use qline::lattice::{apply_p, heisenberg_residual, inner_product, read_csv, write_csv, Lattice, LatticeFunction};
use qline::oscillator::{energy, OscillatorParams, SpectrumLabel};
use qline::qcore::{q_derivative_at, q_exponential, qpoch_inf, qpoch_inf_real};
use qline::qhyper::{phi11_recurrence_stats, Phi11Spec};
use qline::{QParams, Scaled, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn q_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.1), Just(1.5), Just(2.0), Just(3.0), 1.05f64..4.0]
}

fn values(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
}

fn function_on(lat: &Lattice, vals: &[(f64, f64)]) -> LatticeFunction {
    let mut it = vals.iter().cycle();
    LatticeFunction::from_fn(lat, |_, _, _| {
        let &(a, b) = it.next().unwrap();
        Complex64::new(a, b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_below_one_rejected(q in -2.0f64..=1.0) {
        prop_assert!(QParams::new(q).is_err());
    }

    #[test]
    fn pochhammer_product_identity(x in 0.0f64..1.0, b in 0.01f64..0.95) {
        let lhs = qpoch_inf_real(x, b, &tol()).unwrap() * qpoch_inf_real(-x, b, &tol()).unwrap();
        let rhs = qpoch_inf_real(x * x, b * b, &tol()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs());
    }

    #[test]
    fn exponential_modulus_is_weight(y in -20.0f64..20.0, q in q_strategy()) {
        let qp = QParams::new(q).unwrap();
        let e = q_exponential(Complex64::new(0.0, y), &qp, &tol()).unwrap();
        let w = 1.0 / qpoch_inf(Complex64::new(-y * y, 0.0), qp.base4(), &tol()).unwrap().re;
        prop_assert!((e.norm_sqr() - w).abs() <= 1e-10 * w);
    }

    #[test]
    fn exponential_derivative(c in -2.0f64..2.0, x in 0.05f64..1.0, q in q_strategy()) {
        let qp = QParams::new(q).unwrap();
        let f = |t: f64| q_exponential(Complex64::new(c * t, 0.0), &qp, &tol()).unwrap();
        let d = q_derivative_at(f, x, &qp).unwrap();
        let expect = c * q / qp.lambda() * q_exponential(Complex64::new(q * c * x, 0.0), &qp, &tol()).unwrap();
        prop_assert!((d - expect).norm() <= 1e-10 * expect.norm().max(1e-300));
    }

    #[test]
    fn phi11_recurrence_holds(
        a in (-2.0f64..2.0, -2.0f64..2.0),
        c in (-0.9f64..0.9, -0.9f64..0.9),
        z in (-3.0f64..3.0, -3.0f64..3.0),
        q in prop_oneof![Just(1.5f64), Just(2.0), Just(3.0)],
    ) {
        let spec = Phi11Spec {
            a: Complex64::new(a.0, a.1),
            c: Complex64::new(c.0, c.1) * 0.5,
            base: q.powi(-4),
            z: Complex64::new(z.0, z.1),
        };
        let r = phi11_recurrence_stats(&spec, &tol()).unwrap();
        prop_assert!(r.residual <= 1e-9 * r.value.norm().max(1.0));
    }

    #[test]
    fn scaled_product_matches_f64(a in -1e10f64..1e10, b in -1e10f64..1e10) {
        let p = (Scaled::from_real(a) * Scaled::from_real(b)).to_f64();
        prop_assert!((p - a * b).abs() <= 1e-15 * (a * b).abs());
    }

    #[test]
    fn inner_product_is_hermitian_and_sesquilinear(
        q in q_strategy(),
        fv in values(17),
        gv in values(19),
        s in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let qp = QParams::new(q).unwrap();
        let lat = Lattice::new(qp, 1.02, -5, 5).unwrap();
        let f = function_on(&lat, &fv);
        let g = function_on(&lat, &gv);
        let fg = inner_product(&f, &g).unwrap();
        let gf = inner_product(&g, &f).unwrap();
        prop_assert!((fg - gf.conj()).norm() <= 1e-13 * (1.0 + fg.norm()));
        let s = Complex64::new(s.0, s.1);
        let sg = inner_product(&f, &g.scale(s)).unwrap();
        prop_assert!((sg - s * fg).norm() <= 1e-12 * (1.0 + sg.norm()));
        let sf = inner_product(&f.scale(s), &g).unwrap();
        prop_assert!((sf - s.conj() * fg).norm() <= 1e-12 * (1.0 + sf.norm()));
        prop_assert!(inner_product(&f, &f).unwrap().re >= 0.0);
    }

    #[test]
    fn p_is_symmetric_on_interior_supports(q in q_strategy(), fv in values(7), gv in values(7)) {
        let qp = QParams::new(q).unwrap();
        let lat = Lattice::new(qp, 1.02, -10, 10).unwrap();
        let inner = |vals: &[(f64, f64)]| {
            let mut it = vals.iter();
            LatticeFunction::from_fn(&lat, |_, n, _| match n.abs() <= 3 {
                true => it.next().map(|&(a, b)| Complex64::new(a, b)).unwrap_or_default(),
                false => Complex64::default(),
            })
        };
        let (f, g) = (inner(&fv), inner(&gv));
        let a = inner_product(&f, &apply_p(&g).unwrap()).unwrap();
        let b = inner_product(&apply_p(&f).unwrap(), &g).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn heisenberg_relations_hold(q in q_strategy(), fv in values(23)) {
        let qp = QParams::new(q).unwrap();
        let lat = Lattice::new(qp, 1.02, -4, 4).unwrap();
        let f = function_on(&lat, &fv);
        prop_assert!(heisenberg_residual(&f).unwrap() <= 1e-11 * f.norm_inf().max(1e-300));
    }

    #[test]
    fn csv_round_trip_is_exact(q in q_strategy(), fv in values(13)) {
        let qp = QParams::new(q).unwrap();
        let lat = Lattice::new(qp, 1.0, -6, 6).unwrap();
        let f = function_on(&lat, &fv);
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let g = read_csv(&lat, std::io::BufReader::new(&buf[..])).unwrap();
        prop_assert_eq!(f, g);
    }

    #[test]
    fn htilde_parity(m in 0u32..8, u in 0.01f64..50.0, q in prop_oneof![Just(1.5f64), Just(2.0)]) {
        let qp = QParams::new(q).unwrap();
        let a = htilde(m, u, &qp, &tol()).unwrap();
        let b = htilde(m, -u, &qp, &tol()).unwrap();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() <= 1e-14 * a.abs());
    }

    #[test]
    fn accumulation_point_separates_families(q in q_strategy(), gamma in -1.0f64..1.0, m in 0u32..12, k in -12i32..12) {
        let qp = QParams::new(q).unwrap();
        let acc = qp.accumulation_point();
        let (fock, nonfock) = (SpectrumLabel::Fock { m }, SpectrumLabel::NonFock { m: k, gamma });
        prop_assert!(energy(&fock, &qp) < acc);
        prop_assert!(energy(&nonfock, &qp) > acc);
    }

    #[test]
    fn oscillator_parameter_identities(q in q_strategy(), gamma in -1.0f64..1.0) {
        let op = OscillatorParams::new(QParams::new(q).unwrap(), gamma).unwrap();
        assert_relative_eq!(op.alpha().norm_sqr(), q / op.qp.lambda(), max_relative = 1e-14);
        let r = op.alpha() / op.beta();
        prop_assert!(r.im.abs() <= 1e-14 * r.re.abs());
        assert_relative_eq!(r.re, q.powf(-gamma), max_relative = 1e-13);
    }

    #[test]
    fn calibration_ties_scale_to_c(q in q_strategy(), gamma in -1.0f64..1.0) {
        let op = OscillatorParams::new(QParams::new(q).unwrap(), gamma).unwrap();
        let ep = EigenproblemParams::calibrated(op);
        assert_relative_eq!(ep.c(), q.powf(-2.0 * gamma), max_relative = 1e-13);
    }
}
