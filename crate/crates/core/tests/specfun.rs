use num_complex::Complex64;
use pdemscatter::specfun::{gauss_2f1, gauss_2f1_derivative, ln_gamma, routes, HypergeometricArgs};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn read_fixture(name: &str) -> Vec<Vec<f64>> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

/// Parameters of the interior hypergeometric basis for a model point.
fn contour_args(mu1: f64, mu2: f64, beta: f64, energy: f64, z: f64) -> HypergeometricArgs {
    let v1 = mu1 * beta * beta - 0.25;
    let v2 = mu2 * beta * beta;
    let kappa = c(energy * beta * beta - 0.25, 0.0).sqrt();
    let p = c(0.25 + v1 + v2, 0.0).sqrt() * 0.5 + 0.25;
    let q = c(0.25 + v1 - v2, 0.0).sqrt() * 0.5 + 0.25;
    let i = c(0.0, 1.0);
    HypergeometricArgs::new(p + q - i * kappa, p + q + i * kappa, p * 2.0 + 0.5, c(0.5, z / 2.0))
}

#[test]
fn hypergeometric_matches_high_precision_fixtures() {
    let rows = read_fixture("hyp2f1_fixtures.csv");
    assert_eq!(rows.len(), 100);
    let mut worst = 0.0f64;
    for r in &rows {
        let args = HypergeometricArgs::new(c(r[0], r[1]), c(r[2], r[3]), c(r[4], r[5]), c(r[6], r[7]));
        let got = gauss_2f1(&args).unwrap();
        let err = rel(got, c(r[8], r[9]));
        assert!(err <= 1e-9, "{args:?}: got {got}, rel err {err:e}");
        worst = worst.max(err);
    }
    println!("worst fixture relative error {worst:e}");
}

#[test]
fn ln_gamma_matches_high_precision_fixtures() {
    for r in read_fixture("lngamma_fixtures.csv") {
        let z = c(r[0], r[1]);
        let want = c(r[2], r[3]);
        let got = ln_gamma(z).unwrap();
        let err = (got - want).norm() / want.norm().max(1.0);
        assert!(err <= 1e-12, "z = {z}: got {got}, want {want}");
    }
}

#[test]
fn worked_example_value() {
    let args = HypergeometricArgs::new(c(0.854, 0.0), c(5.412, -2.1), c(1.707, 0.0), c(0.5, 0.3));
    let want = c(4.024_316_004_922_254, 11.757_164_185_321_856);
    assert!(rel(gauss_2f1(&args).unwrap(), want) < 1e-12);
}

#[test]
fn ln_gamma_small_integers() {
    let mut factorial = 1.0f64;
    for n in 1..20 {
        let v = ln_gamma(c(n as f64, 0.0)).unwrap();
        assert!((v.re - factorial.ln()).abs() <= 1e-12 * factorial.ln().max(1.0));
        factorial *= n as f64;
    }
}

#[test]
fn gauss_summation_suite() {
    let cases = [
        (c(0.3, 0.0), c(0.4, 0.0), c(2.5, 0.0)),
        (c(1.2, 0.7), c(-0.3, 1.1), c(3.0, 0.2)),
        (c(5.4, -4.0), c(5.4, 4.0), c(12.3, 0.0)),
        (c(-2.5, 0.0), c(0.75, 0.5), c(1.25, 0.0)),
    ];
    for (a, b, cc) in cases {
        let args = HypergeometricArgs::new(a, b, cc, c(1.0, 0.0));
        let got = gauss_2f1(&args).unwrap();
        let want = (ln_gamma(cc).unwrap() + ln_gamma(cc - a - b).unwrap()
            - ln_gamma(cc - a).unwrap()
            - ln_gamma(cc - b).unwrap())
        .exp();
        assert!(rel(got, want) < 1e-8);
        // approaching the unit point from inside the disk
        let near = HypergeometricArgs::new(a, b, cc, c(1.0 - 1e-9, 0.0));
        if (cc - a - b).re > 1.0 {
            assert!(rel(gauss_2f1(&near).unwrap(), want) < 1e-6);
        }
    }
}

#[test]
fn derivative_agrees_with_finite_differences_on_contour() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let h = 1e-6;
    for _ in 0..100 {
        let mu1 = rng.gen_range(0.5..4.0);
        let mu2 = rng.gen_range(0.0..mu1);
        let beta = rng.gen_range(1.0..4.0);
        let energy = rng.gen_range(0.1..3.0);
        let z = rng.gen_range(-6.0..6.0);
        let args = contour_args(mu1, mu2, beta, energy, z);
        let mut plus = args;
        plus.y += h;
        let mut minus = args;
        minus.y -= h;
        let fd = (gauss_2f1(&plus).unwrap() - gauss_2f1(&minus).unwrap()) / (2.0 * h);
        let exact = gauss_2f1_derivative(&args).unwrap();
        assert!(rel(fd, exact) < 1e-6, "{args:?}: fd {fd}, exact {exact}");
    }
}

#[test]
fn one_minus_route_matches_series_in_overlap() {
    // lens where both |y| <= 0.6 and |1 - y| <= 0.6
    let params = [
        (c(0.854, 0.0), c(5.412, -2.1), c(1.707, 0.0)),
        (c(2.4, -1.3), c(2.4, 1.3), c(4.1, 0.0)),
        (c(0.6, 0.2), c(1.3, -0.4), c(2.1, 0.5)),
    ];
    for (a, b, cc) in params {
        for y in [c(0.5, 0.0), c(0.45, 0.3), c(0.55, -0.3), c(0.5, 0.33)] {
            let direct = routes::maclaurin(a, b, cc, y).unwrap();
            let connected = routes::via_one_minus(a, b, cc, y).unwrap();
            assert!(rel(connected, direct) < 1e-9, "a={a} b={b} c={cc} y={y}");
        }
    }
}

#[test]
fn cancelling_connection_falls_back_to_continuation() {
    // the y -> 1 - y terms here are ~6e9 and sum to ~14
    let (a, b, cc) = (c(5.4, -3.9), c(5.4, 3.9), c(10.3, 0.0));
    // references from mpmath at 30 digits
    let cases =
        [(c(0.9, 0.3), c(-115.144_868_561_343_1, -58.414_138_116_225_12)), (c(0.5, 0.0), c(14.436_421_619_206_9, 0.0))];
    for (y, want) in cases {
        let got = gauss_2f1(&HypergeometricArgs::new(a, b, cc, y)).unwrap();
        assert!(rel(got, want) < 1e-9, "y = {y}: {got}");
        let continued = routes::ode_continuation(a, b, cc, y).unwrap();
        assert!(rel(continued, want) < 1e-9, "y = {y}: {continued}");
    }
}

#[test]
fn hard_band_near_sixth_roots_of_unity() {
    // exp(±iπ/3): every linear-fractional map keeps |w| = 1 here.
    let y = c(0.5, 3f64.sqrt() / 2.0);
    let args = HypergeometricArgs::new(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), y);
    let exact = -(c(1.0, 0.0) - y).ln() / y;
    assert!(rel(gauss_2f1(&args).unwrap(), exact) < 1e-13);
    let args = HypergeometricArgs::new(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), y.conj());
    assert!(rel(gauss_2f1(&args).unwrap(), exact.conj()) < 1e-13);
}

fn contour_strategy() -> impl Strategy<Value = HypergeometricArgs> {
    (0.5f64..4.0, 0.0f64..1.0, 1.0f64..4.0, 0.07f64..3.0, -10.0f64..10.0)
        .prop_map(|(mu1, frac, beta, energy, z)| contour_args(mu1, mu1 * frac, beta, energy, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn contiguous_relation(args in contour_strategy()) {
        let HypergeometricArgs { a, b, c: cc, y } = args;
        let f = |a, b, cc| gauss_2f1(&HypergeometricArgs::new(a, b, cc, y)).unwrap();
        let t1 = cc * (c(1.0, 0.0) - y) * f(a, b, cc);
        let t2 = cc * f(a - 1.0, b, cc);
        let t3 = (cc - b) * y * f(a, b, cc + 1.0);
        let scale = t1.norm().max(t2.norm()).max(t3.norm());
        prop_assert!((t1 - t2 + t3).norm() <= 1e-8 * scale);
    }

    #[test]
    fn symmetric_in_a_and_b(args in contour_strategy()) {
        let swapped = HypergeometricArgs::new(args.b, args.a, args.c, args.y);
        let f = gauss_2f1(&args).unwrap();
        let g = gauss_2f1(&swapped).unwrap();
        prop_assert!(rel(f, g) <= 1e-8);
    }

    #[test]
    fn ln_gamma_recurrence(re in -50.0f64..50.0, im in -50.0f64..50.0) {
        let z = c(re, im);
        prop_assume!(z.norm() <= 50.0 && (z.im.abs() > 1e-3 || (z.re - z.re.round()).abs() > 1e-3));
        let lhs = ln_gamma(z + 1.0).unwrap();
        let rhs = ln_gamma(z).unwrap() + z.ln();
        // equality holds modulo 2πi on the principal branch
        let diff = lhs - rhs;
        let k = (diff.im / (2.0 * std::f64::consts::PI)).round();
        let residual = diff - c(0.0, 2.0 * std::f64::consts::PI * k);
        prop_assert!(residual.norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn ode_continuation_agrees_with_dispatcher(args in contour_strategy()) {
        let HypergeometricArgs { a, b, c: cc, y } = args;
        let dispatched = gauss_2f1(&args).unwrap();
        let continued = routes::ode_continuation(a, b, cc, y).unwrap();
        prop_assert!(rel(continued, dispatched) <= 1e-9);
    }
}
