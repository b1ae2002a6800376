use approx::assert_relative_eq;
use proptest::prelude::*;
use ws_lattice::Complex64;
use ws_tightbinding::*;

/// Power series sum_k (-1)^k (z/2)^{2k+n} / (k! (k+n)!), summed until the terms vanish.
fn series_j(n: usize, z: f64) -> f64 {
    let h = 0.5 * z;
    let mut term = h.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
    let mut s = term;
    for k in 1..200 {
        term *= -h * h / (k as f64 * (k + n) as f64);
        s += term;
        if term.abs() < 1e-18 * s.abs().max(1e-300) {
            break;
        }
    }
    s
}

#[test]
fn miller_matches_power_series() {
    for &z in &[1e-3, 0.1, 0.4935, 1.0, 2.5, 3.7, 5.0] {
        let j = bessel_j_all(15, z);
        for (n, v) in j.iter().enumerate() {
            let s = series_j(n, z);
            assert!((v - s).abs() <= 1e-14 + 1e-12 * s.abs(), "J_{n}({z}) = {v} vs series {s}");
        }
    }
}

#[test]
fn j1_at_the_resonant_drive_argument() {
    let f0 = ws_lattice::M_STAR * 0.2 * 0.25;
    let z = f0 / 0.5;
    assert_relative_eq!(z, 0.4935, epsilon = 1e-4);
    assert!((bessel_j(1, z) - 0.2393).abs() < 1e-4);
    assert_relative_eq!(bessel_j(1, z), series_j(1, z), epsilon = 1e-15);
}

#[test]
fn symmetries_and_zero_argument() {
    assert_eq!(bessel_j_all(6, 0.0), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    for n in 0..8i64 {
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert_relative_eq!(bessel_j(-n, 1.7), s * bessel_j(n, 1.7), epsilon = 1e-15);
        assert_relative_eq!(bessel_j(n, -1.7), s * bessel_j(n, 1.7), epsilon = 1e-15);
    }
    // large argument, compared with tabulated J_0(20), J_1(20)
    assert!((bessel_j(0, 20.0) - 0.167_024_664_340_583).abs() < 1e-13);
    assert!((bessel_j(1, 20.0) - 0.066_833_124_175_850).abs() < 1e-13);
}

#[test]
fn expansion_examples() {
    let terms = bessel_expansion_terms(1, 0.0, 0.5, 4).unwrap();
    for (l, c) in &terms {
        if *l == 0 {
            assert_eq!(*c, Complex64::new(1.0, 0.0));
        } else {
            assert_eq!(c.norm(), 0.0);
        }
    }
    let terms = bessel_expansion_terms(1, 1.0, 1.0, 20).unwrap();
    assert!(expansion_error(&terms, 1.0, 64) <= 1e-10);
    assert!(matches!(bessel_expansion_terms(3, 2.0, 0.5, 8), Err(TightBindingError::LMaxTooSmall { .. })));
    assert!(bessel_expansion_terms(1, 1.0, 0.0, 8).is_err());
}

proptest! {
    #[test]
    fn recurrence_identity(z in 1e-6f64..=5.0) {
        let j = bessel_j_all(2, z);
        prop_assert!((j[0] + j[2] - 2.0 * j[1] / z).abs() <= 1e-12);
    }

    #[test]
    fn normalization_sums(z in 0.0f64..12.0) {
        let j = bessel_j_all(40, z);
        let even: f64 = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
        let sq: f64 = j[0] * j[0] + 2.0 * j.iter().skip(1).map(|v| v * v).sum::<f64>();
        prop_assert!((even - 1.0).abs() < 1e-13);
        prop_assert!((sq - 1.0).abs() < 1e-13);
    }

    #[test]
    fn generating_function_partial_sum(z in -3.0f64..3.0) {
        let l_max = min_l_max(z) + 12;
        let terms = bessel_expansion_terms(1, z, 1.0, l_max).unwrap();
        prop_assert!(expansion_error(&terms, z, 64) <= 1e-10);
    }
}

#[test]
fn default_l_max_meets_the_tolerance() {
    for (a, w) in [(0.2, 0.5), (0.05, 1.0), (0.2, 0.52), (0.6, 0.5)] {
        let m = ws_lattice::ModulationSpec::phase(a, w).unwrap();
        let l = default_l_max(&m, 3);
        assert!(l >= (3.0 * m.f0() / w).ceil() as usize + 6);
        for p in 1..=3 {
            let terms = bessel_expansion_terms(p, m.f0(), w, l).unwrap();
            assert!(expansion_error(&terms, p as f64 * m.f0() / w, 64) <= EXPANSION_TOL);
        }
    }
}
