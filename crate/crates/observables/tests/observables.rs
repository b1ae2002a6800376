use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use ws_basis::Couplings;
use ws_lattice::{Complex64, GridSpec};
use ws_observables::*;

fn couplings() -> Couplings {
    Couplings::from_table(0.4877, &[0.135, -0.008, 0.00095], -0.309, 0.5)
}

fn noisy_sine(amp: f64, w: f64, ph: f64, off: f64, t_end: f64, n: usize, noise: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let t: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
    let y = t.iter().map(|&s| amp * (w * s + ph).sin() + off + noise * rng.gen_range(-1.0..1.0)).collect();
    (t, y)
}

#[test]
fn oscillation_fit_recovers_beat_parameters() {
    let t_end = 4.0 * std::f64::consts::PI / 0.02;
    let (t, y) = noisy_sine(1.55, 0.02, 0.3, -0.7, t_end, 2000, 1e-3, 7);
    let f = fit_oscillation(&t, &y).unwrap();
    assert!((f.omega - 0.02).abs() <= 0.01 * 0.02);
    assert!((f.amplitude - 1.55).abs() <= 0.02 * 1.55);
    assert!((f.offset + 0.7).abs() < 1e-2);
    assert!(f.r2 > 0.999);
    assert!(f.std_err.iter().all(|s| s.is_finite()));
}

#[test]
fn oscillation_fit_rejects_short_records_and_twin_peaks() {
    let (t, y) = noisy_sine(1.0, 0.5, 0.0, 0.0, 1.2 * 2.0 * std::f64::consts::PI / 0.5, 200, 0.0, 1);
    assert!(matches!(fit_oscillation(&t, &y), Err(ObservablesError::InsufficientData(_))));
    let t: Vec<f64> = (0..2000).map(|i| i as f64 * 0.1).collect();
    let y: Vec<f64> = t.iter().map(|s| (0.5 * s).sin() + (1.3 * s).sin()).collect();
    assert!(matches!(fit_oscillation(&t, &y), Err(ObservablesError::AmbiguousPeak { .. })));
    assert!(fit_oscillation(&t[..3], &y[..3]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn oscillation_fit_randomized(amp in 0.3f64..2.0, w in 0.05f64..1.0, ph in -3.0f64..3.0, off in -1.0f64..1.0,
                                  periods in 2.5f64..6.0, seed in 0u64..1_000_000) {
        let t_end = periods * 2.0 * std::f64::consts::PI / w;
        let (t, y) = noisy_sine(amp, w, ph, off, t_end, 600, 1e-3, seed);
        let f = fit_oscillation(&t, &y).unwrap();
        prop_assert!((f.omega - w).abs() <= 0.01 * w);
        prop_assert!((f.amplitude - amp).abs() <= 0.02 * amp);
    }
}

#[test]
fn group_velocity_removes_micro_motion() {
    let period = 4.0 * std::f64::consts::PI;
    let t: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.05).collect();
    let y: Vec<f64> = t.iter().map(|s| 1.0 - 0.03 * s + 0.2 * (0.5 * s).sin()).collect();
    let v = fit_group_velocity(&t, &y, period, Some(0.99)).unwrap();
    assert!((v.slope + 0.03).abs() < 1e-4);
    assert!((v.group_velocity() - 0.03).abs() < 1e-4);
    assert_eq!(v.periods, 15);
    let still: Vec<f64> = t.iter().map(|s| 0.2 * (0.5 * s).sin()).collect();
    let v = fit_group_velocity(&t, &still, period, None).unwrap();
    assert!(v.slope.abs() <= 0.002);
    assert!(v.max_drift() < 1e-3);
    assert!(matches!(fit_group_velocity(&t, &still, period, Some(0.9)), Err(ObservablesError::PoorLinearFit { .. })));
}

#[test]
fn linear_fit_exact_line() {
    let t = [0.0, 1.0, 2.0, 3.0];
    let y = [1.0, 3.0, 5.0, 7.0];
    let f = linear_fit(&t, &y).unwrap();
    assert_relative_eq!(f.slope, 2.0, epsilon = 1e-14);
    assert_relative_eq!(f.intercept, 1.0, epsilon = 1e-14);
    assert_relative_eq!(f.r2, 1.0, epsilon = 1e-14);
}

#[test]
fn harmonics_are_separated() {
    let t: Vec<f64> = (0..3000).map(|i| i as f64 * 0.05).collect();
    let y: Vec<f64> = t.iter().map(|s| 0.3 + 0.27 * (0.5 * s + 0.1).cos() + 0.016 * (1.0 * s).sin()).collect();
    let h = harmonic_amplitudes(&t, &y, 0.5, 3).unwrap();
    assert!((h[0] - 0.27).abs() < 1e-10);
    assert!((h[1] - 0.016).abs() < 1e-10);
    assert!(h[2] < 1e-10);
}

fn traj(shift: f64) -> Trajectory {
    let mut tr = Trajectory::new(Representation::Grid);
    for i in 0..50 {
        let t = i as f64 * 0.5;
        tr.push(t, (0.1 * t).sin() + shift, 1.0 + 0.01 * t, 1.0, f64::NAN);
        tr.coeffs.push(SiteAmplitudes::new(-1, vec![Complex64::new(1.0, 0.0), Complex64::cis(0.1 * t + shift)]));
    }
    tr
}

#[test]
fn compare_identical_and_shifted() {
    let a = traj(0.0);
    let c = compare_trajectories(&a, &a).unwrap();
    assert_eq!(c.max_dmean, 0.0);
    assert_eq!(c.max_dwidth, 0.0);
    assert_eq!(c.samples, 50);
    assert!(c.fidelity.iter().all(|f| (f.1 - 1.0).abs() < 1e-15));
    let b = traj(0.2);
    let c = compare_trajectories(&a, &b).unwrap();
    assert!((c.max_dmean - 0.2).abs() < 1e-12);
    assert!(c.min_fidelity().unwrap() < 1.0);
}

#[test]
fn compare_resamples_and_rejects_disjoint() {
    let a = traj(0.0);
    let mut b = Trajectory::new(Representation::TightBinding);
    for i in 0..25 {
        let t = i as f64;
        b.push(t, (0.1 * t).sin(), 1.0 + 0.01 * t, 1.0, f64::NAN);
    }
    let c = compare_trajectories(&a, &b).unwrap();
    // exact on shared timestamps, linear interpolation error elsewhere
    assert!(c.max_dmean < 0.5 * 0.25 * 0.01 + 1e-12);
    assert!(c.max_dwidth < 1e-12);
    let mut far = Trajectory::new(Representation::Grid);
    far.push(100.0, 0.0, 1.0, 1.0, 0.0);
    far.push(101.0, 0.0, 1.0, 1.0, 0.0);
    assert_eq!(compare_trajectories(&a, &far), Err(ObservablesError::DisjointRanges));
}

#[test]
fn wss_mean_position_formula() {
    let x = couplings();
    let amps: Vec<Complex64> = [0.2, 0.5, 0.7, 0.4].iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let mut c = SiteAmplitudes::new(-1, amps);
    c.normalize();
    let a: Vec<f64> = c.amps.iter().map(|z| z.re).collect();
    let diag: f64 = (0..4).map(|i| (x.x00() + (i as f64 - 1.0)) * a[i] * a[i]).sum();
    let coh1: f64 = (0..3).map(|i| a[i] * a[i + 1]).sum();
    let coh2: f64 = (0..2).map(|i| a[i] * a[i + 2]).sum();
    let coh3 = a[0] * a[3];
    let want = diag + 2.0 * (0.135 * coh1 - 0.008 * coh2 + 0.00095 * coh3);
    assert_relative_eq!(mean_position_wss(&c, &x), want, epsilon = 1e-14);
    assert_relative_eq!(mean_position_wss_free(&c, &x, 0.0), want, epsilon = 1e-14);
    // period 2 pi / omega_B brings the coherences back
    assert_relative_eq!(mean_position_wss_free(&c, &x, 4.0 * std::f64::consts::PI), want, epsilon = 1e-12);
}

#[test]
fn single_site_does_not_oscillate() {
    let x = couplings();
    let c = SiteAmplitudes::new(3, vec![Complex64::new(1.0, 0.0)]);
    for t in [0.0, 1.0, 3.3, 10.0] {
        assert_relative_eq!(mean_position_wss_free(&c, &x, t), x.x00() + 3.0, epsilon = 1e-14);
    }
}

#[test]
fn grid_moments_of_a_gaussian() {
    let g = GridSpec::default_box();
    let sigma = 3.0;
    let mut psi: Vec<Complex64> =
        g.xs().iter().map(|x| Complex64::new((-(x - 1.5).powi(2) / (4.0 * sigma * sigma)).exp(), 0.0)).collect();
    let n = norm_grid(&g, &psi).sqrt();
    psi.iter_mut().for_each(|p| *p /= n);
    assert_relative_eq!(norm_grid(&g, &psi), 1.0, epsilon = 1e-14);
    assert!((mean_position_grid(&g, &psi) - 1.5).abs() < 1e-9);
    assert!((width_grid(&g, &psi) - sigma).abs() < 1e-6);
}

#[test]
fn sublattice_and_site_width() {
    let x = couplings();
    let mut amps = vec![Complex64::new(0.0, 0.0); 7];
    amps[1] = Complex64::new(1.0, 0.0);
    amps[5] = Complex64::new(0.0, 1.0);
    amps[2] = Complex64::new(1.0, 0.0);
    let c = SiteAmplitudes::new(-3, amps);
    let (odd, even) = sublattice_centroids(&c);
    assert_relative_eq!(odd, -1.0, epsilon = 1e-15);
    assert_relative_eq!(even, 0.0, epsilon = 1e-15);
    let single = SiteAmplitudes::new(0, vec![Complex64::new(1.0, 0.0)]);
    assert_eq!(width_sites(&single, &x), 0.0);
}

#[test]
fn trajectory_validation_and_csv() {
    let mut tr = traj(0.0);
    tr.validate(1e-6).unwrap();
    tr.norm[3] = 1.1;
    assert!(matches!(tr.validate(1e-6), Err(ObservablesError::NormOutOfTolerance { .. })));
    tr.norm[3] = 1.0;
    tr.t[4] = tr.t[3];
    assert_eq!(tr.validate(1e-6), Err(ObservablesError::NonMonotonicTime { index: 4 }));
    let dir = std::env::temp_dir().join(format!("ws-obs-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("t.csv");
    traj(0.0).write_csv(&p).unwrap();
    let s = std::fs::read_to_string(&p).unwrap();
    assert!(s.starts_with(&format!("# ws-trajectory v{} representation=grid\nt,mean_x,width,norm,residual\n", CSV_SCHEMA_VERSION)));
    assert_eq!(s.lines().count(), 52);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_is_ordered_and_deterministic() {
    let mut r = Report::new();
    r.set_f64("z", 1.5);
    r.set_f64("a", f64::NAN);
    r.set("m", "text");
    let j = r.to_json();
    assert!(j.find("\"a\"").unwrap() < j.find("\"m\"").unwrap());
    assert_eq!(j, r.clone().to_json());
    assert_eq!(r.to_text(), "a = NaN\nm = text\nz = 1.5\n");
    assert_eq!(r.get_f64("z"), Some(1.5));
}
