use approx::assert_relative_eq;
use proptest::prelude::*;
use ws_basis::Couplings;
use ws_lattice::{Complex64, LatticeParams, ModulationSpec, M_STAR};
use ws_observables::{fit_group_velocity, linear_fit, sublattice_centroids, SiteAmplitudes};
use ws_tightbinding::*;

// bulk couplings of the V0 = 2.5, F = 0.5 box basis
const X00: f64 = 0.48765;
const X: [f64; 3] = [0.134965, -0.0079811, 0.00094937];
const E_REF: f64 = -0.309015;

fn couplings() -> Couplings {
    Couplings::from_table(X00, &X, E_REF, 0.5)
}

fn params() -> LatticeParams {
    LatticeParams::new(2.5, 0.5).unwrap()
}

fn chain() -> TbChain {
    TbChain::new(couplings(), DEFAULT_SITES).unwrap()
}

fn gauss(sigma: f64) -> impl Fn(i64) -> f64 {
    move |n| (-(n as f64).powi(2) / (4.0 * sigma * sigma)).exp()
}

#[test]
fn resonant_rate_reduces_to_the_bessel_closed_form() {
    let m = ModulationSpec::phase(0.2, 0.5).unwrap();
    let model = secular_reduce(&params(), &m, &couplings(), 1, &SecularOptions::default()).unwrap();
    let omega1 = rabi_frequency(1, m.f0(), 0.5, X[0]).unwrap();
    assert_relative_eq!(model.rate, omega1, max_relative = 1e-13);
    assert_relative_eq!(omega1, 0.5 * X[0] * bessel_j(1, m.f0() / 0.5), max_relative = 1e-15);
    let dom = model.dominant_only();
    assert_eq!(dom.terms.len(), 2);
    assert!(model.truncation_error <= EXPANSION_TOL);
    // every retained term is at exact resonance, and the generator is anti-Hermitian
    for t in &model.terms {
        assert!(t.nu.abs() < 1e-12);
        let partner = model.terms.iter().find(|u| u.p == -t.p && u.m == -t.m).unwrap();
        assert!((partner.coeff + t.coeff.conj()).norm() < 1e-15);
    }
    assert!(model.terms.iter().any(|t| t.p == 2 && t.m == 2));

    let m2 = ModulationSpec::phase(0.2, 1.0).unwrap();
    let model2 = secular_reduce(&params(), &m2, &couplings(), 2, &SecularOptions::default()).unwrap();
    let omega2 = rabi_frequency(2, m2.f0(), 0.5, X[1]).unwrap();
    assert_relative_eq!(model2.rate, omega2, max_relative = 1e-13);
    assert!(model2.terms.iter().all(|t| t.p % 2 == 0));
    assert!(model2.to_text().contains("p,m,l"));
}

#[test]
fn rabi_frequency_examples() {
    let f0 = M_STAR * 0.2 * 0.25;
    let om = rabi_frequency(1, f0, 0.5, 0.13).unwrap();
    assert!((om - 0.0156).abs() < 1e-4, "Omega_1 = {om}");
    assert!((2.0 * om - 0.031).abs() < 5e-4);
    assert_eq!(rabi_frequency(1, 0.0, 0.5, 0.13).unwrap(), 0.0);
    assert_relative_eq!(rabi_frequency(1, f0, 0.5, 0.26).unwrap(), 2.0 * om, max_relative = 1e-15);
    assert!(matches!(rabi_frequency(3, f0, 0.5, 0.13), Err(TightBindingError::UnsupportedOrder(3))));
    // small drive: J_1(z) ~ z / 2, so Omega_1 ~ F0 X_1 / 2
    for f in [1e-3, 1e-4, 1e-5] {
        let r = rabi_frequency(1, f, 0.5, 0.13).unwrap() / f;
        assert!((r - 0.065).abs() < 0.065 * f);
    }
}

#[test]
fn off_resonant_drive_is_rejected() {
    let m = ModulationSpec::phase(0.2, 0.75).unwrap();
    assert!(matches!(
        secular_reduce(&params(), &m, &couplings(), 1, &SecularOptions::default()),
        Err(TightBindingError::NoResonance { .. })
    ));
}

#[test]
fn dispersion_examples_and_finite_difference_velocity() {
    let model = SecularModel::ideal(1, 0.0156, 0.5, 0.0);
    let (w, v) = dispersion_and_vg(0.0, &model).unwrap();
    assert_eq!(w, 0.0);
    assert_relative_eq!(v, 2.0 * 0.0156);
    let (w, v) = dispersion_and_vg(std::f64::consts::FRAC_PI_2, &model).unwrap();
    assert_relative_eq!(w, 2.0 * 0.0156);
    assert!(v.abs() < 1e-17);
    for model in [model, SecularModel::ideal(2, -0.0008, 0.5, 0.0)] {
        for k0 in [0.3, 1.1, 2.0, 2.9] {
            let fd = |h: f64| {
                let (wp, _) = dispersion_and_vg(k0 + h, &model).unwrap();
                let (wm, _) = dispersion_and_vg(k0 - h, &model).unwrap();
                (wp - wm) / (2.0 * h)
            };
            let (_, v) = dispersion_and_vg(k0, &model).unwrap();
            let (e1, e2) = ((fd(0.02) - v).abs(), (fd(0.01) - v).abs());
            assert!(e1 < 1e-3 * v.abs().max(1e-3));
            assert!((e1 / e2 - 4.0).abs() < 0.05, "error ratio {}", e1 / e2);
        }
    }
}

#[test]
fn plane_wave_frequency_follows_the_dispersion() {
    let c = chain();
    let model = SecularModel::ideal(1, rabi_frequency(1, M_STAR * 0.05, 0.5, X[0]).unwrap(), 0.5, 0.0);
    let none = ModulationSpec::none();
    for j in 0..8 {
        let k0 = (j as f64 + 0.5) * std::f64::consts::PI / 4.0;
        let init = TightBindingState::plane_wave_packet(&c, gauss(50.0), k0, Picture::Interaction).unwrap();
        let r = integrate_dn_resonant(&init, &c, &none, &model, &TbOptions::new(100.0, 0.1, 100)).unwrap();
        let d0 = init.amps.get(0);
        let d1 = r.final_state.amps.get(0);
        let freq = (d1 / d0).arg() / 100.0;
        let (w, _) = dispersion_and_vg(k0, &model).unwrap();
        assert!((freq - w).abs() <= 0.02 * w.abs(), "k0 = {k0}: {freq} vs {w}");
    }
}

#[test]
fn undriven_chain_only_rotates_phases() {
    let c = chain();
    let m = ModulationSpec::none();
    let init = TightBindingState::plane_wave_packet(&c, gauss(4.0), 0.3, Picture::Bare).unwrap();
    let t_end = 37.0;
    let r = integrate_cn(&init, &c, &m, &TbOptions::new(t_end, 0.05, 20)).unwrap();
    for n in -20..20 {
        let want = init.amps.get(n) * Complex64::cis(-c.energy(n) * t_end);
        assert!((r.final_state.amps.get(n) - want).norm() < 1e-12);
    }
    let d = to_interaction_picture(&r.final_state, &c, &m).unwrap();
    for n in -20..20 {
        assert!((d.amps.get(n) - init.amps.get(n)).norm() < 1e-12);
    }
}

#[test]
fn picture_round_trip() {
    let c = chain();
    let m = ModulationSpec::phase(0.2, 0.5).unwrap();
    let mut s = TightBindingState::plane_wave_packet(&c, gauss(3.0), 0.8, Picture::Bare).unwrap();
    for t in [0.0, 3.3, 117.0] {
        s.t = t;
        let d = to_interaction_picture(&s, &c, &m).unwrap();
        for n in -10..10 {
            assert_relative_eq!(d.amps.get(n).norm(), s.amps.get(n).norm(), epsilon = 1e-15);
        }
        if t == 0.0 {
            let want = s.amps.get(2) * Complex64::cis(m.f0() * (X00 + 2.0) / m.omega - 0.0);
            assert!((d.amps.get(2) - want).norm() < 1e-14);
        }
        let back = from_interaction_picture(&d, &c, &m).unwrap();
        let err = back.amps.amps.iter().zip(&s.amps.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!(matches!(to_interaction_picture(&d, &c, &m), Err(TightBindingError::WrongPicture { .. })));
    }
}

fn resonant_centroid_velocity(k0: f64) -> f64 {
    let c = chain();
    let m = ModulationSpec::phase(0.2, 0.5).unwrap();
    let init = TightBindingState::plane_wave_packet(&c, gauss(5.0), k0, Picture::Interaction).unwrap();
    let r = integrate_cn(&init, &c, &m, &TbOptions::new(200.0, 0.01, 50)).unwrap();
    assert!(r.max_norm_error < 1e-9);
    let tr = &r.trajectory;
    fit_group_velocity(&tr.t, &tr.mean_x, 4.0 * std::f64::consts::PI, None).unwrap().slope
}

#[test]
fn resonant_packets_climb_and_fall_at_the_same_speed() {
    let m = ModulationSpec::phase(0.2, 0.5).unwrap();
    let omega1 = rabi_frequency(1, m.f0(), 0.5, X[0]).unwrap();
    let v0 = resonant_centroid_velocity(0.0);
    let vpi = resonant_centroid_velocity(std::f64::consts::PI);
    // centroid moves at -v_g with v_g = 2 Omega_1 d cos k0
    assert!((-v0 - 2.0 * omega1).abs() < 0.05 * 2.0 * omega1, "k0 = 0: {v0} vs {}", 2.0 * omega1);
    assert!(vpi > 0.0 && v0 < 0.0);
    assert!((v0.abs() - vpi.abs()).abs() <= 0.01 * v0.abs(), "|{v0}| vs |{vpi}|");
    let vhalf = resonant_centroid_velocity(std::f64::consts::FRAC_PI_2);
    assert!(vhalf.abs() < 0.002);
}

#[test]
fn second_harmonic_drive_splits_the_sublattices() {
    let c = chain();
    let m = ModulationSpec::phase(0.05, 1.0).unwrap();
    let env = gauss(6.0);
    let amps: Vec<Complex64> = c
        .sites()
        .map(|n| {
            let e = env(n);
            if n.rem_euclid(2) == 1 {
                Complex64::new(e, 0.0)
            } else {
                Complex64::from_polar(e, std::f64::consts::FRAC_PI_2 * n as f64)
            }
        })
        .collect();
    let mut a = SiteAmplitudes::new(c.first, amps);
    a.normalize();
    let init = TightBindingState::new(a, Picture::Interaction, 0.0);
    let r = integrate_cn(&init, &c, &m, &TbOptions::new(1000.0, 0.01, 200)).unwrap();
    let (mut to, mut tc_o, mut tc_e) = (Vec::new(), Vec::new(), Vec::new());
    for (t, cf) in r.trajectory.t.iter().zip(&r.trajectory.coeffs) {
        let (o, e) = sublattice_centroids(cf);
        to.push(*t);
        tc_o.push(o);
        tc_e.push(e);
    }
    let vo = linear_fit(&to, &tc_o).unwrap().slope;
    let ve = linear_fit(&to, &tc_e).unwrap().slope;
    let v4 = 4.0 * rabi_frequency(2, m.f0(), 0.5, X[1]).unwrap().abs();
    assert!(vo * ve < 0.0, "sublattices must move apart: {vo} {ve}");
    for v in [vo, ve] {
        assert!((v.abs() - v4).abs() <= 0.1 * v4, "{v} vs 4 Omega_2 = {v4}");
    }
}

#[test]
fn secular_model_tracks_the_full_chain() {
    let c = chain();
    let m = ModulationSpec::phase(0.2, 0.5).unwrap();
    let model = secular_reduce(&params(), &m, &couplings(), 1, &SecularOptions::default()).unwrap();
    let init = TightBindingState::plane_wave_packet(&c, gauss(5.0), 0.0, Picture::Interaction).unwrap();
    let t_end = 2.0 * 2.0 * std::f64::consts::PI / 0.5;
    let full = integrate_cn(&init, &c, &m, &TbOptions::new(t_end, 0.01, 100)).unwrap();
    let sec = integrate_dn_resonant(&init, &c, &m, &model, &TbOptions::new(t_end, 0.01, 100)).unwrap();
    assert!(sec.max_norm_error < 1e-9);
    let fid = full
        .trajectory
        .coeffs
        .iter()
        .zip(&sec.trajectory.coeffs)
        .map(|(a, b)| a.fidelity(b))
        .fold(1.0, f64::min);
    assert!(fid >= 0.97, "fidelity {fid}");
}

#[test]
fn edge_contact_aborts() {
    let c = TbChain::new(couplings(), 16).unwrap();
    let m = ModulationSpec::phase(0.2, 0.5).unwrap();
    let init = TightBindingState::plane_wave_packet(&c, gauss(2.0), 0.0, Picture::Interaction).unwrap();
    let r = integrate_cn(&init, &c, &m, &TbOptions::new(10.0, 0.01, 10));
    assert!(matches!(r, Err(TightBindingError::EdgeContact { .. })));
    assert!(TbChain::new(couplings(), 4).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn norm_is_conserved(seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9), a in 0.0f64..0.4, w in 0.3f64..1.2) {
        let c = TbChain::new(couplings(), 64).unwrap();
        let m = ModulationSpec::phase(a, w).unwrap();
        let amps: Vec<Complex64> = c
            .sites()
            .map(|n| if (-4..=4).contains(&n) { let (re, im) = seed[(n + 4) as usize]; Complex64::new(re, im) } else { Complex64::new(0.0, 0.0) })
            .collect();
        let mut s = SiteAmplitudes::new(c.first, amps);
        prop_assume!(s.norm_sqr() > 1e-3);
        s.normalize();
        let init = TightBindingState::new(s, Picture::Bare, 0.0);
        let r = integrate_cn(&init, &c, &m, &TbOptions::new(20.0, 0.01, 100)).unwrap();
        prop_assert!(r.max_norm_error <= 1e-9);
    }
}
