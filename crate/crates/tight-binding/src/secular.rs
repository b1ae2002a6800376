//! Bessel expansion of the interaction-picture couplings and the secular (slowly
//! rotating) part of it near w = q w_B.
//!
//! With sin(wt) e^{-i z cos wt} expanded in harmonics, the d_n system becomes
//! d_n' = sum_{p,m} c_{p,m} e^{i (m w - p w_B) t} d_{n+p},
//! c_{p,m} = (F0/2) X_p [(-i)^{m-1} J_{m-1}(z_p) - (-i)^{m+1} J_{m+1}(z_p)], z_p = p F0 d / w.

use std::fmt::Write as _;

use ws_basis::Couplings;
use ws_lattice::{Complex64, LatticeParams, ModulationSpec};
use ws_observables::Representation;

use crate::bessel::{bessel_j, bessel_j_all};
use crate::chain::{run_interaction, TbChain, TbOptions, TbRun, TightBindingState};
use crate::error::TightBindingError;

/// Pointwise tolerance on the truncated generating-function sum.
pub const EXPANSION_TOL: f64 = 1e-10;

fn neg_i_pow(l: i64) -> Complex64 {
    match l.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Smallest l_max accepted for argument z.
pub fn min_l_max(z: f64) -> usize {
    z.abs().ceil() as usize + 4
}

/// Default l_max for couplings up to p_max: at least ceil(p_max F0 / w) + 6, raised
/// until the partial sum for z = p_max F0 / w meets `EXPANSION_TOL`.
pub fn default_l_max(modulation: &ModulationSpec, p_max: usize) -> usize {
    let z = p_max as f64 * modulation.f0() / modulation.omega;
    let mut l = z.abs().ceil() as usize + 6;
    while l < 400 {
        let j = bessel_j_all(l + 2, z);
        if j[l + 1].abs() + j[l + 2].abs() < 0.1 * EXPANSION_TOL {
            break;
        }
        l += 1;
    }
    l
}

/// (l, J_l(z) (-i)^l) for l = -l_max..=l_max, z = p F0 d / w. The partial sum of
/// sum_l J_l(z) (-i)^l e^{i l w t} is checked against e^{-i z cos wt} on 64 points of a period.
pub fn bessel_expansion_terms(p: i64, f0: f64, omega: f64, l_max: usize) -> Result<Vec<(i64, Complex64)>, TightBindingError> {
    if !(omega > 0.0) || !f0.is_finite() {
        return Err(TightBindingError::InvalidParam { name: "omega", reason: "omega must be > 0 and F0 finite".into() });
    }
    let z = p as f64 * f0 / omega;
    let needed = min_l_max(z);
    if l_max < needed {
        return Err(TightBindingError::LMaxTooSmall { l_max, z, needed });
    }
    let j = bessel_j_all(l_max, z);
    let mut terms = Vec::with_capacity(2 * l_max + 1);
    for l in -(l_max as i64)..=l_max as i64 {
        let jl = if l < 0 && l % 2 != 0 { -j[l.unsigned_abs() as usize] } else { j[l.unsigned_abs() as usize] };
        terms.push((l, neg_i_pow(l) * jl));
    }
    let err = expansion_error(&terms, z, 64);
    if err > EXPANSION_TOL {
        return Err(TightBindingError::Truncation { error: err, tol: EXPANSION_TOL });
    }
    Ok(terms)
}

/// Largest |sum_l term_l e^{i l phase} - e^{-i z cos phase}| over `points` phases in [0, 2 pi).
pub fn expansion_error(terms: &[(i64, Complex64)], z: f64, points: usize) -> f64 {
    (0..points)
        .map(|k| {
            let ph = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
            let s: Complex64 = terms.iter().map(|(l, c)| c * Complex64::cis(*l as f64 * ph)).sum();
            (s - Complex64::cis(-z * ph.cos())).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularTerm {
    pub p: i64,
    /// Drive harmonic, m = l +- 1.
    pub m: i64,
    pub coeff: Complex64,
    /// Residual rotation m w - p w_B.
    pub nu: f64,
}

#[derive(Debug, Clone)]
pub struct SecularOptions {
    /// Keep terms with |m w - p w_B| <= window_rel * w_B.
    pub window_rel: f64,
    /// Accept |w - q w_B| <= resonance_rel * w_B.
    pub resonance_rel: f64,
    pub l_max: Option<usize>,
}

impl Default for SecularOptions {
    fn default() -> Self {
        SecularOptions { window_rel: 0.25, resonance_rel: 0.2, l_max: None }
    }
}

#[derive(Debug, Clone)]
pub struct SecularModel {
    pub q: u32,
    pub omega: f64,
    pub omega_b: f64,
    /// w - q w_B.
    pub delta: f64,
    pub terms: Vec<SecularTerm>,
    /// Omega_q: coefficient of the (p = q, m = 1) term, real.
    pub rate: f64,
    /// Largest generating-function truncation error over the p used.
    pub truncation_error: f64,
}

impl SecularModel {
    /// Only the (+-q, +-1) pair: d_n' = Omega_q (e^{i delta t} d_{n+q} - e^{-i delta t} d_{n-q}).
    pub fn dominant_only(&self) -> SecularModel {
        let mut m = self.clone();
        let q = self.q as i64;
        m.terms.retain(|t| (t.p == q && t.m == 1) || (t.p == -q && t.m == -1));
        m
    }

    /// Centered, ideal dominant-only model with rate Omega_q and detuning delta.
    pub fn ideal(q: u32, rate: f64, omega_b: f64, delta: f64) -> SecularModel {
        let p = q as i64;
        let omega = q as f64 * omega_b + delta;
        SecularModel {
            q,
            omega,
            omega_b,
            delta,
            terms: vec![
                SecularTerm { p, m: 1, coeff: Complex64::new(rate, 0.0), nu: delta },
                SecularTerm { p: -p, m: -1, coeff: Complex64::new(-rate, 0.0), nu: -delta },
            ],
            rate,
            truncation_error: 0.0,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# secular model q = {} omega = {} omega_B = {} delta = {}", self.q, self.omega, self.omega_b, self.delta);
        let _ = writeln!(s, "# Omega_q = {:.10e}  truncation error = {:.3e}", self.rate, self.truncation_error);
        let _ = writeln!(s, "p,m,l,re,im,nu");
        for t in &self.terms {
            // the harmonic m collects l = m - 1 and l = m + 1
            let _ = writeln!(s, "{},{},{}/{},{:.10e},{:.10e},{:.6e}", t.p, t.m, t.m - 1, t.m + 1, t.coeff.re, t.coeff.im, t.nu);
        }
        s
    }
}

pub fn secular_reduce(
    params: &LatticeParams,
    modulation: &ModulationSpec,
    couplings: &Couplings,
    q: u32,
    opts: &SecularOptions,
) -> Result<SecularModel, TightBindingError> {
    if q == 0 {
        return Err(TightBindingError::UnsupportedOrder(q));
    }
    let wb = params.omega_b();
    let w = modulation.omega;
    if !(wb > 0.0) {
        return Err(TightBindingError::InvalidParam { name: "F", reason: "secular reduction needs F > 0".into() });
    }
    if !((w - q as f64 * wb).abs() <= opts.resonance_rel * wb) {
        return Err(TightBindingError::NoResonance { omega: w, q, tol_rel: opts.resonance_rel });
    }
    let f0 = modulation.f0();
    let p_max = couplings.p_max();
    let l_max = opts.l_max.unwrap_or_else(|| default_l_max(modulation, p_max));
    let mut terms = Vec::new();
    let mut truncation_error: f64 = 0.0;
    for p in (-(p_max as i64)..=p_max as i64).filter(|p| *p != 0) {
        let x = couplings.x_p(p);
        let z = p as f64 * f0 / w;
        let expansion = bessel_expansion_terms(p, f0, w, l_max)?;
        truncation_error = truncation_error.max(expansion_error(&expansion, z, 64));
        let reach = l_max as i64 + 1;
        for m in -reach..=reach {
            let nu = m as f64 * w - p as f64 * wb;
            if nu.abs() > opts.window_rel * wb {
                continue;
            }
            let coeff = 0.5 * f0 * x * (neg_i_pow(m - 1) * bessel_j(m - 1, z) - neg_i_pow(m + 1) * bessel_j(m + 1, z));
            if coeff.norm() > 0.0 {
                terms.push(SecularTerm { p, m, coeff, nu });
            }
        }
    }
    if terms.is_empty() {
        return Err(TightBindingError::NoSecularTerms);
    }
    let qi = q as i64;
    let rate = terms.iter().find(|t| t.p == qi && t.m == 1).map(|t| t.coeff.re).unwrap_or(0.0);
    Ok(SecularModel { q, omega: w, omega_b: wb, delta: w - q as f64 * wb, terms, rate, truncation_error })
}

/// Omega_q = (w_B / d) X_q J_1(F0 d / w_B), q in {1, 2}.
pub fn rabi_frequency(q: u32, f0: f64, omega_b: f64, x_q: f64) -> Result<f64, TightBindingError> {
    if q != 1 && q != 2 {
        return Err(TightBindingError::UnsupportedOrder(q));
    }
    if !(omega_b > 0.0) || !(f0 >= 0.0) {
        return Err(TightBindingError::InvalidParam { name: "F0", reason: "need F0 >= 0 and omega_B > 0".into() });
    }
    Ok(omega_b * x_q * bessel_j(1, f0 / omega_b))
}

/// d_n' = sum over the model's terms of c e^{i nu t} d_{n+p}.
pub fn integrate_dn_resonant(
    initial: &TightBindingState,
    chain: &TbChain,
    modulation: &ModulationSpec,
    model: &SecularModel,
    opts: &TbOptions,
) -> Result<TbRun, TightBindingError> {
    let terms = model.terms.clone();
    let n = chain.n_sites;
    let mut factors = vec![Complex64::new(0.0, 0.0); terms.len()];
    let rhs = move |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        for (f, term) in factors.iter_mut().zip(&terms) {
            *f = term.coeff * Complex64::cis(term.nu * t);
        }
        for (i, d) in dy.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (f, term) in factors.iter().zip(&terms) {
                let j = i as i64 + term.p;
                if j >= 0 && (j as usize) < n {
                    acc += f * y[j as usize];
                }
            }
            *d = acc;
        }
    };
    run_interaction(chain, modulation, initial, opts, Representation::Secular, rhs)
}

/// Plane-wave frequency and group velocity of the dominant-only model:
/// q = 1: (2 Omega_1 sin k0 d, 2 Omega_1 d cos k0 d); q = 2: (2 Omega_2 sin 2 k0 d, 4 Omega_2 d cos 2 k0 d).
/// A packet centroid moves at -v_g (d_n ~ e^{i(k0 n + omega t)}).
pub fn dispersion_and_vg(k0: f64, model: &SecularModel) -> Result<(f64, f64), TightBindingError> {
    let q = model.q as f64;
    if model.q != 1 && model.q != 2 {
        return Err(TightBindingError::UnsupportedOrder(model.q));
    }
    let r = model.rate;
    Ok((2.0 * r * (q * k0).sin(), 2.0 * q * r * (q * k0).cos()))
}
