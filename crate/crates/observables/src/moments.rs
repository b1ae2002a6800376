use ws_basis::Couplings;
use ws_lattice::{Complex64, GridSpec};

use crate::trajectory::SiteAmplitudes;

pub fn norm_grid(grid: &GridSpec, psi: &[Complex64]) -> f64 {
    psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * grid.dx()
}

/// sum x |psi|^2 dx.
pub fn mean_position_grid(grid: &GridSpec, psi: &[Complex64]) -> f64 {
    psi.iter().enumerate().map(|(i, p)| grid.x(i) * p.norm_sqr()).sum::<f64>() * grid.dx()
}

/// Second central moment of |psi|^2 (normalized internally).
pub fn width_grid(grid: &GridSpec, psi: &[Complex64]) -> f64 {
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (i, p) in psi.iter().enumerate() {
        let x = grid.x(i);
        let w = p.norm_sqr();
        s0 += w;
        s1 += w * x;
        s2 += w * x * x;
    }
    let m = s1 / s0;
    (s2 / s0 - m * m).max(0.0).sqrt()
}

/// sum X_nn |c_n|^2 + 2 Re sum_{p>0} X_p sum_n c_n* c_{n+p}, instantaneous amplitudes.
pub fn mean_position_wss(c: &SiteAmplitudes, x: &Couplings) -> f64 {
    let mut s = 0.0;
    for (i, a) in c.amps.iter().enumerate() {
        let n = c.first + i as i64;
        s += x.x_nm(n, n) * a.norm_sqr();
    }
    for p in 1..=x.p_max() {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..c.amps.len().saturating_sub(p) {
            acc += c.amps[i].conj() * c.amps[i + p];
        }
        s += 2.0 * x.x_p(p as i64) * acc.re;
    }
    s
}

/// Same, for amplitudes c_n(0) evolved freely under H0: coherences pick up
/// e^{i (E_n - E_m) t}.
pub fn mean_position_wss_free(c0: &SiteAmplitudes, x: &Couplings, t: f64) -> f64 {
    let evolved = SiteAmplitudes::new(
        c0.first,
        c0.amps
            .iter()
            .enumerate()
            .map(|(i, a)| a * Complex64::cis(-x.energy(c0.first + i as i64) * t))
            .collect(),
    );
    mean_position_wss(&evolved, x)
}

/// Width of the site occupation placed at X_nn (intra-well spread not included).
pub fn width_sites(c: &SiteAmplitudes, x: &Couplings) -> f64 {
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (i, a) in c.amps.iter().enumerate() {
        let n = c.first + i as i64;
        let xn = x.x_nm(n, n);
        let w = a.norm_sqr();
        s0 += w;
        s1 += w * xn;
        s2 += w * xn * xn;
    }
    let m = s1 / s0;
    (s2 / s0 - m * m).max(0.0).sqrt()
}

/// Occupation-weighted mean site index of the odd and the even sublattice.
pub fn sublattice_centroids(c: &SiteAmplitudes) -> (f64, f64) {
    let (mut wo, mut so, mut we, mut se) = (0.0, 0.0, 0.0, 0.0);
    for (i, a) in c.amps.iter().enumerate() {
        let n = c.first + i as i64;
        let w = a.norm_sqr();
        if n.rem_euclid(2) == 1 {
            wo += w;
            so += w * n as f64;
        } else {
            we += w;
            se += w * n as f64;
        }
    }
    (so / wo, se / we)
}
