//! Continuum envelope of a Gaussian packet of WSS in a phase-modulated tilted lattice.
//!
//! theta(t) = w_B t + (F0 d / w) cos wt
//! v_g(t) = 2 F0 d sum_{p>0} p X_p sin(p (theta - k0 d)) sin wt
//! D(t)   = F0 d^2 sum_{p>0} p^2 X_p cos(p (theta - k0 d)) sin wt
//! x'(t) = int v_g, Delta(t) = int D, <x>(t) = <x>(0) - x'(t),
//! a(t) = a0 sqrt(1 + 16 Delta^2 / a0^4). The O(X_2) phase term is not kept.

use ws_basis::Couplings;
use ws_lattice::{LatticeParams, ModulationSpec};
use ws_observables::{Representation, Trajectory};

use crate::error::TightBindingError;

// 5-point Gauss-Legendre on [-1, 1]
const GL_X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL_W: [f64; 5] = [0.236_926_885_056_189_1, 0.478_628_670_499_366_5, 0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1];

#[derive(Debug, Clone)]
pub struct EnvelopeOptions {
    pub t_end: f64,
    /// Output samples after t = 0.
    pub samples: usize,
    /// Initial Gaussian width a0 (|f|^2 has RMS a0 / 2).
    pub a0: f64,
    /// <x> at t = 0.
    pub x_start: f64,
    /// Quadrature nodes per fastest period, before the refinement check.
    pub nodes_per_period: usize,
    pub tol: f64,
}

impl EnvelopeOptions {
    pub fn new(t_end: f64, samples: usize, a0: f64, x_start: f64) -> Self {
        EnvelopeOptions { t_end, samples, a0, x_start, nodes_per_period: 16, tol: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct EnvelopeSolution {
    pub k0: f64,
    pub a0: f64,
    pub x_start: f64,
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
    pub v_g: Vec<f64>,
    pub d_coef: Vec<f64>,
    pub x_prime: Vec<f64>,
    pub delta: Vec<f64>,
    pub a: Vec<f64>,
}

impl EnvelopeSolution {
    pub fn mean_x(&self) -> Vec<f64> {
        self.x_prime.iter().map(|x| self.x_start - x).collect()
    }

    /// RMS width of |f|^2, a(t) / 2.
    pub fn width(&self) -> Vec<f64> {
        self.a.iter().map(|a| 0.5 * a).collect()
    }

    pub fn to_trajectory(&self) -> Trajectory {
        let mut tr = Trajectory::new(Representation::Envelope);
        for ((t, x), w) in self.t.iter().zip(self.mean_x()).zip(self.width()) {
            tr.push(*t, x, w, 1.0, f64::NAN);
        }
        tr
    }
}

struct Rates<'a> {
    x: &'a Couplings,
    k0: f64,
    f0: f64,
    w: f64,
    wb: f64,
}

impl Rates<'_> {
    fn theta(&self, t: f64) -> f64 {
        let drive = if self.f0 != 0.0 { self.f0 / self.w * (self.w * t).cos() } else { 0.0 };
        self.wb * t + drive
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        if self.f0 == 0.0 {
            return (0.0, 0.0);
        }
        let th = self.theta(t) - self.k0;
        let s = (self.w * t).sin();
        let (mut v, mut d) = (0.0, 0.0);
        for p in 1..=self.x.p_max() as i64 {
            let pf = p as f64;
            let xp = self.x.x_p(p);
            v += pf * xp * (pf * th).sin();
            d += pf * pf * xp * (pf * th).cos();
        }
        (2.0 * self.f0 * v * s, self.f0 * d * s)
    }

    /// Composite 5-point Gauss-Legendre of (v_g, D) over [t0, t1] with `n` panels.
    fn integrate(&self, t0: f64, t1: f64, n: usize) -> (f64, f64) {
        let h = (t1 - t0) / n as f64;
        let (mut sv, mut sd) = (0.0, 0.0);
        for k in 0..n {
            let mid = t0 + (k as f64 + 0.5) * h;
            for (x, wgt) in GL_X.iter().zip(&GL_W) {
                let (v, d) = self.eval(mid + 0.5 * h * x);
                sv += wgt * v;
                sd += wgt * d;
            }
        }
        (0.5 * h * sv, 0.5 * h * sd)
    }
}

/// Cumulative x'(t), Delta(t) on `samples + 1` equally spaced times.
pub fn envelope_general(
    k0: f64,
    params: &LatticeParams,
    modulation: &ModulationSpec,
    couplings: &Couplings,
    opts: &EnvelopeOptions,
) -> Result<EnvelopeSolution, TightBindingError> {
    if couplings.p_max() < 2 {
        return Err(TightBindingError::InvalidParam { name: "p_max", reason: "the envelope needs X_p up to p = 2".into() });
    }
    if !(opts.t_end > 0.0) || opts.samples == 0 || opts.nodes_per_period == 0 {
        return Err(TightBindingError::InvalidParam { name: "t_end", reason: "need t_end > 0 and samples >= 1".into() });
    }
    if !(opts.a0 > 0.0) {
        return Err(TightBindingError::InvalidParam { name: "a0", reason: format!("must be > 0, got {}", opts.a0) });
    }
    let rates = Rates { x: couplings, k0, f0: modulation.f0(), w: modulation.omega, wb: params.omega_b() };
    let fastest = rates.w.max(rates.wb) * couplings.p_max() as f64;
    let h_dt = opts.t_end / opts.samples as f64;
    let panels = ((h_dt * fastest / (2.0 * std::f64::consts::PI)) * opts.nodes_per_period as f64 / 5.0).ceil().max(1.0) as usize;

    let n = opts.samples;
    let mut sol = EnvelopeSolution {
        k0,
        a0: opts.a0,
        x_start: opts.x_start,
        t: Vec::with_capacity(n + 1),
        theta: Vec::with_capacity(n + 1),
        v_g: Vec::with_capacity(n + 1),
        d_coef: Vec::with_capacity(n + 1),
        x_prime: Vec::with_capacity(n + 1),
        delta: Vec::with_capacity(n + 1),
        a: Vec::with_capacity(n + 1),
    };
    let (mut xp, mut dl) = (0.0, 0.0);
    let (mut xp_fine, mut dl_fine) = (0.0, 0.0);
    for i in 0..=n {
        let t = i as f64 * h_dt;
        if i > 0 {
            let t_prev = (i - 1) as f64 * h_dt;
            let (v, d) = rates.integrate(t_prev, t, panels);
            xp += v;
            dl += d;
            let (v, d) = rates.integrate(t_prev, t, 2 * panels);
            xp_fine += v;
            dl_fine += d;
        }
        let (v, d) = rates.eval(t);
        sol.t.push(t);
        sol.theta.push(rates.theta(t));
        sol.v_g.push(v);
        sol.d_coef.push(d);
        sol.x_prime.push(xp);
        sol.delta.push(dl);
        sol.a.push(gaussian_width(opts.a0, dl)?);
    }
    let err = (xp - xp_fine).abs().max((dl - dl_fine).abs());
    if err > opts.tol * (1.0 + xp.abs().max(dl.abs())) {
        return Err(TightBindingError::Quadrature { error: err, tol: opts.tol });
    }
    Ok(sol)
}

/// a(t) = a0 sqrt(1 + 16 Delta^2 / a0^4).
pub fn gaussian_width(a0: f64, delta: f64) -> Result<f64, TightBindingError> {
    if !(a0 > 0.0) {
        return Err(TightBindingError::InvalidParam { name: "a0", reason: format!("must be > 0, got {a0}") });
    }
    Ok(a0 * (1.0 + 16.0 * delta * delta / a0.powi(4)).sqrt())
}

/// |f(x, t)|^2 = (a0 / a) exp(-2 (x - center)^2 / a^2).
pub fn gaussian_profile(x: f64, center: f64, a0: f64, a: f64) -> f64 {
    a0 / a * (-2.0 * (x - center).powi(2) / (a * a)).exp()
}

/// Leading order in 1/delta of the detuned q = 1 envelope:
/// x'(t) = (2 Omega_1 d / delta) [sin(k0 d + delta t) - sin(k0 d)],
/// Delta(t) = (Omega_1 d^2 / delta) [cos(k0 d) - cos(k0 d + delta t)].
/// delta = 0 gives the resonant limits 2 Omega_1 d cos(k0 d) t and Omega_1 d^2 sin(k0 d) t.
pub fn detuned_envelope(k0: f64, rate: f64, delta: f64, t: f64) -> (f64, f64) {
    if delta == 0.0 {
        return (2.0 * rate * k0.cos() * t, rate * k0.sin() * t);
    }
    (2.0 * rate / delta * ((k0 + delta * t).sin() - k0.sin()), rate / delta * (k0.cos() - (k0 + delta * t).cos()))
}
