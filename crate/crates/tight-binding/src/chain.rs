//! Finite chain of Wannier-Stark sites with the ideal ladder E_n = E_ref + n F d and
//! the Toeplitz coupling table X_p.

use ws_basis::Couplings;
use ws_lattice::{Complex64, ModulationSpec};
use ws_observables::{mean_position_wss, width_sites, Representation, SiteAmplitudes, Trajectory};

use crate::error::TightBindingError;
use crate::ode::rk4_step;

pub const DEFAULT_SITES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    /// c_n, the WSS coefficients.
    Bare,
    /// d_n = c_n e^{-i phi_n(t)}.
    Interaction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightBindingState {
    pub amps: SiteAmplitudes,
    pub picture: Picture,
    pub k0: Option<f64>,
    pub t: f64,
}

impl TightBindingState {
    pub fn new(amps: SiteAmplitudes, picture: Picture, t: f64) -> Self {
        TightBindingState { amps, picture, k0: None, t }
    }

    /// amplitude(n) = envelope(n) e^{i k0 n} on `chain`, normalized.
    pub fn plane_wave_packet(
        chain: &TbChain,
        envelope: impl Fn(i64) -> f64,
        k0: f64,
        picture: Picture,
    ) -> Result<Self, TightBindingError> {
        let amps: Vec<Complex64> = chain.sites().map(|n| Complex64::from_polar(envelope(n), k0 * n as f64)).collect();
        let mut a = SiteAmplitudes::new(chain.first, amps);
        if !(a.norm_sqr() > 0.0 && a.norm_sqr().is_finite()) {
            return Err(TightBindingError::InvalidParam { name: "envelope", reason: "zero or non-finite norm".into() });
        }
        a.normalize();
        Ok(TightBindingState { amps: a, picture, k0: Some(k0), t: 0.0 })
    }
}

#[derive(Debug, Clone)]
pub struct TbChain {
    pub first: i64,
    pub n_sites: usize,
    pub couplings: Couplings,
}

impl TbChain {
    /// Sites -n_sites/2 .. n_sites/2 - 1.
    pub fn new(couplings: Couplings, n_sites: usize) -> Result<Self, TightBindingError> {
        if n_sites < 2 * couplings.p_max() + 1 {
            return Err(TightBindingError::InvalidParam { name: "n_sites", reason: format!("{n_sites} is too short for p_max") });
        }
        if !(couplings.omega_b() > 0.0) {
            return Err(TightBindingError::InvalidParam { name: "F", reason: "the ladder needs F > 0".into() });
        }
        Ok(TbChain { first: -(n_sites as i64 / 2), n_sites, couplings })
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.first..self.first + self.n_sites as i64
    }

    pub fn energy(&self, n: i64) -> f64 {
        self.couplings.energy(n)
    }

    /// phi_n(t) = -E_n t - (F0 X_nn / omega) cos wt.
    pub fn phase(&self, n: i64, modulation: &ModulationSpec, t: f64) -> f64 {
        let f0 = modulation.f0();
        let drive = if f0 != 0.0 { f0 * self.couplings.x_nm(n, n) / modulation.omega * (modulation.omega * t).cos() } else { 0.0 };
        -self.energy(n) * t - drive
    }

    fn check_support(&self, amps: &SiteAmplitudes) -> Result<(), TightBindingError> {
        if amps.first != self.first || amps.amps.len() != self.n_sites {
            return Err(TightBindingError::InvalidParam {
                name: "state",
                reason: format!("covers {}..={}, chain is {}..={}", amps.first, amps.last(), self.first, self.first + self.n_sites as i64 - 1),
            });
        }
        Ok(())
    }

    /// Probability on the `edge` outermost sites of each end.
    pub fn edge_mass(&self, amps: &SiteAmplitudes, edge: usize) -> f64 {
        let n = amps.amps.len();
        let e = edge.min(n / 2);
        amps.amps[..e].iter().chain(&amps.amps[n - e..]).map(|z| z.norm_sqr()).sum()
    }
}

pub fn to_interaction_picture(
    state: &TightBindingState,
    chain: &TbChain,
    modulation: &ModulationSpec,
) -> Result<TightBindingState, TightBindingError> {
    if state.picture != Picture::Bare {
        return Err(TightBindingError::WrongPicture { expected: Picture::Bare, found: state.picture });
    }
    let mut out = state.clone();
    for (n, a) in state.amps.sites().zip(out.amps.amps.iter_mut()) {
        *a *= Complex64::cis(-chain.phase(n, modulation, state.t));
    }
    out.picture = Picture::Interaction;
    Ok(out)
}

pub fn from_interaction_picture(
    state: &TightBindingState,
    chain: &TbChain,
    modulation: &ModulationSpec,
) -> Result<TightBindingState, TightBindingError> {
    if state.picture != Picture::Interaction {
        return Err(TightBindingError::WrongPicture { expected: Picture::Interaction, found: state.picture });
    }
    let mut out = state.clone();
    for (n, a) in state.amps.sites().zip(out.amps.amps.iter_mut()) {
        *a *= Complex64::cis(chain.phase(n, modulation, state.t));
    }
    out.picture = Picture::Bare;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct TbOptions {
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub norm_tol: f64,
    pub edge_tol: f64,
    pub edge_sites: usize,
}

impl TbOptions {
    pub fn new(t_end: f64, dt: f64, sample_every: usize) -> Self {
        TbOptions { t_end, dt, sample_every, norm_tol: 1e-9, edge_tol: 1e-6, edge_sites: 4 }
    }

    fn validate(&self) -> Result<usize, TightBindingError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(TightBindingError::InvalidParam { name: "dt", reason: format!("must be > 0, got {}", self.dt) });
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(TightBindingError::InvalidParam { name: "t_end", reason: format!("must be > 0, got {}", self.t_end) });
        }
        if self.sample_every == 0 {
            return Err(TightBindingError::InvalidParam { name: "sample_every", reason: "must be >= 1".into() });
        }
        Ok((self.t_end / self.dt).round().max(1.0) as usize)
    }
}

#[derive(Debug, Clone)]
pub struct TbRun {
    /// Samples carry the bare coefficients c_n.
    pub trajectory: Trajectory,
    pub final_state: TightBindingState,
    pub max_norm_error: f64,
    pub max_edge_mass: f64,
}

/// Shared driver: integrates d' = rhs(t, d) with RK4 and records c_n, <x>, width.
pub(crate) fn run_interaction<F>(
    chain: &TbChain,
    modulation: &ModulationSpec,
    initial: &TightBindingState,
    opts: &TbOptions,
    representation: Representation,
    mut rhs: F,
) -> Result<TbRun, TightBindingError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let steps = opts.validate()?;
    chain.check_support(&initial.amps)?;
    let d0 = match initial.picture {
        Picture::Interaction => initial.clone(),
        Picture::Bare => to_interaction_picture(initial, chain, modulation)?,
    };
    let t0 = d0.t;
    let mut y = d0.amps.amps.clone();
    let mut work: [Vec<Complex64>; 4] = Default::default();
    let mut traj = Trajectory::new(representation);
    let mut max_norm_error: f64 = 0.0;
    let mut max_edge: f64 = 0.0;
    let mut record = |y: &[Complex64], t: f64, traj: &mut Trajectory| -> Result<(), TightBindingError> {
        let d = TightBindingState { amps: SiteAmplitudes::new(chain.first, y.to_vec()), picture: Picture::Interaction, k0: None, t };
        let c = from_interaction_picture(&d, chain, modulation)?.amps;
        let norm = c.norm_sqr();
        let edge = chain.edge_mass(&c, opts.edge_sites);
        traj.push(t, mean_position_wss(&c, &chain.couplings), width_sites(&c, &chain.couplings), norm, f64::NAN);
        traj.coeffs.push(c);
        max_norm_error = max_norm_error.max((norm - 1.0).abs());
        max_edge = max_edge.max(edge);
        if !((norm - 1.0).abs() <= opts.norm_tol) {
            return Err(TightBindingError::NormDrift { t, norm, tol: opts.norm_tol });
        }
        if edge > opts.edge_tol {
            return Err(TightBindingError::EdgeContact { t, mass: edge, tol: opts.edge_tol });
        }
        Ok(())
    };
    record(&y, t0, &mut traj)?;
    for step in 1..=steps {
        let t = t0 + (step - 1) as f64 * opts.dt;
        rk4_step(&mut rhs, t, opts.dt, &mut y, &mut work);
        if step % opts.sample_every == 0 || step == steps {
            record(&y, t0 + step as f64 * opts.dt, &mut traj)?;
        }
    }
    let t_end = t0 + steps as f64 * opts.dt;
    let d = TightBindingState { amps: SiteAmplitudes::new(chain.first, y), picture: Picture::Interaction, k0: initial.k0, t: t_end };
    let final_state = match initial.picture {
        Picture::Interaction => d,
        Picture::Bare => from_interaction_picture(&d, chain, modulation)?,
    };
    Ok(TbRun { trajectory: traj, final_state, max_norm_error, max_edge_mass: max_edge })
}

/// c_n' = -i E_n c_n + i F0 sin(wt) sum_m X_{n,m} c_m, solved as the equivalent
/// interaction-picture system
/// d_n' = i F0 sin(wt) sum_{p != 0} X_p e^{-i p (w_B t + (F0/w) cos wt)} d_{n+p}.
pub fn integrate_cn(
    initial: &TightBindingState,
    chain: &TbChain,
    modulation: &ModulationSpec,
    opts: &TbOptions,
) -> Result<TbRun, TightBindingError> {
    let f0 = modulation.f0();
    let (w, wb) = (modulation.omega, chain.couplings.omega_b());
    let p_max = chain.couplings.p_max() as i64;
    let xs: Vec<f64> = (1..=p_max).map(|p| chain.couplings.x_p(p)).collect();
    let n = chain.n_sites;
    // g[p-1] multiplies d_{n+p}, h[p-1] multiplies d_{n-p}
    let mut g = vec![Complex64::new(0.0, 0.0); xs.len()];
    let mut h = g.clone();
    let rhs = move |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        dy.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        if f0 == 0.0 {
            return;
        }
        let s = f0 * (w * t).sin();
        let theta = wb * t + f0 / w * (w * t).cos();
        for (k, x) in xs.iter().enumerate() {
            let p = (k + 1) as f64;
            g[k] = Complex64::new(0.0, s * x) * Complex64::cis(-p * theta);
            h[k] = Complex64::new(0.0, s * x) * Complex64::cis(p * theta);
        }
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..xs.len() {
                let p = k + 1;
                if i + p < n {
                    acc += g[k] * y[i + p];
                }
                if i >= p {
                    acc += h[k] * y[i - p];
                }
            }
            dy[i] = acc;
        }
    };
    run_interaction(chain, modulation, initial, opts, Representation::TightBinding, rhs)
}
