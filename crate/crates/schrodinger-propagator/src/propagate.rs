use ws_basis::WSBasis;
use ws_lattice::{build_potential, Complex64, GridSpec, KineticOperator, LatticeParams, ModulationKind, ModulationSpec};
use ws_observables::{mean_position_grid, width_grid, Representation, SiteAmplitudes, Snapshot, Trajectory};

use crate::error::PropagatorError;
use crate::wavepacket::{project_onto_wss, Frame, Wavepacket};

#[derive(Debug, Clone)]
pub struct PropagateOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Record a sample every this many steps (plus t = 0 and the final step).
    pub sample_every: usize,
    /// Times at which |psi|^2 is stored (nearest step).
    pub snapshot_times: Vec<f64>,
    pub norm_tol: f64,
    /// Largest probability allowed in the wall cells. With a basis the check applies
    /// to the ground-band part of the state; otherwise to the whole state.
    pub wall_tol: f64,
    /// Number of cells at each wall that count as wall contact.
    pub wall_cells: usize,
}

impl PropagateOptions {
    pub fn new(t_end: f64, dt: f64, sample_every: usize) -> Self {
        PropagateOptions { t_end, dt, sample_every, snapshot_times: Vec::new(), norm_tol: 1e-6, wall_tol: 1e-6, wall_cells: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub trajectory: Trajectory,
    pub final_state: Wavepacket,
    pub steps: usize,
    pub max_norm_error: f64,
    /// Total probability in the wall cells (ground band plus leaked continuum).
    pub max_wall_mass: f64,
    /// Wall-cell probability of the ground-band part sum_n c_n phi_n; NaN without a basis.
    pub max_band_wall_mass: f64,
    pub warnings: Vec<String>,
}

/// <psi|H0|psi> with the same kinetic operator as the propagator.
pub fn energy_expectation(state: &Wavepacket, params: &LatticeParams) -> Result<f64, PropagatorError> {
    let v = build_potential(&state.grid, params, 0.0)?;
    let h = ws_lattice::apply_hamiltonian(&state.grid, &state.psi, &v, params)?;
    let e: Complex64 = state.psi.iter().zip(&h).map(|(a, b)| a.conj() * b).sum();
    Ok(e.re * state.grid.dx() / state.norm())
}

fn wall_nodes(g: &GridSpec, cells: usize) -> Vec<usize> {
    let first = g.first_cell();
    let last = first + g.n_sites as i64 - 1;
    let mut nodes = Vec::new();
    for c in 0..cells as i64 {
        for cell in [first + c, last - c] {
            nodes.extend(g.cell_nodes(cell));
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

fn wall_mass(state: &Wavepacket, nodes: &[usize]) -> f64 {
    nodes.iter().map(|&i| state.psi[i].norm_sqr()).sum::<f64>() * state.grid.dx()
}

fn band_wall_mass(basis: &WSBasis, coeffs: &SiteAmplitudes, nodes: &[usize]) -> f64 {
    let mut s = 0.0;
    for &i in nodes {
        let mut v = Complex64::new(0.0, 0.0);
        for (k, &n) in basis.sites.iter().enumerate() {
            v += coeffs.get(n) * basis.states[k][i];
        }
        s += v.norm_sqr();
    }
    s * basis.grid.dx()
}

/// Strang splitting e^{-iV dt/2} e^{-iT dt} e^{-iV dt/2} with V evaluated at the
/// step midpoint. Accelerated frame (or a force drive): V0 cos 2 pi x + (F - F0 sin wt) x.
/// Lab frame with a phase drive: V0 cos 2 pi (x - a sin wt) + F x.
pub fn propagate(
    state: &Wavepacket,
    params: &LatticeParams,
    modulation: &ModulationSpec,
    opts: &PropagateOptions,
    basis: Option<&WSBasis>,
) -> Result<PropagationResult, PropagatorError> {
    if !(opts.dt > 0.0 && opts.dt.is_finite()) {
        return Err(PropagatorError::BadStep(format!("dt must be > 0, got {}", opts.dt)));
    }
    if !(opts.t_end > 0.0 && opts.t_end.is_finite()) {
        return Err(PropagatorError::BadStep(format!("t_end must be > 0, got {}", opts.t_end)));
    }
    if opts.sample_every == 0 {
        return Err(PropagatorError::BadStep("sample_every must be >= 1".into()));
    }
    let grid = state.grid;
    grid.check_len(state.psi.len())?;
    let steps = (opts.t_end / opts.dt).round().max(1.0) as usize;
    let dt = opts.dt;
    let xs = grid.xs();
    let static_v = build_potential(&grid, params, 0.0)?;
    let mut warnings = Vec::new();
    if modulation.kind != ModulationKind::None && modulation.omega * dt > 2.0 * std::f64::consts::PI / 100.0 {
        warnings.push(format!("dt = {dt} resolves the drive period with fewer than 100 steps"));
    }
    let vmax = static_v.iter().fold(0.0f64, |m, v| m.max(v.abs())) + modulation.f0() * grid.x_max.abs().max(grid.x_min.abs());
    if 0.5 * dt * vmax > std::f64::consts::FRAC_PI_4 {
        warnings.push(format!("potential phase per half step {:.3} exceeds pi/4", 0.5 * dt * vmax));
    }
    let lab_moving = state.frame == Frame::Lab && modulation.kind == ModulationKind::Phase;
    let static_half: Vec<Complex64> = static_v.iter().map(|v| Complex64::cis(-0.5 * dt * v)).collect();
    let mut kin = KineticOperator::new(&grid);
    let kin_phase: Vec<Complex64> = kin.eigenvalues().iter().map(|t| Complex64::cis(-dt * t)).collect();
    let mut half = vec![Complex64::new(0.0, 0.0); grid.interior()];
    let mut psi = state.psi.clone();
    let mut cur = state.clone();
    let mut traj = Trajectory::new(Representation::Grid);
    let mut snaps: Vec<f64> = opts.snapshot_times.clone();
    snaps.sort_by(f64::total_cmp);
    let mut next_snap = 0usize;
    let mut max_norm_error: f64 = 0.0;
    let mut max_wall: f64 = 0.0;
    let mut max_band_wall = if basis.is_some() { 0.0 } else { f64::NAN };

    let nodes = wall_nodes(&grid, opts.wall_cells);
    let record = |cur: &Wavepacket, traj: &mut Trajectory| -> Result<(f64, f64, f64), PropagatorError> {
        let norm = cur.norm();
        let wall = wall_mass(cur, &nodes);
        let (residual, band_wall, coeffs) = match basis {
            Some(b) => {
                let p = project_onto_wss(cur, b)?;
                (p.residual, band_wall_mass(b, &p.coeffs, &nodes), Some(p.coeffs))
            }
            None => (f64::NAN, f64::NAN, None),
        };
        traj.push(cur.t, mean_position_grid(&grid, &cur.psi), width_grid(&grid, &cur.psi), norm, residual);
        if let Some(c) = coeffs {
            traj.coeffs.push(c);
        }
        if !((norm - 1.0).abs() <= opts.norm_tol) {
            return Err(PropagatorError::NormDrift { t: cur.t, norm, tol: opts.norm_tol });
        }
        let checked = if basis.is_some() { band_wall } else { wall };
        if checked > opts.wall_tol {
            return Err(PropagatorError::WallContact { t: cur.t, mass: checked, tol: opts.wall_tol });
        }
        Ok(((norm - 1.0).abs(), wall, band_wall))
    };
    let snapshot = |cur: &Wavepacket| Snapshot { t: cur.t, x: xs.clone(), density: cur.density() };

    let (ne, wm, bw) = record(&cur, &mut traj)?;
    max_norm_error = max_norm_error.max(ne);
    max_wall = max_wall.max(wm);
    max_band_wall = max_band_wall.max(bw);
    while next_snap < snaps.len() && snaps[next_snap] <= state.t + 0.5 * dt {
        traj.snapshots.push(snapshot(&cur));
        next_snap += 1;
    }
    let t0 = state.t;
    for step in 1..=steps {
        let tm = t0 + (step as f64 - 0.5) * dt;
        if lab_moving {
            let x0 = modulation.a * (modulation.omega * tm).sin();
            let two_pi = 2.0 * std::f64::consts::PI;
            for (h, x) in half.iter_mut().zip(&xs) {
                let v = params.v0() * (two_pi * (x - x0)).cos() + params.f() * x;
                *h = Complex64::cis(-0.5 * dt * v);
            }
        } else {
            let f = match (state.frame, modulation.kind) {
                (_, ModulationKind::None) => 0.0,
                (Frame::Accelerated, _) | (_, ModulationKind::Force) => modulation.force_at(tm),
                (Frame::Lab, ModulationKind::Phase) => unreachable!("handled by lab_moving"),
            };
            if f == 0.0 {
                half.copy_from_slice(&static_half);
            } else {
                for ((h, s), x) in half.iter_mut().zip(&static_half).zip(&xs) {
                    *h = s * Complex64::cis(-0.5 * dt * f * x);
                }
            }
        }
        for (p, h) in psi.iter_mut().zip(&half) {
            *p *= h;
        }
        {
            let st = kin.transform_mut();
            st.apply(&mut psi);
            for (p, k) in psi.iter_mut().zip(&kin_phase) {
                *p *= k;
            }
            st.apply(&mut psi);
        }
        for (p, h) in psi.iter_mut().zip(&half) {
            *p *= h;
        }
        let t = t0 + step as f64 * dt;
        let take_sample = step % opts.sample_every == 0 || step == steps;
        let take_snap = next_snap < snaps.len() && snaps[next_snap] <= t + 0.5 * dt;
        if take_sample || take_snap {
            cur.psi.copy_from_slice(&psi);
            cur.t = t;
            if take_sample {
                let (ne, wm, bw) = record(&cur, &mut traj)?;
                max_norm_error = max_norm_error.max(ne);
                max_wall = max_wall.max(wm);
                max_band_wall = max_band_wall.max(bw);
            }
            while next_snap < snaps.len() && snaps[next_snap] <= t + 0.5 * dt {
                traj.snapshots.push(snapshot(&cur));
                next_snap += 1;
            }
        }
    }
    cur.psi = psi;
    cur.t = t0 + steps as f64 * dt;
    cur.coeffs = traj.coeffs.last().cloned();
    if basis.is_some() && max_wall > opts.wall_tol {
        warnings.push(format!("{max_wall:.3e} of probability outside the ground band reached the wall cells"));
    }
    Ok(PropagationResult {
        trajectory: traj,
        final_state: cur,
        steps,
        max_norm_error,
        max_wall_mass: max_wall,
        max_band_wall_mass: max_band_wall,
        warnings,
    })
}
