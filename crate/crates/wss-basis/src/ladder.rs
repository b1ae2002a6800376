use std::collections::BTreeMap;

use ws_lattice::{GridSpec, LatticeParams};

use crate::eigen::Eigenpairs;
use crate::error::BasisError;

#[derive(Debug, Clone, Copy)]
pub struct LadderOptions {
    /// Wells excluded from the bulk at each wall before any shrinking.
    pub margin: usize,
    /// Ladder tolerance as a fraction of omega_B.
    pub ladder_tol_rel: f64,
    /// Translation-law tolerance (L2).
    pub trans_tol: f64,
    /// Half width, in wells, of the window the translation law is evaluated on.
    pub window: usize,
    /// Smallest acceptable bulk.
    pub min_bulk: usize,
    /// Two candidates of one well closer than this fraction of F d are ambiguous.
    pub ambiguity_gap_rel: f64,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions { margin: 8, ladder_tol_rel: 1e-3, trans_tol: 1e-3, window: 4, min_bulk: 8, ambiguity_gap_rel: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderDiagnostics {
    /// max over bulk pairs of |E_{n+p} - E_n - p F d|.
    pub ladder_deviation: f64,
    pub ladder_tol: f64,
    /// max over bulk n of ||phi_{n+1}(x) - phi_n(x-d)|| on the window.
    pub translation_window: f64,
    /// Same distance over the whole box, for information.
    pub translation_full_box: f64,
    pub trans_tol: f64,
    /// Eigenstates below the cutoff that are not ground-ladder members.
    pub excited_discarded: usize,
    pub margin: usize,
    /// Smallest gap between a well's ground member and its next candidate.
    pub min_gap: f64,
    /// Smallest probability in wells n-1..n+1 over bulk n.
    pub min_local_mass3: f64,
    /// Smallest probability in well n alone over bulk n.
    pub min_local_mass1: f64,
    pub max_residual: f64,
}

/// Ground-band ladder, one real state per well, sign-fixed.
#[derive(Debug, Clone)]
pub struct WSBasis {
    pub grid: GridSpec,
    pub params: LatticeParams,
    pub sites: Vec<i64>,
    pub energies: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Inclusive bulk site range.
    pub bulk: (i64, i64),
    pub diagnostics: LadderDiagnostics,
}

impl WSBasis {
    pub fn first_site(&self) -> i64 {
        self.sites[0]
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn index_of(&self, n: i64) -> Option<usize> {
        let i = n - self.first_site();
        (i >= 0 && (i as usize) < self.sites.len()).then_some(i as usize)
    }

    pub fn state(&self, n: i64) -> Option<&[f64]> {
        self.index_of(n).map(|i| self.states[i].as_slice())
    }

    pub fn energy(&self, n: i64) -> Option<f64> {
        self.index_of(n).map(|i| self.energies[i])
    }

    pub fn in_bulk(&self, n: i64) -> bool {
        n >= self.bulk.0 && n <= self.bulk.1
    }

    pub fn bulk_sites(&self) -> impl Iterator<Item = i64> {
        self.bulk.0..=self.bulk.1
    }

    /// Probability of state n inside cells lo..=hi.
    pub fn cell_mass(&self, n: i64, lo: i64, hi: i64) -> f64 {
        let phi = self.state(n).expect("site in basis");
        cell_mass(&self.grid, phi, lo, hi)
    }

    /// Ladder residual of the bulk, max - min of E_n - n F d.
    pub fn ladder_deviation(&self) -> f64 {
        ladder_deviation(self, self.bulk)
    }
}

fn cell_mass(grid: &GridSpec, phi: &[f64], lo: i64, hi: i64) -> f64 {
    (lo..=hi).map(|c| grid.cell_nodes(c).map(|i| phi[i] * phi[i]).sum::<f64>()).sum::<f64>() * grid.dx()
}

fn per_cell_mass(grid: &GridSpec, phi: &[f64]) -> Vec<f64> {
    let first = grid.first_cell();
    (0..grid.n_sites as i64).map(|c| cell_mass(grid, phi, first + c, first + c)).collect()
}

fn sign_fixed(grid: &GridSpec, site: i64, phi: &mut [f64]) -> Result<(), BasisError> {
    let lobe: f64 = grid.cell_nodes(site).map(|i| phi[i]).sum::<f64>() * grid.dx();
    if lobe.abs() < 1e-6 {
        return Err(BasisError::NoDominantLobe { site });
    }
    if lobe < 0.0 {
        phi.iter_mut().for_each(|p| *p = -*p);
    }
    Ok(())
}

/// Makes the lobe of phi_n inside its own well positive.
pub fn fix_phase(mut basis: WSBasis) -> Result<WSBasis, BasisError> {
    let grid = basis.grid;
    for (site, phi) in basis.sites.iter().zip(basis.states.iter_mut()) {
        sign_fixed(&grid, *site, phi)?;
    }
    Ok(basis)
}

fn ladder_deviation(basis: &WSBasis, bulk: (i64, i64)) -> f64 {
    let fd = basis.params.omega_b();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in bulk.0..=bulk.1 {
        let r = basis.energy(n).unwrap() - n as f64 * fd;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    hi - lo
}

/// (windowed, full box) translation distances, max over bulk pairs.
fn translation_deviation(basis: &WSBasis, bulk: (i64, i64), window: usize) -> (f64, f64) {
    let grid = &basis.grid;
    let pps = grid.points_per_site;
    let m = grid.interior();
    let dx = grid.dx();
    let (mut win_max, mut full_max): (f64, f64) = (0.0, 0.0);
    for n in bulk.0..bulk.1 {
        let a = basis.state(n).unwrap();
        let b = basis.state(n + 1).unwrap();
        // shifted(x) = phi_n(x - d), defined on nodes i >= pps
        let diff = |i: usize| if i >= pps { b[i] - a[i - pps] } else { b[i] };
        let mut full: f64 = (0..m).map(|i| diff(i).powi(2)).sum();
        full += (m - pps..m).map(|i| a[i] * a[i]).sum::<f64>();
        let centre = n + 1;
        let w = window as i64;
        let win: f64 = (centre - w..=centre + w).flat_map(|c| grid.cell_nodes(c)).map(|i| diff(i).powi(2)).sum();
        win_max = win_max.max((win * dx).sqrt());
        full_max = full_max.max((full * dx).sqrt());
    }
    (win_max, full_max)
}

/// Picks one state per well (argmax of per-cell probability, lowest energy wins),
/// fixes signs, then narrows the bulk until the ladder and translation laws hold.
pub fn extract_wss_ladder(pairs: &Eigenpairs, opts: &LadderOptions) -> Result<WSBasis, BasisError> {
    let params = pairs.params;
    let grid = pairs.grid;
    if params.f() <= 0.0 {
        return Err(BasisError::NoTilt);
    }
    let first = grid.first_cell();
    let n_wells = grid.n_sites as i64;
    let mut candidates: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (k, phi) in pairs.states.iter().enumerate() {
        let masses = per_cell_mass(&grid, phi);
        let (best, _) = masses
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |acc, (c, &m)| if m > acc.1 { (c, m) } else { acc });
        candidates.entry(first + best as i64).or_default().push(k);
    }
    let gap_tol = opts.ambiguity_gap_rel * params.omega_b();
    let mut sites = Vec::with_capacity(grid.n_sites);
    let mut energies = Vec::with_capacity(grid.n_sites);
    let mut states = Vec::with_capacity(grid.n_sites);
    let mut min_gap = f64::INFINITY;
    let mut chosen = 0usize;
    for well in first..first + n_wells {
        let list = candidates.get(&well).ok_or(BasisError::MissingWell { well })?;
        // eigenpairs are sorted, so list is ascending in energy
        let k0 = list[0];
        if let Some(&k1) = list.get(1) {
            let gap = pairs.energies[k1] - pairs.energies[k0];
            if gap < gap_tol {
                return Err(BasisError::Ambiguous { well, e0: pairs.energies[k0], e1: pairs.energies[k1], gap: gap_tol });
            }
            min_gap = min_gap.min(gap);
        }
        let mut phi = pairs.states[k0].clone();
        sign_fixed(&grid, well, &mut phi)?;
        sites.push(well);
        energies.push(pairs.energies[k0]);
        states.push(phi);
        chosen += 1;
    }
    let mut basis = WSBasis {
        grid,
        params,
        sites,
        energies,
        states,
        bulk: (first, first + n_wells - 1),
        diagnostics: LadderDiagnostics {
            ladder_deviation: f64::NAN,
            ladder_tol: opts.ladder_tol_rel * params.omega_b(),
            translation_window: f64::NAN,
            translation_full_box: f64::NAN,
            trans_tol: opts.trans_tol,
            excited_discarded: pairs.energies.len() - chosen,
            margin: opts.margin,
            min_gap,
            min_local_mass3: f64::NAN,
            min_local_mass1: f64::NAN,
            max_residual: pairs.max_residual,
        },
    };
    let mut margin = opts.margin as i64;
    loop {
        let bulk = (first + margin, first + n_wells - 1 - margin);
        let size = (bulk.1 - bulk.0 + 1).max(0) as usize;
        if size < opts.min_bulk.max(2) {
            return Err(BasisError::BulkTooSmall {
                min: opts.min_bulk,
                ladder: basis.diagnostics.ladder_deviation,
                translation: basis.diagnostics.translation_window,
            });
        }
        let ladder = ladder_deviation(&basis, bulk);
        let (win, full) = translation_deviation(&basis, bulk, opts.window);
        basis.diagnostics.ladder_deviation = ladder;
        basis.diagnostics.translation_window = win;
        basis.diagnostics.translation_full_box = full;
        if ladder <= basis.diagnostics.ladder_tol && win <= opts.trans_tol {
            basis.bulk = bulk;
            basis.diagnostics.margin = margin as usize;
            break;
        }
        margin += 1;
    }
    let (mut m3, mut m1) = (f64::INFINITY, f64::INFINITY);
    for n in basis.bulk_sites() {
        m3 = m3.min(basis.cell_mass(n, n - 1, n + 1));
        m1 = m1.min(basis.cell_mass(n, n, n));
    }
    basis.diagnostics.min_local_mass3 = m3;
    basis.diagnostics.min_local_mass1 = m1;
    Ok(basis)
}
