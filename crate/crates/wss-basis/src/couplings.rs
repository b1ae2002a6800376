use crate::error::BasisError;
use crate::ladder::WSBasis;

#[derive(Debug, Clone, Copy)]
pub struct CouplingOptions {
    /// Largest accepted spread of X_p over bulk n.
    pub spread_tol: f64,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        CouplingOptions { spread_tol: 2.5e-4 }
    }
}

/// Bulk-averaged position couplings of the ladder and the ideal ladder energies
/// E_n = e_ref + n F d.
#[derive(Debug, Clone, PartialEq)]
pub struct Couplings {
    /// x[0] = X_{0,0} (mean of X_{n,n} - n d), x[p] = X_p for p >= 1.
    pub x: Vec<f64>,
    /// max - min over bulk n, same indexing as `x`.
    pub spread: Vec<f64>,
    /// Number of bulk pairs each entry was averaged over.
    pub samples: Vec<usize>,
    pub e_ref: f64,
    pub f: f64,
}

impl Couplings {
    /// Table built from given values, for reduced models without a grid basis.
    pub fn from_table(x00: f64, x: &[f64], e_ref: f64, f: f64) -> Self {
        let mut all = vec![x00];
        all.extend_from_slice(x);
        let len = all.len();
        Couplings { x: all, spread: vec![0.0; len], samples: vec![0; len], e_ref, f }
    }

    pub fn p_max(&self) -> usize {
        self.x.len() - 1
    }

    pub fn x00(&self) -> f64 {
        self.x[0]
    }

    /// X_p with X_{-p} = X_p; zero beyond p_max; X_0 is the intra-site offset.
    pub fn x_p(&self, p: i64) -> f64 {
        self.x.get(p.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    /// X_{n,m} with the diagonal X_{n,n} = X_{0,0} + n d.
    pub fn x_nm(&self, n: i64, m: i64) -> f64 {
        if n == m {
            self.x00() + n as f64
        } else {
            self.x_p(m - n)
        }
    }

    pub fn energy(&self, n: i64) -> f64 {
        self.e_ref + n as f64 * self.f
    }

    pub fn omega_b(&self) -> f64 {
        self.f
    }

    /// Key-value text dump.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("X00 = {:.12e}\n", self.x00()));
        s.push_str(&format!("X00_spread = {:.6e}\n", self.spread[0]));
        for p in 1..self.x.len() {
            s.push_str(&format!("X{} = {:.12e}\n", p, self.x[p]));
            s.push_str(&format!("X{}_spread = {:.6e}\n", p, self.spread[p]));
        }
        s.push_str(&format!("E_ref = {:.12e}\n", self.e_ref));
        s.push_str(&format!("F = {:.12e}\n", self.f));
        s
    }
}

/// <phi_n|x|phi_m> on the grid.
pub fn matrix_element(basis: &WSBasis, n: i64, m: i64) -> f64 {
    let a = basis.state(n).expect("site n in basis");
    let b = basis.state(m).expect("site m in basis");
    let g = &basis.grid;
    (0..g.interior()).map(|i| a[i] * g.x(i) * b[i]).sum::<f64>() * g.dx()
}

pub fn coupling_matrix(basis: &WSBasis, p_max: usize, opts: &CouplingOptions) -> Result<Couplings, BasisError> {
    if p_max < 1 {
        return Err(BasisError::BadPMax);
    }
    let (lo, hi) = basis.bulk;
    let mut x = Vec::with_capacity(p_max + 1);
    let mut spread = Vec::with_capacity(p_max + 1);
    let mut samples = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max as i64 {
        let vals: Vec<f64> = (lo..=hi - p)
            .map(|n| {
                let v = matrix_element(basis, n, n + p);
                if p == 0 {
                    v - n as f64
                } else {
                    v
                }
            })
            .collect();
        if vals.is_empty() {
            return Err(BasisError::BulkTooSmall { min: p as usize + 1, ladder: f64::NAN, translation: f64::NAN });
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let (mn, mx) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if p >= 1 && mx - mn > opts.spread_tol {
            return Err(BasisError::CouplingSpread { p: p as usize, spread: mx - mn, tol: opts.spread_tol });
        }
        x.push(mean);
        spread.push(mx - mn);
        samples.push(vals.len());
    }
    let fd = basis.params.omega_b();
    let e_ref = basis.bulk_sites().map(|n| basis.energy(n).unwrap() - n as f64 * fd).sum::<f64>() / (hi - lo + 1) as f64;
    Ok(Couplings { x, spread, samples, e_ref, f: basis.params.f() })
}
