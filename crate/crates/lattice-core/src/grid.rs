use crate::error::LatticeError;

/// Uniform grid over a hard-walled box. `points()` intervals of width `dx`; the
/// unknowns are the `points() - 1` interior nodes, the two wall nodes are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_sites: usize,
    pub points_per_site: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl GridSpec {
    pub fn new(n_sites: usize, points_per_site: usize, x_min: f64, x_max: f64) -> Result<Self, LatticeError> {
        if n_sites < 2 {
            return Err(LatticeError::InvalidParam { name: "n_sites", reason: format!("need at least 2, got {n_sites}") });
        }
        if points_per_site < 4 {
            return Err(LatticeError::InvalidParam {
                name: "points_per_site",
                reason: format!("need at least 4, got {points_per_site}"),
            });
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(LatticeError::InvalidParam { name: "x_min/x_max", reason: format!("bad bounds [{x_min}, {x_max}]") });
        }
        Ok(GridSpec { n_sites, points_per_site, x_min, x_max })
    }

    /// Box of `n_sites` unit cells, cells n = -n_sites/2 .. n_sites/2 - 1, cell n = [n, n+1).
    pub fn centered(n_sites: usize, points_per_site: usize) -> Result<Self, LatticeError> {
        if n_sites % 2 != 0 {
            return Err(LatticeError::InvalidParam { name: "n_sites", reason: format!("must be even, got {n_sites}") });
        }
        let half = (n_sites / 2) as f64;
        Self::new(n_sites, points_per_site, -half, half)
    }

    /// 64 sites at 32 points per site.
    pub fn default_box() -> Self {
        Self::centered(64, 32).expect("default grid is valid")
    }

    pub fn points(&self) -> usize {
        self.n_sites * self.points_per_site
    }

    pub fn interior(&self) -> usize {
        self.points() - 1
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.points() as f64
    }

    /// Coordinate of interior node `i` (0-based), i.e. x_min + (i + 1) dx.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i + 1) as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.interior()).map(|i| self.x(i)).collect()
    }

    /// Index of the first box cell, floor(x_min).
    pub fn first_cell(&self) -> i64 {
        self.x_min.floor() as i64
    }

    /// Cell index of interior node `i`.
    pub fn cell_of(&self, i: usize) -> i64 {
        self.x(i).floor() as i64
    }

    /// Range of interior node indices whose coordinate lies in cell n, [n, n+1).
    pub fn cell_nodes(&self, n: i64) -> std::ops::Range<usize> {
        let dx = self.dx();
        let lo = ((n as f64 - self.x_min) / dx).ceil() as i64 - 1;
        let hi = ((n as f64 + 1.0 - self.x_min) / dx).ceil() as i64 - 1;
        let m = self.interior() as i64;
        (lo.clamp(0, m) as usize)..(hi.clamp(0, m) as usize)
    }

    pub fn check_len(&self, len: usize) -> Result<(), LatticeError> {
        if len != self.interior() {
            return Err(LatticeError::GridMismatch { expected: self.interior(), got: len });
        }
        Ok(())
    }
}
