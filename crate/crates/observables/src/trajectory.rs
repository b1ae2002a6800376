use std::io::Write;
use std::path::Path;

use ws_lattice::Complex64;

use crate::error::ObservablesError;

/// Version tag written in the header comment of every trajectory and snapshot CSV.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Grid,
    TightBinding,
    Secular,
    Envelope,
}

impl Representation {
    pub fn name(&self) -> &'static str {
        match self {
            Representation::Grid => "grid",
            Representation::TightBinding => "tight-binding",
            Representation::Secular => "secular",
            Representation::Envelope => "envelope",
        }
    }
}

/// Complex amplitudes on consecutive sites first, first+1, ...
#[derive(Debug, Clone, PartialEq)]
pub struct SiteAmplitudes {
    pub first: i64,
    pub amps: Vec<Complex64>,
}

impl SiteAmplitudes {
    pub fn new(first: i64, amps: Vec<Complex64>) -> Self {
        SiteAmplitudes { first, amps }
    }

    pub fn last(&self) -> i64 {
        self.first + self.amps.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Complex64 {
        let i = n - self.first;
        if i < 0 || i as usize >= self.amps.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amps[i as usize]
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.amps.len() as i64).map(move |i| self.first + i)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// <self|other> over the common sites.
    pub fn overlap(&self, other: &SiteAmplitudes) -> Complex64 {
        let lo = self.first.max(other.first);
        let hi = self.last().min(other.last());
        (lo..=hi).map(|n| self.get(n).conj() * other.get(n)).sum()
    }

    /// |<a|b>|^2 / (|a|^2 |b|^2).
    pub fn fidelity(&self, other: &SiteAmplitudes) -> f64 {
        let d = self.norm_sqr() * other.norm_sqr();
        if d == 0.0 {
            0.0
        } else {
            self.overlap(other).norm_sqr() / d
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub density: Vec<f64>,
}

impl Snapshot {
    pub fn write_csv(&self, path: &Path) -> Result<(), ObservablesError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "# ws-snapshot v{} t={}", CSV_SCHEMA_VERSION, self.t)?;
        writeln!(w, "x,density")?;
        for (x, d) in self.x.iter().zip(&self.density) {
            writeln!(w, "{:.10},{:.10e}", x, d)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sampled time series of one run. `residual` is NaN where no projection was made;
/// `coeffs` is either empty or holds one entry per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub representation: Representation,
    pub t: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub width: Vec<f64>,
    pub norm: Vec<f64>,
    pub residual: Vec<f64>,
    pub coeffs: Vec<SiteAmplitudes>,
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn new(representation: Representation) -> Self {
        Trajectory {
            representation,
            t: Vec::new(),
            mean_x: Vec::new(),
            width: Vec::new(),
            norm: Vec::new(),
            residual: Vec::new(),
            coeffs: Vec::new(),
            snapshots: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, mean_x: f64, width: f64, norm: f64, residual: f64) {
        self.t.push(t);
        self.mean_x.push(mean_x);
        self.width.push(width);
        self.norm.push(norm);
        self.residual.push(residual);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn has_coeffs(&self) -> bool {
        !self.coeffs.is_empty() && self.coeffs.len() == self.t.len()
    }

    /// Strictly increasing time and norm within `tol` of 1.
    pub fn validate(&self, norm_tol: f64) -> Result<(), ObservablesError> {
        for (i, w) in self.t.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(ObservablesError::NonMonotonicTime { index: i + 1 });
            }
        }
        for (t, n) in self.t.iter().zip(&self.norm) {
            if !((n - 1.0).abs() <= norm_tol) {
                return Err(ObservablesError::NormOutOfTolerance { t: *t, norm: *n, tol: norm_tol });
            }
        }
        Ok(())
    }

    pub fn max_norm_error(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Samples with t in [t0, t1].
    pub fn window(&self, t0: f64, t1: f64) -> Trajectory {
        let mut out = Trajectory::new(self.representation);
        for i in 0..self.len() {
            if self.t[i] >= t0 && self.t[i] <= t1 {
                out.push(self.t[i], self.mean_x[i], self.width[i], self.norm[i], self.residual[i]);
                if self.has_coeffs() {
                    out.coeffs.push(self.coeffs[i].clone());
                }
            }
        }
        out
    }

    /// CSV with columns t, mean_x, width, norm, residual after a versioned header comment.
    pub fn write_csv(&self, path: &Path) -> Result<(), ObservablesError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "# ws-trajectory v{} representation={}", CSV_SCHEMA_VERSION, self.representation.name())?;
        writeln!(w, "t,mean_x,width,norm,residual")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:.6},{:.10e},{:.10e},{:.12e},{:.6e}",
                self.t[i], self.mean_x[i], self.width[i], self.norm[i], self.residual[i]
            )?;
        }
        w.flush()?;
        Ok(())
    }
}
