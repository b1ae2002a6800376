//! Physical <-> lattice unit conversion. Lengths in lambda_L/2, time in 1/omega_R,
//! energies in E_R, forces in E_R/(lambda_L/2).

use crate::error::LatticeError;

pub const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub lambda_l: f64,
    pub mass: f64,
}

impl UnitSystem {
    pub fn new(lambda_l: f64, mass: f64) -> Result<Self, LatticeError> {
        if !(lambda_l.is_finite() && lambda_l > 0.0) {
            return Err(LatticeError::InvalidParam { name: "lambda_L", reason: format!("must be > 0, got {lambda_l}") });
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(LatticeError::InvalidParam { name: "M", reason: format!("must be > 0, got {mass}") });
        }
        Ok(UnitSystem { lambda_l, mass })
    }

    pub fn k_l(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda_l
    }

    pub fn e_r(&self) -> f64 {
        HBAR * HBAR * self.k_l() * self.k_l() / (2.0 * self.mass)
    }

    pub fn omega_r(&self) -> f64 {
        self.e_r() / HBAR
    }

    pub fn p_r(&self) -> f64 {
        HBAR * self.k_l()
    }

    /// Lattice period d = lambda_L / 2 in metres.
    pub fn length_scale(&self) -> f64 {
        self.lambda_l / 2.0
    }

    pub fn length_to_lattice(&self, x: f64) -> f64 {
        x / self.length_scale()
    }

    pub fn length_to_physical(&self, x: f64) -> f64 {
        x * self.length_scale()
    }

    pub fn time_to_lattice(&self, t: f64) -> f64 {
        t * self.omega_r()
    }

    pub fn time_to_physical(&self, tau: f64) -> f64 {
        tau / self.omega_r()
    }

    pub fn energy_to_lattice(&self, e: f64) -> f64 {
        e / self.e_r()
    }

    pub fn energy_to_physical(&self, e: f64) -> f64 {
        e * self.e_r()
    }

    pub fn force_to_lattice(&self, f: f64) -> f64 {
        f * self.length_scale() / self.e_r()
    }

    pub fn force_to_physical(&self, f: f64) -> f64 {
        f * self.e_r() / self.length_scale()
    }

    pub fn frequency_to_lattice(&self, w: f64) -> f64 {
        w / self.omega_r()
    }

    pub fn frequency_to_physical(&self, w: f64) -> f64 {
        w * self.omega_r()
    }
}
