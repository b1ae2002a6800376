use crate::error::LatticeError;

/// Reduced mass in lattice units, m* = pi^2 / 2.
pub const M_STAR: f64 = std::f64::consts::PI * std::f64::consts::PI / 2.0;
/// Lattice period.
pub const D: f64 = 1.0;

/// Static lattice: H0 = P^2/(2 m*) + V0 cos(2 pi x) + F x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    v0: f64,
    f: f64,
}

impl LatticeParams {
    /// `f = 0` is accepted (untilted band structure); ladder extraction rejects it.
    pub fn new(v0: f64, f: f64) -> Result<Self, LatticeError> {
        if !(v0.is_finite() && v0 > 0.0) {
            return Err(LatticeError::InvalidParam { name: "V0", reason: format!("must be finite and > 0, got {v0}") });
        }
        if !(f.is_finite() && f >= 0.0) {
            return Err(LatticeError::InvalidParam { name: "F", reason: format!("must be finite and >= 0, got {f}") });
        }
        Ok(LatticeParams { v0, f })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn m_star(&self) -> f64 {
        M_STAR
    }

    pub fn d(&self) -> f64 {
        D
    }

    /// Bloch frequency, always F d.
    pub fn omega_b(&self) -> f64 {
        self.f * D
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulationKind {
    None,
    /// Lattice displaced by x0(t) = a sin(omega t).
    Phase,
    /// Force term -F0 sin(omega t) x with F0 = m* a omega^2.
    Force,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationSpec {
    pub kind: ModulationKind,
    pub a: f64,
    pub omega: f64,
}

impl ModulationSpec {
    pub fn none() -> Self {
        ModulationSpec { kind: ModulationKind::None, a: 0.0, omega: 0.0 }
    }

    pub fn phase(a: f64, omega: f64) -> Result<Self, LatticeError> {
        Self::checked(ModulationKind::Phase, a, omega)
    }

    pub fn force(a: f64, omega: f64) -> Result<Self, LatticeError> {
        Self::checked(ModulationKind::Force, a, omega)
    }

    fn checked(kind: ModulationKind, a: f64, omega: f64) -> Result<Self, LatticeError> {
        if !a.is_finite() {
            return Err(LatticeError::InvalidParam { name: "a", reason: format!("must be finite, got {a}") });
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(LatticeError::InvalidParam { name: "omega", reason: format!("must be finite and > 0, got {omega}") });
        }
        Ok(ModulationSpec { kind, a, omega })
    }

    pub fn is_active(&self) -> bool {
        self.kind != ModulationKind::None && self.a != 0.0
    }

    /// Inertial force amplitude F0 = m* a omega^2 (zero when inactive).
    pub fn f0(&self) -> f64 {
        if self.kind == ModulationKind::None {
            0.0
        } else {
            M_STAR * self.a * self.omega * self.omega
        }
    }

    /// Lattice displacement X0(t) and its first two derivatives.
    pub fn displacement(&self, t: f64) -> (f64, f64, f64) {
        if self.kind == ModulationKind::None {
            return (0.0, 0.0, 0.0);
        }
        let (s, c) = (self.omega * t).sin_cos();
        let w = self.omega;
        (self.a * s, self.a * w * c, -self.a * w * w * s)
    }

    /// Time-dependent force added to F in the accelerated frame: -F0 sin(omega t).
    pub fn force_at(&self, t: f64) -> f64 {
        if self.kind == ModulationKind::None {
            0.0
        } else {
            -self.f0() * (self.omega * t).sin()
        }
    }
}
