//! Physical parameters and the nondimensionalization layer.
//!
//! Simulations run in units where `ħ = m = 1` and lengths are measured in a
//! chosen reference length `L₀`. The derived scales are
//! `t₀ = m L₀²/ħ`, `E₀ = ħ²/(m L₀²)` and `u₀ = ħ/(m L₀)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::constants;
use crate::error::{Error, Result};

/// `k = √(2 m E_kin)/ħ`, the free-particle dispersion used for beam setup.
pub fn wavenumber_from_kinetic(e_kin: f64, mass: f64, hbar: f64) -> Result<f64> {
    if !(e_kin >= 0.0) || !e_kin.is_finite() {
        return Err(Error::domain(format!("kinetic energy must be >= 0, got {e_kin}")));
    }
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::domain(format!("mass must be > 0, got {mass}")));
    }
    if !(hbar > 0.0) || !hbar.is_finite() {
        return Err(Error::domain(format!("hbar must be > 0, got {hbar}")));
    }
    Ok((2.0 * mass * e_kin).sqrt() / hbar)
}

/// Constants, energies and wavenumbers of a single-species beam.
///
/// The intrinsic triple `(E_T, ω, u)` obeys `E_T = ħω = m u²`; it is set as a
/// unit from either `ω` or `u`. The beam pair `(k, λ)` follows from the kinetic
/// energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    hbar: f64,
    mass: f64,
    kinetic_energy: f64,
    intrinsic: Option<Intrinsic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Intrinsic {
    total_energy: f64,
    omega: f64,
    speed: f64,
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::domain(format!("hbar must be > 0, got {hbar}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain(format!("mass must be > 0, got {mass}")));
        }
        Ok(Self {
            hbar,
            mass,
            kinetic_energy: 0.0,
            intrinsic: None,
        })
    }

    /// `ħ = m = 1`.
    pub fn natural() -> Self {
        Self::new(1.0, 1.0).expect("unit constants are valid")
    }

    /// Electron in SI units.
    pub fn electron_si() -> Self {
        Self::new(constants::HBAR, constants::ELECTRON_MASS).expect("CODATA constants are valid")
    }

    pub fn with_kinetic_energy(mut self, e_kin: f64) -> Result<Self> {
        wavenumber_from_kinetic(e_kin, self.mass, self.hbar)?;
        self.kinetic_energy = e_kin;
        Ok(self)
    }

    /// Sets the intrinsic triple from the angular frequency: `E_T = ħω`, `u = √(E_T/m)`.
    pub fn with_angular_frequency(mut self, omega: f64) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("omega must be >= 0, got {omega}")));
        }
        let total_energy = self.hbar * omega;
        self.intrinsic = Some(Intrinsic {
            total_energy,
            omega,
            speed: (total_energy / self.mass).sqrt(),
        });
        Ok(self)
    }

    /// Sets the intrinsic triple from the propagation speed: `E_T = m u²`, `ω = E_T/ħ`.
    pub fn with_intrinsic_speed(mut self, u: f64) -> Result<Self> {
        if !(u >= 0.0 && u.is_finite()) {
            return Err(Error::domain(format!("speed must be >= 0, got {u}")));
        }
        let total_energy = self.mass * u * u;
        self.intrinsic = Some(Intrinsic {
            total_energy,
            omega: total_energy / self.hbar,
            speed: u,
        });
        Ok(self)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.kinetic_energy
    }

    pub fn total_energy(&self) -> Option<f64> {
        self.intrinsic.map(|i| i.total_energy)
    }

    pub fn angular_frequency(&self) -> Option<f64> {
        self.intrinsic.map(|i| i.omega)
    }

    pub fn intrinsic_speed(&self) -> Option<f64> {
        self.intrinsic.map(|i| i.speed)
    }

    pub fn wavenumber(&self) -> f64 {
        (2.0 * self.mass * self.kinetic_energy).sqrt() / self.hbar
    }

    /// `2π/k`; infinite for a beam at rest.
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.wavenumber()
    }
}

/// Reference scales for converting SI quantities to nondimensional ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// Reference length in metres.
    pub length: f64,
    /// Reference mass in kilograms.
    pub mass: f64,
    /// ħ in J·s.
    pub hbar: f64,
}

impl UnitSystem {
    pub fn new(length: f64, mass: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("length", length), ("mass", mass), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("reference {name} must be > 0, got {v}")));
            }
        }
        Ok(Self { length, mass, hbar })
    }

    /// Electron mass and ħ with the given reference length.
    pub fn electron(length: f64) -> Result<Self> {
        Self::new(length, constants::ELECTRON_MASS, constants::HBAR)
    }

    pub fn time(&self) -> f64 {
        self.mass * self.length * self.length / self.hbar
    }

    pub fn energy(&self) -> f64 {
        self.hbar * self.hbar / (self.mass * self.length * self.length)
    }

    pub fn velocity(&self) -> f64 {
        self.hbar / (self.mass * self.length)
    }

    pub fn to_natural(&self, p: &PhysicalParams) -> PhysicalParams {
        let e0 = self.energy();
        PhysicalParams {
            hbar: p.hbar / self.hbar,
            mass: p.mass / self.mass,
            kinetic_energy: p.kinetic_energy / e0,
            intrinsic: p.intrinsic.map(|i| Intrinsic {
                total_energy: i.total_energy / e0,
                omega: i.omega * self.time(),
                speed: i.speed / self.velocity(),
            }),
        }
    }

    pub fn to_si(&self, p: &PhysicalParams) -> PhysicalParams {
        let e0 = self.energy();
        PhysicalParams {
            hbar: p.hbar * self.hbar,
            mass: p.mass * self.mass,
            kinetic_energy: p.kinetic_energy * e0,
            intrinsic: p.intrinsic.map(|i| Intrinsic {
                total_energy: i.total_energy * e0,
                omega: i.omega / self.time(),
                speed: i.speed * self.velocity(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_kinetic_energy_gives_zero_wavenumber() {
        assert_eq!(wavenumber_from_kinetic(0.0, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn natural_units_identity() {
        assert_eq!(wavenumber_from_kinetic(0.5, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn electron_at_50_kev() {
        // √(2 m_e · 50 keV)/ħ evaluated at 30 digits with the same CODATA values.
        let e = 50e3 * constants::ELEMENTARY_CHARGE;
        let k = wavenumber_from_kinetic(e, constants::ELECTRON_MASS, constants::HBAR).unwrap();
        assert!(rel(k, 1.145_575_017_031_09e12) < 1e-13, "k = {k:e}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(wavenumber_from_kinetic(-1.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(wavenumber_from_kinetic(1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(PhysicalParams::new(1.0, -2.0).is_err());
    }

    #[test]
    fn total_energy_from_omega_and_speed_agree() {
        let p = PhysicalParams::electron_si();
        let omega = 7.3e19;
        let a = p.with_angular_frequency(omega).unwrap();
        let u = a.intrinsic_speed().unwrap();
        let b = p.with_intrinsic_speed(u).unwrap();
        let (ea, eb) = (a.total_energy().unwrap(), b.total_energy().unwrap());
        assert!(rel(ea, eb) < 1e-12);
        assert!(rel(ea, p.hbar() * omega) < 1e-15);
        assert!(rel(b.angular_frequency().unwrap(), omega) < 1e-12);
    }

    #[test]
    fn nondimensional_round_trip() {
        let units = UnitSystem::electron(1e-6).unwrap();
        let p = PhysicalParams::electron_si()
            .with_kinetic_energy(50e3 * constants::ELEMENTARY_CHARGE)
            .unwrap()
            .with_angular_frequency(2.1e20)
            .unwrap();
        let n = units.to_natural(&p);
        assert!(rel(n.hbar(), 1.0) < 1e-15 && rel(n.mass(), 1.0) < 1e-15);
        let back = units.to_si(&n);
        assert!(rel(back.kinetic_energy(), p.kinetic_energy()) < 1e-12);
        assert!(rel(back.wavenumber(), p.wavenumber()) < 1e-12);
        assert!(rel(back.total_energy().unwrap(), p.total_energy().unwrap()) < 1e-12);
        assert!(rel(back.intrinsic_speed().unwrap(), p.intrinsic_speed().unwrap()) < 1e-12);
        // E_T = ħω = m u² survives the conversion.
        let e = n.total_energy().unwrap();
        assert!(rel(e, n.hbar() * n.angular_frequency().unwrap()) < 1e-12);
        assert!(rel(e, n.mass() * n.intrinsic_speed().unwrap().powi(2)) < 1e-12);
        // Wavenumbers scale with the reference length.
        assert!(rel(n.wavenumber(), p.wavenumber() * units.length) < 1e-12);
    }
}
