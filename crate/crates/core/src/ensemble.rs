//! Plane-wave ensembles over a k-sphere.
//!
//! Electrons of total energy `E_T` in a potential `V(r)` are represented by
//!
//! ```text
//! ψ(r) = (2π)^{-3/2} ∫_{|k| ≤ k₁(r)} d³k χ₀ e^{ik·r},   k₁(r) = √(m (E_T − V(r)) / ħ²)
//! ```
//!
//! Each mode carries `χ₀² = m_e`; for a constant potential the total norm is
//! `(4π m_e/3) k₁³`. Demanding unit probability rescales `χ₀` by that global
//! number, so the value of ψ at any single point depends on the whole system.
//!
//! The cutoff is used exactly in the form above (no factor 2 from the free
//! dispersion relation).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{Grid1D, Vec3};
use crate::quad::GaussLegendre;

/// Below this `k₁r` the radial profile is evaluated from its Taylor series.
const SERIES_CUTOFF: f64 = 0.5;

/// External potential felt by the ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    Constant(f64),
    /// Spherically symmetric `V(|r|)` sampled on a radial grid, linearly
    /// interpolated and held constant beyond the grid ends.
    Radial { grid: Grid1D, values: Vec<f64> },
}

impl Potential {
    pub fn at(&self, r: Vec3) -> f64 {
        match self {
            Potential::Constant(u) => *u,
            Potential::Radial { grid, values } => {
                let s = (r.norm() - grid.origin()) / grid.spacing();
                if s <= 0.0 {
                    return values[0];
                }
                let i = s.floor() as usize;
                if i + 1 >= values.len() {
                    return values[values.len() - 1];
                }
                let f = s - i as f64;
                values[i] * (1.0 - f) + values[i + 1] * f
            }
        }
    }

    pub fn minimum(&self) -> f64 {
        match self {
            Potential::Constant(u) => *u,
            Potential::Radial { values, .. } => values.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }
}

/// How the mode amplitude `χ₀` is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode {
    /// `χ₀² = m_e`.
    MassNormalized,
    /// `χ₀` rescaled so that `∫|ψ|² d³r = 1`.
    UnitProbability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    total_energy: f64,
    potential: Potential,
    mode: AmplitudeMode,
    mass_weight: f64,
    mass: f64,
    hbar: f64,
}

impl EnsembleSpec {
    /// Mass-normalized ensemble with `ħ = m = 1`.
    pub fn new(total_energy: f64, potential: Potential, mass_weight: f64) -> Result<Self> {
        Self::with_constants(total_energy, potential, mass_weight, 1.0, 1.0)
    }

    pub fn with_constants(
        total_energy: f64,
        potential: Potential,
        mass_weight: f64,
        mass: f64,
        hbar: f64,
    ) -> Result<Self> {
        if !total_energy.is_finite() {
            return Err(Error::domain("total energy must be finite"));
        }
        if !(mass_weight > 0.0 && mass_weight.is_finite()) {
            return Err(Error::domain(format!("m_e must be > 0, got {mass_weight}")));
        }
        if !(mass > 0.0 && hbar > 0.0 && mass.is_finite() && hbar.is_finite()) {
            return Err(Error::domain("mass and hbar must be > 0"));
        }
        match &potential {
            Potential::Constant(u) if !u.is_finite() => {
                return Err(Error::domain("potential must be finite"));
            }
            Potential::Radial { grid, values } => {
                if values.len() != grid.len() {
                    return Err(Error::domain("radial potential length does not match its grid"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::domain("potential must be finite"));
                }
            }
            _ => {}
        }
        Ok(Self {
            total_energy,
            potential,
            mode: AmplitudeMode::MassNormalized,
            mass_weight,
            mass,
            hbar,
        })
    }

    pub fn total_energy(&self) -> f64 {
        self.total_energy
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn mode(&self) -> AmplitudeMode {
        self.mode
    }

    pub fn mass_weight(&self) -> f64 {
        self.mass_weight
    }

    /// False when `E_T` lies below the potential everywhere (ψ ≡ 0).
    pub fn has_states(&self) -> bool {
        self.total_energy >= self.potential.minimum()
    }

    fn cutoff_for(&self, v: f64) -> f64 {
        let avail = self.total_energy - v;
        if avail > 0.0 {
            (self.mass * avail / (self.hbar * self.hbar)).sqrt()
        } else {
            0.0
        }
    }

    fn constant_cutoff(&self) -> Result<f64> {
        match self.potential {
            Potential::Constant(u) => Ok(self.cutoff_for(u)),
            Potential::Radial { .. } => Err(Error::Unsupported(
                "closed-form norm exists only for a constant potential".into(),
            )),
        }
    }
}

/// `k₁(r) = √(m (E_T − V(r)) / ħ²)`, clamped to 0 in forbidden regions.
pub fn k_cutoff(spec: &EnsembleSpec, r: Vec3) -> f64 {
    spec.cutoff_for(spec.potential.at(r))
}

/// Mode amplitude `χ₀`.
pub fn mode_amplitude(spec: &EnsembleSpec) -> f64 {
    match spec.mode {
        AmplitudeMode::MassNormalized => spec.mass_weight.sqrt(),
        AmplitudeMode::UnitProbability => {
            // Only reachable through `renormalize`, which guarantees k₁ > 0.
            let k1 = spec.constant_cutoff().expect("unit-probability spec has a constant potential");
            (sphere_volume(k1)).powf(-0.5)
        }
    }
}

fn sphere_volume(k1: f64) -> f64 {
    4.0 * PI / 3.0 * k1 * k1 * k1
}

/// `(sin x − x cos x)/x³`.
pub fn sphere_profile(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_CUTOFF {
        // Σ_{n≥1} (−1)^{n+1} 2n x^{2n−2} / (2n+1)!
        let x2 = x * x;
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        let mut n = 1.0;
        loop {
            // ratio of consecutive terms
            term *= -x2 * (n + 1.0) / (n * (2.0 * n + 2.0) * (2.0 * n + 3.0));
            n += 1.0;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                return sum;
            }
        }
    }
    (x.sin() - x * x.cos()) / (x * x * x)
}

/// `ψ(r)` for a constant `χ₀` over the local k-sphere, in closed form:
/// `χ₀ (2π)^{-3/2} 4π k₁³ (sin x − x cos x)/x³` with `x = k₁|r|`.
///
/// The constant-χ₀ sphere transform is real, so ψ is returned as `f64`.
pub fn ensemble_wavefunction(spec: &EnsembleSpec, r: Vec3) -> f64 {
    let k1 = k_cutoff(spec, r);
    if k1 == 0.0 {
        return 0.0;
    }
    let chi0 = mode_amplitude(spec);
    chi0 * (2.0 * PI).powf(-1.5) * 4.0 * PI * k1.powi(3) * sphere_profile(k1 * r.norm())
}

/// `ψ(r)` for an isotropic mode amplitude `χ₀(|k|)` by radial Gauss–Legendre
/// quadrature of `(2π)^{-3/2} ∫₀^{k₁} 4π k² χ₀(k) sin(k|r|)/(k|r|) dk`.
pub fn ensemble_wavefunction_with(
    spec: &EnsembleSpec,
    r: Vec3,
    chi0: impl Fn(f64) -> f64,
    order: usize,
    panels: usize,
) -> Result<f64> {
    let rule = GaussLegendre::new(order)?;
    let k1 = k_cutoff(spec, r);
    if k1 == 0.0 {
        return Ok(0.0);
    }
    let rn = r.norm();
    let integral = rule.composite(0.0, k1, panels.max(1), |k| {
        let x = k * rn;
        let j0 = if x < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
        k * k * chi0(k) * j0
    });
    Ok((2.0 * PI).powf(-1.5) * 4.0 * PI * integral)
}

/// `∫|ψ|² d³r = χ₀² (4π/3) k₁³`, which is `(4π m_e/3) k₁³` for mass-normalized modes.
pub fn norm_constant_potential(spec: &EnsembleSpec) -> Result<f64> {
    let k1 = spec.constant_cutoff()?;
    let chi0 = mode_amplitude(spec);
    Ok(chi0 * chi0 * sphere_volume(k1))
}

/// Rescales `χ₀` so the total probability is one. Idempotent.
pub fn renormalize(spec: &EnsembleSpec) -> Result<EnsembleSpec> {
    let k1 = spec.constant_cutoff()?;
    if k1 == 0.0 {
        return Err(Error::NormalizationImpossible);
    }
    Ok(EnsembleSpec {
        mode: AmplitudeMode::UnitProbability,
        ..spec.clone()
    })
}
