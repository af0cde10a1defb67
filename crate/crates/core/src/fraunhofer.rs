//! Far-field single-slit profiles.
//!
//! The amplitude is `sin(kaθ)/(kaθ)`; with `a = 1` it is the textbook
//! `sin(kθ)/(kθ)`. The field-energy intensity carries an extra `cos²α` for a
//! wave launched with phase `α`, so a phase-resolved measurement would see the
//! fringes fade out completely at `α = π/2`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this `|x|` the sinc is evaluated from its Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `cos²α`, computed as `(1 + cos 2α)/2` so that `α = π/2` gives exactly zero.
pub fn cos_squared(alpha: f64) -> f64 {
    let alpha = reduce_phase(alpha);
    (0.5 * (1.0 + (2.0 * alpha).cos())).max(0.0)
}

/// Maps a phase into `[0, 2π)`.
pub fn reduce_phase(alpha: f64) -> f64 {
    let r = alpha.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn check(k: f64, a: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain(format!("wavenumber must be > 0, got {k}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("slit scale must be > 0, got {a}")));
    }
    Ok(())
}

/// Far-field amplitude `sin(kaθ)/(kaθ)`, normalized to 1 at `θ = 0`.
pub fn sinc_amplitude(k: f64, theta: f64, a: f64) -> Result<f64> {
    check(k, a)?;
    Ok(sinc(k * a * theta))
}

/// Field-energy intensity density `sinc²(kaθ)·cos²α`.
pub fn phase_intensity(k: f64, theta: f64, alpha: f64, a: f64) -> Result<f64> {
    let s = sinc_amplitude(k, theta, a)?;
    Ok(s * s * cos_squared(alpha))
}

/// Parameters of a phase-resolved single-slit scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FraunhoferSpec {
    k: f64,
    a: f64,
    alpha: f64,
    theta_grid: Vec<f64>,
}

impl FraunhoferSpec {
    pub fn new(k: f64, a: f64, alpha: f64, theta_grid: Vec<f64>) -> Result<Self> {
        check(k, a)?;
        if !alpha.is_finite() {
            return Err(Error::domain("phase must be finite"));
        }
        Ok(Self {
            k,
            a,
            alpha: reduce_phase(alpha),
            theta_grid,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Launch phase, reduced to `[0, 2π)`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta_grid(&self) -> &[f64] {
        &self.theta_grid
    }

    /// Intensity at every grid angle for the spec's own phase.
    pub fn profile(&self) -> Vec<f64> {
        let c2 = cos_squared(self.alpha);
        self.theta_grid
            .iter()
            .map(|&t| {
                let s = sinc(self.k * self.a * t);
                s * s * c2
            })
            .collect()
    }
}

/// Intensity table `T[i][j] = phase_intensity(k, θᵢ, αⱼ, a)`.
pub fn phase_scan_surface(spec: &FraunhoferSpec, alpha_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    if spec.theta_grid.is_empty() {
        return Err(Error::domain("theta grid is empty"));
    }
    if alpha_grid.is_empty() {
        return Err(Error::domain("alpha grid is empty"));
    }
    let weights: Vec<f64> = alpha_grid.iter().map(|&a| cos_squared(a)).collect();
    Ok(spec
        .theta_grid
        .iter()
        .map(|&t| {
            let s = sinc(spec.k * spec.a * t);
            let base = s * s;
            weights.iter().map(|w| base * w).collect()
        })
        .collect())
}
