//! Scalar boundary-integral diffraction in the Kirchhoff approximation.
//!
//! The aperture lies in the plane `z = 0` with unit normal `+z` pointing to the
//! observation side. On the openings the field equals the incident wave; on the
//! opaque screen it is zero. The amplitude at an observation point `r` is
//!
//! ```text
//! Γ(k, r) = i/(2λ) ∫ dA' ψ_inc(r') · n̂·(r − r')/|r − r'|² · (1 + i/(k|r − r'|)) · e^{ik|r − r'|}
//! ```
//!
//! with `ψ_inc` carrying the launch phase `α` and the path phase relative to
//! the source distance `R`, so that the full wavelet is `e^{ikR}·Γ(k, r)`.
//! Nothing here depends on time: the screen profile is fixed by geometry and
//! `k` alone.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{Grid1D, Vec3};
use crate::quad::{GaussLegendre, Rect};

const NORMAL: Vec3 = Vec3::new(0.0, 0.0, 1.0);

/// Axis-aligned rectangular opening in the aperture plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Opening {
    pub center: (f64, f64),
    pub half_width: (f64, f64),
}

impl Opening {
    pub fn new(center: (f64, f64), half_width: (f64, f64)) -> Result<Self> {
        if !(half_width.0 > 0.0 && half_width.1 > 0.0)
            || !half_width.0.is_finite()
            || !half_width.1.is_finite()
        {
            return Err(Error::domain(format!(
                "opening half-widths must be > 0, got {half_width:?}"
            )));
        }
        if !center.0.is_finite() || !center.1.is_finite() {
            return Err(Error::domain("opening center must be finite"));
        }
        Ok(Self { center, half_width })
    }

    fn rect(&self) -> Rect {
        Rect {
            x0: self.center.0 - self.half_width.0,
            x1: self.center.0 + self.half_width.0,
            y0: self.center.1 - self.half_width.1,
            y1: self.center.1 + self.half_width.1,
        }
    }

    fn overlaps(&self, other: &Opening) -> bool {
        (self.center.0 - other.center.0).abs() < self.half_width.0 + other.half_width.0
            && (self.center.1 - other.center.1).abs() < self.half_width.1 + other.half_width.1
    }

    /// Largest full width along either axis.
    pub fn width(&self) -> f64 {
        2.0 * self.half_width.0.max(self.half_width.1)
    }
}

/// A set of non-overlapping rectangular openings in `z = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aperture {
    openings: Vec<Opening>,
}

impl Aperture {
    pub fn new(openings: Vec<Opening>) -> Result<Self> {
        if openings.is_empty() {
            return Err(Error::domain("aperture has no openings"));
        }
        for (i, a) in openings.iter().enumerate() {
            for b in &openings[i + 1..] {
                if a.overlaps(b) {
                    return Err(Error::domain(format!("openings overlap: {a:?} and {b:?}")));
                }
            }
        }
        Ok(Self { openings })
    }

    /// One slit of half-widths `(a, b)` centered on the axis.
    pub fn single_slit(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![Opening::new((0.0, 0.0), (a, b))?])
    }

    /// Two identical slits whose centers are `separation` apart along x.
    pub fn double_slit(separation: f64, a: f64, b: f64) -> Result<Self> {
        let c = 0.5 * separation;
        Self::new(vec![Opening::new((-c, 0.0), (a, b))?, Opening::new((c, 0.0), (a, b))?])
    }

    pub fn openings(&self) -> &[Opening] {
        &self.openings
    }

    pub fn max_opening_width(&self) -> f64 {
        self.openings.iter().map(Opening::width).fold(0.0, f64::max)
    }
}

/// Where the incident wave comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourcePosition {
    /// Spherical wave from a point on the source side (`z < 0`); this point is `−R`.
    Point(Vec3),
    /// Plane wave at normal incidence.
    AtInfinity,
}

/// Incident wave: source point, launch phase and particle velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    position: SourcePosition,
    phase_alpha: f64,
    velocity: Vec3,
}

impl SourceSpec {
    pub fn point(position: Vec3, phase_alpha: f64, velocity: Vec3) -> Result<Self> {
        if !position.is_finite() || !(position.z < 0.0) {
            return Err(Error::domain(format!(
                "source must lie strictly on the z < 0 side, got {position:?}"
            )));
        }
        Self::checked(SourcePosition::Point(position), phase_alpha, velocity)
    }

    pub fn plane_wave(phase_alpha: f64) -> Result<Self> {
        Self::checked(SourcePosition::AtInfinity, phase_alpha, Vec3::new(0.0, 0.0, 1.0))
    }

    fn checked(position: SourcePosition, phase_alpha: f64, velocity: Vec3) -> Result<Self> {
        if !phase_alpha.is_finite() || !velocity.is_finite() {
            return Err(Error::domain("source phase and velocity must be finite"));
        }
        Ok(Self {
            position,
            phase_alpha,
            velocity,
        })
    }

    pub fn position(&self) -> SourcePosition {
        self.position
    }

    pub fn phase_alpha(&self) -> f64 {
        self.phase_alpha
    }

    pub fn velocity(&self) -> Vec3 {
        self.velocity
    }

    /// Incident field on the aperture plane, with the `e^{ikR}` factor removed.
    pub fn incident(&self, k: f64, r_prime: Vec3) -> Complex64 {
        let path = match self.position {
            SourcePosition::Point(s) => (r_prime - s).norm() - s.norm(),
            SourcePosition::AtInfinity => 0.0,
        };
        Complex64::from_polar(1.0, self.phase_alpha + k * path)
    }

    /// `|∂φ/∂x'|, |∂φ/∂y'|` of the incident phase at an aperture point, per unit k.
    fn phase_slope(&self, r_prime: Vec3) -> (f64, f64) {
        match self.position {
            SourcePosition::Point(s) => {
                let d = r_prime - s;
                let n = d.norm();
                (d.x.abs() / n, d.y.abs() / n)
            }
            SourcePosition::AtInfinity => (0.0, 0.0),
        }
    }
}

/// Gauss–Legendre panel settings for the aperture integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub order: usize,
    pub max_refinement: usize,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 8,
            max_refinement: 8,
            rel_tol: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::domain(format!("quadrature order must be >= 2, got {}", self.order)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::domain(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        if self.max_refinement == 0 {
            return Err(Error::domain("max_refinement must be >= 1"));
        }
        Ok(())
    }
}

/// `e^{ikρ}·n̂·(r − r')/ρ²·(1 + i/(kρ))` with `ρ = |r − r'|` and `n̂ = +z`.
///
/// The `i/(2λ)` prefactor is left to the caller. Negative `k` is accepted and
/// yields the complex conjugate.
pub fn greens_kernel(r: Vec3, r_prime: Vec3, k: f64) -> Result<Complex64> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::domain(format!("wavenumber must be nonzero and finite, got {k}")));
    }
    let d = r - r_prime;
    let rho = d.norm();
    if !(rho > 0.0) {
        return Err(Error::domain("kernel is singular at coincident points"));
    }
    Ok(kernel_unchecked(d, rho, k))
}

#[inline]
fn kernel_unchecked(d: Vec3, rho: f64, k: f64) -> Complex64 {
    let cos_term = NORMAL.dot(d) / (rho * rho);
    Complex64::from_polar(cos_term, k * rho) * Complex64::new(1.0, 1.0 / (k * rho))
}

/// Convergence diagnostics for one amplitude evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeEstimate {
    pub gamma: Complex64,
    pub change: f64,
    pub levels: usize,
}

/// `Γ(k, r)` over all openings, refined until two successive panel doublings
/// agree to `quad.rel_tol`.
pub fn boundary_amplitude(
    aperture: &Aperture,
    incident: &SourceSpec,
    k: f64,
    r: Vec3,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    boundary_amplitude_estimate(aperture, incident, k, r, quad).map(|e| e.gamma)
}

pub fn boundary_amplitude_estimate(
    aperture: &Aperture,
    incident: &SourceSpec,
    k: f64,
    r: Vec3,
    quad: &QuadratureSpec,
) -> Result<AmplitudeEstimate> {
    let rule = GaussLegendre::new(quad.order)?;
    amplitude_with_rule(&rule, aperture, incident, k, r, quad)
}

fn amplitude_with_rule(
    rule: &GaussLegendre,
    aperture: &Aperture,
    incident: &SourceSpec,
    k: f64,
    r: Vec3,
    quad: &QuadratureSpec,
) -> Result<AmplitudeEstimate> {
    quad.validate()?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain(format!("wavenumber must be > 0, got {k}")));
    }
    if !r.is_finite() || !(r.z > 0.0) {
        return Err(Error::domain(format!(
            "observation point must lie on the z > 0 side, got {r:?}"
        )));
    }
    let prefactor = Complex64::new(0.0, k / (2.0 * TAU));
    let base: Vec<(usize, usize)> = aperture
        .openings
        .iter()
        .map(|o| base_panels(o, incident, k, r))
        .collect();

    let estimate = |scale: usize| -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (o, &(nx, ny)) in aperture.openings.iter().zip(&base) {
            total += rule.composite_rect(o.rect(), (nx * scale, ny * scale), |x, y| {
                let rp = Vec3::new(x, y, 0.0);
                let d = r - rp;
                incident.incident(k, rp) * kernel_unchecked(d, d.norm(), k)
            });
        }
        total * prefactor
    };

    let mut prev = estimate(1);
    let mut scale = 1;
    for level in 1..=quad.max_refinement {
        scale *= 2;
        let next = estimate(scale);
        let change = (next - prev).norm();
        if change <= quad.rel_tol * next.norm() {
            return Ok(AmplitudeEstimate {
                gamma: next,
                change,
                levels: level,
            });
        }
        if level == quad.max_refinement {
            return Err(Error::Convergence {
                levels: level,
                last: next.norm(),
                previous: prev.norm(),
            });
        }
        prev = next;
    }
    unreachable!("max_refinement >= 1 is validated")
}

/// Panels per axis so each base panel spans about one oscillation of the
/// integrand phase.
fn base_panels(o: &Opening, incident: &SourceSpec, k: f64, r: Vec3) -> (usize, usize) {
    let c = Vec3::new(o.center.0, o.center.1, 0.0);
    let d = r - c;
    let rho = d.norm();
    let (sx, sy) = incident.phase_slope(c);
    let per_axis = |slope: f64, hw: f64| {
        let linear = k * slope * 2.0 * hw;
        let curvature = k * hw * hw / rho;
        (((linear + curvature) / TAU).ceil() as usize).max(1)
    };
    (
        per_axis(d.x.abs() / rho + sx, o.half_width.0),
        per_axis(d.y.abs() / rho + sy, o.half_width.1),
    )
}

/// The δ-localized wavelet `e^{ik|R − c_p t|}` at time `t`.
///
/// `r_vec` is the vector `R` (the source sits at `−R`). At `t = 0` this is the
/// `e^{ikR}` prefactor of the emitted wavelet.
pub fn localized_wavelet(source: &SourceSpec, t: f64, k: f64, r_vec: Vec3) -> Complex64 {
    let d = r_vec - source.velocity * t;
    Complex64::from_polar(1.0, k * d.norm())
}

/// Normalized far-field intensity along a screen line.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldProfile {
    /// Screen coordinate of each node.
    pub x: Vec<f64>,
    /// Angle `atan(x/L)` of each node.
    pub theta: Vec<f64>,
    /// `|Γ|²` normalized to a peak of 1.
    pub intensity: Vec<f64>,
    /// Unnormalized peak `|Γ|²`.
    pub peak: f64,
    pub distance: f64,
    /// Set when `L` is not more than 100 opening widths.
    pub regime_warning: Option<String>,
}

/// `|Γ|²` on the line `y = 0, z = L`, sampled at the nodes of `screen`.
pub fn far_field_profile(
    aperture: &Aperture,
    incident: &SourceSpec,
    k: f64,
    screen: &Grid1D,
    distance: f64,
    quad: &QuadratureSpec,
) -> Result<FarFieldProfile> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::domain(format!("screen distance must be > 0, got {distance}")));
    }
    let rule = GaussLegendre::new(quad.order)?;
    let xs: Vec<f64> = screen.nodes().collect();
    let gammas: Vec<Complex64> = xs
        .par_iter()
        .map(|&x| {
            amplitude_with_rule(&rule, aperture, incident, k, Vec3::new(x, 0.0, distance), quad)
                .map(|e| e.gamma)
        })
        .collect::<Result<_>>()?;
    let raw: Vec<f64> = gammas.iter().map(|g| g.norm_sqr()).collect();
    let peak = raw.iter().cloned().fold(0.0, f64::max);
    let intensity = if peak > 0.0 { raw.iter().map(|v| v / peak).collect() } else { raw };
    let width = aperture.max_opening_width();
    let regime_warning = (distance <= 100.0 * width).then(|| {
        format!(
            "screen distance {distance} is not beyond 100 x opening width {width}; \
             the Fraunhofer regime is not guaranteed"
        )
    });
    Ok(FarFieldProfile {
        theta: xs.iter().map(|x| (x / distance).atan()).collect(),
        x: xs,
        intensity,
        peak,
        distance,
        regime_warning,
    })
}
