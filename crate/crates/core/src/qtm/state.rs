//! Analytic wavefunctions for the transverse guidance problem.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// `ψ` and the derivatives needed by the polar decomposition, the quantum
/// potential and its gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub psi: Complex64,
    pub dx: Complex64,
    pub dxx: Complex64,
    pub dxxx: Complex64,
    pub dt: Complex64,
}

impl std::ops::Add for Derivatives {
    type Output = Derivatives;
    fn add(self, o: Derivatives) -> Derivatives {
        Derivatives {
            psi: self.psi + o.psi,
            dx: self.dx + o.dx,
            dxx: self.dxx + o.dxx,
            dxxx: self.dxxx + o.dxxx,
            dt: self.dt + o.dt,
        }
    }
}

impl std::ops::Mul<Complex64> for Derivatives {
    type Output = Derivatives;
    fn mul(self, c: Complex64) -> Derivatives {
        Derivatives {
            psi: self.psi * c,
            dx: self.dx * c,
            dxx: self.dxx * c,
            dxxx: self.dxxx * c,
            dt: self.dt * c,
        }
    }
}

/// A 1-D wavefunction `ψ(x, t)` with analytic derivatives.
///
/// Implementors are immutable; nothing computed from them can feed back into
/// the wave.
pub trait WaveFunction: Sync {
    fn hbar(&self) -> f64;
    fn mass(&self) -> f64;
    fn derivatives(&self, x: f64, t: f64) -> Derivatives;

    fn psi(&self, x: f64, t: f64) -> Complex64 {
        self.derivatives(x, t).psi
    }

    /// Global maximum of `|ψ|`, the reference for the node threshold.
    fn amplitude_scale(&self) -> f64;

    /// `|ψ|` at or below this counts as a node.
    fn node_threshold(&self) -> f64 {
        NODE_FRACTION * self.amplitude_scale()
    }
}

/// Node threshold as a fraction of the global amplitude maximum.
pub const NODE_FRACTION: f64 = 1e-12;

/// Cumulative distribution of the initial density `|ψ(x, 0)|²`.
pub trait InitialDensity {
    fn initial_cdf(&self, x: f64) -> f64;
    /// An interval outside of which the initial density is negligible.
    fn initial_support(&self) -> (f64, f64);
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Freely spreading Gaussian `G(ξ, t) = (2π s_t²)^{-1/4} exp(−ξ²/(4σ₀ s_t))`,
/// `s_t = σ₀(1 + iħt/(2mσ₀²))`; `|G(ξ, 0)|²` is a unit normal density of width σ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
struct GaussianKernel {
    sigma0: f64,
    hbar: f64,
    mass: f64,
}

impl GaussianKernel {
    fn eval(&self, xi: f64, t: f64) -> Derivatives {
        let s0 = self.sigma0;
        let s_dot = Complex64::new(0.0, self.hbar / (2.0 * self.mass * s0));
        let s = Complex64::new(s0, 0.0) + s_dot * t;
        let g = (2.0 * PI).powf(-0.25) / s.sqrt() * (-(xi * xi) / (4.0 * s0 * s)).exp();
        let c = 1.0 / (2.0 * s0 * s);
        let a = -xi * c;
        let a2 = a * a;
        Derivatives {
            psi: g,
            dx: a * g,
            dxx: (a2 - c) * g,
            dxxx: (a2 * a - 3.0 * a * c) * g,
            dt: s_dot / s * (xi * xi / (4.0 * s0 * s) - 0.5) * g,
        }
    }

    /// `σ_t = σ₀ √(1 + (ħt/(2mσ₀²))²)`.
    fn width(&self, t: f64) -> f64 {
        let tau = self.hbar * t / (2.0 * self.mass * self.sigma0 * self.sigma0);
        self.sigma0 * (1.0 + tau * tau).sqrt()
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be > 0, got {v}")))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("time must be >= 0, got {t}")))
    }
}

/// Geometry of the two-Gaussian-slit interferometer. Longitudinal motion is
/// parametric: the screen at distance `L` is reached at `t = L/v_long`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSlitSetup {
    /// Slit half-separation `Y`; slits sit at `x = ±Y`.
    pub half_separation: f64,
    /// Gaussian slit width `σ₀`.
    pub sigma0: f64,
    pub v_long: f64,
    pub screen_distance: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for TwoSlitSetup {
    fn default() -> Self {
        Self {
            half_separation: 5.0,
            sigma0: 1.0,
            v_long: 1.0,
            screen_distance: 40.0,
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl TwoSlitSetup {
    pub fn validate(&self) -> Result<()> {
        check_positive("slit half-separation", self.half_separation)?;
        check_positive("sigma0", self.sigma0)?;
        check_positive("v_long", self.v_long)?;
        check_positive("screen distance", self.screen_distance)?;
        check_positive("hbar", self.hbar)?;
        check_positive("mass", self.mass)
    }

    pub fn screen_time(&self) -> f64 {
        self.screen_distance / self.v_long
    }

    /// Set when the slits are not resolved (`Y/σ₀ ≤ 1`).
    pub fn regime_warning(&self) -> Option<String> {
        (self.half_separation / self.sigma0 <= 1.0).then(|| {
            format!(
                "slits overlap: Y/sigma0 = {} <= 1",
                self.half_separation / self.sigma0
            )
        })
    }
}

/// `ψ(x, t) = N [G(x − Y, t) + G(x + Y, t)]` with `∫|ψ|² dx = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSlitState {
    setup: TwoSlitSetup,
    kernel: GaussianKernel,
    normalization: f64,
    amplitude_scale: f64,
}

impl TwoSlitState {
    pub fn new(setup: TwoSlitSetup) -> Result<Self> {
        setup.validate()?;
        let kernel = GaussianKernel {
            sigma0: setup.sigma0,
            hbar: setup.hbar,
            mass: setup.mass,
        };
        let normalization = (2.0 * (1.0 + overlap(&setup))).powf(-0.5);
        let mut state = Self {
            setup,
            kernel,
            normalization,
            amplitude_scale: 0.0,
        };
        // |ψ(·, 0)| is real and peaks at or between the slits.
        let y = setup.half_separation;
        let n = 4001;
        state.amplitude_scale = (0..n)
            .map(|i| -y - setup.sigma0 + (2.0 * (y + setup.sigma0)) * i as f64 / (n - 1) as f64)
            .map(|x| state.raw(x, 0.0).psi.norm())
            .fold(0.0, f64::max);
        Ok(state)
    }

    pub fn setup(&self) -> &TwoSlitSetup {
        &self.setup
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn screen_time(&self) -> f64 {
        self.setup.screen_time()
    }

    /// Width `σ_t` of each spreading slit packet.
    pub fn packet_width(&self, t: f64) -> f64 {
        self.kernel.width(t)
    }

    /// Checked evaluation; `t < 0` is outside the post-slit domain.
    pub fn wavefunction(&self, x: f64, t: f64) -> Result<Complex64> {
        check_time(t)?;
        Ok(self.psi(x, t))
    }

    fn raw(&self, x: f64, t: f64) -> Derivatives {
        let y = self.setup.half_separation;
        (self.kernel.eval(x - y, t) + self.kernel.eval(x + y, t))
            * Complex64::new(self.normalization, 0.0)
    }
}

/// `e^{−Y²/(2σ₀²)}`, the overlap of the two slit densities.
fn overlap(setup: &TwoSlitSetup) -> f64 {
    (-(setup.half_separation * setup.half_separation)
        / (2.0 * setup.sigma0 * setup.sigma0))
        .exp()
}

impl WaveFunction for TwoSlitState {
    fn hbar(&self) -> f64 {
        self.setup.hbar
    }

    fn mass(&self) -> f64 {
        self.setup.mass
    }

    fn derivatives(&self, x: f64, t: f64) -> Derivatives {
        self.raw(x, t)
    }

    fn amplitude_scale(&self) -> f64 {
        self.amplitude_scale
    }
}

impl InitialDensity for TwoSlitState {
    fn initial_cdf(&self, x: f64) -> f64 {
        let (y, s) = (self.setup.half_separation, self.setup.sigma0);
        let n2 = self.normalization * self.normalization;
        n2 * (std_normal_cdf((x - y) / s)
            + std_normal_cdf((x + y) / s)
            + 2.0 * overlap(&self.setup) * std_normal_cdf(x / s))
    }

    fn initial_support(&self) -> (f64, f64) {
        let w = self.setup.half_separation + 12.0 * self.setup.sigma0;
        (-w, w)
    }
}

/// A single freely spreading Gaussian packet centered at `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPacket {
    center: f64,
    kernel: GaussianKernel,
}

impl GaussianPacket {
    pub fn new(center: f64, sigma0: f64, hbar: f64, mass: f64) -> Result<Self> {
        check_positive("sigma0", sigma0)?;
        check_positive("hbar", hbar)?;
        check_positive("mass", mass)?;
        if !center.is_finite() {
            return Err(Error::domain("center must be finite"));
        }
        Ok(Self {
            center,
            kernel: GaussianKernel { sigma0, hbar, mass },
        })
    }

    pub fn width(&self, t: f64) -> f64 {
        self.kernel.width(t)
    }

    pub fn sigma0(&self) -> f64 {
        self.kernel.sigma0
    }
}

impl WaveFunction for GaussianPacket {
    fn hbar(&self) -> f64 {
        self.kernel.hbar
    }

    fn mass(&self) -> f64 {
        self.kernel.mass
    }

    fn derivatives(&self, x: f64, t: f64) -> Derivatives {
        self.kernel.eval(x - self.center, t)
    }

    fn amplitude_scale(&self) -> f64 {
        (2.0 * PI * self.kernel.sigma0 * self.kernel.sigma0).powf(-0.25)
    }
}

impl InitialDensity for GaussianPacket {
    fn initial_cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - self.center) / self.kernel.sigma0)
    }

    fn initial_support(&self) -> (f64, f64) {
        let w = 12.0 * self.kernel.sigma0;
        (self.center - w, self.center + w)
    }
}

/// Plane wave `A e^{i(kx − ħk²t/(2m))}`: constant amplitude, so no quantum
/// potential and straight-line guidance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub amplitude: f64,
    pub k: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl PlaneWave {
    pub fn new(k: f64) -> Self {
        Self {
            amplitude: 1.0,
            k,
            hbar: 1.0,
            mass: 1.0,
        }
    }

    pub fn omega(&self) -> f64 {
        self.hbar * self.k * self.k / (2.0 * self.mass)
    }
}

impl WaveFunction for PlaneWave {
    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn derivatives(&self, x: f64, t: f64) -> Derivatives {
        let psi = Complex64::from_polar(self.amplitude, self.k * x - self.omega() * t);
        let ik = Complex64::new(0.0, self.k);
        Derivatives {
            psi,
            dx: ik * psi,
            dxx: ik * ik * psi,
            dxxx: ik * ik * ik * psi,
            dt: Complex64::new(0.0, -self.omega()) * psi,
        }
    }

    fn amplitude_scale(&self) -> f64 {
        self.amplitude
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::GaussLegendre;

    fn state() -> TwoSlitState {
        TwoSlitState::new(TwoSlitSetup::default()).unwrap()
    }

    #[test]
    fn symmetric_in_x_bitwise() {
        let s = state();
        for (x, t) in [(0.3, 0.0), (4.9, 1.7), (12.25, 33.0), (-7.0, 0.01)] {
            assert_eq!(s.psi(x, t), s.psi(-x, t));
            let (a, b) = (s.derivatives(x, t), s.derivatives(-x, t));
            assert_eq!(a.dx, -b.dx);
            assert_eq!(a.dxx, b.dxx);
        }
    }

    #[test]
    fn unit_norm_at_start_and_later() {
        let rule = GaussLegendre::new(20).unwrap();
        for setup in [
            TwoSlitSetup::default(),
            TwoSlitSetup { half_separation: 0.8, ..Default::default() },
        ] {
            let s = TwoSlitState::new(setup).unwrap();
            for t in [0.0, 10.0] {
                let w = 40.0 + 3.0 * s.packet_width(t);
                let n = rule.composite(-w, w, 400, |x| s.psi(x, t).norm_sqr());
                assert!((n - 1.0).abs() < 1e-10, "t = {t}: {n}");
            }
            // Gaussian-overlap closed form before scaling.
            let unscaled = 1.0 / (s.normalization() * s.normalization());
            assert!((unscaled - 2.0 * (1.0 + overlap(&setup))).abs() < 1e-15);
        }
    }

    #[test]
    fn widely_separated_slits_reduce_to_single_gaussian() {
        let setup = TwoSlitSetup { half_separation: 60.0, ..Default::default() };
        assert!(overlap(&setup) < 1e-300);
        let s = TwoSlitState::new(setup).unwrap();
        let peak = s.psi(60.0, 0.0).norm_sqr();
        // Each slit carries half the probability of a unit normal density.
        let single = 0.5 / (2.0 * PI).sqrt();
        assert!((peak - single).abs() < 1e-15);
    }

    #[test]
    fn time_derivative_satisfies_free_schrodinger() {
        let s = state();
        for (x, t) in [(0.5, 0.0), (3.0, 2.0), (-8.0, 25.0)] {
            let d = s.derivatives(x, t);
            let rhs = Complex64::new(0.0, 0.5) * d.dxx;
            assert!((d.dt - rhs).norm() < 1e-14 * (1.0 + d.dt.norm()));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = state();
        let h = 1e-4;
        for (x, t) in [(1.3, 0.4), (5.5, 7.0)] {
            let d = s.derivatives(x, t);
            let c = |f: &dyn Fn(f64) -> Complex64| (f(x + h) - f(x - h)) / (2.0 * h);
            let dx_fd = c(&|x| s.derivatives(x, t).psi);
            let dxx_fd = c(&|x| s.derivatives(x, t).dx);
            let dxxx_fd = c(&|x| s.derivatives(x, t).dxx);
            let dt_fd = (s.psi(x, t + h) - s.psi(x, t - h)) / (2.0 * h);
            assert!((d.dx - dx_fd).norm() < 1e-8);
            assert!((d.dxx - dxx_fd).norm() < 1e-8);
            assert!((d.dxxx - dxxx_fd).norm() < 1e-8);
            assert!((d.dt - dt_fd).norm() < 1e-8);
        }
    }

    #[test]
    fn initial_cdf_is_a_distribution() {
        let s = state();
        let (lo, hi) = s.initial_support();
        assert!(s.initial_cdf(lo) < 1e-30);
        assert!((s.initial_cdf(hi) - 1.0).abs() < 1e-15);
        assert!((s.initial_cdf(0.0) - 0.5).abs() < 1e-15);
        // Density check against the wavefunction.
        let h = 1e-5;
        for x in [-5.0, -1.0, 2.5] {
            let dens = (s.initial_cdf(x + h) - s.initial_cdf(x - h)) / (2.0 * h);
            assert!((dens - s.psi(x, 0.0).norm_sqr()).abs() < 1e-9);
        }
    }

    #[test]
    fn negative_time_is_rejected() {
        assert!(matches!(state().wavefunction(0.0, -1.0), Err(Error::Domain(_))));
        assert!(TwoSlitState::new(TwoSlitSetup { sigma0: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn regime_warning_for_unresolved_slits() {
        assert!(TwoSlitSetup::default().regime_warning().is_none());
        let s = TwoSlitSetup { half_separation: 0.5, ..Default::default() };
        assert!(s.regime_warning().is_some());
    }
}
