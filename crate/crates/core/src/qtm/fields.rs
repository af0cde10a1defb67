//! Polar decomposition `ψ = R e^{iS/ħ}` and the quantities derived from it:
//! guidance velocity, quantum potential, quantum force and the residuals of
//! the quantum Hamilton–Jacobi and continuity equations.
//!
//! With `a = ψ_x/ψ`, `b = ψ_xx/ψ`, `c = ψ_xxx/ψ`:
//!
//! * `∂S/∂x = ħ Im a`, `∂S/∂t = ħ Im(ψ_t/ψ)`
//! * `R''/R = Re(b − a²) + (Re a)²`
//! * `(R''/R)' = Re(c − 3ab + 2a³) + 2 Re a · Re(b − a²)`
//!
//! The sign convention is `Q = −ħ²/(2m) · R''/R`, so that
//! `−∂S/∂t = V + (∂S/∂x)²/(2m) + Q`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::state::{Derivatives, WaveFunction};
use crate::error::{Error, Result};
use crate::physics::{laplacian, Grid1D, Grid2D};

fn checked<W: WaveFunction + ?Sized>(w: &W, x: f64, t: f64) -> Result<Derivatives> {
    let d = w.derivatives(x, t);
    let amplitude = d.psi.norm();
    if !(amplitude > w.node_threshold()) {
        return Err(Error::Node { x, t, amplitude });
    }
    Ok(d)
}

/// Amplitude and action at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    pub r: f64,
    pub s: f64,
}

impl Polar {
    pub fn reconstruct(&self, hbar: f64) -> Complex64 {
        Complex64::from_polar(self.r, self.s / hbar)
    }
}

/// `R = |ψ|`, `S = ħ arg ψ` on the principal branch.
pub fn polar_decompose<W: WaveFunction + ?Sized>(w: &W, x: f64, t: f64) -> Result<Polar> {
    let d = checked(w, x, t)?;
    Ok(Polar {
        r: d.psi.norm(),
        s: w.hbar() * d.psi.arg(),
    })
}

/// Keeps `S` continuous along a sequence of evaluation points by choosing the
/// branch closest to the previous value.
#[derive(Debug, Clone, Default)]
pub struct PhaseTracker {
    last: Option<f64>,
}

impl PhaseTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn decompose<W: WaveFunction + ?Sized>(&mut self, w: &W, x: f64, t: f64) -> Result<Polar> {
        let mut p = polar_decompose(w, x, t)?;
        if let Some(last) = self.last {
            let period = 2.0 * PI * w.hbar();
            p.s += period * ((last - p.s) / period).round();
        }
        self.last = Some(p.s);
        Ok(p)
    }
}

/// Guidance velocity `v = (ħ/m) Im(ψ_x/ψ) = (1/m) ∂S/∂x`.
pub fn velocity<W: WaveFunction + ?Sized>(w: &W, x: f64, t: f64) -> Result<f64> {
    let d = checked(w, x, t)?;
    Ok(w.hbar() / w.mass() * (d.dx / d.psi).im)
}

fn log_derivatives(d: &Derivatives) -> (Complex64, Complex64, Complex64) {
    let a = d.dx / d.psi;
    let b = d.dxx / d.psi;
    let c = d.dxxx / d.psi;
    (a, b, c)
}

fn r_curvature(a: Complex64, b: Complex64) -> f64 {
    (b - a * a).re + a.re * a.re
}

/// `Q = −ħ²/(2m) · R''/R` from analytic derivatives.
pub fn quantum_potential<W: WaveFunction + ?Sized>(w: &W, x: f64, t: f64) -> Result<f64> {
    let d = checked(w, x, t)?;
    let (a, b, _) = log_derivatives(&d);
    Ok(-w.hbar() * w.hbar() / (2.0 * w.mass()) * r_curvature(a, b))
}

/// Quantum force `−∂Q/∂x`; divided by `m` it is the acceleration along a
/// trajectory.
pub fn quantum_force<W: WaveFunction + ?Sized>(w: &W, x: f64, t: f64) -> Result<f64> {
    let d = checked(w, x, t)?;
    let (a, b, c) = log_derivatives(&d);
    let l2 = b - a * a;
    let l3 = c - 3.0 * a * b + 2.0 * a * a * a;
    let dcurv = l3.re + 2.0 * a.re * l2.re;
    Ok(w.hbar() * w.hbar() / (2.0 * w.mass()) * dcurv)
}

/// `∂S/∂t + (∂S/∂x)²/(2m) + Q` with `V = 0`, from analytic derivatives.
pub fn hamilton_jacobi_residual<W: WaveFunction + ?Sized>(w: &W, x: f64, t: f64) -> Result<f64> {
    let d = checked(w, x, t)?;
    let (hbar, m) = (w.hbar(), w.mass());
    let (a, b, _) = log_derivatives(&d);
    let s_t = hbar * (d.dt / d.psi).im;
    let s_x = hbar * a.im;
    let q = -hbar * hbar / (2.0 * m) * r_curvature(a, b);
    Ok(s_t + s_x * s_x / (2.0 * m) + q)
}

/// Finite-difference version of [`hamilton_jacobi_residual`] with step `h` in
/// both `x` and `t`. Phase differences are taken as `arg(ψ₁/ψ₀)`, which is
/// branch-free for small steps; `R''` comes from the grid Laplacian. Near
/// `t = 0` a one-sided time stencil keeps all evaluations at `t ≥ 0`.
pub fn hamilton_jacobi_residual_fd<W: WaveFunction + ?Sized>(
    w: &W,
    x: f64,
    t: f64,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain("finite-difference step must be > 0"));
    }
    let (hbar, m) = (w.hbar(), w.mass());
    let psi = |x: f64, t: f64| checked(w, x, t).map(|d| d.psi);
    let p0 = psi(x, t)?;
    let s_t = if t >= h {
        hbar * (psi(x, t + h)? / psi(x, t - h)?).arg() / (2.0 * h)
    } else {
        let p1 = psi(x, t + h)?;
        let p2 = psi(x, t + 2.0 * h)?;
        hbar * (4.0 * (p1 / p0).arg() - (p2 / p0).arg()) / (2.0 * h)
    };
    let (pl, pr) = (psi(x - h, t)?, psi(x + h, t)?);
    let s_x = hbar * (pr / pl).arg() / (2.0 * h);
    let grid = Grid1D::new(x - h, h, 3)?;
    let lap = laplacian(&grid, &[pl.norm(), p0.norm(), pr.norm()])?;
    let q = -hbar * hbar / (2.0 * m) * lap[1] / p0.norm();
    Ok(s_t + s_x * s_x / (2.0 * m) + q)
}

/// `Q` on a grid from the finite-difference Laplacian of `R`; `None` at nodes.
pub fn quantum_potential_fd<W: WaveFunction + ?Sized>(
    w: &W,
    grid: &Grid1D,
    t: f64,
) -> Result<Vec<Option<f64>>> {
    let r: Vec<f64> = grid.nodes().map(|x| w.psi(x, t).norm()).collect();
    let lap = laplacian(grid, &r)?;
    let pref = -w.hbar() * w.hbar() / (2.0 * w.mass());
    let eps = w.node_threshold();
    Ok(r
        .iter()
        .zip(&lap)
        .map(|(&r, &l)| (r > eps).then(|| pref * l / r))
        .collect())
}

/// `∂(R²)/∂t + ∂(R² v)/∂x` at each grid node from analytic derivatives:
/// `2 Re(ψ̄ ψ_t) + (ħ/m) Im(ψ̄ ψ_xx)`. Node cells are `None`.
pub fn continuity_residual<W: WaveFunction + ?Sized>(w: &W, grid: &Grid1D, t: f64) -> Vec<Option<f64>> {
    let coef = w.hbar() / w.mass();
    grid.nodes()
        .map(|x| {
            checked(w, x, t).ok().map(|d| {
                let pc = d.psi.conj();
                2.0 * (pc * d.dt).re + coef * (pc * d.dxx).im
            })
        })
        .collect()
}

/// Sampled quantum potential over `(x, t)`; masked cells hold `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPotentialField {
    /// `grid.x` is the transverse coordinate, `grid.y` is time.
    pub grid: Grid2D,
    pub values: Vec<Option<f64>>,
}

impl QuantumPotentialField {
    pub fn masked_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn row(&self, it: usize) -> &[Option<f64>] {
        let nx = self.grid.x.len();
        &self.values[it * nx..(it + 1) * nx]
    }
}

/// `Q(x, t)` on a tensor grid, rows in time, evaluated in parallel.
pub fn quantum_potential_surface<W: WaveFunction + ?Sized>(
    w: &W,
    x_grid: &Grid1D,
    t_grid: &Grid1D,
) -> QuantumPotentialField {
    let grid = Grid2D::new(*x_grid, *t_grid);
    let xs: Vec<f64> = x_grid.nodes().collect();
    let values = t_grid
        .nodes()
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map_iter(|&t| {
            xs.iter()
                .map(move |&x| quantum_potential(w, x, t).ok())
                .collect::<Vec<_>>()
        })
        .collect();
    QuantumPotentialField { grid, values }
}
