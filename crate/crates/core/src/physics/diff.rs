//! Second-order finite differences on uniform grids.
//!
//! Interior nodes use central stencils; boundary nodes use one-sided
//! second-order stencils, so the global error is `O(h²)` everywhere.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::grid::{Grid1D, Grid2D};
use crate::error::{Error, Result};

/// Scalars the difference stencils can act on.
pub trait Differentiable:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl Differentiable for f64 {}
impl Differentiable for Complex64 {}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::domain(format!(
            "field has {got} values for {expected} grid nodes"
        )));
    }
    Ok(())
}

fn gradient_strided<T: Differentiable>(v: &[T], n: usize, stride: usize, offset: usize, h: f64) -> Vec<T> {
    let at = |i: usize| v[offset + i * stride];
    let inv2h = 0.5 / h;
    (0..n)
        .map(|i| {
            if i == 0 {
                (at(1) * 4.0 - at(0) * 3.0 - at(2)) * inv2h
            } else if i == n - 1 {
                (at(n - 1) * 3.0 - at(n - 2) * 4.0 + at(n - 3)) * inv2h
            } else {
                (at(i + 1) - at(i - 1)) * inv2h
            }
        })
        .collect()
}

fn second_strided<T: Differentiable>(v: &[T], n: usize, stride: usize, offset: usize, h: f64) -> Vec<T> {
    let at = |i: usize| v[offset + i * stride];
    let inv_h2 = 1.0 / (h * h);
    (0..n)
        .map(|i| {
            let interior = |i: usize| (at(i + 1) + at(i - 1) - at(i) * 2.0) * inv_h2;
            if n == 3 {
                // Only one stencil fits; exact for quadratics.
                interior(1)
            } else if i == 0 {
                (at(0) * 2.0 - at(1) * 5.0 + at(2) * 4.0 - at(3)) * inv_h2
            } else if i == n - 1 {
                (at(n - 1) * 2.0 - at(n - 2) * 5.0 + at(n - 3) * 4.0 - at(n - 4)) * inv_h2
            } else {
                interior(i)
            }
        })
        .collect()
}

/// First derivative of samples on a 1-D grid.
pub fn gradient<T: Differentiable>(grid: &Grid1D, values: &[T]) -> Result<Vec<T>> {
    grid.require_stencil()?;
    check_len(grid.len(), values.len())?;
    Ok(gradient_strided(values, grid.len(), 1, 0, grid.spacing()))
}

/// Second derivative of samples on a 1-D grid.
pub fn laplacian<T: Differentiable>(grid: &Grid1D, values: &[T]) -> Result<Vec<T>> {
    grid.require_stencil()?;
    check_len(grid.len(), values.len())?;
    Ok(second_strided(values, grid.len(), 1, 0, grid.spacing()))
}

/// Partial derivatives `(∂/∂x, ∂/∂y)` of row-major samples on a 2-D grid.
pub fn gradient_2d<T: Differentiable>(grid: &Grid2D, values: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    grid.x.require_stencil()?;
    grid.y.require_stencil()?;
    check_len(grid.len(), values.len())?;
    let (nx, ny) = (grid.x.len(), grid.y.len());
    let mut dx = Vec::with_capacity(values.len());
    for row in 0..ny {
        dx.extend(gradient_strided(values, nx, 1, row * nx, grid.x.spacing()));
    }
    let mut dy = dx.clone();
    for col in 0..nx {
        for (row, d) in gradient_strided(values, ny, nx, col, grid.y.spacing())
            .into_iter()
            .enumerate()
        {
            dy[row * nx + col] = d;
        }
    }
    Ok((dx, dy))
}

/// `∂²/∂x² + ∂²/∂y²` of row-major samples on a 2-D grid.
pub fn laplacian_2d<T: Differentiable>(grid: &Grid2D, values: &[T]) -> Result<Vec<T>> {
    grid.x.require_stencil()?;
    grid.y.require_stencil()?;
    check_len(grid.len(), values.len())?;
    let (nx, ny) = (grid.x.len(), grid.y.len());
    let mut out = Vec::with_capacity(values.len());
    for row in 0..ny {
        out.extend(second_strided(values, nx, 1, row * nx, grid.x.spacing()));
    }
    for col in 0..nx {
        for (row, d) in second_strided(values, ny, nx, col, grid.y.spacing())
            .into_iter()
            .enumerate()
        {
            out[row * nx + col] = out[row * nx + col] + d;
        }
    }
    Ok(out)
}
