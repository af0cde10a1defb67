use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1-D grid. Node `i` sits at `origin + i·spacing`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    origin: f64,
    spacing: f64,
    count: usize,
}

impl Grid1D {
    pub fn new(origin: f64, spacing: f64, count: usize) -> Result<Self> {
        if !origin.is_finite() {
            return Err(Error::domain(format!("grid origin must be finite, got {origin}")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::domain(format!("grid spacing must be > 0, got {spacing}")));
        }
        if count == 0 {
            return Err(Error::domain("grid needs at least one node"));
        }
        Ok(Self {
            origin,
            spacing,
            count,
        })
    }

    /// `count` nodes from `start` to `end` inclusive.
    pub fn from_range(start: f64, end: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::domain("a ranged grid needs at least two nodes"));
        }
        if !(end > start) {
            return Err(Error::domain(format!("grid range is empty: [{start}, {end}]")));
        }
        Self::new(start, (end - start) / (count - 1) as f64, count)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn node(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn last(&self) -> f64 {
        self.node(self.count - 1)
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.node(i))
    }

    pub(crate) fn require_stencil(&self) -> Result<()> {
        if self.count < 3 {
            Err(Error::domain(format!(
                "finite differences need at least 3 nodes, grid has {}",
                self.count
            )))
        } else {
            Ok(())
        }
    }
}

/// Tensor-product grid; values are stored row-major with `x` varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Self { x, y }
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.x.len() + ix
    }
}

pub trait GridShape {
    fn node_count(&self) -> usize;
}

impl GridShape for Grid1D {
    fn node_count(&self) -> usize {
        self.len()
    }
}

impl GridShape for Grid2D {
    fn node_count(&self) -> usize {
        self.len()
    }
}

/// Values sampled on every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<G, T> {
    grid: G,
    values: Vec<T>,
}

pub type RealField<G = Grid1D> = Field<G, f64>;
pub type ComplexField<G = Grid1D> = Field<G, Complex64>;

impl<G: GridShape, T> Field<G, T> {
    pub fn new(grid: G, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::domain(format!(
                "field has {} values for {} grid nodes",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

impl<T> Field<Grid1D, T> {
    pub fn from_fn(grid: Grid1D, f: impl FnMut(f64) -> T) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }
}

impl<T> Field<Grid2D, T> {
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> T) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for y in grid.y.nodes() {
            for x in grid.x.nodes() {
                values.push(f(x, y));
            }
        }
        Self { grid, values }
    }
}
