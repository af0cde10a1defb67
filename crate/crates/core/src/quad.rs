//! Gauss–Legendre quadrature: fixed rules, composite panels and
//! refinement-to-tolerance over intervals and rectangles.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values a quadrature can accumulate.
pub trait Quadrable: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Quadrable for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Quadrable for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::domain(format!("Gauss-Legendre order must be >= 2, got {order}")));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Single-panel rule on `[a, b]`.
    pub fn integrate<T: Quadrable>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> T {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * w;
        }
        acc * half
    }

    /// Composite rule with `panels` equal panels on `[a, b]`.
    pub fn composite<T: Quadrable>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> T,
    ) -> T {
        let width = (b - a) / panels as f64;
        let mut acc = T::zero();
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let hi = if p + 1 == panels { b } else { lo + width };
            acc = acc + self.integrate(lo, hi, &mut f);
        }
        acc
    }

    /// Tensor-product composite rule over `rect` with `panels` per axis.
    pub fn composite_rect<T: Quadrable>(
        &self,
        rect: Rect,
        panels: (usize, usize),
        mut f: impl FnMut(f64, f64) -> T,
    ) -> T {
        let wx = (rect.x1 - rect.x0) / panels.0 as f64;
        let wy = (rect.y1 - rect.y0) / panels.1 as f64;
        let n = self.order();
        let mut acc = T::zero();
        for py in 0..panels.1 {
            let ym = rect.y0 + (py as f64 + 0.5) * wy;
            for px in 0..panels.0 {
                let xm = rect.x0 + (px as f64 + 0.5) * wx;
                let mut panel = T::zero();
                for j in 0..n {
                    let y = ym + 0.5 * wy * self.nodes[j];
                    let mut row = T::zero();
                    for i in 0..n {
                        let x = xm + 0.5 * wx * self.nodes[i];
                        row = row + f(x, y) * self.weights[i];
                    }
                    panel = panel + row * self.weights[j];
                }
                acc = acc + panel;
            }
        }
        acc * (0.25 * wx * wy)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Axis-aligned integration domain `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// Result of a refinement loop that met its tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converged<T> {
    pub value: T,
    /// `|I_n − I_{n−1}|` at the accepting level.
    pub change: f64,
    /// Refinement levels used (0 = the initial panel count sufficed on the first comparison).
    pub levels: usize,
}

/// Settings for [`refine_rect`] / [`refine_interval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub max_refinement: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// Doubles the panel count per axis until two successive estimates agree to
/// `rel_tol·|I| + abs_tol`.
pub fn refine_rect<T: Quadrable>(
    rule: &GaussLegendre,
    rect: Rect,
    base_panels: (usize, usize),
    settings: Refinement,
    mut f: impl FnMut(f64, f64) -> T,
) -> Result<Converged<T>> {
    let mut panels = base_panels;
    let mut prev = rule.composite_rect(rect, panels, &mut f);
    for level in 0..settings.max_refinement {
        panels = (panels.0 * 2, panels.1 * 2);
        let next = rule.composite_rect(rect, panels, &mut f);
        let change = (next + prev * -1.0).magnitude();
        if change <= settings.rel_tol * next.magnitude() + settings.abs_tol {
            return Ok(Converged {
                value: next,
                change,
                levels: level + 1,
            });
        }
        if level + 1 == settings.max_refinement {
            return Err(Error::Convergence {
                levels: settings.max_refinement,
                last: next.magnitude(),
                previous: prev.magnitude(),
            });
        }
        prev = next;
    }
    Err(Error::Convergence {
        levels: 0,
        last: prev.magnitude(),
        previous: f64::NAN,
    })
}

/// 1-D counterpart of [`refine_rect`].
pub fn refine_interval<T: Quadrable>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    base_panels: usize,
    settings: Refinement,
    mut f: impl FnMut(f64) -> T,
) -> Result<Converged<T>> {
    let mut panels = base_panels.max(1);
    let mut prev = rule.composite(a, b, panels, &mut f);
    for level in 0..settings.max_refinement {
        panels *= 2;
        let next = rule.composite(a, b, panels, &mut f);
        let change = (next + prev * -1.0).magnitude();
        if change <= settings.rel_tol * next.magnitude() + settings.abs_tol {
            return Ok(Converged {
                value: next,
                change,
                levels: level + 1,
            });
        }
        if level + 1 == settings.max_refinement {
            return Err(Error::Convergence {
                levels: settings.max_refinement,
                last: next.magnitude(),
                previous: prev.magnitude(),
            });
        }
        prev = next;
    }
    Err(Error::Convergence {
        levels: 0,
        last: prev.magnitude(),
        previous: f64::NAN,
    })
}
