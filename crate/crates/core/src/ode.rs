//! Dormand–Prince 5(4) for scalar ODEs `y' = f(t, y)`, with step-size control
//! and the classic fourth-order continuous extension for dense output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and limits for [`Dopri5::integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Steps below `min_step_fraction · |t1 − t0|` abort with [`Error::StepUnderflow`].
    pub min_step_fraction: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-9,
            min_step_fraction: 1e-15,
            max_steps: 1_000_000,
        }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub t0: f64,
    pub t1: f64,
    pub y0: f64,
    pub y1: f64,
    /// Derivative at `t0`.
    pub dy0: f64,
    /// Derivative at `t1`.
    pub dy1: f64,
    cont: [f64; 5],
}

impl DenseStep {
    /// Interpolated solution for `t` in `[t0, t1]`.
    pub fn eval(&self, t: f64) -> f64 {
        if t == self.t1 {
            return self.y1;
        }
        let theta = (t - self.t0) / (self.t1 - self.t0);
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = self.cont;
        r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl Dopri5 {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }

    /// Integrates from `(t0, y0)` to `t1 > t0`, calling `on_step` after every
    /// accepted step. The final step lands on `t1` exactly.
    pub fn integrate(
        &self,
        mut f: impl FnMut(f64, f64) -> Result<f64>,
        t0: f64,
        t1: f64,
        y0: f64,
        mut on_step: impl FnMut(&DenseStep),
    ) -> Result<(f64, Stats)> {
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::domain(format!("invalid time span [{t0}, {t1}]")));
        }
        if !(self.rtol > 0.0 && self.atol >= 0.0) {
            return Err(Error::domain("tolerances must be positive"));
        }
        let span = t1 - t0;
        let h_min = self.min_step_fraction * span;
        let mut stats = Stats {
            accepted: 0,
            rejected: 0,
            evaluations: 0,
        };

        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, y)?;
        stats.evaluations += 1;
        let mut h = self.initial_step(&mut f, t, y, k1, span, &mut stats)?;

        while t < t1 {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::StepUnderflow { t, dt: h });
            }
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }
            if h < h_min {
                return Err(Error::StepUnderflow { t, dt: h });
            }

            let k2 = f(t + C2 * h, y + h * A21 * k1)?;
            let k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2))?;
            let k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
            let k5 = f(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
            let k6 = f(
                t + h,
                y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
            )?;
            let y_new = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
            let t_new = if last { t1 } else { t + h };
            let k7 = f(t_new, y_new)?;
            stats.evaluations += 6;

            let err_est = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
            let scale = self.atol + self.rtol * y.abs().max(y_new.abs());
            let err = (err_est / scale).abs();
            let err = if err.is_nan() { f64::INFINITY } else { err };

            if err <= 1.0 {
                let r2 = y_new - y;
                let r3 = h * k1 - r2;
                let r4 = r2 - h * k7 - r3;
                let r5 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);
                on_step(&DenseStep {
                    t0: t,
                    t1: t_new,
                    y0: y,
                    y1: y_new,
                    dy0: k1,
                    dy1: k7,
                    cont: [y, r2, r3, r4, r5],
                });
                stats.accepted += 1;
                t = t_new;
                y = y_new;
                k1 = k7;
            } else {
                stats.rejected += 1;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= if err <= 1.0 { factor } else { factor.min(1.0) };
        }
        Ok((y, stats))
    }

    fn initial_step(
        &self,
        f: &mut impl FnMut(f64, f64) -> Result<f64>,
        t: f64,
        y: f64,
        dy: f64,
        span: f64,
        stats: &mut Stats,
    ) -> Result<f64> {
        let sc = self.atol + self.rtol * y.abs();
        let d0 = y.abs() / sc;
        let d1 = dy.abs() / sc;
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let dy1 = f(t + h0, y + h0 * dy)?;
        stats.evaluations += 1;
        let d2 = (dy1 - dy).abs() / sc / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(span))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_to_tolerance() {
        let solver = Dopri5::with_tolerance(1e-10);
        let (y, stats) = solver
            .integrate(|_, y| Ok(-y), 0.0, 5.0, 1.0, |_| {})
            .unwrap();
        assert!((y - (-5f64).exp()).abs() < 1e-9, "{y}");
        assert!(stats.accepted > 5);
    }

    #[test]
    fn dense_output_tracks_the_solution() {
        let solver = Dopri5::with_tolerance(1e-10);
        let mut worst: f64 = 0.0;
        let mut last_t = 0.0;
        solver
            .integrate(
                |t, _| Ok(t.cos()),
                0.0,
                10.0,
                0.0,
                |s| {
                    assert!(s.t0 == last_t && s.t1 > s.t0);
                    last_t = s.t1;
                    for j in 0..=10 {
                        let t = s.t0 + (s.t1 - s.t0) * j as f64 / 10.0;
                        worst = worst.max((s.eval(t) - t.sin()).abs());
                    }
                },
            )
            .unwrap();
        assert_eq!(last_t, 10.0);
        assert!(worst < 1e-8, "dense error {worst:e}");
    }

    #[test]
    fn errors_from_the_right_hand_side_propagate() {
        let solver = Dopri5::default();
        let r = solver.integrate(
            |t, _| if t > 1.0 { Err(Error::Node { x: 0.0, t, amplitude: 0.0 }) } else { Ok(1.0) },
            0.0,
            2.0,
            0.0,
            |_| {},
        );
        assert!(matches!(r, Err(Error::Node { .. })));
    }

    #[test]
    fn stiff_blowup_underflows() {
        let solver = Dopri5::with_tolerance(1e-12);
        // y' = y², y(0) = 1 blows up at t = 1.
        let r = solver.integrate(|_, y| Ok(y * y), 0.0, 2.0, 1.0, |_| {});
        assert!(matches!(r, Err(Error::StepUnderflow { .. })), "{r:?}");
    }

    #[test]
    fn invalid_span_is_rejected() {
        let r = Dopri5::default().integrate(|_, _| Ok(0.0), 1.0, 1.0, 0.0, |_| {});
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
