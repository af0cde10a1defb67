//! Guidance-equation trajectories `dx/dt = v(x, t)` and fans of them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fields::{quantum_force, velocity};
use super::state::{InitialDensity, WaveFunction};
use crate::error::{Error, Result};
use crate::ode::Dopri5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Completed,
    /// `|ψ|` dropped below the node threshold; samples stop at the last good point.
    NodeAborted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn start(&self) -> f64 {
        self.samples[0].x
    }

    pub fn end(&self) -> TrajectorySample {
        *self.samples.last().expect("trajectories hold at least the start sample")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    /// Relative and absolute local error bound of the integrator.
    pub tol: f64,
    /// Uniformly spaced output samples, both ends included.
    pub samples: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            samples: 401,
        }
    }
}

/// Integrates the guidance equation from `x0` over `t_span` with adaptive
/// Dormand–Prince 5(4), sampling the dense output on a uniform time grid.
pub fn integrate_trajectory<W: WaveFunction + ?Sized>(
    w: &W,
    x0: f64,
    t_span: (f64, f64),
    opts: &TrajectoryOptions,
) -> Result<Trajectory> {
    let (t0, t1) = t_span;
    if opts.samples < 2 {
        return Err(Error::domain("a trajectory needs at least 2 samples"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::domain("integrator tolerance must be > 0"));
    }
    let v0 = velocity(w, x0, t0)?;
    let n = opts.samples;
    let time = |j: usize| {
        if j + 1 == n {
            t1
        } else {
            t0 + (t1 - t0) * j as f64 / (n - 1) as f64
        }
    };
    let mut samples = Vec::with_capacity(n);
    samples.push(TrajectorySample { t: t0, x: x0, v: v0 });
    let mut next = 1;
    let mut sample_error = None;

    let solver = Dopri5::with_tolerance(opts.tol);
    let outcome = solver.integrate(
        |t, x| velocity(w, x, t),
        t0,
        t1,
        x0,
        |step| {
            if sample_error.is_some() {
                return;
            }
            while next < n && time(next) <= step.t1 {
                let t = time(next);
                let x = step.eval(t);
                match velocity(w, x, t) {
                    Ok(v) => samples.push(TrajectorySample { t, x, v }),
                    Err(e) => {
                        sample_error = Some(e);
                        return;
                    }
                }
                next += 1;
            }
        },
    );
    match (outcome, sample_error) {
        (Ok(_), None) => Ok(Trajectory {
            samples,
            status: TrajectoryStatus::Completed,
        }),
        (Err(Error::Node { .. }), _) | (Ok(_), Some(Error::Node { .. })) => Ok(Trajectory {
            samples,
            status: TrajectoryStatus::NodeAborted,
        }),
        (Err(e), _) | (Ok(_), Some(e)) => Err(e),
    }
}

/// Endpoint of the guidance flow without storing samples.
pub fn integrate_endpoint<W: WaveFunction + ?Sized>(
    w: &W,
    x0: f64,
    t_span: (f64, f64),
    tol: f64,
) -> Result<f64> {
    velocity(w, x0, t_span.0)?;
    Dopri5::with_tolerance(tol)
        .integrate(|t, x| velocity(w, x, t), t_span.0, t_span.1, x0, |_| {})
        .map(|(x, _)| x)
}

/// How initial positions are drawn from `|ψ(·, 0)|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Seeding {
    /// Deterministic `qᵢ = (i + ½)/N` quantiles.
    Quantile,
    /// Inverse-CDF sampling with a seeded ChaCha8 generator.
    Random { seed: u64 },
}

/// Inverts the initial CDF by bisection.
pub fn inverse_cdf<D: InitialDensity + ?Sized>(density: &D, q: f64) -> f64 {
    let (mut lo, mut hi) = density.initial_support();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if density.initial_cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Initial positions for `n` trajectories, in seed-index order.
pub fn initial_positions<D: InitialDensity + ?Sized>(density: &D, n: usize, seeding: Seeding) -> Vec<f64> {
    match seeding {
        Seeding::Quantile => (0..n)
            .map(|i| {
                let q = (i as f64 + 0.5) / n as f64;
                if 2 * i + 1 == n {
                    // Median of a symmetric density; bisection would land within an ulp.
                    let (lo, hi) = density.initial_support();
                    if lo == -hi {
                        return 0.0;
                    }
                }
                inverse_cdf(density, q)
            })
            .collect(),
        Seeding::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    let u: f64 = rng.gen();
                    inverse_cdf(density, u.max(f64::MIN_POSITIVE))
                })
                .collect()
        }
    }
}

/// Trajectories from a common initial density, ordered by seed index.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub seeding: Seeding,
    pub initial: Vec<f64>,
    /// `None` where integration failed; see `failures`.
    pub trajectories: Vec<Option<Trajectory>>,
    /// Final positions of completed trajectories, in seed-index order.
    pub screen_hits: Vec<f64>,
    pub failures: Vec<(usize, Error)>,
}

impl TrajectoryEnsemble {
    pub fn completed(&self) -> impl Iterator<Item = &Trajectory> {
        self.trajectories.iter().flatten()
    }
}

/// Integrates `n` trajectories to the screen time in parallel.
pub fn trajectory_fan<W>(
    state: &W,
    n: usize,
    seeding: Seeding,
    t_end: f64,
    opts: &TrajectoryOptions,
) -> Result<TrajectoryEnsemble>
where
    W: WaveFunction + InitialDensity,
{
    if n == 0 {
        return Err(Error::domain("trajectory count must be >= 1"));
    }
    let initial = initial_positions(state, n, seeding);
    let results: Vec<Result<Trajectory>> = initial
        .par_iter()
        .map(|&x0| integrate_trajectory(state, x0, (0.0, t_end), opts))
        .collect();
    let mut trajectories = Vec::with_capacity(n);
    let mut failures = Vec::new();
    let mut screen_hits = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(tr) => {
                if tr.status == TrajectoryStatus::Completed {
                    screen_hits.push(tr.end().x);
                }
                trajectories.push(Some(tr));
            }
            Err(e) => {
                failures.push((i, e));
                trajectories.push(None);
            }
        }
    }
    Ok(TrajectoryEnsemble {
        seeding,
        initial,
        trajectories,
        screen_hits,
        failures,
    })
}

/// Number of trajectory pairs whose order changes (or ties) at some shared
/// sample time.
pub fn crossing_count(trajectories: &[&Trajectory]) -> usize {
    let mut count = 0;
    for i in 0..trajectories.len() {
        for j in i + 1..trajectories.len() {
            let (a, b) = (&trajectories[i].samples, &trajectories[j].samples);
            let m = a.len().min(b.len());
            let sign0 = (a[0].x - b[0].x).signum();
            if a[..m].iter().zip(&b[..m]).any(|(p, q)| {
                let d = p.x - q.x;
                d == 0.0 || d.signum() != sign0
            }) {
                count += 1;
            }
        }
    }
    count
}

/// Peak `|dv/dt|` along a trajectory in the early window `(0, early·T)` and
/// the late window `(late·T, T)`, using the quantum force at each sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkDiagnostic {
    pub early_peak: f64,
    pub late_peak: f64,
}

impl KinkDiagnostic {
    pub fn has_kink(&self) -> bool {
        self.late_peak > self.early_peak
    }
}

pub fn kink_diagnostic<W: WaveFunction + ?Sized>(
    w: &W,
    trajectory: &Trajectory,
    t_end: f64,
    early: f64,
    late: f64,
) -> Result<KinkDiagnostic> {
    let mut d = KinkDiagnostic {
        early_peak: 0.0,
        late_peak: 0.0,
    };
    for s in &trajectory.samples {
        let in_early = s.t > 0.0 && s.t < early * t_end;
        let in_late = s.t > late * t_end && s.t < t_end;
        if !(in_early || in_late) {
            continue;
        }
        let acc = (quantum_force(w, s.x, s.t)? / w.mass()).abs();
        if in_early {
            d.early_peak = d.early_peak.max(acc);
        } else {
            d.late_peak = d.late_peak.max(acc);
        }
    }
    Ok(d)
}
