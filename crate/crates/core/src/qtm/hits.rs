//! Screen-hit accumulation from seeded random trajectories.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::{TwoSlitState, WaveFunction};
use super::trajectory::{initial_positions, integrate_endpoint, Seeding};
use crate::error::{Error, Result};
use crate::quad::{GaussLegendre, Quadrable};

pub const DEFAULT_CHECKPOINTS: [usize; 4] = [100, 3000, 20000, 70000];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl HistogramSpec {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::domain("histogram range must satisfy lo < hi"));
        }
        if bins == 0 {
            return Err(Error::domain("histogram needs at least one bin"));
        }
        Ok(Self { lo, hi, bins })
    }

    /// `±(Y + 5σ₀)·σ_T/σ₀` with 200 bins.
    pub fn default_for(state: &TwoSlitState) -> Self {
        let s = state.setup();
        let half = (s.half_separation + 5.0 * s.sigma0) * state.packet_width(state.screen_time()) / s.sigma0;
        Self {
            lo: -half,
            hi: half,
            bins: 200,
        }
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    pub fn edge(&self, i: usize) -> f64 {
        if i == self.bins {
            self.hi
        } else {
            self.lo + self.width() * i as f64
        }
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x < self.hi) {
            return None;
        }
        Some((((x - self.lo) / self.width()) as usize).min(self.bins - 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub spec: HistogramSpec,
    pub counts: Vec<u64>,
    /// Hits outside `[lo, hi)`.
    pub outside: u64,
    /// Trajectories that could not be followed to the screen.
    pub failed: u64,
}

impl Histogram {
    pub fn empty(spec: HistogramSpec) -> Self {
        Self {
            spec,
            counts: vec![0; spec.bins],
            outside: 0,
            failed: 0,
        }
    }

    pub fn add(&mut self, x: f64) {
        match self.spec.bin_of(x) {
            Some(i) => self.counts[i] += 1,
            None => self.outside += 1,
        }
    }

    /// Trajectories launched, including failed and out-of-range ones.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.outside + self.failed
    }

    /// Bin frequencies relative to all launched trajectories.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitAccumulation {
    pub seed: u64,
    /// Screen positions in seed order; `None` for failed trajectories.
    pub hits: Vec<Option<f64>>,
    pub checkpoints: Vec<Histogram>,
}

/// Launches `n` trajectories from `|ψ(·,0)|²` with a seeded generator and
/// bins their screen positions, snapshotting after each checkpoint count.
pub fn accumulate_hits(
    state: &TwoSlitState,
    n: usize,
    seed: u64,
    checkpoints: &[usize],
    spec: HistogramSpec,
    tol: f64,
) -> Result<HitAccumulation> {
    if n == 0 {
        return Err(Error::domain("hit count must be >= 1"));
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) || checkpoints.iter().any(|&c| c == 0 || c > n) {
        return Err(Error::domain("checkpoints must be increasing and within 1..=N"));
    }
    let t_end = state.screen_time();
    let starts = initial_positions(state, n, Seeding::Random { seed });
    let results: Vec<Result<f64>> = starts
        .par_iter()
        .map(|&x0| integrate_endpoint(state, x0, (0.0, t_end), tol))
        .collect();
    let mut hits = Vec::with_capacity(n);
    for r in results {
        match r {
            Ok(x) => hits.push(Some(x)),
            Err(Error::Node { .. } | Error::StepUnderflow { .. }) => hits.push(None),
            Err(e) => return Err(e),
        }
    }
    let mut hist = Histogram::empty(spec);
    let mut snaps = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for (i, h) in hits.iter().enumerate() {
        match h {
            Some(x) => hist.add(*x),
            None => hist.failed += 1,
        }
        if next.peek() == Some(&&(i + 1)) {
            snaps.push(hist.clone());
            next.next();
        }
    }
    Ok(HitAccumulation {
        seed,
        hits,
        checkpoints: snaps,
    })
}

/// `∫_bin |ψ(x,t)|² dx` for every bin, by Gauss–Legendre per bin.
pub fn screen_bin_probabilities<W: WaveFunction + ?Sized>(w: &W, spec: &HistogramSpec, t: f64) -> Vec<f64> {
    let rule = GaussLegendre::new(16).expect("order 16 is valid");
    (0..spec.bins)
        .map(|i| rule.composite(spec.edge(i), spec.edge(i + 1), 2, |x| w.psi(x, t).norm_sqr()))
        .collect()
}

/// `½ Σ |pᵢ − qᵢ|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions must share bins");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).magnitude()).sum::<f64>()
}
