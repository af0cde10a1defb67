//! Bohmian (quantum-theory-of-motion) treatment of the two-slit experiment.
//!
//! The post-slit wave is a superposition of two freely spreading Gaussians.
//! Its phase guides point particles through `m dx/dt = ∂S/∂x`; the amplitude
//! enters through the quantum potential `Q = −ħ²/(2m) R''/R`. Longitudinal
//! motion is parametric, so the screen distance maps to an evolution time.

mod fields;
mod hits;
mod state;
mod trajectory;

pub use fields::{
    continuity_residual, hamilton_jacobi_residual, hamilton_jacobi_residual_fd, polar_decompose,
    quantum_force, quantum_potential, quantum_potential_fd, quantum_potential_surface, velocity,
    PhaseTracker, Polar, QuantumPotentialField,
};
pub use hits::{
    accumulate_hits, screen_bin_probabilities, total_variation, HistogramSpec, HitAccumulation,
    Histogram, DEFAULT_CHECKPOINTS,
};
pub use state::{
    Derivatives, GaussianPacket, InitialDensity, PlaneWave, TwoSlitSetup, TwoSlitState, WaveFunction,
    NODE_FRACTION,
};
pub use trajectory::{
    crossing_count, initial_positions, integrate_endpoint, integrate_trajectory, inverse_cdf,
    kink_diagnostic, trajectory_fan, KinkDiagnostic, Seeding, Trajectory, TrajectoryEnsemble,
    TrajectoryOptions, TrajectorySample, TrajectoryStatus,
};
