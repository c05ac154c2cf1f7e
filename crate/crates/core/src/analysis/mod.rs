//! Sweeps, spectrum comparison and sigma*D inversion.

mod compare;
mod fit;
mod sweep;

pub use compare::{compare, EquivalenceReport, NEAR_ZERO_FRACTION};
pub use fit::{fit_sigma_d, fit_sigma_d_weighted, initial_sigma_d, FitProblem, SigmaDFit, Weighting, MAX_ITERATIONS};
pub use sweep::{assemble, sweep, sweep_detailed, Evaluation, ForwardModel, PreparedModel, SweepOutcome};
