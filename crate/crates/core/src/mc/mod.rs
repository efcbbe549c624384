//! Monte Carlo estimators over independent simulated paths.
//!
//! Paths run in parallel, each on its own random stream, and are folded in
//! index order into an [`Estimate`]; output depends only on the seed.

mod estimate;
mod estimators;
mod harmonic;

pub use estimate::{agree_within, Estimate, ExactSum};
pub use estimators::{
    est_exit_mean, est_exit_tail, est_far_exit, exit_sample, far_fraction, mean_exit_time, tail_fraction, est_hit_probability, est_hitting, est_hitting_full_annulus,
    make_annulus, make_half_annulus, Sampling, MIN_PATHS,
};
pub use harmonic::{
    constant_payoff, est_harmonic, far_payoff, fit_regularity_exponent, half_space_payoff, martingale_mean_check,
    HarmonicProbe, MartingaleCheck, Payoff, RegularityFit, DEFAULT_BOOTSTRAP_RESAMPLES, MIN_FIT_PAIRS,
};
