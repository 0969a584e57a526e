//! Monte Carlo experiments around perturbations of measures: marker
//! processes, swap maps, d̄ estimates, entropy estimation, the entropy gain
//! versus integral change tradeoff, and the Kac and Abramov identities.

mod entropy;
mod kac;
mod marker;
mod swap;
mod tradeoff;

pub use entropy::{empirical_entropy, EntropyEstimate, MIN_CONTEXT_COUNT};
pub use kac::{kac_abramov_check, KacAbramovReport};
pub use marker::{
    dbar_exact, dbar_marker_vs_bernoulli, marker_density, marker_from_omega, sample_marker, DbarReport,
    MarkerProcess,
};
pub use swap::{apply_swap, unswap, SwapMap};
pub use tradeoff::{ergodic_average, tradeoff_experiment, PointSummary, TradeoffConfig, TradeoffFit, TradeoffReport, TradeoffRow};
