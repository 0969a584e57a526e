//! Shifts of finite type, 1-block factor codes and the numerical machinery
//! around compensation functions: MPW minimal subshifts, clothespinning,
//! pressure and equilibrium states, and Monte Carlo perturbation experiments.

pub mod clothespin;
pub mod error;
pub mod factor;
pub mod par;
pub mod rng;
pub mod shift;
pub mod sim;
pub mod stats;
pub mod systems;
pub mod thermo;

pub use error::{Error, Result};
pub use par::Execution;
pub use shift::{FactorCode, ShiftSpace, SoficPresentation, Symbol, Word};
