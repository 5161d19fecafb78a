//! Wigner quasi-distributions of Fock, cat and coherent states, their
//! discretization and moments, and deterministic mappings to sound: additive
//! audio, sonograms and quarter-tone score events.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod grid;
pub mod render;
pub mod score;
pub mod sonify;
pub mod wigner;

pub use analysis::{compute_moments, negativity_volume, MomentSet};
pub use config::MapConfig;
pub use error::{Error, Result};
pub use grid::{coverage, sample_field, GridSpec, WignerField};
pub use render::AudioBuffer;
pub use sonify::{Method, Partial, PartialBank};
pub use wigner::{PhasePoint, StateSpec, Wavefunction};
