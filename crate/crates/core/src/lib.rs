//! Quantum emitters coupled to lossy non-Hermitian lattices in the single
//! excitation sector: spectra and topology of the bath, emitter-photon bound
//! states, emission dynamics and regime analysis.

pub mod analysis;
pub mod bath;
pub mod boundstates;
pub mod cli_io;
pub mod dynamics;
pub mod emitter_model;
pub mod error;
pub mod linfit;
pub mod quadrature;
pub mod sparse;

pub use bath::{BathSpec, BathVariant, Boundary, Lattice};
pub use emitter_model::{EffectiveHamiltonian, EmitterSpec, SingleExcitationState};
pub use error::{Error, Result};
