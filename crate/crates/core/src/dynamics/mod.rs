//! Time evolution of the single-excitation state: direct integration,
//! closed-form residue formulas for the unidirectional lattice, and the
//! numerical resolvent.

pub mod analytic;
pub mod integrate;
pub mod resolvent;
pub mod rfunc;

pub use analytic::{
    emitter_amplitude_analytic_unidirectional, emitter_amplitude_confluent, emitter_amplitude_unidirectional,
    photon_momentum_amplitude_analytic, photon_profile_analytic_unidirectional, photon_profile_snapshot, free_like_asymptote, PolePair,
};
pub use integrate::{
    evolve_numeric, evolve_state, photon_population_series, uniform_grid, BoundaryWarning, EvolutionResult,
    EvolveOptions, Integrator, Snapshot, DEFAULT_STEP_FRACTION, EDGE_GUARD,
};
pub use resolvent::{resolvent_inverse_transform, GreenFunction, ResolventChannel, ResolventEstimate, SelfEnergyModel};
pub use rfunc::r_function;
