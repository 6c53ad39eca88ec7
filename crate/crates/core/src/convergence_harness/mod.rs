//! Configuration, seeded initial data, ε-sweeps with rate fitting, and the
//! invariant verification suite.

mod config;
mod initial;
mod simulate;
mod study;
mod theory;
mod verify;

pub use config::{DataRecipe, ExperimentConfig, Preparation, WaveFilter, CONFIG_KEYS};
pub use initial::{generate_initial_data, RESOLUTION_TOL};
pub use simulate::{run_simulation, write_simulation, Environment, SimulationMeta};
pub use study::{
    read_series, reverify_outputs, run_convergence_study, verdicts_from_rows, write_outputs,
    MemberResult, QuantityVerdict, SeriesRow, StudyResult, Verdicts, GATED,
};
pub use theory::{k_of_q, theoretical_exponents, TheoryReference};
pub use verify::{run_verify, InvariantCheck, Mutation, VerifyReport};
