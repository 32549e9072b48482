//! Instance generation, batch verification, angle sweeps and matrix I/O.

mod generate;
pub mod io;
mod sweep;
mod verify;

pub use generate::{generate, random_unitary, Instance, InstanceSpec, SpectrumSpec, SubspaceMode};
pub use sweep::{sweep_theta, Example, SweepRow, SweepTable};
pub use verify::{
    mixed_suite, skip_tag, verify_all, verify_instance, verify_specs, verify_triple, Flagged, Outcome, RunReport, Tally,
    ALL_IDS, CONJECTURE_IDS, THREADS_ENV,
};
