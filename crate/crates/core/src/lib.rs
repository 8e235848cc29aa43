//! Random two-player strict ordinal potential games.
//!
//! * [`game`]: potentials, uniform sampling, pure Nash equilibria.
//! * [`brd`]: best-response dynamics and basins of attraction.
//! * [`incremental`]: the incremental construction, its ε-stopped variant and
//!   the simplified processes behind its fluid limit.
//! * [`theory`]: limit laws, the fluid ODE and finite-K sums.
//! * [`montecarlo`]: seeded parallel estimators.
//! * [`oracle`]: exhaustive enumeration and all-starts checks.
//! * [`cli`]: the `sop-basins` command line.

pub mod brd;
pub mod cli;
pub mod error;
pub mod game;
pub mod incremental;
pub mod montecarlo;
pub mod oracle;
pub mod rng;
pub mod theory;
pub mod util;

pub use brd::{brd_run, compute_basins, path_probability, BasinMap, BrdTrace};
pub use error::{Error, Result};
pub use game::{
    expected_num_equilibria, find_equilibria, permute_potential, sample_uniform_potential, ActionProfile, Equilibrium,
    EquilibriumSet, Potential,
};
pub use incremental::{
    epsilon_stopped_construct, incremental_construct, simulate_aux_processes, Completion, IncrementalTrace, Snapshot,
};
pub use montecarlo::{ExperimentConfig, ExperimentReport, GeneratorKind, Target};
