//! Interlacing particle dynamics on Gelfand-Tsetlin patterns.
//!
//! A pattern of depth `N` holds particles `x[i][j]`, `1 <= i <= j <= N`;
//! level `j` has `j` particles interlacing with level `j - 1`. The crate
//! provides
//!
//! * [`pattern`]: discrete and continuous patterns with interlacing validators,
//! * [`driving`]: unit-step driving paths (Poisson, Bernoulli, lazy walk) and their CSV form,
//! * [`dynamics`]: the sequential block/push update,
//! * [`skorokhod`]: the reflection map into a moving interval and its level-by-level
//!   composition, which reproduces the block/push dynamics exactly,
//! * [`warren`]: reflected interlacing Brownian motions on a grid,
//! * [`rescale`]: diffusive rescaling and the convergence pipeline,
//! * [`stats`]: GUE corner eigenvalues, two-sample KS, moments,
//! * [`config`] and [`cli`]: the `interlace` command line.
//!
//! ```
//! use interlace::{run_dynamics, DiscretePattern, DriverKind, SeedSpec};
//!
//! let start = DiscretePattern::packed(3).unwrap();
//! let driver = DriverKind::Poisson { rate: 1.0 }
//!     .generate(3, 10.0, SeedSpec::new(7, 0))
//!     .unwrap();
//! let traj = run_dynamics(&start, &driver, 10.0).unwrap();
//! assert!(traj.states().iter().all(|p| p.is_valid()));
//! ```

pub mod cli;
pub mod config;
pub mod driving;
pub mod dynamics;
pub mod error;
pub mod pattern;
pub mod rescale;
pub mod skorokhod;
pub mod stats;
pub mod trajectory;
pub mod warren;

pub use cli::{run_command, CommandOutput};
pub use config::{load_config, CommandKind, ConfigError, RunConfig};
pub use driving::{
    bernoulli_driver, ingest_path, lazy_walk_driver, poisson_driver, DriverKind, DrivingError, DrivingEvent,
    DrivingPath, SeedSpec,
};
pub use dynamics::{
    apply_event, run_dynamics, run_dynamics_recorded, sample_dynamics, DynamicsError, DynamicsState, Outcome,
    UpdateRecord,
};
pub use error::Error;
pub use pattern::{
    slot_count, slots, validate_continuous, validate_discrete, ContinuousPattern, DiscretePattern, Inequality,
    LevelIndex, Pattern, PatternError, Violation,
};
pub use rescale::{
    convergence_pipeline, preset_scaling, rescale_trajectory, Centering, ConvergenceConfig, ConvergenceEntry,
    ConvergenceReport, RescaleError, ScalingPreset,
};
pub use skorokhod::{
    check_prop6, check_prop6_with_tolerance, discrete_sk_map, gamma_reflect, Condition, PiecewisePath, Prop6Report,
    SkorokhodError, TimeDependentInterval,
};
pub use stats::{empirical_ks, gue_corners_sample, moment_summary, MomentSummary, SampleDump, SampleSet, StatsError};
pub use trajectory::{DiscreteTrajectory, Trajectory};
pub use warren::{
    brownian_grid, continuum_sk_map, warren_replicas, warren_sample, GridPath, WarrenError, WarrenTrajectory,
};
