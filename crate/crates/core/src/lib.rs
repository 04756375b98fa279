//! Binary swarm simulation of self-organizing cooperative groups.
//!
//! Agents search a `D`-dimensional binary strategy space for a goal strategy.
//! Each agent moves under an inertia / self-belief / prestige-bias velocity
//! rule, sees only the memory of its own silo (fully-networked, siloed or
//! dynamically reshuffled designs), and adapts its coefficients from
//! performance feedback either reactively or perceptively. Replicates are
//! seeded, reproducible and run in parallel; results are summarized per arm
//! and compared with a Mann–Whitney test.

pub mod engine;
pub mod error;
pub mod experiment;
pub mod kinematics;
pub mod output;
pub mod policy;
pub mod rng;
pub mod space;
pub mod stats;
pub mod topology;

pub use engine::{
    init_swarm, run_replicate, run_replicate_traced, Agent, GbestMode, InitRange, ReplicateResult,
    SimConfig, Swarm, TraceLevel, TraceRow,
};
pub use error::{ConfigError, Error, RunError};
pub use experiment::{
    load_config, parse_config, run_experiment, Arm, CliOverrides, ConfigFile, ExperimentOutcome,
    ExperimentSpec, Overrides,
};
pub use kinematics::{Binarization, CoefficientTriple, Velocity};
pub use output::write_outputs;
pub use policy::{CoeffBounds, PolicyState, Tendency};
pub use space::{Fitness, StrategyPosition};
pub use stats::{ArmSummary, Comparison};
pub use topology::{DesignKind, OrgDesign, SiloAssignment};
