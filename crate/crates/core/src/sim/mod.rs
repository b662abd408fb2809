//! Seeded Monte Carlo site percolation on graph-distance balls.

pub mod config;
pub mod dsu;
pub mod estimate;
pub mod events;
pub mod geometry;
pub mod rng;

pub use config::{sample_configuration, Event, OpenConfiguration, OriginRule, SimConfig};
pub use dsu::DisjointSets;
pub use estimate::{
    estimate, estimate_with_threads, mc_open_path_count, pc_bisect, sweep, sweep_indicators,
    wilson_interval, BisectOutcome, BisectParams, CrossingEstimate, PathCountEstimate, SweepSpec,
    MC_PATH_MAX_K,
};
pub use events::{connectivity_oracle, one_arm, two_arm, union_find_connected};
pub use geometry::{BallGeometry, MAX_SIM_RADIUS};
