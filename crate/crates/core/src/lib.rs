//! Simulation of fraction estimation by ancilla measurement.
//!
//! A condition over k-bit inputs is compiled into an oracle that XORs the
//! condition's truth value into a single ancilla qubit. Starting from the
//! uniform superposition, the ancilla reads 1 with probability `S / 2^k`,
//! where `S` counts the satisfying inputs, so repeated shots estimate the
//! satisfying fraction at a cost set only by the desired accuracy.

pub mod error;
pub mod estimator;
pub mod experiment;
pub mod predicate;
pub mod rng;
pub mod simulator;
mod width;

pub use error::{Error, Result};
pub use estimator::{
    aggregate, confidence_interval, estimate_fraction, hoeffding_half_width, ks_two_sample, plan_shots, CiMethod,
    EstimateResult, KsTest, SamplingPlan,
};
pub use experiment::{
    compare_methods, run_classical_baseline, run_experiment, run_experiment_timed, sweep_width, ComparisonReport,
    ExperimentConfig, FractionFamily, PhaseTimings, RunReport, SimulationMode, SweepConfig, SweepRow,
};
pub use predicate::{
    build_oracle_table, eval_predicate, exact_fraction, parse_predicate, ExactFraction, OracleTable, PredicateAst,
};
pub use simulator::{
    analytic_p1, apply_oracle, measure_y, prepare_uniform, run_shot, PostOracleSummary, RegisterSpec, StateVector,
};
pub use width::Width;
