//! Exact state-vector simulation of the adaptive multi-query algorithm for
//! summing `f: Z_n → Z_k` from oracle access, together with its closed-form
//! analysis and an exhaustive verification harness.
//!
//! Joint states live on `C^n ⊗ C^k` with the index layout
//! `idx(x, y) = x * k + y` (see [`register::joint_index`]).

pub mod algorithm;
pub mod analysis;
pub mod error;
pub mod operators;
pub mod register;
pub mod verify;

pub use algorithm::{
    classical_read, initial_state, plan, run_core, run_core_with_count, run_sum, trace_small,
    AlgorithmParams, ExecutionPlan, RunReport, Segment, SmallInstance,
};
pub use analysis::{
    a_state, central_mass, figure1_curves, lemma3_prob, lemma4_check, success_probability,
    vandam_identify_prob, vandam_sum_bound, Curve, CurvePoint,
};
pub use error::{QsumError, Result};
pub use operators::{
    fourier_op, j_op, k_op, k_op_for_step, oracle_op, shift_op, FunctionTable, UnitaryOp,
};
pub use register::{
    fourier_state, measure_second_register, phase_equal, JointState, OutcomeDistribution,
    StateVector,
};
pub use verify::{
    check_suite, enumerate_oracles, exhaustive_success, GridSpec, SuccessStats, VerificationReport,
};
