//! Experiment harness: sweeps over the subspaces `T(R(s))`, Fejér witnesses
//! and the kernel, operator and snapping measurements.

mod compare;
mod operators;
mod sweep;
mod witness;

pub use compare::{compare_constructions, net_params, search_margin, ComparisonRow, Family, MarginSearch};
pub use operators::{
    kernel_sum_check, one_sided_check, snap_axis, snap_compare, volume_factor, vp_operator, vp_operator_check,
    vp_operator_ratio, KernelSumResult, OneSidedResult, OperatorResult, SnapResult,
};
pub use sweep::{sweep, SampleWitness, SubspaceRecord, SweepConfig, UniversalityReport};
pub use witness::{fejer_witness, plant_empty_box, WitnessResult};
