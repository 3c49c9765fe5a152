//! Quasi-static simulator of a two-finger gripper whose distal joints are
//! stiffened by pneumatic rings, grasping thin sheets and simple rigid objects.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod geometry;
pub mod joint;
pub mod numeric;
pub mod sheet;
pub mod montecarlo;
pub mod cli;
pub mod config;
pub mod plot;
pub mod report;
