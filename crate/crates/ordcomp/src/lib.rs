//! File formats, parallel execution and the `ordcomp` command line on top
//! of [`ordcomp_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod exec;
pub mod format;
pub mod num;
pub mod solution;
