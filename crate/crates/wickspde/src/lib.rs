//! Configuration, file formats and the experiment runner around `wickspde-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos_io;
pub mod config;
pub mod runner;
pub mod stats;
