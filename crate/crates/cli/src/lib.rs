//! Front ends for the planner: the `articopt` command line and a small
//! read-only JSON API over one college's agreements.

pub mod cli;
pub mod payload;
pub mod service;
