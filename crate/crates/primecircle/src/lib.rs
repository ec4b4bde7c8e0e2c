//! File formats, reports, images and parallel runners on top of
//! `primecircle-core`, plus the command implementations behind the
//! `primecircle` binary.

pub mod commands;
pub mod config;
pub mod format;
pub mod parallel;
pub mod ppm;
pub mod report;
