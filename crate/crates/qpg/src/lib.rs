//! File formats, the parallel search driver and report tables on top of
//! `qpg-core`.

pub mod db;
pub mod report;
pub mod search;
