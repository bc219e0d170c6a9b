//! Harness library behind the `histree` binary: experiment configs and
//! runs, the invariant battery, and the independent oracles they check
//! against.

pub mod battery;
pub mod experiment;
pub mod oracle;
