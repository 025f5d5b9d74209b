//! A rollback-recovery engine and deterministic dataflow simulator.
//!
//! Processors in a dataflow graph tag events with partially ordered logical
//! times drawn from per-processor time domains (sequence numbers, epochs, or
//! structured tuples with loop counters). Checkpoints are frontiers —
//! downward-closed sets of times — and recovery picks a globally consistent
//! frontier per processor via a fixed-point algorithm over persisted
//! checkpoint metadata. Edge projections bridge time domains, selective
//! rollback restores exactly the events inside a frontier regardless of the
//! original interleaving, and a monitoring service turns persisted metadata
//! into low-watermarks that drive garbage collection and external
//! acknowledgements.
//!
//! The simulator executes whole scenarios deterministically from a seed,
//! injects failures, runs recovery, and compares externally visible outputs
//! against failure-free reference runs.

pub mod checkpoint;
pub mod error;
pub mod graph;
pub mod monitor;
pub mod rollback;
pub mod runtime;
pub mod scenario;
pub mod sim;
pub mod time;

pub use error::{Error, Result};
