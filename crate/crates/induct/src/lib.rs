//! Instruction-induction benchmark harness.
//!
//! The library builds 24 instruction-induction task datasets from pinned
//! source files, renders induction / in-context / execution prompts, calls
//! completion backends (remote HTTP, or a deterministic offline task
//! oracle), scores model outputs with per-task string metrics, and persists
//! every run so it can be replayed byte-for-byte.
//!
//! Modules map one-to-one onto the pipeline stages:
//!
//! * [`corpus`] - source ingestion (manifest + digests) and derived lexical
//!   resources: the common-noun list, the pluralizer, rhyme groups.
//! * [`taskgen`] - the 24 task dataset generators, induction-example
//!   sampling, and dataset JSONL import/export.
//! * [`prompting`] - byte-deterministic prompt rendering.
//! * [`model`] - backend abstraction, retry, and the response cache.
//! * [`scoring`] - output normalization and the eight task metrics.
//! * [`evalrunner`] - the three experiments plus reference scoring and
//!   run persistence.
//! * [`report`] - report tables over persisted run directories.

pub mod corpus;
pub mod error;
pub mod evalrunner;
pub mod model;
pub mod prompting;
pub mod report;
pub mod scoring;
pub mod taskgen;

pub use error::{Error, Result};
