//! Library half of the `noma-sim` binary: argument parsing, manifest
//! handling and CSV emission, split out so they are testable without
//! spawning a process.

pub mod args;
pub mod output;
