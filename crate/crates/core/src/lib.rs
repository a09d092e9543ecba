//! Seat-allocation engine for centralized multi-institute admissions.
//!
//! The engine runs candidate-proposing deferred acceptance over *virtual
//! programs* (institute, branch, quota, category, gender pool), with
//! multi-run de-reservation of unfilled reserved seats, min-cutoff seat
//! guarantees across rounds, and supernumerary handling for females, DS
//! and foreign candidates.
//!
//! The crate is `no_std`-compatible (with `alloc`); file formats and the
//! CLI live in the companion `mrda` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod da_core;
pub mod fixtures;
pub mod ds2015;
pub mod model;
pub mod rounds;
pub mod run_pipeline;
pub mod simgen;
pub mod validation;
pub mod virtualization;
