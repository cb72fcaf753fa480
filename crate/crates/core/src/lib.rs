//! Peak-valley fragmentation toolkit for spin-F domain-wall chains.

pub mod cache;
pub mod cli;
pub mod duality;
pub mod dynamics;
pub mod error;
pub mod krylov;
pub mod models;
pub mod phase;
pub mod spinchain;

pub use error::{Error, Result};
