//! Data-locality potential analysis.
//!
//! A dynamic execution trace is turned into a computational DAG, the DAG is
//! reordered by growing convex components under a maxlive bound (optionally
//! composed over several capacity levels), and reuse distance profiles of the
//! original and reordered schedules are compared.
//!
//! The usual pipeline is
//! [`trace::generate_trace`] → [`cdag::build_cdag`] →
//! [`partition::generate_convex_components`] or
//! [`partition::multi_level_partitioning`] → [`schedule::linearize`] →
//! [`rda::replay`] → [`rda::reuse_distances`] → [`rda::miss_curve`].

pub mod cdag;
pub mod cli;
pub mod error;
pub mod partition;
pub mod rda;
pub mod schedule;
pub mod sweep;
pub mod trace;

pub use error::{Error, Result};
