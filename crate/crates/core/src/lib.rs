//! Multi-cell OFDMA resource allocation with cell-load minimization.
//!
//! The crate covers the full pipeline used to study load-minimizing
//! allocation in a full-reuse cellular network:
//!
//! * [`geometry`] builds a hexagonal layout, drops users, draws channels and
//!   evaluates Shannon rates under inter-cell interference;
//! * [`graph`] enumerates every user's minimal PRB sets and turns them into
//!   the vertex-weighted conflict graph;
//! * [`solvers`] contains the minimal weighted-degree greedy (MWDG) solver,
//!   an exact maximum-weight independent set oracle, and the random /
//!   mean-enhanced greedy baselines;
//! * [`power`] implements distributed power reassignment (DPRA) and the
//!   iterative PRB-and-power loop;
//! * [`metrics`] and [`harness`] turn Monte-Carlo drops into summary tables.

pub mod error;
pub mod geometry;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod power;
pub mod rng;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
