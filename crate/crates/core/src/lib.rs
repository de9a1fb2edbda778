//! Desk-scale geometry of relatively hyperbolic groups.
//!
//! Growth functions of Cayley graphs, covering and packing numbers,
//! combinatorial horoballs `C(K)` with their closed-form metric, cusped
//! spaces, bounded-geometry profiles and asymptotic-dimension certificates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod cli;
pub mod error;
pub mod groups;
pub mod growth;
pub mod horoball;
pub mod metric;

pub use error::{Error, Result};
pub use groups::{FinitelyGenerated, GroupElement, GroupModel};
pub use metric::{FiniteMetricSpace, MetricSpace};

/// Version string embedded in every machine-readable output.
pub const VERSION: &str = concat!("cuspgeom ", env!("CARGO_PKG_VERSION"));
