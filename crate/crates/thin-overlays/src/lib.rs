//! Thin systems of overlays: construction, validation, and the dynamic
//! programming that turns them into approximation algorithms for
//! distance-constrained problems on structured graph classes.

pub mod builders;
pub mod cliques;
pub mod dp;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod layering;
pub mod nice;
pub mod overlay;
pub mod ptas;
pub mod schedule;
pub mod separator;
pub mod solve;
pub mod system;
pub mod td;

pub use error::{Error, Result};
pub use graph::{Graph, HostHash, Subgraph};
pub use overlay::{Overlay, OverlayKind, HostRef};
