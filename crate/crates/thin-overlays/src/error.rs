//! Crate-wide error type. Messages carry a module prefix so pipeline output
//! can be traced back to the subsystem that rejected the input.

use thiserror::Error;

/// Structured report for a layering that fails validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayeringViolation {
    #[error("layering is not a partition: vertex {vertex} {problem}")]
    NotPartition { vertex: u32, problem: &'static str },
    #[error("edge {u}-{v} joins layers {layer_u} and {layer_v}, which are not equal or consecutive")]
    EdgeSpan { u: u32, v: u32, layer_u: usize, layer_v: usize },
}

/// Structured report for an overlay that fails validation. Each variant names
/// the violated clause and carries witness vertices, checked in a fixed order
/// so the first violation is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OverlayViolation {
    #[error("shape: {0}")]
    Shape(String),
    #[error("homomorphism: edge {x}-{y} maps to {fx}-{fy}, not an edge of the host")]
    Homomorphism { x: u32, y: u32, fx: u32, fy: u32 },
    #[error("walk-preserving: vertex {x} (level {ell}) has no neighbor over host vertex {w} with level >= {needed}")]
    WalkPreserving { x: u32, ell: u32, w: u32, needed: u32 },
    #[error("level-range: vertex {x} has level {ell}, radius is {r}")]
    LevelRange { x: u32, ell: u32, r: u32 },
    #[error("neighborhood: host vertex {v} has no preimage at level {r}")]
    Neighborhood { v: u32, r: u32 },
    #[error("subgraph-based: component of {x} maps vertices {x} and {y} onto the same host vertex {fx}")]
    InjectiveOnComponent { x: u32, y: u32, fx: u32 },
    #[error("subgraph-based: host edge {fu}-{fv} inside the image of one component has no preimage edge {u}-{v}")]
    ImageNotInduced { u: u32, v: u32, fu: u32, fv: u32 },
    #[error("simpliciality: vertex {x} over star vertex {v} has non-adjacent neighbors {a} and {b}")]
    NotSimplicial { x: u32, v: u32, a: u32, b: u32 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph-core: {0}")]
    Graph(String),
    #[error("graph-core: {0}")]
    Layering(#[from] LayeringViolation),
    #[error("overlay-core: {0}")]
    Overlay(#[from] OverlayViolation),
    #[error("overlay-core: {0}")]
    OverlayOp(String),
    #[error("system-algebra: {0}")]
    System(String),
    #[error("builders: {0}")]
    Build(String),
    #[error("exact-solvers: {0}")]
    Solve(String),
    #[error("exact-solvers: infeasible: {0}")]
    Infeasible(String),
    #[error("ptas-engines: {0}")]
    Ptas(String),
    #[error("ptas-engines: certificate failure: {0}")]
    Certificate(String),
    #[error("cli: {0}")]
    Cli(String),
}

pub type Result<T> = std::result::Result<T, Error>;
