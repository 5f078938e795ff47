//! Deterministic graph family generators used by the CLI and the test corpus.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Graph("path needs at least one vertex".into()));
    }
    let edges: Vec<(u32, u32)> = (0..n as u32).zip(1..n as u32).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Graph("cycle needs at least three vertices".into()));
    }
    let mut edges: Vec<(u32, u32)> = (0..n as u32).zip(1..n as u32).collect();
    edges.push((n as u32 - 1, 0));
    Graph::from_edges(n, &edges)
}

/// `a` by `b` grid with row-major ids: vertex `(i, j)` is `i*b + j`.
pub fn grid(a: usize, b: usize) -> Result<Graph> {
    if a == 0 || b == 0 {
        return Err(Error::Graph("grid sides must be positive".into()));
    }
    let mut edges = Vec::new();
    for i in 0..a {
        for j in 0..b {
            let v = (i * b + j) as u32;
            if j + 1 < b {
                edges.push((v, v + 1));
            }
            if i + 1 < a {
                edges.push((v, v + b as u32));
            }
        }
    }
    Graph::from_edges(a * b, &edges)
}

/// `n` by `n` grid plus one apex vertex (id `n*n`) adjacent to every grid vertex.
pub fn apexed_grid(n: usize) -> Result<Graph> {
    let base = grid(n, n)?;
    let apex = (n * n) as u32;
    let mut edges = base.edges();
    for v in 0..apex {
        edges.push((v, apex));
    }
    Graph::from_edges(n * n + 1, &edges)
}

/// `n^3` vertices at integer coordinates in a cube; every pair of vertices
/// lying in a common unit subcube is adjacent. Vertex `(x, y, z)` has id
/// `x*n*n + y*n + z`.
pub fn diag_grid(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Graph("diagonal grid side must be positive".into()));
    }
    let id = |x: usize, y: usize, z: usize| (x * n * n + y * n + z) as u32;
    let mut edges = Vec::new();
    for x in 0..n.saturating_sub(1) {
        for y in 0..n - 1 {
            for z in 0..n - 1 {
                let mut cube = Vec::with_capacity(8);
                for dx in 0..2 {
                    for dy in 0..2 {
                        for dz in 0..2 {
                            cube.push(id(x + dx, y + dy, z + dz));
                        }
                    }
                }
                for i in 0..cube.len() {
                    for j in i + 1..cube.len() {
                        edges.push((cube[i], cube[j]));
                    }
                }
            }
        }
    }
    Graph::from_edges(n * n * n, &edges)
}

/// Uniform random attachment tree: vertex `v` picks a parent uniformly from
/// `0..v`. Seeded, so the same seed always yields the same tree.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Graph("tree needs at least one vertex".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n as u32 {
        let p = rng.gen_range(0..v);
        edges.push((p, v));
    }
    Graph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_cycle_sizes() {
        assert_eq!(path(1).unwrap().n(), 1);
        assert_eq!(path(5).unwrap().m(), 4);
        assert!(cycle(2).is_err());
        assert_eq!(cycle(5).unwrap().m(), 5);
    }

    #[test]
    fn apexed_grid_two() {
        let g = apexed_grid(2).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.m(), 8);
        assert_eq!(g.degree(4), 4);
    }

    #[test]
    fn diag_grid_two_is_k8() {
        let g = diag_grid(2).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.m(), 28);
        assert!(g.vertices().all(|v| g.degree(v) == 7));
    }

    #[test]
    fn diag_grid_three_contains_axis_edges_and_diagonals() {
        let g = diag_grid(3).unwrap();
        assert_eq!(g.n(), 27);
        // Axis neighbor and a body diagonal of the first subcube.
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(0, 9 + 3 + 1));
        // Distant pair shares no subcube.
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn random_tree_is_deterministic_and_connected() {
        let a = random_tree(50, 42).unwrap();
        let b = random_tree(50, 42).unwrap();
        let c = random_tree(50, 43).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_ne!(a.edges(), c.edges());
        assert_eq!(a.m(), 49);
        assert!(a.is_connected());
    }
}
