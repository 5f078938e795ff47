//! Undirected simple graphs with contiguous vertex ids, plus subgraph views.
//!
//! Vertex ids are `u32` values in `0..n`. Adjacency lists are kept sorted and
//! deduplicated so that neighbor scans and edge tests are deterministic.

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Content hash of a graph, used to bind overlays to their host without
/// storing the host inside every serialized overlay.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct HostHash([u8; 16]);

impl HostHash {
    pub fn hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<HostHash> {
        if s.len() != 32 {
            return None;
        }
        let mut out = [0u8; 16];
        for (i, chunk) in s.as_bytes().chunks(2).enumerate() {
            let hi = (chunk[0] as char).to_digit(16)?;
            let lo = (chunk[1] as char).to_digit(16)?;
            out[i] = (hi * 16 + lo) as u8;
        }
        Some(HostHash(out))
    }
}

impl std::fmt::Display for HostHash {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.hex())
    }
}

impl Serialize for HostHash {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.hex())
    }
}

impl<'de> Deserialize<'de> for HostHash {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        HostHash::from_hex(&s).ok_or_else(|| serde::de::Error::custom("bad host hash"))
    }
}

/// A finite simple undirected graph.
pub struct Graph {
    adj: Vec<Vec<u32>>,
    // Adjacency is immutable after construction, so the content hash is
    // computed at most once and then reused; builders bind thousands of
    // overlays to one host and re-hashing it each time dominated profiles.
    hash: OnceLock<HostHash>,
}

impl Clone for Graph {
    fn clone(&self) -> Graph {
        let hash = OnceLock::new();
        if let Some(h) = self.hash.get() {
            let _ = hash.set(*h);
        }
        Graph { adj: self.adj.clone(), hash }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Graph) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Graph {}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph").field("adj", &self.adj).finish()
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Graph {
        Graph { adj: vec![Vec::new(); n], hash: OnceLock::new() }
    }

    /// Builds a graph from an edge list. Rejects loops and out-of-range ids;
    /// duplicate edges are merged.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Graph(format!(
                    "edge {u}-{v} out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::Graph(format!("loop at vertex {u}")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj, hash: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edge list with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.m());
        for u in 0..self.adj.len() as u32 {
            for &v in &self.adj[u as usize] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.adj.len() as u32
    }

    /// BFS distances from a set of roots; unreachable vertices get `u32::MAX`.
    pub fn distances_from(&self, roots: &[u32]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n()];
        let mut queue = VecDeque::new();
        for &r in roots {
            if dist[r as usize] == u32::MAX {
                dist[r as usize] = 0;
                queue.push_back(r);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &w in self.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs BFS distances, `u32::MAX` for unreachable pairs.
    pub fn all_pairs_distances(&self) -> Vec<Vec<u32>> {
        (0..self.n() as u32).map(|v| self.distances_from(&[v])).collect()
    }

    /// Connected components as sorted vertex lists, ordered by minimum id.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() as u32 {
            if seen[s as usize] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::new();
            seen[s as usize] = true;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &w in self.neighbors(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// Stable content hash over the vertex count and sorted edge list.
    pub fn content_hash(&self) -> HostHash {
        *self.hash.get_or_init(|| {
            let mut h = Sha256::new();
            h.update(b"graph\0");
            h.update((self.n() as u64).to_le_bytes());
            for (u, v) in self.edges() {
                h.update(u.to_le_bytes());
                h.update(v.to_le_bytes());
            }
            let digest = h.finalize();
            let mut out = [0u8; 16];
            out.copy_from_slice(&digest[..16]);
            HostHash(out)
        })
    }
}

/// A subgraph of a host graph: a vertex subset together with a subset of the
/// induced edges, re-indexed as a standalone [`Graph`] with local ids.
///
/// `vertices[local]` gives the host id of local vertex `local`; the list is
/// strictly increasing, so host-to-local lookups are binary searches.
#[derive(Clone, Debug)]
pub struct Subgraph {
    host_hash: HostHash,
    vertices: Vec<u32>,
    graph: Graph,
}

impl Subgraph {
    /// The subgraph induced by `verts` (host ids, any order, duplicates rejected).
    pub fn induced(host: &Graph, verts: &[u32]) -> Result<Subgraph> {
        let vertices = check_vertex_list(host, verts)?;
        let mut edges = Vec::new();
        for (local, &hu) in vertices.iter().enumerate() {
            for &hv in host.neighbors(hu) {
                if hv > hu {
                    if let Ok(lv) = vertices.binary_search(&hv) {
                        edges.push((local as u32, lv as u32));
                    }
                }
            }
        }
        Ok(Subgraph {
            host_hash: host.content_hash(),
            graph: Graph::from_edges(vertices.len(), &edges)?,
            vertices,
        })
    }

    /// A subgraph on `verts` with an explicit edge subset (host id pairs).
    /// Every listed edge must exist in the host and join listed vertices.
    pub fn with_edges(host: &Graph, verts: &[u32], edges: &[(u32, u32)]) -> Result<Subgraph> {
        let vertices = check_vertex_list(host, verts)?;
        let mut local_edges = Vec::with_capacity(edges.len());
        for &(hu, hv) in edges {
            if !host.has_edge(hu, hv) {
                return Err(Error::Graph(format!("{hu}-{hv} is not a host edge")));
            }
            let lu = vertices
                .binary_search(&hu)
                .map_err(|_| Error::Graph(format!("edge endpoint {hu} not in subgraph")))?;
            let lv = vertices
                .binary_search(&hv)
                .map_err(|_| Error::Graph(format!("edge endpoint {hv} not in subgraph")))?;
            local_edges.push((lu as u32, lv as u32));
        }
        Ok(Subgraph {
            host_hash: host.content_hash(),
            graph: Graph::from_edges(vertices.len(), &local_edges)?,
            vertices,
        })
    }

    /// The whole host as a subgraph (identity embedding).
    pub fn whole(host: &Graph) -> Subgraph {
        let verts: Vec<u32> = host.vertices().collect();
        Subgraph::induced(host, &verts).expect("identity subgraph is always valid")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Host ids of the subgraph vertices, indexed by local id.
    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn host_hash(&self) -> HostHash {
        self.host_hash
    }

    pub fn host_of(&self, local: u32) -> u32 {
        self.vertices[local as usize]
    }

    pub fn local_of(&self, host_id: u32) -> Option<u32> {
        self.vertices.binary_search(&host_id).ok().map(|i| i as u32)
    }
}

fn check_vertex_list(host: &Graph, verts: &[u32]) -> Result<Vec<u32>> {
    let mut vertices = verts.to_vec();
    vertices.sort_unstable();
    let before = vertices.len();
    vertices.dedup();
    if vertices.len() != before {
        return Err(Error::Graph("duplicate vertex in subgraph list".into()));
    }
    if let Some(&v) = vertices.last() {
        if v as usize >= host.n() {
            return Err(Error::Graph(format!("vertex {v} out of host range")));
        }
    }
    Ok(vertices)
}
