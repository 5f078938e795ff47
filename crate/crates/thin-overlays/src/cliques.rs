//! Degeneracy orderings, clique enumeration, and the star augmentation that
//! adds one vertex per non-empty clique.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default limit on the number of enumerated cliques before giving up.
pub const DEFAULT_CLIQUE_CAP: usize = 1 << 20;

/// Degeneracy ordering (repeated minimum-degree removal, ties to the smaller
/// id), the degeneracy, and all non-empty cliques. Cliques are sorted vertex
/// lists, listed in (size, lexicographic) order, each enumerated exactly once
/// via subsets of each vertex's later neighbors.
pub fn degeneracy_and_cliques(g: &Graph) -> Result<(Vec<u32>, usize, Vec<Vec<u32>>)> {
    degeneracy_and_cliques_capped(g, DEFAULT_CLIQUE_CAP)
}

pub fn degeneracy_and_cliques_capped(
    g: &Graph,
    cap: usize,
) -> Result<(Vec<u32>, usize, Vec<Vec<u32>>)> {
    let n = g.n();
    let mut degree: Vec<usize> = (0..n as u32).map(|v| g.degree(v)).collect();
    let mut buckets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n.max(1)];
    for v in 0..n as u32 {
        buckets[degree[v as usize]].insert(v);
    }
    let mut alive = vec![true; n];
    let mut ordering = Vec::with_capacity(n);
    let mut degeneracy = 0usize;
    for _ in 0..n {
        let d = (0..buckets.len())
            .find(|&d| !buckets[d].is_empty())
            .expect("an alive vertex remains");
        let v = *buckets[d].iter().next().unwrap();
        buckets[d].remove(&v);
        alive[v as usize] = false;
        degeneracy = degeneracy.max(d);
        ordering.push(v);
        for &w in g.neighbors(v) {
            if alive[w as usize] {
                let dw = degree[w as usize];
                buckets[dw].remove(&w);
                buckets[dw - 1].insert(w);
                degree[w as usize] = dw - 1;
            }
        }
    }

    let mut position = vec![0usize; n];
    for (i, &v) in ordering.iter().enumerate() {
        position[v as usize] = i;
    }
    let mut cliques: Vec<Vec<u32>> = Vec::new();
    for &v in &ordering {
        // Neighbors removed after v; at most `degeneracy` of them.
        let later: Vec<u32> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| position[w as usize] > position[v as usize])
            .collect();
        let mut current = vec![v];
        extend_cliques(g, &later, 0, &mut current, &mut cliques, cap)?;
    }
    for c in &mut cliques {
        c.sort_unstable();
    }
    cliques.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
    Ok((ordering, degeneracy, cliques))
}

fn extend_cliques(
    g: &Graph,
    candidates: &[u32],
    from: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
    cap: usize,
) -> Result<()> {
    if out.len() >= cap {
        return Err(Error::Graph(format!(
            "clique enumeration exceeded the cap of {cap}"
        )));
    }
    out.push(current.clone());
    for i in from..candidates.len() {
        let w = candidates[i];
        if current.iter().all(|&u| g.has_edge(u, w)) {
            current.push(w);
            extend_cliques(g, candidates, i + 1, current, out, cap)?;
            current.pop();
        }
    }
    Ok(())
}

/// A graph together with its star augmentation: one extra vertex per
/// non-empty clique, adjacent to exactly that clique. Star vertex `i` gets id
/// `base.n() + i`, with cliques numbered in (size, lexicographic) order.
#[derive(Clone, Debug)]
pub struct StarGraph {
    base: Graph,
    star: Graph,
    cliques: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, u32>,
}

impl StarGraph {
    pub fn base(&self) -> &Graph {
        &self.base
    }

    /// The augmented graph; base vertices keep their ids.
    pub fn graph(&self) -> &Graph {
        &self.star
    }

    pub fn cliques(&self) -> &[Vec<u32>] {
        &self.cliques
    }

    pub fn star_count(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_star_vertex(&self, v: u32) -> bool {
        v as usize >= self.base.n()
    }

    /// The clique a star vertex stands for.
    pub fn clique_of(&self, star_vertex: u32) -> &[u32] {
        &self.cliques[star_vertex as usize - self.base.n()]
    }

    /// The star vertex standing for a clique (vertices in any order).
    pub fn star_of(&self, clique: &[u32]) -> Option<u32> {
        let mut key = clique.to_vec();
        key.sort_unstable();
        self.index.get(&key).map(|&i| self.base.n() as u32 + i)
    }
}

/// Builds the star augmentation of `g`, enumerating cliques up to the
/// default cap.
pub fn star_graph(g: &Graph) -> Result<StarGraph> {
    star_graph_capped(g, DEFAULT_CLIQUE_CAP)
}

pub fn star_graph_capped(g: &Graph, cap: usize) -> Result<StarGraph> {
    let (_, _, cliques) = degeneracy_and_cliques_capped(g, cap)?;
    let n = g.n();
    let mut edges = g.edges();
    for (i, k) in cliques.iter().enumerate() {
        let sv = (n + i) as u32;
        for &v in k {
            edges.push((v, sv));
        }
    }
    let star = Graph::from_edges(n + cliques.len(), &edges)?;
    let index = cliques
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i as u32))
        .collect();
    Ok(StarGraph {
        base: g.clone(),
        star,
        cliques,
        index,
    })
}
