//! Layerings: ordered partitions of the vertex set where every edge stays
//! within one layer or joins consecutive layers.

use crate::error::{Error, LayeringViolation, Result};
use crate::graph::Graph;
use crate::td::TreeDecomposition;

/// An ordered partition `V_1, ..., V_d` of the vertices of some host graph.
/// Layer indices are 1-based in the math and in file formats; internally the
/// `layers` vector is 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    layers: Vec<Vec<u32>>,
}

impl Layering {
    pub fn new(mut layers: Vec<Vec<u32>>) -> Layering {
        for l in &mut layers {
            l.sort_unstable();
            l.dedup();
        }
        Layering { layers }
    }

    pub fn layers(&self) -> &[Vec<u32>] {
        &self.layers
    }

    /// Number of layers `d`.
    pub fn d(&self) -> usize {
        self.layers.len()
    }

    /// Map from vertex id to 0-based layer index. Fails if the layering is
    /// not a partition of `0..n`.
    pub fn layer_map(&self, n: usize) -> Result<Vec<usize>> {
        let mut map = vec![usize::MAX; n];
        for (i, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                if v as usize >= n {
                    return Err(LayeringViolation::NotPartition {
                        vertex: v,
                        problem: "is out of range",
                    }
                    .into());
                }
                if map[v as usize] != usize::MAX {
                    return Err(LayeringViolation::NotPartition {
                        vertex: v,
                        problem: "appears in two layers",
                    }
                    .into());
                }
                map[v as usize] = i;
            }
        }
        if let Some(v) = map.iter().position(|&i| i == usize::MAX) {
            return Err(LayeringViolation::NotPartition {
                vertex: v as u32,
                problem: "is missing from all layers",
            }
            .into());
        }
        Ok(map)
    }

    /// Groups consecutive layers into bands of `band` layers each. The result
    /// is again a layering of the same host.
    pub fn coarsen(&self, band: usize) -> Layering {
        assert!(band >= 1);
        let mut out: Vec<Vec<u32>> = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            if i % band == 0 {
                out.push(Vec::new());
            }
            out.last_mut().unwrap().extend_from_slice(layer);
        }
        Layering::new(out)
    }
}

/// Checks that `l` partitions `V(g)` and that every edge of `g` stays within
/// a layer or joins consecutive layers. Returns the first violation found,
/// scanning edges in ascending order.
pub fn verify_layering(g: &Graph, l: &Layering) -> Result<()> {
    let map = l.layer_map(g.n())?;
    for (u, v) in g.edges() {
        let (lu, lv) = (map[u as usize], map[v as usize]);
        if lu.abs_diff(lv) > 1 {
            return Err(LayeringViolation::EdgeSpan {
                u,
                v,
                layer_u: lu + 1,
                layer_v: lv + 1,
            }
            .into());
        }
    }
    Ok(())
}

/// BFS layering from a root set: layer `i` holds the vertices at distance
/// `i-1` from the roots. Components not reached by any root are layered
/// separately from their minimum-id vertex and appended after the reached
/// layers, in order of minimum id.
pub fn bfs_layering(g: &Graph, roots: &[u32]) -> Result<Layering> {
    if roots.is_empty() {
        return Err(Error::Graph("bfs layering needs at least one root".into()));
    }
    for &r in roots {
        if r as usize >= g.n() {
            return Err(Error::Graph(format!("root {r} out of range")));
        }
    }
    let mut layers = distance_layers(g, roots);
    let mut placed = vec![false; g.n()];
    for layer in &layers {
        for &v in layer {
            placed[v as usize] = true;
        }
    }
    for comp in g.components() {
        if !placed[comp[0] as usize] {
            layers.extend(distance_layers(g, &[comp[0]]));
        }
    }
    Ok(Layering::new(layers))
}

fn distance_layers(g: &Graph, roots: &[u32]) -> Vec<Vec<u32>> {
    let dist = g.distances_from(roots);
    let mut layers: Vec<Vec<u32>> = Vec::new();
    for v in 0..g.n() as u32 {
        let d = dist[v as usize];
        if d == u32::MAX {
            continue;
        }
        while layers.len() <= d as usize {
            layers.push(Vec::new());
        }
        layers[d as usize].push(v);
    }
    layers
}

/// Layering from depth bands of a rooted tree decomposition whose vertices
/// each span at most `a` consecutive bag depths: vertex `v` goes to band
/// `floor(min_depth(v) / a)`, where `min_depth(v)` is the smallest root
/// distance of a bag containing `v`.
pub fn depth_band_layering(g: &Graph, td: &TreeDecomposition, a: usize) -> Result<Layering> {
    if a == 0 {
        return Err(Error::Graph("depth band width must be positive".into()));
    }
    td.validate(g)?;
    let (min_depth, max_depth) = td.vertex_depth_ranges(g.n())?;
    for v in 0..g.n() {
        if max_depth[v] - min_depth[v] + 1 > a {
            return Err(Error::Graph(format!(
                "vertex {v} spans {} bag depths, more than the bound {a}",
                max_depth[v] - min_depth[v] + 1
            )));
        }
    }
    let bands = min_depth.iter().map(|&d| d / a).max().unwrap_or(0) + 1;
    let mut layers = vec![Vec::new(); bands];
    for v in 0..g.n() {
        layers[min_depth[v] / a].push(v as u32);
    }
    let l = Layering::new(layers);
    verify_layering(g, &l)?;
    Ok(l)
}

/// Witness that a layering is not shadow-complete: a suffix component whose
/// neighborhood in the previous layer contains a non-adjacent pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowWitness {
    /// 1-based index of the layer the offending neighborhood lies in.
    pub layer: usize,
    /// A vertex of the suffix component.
    pub component_vertex: u32,
    /// Non-adjacent pair inside the neighborhood.
    pub pair: (u32, u32),
}

/// Checks shadow-completeness: for each `i` and each component `C` of the
/// graph induced by layers after `i`, the neighbors of `C` in layer `i` must
/// induce a clique. Returns the first witness if the check fails.
pub fn shadow_completeness_witness(g: &Graph, l: &Layering) -> Result<Option<ShadowWitness>> {
    let map = l.layer_map(g.n())?;
    verify_layering(g, l)?;
    for i in 0..l.d().saturating_sub(1) {
        let suffix: Vec<u32> = (0..g.n() as u32).filter(|&v| map[v as usize] > i).collect();
        let sub = crate::graph::Subgraph::induced(g, &suffix)?;
        for comp in sub.graph().components() {
            let mut nbrs: Vec<u32> = Vec::new();
            for &lc in &comp {
                let hv = sub.host_of(lc);
                for &w in g.neighbors(hv) {
                    if map[w as usize] == i {
                        nbrs.push(w);
                    }
                }
            }
            nbrs.sort_unstable();
            nbrs.dedup();
            for a in 0..nbrs.len() {
                for b in a + 1..nbrs.len() {
                    if !g.has_edge(nbrs[a], nbrs[b]) {
                        return Ok(Some(ShadowWitness {
                            layer: i + 1,
                            component_vertex: sub.host_of(comp[0]),
                            pair: (nbrs[a], nbrs[b]),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::LayeringViolation;

    fn path(n: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        edges.push((n as u32 - 1, 0));
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn bfs_on_path_gives_singletons() {
        let l = bfs_layering(&path(3), &[0]).unwrap();
        assert_eq!(l.layers(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn bfs_on_c6() {
        let l = bfs_layering(&cycle(6), &[0]).unwrap();
        assert_eq!(l.layers(), &[vec![0], vec![1, 5], vec![2, 4], vec![3]]);
    }

    #[test]
    fn bfs_on_grid_corner_gives_diagonals() {
        // 3x3 grid, row-major ids; corner 0. Distances follow x+y.
        let g = crate::generators::grid(3, 3).unwrap();
        let l = bfs_layering(&g, &[0]).unwrap();
        assert_eq!(l.d(), 5);
        assert_eq!(l.layers()[0], vec![0]);
        assert_eq!(l.layers()[1], vec![1, 3]);
        assert_eq!(l.layers()[2], vec![2, 4, 6]);
        assert_eq!(l.layers()[4], vec![8]);
        verify_layering(&g, &l).unwrap();
    }

    #[test]
    fn bfs_appends_unreached_components() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let l = bfs_layering(&g, &[0]).unwrap();
        assert_eq!(l.layers(), &[vec![0], vec![1], vec![2], vec![3]]);
        verify_layering(&g, &l).unwrap();
    }

    #[test]
    fn verify_rejects_layer_skips() {
        let g = path(3);
        let l = Layering::new(vec![vec![0, 2], vec![1]]);
        verify_layering(&g, &l).unwrap();
        let bad = Layering::new(vec![vec![0], vec![1, 2]]);
        verify_layering(&g, &bad).unwrap();
        let worse = Layering::new(vec![vec![0], vec![1], vec![], vec![2]]);
        match verify_layering(&g, &worse) {
            Err(crate::error::Error::Layering(LayeringViolation::EdgeSpan { u: 1, v: 2, .. })) => {}
            other => panic!("expected edge-span violation, got {other:?}"),
        }
    }

    #[test]
    fn verify_rejects_non_partitions() {
        let g = path(2);
        assert!(verify_layering(&g, &Layering::new(vec![vec![0]])).is_err());
        assert!(verify_layering(&g, &Layering::new(vec![vec![0, 1], vec![1]])).is_err());
    }

    #[test]
    fn coarsen_groups_layers() {
        let l = Layering::new(vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);
        let c = l.coarsen(2);
        assert_eq!(c.layers(), &[vec![0, 1], vec![2, 3], vec![4]]);
    }

    #[test]
    fn tree_bfs_is_shadow_complete() {
        let g = crate::generators::random_tree(40, 7).unwrap();
        let l = bfs_layering(&g, &[0]).unwrap();
        assert_eq!(shadow_completeness_witness(&g, &l).unwrap(), None);
        // Coarsening keeps the property on trees: suffix components still
        // attach through a single parent vertex.
        let c = l.coarsen(3);
        assert_eq!(shadow_completeness_witness(&g, &c).unwrap(), None);
    }

    #[test]
    fn antipodal_c4_layering_is_rejected() {
        let g = cycle(4);
        let l = Layering::new(vec![vec![0, 2], vec![1, 3]]);
        verify_layering(&g, &l).unwrap();
        let w = shadow_completeness_witness(&g, &l).unwrap().unwrap();
        assert_eq!(w.layer, 1);
        assert_eq!(w.pair, (0, 2));
    }
}
