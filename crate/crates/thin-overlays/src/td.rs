//! Rooted tree decompositions: validation, depth bookkeeping, and a greedy
//! elimination-ordering builder used to produce width certificates.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A rooted tree decomposition. Bags are sorted vertex lists; the tree is
/// stored as a parent array with a single root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<u32>>,
    parent: Vec<Option<usize>>,
    root: usize,
}

impl TreeDecomposition {
    pub fn new(mut bags: Vec<Vec<u32>>, parent: Vec<Option<usize>>) -> Result<TreeDecomposition> {
        if bags.is_empty() || bags.len() != parent.len() {
            return Err(Error::Graph(
                "decomposition needs one parent entry per bag".into(),
            ));
        }
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        let mut roots = parent.iter().filter(|p| p.is_none());
        let root = match (roots.next(), roots.next()) {
            (Some(_), None) => parent.iter().position(|p| p.is_none()).unwrap(),
            _ => return Err(Error::Graph("decomposition tree needs exactly one root".into())),
        };
        let td = TreeDecomposition { bags, parent, root };
        // Every node must reach the root without revisiting a node. Nodes
        // already known to reach it stop the walk early, which keeps the
        // scan linear even when the tree is one long chain.
        let len = td.parent.len();
        let mut reaches_root = vec![false; len];
        reaches_root[td.root] = true;
        for start in 0..len {
            let mut trail = Vec::new();
            let mut cur = start;
            while !reaches_root[cur] {
                let Some(p) = td.parent[cur] else { break };
                if p >= len {
                    return Err(Error::Graph(format!("bag parent {p} out of range")));
                }
                trail.push(cur);
                if trail.len() > len {
                    return Err(Error::Graph("decomposition tree contains a cycle".into()));
                }
                cur = p;
            }
            for v in trail {
                reaches_root[v] = true;
            }
        }
        Ok(td)
    }

    /// Builds from an undirected edge list by rooting the tree at `root`.
    pub fn from_tree_edges(
        bags: Vec<Vec<u32>>,
        edges: &[(usize, usize)],
        root: usize,
    ) -> Result<TreeDecomposition> {
        let n = bags.len();
        if n == 0 {
            return Err(Error::Graph("decomposition needs at least one bag".into()));
        }
        if root >= n {
            return Err(Error::Graph("decomposition root out of range".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Graph("decomposition tree edge out of range".into()));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut reached = 0;
        while let Some(u) = stack.pop() {
            reached += 1;
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    stack.push(w);
                }
            }
        }
        if reached != n || edges.len() != n - 1 {
            return Err(Error::Graph("decomposition tree is not a tree".into()));
        }
        TreeDecomposition::new(bags, parent)
    }

    /// Single-bag decomposition holding all of `0..n` (or one empty bag).
    pub fn single_bag(n: usize) -> TreeDecomposition {
        TreeDecomposition {
            bags: vec![(0..n as u32).collect()],
            parent: vec![None],
            root: 0,
        }
    }

    pub fn bags(&self) -> &[Vec<u32>] {
        &self.bags
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Width = maximum bag size minus one (`-1` for all-empty bags).
    pub fn width(&self) -> i64 {
        self.bags.iter().map(|b| b.len() as i64).max().unwrap_or(0) - 1
    }

    /// Maximum intersection size between a bag and its parent bag.
    pub fn adhesion(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                let inter = intersect_sorted(&self.bags[i], &self.bags[*p]);
                best = best.max(inter);
            }
        }
        best
    }

    /// Tree edges as (parent, child) pairs.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (p, i)))
            .collect()
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.len()];
        for (i, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(i);
            }
        }
        ch
    }

    /// Depth of each node below the root (root has depth 0).
    pub fn node_depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.len()];
        let mut known = vec![false; self.len()];
        known[self.root] = true;
        for start in 0..self.len() {
            let mut chain = Vec::new();
            let mut cur = start;
            while !known[cur] {
                chain.push(cur);
                cur = self.parent[cur].expect("non-root nodes have parents");
            }
            let mut d = depth[cur];
            for &node in chain.iter().rev() {
                d += 1;
                depth[node] = d;
                known[node] = true;
            }
        }
        depth
    }

    /// For each vertex, the minimum and maximum depth of bags containing it.
    pub fn vertex_depth_ranges(&self, n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let depths = self.node_depths();
        let mut min_d = vec![usize::MAX; n];
        let mut max_d = vec![0usize; n];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                let v = v as usize;
                if v >= n {
                    return Err(Error::Graph(format!("bag vertex {v} out of range")));
                }
                min_d[v] = min_d[v].min(depths[i]);
                max_d[v] = max_d[v].max(depths[i]);
            }
        }
        if let Some(v) = min_d.iter().position(|&d| d == usize::MAX) {
            return Err(Error::Graph(format!("vertex {v} is not covered by any bag")));
        }
        Ok((min_d, max_d))
    }

    /// Full validity check against a host graph: coverage of vertices and
    /// edges, and connectivity of each vertex's bag set.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let n = g.n();
        let mut bags_of: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v as usize >= n {
                    return Err(Error::Graph(format!("bag vertex {v} out of range")));
                }
                bags_of[v as usize].push(i);
            }
        }
        if let Some(v) = bags_of.iter().position(|b| b.is_empty()) {
            if n > 0 {
                return Err(Error::Graph(format!("vertex {v} is not covered by any bag")));
            }
        }
        for (u, v) in g.edges() {
            let bu = &bags_of[u as usize];
            if !bu.iter().any(|&i| self.bags[i].binary_search(&v).is_ok()) {
                return Err(Error::Graph(format!("edge {u}-{v} is not inside any bag")));
            }
        }
        // Connectivity: the bags containing v must form one tree component.
        let children = self.children();
        for v in 0..n {
            let bags = &bags_of[v];
            if bags.is_empty() {
                continue;
            }
            let inset: BTreeSet<usize> = bags.iter().copied().collect();
            let mut seen = BTreeSet::new();
            let mut stack = vec![bags[0]];
            seen.insert(bags[0]);
            while let Some(node) = stack.pop() {
                let mut step = |other: usize| {
                    if inset.contains(&other) && seen.insert(other) {
                        stack.push(other);
                    }
                };
                if let Some(p) = self.parent[node] {
                    step(p);
                }
                for &c in &children[node] {
                    step(c);
                }
            }
            if seen.len() != inset.len() {
                return Err(Error::Graph(format!(
                    "bags containing vertex {v} do not form a connected subtree"
                )));
            }
        }
        Ok(())
    }

    /// Applies a vertex relabeling to every bag (used when projecting a
    /// decomposition built on local subgraph ids back onto host ids).
    pub fn relabel(&self, map: impl Fn(u32) -> u32) -> TreeDecomposition {
        let bags = self
            .bags
            .iter()
            .map(|b| {
                let mut nb: Vec<u32> = b.iter().map(|&v| map(v)).collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        TreeDecomposition {
            bags,
            parent: self.parent.clone(),
            root: self.root,
        }
    }

    /// Keeps only the vertices satisfying `keep` in every bag.
    pub fn filter_bags(&self, keep: impl Fn(u32) -> bool) -> TreeDecomposition {
        let bags = self
            .bags
            .iter()
            .map(|b| b.iter().copied().filter(|&v| keep(v)).collect())
            .collect();
        TreeDecomposition {
            bags,
            parent: self.parent.clone(),
            root: self.root,
        }
    }

    /// Adds `extra` vertices to every bag.
    pub fn augment_all_bags(&self, extra: &[u32]) -> TreeDecomposition {
        let mut out = self.clone();
        for bag in &mut out.bags {
            bag.extend_from_slice(extra);
            bag.sort_unstable();
            bag.dedup();
        }
        out
    }

    /// Attaches a new leaf bag under `at`, returning the new node index.
    pub fn attach_leaf(&mut self, at: usize, mut bag: Vec<u32>) -> usize {
        bag.sort_unstable();
        bag.dedup();
        self.bags.push(bag);
        self.parent.push(Some(at));
        self.bags.len() - 1
    }

    /// Appends every node of `other` and hangs its root under `at`. Returns
    /// the index offset: node `i` of `other` becomes node `offset + i` here.
    /// Bags of `other` must already use this decomposition's vertex labels.
    pub fn graft(&mut self, other: &TreeDecomposition, at: usize) -> usize {
        let offset = self.bags.len();
        for (node, bag) in other.bags.iter().enumerate() {
            self.bags.push(bag.clone());
            self.parent.push(match other.parent[node] {
                Some(p) => Some(offset + p),
                None => Some(at),
            });
        }
        offset
    }

    /// Finds a bag containing all vertices of `set`, if any.
    pub fn bag_containing(&self, set: &[u32]) -> Option<usize> {
        self.bags
            .iter()
            .position(|bag| set.iter().all(|v| bag.binary_search(v).is_ok()))
    }

    /// Merges decompositions into one forest hung under a chain of empty
    /// bags: chain node `i` is the parent of member `i`'s root, and of chain
    /// node `i+1`. Bags must already use the combined vertex labels.
    pub fn forest_with_empty_chain(members: &[TreeDecomposition]) -> TreeDecomposition {
        let mut bags: Vec<Vec<u32>> = Vec::new();
        let mut parent: Vec<Option<usize>> = Vec::new();
        for i in 0..members.len() {
            bags.push(Vec::new());
            parent.push(if i == 0 { None } else { Some(i - 1) });
        }
        if members.is_empty() {
            bags.push(Vec::new());
            parent.push(None);
        }
        let chain_len = members.len().max(1);
        let mut offset = chain_len;
        for (i, td) in members.iter().enumerate() {
            for (node, bag) in td.bags.iter().enumerate() {
                bags.push(bag.clone());
                parent.push(match td.parent[node] {
                    Some(p) => Some(offset + p),
                    None => Some(i),
                });
            }
            offset += td.len();
        }
        TreeDecomposition {
            bags,
            parent,
            root: 0,
        }
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Greedy minimum-fill elimination ordering turned into a tree decomposition.
/// Ties go to the smaller vertex id. The result is validated before return.
pub fn min_fill_decomposition(g: &Graph) -> Result<TreeDecomposition> {
    let n = g.n();
    if n == 0 {
        return Ok(TreeDecomposition {
            bags: vec![Vec::new()],
            parent: vec![None],
            root: 0,
        });
    }
    let mut adj: Vec<BTreeSet<u32>> = (0..n as u32)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive: BTreeSet<u32> = (0..n as u32).collect();
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut elim_bag: Vec<Vec<u32>> = vec![Vec::new(); n];
    while !alive.is_empty() {
        // Scanning ids in ascending order means the first vertex achieving
        // the minimum wins, so stopping at fill 0 keeps the tie rule intact.
        let mut best: Option<(usize, u32)> = None;
        for &v in &alive {
            let mut fill = 0usize;
            'pairs: for (i, &a) in adj[v as usize].iter().enumerate() {
                for b in adj[v as usize].iter().skip(i + 1) {
                    if !adj[a as usize].contains(b) {
                        fill += 1;
                        if best.is_some_and(|(bf, _)| fill >= bf) {
                            break 'pairs;
                        }
                    }
                }
            }
            if best.map_or(true, |(bf, _)| fill < bf) {
                best = Some((fill, v));
                if fill == 0 {
                    break;
                }
            }
        }
        let pick = best.unwrap().1;
        let nbrs: Vec<u32> = adj[pick as usize].iter().copied().collect();
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                adj[nbrs[i] as usize].insert(nbrs[j]);
                adj[nbrs[j] as usize].insert(nbrs[i]);
            }
        }
        for &w in &nbrs {
            adj[w as usize].remove(&pick);
        }
        let mut bag = nbrs.clone();
        bag.push(pick);
        bag.sort_unstable();
        elim_bag[pick as usize] = bag;
        adj[pick as usize].clear();
        alive.remove(&pick);
        order.push(pick);
    }
    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i;
    }
    // Bag i belongs to the i-th eliminated vertex; its parent is the bag of
    // the earliest-eliminated later neighbor, or the next bag in order.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut bags: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, &v) in order.iter().enumerate() {
        bags[i] = elim_bag[v as usize].clone();
        if i + 1 < n {
            let up = bags[i]
                .iter()
                .filter(|&&w| w != v)
                .map(|&w| position[w as usize])
                .min()
                .unwrap_or(i + 1);
            parent[i] = Some(up);
        }
    }
    let td = TreeDecomposition::new(bags, parent)?;
    td.validate(g)?;
    Ok(td)
}
