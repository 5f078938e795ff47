//! Nice-form tree decompositions: every node is a leaf, a single-vertex
//! introduce, a single-vertex forget, or a join of two equal bags. The
//! dynamic programs walk this form because each transition touches one
//! vertex (or merges two tables) at a time.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::td::TreeDecomposition;

/// One node of a nice decomposition. Children are identified by index into
/// the node list; the list is in post order, so a child index is always
/// smaller than its parent's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NiceStep {
    /// An empty starting bag.
    Leaf,
    /// The child's bag plus the vertex `v`.
    Introduce { child: usize, v: u32 },
    /// The child's bag minus the vertex `v`.
    Forget { child: usize, v: u32 },
    /// Two children with identical bags, merged.
    Join { left: usize, right: usize },
}

/// A rooted nice decomposition. The root bag is empty (every vertex is
/// forgotten on the way up), which lets the programs read their answer from
/// a single state.
#[derive(Debug, Clone)]
pub struct NiceDecomposition {
    steps: Vec<NiceStep>,
    bags: Vec<Vec<u32>>,
    root: usize,
}

impl NiceDecomposition {
    pub fn steps(&self) -> &[NiceStep] {
        &self.steps
    }

    pub fn bags(&self) -> &[Vec<u32>] {
        &self.bags
    }

    pub fn bag(&self, node: usize) -> &[u32] {
        &self.bags[node]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Width = maximum bag size minus one, matching the source decomposition.
    pub fn width(&self) -> i64 {
        self.bags.iter().map(|b| b.len() as i64).max().unwrap_or(0) - 1
    }

    /// Structural validity: each step's bag relates to its children as the
    /// step type demands, every node except the root is used exactly once,
    /// the root bag is empty, and every vertex and edge of `g` is covered by
    /// some bag.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.steps.len() != self.bags.len() {
            return Err(Error::Solve("nice decomposition node lists disagree".into()));
        }
        if self.root != self.steps.len() - 1 {
            return Err(Error::Solve("nice decomposition root must come last".into()));
        }
        if !self.bags[self.root].is_empty() {
            return Err(Error::Solve("nice decomposition root bag must be empty".into()));
        }
        let mut used = vec![false; self.steps.len()];
        for (i, step) in self.steps.iter().enumerate() {
            let mut claim = |c: usize| -> Result<()> {
                if c >= i {
                    return Err(Error::Solve(format!(
                        "nice node {i} references child {c}, which is not below it"
                    )));
                }
                if used[c] {
                    return Err(Error::Solve(format!("nice node {c} has two parents")));
                }
                used[c] = true;
                Ok(())
            };
            match step {
                NiceStep::Leaf => {
                    if !self.bags[i].is_empty() {
                        return Err(Error::Solve(format!("leaf node {i} has a non-empty bag")));
                    }
                }
                NiceStep::Introduce { child, v } => {
                    claim(*child)?;
                    let mut expect = self.bags[*child].clone();
                    if expect.binary_search(v).is_ok() {
                        return Err(Error::Solve(format!(
                            "node {i} introduces vertex {v}, which its child already holds"
                        )));
                    }
                    let pos = expect.binary_search(v).unwrap_err();
                    expect.insert(pos, *v);
                    if expect != self.bags[i] {
                        return Err(Error::Solve(format!("introduce node {i} has the wrong bag")));
                    }
                }
                NiceStep::Forget { child, v } => {
                    claim(*child)?;
                    let mut expect = self.bags[*child].clone();
                    match expect.binary_search(v) {
                        Ok(pos) => {
                            expect.remove(pos);
                        }
                        Err(_) => {
                            return Err(Error::Solve(format!(
                                "node {i} forgets vertex {v}, which its child does not hold"
                            )));
                        }
                    }
                    if expect != self.bags[i] {
                        return Err(Error::Solve(format!("forget node {i} has the wrong bag")));
                    }
                }
                NiceStep::Join { left, right } => {
                    claim(*left)?;
                    claim(*right)?;
                    if self.bags[*left] != self.bags[i] || self.bags[*right] != self.bags[i] {
                        return Err(Error::Solve(format!(
                            "join node {i} has children with differing bags"
                        )));
                    }
                }
            }
        }
        if used[self.root] {
            return Err(Error::Solve("nice decomposition root has a parent".into()));
        }
        let mut covered = vec![false; g.n()];
        for bag in &self.bags {
            for &v in bag {
                if v as usize >= g.n() {
                    return Err(Error::Solve(format!("bag vertex {v} out of range")));
                }
                covered[v as usize] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::Solve(format!("vertex {v} appears in no bag")));
        }
        for (u, v) in g.edges() {
            let inside = self
                .bags
                .iter()
                .any(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok());
            if !inside {
                return Err(Error::Solve(format!("edge {u}-{v} is inside no bag")));
            }
        }
        Ok(())
    }
}

/// Refines a tree decomposition into nice form without changing its width.
/// Between a child bag and its parent bag the shared vertices stay put,
/// leaving vertices are forgotten first, and entering vertices are
/// introduced after, so every intermediate bag is a subset of one of the
/// two. The final node forgets the root bag down to empty.
pub fn nice_decomposition(td: &TreeDecomposition) -> Result<NiceDecomposition> {
    let children = td.children();
    let mut steps: Vec<NiceStep> = Vec::new();
    let mut bags: Vec<Vec<u32>> = Vec::new();
    let push = |step: NiceStep, bag: Vec<u32>, steps: &mut Vec<NiceStep>, bags: &mut Vec<Vec<u32>>| {
        steps.push(step);
        bags.push(bag);
        steps.len() - 1
    };
    // Turns the finished chain `top` (whose bag is `from`) into one whose
    // bag is `to`, forgetting and introducing one vertex at a time.
    let reshape = |mut top: usize,
                   from: &[u32],
                   to: &[u32],
                   steps: &mut Vec<NiceStep>,
                   bags: &mut Vec<Vec<u32>>| {
        let mut bag = from.to_vec();
        for &v in from {
            if to.binary_search(&v).is_err() {
                let pos = bag.binary_search(&v).unwrap();
                bag.remove(pos);
                steps.push(NiceStep::Forget { child: top, v });
                bags.push(bag.clone());
                top = steps.len() - 1;
            }
        }
        for &v in to {
            if from.binary_search(&v).is_err() {
                let pos = bag.binary_search(&v).unwrap_err();
                bag.insert(pos, v);
                steps.push(NiceStep::Introduce { child: top, v });
                bags.push(bag.clone());
                top = steps.len() - 1;
            }
        }
        top
    };

    // Post-order walk over the source decomposition, iterative so that long
    // chains do not exhaust the call stack.
    let mut tops: Vec<Option<usize>> = vec![None; td.len()];
    let mut stack: Vec<(usize, bool)> = vec![(td.root(), false)];
    while let Some((node, expanded)) = stack.pop() {
        if !expanded {
            stack.push((node, true));
            for &c in &children[node] {
                stack.push((c, false));
            }
            continue;
        }
        let target = td.bags()[node].clone();
        let top = if children[node].is_empty() {
            let mut top = push(NiceStep::Leaf, Vec::new(), &mut steps, &mut bags);
            let mut bag: Vec<u32> = Vec::new();
            for &v in &target {
                let pos = bag.binary_search(&v).unwrap_err();
                bag.insert(pos, v);
                top = push(
                    NiceStep::Introduce { child: top, v },
                    bag.clone(),
                    &mut steps,
                    &mut bags,
                );
            }
            top
        } else {
            let mut acc: Option<usize> = None;
            for &c in &children[node] {
                let ctop = tops[c].expect("children are finished before their parent");
                let shaped = reshape(ctop, td.bags()[c].as_slice(), &target, &mut steps, &mut bags);
                acc = Some(match acc {
                    None => shaped,
                    Some(prev) => push(
                        NiceStep::Join { left: prev, right: shaped },
                        target.clone(),
                        &mut steps,
                        &mut bags,
                    ),
                });
            }
            acc.unwrap()
        };
        tops[node] = Some(top);
    }

    let mut top = tops[td.root()].expect("root is finished last");
    let mut bag = td.bags()[td.root()].clone();
    // A non-empty final bag would leave the answer spread over many states.
    while let Some(&v) = bag.first() {
        bag.remove(0);
        top = push(NiceStep::Forget { child: top, v }, bag.clone(), &mut steps, &mut bags);
    }
    if bags[top] != Vec::<u32>::new() {
        return Err(Error::Solve("nice decomposition did not close on an empty bag".into()));
    }
    let root = top;
    Ok(NiceDecomposition { steps, bags, root })
}
