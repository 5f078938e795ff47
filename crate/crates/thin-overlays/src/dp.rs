//! Dynamic programs over nice tree decompositions for the three problems
//! the approximation engines delegate to: maximum distance-r independent
//! subsets, minimum r-dominating sets of a target set, and minimum
//! neighborhood-hitting sets.
//!
//! All three walk the node list in index order (children come first) and
//! keep one sparse table per node, keyed by a radix encoding of the bag
//! labels. Ties between equal-value solutions are broken toward the
//! lexicographically smallest vertex set, so outputs are reproducible.
//!
//! The distance program does not rebuild shortest paths incrementally.
//! Distances are read from a precomputed all-pairs table of the whole
//! graph, and the bag acts purely as a separator: any path from a
//! processed vertex to an unprocessed one crosses the current bag, so a
//! per-bag-vertex summary of "distance to the nearest selected processed
//! vertex" is exact.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::nice::{NiceDecomposition, NiceStep};

/// Hard ceiling on live states per node; beyond this the instance is
/// declared too wide and the caller falls back to exhaustive search.
const STATE_LIMIT: usize = 1 << 20;

/// A partial solution: the selected vertices already forgotten below the
/// current node, plus their count. The count always equals the set length;
/// it is kept separate only for cheap comparisons.
#[derive(Debug, Clone)]
struct Cell {
    value: u64,
    set: Vec<u32>,
}

fn insert_sorted(set: &mut Vec<u32>, v: u32) {
    let pos = set.binary_search(&v).unwrap_err();
    set.insert(pos, v);
}

fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Keeps the better of two cells: higher (or lower) value first, then the
/// lexicographically smaller vertex set.
fn upsert(table: &mut HashMap<u64, Cell>, key: u64, cand: Cell, maximize: bool) {
    match table.get_mut(&key) {
        None => {
            table.insert(key, cand);
        }
        Some(cur) => {
            let better = if maximize {
                cand.value > cur.value || (cand.value == cur.value && cand.set < cur.set)
            } else {
                cand.value < cur.value || (cand.value == cur.value && cand.set < cur.set)
            };
            if better {
                *cur = cand;
            }
        }
    }
}

/// Digit helpers: states are little-endian base-`radix` numbers over bag
/// positions. Bags stay small enough that the key fits in a u64; wider
/// nodes are rejected up front.
fn decode(key: u64, radix: u64, len: usize) -> Vec<u8> {
    let mut digits = Vec::with_capacity(len);
    let mut k = key;
    for _ in 0..len {
        digits.push((k % radix) as u8);
        k /= radix;
    }
    digits
}

fn encode(digits: &[u8], radix: u64) -> u64 {
    let mut key = 0u64;
    for &d in digits.iter().rev() {
        key = key * radix + d as u64;
    }
    key
}

fn check_width(nice: &NiceDecomposition, radix: u64) -> Result<()> {
    let widest = nice.bags().iter().map(|b| b.len()).max().unwrap_or(0);
    let mut cap = 1u128;
    for _ in 0..widest {
        cap = cap.saturating_mul(radix as u128);
        if cap > u64::MAX as u128 {
            return Err(Error::Solve(format!(
                "decomposition too wide for the dynamic program: a bag of {widest} vertices \
                 needs more than 2^64 states"
            )));
        }
    }
    Ok(())
}

fn guard_states(table: &HashMap<u64, Cell>) -> Result<()> {
    if table.len() > STATE_LIMIT {
        return Err(Error::Solve(format!(
            "decomposition too wide for the dynamic program: {} live states",
            table.len()
        )));
    }
    Ok(())
}

/// Position of `v` within the sorted bag.
fn pos_of(bag: &[u32], v: u32) -> usize {
    bag.binary_search(&v).expect("vertex is in the bag")
}

/// Maximum X ⊆ allowed with pairwise distance ≥ r, distances measured in
/// all of `g`. Returns the optimum size and the lexicographically smallest
/// optimum set.
///
/// Bag labels: digit r means "selected"; digit d < r means "unselected,
/// and the nearest selected vertex strictly below this node is at capped
/// distance d+1" (d = r−1 meaning none within r−1). Selected labels keep
/// the invariant that everything selected below is at distance ≥ r, so
/// their below-distance never needs storing.
pub fn dp_distance_independent(
    g: &Graph,
    nice: &NiceDecomposition,
    r: u32,
    allowed: &[bool],
) -> Result<(u64, Vec<u32>)> {
    if r == 0 {
        return Err(Error::Solve("distance-independence needs radius >= 1".into()));
    }
    if allowed.len() != g.n() {
        return Err(Error::Solve("selectable mask length mismatch".into()));
    }
    let radix = r as u64 + 1;
    check_width(nice, radix)?;
    let apsp = g.all_pairs_distances();
    let dcap = |u: u32, v: u32| -> u32 { apsp[u as usize][v as usize].min(r) };
    // m(digit) = capped distance from this bag vertex to the nearest
    // selected vertex strictly below; selected vertices report r (safe).
    let sel = r as u8;
    let m_of = |d: u8| -> u32 { if d == sel { r } else { d as u32 + 1 } };

    let mut tables: Vec<HashMap<u64, Cell>> = Vec::with_capacity(nice.len());
    for (i, step) in nice.steps().iter().enumerate() {
        let bag = nice.bag(i);
        let mut table: HashMap<u64, Cell> = HashMap::new();
        match step {
            NiceStep::Leaf => {
                table.insert(0, Cell { value: 0, set: Vec::new() });
            }
            NiceStep::Introduce { child, v } => {
                let cbag = nice.bag(*child);
                let pv = pos_of(bag, *v);
                for (key, cell) in &tables[*child] {
                    let cd = decode(*key, radix, cbag.len());
                    // Unselected: summarize v's distance to everything
                    // selected below through the separator.
                    let mut m = r;
                    for (p, &b) in cbag.iter().enumerate() {
                        m = m.min(dcap(*v, b).saturating_add(m_of(cd[p])).min(r));
                    }
                    let mut digits = cd.clone();
                    digits.insert(pv, (m - 1) as u8);
                    upsert(&mut table, encode(&digits, radix), cell.clone(), true);
                    // Selected: v must clear every selected vertex seen so
                    // far, in the bag directly and below through the bag.
                    if allowed[*v as usize] {
                        let ok = cbag.iter().enumerate().all(|(p, &b)| {
                            if cd[p] == sel {
                                dcap(*v, b) >= r
                            } else {
                                dcap(*v, b).saturating_add(m_of(cd[p])) >= r
                            }
                        });
                        if ok {
                            let mut digits = cd.clone();
                            digits.insert(pv, sel);
                            upsert(&mut table, encode(&digits, radix), cell.clone(), true);
                        }
                    }
                }
            }
            NiceStep::Forget { child, v } => {
                let cbag = nice.bag(*child);
                let pv = pos_of(cbag, *v);
                for (key, cell) in &tables[*child] {
                    let cd = decode(*key, radix, cbag.len());
                    let mut digits = cd.clone();
                    let dv = digits.remove(pv);
                    let mut cell = cell.clone();
                    if dv == sel {
                        // v moves below: fold it into the distance summary.
                        for (p, &b) in bag.iter().enumerate() {
                            if digits[p] != sel {
                                let d = dcap(*v, b);
                                digits[p] = digits[p].min((d - 1) as u8);
                            }
                        }
                        cell.value += 1;
                        insert_sorted(&mut cell.set, *v);
                    }
                    upsert(&mut table, encode(&digits, radix), cell, true);
                }
            }
            NiceStep::Join { left, right } => {
                // States combine only when they agree on which bag vertices
                // are selected; below-distances are summarized by the min,
                // and a selected pair split across the two sides shows up
                // as a short left+right distance through some bag vertex.
                let mut groups: HashMap<u64, Vec<(Vec<u8>, &Cell)>> = HashMap::new();
                for (key, cell) in &tables[*right] {
                    let d = decode(*key, radix, bag.len());
                    let mask = d
                        .iter()
                        .enumerate()
                        .fold(0u64, |m, (p, &x)| if x == sel { m | (1 << p) } else { m });
                    groups.entry(mask).or_default().push((d, cell));
                }
                for (lkey, lcell) in &tables[*left] {
                    let ld = decode(*lkey, radix, bag.len());
                    let mask = ld
                        .iter()
                        .enumerate()
                        .fold(0u64, |m, (p, &x)| if x == sel { m | (1 << p) } else { m });
                    let Some(cands) = groups.get(&mask) else { continue };
                    'pair: for (rd, rcell) in cands {
                        let mut digits = Vec::with_capacity(bag.len());
                        for p in 0..bag.len() {
                            if ld[p] == sel {
                                digits.push(sel);
                            } else {
                                if m_of(ld[p]) + m_of(rd[p]) < r {
                                    continue 'pair;
                                }
                                digits.push(ld[p].min(rd[p]));
                            }
                        }
                        let cell = Cell {
                            value: lcell.value + rcell.value,
                            set: merge_sorted(&lcell.set, &rcell.set),
                        };
                        upsert(&mut table, encode(&digits, radix), cell, true);
                    }
                }
            }
        }
        guard_states(&table)?;
        tables.push(table);
    }
    let root = &tables[nice.root()];
    let cell = root
        .get(&0)
        .ok_or_else(|| Error::Solve("independence table lost the empty solution".into()))?;
    Ok((cell.value, cell.set.clone()))
}

/// Minimum X with every target within distance r of X, distances in all of
/// `g`. Always feasible (targets can dominate themselves).
///
/// Bag labels implement an existential distance certificate: 0 means
/// selected; a value i in 1..=r means "this vertex claims distance exactly
/// i to the solution" and must eventually see a neighbor claiming i−1
/// (tracked by a witnessed flag); the top label opts out and is forbidden
/// for targets.
pub fn dp_r_dominating(
    g: &Graph,
    nice: &NiceDecomposition,
    r: u32,
    targets: &[bool],
) -> Result<(u64, Vec<u32>)> {
    if r == 0 {
        return Err(Error::Solve("r-domination needs radius >= 1".into()));
    }
    if targets.len() != g.n() {
        return Err(Error::Solve("target mask length mismatch".into()));
    }
    let radix = 2 * r as u64 + 2;
    check_width(nice, radix)?;
    let top = (2 * r + 1) as u8;
    // rho = claimed capped distance; None for the opt-out label.
    let rho = |d: u8| -> Option<u32> {
        match d {
            0 => Some(0),
            d if d == top => None,
            d if (d as u32) <= r => Some(d as u32),
            d => Some(d as u32 - r),
        }
    };
    let witnessed = |d: u8| -> bool { d == 0 || d == top || (d as u32) > r };

    let mut tables: Vec<HashMap<u64, Cell>> = Vec::with_capacity(nice.len());
    for (i, step) in nice.steps().iter().enumerate() {
        let bag = nice.bag(i);
        let mut table: HashMap<u64, Cell> = HashMap::new();
        match step {
            NiceStep::Leaf => {
                table.insert(0, Cell { value: 0, set: Vec::new() });
            }
            NiceStep::Introduce { child, v } => {
                let cbag = nice.bag(*child);
                let pv = pos_of(bag, *v);
                let mut choices: Vec<u8> = vec![0, top];
                for c in 1..=r {
                    choices.push(c as u8);
                }
                for (key, cell) in &tables[*child] {
                    let cd = decode(*key, radix, cbag.len());
                    for &choice in &choices {
                        let rv = rho(choice);
                        let mut digits = Vec::with_capacity(bag.len());
                        let mut wit_v = false;
                        for (p, &b) in cbag.iter().enumerate() {
                            let mut d = cd[p];
                            if g.has_edge(*v, b) {
                                let rb = rho(d);
                                if let (Some(rv), Some(rb)) = (rv, rb) {
                                    if rb + 1 == rv {
                                        wit_v = true;
                                    }
                                    if rv + 1 == rb && !witnessed(d) {
                                        d += r as u8;
                                    }
                                }
                            }
                            digits.push(d);
                        }
                        let dv = match choice {
                            0 => 0,
                            c if c == top => top,
                            c => {
                                if wit_v {
                                    c + r as u8
                                } else {
                                    c
                                }
                            }
                        };
                        digits.insert(pv, dv);
                        upsert(&mut table, encode(&digits, radix), cell.clone(), false);
                    }
                }
            }
            NiceStep::Forget { child, v } => {
                let cbag = nice.bag(*child);
                let pv = pos_of(cbag, *v);
                for (key, cell) in &tables[*child] {
                    let cd = decode(*key, radix, cbag.len());
                    let dv = cd[pv];
                    if targets[*v as usize] && dv == top {
                        continue;
                    }
                    if !witnessed(dv) {
                        continue;
                    }
                    let mut digits = cd.clone();
                    digits.remove(pv);
                    let mut cell = cell.clone();
                    if dv == 0 {
                        cell.value += 1;
                        insert_sorted(&mut cell.set, *v);
                    }
                    upsert(&mut table, encode(&digits, radix), cell, false);
                }
            }
            NiceStep::Join { left, right } => {
                // The distance claims must agree exactly; witness flags
                // combine by or, since either side may hold the chain.
                let normalize = |d: &[u8]| -> u64 {
                    let norm: Vec<u8> = d
                        .iter()
                        .map(|&x| if x != 0 && x != top && (x as u32) > r { x - r as u8 } else { x })
                        .collect();
                    encode(&norm, radix)
                };
                let mut groups: HashMap<u64, Vec<(Vec<u8>, &Cell)>> = HashMap::new();
                for (key, cell) in &tables[*right] {
                    let d = decode(*key, radix, bag.len());
                    groups.entry(normalize(&d)).or_default().push((d, cell));
                }
                for (lkey, lcell) in &tables[*left] {
                    let ld = decode(*lkey, radix, bag.len());
                    let Some(cands) = groups.get(&normalize(&ld)) else { continue };
                    for (rd, rcell) in cands {
                        let digits: Vec<u8> = ld
                            .iter()
                            .zip(rd.iter())
                            .map(|(&a, &b)| if witnessed(a) || witnessed(b) { a.max(b) } else { a })
                            .collect();
                        let cell = Cell {
                            value: lcell.value + rcell.value,
                            set: merge_sorted(&lcell.set, &rcell.set),
                        };
                        upsert(&mut table, encode(&digits, radix), cell, false);
                    }
                }
            }
        }
        guard_states(&table)?;
        tables.push(table);
    }
    let root = &tables[nice.root()];
    let cell = root
        .get(&0)
        .ok_or_else(|| Error::Solve("domination table lost all states".into()))?;
    Ok((cell.value, cell.set.clone()))
}

/// Minimum X with X ∩ N(t) nonempty for every target t. Selecting a target
/// does not satisfy it; only a selected neighbor does. Returns None when a
/// target has no neighbors at all.
pub fn dp_neighborhood_hitting(
    g: &Graph,
    nice: &NiceDecomposition,
    targets: &[bool],
) -> Result<Option<(u64, Vec<u32>)>> {
    if targets.len() != g.n() {
        return Err(Error::Solve("target mask length mismatch".into()));
    }
    let radix = 4u64;
    check_width(nice, radix)?;
    // bit 0: selected; bit 1: target already has a selected neighbor.
    let is_target = |v: u32| targets[v as usize];

    let mut tables: Vec<HashMap<u64, Cell>> = Vec::with_capacity(nice.len());
    for (i, step) in nice.steps().iter().enumerate() {
        let bag = nice.bag(i);
        let mut table: HashMap<u64, Cell> = HashMap::new();
        match step {
            NiceStep::Leaf => {
                table.insert(0, Cell { value: 0, set: Vec::new() });
            }
            NiceStep::Introduce { child, v } => {
                let cbag = nice.bag(*child);
                let pv = pos_of(bag, *v);
                for (key, cell) in &tables[*child] {
                    let cd = decode(*key, radix, cbag.len());
                    for sel_v in [0u8, 1u8] {
                        let mut digits = Vec::with_capacity(bag.len());
                        let mut hit_v = false;
                        for (p, &b) in cbag.iter().enumerate() {
                            let mut d = cd[p];
                            if g.has_edge(*v, b) {
                                if d & 1 == 1 {
                                    hit_v = true;
                                }
                                if sel_v == 1 && is_target(b) {
                                    d |= 2;
                                }
                            }
                            digits.push(d);
                        }
                        let dv = sel_v | if hit_v && is_target(*v) { 2 } else { 0 };
                        digits.insert(pv, dv);
                        upsert(&mut table, encode(&digits, radix), cell.clone(), false);
                    }
                }
            }
            NiceStep::Forget { child, v } => {
                let cbag = nice.bag(*child);
                let pv = pos_of(cbag, *v);
                for (key, cell) in &tables[*child] {
                    let cd = decode(*key, radix, cbag.len());
                    let dv = cd[pv];
                    if is_target(*v) && dv & 2 == 0 {
                        continue;
                    }
                    let mut digits = cd.clone();
                    digits.remove(pv);
                    let mut cell = cell.clone();
                    if dv & 1 == 1 {
                        cell.value += 1;
                        insert_sorted(&mut cell.set, *v);
                    }
                    upsert(&mut table, encode(&digits, radix), cell, false);
                }
            }
            NiceStep::Join { left, right } => {
                let normalize = |d: &[u8]| -> u64 {
                    let norm: Vec<u8> = d.iter().map(|&x| x & 1).collect();
                    encode(&norm, radix)
                };
                let mut groups: HashMap<u64, Vec<(Vec<u8>, &Cell)>> = HashMap::new();
                for (key, cell) in &tables[*right] {
                    let d = decode(*key, radix, bag.len());
                    groups.entry(normalize(&d)).or_default().push((d, cell));
                }
                for (lkey, lcell) in &tables[*left] {
                    let ld = decode(*lkey, radix, bag.len());
                    let Some(cands) = groups.get(&normalize(&ld)) else { continue };
                    for (rd, rcell) in cands {
                        let digits: Vec<u8> =
                            ld.iter().zip(rd.iter()).map(|(&a, &b)| a | b).collect();
                        let cell = Cell {
                            value: lcell.value + rcell.value,
                            set: merge_sorted(&lcell.set, &rcell.set),
                        };
                        upsert(&mut table, encode(&digits, radix), cell, false);
                    }
                }
            }
        }
        guard_states(&table)?;
        tables.push(table);
    }
    let root = &tables[nice.root()];
    Ok(root.get(&0).map(|cell| (cell.value, cell.set.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::nice::nice_decomposition;
    use crate::td::min_fill_decomposition;

    fn nice_of(g: &Graph) -> NiceDecomposition {
        nice_decomposition(&min_fill_decomposition(g).unwrap()).unwrap()
    }

    #[test]
    fn path_independence_matches_hand_counts() {
        let g = generators::path(5).unwrap();
        let nice = nice_of(&g);
        let all = vec![true; 5];
        let (v2, set2) = dp_distance_independent(&g, &nice, 2, &all).unwrap();
        assert_eq!(v2, 3);
        assert_eq!(set2, vec![0, 2, 4]);
        let (v3, set3) = dp_distance_independent(&g, &nice, 3, &all).unwrap();
        assert_eq!(v3, 2);
        assert_eq!(set3, vec![0, 3]);
    }

    #[test]
    fn empty_selectable_set_yields_empty_solution() {
        let g = generators::path(5).unwrap();
        let nice = nice_of(&g);
        let none = vec![false; 5];
        let (v, set) = dp_distance_independent(&g, &nice, 2, &none).unwrap();
        assert_eq!(v, 0);
        assert!(set.is_empty());
    }

    #[test]
    fn radius_one_independence_takes_everything() {
        let g = generators::cycle(6).unwrap();
        let nice = nice_of(&g);
        let all = vec![true; 6];
        let (v, set) = dp_distance_independent(&g, &nice, 1, &all).unwrap();
        assert_eq!(v, 6);
        assert_eq!(set, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn path_domination_matches_hand_counts() {
        let g = generators::path(5).unwrap();
        let nice = nice_of(&g);
        let all = vec![true; 5];
        // {0,3} and {1,3} both dominate; the tie rule picks the lex-smaller.
        let (v1, set1) = dp_r_dominating(&g, &nice, 1, &all).unwrap();
        assert_eq!(v1, 2);
        assert_eq!(set1, vec![0, 3]);
        let (v2, set2) = dp_r_dominating(&g, &nice, 2, &all).unwrap();
        assert_eq!(v2, 1);
        assert_eq!(set2, vec![2]);
    }

    #[test]
    fn domination_of_no_targets_is_empty() {
        let g = generators::path(4).unwrap();
        let nice = nice_of(&g);
        let none = vec![false; 4];
        let (v, set) = dp_r_dominating(&g, &nice, 1, &none).unwrap();
        assert_eq!(v, 0);
        assert!(set.is_empty());
    }

    #[test]
    fn star_hitting_picks_the_center() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let nice = nice_of(&g);
        let mut targets = vec![false; 4];
        targets[1] = true;
        targets[2] = true;
        targets[3] = true;
        let (v, set) = dp_neighborhood_hitting(&g, &nice, &targets).unwrap().unwrap();
        assert_eq!(v, 1);
        assert_eq!(set, vec![0]);
    }

    #[test]
    fn hitting_its_own_neighborhood_needs_a_neighbor() {
        // Selecting a target never satisfies the target itself.
        let g = generators::path(3).unwrap();
        let nice = nice_of(&g);
        let targets = vec![true, false, true];
        let (v, set) = dp_neighborhood_hitting(&g, &nice, &targets).unwrap().unwrap();
        assert_eq!(v, 1);
        assert_eq!(set, vec![1]);
    }

    #[test]
    fn isolated_target_is_infeasible() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let nice = nice_of(&g);
        let targets = vec![false, false, true];
        assert!(dp_neighborhood_hitting(&g, &nice, &targets).unwrap().is_none());
    }

    #[test]
    fn disconnected_graphs_solve_per_component_automatically() {
        // Two disjoint edges: distance across components is infinite.
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let nice = nice_of(&g);
        let all = vec![true; 4];
        let (v, set) = dp_distance_independent(&g, &nice, 3, &all).unwrap();
        assert_eq!(v, 2);
        assert_eq!(set, vec![0, 2]);
        let (dv, dset) = dp_r_dominating(&g, &nice, 1, &all).unwrap();
        assert_eq!(dv, 2);
        assert_eq!(dset, vec![0, 2]);
    }
}
