//! Solve requests and dispatch: exact optimization for the three local
//! problems, routed to the tree-decomposition programs with an exhaustive
//! fallback, plus the fully exhaustive oracle used for validation.

use crate::dp;
use crate::error::{Error, Result};
use crate::graph::{Graph, Subgraph};
use crate::nice::nice_decomposition;
use crate::td::{min_fill_decomposition, TreeDecomposition};

/// Largest instance the exhaustive oracle accepts.
pub const BRUTE_LIMIT: usize = 20;

/// The three local problems. Vertex sets are sorted host ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Problem {
    /// Maximum X ⊆ selectable with pairwise distance at least r; paths may
    /// pass through any vertex of the graph.
    DistanceIndependent { r: u32, selectable: Vec<u32> },
    /// Minimum X ⊆ V with every target within distance r of X.
    RDominating { r: u32, targets: Vec<u32> },
    /// Minimum X with a selected neighbor for every target (selecting the
    /// target itself does not count).
    NeighborhoodHitting { targets: Vec<u32> },
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::DistanceIndependent { .. } => "distance_independent",
            Problem::RDominating { .. } => "r_dominating",
            Problem::NeighborhoodHitting { .. } => "neighborhood_hitting",
        }
    }

    pub fn r(&self) -> Option<u32> {
        match self {
            Problem::DistanceIndependent { r, .. } => Some(*r),
            Problem::RDominating { r, .. } => Some(*r),
            Problem::NeighborhoodHitting { .. } => None,
        }
    }

    /// The distinguished vertex set (selectable or targets).
    pub fn set(&self) -> &[u32] {
        match self {
            Problem::DistanceIndependent { selectable, .. } => selectable,
            Problem::RDominating { targets, .. } => targets,
            Problem::NeighborhoodHitting { targets } => targets,
        }
    }

    pub fn is_maximization(&self) -> bool {
        matches!(self, Problem::DistanceIndependent { .. })
    }
}

/// One exact-solve job: a graph, an optional decomposition to run on (one
/// is computed when absent), and the problem.
#[derive(Debug, Clone)]
pub struct SolveRequest {
    pub graph: Graph,
    pub decomposition: Option<TreeDecomposition>,
    pub problem: Problem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub value: u64,
    pub solution: Vec<u32>,
}

fn set_mask(n: usize, set: &[u32], what: &str) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &v in set {
        if v as usize >= n {
            return Err(Error::Solve(format!("{what} vertex {v} is out of range")));
        }
        mask[v as usize] = true;
    }
    Ok(mask)
}

/// Reject radii the digit encoding cannot carry; such requests fall back
/// to the oracle when the instance is small enough.
fn radius_guard(r: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::Solve("radius must be at least 1".into()));
    }
    if r > 100 {
        return Err(Error::Solve(
            "decomposition too wide for the dynamic program: radius above 100".into(),
        ));
    }
    Ok(())
}

/// Direct predicate evaluation on the graph, independent of any solver.
fn check_feasible(g: &Graph, problem: &Problem, solution: &[u32]) -> Result<()> {
    match problem {
        Problem::DistanceIndependent { r, selectable } => {
            for &v in solution {
                if selectable.binary_search(&v).is_err() {
                    return Err(Error::Solve(format!(
                        "solver bug: vertex {v} is outside the selectable set"
                    )));
                }
            }
            for (i, &v) in solution.iter().enumerate() {
                let dist = g.distances_from(&[v]);
                for &w in &solution[i + 1..] {
                    if dist[w as usize] < *r {
                        return Err(Error::Solve(format!(
                            "solver bug: vertices {v} and {w} are at distance {} < {r}",
                            dist[w as usize]
                        )));
                    }
                }
            }
        }
        Problem::RDominating { r, targets } => {
            let dist = g.distances_from(solution);
            for &t in targets {
                if dist[t as usize] > *r {
                    return Err(Error::Solve(format!(
                        "solver bug: target {t} is not {r}-dominated"
                    )));
                }
            }
        }
        Problem::NeighborhoodHitting { targets } => {
            let mut chosen = vec![false; g.n()];
            for &v in solution {
                chosen[v as usize] = true;
            }
            for &t in targets {
                if !g.neighbors(t).iter().any(|&u| chosen[u as usize]) {
                    return Err(Error::Solve(format!(
                        "solver bug: target {t} has no selected neighbor"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn solve_on_decomposition(g: &Graph, td: &TreeDecomposition, problem: &Problem) -> Result<Solution> {
    let nice = nice_decomposition(td)?;
    let (value, solution) = match problem {
        Problem::DistanceIndependent { r, selectable } => {
            radius_guard(*r)?;
            let mask = set_mask(g.n(), selectable, "selectable")?;
            dp::dp_distance_independent(g, &nice, *r, &mask)?
        }
        Problem::RDominating { r, targets } => {
            radius_guard(*r)?;
            let mask = set_mask(g.n(), targets, "target")?;
            dp::dp_r_dominating(g, &nice, *r, &mask)?
        }
        Problem::NeighborhoodHitting { targets } => {
            let mask = set_mask(g.n(), targets, "target")?;
            dp::dp_neighborhood_hitting(g, &nice, &mask)?
                .ok_or_else(|| infeasible_hitting(g, targets))?
        }
    };
    Ok(Solution { value, solution })
}

fn infeasible_hitting(g: &Graph, targets: &[u32]) -> Error {
    let witness = targets
        .iter()
        .find(|&&t| (t as usize) < g.n() && g.degree(t) == 0)
        .copied();
    match witness {
        Some(t) => Error::Infeasible(format!(
            "target vertex {t} has no neighbors, so its neighborhood cannot be hit"
        )),
        None => Error::Infeasible("no set hits every target neighborhood".into()),
    }
}

/// Restricts the problem to an induced subgraph, mapping the distinguished
/// set into local ids.
fn localize(problem: &Problem, sub: &Subgraph) -> Problem {
    let local = |set: &[u32]| -> Vec<u32> {
        let mut out: Vec<u32> = set.iter().filter_map(|&v| sub.local_of(v)).collect();
        out.sort_unstable();
        out
    };
    match problem {
        Problem::DistanceIndependent { r, selectable } => Problem::DistanceIndependent {
            r: *r,
            selectable: local(selectable),
        },
        Problem::RDominating { r, targets } => Problem::RDominating {
            r: *r,
            targets: local(targets),
        },
        Problem::NeighborhoodHitting { targets } => Problem::NeighborhoodHitting {
            targets: local(targets),
        },
    }
}

/// Exact solve. Runs the dynamic program on the given decomposition (or a
/// min-fill one); when the instance is too wide for the program, each
/// connected component of at most `BRUTE_LIMIT` vertices is solved
/// exhaustively instead. Every returned set is re-verified against the
/// problem predicate before return.
pub fn solve(req: &SolveRequest) -> Result<Solution> {
    let g = &req.graph;
    set_mask(g.n(), req.problem.set(), "problem")?;
    if let Problem::NeighborhoodHitting { targets } = &req.problem {
        if let Some(&t) = targets.iter().find(|&&t| g.degree(t) == 0) {
            return Err(Error::Infeasible(format!(
                "target vertex {t} has no neighbors, so its neighborhood cannot be hit"
            )));
        }
    }
    let direct = match &req.decomposition {
        Some(td) => {
            td.validate(g)?;
            solve_on_decomposition(g, td, &req.problem)
        }
        None => min_fill_decomposition(g).and_then(|td| solve_on_decomposition(g, &td, &req.problem)),
    };
    let solution = match direct {
        Ok(s) => s,
        Err(Error::Solve(msg)) if msg.starts_with("decomposition too wide") => {
            solve_componentwise(g, &req.problem)?
        }
        Err(e) => return Err(e),
    };
    check_feasible(g, &req.problem, &solution.solution)?;
    Ok(solution)
}

fn solve_componentwise(g: &Graph, problem: &Problem) -> Result<Solution> {
    let mut value = 0u64;
    let mut solution: Vec<u32> = Vec::new();
    for comp in g.components() {
        if comp.len() > BRUTE_LIMIT {
            return Err(Error::Solve(format!(
                "a component of {} vertices is too wide for the dynamic program and too large \
                 for exhaustive search",
                comp.len()
            )));
        }
        let sub = Subgraph::induced(g, &comp)?;
        let local = SolveRequest {
            graph: sub.graph().clone(),
            decomposition: None,
            problem: localize(problem, &sub),
        };
        let part = brute_force(&local)?;
        value += part.value;
        for v in part.solution {
            solution.push(sub.host_of(v));
        }
    }
    solution.sort_unstable();
    Ok(Solution { value, solution })
}

/// Exhaustive-search optimum over every subset of the vertices, with the
/// same feasibility semantics and tie rule as the programs. The validation
/// oracle: intentionally independent of the decomposition machinery.
pub fn brute_force(req: &SolveRequest) -> Result<Solution> {
    let g = &req.graph;
    let n = g.n();
    if n > BRUTE_LIMIT {
        return Err(Error::Solve(format!(
            "instance too large for exhaustive search: {n} vertices (limit {BRUTE_LIMIT})"
        )));
    }
    let mask_of = |set: &[u32]| -> Result<u32> {
        let mut m = 0u32;
        for &v in set {
            if v as usize >= n {
                return Err(Error::Solve(format!("problem vertex {v} is out of range")));
            }
            m |= 1 << v;
        }
        Ok(m)
    };
    let maximize = req.problem.is_maximization();
    // Per-vertex bit summaries so each subset is checked in O(n).
    let (allowed_mask, constraint): (u32, Vec<u32>) = match &req.problem {
        Problem::DistanceIndependent { r, selectable } => {
            let apsp = g.all_pairs_distances();
            let conflict: Vec<u32> = (0..n)
                .map(|v| {
                    let mut c = 0u32;
                    for u in 0..n {
                        if u != v && apsp[v][u] < *r {
                            c |= 1 << u;
                        }
                    }
                    c
                })
                .collect();
            (mask_of(selectable)?, conflict)
        }
        Problem::RDominating { r, targets } => {
            let apsp = g.all_pairs_distances();
            let covers: Vec<u32> = (0..n)
                .map(|v| {
                    let mut c = 0u32;
                    for &t in targets {
                        if apsp[v][t as usize] <= *r {
                            c |= 1 << t;
                        }
                    }
                    c
                })
                .collect();
            (mask_of(targets)?, covers)
        }
        Problem::NeighborhoodHitting { targets } => {
            let tmask = mask_of(targets)?;
            let hits: Vec<u32> = (0..n as u32)
                .map(|v| {
                    let mut c = 0u32;
                    for &u in g.neighbors(v) {
                        if tmask & (1 << u) != 0 {
                            c |= 1 << u;
                        }
                    }
                    c
                })
                .collect();
            (tmask, hits)
        }
    };
    let feasible = |subset: u32| -> bool {
        match &req.problem {
            Problem::DistanceIndependent { .. } => {
                if subset & !allowed_mask != 0 {
                    return false;
                }
                let mut rest = subset;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    if constraint[v] & subset != 0 {
                        return false;
                    }
                }
                true
            }
            _ => {
                let mut covered = 0u32;
                let mut rest = subset;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    covered |= constraint[v];
                }
                covered & allowed_mask == allowed_mask
            }
        }
    };
    let vec_of = |subset: u32| -> Vec<u32> {
        (0..n as u32).filter(|&v| subset & (1 << v) != 0).collect()
    };
    let mut best: Option<(u64, u32)> = None;
    for subset in 0..(1u32 << n) {
        if !feasible(subset) {
            continue;
        }
        let value = subset.count_ones() as u64;
        match &mut best {
            None => best = Some((value, subset)),
            Some((bv, bs)) => {
                let improves = if maximize { value > *bv } else { value < *bv };
                if improves {
                    *bv = value;
                    *bs = subset;
                } else if value == *bv && vec_of(subset) < vec_of(*bs) {
                    *bs = subset;
                }
            }
        }
    }
    match best {
        Some((value, subset)) => Ok(Solution { value, solution: vec_of(subset) }),
        None => match &req.problem {
            Problem::NeighborhoodHitting { targets } => Err(infeasible_hitting(g, targets)),
            _ => Err(Error::Solve("exhaustive search found no feasible set".into())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
        (0..n as u32).filter(|_| rng.gen_bool(0.5)).collect()
    }

    fn request(g: &Graph, problem: Problem) -> SolveRequest {
        SolveRequest { graph: g.clone(), decomposition: None, problem }
    }

    #[test]
    fn frozen_path_examples() {
        let p5 = generators::path(5).unwrap();
        let all: Vec<u32> = (0..5).collect();
        let s = solve(&request(&p5, Problem::DistanceIndependent { r: 2, selectable: all.clone() }))
            .unwrap();
        assert_eq!(s.value, 3);
        let s = solve(&request(&p5, Problem::DistanceIndependent { r: 3, selectable: all.clone() }))
            .unwrap();
        assert_eq!(s.value, 2);
        let s = solve(&request(&p5, Problem::RDominating { r: 1, targets: all.clone() })).unwrap();
        assert_eq!(s.value, 2);
        let s = solve(&request(&p5, Problem::RDominating { r: 2, targets: all })).unwrap();
        assert_eq!(s.value, 1);
        assert_eq!(s.solution, vec![2]);
    }

    #[test]
    fn frozen_hitting_examples() {
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = solve(&request(&star, Problem::NeighborhoodHitting { targets: vec![1, 2, 3] }))
            .unwrap();
        assert_eq!(s.value, 1);
        assert_eq!(s.solution, vec![0]);
        let p3 = generators::path(3).unwrap();
        let s = solve(&request(&p3, Problem::NeighborhoodHitting { targets: vec![0, 2] })).unwrap();
        assert_eq!(s.value, 1);
        assert_eq!(s.solution, vec![1]);
    }

    #[test]
    fn cycle_independence_matches_enumeration() {
        let c5 = generators::cycle(5).unwrap();
        let all: Vec<u32> = (0..5).collect();
        let s = solve(&request(&c5, Problem::DistanceIndependent { r: 2, selectable: all }))
            .unwrap();
        assert_eq!(s.value, 2);
    }

    #[test]
    fn empty_sets_give_empty_solutions() {
        let g = generators::path(4).unwrap();
        for problem in [
            Problem::DistanceIndependent { r: 2, selectable: vec![] },
            Problem::RDominating { r: 1, targets: vec![] },
            Problem::NeighborhoodHitting { targets: vec![] },
        ] {
            let s = solve(&request(&g, problem.clone())).unwrap();
            assert_eq!(s.value, 0, "{}", problem.name());
            assert!(s.solution.is_empty());
            let b = brute_force(&request(&g, problem)).unwrap();
            assert_eq!(b.value, 0);
        }
    }

    #[test]
    fn isolated_target_reports_infeasible_with_witness() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let err = solve(&request(&g, Problem::NeighborhoodHitting { targets: vec![2] }))
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("infeasible"), "got: {msg}");
        assert!(msg.contains("vertex 2"), "got: {msg}");
    }

    #[test]
    fn oversized_oracle_requests_are_rejected() {
        let g = generators::path(21).unwrap();
        let err = brute_force(&request(&g, Problem::RDominating { r: 1, targets: vec![0] }))
            .unwrap_err();
        assert!(err.to_string().contains("too large"), "got: {err}");
    }

    #[test]
    fn oracle_equivalence_distance_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for trial in 0..210 {
            let n = rng.gen_range(1..=12);
            let p = if rng.gen_bool(0.5) { 0.2 } else { 0.5 };
            let r = rng.gen_range(1..=3);
            let g = random_graph(&mut rng, n, p);
            let selectable = random_subset(&mut rng, n);
            let req = request(&g, Problem::DistanceIndependent { r, selectable });
            let a = solve(&req).unwrap();
            let b = brute_force(&req).unwrap();
            assert_eq!(a.value, b.value, "trial {trial}: value mismatch on {req:?}");
            assert_eq!(a.solution, b.solution, "trial {trial}: tie rule drift on {req:?}");
        }
    }

    #[test]
    fn oracle_equivalence_r_dominating() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for trial in 0..210 {
            let n = rng.gen_range(1..=12);
            let p = if rng.gen_bool(0.5) { 0.2 } else { 0.5 };
            let r = rng.gen_range(1..=3);
            let g = random_graph(&mut rng, n, p);
            let targets = random_subset(&mut rng, n);
            let req = request(&g, Problem::RDominating { r, targets });
            let a = solve(&req).unwrap();
            let b = brute_force(&req).unwrap();
            assert_eq!(a.value, b.value, "trial {trial}: value mismatch on {req:?}");
            assert_eq!(a.solution, b.solution, "trial {trial}: tie rule drift on {req:?}");
        }
    }

    #[test]
    fn oracle_equivalence_neighborhood_hitting() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for trial in 0..210 {
            let n = rng.gen_range(1..=12);
            let p = if rng.gen_bool(0.5) { 0.2 } else { 0.5 };
            let g = random_graph(&mut rng, n, p);
            let targets: Vec<u32> =
                random_subset(&mut rng, n).into_iter().filter(|&t| g.degree(t) > 0).collect();
            let req = request(&g, Problem::NeighborhoodHitting { targets });
            let a = solve(&req).unwrap();
            let b = brute_force(&req).unwrap();
            assert_eq!(a.value, b.value, "trial {trial}: value mismatch on {req:?}");
            assert_eq!(a.solution, b.solution, "trial {trial}: tie rule drift on {req:?}");
        }
    }

    #[test]
    fn enlarging_the_set_never_shrinks_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        for _ in 0..60 {
            let n = rng.gen_range(2..=10);
            let g = random_graph(&mut rng, n, 0.3);
            let mut small = random_subset(&mut rng, n);
            let extra: Vec<u32> = (0..n as u32)
                .filter(|v| small.binary_search(v).is_err())
                .collect();
            if extra.is_empty() {
                continue;
            }
            let added = extra[rng.gen_range(0..extra.len())];
            let mut large = small.clone();
            large.push(added);
            large.sort_unstable();
            small.sort_unstable();
            let r = rng.gen_range(1..=2);
            let vi_small = solve(&request(&g, Problem::DistanceIndependent { r, selectable: small.clone() }))
                .unwrap()
                .value;
            let vi_large = solve(&request(&g, Problem::DistanceIndependent { r, selectable: large.clone() }))
                .unwrap()
                .value;
            assert!(vi_large >= vi_small);
            let vd_small =
                solve(&request(&g, Problem::RDominating { r, targets: small.clone() })).unwrap().value;
            let vd_large =
                solve(&request(&g, Problem::RDominating { r, targets: large.clone() })).unwrap().value;
            assert!(vd_large >= vd_small);
            let hit_ok = |set: &[u32]| set.iter().all(|&t| g.degree(t) > 0);
            if hit_ok(&small) && hit_ok(&large) {
                let vh_small = solve(&request(&g, Problem::NeighborhoodHitting { targets: small.clone() }))
                    .unwrap()
                    .value;
                let vh_large = solve(&request(&g, Problem::NeighborhoodHitting { targets: large.clone() }))
                    .unwrap()
                    .value;
                assert!(vh_large >= vh_small);
            }
        }
    }

    #[test]
    fn provided_decompositions_are_used_and_checked() {
        let g = generators::path(6).unwrap();
        let bags: Vec<Vec<u32>> = (0..5).map(|i| vec![i as u32, i as u32 + 1]).collect();
        let parent: Vec<Option<usize>> =
            (0..5).map(|i| if i == 0 { None } else { Some(i - 1) }).collect();
        let td = TreeDecomposition::new(bags, parent).unwrap();
        let req = SolveRequest {
            graph: g.clone(),
            decomposition: Some(td),
            problem: Problem::RDominating { r: 1, targets: (0..6).collect() },
        };
        let s = solve(&req).unwrap();
        assert_eq!(s.value, 2);
        // A decomposition for the wrong graph is rejected up front.
        let other = generators::cycle(6).unwrap();
        let bad = SolveRequest {
            graph: other,
            decomposition: req.decomposition.clone(),
            problem: Problem::RDominating { r: 1, targets: (0..6).collect() },
        };
        assert!(solve(&bad).is_err());
    }
}
