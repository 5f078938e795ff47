//! The three approximation engines. Each one solves an exact local problem
//! inside every member of an overlay system, maps the best local answer
//! back to the host through the member's projection, and certifies the
//! result on the host graph by direct predicate evaluation. The guarantee
//! factor is a function of the system's thickness budget alone.

use std::time::Instant;

use num::BigRational;

use crate::cliques::StarGraph;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::overlay::OverlayKind;
use crate::solve::{solve, Problem, SolveRequest};
use crate::system::{ratio, OverlaySystem};

/// Everything a run reports: the chosen solution with its guarantee, the
/// per-member values behind the choice, and the system's vital statistics.
/// Two runs on equal inputs produce equal reports except for `wall_time_ms`.
#[derive(Debug, Clone, PartialEq)]
pub struct PtasReport {
    pub problem: String,
    pub r: u32,
    pub k: u32,
    /// Clique size for the cover engine; absent elsewhere.
    pub s: Option<u32>,
    /// Guarantee slack: (s+1)/k for maximization, 1/k for minimization.
    pub epsilon: BigRational,
    /// Approximation factor: 1 − (s+1)/k for maximization, 1 + 1/k for
    /// minimization.
    pub guarantee: BigRational,
    pub solution: Vec<u32>,
    pub value: u64,
    pub chosen_overlay_index: usize,
    pub per_overlay_values: Vec<u64>,
    pub system_size: usize,
    pub system_max_thickness: BigRational,
    pub system_tw_bound: i64,
    pub wall_time_ms: u64,
}

fn thickness_guard(sys: &OverlaySystem, k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::Ptas("the accuracy parameter k must be at least 1".into()));
    }
    let (_, max) = sys.thickness();
    let bound = ratio(k as u64 + 1, k as u64);
    if max > bound {
        return Err(Error::Ptas(format!(
            "system thickness {max} exceeds the bound 1 + 1/{k} = {bound}"
        )));
    }
    Ok(max)
}

/// The counting bound behind every engine: per host vertex, at most a
/// 1/k fraction of the members may see it with thickness above one.
/// Checked before any solving; a failure means the system certificate is
/// wrong, not the input.
fn counting_bound_guard(sys: &OverlaySystem, k: u32) -> Result<()> {
    let n = sys.host().n();
    let size = sys.size() as u64;
    for v in 0..n as u32 {
        let heavy = sys
            .members()
            .iter()
            .filter(|m| m.thickness_at(v) > 1)
            .count() as u64;
        if heavy * k as u64 > size {
            return Err(Error::Certificate(format!(
                "host vertex {v} has thickness above one in {heavy} of {size} members, \
                 more than the counted fraction 1/{k}"
            )));
        }
    }
    Ok(())
}

fn host_guard(sys: &OverlaySystem, g: &Graph) -> Result<()> {
    if sys.kind() == OverlayKind::Star {
        return Err(Error::Ptas(
            "this engine needs a plain-host system, not a star-host one".into(),
        ));
    }
    if sys.host_hash() != g.content_hash() {
        return Err(Error::Ptas("system host does not match the input graph".into()));
    }
    Ok(())
}

/// Members record the best-value winner by smallest index.
fn pick_best(values: &[u64], maximize: bool) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        let better = if maximize { v > values[best] } else { v < values[best] };
        if better {
            best = i;
        }
    }
    best
}

/// Maximum distance-r independent set, within a factor 1 − 1/k of optimal.
/// Per member, the exact solver runs on the preimages of the vertices the
/// member covers exactly once; those preimages form a bijective fibre, so
/// the projection back to the host loses nothing.
pub fn ptas_max_distance_independent(
    g: &Graph,
    sys: &OverlaySystem,
    r: u32,
    k: u32,
) -> Result<PtasReport> {
    let t0 = Instant::now();
    if r == 0 {
        return Err(Error::Ptas("distance-independence needs radius >= 1".into()));
    }
    host_guard(sys, g)?;
    if sys.r() + 1 < r {
        return Err(Error::Ptas(format!(
            "system radius {} is below the required r - 1 = {}",
            sys.r(),
            r - 1
        )));
    }
    let max_theta = thickness_guard(sys, k)?;
    counting_bound_guard(sys, k)?;

    let mut values = Vec::with_capacity(sys.size());
    let mut solutions: Vec<Vec<u32>> = Vec::with_capacity(sys.size());
    for member in sys.members() {
        let fibre: Vec<u32> = (0..member.h().n() as u32)
            .filter(|&x| member.thickness_at(member.f()[x as usize]) == 1)
            .collect();
        let req = SolveRequest {
            graph: member.h().clone(),
            decomposition: Some(member.td().clone()),
            problem: Problem::DistanceIndependent { r, selectable: fibre },
        };
        let local = solve(&req)?;
        let mut image: Vec<u32> = local.solution.iter().map(|&x| member.f()[x as usize]).collect();
        image.sort_unstable();
        image.dedup();
        if image.len() != local.solution.len() {
            return Err(Error::Certificate(
                "a one-to-one fibre projected two chosen vertices onto one host vertex".into(),
            ));
        }
        values.push(local.value);
        solutions.push(image);
    }
    let chosen = pick_best(&values, true);
    let solution = solutions.swap_remove(chosen);

    for (i, &v) in solution.iter().enumerate() {
        let dist = g.distances_from(&[v]);
        for &w in &solution[i + 1..] {
            if dist[w as usize] < r {
                return Err(Error::Certificate(format!(
                    "projected solution vertices {v} and {w} are at host distance {} < {r}",
                    dist[w as usize]
                )));
            }
        }
    }

    Ok(PtasReport {
        problem: "distance_independent".into(),
        r,
        k,
        s: None,
        epsilon: ratio(1, k as u64),
        guarantee: ratio(k as u64 - 1, k as u64),
        value: values[chosen],
        solution,
        chosen_overlay_index: chosen,
        per_overlay_values: values,
        system_size: sys.size(),
        system_max_thickness: max_theta,
        system_tw_bound: sys.declared_tw(),
        wall_time_ms: t0.elapsed().as_millis() as u64,
    })
}

/// Minimum r-dominating set of the whole host, within a factor 1 + 1/k.
/// Per member, the targets are the depth-r preimages (every host vertex
/// has one), a minimum dominating set of those is found exactly, and its
/// projection r-dominates the host.
pub fn ptas_min_r_dominating(
    g: &Graph,
    sys: &OverlaySystem,
    r: u32,
    k: u32,
) -> Result<PtasReport> {
    let t0 = Instant::now();
    if r == 0 {
        return Err(Error::Ptas("r-domination needs radius >= 1".into()));
    }
    host_guard(sys, g)?;
    if sys.r() != r {
        return Err(Error::Ptas(format!(
            "system radius {} does not match the problem radius {r}",
            sys.r()
        )));
    }
    let max_theta = thickness_guard(sys, k)?;
    counting_bound_guard(sys, k)?;

    let mut values = Vec::with_capacity(sys.size());
    let mut solutions: Vec<Vec<u32>> = Vec::with_capacity(sys.size());
    for member in sys.members() {
        let targets: Vec<u32> = (0..member.h().n() as u32)
            .filter(|&x| member.ell()[x as usize] == r)
            .collect();
        let req = SolveRequest {
            graph: member.h().clone(),
            decomposition: Some(member.td().clone()),
            problem: Problem::RDominating { r, targets },
        };
        let local = solve(&req)?;
        let mut image: Vec<u32> = local.solution.iter().map(|&x| member.f()[x as usize]).collect();
        image.sort_unstable();
        image.dedup();
        values.push(image.len() as u64);
        solutions.push(image);
    }
    let chosen = pick_best(&values, false);
    let solution = solutions.swap_remove(chosen);

    let dist = g.distances_from(&solution);
    for v in 0..g.n() as u32 {
        if dist[v as usize] > r {
            return Err(Error::Certificate(format!(
                "projected solution leaves host vertex {v} undominated at radius {r}"
            )));
        }
    }

    Ok(PtasReport {
        problem: "r_dominating".into(),
        r,
        k,
        s: None,
        epsilon: ratio(1, k as u64),
        guarantee: ratio(k as u64 + 1, k as u64),
        value: values[chosen],
        solution,
        chosen_overlay_index: chosen,
        per_overlay_values: values,
        system_size: sys.size(),
        system_max_thickness: max_theta,
        system_tw_bound: sys.declared_tw(),
        wall_time_ms: t0.elapsed().as_millis() as u64,
    })
}

/// Minimum set of base vertices meeting every s-clique, within 1 + 1/k.
/// Runs over a star-host system: the star vertices of size-s cliques are
/// the targets, hitting their neighborhoods is solved exactly per member,
/// and the projection (kept to base vertices) hits every s-clique.
pub fn ptas_s_clique_cover(
    g: &Graph,
    sys: &OverlaySystem,
    s: u32,
    k: u32,
) -> Result<PtasReport> {
    let t0 = Instant::now();
    if s == 0 {
        return Err(Error::Ptas("clique cover needs clique size s >= 1".into()));
    }
    if sys.kind() != OverlayKind::Star {
        return Err(Error::Ptas("clique cover needs a star-host system".into()));
    }
    let sg: &StarGraph = sys
        .host()
        .star_graph()
        .ok_or_else(|| Error::Ptas("clique cover needs a star-host system".into()))?;
    if sg.base().content_hash() != g.content_hash() {
        return Err(Error::Ptas("system star host is not built over the input graph".into()));
    }
    if sys.r() != 1 {
        return Err(Error::Ptas(format!(
            "clique cover needs a radius-1 system, got radius {}",
            sys.r()
        )));
    }
    let max_theta = thickness_guard(sys, k)?;
    counting_bound_guard(sys, k)?;

    let base_n = g.n() as u32;
    let mut is_clique_star = vec![false; sg.graph().n()];
    for x in base_n..sg.graph().n() as u32 {
        if sg.clique_of(x).len() == s as usize {
            is_clique_star[x as usize] = true;
        }
    }

    let mut values = Vec::with_capacity(sys.size());
    let mut solutions: Vec<Vec<u32>> = Vec::with_capacity(sys.size());
    for member in sys.members() {
        let targets: Vec<u32> = (0..member.h().n() as u32)
            .filter(|&x| {
                member.ell()[x as usize] == 1 && is_clique_star[member.f()[x as usize] as usize]
            })
            .collect();
        let req = SolveRequest {
            graph: member.h().clone(),
            decomposition: Some(member.td().clone()),
            problem: Problem::NeighborhoodHitting { targets },
        };
        let local = solve(&req)?;
        let mut image: Vec<u32> = local
            .solution
            .iter()
            .map(|&x| member.f()[x as usize])
            .filter(|&v| v < base_n)
            .collect();
        image.sort_unstable();
        image.dedup();
        values.push(image.len() as u64);
        solutions.push(image);
    }
    let chosen = pick_best(&values, false);
    let solution = solutions.swap_remove(chosen);

    for x in base_n..sg.graph().n() as u32 {
        if !is_clique_star[x as usize] {
            continue;
        }
        let clique = sg.clique_of(x);
        if !clique.iter().any(|v| solution.binary_search(v).is_ok()) {
            return Err(Error::Certificate(format!(
                "projected solution misses the size-{s} clique {clique:?}"
            )));
        }
    }

    Ok(PtasReport {
        problem: "clique_cover".into(),
        r: 1,
        k,
        s: Some(s),
        epsilon: ratio(1, k as u64),
        guarantee: ratio(k as u64 + 1, k as u64),
        value: values[chosen],
        solution,
        chosen_overlay_index: chosen,
        per_overlay_values: values,
        system_size: sys.size(),
        system_max_thickness: max_theta,
        system_tw_bound: sys.declared_tw(),
        wall_time_ms: t0.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{identity_system, layering_lift, sgbas_to_star};
    use crate::generators;
    use crate::layering::bfs_layering;
    use crate::overlay::HostRef;
    use crate::solve::brute_force;

    fn identity_over(g: &Graph, r: u32) -> OverlaySystem {
        identity_system(&HostRef::plain(g.clone()), r).unwrap()
    }

    #[test]
    fn single_vertex_reports_value_one() {
        let g = generators::path(1).unwrap();
        let sys = identity_over(&g, 1);
        let rep = ptas_max_distance_independent(&g, &sys, 1, 3).unwrap();
        assert_eq!(rep.value, 1);
        assert_eq!(rep.solution, vec![0]);
        assert_eq!(rep.guarantee, ratio(2, 3));
        let rep = ptas_min_r_dominating(&g, &sys, 1, 3).unwrap();
        assert_eq!(rep.value, 1);
        assert_eq!(rep.guarantee, ratio(4, 3));
    }

    #[test]
    fn five_cycle_independence_hits_the_optimum_with_an_exact_member() {
        let g = generators::cycle(5).unwrap();
        let sys = identity_over(&g, 2);
        let rep = ptas_max_distance_independent(&g, &sys, 2, 2).unwrap();
        assert_eq!(rep.value, 2);
        assert_eq!(rep.per_overlay_values, vec![2]);
        assert_eq!(rep.chosen_overlay_index, 0);
    }

    #[test]
    fn cycle_domination_stays_within_the_declared_factor() {
        // Six windowed members of thickness 8/6 over the 24-cycle; the
        // exact optimum is 8, and the engine must stay within factor 2.
        let g = generators::cycle(24).unwrap();
        let l = bfs_layering(&g, &[0]).unwrap();
        let mut base = |h: &HostRef| identity_system(h, 1);
        let sys = layering_lift(&HostRef::plain(g.clone()), &l, 1, 1, &mut base).unwrap();
        assert!(sys.size() > 1, "expected a windowed system, got the shortcut");
        let rep = ptas_min_r_dominating(&g, &sys, 1, 1).unwrap();
        let opt = solve(&SolveRequest {
            graph: g.clone(),
            decomposition: None,
            problem: Problem::RDominating { r: 1, targets: (0..24).collect() },
        })
        .unwrap()
        .value;
        assert_eq!(opt, 8);
        assert!(rep.value >= opt);
        assert!(rep.value <= 2 * opt, "value {} exceeds twice the optimum {opt}", rep.value);
        let dist = g.distances_from(&rep.solution);
        assert!(dist.iter().all(|&d| d <= 1));
    }

    #[test]
    fn path_domination_with_identity_system_is_exact() {
        let g = generators::path(10).unwrap();
        let sys = identity_over(&g, 1);
        let rep = ptas_min_r_dominating(&g, &sys, 1, 2).unwrap();
        let opt = brute_force(&SolveRequest {
            graph: g.clone(),
            decomposition: None,
            problem: Problem::RDominating { r: 1, targets: (0..10).collect() },
        })
        .unwrap()
        .value;
        assert_eq!(opt, 4);
        assert_eq!(rep.value, 4);
        assert_eq!(rep.guarantee, ratio(3, 2));
    }

    #[test]
    fn vertex_cover_via_two_clique_cover() {
        let g = generators::path(3).unwrap();
        let sys = sgbas_to_star(&identity_over(&g, 1)).unwrap();
        let rep = ptas_s_clique_cover(&g, &sys, 2, 1).unwrap();
        assert_eq!(rep.value, 1);
        assert_eq!(rep.solution, vec![1]);
        assert_eq!(rep.s, Some(2));
    }

    #[test]
    fn triangle_cover_needs_one_vertex() {
        let g = generators::cycle(3).unwrap();
        let sys = sgbas_to_star(&identity_over(&g, 1)).unwrap();
        let rep = ptas_s_clique_cover(&g, &sys, 3, 1).unwrap();
        assert_eq!(rep.value, 1);
    }

    #[test]
    fn edgeless_graphs_have_nothing_to_cover() {
        let g = Graph::new(3);
        let sys = sgbas_to_star(&identity_over(&g, 1)).unwrap();
        let rep = ptas_s_clique_cover(&g, &sys, 2, 1).unwrap();
        assert_eq!(rep.value, 0);
        assert!(rep.solution.is_empty());
    }

    #[test]
    fn kind_and_host_mismatches_are_rejected() {
        let g = generators::path(3).unwrap();
        let star_sys = sgbas_to_star(&identity_over(&g, 1)).unwrap();
        assert!(ptas_max_distance_independent(&g, &star_sys, 1, 1).is_err());
        assert!(ptas_min_r_dominating(&g, &star_sys, 1, 1).is_err());
        let plain = identity_over(&g, 1);
        assert!(ptas_s_clique_cover(&g, &plain, 2, 1).is_err());
        let other = generators::path(4).unwrap();
        assert!(ptas_max_distance_independent(&other, &plain, 1, 1).is_err());
    }

    #[test]
    fn radius_mismatches_are_rejected() {
        let g = generators::path(4).unwrap();
        let sys = identity_over(&g, 1);
        // Domination needs the exact radius; independence tolerates r-1.
        assert!(ptas_min_r_dominating(&g, &sys, 2, 1).is_err());
        assert!(ptas_max_distance_independent(&g, &sys, 2, 1).is_ok());
        assert!(ptas_max_distance_independent(&g, &sys, 3, 1).is_err());
    }

    #[test]
    fn reports_are_deterministic_up_to_wall_time() {
        let g = generators::cycle(12).unwrap();
        let sys = identity_over(&g, 2);
        let mut a = ptas_min_r_dominating(&g, &sys, 2, 1).unwrap();
        let mut b = ptas_min_r_dominating(&g, &sys, 2, 1).unwrap();
        a.wall_time_ms = 0;
        b.wall_time_ms = 0;
        assert_eq!(a, b);
        assert_eq!(a.value, 3);
    }
}
