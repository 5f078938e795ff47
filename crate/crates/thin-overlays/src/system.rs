//! Systems of overlays over one host: averaged thickness, composition,
//! replication to a common size, unions, and assembly from components.

use num::{BigInt, BigRational};

use crate::error::{Error, Result};
use crate::graph::HostHash;
use crate::overlay::{HostRef, Overlay, OverlayKind};
use crate::td::TreeDecomposition;

pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Replication targets past this are a sign the construction is being run
/// far outside its intended depth; refuse rather than allocate gigabytes.
pub const REPLICATION_LIMIT: u64 = 1 << 16;

/// A multiset of overlays over one host, with declared certificate-width and
/// thickness bounds. Construction validates every member and both bounds;
/// instances are immutable afterwards.
#[derive(Clone, Debug)]
pub struct OverlaySystem {
    host: HostRef,
    host_hash: HostHash,
    kind: OverlayKind,
    r: u32,
    members: Vec<Overlay>,
    declared_tw: i64,
    declared_thickness: BigRational,
}

impl OverlaySystem {
    pub fn new(
        members: Vec<Overlay>,
        declared_tw: i64,
        declared_thickness: BigRational,
    ) -> Result<OverlaySystem> {
        if members.is_empty() {
            return Err(Error::System("a system needs at least one member".into()));
        }
        let host = members[0].host().clone();
        let host_hash = members[0].host_hash();
        let kind = members[0].kind();
        let r = members[0].r();
        for (i, m) in members.iter().enumerate() {
            if m.host_hash() != host_hash {
                return Err(Error::System(format!("member {i} is over a different host")));
            }
            if m.kind() != kind || m.r() != r {
                return Err(Error::System(format!(
                    "member {i} has kind {} radius {}, system is kind {} radius {}",
                    m.kind(),
                    m.r(),
                    kind,
                    r
                )));
            }
            m.verify().map_err(Error::from)?;
            if m.width() > declared_tw {
                return Err(Error::System(format!(
                    "member {i} has certificate width {}, declared bound is {declared_tw}",
                    m.width()
                )));
            }
        }
        let sys = OverlaySystem {
            host,
            host_hash,
            kind,
            r,
            members,
            declared_tw,
            declared_thickness,
        };
        let (_, max) = sys.thickness();
        if max > sys.declared_thickness {
            return Err(Error::System(format!(
                "system thickness {max} exceeds the declared bound {}",
                sys.declared_thickness
            )));
        }
        Ok(sys)
    }

    pub fn host(&self) -> &HostRef {
        &self.host
    }

    pub fn host_hash(&self) -> HostHash {
        self.host_hash
    }

    pub fn kind(&self) -> OverlayKind {
        self.kind
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn members(&self) -> &[Overlay] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn declared_tw(&self) -> i64 {
        self.declared_tw
    }

    pub fn declared_thickness(&self) -> &BigRational {
        &self.declared_thickness
    }

    /// Summed fibre sizes per host vertex (numerators of the thickness map).
    pub fn thickness_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.host.n()];
        for m in &self.members {
            for &fv in m.f() {
                counts[fv as usize] += 1;
            }
        }
        counts
    }

    /// Per-vertex averaged thickness and its maximum.
    pub fn thickness(&self) -> (Vec<BigRational>, BigRational) {
        let counts = self.thickness_counts();
        let m = self.members.len() as u64;
        let map: Vec<BigRational> = counts.iter().map(|&c| ratio(c, m)).collect();
        let max = counts.iter().copied().max().unwrap_or(0);
        (map, ratio(max, m))
    }

    /// Re-tags every member as kind A (a strictly weaker promise, so validity
    /// is preserved).
    pub fn weakened_to_a(&self) -> Result<OverlaySystem> {
        if matches!(self.kind, OverlayKind::Star) {
            return Err(Error::System("star systems cannot be weakened to kind A".into()));
        }
        let members = self
            .members
            .iter()
            .map(|m| {
                let (host, _, r, h, f, ell, td) = m.clone().into_parts();
                Overlay::new(host, OverlayKind::A, r, h, f, ell, td)
            })
            .collect::<Result<Vec<_>>>()?;
        OverlaySystem::new(members, self.declared_tw, self.declared_thickness.clone())
    }
}

/// Per-vertex thickness map and its maximum, as exact rationals.
pub fn system_thickness(s: &OverlaySystem) -> (Vec<BigRational>, BigRational) {
    s.thickness()
}

/// Disjoint union of overlays over one host: fibres add, certificates merge
/// under a chain of empty bags. A single overlay composes to itself.
pub fn compose_overlays(members: &[Overlay]) -> Result<Overlay> {
    if members.is_empty() {
        return Err(Error::System("compose needs at least one overlay".into()));
    }
    if members.len() == 1 {
        return Ok(members[0].clone());
    }
    let first = &members[0];
    for m in &members[1..] {
        if m.host_hash() != first.host_hash() {
            return Err(Error::System("compose: host mismatch".into()));
        }
        if m.kind() != first.kind() || m.r() != first.r() {
            return Err(Error::System("compose: kind or radius mismatch".into()));
        }
    }
    let mut offset = 0u32;
    let mut edges = Vec::new();
    let mut f = Vec::new();
    let mut ell = Vec::new();
    let mut tds = Vec::new();
    for m in members {
        for (x, y) in m.h().edges() {
            edges.push((x + offset, y + offset));
        }
        f.extend_from_slice(m.f());
        ell.extend_from_slice(m.ell());
        tds.push(m.td().relabel(|v| v + offset));
        offset += m.h().n() as u32;
    }
    let h = crate::graph::Graph::from_edges(offset as usize, &edges)?;
    let td = TreeDecomposition::forest_with_empty_chain(&tds);
    Overlay::new(first.host().clone(), first.kind(), first.r(), h, f, ell, td)
}

/// Member-wise composition of equally sized systems over one host: member j
/// of the output is the composition of the j-th members. Thickness maps add.
pub fn compose_systems(systems: &[OverlaySystem]) -> Result<OverlaySystem> {
    if systems.is_empty() {
        return Err(Error::System("compose needs at least one system".into()));
    }
    if systems.len() == 1 {
        return Ok(systems[0].clone());
    }
    let a = systems[0].size();
    for s in systems {
        if s.size() != a {
            return Err(Error::System(format!(
                "compose: sizes differ ({} vs {a}); replicate to a common size first",
                s.size()
            )));
        }
    }
    let mut members = Vec::with_capacity(a);
    for j in 0..a {
        let slice: Vec<Overlay> = systems.iter().map(|s| s.members()[j].clone()).collect();
        members.push(compose_overlays(&slice)?);
    }
    let tw = systems.iter().map(|s| s.declared_tw()).max().unwrap();
    let thickness = systems
        .iter()
        .map(|s| s.declared_thickness().clone())
        .fold(BigRational::from(BigInt::from(0)), |acc, t| acc + t);
    OverlaySystem::new(members, tw, thickness)
}

/// Brings systems to the common size 3·k·(max input size) by repeating
/// members round-robin in id order, so each member appears either c or c+1
/// times. Requires input thickness at most 1 + 1/(3k); the replication factor
/// spread then keeps every output below 1 + 1/k.
pub fn replicate_equal_size(
    systems: &[OverlaySystem],
    k: u32,
) -> Result<Vec<OverlaySystem>> {
    if systems.is_empty() || k == 0 {
        return Err(Error::System("replication needs systems and k >= 1".into()));
    }
    let bound = ratio(3 * k as u64 + 1, 3 * k as u64);
    for (i, s) in systems.iter().enumerate() {
        let (_, max) = s.thickness();
        if max > bound {
            return Err(Error::System(format!(
                "system {i} has thickness {max}, above the replication precondition {bound}"
            )));
        }
    }
    let a = systems.iter().map(|s| s.size()).max().unwrap();
    let target = (3 * k as u64).saturating_mul(a as u64);
    if target > REPLICATION_LIMIT {
        return Err(Error::System(format!(
            "replication to the common size {target} exceeds the {REPLICATION_LIMIT}-member \
             limit; lower the accuracy or coarsen the construction"
        )));
    }
    let target = target as usize;
    let mut out = Vec::with_capacity(systems.len());
    for s in systems {
        let m = s.size();
        let base = target / m;
        let extra = target % m;
        let mut members = Vec::with_capacity(target);
        for pass in 0..base + 1 {
            for (i, member) in s.members().iter().enumerate() {
                let copies = base + usize::from(i < extra);
                if pass < copies {
                    members.push(member.clone());
                }
            }
        }
        debug_assert_eq!(members.len(), target);
        let mut replicated = OverlaySystem {
            host: s.host.clone(),
            host_hash: s.host_hash,
            kind: s.kind,
            r: s.r,
            members,
            declared_tw: s.declared_tw,
            declared_thickness: s.declared_thickness.clone(),
        };
        let (_, max) = replicated.thickness();
        replicated.declared_thickness = max;
        out.push(replicated);
    }
    Ok(out)
}

/// Multiset union of systems over one host; thickness becomes the
/// size-weighted average of the member thickness maps.
pub fn union_systems(systems: &[OverlaySystem]) -> Result<OverlaySystem> {
    if systems.is_empty() {
        return Err(Error::System("union needs at least one system".into()));
    }
    if systems.len() == 1 {
        return Ok(systems[0].clone());
    }
    let hash = systems[0].host_hash();
    let (kind, r) = (systems[0].kind(), systems[0].r());
    let mut members = Vec::new();
    for s in systems {
        if s.host_hash() != hash {
            return Err(Error::System("union: host mismatch".into()));
        }
        if s.kind() != kind || s.r() != r {
            return Err(Error::System("union: kind or radius mismatch".into()));
        }
        members.extend(s.members().iter().cloned());
    }
    let tw = systems.iter().map(|s| s.declared_tw()).max().unwrap();
    let mut counts = vec![0u64; systems[0].host().n()];
    for m in &members {
        for &fv in m.f() {
            counts[fv as usize] += 1;
        }
    }
    let max = counts.into_iter().max().unwrap_or(0);
    let thickness = ratio(max, members.len() as u64);
    OverlaySystem::new(members, tw, thickness)
}

/// Rebuilds per-component systems into one system over the whole host:
/// replicate the component systems to a common size, then compose the j-th
/// members across components, translating vertex ids into the full host.
/// Star hosts translate star vertices through their cliques.
pub fn component_lift(
    host: &HostRef,
    comp_systems: &[OverlaySystem],
    k: u32,
) -> Result<OverlaySystem> {
    let base_comps = match host {
        HostRef::Plain(g) => g.components(),
        HostRef::Star(sg) => sg.base().components(),
    };
    if base_comps.len() != comp_systems.len() {
        return Err(Error::System(format!(
            "host has {} components, got {} systems",
            base_comps.len(),
            comp_systems.len()
        )));
    }
    let (kind, r) = (comp_systems[0].kind(), comp_systems[0].r());
    if comp_systems.iter().any(|s| s.kind() != kind || s.r() != r) {
        return Err(Error::System(
            "component systems must share kind and radius".into(),
        ));
    }
    if comp_systems.len() == 1 {
        if comp_systems[0].host_hash() != host.hash() {
            return Err(Error::System(
                "single component system is over a different graph than the host".into(),
            ));
        }
        return Ok(comp_systems[0].clone());
    }
    // Check each system is over the induced component (or its star graph) and
    // build the id translation into the full host.
    let mut vmaps: Vec<Vec<u32>> = Vec::with_capacity(base_comps.len());
    for (i, comp) in base_comps.iter().enumerate() {
        let sys = &comp_systems[i];
        match host {
            HostRef::Plain(g) => {
                let sub = crate::graph::Subgraph::induced(g, comp)?;
                if sys.host_hash() != sub.graph().content_hash() {
                    return Err(Error::System(format!(
                        "system {i} is not over the induced subgraph of component {i}"
                    )));
                }
                vmaps.push(comp.clone());
            }
            HostRef::Star(sg) => {
                let local_sg = sys.host().star_graph().ok_or_else(|| {
                    Error::System(format!("system {i} is not over a star graph"))
                })?;
                let sub = crate::graph::Subgraph::induced(sg.base(), comp)?;
                if local_sg.base().content_hash() != sub.graph().content_hash() {
                    return Err(Error::System(format!(
                        "system {i} is not over the star graph of component {i}"
                    )));
                }
                let mut map: Vec<u32> = comp.clone();
                for si in 0..local_sg.star_count() {
                    let local_star = (local_sg.base().n() + si) as u32;
                    let global_clique: Vec<u32> = local_sg
                        .clique_of(local_star)
                        .iter()
                        .map(|&v| comp[v as usize])
                        .collect();
                    let global_star = sg.star_of(&global_clique).ok_or_else(|| {
                        Error::System(format!(
                            "clique {global_clique:?} of component {i} is missing from the host star graph"
                        ))
                    })?;
                    map.push(global_star);
                }
                vmaps.push(map);
            }
        }
    }
    let replicated = replicate_equal_size(comp_systems, k)?;
    let common = replicated[0].size();
    let mut members = Vec::with_capacity(common);
    for j in 0..common {
        let mut offset = 0u32;
        let mut edges = Vec::new();
        let mut f = Vec::new();
        let mut ell = Vec::new();
        let mut tds = Vec::new();
        for (i, rsys) in replicated.iter().enumerate() {
            let m = &rsys.members()[j];
            for (x, y) in m.h().edges() {
                edges.push((x + offset, y + offset));
            }
            f.extend(m.f().iter().map(|&fv| vmaps[i][fv as usize]));
            ell.extend_from_slice(m.ell());
            tds.push(m.td().relabel(|v| v + offset));
            offset += m.h().n() as u32;
        }
        let h = crate::graph::Graph::from_edges(offset as usize, &edges)?;
        let td = TreeDecomposition::forest_with_empty_chain(&tds);
        members.push(Overlay::new(host.clone(), kind, r, h, f, ell, td)?);
    }
    let tw = comp_systems.iter().map(|s| s.declared_tw()).max().unwrap();
    OverlaySystem::new(members, tw, ratio(k as u64 + 1, k as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::Graph;
    use crate::overlay::trivial_overlay;
    use crate::td::min_fill_decomposition;
    use num::One;

    fn trivial(g: &Graph, r: u32) -> Overlay {
        trivial_overlay(g, r, min_fill_decomposition(g).unwrap()).unwrap()
    }

    fn trivial_system(g: &Graph, r: u32) -> OverlaySystem {
        let o = trivial(g, r);
        let tw = o.width();
        OverlaySystem::new(vec![o], tw, BigRational::one()).unwrap()
    }

    #[test]
    fn single_trivial_system_has_unit_thickness() {
        let g = generators::path(4).unwrap();
        let s = trivial_system(&g, 1);
        let (map, max) = system_thickness(&s);
        assert!(map.iter().all(|t| t.is_one()));
        assert!(max.is_one());
    }

    #[test]
    fn mixed_system_averages_thickness() {
        let g = generators::path(3).unwrap();
        let t = trivial(&g, 1);
        let double = compose_overlays(&[t.clone(), t.clone()]).unwrap();
        let s = OverlaySystem::new(vec![t, double], 1, ratio(3, 2)).unwrap();
        let (map, max) = system_thickness(&s);
        assert_eq!(max, ratio(3, 2));
        assert!(map.iter().all(|t| *t == ratio(3, 2)));
    }

    #[test]
    fn declared_bounds_are_enforced() {
        let g = generators::path(3).unwrap();
        let t = trivial(&g, 1);
        let double = compose_overlays(&[t.clone(), t.clone()]).unwrap();
        assert!(OverlaySystem::new(vec![t.clone(), double], 1, BigRational::one()).is_err());
        assert!(OverlaySystem::new(vec![t], 0, BigRational::one()).is_err());
    }

    #[test]
    fn compose_of_one_is_identity() {
        let g = generators::cycle(5).unwrap();
        let t = trivial(&g, 2);
        let c = compose_overlays(&[t.clone()]).unwrap();
        assert_eq!(c.h().edges(), t.h().edges());
        assert_eq!(c.f(), t.f());
    }

    #[test]
    fn composing_trivial_k1_overlays_doubles_thickness() {
        let g = generators::path(1).unwrap();
        let t = trivial(&g, 1);
        let c = compose_overlays(&[t.clone(), t]).unwrap();
        assert_eq!(c.h().n(), 2);
        assert_eq!(c.thickness_at(0), 2);
        assert!(c.verify().is_ok());
    }

    #[test]
    fn composition_preserves_validity_on_random_trees() {
        for seed in 0..10 {
            let g = generators::random_tree(9, seed).unwrap();
            let t = trivial(&g, 2);
            let c = compose_overlays(&[t.clone(), t.clone(), t]).unwrap();
            assert!(c.verify().is_ok());
            for v in 0..9 {
                assert_eq!(c.thickness_at(v), 3);
            }
        }
    }

    #[test]
    fn compose_systems_sums_thickness_memberwise() {
        let g = generators::cycle(4).unwrap();
        let s1 = trivial_system(&g, 1);
        let s2 = trivial_system(&g, 1);
        let c = compose_systems(&[s1.clone(), s2]).unwrap();
        assert_eq!(c.size(), 1);
        let (_, max) = system_thickness(&c);
        assert_eq!(max, ratio(2, 1));
        let alone = compose_systems(&[s1.clone()]).unwrap();
        assert_eq!(alone.size(), s1.size());
        let sized = OverlaySystem::new(
            vec![trivial(&g, 1), trivial(&g, 1)],
            2,
            BigRational::one(),
        )
        .unwrap();
        assert!(compose_systems(&[s1, sized]).is_err());
    }

    #[test]
    fn replication_counts_follow_the_round_robin() {
        let g = generators::path(2).unwrap();
        let t = trivial(&g, 1);
        let two = OverlaySystem::new(vec![t.clone(), t.clone()], 1, BigRational::one()).unwrap();
        let three =
            OverlaySystem::new(vec![t.clone(), t.clone(), t.clone()], 1, BigRational::one())
                .unwrap();
        let out = replicate_equal_size(&[two, three], 1).unwrap();
        assert_eq!(out[0].size(), 9);
        assert_eq!(out[1].size(), 9);
        // Size-2 input: 9 = 2*4 + 1, so member 0 appears 5 times, member 1
        // four times.
        let (_, max0) = out[0].thickness();
        assert!(max0.is_one());

        let equal = replicate_equal_size(&[three_copy(&g)], 1).unwrap();
        assert_eq!(equal[0].size(), 9);
    }

    fn three_copy(g: &Graph) -> OverlaySystem {
        let t = trivial(g, 1);
        OverlaySystem::new(vec![t.clone(), t.clone(), t], 1, BigRational::one()).unwrap()
    }

    #[test]
    fn replication_rejects_thick_inputs() {
        let g = generators::path(3).unwrap();
        let t = trivial(&g, 1);
        let double = compose_overlays(&[t.clone(), t.clone()]).unwrap();
        let s = OverlaySystem::new(vec![t, double], 1, ratio(3, 2)).unwrap();
        assert!(replicate_equal_size(&[s], 1).is_err());
    }

    #[test]
    fn union_averages_by_size() {
        let g = generators::path(3).unwrap();
        let t = trivial(&g, 1);
        let double = compose_overlays(&[t.clone(), t.clone()]).unwrap();
        let s1 = OverlaySystem::new(vec![t], 1, BigRational::one()).unwrap();
        let s2 = OverlaySystem::new(vec![double], 1, ratio(2, 1)).unwrap();
        let u = union_systems(&[s1.clone(), s2]).unwrap();
        assert_eq!(u.size(), 2);
        let (_, max) = system_thickness(&u);
        assert_eq!(max, ratio(3, 2));
        let alone = union_systems(&[s1.clone()]).unwrap();
        assert_eq!(alone.size(), 1);
    }

    #[test]
    fn accounting_identity_holds() {
        let g = generators::cycle(6).unwrap();
        let t = trivial(&g, 1);
        let double = compose_overlays(&[t.clone(), t.clone()]).unwrap();
        let s = OverlaySystem::new(vec![t, double], 2, ratio(3, 2)).unwrap();
        let lhs: usize = s.members().iter().map(|m| m.h().n()).sum();
        let rhs: u64 = s.thickness_counts().iter().sum();
        assert_eq!(lhs as u64, rhs);
    }

    #[test]
    fn component_lift_merges_disjoint_vertices() {
        let g = Graph::new(2);
        let comps: Vec<OverlaySystem> = g
            .components()
            .iter()
            .map(|c| {
                let sub = crate::graph::Subgraph::induced(&g, c).unwrap();
                trivial_system(sub.graph(), 1)
            })
            .collect();
        let host = HostRef::plain(g);
        let lifted = component_lift(&host, &comps, 1).unwrap();
        assert_eq!(lifted.size(), 3);
        let (map, max) = system_thickness(&lifted);
        assert!(max.is_one());
        assert!(map.iter().all(|t| t.is_one()));
    }

    #[test]
    fn component_lift_on_connected_host_returns_the_system() {
        let g = generators::path(4).unwrap();
        let s = trivial_system(&g, 1);
        let host = HostRef::plain(g);
        let lifted = component_lift(&host, &[s.clone()], 2).unwrap();
        assert_eq!(lifted.size(), s.size());
    }

    #[test]
    fn component_lift_mixes_path_and_cycle() {
        let mut edges = vec![(0u32, 1), (1, 2)];
        for (u, v) in [(3u32, 4), (4, 5), (5, 6), (6, 3)] {
            edges.push((u, v));
        }
        let g = Graph::from_edges(7, &edges).unwrap();
        let comps: Vec<OverlaySystem> = g
            .components()
            .iter()
            .map(|c| {
                let sub = crate::graph::Subgraph::induced(&g, c).unwrap();
                trivial_system(sub.graph(), 1)
            })
            .collect();
        let host = HostRef::plain(g.clone());
        let lifted = component_lift(&host, &comps, 1).unwrap();
        assert_eq!(lifted.size(), 3);
        for m in lifted.members() {
            assert!(m.verify().is_ok());
            assert_eq!(m.h().n(), 7);
        }
        let (_, max) = system_thickness(&lifted);
        assert!(max.is_one());
    }

    #[test]
    fn weakening_s_to_a_preserves_validity() {
        let g = generators::path(4).unwrap();
        let s = trivial_system(&g, 1);
        let weak = s.weakened_to_a().unwrap();
        assert_eq!(weak.kind(), OverlayKind::A);
        assert_eq!(weak.size(), 1);
    }
}
