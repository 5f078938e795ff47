//! Overlays: graphs mapped homomorphically onto a host, with per-vertex
//! levels recording how much of the host neighborhood each vertex represents
//! faithfully.

use std::sync::Arc;

use crate::cliques::StarGraph;
use crate::error::{Error, OverlayViolation, Result};
use crate::graph::{Graph, HostHash, Subgraph};
use crate::td::TreeDecomposition;

/// A: no structural restriction. S: each component maps injectively onto an
/// induced host subgraph. Star: the host is a star augmentation and star
/// vertex fibres are simplicial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OverlayKind {
    A,
    S,
    Star,
}

impl OverlayKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OverlayKind::A => "A",
            OverlayKind::S => "S",
            OverlayKind::Star => "star",
        }
    }

    pub fn parse(s: &str) -> Option<OverlayKind> {
        match s {
            "A" => Some(OverlayKind::A),
            "S" => Some(OverlayKind::S),
            "star" => Some(OverlayKind::Star),
            _ => None,
        }
    }
}

impl std::fmt::Display for OverlayKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Shared handle to an overlay host: either a plain graph or a star
/// augmentation (required for star-kind overlays, which need the clique
/// structure, not just the adjacency).
#[derive(Clone, Debug)]
pub enum HostRef {
    Plain(Arc<Graph>),
    Star(Arc<StarGraph>),
}

impl HostRef {
    pub fn plain(g: Graph) -> HostRef {
        HostRef::Plain(Arc::new(g))
    }

    pub fn star(s: StarGraph) -> HostRef {
        HostRef::Star(Arc::new(s))
    }

    /// The graph overlay maps actually land in (the augmented graph for star
    /// hosts).
    pub fn graph(&self) -> &Graph {
        match self {
            HostRef::Plain(g) => g,
            HostRef::Star(s) => s.graph(),
        }
    }

    pub fn star_graph(&self) -> Option<&StarGraph> {
        match self {
            HostRef::Plain(_) => None,
            HostRef::Star(s) => Some(s),
        }
    }

    pub fn n(&self) -> usize {
        self.graph().n()
    }

    pub fn hash(&self) -> HostHash {
        self.graph().content_hash()
    }
}

/// An overlay (H, f, ell) of a host graph, with a tree decomposition of H as
/// its width certificate. Structural totality (f, ell defined on all of H,
/// levels within 0..=r, certificate valid for H) is enforced at construction;
/// the semantic conditions live in [`Overlay::verify`].
#[derive(Clone, Debug)]
pub struct Overlay {
    host: HostRef,
    host_hash: HostHash,
    kind: OverlayKind,
    r: u32,
    h: Graph,
    f: Vec<u32>,
    ell: Vec<u32>,
    td: TreeDecomposition,
}

impl Overlay {
    pub fn new(
        host: HostRef,
        kind: OverlayKind,
        r: u32,
        h: Graph,
        f: Vec<u32>,
        ell: Vec<u32>,
        td: TreeDecomposition,
    ) -> Result<Overlay> {
        if r == 0 {
            return Err(OverlayViolation::Shape("radius must be positive".into()).into());
        }
        if f.len() != h.n() {
            return Err(OverlayViolation::Shape(format!(
                "f defined on {} vertices, h has {}",
                f.len(),
                h.n()
            ))
            .into());
        }
        if ell.len() != h.n() {
            return Err(OverlayViolation::Shape(format!(
                "ell defined on {} vertices, h has {}",
                ell.len(),
                h.n()
            ))
            .into());
        }
        let hn = host.n();
        for (x, &fx) in f.iter().enumerate() {
            if fx as usize >= hn {
                return Err(OverlayViolation::Shape(format!(
                    "f({x}) = {fx} is outside the host"
                ))
                .into());
            }
        }
        for (x, &lx) in ell.iter().enumerate() {
            if lx > r {
                return Err(OverlayViolation::LevelRange { x: x as u32, ell: lx, r }.into());
            }
        }
        if matches!(kind, OverlayKind::Star) != matches!(host, HostRef::Star(_)) {
            return Err(OverlayViolation::Shape(
                "star kind requires a star host, and only star kind may have one".into(),
            )
            .into());
        }
        td.validate(&h)?;
        let host_hash = host.hash();
        Ok(Overlay { host, host_hash, kind, r, h, f, ell, td })
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

    pub fn h(&self) -> &Graph {
        &self.h
    }

    pub fn f(&self) -> &[u32] {
        &self.f
    }

    pub fn ell(&self) -> &[u32] {
        &self.ell
    }

    pub fn td(&self) -> &TreeDecomposition {
        &self.td
    }

    /// Certificate width of this overlay.
    pub fn width(&self) -> i64 {
        self.td.width()
    }

    /// Decomposes the overlay into its fields, for rebuilding variants.
    pub fn into_parts(
        self,
    ) -> (HostRef, OverlayKind, u32, Graph, Vec<u32>, Vec<u32>, TreeDecomposition) {
        (self.host, self.kind, self.r, self.h, self.f, self.ell, self.td)
    }

    /// Fibre size over one host vertex.
    pub fn thickness_at(&self, v: u32) -> usize {
        self.f.iter().filter(|&&fv| fv == v).count()
    }

    /// Preimages of every host vertex, each list ascending.
    pub fn fibres(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.host.n()];
        for (x, &fx) in self.f.iter().enumerate() {
            out[fx as usize].push(x as u32);
        }
        out
    }

    /// Checks the semantic overlay conditions in a fixed clause order:
    /// homomorphism, walk-preserving, neighborhood, then the kind-specific
    /// clauses. Returns the first violation with witness vertices.
    pub fn verify(&self) -> std::result::Result<(), OverlayViolation> {
        let host = self.host.graph();
        for (x, y) in self.h.edges() {
            let (fx, fy) = (self.f[x as usize], self.f[y as usize]);
            if fx == fy || !host.has_edge(fx, fy) {
                return Err(OverlayViolation::Homomorphism { x, y, fx, fy });
            }
        }
        for x in 0..self.h.n() as u32 {
            let lx = self.ell[x as usize];
            if lx == 0 {
                continue;
            }
            for &w in host.neighbors(self.f[x as usize]) {
                let ok = self.h.neighbors(x).iter().any(|&y| {
                    self.f[y as usize] == w && self.ell[y as usize] + 1 >= lx
                });
                if !ok {
                    return Err(OverlayViolation::WalkPreserving {
                        x,
                        ell: lx,
                        w,
                        needed: lx - 1,
                    });
                }
            }
        }
        let mut covered = vec![false; self.host.n()];
        for (x, &fx) in self.f.iter().enumerate() {
            if self.ell[x] == self.r {
                covered[fx as usize] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(OverlayViolation::Neighborhood { v: v as u32, r: self.r });
        }
        match self.kind {
            OverlayKind::A => {}
            OverlayKind::S => self.verify_subgraph_based()?,
            OverlayKind::Star => self.verify_simplicial()?,
        }
        Ok(())
    }

    fn verify_subgraph_based(&self) -> std::result::Result<(), OverlayViolation> {
        for comp in self.h.components() {
            let mut image: std::collections::BTreeMap<u32, u32> = std::collections::BTreeMap::new();
            for &x in &comp {
                let fx = self.f[x as usize];
                if let Some(&y) = image.get(&fx) {
                    return Err(OverlayViolation::InjectiveOnComponent { x: y, y: x, fx });
                }
                image.insert(fx, x);
            }
            for &x in &comp {
                let fx = self.f[x as usize];
                for &w in self.host.graph().neighbors(fx) {
                    if let Some(&y) = image.get(&w) {
                        if y > x && !self.h.has_edge(x, y) {
                            return Err(OverlayViolation::ImageNotInduced {
                                u: x,
                                v: y,
                                fu: fx,
                                fv: w,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn verify_simplicial(&self) -> std::result::Result<(), OverlayViolation> {
        let sg = self.host.star_graph().expect("star kind has a star host");
        for x in 0..self.h.n() as u32 {
            let fx = self.f[x as usize];
            if !sg.is_star_vertex(fx) {
                continue;
            }
            let nb = self.h.neighbors(x);
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !self.h.has_edge(a, b) {
                        return Err(OverlayViolation::NotSimplicial { x, v: fx, a, b });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Free-function form of [`Overlay::verify`], wrapping the violation into the
/// crate error type.
pub fn verify_overlay(o: &Overlay) -> Result<()> {
    o.verify().map_err(Error::from)
}

/// Lifts a host walk (vertex sequence starting at `f(x)`) to a walk in h
/// starting at `x`, stepping through neighbors whose f-values follow the walk.
/// Among the eligible neighbors the lift picks the one with the highest level,
/// then the smallest id, so lifts are deterministic.
pub fn lift_walk(o: &Overlay, x: u32, walk: &[u32]) -> Result<Vec<u32>> {
    let host = o.host().graph();
    if walk.is_empty() || walk[0] != o.f()[x as usize] {
        return Err(Error::OverlayOp(format!(
            "walk must start at f({x}) = {}",
            o.f()[x as usize]
        )));
    }
    let steps = walk.len() - 1;
    if steps as u32 > o.ell()[x as usize] {
        return Err(Error::OverlayOp(format!(
            "walk of length {steps} exceeds ell({x}) = {}",
            o.ell()[x as usize]
        )));
    }
    for i in 0..steps {
        if !host.has_edge(walk[i], walk[i + 1]) {
            return Err(Error::OverlayOp(format!(
                "{}-{} is not a host edge, input is not a walk",
                walk[i],
                walk[i + 1]
            )));
        }
    }
    let mut out = vec![x];
    let mut cur = x;
    for &w in &walk[1..] {
        let need = o.ell()[cur as usize].saturating_sub(1);
        let mut pick: Option<u32> = None;
        for &y in o.h().neighbors(cur) {
            if o.f()[y as usize] == w && o.ell()[y as usize] >= need {
                let better = match pick {
                    None => true,
                    Some(p) => o.ell()[y as usize] > o.ell()[p as usize],
                };
                if better {
                    pick = Some(y);
                }
            }
        }
        cur = pick.ok_or_else(|| {
            Error::OverlayOp(format!(
                "no lift step from {cur} toward host vertex {w}; overlay is not walk-preserving"
            ))
        })?;
        out.push(cur);
    }
    Ok(out)
}

/// Restricts an overlay to a subgraph of its host: drop the vertices mapping
/// outside, drop the edges mapping onto missing host edges, renumber, and
/// shrink the certificate accordingly. Star-kind overlays are rejected; their
/// restriction must stay clique-aware and lives with the builders.
pub fn restrict_overlay(o: &Overlay, g2: &Subgraph) -> Result<Overlay> {
    if matches!(o.kind(), OverlayKind::Star) {
        return Err(Error::OverlayOp(
            "restrict_overlay applies to kinds A and S only".into(),
        ));
    }
    if g2.host_hash() != o.host_hash() {
        return Err(Error::OverlayOp(
            "subgraph was taken from a different host".into(),
        ));
    }
    let n = o.h().n();
    let mut new_id = vec![u32::MAX; n];
    let mut kept = 0u32;
    for x in 0..n {
        if g2.local_of(o.f()[x]).is_some() {
            new_id[x] = kept;
            kept += 1;
        }
    }
    let mut edges = Vec::new();
    for (x, y) in o.h().edges() {
        if new_id[x as usize] == u32::MAX || new_id[y as usize] == u32::MAX {
            continue;
        }
        let (lu, lv) = (
            g2.local_of(o.f()[x as usize]).unwrap(),
            g2.local_of(o.f()[y as usize]).unwrap(),
        );
        if g2.graph().has_edge(lu, lv) {
            edges.push((new_id[x as usize], new_id[y as usize]));
        }
    }
    let h2 = Graph::from_edges(kept as usize, &edges)?;
    let mut f2 = Vec::with_capacity(kept as usize);
    let mut ell2 = Vec::with_capacity(kept as usize);
    for x in 0..n {
        if new_id[x] != u32::MAX {
            f2.push(g2.local_of(o.f()[x]).unwrap());
            ell2.push(o.ell()[x]);
        }
    }
    let td2 = o
        .td()
        .filter_bags(|v| new_id[v as usize] != u32::MAX)
        .relabel(|v| new_id[v as usize]);
    Overlay::new(
        HostRef::plain(g2.graph().clone()),
        o.kind(),
        o.r(),
        h2,
        f2,
        ell2,
        td2,
    )
}

/// The identity overlay: h = g, f = id, every level r. Subgraph-based by
/// construction.
pub fn trivial_overlay(g: &Graph, r: u32, td: TreeDecomposition) -> Result<Overlay> {
    let n = g.n();
    Overlay::new(
        HostRef::plain(g.clone()),
        OverlayKind::S,
        r,
        g.clone(),
        (0..n as u32).collect(),
        vec![r; n],
        td,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::star_graph;
    use crate::generators;
    use crate::td::min_fill_decomposition;
    use rand::{Rng, SeedableRng};

    fn trivial(g: &Graph, r: u32) -> Overlay {
        trivial_overlay(g, r, min_fill_decomposition(g).unwrap()).unwrap()
    }

    #[test]
    fn trivial_overlay_verifies_as_s_and_a() {
        let g = generators::path(3).unwrap();
        let o = trivial(&g, 2);
        assert!(o.verify().is_ok());
        for v in 0..3 {
            assert_eq!(o.thickness_at(v), 1);
        }
        let (host, _, r, h, f, ell, td) = o.into_parts();
        let as_a = Overlay::new(host, OverlayKind::A, r, h, f, ell, td).unwrap();
        assert!(as_a.verify().is_ok());
    }

    #[test]
    fn single_vertex_fibre_fails_walk_preservation() {
        let g = generators::path(3).unwrap();
        let h = Graph::new(1);
        let o = Overlay::new(
            HostRef::plain(g),
            OverlayKind::A,
            1,
            h,
            vec![1],
            vec![1],
            TreeDecomposition::single_bag(1),
        )
        .unwrap();
        assert_eq!(
            o.verify().unwrap_err(),
            OverlayViolation::WalkPreserving { x: 0, ell: 1, w: 0, needed: 0 }
        );
    }

    #[test]
    fn lowered_fibre_fails_neighborhood() {
        let g = generators::path(3).unwrap();
        let o = trivial(&g, 1);
        let (host, kind, r, h, f, mut ell, td) = o.into_parts();
        ell[1] = 0;
        let o = Overlay::new(host, kind, r, h, f, ell, td).unwrap();
        assert_eq!(
            o.verify().unwrap_err(),
            OverlayViolation::Neighborhood { v: 1, r: 1 }
        );
    }

    #[test]
    fn double_cover_of_c4_is_kind_a_but_not_s() {
        let host = generators::cycle(4).unwrap();
        let h = generators::cycle(8).unwrap();
        let f: Vec<u32> = (0..8).map(|i| i % 4).collect();
        let o = Overlay::new(
            HostRef::plain(host),
            OverlayKind::A,
            2,
            h.clone(),
            f.clone(),
            vec![2; 8],
            min_fill_decomposition(&h).unwrap(),
        )
        .unwrap();
        assert!(o.verify().is_ok());
        for v in 0..4 {
            assert_eq!(o.thickness_at(v), 2);
        }
        let lifted = lift_walk(&o, 0, &[0, 3, 2]).unwrap();
        assert_eq!(lifted, vec![0, 7, 6]);

        let (host, _, r, h, f, ell, td) = o.into_parts();
        let as_s = Overlay::new(host, OverlayKind::S, r, h, f, ell, td).unwrap();
        assert_eq!(
            as_s.verify().unwrap_err(),
            OverlayViolation::InjectiveOnComponent { x: 0, y: 4, fx: 0 }
        );
    }

    #[test]
    fn folded_component_fails_injectivity_with_first_pair() {
        let host = generators::path(3).unwrap();
        let h = Graph::from_edges(
            6,
            &[(0, 1), (1, 2), (3, 4), (4, 5)],
        )
        .unwrap();
        let f = vec![0, 1, 2, 0, 1, 0];
        let ell = vec![1, 1, 1, 0, 0, 0];
        let o = Overlay::new(
            HostRef::plain(host),
            OverlayKind::S,
            1,
            h.clone(),
            f,
            ell,
            min_fill_decomposition(&h).unwrap(),
        )
        .unwrap();
        assert_eq!(
            o.verify().unwrap_err(),
            OverlayViolation::InjectiveOnComponent { x: 3, y: 5, fx: 0 }
        );
    }

    #[test]
    fn non_induced_component_image_is_reported() {
        let host = generators::cycle(3).unwrap();
        let h = Graph::from_edges(
            6,
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5)],
        )
        .unwrap();
        let f = vec![0, 1, 2, 0, 1, 2];
        let ell = vec![1, 1, 1, 0, 0, 0];
        let o = Overlay::new(
            HostRef::plain(host),
            OverlayKind::S,
            1,
            h.clone(),
            f,
            ell,
            min_fill_decomposition(&h).unwrap(),
        )
        .unwrap();
        assert_eq!(
            o.verify().unwrap_err(),
            OverlayViolation::ImageNotInduced { u: 3, v: 5, fu: 0, fv: 2 }
        );
    }

    #[test]
    fn star_overlays_demand_simplicial_star_fibres() {
        let base = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let sg = star_graph(&base).unwrap();
        let gstar = sg.graph().clone();
        let id_h = gstar.clone();
        let o = Overlay::new(
            HostRef::star(sg.clone()),
            OverlayKind::Star,
            1,
            id_h.clone(),
            (0..5).collect(),
            vec![1; 5],
            min_fill_decomposition(&id_h).unwrap(),
        )
        .unwrap();
        assert!(o.verify().is_ok());

        // Add a second copy of base vertex 0 (id 5, level 0, no edges needed)
        // and a star-fibre vertex (id 6) over the edge clique, wired to the
        // copy and to vertex 1. Those two neighbors are non-adjacent in h, so
        // the fibre of the edge's star vertex is not simplicial.
        let mut edges = gstar.edges();
        edges.push((6, 5));
        edges.push((6, 1));
        let h = Graph::from_edges(7, &edges).unwrap();
        let f = vec![0, 1, 2, 3, 4, 0, 4];
        let ell = vec![1, 1, 1, 1, 1, 0, 0];
        let o = Overlay::new(
            HostRef::star(sg),
            OverlayKind::Star,
            1,
            h.clone(),
            f,
            ell,
            min_fill_decomposition(&h).unwrap(),
        )
        .unwrap();
        assert_eq!(
            o.verify().unwrap_err(),
            OverlayViolation::NotSimplicial { x: 6, v: 4, a: 1, b: 5 }
        );
    }

    #[test]
    fn lift_walk_trivial_and_errors() {
        let g = generators::cycle(5).unwrap();
        let o = trivial(&g, 2);
        assert_eq!(lift_walk(&o, 3, &[3]).unwrap(), vec![3]);
        assert_eq!(lift_walk(&o, 3, &[3, 4, 0]).unwrap(), vec![3, 4, 0]);
        assert!(lift_walk(&o, 3, &[3, 4, 0, 1]).is_err());
        assert!(lift_walk(&o, 3, &[4, 0]).is_err());
        assert!(lift_walk(&o, 3, &[3, 0]).is_err());
    }

    #[test]
    fn restriction_to_whole_host_is_identity() {
        let g = generators::cycle(6).unwrap();
        let o = trivial(&g, 1);
        let whole = Subgraph::whole(&g);
        let r = restrict_overlay(&o, &whole).unwrap();
        assert_eq!(r.h().edges(), o.h().edges());
        assert_eq!(r.f(), o.f());
        assert_eq!(r.ell(), o.ell());
        assert!(r.verify().is_ok());
    }

    #[test]
    fn restriction_drops_edges_mapping_to_missing_host_edges() {
        let g = generators::path(3).unwrap();
        let o = trivial(&g, 1);
        let g2 = Subgraph::with_edges(&g, &[0, 1, 2], &[(0, 1)]).unwrap();
        let r = restrict_overlay(&o, &g2).unwrap();
        assert_eq!(r.h().n(), 3);
        assert_eq!(r.h().edges(), vec![(0, 1)]);
        assert!(r.verify().is_ok());
    }

    #[test]
    fn restriction_never_raises_thickness_or_width() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let g = generators::random_tree(8, trial).unwrap();
            let o = trivial(&g, 2);
            let keep: Vec<u32> = (0..8).filter(|_| rng.gen_bool(0.6)).collect();
            let g2 = Subgraph::induced(&g, &keep).unwrap();
            let r = restrict_overlay(&o, &g2).unwrap();
            assert!(r.verify().is_ok());
            assert!(r.width() <= o.width());
            for v in 0..g2.graph().n() as u32 {
                assert!(r.thickness_at(v) <= o.thickness_at(g2.host_of(v)));
            }
        }
    }

    #[test]
    fn valid_overlays_satisfy_the_degree_property() {
        let host = generators::cycle(4).unwrap();
        let h = generators::cycle(8).unwrap();
        let f: Vec<u32> = (0..8).map(|i| i % 4).collect();
        let o = Overlay::new(
            HostRef::plain(host.clone()),
            OverlayKind::A,
            1,
            h.clone(),
            f,
            vec![1; 8],
            min_fill_decomposition(&h).unwrap(),
        )
        .unwrap();
        assert!(o.verify().is_ok());
        for x in 0..8u32 {
            if o.ell()[x as usize] >= 1 {
                assert!(o.h().degree(x) >= host.degree(o.f()[x as usize]));
            }
        }
    }
}
