//! System builders: the windowed lift along a layering, apex additions,
//! rooted systems, subgraph-based to star conversion, star-sum joins, and
//! the recursive shadow construction. Each builder takes systems of smaller
//! or simpler hosts and assembles a system of the full host while tracking
//! exact rational thickness.

use num::BigRational;

use crate::cliques::{star_graph, StarGraph};
use crate::error::{Error, Result};
use crate::graph::{Graph, Subgraph};
use crate::layering::{shadow_completeness_witness, verify_layering, Layering};
use crate::overlay::{restrict_overlay, HostRef, Overlay, OverlayKind};
use crate::system::{
    component_lift, compose_overlays, ratio, replicate_equal_size, OverlaySystem,
};
use crate::td::min_fill_decomposition;

/// Callback that builds a system over a given host. Used for window bases
/// and recursive constructions so callers choose how the pieces are made.
pub type BuildFn<'a> = dyn FnMut(&HostRef) -> Result<OverlaySystem> + 'a;

/// Packs members into a system declaring the exact recomputed thickness and
/// the exact maximum certificate width.
pub fn exact_system(members: Vec<Overlay>) -> Result<OverlaySystem> {
    if members.is_empty() {
        return Err(Error::System("a system needs at least one member".into()));
    }
    let hn = members[0].host().n();
    let mut counts = vec![0u64; hn];
    for m in &members {
        for &fv in m.f() {
            counts[fv as usize] += 1;
        }
    }
    let max = counts.into_iter().max().unwrap_or(0);
    let tw = members.iter().map(|m| m.width()).max().unwrap_or(-1);
    let size = members.len() as u64;
    OverlaySystem::new(members, tw, ratio(max, size))
}

/// The identity overlay of any host: h is the host graph itself, f the
/// identity, every level r. Subgraph-based over plain hosts; over star hosts
/// the star kind applies, since every star vertex is its own fibre and its
/// neighborhood is a clique.
pub fn identity_overlay(host: &HostRef, r: u32) -> Result<Overlay> {
    let g = host.graph();
    let td = min_fill_decomposition(g)?;
    let kind = match host {
        HostRef::Plain(_) => OverlayKind::S,
        HostRef::Star(_) => OverlayKind::Star,
    };
    Overlay::new(
        host.clone(),
        kind,
        r,
        g.clone(),
        (0..g.n() as u32).collect(),
        vec![r; g.n()],
        td,
    )
}

/// Single-member system holding the identity overlay; thickness is exactly
/// 1 everywhere. The default base for the windowed lifts.
pub fn identity_system(host: &HostRef, r: u32) -> Result<OverlaySystem> {
    let o = identity_overlay(host, r)?;
    let tw = o.width();
    OverlaySystem::new(vec![o], tw, ratio(1, 1))
}

/// Core window length of the layering lift: 6kr layers per window.
pub fn window_core_length(r: u32, k: u32) -> u32 {
    6 * k * r
}

/// One window over a layering: core layers `start ..= start + core_len - 1`
/// plus `r` buffer layers on each side. Starts run negative so that every
/// residue class of starts modulo the core length covers the whole layering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub start: i64,
    pub core_len: i64,
    pub r: u32,
}

impl WindowSpec {
    /// First and last buffered layer, inclusive.
    pub fn buffered(&self) -> (i64, i64) {
        (
            self.start - self.r as i64,
            self.start + self.core_len - 1 + self.r as i64,
        )
    }

    /// First and last core layer, inclusive.
    pub fn core(&self) -> (i64, i64) {
        (self.start, self.start + self.core_len - 1)
    }

    /// Level cap for a vertex in the given layer: the full radius inside the
    /// core, one less per layer further out, zero at the outermost buffer.
    pub fn cap(&self, layer: i64) -> u32 {
        let (c0, c1) = self.core();
        let out = if layer < c0 {
            c0 - layer
        } else if layer > c1 {
            layer - c1
        } else {
            0
        };
        (self.r as i64 - out).max(0) as u32
    }
}

/// Rehosts a window overlay onto the full host, capping levels by distance
/// from the window core so no walk allowed by the levels can leave the
/// window: core vertices keep their level, vertices i buffer layers out drop
/// to r - i. Star vertices take the largest cap over their clique; a clique
/// spans at most two consecutive layers, so caps within one clique differ by
/// at most one and the capped overlay stays walk-preserving.
///
/// `window_to_host` maps window host ids to full host ids (the base vertices
/// of the induced window first, then its star vertices when the host is a
/// star graph). `layer_of` gives the layer of every base vertex of the full
/// host.
pub fn cap_levels(
    o: &Overlay,
    window_to_host: &[u32],
    host: &HostRef,
    layer_of: &[usize],
    spec: &WindowSpec,
) -> Result<Overlay> {
    let wn = o.host().n();
    if window_to_host.len() != wn {
        return Err(Error::Build(format!(
            "window map covers {} vertices, the window host has {wn}",
            window_to_host.len()
        )));
    }
    let base_n = match host {
        HostRef::Plain(g) => g.n(),
        HostRef::Star(sg) => sg.base().n(),
    };
    if layer_of.len() != base_n {
        return Err(Error::Build(format!(
            "layer map covers {} vertices, the host has {base_n} base vertices",
            layer_of.len()
        )));
    }
    let hn = host.n() as u32;
    let mut cap = vec![0u32; wn];
    for w in 0..wn {
        let target = window_to_host[w];
        if target >= hn {
            return Err(Error::Build(format!(
                "window map sends {w} to {target}, outside the host"
            )));
        }
        if (target as usize) < base_n {
            cap[w] = spec.cap(layer_of[target as usize] as i64);
        }
    }
    let wg = o.host().graph();
    for w in 0..wn {
        if window_to_host[w] as usize >= base_n {
            let mut best = 0;
            for &u in wg.neighbors(w as u32) {
                if (window_to_host[u as usize] as usize) < base_n {
                    best = best.max(cap[u as usize]);
                }
            }
            cap[w] = best;
        }
    }
    let f2: Vec<u32> = o.f().iter().map(|&v| window_to_host[v as usize]).collect();
    let ell2: Vec<u32> = o
        .ell()
        .iter()
        .zip(o.f())
        .map(|(&l, &v)| l.min(cap[v as usize]))
        .collect();
    Overlay::new(
        host.clone(),
        o.kind(),
        o.r(),
        o.h().clone(),
        f2,
        ell2,
        o.td().clone(),
    )
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn host_base(host: &HostRef) -> &Graph {
    match host {
        HostRef::Plain(g) => g,
        HostRef::Star(sg) => sg.base(),
    }
}

/// Induces the window host over `verts` (sorted base ids) and returns it
/// together with the map from window ids back to full-host ids.
fn window_host(host: &HostRef, verts: &[u32]) -> Result<(HostRef, Vec<u32>)> {
    let sub = Subgraph::induced(host_base(host), verts)?;
    match host {
        HostRef::Plain(_) => Ok((HostRef::plain(sub.graph().clone()), verts.to_vec())),
        HostRef::Star(sg) => {
            let wsg = star_graph(sub.graph())?;
            let mut map = verts.to_vec();
            for ci in 0..wsg.star_count() {
                let local = wsg.clique_of((sub.graph().n() + ci) as u32);
                let global: Vec<u32> = local.iter().map(|&v| verts[v as usize]).collect();
                let star = sg.star_of(&global).ok_or_else(|| {
                    Error::Build(format!(
                        "window clique {global:?} is missing from the host star graph"
                    ))
                })?;
                map.push(star);
            }
            Ok((HostRef::star(wsg), map))
        }
    }
}

fn check_built_system(
    sys: &OverlaySystem,
    over: &HostRef,
    r: u32,
    bound: &BigRational,
    what: &str,
) -> Result<()> {
    if sys.host_hash() != over.hash() {
        return Err(Error::Build(format!(
            "{what} was built over a different host"
        )));
    }
    if sys.r() != r {
        return Err(Error::Build(format!(
            "{what} has radius {}, expected {r}",
            sys.r()
        )));
    }
    if matches!(over, HostRef::Star(_)) != matches!(sys.kind(), OverlayKind::Star) {
        return Err(Error::Build(format!(
            "{what} has kind {}, which does not fit the host shape",
            sys.kind()
        )));
    }
    let (_, max) = sys.thickness();
    if max > *bound {
        return Err(Error::Build(format!(
            "{what} has thickness {max}, above the allowed {bound}"
        )));
    }
    Ok(())
}

/// Shared windowed-lift core: slides windows of `core_len` core layers with
/// r buffer layers across the layering, builds a base system inside each
/// window, caps levels by distance from each window core, and composes the
/// windows of each residue class of starts into one member per inner index.
/// Window-system sizes are equalized by uniform whole-list repetition, which
/// preserves thickness exactly. Members come back ordered by residue, then
/// inner index; compositions take their windows in ascending start order.
/// The callback receives the window host and the base vertices it was
/// induced over, in host ids.
pub(crate) fn windowed_members(
    host: &HostRef,
    l: &Layering,
    core_len: i64,
    r: u32,
    window_bound: &BigRational,
    base: &mut dyn FnMut(&HostRef, &[u32]) -> Result<OverlaySystem>,
) -> Result<Vec<Overlay>> {
    if core_len < 1 {
        return Err(Error::Build("window core length must be positive".into()));
    }
    let gb = host_base(host);
    verify_layering(gb, l)?;
    let layer_of = l.layer_map(gb.n())?;
    let d = l.d() as i64;
    let ri = r as i64;
    let mut by_residue: Vec<Vec<Vec<Overlay>>> = vec![Vec::new(); core_len as usize];
    let mut kind_seen: Option<OverlayKind> = None;
    let mut common: usize = 1;
    let mut any = false;
    for j in (1 - core_len - ri)..=(d - 1 + ri) {
        let lo = (j - ri).max(0);
        let hi = (j + core_len - 1 + ri).min(d - 1);
        let mut verts: Vec<u32> = Vec::new();
        for li in lo..=hi {
            verts.extend_from_slice(&l.layers()[li as usize]);
        }
        verts.sort_unstable();
        if verts.is_empty() {
            continue;
        }
        any = true;
        let (whost, wmap) = window_host(host, &verts)?;
        let sys = base(&whost, &verts)?;
        check_built_system(
            &sys,
            &whost,
            r,
            window_bound,
            &format!("window base at start {j}"),
        )?;
        match kind_seen {
            Some(k0) if sys.kind() != k0 => {
                return Err(Error::Build("window bases disagree on kind".into()));
            }
            None => kind_seen = Some(sys.kind()),
            _ => {}
        }
        common = common / gcd(common, sys.size()) * sys.size();
        if common > 1 << 16 {
            return Err(Error::Build(format!(
                "window system sizes equalize to at least {common} members per residue; \
                 replicate the bases to a common size instead"
            )));
        }
        let spec = WindowSpec {
            start: j,
            core_len,
            r,
        };
        let capped: Vec<Overlay> = sys
            .members()
            .iter()
            .map(|m| cap_levels(m, &wmap, host, &layer_of, &spec))
            .collect::<Result<_>>()?;
        by_residue[j.rem_euclid(core_len) as usize].push(capped);
    }
    if !any {
        return Err(Error::Build("the layering covers no vertices".into()));
    }
    // Every layer must sit in the buffer zone of exactly 2r windows: r whose
    // core starts just above it and r whose core ends just below. This is
    // the count that bounds the thickness overhead of the residue union.
    let (j_lo, j_hi) = (1 - core_len - ri, d - 1 + ri);
    let span = |a: i64, b: i64| (b.min(j_hi) - a.max(j_lo) + 1).max(0);
    for li in 0..d {
        let in_buffers = span(li + 1, li + ri) + span(li - core_len - ri + 1, li - core_len);
        if in_buffers != 2 * ri {
            return Err(Error::Build(format!(
                "layer {li} lies in {in_buffers} window buffers, expected {}",
                2 * ri
            )));
        }
    }
    let mut out: Vec<Overlay> = Vec::new();
    for stack in &by_residue {
        if stack.is_empty() {
            continue;
        }
        for idx in 0..common {
            // repeating a window's whole member list to the common size
            // means position idx holds member idx mod size
            let parts: Vec<Overlay> = stack.iter().map(|w| w[idx % w.len()].clone()).collect();
            out.push(compose_overlays(&parts)?);
        }
    }
    Ok(out)
}

/// Lifts window base systems along a layering into a system of the full
/// host. Windows are 6kr core layers wide with r buffer layers on each side;
/// the windows of each residue class of starts compose into one member, and
/// the union over residues keeps thickness at (1 + 1/2k)(1 + 1/3k), below
/// 1 + 1/k, as long as every window system stays within 1 + 1/2k. When the
/// layering fits inside a single window the base system of the whole host is
/// returned directly.
pub fn layering_lift(
    host: &HostRef,
    l: &Layering,
    r: u32,
    k: u32,
    base: &mut BuildFn<'_>,
) -> Result<OverlaySystem> {
    if r == 0 || k == 0 {
        return Err(Error::Build(
            "radius and accuracy must both be positive".into(),
        ));
    }
    verify_layering(host_base(host), l)?;
    let delta = window_core_length(r, k) as i64;
    let window_bound = ratio(2 * k as u64 + 1, 2 * k as u64);
    if l.d() as i64 <= delta {
        let sys = base(host)?;
        check_built_system(&sys, host, r, &window_bound, "the whole-graph base system")?;
        return Ok(sys);
    }
    let members = windowed_members(host, l, delta, r, &window_bound, &mut |h, _verts| base(h))?;
    let tw = members.iter().map(|m| m.width()).max().unwrap_or(-1);
    OverlaySystem::new(members, tw, ratio(k as u64 + 1, k as u64))
}

/// Extends every member of a system of the host minus an apex set back to
/// the full host: each member gains one copy of every apex vertex at full
/// level, wired to the preimages of the apex's neighbors, so the thickness
/// over apexes is exactly 1 and certificate width grows by at most |A|. Over
/// star hosts the cliques meeting A get star-fibre vertices as well: one
/// fresh vertex for each clique inside A, and one copy per preimage of the
/// residual clique's star vertex otherwise.
pub fn apex_lift(host: &HostRef, apex: &[u32], sub: &OverlaySystem) -> Result<OverlaySystem> {
    if matches!(sub.kind(), OverlayKind::S) {
        return Err(Error::Build(
            "apex lift takes kind A or star systems; weaken subgraph-based ones first".into(),
        ));
    }
    match (host, sub.kind()) {
        (HostRef::Plain(_), OverlayKind::A) | (HostRef::Star(_), OverlayKind::Star) => {}
        _ => return Err(Error::Build("host shape and system kind disagree".into())),
    }
    let gb = host_base(host);
    let mut a: Vec<u32> = apex.to_vec();
    a.sort_unstable();
    a.dedup();
    if let Some(&v) = a.iter().find(|&&v| v as usize >= gb.n()) {
        return Err(Error::Build(format!("apex vertex {v} is outside the host")));
    }
    if a.is_empty() {
        if sub.host_hash() != host.hash() {
            return Err(Error::Build(
                "with no apexes the system must already be over the host".into(),
            ));
        }
        return Ok(sub.clone());
    }
    let mut in_a = vec![false; gb.n()];
    for &v in &a {
        in_a[v as usize] = true;
    }
    let rest: Vec<u32> = (0..gb.n() as u32).filter(|&v| !in_a[v as usize]).collect();
    let rest_sub = Subgraph::induced(gb, &rest)?;
    let mut rest_pos = vec![u32::MAX; gb.n()];
    for (i, &v) in rest.iter().enumerate() {
        rest_pos[v as usize] = i as u32;
    }
    let (vmap, local_sg): (Vec<u32>, Option<StarGraph>) = match host {
        HostRef::Plain(_) => {
            if sub.host_hash() != rest_sub.graph().content_hash() {
                return Err(Error::Build(
                    "system is not over the host minus the apex set".into(),
                ));
            }
            (rest.clone(), None)
        }
        HostRef::Star(sg) => {
            let rsg = star_graph(rest_sub.graph())?;
            if sub.host_hash() != rsg.graph().content_hash() {
                return Err(Error::Build(
                    "system is not over the star graph of the host minus the apex set".into(),
                ));
            }
            let mut map = rest.clone();
            for ci in 0..rsg.star_count() {
                let local = rsg.clique_of((rest.len() + ci) as u32);
                let global: Vec<u32> = local.iter().map(|&v| rest[v as usize]).collect();
                let star = sg.star_of(&global).ok_or_else(|| {
                    Error::Build(format!(
                        "clique {global:?} of the reduced graph is missing from the host star graph"
                    ))
                })?;
                map.push(star);
            }
            (map, Some(rsg))
        }
    };
    let r = sub.r();
    let b = a.len();
    let mut out_members = Vec::with_capacity(sub.size());
    for m in sub.members() {
        let h = m.h();
        let n_h = h.n();
        let copy_ids: Vec<u32> = (0..b).map(|i| (n_h + i) as u32).collect();
        let mut edges = h.edges();
        let mut f2: Vec<u32> = m.f().iter().map(|&x| vmap[x as usize]).collect();
        let mut ell2 = m.ell().to_vec();
        for (i, &ai) in a.iter().enumerate() {
            f2.push(ai);
            ell2.push(r);
            for (j, &aj) in a.iter().enumerate().take(i) {
                if gb.has_edge(ai, aj) {
                    edges.push((copy_ids[j], copy_ids[i]));
                }
            }
        }
        for y in 0..n_h {
            let fy = f2[y];
            if (fy as usize) < gb.n() {
                for (i, &ai) in a.iter().enumerate() {
                    if gb.has_edge(ai, fy) {
                        edges.push((y as u32, copy_ids[i]));
                    }
                }
            }
        }
        let mut td2 = m.td().augment_all_bags(&copy_ids);
        let mut next = n_h + b;
        if let (HostRef::Star(sg), Some(rsg)) = (host, &local_sg) {
            for (ci, kcl) in sg.cliques().iter().enumerate() {
                let vk = (gb.n() + ci) as u32;
                let apex_part: Vec<u32> = kcl
                    .iter()
                    .filter(|&&v| in_a[v as usize])
                    .copied()
                    .collect();
                if apex_part.is_empty() {
                    continue;
                }
                let copies: Vec<u32> = apex_part
                    .iter()
                    .map(|&v| copy_ids[a.binary_search(&v).unwrap()])
                    .collect();
                if apex_part.len() == kcl.len() {
                    let x = next as u32;
                    next += 1;
                    f2.push(vk);
                    ell2.push(r);
                    for &c in &copies {
                        edges.push((c, x));
                    }
                    let mut bag = copies.clone();
                    bag.push(x);
                    let at = td2.root();
                    td2.attach_leaf(at, bag);
                } else {
                    let local_rest: Vec<u32> = kcl
                        .iter()
                        .filter(|&&v| !in_a[v as usize])
                        .map(|&v| rest_pos[v as usize])
                        .collect();
                    let v_local = rsg.star_of(&local_rest).ok_or_else(|| {
                        Error::Build(format!(
                            "residual clique {local_rest:?} is missing from the reduced star graph"
                        ))
                    })?;
                    for x in 0..n_h {
                        if m.f()[x] != v_local {
                            continue;
                        }
                        let x2 = next as u32;
                        next += 1;
                        f2.push(vk);
                        ell2.push(m.ell()[x]);
                        let nb = h.neighbors(x as u32).to_vec();
                        for &y in &nb {
                            edges.push((y, x2));
                        }
                        for &c in &copies {
                            edges.push((c, x2));
                        }
                        let mut closed = nb.clone();
                        closed.push(x as u32);
                        let parent = td2.bag_containing(&closed).ok_or_else(|| {
                            Error::Build(format!(
                                "no bag holds the closed neighborhood of star fibre vertex {x}"
                            ))
                        })?;
                        let mut bag = nb;
                        bag.push(x2);
                        bag.extend_from_slice(&copies);
                        td2.attach_leaf(parent, bag);
                    }
                }
            }
        }
        let h2 = Graph::from_edges(next, &edges)?;
        out_members.push(Overlay::new(host.clone(), sub.kind(), r, h2, f2, ell2, td2)?);
    }
    OverlaySystem::new(
        out_members,
        sub.declared_tw().max(0) + b as i64,
        sub.declared_thickness().clone(),
    )
}

/// Restriction of a star overlay to the star graph of an induced subgraph:
/// keeps the h-vertices whose image survives (base vertices of the subgraph,
/// star vertices of cliques avoiding the removed set) and translates. Every
/// kept edge stays valid because cliques of an induced subgraph are cliques
/// of the whole graph.
fn restrict_star_overlay(
    o: &Overlay,
    sg: &StarGraph,
    rest_pos: &[u32],
    new_host: &HostRef,
) -> Result<Overlay> {
    let nsg = new_host
        .star_graph()
        .expect("restriction target is a star host");
    let base_n = sg.base().n();
    let n = o.h().n();
    let mut new_id = vec![u32::MAX; n];
    let mut f2 = Vec::new();
    let mut ell2 = Vec::new();
    let mut kept = 0u32;
    for x in 0..n {
        let fx = o.f()[x];
        let target = if (fx as usize) < base_n {
            if rest_pos[fx as usize] != u32::MAX {
                Some(rest_pos[fx as usize])
            } else {
                None
            }
        } else {
            let kcl = sg.clique_of(fx);
            if kcl.iter().all(|&v| rest_pos[v as usize] != u32::MAX) {
                let local: Vec<u32> = kcl.iter().map(|&v| rest_pos[v as usize]).collect();
                Some(nsg.star_of(&local).ok_or_else(|| {
                    Error::Build(format!(
                        "clique {local:?} vanished from the induced star graph"
                    ))
                })?)
            } else {
                None
            }
        };
        if let Some(t) = target {
            new_id[x] = kept;
            kept += 1;
            f2.push(t);
            ell2.push(o.ell()[x]);
        }
    }
    let mut edges = Vec::new();
    for (x, y) in o.h().edges() {
        if new_id[x as usize] != u32::MAX && new_id[y as usize] != u32::MAX {
            edges.push((new_id[x as usize], new_id[y as usize]));
        }
    }
    let h2 = Graph::from_edges(kept as usize, &edges)?;
    let td2 = o
        .td()
        .filter_bags(|v| new_id[v as usize] != u32::MAX)
        .relabel(|v| new_id[v as usize]);
    Overlay::new(
        new_host.clone(),
        OverlayKind::Star,
        o.r(),
        h2,
        f2,
        ell2,
        td2,
    )
}

/// Builds a system of the host, restricts it to the host minus the apex
/// set, and lifts the apexes back in. The result has thickness exactly 1
/// over every apex vertex, which the star-sum join requires at attachment
/// cliques. Subgraph-based systems from the callback are weakened to kind A
/// on the way.
pub fn rooted_system(
    host: &HostRef,
    apex: &[u32],
    build: &mut BuildFn<'_>,
) -> Result<OverlaySystem> {
    let built = build(host)?;
    if built.host_hash() != host.hash() {
        return Err(Error::Build(
            "built system is over a different host".into(),
        ));
    }
    let gb = host_base(host);
    let mut a: Vec<u32> = apex.to_vec();
    a.sort_unstable();
    a.dedup();
    if let Some(&v) = a.iter().find(|&&v| v as usize >= gb.n()) {
        return Err(Error::Build(format!("apex vertex {v} is outside the host")));
    }
    if a.is_empty() {
        return Ok(built);
    }
    let sys = if matches!(built.kind(), OverlayKind::S) {
        built.weakened_to_a()?
    } else {
        built
    };
    let mut in_a = vec![false; gb.n()];
    for &v in &a {
        in_a[v as usize] = true;
    }
    let rest: Vec<u32> = (0..gb.n() as u32).filter(|&v| !in_a[v as usize]).collect();
    let mut rest_pos = vec![u32::MAX; gb.n()];
    for (i, &v) in rest.iter().enumerate() {
        rest_pos[v as usize] = i as u32;
    }
    let members: Vec<Overlay> = match host {
        HostRef::Plain(g) => {
            let sub = Subgraph::induced(g, &rest)?;
            sys.members()
                .iter()
                .map(|m| restrict_overlay(m, &sub))
                .collect::<Result<_>>()?
        }
        HostRef::Star(sg) => {
            let rg = Subgraph::induced(sg.base(), &rest)?;
            let new_host = HostRef::star(star_graph(rg.graph())?);
            sys.members()
                .iter()
                .map(|m| restrict_star_overlay(m, sg, &rest_pos, &new_host))
                .collect::<Result<_>>()?
        }
    };
    let reduced = exact_system(members)?;
    apex_lift(host, &a, &reduced)
}

/// Converts a subgraph-based system of g into a star system of the star
/// graph of g: in every member, every clique of g that lies inside the image
/// of one h-component gains a fresh preimage of its star vertex, wired to
/// that component's preimages of the clique and levelled at their maximum.
/// Width grows by at most one; the thickness over a star vertex never
/// exceeds the thickness over the clique's own vertices.
pub fn sgbas_to_star(sys: &OverlaySystem) -> Result<OverlaySystem> {
    if !matches!(sys.kind(), OverlayKind::S) {
        return Err(Error::Build(
            "star conversion needs a subgraph-based system".into(),
        ));
    }
    let g = sys.host().graph();
    let bn = g.n();
    let new_host = HostRef::star(star_graph(g)?);
    let nsg = new_host.star_graph().unwrap();
    let mut members2 = Vec::with_capacity(sys.size());
    for m in sys.members() {
        let h = m.h();
        let mut edges = h.edges();
        let mut f2 = m.f().to_vec();
        let mut ell2 = m.ell().to_vec();
        let mut td2 = m.td().clone();
        let mut next = h.n();
        for comp in h.components() {
            let mut image = vec![false; bn];
            let mut fibre: Vec<Vec<u32>> = vec![Vec::new(); bn];
            for &x in &comp {
                image[m.f()[x as usize] as usize] = true;
                fibre[m.f()[x as usize] as usize].push(x);
            }
            for (ci, kcl) in nsg.cliques().iter().enumerate() {
                if !kcl.iter().all(|&v| image[v as usize]) {
                    continue;
                }
                let mut nbrs: Vec<u32> = kcl
                    .iter()
                    .flat_map(|&v| fibre[v as usize].iter().copied())
                    .collect();
                nbrs.sort_unstable();
                let x = next as u32;
                next += 1;
                f2.push((bn + ci) as u32);
                ell2.push(nbrs.iter().map(|&y| m.ell()[y as usize]).max().unwrap());
                for &y in &nbrs {
                    edges.push((y, x));
                }
                let parent = td2.bag_containing(&nbrs).ok_or_else(|| {
                    Error::Build(format!(
                        "preimages {nbrs:?} of a clique share no certificate bag"
                    ))
                })?;
                let mut bag = nbrs;
                bag.push(x);
                td2.attach_leaf(parent, bag);
            }
        }
        let h2 = Graph::from_edges(next, &edges)?;
        members2.push(Overlay::new(
            new_host.clone(),
            OverlayKind::Star,
            m.r(),
            h2,
            f2,
            ell2,
            td2,
        )?);
    }
    OverlaySystem::new(
        members2,
        sys.declared_tw() + 1,
        sys.declared_thickness().clone(),
    )
}

struct RayInfo {
    /// Attachment clique, global ids, sorted.
    attach: Vec<u32>,
    /// Ray host id to full host id; u32::MAX marks star vertices of cliques
    /// inside the attachment, whose fibres are dropped before copying.
    vmap: Vec<u32>,
    /// Ray local base id to index into `attach`, u32::MAX elsewhere.
    attach_idx: Vec<u32>,
    /// Star vertex of the attachment clique in the center host.
    v_center: u32,
}

/// Joins systems along a star-sum split of the host's base graph: a center
/// part plus ray parts, each ray meeting the center in a nonempty clique and
/// meeting other rays only inside the center. Takes star systems over the
/// parts' star graphs; ray systems must be rooted at their attachment clique
/// (exactly one preimage of each attachment vertex per member) and share one
/// size. Each pair (center member, ray member index) becomes one output
/// member: for every preimage x of an attachment clique's star vertex, the
/// ray member is copied with its attachment fibre identified onto matching
/// neighbors of x and levels capped at the level of x, so thickness
/// multiplies rather than adds; with both sides within 1 + 1/3k the result
/// stays below 1 + 1/k.
pub fn star_sum_lift(
    host: &HostRef,
    center: &[u32],
    rays: &[Vec<u32>],
    center_sys: &OverlaySystem,
    ray_systems: &[OverlaySystem],
    k: u32,
) -> Result<OverlaySystem> {
    let sg = match host {
        HostRef::Star(sg) => sg,
        HostRef::Plain(_) => {
            return Err(Error::Build(
                "star sums join star systems over a star host".into(),
            ))
        }
    };
    if k == 0 {
        return Err(Error::Build("accuracy must be positive".into()));
    }
    if rays.len() != ray_systems.len() {
        return Err(Error::Build(format!(
            "{} ray parts but {} ray systems",
            rays.len(),
            ray_systems.len()
        )));
    }
    let gb = sg.base();
    let mut center: Vec<u32> = center.to_vec();
    center.sort_unstable();
    center.dedup();
    if let Some(&v) = center.iter().find(|&&v| v as usize >= gb.n()) {
        return Err(Error::Build(format!(
            "center vertex {v} is outside the host"
        )));
    }
    let mut in_center = vec![false; gb.n()];
    for &v in &center {
        in_center[v as usize] = true;
    }
    let mut center_pos = vec![u32::MAX; gb.n()];
    for (i, &v) in center.iter().enumerate() {
        center_pos[v as usize] = i as u32;
    }
    let rays_sorted: Vec<Vec<u32>> = rays
        .iter()
        .map(|part| {
            let mut p = part.clone();
            p.sort_unstable();
            p.dedup();
            p
        })
        .collect();
    let mut ray_ids: Vec<Vec<u32>> = vec![Vec::new(); gb.n()];
    for (i, part) in rays_sorted.iter().enumerate() {
        for &v in part {
            if v as usize >= gb.n() {
                return Err(Error::Build(format!(
                    "ray {i} vertex {v} is outside the host"
                )));
            }
            ray_ids[v as usize].push(i as u32);
        }
    }
    for v in 0..gb.n() {
        if !in_center[v] && ray_ids[v].is_empty() {
            return Err(Error::Build(format!(
                "inputs are not a star sum: vertex {v} lies in no part"
            )));
        }
        if !in_center[v] && ray_ids[v].len() > 1 {
            return Err(Error::Build(format!(
                "inputs are not a star sum: vertex {v} lies in two rays but not the center"
            )));
        }
    }
    for (u, v) in gb.edges() {
        let both_center = in_center[u as usize] && in_center[v as usize];
        let common_ray = ray_ids[u as usize]
            .iter()
            .any(|i| ray_ids[v as usize].contains(i));
        if !both_center && !common_ray {
            return Err(Error::Build(format!(
                "inputs are not a star sum: edge {u}-{v} lies in no single part"
            )));
        }
    }
    let attachments: Vec<Vec<u32>> = rays_sorted
        .iter()
        .enumerate()
        .map(|(i, part)| {
            let att: Vec<u32> = part
                .iter()
                .filter(|&&v| in_center[v as usize])
                .copied()
                .collect();
            if att.is_empty() {
                return Err(Error::Build(format!(
                    "ray {i} does not meet the center; lift disconnected pieces separately"
                )));
            }
            for (p, &x) in att.iter().enumerate() {
                for &y in &att[p + 1..] {
                    if !gb.has_edge(x, y) {
                        return Err(Error::Build(format!(
                            "ray {i} meets the center in {x} and {y}, which are not adjacent"
                        )));
                    }
                }
            }
            Ok(att)
        })
        .collect::<Result<_>>()?;
    let r = center_sys.r();
    let part_bound = ratio(3 * k as u64 + 1, 3 * k as u64);
    let center_sub = Subgraph::induced(gb, &center)?;
    let csg = star_graph(center_sub.graph())?;
    if center_sys.host_hash() != csg.graph().content_hash() {
        return Err(Error::Build(
            "center system is not over the star graph of the center part".into(),
        ));
    }
    if !matches!(center_sys.kind(), OverlayKind::Star) {
        return Err(Error::Build("center system must be a star system".into()));
    }
    let (_, cmax) = center_sys.thickness();
    if cmax > part_bound {
        return Err(Error::Build(format!(
            "center thickness {cmax} exceeds the allowed {part_bound}"
        )));
    }
    if rays.is_empty() {
        return Ok(center_sys.clone());
    }
    let c_size = ray_systems[0].size();
    let mut infos = Vec::with_capacity(rays.len());
    for (i, part) in rays_sorted.iter().enumerate() {
        let rsys = &ray_systems[i];
        if rsys.size() != c_size {
            return Err(Error::Build(format!(
                "ray systems have sizes {} and {c_size}; replicate to a common size first",
                rsys.size()
            )));
        }
        if !matches!(rsys.kind(), OverlayKind::Star) {
            return Err(Error::Build(format!("ray system {i} is not a star system")));
        }
        if rsys.r() != r {
            return Err(Error::Build(format!(
                "ray system {i} has radius {}, the center has {r}",
                rsys.r()
            )));
        }
        let part_sub = Subgraph::induced(gb, part)?;
        let psg = star_graph(part_sub.graph())?;
        if rsys.host_hash() != psg.graph().content_hash() {
            return Err(Error::Build(format!(
                "ray system {i} is not over the star graph of its part"
            )));
        }
        let (_, rmax) = rsys.thickness();
        if rmax > part_bound {
            return Err(Error::Build(format!(
                "ray {i} thickness {rmax} exceeds the allowed {part_bound}"
            )));
        }
        let att = &attachments[i];
        let mut attach_idx = vec![u32::MAX; part.len()];
        let mut vmap: Vec<u32> = part.clone();
        for (local, &v) in part.iter().enumerate() {
            if let Ok(p) = att.binary_search(&v) {
                attach_idx[local] = p as u32;
            }
        }
        for ci in 0..psg.star_count() {
            let local = psg.clique_of((part.len() + ci) as u32);
            let global: Vec<u32> = local.iter().map(|&v| part[v as usize]).collect();
            if global.iter().all(|&v| in_center[v as usize]) {
                vmap.push(u32::MAX);
            } else {
                vmap.push(sg.star_of(&global).ok_or_else(|| {
                    Error::Build(format!(
                        "ray clique {global:?} is missing from the host star graph"
                    ))
                })?);
            }
        }
        let att_center_local: Vec<u32> = att.iter().map(|&v| center_pos[v as usize]).collect();
        let v_center = csg.star_of(&att_center_local).ok_or_else(|| {
            Error::Build(format!(
                "attachment clique {att:?} is missing from the center star graph"
            ))
        })?;
        // rooted: exactly one preimage of every attachment vertex per member
        for (l, rm) in rsys.members().iter().enumerate() {
            for (p, &v) in att.iter().enumerate() {
                let local = part.binary_search(&v).unwrap() as u32;
                let count = rm.f().iter().filter(|&&fv| fv == local).count();
                if count != 1 {
                    return Err(Error::Build(format!(
                        "ray system {i} is not rooted at its attachment clique: vertex {v} \
                         has {count} preimages in member {l} (index {p} of the clique)"
                    )));
                }
            }
        }
        infos.push(RayInfo {
            attach: att.clone(),
            vmap,
            attach_idx,
            v_center,
        });
    }
    let mut cmap: Vec<u32> = center.clone();
    for ci in 0..csg.star_count() {
        let local = csg.clique_of((center.len() + ci) as u32);
        let global: Vec<u32> = local.iter().map(|&v| center[v as usize]).collect();
        cmap.push(sg.star_of(&global).ok_or_else(|| {
            Error::Build(format!(
                "center clique {global:?} is missing from the host star graph"
            ))
        })?);
    }
    let mut out_members = Vec::with_capacity(center_sys.size() * c_size);
    for cm in center_sys.members() {
        let h0 = cm.h();
        let n0 = h0.n();
        for l in 0..c_size {
            let mut edges = h0.edges();
            let mut f2: Vec<u32> = cm.f().iter().map(|&v| cmap[v as usize]).collect();
            let mut ell2 = cm.ell().to_vec();
            let mut td2 = cm.td().clone();
            let mut next = n0;
            for (ri, info) in infos.iter().enumerate() {
                let rm = &ray_systems[ri].members()[l];
                let rh = rm.h();
                for x in 0..n0 as u32 {
                    if cm.f()[x as usize] != info.v_center {
                        continue;
                    }
                    let lx = cm.ell()[x as usize];
                    // match each attachment vertex to a neighbor of x over
                    // it, preferring the highest level, then the smallest id
                    let mut ident: Vec<Option<u32>> = Vec::with_capacity(info.attach.len());
                    for &av in &info.attach {
                        let want = center_pos[av as usize];
                        let mut pick: Option<u32> = None;
                        for &y in h0.neighbors(x) {
                            if cm.f()[y as usize] != want {
                                continue;
                            }
                            let better = match pick {
                                None => true,
                                Some(p) => cm.ell()[y as usize] > cm.ell()[p as usize],
                            };
                            if better {
                                pick = Some(y);
                            }
                        }
                        if pick.is_none() && lx > 0 {
                            return Err(Error::Build(format!(
                                "attachment vertex {av} has no preimage next to {x}, \
                                 whose level {lx} is positive"
                            )));
                        }
                        ident.push(pick);
                    }
                    let before = next;
                    let mut copy_id = vec![u32::MAX; rh.n()];
                    for u in 0..rh.n() {
                        let fu = rm.f()[u] as usize;
                        if info.vmap[fu] == u32::MAX {
                            continue;
                        }
                        if fu < info.attach_idx.len() && info.attach_idx[fu] != u32::MAX {
                            if let Some(y) = ident[info.attach_idx[fu] as usize] {
                                copy_id[u] = y;
                            }
                            continue;
                        }
                        copy_id[u] = next as u32;
                        next += 1;
                        f2.push(info.vmap[fu]);
                        ell2.push(rm.ell()[u].min(lx));
                    }
                    for (u, w) in rh.edges() {
                        let (cu, cw) = (copy_id[u as usize], copy_id[w as usize]);
                        if cu != u32::MAX && cw != u32::MAX && cu != cw {
                            edges.push((cu, cw));
                        }
                    }
                    if next > before {
                        let idents: Vec<u32> = ident.iter().flatten().copied().collect();
                        let sub_td = rm
                            .td()
                            .filter_bags(|v| copy_id[v as usize] != u32::MAX)
                            .relabel(|v| copy_id[v as usize])
                            .augment_all_bags(&idents);
                        let mut closed: Vec<u32> = h0.neighbors(x).to_vec();
                        closed.push(x);
                        let parent = cm.td().bag_containing(&closed).ok_or_else(|| {
                            Error::Build(format!(
                                "no center bag holds the closed neighborhood of \
                                 attachment preimage {x}"
                            ))
                        })?;
                        td2.graft(&sub_td, parent);
                    }
                }
            }
            let h2 = Graph::from_edges(next, &edges)?;
            out_members.push(Overlay::new(
                host.clone(),
                OverlayKind::Star,
                r,
                h2,
                f2,
                ell2,
                td2,
            )?);
        }
    }
    let expected = center_sys.size() * c_size;
    if out_members.len() != expected {
        return Err(Error::Build(format!(
            "built {} members, expected exactly {expected}",
            out_members.len()
        )));
    }
    let tw = out_members.iter().map(|m| m.width()).max().unwrap_or(-1);
    OverlaySystem::new(out_members, tw, ratio(k as u64 + 1, k as u64))
}

/// Restricts layers to a vertex subset, relabeling into positions within the
/// sorted subset and dropping layers that become empty.
fn restrict_layers(layers: &[Vec<u32>], verts: &[u32], n: usize) -> Layering {
    let mut local = vec![u32::MAX; n];
    for (i, &v) in verts.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let mut out = Vec::new();
    for layer in layers {
        let mapped: Vec<u32> = layer
            .iter()
            .filter(|&&v| local[v as usize] != u32::MAX)
            .map(|&v| local[v as usize])
            .collect();
        if !mapped.is_empty() {
            out.push(mapped);
        }
    }
    Layering::new(out)
}

/// Builds a star system of the star graph of g along a shadow-complete
/// layering: the first layer becomes the center of a star sum whose rays
/// are the components below it together with their attachment cliques, each
/// rooted and built recursively at accuracy 9k before replication to a
/// common size at 3k. `layer_builder` supplies the system of a single
/// layer's graph at a requested accuracy. Disconnected inputs recurse per
/// component and recombine with a component lift.
pub fn shadow_lift(
    g: &Graph,
    l: &Layering,
    k: u32,
    layer_builder: &mut dyn FnMut(&Graph, u32) -> Result<OverlaySystem>,
) -> Result<OverlaySystem> {
    if k == 0 {
        return Err(Error::Build("accuracy must be positive".into()));
    }
    if g.n() == 0 {
        return Err(Error::Build("the empty graph has no star system".into()));
    }
    // only the order of nonempty layers matters below
    let l = Layering::new(
        l.layers()
            .iter()
            .filter(|la| !la.is_empty())
            .cloned()
            .collect(),
    );
    verify_layering(g, &l)?;
    if let Some(w) = shadow_completeness_witness(g, &l)? {
        return Err(Error::Build(format!(
            "layering is not shadow-complete: below layer {}, the component of vertex {} \
             has the non-adjacent neighbors {} and {} in that layer",
            w.layer, w.component_vertex, w.pair.0, w.pair.1
        )));
    }
    // The accuracy demand grows by a factor of 9 per layer, so the
    // recursion only makes sense on layerings with a handful of layers;
    // coarsen or window deeper ones before calling. Checked arithmetic
    // turns the blowup into an error instead of a wrap.
    let too_deep = || {
        Error::Build(format!(
            "the star-sum recursion over {} layers needs an accuracy beyond the \
             supported range; coarsen the layering into fewer bands first",
            l.d()
        ))
    };
    let side_k = k.checked_mul(3).ok_or_else(too_deep)?;
    let comps = g.components();
    if comps.len() > 1 {
        let host = HostRef::star(star_graph(g)?);
        let mut systems = Vec::with_capacity(comps.len());
        for comp in &comps {
            let sub = Subgraph::induced(g, comp)?;
            let local_l = restrict_layers(l.layers(), comp, g.n());
            systems.push(shadow_lift(sub.graph(), &local_l, side_k, layer_builder)?);
        }
        return component_lift(&host, &systems, k);
    }
    if l.d() <= 1 {
        let sys = layer_builder(g, k)?;
        let host = HostRef::star(star_graph(g)?);
        check_built_system(&sys, &host, sys.r(), &ratio(k as u64 + 1, k as u64), "the layer system")?;
        return Ok(sys);
    }
    let deep_k = k.checked_mul(9).ok_or_else(too_deep)?;
    let v1 = l.layers()[0].clone();
    let center_sub = Subgraph::induced(g, &v1)?;
    let center_sys = layer_builder(center_sub.graph(), side_k)?;
    let mut rest: Vec<u32> = l.layers()[1..].iter().flatten().copied().collect();
    rest.sort_unstable();
    let rest_sub = Subgraph::induced(g, &rest)?;
    let mut in_v1 = vec![false; g.n()];
    for &v in &v1 {
        in_v1[v as usize] = true;
    }
    let mut ray_parts: Vec<Vec<u32>> = Vec::new();
    let mut ray_systems: Vec<OverlaySystem> = Vec::new();
    for comp in rest_sub.graph().components() {
        let comp_global: Vec<u32> = comp
            .iter()
            .map(|&v| rest_sub.vertices()[v as usize])
            .collect();
        let mut attach: Vec<u32> = comp_global
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().copied())
            .filter(|&u| in_v1[u as usize])
            .collect();
        attach.sort_unstable();
        attach.dedup();
        let comp_sub = Subgraph::induced(g, &comp_global)?;
        let local_l = restrict_layers(&l.layers()[1..], &comp_global, g.n());
        let rec = shadow_lift(comp_sub.graph(), &local_l, deep_k, layer_builder)?;
        let mut part = comp_global.clone();
        part.extend_from_slice(&attach);
        part.sort_unstable();
        let part_sub = Subgraph::induced(g, &part)?;
        let part_host = HostRef::star(star_graph(part_sub.graph())?);
        let local_attach: Vec<u32> = attach
            .iter()
            .map(|&v| part_sub.local_of(v).unwrap())
            .collect();
        ray_systems.push(apex_lift(&part_host, &local_attach, &rec)?);
        ray_parts.push(part);
    }
    let host = HostRef::star(star_graph(g)?);
    let replicated = replicate_equal_size(&ray_systems, side_k)?;
    star_sum_lift(&host, &v1, &ray_parts, &center_sys, &replicated, k)
}
