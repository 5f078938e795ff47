//! File formats: PACE-style `.gr` graphs and `.td` decompositions, plain
//! text layerings, and the JSON forms of overlays, systems, solve results,
//! and approximation reports. The pipeline commands pass a single JSON
//! envelope from stage to stage, accumulating the resolved configuration
//! of every stage alongside the data.
//!
//! Text conventions: `.gr` is "p tw <n> <m>" with 1-based endpoints, lower
//! id first; `.td` is "s td <bags> <width+1> <n>" with 1-based bag ids and
//! vertices, tree edges as "parent child" pairs, and the root recorded in
//! a "c root <id>" comment (defaulting to bag 1 when absent); layerings
//! are lines "<layer> <vertex>", both 1-based. JSON is serialized with a
//! fixed field order, vertices ascending, edges lexicographic, rationals
//! as reduced "p/q" strings, so equal objects produce byte-equal files.

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::cliques::star_graph;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layering::Layering;
use crate::overlay::{HostRef, Overlay, OverlayKind};
use crate::ptas::PtasReport;
use crate::solve::{Problem, Solution};
use crate::system::OverlaySystem;
use crate::td::TreeDecomposition;

fn bad(what: &str, line_no: usize, line: &str) -> Error {
    Error::Cli(format!("{what} at line {}: {line:?}", line_no + 1))
}

/// PACE-style graph text.
pub fn write_gr(g: &Graph) -> String {
    let mut out = format!("p tw {} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    out
}

pub fn parse_gr(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if header.is_some() {
                return Err(bad("second header", no, line));
            }
            let mut it = rest.split_whitespace();
            if it.next() != Some("tw") {
                return Err(bad("header is not 'p tw <n> <m>'", no, line));
            }
            let n = it.next().and_then(|s| s.parse().ok());
            let m = it.next().and_then(|s| s.parse().ok());
            match (n, m, it.next()) {
                (Some(n), Some(m), None) => header = Some((n, m)),
                _ => return Err(bad("header is not 'p tw <n> <m>'", no, line)),
            }
            continue;
        }
        let Some((n, _)) = header else {
            return Err(bad("edge before the header", no, line));
        };
        let mut it = line.split_whitespace();
        let u: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("unreadable edge", no, line))?;
        let v: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("unreadable edge", no, line))?;
        if it.next().is_some() {
            return Err(bad("unreadable edge", no, line));
        }
        if u == 0 || v == 0 || u > n || v > n {
            return Err(bad("edge endpoint out of range", no, line));
        }
        edges.push((u as u32 - 1, v as u32 - 1));
    }
    let (n, m) = header.ok_or_else(|| Error::Cli("graph file has no header".into()))?;
    if edges.len() != m {
        return Err(Error::Cli(format!(
            "graph header promises {m} edges, file has {}",
            edges.len()
        )));
    }
    Graph::from_edges(n, &edges)
}

/// PACE-style tree decomposition text. `n` is the vertex count of the
/// decomposed graph, recorded in the header.
pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!("c root {}\n", td.root() + 1));
    out.push_str(&format!("s td {} {} {}\n", td.len(), td.width() + 1, n));
    for (i, bag) in td.bags().iter().enumerate() {
        out.push_str(&format!("b {}", i + 1));
        for &v in bag {
            out.push_str(&format!(" {}", v + 1));
        }
        out.push('\n');
    }
    for (p, c) in td.tree_edges() {
        out.push_str(&format!("{} {}\n", p + 1, c + 1));
    }
    out
}

pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
    let mut count: Option<usize> = None;
    let mut bags: Vec<Option<Vec<u32>>> = Vec::new();
    let mut tree: Vec<(usize, usize)> = Vec::new();
    let mut root: usize = 0;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("c ") {
            let mut it = rest.split_whitespace();
            if it.next() == Some("root") {
                let id: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("unreadable root comment", no, line))?;
                if id == 0 {
                    return Err(bad("root id is 1-based", no, line));
                }
                root = id - 1;
            }
            continue;
        }
        if line == "c" || line.starts_with("c\t") {
            continue;
        }
        if let Some(rest) = line.strip_prefix("s ") {
            if count.is_some() {
                return Err(bad("second header", no, line));
            }
            let mut it = rest.split_whitespace();
            if it.next() != Some("td") {
                return Err(bad("header is not 's td <bags> <width+1> <n>'", no, line));
            }
            let bags_n: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("unreadable header", no, line))?;
            count = Some(bags_n);
            bags = vec![None; bags_n];
            continue;
        }
        if let Some(rest) = line.strip_prefix("b ") {
            let Some(bags_n) = count else {
                return Err(bad("bag before the header", no, line));
            };
            let mut it = rest.split_whitespace();
            let id: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("unreadable bag id", no, line))?;
            if id == 0 || id > bags_n {
                return Err(bad("bag id out of range", no, line));
            }
            let mut bag = Vec::new();
            for tok in it {
                let v: u32 = tok.parse().map_err(|_| bad("unreadable bag vertex", no, line))?;
                if v == 0 {
                    return Err(bad("bag vertices are 1-based", no, line));
                }
                bag.push(v - 1);
            }
            if bags[id - 1].replace(bag).is_some() {
                return Err(bad("bag defined twice", no, line));
            }
            continue;
        }
        let Some(bags_n) = count else {
            return Err(bad("tree edge before the header", no, line));
        };
        let mut it = line.split_whitespace();
        let a: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("unreadable tree edge", no, line))?;
        let b: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("unreadable tree edge", no, line))?;
        if it.next().is_some() || a == 0 || b == 0 || a > bags_n || b > bags_n {
            return Err(bad("unreadable tree edge", no, line));
        }
        tree.push((a - 1, b - 1));
    }
    let count = count.ok_or_else(|| Error::Cli("decomposition file has no header".into()))?;
    let bags: Vec<Vec<u32>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::Cli(format!("bag {} is missing", i + 1))))
        .collect::<Result<_>>()?;
    if root >= count {
        return Err(Error::Cli(format!("root bag {} is out of range", root + 1)));
    }
    TreeDecomposition::from_tree_edges(bags, &tree, root)
}

/// Layering text: one "<layer> <vertex>" pair per line, both 1-based,
/// ordered by layer then vertex.
pub fn write_layering_text(l: &Layering) -> String {
    let mut out = String::new();
    for (i, layer) in l.layers().iter().enumerate() {
        for &v in layer {
            out.push_str(&format!("{} {}\n", i + 1, v + 1));
        }
    }
    out
}

pub fn parse_layering_text(text: &str) -> Result<Layering> {
    let mut layers: Vec<Vec<u32>> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut it = line.split_whitespace();
        let layer: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("unreadable layering line", no, line))?;
        let v: u32 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("unreadable layering line", no, line))?;
        if it.next().is_some() || layer == 0 || v == 0 {
            return Err(bad("unreadable layering line", no, line));
        }
        if layers.len() < layer {
            layers.resize(layer, Vec::new());
        }
        layers[layer - 1].push(v - 1);
    }
    Ok(Layering::new(layers))
}

/// Reduced rational as text: "p/q", or just "p" for integers.
pub fn ratio_string(q: &BigRational) -> String {
    if q.denom() == &num::BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| -> Result<num::BigInt> {
        t.trim()
            .parse()
            .map_err(|_| Error::Cli(format!("unreadable rational {s:?}")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den == num::BigInt::from(0) {
                return Err(Error::Cli(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(p)?, den))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[u32; 2]>,
}

pub fn graph_to_json(g: &Graph) -> GraphJson {
    GraphJson {
        n: g.n(),
        edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
    }
}

pub fn graph_from_json(j: &GraphJson) -> Result<Graph> {
    let edges: Vec<(u32, u32)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
    Graph::from_edges(j.n, &edges)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VertexJson {
    pub id: u32,
    pub f: u32,
    pub ell: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TdJson {
    pub bags: Vec<Vec<u32>>,
    /// Parent of each bag; null marks the root.
    pub tree: Vec<Option<usize>>,
    pub root: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OverlayJson {
    pub host_hash: String,
    pub r: u32,
    pub kind: String,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[u32; 2]>,
    pub td: TdJson,
}

pub fn overlay_to_json(o: &Overlay) -> OverlayJson {
    let vertices = (0..o.h().n() as u32)
        .map(|x| VertexJson { id: x, f: o.f()[x as usize], ell: o.ell()[x as usize] })
        .collect();
    let edges = o.h().edges().into_iter().map(|(u, v)| [u, v]).collect();
    let td = TdJson {
        bags: o.td().bags().to_vec(),
        tree: (0..o.td().len()).map(|i| o.td().parent(i)).collect(),
        root: o.td().root(),
    };
    OverlayJson {
        host_hash: o.host_hash().hex(),
        r: o.r(),
        kind: o.kind().as_str().to_string(),
        vertices,
        edges,
        td,
    }
}

pub fn overlay_from_json(j: &OverlayJson, host: &HostRef) -> Result<Overlay> {
    if host.hash().hex() != j.host_hash {
        return Err(Error::Cli(format!(
            "overlay host hash {} does not match the provided host {}",
            j.host_hash,
            host.hash().hex()
        )));
    }
    let kind = OverlayKind::parse(&j.kind)
        .ok_or_else(|| Error::Cli(format!("unknown overlay kind {:?}", j.kind)))?;
    let n = j.vertices.len();
    let mut f = vec![0u32; n];
    let mut ell = vec![0u32; n];
    for (i, v) in j.vertices.iter().enumerate() {
        if v.id as usize != i {
            return Err(Error::Cli(format!(
                "overlay vertices must be listed in ascending order; slot {i} holds id {}",
                v.id
            )));
        }
        f[i] = v.f;
        ell[i] = v.ell;
    }
    let edges: Vec<(u32, u32)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
    let h = Graph::from_edges(n, &edges)?;
    let td = TreeDecomposition::new(j.td.bags.clone(), j.td.tree.clone())?;
    if td.root() != j.td.root {
        return Err(Error::Cli(format!(
            "decomposition root field says {}, the parent array says {}",
            j.td.root,
            td.root()
        )));
    }
    Overlay::new(host.clone(), kind, j.r, h, f, ell, td)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SystemJson {
    pub host_hash: String,
    pub kind: String,
    pub r: u32,
    pub declared_tw: i64,
    pub declared_thickness: String,
    pub members: Vec<OverlayJson>,
}

pub fn system_to_json(s: &OverlaySystem) -> SystemJson {
    SystemJson {
        host_hash: s.host_hash().hex(),
        kind: s.kind().as_str().to_string(),
        r: s.r(),
        declared_tw: s.declared_tw(),
        declared_thickness: ratio_string(s.declared_thickness()),
        members: s.members().iter().map(overlay_to_json).collect(),
    }
}

/// Rebuilds a system over its base graph. Star-host systems reconstruct
/// the star graph from the base; the stored hash guards against feeding
/// the wrong graph.
pub fn system_from_json(j: &SystemJson, base: &Graph) -> Result<OverlaySystem> {
    let kind = OverlayKind::parse(&j.kind)
        .ok_or_else(|| Error::Cli(format!("unknown system kind {:?}", j.kind)))?;
    let host = match kind {
        OverlayKind::Star => HostRef::star(star_graph(base)?),
        _ => HostRef::plain(base.clone()),
    };
    if host.hash().hex() != j.host_hash {
        return Err(Error::Cli(format!(
            "system host hash {} does not match the provided graph (host hash {})",
            j.host_hash,
            host.hash().hex()
        )));
    }
    let members: Vec<Overlay> = j
        .members
        .iter()
        .map(|m| overlay_from_json(m, &host))
        .collect::<Result<_>>()?;
    OverlaySystem::new(members, j.declared_tw, parse_ratio(&j.declared_thickness)?)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolveJson {
    pub problem: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    pub set: Vec<u32>,
    pub value: u64,
    pub solution: Vec<u32>,
}

pub fn solve_to_json(problem: &Problem, solution: &Solution) -> SolveJson {
    SolveJson {
        problem: problem.name().to_string(),
        r: problem.r(),
        set: problem.set().to_vec(),
        value: solution.value,
        solution: solution.solution.clone(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PtasJson {
    pub problem: String,
    pub r: u32,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    pub epsilon: String,
    pub guarantee: String,
    pub solution: Vec<u32>,
    pub value: u64,
    pub chosen_overlay_index: usize,
    pub per_overlay_values: Vec<u64>,
    pub system_size: usize,
    pub system_max_thickness: String,
    pub system_tw_bound: i64,
    pub wall_time_ms: u64,
}

pub fn ptas_to_json(rep: &PtasReport) -> PtasJson {
    PtasJson {
        problem: rep.problem.clone(),
        r: rep.r,
        k: rep.k,
        s: rep.s,
        epsilon: ratio_string(&rep.epsilon),
        guarantee: ratio_string(&rep.guarantee),
        solution: rep.solution.clone(),
        value: rep.value,
        chosen_overlay_index: rep.chosen_overlay_index,
        per_overlay_values: rep.per_overlay_values.clone(),
        system_size: rep.system_size,
        system_max_thickness: ratio_string(&rep.system_max_thickness),
        system_tw_bound: rep.system_tw_bound,
        wall_time_ms: rep.wall_time_ms,
    }
}

/// Verification outcome for a stored overlay or system.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerifyJson {
    pub valid: bool,
    pub kind: String,
    pub size: usize,
    pub violations: Vec<String>,
    pub max_width: i64,
    pub max_thickness: String,
}

/// The stage-to-stage pipeline state. Every command reads one envelope
/// (or a bare `.gr` file) and writes one back, attaching its product and
/// recording its resolved configuration under its own name.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub config: serde_json::Map<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layering: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ptas: Option<PtasJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyJson>,
}

impl Envelope {
    /// Reads an envelope from text, accepting either envelope JSON or a
    /// bare PACE graph file.
    pub fn parse(text: &str) -> Result<Envelope> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Cli(format!("unreadable envelope: {e}")))
        } else {
            Ok(Envelope { graph: Some(graph_to_json(&parse_gr(text)?)), ..Envelope::default() })
        }
    }

    pub fn to_string_pretty(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Cli(format!("serialization failed: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn require_graph(&self) -> Result<Graph> {
        let j = self
            .graph
            .as_ref()
            .ok_or_else(|| Error::Cli("this stage needs a graph in its input".into()))?;
        graph_from_json(j)
    }

    pub fn require_layering(&self) -> Result<Layering> {
        let layers = self
            .layering
            .as_ref()
            .ok_or_else(|| Error::Cli("this stage needs a layering in its input".into()))?;
        Ok(Layering::new(layers.clone()))
    }

    pub fn require_system(&self, base: &Graph) -> Result<OverlaySystem> {
        let j = self
            .system
            .as_ref()
            .ok_or_else(|| Error::Cli("this stage needs an overlay system in its input".into()))?;
        system_from_json(j, base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{identity_system, layering_lift, sgbas_to_star};
    use crate::generators;
    use crate::layering::bfs_layering;
    use crate::td::min_fill_decomposition;

    #[test]
    fn graph_text_round_trip_is_hash_equal() {
        let g = generators::grid(3, 4).unwrap();
        let text = write_gr(&g);
        let back = parse_gr(&text).unwrap();
        assert_eq!(back.content_hash(), g.content_hash());
        assert_eq!(write_gr(&back), text);
    }

    #[test]
    fn graph_text_rejects_broken_input() {
        assert!(parse_gr("p tw 2 1\n3 1\n").is_err());
        assert!(parse_gr("p tw 2 2\n1 2\n").is_err());
        assert!(parse_gr("1 2\n").is_err());
        assert!(parse_gr("p tw x y\n").is_err());
    }

    #[test]
    fn decomposition_text_round_trip_keeps_the_root() {
        let g = generators::cycle(7).unwrap();
        let td = min_fill_decomposition(&g).unwrap();
        td.validate(&g).unwrap();
        let text = write_td(&td, g.n());
        let back = parse_td(&text).unwrap();
        back.validate(&g).unwrap();
        assert_eq!(back.bags(), td.bags());
        assert_eq!(back.root(), td.root());
        assert_eq!(back.tree_edges(), td.tree_edges());
        assert_eq!(write_td(&back, g.n()), text);
    }

    #[test]
    fn rootless_decomposition_files_root_at_bag_one() {
        let text = "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n";
        let td = parse_td(text).unwrap();
        assert_eq!(td.root(), 0);
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn layering_text_round_trip() {
        let g = generators::grid(4, 4).unwrap();
        let l = bfs_layering(&g, &[0]).unwrap();
        let text = write_layering_text(&l);
        let back = parse_layering_text(&text).unwrap();
        assert_eq!(back.layers(), l.layers());
        assert_eq!(write_layering_text(&back), text);
    }

    #[test]
    fn rational_strings_round_trip() {
        for s in ["1", "3/2", "9/8", "0", "7"] {
            let q = parse_ratio(s).unwrap();
            assert_eq!(ratio_string(&q), s);
        }
        assert_eq!(ratio_string(&parse_ratio("6/4").unwrap()), "3/2");
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn overlay_json_round_trip_is_identical() {
        let g = generators::cycle(6).unwrap();
        let host = HostRef::plain(g);
        let sys = identity_system(&host, 2).unwrap();
        let o = &sys.members()[0];
        let j = overlay_to_json(o);
        let back = overlay_from_json(&j, &host).unwrap();
        back.verify().unwrap();
        assert_eq!(overlay_to_json(&back), j);
        let wrong_host = HostRef::plain(generators::path(6).unwrap());
        assert!(overlay_from_json(&j, &wrong_host).is_err());
    }

    #[test]
    fn system_json_round_trip_with_many_members() {
        let g = generators::cycle(24).unwrap();
        let l = bfs_layering(&g, &[0]).unwrap();
        let mut base = |h: &HostRef| identity_system(h, 1);
        let sys = layering_lift(&HostRef::plain(g.clone()), &l, 1, 1, &mut base).unwrap();
        let j = system_to_json(&sys);
        let back = system_from_json(&j, &g).unwrap();
        assert_eq!(system_to_json(&back), j);
        assert_eq!(back.size(), sys.size());
        let wrong = generators::path(24).unwrap();
        assert!(system_from_json(&j, &wrong).is_err());
    }

    #[test]
    fn star_system_json_rebuilds_its_star_host() {
        let g = generators::path(3).unwrap();
        let sys = sgbas_to_star(&identity_system(&HostRef::plain(g.clone()), 1).unwrap()).unwrap();
        let j = system_to_json(&sys);
        assert_eq!(j.kind, "star");
        let back = system_from_json(&j, &g).unwrap();
        assert_eq!(system_to_json(&back), j);
    }

    #[test]
    fn envelope_accepts_bare_graph_text() {
        let g = generators::path(4).unwrap();
        let env = Envelope::parse(&write_gr(&g)).unwrap();
        assert_eq!(env.require_graph().unwrap().content_hash(), g.content_hash());
        let json = env.to_string_pretty().unwrap();
        let again = Envelope::parse(&json).unwrap();
        assert_eq!(again.require_graph().unwrap().content_hash(), g.content_hash());
    }
}
