//! Command-line front end. Every command reads a pipeline envelope (or a
//! bare PACE graph file) from --input or stdin, does one stage of work,
//! and writes the envelope back to --output or stdout, so stages compose
//! with ordinary shell pipes:
//!
//!     thin-overlays gen --family path --n 5 \
//!       | thin-overlays layer \
//!       | thin-overlays build --builder layering --r 1 --k 1 \
//!       | thin-overlays ptas rdom --r 1 --k 1
//!
//! Exit codes: 0 success, 1 usage or data error, 2 certificate failure,
//! 3 infeasible instance.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use thin_overlays::builders::{
    apex_lift, identity_system, layering_lift, rooted_system, sgbas_to_star, shadow_lift,
    star_sum_lift,
};
use thin_overlays::cliques::star_graph;
use thin_overlays::error::{Error, Result};
use thin_overlays::generators;
use thin_overlays::graph::{Graph, Subgraph};
use thin_overlays::io::{
    graph_to_json, overlay_from_json, parse_ratio, ptas_to_json, ratio_string, solve_to_json,
    system_to_json, write_gr, Envelope, VerifyJson,
};
use thin_overlays::layering::{bfs_layering, Layering};
use thin_overlays::overlay::{HostRef, Overlay, OverlayKind};
use thin_overlays::ptas::{
    ptas_max_distance_independent, ptas_min_r_dominating, ptas_s_clique_cover,
};
use thin_overlays::schedule::{separator_system, LayeringSource, ScheduleParams};
use thin_overlays::solve::{solve, Problem, SolveRequest};
use thin_overlays::system::OverlaySystem;

#[derive(Parser)]
#[command(
    name = "thin-overlays",
    about = "Overlay systems of low thickness: generators, builders, exact solvers, approximation engines",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph from a named family
    Gen(GenArgs),
    /// Attach a breadth-first layering to the input graph
    Layer(PipeArgs),
    /// Build an overlay system over the input graph
    Build(BuildArgs),
    /// Re-verify a stored overlay system against its graph
    Verify(PipeArgs),
    /// Solve an optimization problem exactly
    Solve(ProblemArgs),
    /// Run an approximation engine over the input system
    Ptas(ProblemArgs),
}

#[derive(Args)]
struct PipeArgs {
    /// Input file; stdin when absent
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Family name: path, cycle, grid, apexed_grid, diag_grid, random_tree
    #[arg(value_name = "FAMILY")]
    family_pos: Option<String>,
    /// Size, when the family takes a single one
    #[arg(value_name = "SIZE")]
    n_pos: Option<usize>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Grid rows
    #[arg(long)]
    a: Option<usize>,
    /// Grid columns
    #[arg(long)]
    b: Option<usize>,
    /// Seed for randomized families
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format: json envelope or bare gr text
    #[arg(long, default_value = "json", value_parser = ["json", "gr"])]
    format: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(short, long)]
    input: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Builder: trivial, layering, apex, rooted, star, starsum, shadow, separator
    #[arg(long)]
    builder: String,
    /// Overlay radius
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Accuracy; thickness stays within 1 + 1/k
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Separator schedule growth rate (rational, e.g. 1 or 1/2)
    #[arg(long, default_value = "1")]
    alpha: String,
    /// Separator schedule decay rate (0 or a unit fraction such as 1/107)
    #[arg(long, default_value = "0")]
    delta: String,
    /// Separator schedule expansion base
    #[arg(long, default_value_t = 2)]
    c: u64,
    /// Separator base-case size; the graph order when absent
    #[arg(long)]
    n: Option<u64>,
    /// Separator budget per split; ceil(sqrt(n)) + 2 when absent
    #[arg(long)]
    b: Option<usize>,
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem name; see --problem
    #[arg(value_name = "PROBLEM")]
    problem_pos: Option<String>,
    /// solve: mis, dist-is, rdom, hitting; ptas: mis, dist-is, rdom, cliquecover
    #[arg(long)]
    problem: Option<String>,
    /// Distance parameter
    #[arg(long)]
    r: Option<u32>,
    /// Accuracy (ptas only)
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Clique size for cliquecover; 2 is vertex cover
    #[arg(long, default_value_t = 2)]
    s: u32,
    #[arg(short, long)]
    input: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(match e {
                Error::Certificate(_) => 2,
                Error::Infeasible(_) => 3,
                _ => 1,
            })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Layer(a) => cmd_layer(a),
        Cmd::Build(a) => cmd_build(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Solve(a) => cmd_problem(a, false),
        Cmd::Ptas(a) => cmd_problem(a, true),
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Cli(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Cli(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

/// Writes through a sibling temp file and a rename, so readers of the
/// target path never observe a half-written file.
fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let tmp = p.with_extension("tmp");
            std::fs::write(&tmp, text)
                .and_then(|()| std::fs::rename(&tmp, p))
                .map_err(|e| Error::Cli(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Error::Cli(format!("cannot write stdout: {e}")))
        }
    }
}

fn emit(env: &Envelope, output: &Option<PathBuf>) -> Result<ExitCode> {
    write_output(output, &env.to_string_pretty()?)?;
    Ok(ExitCode::SUCCESS)
}

fn pick<T>(pos: Option<T>, flag: Option<T>, what: &str) -> Result<T> {
    match (pos, flag) {
        (None, None) => Err(Error::Cli(format!("missing {what}"))),
        (Some(_), Some(_)) => Err(Error::Cli(format!(
            "{what} given both as an argument and as a flag"
        ))),
        (Some(v), None) | (None, Some(v)) => Ok(v),
    }
}

fn cmd_gen(a: GenArgs) -> Result<ExitCode> {
    let family = pick(a.family_pos, a.family, "a family (--family)")?;
    let need_n = |n: Option<usize>| {
        n.ok_or_else(|| Error::Cli(format!("family {family} needs a size (--n)")))
    };
    let n = a.n_pos.or(a.n);
    let g = match family.as_str() {
        "path" => generators::path(need_n(n)?)?,
        "cycle" => generators::cycle(need_n(n)?)?,
        "grid" => {
            let (ra, rb) = match (a.a, a.b) {
                (Some(ra), Some(rb)) => (ra, rb),
                (None, None) => {
                    let side = need_n(n)?;
                    (side, side)
                }
                _ => return Err(Error::Cli("grid needs both --a and --b".into())),
            };
            generators::grid(ra, rb)?
        }
        "apexed_grid" => generators::apexed_grid(need_n(n)?)?,
        "diag_grid" => generators::diag_grid(need_n(n)?)?,
        "random_tree" => generators::random_tree(need_n(n)?, a.seed)?,
        other => return Err(Error::Cli(format!("unknown family {other:?}"))),
    };
    if a.format == "gr" {
        write_output(&a.output, &write_gr(&g))?;
        return Ok(ExitCode::SUCCESS);
    }
    let mut env = Envelope { seed: Some(a.seed), graph: Some(graph_to_json(&g)), ..Envelope::default() };
    env.config.insert(
        "gen".into(),
        json!({
            "family": family,
            "n": n,
            "a": a.a,
            "b": a.b,
            "seed": a.seed,
        }),
    );
    emit(&env, &a.output)
}

/// One breadth-first root per component, lowest vertex first, so layer
/// assignments are deterministic and cover disconnected graphs.
fn component_roots(g: &Graph) -> Vec<u32> {
    g.components().iter().map(|c| c[0]).collect()
}

fn bfs_layering_all(g: &Graph) -> Result<Layering> {
    bfs_layering(g, &component_roots(g))
}

fn cmd_layer(a: PipeArgs) -> Result<ExitCode> {
    let mut env = Envelope::parse(&read_input(&a.input)?)?;
    let g = env.require_graph()?;
    let roots = component_roots(&g);
    let l = bfs_layering(&g, &roots)?;
    env.layering = Some(l.layers().to_vec());
    env.config.insert("layer".into(), json!({ "method": "bfs", "roots": roots }));
    emit(&env, &a.output)
}

/// Vertices adjacent to every other vertex; the natural apex set of the
/// apexed-grid family.
fn universal_vertices(g: &Graph) -> Vec<u32> {
    (0..g.n() as u32)
        .filter(|&v| g.degree(v) == g.n() - 1 && g.n() > 1)
        .collect()
}

fn bfs_lift(host: &HostRef, r: u32, k: u32) -> Result<OverlaySystem> {
    let g: &Graph = match host {
        HostRef::Plain(g) => g.as_ref(),
        HostRef::Star(sg) => sg.base(),
    };
    let l = bfs_layering_all(g)?;
    layering_lift(host, &l, r, k, &mut |h: &HostRef| identity_system(h, r))
}

fn cmd_build(a: BuildArgs) -> Result<ExitCode> {
    let mut env = Envelope::parse(&read_input(&a.input)?)?;
    let g = env.require_graph()?;
    let host = HostRef::plain(g.clone());
    let mut config = json!({
        "builder": a.builder,
        "r": a.r,
        "k": a.k,
    });
    let sys = match a.builder.as_str() {
        "trivial" => identity_system(&host, a.r)?,
        "layering" => {
            let l = match &env.layering {
                Some(layers) => Layering::new(layers.clone()),
                None => bfs_layering_all(&g)?,
            };
            config["base"] = json!({ "builder": "trivial", "r": a.r });
            layering_lift(&host, &l, a.r, a.k, &mut |h: &HostRef| {
                identity_system(h, a.r)
            })?
        }
        "apex" => {
            let apex = universal_vertices(&g);
            config["apex"] = json!(apex);
            config["base"] = json!({ "builder": "layering", "r": a.r, "k": a.k });
            let rest: Vec<u32> =
                (0..g.n() as u32).filter(|v| !apex.contains(v)).collect();
            let sub = Subgraph::induced(&g, &rest)?;
            // apex_lift expects the sub-system in the reduced graph's own
            // labels and translates them back itself
            let inner =
                bfs_lift(&HostRef::plain(sub.graph().clone()), a.r, a.k)?.weakened_to_a()?;
            apex_lift(&host, &apex, &inner)?
        }
        "rooted" => {
            let apex = universal_vertices(&g);
            config["apex"] = json!(apex);
            config["base"] = json!({ "builder": "layering", "r": a.r, "k": a.k });
            rooted_system(&host, &apex, &mut |h: &HostRef| bfs_lift(h, a.r, a.k))?
        }
        "star" => {
            config["base"] = json!({ "builder": "trivial", "r": 1 });
            sgbas_to_star(&identity_system(&host, 1)?)?
        }
        "starsum" => {
            // The whole graph is the center and there are no rays; joins
            // with real rays arise inside the shadow builder, where each
            // ray is rooted at its attachment clique before replication.
            config["rays"] = json!("rooted at their attachment cliques before replication");
            let sh = HostRef::star(star_graph(&g)?);
            let center: Vec<u32> = (0..g.n() as u32).collect();
            let center_sys = identity_system(&sh, 1)?;
            star_sum_lift(&sh, &center, &[], &center_sys, &[], a.k)?
        }
        "shadow" => {
            let l = match &env.layering {
                Some(layers) => Layering::new(layers.clone()),
                None => bfs_layering_all(&g)?,
            };
            // The recursion escalates its accuracy demand per layer, so
            // deep layerings are grouped into at most three bands first.
            // Banding a contiguous layering keeps it shadow-complete: a
            // suffix component's backward neighbors all sit in the last
            // original layer of the previous band.
            let band = l.d().div_ceil(3).max(1);
            let l = if band > 1 { l.coarsen(band) } else { l };
            config["rays"] = json!("rooted at their attachment cliques before replication");
            config["band"] = json!(band);
            config["base"] = json!({ "builder": "star", "r": 1 });
            shadow_lift(&g, &l, a.k, &mut |lg: &Graph, _k: u32| {
                identity_system(&HostRef::star(star_graph(lg)?), 1)
            })?
        }
        "separator" => {
            let alpha = parse_ratio(&a.alpha)?;
            let delta = parse_ratio(&a.delta)?;
            let t = a.n.unwrap_or(g.n().max(3) as u64);
            let budget = a
                .b
                .unwrap_or_else(|| (g.n() as f64).sqrt().ceil() as usize + 2);
            config["alpha"] = json!(a.alpha);
            config["delta"] = json!(a.delta);
            config["c"] = json!(a.c);
            config["t"] = json!(t);
            config["budget"] = json!(budget);
            let params = ScheduleParams::new(alpha, delta, a.c, a.r, a.k, t)?;
            separator_system(&g, &params, &LayeringSource::SeparatorTree { budget })?
        }
        other => return Err(Error::Cli(format!("unknown builder {other:?}"))),
    };
    env.system = Some(system_to_json(&sys));
    env.config.insert("build".into(), config);
    emit(&env, &a.output)
}

fn cmd_verify(a: PipeArgs) -> Result<ExitCode> {
    let mut env = Envelope::parse(&read_input(&a.input)?)?;
    let g = env.require_graph()?;
    let sysj = env
        .system
        .as_ref()
        .ok_or_else(|| Error::Cli("verify needs an overlay system in its input".into()))?
        .clone();
    let mut violations: Vec<String> = Vec::new();
    let kind = OverlayKind::parse(&sysj.kind)
        .ok_or_else(|| Error::Cli(format!("unknown system kind {:?}", sysj.kind)))?;
    let host = match kind {
        OverlayKind::Star => HostRef::star(star_graph(&g)?),
        _ => HostRef::plain(g.clone()),
    };
    if host.hash().hex() != sysj.host_hash {
        violations.push(format!(
            "host: stored hash {} does not match the graph's {}",
            sysj.host_hash,
            host.hash().hex()
        ));
    }
    let mut members: Vec<Overlay> = Vec::new();
    let mut max_width: i64 = -1;
    for (i, mj) in sysj.members.iter().enumerate() {
        match overlay_from_json(mj, &host) {
            Err(e) => violations.push(format!("member {i}: {e}")),
            Ok(o) => {
                max_width = max_width.max(o.td().width());
                if let Err(v) = o.verify() {
                    violations.push(format!("member {i}: {v}"));
                }
                members.push(o);
            }
        }
    }
    let mut max_thickness = "0".to_string();
    if violations.is_empty() {
        match OverlaySystem::new(members, sysj.declared_tw, parse_ratio(&sysj.declared_thickness)?)
        {
            Err(e) => violations.push(e.to_string()),
            Ok(sys) => max_thickness = ratio_string(&sys.thickness().1),
        }
    }
    let valid = violations.is_empty();
    env.verify = Some(VerifyJson {
        valid,
        kind: sysj.kind.clone(),
        size: sysj.members.len(),
        violations,
        max_width,
        max_thickness,
    });
    env.config.insert("verify".into(), json!({ "checked_members": sysj.members.len() }));
    write_output(&a.output, &env.to_string_pretty()?)?;
    Ok(if valid { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_problem(a: ProblemArgs, approximate: bool) -> Result<ExitCode> {
    let name = pick(a.problem_pos, a.problem, "a problem (--problem)")?;
    let mut env = Envelope::parse(&read_input(&a.input)?)?;
    let g = env.require_graph()?;
    let all: Vec<u32> = (0..g.n() as u32).collect();
    // Unadorned independence means pairwise distance at least 2.
    let r = match (name.as_str(), a.r) {
        ("mis", None) => 2,
        ("mis", Some(_)) => {
            return Err(Error::Cli("mis fixes the distance; use dist-is with --r".into()))
        }
        (_, r) => r.unwrap_or(1),
    };
    if approximate {
        let sys = env.require_system(&g)?;
        let rep = match name.as_str() {
            "mis" | "dist-is" => ptas_max_distance_independent(&g, &sys, r, a.k)?,
            "rdom" => ptas_min_r_dominating(&g, &sys, r, a.k)?,
            "cliquecover" => ptas_s_clique_cover(&g, &sys, a.s, a.k)?,
            other => return Err(Error::Cli(format!("unknown ptas problem {other:?}"))),
        };
        env.config.insert(
            "ptas".into(),
            json!({ "problem": name, "r": rep.r, "k": a.k, "s": rep.s }),
        );
        env.ptas = Some(ptas_to_json(&rep));
    } else {
        let problem = match name.as_str() {
            "mis" | "dist-is" => Problem::DistanceIndependent { r, selectable: all },
            "rdom" => Problem::RDominating { r, targets: all },
            "hitting" => Problem::NeighborhoodHitting { targets: all },
            other => return Err(Error::Cli(format!("unknown solve problem {other:?}"))),
        };
        env.config.insert(
            "solve".into(),
            json!({ "problem": name, "r": problem.r() }),
        );
        let sol = solve(&SolveRequest { graph: g, decomposition: None, problem: problem.clone() })?;
        env.solve = Some(solve_to_json(&problem, &sol));
    }
    emit(&env, &a.output)
}
