//! `ugpebble`: thin adapters from command-line flags to `ug-core`.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};
use ug_core::construction::{
    approx_gap_params, build_gap_pair, decay_simulation, derive_params, sample_edge_data, EdgeData,
    EdgeDataJson, GapContext,
};
use ug_core::game::{
    run_match, Arena, CycleGreedySpoiler, Duplicator, ExhaustiveSpoiler, Game, IdentityDuplicator,
    RandomSpoiler, Spoiler, TreeDuplicator, TreeOptions,
};
use ug_core::graph::{preset, GraphJson, MultiGraph};
use ug_core::instance::GroupUgInstance;
use ug_core::lift::lift;
use ug_core::presets::{base_context, lifted_preset, BASE_PRESETS, LIFTED_PRESETS};
use ug_core::solver::{exact_opt, is_completely_satisfiable, Satisfiability};

#[derive(Debug, Parser)]
#[command(
    name = "ugpebble",
    version,
    about = "Group Unique Games gap instances and the bijective pebble game"
)]
pub struct Cli {
    /// Plain text instead of JSON.
    #[arg(long, global = true)]
    pub human: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive d, γ, m and r from ε, δ and ℓ.
    Params {
        #[arg(long)]
        epsilon: BigRational,
        #[arg(long)]
        delta: BigRational,
        #[arg(long)]
        ell: u32,
    },
    /// Sample edge data on a base graph and write the gap pair to a directory.
    Construct(ConstructArgs),
    /// Exact optimum of an instance file.
    Opt {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Decide complete satisfiability, with a conflict cycle when it fails.
    Satcheck {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Write the label-lifted instance.
    Lift {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Play one match between a Spoiler and a Duplicator.
    Play(PlayArgs),
    /// Monte Carlo estimate of the expected number of zero-sum subsets along paths.
    Decay {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Smallest ℓ whose soundness ratio is at most α, with the closed-form check.
    Gapcheck {
        #[arg(long)]
        alpha: BigRational,
    },
    /// Serve interactive sessions over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: std::net::IpAddr,
    },
    /// Print a bundled instance pair.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Graph file in graph-v1 format.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub graph: Option<PathBuf>,
    /// Named base graph such as K4 or Petersen.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// With --delta and --k, check the output against derived parameters.
    #[arg(long, requires_all = ["delta", "k"])]
    pub epsilon: Option<BigRational>,
    #[arg(long, requires = "epsilon")]
    pub delta: Option<BigRational>,
    #[arg(long, requires = "epsilon")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SpoilerKind {
    Random,
    Greedy,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DuplicatorKind {
    Tree,
    Identity,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    /// Lifted preset supplying both structures and the base data.
    #[arg(long, conflicts_with_all = ["construction", "a", "b"])]
    pub preset: Option<String>,
    /// Directory written by `construct`; both sides of its pruned pair are lifted.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub construction: Option<PathBuf>,
    #[arg(long, requires = "b")]
    pub a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "greedy")]
    pub spoiler: SpoilerKind,
    #[arg(long, value_enum, default_value = "tree")]
    pub duplicator: DuplicatorKind,
    #[arg(long, default_value_t = 20)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Search depth for the exhaustive Spoiler.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Count the query vertex among the anchors of its tree.
    #[arg(long)]
    pub anchor_query: bool,
    #[arg(long)]
    pub lazy: bool,
    #[arg(long)]
    pub audit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub files: Vec<PathBuf>,
}

/// Parses `argv` (program name first) and runs the command.
pub fn execute<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 {
                (text, String::new())
            } else {
                (String::new(), text)
            };
            return CommandOutcome {
                code,
                stdout,
                stderr,
                files: Vec::new(),
            };
        }
    };
    let mut files = Vec::new();
    match run(&cli.command, &mut files) {
        Ok(v) => CommandOutcome {
            code: 0,
            stdout: render(&v, cli.human),
            stderr: String::new(),
            files,
        },
        Err(e) => CommandOutcome {
            code: 1,
            stdout: render(&json!({ "error": format!("{e:#}") }), cli.human),
            stderr: String::new(),
            files,
        },
    }
}

fn render(v: &Value, human: bool) -> String {
    if !human {
        return serde_json::to_string_pretty(v).expect("json") + "\n";
    }
    fn walk(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    if x.is_object() || x.is_array() {
                        out.push_str(&format!("{pad}{k}:\n"));
                        walk(x, indent + 1, out);
                    } else {
                        out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                    }
                }
            }
            Value::Array(items) => {
                for x in items {
                    if x.is_object() || x.is_array() {
                        out.push_str(&format!("{pad}-\n"));
                        walk(x, indent + 1, out);
                    } else {
                        out.push_str(&format!("{pad}- {}\n", scalar(x)));
                    }
                }
            }
            x => out.push_str(&format!("{pad}{}\n", scalar(x))),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            x => x.to_string(),
        }
    }
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

fn read_instance(path: &Path) -> Result<GroupUgInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    GroupUgInstance::from_json_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    files.push(path.to_path_buf());
    Ok(())
}

fn instance_text(u: &GroupUgInstance) -> String {
    serde_json::to_string_pretty(&u.to_json()).expect("json") + "\n"
}

fn run(cmd: &Command, files: &mut Vec<PathBuf>) -> Result<Value> {
    match cmd {
        Command::Params {
            epsilon,
            delta,
            ell,
        } => Ok(derive_params(epsilon, delta, *ell)?.to_json_value()),
        Command::Construct(args) => construct(args, files),
        Command::Opt { input } => {
            let u = read_instance(input)?;
            let r = exact_opt(&u)?;
            let mut v = r.to_json_value(&u);
            v["satisfied"] = json!(r.satisfied);
            v["total"] = json!(r.total);
            Ok(v)
        }
        Command::Satcheck { input } => satcheck(&read_instance(input)?),
        Command::Lift { input, out } => {
            let u = read_instance(input)?;
            let l = lift(&u)?;
            write(out, &instance_text(&l), files)?;
            Ok(json!({
                "out": out.display().to_string(),
                "vertices": l.vertex_count(),
                "constraints": l.constraint_count(),
                "q": l.q(),
            }))
        }
        Command::Play(args) => play(args),
        Command::Decay {
            m,
            ell,
            d,
            r,
            trials,
            seed,
        } => Ok(decay_simulation(*m, *ell, *d, *r, *trials, *seed)?.to_json_value()),
        Command::Gapcheck { alpha } => Ok(approx_gap_params(alpha)?.to_json_value()),
        Command::Serve { port, bind } => {
            let addr = SocketAddr::new(*bind, *port);
            eprintln!("listening on http://{addr}");
            tokio::runtime::Runtime::new()?
                .block_on(ug_service::serve(addr, ug_service::Service::default()))?;
            Ok(json!({ "stopped": addr.to_string() }))
        }
        Command::Preset { name, out } => preset_pair(name, out.as_deref(), files),
    }
}

fn construct(args: &ConstructArgs, files: &mut Vec<PathBuf>) -> Result<Value> {
    let g = match (&args.graph, &args.preset) {
        (Some(path), _) => MultiGraph::from_json(&read_json::<GraphJson>(path)?)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => bail!("either --graph or --preset is required"),
    };
    let (g, _) = g.canonicalize();
    let ed = sample_edge_data(&g, args.m, args.ell, args.seed)?;
    let out = build_gap_pair(&g, &ed, args.r)?;
    let faithful = match (&args.epsilon, &args.delta, args.k) {
        (Some(e), Some(d), Some(k)) => {
            let p = derive_params(e, d, args.ell as u32)?;
            out.check_faithful(&p, k)
        }
        _ => false,
    };
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for (name, text) in out.files(faithful) {
        write(&args.out.join(name), &text, files)?;
    }
    let mut report = serde_json::to_value(out.report())?;
    report["faithful"] = json!(faithful);
    report["seed"] = json!(args.seed);
    report["out"] = json!(args.out.display().to_string());
    Ok(report)
}

fn satcheck(u: &GroupUgInstance) -> Result<Value> {
    let g = u.graph();
    Ok(match is_completely_satisfiable(u) {
        Satisfiability::Satisfiable(a) => json!({ "satisfiable": true, "witness": a.to_named(u) }),
        Satisfiability::Unsatisfiable(c) => {
            let cycle: Vec<Value> = c
                .cycle
                .iter()
                .map(|s| json!({ "from": g.name(s.from), "to": g.name(s.to), "shift": s.shift.to_string() }))
                .collect();
            json!({
                "satisfiable": false,
                "conflict": {
                    "vertex": g.name(c.vertex),
                    "labels": [c.labels.0.to_string(), c.labels.1.to_string()],
                    "cycle": cycle,
                },
            })
        }
    })
}

/// Rebuilds a construction from the files `construct` wrote.
fn load_construction(dir: &Path) -> Result<GapContext> {
    let g = MultiGraph::from_json(&read_json::<GraphJson>(&dir.join("graph.json"))?)?;
    let entries: Vec<EdgeDataJson> = read_json(&dir.join("edgedata.json"))?;
    let ed = EdgeData::from_json(&g, &entries)?;
    let report: Value = read_json(&dir.join("report.json"))?;
    let r = report["r"]
        .as_u64()
        .ok_or_else(|| anyhow!("report.json has no r"))? as usize;
    Ok(build_gap_pair(&g, &ed, r)?.context())
}

fn play(args: &PlayArgs) -> Result<Value> {
    let (a, b, ctx) = if let Some(name) = &args.preset {
        let p = lifted_preset(name)?;
        (p.a, p.b, Some(p.context))
    } else if let Some(dir) = &args.construction {
        let ctx = load_construction(dir)?;
        (lift(&ctx.u1()?)?, lift(&ctx.u2()?)?, Some(ctx))
    } else if let (Some(a), Some(b)) = (&args.a, &args.b) {
        (read_instance(a)?, read_instance(b)?, None)
    } else {
        bail!("give --preset, --construction, or both --a and --b");
    };
    let arena = Arena::new(a, b)?;
    let game = Game::new(arena.clone(), args.k)?;
    let mut dup: Box<dyn Duplicator> = match args.duplicator {
        DuplicatorKind::Identity => Box::new(IdentityDuplicator),
        DuplicatorKind::Tree => {
            let ctx =
                ctx.ok_or_else(|| anyhow!("the tree Duplicator needs --preset or --construction"))?;
            let options = TreeOptions {
                query_vertex_is_anchor: args.anchor_query,
                lazy: args.lazy,
                audit: args.audit,
            };
            Box::new(TreeDuplicator::new(ctx, &arena, options)?)
        }
    };
    let mut spoiler: Box<dyn Spoiler> = match args.spoiler {
        SpoilerKind::Random => Box::new(RandomSpoiler::new(args.seed)),
        SpoilerKind::Greedy => Box::new(CycleGreedySpoiler::new(&arena, args.seed)),
        SpoilerKind::Exhaustive => Box::new(ExhaustiveSpoiler::new(args.depth)),
    };
    let result = run_match(game, spoiler.as_mut(), dup.as_mut(), args.rounds);
    let mut v = result.to_json_value();
    v["spoiler"] = json!(spoiler.name());
    v["duplicator"] = json!(dup.name());
    v["k"] = json!(args.k);
    v["seed"] = json!(args.seed);
    Ok(v)
}

fn preset_pair(name: &str, out: Option<&Path>, files: &mut Vec<PathBuf>) -> Result<Value> {
    let (a, b) = if BASE_PRESETS.contains(&name) {
        let ctx = base_context(name)?;
        (ctx.u1()?, ctx.u2()?)
    } else if LIFTED_PRESETS.contains(&name) {
        let p = lifted_preset(name)?;
        (p.a, p.b)
    } else {
        bail!("unknown preset {name:?}; choose one of {BASE_PRESETS:?} or {LIFTED_PRESETS:?}");
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write(
            &dir.join(format!("{name}-u1.json")),
            &instance_text(&a),
            files,
        )?;
        write(
            &dir.join(format!("{name}-u2.json")),
            &instance_text(&b),
            files,
        )?;
    }
    Ok(json!({
        "name": name,
        "u1": serde_json::to_value(a.to_json())?,
        "u2": serde_json::to_value(b.to_json())?,
    }))
}
