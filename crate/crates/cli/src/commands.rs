//! Subcommand dispatch. `run` never exits the process; it returns what to
//! print and the exit code so tests can drive it in-process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use oddcolor::classify::{screens, screens_to_tsv, Classification};
use oddcolor::coloring::{is_odd_coloring, Color, Coloring};
use oddcolor::discharge::audit;
use oddcolor::embedding::{Embedding, RotationSystem};
use oddcolor::graph::Graph;
use oddcolor::graph6::parse_graph6;
use oddcolor::lemmas::{run_lemma_harness, HarnessConfig, Instance, LemmaId};
use oddcolor::solver::{odd_chromatic_number, solve_odd_coloring, SearchConfig, SolveStatus, VertexOrder};

use crate::generate::{gen_subdivided, gen_torus_grid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDING: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, stderr: String::new(), code: EXIT_OK }
    }

    fn with_code(stdout: String, pass: bool) -> Self {
        Output { stdout, stderr: String::new(), code: if pass { EXIT_OK } else { EXIT_FINDING } }
    }

    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Output { stdout: String::new(), stderr, code: EXIT_USAGE }
    }
}

#[derive(Debug, Parser)]
#[command(name = "oddcolor", version, about = "Odd colorings, embeddings and discharging on surface graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Text,
    Tsv,
}

#[derive(Debug, Args)]
struct Fmt {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a coloring file against a graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        coloring: Option<PathBuf>,
        /// Palette size; colors must lie in 1..=K.
        #[arg(long)]
        k: Option<Color>,
        #[command(flatten)]
        fmt: Fmt,
    },
    /// Decide k-colorability or compute the odd chromatic number.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, conflicts_with = "chromatic", required_unless_present = "chromatic")]
        k: Option<Color>,
        #[arg(long)]
        chromatic: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Seed for tie-breaking in the vertex order.
        #[arg(long)]
        seed: Option<u64>,
        /// Time limit in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        #[command(flatten)]
        fmt: Fmt,
    },
    /// Trace faces of a rotation system.
    Faces {
        #[arg(long)]
        rot: PathBuf,
        #[command(flatten)]
        fmt: Fmt,
    },
    /// Vertex, 2-vertex, face and poor-vertex tables.
    Classify {
        #[arg(long)]
        rot: PathBuf,
        #[command(flatten)]
        fmt: Fmt,
    },
    /// Apply the discharging rules and audit the charges.
    Discharge {
        #[arg(long)]
        rot: PathBuf,
        /// Also print every transfer.
        #[arg(long)]
        ledger: bool,
        #[command(flatten)]
        fmt: Fmt,
    },
    /// List structures a minimal counterexample cannot contain.
    Screen {
        #[arg(long)]
        rot: PathBuf,
        #[command(flatten)]
        fmt: Fmt,
    },
    /// Run a reducible-configuration harness.
    Lemma {
        #[arg(long)]
        id: String,
        #[arg(long, required_unless_present = "graph")]
        rot: Option<PathBuf>,
        #[arg(long, conflicts_with = "rot")]
        graph: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory for reproducer files of failed instances.
        #[arg(long)]
        reproducers: Option<PathBuf>,
        #[command(flatten)]
        fmt: Fmt,
    },
    /// Corpus generators.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// C_m x C_n with the (N, E, S, W) rotation.
    TorusGrid {
        m: usize,
        n: usize,
        #[arg(long)]
        triangle_free: bool,
    },
    /// Subdivide a seeded fraction of the edges.
    Subdivide {
        #[arg(long)]
        rot: PathBuf,
        #[arg(long)]
        fraction: Ratio<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Output::ok(e.to_string()),
                _ => Output::usage(e.to_string()),
            }
        }
    };
    match dispatch(cli.command) {
        Ok(out) => out,
        Err(msg) => Output::usage(msg),
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Graph files: `.rot` rotation systems, anything else graph6 (first line).
fn load_graph(path: &Path) -> Result<Graph, String> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "rot") {
        return Ok(load_rot_text(&text, path)?.graph().clone());
    }
    let line = text.lines().find(|l| !l.trim().is_empty()).ok_or_else(|| format!("{}: empty file", path.display()))?;
    parse_graph6(line.trim()).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_rot_text(text: &str, path: &Path) -> Result<RotationSystem, String> {
    RotationSystem::parse_rot(text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_embedding(path: &Path) -> Result<Embedding, String> {
    let rs = load_rot_text(&read(path)?, path)?;
    Embedding::new(rs).map_err(|e| format!("{}: {e}", path.display()))
}

fn dispatch(cmd: Command) -> Result<Output, String> {
    match cmd {
        Command::Verify { graph, coloring, k, fmt } => verify(&graph, coloring.as_deref(), k, fmt.format),
        Command::Solve { graph, k, chromatic, jobs, seed, timeout, fmt } => {
            let g = load_graph(&graph)?;
            let mut cfg = SearchConfig::new(k.unwrap_or(1)).with_jobs(jobs);
            if let Some(s) = seed {
                cfg.seed = s;
                cfg.order = VertexOrder::SeededTies;
            }
            if let Some(t) = timeout {
                let limit = Duration::try_from_secs_f64(t).map_err(|e| format!("--timeout: {e}"))?;
                cfg = cfg.with_time_limit(limit);
            }
            if chromatic {
                chromatic_report(&g, &cfg, fmt.format)
            } else {
                solve_report(&g, &cfg, fmt.format)
            }
        }
        Command::Faces { rot, fmt } => {
            let emb = load_embedding(&rot)?;
            let chi = emb.euler_characteristic();
            let out = match fmt.format {
                Format::Text => format!("{}χ = {chi}\n", emb.faces.listing()),
                Format::Tsv => {
                    let mut s = String::from("face\tdegree\tvertices\n");
                    for (i, f) in emb.faces.faces().iter().enumerate() {
                        let vs: Vec<String> = f.vertices().map(|v| v.to_string()).collect();
                        let _ = writeln!(s, "{i}\t{}\t{}", f.degree(), vs.join(","));
                    }
                    let _ = writeln!(s, "chi\t\t{chi}");
                    s
                }
            };
            Ok(Output::ok(out))
        }
        Command::Classify { rot, fmt } => {
            let emb = load_embedding(&rot)?;
            let cls = Classification::new(&emb);
            Ok(Output::ok(match fmt.format {
                Format::Text => cls.to_text(),
                Format::Tsv => cls.to_tsv(),
            }))
        }
        Command::Discharge { rot, ledger, fmt } => {
            let emb = load_embedding(&rot)?;
            let report = audit(&emb);
            let mut out = match fmt.format {
                Format::Text => report.to_text(),
                Format::Tsv => report.to_tsv(),
            };
            if ledger {
                out.push_str(&match fmt.format {
                    Format::Text => report.ledger.dump(),
                    Format::Tsv => report.ledger.dump_tsv(),
                });
            }
            Ok(Output::with_code(out, report.passes()))
        }
        Command::Screen { rot, fmt } => {
            let emb = load_embedding(&rot)?;
            let cls = Classification::new(&emb);
            let matches = screens(&emb, &cls);
            let out = match fmt.format {
                Format::Tsv => screens_to_tsv(&matches),
                Format::Text => {
                    let mut s = format!("{} screen matches\n", matches.len());
                    for m in &matches {
                        let vs: Vec<String> = m.vertices.iter().map(|v| format!("v{v}")).collect();
                        let face = m.face.map_or(String::new(), |f| format!(" f{f}"));
                        let _ = writeln!(s, "{}{face}: {}", m.screen.as_str(), vs.join(" "));
                    }
                    s
                }
            };
            Ok(Output::with_code(out, matches.is_empty()))
        }
        Command::Lemma { id, rot, graph, trials, seed, jobs, reproducers, fmt } => {
            let lemma: LemmaId = id.parse().map_err(|e| format!("{e}"))?;
            let inst = match (rot, graph) {
                (Some(r), _) => Instance::embedded(r.display().to_string(), load_embedding(&r)?),
                (None, Some(g)) => Instance::bare(g.display().to_string(), load_graph(&g)?),
                (None, None) => return Err("one of --rot or --graph is required".into()),
            };
            let cfg = HarnessConfig {
                trials: trials.unwrap_or(usize::MAX),
                seed,
                jobs: jobs.max(1),
                reproducer_dir: reproducers,
                ..HarnessConfig::default()
            };
            let summary = run_lemma_harness(std::slice::from_ref(&inst), lemma, &cfg).map_err(|e| e.to_string())?;
            let out = match fmt.format {
                Format::Text => summary.to_text(),
                Format::Tsv => summary.to_tsv(),
            };
            Ok(Output::with_code(out, summary.failed() == 0))
        }
        Command::Gen { what } => match what {
            GenCommand::TorusGrid { m, n, triangle_free } => {
                let rs = gen_torus_grid(m, n, triangle_free).map_err(|e| e.to_string())?;
                Ok(Output::ok(rs.to_rot_string()))
            }
            GenCommand::Subdivide { rot, fraction, seed } => {
                let rs = load_rot_text(&read(&rot)?, &rot)?;
                let out = gen_subdivided(&rs, fraction, seed).map_err(|e| e.to_string())?;
                Ok(Output::ok(out.to_rot_string()))
            }
        },
    }
}

fn verify(graph: &Path, coloring: Option<&Path>, k: Option<Color>, format: Format) -> Result<Output, String> {
    let g = load_graph(graph)?;
    let Some(path) = coloring else {
        return Ok(Output::ok(format!("graph: {} vertices, {} edges\n", g.vertex_count(), g.edge_count())));
    };
    let c = Coloring::parse(&read(path)?, g.vertex_count(), k).map_err(|e| format!("{}: {e}", path.display()))?;
    let report = is_odd_coloring(&g, &c).map_err(|e| e.to_string())?;
    let out = match format {
        Format::Tsv => report.to_tsv(),
        Format::Text => {
            let mut s = String::new();
            let verdict = if report.passes() { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "odd coloring with {} colors: {verdict}", c.palette());
            for (u, v) in &report.proper_violations {
                let _ = writeln!(s, "proper-violation {u} {v}");
            }
            for v in &report.violations {
                let _ = writeln!(s, "odd-violation {v}");
            }
            s
        }
    };
    Ok(Output::with_code(out, report.passes()))
}

fn coloring_field(c: &Coloring) -> String {
    c.colors().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn solve_report(g: &Graph, cfg: &SearchConfig, format: Format) -> Result<Output, String> {
    let res = solve_odd_coloring(g, cfg).map_err(|e| e.to_string())?;
    let witness = res.witness.as_ref().map(coloring_field).unwrap_or_default();
    let out = match format {
        Format::Tsv => format!("status\tk\tnodes\tcoloring\n{}\t{}\t{}\t{witness}\n", res.status.as_str(), cfg.palette, res.nodes_expanded),
        Format::Text => {
            let mut s = format!("k = {}: {}\nnodes expanded: {}\n", cfg.palette, res.status.as_str(), res.nodes_expanded);
            if let Some(w) = &res.witness {
                s.push_str(&w.to_file_string());
            }
            s
        }
    };
    Ok(Output::with_code(out, res.status == SolveStatus::Colorable))
}

fn chromatic_report(g: &Graph, cfg: &SearchConfig, format: Format) -> Result<Output, String> {
    match odd_chromatic_number(g, cfg) {
        Ok((k, w)) => Ok(Output::ok(match format {
            Format::Tsv => format!("chi_o\tcoloring\n{k}\t{}\n", coloring_field(&w)),
            Format::Text => format!("χ_o = {k}\n{}", w.to_file_string()),
        })),
        Err(e @ oddcolor::solver::SolveError::Timeout { .. }) => Ok(Output::with_code(
            match format {
                Format::Tsv => format!("chi_o\tcoloring\ntimeout\t{e}\n"),
                Format::Text => format!("{e}\n"),
            },
            false,
        )),
        Err(e) => Err(e.to_string()),
    }
}
