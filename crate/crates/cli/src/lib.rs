//! The `graphview` command: batch access to the view engine.

pub mod script;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use graphview_core::oracle::run_oracles;
use graphview_core::{
    enumerate_matches, filter_labels, generate_pattern_pairs, parse_graph, GraphSummary, to_dot, write_graph, EdgeMode, Filter,
    Label, LabeledGraph, NavState, Navigator, ViewDocument,
};

#[derive(Debug, Parser)]
#[command(name = "graphview", version, about = "Weighted views over directed labeled graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModeArgs {
    /// Match pattern edges in either direction (default).
    #[arg(long, conflicts_with = "directed")]
    pub undirected: bool,
    /// Match pattern edges only in their schema direction.
    #[arg(long)]
    pub directed: bool,
}

impl ModeArgs {
    pub fn mode(&self) -> EdgeMode {
        if self.directed {
            EdgeMode::Directed
        } else {
            EdgeMode::Undirected
        }
    }
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Comma-separated filter vertex ids.
    #[arg(long, default_value = "")]
    pub filter: String,
    /// Comma-separated L_C labels.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lc: Vec<String>,
    /// Comma-separated L_B labels.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lb: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a graph file and print a summary; `--out` writes canonical text.
    Ingest {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the label schema.
    Schema {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Print the view of one state as JSON.
    View {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        mode: ModeArgs,
        /// Keep vertices with empty support.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the generated patterns and their matches.
    Matches {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Run a script of operators from a start state; print the final view
    /// and the history export.
    Walk {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a view as Graphviz DOT, from a state or a saved view JSON.
    Dot {
        #[arg(long, required_unless_present = "view")]
        graph: Option<PathBuf>,
        /// A view document previously written by `view`.
        #[arg(long, conflicts_with = "graph")]
        view: Option<PathBuf>,
        #[arg(long, default_value = "")]
        filter: String,
        #[arg(long, value_delimiter = ',')]
        lc: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        lb: Vec<String>,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare every optimized computation against brute force.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        /// Print passing checks too.
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] graphview_core::Error),
    #[error("script line {line}: {source}")]
    Step {
        line: usize,
        source: graphview_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid view document: {0}")]
    Document(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0} oracle check(s) failed")]
    OracleMismatch(usize),
}

impl CliError {
    /// 1: oracle mismatch, 2: malformed input, 3: semantic error, 4: I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::OracleMismatch(_) => 1,
            CliError::Core(e) | CliError::Step { source: e, .. } if e.is_parse() => 2,
            CliError::Document(_) | CliError::Usage(_) => 2,
            CliError::Core(_) | CliError::Step { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_graph(path: &Path) -> Result<LabeledGraph, CliError> {
    Ok(parse_graph(&read(path)?)?.0)
}

fn state_of(g: &LabeledGraph, filter: &str, lc: &[String], lb: &[String]) -> Result<NavState, CliError> {
    let ids = filter.split(',').map(str::trim).filter(|s| !s.is_empty());
    let f = Filter::new(g, ids)?;
    let labels = |v: &[String]| v.iter().map(|s| Label::from(s.trim())).collect();
    let s = NavState::new(f, labels(lc), labels(lb))?;
    s.validate(g)?;
    Ok(s)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn view_json(g: LabeledGraph, state: NavState, mode: EdgeMode, full: bool) -> Result<ViewDocument, CliError> {
    Ok(Navigator::new(Arc::new(g), state, mode)?.document(full))
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { graph, out } => {
            let (g, report) = parse_graph(&read(&graph)?)?;
            if let Some(path) = &out {
                emit(Some(path), &write_graph(&g), stdout)?;
            }
            let summary = serde_json::to_string(&GraphSummary::new(&g, report))?;
            emit(None, &format!("{summary}\n"), stdout)
        }
        Command::Schema { graph } => {
            let g = load_graph(&graph)?;
            let schema = g.schema();
            let mut text = String::from("labels:");
            for l in &schema.labels {
                let _ = write!(text, " {l}");
            }
            text.push('\n');
            for (a, b) in &schema.edges {
                let _ = writeln!(text, "{a} -> {b}");
            }
            emit(None, &text, stdout)
        }
        Command::View {
            graph,
            state,
            mode,
            full,
            out,
        } => {
            let g = load_graph(&graph)?;
            let s = state_of(&g, &state.filter, &state.lc, &state.lb)?;
            let doc = view_json(g, s, mode.mode(), full)?;
            emit(out.as_deref(), &format!("{}\n", doc.to_json()), stdout)
        }
        Command::Matches { graph, state, mode } => {
            let g = load_graph(&graph)?;
            let s = state_of(&g, &state.filter, &state.lc, &state.lb)?;
            let pairs = generate_pattern_pairs(g.schema(), &filter_labels(&g, &s.filter), &s.l_b, &s.l_c, mode.mode())?;
            let mut text = String::new();
            for pair in &pairs {
                for p in pair.patterns() {
                    let _ = writeln!(text, "{p}");
                    let mut count = 0;
                    for m in enumerate_matches(&g, p, &s.filter, mode.mode()) {
                        let row: Vec<String> = m.bindings.iter().map(|(l, v)| format!("{l}={v}")).collect();
                        let _ = writeln!(text, "  {}", row.join(" "));
                        count += 1;
                    }
                    let _ = writeln!(text, "  ({count} matches)");
                }
            }
            emit(None, &text, stdout)
        }
        Command::Walk {
            graph,
            state,
            mode,
            script,
            full,
            out,
        } => {
            let g = load_graph(&graph)?;
            let s = state_of(&g, &state.filter, &state.lc, &state.lb)?;
            let ops = script::parse_script(&read(&script)?)?;
            let mut nav = Navigator::new(Arc::new(g), s, mode.mode())?;
            for (line, op) in &ops {
                nav.apply(op).map_err(|source| CliError::Step { line: *line, source })?;
            }
            let text = format!("{}\n{}", nav.document(full).to_json(), nav.history().export());
            emit(out.as_deref(), &text, stdout)
        }
        Command::Dot {
            graph,
            view,
            filter,
            lc,
            lb,
            mode,
            full,
            out,
        } => {
            let doc: ViewDocument = match (view, graph) {
                (Some(path), _) => serde_json::from_str(&read(&path)?)?,
                (None, Some(path)) => {
                    if lc.is_empty() || lb.is_empty() {
                        return Err(CliError::Usage("--lc and --lb are required with --graph".into()));
                    }
                    let g = load_graph(&path)?;
                    let s = state_of(&g, &filter, &lc, &lb)?;
                    view_json(g, s, mode.mode(), full)?
                }
                (None, None) => return Err(CliError::Usage("either --graph or --view is required".into())),
            };
            emit(out.as_deref(), &to_dot(&doc), stdout)
        }
        Command::Oracle { graph, mode, verbose } => {
            let g = load_graph(&graph)?;
            let report = run_oracles(&g, mode.mode())?;
            let mut text = String::new();
            let mut failed = 0;
            for c in &report.checks {
                if !c.passed {
                    failed += 1;
                }
                if verbose || !c.passed {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    let _ = writeln!(text, "{tag} {}: {}", c.name, c.detail);
                }
            }
            let _ = writeln!(text, "{} checks, {failed} failed", report.checks.len());
            emit(None, &text, stdout)?;
            if failed > 0 {
                Err(CliError::OracleMismatch(failed))
            } else {
                Ok(())
            }
        }
    }
}
