//! Command-line front end. Every subcommand reads JSON inputs, calls one
//! library operation and prints its result.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::ck::{
    check_continuity, colimit_graph, induced_monoid_morphism, is_ck_morphism, GraphChain,
    GraphMorphism,
};
use crate::corpus::{random_vertex_pairs, rng};
use crate::desing::{desingularize, required_truncation};
use crate::engine::{complete, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::monoid::{MonoidElement, Presentation};
use crate::oracle::cross_check;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "graphmonoid",
    version,
    about = "Graph monoids of directed graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Critical-pair reductions allowed during completion.
    #[arg(long, global = true, env = "GRAPHMONOID_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct GraphArg {
    /// Graph JSON file.
    #[arg(long)]
    graph: String,
}

#[derive(Debug, Args)]
struct MorphismArgs {
    /// Source graph JSON file.
    #[arg(long)]
    source: String,
    /// Target graph JSON file.
    #[arg(long)]
    target: String,
    /// Morphism JSON file with `vertex_map` and `edge_map`.
    #[arg(long)]
    morphism: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a graph and list every problem found.
    Validate(GraphArg),
    /// Print the generators and defining relations of the graph monoid.
    Present(GraphArg),
    /// Normal form of an element under the completed rewrite system.
    NormalForm {
        #[command(flatten)]
        graph: GraphArg,
        /// Element JSON file.
        #[arg(long)]
        element: String,
    },
    /// Decide whether two elements are equal, with a certificate.
    Equal {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Truncated desingularization of a graph.
    Desingularize {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        level: usize,
    },
    /// Image of an element in the monoid of the desingularization.
    Phi {
        #[command(flatten)]
        graph: GraphArg,
        /// Truncation level; the smallest safe level when omitted.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        element: String,
    },
    /// Image in the monoid of the graph of an element over the desingularization.
    Psi {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        element: String,
    },
    /// Decide whether a graph morphism is a CK-morphism.
    CkCheck(MorphismArgs),
    /// The generator map induced by a CK-morphism.
    InducedMap(MorphismArgs),
    /// Colimit of a chain of CK-morphisms.
    Colimit {
        /// System JSON file with `graphs` and consecutive `morphisms`.
        #[arg(long)]
        system: String,
    },
    /// Compare the colimit of the monoids of a chain with the monoid of its colimit.
    ContinuityCheck {
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 3)]
        max_degree: u64,
    },
    /// Compare the word engine with path counts on random pairs of an acyclic graph.
    OracleCheck {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_degree: u64,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

struct Rendered {
    json: Value,
    text: String,
}

fn rendered<T: Serialize>(value: &T, text: String) -> Result<Rendered> {
    Ok(Rendered {
        json: serde_json::to_value(value)?,
        text,
    })
}

/// Reads a JSON argument: inline when it starts with `{`, otherwise a file.
fn read_input(arg: &str) -> Result<(String, String)> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(("<inline>".to_string(), arg.to_string()));
    }
    let text = std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Input {
        origin: arg.to_string(),
        message: e.to_string(),
    })?;
    Ok((arg.to_string(), text))
}

fn located<T>(origin: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Json(inner) => Error::Input {
            origin: origin.to_string(),
            message: inner.to_string(),
        },
        other => other,
    })
}

fn load_graph(arg: &str) -> Result<Graph> {
    let (origin, text) = read_input(arg)?;
    located(&origin, Graph::from_json_str(&text))
}

fn load_element(arg: &str) -> Result<MonoidElement> {
    let (origin, text) = read_input(arg)?;
    located(&origin, serde_json::from_str(&text).map_err(Error::from))
}

fn load_morphism(args: &MorphismArgs) -> Result<GraphMorphism> {
    let source = load_graph(&args.source)?;
    let target = load_graph(&args.target)?;
    let (origin, text) = read_input(&args.morphism)?;
    located(
        &origin,
        GraphMorphism::from_json_str(&source, &target, &text),
    )
}

fn load_system(arg: &str) -> Result<GraphChain> {
    let (origin, text) = read_input(arg)?;
    located(&origin, GraphChain::from_json_str(&text))
}

fn execute(command: &Command, budget: usize) -> Result<Rendered> {
    match command {
        Command::Validate(a) => {
            let (origin, text) = read_input(&a.graph)?;
            let report = match located(&origin, Graph::from_json_str(&text)) {
                Ok(g) => g.validate(),
                Err(Error::InvalidGraph(report)) => report,
                Err(e) => return Err(e),
            };
            let text = if report.is_empty() {
                "valid".to_string()
            } else {
                format!("invalid: {report}")
            };
            rendered(
                &json!({"valid": report.is_empty(), "violations": report.violations}),
                text,
            )
        }
        Command::Present(a) => {
            let p = Presentation::from_graph(&load_graph(&a.graph)?)?;
            let mut text = String::new();
            for g in p.alphabet() {
                writeln!(text, "generator {g}").expect("write to string");
            }
            for r in p.relations() {
                writeln!(text, "relation {} = {}", r.lhs, r.rhs).expect("write to string");
            }
            rendered(
                &json!({"generators": p.alphabet(), "relations": p.relations()}),
                text.trim_end().to_string(),
            )
        }
        Command::NormalForm { graph, element } => {
            let p = Presentation::from_graph(&load_graph(&graph.graph)?)?;
            let rs = complete(&p, budget)?;
            let nf = rs.normal_form(&load_element(element)?)?;
            let text = nf.to_string();
            rendered(&json!({"normal_form": nf, "rules": rs.len()}), text)
        }
        Command::Equal { graph, lhs, rhs } => {
            let p = Presentation::from_graph(&load_graph(&graph.graph)?)?;
            let rs = complete(&p, budget)?;
            let decision = rs.equal(&load_element(lhs)?, &load_element(rhs)?)?;
            let text = decision.equal.to_string();
            rendered(&decision, text)
        }
        Command::Desingularize { graph, level } => {
            let d = desingularize(&load_graph(&graph.graph)?, *level)?;
            let json = d.graph().to_json_value();
            let text = d.graph().to_json_string();
            Ok(Rendered { json, text })
        }
        Command::Phi {
            graph,
            level,
            element,
        } => {
            let g = load_graph(&graph.graph)?;
            let x = load_element(element)?.canonical_in(&g)?;
            let level = match level {
                Some(n) => *n,
                None => required_truncation(&g, &x)?,
            };
            let image = desingularize(&g, level)?.phi(&x)?;
            let text = image.to_string();
            rendered(&json!({"level": level, "image": image}), text)
        }
        Command::Psi {
            graph,
            level,
            element,
        } => {
            let d = desingularize(&load_graph(&graph.graph)?, *level)?;
            let image = d.psi(&load_element(element)?)?;
            let text = image.to_string();
            rendered(&json!({"level": level, "image": image}), text)
        }
        Command::CkCheck(args) => {
            let report = is_ck_morphism(&load_morphism(args)?)?;
            let mut text = report.is_ck.to_string();
            for v in &report.violations {
                write!(text, "\n{v}").expect("write to string");
            }
            rendered(&report, text)
        }
        Command::InducedMap(args) => {
            let map = induced_monoid_morphism(&load_morphism(args)?)?;
            let entries: Vec<Value> = map
                .iter()
                .map(|(g, image)| json!({"gen": g, "image": image}))
                .collect();
            let text = map
                .iter()
                .map(|(g, image)| format!("{g} -> {image}"))
                .collect::<Vec<_>>()
                .join("\n");
            rendered(&json!({"map": entries}), text)
        }
        Command::Colimit { system } => {
            let colimit = colimit_graph(&load_system(system)?)?;
            let injections: Vec<Value> = colimit
                .injections
                .iter()
                .map(GraphMorphism::to_json_value)
                .collect();
            let text = colimit.graph.to_json_string();
            rendered(
                &json!({"graph": colimit.graph.to_json_value(), "injections": injections}),
                text,
            )
        }
        Command::ContinuityCheck { system, max_degree } => {
            let report = check_continuity(&load_system(system)?, *max_degree, budget)?;
            let text =
                format!(
                "{}: {} levels, {} elements, {} classes, {} counterexamples, {} unhit generators",
                if report.passed() { "continuous" } else { "FAILED" },
                report.levels,
                report.elements_checked,
                report.classes,
                report.counterexamples.len(),
                report.unhit_generators.len()
            );
            rendered(&report, text)
        }
        Command::OracleCheck {
            graph,
            samples,
            seed,
            max_degree,
        } => {
            let g = load_graph(&graph.graph)?;
            let rs = complete(&Presentation::from_graph(&g)?, budget)?;
            let pairs = random_vertex_pairs(&mut rng(*seed), &g, *samples, *max_degree)?;
            let report = cross_check(&g, &rs, &pairs)?;
            let text = format!(
                "{} agreements, {} discrepancies",
                report.agreements, report.discrepancies
            );
            rendered(&report, text)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code with everything that would be printed.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), rendered)
            } else {
                (rendered, String::new())
            };
            return Outcome {
                code,
                stdout,
                stderr,
            };
        }
    };
    match execute(&cli.command, cli.budget) {
        Ok(out) => Outcome {
            code: EXIT_OK,
            stdout: match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&out.json).expect("JSON value serializes") + "\n"
                }
                Format::Text => out.text + "\n",
            },
            stderr: String::new(),
        },
        Err(e) => {
            let code = match e {
                Error::BudgetExhausted { .. } => EXIT_BUDGET,
                _ => EXIT_INVALID,
            };
            let stdout = match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({"error": e.to_string()}))
                        .expect("JSON value serializes")
                        + "\n"
                }
                Format::Text => String::new(),
            };
            Outcome {
                code,
                stdout,
                stderr: format!("error: {e}\n"),
            }
        }
    }
}
