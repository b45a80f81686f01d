//! `tm`: parse, check, simulate, analyze and render thinging-machine models.
//!
//! Exit codes: 0 success, 1 parse/validation/usage/I-O failure, 2 runtime
//! failure (simulation, evaluation, unavailable view), 3 a causal check that
//! did not come out Causal.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tm_core::causal::{Analysis, CausalGraph, Judgement};
use tm_core::document::Document;
use tm_core::model::Severity;
use tm_core::{
    abstract_to_causal_graph, assignment_from_trace, build_chronology, emit, evaluate_equations, judge_causal, parse,
    simulate, to_dot, trace_to_json, validate_static, Assignment, CausalVerdict, SimConfig, View,
};

#[derive(Parser)]
#[command(name = "tm", version, about = "Thinging-machine models: validate, simulate, abstract, judge, render")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a model; diagnostics go to standard error
    Validate(Input),
    /// Expand simplified notation and print the full model
    Expand {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Run the simulator and print the trace as JSON
    Simulate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: Run,
        #[command(flatten)]
        out: Output,
    },
    /// Print the event chronology
    Chronology {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
    /// Abstract the model into a causal graph
    Abstract {
        #[command(flatten)]
        input: Input,
        /// Output format; without it, a plain listing of edges and equations
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate the structural equations
    Eval {
        #[command(flatten)]
        input: Input,
        /// Exogenous value, NAME=VALUE (repeatable)
        #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_set)]
        sets: Vec<(String, i64)>,
        #[command(flatten)]
        out: Output,
    },
    /// Judge whether one event caused another in a simulated run
    CausalCheck {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        cause: String,
        #[arg(long)]
        effect: String,
        #[command(flatten)]
        run: Run,
        #[command(flatten)]
        out: Output,
    },
    /// Render a view as DOT
    Export {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = ViewArg::Static)]
        view: ViewArg,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Input {
    /// Path to a .tm file
    file: PathBuf,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Run {
    /// Overlay a named scenario from the file
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    max_ticks: Option<u64>,
    /// Exogenous value, NAME=VALUE (repeatable)
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_set)]
    sets: Vec<(String, i64)>,
    /// Extra event realized at tick 0 (repeatable)
    #[arg(long = "initial", value_name = "EVENT")]
    initial: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Static,
    Dynamic,
    Chronology,
    Causal,
}

impl From<ViewArg> for View {
    fn from(v: ViewArg) -> Self {
        match v {
            ViewArg::Static => View::Static,
            ViewArg::Dynamic => View::Dynamic,
            ViewArg::Chronology => View::Chronology,
            ViewArg::Causal => View::Causal,
        }
    }
}

fn parse_set(s: &str) -> Result<(String, i64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value = match value.trim() {
        "true" => 1,
        "false" => 0,
        v => v.parse().map_err(|_| format!("`{v}` is not an integer"))?,
    };
    Ok((name.trim().to_string(), value))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: 1, message: message.to_string() }
}

fn runtime(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(input: &Input) -> Result<Document, Failure> {
    let text = fs::read_to_string(&input.file).map_err(|e| usage(format!("{}: {e}", input.file.display())))?;
    parse(&text).map_err(|e| usage(format!("{}:{e}", input.file.display())))
}

fn write_out(out: &Output, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| usage(format!("standard output: {e}")))
        }
    }
}

fn config(doc: &Document, run: &Run) -> Result<SimConfig, Failure> {
    let mut cfg = doc.sim_config(run.scenario.as_deref()).map_err(usage)?;
    if let Some(m) = run.max_ticks {
        cfg.max_ticks = m;
    }
    cfg.exogenous.extend(run.sets.iter().cloned());
    cfg.initial.extend(run.initial.iter().cloned());
    doc.check_config(&cfg).map_err(usage)?;
    Ok(cfg)
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate(input) => {
            let doc = load(&input)?;
            let diagnostics = validate_static(&doc.model);
            for d in &diagnostics {
                eprintln!("{}: {d}", input.file.display());
            }
            let errors = diagnostics.iter().any(|d| d.severity == Severity::Error);
            Ok(if errors { 1 } else { 0 })
        }
        Command::Expand { input, out } => {
            let doc = load(&input)?;
            let full = doc.expand().map_err(runtime)?;
            write_out(&out, &emit(&full))?;
            Ok(0)
        }
        Command::Simulate { input, run, out } => {
            let doc = load(&input)?;
            let cfg = config(&doc, &run)?;
            let mut trace = simulate(&doc, &cfg).map_err(runtime)?;
            if !doc.variables.is_empty() {
                let assignment = assignment_from_trace(&doc, &trace).map_err(runtime)?;
                trace.analysis = Some(Analysis { assignment: Some(assignment), verdicts: Vec::new() });
            }
            write_out(&out, &(trace_to_json(&trace) + "\n"))?;
            Ok(0)
        }
        Command::Chronology { input, format, out } => {
            let doc = load(&input)?;
            let text = match format {
                Format::Dot => to_dot(&doc, View::Chronology).map_err(runtime)?,
                Format::Json => {
                    let c = build_chronology(&doc).map_err(runtime)?;
                    serde_json::to_string_pretty(&c).expect("chronology serializes") + "\n"
                }
            };
            write_out(&out, &text)?;
            Ok(0)
        }
        Command::Abstract { input, format, out } => {
            let doc = load(&input)?;
            let text = match format {
                Some(Format::Dot) => to_dot(&doc, View::Causal).map_err(runtime)?,
                Some(Format::Json) => {
                    let g = abstract_to_causal_graph(&doc).map_err(runtime)?;
                    serde_json::to_string_pretty(&g).expect("graph serializes") + "\n"
                }
                None => listing(&abstract_to_causal_graph(&doc).map_err(runtime)?),
            };
            write_out(&out, &text)?;
            Ok(0)
        }
        Command::Eval { input, sets, out } => {
            let doc = load(&input)?;
            let graph = CausalGraph::from_equations(doc.variables.clone(), doc.equations.clone());
            let exogenous: Assignment = sets.into_iter().collect();
            let values = evaluate_equations(&graph, &exogenous).map_err(runtime)?;
            let text: String =
                doc.variables.iter().filter_map(|v| values.get(&v.name).map(|x| format!("{}={x}\n", v.name))).collect();
            write_out(&out, &text)?;
            Ok(0)
        }
        Command::CausalCheck { input, cause, effect, run, out } => {
            let doc = load(&input)?;
            let cfg = config(&doc, &run)?;
            let trace = simulate(&doc, &cfg).map_err(runtime)?;
            let verdict = judge_causal(&doc, &trace, &cause, &effect).map_err(runtime)?;
            write_out(&out, &verdict_text(&Judgement { cause, effect, verdict: verdict.clone() }))?;
            Ok(if verdict.is_causal() { 0 } else { 3 })
        }
        Command::Export { input, view, out } => {
            let doc = load(&input)?;
            write_out(&out, &to_dot(&doc, view.into()).map_err(runtime)?)?;
            Ok(0)
        }
    }
}

fn listing(g: &CausalGraph) -> String {
    let mut s = String::new();
    for v in &g.variables {
        let domain = match v.domain {
            tm_core::Domain::Bool => "bool".to_string(),
            tm_core::Domain::Int { lo, hi } => format!("int {lo}..{hi}"),
        };
        s += &format!("variable {} {domain}\n", v.name);
    }
    for (a, b) in &g.edges {
        s += &format!("edge {a} -> {b}\n");
    }
    for e in &g.equations {
        s += &format!("{} = {}\n", e.target, e.body);
    }
    s
}

fn verdict_text(j: &Judgement) -> String {
    let mut s = format!("{}\n", j.verdict.name());
    match &j.verdict {
        CausalVerdict::Causal { witness } => {
            for h in witness {
                s += &format!("  {} {} -> {} at tick {}\n", h.arc, h.source, h.target, h.at);
            }
        }
        CausalVerdict::ChronologicalOnly { failed_guard: Some(g) } => s += &format!("  failed guard {g}\n"),
        _ => {}
    }
    s
}
