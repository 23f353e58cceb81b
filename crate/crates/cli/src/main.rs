//! `pbgt`: model app GUIs as element/connector graphs, check them, search
//! bounded scopes for instances, ingest Android layouts and generate test
//! suites.
//!
//! Exit codes: 0 success (or assertion holds), 1 findings (ill-formed model,
//! counterexample, ingest findings), 2 usage/parse/config errors, 3 no
//! instance satisfies the requested property, 4 search budget exceeded.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};
use std::process::ExitCode;
use std::thread;

use clap::{ArgGroup, Args, Parser, Subcommand};

use pbgt_cli::ingest::{ingest_with, IngestOptions};
use pbgt_core::finder::{
    assert_in, enumerate_instances, enumeration_tasks, find_in, merge_outputs, Enumeration,
    FinderError, Predicate, Scope, TaskOutput, DEFAULT_BUDGET,
};
use pbgt_core::json::{catalog_to_json, model_from_json, model_to_json};
use pbgt_core::model::{ElementKind, ModelGraph};
use pbgt_core::patterns::{applicable_patterns, validate_config, PatternConfig, ALL_PATTERNS};
use pbgt_core::rules::check_wellformed;
use pbgt_core::testgen::{generate_suite, suite_to_json, GenError};

const EXIT_OK: u8 = 0;
const EXIT_FINDINGS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNSAT: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(
    name = "pbgt",
    version,
    about = "Pattern-based GUI-model tooling: check, search, ingest, generate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model for well-formedness
    Check {
        /// Model JSON file ('-' reads stdin)
        model: String,
    },
    /// Enumerate all models within a scope; find a witness or check an assertion
    Find(FindArgs),
    /// Convert an Android layout XML file into a model
    Ingest(IngestArgs),
    /// Generate a test suite from a model and pattern configurations
    Generate(GenerateArgs),
    /// Inspect the built-in pattern catalog
    Patterns {
        #[command(subcommand)]
        command: PatternsCommand,
    },
    /// Summarize a model: behaviours, findings, applicable patterns
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum PatternsCommand {
    /// Print the catalog as JSON
    List,
}

#[derive(Args)]
#[command(group(ArgGroup::new("property").required(true).args(["pred", "assertion"])))]
struct FindArgs {
    /// Property to find a witness for (e.g. wellformed, has_group, F4, LC6,
    /// has_pattern_login)
    #[arg(long)]
    pred: Option<String>,
    /// Property to verify over every instance in scope
    #[arg(long = "assert")]
    assertion: Option<String>,
    /// Most Init elements
    #[arg(long, default_value_t = 1)]
    init: usize,
    /// Most End elements
    #[arg(long, default_value_t = 1)]
    end: usize,
    /// Most Behaviour elements
    #[arg(long, default_value_t = 1)]
    behaviour: usize,
    /// Most Group elements
    #[arg(long, default_value_t = 0)]
    group: usize,
    /// Most Form elements (the Model root is not counted)
    #[arg(long, default_value_t = 0)]
    form: usize,
    /// Most connectors
    #[arg(long, default_value_t = 2)]
    connector: usize,
    /// Most edges per connector
    #[arg(long, default_value_t = 1)]
    edges_per_connector: usize,
    /// Scope JSON file; replaces the individual bound flags
    #[arg(
        long,
        conflicts_with_all = ["init", "end", "behaviour", "group", "form", "connector", "edges_per_connector"]
    )]
    scope: Option<String>,
    /// Abort after this many assembled candidates
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads for the enumeration
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Where to write the witness or counterexample ('-' = stdout)
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct IngestArgs {
    /// Layout XML file ('-' reads stdin)
    layout: String,
    /// Where to write the model JSON ('-' = stdout)
    #[arg(long, default_value = "-")]
    out: String,
    /// Keep single-child containers as Groups
    #[arg(long)]
    no_collapse: bool,
    /// Do not synthesize connectors chaining the Model's children
    #[arg(long)]
    no_connectors: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// Model JSON file ('-' reads stdin)
    model: String,
    /// Pattern configuration JSON (an object or an array; repeatable).
    /// Without any, the suite carries the traversal and no cases.
    #[arg(long)]
    config: Vec<String>,
    /// Where to write the suite JSON ('-' = stdout)
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct ReportArgs {
    /// Model JSON file ('-' reads stdin)
    model: String,
    /// Pattern configuration JSON to count as configured (repeatable)
    #[arg(long)]
    config: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { model } => cmd_check(&model),
        Command::Find(args) => cmd_find(&args),
        Command::Ingest(args) => cmd_ingest(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Patterns { command: PatternsCommand::List } => {
            print!("{}", catalog_to_json());
            Ok(EXIT_OK)
        }
        Command::Report(args) => cmd_report(&args),
    };
    ExitCode::from(code.unwrap_or_else(|c| c))
}

fn cmd_check(model: &str) -> Result<u8, u8> {
    let g = load_model(model)?;
    let diags = check_wellformed(&g);
    if diags.is_empty() {
        println!("well-formed");
        return Ok(EXIT_OK);
    }
    for d in &diags {
        eprintln!("{d}");
    }
    Ok(EXIT_FINDINGS)
}

fn cmd_find(args: &FindArgs) -> Result<u8, u8> {
    let scope = match &args.scope {
        Some(path) => {
            let text = read_input(path).map_err(|e| usage(format_args!("cannot read '{path}': {e}")))?;
            serde_json::from_str::<Scope>(&text)
                .map_err(|e| usage(format_args!("cannot parse scope '{path}': {e}")))?
        }
        None => Scope {
            init: args.init,
            end: args.end,
            behaviour: args.behaviour,
            group: args.group,
            form: args.form,
            connector: args.connector,
            edges_per_connector: args.edges_per_connector,
        },
    };
    let name = args.pred.as_deref().or(args.assertion.as_deref()).expect("required group");
    let predicate = Predicate::parse(name)
        .ok_or_else(|| usage(format_args!("unknown property '{name}'")))?;

    let enumeration = match run_enumeration(&scope, args.budget, args.jobs) {
        Ok(e) => e,
        Err(e @ FinderError::BudgetExceeded { .. }) => {
            eprintln!("{e}");
            return Ok(EXIT_BUDGET);
        }
    };

    if args.pred.is_some() {
        match find_in(&enumeration, &predicate).witness {
            Some(w) => {
                write_output(&args.out, &model_to_json(&w.graph))?;
                Ok(EXIT_OK)
            }
            None => {
                eprintln!(
                    "no instance within scope satisfies '{name}' ({} candidates explored)",
                    enumeration.explored
                );
                Ok(EXIT_UNSAT)
            }
        }
    } else {
        match assert_in(&enumeration, &predicate).counterexample {
            Some(w) => {
                eprintln!("counterexample to '{name}' found");
                write_output(&args.out, &model_to_json(&w.graph))?;
                Ok(EXIT_FINDINGS)
            }
            None => {
                println!("valid up to scope");
                Ok(EXIT_OK)
            }
        }
    }
}

/// Tasks are split round-robin over the workers; the merge is order-blind, so
/// the output is byte-identical for any job count.
fn run_enumeration(scope: &Scope, budget: u64, jobs: usize) -> Result<Enumeration, FinderError> {
    if jobs <= 1 {
        return enumerate_instances(scope, budget);
    }
    let tasks = enumeration_tasks(scope);
    let results: Vec<Result<TaskOutput, FinderError>> = thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|worker| {
                let tasks = &tasks;
                s.spawn(move || {
                    tasks
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| i % jobs == worker)
                        .map(|(_, t)| t.run(budget))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("enumeration worker"))
            .collect()
    });
    let mut outputs = Vec::with_capacity(results.len());
    for r in results {
        outputs.push(r?);
    }
    merge_outputs(outputs, budget)
}

fn cmd_ingest(args: &IngestArgs) -> Result<u8, u8> {
    let path = &args.layout;
    let xml = read_input(path).map_err(|e| usage(format_args!("cannot read '{path}': {e}")))?;
    let options = IngestOptions {
        synthesize_connectors: !args.no_connectors,
        collapse_single_child_groups: !args.no_collapse,
    };
    let outcome = match ingest_with(&xml, &options) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}: {e}", display_path(path));
            return Ok(EXIT_USAGE);
        }
    };
    // The model is written even when there are findings; it is the starting
    // point one edits to fix them.
    write_output(&args.out, &model_to_json(&outcome.graph))?;
    for d in &outcome.diagnostics {
        eprintln!("{}:{}\t{}", display_path(path), d.pos, d.diag);
    }
    Ok(if outcome.diagnostics.is_empty() { EXIT_OK } else { EXIT_FINDINGS })
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8, u8> {
    let g = load_model(&args.model)?;
    let mut configs = Vec::new();
    for path in &args.config {
        configs.extend(load_configs(path)?);
    }
    match generate_suite(&g, &configs) {
        Ok(suite) => {
            write_output(&args.out, &suite_to_json(&suite))?;
            Ok(EXIT_OK)
        }
        Err(GenError::IllFormed(diags)) => {
            for d in &diags {
                eprintln!("{d}");
            }
            eprintln!("generation refused: the model is not well-formed");
            Ok(EXIT_FINDINGS)
        }
        Err(e @ GenError::Cycle(_)) => {
            eprintln!("{e}");
            Ok(EXIT_FINDINGS)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(EXIT_USAGE)
        }
    }
}

fn cmd_report(args: &ReportArgs) -> Result<u8, u8> {
    let g = load_model(&args.model)?;
    let mut configs = Vec::new();
    for path in &args.config {
        configs.extend(load_configs(path)?);
    }
    for (i, c) in configs.iter().enumerate() {
        let diags = validate_config(c);
        if !diags.is_empty() {
            eprintln!("configuration {i} (target '{}') is invalid:", c.target);
            for d in &diags {
                eprintln!("{d}");
            }
            return Err(EXIT_USAGE);
        }
        match g.element(&c.target) {
            Some(e) if e.kind == ElementKind::Behaviour => {}
            Some(_) => return Err(usage(format_args!(
                "configuration {i}: target '{}' is not a Behaviour",
                c.target
            ))),
            None => return Err(usage(format_args!(
                "configuration {i}: target '{}' is not in the model",
                c.target
            ))),
        }
    }

    let behaviours: Vec<_> = g
        .elements()
        .filter(|e| e.kind == ElementKind::Behaviour)
        .map(|e| e.id.clone())
        .collect();
    let mut applicable: BTreeMap<&str, u64> =
        ALL_PATTERNS.iter().map(|p| (p.name(), 0)).collect();
    for b in &behaviours {
        for p in applicable_patterns(&g, b).unwrap_or_default() {
            *applicable.entry(p.name()).or_default() += 1;
        }
    }
    let mut configured: BTreeMap<&str, u64> =
        ALL_PATTERNS.iter().map(|p| (p.name(), 0)).collect();
    for c in &configs {
        *configured.entry(c.pattern.name()).or_default() += 1;
    }
    let configured_behaviours = configs
        .iter()
        .map(|c| &c.target)
        .collect::<std::collections::BTreeSet<_>>()
        .len();

    let report = serde_json::json!({
        "behaviours": behaviours.len(),
        "configured_behaviours": configured_behaviours,
        "diagnostics": check_wellformed(&g).len(),
        "applicable": applicable,
        "configured": configured,
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serialization"));
    Ok(EXIT_OK)
}

fn load_model(path: &str) -> Result<ModelGraph, u8> {
    let text = read_input(path).map_err(|e| usage(format_args!("cannot read '{path}': {e}")))?;
    model_from_json(&text).map_err(|e| usage(format_args!("cannot parse '{path}': {e}")))
}

/// A configuration file holds either one configuration object or an array.
fn load_configs(path: &str) -> Result<Vec<PatternConfig>, u8> {
    let text = read_input(path).map_err(|e| usage(format_args!("cannot read '{path}': {e}")))?;
    let parsed = if text.trim_start().starts_with('[') {
        serde_json::from_str::<Vec<PatternConfig>>(&text)
    } else {
        serde_json::from_str::<PatternConfig>(&text).map(|c| vec![c])
    };
    parsed.map_err(|e| usage(format_args!("cannot parse config '{path}': {e}")))
}

fn usage(message: std::fmt::Arguments<'_>) -> u8 {
    eprintln!("{message}");
    EXIT_USAGE
}

fn display_path(path: &str) -> &str {
    if path == "-" {
        "<stdin>"
    } else {
        path
    }
}

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path)
    }
}

fn write_output(path: &str, data: &str) -> Result<(), u8> {
    let result = if path == "-" {
        io::stdout().write_all(data.as_bytes())
    } else {
        std::fs::write(path, data)
    };
    result.map_err(|e| usage(format_args!("cannot write '{path}': {e}")))
}
