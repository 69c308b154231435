//! `convexsem`: evaluate phrases over conceptual spaces from the command line.
//!
//! Exit codes: 0 success, 1 ungrammatical phrase or empty meaning, 2 usage,
//! input or validation error.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use convexsem::dsl::load_lexicon;
use convexsem::error::Error;
use convexsem::pregroup::{parse_type_string, reduce, TypeString};
use convexsem::semantics::{demo_lexicon, entails, evaluate_parses, tokenize, Lexicon, Meaning};
use serde_json::{json, Value};

use report::{audit_human, audit_json, diagram_json, set_json, state_human, state_json};

#[derive(Parser)]
#[command(name = "convexsem", version, about = "Compositional meanings over convex relations")]
struct Cli {
    /// Lexicon file, or `demo` for the built-in food-and-drink lexicon.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Target type (default `s`; `entail` tries `n` then `s`).
    #[arg(long, global = true)]
    target: Option<String>,
    /// Evaluate every reduction instead of the first.
    #[arg(long, global = true)]
    all_parses: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a type string, e.g. "n n.r s n.l n".
    Parse { types: String },
    /// Meaning of a phrase: [LEXICON] PHRASE
    Meaning {
        #[arg(num_args = 1..=2, required = true, value_name = "ARGS")]
        args: Vec<String>,
    },
    /// Whether phrase A entails phrase B: [LEXICON] A B
    Entail {
        #[arg(num_args = 2..=3, required = true, value_name = "ARGS")]
        args: Vec<String>,
    },
    /// Show a word, property, domain or space: [LEXICON] NAME
    Show {
        #[arg(num_args = 1..=2, required = true, value_name = "ARGS")]
        args: Vec<String>,
    },
    /// Load a lexicon and audit every meaning for convexity: [LEXICON]
    Check {
        #[arg(num_args = 0..=1, value_name = "LEXICON")]
        args: Vec<String>,
    },
}

struct Outcome {
    code: u8,
    human: String,
    machine: Value,
}

enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = run(&cli);
    let elapsed = started.elapsed().as_micros() as u64;
    match result {
        Ok(mut out) => {
            match cli.format {
                Format::Human => println!("{}", out.human),
                Format::Machine => {
                    out.machine["elapsed_micros"] = json!(elapsed);
                    println!("{}", out.machine);
                }
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            let message = match &f {
                Failure::Usage(m) => m.clone(),
                Failure::Engine(e) => e.to_string(),
            };
            match cli.format {
                Format::Human => eprintln!("error: {message}"),
                Format::Machine => println!("{}", json!({"status": "error", "error": message, "elapsed_micros": elapsed})),
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Parse { types } => parse_cmd(cli, types),
        Command::Meaning { args } => {
            let (lex, rest) = lexicon_and(cli, args, 1)?;
            meaning_cmd(cli, &lex, &rest[0])
        }
        Command::Entail { args } => {
            let (lex, rest) = lexicon_and(cli, args, 2)?;
            entail_cmd(cli, &lex, &rest[0], &rest[1])
        }
        Command::Show { args } => {
            let (lex, rest) = lexicon_and(cli, args, 1)?;
            show_cmd(&lex, &rest[0])
        }
        Command::Check { args } => {
            let (lex, _) = lexicon_and(cli, args, 0)?;
            check_cmd(&lex)
        }
    }
}

/// Splits an optional leading lexicon path off `args`, leaving `want`.
fn lexicon_and(cli: &Cli, args: &[String], want: usize) -> Result<(Lexicon, Vec<String>), Failure> {
    let (path, rest) = match args.len() - want {
        0 => (cli.lexicon.clone(), args.to_vec()),
        1 if cli.lexicon.is_none() => (Some(PathBuf::from(&args[0])), args[1..].to_vec()),
        _ => return Err(Failure::Usage("lexicon given both as --lexicon and as an argument".into())),
    };
    let lex = match path {
        None => demo_lexicon(),
        Some(p) if p.as_os_str() == "demo" => demo_lexicon(),
        Some(p) => load_lexicon(&p)?,
    };
    Ok((lex, rest))
}

fn target(cli: &Cli, default: &str) -> Result<TypeString, Failure> {
    Ok(parse_type_string(cli.target.as_deref().unwrap_or(default))?)
}

fn parse_cmd(cli: &Cli, types: &str) -> Result<Outcome, Failure> {
    let ts = parse_type_string(types)?;
    let target = target(cli, "s")?;
    let diagrams = reduce(&ts, &target);
    let grammatical = !diagrams.is_empty();
    let mut human = if grammatical {
        format!("grammatical: {} reduces to {} ({} reduction(s))", ts, target, diagrams.len())
    } else {
        format!("ungrammatical: {ts} does not reduce to {target}")
    };
    for d in &diagrams {
        human.push_str(&format!("\n  {d}"));
    }
    let machine = json!({
        "command": "parse",
        "status": if grammatical { "ok" } else { "ungrammatical" },
        "types": ts.to_string(),
        "target": target.to_string(),
        "diagrams": diagrams.iter().map(diagram_json).collect::<Vec<_>>(),
    });
    Ok(Outcome { code: if grammatical { 0 } else { 1 }, human, machine })
}

fn ungrammatical(command: &str, phrase: &str, target: &str) -> Outcome {
    Outcome {
        code: 1,
        human: format!("ungrammatical: \"{phrase}\" does not reduce to {target}"),
        machine: json!({"command": command, "status": "ungrammatical", "phrase": phrase, "target": target}),
    }
}

fn meaning_cmd(cli: &Cli, lex: &Lexicon, phrase: &str) -> Result<Outcome, Failure> {
    let target = target(cli, "s")?;
    let words = tokenize(phrase);
    let refs: Vec<&str> = words.iter().map(String::as_str).collect();
    let eval = match evaluate_parses(lex, &refs, &target, cli.all_parses) {
        Ok(e) => e,
        Err(Error::NoReduction { .. }) => return Ok(ungrammatical("meaning", phrase, &target.to_string())),
        Err(e) => return Err(e.into()),
    };
    let meaning = eval.meaning();
    let audit = meaning.convexity_audit()?;
    let empty = meaning.is_empty();
    let mut human = format!(
        "phrase:  {phrase}\ntypes:   {}\ntarget:  {}\nparse:   {}\nmeaning: {}",
        eval.types,
        eval.target,
        eval.diagram(),
        if empty { "empty concept".to_string() } else { state_human(meaning) }
    );
    if !empty {
        human.push_str(&format!("\naudit:   {}", audit_human(&audit)));
    }
    let mut machine = json!({
        "command": "meaning",
        "status": if empty { "empty" } else { "ok" },
        "phrase": phrase,
        "types": eval.types.to_string(),
        "target": eval.target.to_string(),
        "diagram": diagram_json(eval.diagram()),
        "state": state_json(meaning),
        "audit": audit_json(&audit),
    });
    if cli.all_parses {
        let agree = eval.parses_agree()?;
        human.push_str(&format!("\nparses:  {} ({})", eval.parses.len(), if agree { "all agree" } else { "they differ" }));
        for p in &eval.parses[1..] {
            human.push_str(&format!("\n  {}: {}", p.diagram, state_human(&p.meaning)));
        }
        machine["parses"] = json!(eval
            .parses
            .iter()
            .map(|p| json!({"diagram": diagram_json(&p.diagram), "state": state_json(&p.meaning)}))
            .collect::<Vec<_>>());
        machine["parses_agree"] = json!(agree);
    }
    Ok(Outcome { code: if empty { 1 } else { 0 }, human, machine })
}

fn entail_cmd(cli: &Cli, lex: &Lexicon, a: &str, b: &str) -> Result<Outcome, Failure> {
    let candidates: Vec<String> = match &cli.target {
        Some(t) => vec![t.clone()],
        None => vec!["n".into(), "s".into()],
    };
    let eval = |phrase: &str, t: &TypeString| {
        let words = tokenize(phrase);
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        evaluate_parses(lex, &refs, t, false).map(|mut e| e.parses.swap_remove(0).meaning)
    };
    for t in &candidates {
        let ts = parse_type_string(t)?;
        let (ma, mb) = match (eval(a, &ts), eval(b, &ts)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(Error::NoReduction { .. }), _) | (_, Err(Error::NoReduction { .. })) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        };
        let verdict = entails(&ma, &mb)?;
        return Ok(Outcome {
            code: 0,
            human: verdict.to_string(),
            machine: json!({
                "command": "entail",
                "status": "ok",
                "a": a,
                "b": b,
                "target": t,
                "entails": verdict,
                "a_state": state_json(&ma),
                "b_state": state_json(&mb),
            }),
        });
    }
    Ok(ungrammatical("entail", &format!("{a}\" / \"{b}"), &candidates.join(" or ")))
}

fn show_cmd(lex: &Lexicon, name: &str) -> Result<Outcome, Failure> {
    if let Ok(entry) = lex.lookup(name) {
        let meaning = match &entry.meaning {
            Meaning::State(r) => json!({"kind": "state", "state": state_json(r)}),
            Meaning::Diagonal(r) => json!({"kind": "diagonal", "region": state_json(r)}),
            Meaning::Map(r) => json!({"kind": "relation", "source_factors": r.source().len(), "cells": state_json(r)["cells"]}),
            Meaning::SubjectRelative => json!({"kind": "subject-relative-pronoun"}),
        };
        let human = match &entry.meaning {
            Meaning::State(r) if r.cells().len() > 1 => format!("{} : {} =\n{}", entry.word, entry.ty, state_human(r)),
            _ => entry.to_string(),
        };
        return Ok(Outcome {
            code: 0,
            human,
            machine: json!({"command": "show", "status": "ok", "what": "word", "word": entry.word, "type": entry.ty.to_string(), "meaning": meaning}),
        });
    }
    if let Some(p) = lex.property(name) {
        return Ok(Outcome {
            code: 0,
            human: format!("property {name} on {}: {}", p.domain().name(), p.describe()),
            machine: json!({"command": "show", "status": "ok", "what": "property", "name": name, "set": set_json(p)}),
        });
    }
    if let Some(d) = lex.domain(name) {
        let human = match d.elements() {
            Some(els) => format!("domain {name}: lattice of {} elements {{{}}}", els.len(), els.join(", ")),
            None => {
                let b: Vec<String> = d.bounds().unwrap_or_default().iter().map(|iv| iv.to_string()).collect();
                format!("domain {name}: continuous, {}", b.join("×"))
            }
        };
        return Ok(Outcome { code: 0, human, machine: json!({"command": "show", "status": "ok", "what": "domain", "name": name}) });
    }
    if let Some(s) = lex.spaces().get(name) {
        return Ok(Outcome {
            code: 0,
            human: format!("space {name} = {s}"),
            machine: json!({"command": "show", "status": "ok", "what": "space", "name": name, "factors": s.factors().iter().map(|d| d.name()).collect::<Vec<_>>()}),
        });
    }
    Err(Failure::Usage(format!("nothing named `{name}` in the lexicon")))
}

fn check_cmd(lex: &Lexicon) -> Result<Outcome, Failure> {
    let ti = lex.interpretation();
    let mut lines = vec![format!(
        "lexicon ok: {} domain(s), {} space(s), {} propert(ies), {} word(s)",
        lex.domains().len(),
        lex.spaces().len(),
        lex.properties().len(),
        lex.entries().len()
    )];
    let mut audits = Vec::new();
    for entry in lex.entries().values() {
        let audited = match &entry.meaning {
            Meaning::State(r) | Meaning::Diagonal(r) => r.clone(),
            Meaning::Map(r) => r.clone(),
            Meaning::SubjectRelative => {
                entry.diagram(&ti)?;
                lines.push(format!("  {}: wiring only", entry.word));
                continue;
            }
        };
        let audit = audited.convexity_audit()?;
        lines.push(format!("  {}: {}", entry.word, audit_human(&audit).replace('\n', "\n  ")));
        audits.push(json!({"word": entry.word, "audit": audit_json(&audit)}));
    }
    Ok(Outcome {
        code: 0,
        human: lines.join("\n"),
        machine: json!({"command": "check", "status": "ok", "words": lex.entries().len(), "audits": audits}),
    })
}
