//! The `revccs` command line. [`run`] takes the arguments and two output
//! streams and returns the exit status, so the binary is a thin shim and the
//! commands can be tested in-process.

mod suite;

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::encodings::{encode_address, encode_memory, encode_term, EncodeError};
use crate::equivalences::{
    check_graphs, check_structures, validate_result, BisimResult, CheckError, CheckOptions, Relation,
};
use crate::rccs::{explore_from, parse_rccs, Direction, LtsGraph, RccsError, State, Transition, DEFAULT_STATE_CAP};
use crate::structures::{StructError, Structure};
use crate::syntax::{congruence_normal, parse_ccs, parse_term, pretty_ccs, ParseError, Term};

pub use suite::{paper_suite, SuiteOutcome};

const SCRIPT_HELP: &str = "\
Transition scripts (for `step`) are `;`-separated moves:
  +a       forward on label a with the smallest fresh identifier
  +3:a     forward on label a with identifier 3
  +a#2     the second enabled move labelled a (moves are counted from 1)
  -3       undo the step with identifier 3
Labels are written `a`, `~a` (co-name) or `tau`.

Process arguments are inline text or `@path` to read a file.

Exit status: 0 success (for `check`, whatever the verdict), 1 usage error,
2 resource cap exceeded, 3 internal invariant violation.";

#[derive(Parser, Debug)]
#[command(name = "revccs", version, about = "Reversible CCS: explore, encode and compare processes", after_help = SCRIPT_HELP)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Maximum number of explored states.
    #[arg(long, env = "REVCCS_STATE_CAP", default_value_t = DEFAULT_STATE_CAP, global = true)]
    pub state_cap: usize,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Read a CCS process, a general term or an RCCS state and print its normal form.
    Parse { process: String },
    /// Explore the reversible transition system of a process or state.
    Lts { process: String },
    /// Print the configuration structure of a process.
    Encode { process: String },
    /// Print the identified structure of a reversible term's memory.
    EncodeMemory { process: String },
    /// Print the origin's structure and the configuration a reversible term addresses.
    Address { process: String },
    /// Decide a bisimulation between two processes.
    Check {
        #[arg(long, value_parser = parse_relation)]
        relation: Relation,
        /// Drop the continuity of the bijection between steps.
        #[arg(long)]
        weak: bool,
        left: String,
        right: String,
    },
    /// Run a transition script from a process or state.
    Step { process: String, script: String },
    /// Re-run the published examples and report one line per example.
    PaperSuite {
        /// Also check the correspondence properties on this many random corpus processes.
        #[arg(long, default_value_t = 0)]
        spot_checks: usize,
    },
}

fn parse_relation(s: &str) -> Result<Relation, String> {
    s.parse()
}

/// Why a command did not succeed; each variant has its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Cap(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(format!("parse error: {e}"))
    }
}

impl From<RccsError> for CliError {
    fn from(e: RccsError) -> Self {
        match e {
            RccsError::StateCap(_) => CliError::Cap(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<StructError> for CliError {
    fn from(e: StructError) -> Self {
        CliError::Invariant(e.to_string())
    }
}

impl From<EncodeError> for CliError {
    fn from(e: EncodeError) -> Self {
        match e {
            EncodeError::Rccs(e) => e.into(),
            EncodeError::Struct(e) => CliError::Usage(e.to_string()),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Rccs(e) => e.into(),
            CheckError::TooManyCandidates(_) => CliError::Cap(e.to_string()),
            CheckError::NoWeakMode(_) | CheckError::NotAProcess(_) => CliError::Usage(e.to_string()),
            CheckError::Struct(_) | CheckError::Invariant(_) => CliError::Invariant(e.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command. Results go to
/// `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                0
            } else {
                let _ = write!(err, "{text}");
                1
            };
        }
    };
    match execute(&cli) {
        Ok(Outcome { text, status }) => {
            let _ = out.write_all(text.as_bytes());
            status
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// What a successful command prints, and its exit status.
pub struct Outcome {
    pub text: String,
    pub status: i32,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, status: 0 }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let f = cli.format;
    match &cli.command {
        Command::Parse { process } => parse_cmd(&read_input(process)?, f).map(Outcome::ok),
        Command::Lts { process } => {
            let g = explore_from(&read_state(&read_input(process)?)?, cli.state_cap)?;
            Ok(Outcome::ok(match f {
                Format::Text => lts_text(&g),
                Format::Json => json_line(&g.to_json()),
                Format::Dot => g.to_dot(),
            }))
        }
        Command::Encode { process } => {
            let t = parse_term(&read_input(process)?)?;
            Ok(Outcome::ok(render_structure(&encode_term(&t), f)))
        }
        Command::EncodeMemory { process } => {
            let r = parse_rccs(&read_input(process)?)?;
            Ok(Outcome::ok(render_structure(&encode_memory(&r)?, f)))
        }
        Command::Address { process } => {
            let r = parse_rccs(&read_input(process)?)?;
            let a = encode_address(&r)?;
            let literal = a.denotation.config_literal(&a.address);
            Ok(Outcome::ok(match f {
                Format::Text => format!("address: {literal}\n{}", structure_text(&a.denotation)),
                Format::Json => json_line(&json!({"denotation": a.denotation.to_json(), "address": literal})),
                Format::Dot => a.denotation.to_dot(),
            }))
        }
        Command::Check { relation, weak, left, right } => {
            let opts = CheckOptions { weak: *weak, state_cap: cli.state_cap, ..CheckOptions::default() };
            let r = check_cmd(*relation, &read_input(left)?, &read_input(right)?, &opts)?;
            Ok(Outcome::ok(match f {
                Format::Text => r.to_text(),
                Format::Json => json_line(&r.to_json()),
                Format::Dot => return Err(CliError::Usage("check prints text or json".into())),
            }))
        }
        Command::Step { process, script } => {
            let start = read_state(&read_input(process)?)?;
            let steps = run_script(&start, &read_input(script)?)?;
            Ok(Outcome::ok(match f {
                Format::Text => step_text(&start, &steps),
                Format::Json => json_line(&step_json(&start, &steps)),
                Format::Dot => return Err(CliError::Usage("step prints text or json".into())),
            }))
        }
        Command::PaperSuite { spot_checks } => {
            let outcome = paper_suite(*spot_checks, cli.seed, cli.state_cap);
            let text = match f {
                Format::Text => outcome.to_text(),
                Format::Json => json_line(&outcome.to_json()),
                Format::Dot => return Err(CliError::Usage("paper-suite prints text or json".into())),
            };
            Ok(Outcome { text, status: if outcome.all_passed() { 0 } else { 3 } })
        }
    }
}

/// Inline text, or the contents of the file named after a leading `@`.
fn read_input(arg: &str) -> Result<String, CliError> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

/// A reversible state; plain CCS text is read as `∅ ▷ P`.
fn read_state(text: &str) -> Result<State, CliError> {
    Ok(State::from_process(&parse_rccs(text)?)?)
}

fn json_line(v: &serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json renders"))
}

fn parse_cmd(text: &str, f: Format) -> Result<String, CliError> {
    let v = if text.contains("|>") {
        let s = read_state(text)?;
        let origin = s.origin().ok().map(|p| pretty_ccs(&p));
        json!({"kind": "rccs", "normal": s.to_string(), "reachable": s.is_reachable(), "origin": origin})
    } else {
        match parse_ccs(text) {
            Ok(p) => json!({"kind": "ccs", "pretty": pretty_ccs(&p), "normal": pretty_ccs(&congruence_normal(&p))}),
            Err(ccs_err) => match parse_term(text) {
                Ok(t) => json!({"kind": "term", "pretty": t.to_string()}),
                Err(_) => return Err(ccs_err.into()),
            },
        }
    };
    Ok(match f {
        Format::Json => json_line(&v),
        Format::Text => {
            let obj = v.as_object().expect("object");
            let mut out = String::new();
            for (k, val) in obj {
                let shown = match val {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("{k}: {shown}\n"));
            }
            out
        }
        Format::Dot => return Err(CliError::Usage("parse prints text or json".into())),
    })
}

fn check_cmd(relation: Relation, left: &str, right: &str, opts: &CheckOptions) -> Result<BisimResult, CliError> {
    let (t1, t2) = (parse_term(left)?, parse_term(right)?);
    if relation.on_structures() {
        let (c1, c2) = (encode_term(&t1), encode_term(&t2));
        let r = check_structures(&c1, &c2, relation == Relation::Hhpb, opts)?;
        validate_result(&r, Some((&c1, &c2)), None).map_err(CliError::Invariant)?;
        return Ok(r);
    }
    let as_ccs = |t: &Term, k: usize| t.to_ccs().ok_or_else(|| CheckError::NotAProcess(format!("argument {k}")));
    let g1 = explore_from(&State::initial(&as_ccs(&t1, 1)?), opts.state_cap)?;
    let g2 = explore_from(&State::initial(&as_ccs(&t2, 2)?), opts.state_cap)?;
    let r = check_graphs(&g1, &g2, relation, opts)?;
    validate_result(&r, None, Some((&g1, &g2))).map_err(CliError::Invariant)?;
    Ok(r)
}

pub fn structure_text(s: &Structure) -> String {
    let mut out = String::from("events:\n");
    let mut events: Vec<String> = s
        .events()
        .iter()
        .map(|e| match &e.ident {
            Some(i) => format!("  {}  {}  ident {}\n", e.id, e.label, i),
            None => format!("  {}  {}\n", e.id, e.label),
        })
        .collect();
    events.sort();
    events.into_iter().for_each(|l| out.push_str(&l));
    let mut configs: Vec<(usize, String)> = s.configs().map(|x| (x.count_ones(..), s.config_literal(x))).collect();
    configs.sort();
    out.push_str(&format!("configurations ({}):\n", configs.len()));
    for (_, c) in configs {
        out.push_str(&format!("  {c}\n"));
    }
    out
}

fn render_structure(s: &Structure, f: Format) -> String {
    match f {
        Format::Text => structure_text(s),
        Format::Json => json_line(&s.to_json()),
        Format::Dot => s.to_dot(),
    }
}

fn lts_text(g: &LtsGraph) -> String {
    let mut out = format!("states ({}):\n", g.states.len());
    for (k, s) in g.states.iter().enumerate() {
        out.push_str(&format!("  s{k}  {s}\n"));
    }
    out.push_str(&format!("edges ({}):\n", g.edges.len()));
    for e in &g.edges {
        let arrow = match e.direction {
            Direction::Forward => "->",
            Direction::Backward => "~>",
        };
        out.push_str(&format!("  s{} {}:{} {} s{}\n", e.src, e.id, e.label, arrow, e.dst));
    }
    out
}

/// One parsed item of a transition script.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Move {
    Forward { id: Option<u32>, label: String, pick: usize },
    Backward(u32),
}

fn parse_move(item: &str) -> Result<Move, CliError> {
    let bad = || CliError::Usage(format!("bad script item `{item}`"));
    if let Some(rest) = item.strip_prefix('-') {
        return rest.trim().parse().map(Move::Backward).map_err(|_| bad());
    }
    let rest = item.strip_prefix('+').ok_or_else(bad)?.trim();
    let (rest, pick) = match rest.split_once('#') {
        Some((r, k)) => (r, k.trim().parse::<usize>().ok().filter(|&k| k > 0).ok_or_else(bad)?),
        None => (rest, 1),
    };
    let (id, label) = match rest.split_once(':') {
        Some((i, l)) => (Some(i.trim().parse().map_err(|_| bad())?), l.trim()),
        None => (None, rest.trim()),
    };
    if label.is_empty() {
        return Err(bad());
    }
    Ok(Move::Forward { id, label: label.to_string(), pick })
}

fn run_script(start: &State, script: &str) -> Result<Vec<Transition>, CliError> {
    let mut s = start.clone();
    let mut steps = Vec::new();
    for item in script.split(';').map(str::trim).filter(|i| !i.is_empty()) {
        let t = match parse_move(item)? {
            Move::Backward(id) => {
                s.undo(id).ok_or_else(|| CliError::Usage(format!("`{item}`: no step with identifier {id} can be undone")))?
            }
            Move::Forward { id, label, pick } => {
                let moves = s.forward_moves();
                let ts = s.forward_transitions();
                let k = (0..ts.len())
                    .filter(|&k| ts[k].label.to_string() == label)
                    .nth(pick - 1)
                    .ok_or_else(|| CliError::Usage(format!("`{item}`: no such enabled move")))?;
                match id {
                    Some(id) => s.fire(&moves[k], id).map_err(|e| CliError::Usage(format!("`{item}`: {e}")))?,
                    None => ts[k].clone(),
                }
            }
        };
        s = t.target.clone();
        steps.push(t);
    }
    Ok(steps)
}

fn step_sign(t: &Transition) -> &'static str {
    match t.direction {
        Direction::Forward => "+",
        Direction::Backward => "-",
    }
}

fn step_text(start: &State, steps: &[Transition]) -> String {
    let mut out = format!("   {start}\n");
    for t in steps {
        out.push_str(&format!("{}{}:{}  {}\n", step_sign(t), t.id, t.label, t.target));
    }
    out
}

fn step_json(start: &State, steps: &[Transition]) -> serde_json::Value {
    let items: Vec<serde_json::Value> = steps
        .iter()
        .map(|t| json!({"direction": t.direction, "id": t.id, "label": t.label, "state": t.target.to_string()}))
        .collect();
    let last = steps.last().map_or(start, |t| &t.target);
    json!({"initial": start.to_string(), "steps": items, "final": last.to_string()})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_items() {
        assert_eq!(parse_move("+a").unwrap(), Move::Forward { id: None, label: "a".into(), pick: 1 });
        assert_eq!(parse_move("+3:~a#2").unwrap(), Move::Forward { id: Some(3), label: "~a".into(), pick: 2 });
        assert_eq!(parse_move("-4").unwrap(), Move::Backward(4));
        for bad in ["a", "+", "+x:a", "-a", "+a#0"] {
            assert!(parse_move(bad).is_err(), "{bad}");
        }
    }
}
