//! Command-line front end. The binary is a thin wrapper around [`run`],
//! which returns the exit status and the text destined for standard output
//! and standard error so that it can be tested without spawning processes.
//!
//! Exit statuses: 0 success, 1 a verification found violations, 2 domain
//! error (bad pattern, bad parameter), 3 resource cap exceeded.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{self, WeightParams};
use crate::engine::{self, CountConfig, CountTable};
use crate::error::{Error, Result};
use crate::frontier::{self, State};
use crate::perm::Pattern;
use crate::rv::{self, PatternSystem, StripWalk};

#[derive(Debug, Parser)]
#[command(name = "permfront", version, about = "Enumerate pattern-avoiding permutations by right insertion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Count avoiders of every length up to --n-max.
    Count(RunConfig),
    /// List the avoiders of length --n-max.
    Enumerate(RunConfig),
    /// Dump the frontier state of every avoider of length --n-max.
    Frontier(RunConfig),
    /// Compare legal ranks and forbidden intervals against brute force.
    Verify(RunConfig),
    /// Weighted-norm bound report and growth estimates.
    Analyze(RunConfig),
    /// Count legal histories of a growth system.
    RvCount(RunConfig),
    /// Check the growth-system axioms up to depth --n-max.
    RvCheck(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemKind {
    Pattern,
    Strip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaChoice {
    Auto,
    Fixed(f64),
}

fn parse_kappa(s: &str) -> std::result::Result<KappaChoice, String> {
    if s == "auto" {
        return Ok(KappaChoice::Auto);
    }
    s.parse::<f64>()
        .map(KappaChoice::Fixed)
        .map_err(|_| format!("expected \"auto\" or a number, got {s:?}"))
}

fn parse_positive(s: &str) -> std::result::Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_workers(s: &str) -> std::result::Result<usize, String> {
    parse_positive(s).map(|n| n as usize)
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Pattern in one-line notation, e.g. 132 or 10,2,1,...
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, default_value_t = analysis::DEFAULT_THETA)]
    pub theta: f64,
    /// A number in (0, 1), or "auto" for the largest grid value with M(kappa) <= 1.
    #[arg(long, default_value = "auto", value_parser = parse_kappa)]
    pub kappa: KappaChoice,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Maximum number of states visited.
    #[arg(long, default_value_t = engine::DEFAULT_CAP, value_parser = parse_positive)]
    pub cap: u64,
    #[arg(long, default_value_t = 1, value_parser = parse_workers)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = SystemKind::Pattern)]
    pub system: SystemKind,
    /// Strip width for --system strip.
    #[arg(long, default_value_t = 2)]
    pub width: usize,
    /// Comma-separated steps for --system strip.
    #[arg(long, default_value = "up,down,stay")]
    pub steps: String,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            status: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn failed_check(stdout: String, what: &str) -> Self {
        Outcome {
            status: 1,
            stdout,
            stderr: format!("{what}\n"),
        }
    }
}

pub fn exit_status(err: &Error) -> i32 {
    match err {
        Error::Domain(_) => 2,
        Error::LimitExceeded { .. } => 3,
        Error::Invariant(_) => 1,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli.command),
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if status == 0 {
                Outcome::ok(text)
            } else {
                Outcome {
                    status,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn run(command: &Command) -> Outcome {
    let result = match command {
        Command::Count(c) => count(c),
        Command::Enumerate(c) => enumerate(c),
        Command::Frontier(c) => frontier_dump(c),
        Command::Verify(c) => verify(c),
        Command::Analyze(c) => analyze(c),
        Command::RvCount(c) => rv_count(c),
        Command::RvCheck(c) => rv_check(c),
    };
    result.unwrap_or_else(|e| Outcome {
        status: exit_status(&e),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    })
}

fn pattern(c: &RunConfig) -> Result<Pattern> {
    c.pattern
        .as_deref()
        .ok_or_else(|| Error::domain("--pattern is required"))?
        .parse()
}

fn count_config(c: &RunConfig) -> CountConfig {
    CountConfig {
        workers: c.workers,
        cap: c.cap,
        ..CountConfig::default()
    }
}

fn render_counts(table: &CountTable, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json() + "\n",
        Format::Table => {
            let width = table.counts().last().map_or(5, |c| c.to_string().len().max(5));
            let mut out = format!("pattern {}\n{:>3}  {:>width$}\n", table.pattern(), "n", "count");
            for (n, a) in table.counts().iter().enumerate() {
                let _ = writeln!(out, "{n:>3}  {:>width$}", a.to_string());
            }
            out
        }
    }
}

fn count(c: &RunConfig) -> Result<Outcome> {
    let v = pattern(c)?;
    let table = engine::count_avoiders_with(&v, c.n_max, &count_config(c))?;
    Ok(Outcome::ok(render_counts(&table, c.format)))
}

fn enumerate(c: &RunConfig) -> Result<Outcome> {
    let v = pattern(c)?;
    let mut avoiders = Vec::new();
    for pi in engine::enumerate_avoiders(&v, c.n_max) {
        if avoiders.len() as u64 >= c.cap {
            return Err(Error::limit("avoiders listed", c.cap));
        }
        avoiders.push(pi.to_string());
    }
    let out = match c.format {
        Format::Json => {
            json!({ "pattern": v.to_string(), "n": c.n_max, "avoiders": avoiders }).to_string() + "\n"
        }
        Format::Csv => std::iter::once("perm".to_string())
            .chain(avoiders)
            .map(|line| line + "\n")
            .collect(),
        Format::Table => avoiders.into_iter().map(|line| line + "\n").collect(),
    };
    Ok(Outcome::ok(out))
}

fn frontier_dump(c: &RunConfig) -> Result<Outcome> {
    let v = pattern(c)?;
    let mut states: Vec<State> = Vec::new();
    for pi in engine::enumerate_avoiders(&v, c.n_max) {
        if states.len() as u64 >= c.cap {
            return Err(Error::limit("states dumped", c.cap));
        }
        states.push(State::new(pi, &v)?);
    }
    let mut out = String::new();
    match c.format {
        Format::Json => {
            out = serde_json::to_string(&states).expect("state serialization cannot fail") + "\n";
        }
        Format::Csv => {
            out.push_str("perm,positions,lo,hi\n");
            for x in &states {
                for e in x.frontier() {
                    let pos: Vec<String> = e.occurrence.positions().iter().map(|p| p.to_string()).collect();
                    let _ = writeln!(out, "{},{},{},{}", x.perm(), pos.join(" "), e.interval.lo, e.interval.hi);
                }
            }
        }
        Format::Table => {
            for x in &states {
                let _ = writeln!(out, "{}  m={}  legal={:?}", x.perm(), x.m(), x.legal_ranks());
                for e in x.frontier() {
                    let _ = writeln!(
                        out,
                        "    {:?} -> [{}, {}]",
                        e.occurrence.positions(),
                        e.interval.lo,
                        e.interval.hi
                    );
                }
            }
        }
    }
    Ok(Outcome::ok(out))
}

fn verify(c: &RunConfig) -> Result<Outcome> {
    let v = pattern(c)?;
    let report = frontier::soundness_sweep(&v, c.n_max);
    let out = match c.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serialization") + "\n",
        Format::Csv => format!(
            "pattern,n_max,states_checked,ranks_checked,occurrences_checked,mismatches\n{},{},{},{},{},{}\n",
            report.pattern,
            report.n_max,
            report.states_checked,
            report.ranks_checked,
            report.occurrences_checked,
            report.mismatches.len()
        ),
        Format::Table => {
            let mut out = format!(
                "pattern {}  n <= {}\nstates checked       {}\nranks checked        {}\noccurrences checked  {}\nmismatches           {}\n",
                report.pattern,
                report.n_max,
                report.states_checked,
                report.ranks_checked,
                report.occurrences_checked,
                report.mismatches.len()
            );
            for m in &report.mismatches {
                let _ = writeln!(out, "  {}: {}", m.perm, m.detail);
            }
            out
        }
    };
    if report.passed() {
        Ok(Outcome::ok(out))
    } else {
        Ok(Outcome::failed_check(out, "frontier disagrees with brute force"))
    }
}

fn resolve_kappa(choice: KappaChoice, branching: analysis::Branching) -> Result<(f64, &'static str)> {
    match choice {
        KappaChoice::Auto => Ok((branching.choose_kappa(1.0)?, "auto")),
        KappaChoice::Fixed(k) => Ok((k, "given")),
    }
}

fn analyze(c: &RunConfig) -> Result<Outcome> {
    let v = pattern(c)?;
    let (kappa, source) = resolve_kappa(c.kappa, analysis::Branching::PERMUTATIONS)?;
    let params = WeightParams::new(c.theta, kappa)?;
    let report = analysis::verify_norm_bound(&v, params, c.n_max, c.cap)?;
    let table = engine::count_avoiders_with(&v, c.n_max, &count_config(c))?;
    let growth = if c.n_max >= 1 {
        analysis::growth_estimates(&table)?
    } else {
        Vec::new()
    };
    let out = match c.format {
        Format::Json => {
            let value = json!({
                "pattern": v.to_string(),
                "kappa": kappa,
                "kappa_source": source,
                "report": report,
                "growth": growth,
            });
            serde_json::to_string_pretty(&value).expect("report serialization") + "\n"
        }
        Format::Csv => analysis::growth_csv(&growth),
        Format::Table => {
            let mut out = format!(
                "pattern {v}\ntheta {}  kappa {} ({source})\nM(kappa) {}  r0 {}  C {}\nstates checked {} up to length {}\nmax ratio {}  max tail ratio {}\nwithin bound {}  tail contracts {}\n\n",
                report.theta,
                report.kappa,
                analysis::sig12(report.m_kappa),
                analysis::sig12(report.r0),
                report.cutoff_c,
                report.states_checked,
                report.depth,
                analysis::sig12(report.max_ratio_observed),
                report.max_tail_ratio.map_or("-".into(), analysis::sig12),
                report.within_bound,
                report.tail_contracts,
            );
            out.push_str(&analysis::growth_csv(&growth));
            out
        }
    };
    if report.within_bound && report.tail_contracts {
        Ok(Outcome::ok(out))
    } else {
        Ok(Outcome::failed_check(out, "weighted ratios exceed the bound"))
    }
}

fn strip(c: &RunConfig) -> Result<StripWalk> {
    StripWalk::new(c.width, rv::parse_steps(&c.steps)?)
}

fn rv_count(c: &RunConfig) -> Result<Outcome> {
    match c.system {
        SystemKind::Pattern => {
            let v = pattern(c)?;
            let counts = rv::count_histories(&PatternSystem::new(v.clone()), c.n_max, c.cap)?;
            Ok(Outcome::ok(render_counts(&CountTable::new(v, counts), c.format)))
        }
        SystemKind::Strip => {
            let sys = strip(c)?;
            let counts = rv::count_histories(&sys, c.n_max, c.cap)?;
            let out = match c.format {
                Format::Csv | Format::Table => {
                    let mut out = String::from("n,count\n");
                    for (n, a) in counts.iter().enumerate() {
                        let _ = writeln!(out, "{n},{a}");
                    }
                    out
                }
                Format::Json => {
                    let counts: Vec<serde_json::Value> = counts
                        .iter()
                        .map(|a| serde_json::Value::Number(a.to_string().parse().expect("integer")))
                        .collect();
                    json!({ "system": "strip", "width": sys.width(), "steps": sys.steps(), "counts": counts })
                        .to_string()
                        + "\n"
                }
            };
            Ok(Outcome::ok(out))
        }
    }
}

fn rv_check(c: &RunConfig) -> Result<Outcome> {
    let report = match c.system {
        SystemKind::Pattern => rv::check_axioms(&PatternSystem::new(pattern(c)?), c.n_max, c.cap)?,
        SystemKind::Strip => rv::check_axioms(&strip(c)?, c.n_max, c.cap)?,
    };
    let out = match c.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serialization") + "\n",
        Format::Csv => format!(
            "depth,c0,c1,states_checked,dead_ends,violations\n{},{},{},{},{},{}\n",
            report.depth,
            report.branching.c0,
            report.branching.c1,
            report.states_checked,
            report.dead_ends,
            report.violations.len()
        ),
        Format::Table => {
            let mut out = format!(
                "depth {}  C0 {}  C1 {}\nstates checked {}  dead ends {}\nviolations {}\n",
                report.depth,
                report.branching.c0,
                report.branching.c1,
                report.states_checked,
                report.dead_ends,
                report.violations.len()
            );
            for v in &report.violations {
                let _ = writeln!(out, "  {:?} at {}: {}", v.axiom, v.state, v.detail);
            }
            out
        }
    };
    if report.passed() {
        Ok(Outcome::ok(out))
    } else {
        Ok(Outcome::failed_check(out, "growth-system axioms violated"))
    }
}
