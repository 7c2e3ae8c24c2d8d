//! Command-line front end: `compare`, `sweep` and `select`.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid or unreadable input,
//! 3 no feasible source assignment.

pub mod output;
pub mod scenario_io;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::model::{Scenario, RATE_LEVELS};
use crate::selection::{select_sources, AggregateRate, Method};
use crate::simkit::{sweep_rate_levels, VariedLink};
use crate::split::Scheme;

use output::{format_number, sweep_csv, sweep_structured};
use scenario_io::{load_scenario, parse_scenario, scenario_hash, DEFAULT_SCENARIO_TOML};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ds2d", version, about = "Multi-source D2D transfer analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ScenarioArg {
    /// Scenario file (TOML). Defaults to the built-in reference scenario.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare schemes at one rate level of the varied link.
    Compare {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long, value_parser = parse_schemes, default_value = "d2d,multihoming,optimal,random")]
        schemes: SchemeList,
        /// Rate level of the varied link (1..15).
        #[arg(long, value_parser = parse_level, default_value = "1")]
        level: u8,
        #[arg(long, default_value_t = 0)]
        mc_draws: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the varied link over rate levels and emit one row per
    /// (level, scheme).
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// `a..b` (inclusive) or a comma list.
        #[arg(long, value_parser = parse_levels, default_value = "1..15")]
        levels: LevelList,
        #[arg(long, value_parser = parse_schemes, default_value = "d2d,multihoming,optimal,random")]
        schemes: SchemeList,
        #[arg(long, default_value_t = 10_000)]
        mc_draws: u64,
        /// Defaults to the scenario's `economics.random_seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose sources and interfaces for the scenario.
    Select {
        #[command(flatten)]
        scenario: ScenarioArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelList(pub Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeList(pub Vec<Scheme>);

fn parse_level(s: &str) -> Result<u8, String> {
    let v: i64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a rate level (expected 1..{RATE_LEVELS})"))?;
    if (1..=i64::from(RATE_LEVELS)).contains(&v) {
        Ok(v as u8)
    } else {
        Err(format!("rate level {v} out of range 1..{RATE_LEVELS}"))
    }
}

fn parse_levels(s: &str) -> Result<LevelList, String> {
    let levels = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (parse_level(a)?, parse_level(b)?);
        if a > b {
            return Err(format!("empty level range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(parse_level)
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(LevelList(levels))
}

fn parse_schemes(s: &str) -> Result<SchemeList, String> {
    let schemes = s
        .split(',')
        .map(|x| x.trim().parse::<Scheme>())
        .collect::<Result<Vec<_>, _>>()?;
    if schemes.is_empty() {
        return Err("no schemes given".to_owned());
    }
    Ok(SchemeList(schemes))
}

/// A failed command: exit code plus the lines to print on stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub lines: Vec<String>,
}

impl Failure {
    fn new(code: i32, line: impl Into<String>) -> Self {
        Self {
            code,
            lines: vec![line.into()],
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::LevelOutOfRange(_) => EXIT_USAGE,
            Error::Infeasible(_) | Error::NoCommonInterface { .. } => EXIT_INFEASIBLE,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

fn scenario_from(arg: &ScenarioArg) -> Result<Scenario, Failure> {
    let loaded = match &arg.scenario {
        Some(path) => load_scenario(path),
        None => parse_scenario(DEFAULT_SCENARIO_TOML),
    };
    loaded.map_err(|e| {
        let mut lines = vec!["invalid scenario:".to_owned()];
        lines.extend(e.lines().into_iter().map(|l| format!("  {l}")));
        Failure {
            code: EXIT_INVALID,
            lines,
        }
    })
}

/// Where a command's output goes.
pub enum Output {
    Stdout(String),
    File(PathBuf, String),
}

pub fn cmd_compare(
    scenario: &Scenario,
    schemes: &[Scheme],
    level: u8,
    mc_draws: u64,
    seed: u64,
) -> Result<String, Failure> {
    let varied = VariedLink::first_of(scenario)?;
    let result = sweep_rate_levels(scenario, &varied, &[level], schemes, mc_draws, seed)?;
    let rate = scenario.rate_table.rate_for_level(level)?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {}  varied link {}/{} at level {level} ({} kbps)",
        scenario.id,
        varied.source,
        varied.interface,
        format_number(rate)
    );
    let _ = writeln!(
        out,
        "{:<12} {:>8} {:>12} {:>9} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>9}",
        "scheme",
        "alpha",
        "ftl_s",
        "gain",
        "energy_wh",
        "kwh/yr",
        "usd/yr",
        "co2_lb/yr",
        "i_ma",
        "life_h",
        "charge_ok"
    );
    for r in &result.rows {
        let g = &r.green;
        let life = match g.battery_life.hours() {
            Some(h) => format!("{h:.3}"),
            None => "unbounded".to_owned(),
        };
        let _ = writeln!(
            out,
            "{:<12} {:>8.4} {:>12.2} {:>9.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.1} {:>10} {:>9}",
            r.scheme.as_str(),
            r.alpha_first_link,
            r.ftl_s,
            r.gain_vs_d2d,
            g.energy_wh,
            g.annual_kwh,
            g.annual_cost_usd,
            g.annual_co2_lb,
            g.load_current_ma,
            life,
            if g.completes_on_full_charge { "yes" } else { "no" },
        );
        if let Some(mc) = &r.monte_carlo {
            let se = mc.std_err_s.map_or("n/a".to_owned(), |s| format!("{s:.2}"));
            let _ = writeln!(
                out,
                "{:<12} monte carlo: {} draws, mean ftl {:.2} s, std err {se} s",
                "", mc.draws, mc.mean_ftl_s
            );
        }
    }
    Ok(out)
}

pub fn cmd_sweep(
    scenario: &Scenario,
    levels: &[u8],
    schemes: &[Scheme],
    mc_draws: u64,
    seed: u64,
    format: Format,
) -> Result<String, Failure> {
    let varied = VariedLink::first_of(scenario)?;
    let result = sweep_rate_levels(scenario, &varied, levels, schemes, mc_draws, seed)?;
    let hash = scenario_hash(scenario);
    Ok(match format {
        Format::Csv => sweep_csv(&result, &hash),
        Format::Structured => sweep_structured(&result, &hash),
    })
}

pub fn cmd_select(scenario: &Scenario) -> Result<String, Failure> {
    let a = select_sources(scenario, &AggregateRate)?;
    let links = a.links(scenario)?;
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}  sink {}", scenario.id, scenario.sink.id);
    for l in &links {
        let _ = writeln!(
            out,
            "  {} -> interface {} at {} kbps",
            l.source,
            l.interface,
            format_number(l.rate_kbps)
        );
    }
    let _ = writeln!(
        out,
        "objective (aggregate rate, kbps): {}",
        format_number(a.objective_value)
    );
    let _ = writeln!(
        out,
        "exact optimum: {}",
        match a.method {
            Method::Exhaustive => "yes (exhaustive enumeration)",
            Method::Greedy => "not verified (greedy, instance above enumeration limit)",
        }
    );
    Ok(out)
}

fn execute(cli: Cli) -> Result<Output, Failure> {
    let (text, out) = match cli.command {
        Command::Compare {
            scenario,
            schemes,
            level,
            mc_draws,
            seed,
            out,
        } => {
            let s = scenario_from(&scenario)?;
            let seed = seed.unwrap_or(s.economics.random_seed);
            (cmd_compare(&s, &schemes.0, level, mc_draws, seed)?, out)
        }
        Command::Sweep {
            scenario,
            levels,
            schemes,
            mc_draws,
            seed,
            format,
            out,
        } => {
            let s = scenario_from(&scenario)?;
            let seed = seed.unwrap_or(s.economics.random_seed);
            (
                cmd_sweep(&s, &levels.0, &schemes.0, mc_draws, seed, format)?,
                out,
            )
        }
        Command::Select { scenario } => (cmd_select(&scenario_from(&scenario)?)?, None),
    };
    Ok(match out {
        Some(path) => Output::File(path, text),
        None => Output::Stdout(text),
    })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Nothing is written to `stdout` or an output file
/// unless the command succeeds.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli) {
        Ok(Output::Stdout(text)) => {
            let _ = stdout.write_all(text.as_bytes());
            EXIT_OK
        }
        Ok(Output::File(path, text)) => match std::fs::write(&path, text) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(stderr, "cannot write {}: {e}", path.display());
                EXIT_INVALID
            }
        },
        Err(f) => {
            for l in f.lines {
                let _ = writeln!(stderr, "{l}");
            }
            f.code
        }
    }
}
