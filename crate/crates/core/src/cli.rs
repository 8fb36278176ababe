//! The `wbgame` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    class_distribution, find_threshold, lever_report, linspace, simulate, sweep, thread_pool_from_env, AnalysisError,
    LeverOutcome, OutcomeClass, GENERATOR,
};
use crate::game::{count_nodes, validate_tree};
use crate::model::{build_game, prune_zero, Param};
use crate::oracle::cross_check;
use crate::render::{export_dot, render_result, Format, Meta};
use crate::scenario::{parse_scenario, ScenarioFile};
use crate::solver::solve;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "wbgame", version, about = "Solve and analyse the sequential whistleblowing game")]
struct Cli {
    /// Omit the metadata block (tool version, effective parameters, seed).
    #[arg(long, global = true)]
    no_meta: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArg {
    /// Scenario file (`key = value` lines).
    #[arg(long, value_name = "F")]
    scenario: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve by backward induction and print the equilibrium.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Output format.
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Write to this file instead of standard output.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Solve once per point of an evenly spaced grid over one parameter (CSV).
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Parameter name: w x y z a-g B-I.
        #[arg(long, value_name = "NAME")]
        param: Param,
        /// First grid value.
        #[arg(long, value_name = "R", allow_hyphen_values = true)]
        from: f64,
        /// Last grid value.
        #[arg(long, value_name = "R", allow_hyphen_values = true)]
        to: f64,
        /// Number of grid points (at least 1).
        #[arg(long, value_name = "N")]
        steps: usize,
        /// Write to this file instead of standard output.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Locate the parameter value where the equilibrium outcome changes.
    Threshold {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Parameter name: w x y z a-g B-I.
        #[arg(long, value_name = "NAME")]
        param: Param,
        /// Lower end of the bracket.
        #[arg(long, value_name = "R", allow_hyphen_values = true)]
        lo: f64,
        /// Upper end of the bracket.
        #[arg(long, value_name = "R", allow_hyphen_values = true)]
        hi: f64,
        /// Final bracket width.
        #[arg(long, value_name = "R", default_value_t = 1e-6)]
        tol: f64,
    },
    /// Smallest change of each intervention lever that makes Alice leak.
    Levers {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Final bracket width for each lever.
        #[arg(long, value_name = "R", default_value_t = 1e-6)]
        tol: f64,
    },
    /// Monte Carlo playouts of the equilibrium profile.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Number of playouts.
        #[arg(long, value_name = "N")]
        n: u64,
        /// Generator seed.
        #[arg(long, value_name = "S")]
        seed: u64,
    },
    /// Check the tree and compare the solver with brute-force enumeration.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArg,
    },
    /// Graphviz DOT export of the game tree.
    ExportTree {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Drop zero-probability branches first.
        #[arg(long)]
        pruned: bool,
        /// Highlight the equilibrium choices.
        #[arg(long)]
        with_solution: bool,
    },
}

/// A failed command: exit code plus message for standard error.
struct Failure(i32, String);

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Params(_) => Failure(EXIT_INVALID, e.to_string()),
            _ => Failure(EXIT_ANALYSIS, e.to_string()),
        }
    }
}

fn invalid(e: impl ToString) -> Failure {
    Failure(EXIT_INVALID, e.to_string())
}

fn load(path: &Path) -> Result<ScenarioFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn meta(no_meta: bool, s: &ScenarioFile, extra: &[(&str, String)]) -> Option<Meta> {
    if no_meta {
        return None;
    }
    let mut m = Meta::for_scenario(s);
    for (k, v) in extra {
        m.push(*k, v);
    }
    Some(m)
}

fn emit(out: &mut Vec<u8>, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure(1, e.to_string())),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_INVALID
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let pool = thread_pool_from_env();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let status = pool.install(|| execute(&cli, &mut out, &mut err));
    let _ = stdout.write_all(&out);
    let _ = stderr.write_all(&err);
    match status {
        Ok(()) => EXIT_OK,
        Err(Failure(code, message)) => {
            let _ = writeln!(stderr, "error: {message}");
            code
        }
    }
}

fn execute(cli: &Cli, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<(), Failure> {
    match &cli.command {
        Command::Solve { scenario, format, out: path } => {
            let s = load(&scenario.scenario)?;
            for w in s.parameters.warnings() {
                let _ = writeln!(err, "warning: {w}");
            }
            let tree = build_game(&s.parameters).map_err(invalid)?;
            let r = solve(&tree, &s.risk, &s.ties).map_err(|e| Failure(EXIT_ANALYSIS, e.to_string()))?;
            let text = render_result(&tree, &r, (*format).into(), meta(cli.no_meta, &s, &[]).as_ref());
            emit(out, path.as_deref(), &text)
        }
        Command::Sweep { scenario, param, from, to, steps, out: path } => {
            let s = load(&scenario.scenario)?;
            let table = sweep(&s.setup(), *param, &linspace(*from, *to, *steps))?;
            let extra = [("sweep", format!("{param} from {from} to {to}, {steps} steps"))];
            let mut text = meta(cli.no_meta, &s, &extra).map(|m| m.comment_lines()).unwrap_or_default();
            text.push_str(param.name());
            text.push_str(",valid,alice_leaks,alice,tom");
            for c in OutcomeClass::ALL {
                let _ = write!(text, ",{c}");
            }
            text.push('\n');
            for row in &table.rows {
                let _ = write!(text, "{},{}", row.value, row.error.is_none());
                match (row.alice_leaks, row.root_value) {
                    (Some(leaks), Some(v)) => {
                        let _ = write!(text, ",{leaks},{},{}", v.alice, v.tom);
                    }
                    _ => text.push_str(",,,"),
                }
                for c in OutcomeClass::ALL {
                    match row.error {
                        None => {
                            let _ = write!(text, ",{}", row.classes.get(&c).copied().unwrap_or(0.0));
                        }
                        Some(_) => text.push(','),
                    }
                }
                text.push('\n');
                if let Some(e) = &row.error {
                    let _ = writeln!(err, "warning: {param} = {}: {e}", row.value);
                }
            }
            emit(out, path.as_deref(), &text)
        }
        Command::Threshold { scenario, param, lo, hi, tol } => {
            let s = load(&scenario.scenario)?;
            let r = find_threshold(&s.setup(), *param, *lo, *hi, *tol)?;
            let mut text = meta(cli.no_meta, &s, &[]).map(|m| m.comment_lines()).unwrap_or_default();
            let _ = writeln!(text, "parameter: {}", r.param);
            let _ = writeln!(text, "bracket: [{}, {}]", r.lo, r.hi);
            let _ = writeln!(text, "critical: {} +/- {}", r.critical, r.half_width);
            let _ = writeln!(text, "below: {}", r.below);
            let _ = writeln!(text, "above: {}", r.above);
            let _ = writeln!(text, "monotone: {}", r.monotone);
            if !r.monotone {
                let _ = writeln!(err, "warning: several outcome changes in [{lo}, {hi}]; reporting the first");
            }
            emit(out, None, &text)
        }
        Command::Levers { scenario, tol } => {
            let s = load(&scenario.scenario)?;
            let report = lever_report(&s.setup(), *tol)?;
            let mut text = meta(cli.no_meta, &s, &[]).map(|m| m.comment_lines()).unwrap_or_default();
            for row in &report.rows {
                let _ = writeln!(text, "{} ({}): {} = {}, searched to {}", row.lever, row.lever.describe(), row.param, row.base, row.limit);
                match &row.outcome {
                    LeverOutcome::Flip { critical, half_width, change, outcome } => {
                        let _ = writeln!(text, "  flip at {} = {critical} +/- {half_width} (change {change}), outcome {outcome}", row.param);
                    }
                    LeverOutcome::NoFlip => text.push_str("  no flip in range\n"),
                }
            }
            emit(out, None, &text)
        }
        Command::Simulate { scenario, n, seed } => {
            let s = load(&scenario.scenario)?;
            let tree = build_game(&s.parameters).map_err(invalid)?;
            let r = solve(&tree, &s.risk, &s.ties).map_err(|e| Failure(EXIT_ANALYSIS, e.to_string()))?;
            let report = simulate(&tree, &r.profile, *n, *seed)?;
            let extra = [("n", n.to_string()), ("seed", seed.to_string()), ("generator", GENERATOR.to_string())];
            let mut text = meta(cli.no_meta, &s, &extra).map(|m| m.comment_lines()).unwrap_or_default();
            let expected = class_distribution(&r);
            text.push_str("class,count,frequency,std_error,expected\n");
            for (label, f) in &report.classes {
                let p = OutcomeClass::from_slug(label).and_then(|c| expected.get(&c)).copied().unwrap_or(0.0);
                let _ = writeln!(text, "{label},{},{},{},{p}", f.count, f.frequency, f.std_error);
            }
            text.push_str("player,mean,std_error,solved\n");
            let _ = writeln!(text, "alice,{},{},{}", report.alice.mean, report.alice.std_error, r.root_value.alice);
            let _ = writeln!(text, "tom,{},{},{}", report.tom.mean, report.tom.std_error, r.root_value.tom);
            emit(out, None, &text)
        }
        Command::Validate { scenario } => {
            let s = load(&scenario.scenario)?;
            let tree = build_game(&s.parameters).map_err(invalid)?;
            let report = validate_tree(&tree);
            if !report.is_valid() {
                return Err(invalid(report));
            }
            let counts = count_nodes(&tree);
            let check = cross_check(&tree, &s.risk, &s.ties).map_err(|e| Failure(EXIT_ANALYSIS, e.to_string()))?;
            let mut text = meta(cli.no_meta, &s, &[]).map(|m| m.comment_lines()).unwrap_or_default();
            let _ = writeln!(
                text,
                "tree: {} decision, {} chance, {} terminal nodes; no violations",
                counts.decision, counts.chance, counts.terminal
            );
            let _ = writeln!(text, "profiles enumerated: {}", check.profiles_checked);
            let _ = writeln!(text, "subgame-perfect profiles: {}", check.oracle_profiles);
            let _ = writeln!(text, "max root value gap: {}", check.max_value_gap);
            if !check.agrees() {
                let _ = out.write_all(text.as_bytes());
                return Err(Failure(EXIT_DISAGREE, "oracle disagrees with the solver".into()));
            }
            text.push_str("oracle agrees\n");
            emit(out, None, &text)
        }
        Command::ExportTree { scenario, pruned, with_solution } => {
            let s = load(&scenario.scenario)?;
            let mut tree = build_game(&s.parameters).map_err(invalid)?;
            if *pruned {
                tree = prune_zero(&tree);
            }
            let solution = match with_solution {
                true => Some(solve(&tree, &s.risk, &s.ties).map_err(|e| Failure(EXIT_ANALYSIS, e.to_string()))?),
                false => None,
            };
            let mut text = meta(cli.no_meta, &s, &[])
                .map(|m| m.0.iter().map(|(k, v)| format!("// {k}: {v}\n")).collect::<String>())
                .unwrap_or_default();
            text.push_str(&export_dot(&tree, solution.as_ref()));
            emit(out, None, &text)
        }
    }
}
