//! The `articopt` command line.
//!
//! Machine output goes to stdout. Diagnostics go to stderr, and every failure
//! prints one line starting with `error:`.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use articopt::report::{self, to_canonical_json};
use articopt::stats::{self, SummaryStats, WelchResult};
use articopt::{evaluate, ingest, AgreementStore, Constraints, CourseId, Error, ErrorClass, Plan, Selection};

use crate::payload;
use crate::service::{self, Service};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success,
    Usage,
    Validation,
    Unsolvable,
}

impl ExitCode {
    pub fn value(self) -> u8 {
        match self {
            ExitCode::Success => 0,
            ExitCode::Usage => 1,
            ExitCode::Validation => 2,
            ExitCode::Unsolvable => 3,
        }
    }
}

impl From<&Error> for ExitCode {
    fn from(err: &Error) -> Self {
        match err.class() {
            ErrorClass::Validation => ExitCode::Validation,
            ErrorClass::Unsolvable => ExitCode::Unsolvable,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "articopt", version, about = "Minimal transfer course plans across articulation agreements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and check a catalog and its agreements.
    Validate(Inputs),
    /// Compute the optimal plans for the given agreements.
    Solve {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        constraints: ConstraintArgs,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        /// Include every optimal plan in the output.
        #[arg(long)]
        all_optima: bool,
    },
    /// Render the combined articulation report.
    Report {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        constraints: ConstraintArgs,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        /// Include every optimal plan in JSON output.
        #[arg(long)]
        all_optima: bool,
        /// Warn when the canonical plan exceeds this many semester units.
        #[arg(long, default_value_t = 60.0)]
        unit_cap: f64,
    },
    /// Count optimality mistakes in a proposed plan.
    Score {
        #[command(flatten)]
        inputs: Inputs,
        /// Comma-separated course ids.
        #[arg(long)]
        plan: String,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
    },
    /// Statistics used to compare planning methods.
    Stats {
        #[command(subcommand)]
        command: StatsCommand,
    },
    /// Serve the JSON API over one college's agreements.
    Serve {
        #[arg(long)]
        port: u16,
        /// Directory holding catalog*.json and agreement documents.
        #[arg(long)]
        data: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Inputs {
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long = "agreement", required = true)]
    agreements: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct ConstraintArgs {
    /// Comma-separated course ids every plan must contain.
    #[arg(long)]
    pin: Option<String>,
    /// Comma-separated course ids no plan may contain.
    #[arg(long)]
    exclude: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Md,
    Json,
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// Welch's two-tailed t-test from summaries or a two-column CSV.
    Welch {
        #[arg(long, required_unless_present = "csv", requires_all = ["sd1", "n1", "m2", "sd2", "n2"], allow_negative_numbers = true)]
        m1: Option<f64>,
        #[arg(long)]
        sd1: Option<f64>,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        m2: Option<f64>,
        #[arg(long)]
        sd2: Option<f64>,
        #[arg(long)]
        n2: Option<usize>,
        /// CSV with a header row and one column per group (`-` for stdin).
        #[arg(long, conflicts_with_all = ["m1", "sd1", "n1", "m2", "sd2", "n2"])]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
    },
    /// Cronbach's alpha from a respondents × items CSV.
    Alpha {
        /// CSV with a header row (`-` for stdin).
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
    },
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run(argv: &[String], stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    ExitCode::Success
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    ExitCode::Usage
                }
            };
        }
    };
    match execute(cli.command, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            ExitCode::from(&err)
        }
    }
}

fn load(inputs: &Inputs) -> Result<Selection, Error> {
    let catalog = ingest::load_catalog_file(&inputs.catalog)?;
    let agreements = inputs
        .agreements
        .iter()
        .map(|p| ingest::load_agreement_file(p, &catalog))
        .collect::<Result<Vec<_>, _>>()?;
    AgreementStore::new(catalog, agreements)?.select_all()
}

/// Comma-separated, whitespace-tolerant course list.
fn parse_ids(list: &str) -> Result<BTreeSet<CourseId>, Error> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(CourseId::new)
        .collect()
}

fn constraints(args: &ConstraintArgs) -> Result<Constraints, Error> {
    let pinned = args.pin.as_deref().map(parse_ids).transpose()?.unwrap_or_default();
    let excluded = args.exclude.as_deref().map(parse_ids).transpose()?.unwrap_or_default();
    Constraints::new(pinned, excluded)
}

fn open_input<'a>(path: &Path, stdin: &'a mut dyn BufRead) -> Result<Box<dyn Read + 'a>, Error> {
    if path == Path::new("-") {
        return Ok(Box::new(stdin));
    }
    File::open(path)
        .map(|f| Box::new(f) as Box<dyn Read>)
        .map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
}

fn join_ids<'a>(ids: impl IntoIterator<Item = &'a CourseId>) -> String {
    let names: Vec<&str> = ids.into_iter().map(CourseId::as_str).collect();
    if names.is_empty() {
        "none".into()
    } else {
        names.join(", ")
    }
}

fn write_out(stdout: &mut dyn Write, text: &str) -> Result<(), Error> {
    stdout.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn execute(
    command: Command,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<ExitCode, Error> {
    match command {
        Command::Validate(inputs) => {
            let selection = load(&inputs)?;
            let requirements = selection.requirements().count();
            write_out(
                stdout,
                &format!(
                    "ok: {} — {} agreements, {} requirements, {} catalog courses\n",
                    selection.college,
                    selection.agreements.len(),
                    requirements,
                    selection.catalog.len()
                ),
            )?;
        }
        Command::Solve {
            inputs,
            constraints: c,
            format,
            all_optima,
        } => {
            let selection = load(&inputs)?;
            let (summary, _) = payload::solve_summary(&selection, &constraints(&c)?, all_optima)?;
            let text = match format {
                Format::Json => to_canonical_json(&summary),
                Format::Md => {
                    let mut text = format!(
                        "# Optimal plan\n\n- Minimal plan size: {} courses\n- Forced courses: {}\n- Canonical plan: {} ({} units)\n",
                        summary.opt_size,
                        join_ids(&summary.forced),
                        join_ids(&summary.canonical_plan.courses),
                        summary.canonical_units,
                    );
                    if let Some(plans) = &summary.all_optima {
                        text.push_str("\n## All optimal plans\n\n");
                        for (i, p) in plans.iter().enumerate() {
                            text.push_str(&format!("{}. {}\n", i + 1, join_ids(&p.courses)));
                        }
                    }
                    text
                }
            };
            write_out(stdout, &text)?;
        }
        Command::Report {
            inputs,
            constraints: c,
            format,
            all_optima,
            unit_cap,
        } => {
            let selection = load(&inputs)?;
            let cap = payload::parse_units(unit_cap)?;
            let response = payload::solve_response(&selection, &constraints(&c)?, cap, all_optima)?;
            if let Some(w) = response.unit_cap_warning {
                let _ = writeln!(
                    stderr,
                    "warning: canonical plan totals {} semester units, over the {} unit cap",
                    w.total_units, w.cap
                );
            }
            let text = match format {
                Format::Json => to_canonical_json(&response),
                Format::Md => report::render_markdown(&response.report),
            };
            write_out(stdout, &text)?;
        }
        Command::Score { inputs, plan, format } => {
            let selection = load(&inputs)?;
            let candidate = Plan::from(parse_ids(&plan)?);
            let mistakes = evaluate::score_plan(&candidate, &selection)?;
            let text = match format {
                Format::Json => to_canonical_json(&mistakes),
                Format::Md => {
                    let unfulfilled: Vec<String> = mistakes.unfulfilled.iter().map(ToString::to_string).collect();
                    format!(
                        "missing: {}\nexcess: {}\ntotal: {}\nnearest_optimum: {}\nunfulfilled: {}\n",
                        mistakes.missing,
                        mistakes.excess,
                        mistakes.total,
                        join_ids(&mistakes.nearest_optimum.courses),
                        if unfulfilled.is_empty() { "none".into() } else { unfulfilled.join("; ") },
                    )
                }
            };
            write_out(stdout, &text)?;
        }
        Command::Stats { command } => return run_stats(command, stdin, stdout),
        Command::Serve { port, data } => {
            let store = AgreementStore::load_dir(&data)?;
            let _ = writeln!(
                stderr,
                "serving {} agreements for {} on port {port}",
                store.agreements().len(),
                store.catalog().college
            );
            service::serve_blocking(port, Arc::new(Service::new(store))).map_err(|source| Error::Io {
                path: format!("port {port}"),
                source,
            })?;
        }
    }
    Ok(ExitCode::Success)
}

fn format_p(p: f64) -> String {
    if p < 0.001 {
        "p<0.001".into()
    } else {
        format!("p={p:.3}")
    }
}

fn welch_line(r: &WelchResult) -> String {
    format!("t={:.2} df={:.2} {} d={:.2}\n", r.t, r.df, format_p(r.p_two_tailed), r.d)
}

fn run_stats(command: StatsCommand, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<ExitCode, Error> {
    match command {
        StatsCommand::Welch {
            m1,
            sd1,
            n1,
            m2,
            sd2,
            n2,
            csv,
            format,
        } => {
            let result = match (csv, m1, sd1, n1, m2, sd2, n2) {
                (Some(path), ..) => {
                    let (xs, ys) = stats::read_two_groups(open_input(&path, stdin)?)?;
                    stats::welch_from_samples(&xs, &ys)?
                }
                (None, Some(m1), Some(sd1), Some(n1), Some(m2), Some(sd2), Some(n2)) => {
                    stats::welch_from_summary(SummaryStats::new(m1, sd1, n1)?, SummaryStats::new(m2, sd2, n2)?)
                }
                _ => return Err(Error::Statistics("need --csv or all of --m1 --sd1 --n1 --m2 --sd2 --n2".into())),
            };
            let text = match format {
                Format::Json => to_canonical_json(&serde_json::json!({
                    "t": finite_or_string(result.t),
                    "df": result.df,
                    "p_two_tailed": result.p_two_tailed,
                    "d": finite_or_string(result.d),
                    "degenerate": result.degenerate,
                })),
                Format::Md => welch_line(&result),
            };
            write_out(stdout, &text)?;
            if !result.t.is_finite() {
                return Err(Error::Degenerate("both groups have zero variance and different means".into()));
            }
        }
        StatsCommand::Alpha { csv, format } => {
            let matrix = stats::read_matrix(open_input(&csv, stdin)?)?;
            let alpha = stats::cronbach_alpha(&matrix)?;
            let items = matrix.first().map_or(0, Vec::len);
            let text = match format {
                Format::Json => to_canonical_json(&serde_json::json!({
                    "alpha": alpha,
                    "items": items,
                    "respondents": matrix.len(),
                })),
                Format::Md => format!("alpha={alpha:.3} items={items} respondents={}\n", matrix.len()),
            };
            write_out(stdout, &text)?;
        }
    }
    Ok(ExitCode::Success)
}

/// JSON has no infinities; they are written as strings.
fn finite_or_string(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::json!(x.to_string())
    }
}
