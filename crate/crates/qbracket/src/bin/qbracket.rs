use clap::{Args, Parser, Subcommand, ValueEnum};
use qbracket::grammar::Expr;
use qbracket::quasimodular::{certify, DEFAULT_MARGIN};
use qbracket::suites::{run_suite, Settings};
use qbracket::{qbracket, QSeries};
use std::io::Read;
use std::process::ExitCode;

/// Exact q-brackets of partition functions and quasimodular certification.
#[derive(Parser)]
#[command(name = "qbracket", version, args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct Cli {
    /// Family spec such as "Q(2)", "H(4; 2)*Q(3)" or "Todot[T(1,1),T(1,1)]".
    #[arg(required = true)]
    family: Option<String>,
    #[command(flatten)]
    out: Output,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Output {
    /// Truncation order in q.
    #[arg(long, default_value_t = 10)]
    order: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership of a series in a space of quasimodular forms.
    Certify {
        /// File holding a series as JSON; stdin when omitted or "-".
        input: Option<String>,
        /// Bracket this family spec instead of reading a series.
        #[arg(long, conflicts_with = "input")]
        family: Option<String>,
        /// Weight; defaults to the family weight.
        #[arg(long)]
        weight: Option<i64>,
        /// Level; defaults to the family level, or 1.
        #[arg(long)]
        level: Option<u64>,
        #[arg(long, default_value_t = 0)]
        depth: u32,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: usize,
        /// Truncation order used when bracketing a family spec.
        #[arg(long, default_value_t = 30)]
        order: u32,
    },
    /// Run a verification suite and report each check.
    Verify {
        suite: String,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        jet_order: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Leave out runtimes so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
}

enum Failure {
    Parse(String),
    Compute(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (msg, code) = match self {
            Failure::Parse(m) => (m, 2),
            Failure::Compute(m) => (m, 3),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

fn parse(spec: &str) -> Result<Expr, Failure> {
    Expr::parse(spec).map_err(|e| Failure::Parse(format!("grammar: {e}")))
}

fn bracket_of(e: &Expr, order: u32) -> Result<QSeries, Failure> {
    let f = e.function(order).map_err(|e| Failure::Compute(format!("families: {e}")))?;
    qbracket(&f, order).map_err(|e| Failure::Compute(format!("bracket: {e}")))
}

fn read_series(input: Option<&str>) -> Result<QSeries, Failure> {
    let text = match input {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Parse(format!("stdin: {e}")))?;
            s
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{path}: {e}")))?,
    };
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("json: {e}")))?;
    QSeries::from_json(&v).map_err(|e| Failure::Parse(format!("qseries: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        None => {
            let spec = cli.family.expect("clap requires a family spec");
            let b = bracket_of(&parse(&spec)?, cli.out.order)?;
            match cli.out.format {
                Format::Json => println!("{}", b.to_json()),
                Format::Csv => print!("{}", b.to_csv()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Some(Command::Certify { input, family, weight, level, depth, margin, order }) => {
            let (series, fam_weight, fam_level) = match family {
                Some(spec) => {
                    let e = parse(&spec)?;
                    (bracket_of(&e, order)?, Some(e.weight()), Some(e.level()))
                }
                None => (read_series(input.as_deref())?, None, None),
            };
            let weight = weight.or(fam_weight).ok_or_else(|| Failure::Parse("--weight is required for a series input".into()))?;
            let level = level.or(fam_level).unwrap_or(1);
            let c = certify(&series, weight, level, depth, margin).map_err(|e| Failure::Compute(format!("quasimodular: {e}")))?;
            println!("{}", c.to_json());
            Ok(ExitCode::SUCCESS)
        }
        Some(Command::Verify { suite, order, jet_order, margin, seed, format, no_timing }) => {
            let settings = Settings { order, jet_order, margin, seed };
            let report = run_suite(&suite, &settings).map_err(|e| Failure::Parse(format!("suites: {e}")))?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json(!no_timing)).expect("json values serialize")),
                Format::Csv => print!("{}", report.to_csv(!no_timing)),
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse()).unwrap_or_else(Failure::report)
}
