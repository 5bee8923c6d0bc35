mod verbs;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use padic_hodge::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Verb {
    Witt,
    Padic,
    Slopes,
    Newton,
    Hodge,
    Admissible,
    Expd,
    Fglog,
    Height,
    Motive,
    Periods,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Computations with isocrystals, filtered modules, formal groups and periods.
///
/// Reads a JSON document from FILE (or stdin when FILE is `-`).
/// Exit status: 0 on success, 2 on invalid input, 3 when the working
/// precision or truncation order is too small to decide.
#[derive(Debug, Parser)]
#[command(name = "phodge", version)]
struct Cli {
    #[arg(value_enum)]
    verb: Verb,
    #[arg(value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Override the working p-adic precision of the input.
    #[arg(long, value_name = "N")]
    precision: Option<u32>,
    /// Override the truncation order of power series.
    #[arg(long, value_name = "N")]
    order: Option<usize>,
    /// Deepest period depth to report.
    #[arg(long, value_name = "I")]
    depth: Option<usize>,
}

/// Overrides shared by all verbs.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub precision: Option<u32>,
    pub order: Option<usize>,
    pub depth: Option<usize>,
}

/// Rendered result. `undecided` requests exit status 3 after printing.
pub struct Report {
    pub text: String,
    pub json: serde_json::Value,
    pub undecided: bool,
}

#[derive(Debug)]
pub enum Failure {
    Io(String),
    /// Bad input; `field` locates the offending value.
    Input {
        field: String,
        message: String,
    },
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation { field, message } => Failure::Input { field, message },
            other => Failure::Core(other),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_precision_related() => 3,
            Failure::Core(Error::TruncationTooSmall { .. }) => 3,
            _ => 2,
        }
    }

    fn describe(&self) -> String {
        match self {
            Failure::Io(m) => format!("error: {m}"),
            Failure::Input { field, message } => format!("error: invalid input at `{field}`: {message}"),
            Failure::Core(e) if self.exit_code() == 3 => format!("undecided: {e}"),
            Failure::Core(e) => format!("error: {e}"),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("reading {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let src = read_input(&cli.input)?;
    let o = Overrides { precision: cli.precision, order: cli.order, depth: cli.depth };
    match cli.verb {
        Verb::Witt => verbs::witt(&src, o),
        Verb::Padic => verbs::padic(&src, o),
        Verb::Slopes => verbs::slopes(&src, o),
        Verb::Newton => verbs::newton(&src, o),
        Verb::Hodge => verbs::hodge(&src, o),
        Verb::Admissible => verbs::admissible(&src, o),
        Verb::Expd => verbs::expd(&src, o),
        Verb::Fglog => verbs::fglog(&src, o),
        Verb::Height => verbs::height(&src, o),
        Verb::Motive => verbs::motive(&src, o),
        Verb::Periods => verbs::periods(&src, o),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.text),
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&report.json).expect("json values serialize"))
                }
            }
            ExitCode::from(if report.undecided { 3 } else { 0 })
        }
        Err(f) => {
            eprintln!("{}", f.describe());
            ExitCode::from(f.exit_code())
        }
    }
}
