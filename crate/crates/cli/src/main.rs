//! `pqr`: check, run and format programs, and query the index solver.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pqr_core::eval::{run_program, RunError, RunResult, TraceEvent};
use pqr_core::index::{Env, Solver, DEFAULT_BUDGET};
use pqr_core::syntax::{parse_judgment, parse_program, pretty_program, ParseError, Program};
use pqr_core::typeck::{check_program, CheckError, CheckReport, Mode};

// Stdout writes ignore errors so that piping into `head` is not a panic.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_TYPE: u8 = 3;
const EXIT_OBLIGATION: u8 = 4;
const EXIT_RUNTIME: u8 = 5;

#[derive(Parser)]
#[command(name = "pqr", version, about = "Width-aware quantum circuit language checker and interpreter")]
struct Cli {
    /// Enumeration bound per variable for the index solver.
    #[arg(long, global = true, env = "PQR_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type check a program and report every definition and obligation.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        #[arg(long)]
        json: bool,
    },
    /// Run `main`, printing the result value and the circuit.
    Run {
        file: PathBuf,
        /// Index argument `name=value`; repeat for several.
        #[arg(long = "index", value_parser = parse_index_arg)]
        indices: Vec<(String, u64)>,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// Print one line per evaluation rule to stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the static width bound of `main` and the width of its circuit.
    Width {
        file: PathBuf,
        #[arg(long = "index", value_parser = parse_index_arg)]
        indices: Vec<(String, u64)>,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
    },
    /// Decide a judgment such as `forall i j. i <= i + j`.
    Solve { judgment: String },
    /// Pretty-print a program.
    Fmt { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Permissive,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Permissive => Mode::Permissive,
        }
    }
}

fn parse_index_arg(s: &str) -> Result<(String, u64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let value = value.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        let code = match e {
            CheckError::Type(_) => EXIT_TYPE,
            CheckError::Obligation { .. } => EXIT_OBLIGATION,
        };
        Failure::new(code, e.to_string())
    }
}

fn parse_failure(path: &Path, e: ParseError) -> Failure {
    Failure::new(EXIT_PARSE, format!("{}:{}:{}: parse error: {}", path.display(), e.line, e.col, e.message))
}

fn load(path: &Path) -> Result<Program, Failure> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
    parse_program(&src).map_err(|e| parse_failure(path, e))
}

fn cmd_check(file: &Path, mode: Mode, json: bool, solver: &Solver) -> Result<(), Failure> {
    let prog = load(file)?;
    let checked = check_program(&prog, solver, mode)?;
    let report = CheckReport::new(&checked);
    if json {
        outln!("{}", report.to_json());
    } else {
        out!("{}", report.to_text());
    }
    Ok(())
}

fn execute(
    file: &Path,
    indices: Vec<(String, u64)>,
    mode: Mode,
    trace: bool,
    solver: &Solver,
) -> Result<RunResult, Failure> {
    let prog = load(file)?;
    let mut env = Env::new();
    for (k, v) in indices {
        if env.insert(k.clone(), v).is_some() {
            return Err(Failure::new(EXIT_USAGE, format!("index `{k}` given twice")));
        }
    }
    let mut print_event = |e: &TraceEvent| {
        eprintln!("{}", serde_json::to_string(e).expect("trace event serializes"));
    };
    let tracer: Option<&mut dyn FnMut(&TraceEvent)> = if trace { Some(&mut print_event) } else { None };
    run_program(&prog, &env, solver, mode, tracer).map_err(|e| match e {
        RunError::Check(c) => Failure::from(c),
        RunError::MissingIndex(_) | RunError::UnknownIndex(_) | RunError::NoMain | RunError::NotABundle(_) => {
            Failure::new(EXIT_USAGE, e.to_string())
        }
        RunError::Eval(_) | RunError::WidthViolation { .. } | RunError::SubjectReduction(_) => {
            Failure::new(EXIT_RUNTIME, e.to_string())
        }
    })
}

fn cmd_run(
    file: &Path,
    indices: Vec<(String, u64)>,
    mode: Mode,
    trace: bool,
    json: bool,
    solver: &Solver,
) -> Result<(), Failure> {
    let r = execute(file, indices, mode, trace, solver)?;
    if json {
        let circuit: serde_json::Value = serde_json::from_str(&r.circuit.to_json()).expect("circuit JSON is valid");
        let out = serde_json::json!({
            "value": r.value.to_string(),
            "type": r.main_type.to_string(),
            "bound": r.bound,
            "circuit": circuit,
        });
        outln!("{}", serde_json::to_string_pretty(&out).expect("output serializes"));
    } else {
        outln!("value: {}", r.value);
        outln!("width: {} (bound {})", r.circuit.width(), r.bound);
        outln!("{}", r.circuit.to_json_pretty());
    }
    Ok(())
}

fn cmd_width(file: &Path, indices: Vec<(String, u64)>, mode: Mode, solver: &Solver) -> Result<(), Failure> {
    let r = execute(file, indices, mode, false, solver)?;
    outln!("bound: {}", r.bound);
    outln!("width: {}", r.circuit.width());
    Ok(())
}

fn cmd_solve(judgment: &str, solver: &Solver) -> Result<(), Failure> {
    let j = parse_judgment(judgment)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}:{}: parse error: {}", e.line, e.col, e.message)))?;
    let v = solver.check(&j.ctx, j.relation, &j.lhs, &j.rhs).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    outln!("{v}");
    Ok(())
}

fn cmd_fmt(file: &Path) -> Result<(), Failure> {
    let prog = load(file)?;
    out!("{}", pretty_program(&prog));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let solver = Solver::new(cli.budget);
    let result = match cli.command {
        Command::Check { file, mode, json } => cmd_check(&file, mode.into(), json, &solver),
        Command::Run { file, indices, mode, trace, json } => cmd_run(&file, indices, mode.into(), trace, json, &solver),
        Command::Width { file, indices, mode } => cmd_width(&file, indices, mode.into(), &solver),
        Command::Solve { judgment } => cmd_solve(&judgment, &solver),
        Command::Fmt { file } => cmd_fmt(&file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
