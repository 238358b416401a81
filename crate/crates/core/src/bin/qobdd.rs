//! `qobdd`: build, evaluate and verify fingerprint quantum OBDDs.
//!
//! Every subcommand writes JSON to stdout. Exit codes: 0 success, 1 a
//! verification failed, 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use qobdd::bits::parse_bits;
use qobdd::charpoly::{Characteristic, Modulus, SopFormula};
use qobdd::goodset::{sample, DEFAULT_VERIFY_LIMIT};
use qobdd::harness::{
    certify, compile_problem, find_good_set, format_width_table, width_table, Compiled, FunctionSpec, Problem,
    SweepMode,
};
use qobdd::hsf::{GroupSpec, HsfInstance};
use qobdd::qbp::QuantumBranchingProgram;

#[derive(Parser)]
#[command(name = "qobdd", version, about = "Fingerprint quantum OBDD compiler and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a function into a program file.
    Build {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a compiled program on one input.
    Eval {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Compile and sweep a function against its brute-force oracle.
    Verify {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Force a sampled sweep with this many inputs.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Sample a good parameter set and verify it when tractable.
    Goodset {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        modulus: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_VERIFY_LIMIT)]
        verify_limit: u64,
    },
    /// Hidden Subgroup Function instances.
    Hsf {
        /// Order of the cyclic group Z_N.
        #[arg(long, conflicts_with = "table", requires = "subgroup_generator")]
        cyclic: Option<usize>,
        #[arg(long)]
        subgroup_generator: Option<usize>,
        /// JSON file {"order": N, "table": [[...]], "subgroup": [...]}.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sweep every input under the promise filter.
        #[arg(long)]
        sweep: bool,
    },
    /// Width table for the shipped functions.
    Report {
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Plain-text table instead of JSON.
        #[arg(long)]
        text: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionKind {
    Mod,
    Eq,
    Palindrome,
    Perm,
    SopFile,
    CharFile,
}

#[derive(Args)]
struct FunctionArgs {
    #[arg(long, value_enum)]
    function: FunctionKind,
    /// Modulus for `mod`.
    #[arg(long)]
    m: Option<u64>,
    /// Size parameter (arity for mod/palindrome, string length for eq, matrix side for perm).
    #[arg(long)]
    n: Option<usize>,
    /// Input file for sop-file (SOP of the negation) and char-file.
    #[arg(long)]
    file: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Verification(Value),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<Value, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn function_spec(args: &FunctionArgs) -> Result<FunctionSpec, Failure> {
    let need_n = || args.n.ok_or_else(|| Failure::Usage("--n is required".into()));
    let need_file = || args.file.as_deref().ok_or_else(|| Failure::Usage("--file is required".into()));
    Ok(match args.function {
        FunctionKind::Mod => FunctionSpec::Mod {
            n: need_n()?,
            m: args.m.ok_or_else(|| Failure::Usage("--m is required for mod".into()))?,
        },
        FunctionKind::Eq => FunctionSpec::Eq { n: need_n()? },
        FunctionKind::Palindrome => FunctionSpec::Palindrome { n: need_n()? },
        FunctionKind::Perm => FunctionSpec::Perm { n: need_n()? },
        FunctionKind::SopFile => FunctionSpec::Sop(read_json::<SopFormula>(need_file()?)?),
        FunctionKind::CharFile => FunctionSpec::Char(read_json::<Characteristic>(need_file()?)?),
    })
}

fn build(function: &FunctionArgs, epsilon: f64, seed: u64, out: &Path) -> CliResult {
    let problem = function_spec(function)?.problem()?;
    let inputs = SweepMode::auto(problem.arity(), seed).inputs(problem.arity())?;
    let (k, used_seed, check) = find_good_set(&problem.characteristic, epsilon, seed, &inputs)?;
    let compiled = compile_problem(&problem, &k)?;
    fs::write(out, serde_json::to_string(&compiled)?)?;
    Ok(json!({
        "function": problem.name,
        "out": out.display().to_string(),
        "t": k.size(),
        "good_set_seed": used_seed,
        "good_set_check": check,
        "metrics": compiled.program().metrics(),
    }))
}

fn eval(program: &Path, input: &str) -> CliResult {
    let value: Value = read_json(program)?;
    let (program, compiled) = match serde_json::from_value::<Compiled>(value.clone()) {
        Ok(c) => (c.program().clone(), Some(c)),
        Err(_) => (serde_json::from_value::<QuantumBranchingProgram>(value)?, None),
    };
    let sigma = parse_bits(input)?;
    if sigma.len() != program.arity() {
        return Err(Failure::Usage(format!(
            "input has {} bits but the program reads {}",
            sigma.len(),
            program.arity()
        )));
    }
    let closed_form = compiled.map(|c| c.closed_form(&sigma)).transpose()?;
    Ok(json!({
        "accept_probability": program.accept_probability(&sigma)?,
        "closed_form": closed_form,
    }))
}

fn run_certify(problem: &Problem, epsilon: f64, seed: u64, mode: SweepMode) -> CliResult {
    let (_, report) = certify(problem, epsilon, seed, mode)?;
    let value = serde_json::to_value(&report)?;
    if report.pass {
        Ok(value)
    } else {
        Err(Failure::Verification(value))
    }
}

fn verify(function: &FunctionArgs, epsilon: f64, seed: u64, samples: Option<usize>) -> CliResult {
    let problem = function_spec(function)?.problem()?;
    let mode = match samples {
        Some(samples) => SweepMode::Sampled { samples, seed },
        None => SweepMode::auto(problem.arity(), seed),
    };
    run_certify(&problem, epsilon, seed, mode)
}

fn goodset(epsilon: f64, modulus: &str, seed: u64, verify_limit: u64) -> CliResult {
    let m = Modulus::new(modulus.parse::<BigUint>().map_err(|_| Failure::Usage(format!("bad modulus {modulus:?}")))?)?;
    let k = sample(epsilon, &m, seed)?;
    let verified = if m.value() <= &BigUint::from(verify_limit) {
        json!(k.verify_exhaustive(verify_limit)?)
    } else {
        json!("skipped")
    };
    Ok(json!({
        "t": k.size(),
        "params": k.params().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "verified": verified,
    }))
}

fn hsf(
    cyclic: Option<usize>,
    generator: Option<usize>,
    table: Option<&Path>,
    epsilon: f64,
    seed: u64,
    sweep: bool,
) -> CliResult {
    let inst = match (cyclic, table) {
        (Some(n), None) => HsfInstance::cyclic(n, generator.unwrap_or(0))?,
        (None, Some(path)) => read_json::<GroupSpec>(path)?.into_instance()?,
        _ => return Err(Failure::Usage("give either --cyclic N --subgroup-generator d, or --table FILE".into())),
    };
    let name = match cyclic {
        Some(n) => format!("HSF Z_{n}/<{}>", generator.unwrap_or(0)),
        None => format!("HSF (order {})", inst.group().order()),
    };
    let summary = json!({
        "function": name,
        "order": inst.group().order(),
        "index": inst.index(),
        "bits_per_value": inst.bits_per_value(),
        "arity": inst.arity(),
        "cosets": inst.cosets().cosets(),
    });
    let problem = Problem::hsf(name, inst)?;
    if sweep {
        let mode = SweepMode::auto(problem.arity(), seed);
        let report = run_certify(&problem, epsilon, seed, mode);
        let wrap = |report: Value| json!({ "instance": summary, "report": report });
        return report.map(wrap).map_err(|f| match f {
            Failure::Verification(v) => Failure::Verification(wrap(v)),
            other => other,
        });
    }
    let k = sample(epsilon, problem.characteristic.modulus(), seed)?;
    let compiled = compile_problem(&problem, &k)?;
    Ok(json!({
        "instance": summary,
        "t": k.size(),
        "metrics": compiled.program().metrics(),
    }))
}

fn report(epsilon: f64, seed: u64, text: bool) -> CliResult {
    let specs = [
        FunctionSpec::Mod { n: 64, m: 64 },
        FunctionSpec::Eq { n: 4 },
        FunctionSpec::Palindrome { n: 11 },
        FunctionSpec::Perm { n: 3 },
    ];
    let mut compiled = Vec::new();
    for spec in &specs {
        let chi = spec.characteristic()?;
        let k = sample(epsilon, chi.modulus(), seed)?;
        compiled.push(compile_problem(&spec.problem()?, &k)?);
    }
    let entries: Vec<_> = specs
        .iter()
        .zip(&compiled)
        .map(|(s, c)| (s.name(), c.program(), s.quantum_bound().to_string(), s.deterministic_bound().to_string()))
        .collect();
    let rows = width_table(&entries);
    if text {
        Ok(Value::String(format_width_table(&rows)))
    } else {
        Ok(json!({ "epsilon": epsilon, "rows": rows }))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build { function, epsilon, seed, out } => build(function, *epsilon, *seed, out),
        Command::Eval { program, input } => eval(program, input),
        Command::Verify { function, epsilon, seed, samples } => verify(function, *epsilon, *seed, *samples),
        Command::Goodset { epsilon, modulus, seed, verify_limit } => goodset(*epsilon, modulus, *seed, *verify_limit),
        Command::Hsf { cyclic, subgroup_generator, table, epsilon, seed, sweep } => {
            hsf(*cyclic, *subgroup_generator, table.as_deref(), *epsilon, *seed, *sweep)
        }
        Command::Report { epsilon, seed, text } => report(*epsilon, *seed, *text),
    };
    match result {
        Ok(Value::String(s)) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Ok(value) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(value)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `qobdd --help` for usage.");
            ExitCode::from(2)
        }
    }
}
