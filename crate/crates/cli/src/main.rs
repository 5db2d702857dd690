mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use pubo_forge::ancilla::{
    build_set_cover, emit_lp, quarter_squares, set_cover_to_ilp, DEFAULT_NODE_BUDGET,
};
use pubo_forge::bench::{run_ancilla_experiment, run_precision_experiment, BenchOutcome};
use pubo_forge::compile::{compile, CompileOptions, Strategy};
use pubo_forge::gadget::{emit_qubo, parse_qubo};
use pubo_forge::poly::{
    control_precision, parse_polynomial, OffsetPolicy, Polynomial, DEFAULT_ENUMERATION_CAP,
};
use pubo_forge::quartic::{build_wmaxsat, emit_wcnf, parse_model, DEFAULT_WMAXSAT_BUDGET};
use pubo_forge::verify::{verify_reduction, VerificationReport};
use pubo_forge::Error;

use config::{BenchSettings, Experiment};

/// Stable exit codes.
const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pubo-forge",
    version,
    about = "Reduce pseudo-Boolean polynomials of degree <= 4 to QUBO"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a .pubo file to a .qubo file.
    Compile(CompileArgs),
    /// Check a .qubo reduction against its .pubo source by enumeration.
    Verify(VerifyArgs),
    /// Run a benchmark sweep and write CSV.
    Bench(BenchArgs),
    /// Write the ancilla-selection MaxSAT instance of a degree-4 input.
    EmitWcnf(EmitWcnfArgs),
    /// Print term counts and control precision of a .pubo file.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitFormat {
    Qubo,
    Lp,
    Wcnf,
}

#[derive(Args)]
struct CompileArgs {
    input: PathBuf,
    /// min-ancilla, reduce-min, min-precision or arbitrary.
    #[arg(long, default_value = "min-ancilla")]
    strategy: String,
    /// single or triple.
    #[arg(long, default_value = "single")]
    gadget: String,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    ilp_budget: u64,
    #[arg(long, default_value_t = DEFAULT_WMAXSAT_BUDGET)]
    wmaxsat_budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Path of the .qubo file; defaults to the input with a .qubo extension.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Extra formats written next to the .qubo file.
    #[arg(long, value_enum, value_delimiter = ',')]
    emit: Vec<EmitFormat>,
    /// Same as `--emit lp`.
    #[arg(long)]
    emit_lp: bool,
    /// Same as `--emit wcnf`.
    #[arg(long)]
    emit_wcnf: bool,
    /// MaxSAT model (signed literals) to use instead of the internal solver.
    #[arg(long)]
    wmaxsat_model: Option<PathBuf>,
    /// Check the reduction with the brute-force oracle.
    #[arg(long)]
    verify: bool,
    /// Leave the constant term out of control precision.
    #[arg(long)]
    precision_ignore_offset: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    pubo: PathBuf,
    qubo: PathBuf,
    /// Maximum of computational variables plus the largest coupled ancilla group.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Preset sweep: 1 = ancilla scaling at n=8, 3 = precision growth at n=11.
    #[arg(long, value_name = "1|3")]
    paper_fig: Option<u8>,
    /// File of key=value settings, applied after the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra key=value setting, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// ancilla or precision.
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated cubic term counts.
    #[arg(long)]
    lambdas: Option<String>,
    #[arg(long)]
    instances: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    strategies: Option<String>,
    #[arg(long)]
    gadgets: Option<String>,
    #[arg(long)]
    coeff_min: Option<String>,
    #[arg(long)]
    coeff_max: Option<String>,
    #[arg(long)]
    ilp_budget: Option<String>,
    #[arg(long)]
    verify_fraction: Option<String>,
    #[arg(long)]
    quadratic_layer: bool,
    /// Fill the wall-time column (output is then no longer reproducible).
    #[arg(long)]
    record_timing: bool,
    /// Every λ from 1 to C(n,3).
    #[arg(long)]
    full_sweep: bool,
    /// CSV path; standard output if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EmitWcnfArgs {
    input: PathBuf,
    /// Standard output if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    input: PathBuf,
    #[arg(long)]
    precision_ignore_offset: bool,
    #[arg(long)]
    json: bool,
}

/// A message and the exit code it maps to.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooManyVariables { .. } | Error::BudgetExhausted(_) => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        Failure(code, e.to_string())
    }
}

fn input_err(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INPUT, msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_pubo(path: &Path) -> Result<Polynomial, Failure> {
    parse_polynomial(&read(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn precision(poly: &Polynomial, policy: OffsetPolicy) -> Value {
    control_precision(poly, policy).map_or(Value::Null, |p| p.control_precision.into())
}

fn text_value(v: &Value) -> String {
    match v {
        Value::Null => "n/a".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Print a flat summary either as JSON or as one `key: value` line.
fn print_summary(fields: &Map<String, Value>, as_json: bool) {
    if as_json {
        println!("{}", Value::Object(fields.clone()));
    } else {
        let parts: Vec<String> = fields
            .iter()
            .map(|(k, v)| format!("{k}: {}", text_value(v)))
            .collect();
        println!("{}", parts.join("  "));
    }
}

fn report_fields(report: &VerificationReport, out: &mut Map<String, Value>) {
    out.insert("pointwise".into(), report.pointwise_ok.into());
    out.insert("ground_state".into(), report.ground_state_ok.into());
    out.insert(
        "assignments_checked".into(),
        report.assignments_checked.into(),
    );
    if let Some(c) = &report.counterexample {
        out.insert("counterexample".into(), c.bits().into());
        out.insert("source_value".into(), c.source_value.to_string().into());
        out.insert("reduced_min".into(), c.reduced_min.to_string().into());
    }
}

fn cmd_compile(args: CompileArgs) -> Result<(), Failure> {
    let poly = load_pubo(&args.input)?;
    let strategy = Strategy::parse(&args.strategy)?;
    let gadget = config::gadget(&args.gadget).map_err(input_err)?;
    let mut emit = args.emit.clone();
    if args.emit_lp {
        emit.push(EmitFormat::Lp);
    }
    if args.emit_wcnf {
        emit.push(EmitFormat::Wcnf);
    }
    if emit.contains(&EmitFormat::Wcnf) && poly.degree() != 4 {
        return Err(input_err("wcnf emission requires a degree-4 input"));
    }
    if emit.contains(&EmitFormat::Lp) && poly.degree() > 3 {
        return Err(input_err("lp emission covers cubic inputs only"));
    }

    let wmaxsat_model = match &args.wmaxsat_model {
        Some(path) => {
            if poly.degree() != 4 {
                return Err(input_err("--wmaxsat-model requires a degree-4 input"));
            }
            let nvars = build_wmaxsat(&poly)?.vars.len();
            Some(
                parse_model(&read(path)?, nvars)
                    .map_err(|e| input_err(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let opts = CompileOptions {
        strategy,
        gadget,
        ilp_budget: args.ilp_budget,
        wmaxsat_budget: args.wmaxsat_budget,
        seed: args.seed,
        wmaxsat_model,
    };
    let c = compile(&poly, &opts)?;

    let qubo_path = args
        .output
        .clone()
        .unwrap_or_else(|| args.input.with_extension("qubo"));
    write(&qubo_path, &emit_qubo(&c.reduced)?)?;
    if emit.contains(&EmitFormat::Lp) {
        let sc = build_set_cover(&poly)?;
        write(
            &qubo_path.with_extension("lp"),
            &emit_lp(&sc, &set_cover_to_ilp(&sc)),
        )?;
    }
    if emit.contains(&EmitFormat::Wcnf) {
        let inst = match &c.wmaxsat {
            Some((inst, _)) => inst.clone(),
            None => build_wmaxsat(&poly)?,
        };
        write(&qubo_path.with_extension("wcnf"), &emit_wcnf(&inst))?;
    }

    let policy = if args.precision_ignore_offset {
        OffsetPolicy::Ignore
    } else {
        OffsetPolicy::Include
    };
    let mut fields = Map::new();
    fields.insert("strategy".into(), strategy.name().into());
    fields.insert("gadget".into(), gadget.name().into());
    fields.insert("ancilla".into(), c.reduced.ancilla_count().into());
    fields.insert("precision_before".into(), precision(&poly, policy));
    fields.insert(
        "precision_after".into(),
        precision(&c.reduced.quadratic, policy),
    );
    fields.insert(
        "optimal".into(),
        c.proven_optimal.map_or(Value::Null, Value::from),
    );
    if let Some(v) = c.introduced_max {
        fields.insert("max_introduced".into(), v.into());
    }
    if let Some(v) = c.baseline_introduced_max {
        fields.insert("baseline_max_introduced".into(), v.into());
    }
    fields.insert("output".into(), qubo_path.display().to_string().into());

    if !args.verify {
        print_summary(&fields, args.json);
        return Ok(());
    }
    let report = verify_reduction(&poly, &c.reduced, DEFAULT_ENUMERATION_CAP)?;
    fields.insert("verified".into(), report.passed().into());
    if args.json {
        report_fields(&report, &mut fields);
        print_summary(&fields, true);
    } else {
        print_summary(&fields, false);
        print!("{report}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure(EXIT_VERIFY, "reduction failed verification".into()))
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let poly = load_pubo(&args.pubo)?;
    let reduced = parse_qubo(&read(&args.qubo)?)
        .map_err(|e| input_err(format!("{}: {e}", args.qubo.display())))?;
    let report = verify_reduction(&poly, &reduced, args.cap)?;
    if args.json {
        let mut fields = Map::new();
        fields.insert("passed".into(), report.passed().into());
        fields.insert("ancilla".into(), report.ancilla_count.into());
        fields.insert(
            "largest_ancilla_component".into(),
            report.largest_component.into(),
        );
        fields.insert(
            "precision_before".into(),
            report
                .precision_before
                .as_ref()
                .map_or(Value::Null, |p| p.control_precision.into()),
        );
        fields.insert(
            "precision_after".into(),
            report
                .precision_after
                .as_ref()
                .map_or(Value::Null, |p| p.control_precision.into()),
        );
        report_fields(&report, &mut fields);
        print_summary(&fields, true);
    } else {
        print!("{report}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure(EXIT_VERIFY, "reduction failed verification".into()))
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let mut settings = BenchSettings::preset(args.paper_fig).map_err(input_err)?;
    if let Some(path) = &args.config {
        settings
            .apply_file(&read(path)?)
            .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    }
    let mut flags: Vec<String> = args.sets.clone();
    let named = [
        ("experiment", &args.experiment),
        ("n", &args.n),
        ("lambdas", &args.lambdas),
        ("instances", &args.instances),
        ("seed", &args.seed),
        ("strategies", &args.strategies),
        ("gadgets", &args.gadgets),
        ("coeff_min", &args.coeff_min),
        ("coeff_max", &args.coeff_max),
        ("ilp_budget", &args.ilp_budget),
        ("verify_fraction", &args.verify_fraction),
    ];
    flags.extend(
        named
            .iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| format!("{k}={v}"))),
    );
    for (key, on) in [
        ("quadratic_layer", args.quadratic_layer),
        ("record_timing", args.record_timing),
        ("full_sweep", args.full_sweep),
    ] {
        if on {
            flags.push(format!("{key}=true"));
        }
    }
    for f in &flags {
        settings.apply(f).map_err(input_err)?;
    }
    let experiment = settings.experiment;
    let cfg = settings.finish();
    let out: BenchOutcome = match experiment {
        Experiment::Ancilla => run_ancilla_experiment(&cfg)?,
        Experiment::Precision => run_precision_experiment(&cfg)?,
    };
    match &args.output {
        Some(path) => {
            write(path, &out.csv)?;
            let rows = out
                .csv
                .lines()
                .filter(|l| !l.starts_with('#'))
                .count()
                .saturating_sub(1);
            println!(
                "csv: {}  experiment: {experiment}  rows: {rows}  verified: {}  verify_skipped: {}",
                path.display(),
                out.verified,
                out.verify_skipped
            );
        }
        None => print!("{}", out.csv),
    }
    if out.verification_failures.is_empty() {
        Ok(())
    } else {
        for f in &out.verification_failures {
            eprintln!("verification failure: {f}");
        }
        Err(Failure(
            EXIT_VERIFY,
            format!(
                "{} sampled reductions failed",
                out.verification_failures.len()
            ),
        ))
    }
}

fn cmd_emit_wcnf(args: EmitWcnfArgs) -> Result<(), Failure> {
    let poly = load_pubo(&args.input)?;
    if poly.degree() != 4 {
        return Err(input_err("wcnf emission requires a degree-4 input"));
    }
    let text = emit_wcnf(&build_wmaxsat(&poly)?);
    match &args.output {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_stats(args: StatsArgs) -> Result<(), Failure> {
    let poly = load_pubo(&args.input)?;
    let mut by_degree = [0usize; 5];
    for (m, _) in poly.terms() {
        by_degree[m.degree()] += 1;
    }
    let policy = if args.precision_ignore_offset {
        OffsetPolicy::Ignore
    } else {
        OffsetPolicy::Include
    };
    let report = control_precision(&poly, policy).ok();
    let n = poly.n();
    let fields = json!({
        "n": n,
        "terms": poly.len(),
        "degree": poly.degree(),
        "constant_terms": by_degree[0],
        "linear_terms": by_degree[1],
        "quadratic_terms": by_degree[2],
        "cubic_terms": by_degree[3],
        "quartic_terms": by_degree[4],
        "clause_ratio": if n == 0 { 0.0 } else { by_degree[3] as f64 / n as f64 },
        "cubic_ancilla_bound": quarter_squares(n as u64)?,
        "max_abs_coeff": report.as_ref().map(|p| p.max_abs_coeff),
        "gcd": report.as_ref().map(|p| p.gcd_all),
        "control_precision": report.as_ref().map(|p| p.control_precision),
    });
    let Value::Object(fields) = fields else {
        unreachable!()
    };
    print_summary(&fields, args.json);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile(a) => cmd_compile(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::EmitWcnf(a) => cmd_emit_wcnf(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
