use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use horn_core::hive::{
    example_hive, hive_reconstruct, verify_continuous_lr, verify_example, EXACT_TOL, RECONSTRUCTED_TOL,
};
use horn_core::interpolate::{interpolate, InterpolationInput, InterpolationResult};
use horn_core::partial::{
    check_partial, check_partial_two_sided, johnson_bounds, lowrank_check, realize_partial, realize_partial_two_sided,
    PartialSpectrum, PartialVerdict, Support,
};
use horn_core::scenarios::{self, SCENARIOS};
use horn_core::spectra::{scan_extended, scan_finite, scan_positive};
use horn_core::witness::{detect_reducing, synthesize, Orientation, SynthOptions, WitnessSet};
use horn_core::{
    lr_coeff, Error, HornCatalog, HornSetKind, HornTuple, InequalityRecord, Partition, ScanConfig, Spectrum,
    TwoSidedSpectrum,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "horn",
    version,
    about = "Horn inequalities for sums of Hermitian matrices and compact selfadjoint operators"
)]
struct Cli {
    /// Worker threads for the scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate Horn tuples.
    Triples(TriplesArgs),
    /// Scan an instance for violated inequalities (CSV table on stdout).
    Check(CheckArgs),
    /// Interpolate between lower and upper spectra.
    Interpolate(InterpolateArgs),
    /// Partially specified spectra.
    Partial {
        #[command(subcommand)]
        command: PartialCommand,
    },
    /// Explicit matrices realizing spectra.
    Witness {
        #[command(subcommand)]
        command: WitnessCommand,
    },
    /// Hive checks.
    Hive {
        #[command(subcommand)]
        command: HiveCommand,
    },
    /// Littlewood-Richardson coefficient c^lambda_{mu,nu}.
    Lr(LrArgs),
    /// The worked examples.
    PaperExamples {
        #[command(subcommand)]
        command: ExamplesCommand,
    },
}

#[derive(Args)]
struct TriplesArgs {
    /// T, Tbar or Tdot.
    #[arg(long, default_value = "T")]
    kind: HornSetKind,
    /// Number of summands.
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long = "N")]
    n: usize,
    /// Cardinality; every r in 0..=N when omitted.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    json: bool,
    /// Print `N,r,kind,count` rows only.
    #[arg(long, conflicts_with = "json")]
    count_only: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum CheckMode {
    Finite,
    Extended,
    Positive,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "finite")]
    mode: CheckMode,
    /// JSON instance {"alpha": ..., "betas": [...]}.
    #[arg(long)]
    input: PathBuf,
    /// Truncation order for the extended and positive scans.
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    /// Order up to which the trivial cells r = 0, N are scanned.
    #[arg(long)]
    trace_n_max: Option<usize>,
    /// Largest total split for the reverse positive family.
    #[arg(long)]
    reverse_q_max: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InterpolateArgs {
    /// JSON {"start": {"alpha", "betas"}, "target": {"alpha", "betas"}}.
    #[arg(long)]
    input: PathBuf,
    /// Unit steps on integer data.
    #[arg(long)]
    integer: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Audit log destination (one line per decision).
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct PartialInput {
    /// JSON {"N": 4, "alpha": {"spec": {...}}, "betas": [...], "support": {"pos", "neg"}};
    /// a support selects two-sided mode.
    #[arg(long)]
    input: PathBuf,
    /// Truncation order of the two-sided scans.
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PartialCommand {
    Check(PartialInput),
    Realize {
        #[command(flatten)]
        input: PartialInput,
        /// Truncation order of the two-sided realization.
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Interval of feasible values for one specified eigenvalue.
    Johnson {
        #[arg(long = "beta", value_parser = parse_reals, allow_hyphen_values = true, required = true)]
        betas: Vec<Vec<f64>>,
        /// Position; every position when omitted.
        #[arg(long)]
        p: Option<usize>,
    },
    /// Whether the summands admit a positive sum of rank at most rho.
    Lowrank {
        #[arg(long = "beta", value_parser = parse_reals, allow_hyphen_values = true, required = true)]
        betas: Vec<Vec<f64>>,
        #[arg(long)]
        rho: usize,
    },
}

#[derive(Subcommand)]
enum WitnessCommand {
    Synth {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<f64>,
        #[arg(long = "beta", value_parser = parse_reals, allow_hyphen_values = true, required = true)]
        betas: Vec<Vec<f64>>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        /// Proceed even if the data fails the Horn inequalities.
        #[arg(long)]
        skip_check: bool,
        /// Iterate on the whole problem without splitting at tight inequalities.
        #[arg(long)]
        no_split: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Look for a reducing subspace behind a tight inequality.
    Reduce {
        /// Witness JSON as written by `witness synth`.
        #[arg(long)]
        input: PathBuf,
        /// Tuple JSON, e.g. {"m":2,"N":2,"r":2,"I":[1,2],"J":[[1,2],[1,2]]}.
        #[arg(long)]
        tuple: String,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<usize>,
        #[arg(long, value_enum, default_value = "direct")]
        orientation: OrientationArg,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum OrientationArg {
    Direct,
    Bar,
}

#[derive(Subcommand)]
enum HiveCommand {
    Verify {
        /// The explicit example hive.
        #[arg(long, conflicts_with = "input")]
        example: bool,
        /// JSON {"alpha", "beta", "gamma", "z"} to reconstruct and verify.
        #[arg(long, required_unless_present = "example")]
        input: Option<PathBuf>,
        #[arg(long = "W", default_value_t = 60)]
        width: usize,
        #[arg(long = "H", default_value_t = 60)]
        height: usize,
        #[arg(long)]
        tol: Option<f64>,
        /// Write (i, j, f, x, y, z) rows here (`-` for stdout).
        #[arg(long)]
        dump_csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LrArgs {
    /// Parts of the outer partition; omitted means empty.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    mu: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    nu: Vec<usize>,
}

#[derive(Subcommand)]
enum ExamplesCommand {
    List,
    Run {
        name: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Exit status of a completed run.
#[derive(Copy, Clone, PartialEq, Eq)]
enum Verdict {
    Ok,
    Violation,
}

impl From<bool> for Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Ok
        } else {
            Verdict::Violation
        }
    }
}

/// One repeated list argument such as `--beta 2,1,0`.
fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Error> {
    match output {
        Some(p) if p != Path::new("-") => fs::write(p, text)?,
        _ => {
            let mut out = std::io::stdout().lock();
            let written = out.write_all(text.as_bytes()).and_then(|_| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    out.write_all(b"\n")
                }
            });
            // a closed pipe (`| head`) is not an error
            match written {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

/// Versioned JSON document: `schema`, `version`, `config`, then `body`'s fields.
fn report(schema: &str, config: Value, body: Value) -> String {
    let mut doc = json!({"schema": schema, "version": env!("CARGO_PKG_VERSION"), "config": config});
    if let (Some(d), Value::Object(b)) = (doc.as_object_mut(), body) {
        d.extend(b);
    }
    serde_json::to_string_pretty(&doc).expect("report values serialize")
}

fn spectrum(values: Vec<f64>) -> Result<Spectrum, Error> {
    Spectrum::from_unsorted(values)
}

fn triples(a: &TriplesArgs) -> Result<Verdict, Error> {
    let cat = HornCatalog::shared(a.m);
    let rs: Vec<usize> = match a.r {
        Some(r) if r > a.n => return Err(Error::OutOfRange { element: r, bound: a.n }),
        Some(r) => vec![r],
        None => (0..=a.n).collect(),
    };
    let mut text = String::new();
    let mut all = Vec::new();
    if a.count_only {
        text += "N,r,kind,count\n";
    }
    for r in rs {
        let tab = cat.enumerate(a.kind, a.n, r)?;
        if a.count_only {
            text += &format!("{},{r},{},{}\n", a.n, a.kind, tab.len());
        } else if a.json {
            all.extend(tab.iter().cloned());
        } else {
            tab.iter().for_each(|t| text += &format!("{t}\n"));
        }
    }
    if a.json {
        text = serde_json::to_string_pretty(&all)?;
    }
    emit(None, &text)?;
    Ok(Verdict::Ok)
}

#[derive(Deserialize)]
struct Instance<S> {
    alpha: S,
    betas: Vec<S>,
}

fn check(a: &CheckArgs) -> Result<Verdict, Error> {
    let cfg = ScanConfig {
        n_max: a.n_max,
        trace_n_max: a.trace_n_max.unwrap_or(a.n_max).max(a.n_max),
        reverse_q_max: a.reverse_q_max,
    };
    let (violations, config) = match a.mode {
        CheckMode::Finite => {
            let inst: Instance<Spectrum> = read_json(&a.input)?;
            let n = inst.alpha.len();
            let cat = HornCatalog::shared(inst.betas.len());
            (scan_finite(&cat, &inst.alpha, &inst.betas, n, HornSetKind::T)?, json!({"mode": "finite", "N": n}))
        }
        CheckMode::Extended => {
            let inst: Instance<TwoSidedSpectrum> = read_json(&a.input)?;
            let cat = HornCatalog::shared(inst.betas.len());
            (scan_extended(&cat, &inst.alpha, &inst.betas, &cfg)?, json!({"mode": "extended", "scan": cfg}))
        }
        CheckMode::Positive => {
            let inst: Instance<Spectrum> = read_json(&a.input)?;
            let cat = HornCatalog::shared(inst.betas.len());
            (scan_positive(&cat, &inst.alpha, &inst.betas, &cfg)?, json!({"mode": "positive", "scan": cfg}))
        }
    };
    let text = match a.format {
        Format::Csv => {
            let mut t = format!("{}\n", InequalityRecord::csv_header());
            violations.iter().for_each(|r| t += &format!("{}\n", r.csv_row()));
            t
        }
        Format::Json => report("horn.check.v1", config, json!({"violations": violations})),
    };
    emit(a.output.as_deref(), &text)?;
    eprintln!("{} violated inequalities", violations.len());
    Ok(violations.is_empty().into())
}

fn interpolation_body(res: &InterpolationResult) -> Value {
    json!({
        "alpha": res.alpha,
        "betas": res.betas,
        "decomposition": res.decomposition,
        "blocks": res.index_blocks(),
        "unit_steps": res.unit_steps,
    })
}

fn interpolate_cmd(a: &InterpolateArgs) -> Result<Verdict, Error> {
    let input: InterpolationInput = read_json(&a.input)?;
    let cat = HornCatalog::shared(input.start.betas.len());
    let res = interpolate(&cat, &input, a.integer)?;
    if let Some(p) = &a.log {
        fs::write(p, res.log.join("\n") + "\n")?;
    }
    let text = report("horn.interpolation.v1", json!({"integer": a.integer}), interpolation_body(&res));
    emit(a.output.as_deref(), &text)?;
    Ok(Verdict::Ok)
}

#[derive(Deserialize)]
struct PartialInstance {
    #[serde(rename = "N")]
    n: Option<usize>,
    alpha: PartialSpectrum,
    betas: Vec<PartialSpectrum>,
    support: Option<Support>,
}

impl PartialInstance {
    fn size(&self) -> Result<usize, Error> {
        self.n.ok_or_else(|| Error::Precondition("finite partial data needs \"N\"".into()))
    }
}

fn verdict_text(v: &PartialVerdict, config: Value) -> String {
    report("horn.partial.v1", config, json!({"feasible": v.feasible, "violations": v.violations}))
}

fn partial(cmd: &PartialCommand) -> Result<Verdict, Error> {
    match cmd {
        PartialCommand::Check(a) => {
            let inst: PartialInstance = read_json(&a.input)?;
            let cat = HornCatalog::shared(inst.betas.len());
            let (v, config) = match inst.support {
                Some(s) => {
                    let cfg = ScanConfig::new(a.n_max);
                    (
                        check_partial_two_sided(&cat, &inst.alpha, &inst.betas, s, &cfg)?,
                        json!({"support": s, "scan": cfg}),
                    )
                }
                None => {
                    let n = inst.size()?;
                    (check_partial(&cat, &inst.alpha, &inst.betas, n)?, json!({"N": n}))
                }
            };
            emit(a.output.as_deref(), &verdict_text(&v, config))?;
            Ok(v.feasible.into())
        }
        PartialCommand::Realize { input: a, order } => {
            let inst: PartialInstance = read_json(&a.input)?;
            let cat = HornCatalog::shared(inst.betas.len());
            let outcome = match inst.support {
                Some(s) => {
                    let cfg = ScanConfig::new(a.n_max);
                    realize_partial_two_sided(&cat, &inst.alpha, &inst.betas, s, &cfg, *order)
                        .map(|r| (interpolation_body(&r), json!({"support": s, "scan": cfg, "order": order})))
                }
                None => {
                    let n = inst.size()?;
                    realize_partial(&cat, &inst.alpha, &inst.betas, n).map(|r| {
                        let mut body = interpolation_body(&r.result);
                        body["bound"] = json!(r.bound);
                        (body, json!({"N": n}))
                    })
                }
            };
            match outcome {
                Ok((body, config)) => {
                    emit(a.output.as_deref(), &report("horn.partial.v1", config, body))?;
                    Ok(Verdict::Ok)
                }
                Err(Error::Hypothesis(why)) => {
                    eprintln!("infeasible: {why}");
                    Ok(Verdict::Violation)
                }
                Err(e) => Err(e),
            }
        }
        PartialCommand::Johnson { betas, p } => {
            let bs = betas.iter().cloned().map(spectrum).collect::<Result<Vec<_>, _>>()?;
            let n = bs[0].len();
            let ps: Vec<usize> = p.map_or_else(|| (1..=n).collect(), |p| vec![p]);
            let rows = ps
                .into_iter()
                .map(|p| johnson_bounds(&bs, p, n).map(|(lo, hi)| json!({"p": p, "lower": lo, "upper": hi})))
                .collect::<Result<Vec<_>, _>>()?;
            emit(None, &report("horn.partial.v1", json!({"N": n, "betas": bs}), json!({"intervals": rows})))?;
            Ok(Verdict::Ok)
        }
        PartialCommand::Lowrank { betas, rho } => {
            let bs = betas.iter().cloned().map(spectrum).collect::<Result<Vec<_>, _>>()?;
            let n = bs[0].len();
            let cat = HornCatalog::shared(bs.len());
            let v = lowrank_check(&cat, &bs, *rho, n)?;
            emit(None, &verdict_text(&v, json!({"N": n, "rho": rho})))?;
            Ok(v.feasible.into())
        }
    }
}

/// Accepts either a bare witness or a `witness synth` document.
fn read_witness(path: &Path) -> Result<WitnessSet, Error> {
    let doc: Value = read_json(path)?;
    let inner = doc.get("witness").cloned().unwrap_or(doc);
    Ok(serde_json::from_value(inner)?)
}

fn witness(cmd: &WitnessCommand, seed: u64) -> Result<Verdict, Error> {
    match cmd {
        WitnessCommand::Synth { alpha, betas, tol, max_iter, restarts, skip_check, no_split, output } => {
            if tol.is_nan() || *tol <= 0.0 {
                return Err(Error::Precondition("tolerance must be positive".into()));
            }
            let a = spectrum(alpha.clone())?;
            let bs = betas.iter().cloned().map(spectrum).collect::<Result<Vec<_>, _>>()?;
            let opts = SynthOptions {
                tol: *tol,
                max_iter: *max_iter,
                restarts: *restarts,
                seed,
                skip_check: *skip_check,
                split_tight: !no_split,
            };
            let cat = HornCatalog::shared(bs.len());
            let w = synthesize(&cat, &a, &bs, &opts)?;
            let body = json!({
                "alpha": a,
                "betas": bs,
                "metrics": {
                    "sum_residual": w.sum_residual,
                    "spectrum_errors": w.spectrum_errors,
                    "iterations": w.iterations,
                    "restarts": w.restarts,
                },
                "witness": w,
            });
            emit(output.as_deref(), &report("horn.witness.v1", serde_json::to_value(&opts)?, body))?;
            Ok(Verdict::Ok)
        }
        WitnessCommand::Reduce { input, tuple, q, orientation, tol, output } => {
            let w = read_witness(input)?;
            let t: HornTuple = serde_json::from_str(tuple)?;
            let orient = match orientation {
                OrientationArg::Direct => Orientation::Direct,
                OrientationArg::Bar => Orientation::Bar,
            };
            let r = detect_reducing(&w, &t, q, orient, *tol, seed)?;
            let config = json!({"tuple": t, "q": q, "orientation": orient, "tol": tol, "seed": seed});
            emit(output.as_deref(), &report("horn.reducing.v1", config, serde_json::to_value(&r)?))?;
            if let Some(note) = &r.note {
                eprintln!("{note}");
            }
            Ok(r.found.into())
        }
    }
}

#[derive(Deserialize)]
struct HiveInput {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    z: Vec<Vec<f64>>,
}

fn hive(cmd: &HiveCommand) -> Result<Verdict, Error> {
    let HiveCommand::Verify { example, input, width, height, tol, dump_csv } = cmd;
    let (h, rep) = if *example {
        let tol = tol.unwrap_or(EXACT_TOL);
        (example_hive(*width, *height)?, verify_example(*width, *height, tol)?)
    } else {
        let path = input.as_ref().ok_or_else(|| Error::Precondition("--input or --example is required".into()))?;
        let d: HiveInput = read_json(path)?;
        let tol = tol.unwrap_or(RECONSTRUCTED_TOL);
        let h = hive_reconstruct(&d.alpha, &d.beta, &d.z, tol)?;
        let rep = verify_continuous_lr(&d.alpha, &d.beta, &d.gamma, &h, tol);
        (h, rep)
    };
    if let Some(p) = dump_csv {
        emit(Some(p), &h.csv())?;
    }
    let text =
        report("horn.hive.v1", json!({"example": example, "W": width, "H": height}), serde_json::to_value(&rep)?);
    if dump_csv.as_deref() == Some(Path::new("-")) {
        eprintln!("{text}");
    } else {
        emit(None, &text)?;
    }
    Ok(rep.pass.into())
}

fn lr(a: &LrArgs) -> Result<Verdict, Error> {
    let p = |v: &[usize]| Partition::new(v.to_vec());
    emit(None, &lr_coeff(&p(&a.lambda)?, &p(&a.mu)?, &p(&a.nu)?).to_string())?;
    Ok(Verdict::Ok)
}

fn examples(cmd: &ExamplesCommand, seed: u64) -> Result<Verdict, Error> {
    match cmd {
        ExamplesCommand::List => {
            let text: String = SCENARIOS.iter().map(|(n, d)| format!("{n}\t{d}\n")).collect();
            emit(None, &text)?;
            Ok(Verdict::Ok)
        }
        ExamplesCommand::Run { name, output } => {
            let rep = scenarios::run(name, seed)?;
            for line in &rep.summary {
                eprintln!("{line}");
            }
            if !rep.violations.is_empty() {
                let mut t = format!("{}\n", InequalityRecord::csv_header());
                rep.violations.iter().take(20).for_each(|r| t += &format!("{}\n", r.csv_row()));
                eprint!("{t}");
            }
            if !rep.reproduced {
                eprintln!("warning: the outcome differs from the worked example");
            }
            let body = serde_json::to_value(&rep)?;
            emit(output.as_deref(), &report(scenarios::SCHEMA, json!({"seed": seed}), body))?;
            Ok((rep.feasible && rep.reproduced).into())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceCap(_) => 3,
        Error::Hypothesis(_) | Error::Stuck(_) | Error::NonConvergence { .. } | Error::Inconsistency(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is configured once");
    }
    let outcome = match &cli.command {
        Command::Triples(a) => triples(a),
        Command::Check(a) => check(a),
        Command::Interpolate(a) => interpolate_cmd(a),
        Command::Partial { command } => partial(command),
        Command::Witness { command } => witness(command, cli.seed),
        Command::Hive { command } => hive(command),
        Command::Lr(a) => lr(a),
        Command::PaperExamples { command } => examples(command, cli.seed),
    };
    match outcome {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
