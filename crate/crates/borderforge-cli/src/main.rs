use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use borderforge::bba::{compute_border_basis, BbaConfig, BorderBasis, RunTrace, Variant};
use borderforge::bench::{run_benchmark, SuiteConfig};
use borderforge::datagen::{extract_samples, tokenize_infix, tokenize_monomial, write_samples, DatagenConfig};
use borderforge::linalg::Lookup;
use borderforge::obba::{run_obba, ObbaConfig, OracleSpec};
use borderforge::sampling::{derive_seed, generate_instance, InstanceConfig};
use borderforge::{Error, Polynomial, Ring, TermOrder};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(name = "borderforge", version, about = "Border bases over prime fields")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed for everything random.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Term order.
    #[arg(long, global = true, default_value = "degrevlex")]
    order: TermOrder,
    /// Print progress and summaries to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Global {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the border basis of a polynomial system.
    Solve(SolveArgs),
    /// Sample border bases from points and transformed generator sets.
    Sample(SampleArgs),
    /// Extract oracle training samples from hindsight runs.
    Datagen(DatagenArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    field_p: u64,
    #[arg(long)]
    nvars: usize,
    /// One polynomial per line; `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    degree_cap: Option<u32>,
    #[arg(long, default_value = "ibba")]
    variant: Variant,
    #[arg(long, default_value = "fge")]
    elim: Lookup,
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// none, perfect, empty, full, adversarial, random[:KEEP], replay:FILE or external:ADDR.
    #[arg(long, default_value = "none")]
    oracle: OracleSpec,
    #[arg(long, default_value_t = 5)]
    oracle_budget: u32,
    #[arg(long, default_value_t = 0.9)]
    gap_threshold: f64,
    #[arg(long, default_value_t = 5)]
    truncate: usize,
    /// Seconds to wait for an external oracle.
    #[arg(long, default_value_t = 10.0)]
    oracle_timeout: f64,
    /// Print order ideal, basis and trace as one JSON object.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, default_value_t = 31)]
    field_p: u64,
    #[arg(long, default_value_t = 3)]
    nvars: usize,
    /// Degree bound of the sampled border bases.
    #[arg(long, default_value_t = 2)]
    max_degree: u32,
    /// Per-variable caps for the order ideal sampler.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    degree_caps: Option<Vec<u32>>,
    #[arg(long)]
    transform_rows: Option<usize>,
    #[arg(long, default_value_t = 1)]
    transform_degree: u32,
    #[arg(long, default_value_t = 10)]
    transform_terms: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
}

impl InstanceArgs {
    fn config(&self, order: TermOrder) -> Result<InstanceConfig, Failure> {
        if self.nvars < 2 {
            return Err(Error::InvalidArity(self.nvars).into());
        }
        if let Some(caps) = &self.degree_caps {
            if caps.len() != self.nvars {
                return Err(Failure::Usage(format!("--degree-caps needs {} values", self.nvars)));
            }
        }
        Ok(InstanceConfig {
            p: self.field_p,
            n: self.nvars,
            max_degree: self.max_degree,
            degree_caps: self.degree_caps.clone(),
            transform_rows: self.transform_rows,
            transform_degree: self.transform_degree,
            transform_terms: self.transform_terms,
            order,
            ..Default::default()
        })
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutScheme {
    Infix,
    Monomial,
    Json,
}

#[derive(Args)]
struct DatagenArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 5)]
    last_k: usize,
    #[arg(long, default_value_t = 5)]
    truncate: usize,
    #[arg(long, value_enum, default_value = "json")]
    scheme: OutScheme,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads; overrides the suite and BORDERFORGE_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Domain(Error::Io(e))
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotPrime(_) => "not_prime",
        Error::ModulusOutOfRange(_) => "modulus_out_of_range",
        Error::ZeroInverse => "zero_inverse",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::ExponentOverflow { .. } => "exponent_overflow",
        Error::TooManyVariables(_) => "too_many_variables",
        Error::Parse(_) => "parse",
        Error::NotAnOrderIdeal => "not_an_order_ideal",
        Error::DuplicateLeadingTerm(_) => "duplicate_leading_term",
        Error::MissingBorderGenerator(_) => "missing_border_generator",
        Error::DegreeBudgetExceeded { .. } => "degree_budget_exceeded",
        Error::OracleUnavailable(_) => "oracle_unavailable",
        Error::InvalidArity(_) => "invalid_arity",
        Error::TooManyPoints { .. } => "too_many_points",
        Error::RankDeficient => "rank_deficient",
        Error::Schema { .. } => "schema",
        Error::VariantDisagreement { .. } => "variant_disagreement",
        Error::InvalidConfig(_) => "invalid_config",
        Error::Io(_) => "io",
    }
}

fn report(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message }));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report("usage", e.to_string().trim_end());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            report("usage", &msg);
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            report(error_kind(&e), &e.to_string());
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(a) => solve(&cli.global, a),
        Command::Sample(a) => sample(&cli.global, a),
        Command::Datagen(a) => datagen(&cli.global, a),
        Command::Bench(a) => bench(&cli.global, a),
    }
}

/// `-` or no path means stdout.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)?;
    }
    Ok(text)
}

fn parse_system(ring: &Ring, text: &str) -> Result<Vec<Polynomial>, Failure> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f = ring.parse(line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        out.push(f);
    }
    Ok(out)
}

fn solve(g: &Global, a: SolveArgs) -> Result<(), Failure> {
    let ring = Ring::new(a.field_p, a.nvars, g.order)?;
    let inputs = parse_system(&ring, &read_input(&a.input)?)?;
    let timeout = Duration::try_from_secs_f64(a.oracle_timeout)
        .map_err(|_| Failure::Usage(format!("bad --oracle-timeout {}", a.oracle_timeout)))?;
    let (bb, trace): (BorderBasis, RunTrace) = match a.oracle.build_with_timeout(g.seed(), timeout)? {
        None => compute_border_basis(&ring, &inputs, &BbaConfig { variant: a.variant, lookup: a.elim, degree_cap: a.degree_cap })?,
        Some(mut oracle) => {
            let cfg = ObbaConfig {
                budget: a.oracle_budget,
                gap_threshold: a.gap_threshold,
                truncate: a.truncate,
                lookup: a.elim,
                degree_cap: a.degree_cap,
            };
            run_obba(&ring, &inputs, &mut oracle, &cfg)?
        }
    };
    if let Some(path) = &a.trace_out {
        let mut w = output(Some(path))?;
        serde_json::to_writer_pretty(&mut w, &trace).map_err(io::Error::from)?;
        w.flush()?;
    }
    if g.verbose > 0 {
        eprintln!(
            "|O| = {}, {} iterations, {} enlargements, {} zero reductions, {} ops",
            bb.order_ideal().len(),
            trace.iterations.len(),
            trace.enlargements,
            trace.total_zero_reductions(),
            trace.total_ops()
        );
    }
    let mut out = output(None)?;
    if a.json {
        let v = json!({
            "order_ideal": bb.order_ideal().terms().iter().map(|t| ring.format(&ring.monomial(1, *t))).collect::<Vec<_>>(),
            "basis": bb.polys().iter().map(|p| ring.format(p)).collect::<Vec<_>>(),
            "trace": trace,
        });
        writeln!(out, "{v}")?;
    } else {
        for p in bb.polys() {
            writeln!(out, "{}", ring.format(p))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn sample(g: &Global, a: SampleArgs) -> Result<(), Failure> {
    let cfg = a.instance.config(g.order)?;
    let ring = cfg.ring()?;
    let records: Vec<serde_json::Value> = (0..a.instance.count)
        .into_par_iter()
        .map(|i| generate_instance(&cfg, derive_seed(g.seed(), i as u64)).map(|inst| inst.to_record(&ring)))
        .collect::<Result<_, Error>>()?;
    let mut out = output(a.out.as_deref())?;
    for r in &records {
        writeln!(out, "{r}")?;
    }
    out.flush()?;
    if g.verbose > 0 {
        eprintln!("wrote {} instances", records.len());
    }
    Ok(())
}

fn datagen(g: &Global, a: DatagenArgs) -> Result<(), Failure> {
    let cfg = a.instance.config(g.order)?;
    let ring = cfg.ring()?;
    if a.truncate == 0 {
        return Err(Failure::Usage("--truncate must be at least 1".into()));
    }
    let dcfg = DatagenConfig { last_k: a.last_k, truncate: a.truncate };
    let per_instance: Vec<Vec<_>> = (0..a.instance.count)
        .into_par_iter()
        .map(|i| {
            let inst = generate_instance(&cfg, derive_seed(g.seed(), i as u64))?;
            extract_samples(&ring, &inst.inputs, &dcfg)
        })
        .collect::<Result<_, Error>>()?;
    let samples: Vec<_> = per_instance.into_iter().flatten().collect();
    let mut out = output(a.out.as_deref())?;
    match a.scheme {
        OutScheme::Json => write_samples(&mut out, &samples)?,
        OutScheme::Infix | OutScheme::Monomial => {
            for s in &samples {
                let tokens = match a.scheme {
                    OutScheme::Infix => tokenize_infix(s),
                    _ => tokenize_monomial(s),
                };
                let line = json!({ "tokens": tokens.to_text(), "labels": s.labels, "is_terminal": s.is_terminal });
                writeln!(out, "{line}")?;
            }
        }
    }
    out.flush()?;
    if g.verbose > 0 {
        eprintln!("wrote {} samples from {} instances", samples.len(), a.instance.count);
    }
    Ok(())
}

fn bench(g: &Global, a: BenchArgs) -> Result<(), Failure> {
    let mut suite = SuiteConfig::load(&a.suite)?;
    if a.threads.is_some() {
        suite.threads = a.threads;
    }
    if let Some(seed) = g.seed {
        suite.seed = seed;
    }
    let report = run_benchmark(&suite)?;
    if let Some(path) = &a.out {
        let mut w = output(Some(path))?;
        w.write_all(report.to_json().as_bytes())?;
        w.flush()?;
    }
    if let Some(path) = &a.csv {
        report.write_csv(File::create(path)?)?;
    }
    let mut out = output(None)?;
    for grp in &report.summary {
        writeln!(out, "p={} n={} degree<={} instances={}", grp.p, grp.n, grp.max_degree, grp.count)?;
        for v in &grp.variants {
            writeln!(
                out,
                "  {:<9} {:>10.3} ± {:<9.3} ms  ops {:>12.0}  zero {:>8.1}  final-stage zero {:>8.1}  speedup {:.2} (median {:.2})",
                v.variant.name(),
                v.wall_ms.mean,
                v.wall_ms.std,
                v.ops.mean,
                v.zero_reductions.mean,
                v.final_stage_zero_reductions.mean,
                v.speedup_mean,
                v.speedup_median
            )?;
            if let (Some(excess), Some(missed)) = (v.error_proxy_excess, v.error_proxy_missed) {
                writeln!(out, "    error proxy vs perfect-oracle labels: excess {excess:.1}  missed {missed:.1}")?;
            }
        }
        if let Some(rho) = grp.gap_distance_spearman {
            writeln!(out, "  border gap vs distance: spearman {rho:.3}")?;
        }
    }
    out.flush()?;
    Ok(())
}
