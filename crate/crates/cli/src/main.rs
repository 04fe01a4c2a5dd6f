use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use deadline_matching::algos::PolicyKind;
use deadline_matching::cover::certificate::{parse_target, verify_certificate, CoverCertificate};
use deadline_matching::cover::lp::{solve_cover_lp, ColumnStrategy, CoverLpVariant, CoverageMode};
use deadline_matching::cover::mask::cycle_power;
use deadline_matching::cover::simplex::PivotRule;
use deadline_matching::cover::transform::{contract_expand, extend_cover, lookahead_cover};
use deadline_matching::gallery::{self, BoundMode};
use deadline_matching::generate::{random_instance, RandomSpec};
use deadline_matching::graph::OnlineInstance;
use deadline_matching::instance_io::{instance_to_json, parse_instance};
use deadline_matching::offline::offline_optimum;
use deadline_matching::report::{
    competitive_report, exact_feasible, write_csv, ArrivalModel, Estimate, ReportConfig, ReportRow,
};
use deadline_matching::stochastic::DepartureModel;

#[derive(Parser)]
#[command(name = "dmatch", version, about = "Online matching with deadlines: simulate, sweep and certify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected value of policies on one instance.
    Simulate(SimulateArgs),
    /// Reports over many instances, written as CSV.
    Sweep(SweepArgs),
    /// Maximum-weight matching of the online graph.
    Offline {
        #[command(flatten)]
        source: Source,
    },
    /// Solve a covering LP and write its certificate.
    CoverLp(CoverLpArgs),
    /// Check a certificate against a target mask.
    VerifyCert {
        #[arg(long)]
        cert: PathBuf,
        /// `cycle:n:d`
        #[arg(long)]
        target: String,
    },
    /// Extend a periodic certificate to a longer cycle.
    ExtendCert {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        n: usize,
        /// Power of the target cycle; defaults to the certificate's deadline.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a cover by k-batches into one for deadline d.
    ContractCert {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shift cover for batching with lookahead.
    LookaheadCert {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a named instance as JSON.
    Gallery(GalleryArgs),
}

#[derive(Args)]
struct Source {
    /// Instance JSON file.
    #[arg(long, conflicts_with = "gallery", required_unless_present = "gallery")]
    instance: Option<PathBuf>,
    /// Gallery instance name.
    #[arg(long, value_parser = gallery_name)]
    gallery: Option<String>,
    /// Gallery parameter `key=value`.
    #[arg(long = "param", requires = "gallery")]
    params: Vec<String>,
}

#[derive(Args)]
struct RunOptions {
    /// Policies, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    policy: Vec<PolicyKind>,
    #[arg(long, value_enum, default_value_t = Arrival::Fixed)]
    arrival: Arrival,
    /// Monte Carlo samples.
    #[arg(long, conflicts_with = "exact")]
    seeds: Option<u64>,
    /// Require exact expectations.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random patiences: `deterministic:D`, `geometric:δ` or JSON.
    #[arg(long)]
    departures: Option<DepartureModel>,
    /// CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    run: RunOptions,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    instance: Vec<PathBuf>,
    #[arg(long, value_parser = gallery_name)]
    gallery: Vec<String>,
    /// Number of random instances.
    #[arg(long, default_value_t = 0)]
    random: usize,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[command(flatten)]
    run: RunOptions,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arrival {
    Fixed,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Lp,
    LpPrime,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    ExtensionSafe,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bound {
    Deterministic,
    Randomized,
}

#[derive(Args)]
struct CoverLpArgs {
    #[arg(long, value_enum)]
    variant: Variant,
    #[arg(long, required_if_eq("variant", "lp"))]
    d: Option<usize>,
    #[arg(long, required_if_eq("variant", "lp-prime"))]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::ExtensionSafe)]
    mode: Mode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GalleryArgs {
    #[arg(long, value_parser = gallery_name, required_unless_present = "list")]
    name: Option<String>,
    #[arg(long = "param")]
    params: Vec<String>,
    /// Print the best ratio an online algorithm can guarantee instead.
    #[arg(long, value_enum)]
    bound: Option<Bound>,
    #[arg(long)]
    list: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn gallery_name(s: &str) -> Result<String, String> {
    let lower = s.to_ascii_lowercase();
    if gallery::NAMES.contains(&lower.as_str()) {
        Ok(lower)
    } else {
        Err(format!("unknown instance; known: {}", gallery::NAMES.join(", ")))
    }
}

/// A failure the user can fix by changing the invocation.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

enum Outcome {
    Ok,
    Rejected,
}

fn load_source(source: &Source) -> Result<(String, OnlineInstance)> {
    if let Some(path) = &source.instance {
        return Ok((stem(path), read_instance(path)?));
    }
    let name = source.gallery.as_deref().expect("clap requires a source");
    let params = gallery::parse_params(&source.params).map_err(|e| Usage(e.to_string()))?;
    let inst = gallery::make_instance(name, &params).map_err(|e| Usage(e.to_string()))?;
    Ok((name.to_string(), inst.instance))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn read_instance(path: &Path) -> Result<OnlineInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.to_instance()?)
}

fn report_config(run: &RunOptions) -> ReportConfig {
    ReportConfig {
        arrival: match run.arrival {
            Arrival::Fixed => ArrivalModel::Fixed,
            Arrival::Uniform => ArrivalModel::Uniform,
        },
        samples: run.seeds,
        seed: run.seed,
        departures: run.departures.clone(),
        ..ReportConfig::default()
    }
}

fn rows_for(id: &str, inst: &OnlineInstance, run: &RunOptions) -> Result<Vec<ReportRow>> {
    let cfg = report_config(run);
    if run.exact && !exact_feasible(inst, &run.policy, &cfg) {
        return Err(Usage(format!("{id}: too large for exact evaluation; use --seeds")).into());
    }
    Ok(competitive_report(id, inst, &run.policy, &cfg)?)
}

fn write_rows(out: &Option<PathBuf>, rows: &[ReportRow]) -> Result<()> {
    match out {
        Some(path) => {
            let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(f, rows)?;
        }
        None => write_csv(io::stdout().lock(), rows)?,
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<Outcome> {
    let (id, inst) = load_source(&args.source)?;
    let rows = rows_for(&id, &inst, &args.run)?;
    let single = rows.len() == 1;
    for r in &rows {
        let prefix = if single { String::new() } else { format!("{}: ", r.policy) };
        match (&r.alg, &r.off, &r.ratio) {
            (Estimate::Exact(a), Estimate::Exact(o), Estimate::Exact(x)) => {
                println!("{prefix}E={a}, OPT={o}, ratio={x}");
            }
            (Estimate::Sampled { mean, stderr }, off, ratio) => println!(
                "{prefix}E={mean:.6} ± {stderr:.6}, OPT={:.6}, ratio={:.6} ({} samples)",
                off.to_f64(),
                ratio.to_f64(),
                r.samples.unwrap_or(0)
            ),
            _ => println!("{prefix}E={}, OPT={}, ratio={}", r.alg, r.off, r.ratio),
        }
    }
    if let Some(path) = &args.run.out {
        write_rows(&Some(path.clone()), &rows)?;
    }
    Ok(Outcome::Ok)
}

fn sweep(args: &SweepArgs) -> Result<Outcome> {
    let mut items: Vec<(String, OnlineInstance)> = Vec::new();
    for path in &args.instance {
        items.push((stem(path), read_instance(path)?));
    }
    for name in &args.gallery {
        items.push((name.clone(), gallery::make_instance(name, &[])?.instance));
    }
    let spec = RandomSpec::new(args.n, args.d);
    for i in 0..args.random {
        let seed = deadline_matching::engine::derive_seed(args.run.seed, "sweep-instance", i as u64);
        items.push((format!("random-{i}"), random_instance(&spec, seed)?));
    }
    if items.is_empty() {
        return Err(Usage("nothing to sweep: give --instance, --gallery or --random".into()).into());
    }
    let mut rows = Vec::new();
    for (id, inst) in &items {
        rows.extend(rows_for(id, inst, &args.run)?);
    }
    write_rows(&args.run.out, &rows)?;
    Ok(Outcome::Ok)
}

fn offline(source: &Source) -> Result<Outcome> {
    let (_, inst) = load_source(source)?;
    let m = offline_optimum(&inst)?;
    println!("OPT={}", m.weight(&inst.graph));
    let pairs: Vec<String> = m.pairs().iter().map(|(a, b)| format!("({a},{b})")).collect();
    println!("pairs={}", pairs.join(" "));
    Ok(Outcome::Ok)
}

/// Write `cert` (to `out` or stdout) after checking it against `C_n^t`.
fn emit_certificate(cert: &CoverCertificate, t: usize, out: &Option<PathBuf>) -> Result<Outcome> {
    let report = verify_certificate(cert, &cycle_power(cert.n, t)?);
    let json = cert.to_json()?;
    match out {
        Some(path) => fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    if report.ok() {
        eprintln!("verified against cycle:{}:{t}", cert.n);
        Ok(Outcome::Ok)
    } else {
        eprintln!("{report}");
        Ok(Outcome::Rejected)
    }
}

fn read_certificate(path: &Path) -> Result<CoverCertificate> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CoverCertificate::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cover_lp(args: &CoverLpArgs) -> Result<Outcome> {
    let variant = match args.variant {
        Variant::Lp => CoverLpVariant::Lp { d: args.d.expect("clap") },
        Variant::LpPrime => CoverLpVariant::LpPrime { k: args.k.expect("clap") },
    };
    let mode = match args.mode {
        Mode::ExtensionSafe => CoverageMode::ExtensionSafe,
        Mode::Literal => CoverageMode::Literal,
    };
    let sol = solve_cover_lp(variant, mode, ColumnStrategy::default(), PivotRule::default())
        .map_err(|e| Usage(e.to_string()))?;
    println!("alpha = {}", sol.alpha);
    println!(
        "columns: {} labelings, {} distinct, {} in the final LP, {} in the certificate",
        sol.labelings,
        sol.distinct_columns,
        sol.kept_columns,
        sol.certificate.columns.len()
    );
    emit_certificate(&sol.certificate, variant.target_power(), &args.out)
}

fn gallery_cmd(args: &GalleryArgs) -> Result<Outcome> {
    if args.list {
        for name in gallery::NAMES {
            println!("{name}");
        }
        return Ok(Outcome::Ok);
    }
    let name = args.name.as_deref().expect("clap");
    let params = gallery::parse_params(&args.params).map_err(|e| Usage(e.to_string()))?;
    if let Some(bound) = args.bound {
        let mode = match bound {
            Bound::Deterministic => BoundMode::Deterministic,
            Bound::Randomized => BoundMode::Randomized,
        };
        let b = gallery::optimal_online_bounds(name, &params, mode).map_err(|e| Usage(e.to_string()))?;
        println!("{b}");
        return Ok(Outcome::Ok);
    }
    let inst = gallery::make_instance(name, &params).map_err(|e| Usage(e.to_string()))?;
    let json = instance_to_json(&inst.instance);
    match &args.out {
        Some(path) => fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(Outcome::Ok)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Offline { source } => offline(&source),
        Command::CoverLp(a) => cover_lp(&a),
        Command::VerifyCert { cert, target } => {
            let cert = read_certificate(&cert)?;
            let target = parse_target(&target).map_err(|e| Usage(e.to_string()))?;
            let report = verify_certificate(&cert, &target);
            println!("{report}");
            Ok(if report.ok() { Outcome::Ok } else { Outcome::Rejected })
        }
        Command::ExtendCert { cert, n, t, out } => {
            let cert = read_certificate(&cert)?;
            let t = t.unwrap_or(cert.d);
            let ext = extend_cover(&cert, n, t).map_err(|e| Usage(e.to_string()))?;
            eprintln!("alpha = {}", ext.alpha);
            emit_certificate(&ext, t, &out)
        }
        Command::ContractCert { cert, d, out } => {
            let cert = read_certificate(&cert)?;
            let rep = contract_expand(&cert, d).map_err(|e| Usage(e.to_string()))?;
            eprintln!(
                "case {:?}, u = {}, v = {}, subsets = {}, factor = {} (pair {}, square {}), alpha = {}",
                rep.case,
                rep.u,
                rep.v,
                rep.subsets,
                rep.factor,
                rep.pair_factor,
                rep.square_factor,
                rep.certificate.alpha
            );
            emit_certificate(&rep.certificate, d, &out)
        }
        Command::LookaheadCert { n, d, l, out } => {
            let cert = lookahead_cover(n, d, l).map_err(|e| Usage(e.to_string()))?;
            eprintln!("alpha = {}", cert.alpha);
            emit_certificate(&cert, d, &out)
        }
        Command::Gallery(a) => gallery_cmd(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(1),
        Err(e) => {
            let _ = io::stdout().flush();
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
