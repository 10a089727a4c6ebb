//! Command-line driver: every construction and experiment as a subcommand
//! with reproducible configuration and machine-readable output.
//!
//! Each run writes a JSON summary (also printed to stdout) and CSV detail
//! rows under `--out`; identical `(argv, seed)` produce byte-identical
//! files. Rationals are entered as `p/q`, dyadics as `k/2^e`; decimal input
//! is rejected to avoid silent rounding.
//!
//! Exit codes: 0 ok, 2 config error, 3 budget error, 4 check failure (with
//! `--check`).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::json;

use crate::bits::Bits;
use crate::complexity::{
    dimension_proxy, lz_estimate, tree_sequence, Calibration, DimensionVerdict, ResidueMask,
};
use crate::dyadic::{total_length, DyadicRational, HalfOpenInterval};
use crate::energy::{density_check, energy_exact, energy_mc, EnergyExact};
use crate::events::{
    atom_measure, check_nonatomic, EstimateMethod, EventAtom, EventError, MeasureConfig,
    MethodChoice,
};
use crate::experiments::{
    lil_sweep, scaling_test, zero_hit_experiment, LilConfig, ScalingConfig, ZeroHitConfig,
};
use crate::interval_map::{
    build_assignment, random_test, transfer_test_back, transfer_test_forward, MapError, MlTest,
};
use crate::report::{
    parse_dyadic, parse_events_text, parse_kv_text, parse_rational, write_csv, write_json,
};
use crate::source::BitSource;
use crate::walk::WalkPath;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::CheckFailed(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Budget(m) | CliError::CheckFailed(m) => m,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn event_err(e: EventError) -> CliError {
    match e {
        EventError::SampleBudget { .. }
        | EventError::QuadratureBudget { .. }
        | EventError::PrecisionTooFine { .. }
        | EventError::DepthBudget { .. } => CliError::Budget(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn experiment_err(e: crate::experiments::ExperimentError) -> CliError {
    match e {
        crate::experiments::ExperimentError::ResolutionBudget { .. } => {
            CliError::Budget(e.to_string())
        }
        other => CliError::Config(other.to_string()),
    }
}

fn map_err(e: MapError) -> CliError {
    match e {
        MapError::Event(inner) => event_err(inner),
        other => CliError::Config(other.to_string()),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "wienerlab",
    version,
    about = "Random-walk Brownian approximants, exact event-algebra-to-interval maps, and dimension experiments",
    after_help = "Rationals are p/q (no decimals); dyadics are k/2^e. Outputs: <out>/<cmd>_summary.json and <out>/<cmd>_*.csv."
)]
struct Cli {
    /// Output directory for JSON summaries and CSV details.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = all cores). Outputs are invariant to this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample or decode a slope-±√n walk; evaluate, list zero intervals,
    /// coarsen, or halve it.
    Walk(WalkArgs),
    /// Build the event-algebra-to-interval assignment and export the atom
    /// table.
    Phi(PhiArgs),
    /// Wiener measure of one event atom to dyadic precision (or, with
    /// --nonatomic, the max-atom check over a generator prefix).
    Measure(MeasureArgs),
    /// Transfer a seeded test forward onto intervals, and optionally a
    /// cylinder test back onto events across increasing depths.
    Transfer(TransferArgs),
    /// Incremental-parsing compression rate of a bit sequence.
    Rate(RateArgs),
    /// Exact and Monte Carlo energy of a masked tree at one exponent.
    Energy(EnergyArgs),
    /// Local mass density ratios of a masked tree across depths.
    Density(DensityArgs),
    /// Iterated-logarithm statistic sweep over seeded paths and random
    /// times.
    Lil(LilArgs),
    /// Zero-set hits of seeded walks against a masked tree across dyadic
    /// scales.
    Zerohit(ZerohitArgs),
    /// Distributional check of x(a·t)/√a against x(t) across independent
    /// seeds.
    Scaling(ScalingArgs),
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: walk_breakpoints.csv with i,t,prefix_sum,value (value = prefix_sum/sqrt(n)).")]
struct WalkArgs {
    /// Number of steps (the path has slope ±√n on each step).
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Explicit 0/1 code; omit to sample from the seed.
    #[arg(long)]
    bits: Option<String>,
    /// Times (rationals in [0,1]) to evaluate, repeatable.
    #[arg(long = "eval")]
    eval: Vec<String>,
    /// Emit the coarse code at this level (requires n = 2^K).
    #[arg(long)]
    coarse: Option<u32>,
    /// Also re-encode at half resolution and report tie count.
    #[arg(long, default_value_t = false)]
    halve: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: phi_atoms.csv with mask,left,right,exponent (endpoints are left/2^exponent and right/2^exponent).")]
struct PhiArgs {
    /// Events config file: one "<time> <threshold>" rational pair per line.
    #[arg(long)]
    generators: PathBuf,
    /// Generators to use (atoms are masks of this length).
    #[arg(long)]
    depth: usize,
    /// Split measures are taken on the 2^-k grid with bracket width 2^-k.
    #[arg(long = "precision", value_name = "K")]
    precision: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: measure_detail.csv with mask,method,lower,upper,width.")]
struct MeasureArgs {
    /// Events config file (see phi).
    #[arg(long)]
    generators: PathBuf,
    /// Atom mask over the leading generators (e.g. 101); empty = whole
    /// space.
    #[arg(long, default_value = "")]
    mask: String,
    /// Bracket width target 2^-k.
    #[arg(long, value_name = "K")]
    precision: u64,
    /// auto | quadrature | montecarlo
    #[arg(long, default_value = "auto")]
    method: String,
    /// Monte Carlo sample count (with --method montecarlo).
    #[arg(long)]
    samples: Option<u64>,
    /// Run the non-atomicity check at --depth against --bound instead.
    #[arg(long, default_value_t = false)]
    nonatomic: bool,
    /// Depth for --nonatomic.
    #[arg(long)]
    depth: Option<usize>,
    /// Max-atom bound for --nonatomic, as a dyadic k/2^e.
    #[arg(long)]
    bound: Option<String>,
    /// With --nonatomic: exit 4 when the check fails.
    #[arg(long, default_value_t = false)]
    check: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: transfer_forward.csv with level,bound,total_length,intervals; with --cylinders also transfer_back.csv with depth,deficit,atoms_accepted.")]
struct TransferArgs {
    /// Events config file (see phi).
    #[arg(long)]
    generators: PathBuf,
    /// Assignment depth.
    #[arg(long)]
    depth: usize,
    /// Measure grid exponent for the assignment build.
    #[arg(long, default_value_t = 12)]
    precision: u64,
    /// Number of test levels (level n has bound 2^-n).
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Comma-separated cylinder labels (0/1 strings; empty string = [0,1])
    /// for the backward transfer.
    #[arg(long)]
    cylinders: Option<String>,
    /// Comparison fuel for endpoint searches in the backward transfer.
    #[arg(long, default_value_t = 128)]
    fuel: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: rate_detail.csv with kind,n,phrases,bits,rate,normalized (normalized = rate over the coin median at the same length).")]
struct RateArgs {
    /// zeros | coin | tree (tree uses --p/--q), or read --input.
    #[arg(long, default_value = "coin")]
    kind: String,
    /// Sequence length in bits.
    #[arg(long, default_value_t = 131_072)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 3)]
    q: u64,
    /// 0/1 text file overriding --kind.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Optional rational exponent for the normalized-rate verdict.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: energy_detail.csv with p,q,alpha,value,tail,ci_low,ci_high (value/tail from the exact series, ci from sampling).")]
struct EnergyArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    /// Energy exponent as a rational p/q in [0,1).
    #[arg(long)]
    alpha: String,
    /// Monte Carlo pair count.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Sampling depth (default: derived from the sample count).
    #[arg(long)]
    depth: Option<usize>,
    /// Series terms summed before the exact remainder.
    #[arg(long, default_value_t = 64)]
    terms: usize,
    /// Exit 4 unless the Monte Carlo interval contains the exact value.
    #[arg(long, default_value_t = false)]
    check: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: density_detail.csv with p,q,alpha,depth,max_ratio.")]
struct DensityArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    /// Density exponent as a rational.
    #[arg(long)]
    alpha: String,
    /// Sampled points per depth.
    #[arg(long, default_value_t = 64)]
    samples: u64,
    /// Depths as lo:hi[:step] or a comma list, e.g. 10:40:3.
    #[arg(long, default_value = "10:40:3")]
    depths: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: lil_detail.csv with path_index,time_index,sup_statistic (time = time_index/2^K).")]
struct LilArgs {
    /// key=value config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of seeded paths [default: 200].
    #[arg(long)]
    seeds: Option<usize>,
    /// Resolution exponent K: paths have 2^K steps [default: 20].
    #[arg(long = "resolution-exp", visible_alias = "K")]
    resolution_exp: Option<u32>,
    /// Random times per path [default: 100].
    #[arg(long)]
    times: Option<usize>,
    /// Largest grid step is 2^-coarsest; needs >= 2 so the iterated log is
    /// positive [default: 6].
    #[arg(long)]
    coarsest: Option<u32>,
    /// Smallest grid step is 2^-finest [default: 18].
    #[arg(long)]
    finest: Option<u32>,
    /// Band for the median, as rationals [default: 3/5 and 7/5].
    #[arg(long)]
    band_lo: Option<String>,
    #[arg(long)]
    band_hi: Option<String>,
    /// 99th-percentile limit, as a rational [default: 5/2].
    #[arg(long)]
    p99_limit: Option<String>,
    /// Exit 4 unless the median is in band and p99 under the limit.
    #[arg(long, default_value_t = false)]
    check: bool,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: zerohit_scales.csv with scale,trials,hits,p_hat,ci_low,ci_high; zerohit_witnesses.csv with scale,path_index,time_index,expansion,cert_depth_reached,rate,normalized_rate,passes.")]
struct ZerohitArgs {
    /// key=value config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// [default: 2]
    #[arg(long)]
    p: Option<u64>,
    /// [default: 3]
    #[arg(long)]
    q: Option<u64>,
    /// Scales as lo:hi (windows [2^-(n+1), 2^-n]) [default: 2:8].
    #[arg(long)]
    scales: Option<String>,
    /// Number of seeded paths [default: 10000].
    #[arg(long)]
    seeds: Option<usize>,
    /// Resolution exponent K [default: 20].
    #[arg(long = "resolution-exp", visible_alias = "K")]
    resolution_exp: Option<u32>,
    /// Certificate length after the leading zeros of the witness expansion
    /// [default: 4].
    #[arg(long)]
    cert_depth: Option<usize>,
    /// Witness pass threshold on the normalized rate, as a rational
    /// [default: 4/5].
    #[arg(long)]
    rate_threshold: Option<String>,
    /// Exit 4 unless hits are positive, nondecreasing within CIs, and >= 90%
    /// of witnesses pass.
    #[arg(long, default_value_t = false)]
    check: bool,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV: scaling_detail.csv with t,a,scaled_steps,base_steps,ks_distance,critical_value,pass.")]
struct ScalingArgs {
    /// key=value config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scale factor: 2 or 4 [default: 2].
    #[arg(long)]
    a: Option<u32>,
    /// Comma-separated rational times with a·t <= 1 [default: 1/8,1/4,1/2].
    #[arg(long = "t")]
    t_points: Option<String>,
    /// Samples per side [default: 100000].
    #[arg(long)]
    samples: Option<usize>,
    /// Resolution exponent K [default: 20].
    #[arg(long = "resolution-exp", visible_alias = "K")]
    resolution_exp: Option<u32>,
    /// KS significance level as a rational [default: 1/100].
    #[arg(long)]
    significance: Option<String>,
    /// Exit 4 unless every distance is below the critical value.
    #[arg(long, default_value_t = false)]
    check: bool,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
}

/// `key=value` entries from an optional config file.
struct KvConfig(std::collections::BTreeMap<String, String>);

impl KvConfig {
    fn load(path: &Option<PathBuf>) -> Result<Self, CliError> {
        let map = match path {
            None => Default::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                parse_kv_text(&text).map_err(config_err)?
            }
        };
        Ok(KvConfig(map))
    }

    /// flag > config file > built-in default
    fn merge<T: std::str::FromStr + Clone>(
        &self,
        flag: &Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        if let Some(value) = flag {
            return Ok(value.clone());
        }
        match self.0.get(key) {
            Some(text) => text
                .parse::<T>()
                .map_err(|_| CliError::Config(format!("config key {key}: cannot parse {text:?}"))),
            None => Ok(default),
        }
    }
}

/// Entry point for the binary: parse `std::env::args`, run, report.
pub fn main_entry() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    match run(&argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Parse and execute; returns the exit code on success paths that printed
/// help/version, else 0.
pub fn run(argv: &[String]) -> Result<i32, CliError> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return Ok(0);
        }
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(config_err)?;
    pool.install(|| dispatch(&cli))
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Walk(args) => cmd_walk(out, args),
        Command::Phi(args) => cmd_phi(out, args),
        Command::Measure(args) => cmd_measure(out, args),
        Command::Transfer(args) => cmd_transfer(out, args),
        Command::Rate(args) => cmd_rate(out, args),
        Command::Energy(args) => cmd_energy(out, args),
        Command::Density(args) => cmd_density(out, args),
        Command::Lil(args) => cmd_lil(out, args),
        Command::Zerohit(args) => cmd_zerohit(out, args),
        Command::Scaling(args) => cmd_scaling(out, args),
    }
}

fn emit(out: &Path, name: &str, summary: &serde_json::Value) -> Result<(), CliError> {
    write_json(&out.join(format!("{name}_summary.json")), summary).map_err(config_err)?;
    println!(
        "{}",
        serde_json::to_string_pretty(summary).map_err(config_err)?
    );
    Ok(())
}

fn load_generators(path: &Path) -> Result<Vec<crate::events::GeneratorEvent>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_events_text(&text).map_err(config_err)
}

fn parse_mask(s: &str) -> Result<Bits, CliError> {
    s.parse::<Bits>().map_err(config_err)
}

fn parse_range(s: &str) -> Result<Vec<u32>, CliError> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |x: &str| {
            x.parse::<u32>().map_err(|_| {
                CliError::Config(format!("malformed range {s:?} (expected lo:hi[:step])"))
            })
        };
        match parts.as_slice() {
            [lo, hi] => Ok((parse(lo)?..=parse(hi)?).collect()),
            [lo, hi, step] => {
                let step = parse(step)?.max(1);
                Ok((parse(lo)?..=parse(hi)?).step_by(step as usize).collect())
            }
            _ => Err(CliError::Config(format!("malformed range {s:?}"))),
        }
    } else {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|_| CliError::Config(format!("malformed depth list {s:?}")))
            })
            .collect()
    }
}

fn rational_f64(s: &str) -> Result<f64, CliError> {
    parse_rational(s)
        .map_err(config_err)?
        .to_f64()
        .ok_or_else(|| CliError::Config(format!("rational {s} out of f64 range")))
}

fn dyadic_pair(x: &DyadicRational, exponent: u64) -> String {
    x.numerator_at(exponent)
        .expect("exponent chosen as the max over the row")
        .to_string()
}

fn cmd_walk(out: &Path, args: &WalkArgs) -> Result<i32, CliError> {
    let path = match &args.bits {
        Some(text) => WalkPath::decode(args.n, parse_mask(text)?).map_err(config_err)?,
        None => {
            let mut src = BitSource::derived(args.seed, "walk", 0);
            WalkPath::sample(args.n, &mut src).map_err(config_err)?
        }
    };
    let evals: Vec<serde_json::Value> = args
        .eval
        .iter()
        .map(|s| {
            let t = parse_rational(s).map_err(config_err)?;
            let v = path.eval(&t).map_err(config_err)?;
            Ok(json!({"t": s, "coeff": v.coeff.to_string(), "value": v.to_f64()}))
        })
        .collect::<Result<_, CliError>>()?;
    let coarse = match args.coarse {
        Some(level) => Some(path.coarse_code(level).map_err(config_err)?.to_string()),
        None => None,
    };
    let halved = if args.halve {
        let scaled = path.scale_half().map_err(config_err)?;
        Some(json!({"path": scaled.path.to_string(), "ties": scaled.tie_count}))
    } else {
        None
    };
    let zeros = path.zero_intervals();
    let sums = path.prefix_sums();
    let rows = (0..=args.n).map(|i| {
        let t = format!("{i}/{}", args.n);
        let value = sums[i] as f64 / (args.n as f64).sqrt();
        format!("{i},{t},{},{value}", sums[i])
    });
    write_csv(
        &out.join("walk_breakpoints.csv"),
        "i,t,prefix_sum,value",
        rows,
    )
    .map_err(config_err)?;
    let summary = json!({
        "command": "walk",
        "config": {"n": args.n, "seed": args.seed, "bits_given": args.bits.is_some()},
        "path": path.to_string(),
        "zero_intervals": zeros,
        "evals": evals,
        "coarse": coarse,
        "halved": halved,
    });
    emit(out, "walk", &summary)?;
    Ok(0)
}

fn cmd_phi(out: &Path, args: &PhiArgs) -> Result<i32, CliError> {
    let generators = load_generators(&args.generators)?;
    if args.depth > generators.len() {
        return Err(CliError::Config(format!(
            "depth {} exceeds the {} configured generators",
            args.depth,
            generators.len()
        )));
    }
    let config = MeasureConfig {
        seed: args.seed,
        ..MeasureConfig::default()
    };
    let assignment =
        build_assignment(&generators, args.depth, args.precision, &config).map_err(map_err)?;
    let rows: Vec<String> = assignment
        .atoms()
        .map(|(mask, interval)| {
            let exponent = interval.left().exponent().max(interval.right().exponent());
            format!(
                "{mask},{},{},{exponent}",
                dyadic_pair(interval.left(), exponent),
                dyadic_pair(interval.right(), exponent),
            )
        })
        .collect();
    write_csv(&out.join("phi_atoms.csv"), "mask,left,right,exponent", rows).map_err(config_err)?;
    let lengths: Vec<serde_json::Value> = assignment
        .atoms()
        .map(|(mask, iv)| json!({"mask": mask.to_string(), "length": iv.length().to_f64()}))
        .collect();
    let union: DyadicRational = total_length(
        &assignment
            .atoms()
            .map(|(_, iv)| iv.clone())
            .collect::<Vec<HalfOpenInterval>>(),
    );
    let summary = json!({
        "command": "phi",
        "config": {
            "generators": args.generators.display().to_string(),
            "depth": args.depth,
            "precision": args.precision,
            "seed": args.seed,
            "generator_order": generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        },
        "error_budget": assignment.error_budget().to_string(),
        "atoms": assignment.atoms().count(),
        "total_length": union.to_string(),
        "partition_exact": union == DyadicRational::one(),
        "atom_lengths": lengths,
    });
    emit(out, "phi", &summary)?;
    Ok(0)
}

fn cmd_measure(out: &Path, args: &MeasureArgs) -> Result<i32, CliError> {
    let generators = load_generators(&args.generators)?;
    let method = match args.method.as_str() {
        "auto" => MethodChoice::Auto,
        "quadrature" => MethodChoice::ForceQuadrature,
        "montecarlo" => MethodChoice::ForceMonteCarlo {
            samples: args.samples.unwrap_or(1_000_000),
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown method {other:?} (auto | quadrature | montecarlo)"
            )))
        }
    };
    let config = MeasureConfig {
        seed: args.seed,
        method,
        ..MeasureConfig::default()
    };
    if args.nonatomic {
        let depth = args
            .depth
            .ok_or_else(|| CliError::Config("--nonatomic requires --depth".into()))?;
        let bound = parse_dyadic(
            args.bound
                .as_deref()
                .ok_or_else(|| CliError::Config("--nonatomic requires --bound".into()))?,
        )
        .map_err(config_err)?;
        let report = check_nonatomic(&generators, depth, &bound, args.precision, &config)
            .map_err(event_err)?;
        let summary = json!({
            "command": "measure",
            "mode": "nonatomic",
            "config": {"generators": args.generators.display().to_string(), "depth": depth,
                        "bound": bound.to_string(), "precision": args.precision, "seed": args.seed},
            "max_upper": report.max_upper.to_string(),
            "max_upper_f64": report.max_upper.to_f64(),
            "worst_mask": report.worst_mask.to_string(),
            "atoms_evaluated": report.atoms_evaluated,
            "pruned_empty": report.pruned_empty,
            "pass": report.pass,
        });
        emit(out, "measure", &summary)?;
        if args.check && !report.pass {
            return Err(CliError::CheckFailed(format!(
                "max atom upper bound {} exceeds {}",
                report.max_upper, bound
            )));
        }
        return Ok(0);
    }
    let mask = parse_mask(&args.mask)?;
    let atom = EventAtom::new(&generators, mask.clone()).map_err(event_err)?;
    let estimate = atom_measure(&atom, args.precision, &config).map_err(event_err)?;
    let method_name = match estimate.method {
        EstimateMethod::Quadrature => "quadrature".to_string(),
        EstimateMethod::MonteCarlo { samples } => format!("montecarlo[{samples}]"),
    };
    write_csv(
        &out.join("measure_detail.csv"),
        "mask,method,lower,upper,width",
        [format!(
            "{mask},{method_name},{},{},{}",
            estimate.lower.to_f64(),
            estimate.upper.to_f64(),
            estimate.width().to_f64()
        )],
    )
    .map_err(config_err)?;
    let summary = json!({
        "command": "measure",
        "config": {"generators": args.generators.display().to_string(), "mask": mask.to_string(),
                    "precision": args.precision, "method": args.method, "samples": args.samples,
                    "seed": args.seed},
        "lower": estimate.lower.to_string(),
        "upper": estimate.upper.to_string(),
        "lower_f64": estimate.lower.to_f64(),
        "upper_f64": estimate.upper.to_f64(),
        "width": estimate.width().to_f64(),
        "method": method_name,
    });
    emit(out, "measure", &summary)?;
    Ok(0)
}

fn cmd_transfer(out: &Path, args: &TransferArgs) -> Result<i32, CliError> {
    let generators = load_generators(&args.generators)?;
    if args.depth > generators.len() {
        return Err(CliError::Config(format!(
            "depth {} exceeds the {} configured generators",
            args.depth,
            generators.len()
        )));
    }
    let config = MeasureConfig {
        seed: args.seed,
        ..MeasureConfig::default()
    };
    let assignment =
        build_assignment(&generators, args.depth, args.precision, &config).map_err(map_err)?;
    let mut test_src = BitSource::derived(args.seed, "transfer-test", 0);
    let mut test = random_test(&assignment, args.levels, &mut test_src);
    test.slack = DyadicRational::zero();
    let forward = transfer_test_forward(&test, &assignment).map_err(map_err)?;
    let rows: Vec<String> = forward
        .levels
        .iter()
        .enumerate()
        .map(|(i, level)| {
            format!(
                "{},{},{},{}",
                i + 1,
                MlTest::level_bound(i).to_f64(),
                level.total_length.to_f64(),
                level.intervals.len()
            )
        })
        .collect();
    write_csv(
        &out.join("transfer_forward.csv"),
        "level,bound,total_length,intervals",
        rows,
    )
    .map_err(config_err)?;

    let mut back_json = serde_json::Value::Null;
    if let Some(cyl_text) = &args.cylinders {
        let cylinders: Vec<Bits> = cyl_text
            .split(',')
            .map(|s| parse_mask(s.trim()))
            .collect::<Result<_, _>>()?;
        // deficits across depths 1..=depth for the same cylinder family
        let mut rows = Vec::new();
        let mut deficits = Vec::new();
        for d in 1..=args.depth {
            let partial =
                build_assignment(&generators, d, args.precision, &config).map_err(map_err)?;
            let levels = transfer_test_back(std::slice::from_ref(&cylinders), &partial, args.fuel)
                .map_err(map_err)?;
            let accepted: usize = levels[0].elements.iter().map(|e| e.len()).sum();
            rows.push(format!("{d},{},{accepted}", levels[0].deficit.to_f64()));
            deficits.push(levels[0].deficit.to_f64());
        }
        write_csv(
            &out.join("transfer_back.csv"),
            "depth,deficit,atoms_accepted",
            rows,
        )
        .map_err(config_err)?;
        back_json = json!({
            "cylinders": cyl_text,
            "fuel": args.fuel,
            "deficits_by_depth": deficits,
        });
    }
    let summary = json!({
        "command": "transfer",
        "config": {"generators": args.generators.display().to_string(), "depth": args.depth,
                    "precision": args.precision, "levels": args.levels, "seed": args.seed},
        "error_budget": assignment.error_budget().to_string(),
        "forward_levels": forward.levels.iter().enumerate().map(|(i, l)| json!({
            "level": i + 1,
            "bound": MlTest::level_bound(i).to_f64(),
            "total_length": l.total_length.to_f64(),
            "intervals": l.intervals.len(),
        })).collect::<Vec<_>>(),
        "back": back_json,
    });
    emit(out, "transfer", &summary)?;
    Ok(0)
}

fn cmd_rate(out: &Path, args: &RateArgs) -> Result<i32, CliError> {
    let bits: Bits = match &args.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            text.trim().parse().map_err(config_err)?
        }
        None => match args.kind.as_str() {
            "zeros" => (0..args.n).map(|_| false).collect(),
            "coin" => BitSource::derived(args.seed, "rate-coin", 0).bits(args.n),
            "tree" => {
                let mask = ResidueMask::new(args.p, args.q).map_err(config_err)?;
                let mut src = BitSource::derived(args.seed, "rate-tree", 0);
                tree_sequence(&mask, &mut src, args.n)
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown kind {other:?} (zeros | coin | tree)"
                )))
            }
        },
    };
    let estimate = lz_estimate(&bits).map_err(config_err)?;
    let calibration = Calibration::default();
    let baseline = calibration.coin_rate(bits.len());
    let normalized = estimate.rate / baseline;
    let verdict = match &args.alpha {
        Some(alpha) => {
            let alpha = rational_f64(alpha)?;
            match dimension_proxy(&bits, alpha, &calibration).map_err(config_err)? {
                DimensionVerdict::BelowAlpha => Some("below_alpha"),
                DimensionVerdict::NotBelow => Some("not_below"),
            }
        }
        None => None,
    };
    write_csv(
        &out.join("rate_detail.csv"),
        "kind,n,phrases,bits,rate,normalized",
        [format!(
            "{},{},{},{},{},{normalized}",
            args.kind, estimate.length, estimate.phrases, estimate.bits, estimate.rate
        )],
    )
    .map_err(config_err)?;
    let summary = json!({
        "command": "rate",
        "config": {"kind": args.kind, "n": args.n, "p": args.p, "q": args.q,
                    "alpha": args.alpha, "seed": args.seed,
                    "input": args.input.as_ref().map(|p| p.display().to_string())},
        "length": estimate.length,
        "phrases": estimate.phrases,
        "bits": estimate.bits,
        "rate": estimate.rate,
        "coin_baseline": baseline,
        "normalized_rate": normalized,
        "verdict": verdict,
    });
    emit(out, "rate", &summary)?;
    Ok(0)
}

fn cmd_energy(out: &Path, args: &EnergyArgs) -> Result<i32, CliError> {
    let mask = ResidueMask::new(args.p, args.q).map_err(config_err)?;
    let alpha = parse_rational(&args.alpha).map_err(config_err)?;
    let exact = energy_exact(&mask, &alpha, args.terms);
    let (exact_json, csv_value, csv_tail) = match exact {
        EnergyExact::Finite { value, tail_bound } => (
            json!({"finite": true, "value": value, "tail_bound": tail_bound}),
            value.to_string(),
            tail_bound.to_string(),
        ),
        EnergyExact::Divergent => (json!({"finite": false}), "divergent".into(), String::new()),
    };
    let mc = match exact {
        EnergyExact::Finite { .. } => Some(
            energy_mc(&mask, &alpha, args.samples, args.depth, args.seed).map_err(config_err)?,
        ),
        EnergyExact::Divergent => None,
    };
    let (mc_json, ci_low, ci_high) = match &mc {
        Some(mc) => (
            json!({
                "estimate": mc.estimate, "ci_low": mc.ci_low, "ci_high": mc.ci_high,
                "truncation_tail": mc.truncation_tail, "samples": mc.samples,
                "depth": mc.depth, "truncated_pairs": mc.truncated_pairs,
            }),
            mc.ci_low.to_string(),
            mc.ci_high.to_string(),
        ),
        None => (serde_json::Value::Null, String::new(), String::new()),
    };
    write_csv(
        &out.join("energy_detail.csv"),
        "p,q,alpha,value,tail,ci_low,ci_high",
        [format!(
            "{},{},{},{csv_value},{csv_tail},{ci_low},{ci_high}",
            args.p, args.q, args.alpha
        )],
    )
    .map_err(config_err)?;
    let contains = match (&exact, &mc) {
        (EnergyExact::Finite { value, .. }, Some(mc)) => {
            Some(mc.ci_low <= *value && *value <= mc.ci_high)
        }
        _ => None,
    };
    let summary = json!({
        "command": "energy",
        "config": {"p": args.p, "q": args.q, "alpha": args.alpha, "samples": args.samples,
                    "depth": args.depth, "terms": args.terms, "seed": args.seed},
        "exact": exact_json,
        "monte_carlo": mc_json,
        "interval_contains_exact": contains,
    });
    emit(out, "energy", &summary)?;
    if args.check && contains == Some(false) {
        return Err(CliError::CheckFailed(
            "Monte Carlo interval does not contain the exact energy".into(),
        ));
    }
    Ok(0)
}

fn cmd_density(out: &Path, args: &DensityArgs) -> Result<i32, CliError> {
    let mask = ResidueMask::new(args.p, args.q).map_err(config_err)?;
    let alpha = parse_rational(&args.alpha).map_err(config_err)?;
    let depths = parse_range(&args.depths)?;
    let report = density_check(&mask, &alpha, args.samples, &depths, args.seed);
    let rows: Vec<String> = report
        .per_depth
        .iter()
        .map(|(depth, ratio)| format!("{},{},{},{depth},{ratio}", args.p, args.q, args.alpha))
        .collect();
    write_csv(
        &out.join("density_detail.csv"),
        "p,q,alpha,depth,max_ratio",
        rows,
    )
    .map_err(config_err)?;
    let summary = json!({
        "command": "density",
        "config": {"p": args.p, "q": args.q, "alpha": args.alpha, "samples": args.samples,
                    "depths": args.depths, "seed": args.seed},
        "per_depth": report.per_depth.iter().map(|(d, r)| json!({"depth": d, "max_ratio": r})).collect::<Vec<_>>(),
        "max_ratio": report.max_ratio,
    });
    emit(out, "density", &summary)?;
    Ok(0)
}

fn cmd_lil(out: &Path, args: &LilArgs) -> Result<i32, CliError> {
    let kv = KvConfig::load(&args.config)?;
    let config = LilConfig {
        seed: kv.merge(&args.seed, "seed", 0)?,
        paths: kv.merge(&args.seeds, "seeds", 200)?,
        resolution_exp: kv.merge(&args.resolution_exp, "K", 20)?,
        times_per_path: kv.merge(&args.times, "times", 100)?,
        coarsest_h_exp: kv.merge(&args.coarsest, "coarsest", 6)?,
        finest_h_exp: kv.merge(&args.finest, "finest", 18)?,
        band: (
            rational_f64(&kv.merge(&args.band_lo, "band_lo", "3/5".to_string())?)?,
            rational_f64(&kv.merge(&args.band_hi, "band_hi", "7/5".to_string())?)?,
        ),
        p99_limit: rational_f64(&kv.merge(&args.p99_limit, "p99_limit", "5/2".to_string())?)?,
    };
    let report = lil_sweep(&config).map_err(experiment_err)?;
    write_csv(
        &out.join("lil_detail.csv"),
        "path_index,time_index,sup_statistic",
        report
            .rows
            .iter()
            .map(|r| format!("{},{},{}", r.path_index, r.time_index, r.sup_statistic)),
    )
    .map_err(config_err)?;
    let summary = json!({
        "command": "lil",
        "config": report.config,
        "count": report.count,
        "median": report.median,
        "p90": report.p90,
        "p99": report.p99,
        "min": report.min,
        "max": report.max,
        "median_in_band": report.median_in_band,
        "p99_below_limit": report.p99_below_limit,
    });
    emit(out, "lil", &summary)?;
    if args.check && !(report.median_in_band && report.p99_below_limit) {
        return Err(CliError::CheckFailed(format!(
            "median {} (band {:?}), p99 {} (limit {})",
            report.median, config.band, report.p99, config.p99_limit
        )));
    }
    Ok(0)
}

fn cmd_zerohit(out: &Path, args: &ZerohitArgs) -> Result<i32, CliError> {
    let kv = KvConfig::load(&args.config)?;
    let scales = parse_range(&kv.merge(&args.scales, "scales", "2:8".to_string())?)?;
    let (scale_min, scale_max) = match (scales.iter().min(), scales.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(CliError::Config("empty scale range".into())),
    };
    let config = ZeroHitConfig {
        seed: kv.merge(&args.seed, "seed", 0)?,
        p: kv.merge(&args.p, "p", 2)?,
        q: kv.merge(&args.q, "q", 3)?,
        scale_min,
        scale_max,
        paths: kv.merge(&args.seeds, "seeds", 10_000)?,
        resolution_exp: kv.merge(&args.resolution_exp, "K", 20)?,
        cert_depth: kv.merge(&args.cert_depth, "cert_depth", 4)?,
        rate_threshold: rational_f64(&kv.merge(
            &args.rate_threshold,
            "rate_threshold",
            "4/5".to_string(),
        )?)?,
        ..ZeroHitConfig::default()
    };
    let report = zero_hit_experiment(&config).map_err(experiment_err)?;
    write_csv(
        &out.join("zerohit_scales.csv"),
        "scale,trials,hits,p_hat,ci_low,ci_high",
        report.scales.iter().map(|s| {
            format!(
                "{},{},{},{},{},{}",
                s.scale, s.trials, s.hits, s.p_hat, s.ci_low, s.ci_high
            )
        }),
    )
    .map_err(config_err)?;
    write_csv(
        &out.join("zerohit_witnesses.csv"),
        "scale,path_index,time_index,expansion,cert_depth_reached,rate,normalized_rate,passes",
        report.witness_rows.iter().map(|w| {
            format!(
                "{},{},{},{},{},{},{},{}",
                w.scale,
                w.path_index,
                w.time_index,
                w.expansion,
                w.cert_depth_reached,
                w.rate,
                w.normalized_rate,
                w.passes
            )
        }),
    )
    .map_err(config_err)?;
    let summary = json!({
        "command": "zerohit",
        "config": report.config,
        "scales": report.scales,
        "monotone_within_ci": report.monotone_within_ci,
        "all_positive": report.all_positive,
        "coin_baseline": report.coin_baseline,
        "witnesses_total": report.witnesses_total,
        "witnesses_passing": report.witnesses_passing,
        "witness_pass_fraction": report.witness_pass_fraction,
    });
    emit(out, "zerohit", &summary)?;
    if args.check {
        let ok =
            report.monotone_within_ci && report.all_positive && report.witness_pass_fraction >= 0.9;
        if !ok {
            return Err(CliError::CheckFailed(format!(
                "monotone={} positive={} pass_fraction={}",
                report.monotone_within_ci, report.all_positive, report.witness_pass_fraction
            )));
        }
    }
    Ok(0)
}

fn cmd_scaling(out: &Path, args: &ScalingArgs) -> Result<i32, CliError> {
    let kv = KvConfig::load(&args.config)?;
    let t_text = kv.merge(&args.t_points, "t", "1/8,1/4,1/2".to_string())?;
    let t_points = t_text
        .split(',')
        .map(|s| parse_rational(s.trim()).map_err(config_err))
        .collect::<Result<Vec<_>, _>>()?;
    let a = kv.merge(&args.a, "a", 2)?;
    let config = ScalingConfig {
        seed: kv.merge(&args.seed, "seed", 0)?,
        a,
        t_points,
        samples: kv.merge(&args.samples, "samples", 100_000)?,
        resolution_exp: kv.merge(&args.resolution_exp, "K", 20)?,
        significance: rational_f64(&kv.merge(
            &args.significance,
            "significance",
            "1/100".to_string(),
        )?)?,
    };
    let report = scaling_test(&config).map_err(experiment_err)?;
    write_csv(
        &out.join("scaling_detail.csv"),
        "t,a,scaled_steps,base_steps,ks_distance,critical_value,pass",
        report.rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.t, a, r.scaled_steps, r.base_steps, r.ks_distance, r.critical_value, r.pass
            )
        }),
    )
    .map_err(config_err)?;
    let summary = json!({
        "command": "scaling",
        "config": {"a": report.a, "t": t_text, "samples": report.samples,
                    "resolution_exp": report.resolution_exp,
                    "significance": report.significance, "seed": report.seed},
        "rows": report.rows,
        "all_pass": report.all_pass,
    });
    emit(out, "scaling", &summary)?;
    if args.check && !report.all_pass {
        return Err(CliError::CheckFailed(
            "a KS distance exceeds the critical value".into(),
        ));
    }
    Ok(0)
}
