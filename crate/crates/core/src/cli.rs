//! Command-line front end: ingest channel/profile documents, run the
//! analyses and simulations, export reproducible result files.
//!
//! Every run writes its outputs together with a manifest (command, input
//! digests, resolved parameters, seed, version, duration). Reruns with an
//! equal manifest produce byte-identical payloads; only the duration
//! differs, and it lives in the manifest rather than the payload.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::channel::MacChannel;
use crate::error::{Error, Result};
use crate::opt::{self, AscentOptions};
use crate::profile::FeedforwardProfile;
use crate::regions::{self, RateRegion, RegionOptions};
use crate::sim::{self, DecoderKind, SchemeConfig, SweepAxis};

#[derive(Debug, Parser)]
#[command(
    name = "switched-mac",
    version,
    about = "Capacity bounds and coding simulation for the MAC with switched feedback"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed for all randomised work.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: the SWITCHED_MAC_THREADS variable, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Structured)]
    format: OutputFormat,
    /// Directory for result files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Structured,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximum of I(X1,X2;Y) over joint inputs (Blahut–Arimoto).
    Capacity(CapacityArgs),
    /// Rate-region evaluations.
    Region(RegionArgs),
    /// Monte Carlo simulation of the block-Markov scheme.
    Simulate(SimulateArgs),
    /// Known-switching-pattern sum-capacity interval.
    Ksp(KspArgs),
    /// Write a preset channel or profile document.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct CapacityArgs {
    /// Channel document (JSON).
    #[arg(long)]
    channel: PathBuf,
    /// Stopping gap for the capacity sandwich.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichRegion {
    Prop1,
    Prop2,
    Thm1,
    Corollary,
    Lemma1,
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    profile: PathBuf,
    /// Which bound to evaluate.
    #[arg(long, value_enum)]
    which: WhichRegion,
    /// Auxiliary cardinality (default |X1||X2|+1).
    #[arg(long)]
    u_size: Option<usize>,
    /// Discretisation blocks for lemma1.
    #[arg(long, default_value_t = 8)]
    b_blocks: usize,
    /// Scheme slack for lemma1.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Two-way rate pair for lemma1 (defaults to the achievable witness).
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long)]
    s2: Option<f64>,
    /// Frontier sweep angles.
    #[arg(long, default_value_t = 65)]
    angles: usize,
    /// Optimiser restarts.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    channel: PathBuf,
    /// Constant feedforward probability.
    #[arg(long)]
    p: f64,
    /// Sub-block length.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    b_blocks: usize,
    /// Message rate (bits/use).
    #[arg(long)]
    r1: f64,
    /// Bin rate (default 0.8·I(X2;Yd)).
    #[arg(long)]
    r0: Option<f64>,
    /// Baseline-only second rate.
    #[arg(long, default_value_t = 0.0)]
    r2: f64,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    /// Robust-typicality parameter.
    #[arg(long, default_value_t = SchemeConfig::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Run the no-feedback baseline instead of the block-Markov scheme.
    #[arg(long, default_value_t = false)]
    baseline: bool,
    #[arg(long, value_enum, default_value_t = CliDecoder::Auto)]
    decoder: CliDecoder,
    /// Sweep one axis instead of a single run.
    #[arg(long, value_enum)]
    sweep_axis: Option<CliSweepAxis>,
    /// Comma-separated, strictly monotone sweep values.
    #[arg(long, value_delimiter = ',')]
    sweep_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliDecoder {
    Auto,
    Exact,
    Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliSweepAxis {
    N,
    P,
    R1,
}

#[derive(Debug, Args)]
struct KspArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, default_value_t = 16)]
    b_blocks: usize,
    #[arg(long)]
    u_size: Option<usize>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// What to generate: adder, xor, example2, constant, step.
    #[arg(long)]
    preset: String,
    /// Example-2 group size.
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    /// Probability for constant/step profiles.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Output path for the document.
    #[arg(long)]
    out_file: PathBuf,
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub params: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub duration_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

fn digest_file(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: format!("{:x}", hasher.finalize()),
    })
}

#[derive(Serialize)]
struct Output<'a, P: Serialize> {
    manifest: &'a RunManifest,
    payload: &'a P,
}

fn write_structured<P: Serialize>(dir: &Path, name: &str, manifest: &RunManifest, payload: &P) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let doc = Output { manifest, payload };
    std::fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
    Ok(path)
}

fn write_csv(dir: &Path, name: &str, manifest: &RunManifest, header: &str, rows: &[String]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    std::fs::write(&path, text)?;
    let mpath = dir.join(format!("{name}.manifest.json"));
    std::fs::write(&mpath, serde_json::to_string_pretty(manifest)?)?;
    Ok(path)
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Parse argv and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own message; usage problems are validation errors
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let threads = cli.threads.or_else(|| {
        std::env::var("SWITCHED_MAC_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        // ignore failure: the global pool may already exist in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let started = std::time::Instant::now();
    match &cli.command {
        Command::Capacity(args) => cmd_capacity(&cli, args, started),
        Command::Region(args) => cmd_region(&cli, args, started),
        Command::Simulate(args) => cmd_simulate(&cli, args, started),
        Command::Ksp(args) => cmd_ksp(&cli, args, started),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn load_channel(path: &Path) -> Result<MacChannel> {
    let text = std::fs::read_to_string(path)?;
    MacChannel::from_json(&text)
}

fn load_profile(path: &Path) -> Result<FeedforwardProfile> {
    let text = std::fs::read_to_string(path)?;
    FeedforwardProfile::from_json(&text)
}

fn manifest(
    cli: &Cli,
    command: &str,
    inputs: &[&Path],
    params: serde_json::Value,
    started: std::time::Instant,
) -> Result<RunManifest> {
    Ok(RunManifest {
        command: command.to_string(),
        inputs: inputs.iter().map(|p| digest_file(p)).collect::<Result<_>>()?,
        params,
        seed: cli.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_ms: started.elapsed().as_millis(),
    })
}

// --- capacity ---------------------------------------------------------------

#[derive(Serialize)]
struct CapacityPayload {
    value_bits: f64,
    gap_bound: f64,
    iterations: usize,
    argmax: Vec<f64>,
}

fn cmd_capacity(cli: &Cli, args: &CapacityArgs, started: std::time::Instant) -> Result<()> {
    let channel = load_channel(&args.channel)?;
    let r = opt::max_joint_mi(&channel, args.tol)?;
    println!("capacity value: {:.6} bits", r.value);
    println!("gap bound:      {:.3e}", r.gap_bound);
    println!("iterations:     {}", r.iterations);
    println!("argmax P(x1,x2):");
    for x1 in 0..channel.x1_size() {
        let row: Vec<String> = (0..channel.x2_size())
            .map(|x2| format!("{:.6}", r.argmax[x1 * channel.x2_size() + x2]))
            .collect();
        println!("  [{}]", row.join(", "));
    }
    let payload = CapacityPayload {
        value_bits: r.value,
        gap_bound: r.gap_bound,
        iterations: r.iterations,
        argmax: r.argmax,
    };
    let params = serde_json::json!({ "tol": args.tol });
    let m = manifest(cli, "capacity", &[&args.channel], params, started)?;
    match cli.format {
        OutputFormat::Structured => {
            write_structured(&cli.out, "capacity.json", &m, &payload)?;
        }
        OutputFormat::Csv => {
            let rows = vec![format!("{:.6},{:.6e},{}", payload.value_bits, payload.gap_bound, payload.iterations)];
            write_csv(&cli.out, "capacity.csv", &m, "value_bits,gap_bound,iterations", &rows)?;
        }
    }
    Ok(())
}

// --- region ------------------------------------------------------------------

#[derive(Serialize)]
struct RegionPayload {
    which: String,
    p_avg: f64,
    regions: Vec<RateRegion>,
    condition: Option<regions::ConditionReport>,
    threshold: Option<f64>,
    tw_sum_inner: Option<f64>,
    tw_sum_outer: Option<f64>,
}

fn constant_p_of(profile: &FeedforwardProfile) -> Result<f64> {
    let p0 = profile.segments()[0].p;
    if profile.segments().iter().all(|s| s.p == p0) {
        Ok(p0)
    } else {
        Err(Error::validation(
            "this evaluation needs a constant feedforward probability profile",
        ))
    }
}

fn cmd_region(cli: &Cli, args: &RegionArgs, started: std::time::Instant) -> Result<()> {
    let channel = load_channel(&args.channel)?;
    let profile = load_profile(&args.profile)?;
    let u_size = args.u_size.unwrap_or_else(|| opt::default_u_size(&channel));
    let ro = RegionOptions {
        angles: args.angles,
        ascent: AscentOptions {
            restarts: args.restarts,
            seed: cli.seed,
            ..Default::default()
        },
    };
    let mut payload = RegionPayload {
        which: format!("{:?}", args.which).to_lowercase(),
        p_avg: profile.p_avg(),
        regions: Vec::new(),
        condition: None,
        threshold: None,
        tw_sum_inner: None,
        tw_sum_outer: None,
    };
    match args.which {
        WhichRegion::Prop1 => {
            let r = regions::prop1_outer(&channel, &profile)?;
            println!("outer sum bound: {:.6} bits", r.max_sum());
            payload.regions.push(r);
        }
        WhichRegion::Prop2 => {
            let r = regions::prop2_inner(&channel, &profile, u_size, &ro)?;
            println!("inner region: sum <= {:.6}, R1 <= {:.6}, R2 <= {:.6}",
                r.region.max_sum(), r.region.max_r1(), r.region.max_r2());
            payload.regions.push(r.region);
        }
        WhichRegion::Thm1 => {
            let p = constant_p_of(&profile)?;
            let out = regions::theorem1_region(&channel, p, cli.seed)?;
            let threshold = regions::theorem1_threshold(&channel)?;
            println!(
                "condition: {} (p = {:.6}, threshold = {:.6})",
                if out.condition.holds { "holds" } else { "fails" },
                p,
                threshold
            );
            println!("region kind: {:?}", out.region.kind);
            println!("sum value: {:.6} bits", out.region.max_sum());
            payload.condition = Some(out.condition.clone());
            payload.threshold = Some(threshold);
            payload.regions.push(out.region);
        }
        WhichRegion::Corollary => {
            let out = regions::corollary_region(&channel, profile.p_avg(), u_size, &ro, &[])?;
            println!(
                "inner sum: {:.6} bits ({:?}), outer sum: {:.6} bits",
                out.inner.max_sum(),
                out.inner.kind,
                out.outer.max_sum()
            );
            payload.tw_sum_inner = Some(out.tw.sum_inner);
            payload.tw_sum_outer = Some(out.tw.sum_outer);
            payload.regions.push(out.inner);
            payload.regions.push(out.outer);
        }
        WhichRegion::Lemma1 => {
            let tw = opt::two_way_sum_bounds(&channel, &ro.ascent)?;
            let pair = match (args.s1, args.s2) {
                (Some(a), Some(b)) => (a, b),
                (None, None) => tw.inner_rates,
                _ => return Err(Error::validation("provide both --s1 and --s2 or neither")),
            };
            let r = regions::lemma1_finite_b_region(
                &channel, &profile, args.b_blocks, args.eps, pair, u_size, &ro,
            )?;
            println!(
                "finite-B inner region (B = {}, eps = {:.6}, S = ({:.6}, {:.6})): sum <= {:.6}",
                args.b_blocks, args.eps, pair.0, pair.1, r.max_sum()
            );
            payload.tw_sum_inner = Some(tw.sum_inner);
            payload.tw_sum_outer = Some(tw.sum_outer);
            payload.regions.push(r);
        }
    }
    let params = serde_json::json!({
        "which": payload.which,
        "u_size": u_size,
        "b_blocks": args.b_blocks,
        "eps": args.eps,
        "s1": args.s1,
        "s2": args.s2,
        "angles": args.angles,
        "restarts": args.restarts,
    });
    let m = manifest(cli, "region", &[&args.channel, &args.profile], params, started)?;
    match cli.format {
        OutputFormat::Structured => {
            write_structured(&cli.out, "region.json", &m, &payload)?;
        }
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            for region in &payload.regions {
                let kind = format!("{:?}", region.kind).to_lowercase();
                for &(r1, r2) in &region.frontier {
                    rows.push(format!("{r1:.6},{r2:.6},{kind},{}", payload.which));
                }
            }
            write_csv(&cli.out, "region.csv", &m, "R1,R2,kind,label", &rows)?;
        }
    }
    Ok(())
}

// --- simulate ----------------------------------------------------------------

#[derive(Serialize)]
struct SimulatePayload {
    baseline: bool,
    rows: Vec<sim::SweepRow>,
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs, started: std::time::Instant) -> Result<()> {
    if args.trials == 0 {
        return Err(Error::validation("trials must be >= 1"));
    }
    let channel = load_channel(&args.channel)?;
    let mut cfg = SchemeConfig::new(channel, args.p, args.n, args.b_blocks, args.r1)?;
    cfg.r0 = args.r0;
    cfg.r2 = args.r2;
    cfg.epsilon = args.epsilon;
    cfg.seed = cli.seed;
    cfg.decoder = match args.decoder {
        CliDecoder::Auto => DecoderKind::Auto,
        CliDecoder::Exact => DecoderKind::Exact,
        CliDecoder::Ensemble => DecoderKind::Ensemble,
    };
    cfg.validate()?;

    let rows = match (args.sweep_axis, args.sweep_values.is_empty()) {
        (Some(axis), false) => {
            if args.baseline {
                return Err(Error::validation("sweeps run the block-Markov scheme only"));
            }
            let axis = match axis {
                CliSweepAxis::N => SweepAxis::N,
                CliSweepAxis::P => SweepAxis::P,
                CliSweepAxis::R1 => SweepAxis::R1,
            };
            sim::sweep(&cfg, axis, &args.sweep_values, args.trials)?
        }
        (Some(_), true) => {
            return Err(Error::validation("--sweep-axis needs --sweep-values"));
        }
        (None, _) => {
            let report = if args.baseline {
                sim::run_no_feedback_baseline(&cfg, args.trials)?
            } else {
                sim::run_block_markov(&cfg, args.trials)?
            };
            vec![sim::SweepRow {
                axis_value: args.n as f64,
                report,
            }]
        }
    };

    println!("{}", sim::SWEEP_CSV_HEADER);
    for row in &rows {
        println!("{}", sim::sweep_row_csv(row));
    }
    let payload = SimulatePayload {
        baseline: args.baseline,
        rows,
    };
    let params = serde_json::json!({
        "p": args.p, "n": args.n, "b_blocks": args.b_blocks,
        "r1": args.r1, "r0": args.r0, "r2": args.r2,
        "trials": args.trials, "epsilon": args.epsilon,
        "baseline": args.baseline,
        "decoder": format!("{:?}", args.decoder).to_lowercase(),
        "sweep_axis": args.sweep_axis.map(|a| format!("{a:?}").to_lowercase()),
        "sweep_values": args.sweep_values,
    });
    let m = manifest(cli, "simulate", &[&args.channel], params, started)?;
    match cli.format {
        OutputFormat::Structured => {
            write_structured(&cli.out, "simulate.json", &m, &payload)?;
        }
        OutputFormat::Csv => {
            let rows: Vec<String> = payload.rows.iter().map(sim::sweep_row_csv).collect();
            write_csv(&cli.out, "sweep.csv", &m, sim::SWEEP_CSV_HEADER, &rows)?;
        }
    }
    Ok(())
}

// --- ksp ----------------------------------------------------------------------

#[derive(Serialize)]
struct KspPayload {
    b_blocks: usize,
    sum_value_inner: f64,
    sum_value_outer: f64,
    tau_star: usize,
    tw_sum_inner: f64,
    tw_sum_outer: f64,
    per_block: Vec<regions::BlockEval>,
}

fn cmd_ksp(cli: &Cli, args: &KspArgs, started: std::time::Instant) -> Result<()> {
    let channel = load_channel(&args.channel)?;
    let profile = load_profile(&args.profile)?;
    let u_size = args.u_size.unwrap_or_else(|| opt::default_u_size(&channel));
    let opts = AscentOptions {
        restarts: args.restarts,
        seed: cli.seed,
        ..Default::default()
    };
    let e = regions::ksp_sum_capacity(&channel, &profile, args.b_blocks, u_size, &opts)?;
    println!(
        "sum-capacity interval: [{:.6}, {:.6}] bits",
        e.sum_value_inner, e.sum_value_outer
    );
    println!("minimising b0: {} of {}", e.tau_star, e.b_blocks + 1);
    println!("two-way sum interval: [{:.6}, {:.6}]", e.tw.sum_inner, e.tw.sum_outer);
    println!("block  p_bar     I(X1,X2;Y|U)  I(X1,X2;Y)");
    for (i, b) in e.per_block.iter().enumerate() {
        println!(
            "{:>5}  {:.6}  {:>12.6}  {:>10.6}",
            i + 1,
            b.p_bar,
            b.i_cond_joint,
            b.i_joint
        );
    }
    let payload = KspPayload {
        b_blocks: e.b_blocks,
        sum_value_inner: e.sum_value_inner,
        sum_value_outer: e.sum_value_outer,
        tau_star: e.tau_star,
        tw_sum_inner: e.tw.sum_inner,
        tw_sum_outer: e.tw.sum_outer,
        per_block: e.per_block,
    };
    let params = serde_json::json!({
        "b_blocks": args.b_blocks, "u_size": u_size, "restarts": args.restarts,
    });
    let m = manifest(cli, "ksp", &[&args.channel, &args.profile], params, started)?;
    match cli.format {
        OutputFormat::Structured => {
            write_structured(&cli.out, "ksp.json", &m, &payload)?;
        }
        OutputFormat::Csv => {
            let rows: Vec<String> = payload
                .per_block
                .iter()
                .enumerate()
                .map(|(i, b)| format!("{},{:.6},{:.6},{:.6}", i + 1, b.p_bar, b.i_cond_joint, b.i_joint))
                .collect();
            write_csv(
                &cli.out,
                "ksp.csv",
                &m,
                "block,p_bar,i_cond_joint,i_joint",
                &rows,
            )?;
        }
    }
    Ok(())
}

// --- gen ------------------------------------------------------------------------

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let text = match args.preset.as_str() {
        "adder" => serde_json::to_string_pretty(&MacChannel::binary_adder().to_doc())?,
        "xor" => serde_json::to_string_pretty(&MacChannel::binary_xor().to_doc())?,
        "example2" => {
            let ch = regions::build_example2(args.alpha)?;
            serde_json::to_string_pretty(&ch.to_doc())?
        }
        "constant" => serde_json::to_string_pretty(&FeedforwardProfile::constant(args.p)?)?,
        "step" => serde_json::to_string_pretty(&FeedforwardProfile::step(args.p)?)?,
        other => {
            return Err(Error::validation(format!(
                "unknown preset '{other}' (expected adder, xor, example2, constant, step)"
            )))
        }
    };
    if let Some(dir) = args.out_file.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(&args.out_file, text)?;
    println!("wrote {}", args.out_file.display());
    Ok(())
}
