use anyhow::{bail, Context};
use ceelink_cli::ber::ber_points_json;
use ceelink_cli::outage::outage_points_json;
use ceelink_cli::{parse_config_file, run_ber_sweep, run_outage_sweep, RunConfig, RunManifest};
use ceelink_core::capacity::RHO_PERFECT_GUARD;
use ceelink_core::channel::{draw_rayleigh, export_fade_vectors, import_fade_vectors};
use ceelink_core::modem::{symbol_metric, MetricMode, PosteriorParams, QamConstellation};
use ceelink_core::rng::{RngFactory, StreamDomain};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ceelink",
    version,
    about = "BICM-OFDM link and outage-rate simulation under imperfect channel estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER sweep over Eb/N0, pilot counts and decoders
    Ber(BerArgs),
    /// Expected outage-rate sweep over SNR
    Outage(OutageArgs),
    /// Dump the per-symbol decision metrics for one observation
    MetricTable(MetricTableArgs),
    /// Generate Rayleigh fade vectors in the channel file format
    ExportChannels(ExportChannelsArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// key=value configuration file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run seed (all randomness derives from it)
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; '-' or absent writes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a JSON mirror next to the CSV output
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BerArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Eb/N0 grid in dB: START:STEP:STOP or a comma list
    #[arg(long, allow_hyphen_values = true)]
    ebn0: Option<String>,
    /// Pilot symbol counts, comma separated
    #[arg(long)]
    pilots: Option<String>,
    /// Decoders: any of perfect, mismatched, modified
    #[arg(long)]
    decoders: Option<String>,
    /// Import channel realizations from a file instead of drawing them
    #[arg(long)]
    channels: Option<PathBuf>,
    /// Data subcarriers per OFDM symbol
    #[arg(long = "m-subcarriers")]
    m_subcarriers: Option<usize>,
    /// OFDM symbols per frame
    #[arg(long)]
    tau: Option<usize>,
    /// Demapping passes (1 = non-iterative)
    #[arg(long)]
    iters: Option<usize>,
    /// Stop rule: minimum information bits per point
    #[arg(long)]
    min_bits: Option<u64>,
    /// Stop rule: bit errors per point
    #[arg(long)]
    target_errors: Option<u64>,
    /// Use max-log bit metrics
    #[arg(long)]
    max_log: bool,
}

#[derive(Args)]
struct OutageArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// SNR grid in dB: START:STEP:STOP or a comma list
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Outage probability
    #[arg(long)]
    gamma: Option<f64>,
    /// Pilot symbol count (sets the estimation error variance)
    #[arg(long)]
    pilots: Option<String>,
    /// Decoders: any of perfect, mismatched, modified
    #[arg(long)]
    decoders: Option<String>,
    /// Subcarriers per OFDM symbol
    #[arg(long = "m-subcarriers")]
    m_subcarriers: Option<usize>,
    /// Channel-estimate draws
    #[arg(long)]
    n_outer: Option<usize>,
    /// Posterior channel draws per estimate
    #[arg(long)]
    n_inner: Option<usize>,
}

#[derive(Args)]
struct MetricTableArgs {
    /// Received sample as re,im
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    /// Channel estimate as re,im
    #[arg(long, allow_hyphen_values = true)]
    hhat: String,
    /// Estimate quality rho in (0, 1]
    #[arg(long)]
    rho: f64,
    /// Noise variance
    #[arg(long)]
    noise_var: f64,
    /// Mean symbol energy of the constellation
    #[arg(long, default_value_t = 1.0)]
    symbol_energy: f64,
    /// Fade variance
    #[arg(long, default_value_t = 1.0)]
    h_var: f64,
    /// Output path; '-' or absent writes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportChannelsArgs {
    /// Subcarriers per realization
    #[arg(long = "m-subcarriers", default_value_t = 100)]
    m_subcarriers: usize,
    /// Number of realizations
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Fade variance
    #[arg(long, default_value_t = 1.0)]
    h_var: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path; '-' or absent writes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ber(args) => run_ber(args),
        Command::Outage(args) => run_outage(args),
        Command::MetricTable(args) => run_metric_table(args),
        Command::ExportChannels(args) => run_export_channels(args),
    }
}

/// Resolves defaults, then the config file, then flags.
fn resolve_config(
    common: &CommonArgs,
    overrides: &[(&str, Option<String>)],
) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        parse_config_file(path, &mut cfg)
            .with_context(|| format!("loading {}", path.display()))?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    for (key, value) in overrides {
        if let Some(value) = value {
            cfg.apply_kv(key, value)
                .map_err(|msg| anyhow::anyhow!("--{}: {msg}", key.replace('_', "-")))?;
        }
    }
    Ok(cfg)
}

fn open_output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => {
            let file = std::fs::File::create(p)
                .with_context(|| format!("creating {}", p.display()))?;
            Ok(Box::new(std::io::BufWriter::new(file)))
        }
        _ => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn write_json_mirror(out: &Option<PathBuf>, value: serde_json::Value) -> anyhow::Result<()> {
    let Some(csv_path) = out else {
        bail!("--json requires --out with a file path");
    };
    if csv_path == Path::new("-") {
        bail!("--json requires --out with a file path");
    }
    let path = csv_path.with_extension("json");
    std::fs::write(&path, serde_json::to_string_pretty(&value)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run_ber(args: BerArgs) -> anyhow::Result<()> {
    let cfg = resolve_config(
        &args.common,
        &[
            ("ebn0", args.ebn0.clone()),
            ("pilots", args.pilots.clone()),
            ("decoders", args.decoders.clone()),
            ("M", args.m_subcarriers.map(|v| v.to_string())),
            ("tau", args.tau.map(|v| v.to_string())),
            ("iters", args.iters.map(|v| v.to_string())),
            ("min_bits", args.min_bits.map(|v| v.to_string())),
            ("target_errors", args.target_errors.map(|v| v.to_string())),
            ("max_log", args.max_log.then(|| "true".to_string())),
        ],
    )?;
    cfg.frame.validate()?;
    if cfg.ebn0_db.is_empty() {
        bail!("no Eb/N0 grid given (use --ebn0 START:STEP:STOP)");
    }

    let channels = match &args.channels {
        Some(path) => Some(
            import_fade_vectors(path, Some(cfg.frame.m), cfg.frame.prior_var)
                .with_context(|| format!("importing {}", path.display()))?,
        ),
        None => None,
    };

    let mut manifest = RunManifest::new("ber", cfg.seed);
    manifest.extend(cfg.manifest_entries());
    if let Some(path) = &args.channels {
        manifest.push("channels", path.display());
    }

    let mut writer = open_output(&args.common.out)?;
    let points = run_ber_sweep(&cfg, channels.as_deref(), &manifest, &mut writer)?;
    writer.flush()?;
    if args.common.json {
        write_json_mirror(&args.common.out, ber_points_json(&manifest, &points))?;
    }
    Ok(())
}

fn run_outage(args: OutageArgs) -> anyhow::Result<()> {
    let cfg = resolve_config(
        &args.common,
        &[
            ("snr", args.snr.clone()),
            ("gamma", args.gamma.map(|v| v.to_string())),
            ("pilots", args.pilots.clone()),
            ("decoders", args.decoders.clone()),
            ("M", args.m_subcarriers.map(|v| v.to_string())),
            ("n_outer", args.n_outer.map(|v| v.to_string())),
            ("n_inner", args.n_inner.map(|v| v.to_string())),
        ],
    )?;
    if cfg.snr_db.is_empty() {
        bail!("no SNR grid given (use --snr START:STEP:STOP)");
    }
    if cfg.pilots.len() != 1 {
        bail!("outage sweeps take exactly one pilot count");
    }

    let mut manifest = RunManifest::new("outage", cfg.seed);
    manifest.extend(cfg.manifest_entries());

    let mut writer = open_output(&args.common.out)?;
    let points = run_outage_sweep(&cfg, &manifest, &mut writer)?;
    writer.flush()?;
    if args.common.json {
        write_json_mirror(&args.common.out, outage_points_json(&manifest, &points))?;
    }
    Ok(())
}

fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        bail!("expected re,im, got '{s}'");
    }
    Ok(Complex64::new(
        parts[0].trim().parse().with_context(|| format!("bad real part in '{s}'"))?,
        parts[1].trim().parse().with_context(|| format!("bad imaginary part in '{s}'"))?,
    ))
}

fn run_metric_table(args: MetricTableArgs) -> anyhow::Result<()> {
    let y = parse_complex(&args.y)?;
    let hhat = parse_complex(&args.hhat)?;
    if !(args.rho > 0.0 && args.rho <= 1.0) {
        bail!("rho must be in (0, 1], got {}", args.rho);
    }
    // err_var consistent with the requested rho: rho = v / (v + err).
    let err_var = args.h_var * (1.0 - args.rho) / args.rho;
    let pp = PosteriorParams::new(args.h_var, err_var, args.noise_var)?;
    let constellation = QamConstellation::qam16(args.symbol_energy)?;

    let mut manifest = RunManifest::new("metric-table", 0);
    manifest.push("y", format!("{},{}", y.re, y.im));
    manifest.push("hhat", format!("{},{}", hhat.re, hhat.im));
    manifest.push("rho", pp.rho());
    manifest.push("noise_var", args.noise_var);
    manifest.push("symbol_energy", args.symbol_energy);

    let mut writer = open_output(&args.out)?;
    write!(writer, "{}", manifest.header())?;
    writeln!(writer, "label,bits,s_re,s_im,d_euclidean,d_modified")?;
    for label in 0..QamConstellation::ORDER {
        let s = constellation.point(label);
        let euclid = symbol_metric(y, s, hhat, MetricMode::Mismatched, &pp);
        let modified = symbol_metric(y, s, hhat, MetricMode::Modified, &pp);
        let bits = QamConstellation::label_bits(label);
        writeln!(
            writer,
            "{label},{}{}{}{},{},{},{},{}",
            bits[0], bits[1], bits[2], bits[3], s.re, s.im, euclid, modified
        )?;
    }
    writer.flush()?;
    // The guard band note helps interpret rho ~ 1 tables.
    if pp.rho() >= 1.0 - RHO_PERFECT_GUARD {
        eprintln!("note: rho is in the perfect-CSI guard band; the modified metric reduces to scaled Euclidean");
    }
    Ok(())
}

fn run_export_channels(args: ExportChannelsArgs) -> anyhow::Result<()> {
    if args.count == 0 {
        bail!("count must be >= 1");
    }
    let factory = RngFactory::new(args.seed);
    let mut rng = factory.stream(StreamDomain::Scratch, 0);
    let vectors: Result<Vec<_>, _> = (0..args.count)
        .map(|_| draw_rayleigh(args.m_subcarriers, args.h_var, &mut rng))
        .collect();
    let vectors = vectors?;
    match &args.out {
        Some(p) if p != Path::new("-") => export_fade_vectors(p, &vectors)?,
        _ => {
            let mut out = std::io::stdout().lock();
            ceelink_core::channel::write_fade_vectors(&mut out, &vectors)?;
        }
    }
    Ok(())
}
