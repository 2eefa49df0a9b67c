//! `pufsec`: simulate PUF populations, compute quality/security reports,
//! sweep analytic curves, validate the oracles, and run strong-PUF
//! experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime/data error.

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use pufsec::analytic::{
    auth_success_cdf, binary_entropy, failure_constrained_rate, mac_avg_guesswork,
    min_entropy_distortion_rate, renyi_entropy, GuessworkParams, MacMapping,
};
use pufsec::metrics::security_report_binned;
use pufsec::puf_model::{find_preset, sample_population, Population, PufSpec, Seed, PRESETS};
use pufsec::strong_puf::{
    avalanche_experiment, build_device, inter_device_experiment, noise_propagation, Challenge,
    KEY_BITS,
};
use pufsec::validate::{run_validation, ValidationConfig};
use pufsec::BitVector;

const TOOL: &str = "pufsec";

#[derive(Parser)]
#[command(name = TOOL, version, about = "PUF simulation and guesswork-based security analysis")]
struct Cli {
    /// Root seed for all randomized operations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout (required for `simulate`).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format for reports and experiment summaries.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap the worker-thread count; results are identical at any setting.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a device population and write it as JSON.
    Simulate(SimulateArgs),
    /// Compute the quality/security report for a population file.
    Report(ReportArgs),
    /// Sweep an analytic curve and emit (x, value) CSV.
    Analytic(AnalyticArgs),
    /// Run the oracle/analytic cross-validation suite.
    OracleValidate(OracleValidateArgs),
    /// Strong-PUF responses and experiments.
    StrongPuf(StrongPufArgs),
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    /// Named preset: ledpuf, sram, ro20, ro60.
    #[arg(long, conflicts_with_all = ["bias", "noise"])]
    preset: Option<String>,
    /// Per-bit probability of a 1 (custom family).
    #[arg(long, requires = "noise")]
    bias: Option<f64>,
    /// Per-re-read transition probability (custom family).
    #[arg(long, requires = "bias")]
    noise: Option<f64>,
    /// Cross-device correlation flip probability.
    #[arg(long, default_value_t = 0.5)]
    corr: f64,
    /// Number of devices.
    #[arg(long, default_value_t = 10)]
    devices: usize,
    /// Noisy re-reads per device.
    #[arg(long, default_value_t = 10)]
    resamples: usize,
    /// Response length in bits.
    #[arg(long, default_value_t = 512)]
    bits: usize,
}

#[derive(Args, Serialize)]
struct ReportArgs {
    /// Population JSON produced by `simulate`.
    #[arg(long)]
    input: PathBuf,
    /// Guesswork moment order.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Attach histograms with this many bins to the FHD summaries.
    #[arg(long)]
    bins: Option<usize>,
    /// Emit one FHD histogram as two-column (bin center, count) CSV
    /// instead of the report itself. Requires --bins.
    #[arg(long, value_enum)]
    histogram: Option<HistogramChoice>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum HistogramChoice {
    Intra,
    IntraPairs,
    Inter,
}

#[derive(Args, Serialize)]
struct AnalyticArgs {
    /// Curve: renyi-half, one-minus-hd, min-entropy, theorem2-rate,
    /// auth-cdf, mac-eta.
    #[arg(long)]
    curve: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    step: f64,
    /// Moment order (theorem2-rate).
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Distortion level (min-entropy, theorem2-rate).
    #[arg(long, default_value_t = 0.0)]
    distortion: f64,
    /// Source bias p (theorem2-rate).
    #[arg(long, default_value_t = 0.3)]
    bias: f64,
    /// Per-challenge min-entropy in bits (auth-cdf).
    #[arg(long, default_value_t = 1.0)]
    min_entropy_bits: f64,
    /// MAC message-space bits N (mac-eta).
    #[arg(long, default_value_t = 2)]
    mac_n: u32,
    /// MAC key bias p (mac-eta).
    #[arg(long, default_value_t = 0.5)]
    mac_bias: f64,
    /// MAC key-to-bin mapping (mac-eta).
    #[arg(long, value_enum, default_value_t = MappingArg::Uniform)]
    mac_mapping: MappingArg,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MappingArg {
    Uniform,
    Identity,
}

impl From<MappingArg> for MacMapping {
    fn from(m: MappingArg) -> MacMapping {
        match m {
            MappingArg::Uniform => MacMapping::Uniform,
            MappingArg::Identity => MacMapping::Identity,
        }
    }
}

#[derive(Args, Serialize)]
struct OracleValidateArgs {
    /// Random-distribution support cap, in bits.
    #[arg(long, default_value_t = 10)]
    max_support_bits: u32,
    /// Number of random distributions for the sandwich check.
    #[arg(long, default_value_t = 120)]
    distributions: usize,
    /// Word length of the conditional (side-information) check.
    #[arg(long, default_value_t = 12)]
    conditional_bits: u32,
    /// Largest tolerated finite-size gap for the conditional rate.
    #[arg(long, default_value_t = 0.25)]
    max_rate_gap: f64,
}

#[derive(Args, Serialize)]
struct StrongPufArgs {
    #[command(subcommand)]
    #[serde(skip)]
    command: StrongPufCommand,
}

#[derive(Subcommand)]
enum StrongPufCommand {
    /// Print the 256-bit response tag for a key and challenge.
    Respond(RespondArgs),
    /// Key-bit avalanche sweep: CSV of (flips, mean FHD, std).
    Avalanche(AvalancheArgs),
    /// Weak-noise propagation sweep: CSV of (d, mean FHD, std).
    Noise(NoiseArgs),
    /// Inter-device FHD over independent random keys.
    Inter(InterArgs),
}

#[derive(Args, Serialize)]
struct RespondArgs {
    /// 512-bit key as 128 hex digits.
    #[arg(long)]
    key_hex: String,
    /// Challenge payload as hex bytes.
    #[arg(long)]
    challenge_hex: String,
}

#[derive(Args, Serialize)]
struct AvalancheArgs {
    #[arg(long, default_value_t = 0)]
    flips_from: usize,
    #[arg(long, default_value_t = 8)]
    flips_to: usize,
    #[arg(long, default_value_t = 1000)]
    challenges: usize,
}

#[derive(Args, Serialize)]
struct NoiseArgs {
    /// Comma-separated weak intra-FHD levels.
    #[arg(long, value_delimiter = ',', default_value = "0,0.0001,0.001,0.01,0.1")]
    levels: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

#[derive(Args, Serialize)]
struct InterArgs {
    #[arg(long, default_value_t = 1000)]
    devices: usize,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<pufsec::Error> for CliError {
    fn from(e: pufsec::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let code = match run(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("{TOOL}: {msg}");
            1
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("{TOOL}: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn meta(command: &str, config: serde_json::Value, seed: u64) -> serde_json::Value {
    json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "seed": seed,
        "timestamp": timestamp(),
    })
}

fn write_output(cli: &Cli, content: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| {
                    if !content.ends_with('\n') {
                        out.write_all(b"\n")
                    } else {
                        Ok(())
                    }
                })
                .map_err(|e| CliError::Runtime(format!("writing stdout: {e}")))?;
        }
    }
    Ok(())
}

/// JSON document with the meta block first, then the payload fields.
fn json_document(meta: serde_json::Value, payload: serde_json::Value) -> String {
    let mut doc = serde_json::Map::new();
    if let serde_json::Value::Object(m) = meta {
        doc.extend(m);
    }
    if let serde_json::Value::Object(p) = payload {
        doc.extend(p);
    }
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("valid json");
    s.push('\n');
    s
}

/// CSV document with the meta block as leading comment lines.
fn csv_document(meta: &serde_json::Value, header: &str, rows: &[String]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "# {TOOL} {} | command: {} | seed: {}\n",
        meta["version"].as_str().unwrap_or(""),
        meta["command"].as_str().unwrap_or(""),
        meta["seed"]
    ));
    s.push_str(&format!("# config: {}\n", meta["config"]));
    s.push_str(&format!("# timestamp: {}\n", meta["timestamp"]));
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(cli, args),
        Command::Report(args) => cmd_report(cli, args),
        Command::Analytic(args) => cmd_analytic(cli, args),
        Command::OracleValidate(args) => cmd_oracle_validate(cli, args),
        Command::StrongPuf(args) => cmd_strong_puf(cli, args),
    }
}

fn resolve_spec(args: &SimulateArgs) -> Result<(PufSpec, String), CliError> {
    if let Some(name) = &args.preset {
        let preset = find_preset(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown preset '{name}' (available: {})",
                PRESETS.iter().map(|p| p.name).collect::<Vec<_>>().join(", ")
            ))
        })?;
        Ok((preset.spec(args.bits), preset.name.to_string()))
    } else {
        match (args.bias, args.noise) {
            (Some(p), Some(d)) => {
                let spec = PufSpec::new(args.bits, p, d, args.corr)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                Ok((spec, "custom".to_string()))
            }
            _ => Err(CliError::Usage(
                "either --preset or both --bias and --noise are required".into(),
            )),
        }
    }
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<(), CliError> {
    let (spec, family) = resolve_spec(args)?;
    if cli.output.is_none() {
        return Err(CliError::Usage("simulate requires --output".into()));
    }
    let pop = sample_population(&spec, args.devices, args.resamples, Seed(cli.seed))?;
    let config = serde_json::to_value(args).expect("args serialize");
    let doc = json_document(meta("simulate", config, cli.seed), pop.to_json_value());
    let path = cli.output.clone().expect("checked above");
    std::fs::write(&path, &doc)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    println!(
        "{family}: {} devices x {} bits, {} reads each, seed {} -> {}",
        args.devices,
        spec.m,
        args.resamples,
        cli.seed,
        path.display()
    );
    Ok(())
}

fn cmd_report(cli: &Cli, args: &ReportArgs) -> Result<(), CliError> {
    let raw = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Runtime(format!("reading {}: {e}", args.input.display())))?;
    let value: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| CliError::Runtime(format!("{} is not valid JSON: {e}", args.input.display())))?;
    let pop = Population::from_json_value(&value)
        .map_err(|e| CliError::Runtime(format!("{} is not a population file: {e}", args.input.display())))?;
    let params = GuessworkParams {
        rho: args.rho,
        ..GuessworkParams::default()
    };
    let report = security_report_binned(&pop, &params, args.bins)?;
    let config = serde_json::to_value(args).expect("args serialize");
    let meta = meta("report", config, pop.seed.0);
    if let Some(choice) = args.histogram {
        if args.bins.is_none() {
            return Err(CliError::Usage("--histogram requires --bins".into()));
        }
        let summary = match choice {
            HistogramChoice::Intra => report.intra_fhd.as_ref(),
            HistogramChoice::IntraPairs => report.intra_fhd_read_pairs.as_ref(),
            HistogramChoice::Inter => report.inter_fhd.as_ref(),
        };
        let hist = summary.and_then(|s| s.histogram.as_ref()).ok_or_else(|| {
            CliError::Runtime("the requested summary is absent for this population".into())
        })?;
        let rows: Vec<String> = hist
            .rows()
            .iter()
            .map(|(center, count)| format!("{center:.6},{count}"))
            .collect();
        return write_output(cli, &csv_document(&meta, "fhd_bin_center,count", &rows));
    }
    match cli.format {
        Format::Json => {
            let payload = json!({ "report": serde_json::to_value(&report).expect("report serialize") });
            write_output(cli, &json_document(meta, payload))
        }
        Format::Csv => {
            let (header, row) = report.csv();
            write_output(cli, &csv_document(&meta, &header, &[row]))
        }
    }
}

fn sweep_points(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || to < from {
        return Err(CliError::Usage(
            "need --step > 0 and --to >= --from".into(),
        ));
    }
    let mut xs = Vec::new();
    let n = ((to - from) / step).round() as usize;
    for i in 0..=n {
        let x = from + step * i as f64;
        if x <= to + step * 1e-9 {
            xs.push(x);
        }
    }
    Ok(xs)
}

fn cmd_analytic(cli: &Cli, args: &AnalyticArgs) -> Result<(), CliError> {
    let xs = sweep_points(args.from, args.to, args.step)?;
    let (label, rows): (&str, Vec<String>) = match args.curve.as_str() {
        "renyi-half" => (
            "p,renyi_half_bits",
            xs.iter()
                .map(|&p| Ok(format!("{p:.6},{:.6}", renyi_entropy(p, 0.5)?)))
                .collect::<Result<_, pufsec::Error>>()?,
        ),
        "one-minus-hd" => (
            "d,one_minus_hd_bits",
            xs.iter()
                .map(|&d| Ok(format!("{d:.6},{:.6}", 1.0 - binary_entropy(d)?)))
                .collect::<Result<_, pufsec::Error>>()?,
        ),
        "min-entropy" => (
            "p,min_entropy_rate_bits",
            xs.iter()
                .map(|&p| {
                    Ok(format!(
                        "{p:.6},{:.6}",
                        min_entropy_distortion_rate(p, args.distortion)?
                    ))
                })
                .collect::<Result<_, pufsec::Error>>()?,
        ),
        "theorem2-rate" => (
            "s,rate_bits",
            xs.iter()
                .map(|&s| {
                    let r = failure_constrained_rate(args.bias, args.distortion, args.rho, s)?;
                    Ok(format!("{s:.6},{:.6}", r.rate))
                })
                .collect::<Result<_, pufsec::Error>>()?,
        ),
        "auth-cdf" => (
            "l,success_probability",
            xs.iter()
                .map(|&l| {
                    Ok(format!(
                        "{},{:.6}",
                        l.round() as u64,
                        auth_success_cdf(args.min_entropy_bits, l.round() as u64)?
                    ))
                })
                .collect::<Result<_, pufsec::Error>>()?,
        ),
        "mac-eta" => (
            "l,log2_avg_guesswork",
            xs.iter()
                .map(|&l| {
                    let g = mac_avg_guesswork(
                        args.mac_n,
                        l.round() as u32,
                        args.mac_bias,
                        args.mac_mapping.into(),
                    )?;
                    Ok(format!("{},{:.6}", l.round() as u32, g.log2_total))
                })
                .collect::<Result<_, pufsec::Error>>()?,
        ),
        other => {
            return Err(CliError::Usage(format!(
                "unknown curve '{other}' (known: renyi-half, one-minus-hd, min-entropy, \
theorem2-rate, auth-cdf, mac-eta)"
            )))
        }
    };
    let config = serde_json::to_value(args).expect("args serialize");
    let meta = meta("analytic", config, cli.seed);
    write_output(cli, &csv_document(&meta, label, &rows))
}

fn cmd_oracle_validate(cli: &Cli, args: &OracleValidateArgs) -> Result<(), CliError> {
    let config = ValidationConfig {
        max_support_bits: args.max_support_bits,
        num_distributions: args.distributions,
        conditional_bits: args.conditional_bits,
        max_rate_gap: args.max_rate_gap,
        seed: Seed(cli.seed),
        ..ValidationConfig::default()
    };
    let report = run_validation(&config)?;
    let config_json = serde_json::to_value(args).expect("args serialize");
    let payload = json!({ "validation": serde_json::to_value(&report).expect("report serialize") });
    write_output(cli, &json_document(meta("oracle-validate", config_json, cli.seed), payload))?;
    if report.all_passed {
        Ok(())
    } else {
        Err(CliError::Runtime(
            "oracle validation failed; see report for the failing checks".into(),
        ))
    }
}

fn summary_rows(pairs: &[(f64, pufsec::metrics::DistributionSummary)]) -> Vec<String> {
    pairs
        .iter()
        .map(|(x, s)| format!("{x},{:.6},{:.6}", s.mean, s.std_dev))
        .collect()
}

fn cmd_strong_puf(cli: &Cli, args: &StrongPufArgs) -> Result<(), CliError> {
    match &args.command {
        StrongPufCommand::Respond(r) => {
            let key = BitVector::from_hex(&r.key_hex, KEY_BITS)
                .map_err(|e| CliError::Usage(format!("--key-hex: {e}")))?;
            let payload = hex_to_bytes(&r.challenge_hex)
                .map_err(|e| CliError::Usage(format!("--challenge-hex: {e}")))?;
            let device = build_device(&key)?;
            let tag = device.respond(&Challenge::new(payload)?);
            write_output(cli, &tag.to_hex())
        }
        StrongPufCommand::Avalanche(a) => {
            if a.flips_to < a.flips_from {
                return Err(CliError::Usage("--flips-to must be >= --flips-from".into()));
            }
            let mut key_rng_seed = cli.seed;
            // device key is itself seeded so the whole sweep is reproducible
            let key = BitVector::from_fn(KEY_BITS, |i| {
                key_rng_seed = key_rng_seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407 ^ i as u64);
                key_rng_seed >> 63 == 1
            });
            let device = build_device(&key)?;
            let mut pairs = Vec::new();
            for k in a.flips_from..=a.flips_to {
                let s = avalanche_experiment(&device, k, a.challenges, Seed(cli.seed))?;
                pairs.push((k as f64, s));
            }
            let config = serde_json::to_value(a).expect("args serialize");
            let meta = meta("strong-puf avalanche", config, cli.seed);
            write_output(cli, &csv_document(&meta, "key_bit_flips,mean_fhd,std_fhd", &summary_rows(&pairs)))
        }
        StrongPufCommand::Noise(n) => {
            let mut pairs = Vec::new();
            for &d in &n.levels {
                let s = noise_propagation(d, n.trials, Seed(cli.seed))?;
                pairs.push((d, s));
            }
            let config = serde_json::to_value(n).expect("args serialize");
            let meta = meta("strong-puf noise", config, cli.seed);
            write_output(cli, &csv_document(&meta, "weak_intra_fhd,mean_fhd,std_fhd", &summary_rows(&pairs)))
        }
        StrongPufCommand::Inter(i) => {
            let s = inter_device_experiment(i.devices, Seed(cli.seed))?;
            let config = serde_json::to_value(i).expect("args serialize");
            let meta = meta("strong-puf inter", config, cli.seed);
            match cli.format {
                Format::Json => {
                    let payload = json!({ "inter_fhd": serde_json::to_value(&s).expect("summary") });
                    write_output(cli, &json_document(meta, payload))
                }
                Format::Csv => write_output(cli, &csv_document(
                    &meta,
                    "devices,mean_fhd,std_fhd",
                    &[format!("{},{:.6},{:.6}", i.devices, s.mean, s.std_dev)],
                )),
            }
        }
    }
}

fn hex_to_bytes(s: &str) -> Result<Vec<u8>, String> {
    if s.is_empty() || s.len() % 2 != 0 {
        return Err("need a nonempty even-length hex string".into());
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).map_err(|e| e.to_string()))
        .collect()
}
