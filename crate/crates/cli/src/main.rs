//! `adaptive-sim`: run adaptive-preparation experiments, estimate fidelities,
//! certify the depth-4 fidelity ceiling, cross-check against the statevector
//! oracle, and execute adaptive-circuit files.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
//! violation.

use adaptive_sim::bound;
use adaptive_sim::circuit;
use adaptive_sim::equiv;
use adaptive_sim::fidelity;
use adaptive_sim::layout::CodeLayout;
use adaptive_sim::prep::{self, NoiseModel, ShotRecord};
use adaptive_sim::rng::shot_rng;
use adaptive_sim::tableau::StabilizerTableau;
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "adaptive-sim", version, about = "Adaptive surface-code state preparation: simulation, fidelity estimation and depth-bound certificates", disable_help_flag = false)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptive preparation and write a shot-record stream.
    Prepare(PrepareArgs),
    /// Estimate fidelity (lower bound, per-stabilizer values, bootstrap σ).
    Estimate(EstimateArgs),
    /// Emit the causal-cone and POVM fidelity-ceiling certificate.
    Bound(BoundArgs),
    /// Cross-check the tableau engine against the statevector oracle.
    OracleCheck(OracleCheckArgs),
    /// Parse and execute an adaptive-circuit file, dumping register outcomes.
    RunQasm(RunQasmArgs),
    /// Export the strip layout as a JSON document.
    Layout(LayoutArgs),
}

#[derive(Args)]
struct PrepareArgs {
    /// Strip length L (odd).
    #[arg(long, default_value_t = 5)]
    length: usize,
    /// X-basis shot count.
    #[arg(long = "shots-x", default_value_t = 1000)]
    shots_x: u64,
    /// Z-basis shot count.
    #[arg(long = "shots-z", default_value_t = 1000)]
    shots_z: u64,
    /// Noise probabilities p1,p2,pm,pi.
    #[arg(long, default_value = "0,0,0,0", value_parser = parse_noise)]
    noise: NoiseModel,
    /// Master seed for the per-shot RNG streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Shot-record file written by `prepare` ("-" for stdin).
    #[arg(long)]
    input: PathBuf,
    /// Bootstrap resample count.
    #[arg(long, default_value_t = 100)]
    resamples: usize,
    /// Seed for the bootstrap RNG.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, default_value_t = 5)]
    length: usize,
    /// Circuit depth for the causal-cone analysis.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Grid step for the product-form maximization.
    #[arg(long = "grid-step", default_value_t = 1e-3)]
    grid_step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Strip length (the 19-qubit L=5 strip is the oracle's largest case).
    #[arg(long, default_value_t = 5)]
    length: usize,
    /// Syndrome sample count for the distribution comparison.
    #[arg(long, default_value_t = 10000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunQasmArgs {
    /// Circuit file.
    file: PathBuf,
    #[arg(long, default_value_t = 1)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LayoutArgs {
    #[arg(long, default_value_t = 5)]
    length: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_noise(s: &str) -> Result<NoiseModel, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("expected four comma-separated probabilities p1,p2,pm,pi".into());
    }
    let mut v = [0.0f64; 4];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|e| e.to_string())?;
    }
    let nm = NoiseModel { p1: v[0], p2: v[1], pm: v[2], pi: v[3] };
    nm.validate().map_err(|e| e.to_string())?;
    Ok(nm)
}

struct Failure {
    code: u8,
    message: String,
}

fn data_err(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_DATA, message: e.to_string() }
}

fn usage_err(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, message: e.to_string() }
}

fn internal_err(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INTERNAL, message: e.to_string() }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| data_err(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout().flush().map_err(|e| data_err(e))
        }
    }
}

fn build_layout(length: usize) -> Result<CodeLayout, Failure> {
    CodeLayout::strip(length).map_err(usage_err)
}

fn cmd_prepare(args: PrepareArgs) -> Result<(), Failure> {
    if args.shots_x == 0 || args.shots_z == 0 {
        let basis = if args.shots_x == 0 { "x" } else { "z" };
        return Err(usage_err(format!("zero shots in basis {basis}")));
    }
    let layout = build_layout(args.length)?;
    let records = prep::run_experiment(&layout, args.noise, args.shots_x, args.shots_z, args.seed)
        .map_err(internal_err)?;
    let manifest = json!({
        "kind": "manifest",
        "format": "adaptive-sim/v1",
        "version": env!("CARGO_PKG_VERSION"),
        "layout": layout.id(),
        "layout_hash": layout.hash(),
        "l": args.length,
        "master_seed": args.seed,
        "noise": args.noise,
        "shots_x": args.shots_x,
        "shots_z": args.shots_z,
    });
    let mut text = manifest.to_string();
    text.push('\n');
    for r in &records {
        text.push_str(&serde_json::to_string(r).expect("records serialize"));
        text.push('\n');
    }
    write_output(&args.out, &text)
}

fn read_records(path: &PathBuf) -> Result<(serde_json::Value, Vec<ShotRecord>), Failure> {
    let content = if path.as_os_str() == "-" {
        use std::io::Read;
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(data_err)?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| data_err(format!("cannot read {}: {e}", path.display())))?
    };
    let mut lines = content.lines().filter(|l| !l.trim().is_empty());
    let manifest: serde_json::Value = match lines.next() {
        None => return Err(data_err("empty record file")),
        Some(first) => serde_json::from_str(first)
            .map_err(|e| data_err(format!("malformed manifest line: {e}")))?,
    };
    if manifest["kind"] != "manifest" {
        return Err(data_err("first line is not a run manifest"));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let r: ShotRecord = serde_json::from_str(line)
            .map_err(|e| data_err(format!("malformed record on line {}: {e}", i + 2)))?;
        records.push(r);
    }
    Ok((manifest, records))
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), Failure> {
    let (manifest, records) = read_records(&args.input)?;
    let l = manifest["l"].as_u64().ok_or_else(|| data_err("manifest missing `l`"))? as usize;
    let layout = build_layout(l)?;
    if manifest["layout_hash"] != json!(layout.hash()) {
        return Err(data_err("record manifest layout hash does not match this build's layout"));
    }
    let mut rng = shot_rng(args.seed, u64::MAX);
    let est = fidelity::estimate(&records, &layout, args.resamples, &mut rng)
        .map_err(data_err)?;
    let mut doc = serde_json::to_value(&est).expect("estimate serializes");
    doc["kind"] = json!("fidelity-report");
    doc["layout"] = json!(layout.id());
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    write_output(&args.out, &text)
}

fn cmd_bound(args: BoundArgs) -> Result<(), Failure> {
    let layout = build_layout(args.length)?;
    let cones = bound::cones_disjoint(&layout, args.depth);
    let ceiling = bound::max_product_form_bound(args.grid_step).map_err(usage_err)?;
    let doc = json!({
        "kind": "bound-certificate",
        "layout": layout.id(),
        "depth": args.depth,
        "cones": cones,
        "product_form_ceiling": ceiling,
        "grid_step": args.grid_step,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("certificate serializes");
    text.push('\n');
    write_output(&args.out, &text)
}

fn cmd_oracle_check(args: OracleCheckArgs) -> Result<(), Failure> {
    let report = equiv::oracle_equivalence(args.length, args.shots, args.seed).map_err(|e| {
        match &e {
            equiv::EquivError::Layout(_) | equiv::EquivError::Oracle(_) => usage_err(e),
            equiv::EquivError::Internal(_) => internal_err(e),
        }
    })?;
    let mut doc = serde_json::to_value(&report).expect("report serializes");
    doc["kind"] = json!("oracle-equivalence");
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    write_output(&args.out, &text)?;
    if report.pass {
        Ok(())
    } else {
        Err(internal_err("oracle equivalence failed"))
    }
}

fn cmd_run_qasm(args: RunQasmArgs) -> Result<(), Failure> {
    let source = std::fs::read_to_string(&args.file)
        .map_err(|e| data_err(format!("cannot read {}: {e}", args.file.display())))?;
    let circuit = circuit::parse(&source).map_err(data_err)?;
    let mut text = String::new();
    for shot in 0..args.shots {
        if circuit.n_qubits() == 0 {
            break; // empty circuit: empty trace
        }
        let mut t = StabilizerTableau::zero_state(circuit.n_qubits());
        let mut rng = shot_rng(args.seed, shot);
        let rec = circuit::execute(&circuit, &mut t, &mut rng, None).map_err(internal_err)?;
        let regs: serde_json::Map<String, serde_json::Value> = rec
            .registers(&circuit)
            .into_iter()
            .map(|(name, bits)| {
                (name, json!(bits.iter().map(|&b| u8::from(b)).collect::<Vec<_>>()))
            })
            .collect();
        text.push_str(&json!({"shot": shot, "registers": regs}).to_string());
        text.push('\n');
    }
    write_output(&args.out, &text)
}

fn cmd_layout(args: LayoutArgs) -> Result<(), Failure> {
    let layout = build_layout(args.length)?;
    let mut text =
        serde_json::to_string_pretty(&layout.to_json()).expect("layout serializes");
    text.push('\n');
    write_output(&args.out, &text)
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ADAPTIVE_PREP_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            // worker count affects speed only; output order is fixed by shot index
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = match cli.command {
        Command::Prepare(args) => cmd_prepare(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Bound(args) => cmd_bound(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
        Command::RunQasm(args) => cmd_run_qasm(args),
        Command::Layout(args) => cmd_layout(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
