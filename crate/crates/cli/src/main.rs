//! Command-line front end: data ingestion, procedure execution, simulation
//! driving, and machine-readable outputs.
//!
//! Outputs: result CSV on stdout (or `--out`), JSON summary with an embedded
//! run manifest on stderr (or `--summary`). `simulate` and `constants` print
//! JSON on stdout. Exit codes: 0 success, 2 usage, 3 parse, 4 numeric, 5 io.

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use sdci_cli::config;
use sdci_cli::errors::{CliError, CliResult};
use sdci_cli::family::build_family;
use sdci_cli::records::{read_tables, read_units, write_output_rows, OutputRow};
use sdci_core::bivariate::{cochran_armitage, effects_from_table, rect_sdci};
use sdci_core::dist::{fisher_z, fisher_z_inv, LocationFamily};
use sdci_core::marginal::{mqc_psi_breakpoints, FamilyKind, MarginalFamily};
use sdci_core::selection::{bh_directional, sdci, DependencyMode, ProcedureConfig};
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "sdci",
    version,
    about = "Sign-determining confidence intervals with FCR control"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Select units whose adjusted intervals determine the sign, and construct them
    Sdci(SdciArgs),
    /// Directional BH: step-up selection with strict sign decisions, no intervals
    BhDir(BhDirArgs),
    /// Dominance/recessiveness analysis of 2x3 allele-count tables
    Gwas(GwasArgs),
    /// Run a Monte Carlo experiment described by a config file
    Simulate(SimulateArgs),
    /// Print level constants of a marginal family as JSON
    Constants(ConstantsArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the JSON summary here instead of stderr
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct SdciArgs {
    /// Input CSV with header `id,estimate[,sd]`
    #[arg(long)]
    input: PathBuf,
    /// Nominal FCR level
    #[arg(long)]
    q: f64,
    /// Marginal family: symmetric|one-sided|pratt|qc|mqc|mqc-delta
    #[arg(long)]
    family: String,
    #[arg(long)]
    psi: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// independent|general
    #[arg(long, default_value = "independent")]
    dependency: String,
    /// Treat estimates as correlations from samples of this size: transform
    /// in on the z scale, back-transform the interval endpoints
    #[arg(long)]
    fisher_n: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BhDirArgs {
    /// Input CSV with header `id,estimate[,sd]`
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    q: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GwasArgs {
    /// Input CSV with header id,n10,n11,n12,n20,n21,n22
    #[arg(long)]
    input: PathBuf,
    /// Non-coverage level of the PC1 side (1.0 leaves it unconstrained)
    #[arg(long)]
    q1: f64,
    /// Nominal FCR level of the PC2 selection
    #[arg(long)]
    q2: f64,
    /// Family for the PC2 interval: symmetric|qc|mqc
    #[arg(long, default_value = "symmetric")]
    family2: String,
    #[arg(long)]
    psi: Option<f64>,
    /// Trend-test weights, e.g. 0,1,2
    #[arg(long, default_value = "0,1,2")]
    ca_weights: String,
    /// Add 0.5 to every cell instead of failing on zero cells
    #[arg(long)]
    continuity_correction: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat key-value config file
    #[arg(long)]
    config: PathBuf,
    /// Override n_reps from the config
    #[arg(long)]
    reps: Option<usize>,
    /// Override seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    psi: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Also report the sign threshold of this family
    #[arg(long)]
    family: Option<String>,
}

fn main() {
    if let Ok(threads) = std::env::var("SDCI_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Sdci(args) => cmd_sdci(args),
        Cmd::BhDir(args) => cmd_bh_dir(args),
        Cmd::Gwas(args) => cmd_gwas(args),
        Cmd::Simulate(args) => cmd_simulate(args),
        Cmd::Constants(args) => cmd_constants(args),
    };
    if let Err(e) = result {
        eprintln!("sdci: {e}");
        std::process::exit(e.exit_code());
    }
}

fn manifest(subcommand: &str, config: Value) -> Value {
    json!({
        "subcommand": subcommand,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
    })
}

fn write_csv(rows: &[OutputRow], out: &Option<PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => write_output_rows(rows, BufWriter::new(File::create(path)?)),
        None => write_output_rows(rows, std::io::stdout().lock()),
    }
}

fn write_summary(summary: &Value, target: &Option<PathBuf>) -> CliResult<()> {
    let text = summary.to_string();
    match target {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            writeln!(f, "{text}")?;
        }
        None => eprintln!("{text}"),
    }
    Ok(())
}

fn parse_dependency(text: &str) -> CliResult<DependencyMode> {
    match text {
        "independent" => Ok(DependencyMode::Independent),
        "general" => Ok(DependencyMode::GeneralDependency),
        other => Err(CliError::Usage(format!(
            "--dependency expects independent|general, got {other:?}"
        ))),
    }
}

fn cmd_sdci(args: SdciArgs) -> CliResult<()> {
    let family = build_family(&args.family, args.psi, args.delta)?;
    let dependency = parse_dependency(&args.dependency)?;
    let (mut units, has_sd) = read_units(BufReader::new(File::open(&args.input)?))?;

    if let Some(n) = args.fisher_n {
        if has_sd {
            return Err(CliError::Usage(
                "--fisher-n expects unit-variance correlation inputs; drop the sd column".into(),
            ));
        }
        for u in units.iter_mut() {
            u.estimate = fisher_z(u.estimate, n)
                .map_err(|e| CliError::Parse(format!("unit {}: {e}", u.id)))?;
        }
    }

    let cfg = ProcedureConfig {
        q: args.q,
        family,
        dependency,
    };
    let result = sdci(&units, &cfg)?;
    let mut rows = OutputRow::from_selection(&result);
    if let Some(n) = args.fisher_n {
        for row in rows.iter_mut() {
            row.map_endpoints(|e| fisher_z_inv(e, n).expect("n validated"));
        }
    }
    write_csv(&rows, &args.output.out)?;

    let mut config = json!({
        "input": args.input.display().to_string(),
        "q": args.q,
        "family": args.family,
        "dependency": args.dependency,
    });
    if let Some(psi) = args.psi {
        config["psi"] = json!(psi);
    }
    if let Some(delta) = args.delta {
        config["delta"] = json!(delta);
    }
    if let Some(n) = args.fisher_n {
        config["fisher_n"] = json!(n);
    }
    let summary = json!({
        "manifest": manifest("sdci", config),
        "m": units.len(),
        "r": result.r,
        "adjusted_alpha": result.adjusted_alpha,
        "q": args.q,
        "family": args.family,
        "psi": args.psi,
        "delta": args.delta,
    });
    write_summary(&summary, &args.output.summary)
}

fn cmd_bh_dir(args: BhDirArgs) -> CliResult<()> {
    let (units, _) = read_units(BufReader::new(File::open(&args.input)?))?;
    let result = bh_directional(&units, args.q)?;
    let rows = OutputRow::from_selection(&result);
    write_csv(&rows, &args.output.out)?;
    let summary = json!({
        "manifest": manifest("bh-dir", json!({
            "input": args.input.display().to_string(),
            "q": args.q,
        })),
        "m": units.len(),
        "r": result.r,
        "adjusted_alpha": result.adjusted_alpha,
        "q": args.q,
    });
    write_summary(&summary, &args.output.summary)
}

const GWAS_HEADER: [&str; 19] = [
    "id", "beta_dom", "beta_rec", "var_dom", "var_rec", "cov", "pc2_dom", "pc2_rec", "z_pc2",
    "ca_z", "selected", "c1_dom", "c1_rec", "c2_dom", "c2_rec", "c3_dom", "c3_rec", "c4_dom",
    "c4_rec",
];

fn cmd_gwas(args: GwasArgs) -> CliResult<()> {
    if !matches!(args.family2.as_str(), "symmetric" | "qc" | "mqc") {
        return Err(CliError::Usage(format!(
            "--family2 expects symmetric|qc|mqc, got {:?}",
            args.family2
        )));
    }
    let family2 = build_family(&args.family2, args.psi, None)?;
    let weights: Vec<f64> = args
        .ca_weights
        .split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad --ca-weights value {w:?}")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let [w0, w1, w2] = weights.as_slice() else {
        return Err(CliError::Usage(
            "--ca-weights expects three comma-separated values".into(),
        ));
    };
    let ca_w = [*w0, *w1, *w2];

    let tables = read_tables(BufReader::new(File::open(&args.input)?))?;
    let total = tables.len();

    // Degenerate rows are reported and skipped; the analysis runs on the rest.
    let mut kept = Vec::new();
    let mut skipped = 0usize;
    for (id, table) in tables {
        match effects_from_table(&table, args.continuity_correction) {
            Ok(effect) => kept.push((id, table, effect)),
            Err(e) => {
                skipped += 1;
                eprintln!("sdci: skipping row {id}: {e}");
            }
        }
    }
    if kept.is_empty() {
        return Err(CliError::Parse("no analyzable rows in input".into()));
    }

    let effects: Vec<_> = kept.iter().map(|(_, _, e)| *e).collect();
    let selection = rect_sdci(&effects, args.q1, args.q2, &family2)?;

    // Per-row records computed in parallel, written in input order.
    let records: Vec<CliResult<Vec<String>>> =
        kept.par_iter()
            .zip(&selection.items)
            .map(|((id, table, effect), item)| {
                let fmt = |v: f64| format!("{v}");
                // A degenerate trend statistic downgrades to an empty field so
                // one odd row cannot abort the cohort.
                let ca = match cochran_armitage(table, ca_w) {
                    Ok(z) => fmt(z),
                    Err(e) => {
                        eprintln!("sdci: row {id}: {e}");
                        String::new()
                    }
                };
                let mut record = vec![
                    id.clone(),
                    fmt(effect.beta_dom),
                    fmt(effect.beta_rec),
                    fmt(effect.var_dom),
                    fmt(effect.var_rec),
                    fmt(effect.cov),
                ];
                let pc = match &item.region {
                    Some(region) => region.pc,
                    None => sdci_core::bivariate::principal_components(effect)
                        .map_err(CliError::from)?,
                };
                record.push(fmt(pc.pc2[0]));
                record.push(fmt(pc.pc2[1]));
                record.push(fmt(item.z_pc2));
                record.push(ca);
                record.push(item.selected.to_string());
                match item.region.as_ref().and_then(|r| r.corners()) {
                    Some(cs) => {
                        for c in cs {
                            record.push(fmt(c[0]));
                            record.push(fmt(c[1]));
                        }
                    }
                    None => record.resize(record.len() + 8, String::new()),
                }
                Ok(record)
            })
            .collect();

    let out: Box<dyn Write> = match &args.output.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GWAS_HEADER)?;
    for record in records {
        w.write_record(&record?)?;
    }
    w.flush()?;
    drop(w);

    let summary = json!({
        "manifest": manifest("gwas", json!({
            "input": args.input.display().to_string(),
            "q1": args.q1,
            "q2": args.q2,
            "family2": args.family2,
            "psi": args.psi,
            "ca_weights": args.ca_weights,
            "continuity_correction": args.continuity_correction,
        })),
        "m_total": total,
        "m_analyzed": kept.len(),
        "skipped": skipped,
        "r": selection.r,
        "adjusted_alpha2": selection.adjusted_alpha2,
        "q1": args.q1,
        "q2": args.q2,
        "family2": args.family2,
        "psi": args.psi,
    });
    write_summary(&summary, &args.output.summary)
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let raw = config::RawConfig::parse(&text)?;
    let cfg = config::sim_config(&raw, args.reps, args.seed)?;
    let summary = sdci_core::sim::run(&cfg)?;
    let output = json!({
        "manifest": manifest("simulate", json!({
            "config": args.config.display().to_string(),
            "reps": cfg.n_reps,
        })),
        "seed": cfg.seed,
        "summary": serde_json::to_value(summary).map_err(|e| CliError::Io(e.to_string()))?,
    });
    let text = output.to_string();
    match &args.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            writeln!(f, "{text}")?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_constants(args: ConstantsArgs) -> CliResult<()> {
    let dist = LocationFamily::StandardNormal;
    let alpha = args.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!(
            "--alpha must lie in (0,1), got {alpha}"
        )));
    }
    let mut out = json!({
        "manifest": manifest("constants", json!({
            "alpha": alpha,
            "psi": args.psi,
            "delta": args.delta,
            "family": args.family,
        })),
        "alpha": alpha,
        "c_alpha": dist.upper_quantile(alpha)?,
        "c_alpha_2": dist.upper_quantile(alpha / 2.0)?,
    });
    let (psi1, psi2) = mqc_psi_breakpoints(alpha, dist)?;
    out["psi1"] = json!(psi1);
    out["psi2"] = json!(psi2);

    if let Some(psi) = args.psi {
        let mqc = MarginalFamily::standard(FamilyKind::Mqc { psi })?;
        out["psi"] = json!(psi);
        out["cbar"] = json!(mqc.sign_threshold(alpha)?);
        out["ctilde"] = json!(dist.upper_quantile((1.0 - psi) * alpha)?);
    }
    if let Some(delta) = args.delta {
        let band = MarginalFamily::standard(FamilyKind::MqcDelta { delta })?;
        let threshold = band.sign_threshold(alpha)?;
        out["delta"] = json!(delta);
        out["cbar_delta"] = json!(threshold - delta);
        out["band_threshold"] = json!(threshold);
    }
    if let Some(name) = &args.family {
        let family = build_family(name, args.psi, args.delta)?;
        out["family"] = json!(name);
        out["sign_threshold"] = json!(family.sign_threshold(alpha)?);
    }
    println!("{out}");
    Ok(())
}
