use std::fs::{self, File};
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tiltalloc::aero::{AircraftConfig, DesignFlags};
use tiltalloc::alloc::{AllocRequest, AllocResult, Allocator, BlendPolicy};
use tiltalloc_harness::{
    bench, campaign, command_gap, dump_structure, gates, oracle_invert, run_bench, run_montecarlo,
    run_sweep, sweep, BenchSpec, CampaignSpec, Mode, SweepSpec,
};

const GATE_VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(
    name = "tiltalloc",
    version,
    about = "Exact force allocation for tilt-rotor propeller-wing units"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Aircraft JSON; the built-in reference aircraft when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; results go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    Blend,
    Coupled,
    Decoupled,
}

#[derive(Subcommand)]
enum Command {
    /// Allocate one request ({v_inf, rho, alpha_inf, F_x, F_z}).
    Allocate {
        #[command(flatten)]
        common: Common,
        /// Request JSON file, `-` for stdin.
        #[arg(long, default_value = "-")]
        request: String,
        #[arg(long, value_enum, default_value_t = BranchArg::Blend)]
        branch: BranchArg,
    },
    /// Monte-Carlo accuracy campaign.
    Montecarlo {
        #[command(flatten)]
        common: Common,
        /// Campaign JSON; the published envelope when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_enum, default_value_t = BranchArg::Blend)]
        branch: BranchArg,
    },
    /// Cold versus warm latency of the coupled allocator.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Timed warm iterations.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        cold_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Forward-map surfaces over a (T, delta) grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Sweep JSON; a reference grid when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Brute-force inversion, compared against the coupled allocator.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Request JSON file, `-` for stdin; ignored with --samples.
        #[arg(long, default_value = "-")]
        request: String,
        /// Check this many envelope requests instead of one.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<AircraftConfig<f64>> {
    match path {
        None => Ok(AircraftConfig::reference()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            AircraftConfig::from_json(&text)
                .with_context(|| format!("invalid aircraft config {}", p.display()))
        }
    }
}

fn read_source(src: &str) -> Result<String> {
    if src == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(src).with_context(|| format!("reading {src}"))
    }
}

fn output(common: &Common, name: &str) -> Result<Box<dyn Write>> {
    match &common.out {
        None => Ok(Box::new(io::stdout().lock())),
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let ext = if common.format == Format::Csv {
                "csv"
            } else {
                "json"
            };
            let path = dir.join(format!("{name}.{ext}"));
            Ok(Box::new(
                File::create(&path).with_context(|| format!("creating {}", path.display()))?,
            ))
        }
    }
}

fn write_json<T: serde::Serialize>(mut w: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn allocate_one(alloc: &Allocator, req: &AllocRequest, branch: BranchArg) -> Result<AllocResult> {
    Ok(match branch {
        BranchArg::Blend => alloc.allocate(req, &BlendPolicy::default())?,
        BranchArg::Coupled => alloc.allocate_coupled(req)?,
        BranchArg::Decoupled => alloc.allocate_decoupled(req, 0.0)?,
    })
}

fn cmd_allocate(common: &Common, request: &str, branch: BranchArg) -> Result<u8> {
    let cfg = load_config(&common.config)?;
    let req: AllocRequest =
        serde_json::from_str(&read_source(request)?).context("invalid request")?;
    let alloc = Allocator::new(cfg);
    let r = allocate_one(&alloc, &req, branch)?;
    let mut w = output(common, "result")?;
    match common.format {
        Format::Json => write_json(&mut w, &r)?,
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record([
                "T",
                "delta",
                "branch",
                "residual_design",
                "residual_full",
                "n_candidates",
                "latency",
            ])?;
            c.write_record([
                r.command.thrust.to_string(),
                r.command.delta.to_string(),
                r.branch.as_str().into(),
                r.residual_design.map(|x| x.to_string()).unwrap_or_default(),
                r.residual_full.to_string(),
                r.n_candidates.to_string(),
                r.latency.to_string(),
            ])?;
            c.flush()?;
        }
    }
    if let Some(dir) = &common.out {
        if req.cond.v_inf > 0.0 {
            dump_structure(&alloc, &req, &dir.join("structure"))?;
        }
    }
    Ok(0)
}

fn cmd_montecarlo(
    common: &Common,
    spec: &Option<PathBuf>,
    seed: Option<u64>,
    samples: Option<usize>,
    branch: BranchArg,
) -> Result<u8> {
    let cfg = load_config(&common.config)?;
    let mut spec = match spec {
        None => CampaignSpec::reference_envelope(10_000, 0),
        Some(p) => CampaignSpec::from_json(&fs::read_to_string(p)?)?,
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(n) = samples {
        spec.n_samples = n;
    }
    let mode = match branch {
        BranchArg::Coupled => Mode::Coupled,
        BranchArg::Blend => Mode::Blend,
        BranchArg::Decoupled => bail!("the decoupled branch has no campaign mode"),
    };
    let report = run_montecarlo(&spec, &Allocator::new(cfg), mode)?;
    match common.format {
        Format::Csv => campaign::write_csv(&report.rows, output(common, "samples")?)?,
        Format::Json => write_json(output(common, "summary")?, &report)?,
    }
    if let Some(dir) = &common.out {
        // Both artifacts are always kept when writing to a directory.
        if common.format == Format::Csv {
            write_json(File::create(dir.join("summary.json"))?, &report)?;
        } else {
            campaign::write_csv(&report.rows, File::create(dir.join("samples.csv"))?)?;
        }
    }
    let s = &report.summary;
    eprintln!(
        "samples {} failures {} | residual_full max {:.4} median {:.4} p99 {:.4} (published bound {}) | residual_design max {:e}",
        s.n_samples, s.failures, s.residual_full.max, s.residual_full.median, s.residual_full.p99,
        gates::PUBLISHED_MAX_RESIDUAL_FULL, s.residual_design.max
    );
    let pass = s.failures == 0
        && s.residual_full.max <= gates::MC_MAX_RESIDUAL_FULL
        && s.residual_full.median <= gates::MC_MEDIAN_RESIDUAL_FULL;
    Ok(if pass { 0 } else { GATE_VIOLATION })
}

fn cmd_bench(common: &Common, samples: usize, cold_samples: usize, seed: u64) -> Result<u8> {
    let cfg = load_config(&common.config)?;
    let spec = BenchSpec {
        warm_iters: samples,
        cold_iters: cold_samples,
        seed,
        ..BenchSpec::default()
    };
    let report = run_bench(&cfg, &spec)?;
    match common.format {
        Format::Csv => bench::write_csv(&report.timings, output(common, "timings")?)?,
        Format::Json => write_json(output(common, "bench")?, &report)?,
    }
    eprintln!(
        "cold median {:.3} ms max {:.3} ms | warm median {:.3} ms max {:.3} ms | warm fallbacks {} | infeasible {}",
        report.cold.median * 1e3,
        report.cold.max * 1e3,
        report.warm.median * 1e3,
        report.warm.max * 1e3,
        report.warm_fallbacks,
        report.infeasible
    );
    if report.warm.median > gates::WARM_MEDIAN_SECONDS {
        eprintln!(
            "warning: warm median above the advisory {} ms",
            gates::WARM_MEDIAN_SECONDS * 1e3
        );
    }
    let comparable = report.cold.count > 0 && report.warm.count > 0;
    Ok(if comparable && !report.warm_faster() {
        GATE_VIOLATION
    } else {
        0
    })
}

fn cmd_sweep(common: &Common, spec: &Option<PathBuf>) -> Result<u8> {
    let cfg = load_config(&common.config)?;
    let spec = match spec {
        None => SweepSpec::reference(&cfg),
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?).context("invalid sweep spec")?,
    };
    let rows = run_sweep(&cfg, &spec)?;
    match common.format {
        Format::Csv => sweep::write_csv(&rows, output(common, "sweep")?)?,
        Format::Json => write_json(output(common, "sweep")?, &rows)?,
    }
    Ok(0)
}

#[derive(serde::Serialize)]
struct OracleRow {
    index: usize,
    request: AllocRequest,
    oracle: Option<tiltalloc_harness::OracleResult>,
    coupled: Option<AllocResult>,
    gap: Option<f64>,
    note: Option<String>,
}

fn cmd_oracle(
    common: &Common,
    request: &str,
    samples: Option<usize>,
    seed: u64,
    grid: usize,
) -> Result<u8> {
    let cfg = load_config(&common.config)?;
    let alloc = Allocator::new(cfg);
    let requests: Vec<AllocRequest> = match samples {
        Some(n) => {
            let spec = CampaignSpec::reference_envelope(n, seed);
            (0..n).map(|i| spec.request(i)).collect::<Result<_, _>>()?
        }
        None => vec![serde_json::from_str(&read_source(request)?).context("invalid request")?],
    };
    let mut rows = Vec::new();
    let mut violations = 0;
    for (index, req) in requests.into_iter().enumerate() {
        let o = oracle_invert(&req, &cfg, DesignFlags::default(), grid);
        let c = alloc.allocate_coupled(&req);
        let gap = match (&o, &c) {
            (Ok(o), Ok(c)) => Some(command_gap(&o.command, &c.command, &cfg)),
            _ => None,
        };
        if gap.is_some_and(|g| g > gates::ORACLE_AGREEMENT) {
            violations += 1;
        }
        let note = match (&o, &c) {
            (Err(e), _) => Some(e.to_string()),
            (_, Err(e)) => Some(e.to_string()),
            _ => None,
        };
        rows.push(OracleRow {
            index,
            request: req,
            oracle: o.ok(),
            coupled: c.ok(),
            gap,
            note,
        });
    }
    match common.format {
        Format::Json => write_json(output(common, "oracle")?, &rows)?,
        Format::Csv => {
            let mut c = csv::Writer::from_writer(output(common, "oracle")?);
            c.write_record([
                "index",
                "oracle_T",
                "oracle_delta",
                "coupled_T",
                "coupled_delta",
                "gap",
                "note",
            ])?;
            for r in &rows {
                let f = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
                c.write_record([
                    r.index.to_string(),
                    f(r.oracle.map(|o| o.command.thrust)),
                    f(r.oracle.map(|o| o.command.delta)),
                    f(r.coupled.map(|o| o.command.thrust)),
                    f(r.coupled.map(|o| o.command.delta)),
                    f(r.gap),
                    r.note.clone().unwrap_or_default(),
                ])?;
            }
            c.flush()?;
        }
    }
    eprintln!(
        "{} requests, {} disagreements above {:e}",
        rows.len(),
        violations,
        gates::ORACLE_AGREEMENT
    );
    Ok(if violations == 0 { 0 } else { GATE_VIOLATION })
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::Allocate {
            common,
            request,
            branch,
        } => cmd_allocate(common, request, *branch),
        Command::Montecarlo {
            common,
            spec,
            seed,
            samples,
            branch,
        } => cmd_montecarlo(common, spec, *seed, *samples, *branch),
        Command::Bench {
            common,
            samples,
            cold_samples,
            seed,
        } => cmd_bench(common, *samples, *cold_samples, *seed),
        Command::Sweep { common, spec } => cmd_sweep(common, spec),
        Command::Oracle {
            common,
            request,
            samples,
            seed,
            grid,
        } => cmd_oracle(common, request, *samples, *seed, *grid),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
