use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xcal::access::write_access_events;
use xcal::scenario::{
    evaluate_architectures, render_outputs, render_report, render_states, run_config,
    scenario_accesses, write_outputs, RunMode, ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "xcal",
    version,
    about = "Cross-calibration opportunity planner"
)]
struct Cli {
    /// Worker threads; never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Recorded in the manifest; the pipeline itself is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Dump satellite states over the window.
    Propagate {
        #[command(flatten)]
        io: Io,
        /// Sampling step in seconds.
        #[arg(long, default_value_t = 60.0)]
        step: f64,
    },
    /// Site accesses of every reference and test satellite.
    Access(Io),
    /// Vicarious (calibration-site) opportunities.
    PlanVicarious(Io),
    /// Top-of-atmosphere crossover opportunities.
    PlanToa(Io),
    /// Run the modes selected in the config.
    Run(Io),
    /// Sweep the six transfer-radiometer architectures against the test satellites.
    EvaluateArch(Io),
    /// Pivot counts tables into plot-ready tables.
    Report {
        /// Directory holding counts.csv and/or arch*/counts.csv.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(io: &Io, mode: Option<RunMode>) -> xcal::Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(&io.config)?;
    if let Some(m) = mode {
        cfg.mode = m;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn plan(io: &Io, mode: Option<RunMode>, seed: Option<u64>) -> xcal::Result<()> {
    let cfg = load(io, mode)?;
    let results = run_config(&cfg)?;
    write_outputs(&io.out, &render_outputs(&cfg, &results, seed)?)?;
    Ok(())
}

fn write_one(dir: &Path, name: &str, bytes: Vec<u8>) -> xcal::Result<()> {
    write_outputs(dir, &[(name.to_string(), bytes)]).map(|_| ())
}

fn execute(cli: Cli) -> xcal::Result<()> {
    match cli.command {
        Command::Propagate { io, step } => {
            let cfg = load(&io, None)?;
            write_one(&io.out, "states.csv", render_states(&cfg, step)?)
        }
        Command::Access(io) => {
            let cfg = load(&io, Some(RunMode::Vicarious))?;
            let mut sats = cfg.reference_satellites()?;
            sats.extend(cfg.test_satellites()?);
            let events = scenario_accesses(&cfg, &sats, &cfg.sites()?)?;
            let mut buf = Vec::new();
            write_access_events(&mut buf, &events)?;
            write_one(&io.out, "access_events.csv", buf)
        }
        Command::PlanVicarious(io) => plan(&io, Some(RunMode::Vicarious), cli.seed),
        Command::PlanToa(io) => plan(&io, Some(RunMode::Toa), cli.seed),
        Command::Run(io) => plan(&io, None, cli.seed),
        Command::EvaluateArch(io) => {
            let cfg = load(&io, None)?;
            for (arch_id, results) in evaluate_architectures(&cfg)? {
                let dir = io.out.join(format!("arch{arch_id}"));
                write_outputs(&dir, &render_outputs(&cfg, &results, cli.seed)?)?;
            }
            Ok(())
        }
        Command::Report { input, out } => write_outputs(&out, &render_report(&input)?).map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("xcal: {e}");
            return ExitCode::FAILURE;
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xcal: {e}");
            ExitCode::FAILURE
        }
    }
}
