use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use chargesim::oracle::MmcParams;
use chargesim::output::{print_table, write_json, write_rows_csv, write_run};
use chargesim::pricing::{PricingScheme, SchemeKind};
use chargesim::runner::{run_replications, sweep, validate, SweepPoints};
use chargesim::scenario::GridDemo;
use chargesim::{load_config, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "chargesim",
    version,
    about = "EV fast-charging network simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write summary.json plus CSV tables.
    Run(RunArgs),
    /// Repeat a scenario over demand multipliers or demand:supply targets.
    Sweep(SweepArgs),
    /// Compare a single-station M/M/c simulation with Erlang C.
    Validate(ValidateArgs),
    /// Write a synthetic grid scenario as JSON.
    GenDemo(GenDemoArgs),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(short, long)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the replication count.
    #[arg(short, long)]
    replications: Option<u32>,
    /// Override the pricing scheme (alpha takes the scheme's default).
    #[arg(long)]
    scheme: Option<SchemeKind>,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut config = load_config(&self.config)?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(n) = self.replications {
            config.replications = n;
        }
        if let Some(kind) = self.scheme {
            config.pricing = PricingScheme::step(kind);
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Output directory (default: the scenario's `output.dir`, else `out`).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated demand multipliers.
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "ratios",
        required_unless_present = "ratios"
    )]
    multipliers: Vec<f64>,
    /// Comma-separated demand:supply ratio targets.
    #[arg(long, value_delimiter = ',')]
    ratios: Vec<f64>,
    /// Write sweep.csv into this directory.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 1.5)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 2)]
    servers: u32,
    #[arg(long, default_value_t = 1_000_000)]
    arrivals: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fail unless every relative error is within this tolerance.
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
    /// Write validation.json into this directory.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Default,
    Congested,
    Dense,
}

#[derive(Args)]
struct GenDemoArgs {
    #[arg(long, value_enum, default_value = "default")]
    preset: Preset,
    /// Draw a random small scenario from this seed instead of a preset.
    #[arg(long, conflicts_with = "preset")]
    random: Option<u64>,
    #[arg(long)]
    grid: Option<u32>,
    #[arg(long)]
    cell_miles: Option<f64>,
    #[arg(long)]
    stations: Option<u32>,
    #[arg(long)]
    chargers_min: Option<u32>,
    #[arg(long)]
    chargers_max: Option<u32>,
    #[arg(long)]
    trips_per_hour: Option<f64>,
    #[arg(long)]
    decay_miles: Option<f64>,
    #[arg(long)]
    hotspot: Option<f64>,
    #[arg(long)]
    layout_seed: Option<u64>,
    #[arg(long)]
    scheme: Option<SchemeKind>,
    /// Master seed written into the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn run_cmd(args: RunArgs) -> Result<()> {
    let config = args.common.load()?;
    let dir = args
        .out
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let runs = run_replications(&config)?;
    let agg = write_run(&dir, &config, &runs)?;

    let mut stdout = io::stdout().lock();
    match agg {
        Some(stats) => {
            let rows: Vec<Vec<String>> = stats
                .iter()
                .map(|s| {
                    vec![
                        s.metric.clone(),
                        format!("{:.4}", s.mean),
                        format!("{:.4}", s.sd),
                    ]
                })
                .collect();
            print_table(&mut stdout, &["metric", "mean", "sd"], &rows)?;
        }
        None => {
            let rows: Vec<Vec<String>> = runs[0]
                .summary
                .scalars()
                .iter()
                .map(|(n, v)| vec![n.to_string(), format!("{v:.4}")])
                .collect();
            print_table(&mut stdout, &["metric", "value"], &rows)?;
        }
    }
    writeln!(stdout, "wrote {}", dir.display())?;
    let violations: usize = runs.iter().map(|r| r.audit.violations.len()).sum();
    if violations > 0 {
        bail!(
            "{violations} invariant violations; first: {}",
            first_violation(&runs)
        );
    }
    Ok(())
}

fn first_violation(runs: &[chargesim::RunOutput]) -> String {
    runs.iter()
        .flat_map(|r| r.audit.violations.iter())
        .next()
        .cloned()
        .unwrap_or_default()
}

fn sweep_cmd(args: SweepArgs) -> Result<()> {
    let config = args.common.load()?;
    let points = if args.ratios.is_empty() {
        SweepPoints::Multipliers(args.multipliers)
    } else {
        SweepPoints::Ratios(args.ratios)
    };
    let rows = sweep(&config, &points)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_rows_csv(&dir.join("sweep.csv"), &rows)?;
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                format!("{:.3}", r.multiplier),
                format!("{:.3}", r.demand_supply_ratio),
                format!("{:.1}", r.total_requests),
                format!("{:.2}", r.lost_pct),
                format!("{:.2}", r.lost_pct_sd),
                format!("{:.2}", r.relative_lost_pct),
                format!("{:.2}", r.avg_wait),
            ]
        })
        .collect();
    print_table(
        &mut io::stdout().lock(),
        &[
            "multiplier",
            "ratio",
            "requests",
            "lost_pct",
            "sd",
            "rel_lost_pct",
            "avg_wait",
        ],
        &table,
    )?;
    Ok(())
}

fn validate_cmd(args: ValidateArgs) -> Result<()> {
    let params = MmcParams::new(args.lambda, args.mu, args.servers);
    let rows = validate(&params, args.arrivals, args.seed)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_json(&dir.join("validation.json"), &rows)?;
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.metric.clone(),
                format!("{:.5}", r.simulated),
                format!("{:.5}", r.analytic),
                format!("{:.4}", r.relative_error),
            ]
        })
        .collect();
    print_table(
        &mut io::stdout().lock(),
        &["metric", "simulated", "erlang_c", "rel_error"],
        &table,
    )?;
    if let Some(bad) = rows.iter().find(|r| r.relative_error > args.tolerance) {
        bail!(
            "{} relative error {:.4} exceeds tolerance {}",
            bad.metric,
            bad.relative_error,
            args.tolerance
        );
    }
    Ok(())
}

fn gen_demo_cmd(args: GenDemoArgs) -> Result<()> {
    let mut demo = match (args.random, args.preset) {
        (Some(seed), _) => GridDemo::random(seed),
        (None, Preset::Default) => GridDemo::default(),
        (None, Preset::Congested) => GridDemo::congested(),
        (None, Preset::Dense) => GridDemo::dense(),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = args.$field {
                demo.$field = v;
            }
        )*};
    }
    set!(
        grid,
        cell_miles,
        stations,
        chargers_min,
        chargers_max,
        trips_per_hour,
        decay_miles,
        hotspot,
        layout_seed
    );
    if let Some(kind) = args.scheme {
        demo.pricing = PricingScheme::step(kind);
    }
    let mut config = demo.build();
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;
    let text = config.to_json() + "\n";
    match args.out {
        Some(path) => {
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Validate(a) => validate_cmd(a),
        Command::GenDemo(a) => gen_demo_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // library errors already embed their source in the message
            let mut msg = e.to_string();
            let mut last = msg.clone();
            for cause in e.chain().skip(1) {
                let text = cause.to_string();
                if !last.contains(&text) {
                    msg = format!("{msg}: {text}");
                }
                last = text;
            }
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
