use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use psclab::auctions::second_price_at;
use psclab::{
    bid_sp, english_payment_direct, equilibrium_strategy_sp, run_english_clock,
    AuctionFormat, BuiltinModel, InfoModel, RandomStream, SharingContract, SignalProfile, Utility,
};
use psclab_cli::{
    run_experiment, verify_suite, CliError, ConfigError, ExperimentConfig, Overrides, Scope, SweepKind};

#[derive(Parser)]
#[command(name = "psclab", version, about = "Auctions with profit-sharing contracts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one equilibrium bid.
    Bid(BidArgs),
    /// Run a single auction and print its trace.
    Simulate(SimulateArgs),
    /// Sweep the share fraction across contracts and formats.
    Sweep(SweepArgs),
    /// Sweep the share fraction under hidden effort.
    PaSweep(SweepArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct MechanismArgs {
    /// Take model and utility from this experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "example1")]
    model: String,
    #[arg(long)]
    buyers: Option<usize>,
    /// one_time, posc or plsc.
    #[arg(long, default_value = "posc")]
    contract: String,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// CARA utility `scale,aversion`; linear when absent.
    #[arg(long, value_parser = parse_pair)]
    cara: Option<(f64, f64)>,
}

#[derive(Args)]
struct BidArgs {
    #[command(flatten)]
    mechanism: MechanismArgs,
    #[arg(long)]
    y1: f64,
    #[arg(long)]
    z1: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    mechanism: MechanismArgs,
    /// second_price or english.
    #[arg(long, default_value = "second_price")]
    format: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated signals; sampled when absent.
    #[arg(long, value_delimiter = ',')]
    signals: Option<Vec<f64>>,
    /// Price step of the English clock; the direct payment is used when absent.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "fast", value_parser = ["fast", "all"])]
    scope: String,
    /// Inject an inadmissible contract (negative control).
    #[arg(long)]
    tamper: bool,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `scale,aversion`")?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

/// Bad command-line input is a configuration error, not a numeric one.
fn input<T>(r: psclab::Result<T>, field: &str) -> Result<T, CliError> {
    r.map_err(|e| {
        ConfigError::Invalid {
            field: field.into(),
            message: e.to_string(),
        }
        .into()
    })
}

impl MechanismArgs {
    fn build(&self) -> Result<(BuiltinModel, Utility, SharingContract), CliError> {
        let (model, u) = match &self.config {
            Some(path) => {
                let (cfg, _) = ExperimentConfig::from_path(path)?;
                (cfg.build_model()?, cfg.build_utility()?)
            }
            None => {
                let model = input(BuiltinModel::by_name(&self.model, self.buyers), "--model")?;
                let u = match self.cara {
                    Some((scale, aversion)) => input(Utility::cara(scale, aversion), "--cara")?,
                    None => Utility::Linear,
                };
                (model, u)
            }
        };
        let contract = match self.contract.as_str() {
            "one_time" => SharingContract::OneTime,
            "posc" => input(SharingContract::posc(self.alpha), "--alpha")?,
            "plsc" => input(SharingContract::plsc(self.alpha), "--alpha")?,
            other => {
                return Err(ConfigError::Invalid {
                    field: "--contract".into(),
                    message: format!("unknown contract `{other}`, expected one_time, posc or plsc"),
                }
                .into())
            }
        };
        Ok((model, u, contract))
    }
}

fn bid(args: &BidArgs) -> Result<(), CliError> {
    let (model, u, contract) = args.mechanism.build()?;
    let (lo, hi) = model.signal_interval();
    for (name, v) in [("--y1", args.y1), ("--z1", args.z1)] {
        if !(lo..=hi).contains(&v) {
            return Err(ConfigError::Invalid {
                field: name.into(),
                message: format!("{v} is outside the signal interval [{lo}, {hi}]"),
            }
            .into());
        }
    }
    let b = bid_sp(&model, &u, &contract, args.y1, args.z1)?;
    let mean = model.pair_law(args.y1, args.z1)?.mean();
    println!("model        {}", model.name());
    println!("contract     {contract}");
    println!("y1, z1       {}, {}", args.y1, args.z1);
    println!("E[X | y, z]  {mean:.12}");
    println!("bid          {b:.12}");
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let (model, u, contract) = args.mechanism.build()?;
    let format = input(AuctionFormat::parse(&args.format), "--format")?;
    let mut stream = RandomStream::new(args.seed, 0);
    let signals = match &args.signals {
        Some(s) => input(SignalProfile::for_model(&model, s.clone()), "--signals")?,
        None => {
            let mut y = vec![0.0; model.n_buyers()];
            model.sample_signals_into(&mut stream, &mut y);
            SignalProfile::new(y)?
        }
    };
    if let Some(step) = args.step {
        if !(1e-7..=0.5).contains(&step) {
            return Err(ConfigError::Invalid {
                field: "--step".into(),
                message: format!("{step} is outside [1e-7, 0.5]"),
            }
            .into());
        }
    }
    let value_u = stream.uniform();
    println!("model     {}", model.name());
    println!("contract  {contract}");
    println!("format    {format}");
    println!("signals   {:?}", signals.as_slice());
    let outcome = match (format, args.step) {
        (AuctionFormat::SecondPrice, _) => {
            let strategy = equilibrium_strategy_sp(&model, &u, &contract, psclab::equilibrium::DEFAULT_GRID_NODES)?;
            let bids: Vec<f64> = signals.as_slice().iter().map(|&y| strategy.bid(y)).collect();
            println!("bids      {bids:?}");
            second_price_at(&model, &strategy, &contract, &signals, value_u)
        }
        (AuctionFormat::English, Some(step)) => {
            let trace = run_english_clock(&model, &u, &contract, &signals, step, value_u)?;
            for ((buyer, price), q) in trace.drops.iter().zip(&trace.inferred) {
                println!("drop      buyer {buyer} at {price:.6} (inferred signal {q:.6})");
            }
            println!("ticks     {}", trace.ticks);
            trace.outcome
        }
        (AuctionFormat::English, None) => english_payment_direct(&model, &u, &contract, &signals, value_u)?,
    };
    println!("winner    {}", outcome.winner_index);
    println!("payment   {:.12}", outcome.auction_payment);
    println!("value     {:.12}", outcome.realized_value);
    println!("sharing   {:.12}", outcome.sharing_payment);
    println!("profit    {:.12}", outcome.buyer_total_profit);
    println!("revenue   {:.12}", outcome.seller_revenue());
    Ok(())
}

fn sweep(args: &SweepArgs, kind: SweepKind) -> Result<(), CliError> {
    let overrides = Overrides {
        seed: args.seed,
        n_samples: args.n,
        output_dir: args.out.clone(),
    };
    let summary = run_experiment(&args.config, kind, &overrides)?;
    println!(
        "{} rows written to {} in {:.2}s",
        summary.rows.len(),
        summary.output_dir.display(),
        summary.manifest.wall_time_s
    );
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let scope = Scope::parse(&args.scope).expect("clap restricts the scope");
    let report = verify_suite(scope, args.tamper);
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{} checks failed", report.failures())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bid(a) => bid(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a, SweepKind::Contracts),
        Command::PaSweep(a) => sweep(a, SweepKind::PrincipalAgent),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
