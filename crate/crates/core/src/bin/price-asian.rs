use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mlqmc::asian::{MarketParams, Method, OptionParams};
use mlqmc::harness::{
    emit, emit_table1, emit_table2, run_report, run_table1, run_table2, EmitOptions, ExperimentConfig, Format,
};

/// Price a discretely monitored Asian call with (multilevel) Monte Carlo or
/// quasi-Monte Carlo and compare path constructions.
#[derive(Debug, Parser)]
#[command(name = "price-asian", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep N_L and methods with the multilevel estimator.
    Table1(Table1Args),
    /// Multilevel versus single-level QMC with the regression transform.
    Table2(Table2Args),
}

#[derive(Debug, Args)]
struct MarketArgs {
    #[arg(long, default_value_t = 0.04, allow_negative_numbers = true)]
    rate: f64,
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
    #[arg(long, default_value_t = 100.0)]
    spot: f64,
    #[arg(long, default_value_t = 100.0)]
    strike: f64,
    #[arg(long, default_value_t = 1.0)]
    maturity: f64,
}

impl MarketArgs {
    fn params(&self) -> mlqmc::Result<(MarketParams, OptionParams)> {
        Ok((
            MarketParams::new(self.rate, self.sigma, self.spot)?,
            OptionParams::new(self.strike, self.maturity)?,
        ))
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, default_value_t = ExperimentConfig::DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = ExperimentConfig::DEFAULT_SEED)]
    seed: u64,
    /// csv or md
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: Format,
    /// Leave timing fields empty (output then depends on the seed only).
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// mc, forward, pca, haar or regression
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    /// Use the multilevel estimator (requires --nl).
    #[arg(long)]
    multilevel: bool,
    /// Finest level; the finest grid has m^L dates.
    #[arg(long = "L", default_value_t = 10)]
    levels: usize,
    /// Base between consecutive levels.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Finest-level sample count N_L (multilevel).
    #[arg(long, conflicts_with = "n")]
    nl: Option<usize>,
    /// Sample count N (single level).
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    market: MarketArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct Table1Args {
    #[arg(long = "L", default_value_t = 10)]
    levels: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Comma-separated finest-level sample counts.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64")]
    nl: Vec<usize>,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "mc,forward,pca,regression")]
    methods: Vec<Method>,
    #[command(flatten)]
    market: MarketArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct Table2Args {
    #[arg(long = "L", default_value_t = 10)]
    levels: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Finest-level sample count of the multilevel estimator.
    #[arg(long, default_value_t = 64)]
    nl: usize,
    /// Sample count of the single-level estimator.
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[command(flatten)]
    market: MarketArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: mlqmc::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: mlqmc::Error| e.to_string())
}

fn template(levels: usize, m: usize, market: &MarketArgs, output: &OutputArgs) -> mlqmc::Result<ExperimentConfig> {
    let (market, option) = market.params()?;
    Ok(ExperimentConfig::multilevel(Method::Regression, levels, m, 1)
        .with_market(market, option)
        .with_runs(output.runs)
        .with_seed(output.seed))
}

fn run(cli: Cli) -> mlqmc::Result<String> {
    match cli.command {
        Some(Command::Table1(args)) => {
            let base = template(args.levels, args.m, &args.market, &args.output)?;
            let reports = run_table1(&base, &args.nl, &args.methods)?;
            let opts = EmitOptions {
                omit_timing: args.output.omit_timing,
            };
            Ok(emit_table1(&reports, args.output.format, opts))
        }
        Some(Command::Table2(args)) => {
            let base = template(args.levels, args.m, &args.market, &args.output)?;
            let ml = ExperimentConfig {
                samples: args.nl,
                ..base
            };
            let sl = ExperimentConfig {
                multilevel: false,
                samples: args.n,
                ..base
            };
            let report = run_table2(&ml, &sl)?;
            let opts = EmitOptions {
                omit_timing: args.output.omit_timing,
            };
            Ok(emit_table2(&report, args.output.format, opts))
        }
        None => {
            let args = cli.run;
            let method = args
                .method
                .ok_or_else(|| mlqmc::Error::InvalidConfig("--method is required".into()))?;
            let samples = match (args.multilevel, args.nl, args.n) {
                (true, Some(nl), None) => nl,
                (false, None, Some(n)) => n,
                (true, _, _) => return Err(mlqmc::Error::InvalidConfig("--multilevel needs --nl".into())),
                (false, _, _) => {
                    return Err(mlqmc::Error::InvalidConfig(
                        "single-level runs need --n (use --multilevel with --nl)".into(),
                    ))
                }
            };
            let cfg = ExperimentConfig {
                method,
                multilevel: args.multilevel,
                samples,
                ..template(args.levels, args.m, &args.market, &args.output)?
            };
            let report = run_report(&cfg)?;
            let opts = EmitOptions {
                omit_timing: args.output.omit_timing,
            };
            Ok(emit(&[report], args.output.format, opts))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
