//! Replicated pricing experiments and their reports.
//!
//! Replication `i` of an experiment with master seed `s` draws everything
//! from `derive_seed(s, i)`; level `l` of that replication uses
//! `derive_seed(derive_seed(s, i), l)` for its random shift (quasi-Monte
//! Carlo) or its pseudorandom stream (Monte Carlo). Replications are
//! independent, run on the rayon pool and are reduced in index order, so a
//! fixed seed gives identical estimates regardless of thread count.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::asian::{build_level_problem, build_single_level_problem, discount, AsianProblem, MarketParams, Method, OptionParams};
use crate::error::{Error, Result};
use crate::low_discrepancy::{derive_seed, PseudoRandom, RandomShift, SeededRng, ShiftedSobol, SobolGenerator, UniformSource};
use crate::mlevel::{ml_estimate, sample_mean, LevelPlan, LevelProblem};

pub const CSV_HEADER: &str = "method,multilevel,L,m,n_finest,N_L,runs,average,stddev,avg_time_s,seed";

const TIMING_NOTE: &str =
    "Times are mean wall-clock seconds per replication, excluding one-time setup (direction tables, transforms).";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub method: Method,
    pub multilevel: bool,
    /// Finest level `L`; the finest grid has `m^L` dates.
    pub finest: usize,
    /// Base `m`.
    pub base: usize,
    /// `N_L` in multilevel mode, `N` otherwise.
    pub samples: usize,
    pub runs: usize,
    pub market: MarketParams,
    pub option: OptionParams,
    pub seed: u64,
    /// Sample-count factor between consecutive levels.
    pub growth: usize,
}

impl ExperimentConfig {
    pub const DEFAULT_RUNS: usize = 100;
    pub const DEFAULT_SEED: u64 = 2013;

    pub fn multilevel(method: Method, finest: usize, base: usize, finest_samples: usize) -> Self {
        Self {
            method,
            multilevel: true,
            finest,
            base,
            samples: finest_samples,
            runs: Self::DEFAULT_RUNS,
            market: MarketParams::default(),
            option: OptionParams::default(),
            seed: Self::DEFAULT_SEED,
            growth: 2,
        }
    }

    pub fn single_level(method: Method, finest: usize, base: usize, samples: usize) -> Self {
        Self {
            multilevel: false,
            ..Self::multilevel(method, finest, base, samples)
        }
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_market(mut self, market: MarketParams, option: OptionParams) -> Self {
        self.market = market;
        self.option = option;
        self
    }

    pub fn finest_dimension(&self) -> usize {
        self.base.pow(self.finest as u32)
    }

    /// Rejects every configuration error before any sampling happens.
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("sample count must be positive".into()));
        }
        MarketParams::new(self.market.rate, self.market.volatility, self.market.spot)?;
        OptionParams::new(self.option.strike, self.option.maturity)?;
        AsianProblem::new(self.market, self.option, self.base, self.finest)?;
        if self.method == Method::Haar && self.base != 2 {
            return Err(Error::InvalidConfig(format!(
                "the Haar transform needs base 2, got base {}",
                self.base
            )));
        }
        if self.multilevel {
            LevelPlan::with_growth(self.base, self.finest, self.samples, self.growth)?;
        }
        if self.method.is_quasi() {
            let available = crate::low_discrepancy::DirectionTable::embedded().max_dimension();
            if self.finest_dimension() > available {
                return Err(Error::DimensionUnavailable {
                    requested: self.finest_dimension(),
                    available,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStatistics {
    pub average: f64,
    /// Sample standard deviation (divisor `R - 1`); absent for one run.
    pub stddev: Option<f64>,
    /// Mean seconds per replication.
    pub avg_time: f64,
    /// Discounted price of each replication, in replication order.
    pub estimates: Vec<f64>,
}

impl RunStatistics {
    pub fn from_runs(estimates: Vec<f64>, seconds: &[f64]) -> Self {
        let r = estimates.len() as f64;
        let average = estimates.iter().sum::<f64>() / r;
        let stddev = (estimates.len() > 1).then(|| {
            (estimates.iter().map(|e| (e - average).powi(2)).sum::<f64>() / (r - 1.0)).sqrt()
        });
        let avg_time = seconds.iter().sum::<f64>() / seconds.len().max(1) as f64;
        Self {
            average,
            stddev,
            avg_time,
            estimates,
        }
    }

    /// Standard error of `average`.
    pub fn standard_error(&self) -> Option<f64> {
        self.stddev.map(|s| s / (self.estimates.len() as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub stats: RunStatistics,
}

enum Source {
    Quasi(ShiftedSobol),
    Pseudo(PseudoRandom),
}

impl UniformSource for Source {
    fn dimension(&self) -> usize {
        match self {
            Source::Quasi(s) => s.dimension(),
            Source::Pseudo(s) => s.dimension(),
        }
    }

    fn fill_uniform(&mut self, out: &mut [f64]) {
        match self {
            Source::Quasi(s) => s.fill_uniform(out),
            Source::Pseudo(s) => s.fill_uniform(out),
        }
    }
}

struct Setup {
    plan: Option<LevelPlan>,
    problems: Vec<LevelProblem>,
    generators: Vec<Option<SobolGenerator>>,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let asian = AsianProblem::new(cfg.market, cfg.option, cfg.base, cfg.finest)?;
        let (plan, problems) = if cfg.multilevel {
            let plan = LevelPlan::with_growth(cfg.base, cfg.finest, cfg.samples, cfg.growth)?;
            let problems = plan
                .levels()
                .map(|l| build_level_problem(l, &asian, cfg.method))
                .collect::<Result<Vec<_>>>()?;
            (Some(plan), problems)
        } else {
            (None, vec![build_single_level_problem(&asian, cfg.method)?])
        };
        let generators = problems
            .iter()
            .map(|p| cfg.method.is_quasi().then(|| SobolGenerator::new(p.dimension())).transpose())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            plan,
            problems,
            generators,
        })
    }

    fn sources(&self, replication_seed: u64) -> Vec<Source> {
        self.problems
            .iter()
            .zip(&self.generators)
            .enumerate()
            .map(|(level, (problem, generator))| {
                let mut rng = SeededRng::new(derive_seed(replication_seed, level as u64));
                match generator {
                    Some(g) => {
                        let shift = RandomShift::random(problem.dimension(), &mut rng);
                        Source::Quasi(ShiftedSobol::new(g.restarted(), shift).expect("matching dimensions"))
                    }
                    None => Source::Pseudo(PseudoRandom::new(problem.dimension(), rng)),
                }
            })
            .collect()
    }

    /// Undiscounted estimate and elapsed seconds of one replication.
    fn replicate(&self, cfg: &ExperimentConfig, index: usize) -> Result<(f64, f64)> {
        let start = Instant::now();
        let mut sources = self.sources(derive_seed(cfg.seed, index as u64));
        let value = match &self.plan {
            Some(plan) => ml_estimate(plan, &self.problems, &mut sources)?.value,
            None => sample_mean(&self.problems[0], cfg.samples, &mut sources[0])?.mean,
        };
        Ok((value, start.elapsed().as_secs_f64()))
    }
}

/// Runs `cfg.runs` independent replications and summarizes the discounted
/// prices.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunStatistics> {
    cfg.validate()?;
    let setup = Setup::new(cfg)?;
    let outcomes = (0..cfg.runs)
        .into_par_iter()
        .map(|i| setup.replicate(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let estimates = outcomes.iter().map(|&(v, _)| discount(v, &cfg.market, &cfg.option)).collect();
    let seconds: Vec<f64> = outcomes.iter().map(|&(_, t)| t).collect();
    Ok(RunStatistics::from_runs(estimates, &seconds))
}

pub fn run_report(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Ok(ExperimentReport {
        config: *cfg,
        stats: run_experiment(cfg)?,
    })
}

/// Sweep over finest-level sample counts and methods in the layout of the
/// method-comparison table.
pub fn run_table1(template: &ExperimentConfig, finest_samples: &[usize], methods: &[Method]) -> Result<Vec<ExperimentReport>> {
    let configs: Vec<ExperimentConfig> = finest_samples
        .iter()
        .flat_map(|&n| {
            methods.iter().map(move |&method| ExperimentConfig {
                method,
                samples: n,
                multilevel: true,
                ..*template
            })
        })
        .collect();
    for cfg in &configs {
        cfg.validate()?;
    }
    configs.iter().map(run_report).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2Report {
    pub multilevel: ExperimentReport,
    pub single: ExperimentReport,
    /// stddev(multilevel) / stddev(single level)
    pub stddev_ratio: Option<f64>,
    /// avg_time(multilevel) / avg_time(single level)
    pub time_ratio: f64,
}

/// Multilevel versus single-level comparison on the same option and grid.
pub fn run_table2(multilevel: &ExperimentConfig, single: &ExperimentConfig) -> Result<Table2Report> {
    if multilevel.market != single.market
        || multilevel.option != single.option
        || multilevel.finest != single.finest
        || multilevel.base != single.base
    {
        return Err(Error::InvalidConfig(
            "compared configurations must price the same option on the same grid".into(),
        ));
    }
    multilevel.validate()?;
    single.validate()?;
    let ml = run_report(multilevel)?;
    let sl = run_report(single)?;
    let stddev_ratio = ml.stats.stddev.zip(sl.stats.stddev).map(|(a, b)| a / b);
    let time_ratio = ml.stats.avg_time / sl.stats.avg_time;
    Ok(Table2Report {
        multilevel: ml,
        single: sl,
        stddev_ratio,
        time_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmitOptions {
    /// Leave timing fields empty so that output depends on the seed only.
    pub omit_timing: bool,
}

fn fmt_average(x: f64) -> String {
    format!("{x:.8}")
}

fn fmt_stddev(s: Option<f64>) -> String {
    s.map(|s| format!("{s:.6e}")).unwrap_or_default()
}

fn fmt_time(t: f64, opts: EmitOptions) -> String {
    if opts.omit_timing {
        String::new()
    } else {
        format!("{t:.6}")
    }
}

/// One row per report.
pub fn emit(reports: &[ExperimentReport], format: Format, opts: EmitOptions) -> String {
    match format {
        Format::Csv => emit_csv(reports, opts),
        Format::Markdown => emit_markdown_rows(reports, opts),
    }
}

fn emit_csv(reports: &[ExperimentReport], opts: EmitOptions) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for ExperimentReport { config: c, stats: s } in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.method,
            c.multilevel,
            c.finest,
            c.base,
            c.finest_dimension(),
            c.samples,
            c.runs,
            fmt_average(s.average),
            fmt_stddev(s.stddev),
            fmt_time(s.avg_time, opts),
            c.seed
        );
    }
    out
}

fn emit_markdown_rows(reports: &[ExperimentReport], opts: EmitOptions) -> String {
    let mut out = String::from("| method | multilevel | L | m | N_L | runs | average | stddev | time (s) |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for ExperimentReport { config: c, stats: s } in reports {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            c.method,
            if c.multilevel { "yes" } else { "no" },
            c.finest,
            c.base,
            c.samples,
            c.runs,
            fmt_average(s.average),
            fmt_stddev(s.stddev),
            fmt_time(s.avg_time, opts)
        );
    }
    out.push('\n');
    out.push_str(TIMING_NOTE);
    out.push('\n');
    out
}

/// Method-comparison table: one row per `N_L` with average and stddev for
/// each method, and mean times in brackets on the following row.
pub fn emit_table1(reports: &[ExperimentReport], format: Format, opts: EmitOptions) -> String {
    if format == Format::Csv {
        return emit_csv(reports, opts);
    }
    let mut methods: Vec<Method> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for r in reports {
        if !methods.contains(&r.config.method) {
            methods.push(r.config.method);
        }
        if !sizes.contains(&r.config.samples) {
            sizes.push(r.config.samples);
        }
    }
    let mut out = String::from("| N_L |");
    for m in &methods {
        let _ = write!(out, " {m} average | {m} stddev |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|---|".repeat(methods.len()));
    out.push('\n');
    for &n in &sizes {
        let row: Vec<Option<&ExperimentReport>> = methods
            .iter()
            .map(|&m| reports.iter().find(|r| r.config.method == m && r.config.samples == n))
            .collect();
        let _ = write!(out, "| {n} |");
        for r in &row {
            match r {
                Some(r) => {
                    let _ = write!(out, " {:.4} | {} |", r.stats.average, fmt_stddev_short(r.stats.stddev));
                }
                None => out.push_str(" | |"),
            }
        }
        out.push('\n');
        if !opts.omit_timing {
            out.push_str("| |");
            for r in &row {
                match r {
                    Some(r) => {
                        let _ = write!(out, " ({:.4} s) | |", r.stats.avg_time);
                    }
                    None => out.push_str(" | |"),
                }
            }
            out.push('\n');
        }
    }
    if let Some(r) = reports.first() {
        let _ = write!(
            out,
            "\nMultilevel estimates with {} time steps (L = {}, m = {}), {} runs, seed {}.\n",
            r.config.finest_dimension(),
            r.config.finest,
            r.config.base,
            r.config.runs,
            r.config.seed
        );
    }
    out.push_str(TIMING_NOTE);
    out.push('\n');
    out
}

fn fmt_stddev_short(s: Option<f64>) -> String {
    s.map(|s| format!("{s:.2e}")).unwrap_or_default()
}

pub fn emit_table2(report: &Table2Report, format: Format, opts: EmitOptions) -> String {
    let rows = [report.multilevel.clone(), report.single.clone()];
    if format == Format::Csv {
        return emit_csv(&rows, opts);
    }
    let mut out = String::from("| estimator | | average | stddev | time (s) |\n|---|---|---|---|---|\n");
    for r in &rows {
        let (label, size) = if r.config.multilevel {
            ("MLQMC", format!("N_L = {}", r.config.samples))
        } else {
            ("QMC", format!("N = {}", r.config.samples))
        };
        let _ = writeln!(
            out,
            "| {label} - {} | ({size}) | {:.4} | {} | {} |",
            r.config.method,
            r.stats.average,
            fmt_stddev_short(r.stats.stddev),
            fmt_time(r.stats.avg_time, opts)
        );
    }
    let ratio = report.stddev_ratio.map(|x| format!("{x:.3}")).unwrap_or_default();
    let _ = write!(out, "\nstddev ratio (multilevel / single level): {ratio}\n");
    if !opts.omit_timing {
        let _ = writeln!(out, "time ratio (multilevel / single level): {:.3}", report.time_ratio);
    }
    out.push_str(TIMING_NOTE);
    out.push('\n');
    out
}
