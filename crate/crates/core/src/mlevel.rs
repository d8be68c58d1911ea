//! Telescoping multilevel estimator
//!
//! `E f^L(X^L) = E f^0(U^0 X^0) + sum_{l=1..L} E g^l(h_1^l(U^l X^l), h_2^l(U^l X^l))`
//!
//! where `h_2^l` evaluates the level `l-1` inner function on the coarsened
//! input. One transformed normal vector per sample drives both the fine and
//! the coarse evaluation.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::low_discrepancy::{fill_normal, UniformSource};
use crate::ortho::Transform;

/// Block sums scaled by `1/sqrt(m)`: maps a standard normal vector of length
/// `m^l` to one of length `m^(l-1)`.
pub fn coarsen(x: &[f64], m: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; x.len() / m.max(1)];
    coarsen_into(x, m, &mut out)?;
    Ok(out)
}

pub fn coarsen_into(x: &[f64], m: usize, out: &mut [f64]) -> Result<()> {
    if m == 0 || !x.len().is_multiple_of(m) {
        return Err(Error::NotDivisible { len: x.len(), base: m });
    }
    if out.len() != x.len() / m {
        return Err(Error::DimensionMismatch {
            expected: x.len() / m,
            found: out.len(),
        });
    }
    let scale = 1.0 / (m as f64).sqrt();
    for (o, block) in out.iter_mut().zip(x.chunks_exact(m)) {
        *o = scale * block.iter().sum::<f64>();
    }
    Ok(())
}

/// Level geometry and the sample-count schedule
/// `N_l = N_L * growth^(L - l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelPlan {
    base: usize,
    finest: usize,
    finest_samples: usize,
    growth: usize,
}

impl LevelPlan {
    /// Plan with the default sample doubling per coarser level.
    pub fn new(base: usize, finest: usize, finest_samples: usize) -> Result<Self> {
        Self::with_growth(base, finest, finest_samples, 2)
    }

    pub fn with_growth(base: usize, finest: usize, finest_samples: usize, growth: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidConfig(format!("base must be at least 2, got {base}")));
        }
        if finest_samples == 0 {
            return Err(Error::InvalidConfig("finest-level sample count must be positive".into()));
        }
        if growth == 0 {
            return Err(Error::InvalidConfig("sample growth factor must be positive".into()));
        }
        let overflow = || Error::InvalidConfig("level sizes overflow".into());
        u32::try_from(finest)
            .ok()
            .and_then(|l| base.checked_pow(l))
            .ok_or_else(overflow)?;
        u32::try_from(finest)
            .ok()
            .and_then(|l| growth.checked_pow(l))
            .and_then(|g| g.checked_mul(finest_samples))
            .ok_or_else(overflow)?;
        Ok(Self {
            base,
            finest,
            finest_samples,
            growth,
        })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn finest(&self) -> usize {
        self.finest
    }

    pub fn finest_samples(&self) -> usize {
        self.finest_samples
    }

    pub fn growth(&self) -> usize {
        self.growth
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.finest
    }

    /// Sample count `N_l`.
    pub fn samples(&self, level: usize) -> usize {
        assert!(level <= self.finest, "level {level} beyond finest {}", self.finest);
        self.finest_samples * self.growth.pow((self.finest - level) as u32)
    }

    /// Dimension `m^l` of the level-`l` normal vector.
    pub fn dimension(&self, level: usize) -> usize {
        self.base.pow(level as u32)
    }
}

pub type InnerFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type OuterFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type CombineFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

enum Integrand {
    Single { inner: InnerFn, outer: OuterFn },
    Difference { fine: InnerFn, coarse: InnerFn, combine: CombineFn },
}

/// The integrand of one telescoping term together with its orthogonal
/// transform. Inner functions receive the transformed vector `U x`.
pub struct LevelProblem {
    integrand: Integrand,
    transform: Transform,
}

impl std::fmt::Debug for LevelProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LevelProblem")
            .field("dimension", &self.dimension())
            .field("coupled", &self.is_coupled())
            .field("transform", &self.transform)
            .finish()
    }
}

impl LevelProblem {
    /// A term `psi(h(U x))` with no coarse partner: the base level of a
    /// multilevel estimator, or a plain single-level problem.
    pub fn single(inner: InnerFn, outer: OuterFn, transform: Transform) -> Self {
        Self {
            integrand: Integrand::Single { inner, outer },
            transform,
        }
    }

    /// A coupled term `g(h_1(U x), h_2(U x))`. `coarse` receives the fine
    /// vector and is responsible for coarsening it.
    pub fn difference(fine: InnerFn, coarse: InnerFn, combine: CombineFn, transform: Transform) -> Self {
        Self {
            integrand: Integrand::Difference { fine, coarse, combine },
            transform,
        }
    }

    pub fn dimension(&self) -> usize {
        self.transform.dimension()
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn is_coupled(&self) -> bool {
        matches!(self.integrand, Integrand::Difference { .. })
    }

    /// Integrand value at an already transformed vector.
    pub fn evaluate(&self, transformed: &[f64]) -> f64 {
        match &self.integrand {
            Integrand::Single { inner, outer } => outer(inner(transformed)),
            Integrand::Difference { fine, coarse, combine } => combine(fine(transformed), coarse(transformed)),
        }
    }
}

/// Sample mean and unbiased sample variance of one term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSummary {
    pub mean: f64,
    pub variance: f64,
    pub samples: usize,
}

impl LevelSummary {
    /// Standard error of the mean under independent sampling.
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.samples as f64).sqrt()
    }
}

/// Averages the integrand of `problem` over `samples` points of `source`.
pub fn sample_mean<S: UniformSource + ?Sized>(
    problem: &LevelProblem,
    samples: usize,
    source: &mut S,
) -> Result<LevelSummary> {
    let dim = problem.dimension();
    if source.dimension() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: source.dimension(),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("sample count must be positive".into()));
    }
    let mut x = vec![0.0; dim];
    let mut scratch = Vec::with_capacity(dim);
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..samples {
        fill_normal(source, &mut x)?;
        problem.transform.apply_in_place(&mut x, &mut scratch)?;
        let y = problem.evaluate(&x);
        let delta = y - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (y - mean);
    }
    let variance = if samples > 1 { m2 / (samples - 1) as f64 } else { 0.0 };
    Ok(LevelSummary {
        mean,
        variance,
        samples,
    })
}

/// Mean of the level-`level` term over `N_level` points.
pub fn level_mean<S: UniformSource + ?Sized>(
    plan: &LevelPlan,
    level: usize,
    problem: &LevelProblem,
    source: &mut S,
) -> Result<LevelSummary> {
    if level > plan.finest() {
        return Err(Error::InvalidConfig(format!(
            "level {level} beyond finest level {}",
            plan.finest()
        )));
    }
    if problem.dimension() != plan.dimension(level) {
        return Err(Error::DimensionMismatch {
            expected: plan.dimension(level),
            found: problem.dimension(),
        });
    }
    sample_mean(problem, plan.samples(level), source)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    /// Sum of the per-level means.
    pub value: f64,
    pub per_level_means: Vec<f64>,
    pub per_level_variances: Vec<f64>,
    pub per_level_sample_counts: Vec<usize>,
    pub wall_time: Duration,
}

impl EstimatorResult {
    /// Standard error of `value` when every level is sampled independently
    /// with Monte Carlo points.
    pub fn standard_error(&self) -> f64 {
        self.per_level_variances
            .iter()
            .zip(&self.per_level_sample_counts)
            .map(|(v, &n)| v / n as f64)
            .sum::<f64>()
            .sqrt()
    }
}

/// Multilevel estimate over levels `0..=L`; `problems[l]` and `sources[l]`
/// serve level `l`.
pub fn ml_estimate<S: UniformSource>(
    plan: &LevelPlan,
    problems: &[LevelProblem],
    sources: &mut [S],
) -> Result<EstimatorResult> {
    let levels = plan.finest() + 1;
    if problems.len() != levels || sources.len() != levels {
        return Err(Error::InvalidConfig(format!(
            "expected {levels} level problems and sources, got {} and {}",
            problems.len(),
            sources.len()
        )));
    }
    let start = Instant::now();
    let mut summaries = Vec::with_capacity(levels);
    for (level, (problem, source)) in problems.iter().zip(sources.iter_mut()).enumerate() {
        summaries.push(level_mean(plan, level, problem, source)?);
    }
    let wall_time = start.elapsed();
    Ok(EstimatorResult {
        value: summaries.iter().map(|s| s.mean).sum(),
        per_level_means: summaries.iter().map(|s| s.mean).collect(),
        per_level_variances: summaries.iter().map(|s| s.variance).collect(),
        per_level_sample_counts: summaries.iter().map(|s| s.samples).collect(),
        wall_time,
    })
}
