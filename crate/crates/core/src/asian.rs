//! Discretely monitored arithmetic Asian call under Black-Scholes.
//!
//! With `n` monitoring dates the average price is
//! `(1/n) sum_k S0 exp((r - sigma^2/2) k T/n + sigma sqrt(T/n) sum_{i<=k} x_i)`
//! and the undiscounted payoff is `max(average - K, 0)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mlevel::{coarsen, EstimatorResult, LevelProblem};
use crate::ortho::{PcaRotation, Transform};
use crate::regress::{build_chain, RegressionSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    pub rate: f64,
    pub volatility: f64,
    pub spot: f64,
}

impl MarketParams {
    pub fn new(rate: f64, volatility: f64, spot: f64) -> Result<Self> {
        if !rate.is_finite() {
            return Err(Error::InvalidConfig(format!("rate must be finite, got {rate}")));
        }
        if !(volatility > 0.0 && volatility.is_finite()) {
            return Err(Error::InvalidConfig(format!("volatility must be positive, got {volatility}")));
        }
        if !(spot > 0.0 && spot.is_finite()) {
            return Err(Error::InvalidConfig(format!("spot must be positive, got {spot}")));
        }
        Ok(Self {
            rate,
            volatility,
            spot,
        })
    }
}

impl Default for MarketParams {
    /// r = 4%, sigma = 30%, S0 = 100.
    fn default() -> Self {
        Self {
            rate: 0.04,
            volatility: 0.3,
            spot: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionParams {
    pub strike: f64,
    pub maturity: f64,
}

impl OptionParams {
    pub fn new(strike: f64, maturity: f64) -> Result<Self> {
        if !(strike >= 0.0 && strike.is_finite()) {
            return Err(Error::InvalidConfig(format!("strike must be non-negative, got {strike}")));
        }
        if !(maturity > 0.0 && maturity.is_finite()) {
            return Err(Error::InvalidConfig(format!("maturity must be positive, got {maturity}")));
        }
        Ok(Self { strike, maturity })
    }
}

impl Default for OptionParams {
    /// At the money (K = 100), one year.
    fn default() -> Self {
        Self {
            strike: 100.0,
            maturity: 1.0,
        }
    }
}

/// Selects the orthogonal transform applied per level. `Mc` uses the
/// identity; it differs from `Forward` only in the point source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mc,
    Forward,
    Pca,
    Haar,
    Regression,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Mc, Method::Forward, Method::Pca, Method::Haar, Method::Regression];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Forward => "forward",
            Method::Pca => "pca",
            Method::Haar => "haar",
            Method::Regression => "regression",
        }
    }

    /// Whether the method samples low-discrepancy points.
    pub fn is_quasi(&self) -> bool {
        !matches!(self, Method::Mc)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

/// Market, contract and level geometry: level `l` monitors `m^l` dates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsianProblem {
    pub market: MarketParams,
    pub option: OptionParams,
    pub base: usize,
    pub finest: usize,
}

impl AsianProblem {
    pub fn new(market: MarketParams, option: OptionParams, base: usize, finest: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidConfig(format!("base must be at least 2, got {base}")));
        }
        u32::try_from(finest)
            .ok()
            .and_then(|l| base.checked_pow(l))
            .ok_or_else(|| Error::InvalidConfig("level dimension overflows".into()))?;
        Ok(Self {
            market,
            option,
            base,
            finest,
        })
    }

    pub fn dimension(&self, level: usize) -> usize {
        self.base.pow(level as u32)
    }
}

/// Arithmetic average of the discrete geometric Brownian path driven by `x`.
pub fn average_price(x: &[f64], market: &MarketParams, option: &OptionParams) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::InvalidConfig("path needs at least one monitoring date".into()));
    }
    let mut sum = 0.0;
    let mut cum = 0.0;
    let (drift, vol) = step_coefficients(x.len(), market, option);
    for (k, &xi) in x.iter().enumerate() {
        cum += xi;
        let s = (drift * (k + 1) as f64 + vol * cum).exp();
        if !s.is_finite() {
            return Err(Error::Overflow(k));
        }
        sum += s;
    }
    Ok(market.spot * sum / x.len() as f64)
}

// Same as `average_price` without validation; overflow propagates as inf.
#[inline]
fn average_unchecked(x: &[f64], drift: f64, vol: f64, spot: f64) -> f64 {
    let mut sum = 0.0;
    let mut exponent = 0.0;
    for &xi in x {
        exponent += drift + vol * xi;
        sum += exponent.exp();
    }
    spot * sum / x.len() as f64
}

fn step_coefficients(n: usize, market: &MarketParams, option: &OptionParams) -> (f64, f64) {
    let dt = option.maturity / n as f64;
    let sigma = market.volatility;
    ((market.rate - 0.5 * sigma * sigma) * dt, sigma * dt.sqrt())
}

pub fn payoff(average: f64, strike: f64) -> f64 {
    (average - strike).max(0.0)
}

/// `a_{1,j} = sum_{k=j}^{n} (S0 sigma / n) sqrt(T/n) exp(r k T/n)` with
/// `n = m^level`: the regression vector of the fine average.
pub fn fine_vector(level: usize, market: &MarketParams, option: &OptionParams, base: usize) -> Vec<f64> {
    let n = base.pow(level as u32);
    let dt = option.maturity / n as f64;
    let scale = market.spot * market.volatility / n as f64 * dt.sqrt();
    suffix_sums(n, |k| scale * (market.rate * k as f64 * dt).exp())
}

/// `a_{2,j} = sum_{k=floor((j-1)/m)+1}^{n/m} (S0 sigma / (n/m)) sqrt(T/n) exp(r k T m/n)`:
/// the regression vector of the coarse average as a function of the fine
/// input. Constant on blocks of `m` coordinates.
pub fn coarse_vector(level: usize, market: &MarketParams, option: &OptionParams, base: usize) -> Result<Vec<f64>> {
    if level == 0 {
        return Err(Error::InvalidConfig("level 0 has no coarse level".into()));
    }
    let n = base.pow(level as u32);
    let coarse_n = n / base;
    let coarse_dt = option.maturity / coarse_n as f64;
    let scale = market.spot * market.volatility / coarse_n as f64 * (option.maturity / n as f64).sqrt();
    let blocks = suffix_sums(coarse_n, |k| scale * (market.rate * k as f64 * coarse_dt).exp());
    Ok(blocks.iter().flat_map(|&b| std::iter::repeat_n(b, base)).collect())
}

// out[j-1] = sum_{k=j}^{n} term(k)
fn suffix_sums(n: usize, term: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for k in (1..=n).rev() {
        acc += term(k);
        out[k - 1] = acc;
    }
    out
}

/// The orthogonal transform `U^l` that `method` prescribes at `level`.
pub fn level_transform(level: usize, problem: &AsianProblem, method: Method) -> Result<Transform> {
    let n = problem.dimension(level);
    let (market, option, base) = (&problem.market, &problem.option, problem.base);
    Ok(match method {
        Method::Mc | Method::Forward => Transform::Identity(n),
        Method::Pca => Transform::Pca(PcaRotation::new(n)?),
        Method::Haar => {
            check_haar(base)?;
            Transform::InverseHaar(n)
        }
        Method::Regression => {
            let mut vectors = vec![fine_vector(level, market, option, base)];
            if level > 0 {
                vectors.push(coarse_vector(level, market, option, base)?);
            }
            Transform::Householder(build_chain(&RegressionSpec::new(vectors)?)?)
        }
    })
}

fn check_haar(base: usize) -> Result<()> {
    if base != 2 {
        return Err(Error::InvalidConfig(format!(
            "the Haar transform needs base 2, got base {base}"
        )));
    }
    Ok(())
}

/// Telescoping term at `level`: the plain payoff at level 0, otherwise
/// `max(h_1 - K, 0) - max(h_2 - K, 0)` with `h_2` the average over the
/// coarsened input.
pub fn build_level_problem(level: usize, problem: &AsianProblem, method: Method) -> Result<LevelProblem> {
    if level > problem.finest {
        return Err(Error::InvalidConfig(format!(
            "level {level} beyond finest level {}",
            problem.finest
        )));
    }
    let transform = level_transform(level, problem, method)?;
    let n = problem.dimension(level);
    let strike = problem.option.strike;
    let spot = problem.market.spot;
    let (drift, vol) = step_coefficients(n, &problem.market, &problem.option);
    let fine = Box::new(move |x: &[f64]| average_unchecked(x, drift, vol, spot));
    if level == 0 {
        return Ok(LevelProblem::single(fine, Box::new(move |y| payoff(y, strike)), transform));
    }
    let base = problem.base;
    let (coarse_drift, coarse_vol) = step_coefficients(n / base, &problem.market, &problem.option);
    let coarse = Box::new(move |x: &[f64]| {
        let c = coarsen(x, base).expect("level dimension is a multiple of the base");
        average_unchecked(&c, coarse_drift, coarse_vol, spot)
    });
    Ok(LevelProblem::difference(
        fine,
        coarse,
        Box::new(move |y1, y2| payoff(y1, strike) - payoff(y2, strike)),
        transform,
    ))
}

/// Single-level problem on the finest grid (`m^L` dates). The regression
/// transform uses the fine average only.
pub fn build_single_level_problem(problem: &AsianProblem, method: Method) -> Result<LevelProblem> {
    let level = problem.finest;
    let transform = match method {
        Method::Regression => {
            let a = fine_vector(level, &problem.market, &problem.option, problem.base);
            Transform::Householder(build_chain(&RegressionSpec::new(vec![a])?)?)
        }
        other => level_transform(level, problem, other)?,
    };
    let n = problem.dimension(level);
    let strike = problem.option.strike;
    let spot = problem.market.spot;
    let (drift, vol) = step_coefficients(n, &problem.market, &problem.option);
    Ok(LevelProblem::single(
        Box::new(move |x: &[f64]| average_unchecked(x, drift, vol, spot)),
        Box::new(move |y| payoff(y, strike)),
        transform,
    ))
}

pub fn discounted_price(result: &EstimatorResult, market: &MarketParams, option: &OptionParams) -> f64 {
    discount(result.value, market, option)
}

pub fn discount(value: f64, market: &MarketParams, option: &OptionParams) -> f64 {
    (-market.rate * option.maturity).exp() * value
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn reference() -> (MarketParams, OptionParams) {
        (MarketParams::default(), OptionParams::default())
    }

    #[test]
    fn one_step_average_at_zero() {
        let market = MarketParams::new(0.0, 0.3, 100.0).unwrap();
        let option = OptionParams::new(100.0, 1.0).unwrap();
        let avg = average_price(&[0.0], &market, &option).unwrap();
        assert!((avg - 95.599_748_183_309_99).abs() < 1e-10);
    }

    #[test]
    fn tiny_volatility_gives_constant_path() {
        let market = MarketParams::new(0.0, 1e-12, 100.0).unwrap();
        let option = OptionParams::default();
        let avg = average_price(&[3.0, -2.0, 5.0, 1.0], &market, &option).unwrap();
        assert!((avg - 100.0).abs() < 1e-8);
    }

    #[test]
    fn average_matches_independent_evaluation() {
        // 30-digit evaluations of the defining sum.
        let (market, option) = reference();
        let avg = average_price(&[1.0, 1.0], &market, &option).unwrap();
        assert!((avg - 137.703_305_042_832_68).abs() < 1e-10);
        let avg = average_price(&[0.3, -1.0, 2.0, 0.5], &market, &option).unwrap();
        assert!((avg - 111.424_768_623_905_02).abs() < 1e-10);
        let (drift, vol) = step_coefficients(4, &market, &option);
        assert!((average_unchecked(&[0.3, -1.0, 2.0, 0.5], drift, vol, 100.0) - avg).abs() < 1e-10);
    }

    #[test]
    fn average_errors() {
        let (market, option) = reference();
        assert!(average_price(&[], &market, &option).is_err());
        assert_eq!(average_price(&[1e6], &market, &option), Err(Error::Overflow(0)));
    }

    #[test]
    fn payoff_cases() {
        assert_eq!(payoff(110.0, 100.0), 10.0);
        assert_eq!(payoff(90.0, 100.0), 0.0);
        assert_eq!(payoff(100.0, 100.0), 0.0);
    }

    #[test]
    fn fine_vector_values() {
        let (market, option) = reference();
        let a = fine_vector(0, &market, &option, 2);
        assert!((a[0] - 31.224_323_225_771_647).abs() < 1e-10);
        let a = fine_vector(1, &market, &option, 2);
        assert!((a[0] - 21.860_334_631_079_7).abs() < 1e-10);
        assert!((a[1] - 11.039_465_345_451_873).abs() < 1e-10);
        let a = fine_vector(2, &market, &option, 2);
        let expected = [15.380_688_057_213_109, 11.592_999_930_647_478, 7.767_244_905_547_144, 3.903_040_403_221_456];
        for (x, e) in a.iter().zip(expected) {
            assert!((x - e).abs() < 1e-10);
        }
        let a = fine_vector(6, &market, &option, 2);
        assert!(a.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn coarse_vector_values() {
        let (market, option) = reference();
        let a = coarse_vector(1, &market, &option, 2).unwrap();
        let single = 100.0 * 0.3 * 0.5f64.sqrt() * 0.04f64.exp();
        assert!((a[0] - single).abs() < 1e-12 && a[0] == a[1]);
        let a = coarse_vector(2, &market, &option, 2).unwrap();
        let expected = [15.457_590_856_643_58, 15.457_590_856_643_58, 7.806_080_806_442_912, 7.806_080_806_442_912];
        for (x, e) in a.iter().zip(expected) {
            assert!((x - e).abs() < 1e-10);
        }
        let a = coarse_vector(2, &market, &option, 4).unwrap();
        assert!((a[0] - 7.690_344_028_606_554).abs() < 1e-10);
        assert!((a[4] - 5.796_499_965_323_739).abs() < 1e-10);
        for block in a.chunks(4) {
            assert!(block.iter().all(|&v| v == block[0]));
        }
        assert!(coarse_vector(0, &market, &option, 2).is_err());
    }

    #[test]
    fn fine_vector_agrees_with_loglinear_formula() {
        use crate::regress::loglinear_regression_vector;
        let (market, option) = reference();
        let n = 8;
        let dt = option.maturity / n as f64;
        let w = vec![market.spot / n as f64; n];
        let c: Vec<Vec<f64>> = (1..=n)
            .map(|k| (1..=n).map(|i| if i <= k { market.volatility * dt.sqrt() } else { 0.0 }).collect())
            .collect();
        let d: Vec<Vec<f64>> = (1..=n)
            .map(|k| {
                let mut row = vec![0.0; n];
                row[0] = (market.rate - 0.5 * market.volatility.powi(2)) * k as f64 * dt;
                row
            })
            .collect();
        let general = loglinear_regression_vector(&w, &c, &d).unwrap();
        let closed = fine_vector(3, &market, &option, 2);
        for (g, c) in general.iter().zip(&closed) {
            assert!((g - c).abs() < 1e-10);
        }
    }

    #[test]
    fn transforms_per_method() {
        let (market, option) = reference();
        let problem = AsianProblem::new(market, option, 2, 10).unwrap();
        let t = build_level_problem(3, &problem, Method::Forward).unwrap();
        assert_eq!(t.transform(), &Transform::Identity(8));
        match build_level_problem(0, &problem, Method::Regression).unwrap().transform() {
            Transform::Householder(chain) => assert!(chain.len() <= 1),
            other => panic!("unexpected {other:?}"),
        }
        match build_level_problem(10, &problem, Method::Regression).unwrap().transform() {
            Transform::Householder(chain) => assert_eq!(chain.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        let base3 = AsianProblem::new(market, option, 3, 2).unwrap();
        assert!(build_level_problem(1, &base3, Method::Haar).is_err());
        assert!(build_level_problem(2, &base3, Method::Pca).is_ok());
        assert!(build_level_problem(11, &problem, Method::Forward).is_err());
    }

    #[test]
    fn level_problem_evaluates_payoff_difference() {
        let (market, option) = reference();
        let problem = AsianProblem::new(market, option, 2, 3).unwrap();
        let lp = build_level_problem(2, &problem, Method::Forward).unwrap();
        let x = [0.4, 0.1, -0.3, 0.9];
        let fine = average_price(&x, &market, &option).unwrap();
        let coarse = average_price(&coarsen(&x, 2).unwrap(), &market, &option).unwrap();
        let expected = payoff(fine, 100.0) - payoff(coarse, 100.0);
        assert!((lp.evaluate(&x) - expected).abs() < 1e-10);
        let base = build_level_problem(0, &problem, Method::Forward).unwrap();
        assert!((base.evaluate(&[0.5]) - payoff(average_price(&[0.5], &market, &option).unwrap(), 100.0)).abs() < 1e-12);
    }

    #[test]
    fn average_is_monotone_in_each_coordinate() {
        let (market, option) = reference();
        let x: Vec<f64> = (0..16).map(|i| ((i * 7) % 5) as f64 * 0.3 - 0.6).collect();
        let base = average_price(&x, &market, &option).unwrap();
        for j in 0..16 {
            let mut y = x.clone();
            y[j] += 0.01;
            assert!(average_price(&y, &market, &option).unwrap() > base);
        }
    }

    #[test]
    fn discounting() {
        let (market, option) = reference();
        let result = EstimatorResult {
            value: 8.0518,
            per_level_means: vec![8.0518],
            per_level_variances: vec![0.0],
            per_level_sample_counts: vec![1],
            wall_time: Duration::ZERO,
        };
        assert!((discounted_price(&result, &market, &option) - 7.736_084_406_166_676).abs() < 1e-12);
        let zero_rate = MarketParams::new(0.0, 0.3, 100.0).unwrap();
        assert_eq!(discounted_price(&result, &zero_rate, &option), 8.0518);
    }

    #[test]
    fn parameter_validation() {
        assert!(MarketParams::new(0.04, 0.0, 100.0).is_err());
        assert!(MarketParams::new(0.04, 0.3, -1.0).is_err());
        assert!(OptionParams::new(-1.0, 1.0).is_err());
        assert!(OptionParams::new(100.0, 0.0).is_err());
        assert!(AsianProblem::new(MarketParams::default(), OptionParams::default(), 1, 3).is_err());
        assert_eq!("PCA".parse::<Method>().unwrap(), Method::Pca);
        assert!("walsh".parse::<Method>().is_err());
    }
}
