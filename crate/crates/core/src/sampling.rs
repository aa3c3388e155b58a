//! Instance sampling for column representations.
//!
//! Blank values never take part in sampling. All strategies are
//! deterministic: randomized ones draw from a SplitMix64 stream seeded by the
//! configuration and shuffle with a fixed Fisher–Yates variant
//! (`j = next() % (i + 1)` for `i` from the last index down to 1), so any
//! implementation of the same procedure reproduces the same samples.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingStrategy {
    /// Every usable instance, duplicates included.
    None,
    Distinct,
    NRandom,
    #[default]
    NMostCommon,
    AdaptiveMostCommon,
}

impl std::str::FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "none" | "all" => Ok(SamplingStrategy::None),
            "distinct" => Ok(SamplingStrategy::Distinct),
            "n_random" | "random" => Ok(SamplingStrategy::NRandom),
            "n_most_common" | "most_common" => Ok(SamplingStrategy::NMostCommon),
            "adaptive" | "adaptive_most_common" => Ok(SamplingStrategy::AdaptiveMostCommon),
            other => Err(Error::validation(format!("unknown sampling strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub strategy: SamplingStrategy,
    /// Sample size for the fixed-size strategies.
    pub n: usize,
    pub seed: u64,
    /// Ceiling for the adaptive strategy.
    pub n_max_cap: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            strategy: SamplingStrategy::NMostCommon,
            n: 100,
            seed: 0,
            n_max_cap: 100,
        }
    }
}

impl SamplingConfig {
    pub fn new(strategy: SamplingStrategy) -> Self {
        SamplingConfig {
            strategy,
            ..SamplingConfig::default()
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::validation("sample size n must be at least 1"));
        }
        if self.n_max_cap == 0 {
            return Err(Error::validation("adaptive sample cap must be at least 1"));
        }
        Ok(())
    }
}

/// SplitMix64 pseudo-random stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Fisher–Yates shuffle driven by a seeded SplitMix64 stream.
pub fn seeded_shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = SplitMix64::new(seed);
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

fn usable<S: AsRef<str>>(values: &[S]) -> impl Iterator<Item = &str> {
    values
        .iter()
        .map(AsRef::as_ref)
        .filter(|v| !v.trim().is_empty())
}

/// Unique values in first-occurrence order.
pub fn distinct_sample<S: AsRef<str>>(values: &[S]) -> Vec<&str> {
    let mut seen = HashSet::new();
    usable(values).filter(|v| seen.insert(*v)).collect()
}

/// `min(n, distinct count)` distinct values drawn uniformly without
/// replacement.
pub fn n_random_sample<S: AsRef<str>>(values: &[S], n: usize, seed: u64) -> Result<Vec<&str>> {
    if n == 0 {
        return Err(Error::contract("n_random_sample needs n >= 1"));
    }
    let mut pool = distinct_sample(values);
    seeded_shuffle(&mut pool, seed);
    pool.truncate(n);
    Ok(pool)
}

/// Distinct values with their frequencies, most frequent first; ties in
/// bytewise order of the value.
pub fn frequency_ranking<S: AsRef<str>>(values: &[S]) -> Vec<(&str, usize)> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for v in usable(values) {
        *counts.entry(v).or_default() += 1;
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.as_bytes().cmp(b.0.as_bytes())));
    ranked
}

/// The `n` most frequent distinct values.
pub fn n_most_common_sample<S: AsRef<str>>(values: &[S], n: usize) -> Result<Vec<&str>> {
    if n == 0 {
        return Err(Error::contract("n_most_common_sample needs n >= 1"));
    }
    Ok(frequency_ranking(values)
        .into_iter()
        .take(n)
        .map(|(v, _)| v)
        .collect())
}

/// Sample size for the adaptive strategy.
///
/// Counts the distinct values whose frequency is strictly above the mean
/// frequency. Near-uniform columns (coefficient of variation below 0.1) take
/// every distinct value instead; a result below 2 is raised to 2 where the
/// column has that many distinct values. Always within `[1, cap]`.
pub fn adaptive_sample_size<S: AsRef<str>>(values: &[S], cap: usize) -> Result<usize> {
    if cap == 0 {
        return Err(Error::contract("adaptive sample cap must be at least 1"));
    }
    let ranking = frequency_ranking(values);
    if ranking.is_empty() {
        return Err(Error::contract("adaptive sampling needs at least one usable value"));
    }
    let distinct = ranking.len();
    let k = distinct as f64;
    let mean = ranking.iter().map(|(_, f)| *f as f64).sum::<f64>() / k;
    let variance = ranking
        .iter()
        .map(|(_, f)| (*f as f64 - mean).powi(2))
        .sum::<f64>()
        / k;
    let sd = variance.sqrt();
    let size = if sd / mean < 0.1 {
        distinct
    } else {
        let above = ranking.iter().filter(|(_, f)| *f as f64 > mean).count();
        if above < 2 {
            distinct.min(2)
        } else {
            above
        }
    };
    Ok(size.clamp(1, cap))
}

/// Applies the configured strategy to a column's instances.
pub fn sample<'a, S: AsRef<str>>(values: &'a [S], cfg: &SamplingConfig) -> Result<Vec<&'a str>> {
    match cfg.strategy {
        SamplingStrategy::None => Ok(usable(values).collect()),
        SamplingStrategy::Distinct => Ok(distinct_sample(values)),
        SamplingStrategy::NRandom => n_random_sample(values, cfg.n, cfg.seed),
        SamplingStrategy::NMostCommon => n_most_common_sample(values, cfg.n),
        SamplingStrategy::AdaptiveMostCommon => {
            if usable(values).next().is_none() {
                return Ok(Vec::new());
            }
            let n = adaptive_sample_size(values, cfg.n_max_cap)?;
            n_most_common_sample(values, n)
        }
    }
}

/// How a column is cut into two halves for robustness checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitPattern {
    /// Shuffle all values and cut; duplicates may land on both sides.
    Overlapping,
    /// Deduplicate, shuffle, cut.
    Distinct,
    /// Draw N random distinct values, cut.
    NRandom(usize),
}

/// Splits a column in two halves; with an odd count the first half gets the
/// extra element.
pub fn split_half<S: AsRef<str>>(
    values: &[S],
    pattern: SplitPattern,
    seed: u64,
) -> Result<(Vec<&str>, Vec<&str>)> {
    let pool: Vec<&str> = match pattern {
        SplitPattern::Overlapping => {
            let mut all: Vec<&str> = usable(values).collect();
            seeded_shuffle(&mut all, seed);
            all
        }
        SplitPattern::Distinct => {
            let mut d = distinct_sample(values);
            seeded_shuffle(&mut d, seed);
            d
        }
        SplitPattern::NRandom(n) => n_random_sample(values, n, seed)?,
    };
    if pool.len() < 2 {
        return Err(Error::contract(format!(
            "split_half needs at least 2 usable values, found {}",
            pool.len()
        )));
    }
    let mid = pool.len().div_ceil(2);
    let (a, b) = pool.split_at(mid);
    Ok((a.to_vec(), b.to_vec()))
}
