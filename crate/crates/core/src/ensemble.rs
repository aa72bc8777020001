//! Seeded `G(n,p)` sampling and clique-count statistics.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed with
//! `seed_from_u64(seed)`. Potential edges are decided in lexicographic
//! order. For `p ≥ 1/16` each pair consumes one `u64` draw `x` and is kept
//! iff `x < ⌈p·2⁶⁴⌉`, which compares against the exact rational `p`. For
//! `0 < p < 1/16` gaps between kept pairs are drawn geometrically:
//! `⌊ln(1-u)/ln(1-p)⌋` with `u` the top 53 bits of a draw scaled to `[0,1)`.
//! Trial `i` of a batch uses seed `seed ^ i`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cliques::count_cliques;
use crate::density::m2;
use crate::error::{domain, Error, Result};
use crate::graph::{Adjacency, Graph};
use crate::rational::{binomial, ExactRational};

/// An edge probability: either a fixed rational or `n^{-a}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PSpec {
    Exact(ExactRational),
    /// `p = n^{-a}`, evaluated per `n` to the nearest `f64` and then used as
    /// the exact dyadic rational that float denotes.
    Exponent(ExactRational),
}

impl PSpec {
    pub fn resolve(&self, n: usize) -> Result<ExactRational> {
        let p = match self {
            PSpec::Exact(p) => p.clone(),
            PSpec::Exponent(a) => {
                if a.is_negative() {
                    return domain(format!("exponent must be nonnegative, got {a}"));
                }
                ExactRational::from_f64((n as f64).powf(-a.to_f64()))?
            }
        };
        check_probability(&p)?;
        Ok(p)
    }

    pub fn exponent(&self) -> Option<&ExactRational> {
        match self {
            PSpec::Exponent(a) => Some(a),
            PSpec::Exact(_) => None,
        }
    }
}

impl fmt::Display for PSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PSpec::Exact(p) => write!(f, "{p}"),
            PSpec::Exponent(a) => write!(f, "n^-{a}"),
        }
    }
}

/// `P/Q`, a decimal, or `n^-A` / `n^{-A}` with `A` rational.
impl FromStr for PSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("n^") {
            let inner = rest.strip_prefix('{').and_then(|r| r.strip_suffix('}')).unwrap_or(rest);
            let a = inner
                .trim()
                .strip_prefix('-')
                .ok_or_else(|| Error::Parse { line: 1, msg: format!("expected n^-a, found {s:?}") })?;
            return Ok(PSpec::Exponent(a.parse()?));
        }
        let p: ExactRational = s.parse()?;
        check_probability(&p)?;
        Ok(PSpec::Exact(p))
    }
}

fn check_probability(p: &ExactRational) -> Result<()> {
    if p.is_negative() || p > &ExactRational::one() {
        return domain(format!("probability {p} outside [0, 1]"));
    }
    Ok(())
}

/// `⌈p · 2⁶⁴⌉`, in `[0, 2⁶⁴]`.
fn dyadic_threshold(p: &ExactRational) -> u128 {
    let scaled = p * &ExactRational::from(num_rational::BigRational::from_integer(BigInt::one() << 64));
    scaled.ceil().to_u128().expect("p in [0,1]")
}

/// One `G(n,p)` sample.
pub fn sample_gnp(n: usize, p: &ExactRational, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let mut adj = Adjacency::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sparse_cutoff = ExactRational::new(1, 16)?;
    if p.is_zero() || n < 2 {
        return Ok(adj.into_graph());
    }
    if p < &sparse_cutoff {
        let pf = p.to_f64();
        let log_q = (-pf).ln_1p();
        let pairs = (n * (n - 1) / 2) as u64;
        let (mut u, mut v) = (0usize, 0usize);
        let mut next: u64 = 0;
        let mut first = true;
        loop {
            let draw = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let gap = ((-draw).ln_1p() / log_q).floor();
            if !gap.is_finite() || gap >= pairs as f64 {
                break;
            }
            let step = gap as u64 + if first { 0 } else { 1 };
            first = false;
            next = match next.checked_add(step) {
                Some(x) if x < pairs => x,
                _ => break,
            };
            // Advance (u, v) to the `next`-th pair in lexicographic order.
            let mut remaining = step;
            if remaining > 0 || v == 0 {
                if v == 0 {
                    v = 1;
                }
                while remaining > 0 {
                    let left_in_row = (n - 1 - v) as u64;
                    if remaining <= left_in_row {
                        v += remaining as usize;
                        remaining = 0;
                    } else {
                        remaining -= left_in_row + 1;
                        u += 1;
                        v = u + 1;
                    }
                }
            }
            adj.add_edge(u, v)?;
        }
    } else {
        let threshold = dyadic_threshold(p);
        for u in 0..n {
            for v in u + 1..n {
                if (rng.next_u64() as u128) < threshold {
                    adj.add_edge(u, v)?;
                }
            }
        }
    }
    Ok(adj.into_graph())
}

/// `C(n,m) · p^{C(m,2)}`.
pub fn expected_clique_count(n: usize, p: &ExactRational, m: usize) -> Result<ExactRational> {
    if m > n {
        return domain(format!("clique order {m} exceeds n = {n}"));
    }
    let count = ExactRational::from(num_rational::BigRational::from_integer(binomial(n as u64, m as u64)));
    Ok(&count * &p.pow((m * m.saturating_sub(1) / 2) as u32))
}

/// Threshold exponents `1/m₂(H)` and `1/m₂(K_m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalExponents {
    pub m2_h: ExactRational,
    pub m2_km: ExactRational,
    pub h_exponent: ExactRational,
    pub km_exponent: ExactRational,
}

impl CriticalExponents {
    /// `Greater` when `m₂(H) > m₂(K_m)`: the forbidden graph is denser than
    /// the counted clique.
    pub fn order(&self) -> std::cmp::Ordering {
        self.m2_h.cmp(&self.m2_km)
    }
}

pub fn critical_exponents(m: usize, h: &Graph) -> Result<CriticalExponents> {
    if m < 2 {
        return domain("clique order must be >= 2");
    }
    let m2_h = m2(h, h.vertex_count() > crate::density::EXHAUSTIVE_CAP)?.value;
    let m2_km = ExactRational::new(m as i64 + 1, 2)?;
    Ok(CriticalExponents { h_exponent: m2_h.recip()?, km_exponent: m2_km.recip()?, m2_h, m2_km })
}

/// Batch of `G(n,p)` trials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub n: usize,
    pub p: ExactRational,
    pub seed: u64,
    pub trials: usize,
}

impl EnsembleConfig {
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed ^ trial as u64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationReport {
    pub n: usize,
    pub p: ExactRational,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub mean: ExactRational,
    /// Unbiased sample variance (zero for a single trial).
    pub variance: ExactRational,
    pub expected: ExactRational,
    /// `mean / expected`, absent when the expectation is zero.
    pub ratio: Option<ExactRational>,
    /// Mean over trials with at least one copy of the fraction of copies
    /// sharing an edge with another copy.
    pub mean_sharing_fraction: f64,
}

impl ConcentrationReport {
    pub const CSV_HEADER: &'static str = "n,p,m,trials,seed,mean,variance,expected,ratio,sharing_fraction";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.p.to_f64(),
            self.m,
            self.trials,
            self.seed,
            self.mean.to_f64(),
            self.variance.to_f64(),
            self.expected.to_f64(),
            self.ratio.as_ref().map(|r| r.to_f64().to_string()).unwrap_or_default(),
            self.mean_sharing_fraction
        )
    }
}

pub fn concentration_report(cfg: &EnsembleConfig, m: usize) -> Result<ConcentrationReport> {
    if cfg.trials == 0 {
        return domain("at least one trial is required");
    }
    let expected = expected_clique_count(cfg.n, &cfg.p, m)?;
    let per_trial: Vec<(u64, Option<f64>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let g = sample_gnp(cfg.n, &cfg.p, cfg.trial_seed(trial))?;
            let stats = count_cliques(&g, m)?;
            Ok((stats.total, stats.involved_fraction().map(|f| f.to_f64())))
        })
        .collect::<Result<_>>()?;

    let trials = cfg.trials as i64;
    let sum: BigInt = per_trial.iter().map(|t| BigInt::from(t.0)).sum();
    let sum_sq: BigInt = per_trial.iter().map(|t| BigInt::from(t.0) * BigInt::from(t.0)).sum();
    let mean = ExactRational::from_big(sum.clone(), trials.into())?;
    let variance = if trials > 1 {
        ExactRational::from_big(BigInt::from(trials) * sum_sq - &sum * &sum, BigInt::from(trials * (trials - 1)))?
    } else {
        ExactRational::zero()
    };
    let ratio = (!expected.is_zero()).then(|| &mean / &expected);
    let fractions: Vec<f64> = per_trial.iter().filter_map(|t| t.1).collect();
    let mean_sharing_fraction =
        if fractions.is_empty() { 0.0 } else { fractions.iter().sum::<f64>() / fractions.len() as f64 };
    Ok(ConcentrationReport {
        n: cfg.n,
        p: cfg.p.clone(),
        m,
        trials: cfg.trials,
        seed: cfg.seed,
        mean,
        variance,
        expected,
        ratio,
        mean_sharing_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle, write_edge_list};

    fn r(a: i64, b: i64) -> ExactRational {
        ExactRational::new(a, b).unwrap()
    }

    #[test]
    fn extreme_probabilities() {
        assert_eq!(sample_gnp(20, &ExactRational::zero(), 7).unwrap().edge_count(), 0);
        assert_eq!(sample_gnp(20, &ExactRational::one(), 7).unwrap(), complete_graph(20).unwrap());
        assert!(sample_gnp(5, &r(3, 2), 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        for p in [r(1, 2), r(1, 40)] {
            let a = write_edge_list(&sample_gnp(60, &p, 99).unwrap());
            let b = write_edge_list(&sample_gnp(60, &p, 99).unwrap());
            let c = write_edge_list(&sample_gnp(60, &p, 100).unwrap());
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn sparse_sampler_mean() {
        // 200 trials of n = 100, p = 1/40: mean edges 123.75, sd per trial ≈ 11.
        let p = r(1, 40);
        let total: usize = (0..200).map(|s| sample_gnp(100, &p, s).unwrap().edge_count()).sum();
        let mean = total as f64 / 200.0;
        assert!((mean - 123.75).abs() < 3.0 * 11.0 / (200f64).sqrt(), "{mean}");
    }

    #[test]
    fn expected_counts() {
        assert_eq!(expected_clique_count(10, &r(1, 2), 3).unwrap(), ExactRational::from_integer(15));
        assert_eq!(expected_clique_count(9, &r(1, 3), 2).unwrap(), ExactRational::from_integer(12));
        assert_eq!(expected_clique_count(20, &r(1, 4), 4).unwrap(), r(4845, 4096));
        assert!(expected_clique_count(3, &r(1, 2), 4).is_err());
    }

    #[test]
    fn exponents() {
        let ce = critical_exponents(3, &complete_graph(4).unwrap()).unwrap();
        assert_eq!(ce.h_exponent, r(2, 5));
        assert_eq!(ce.km_exponent, r(1, 2));
        assert_eq!(ce.order(), std::cmp::Ordering::Greater);
        let ce = critical_exponents(3, &cycle(5).unwrap()).unwrap();
        assert_eq!(ce.h_exponent, r(3, 4));
        let ce = critical_exponents(3, &complete_graph(3).unwrap()).unwrap();
        assert_eq!(ce.h_exponent, ce.km_exponent);
    }

    #[test]
    fn pspec_parsing() {
        assert_eq!("n^-11/20".parse::<PSpec>().unwrap(), PSpec::Exponent(r(11, 20)));
        assert_eq!("n^{-0.5}".parse::<PSpec>().unwrap(), PSpec::Exponent(r(1, 2)));
        assert_eq!("1/5".parse::<PSpec>().unwrap(), PSpec::Exact(r(1, 5)));
        assert!("n^0.5".parse::<PSpec>().is_err());
        assert!("2".parse::<PSpec>().is_err());
        let p = PSpec::Exponent(r(1, 2)).resolve(100).unwrap();
        assert_eq!(p, ExactRational::from_f64(0.1).unwrap());
    }

    #[test]
    fn complete_graph_concentration_is_exact() {
        let cfg = EnsembleConfig { n: 60, p: ExactRational::one(), seed: 3, trials: 1 };
        let rep = concentration_report(&cfg, 3).unwrap();
        assert_eq!(rep.ratio, Some(ExactRational::one()));
        assert_eq!(rep.variance, ExactRational::zero());
    }

    #[test]
    fn dyadic_threshold_edges() {
        assert_eq!(dyadic_threshold(&ExactRational::one()), 1u128 << 64);
        assert_eq!(dyadic_threshold(&r(1, 2)), 1u128 << 63);
        assert_eq!(dyadic_threshold(&r(1, 3)), (1u128 << 64) / 3 + 1);
    }
}
