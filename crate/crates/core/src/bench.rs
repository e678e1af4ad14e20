//! Failure-probability sweeps and self-timing, both emitted as CSV.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::bounds::failure_f;
use crate::factor::is_probable_prime;
use crate::lucas::{lucas_test, LucasConfig};
use crate::numeric::random_between;
use crate::primroot::{algorithm3, heuristic2};
use crate::{Error, Natural, Result, TracedRng};

pub const SWEEP_HEADER: &str = "bits_of_q,omega,exact_failure,bound_failure";
pub const TIMING_HEADER: &str = "bits,algorithm,median_ms,p90_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Hidden primes are drawn from `[2^floor_bits, 2^(floor_bits+1))`, and
    /// the bound is evaluated at `B = 2^floor_bits`.
    pub floor_bits: u32,
    pub omegas: Vec<u32>,
    /// Rows per ω.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            floor_bits: 40,
            omegas: (1..=6).collect(),
            samples: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub bits_of_q: u64,
    pub omega: u32,
    /// `1 − φ(Q)/(Q − 1)`.
    pub exact_failure: f64,
    /// `F(B, Q)`.
    pub bound_failure: f64,
}

/// `1 − φ(Q)/(Q − 1)` for a product of distinct primes, as an exact ratio.
pub fn exact_failure(primes: &[Natural]) -> BigRational {
    let q: Natural = primes.iter().product();
    let phi: Natural = primes.iter().map(|p| p - 1u32).product();
    if q.is_one() {
        return BigRational::from_integer(BigInt::from(0));
    }
    let denom = BigInt::from(&q - 1u32);
    BigRational::one() - BigRational::new(BigInt::from(phi), denom)
}

fn random_prime(rng: &mut TracedRng, lo: &Natural, hi: &Natural) -> Natural {
    loop {
        let c = random_between(rng, lo, hi);
        if is_probable_prime(&c) {
            return c;
        }
    }
}

/// Builds `Q` from `ω` distinct random primes above the floor and compares
/// the exact failure with the bound. No factoring is involved.
pub fn bench_failure_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.floor_bits < 2 || config.floor_bits > 512 {
        return Err(Error::InvalidInput(format!("floor_bits {} outside [2, 512]", config.floor_bits)));
    }
    let lo = Natural::one() << config.floor_bits;
    let hi = (Natural::one() << (config.floor_bits + 1)) - 1u32;
    let master = TracedRng::seed_from_u64(config.seed);
    let mut rows = Vec::new();
    for (i, &omega) in config.omegas.iter().enumerate() {
        let mut rng = master.derive(i as u64);
        for _ in 0..config.samples {
            let mut primes: Vec<Natural> = Vec::new();
            while primes.len() < omega as usize {
                let p = random_prime(&mut rng, &lo, &hi);
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
            let q: Natural = primes.iter().product();
            rows.push(SweepRow {
                bits_of_q: q.bits(),
                omega,
                exact_failure: exact_failure(&primes).to_f64().unwrap_or(0.0),
                bound_failure: failure_f(&lo, &q)?.failure(),
            });
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{:e},{:e}", r.bits_of_q, r.omega, r.exact_failure, r.bound_failure);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimedAlgorithm {
    Heuristic2,
    Algorithm3,
    LucasTest,
}

impl TimedAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            TimedAlgorithm::Heuristic2 => "heuristic2",
            TimedAlgorithm::Algorithm3 => "algorithm3",
            TimedAlgorithm::LucasTest => "lucas_test",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "heuristic2" => Ok(TimedAlgorithm::Heuristic2),
            "algorithm3" => Ok(TimedAlgorithm::Algorithm3),
            "lucas_test" | "lucas" => Ok(TimedAlgorithm::LucasTest),
            other => Err(Error::Parse(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingConfig {
    pub bits: Vec<u32>,
    pub algorithms: Vec<TimedAlgorithm>,
    pub reps: usize,
    pub seed: u64,
    /// ε for the Lucas test.
    pub epsilon: f64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig {
            bits: vec![64, 256],
            algorithms: vec![TimedAlgorithm::Heuristic2, TimedAlgorithm::LucasTest],
            reps: 20,
            seed: 0,
            epsilon: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub bits: u32,
    pub algorithm: TimedAlgorithm,
    pub median_ms: f64,
    pub p90_ms: f64,
}

/// A `bits`-bit probable prime from a seeded search.
pub fn fixed_prime(bits: u32, seed: u64) -> Natural {
    let mut rng = TracedRng::seed_from_u64(seed ^ u64::from(bits));
    let lo = Natural::one() << (bits - 1);
    let hi = (Natural::one() << bits) - 1u32;
    random_prime(&mut rng, &lo, &hi)
}

/// Nearest-rank percentile of sorted samples.
pub fn percentile(sorted: &[f64], pct: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Runs each algorithm `reps` times on a fixed prime per size, one derived
/// seed per repetition.
pub fn bench_timing(config: &TimingConfig) -> Result<Vec<TimingRow>> {
    let master = TracedRng::seed_from_u64(config.seed);
    let mut rows = Vec::new();
    for &bits in &config.bits {
        if bits < 8 {
            return Err(Error::InvalidInput(format!("bit size {bits} too small")));
        }
        let p = fixed_prime(bits, config.seed);
        for &alg in &config.algorithms {
            let mut times = Vec::with_capacity(config.reps);
            for rep in 0..config.reps {
                let mut rng = master.derive(rep as u64);
                let start = Instant::now();
                match alg {
                    TimedAlgorithm::Heuristic2 => {
                        heuristic2(&p, &mut rng)?;
                    }
                    TimedAlgorithm::Algorithm3 => {
                        algorithm3(&p, &mut rng)?;
                    }
                    TimedAlgorithm::LucasTest => {
                        lucas_test(&p, config.epsilon, &mut rng, &LucasConfig::default())?;
                    }
                }
                times.push(start.elapsed().as_secs_f64() * 1e3);
            }
            times.sort_by(f64::total_cmp);
            rows.push(TimingRow {
                bits,
                algorithm: alg,
                median_ms: percentile(&times, 50.0),
                p90_ms: percentile(&times, 90.0),
            });
        }
    }
    Ok(rows)
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from(TIMING_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{:.3},{:.3}", r.bits, r.algorithm.name(), r.median_ms, r.p90_ms);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_failure_values() {
        let n = |x: u64| Natural::from(x);
        assert_eq!(exact_failure(&[n(7)]), BigRational::from_integer(BigInt::from(0)));
        // Q = 35: 1 − 24/34 = 5/17.
        assert_eq!(exact_failure(&[n(5), n(7)]), BigRational::new(BigInt::from(5), BigInt::from(17)));
    }

    #[test]
    fn sweep_shapes() {
        let cfg = SweepConfig {
            floor_bits: 20,
            omegas: vec![1, 2],
            samples: 4,
            seed: 3,
        };
        let rows = bench_failure_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 8);
        for r in &rows {
            if r.omega == 1 {
                assert_eq!(r.exact_failure, 0.0);
            } else {
                // Two primes just above 2^20: failure near 2^-19.
                assert!(r.exact_failure > 2f64.powi(-21) && r.exact_failure < 2f64.powi(-19));
            }
            assert!(r.exact_failure <= r.bound_failure);
        }
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("bits_of_q,omega,exact_failure,bound_failure\n"));
        assert_eq!(csv.lines().count(), 9);
        assert_eq!(bench_failure_sweep(&cfg).unwrap(), rows);
    }

    #[test]
    fn percentiles() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile(&v, 50.0), 5.0);
        assert_eq!(percentile(&v, 90.0), 9.0);
        assert_eq!(percentile(&[3.0], 90.0), 3.0);
    }

    #[test]
    fn timing_smoke() {
        let cfg = TimingConfig {
            bits: vec![32],
            algorithms: vec![TimedAlgorithm::Heuristic2, TimedAlgorithm::Algorithm3, TimedAlgorithm::LucasTest],
            reps: 3,
            seed: 1,
            epsilon: 1e-6,
        };
        let rows = bench_timing(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        let csv = timing_csv(&rows);
        assert!(csv.starts_with("bits,algorithm,median_ms,p90_ms\n"));
        assert!(rows.iter().all(|r| r.median_ms <= r.p90_ms));
    }
}
