//! Exact failure against the bound for cofactors built from large primes.

use primroot::bench::{bench_failure_sweep, sweep_csv, SweepConfig};

fn main() -> primroot::Result<()> {
    let cfg = SweepConfig {
        floor_bits: 40,
        omegas: vec![1, 2, 3, 4],
        samples: 3,
        seed: 1,
    };
    print!("{}", sweep_csv(&bench_failure_sweep(&cfg)?));
    Ok(())
}
