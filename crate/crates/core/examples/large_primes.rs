//! The rho-assisted variants on a 256-bit prime: heuristic2 reports a
//! certified and an advisory bound, algorithm3 aims for failure <= 2^-40.

use primroot::bench::fixed_prime;
use primroot::primroot::{algorithm3, heuristic2};
use primroot::TracedRng;

fn main() -> primroot::Result<()> {
    let p = fixed_prime(256, 3);
    println!("p = {p}");

    let h = heuristic2(&p, &mut TracedRng::seed_from_u64(1))?;
    println!("heuristic2: g = {}", h.g.value());
    println!("  certified failure 2^{:.1}", h.success_bound.failure_log2());
    if let Some(adv) = &h.advisory_bound {
        println!("  advisory failure 2^{:.1}", adv.failure_log2());
    }

    let a = algorithm3(&p, &mut TracedRng::seed_from_u64(1))?;
    println!("algorithm3: g = {}", a.g.value());
    println!("  certified failure 2^{:.1}, Q has {} bits", a.success_bound.failure_log2(), a.q_remaining.bits());
    Ok(())
}
