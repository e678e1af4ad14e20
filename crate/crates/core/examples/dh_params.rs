//! Diffie-Hellman style parameters: a random prime and a generator.

use primroot::lucas::generate_dh_params;
use primroot::TracedRng;

fn main() -> primroot::Result<()> {
    let bits = std::env::args().nth(1).map_or(256, |s| s.parse().expect("bits"));
    let params = generate_dh_params(bits, 1e-12, None, &mut TracedRng::seed_from_u64(11))?;
    println!("p = {}", params.p);
    println!("g = {}", params.root.g.value());
    println!("MR rounds {}, prime error < {:e}, {} candidates", params.rounds, params.prime_error, params.candidates);
    println!("certified generator failure 2^{:.1}", params.root.success_bound.failure_log2());
    Ok(())
}
