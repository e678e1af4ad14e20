//! Draw a primitive root with a certified success bound.
//!
//! cargo run --example primitive_root -- 1000003 1e-12

use primroot::factor::Strategy;
use primroot::numeric::parse_natural;
use primroot::primroot::algorithm1;
use primroot::TracedRng;

fn main() -> primroot::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p = parse_natural(args.first().map_or("1000003", String::as_str))?;
    let eps: f64 = args.get(1).map_or(Ok(2f64.powi(-40)), |s| s.parse()).expect("epsilon");
    let mut rng = TracedRng::seed_from_u64(7);
    let c = algorithm1(&p, eps, Strategy::TrialProven, &mut rng)?;
    println!("p = {p}");
    println!("g = {}", c.g.value());
    println!("bound B = {}, complete = {}", c.bound_used, c.complete);
    println!("success >= {}", c.success_bound.success());
    println!("order(g) >= {}", c.order_lower_bound);
    println!("{}", c.factorization);
    Ok(())
}
