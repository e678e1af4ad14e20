//! Smallest trial bound meeting a failure target, and the log-power rule.

use primroot::bounds::{alpha_failure, initial_success_bound, solve_alpha, solve_bound, ALPHA_2_POW_40};
use primroot::Natural;

fn main() -> primroot::Result<()> {
    let p = Natural::from(45_171_967u64);
    for k in [10, 20, 40, 60] {
        let eps = 2f64.powi(-k);
        let b = solve_bound(&p, eps)?;
        let got = initial_success_bound(&p, &b)?;
        println!("eps = 2^-{k}: B = {b}, failure 2^{:.2}", got.bound.failure_log2());
    }
    let (b, got) = alpha_failure(&p, ALPHA_2_POW_40)?;
    println!("(log2 p)^{ALPHA_2_POW_40} = {b}: failure 2^{:.2}", got.bound.failure_log2());
    println!("{:?}", solve_alpha(&p, 2f64.powi(-40))?);
    Ok(())
}
