//! Element counts by multiplicative order in (Z/nZ)*.

use primroot::factor::factorize;
use primroot::order::{carmichael_lambda, count_order_divisible_by, euler_phi, order_spectrum};
use primroot::Natural;

fn main() -> primroot::Result<()> {
    let f = factorize(&Natural::from(45u32))?;
    print!("{}", order_spectrum(&f)?);

    let n = factorize(&Natural::from(37_690_903_213u64))?;
    println!("phi = {}", euler_phi(&n)?);
    println!("orders divisible by 1931: {}", count_order_divisible_by(&n, &Natural::from(1931u32))?);
    println!("lambda(1729) = {}", carmichael_lambda(&factorize(&Natural::from(1729u32))?)?);
    Ok(())
}
