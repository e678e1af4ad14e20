//! Trial-division partial factorization and its line format.

use primroot::factor::{partial_factor, PartialFactorization, Strategy};
use primroot::{Natural, TracedRng};

fn main() -> primroot::Result<()> {
    let n = Natural::from(37_690_903_212u64);
    let mut rng = TracedRng::seed_from_u64(0);
    let pf = partial_factor(&n, &Natural::from(1450u32), Strategy::TrialProven, &mut rng)?;
    let line = pf.to_string();
    println!("{line}");
    let back: PartialFactorization = line.parse()?;
    assert_eq!(back, pf);

    let pf = partial_factor(&n, &Natural::from(1u32 << 16), Strategy::RhoHeuristic { budget: 1 << 16 }, &mut rng)?;
    println!("{pf}");
    Ok(())
}
