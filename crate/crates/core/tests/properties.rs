use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use primroot::factor::{factorize, partial_factor, Strategy as FactorStrategy};
use primroot::order::{brute_spectrum, count_order_divisible_by, euler_phi};
use primroot::primroot::{
    algorithm1_with_factorization, cofactor_component, heuristic2, multiplicative_order, prime_power_component,
};
use primroot::{Natural, TracedRng};

fn nat(x: u64) -> Natural {
    Natural::from(x)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Exact primitive-root fraction over all α and b draws for the split at `bound`.
fn split_fraction(p: u64, bound: u64) -> (Natural, Ratio<BigUint>) {
    let pn = nat(p);
    let mut rng = TracedRng::seed_from_u64(0);
    let pf = partial_factor(&nat(p - 1), &nat(bound), FactorStrategy::TrialProven, &mut rng).unwrap();
    let q = pf.cofactor.clone();
    let mut a_values: BTreeMap<u64, BigUint> = BTreeMap::from([(1, BigUint::one())]);
    for pair in &pf.factors {
        let mut next = BTreeMap::new();
        for alpha in 2..=p - 2 {
            if let Some(c) = prime_power_component(&pn, &nat(alpha), pair) {
                let c = c.to_u64().unwrap();
                for (a, w) in &a_values {
                    *next.entry(a * c % p).or_insert_with(BigUint::default) += w;
                }
            }
        }
        a_values = next;
    }
    let mut b_values: BTreeMap<u64, u64> = BTreeMap::new();
    for b in 2..=p - 2 {
        let c = if q.is_one() { Some(Natural::one()) } else { cofactor_component(&pn, &nat(b), &q) };
        if let Some(c) = c {
            *b_values.entry(c.to_u64().unwrap()).or_default() += 1;
        }
    }
    let (mut good, mut total) = (BigUint::default(), BigUint::default());
    for (a, wa) in &a_values {
        for (c, wc) in &b_values {
            let w = wa * BigUint::from(*wc);
            if multiplicative_order(p, a * c % p).unwrap() == p - 1 {
                good += &w;
            }
            total += w;
        }
    }
    (q, Ratio::new(good, total))
}

#[test]
fn success_ratio_is_phi_q_over_q_minus_one() {
    for p in [31u64, 211, 2311] {
        // The split only changes just above each prime factor of p - 1.
        let primes: Vec<u64> = factorize(&nat(p - 1)).unwrap().primes().map(|q| q.to_u64().unwrap()).collect();
        for bound in primes.iter().map(|q| q + 1).filter(|&b| b >= 3) {
            let (q, ratio) = split_fraction(p, bound);
            let want = if q.is_one() {
                Ratio::from_integer(BigUint::one())
            } else {
                let phi = euler_phi(&factorize(&q).unwrap()).unwrap();
                Ratio::new(phi, &q - 1u32)
            };
            assert_eq!(ratio, want, "p={p} Q={q}");
        }
    }
}

#[test]
fn divisible_order_counts_match_brute_force() {
    for n in 2u64..=600 {
        let spectrum = brute_spectrum(n).unwrap();
        let f = factorize(&nat(n)).unwrap();
        for q in (2u64..=n).filter(|&q| is_prime(q)) {
            let brute: Natural = spectrum
                .entries
                .iter()
                .filter(|(d, _)| (*d % &nat(q)) == nat(0))
                .map(|(_, c)| c.clone())
                .sum();
            assert_eq!(count_order_divisible_by(&f, &nat(q)).unwrap(), brute, "n={n} q={q}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_never_below_reported_floor(i in 0usize..1227, bound in 3u64..200, seed in any::<u64>()) {
        let p = (5u64..10_000).filter(|&n| is_prime(n)).nth(i).unwrap();
        let mut rng = TracedRng::seed_from_u64(seed);
        let pf = partial_factor(&nat(p - 1), &nat(bound), FactorStrategy::TrialProven, &mut rng).unwrap();
        let c = algorithm1_with_factorization(&nat(p), pf, &mut rng).unwrap();
        let order = multiplicative_order(p, c.g.value().to_u64().unwrap()).unwrap();
        prop_assert!(nat(order) >= c.order_lower_bound);
        if c.complete {
            prop_assert_eq!(order, p - 1);
        }
    }

    #[test]
    fn seeded_runs_replay(bits in 24u32..72, seed in any::<u64>()) {
        let p = primroot::bench::fixed_prime(bits, seed);
        let a = heuristic2(&p, &mut TracedRng::seed_from_u64(seed)).unwrap();
        let b = heuristic2(&p, &mut TracedRng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a.g.value(), b.g.value());
        prop_assert_eq!(a.seed_trace, b.seed_trace);
        prop_assert_eq!(a.success_bound, b.success_bound);
    }
}
