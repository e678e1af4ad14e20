//! Structure of `(Z/nZ)*`: Euler φ, Carmichael λ and how many invertibles
//! have each order.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::factor::{factorize, is_probable_prime, FactorPair, PartialFactorization};
use crate::{Error, Natural, Result};

/// Largest divisor count of `λ(n)` that [`order_spectrum`] will tabulate.
pub const SPECTRUM_WALL: u64 = 1 << 16;
/// Largest modulus accepted by [`brute_spectrum`].
pub const BRUTE_LIMIT: u64 = 1 << 20;

/// Number of invertibles of each order `d | λ(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderSpectrum {
    pub n: Natural,
    pub entries: BTreeMap<Natural, Natural>,
}

impl OrderSpectrum {
    pub fn total(&self) -> Natural {
        self.entries.values().sum()
    }

    pub fn get(&self, d: u64) -> Option<&Natural> {
        self.entries.get(&Natural::from(d))
    }

    /// `(order, count)` pairs as `u64`, for small moduli.
    pub fn to_u64_pairs(&self) -> Vec<(u64, u64)> {
        self.entries
            .iter()
            .map(|(d, c)| (d.to_u64().expect("small"), c.to_u64().expect("small")))
            .collect()
    }
}

impl fmt::Display for OrderSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, c) in &self.entries {
            writeln!(f, "{d} {c}")?;
        }
        Ok(())
    }
}

/// Result of [`count_of_order`]; `divides_lambda` is false when `d ∤ λ(n)`,
/// in which case the count is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCount {
    pub count: Natural,
    pub divides_lambda: bool,
}

fn require_complete(f: &PartialFactorization) -> Result<()> {
    if f.is_complete() {
        Ok(())
    } else {
        Err(Error::IncompleteFactorization(f.n.clone()))
    }
}

fn phi_local(pair: &FactorPair) -> Natural {
    (&pair.prime - 1u32) * num_traits::pow(pair.prime.clone(), pair.exponent as usize - 1)
}

fn lambda_local(pair: &FactorPair) -> Natural {
    if pair.prime == Natural::from(2u8) && pair.exponent >= 3 {
        Natural::one() << (pair.exponent - 2)
    } else {
        phi_local(pair)
    }
}

/// `φ(n) = Π (p − 1)p^(k−1)`.
pub fn euler_phi(f: &PartialFactorization) -> Result<Natural> {
    require_complete(f)?;
    Ok(f.factors.iter().map(phi_local).product())
}

/// `λ(n) = lcm λ(p^k)`, with `λ(2^e) = 2^(e−2)` for `e ≥ 3`.
pub fn carmichael_lambda(f: &PartialFactorization) -> Result<Natural> {
    require_complete(f)?;
    Ok(f.factors
        .iter()
        .map(lambda_local)
        .fold(Natural::one(), |acc, l| acc.lcm(&l)))
}

/// All divisors of the number whose factorization is given, ascending.
pub fn divisors(factors: &[FactorPair]) -> Vec<Natural> {
    let mut out = vec![Natural::one()];
    for pair in factors {
        let mut next = Vec::with_capacity(out.len() * (pair.exponent as usize + 1));
        for d in &out {
            let mut m = d.clone();
            for _ in 0..=pair.exponent {
                next.push(m.clone());
                m *= &pair.prime;
            }
        }
        out = next;
    }
    out.sort();
    out
}

fn merge_factors(a: &[FactorPair], b: &[FactorPair]) -> Vec<FactorPair> {
    let mut map: BTreeMap<Natural, u32> = BTreeMap::new();
    for f in a.iter().chain(b) {
        *map.entry(f.prime.clone()).or_insert(0) += f.exponent;
    }
    map.into_iter().map(|(p, e)| FactorPair::new(p, e)).collect()
}

/// `(order, how many elements of the local group have it)` for one prime
/// power. The group mod `2^e` (`e ≥ 3`) is `C₂ × C_{2^(e−2)}`, so its counts
/// differ from the cyclic `φ(d)`.
fn local_orders(pair: &FactorPair) -> Result<Vec<(Natural, Natural)>> {
    let e = pair.exponent;
    if pair.prime == Natural::from(2u8) {
        let mut out = vec![(Natural::one(), Natural::one())];
        match e {
            1 => {}
            2 => out.push((Natural::from(2u8), Natural::one())),
            _ => {
                out.push((Natural::from(2u8), Natural::from(3u8)));
                for i in 2..=e - 2 {
                    let d = Natural::one() << i;
                    out.push((d.clone(), d));
                }
            }
        }
        return Ok(out);
    }
    let p_minus_1 = factorize(&(&pair.prime - 1u32))?;
    let group_order = merge_factors(&p_minus_1.factors, &[FactorPair::new(pair.prime.clone(), e - 1)]);
    let group_order: Vec<FactorPair> = group_order.into_iter().filter(|f| f.exponent > 0).collect();
    Ok(divisors(&group_order)
        .into_iter()
        .map(|d| {
            let phi = phi_of_divisor(&d, &group_order);
            (d, phi)
        })
        .collect())
}

/// `φ(d)` for a divisor `d` of a number with known prime factors.
fn phi_of_divisor(d: &Natural, primes: &[FactorPair]) -> Natural {
    let mut phi = d.clone();
    for f in primes {
        if (d % &f.prime).is_zero() {
            phi = phi / &f.prime * (&f.prime - 1u32);
        }
    }
    phi
}

/// Number of invertibles of order exactly `d`: the sum over tuples
/// `(d₁, …, d_ω)` of local orders with `lcm = d` of the product of local
/// counts. Local orders not dividing `d` are pruned before combining.
pub fn count_of_order(f: &PartialFactorization, d: &Natural) -> Result<OrderCount> {
    let lambda = carmichael_lambda(f)?;
    if d.is_zero() || !(&lambda % d).is_zero() {
        return Ok(OrderCount {
            count: Natural::zero(),
            divides_lambda: false,
        });
    }
    let mut partial: BTreeMap<Natural, Natural> = BTreeMap::from([(Natural::one(), Natural::one())]);
    for pair in &f.factors {
        let local: Vec<_> = local_orders(pair)?
            .into_iter()
            .filter(|(dj, _)| (d % dj).is_zero())
            .collect();
        let mut next = BTreeMap::new();
        for (l, c) in &partial {
            for (dj, cj) in &local {
                *next.entry(l.lcm(dj)).or_insert_with(Natural::zero) += c * cj;
            }
        }
        partial = next;
    }
    Ok(OrderCount {
        count: partial.remove(d).unwrap_or_default(),
        divides_lambda: true,
    })
}

/// [`count_of_order`] for every divisor of `λ(n)`.
pub fn order_spectrum(f: &PartialFactorization) -> Result<OrderSpectrum> {
    let lambda = carmichael_lambda(f)?;
    let lambda_factors = factorize(&lambda).map(|pf| pf.factors).unwrap_or_default();
    let divisor_count: u64 = lambda_factors.iter().map(|p| p.exponent as u64 + 1).product();
    if divisor_count > SPECTRUM_WALL {
        return Err(Error::CostWall {
            requested: Natural::from(divisor_count),
            wall: SPECTRUM_WALL,
        });
    }
    let mut partial: BTreeMap<Natural, Natural> = BTreeMap::from([(Natural::one(), Natural::one())]);
    for pair in &f.factors {
        let local = local_orders(pair)?;
        let mut next = BTreeMap::new();
        for (l, c) in &partial {
            for (dj, cj) in &local {
                *next.entry(l.lcm(dj)).or_insert_with(Natural::zero) += c * cj;
            }
        }
        partial = next;
    }
    Ok(OrderSpectrum {
        n: f.n.clone(),
        entries: partial,
    })
}

/// Invertibles whose order is divisible by the prime `q`:
/// `φ(n)(1 − q^(−Σ f_i))` with `f_i = v_q(φ(p_i^(e_i)))`. Elements of order
/// prime to `q` form the `q'`-part of each local group, of size
/// `φ(p_i^(e_i))/q^(f_i)`, whether or not the group is cyclic.
pub fn count_order_divisible_by(f: &PartialFactorization, q: &Natural) -> Result<Natural> {
    require_complete(f)?;
    if !is_probable_prime(q) {
        return Err(Error::InvalidInput(format!("{q} is not prime")));
    }
    let phi = euler_phi(f)?;
    let mut coprime_part = phi.clone();
    while (&coprime_part % q).is_zero() {
        coprime_part /= q;
    }
    Ok(phi - coprime_part)
}

/// Spectrum by computing every element's order directly. The order of `g`
/// is found as the least divisor `t` of the group size with `g^t ≡ 1`; the
/// group size is counted by gcd.
pub fn brute_spectrum(n: u64) -> Result<OrderSpectrum> {
    if !(2..=BRUTE_LIMIT).contains(&n) {
        return Err(Error::CostWall {
            requested: Natural::from(n),
            wall: BRUTE_LIMIT,
        });
    }
    let units: Vec<u64> = (1..n).filter(|g| g.gcd(&n) == 1).collect();
    let size = units.len() as u64;
    let divs: Vec<u64> = (1..=size).filter(|t| size % t == 0).collect();
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1 % n;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % n;
            }
            b = b * b % n;
            e >>= 1;
        }
        r
    };
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for g in units {
        let t = *divs.iter().find(|&&t| pow(g, t) == 1 % n).expect("t = size works");
        *counts.entry(t).or_insert(0) += 1;
    }
    Ok(OrderSpectrum {
        n: Natural::from(n),
        entries: counts
            .into_iter()
            .map(|(d, c)| (Natural::from(d), Natural::from(c)))
            .collect(),
    })
}
