//! Exact big-integer primitives shared by every other module.

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::{Error, Result};

/// Non-negative integer of unbounded magnitude.
pub type Natural = BigUint;

/// An element of `Z/mZ`, always reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    value: Natural,
    modulus: Natural,
}

impl Residue {
    pub fn new(value: Natural, modulus: Natural) -> Result<Self> {
        if modulus < Natural::from(2u8) {
            return Err(Error::InvalidInput(format!(
                "modulus must be at least 2, got {modulus}"
            )));
        }
        let value = value % &modulus;
        Ok(Residue { value, modulus })
    }

    pub fn value(&self) -> &Natural {
        &self.value
    }

    pub fn modulus(&self) -> &Natural {
        &self.modulus
    }

    pub fn into_value(self) -> Natural {
        self.value
    }

    /// `self^exp mod m`.
    pub fn pow(&self, exp: &Natural) -> Residue {
        modexp(self, exp)
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue {
            value: (&self.value * &other.value) % &self.modulus,
            modulus: self.modulus.clone(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// `base^exp mod modulus` by square-and-multiply. `exp = 0` yields 1 even
/// when the base is 0.
pub fn modexp(base: &Residue, exp: &Natural) -> Residue {
    Residue {
        value: base.value.modpow(exp, &base.modulus),
        modulus: base.modulus.clone(),
    }
}

/// Greatest common divisor; `gcd(0, 0)` is rejected.
pub fn gcd(a: &Natural, b: &Natural) -> Result<Natural> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidInput("gcd(0, 0) is undefined".into()));
    }
    Ok(a.gcd(b))
}

/// `(floor(n^(1/k)), root^k == n)`.
pub fn integer_root(n: &Natural, k: u32) -> Result<(Natural, bool)> {
    if k == 0 {
        return Err(Error::InvalidInput("root index must be positive".into()));
    }
    let root = n.nth_root(k);
    let exact = &root.pow(k) == n;
    Ok((root, exact))
}

/// `Q > n^(2/3)`, evaluated as `Q³ > n²`.
pub fn exceeds_two_thirds(q: &Natural, n: &Natural) -> bool {
    q.pow(3) > n.pow(2)
}

/// Detects `n = r^k` with `k ≥ 2` maximal; returns `(r, k)`.
pub fn perfect_power(n: &Natural) -> Option<(Natural, u32)> {
    if n < &Natural::from(4u8) {
        return None;
    }
    let bits = n.bits() as u32;
    // Try large exponents first so the returned base is as small as possible.
    for k in (2..=bits).rev() {
        let (root, exact) = integer_root(n, k).expect("k >= 2");
        if exact && root > Natural::one() {
            return Some((root, k));
        }
    }
    None
}

/// `n mod d` for a machine-word divisor without allocating.
pub fn mod_small(n: &Natural, d: u32) -> u32 {
    let d = d as u64;
    let mut rem = 0u64;
    for digit in n.iter_u32_digits().rev() {
        rem = ((rem << 32) | digit as u64) % d;
    }
    rem as u32
}

/// Uniform draw in `[lo, hi]` (inclusive).
pub fn random_between<R: Rng + ?Sized>(rng: &mut R, lo: &Natural, hi: &Natural) -> Natural {
    debug_assert!(lo <= hi);
    rng.gen_biguint_range(lo, &(hi + 1u32))
}

/// Parses a decimal or `0x`-prefixed hexadecimal natural number. Underscores
/// are accepted as digit separators.
pub fn parse_natural(text: &str) -> Result<Natural> {
    let cleaned: String = text.trim().chars().filter(|c| *c != '_').collect();
    let (digits, radix) = match cleaned
        .strip_prefix("0x")
        .or_else(|| cleaned.strip_prefix("0X"))
    {
        Some(hex) => (hex, 16),
        None => (cleaned.as_str(), 10),
    };
    if digits.is_empty() {
        return Err(Error::Parse(format!("empty number: {text:?}")));
    }
    Natural::parse_bytes(digits.as_bytes(), radix)
        .ok_or_else(|| Error::Parse(format!("malformed number: {text:?}")))
}

/// `ceil(log2 n)` for `n ≥ 1`.
pub fn ceil_log2(n: &Natural) -> u64 {
    if n.is_zero() || n.is_one() {
        return 0;
    }
    let bits = n.bits();
    if (n - 1u32).bits() < bits {
        bits - 1
    } else {
        bits
    }
}

/// Natural logarithm as `f64`, correct to a few ulps for any magnitude.
pub fn ln_f64(n: &Natural) -> f64 {
    assert!(!n.is_zero(), "ln(0)");
    let bits = n.bits();
    if bits <= 1000 {
        if let Some(x) = n.to_f64() {
            if x.is_finite() {
                return x.ln();
            }
        }
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("64 bits") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `log2 n` as `f64`.
pub fn log2_f64(n: &Natural) -> f64 {
    ln_f64(n) / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(x: u64) -> Natural {
        Natural::from(x)
    }

    fn res(v: u64, m: u64) -> Residue {
        Residue::new(nat(v), nat(m)).unwrap()
    }

    #[test]
    fn modexp_examples() {
        assert_eq!(modexp(&res(2, 1000), &nat(10)).value(), &nat(24));
        assert_eq!(modexp(&res(5, 7), &nat(0)).value(), &nat(1));
        assert_eq!(modexp(&res(2, 13), &nat(12)).value(), &nat(1));
        assert_eq!(modexp(&res(0, 13), &nat(0)).value(), &nat(1));
    }

    #[test]
    fn modexp_matches_repeated_multiplication() {
        // Exhaustive over small moduli; stride keeps the run short.
        for m in 2u64..1024 {
            for base in (0..m).step_by(37) {
                let mut naive = 1 % m;
                for e in 0u64..1024 {
                    if e % 61 == 0 {
                        assert_eq!(
                            modexp(&res(base, m), &nat(e)).value(),
                            &nat(naive),
                            "{base}^{e} mod {m}"
                        );
                    }
                    naive = naive * base % m;
                }
            }
        }
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&nat(12), &nat(18)).unwrap(), nat(6));
        assert_eq!(gcd(&nat(0), &nat(45)).unwrap(), nat(45));
        assert_eq!(gcd(&nat(63), &nat(13)).unwrap(), nat(1));
        assert!(gcd(&nat(0), &nat(0)).is_err());
    }

    #[test]
    fn integer_root_examples() {
        assert_eq!(integer_root(&nat(27), 3).unwrap(), (nat(3), true));
        assert_eq!(integer_root(&nat(26), 3).unwrap(), (nat(2), false));
        let sq = nat(45171966) * nat(45171966);
        assert_eq!(integer_root(&sq, 2).unwrap(), (nat(45171966), true));
        assert!(integer_root(&nat(5), 0).is_err());
    }

    #[test]
    fn two_thirds_examples() {
        assert!(exceeds_two_thirds(&nat(5), &nat(8)));
        assert!(!exceeds_two_thirds(&nat(4), &nat(8)));
        assert!(!exceeds_two_thirds(&nat(2801881), &nat(37690903213)));
    }

    #[test]
    fn two_thirds_agrees_with_cube_roots() {
        for c in 2u64..300 {
            let n = nat(c * c * c);
            let floor = nat(c * c);
            for q in c * c - 3..c * c + 3 {
                assert_eq!(exceeds_two_thirds(&nat(q), &n), nat(q) > floor);
            }
        }
    }

    #[test]
    fn perfect_powers() {
        assert_eq!(perfect_power(&nat(1024)), Some((nat(2), 10)));
        assert_eq!(perfect_power(&nat(36)), Some((nat(6), 2)));
        assert_eq!(perfect_power(&nat(35)), None);
        assert_eq!(perfect_power(&nat(3)), None);
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_natural("12345").unwrap(), nat(12345));
        assert_eq!(parse_natural("0xff").unwrap(), nat(255));
        assert_eq!(parse_natural("1_000").unwrap(), nat(1000));
        assert!(parse_natural("12a").is_err());
        assert!(parse_natural("").is_err());
        assert!(parse_natural("-3").is_err());
    }

    #[test]
    fn small_modulus() {
        let n = parse_natural("123456789012345678901234567890").unwrap();
        for d in [2u32, 3, 97, 65521, u32::MAX] {
            assert_eq!(Natural::from(mod_small(&n, d)), &n % d);
        }
    }

    #[test]
    fn logs() {
        assert_eq!(ceil_log2(&nat(1)), 0);
        assert_eq!(ceil_log2(&nat(8)), 3);
        assert_eq!(ceil_log2(&nat(9)), 4);
        let big = Natural::one() << 4000u32;
        assert!((log2_f64(&big) - 4000.0).abs() < 1e-9);
        assert!((ln_f64(&nat(1000)) - 1000f64.ln()).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn integer_root_brackets(n in any::<u128>(), k in 1u32..9) {
                let n = Natural::from(n);
                let (r, exact) = integer_root(&n, k).unwrap();
                prop_assert!(r.pow(k) <= n);
                prop_assert!((&r + 1u32).pow(k) > n);
                prop_assert_eq!(exact, r.pow(k) == n);
            }
        }
    }
}
