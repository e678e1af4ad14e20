//! Partial factorization with a certified lower bound on the cofactor, plus
//! the primality and splitting tools it rests on.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::ControlFlow;
use std::str::FromStr;

use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::numeric::{mod_small, perfect_power, random_between};
use crate::rng::TracedRng;
use crate::{Error, Natural, Result};

/// Rounds used when a number is accepted as prime.
pub const PRIME_ROUNDS: usize = 64;
/// Default ceiling on trial division for proven factorizations.
pub const DEFAULT_TRIAL_WALL: u64 = 1 << 26;
/// Trial-division ceiling used in front of rho.
pub const HEURISTIC_TRIAL_LIMIT: u64 = 1 << 16;
/// Distinct polynomial offsets tried by [`rho_split`].
pub const RHO_OFFSETS: usize = 8;

/// Bases 2..41 decide primality for every n below this value.
const DETERMINISTIC_LIMIT: &str = "3317044064679887385961981";
const SMALL_PRIME_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Outcome of a strong-pseudoprime test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MillerRabin {
    ProbablePrime,
    Composite { witness: Natural },
}

fn strong_test(n: &Natural, n_minus_1: &Natural, s: u64, t: &Natural, base: &Natural) -> bool {
    let mut x = base.modpow(t, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if &x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Writes `n − 1 = 2^s · t` with `t` odd.
pub(crate) fn two_adic(n: &Natural) -> (u64, Natural) {
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    (s, n_minus_1 >> s)
}

/// Strong test of odd `n ≥ 3` against every base; the first failing base is
/// returned as the witness.
pub fn miller_rabin(n: &Natural, bases: &[Natural]) -> Result<MillerRabin> {
    if n < &Natural::from(3u8) || n.is_even() {
        return Err(Error::InvalidInput(format!(
            "Miller-Rabin needs an odd n >= 3, got {n}"
        )));
    }
    if bases.is_empty() {
        return Err(Error::InvalidInput("no Miller-Rabin bases given".into()));
    }
    let n_minus_1 = n - 1u32;
    let (s, t) = two_adic(n);
    for base in bases {
        if base < &Natural::from(2u8) || base >= &n_minus_1 {
            return Err(Error::InvalidInput(format!(
                "base {base} outside [2, n-2] for n = {n}"
            )));
        }
        if !strong_test(n, &n_minus_1, s, &t, base) {
            return Ok(MillerRabin::Composite {
                witness: base.clone(),
            });
        }
    }
    Ok(MillerRabin::ProbablePrime)
}

/// Primality check used throughout the crate. Below ~3.3·10²⁴ the answer is
/// exact; above it, 64 strong tests with bases derived from `n` leave an
/// error of at most `4⁻⁶⁴`.
pub fn is_probable_prime(n: &Natural) -> bool {
    if n < &Natural::from(2u8) {
        return false;
    }
    for p in small_primes() {
        let p = *p;
        if n == &Natural::from(p) {
            return true;
        }
        if mod_small(n, p) == 0 {
            return false;
        }
    }
    // No factor below 1000 and n < 10⁶ means n is prime.
    if n < &Natural::from(1_000_000u32) {
        return true;
    }
    let n_minus_1 = n - 1u32;
    let (s, t) = two_adic(n);
    let mut bases: Vec<Natural> = SMALL_PRIME_BASES.iter().map(|&b| Natural::from(b)).collect();
    let deterministic: Natural = DETERMINISTIC_LIMIT.parse().expect("constant");
    if n >= &deterministic {
        let mut hasher = DefaultHasher::new();
        n.hash(&mut hasher);
        let mut rng = TracedRng::seed_from_u64(hasher.finish());
        let hi = n - 2u32;
        let two = Natural::from(2u8);
        while bases.len() < PRIME_ROUNDS {
            bases.push(random_between(&mut rng, &two, &hi));
        }
    }
    bases
        .iter()
        .all(|b| strong_test(n, &n_minus_1, s, &t, b))
}

/// Primes below 1000.
fn small_primes() -> &'static [u32] {
    use std::sync::OnceLock;
    static SMALL: OnceLock<Vec<u32>> = OnceLock::new();
    SMALL.get_or_init(|| primes_below(1000))
}

/// Sieve of Eratosthenes.
pub fn primes_below(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; limit];
    let mut out = Vec::new();
    for i in 2..limit {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j < limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Calls `f` on every prime in `[lo, hi)` in increasing order, stopping early
/// on `Break`. Uses a segmented sieve so memory stays small.
pub fn for_each_prime(lo: u64, hi: u64, mut f: impl FnMut(u64) -> ControlFlow<()>) {
    const SEGMENT: u64 = 1 << 18;
    if hi <= 2 || lo >= hi {
        return;
    }
    let lo = lo.max(2);
    let base = primes_below(hi.sqrt() + 2);
    let mut start = lo;
    while start < hi {
        let end = (start + SEGMENT).min(hi);
        let mut composite = vec![false; (end - start) as usize];
        for &p in &base {
            let p = p as u64;
            if p * p >= end {
                break;
            }
            let first = (p * p).max(start.div_ceil(p) * p);
            let mut m = first;
            while m < end {
                composite[(m - start) as usize] = true;
                m += p;
            }
        }
        for (i, &c) in composite.iter().enumerate() {
            if !c && f(start + i as u64).is_break() {
                return;
            }
        }
        start = end;
    }
}

/// Tries to find a nontrivial factor of odd composite `n ≥ 9` with Brent's
/// cycle-finding variant of Pollard's rho. The offset `c` of `x ↦ x² + c` is
/// redrawn on failure, up to [`RHO_OFFSETS`] times, all within `budget`
/// iterations. `None` means the budget ran out.
pub fn rho_split<R: Rng + ?Sized>(n: &Natural, budget: u64, rng: &mut R) -> Result<Option<Natural>> {
    if n < &Natural::from(9u8) || n.is_even() {
        return Err(Error::InvalidInput(format!("rho needs an odd n >= 9, got {n}")));
    }
    const BATCH: u64 = 128;
    let one = Natural::one();
    let hi = n - 1u32;
    let mut used = 0u64;
    let step = |y: &Natural, c: &Natural| (y * y + c) % n;
    let diff = |a: &Natural, b: &Natural| if a > b { a - b } else { b - a };

    for _ in 0..RHO_OFFSETS {
        if used >= budget {
            break;
        }
        let c = random_between(rng, &one, &hi);
        let mut y = random_between(rng, &Natural::zero(), &hi);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut product = one.clone();
        let mut g = one.clone();
        let mut r = 1u64;
        'outer: while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y, &c);
                used += 1;
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = step(&y, &c);
                    product = (product * diff(&x, &y)) % n;
                    used += 1;
                }
                g = product.gcd(n);
                k += BATCH;
                if used >= budget && g.is_one() {
                    break 'outer;
                }
            }
            r *= 2;
        }
        if &g == n {
            // The batch overshot; replay it one step at a time.
            loop {
                ys = step(&ys, &c);
                used += 1;
                g = diff(&x, &ys).gcd(n);
                if !g.is_one() || used >= budget.saturating_add(r) {
                    break;
                }
            }
        }
        if !g.is_one() && &g != n {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// One prime power of a factorization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactorPair {
    pub prime: Natural,
    pub exponent: u32,
}

impl FactorPair {
    pub fn new(prime: Natural, exponent: u32) -> Self {
        FactorPair { prime, exponent }
    }

    pub fn value(&self) -> Natural {
        num_traits::pow(self.prime.clone(), self.exponent as usize)
    }
}

impl fmt::Display for FactorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 1 {
            write!(f, "{}", self.prime)
        } else {
            write!(f, "{}^{}", self.prime, self.exponent)
        }
    }
}

/// How far the "no prime factor below `bound`" claim on the cofactor can be
/// trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guarantee {
    /// Trial division ran to the bound.
    Proven,
    /// Only the trial-division part is certain; rho results beyond it are
    /// best-effort.
    Heuristic,
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Guarantee::Proven => "proven",
            Guarantee::Heuristic => "heuristic",
        })
    }
}

impl FromStr for Guarantee {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proven" => Ok(Guarantee::Proven),
            "heuristic" => Ok(Guarantee::Heuristic),
            other => Err(Error::Parse(format!("unknown guarantee {other:?}"))),
        }
    }
}

/// Factoring strategy for [`partial_factor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Trial division by every prime below the bound.
    TrialProven,
    /// Trial division below `min(B, 2¹⁶)`, then rho with `budget` iterations
    /// per composite piece.
    RhoHeuristic { budget: u64 },
}

/// `n = (Π prime^exponent) · cofactor`, where the cofactor has no prime factor
/// below `bound` (certainly for `Proven`, below the trial limit for
/// `Heuristic`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFactorization {
    pub n: Natural,
    /// Sorted by prime.
    pub factors: Vec<FactorPair>,
    pub cofactor: Natural,
    /// Certified lower bound on the prime factors of the cofactor.
    pub bound: Natural,
    pub guarantee: Guarantee,
    /// Average-case reach of rho (`L²`), reported alongside but never used
    /// for certified bounds.
    pub effective_bound: Option<Natural>,
    /// At least one factor was accepted through Miller–Rabin rather than
    /// proven prime by trial division; the error is then at most `4⁻⁶⁴`.
    pub probabilistic_primes: bool,
}

impl PartialFactorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    /// Product of the listed prime powers.
    pub fn factored_part(&self) -> Natural {
        self.factors.iter().map(FactorPair::value).product()
    }

    pub fn primes(&self) -> impl Iterator<Item = &Natural> {
        self.factors.iter().map(|f| &f.prime)
    }

    /// Complete factorization from known prime powers.
    pub fn from_complete(factors: Vec<FactorPair>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for f in factors {
            if f.exponent == 0 || !is_probable_prime(&f.prime) {
                return Err(Error::InvalidInput(format!("{} is not a prime power", f)));
            }
            *map.entry(f.prime).or_insert(0) += f.exponent;
        }
        let factors: Vec<FactorPair> = map.into_iter().map(|(p, e)| FactorPair::new(p, e)).collect();
        let n: Natural = factors.iter().map(FactorPair::value).product();
        let bound = &n + 1u32;
        Ok(PartialFactorization {
            n,
            factors,
            cofactor: Natural::one(),
            bound,
            guarantee: Guarantee::Proven,
            effective_bound: None,
            probabilistic_primes: false,
        })
    }

    /// Runs rho on the cofactor to pick up more primes. The certified bound
    /// and guarantee are unchanged; `effective_bound` records `L²`.
    pub fn extend_with_rho<R: Rng + ?Sized>(mut self, budget: u64, rng: &mut R) -> Self {
        if self.is_complete() {
            return self;
        }
        let mut found: BTreeMap<Natural, u32> =
            self.factors.drain(..).map(|f| (f.prime, f.exponent)).collect();
        let leftover = split_pieces(self.cofactor.clone(), budget, rng, &mut found);
        let effective = Natural::from(budget) * Natural::from(budget);
        self.effective_bound = Some(effective.max(self.bound.clone()));
        self.probabilistic_primes = true;
        self.cofactor = leftover;
        self.factors = finish(&mut self.cofactor, found);
        self
    }

    fn check_reconstruction(&self) -> bool {
        self.factored_part() * &self.cofactor == self.n
    }
}

impl fmt::Display for PartialFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ", self.n)?;
        let mut terms: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        if !self.is_complete() {
            terms.push("Q".into());
        }
        if terms.is_empty() {
            terms.push("1".into());
        }
        write!(f, "{} [", terms.join(" * "))?;
        if !self.is_complete() {
            write!(f, "Q={}, ", self.cofactor)?;
        }
        write!(f, "bound={}, guarantee={}", self.bound, self.guarantee)?;
        if let Some(e) = &self.effective_bound {
            write!(f, ", effective_bound={e}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for PartialFactorization {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed factorization line: {line:?}"));
        let (lhs, rhs) = line.split_once(" = ").ok_or_else(bad)?;
        let n: Natural = lhs.trim().parse().map_err(|_| bad())?;
        let (terms, meta) = rhs.split_once(" [").ok_or_else(bad)?;
        let meta = meta.strip_suffix(']').ok_or_else(bad)?;

        let mut factors = Vec::new();
        for term in terms.split(" * ") {
            match term {
                "Q" | "1" => {}
                t => {
                    let (p, e) = t.split_once('^').unwrap_or((t, "1"));
                    factors.push(FactorPair::new(
                        p.parse().map_err(|_| bad())?,
                        e.parse().map_err(|_| bad())?,
                    ));
                }
            }
        }
        let mut cofactor = Natural::one();
        let mut bound = None;
        let mut guarantee = None;
        let mut effective_bound = None;
        for item in meta.split(", ") {
            let (k, v) = item.split_once('=').ok_or_else(bad)?;
            match k {
                "Q" => cofactor = v.parse().map_err(|_| bad())?,
                "bound" => bound = Some(v.parse().map_err(|_| bad())?),
                "guarantee" => guarantee = Some(v.parse()?),
                "effective_bound" => effective_bound = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let pf = PartialFactorization {
            n,
            factors,
            cofactor,
            bound: bound.ok_or_else(bad)?,
            guarantee: guarantee.ok_or_else(bad)?,
            effective_bound,
            probabilistic_primes: false,
        };
        if !pf.check_reconstruction() {
            return Err(Error::Parse(format!("factors do not multiply to n: {line:?}")));
        }
        Ok(pf)
    }
}

/// Divides every prime below `limit` out of `rest`, recording them in
/// `found`. Returns `true` when `rest` has been fully resolved (it is 1 or a
/// prime recorded because the divisor passed its square root).
fn trial_divide(rest: &mut Natural, limit: u64, found: &mut BTreeMap<Natural, u32>) -> bool {
    let mut complete = rest.is_one();
    if complete {
        return true;
    }
    // Machine-word fast path once the remainder is small.
    let mut small: Option<u64> = rest.to_u64();
    for_each_prime(2, limit, |p| {
        if let Some(r) = small.as_mut() {
            if (p as u128) * (p as u128) > *r as u128 {
                complete = true;
                return ControlFlow::Break(());
            }
            let mut e = 0;
            while *r % p == 0 {
                *r /= p;
                e += 1;
            }
            if e > 0 {
                *found.entry(Natural::from(p)).or_insert(0) += e;
            }
            return ControlFlow::Continue(());
        }
        if Natural::from(p) * Natural::from(p) > *rest {
            complete = true;
            return ControlFlow::Break(());
        }
        if mod_small(rest, p as u32) == 0 {
            let mut e = 0;
            while mod_small(rest, p as u32) == 0 {
                *rest /= p as u32;
                e += 1;
            }
            *found.entry(Natural::from(p)).or_insert(0) += e;
            small = rest.to_u64();
        }
        ControlFlow::Continue(())
    });
    if let Some(r) = small {
        *rest = Natural::from(r);
    }
    if complete && !rest.is_one() {
        *found.entry(rest.clone()).or_insert(0) += 1;
        *rest = Natural::one();
    }
    complete || rest.is_one()
}

/// Splits `piece` with primality checks, perfect-power detection and rho,
/// recording primes in `found`. Returns the product of pieces rho could not
/// split.
fn split_pieces<R: Rng + ?Sized>(
    piece: Natural,
    budget: u64,
    rng: &mut R,
    found: &mut BTreeMap<Natural, u32>,
) -> Natural {
    let mut leftover = Natural::one();
    let mut work = vec![(piece, 1u32)];
    while let Some((m, mult)) = work.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *found.entry(m).or_insert(0) += mult;
            continue;
        }
        if let Some((root, k)) = perfect_power(&m) {
            work.push((root, mult * k));
            continue;
        }
        if m.is_even() {
            let tz = m.trailing_zeros().unwrap_or(0) as u32;
            *found.entry(Natural::from(2u8)).or_insert(0) += tz * mult;
            work.push((m >> tz, mult));
            continue;
        }
        if m < Natural::from(9u8) {
            // Odd composite below 9 does not exist; treat as leftover.
            leftover *= num_traits::pow(m, mult as usize);
            continue;
        }
        match rho_split(&m, budget, rng).expect("odd composite >= 9") {
            Some(d) => {
                let other = &m / &d;
                work.push((d, mult));
                work.push((other, mult));
            }
            None => leftover *= num_traits::pow(m, mult as usize),
        }
    }
    leftover
}

/// Moves any recorded prime still dividing the cofactor into the factor
/// list, then returns the sorted factor list.
fn finish(cofactor: &mut Natural, mut found: BTreeMap<Natural, u32>) -> Vec<FactorPair> {
    for (p, e) in found.iter_mut() {
        while !cofactor.is_one() && (&*cofactor % &*p).is_zero() {
            *cofactor /= &*p;
            *e += 1;
        }
    }
    found.into_iter().map(|(p, e)| FactorPair::new(p, e)).collect()
}

/// [`partial_factor_with_wall`] with the default trial-division wall.
pub fn partial_factor<R: Rng + ?Sized>(
    n: &Natural,
    bound: &Natural,
    strategy: Strategy,
    rng: &mut R,
) -> Result<PartialFactorization> {
    partial_factor_with_wall(n, bound, strategy, DEFAULT_TRIAL_WALL, rng)
}

/// Factors `n` over primes below `bound`, leaving a cofactor `Q` with no
/// prime factor below the certified bound.
///
/// With [`Strategy::TrialProven`] the work is trial division up to
/// `min(bound, √n)`, which must not exceed `wall`. A composite cofactor that
/// is a perfect power of a prime, or a probable prime, is moved into the
/// factor list.
pub fn partial_factor_with_wall<R: Rng + ?Sized>(
    n: &Natural,
    bound: &Natural,
    strategy: Strategy,
    wall: u64,
    rng: &mut R,
) -> Result<PartialFactorization> {
    if n < &Natural::from(2u8) {
        return Err(Error::InvalidInput(format!("cannot factor {n}")));
    }
    if bound < &Natural::from(2u8) {
        return Err(Error::InvalidInput(format!("bound must be at least 2, got {bound}")));
    }
    let mut found = BTreeMap::new();
    let mut rest = n.clone();
    let sqrt_reach = n.sqrt() + 1u32;

    let (certified, guarantee, effective_bound, mut probabilistic) = match strategy {
        Strategy::TrialProven => {
            let needed = bound.min(&sqrt_reach);
            let limit = needed.to_u64().filter(|&l| l <= wall).ok_or_else(|| Error::CostWall {
                requested: bound.clone(),
                wall,
            })?;
            let complete = trial_divide(&mut rest, limit.max(2), &mut found);
            let mut probabilistic = false;
            if !complete {
                // Certified: no prime below `bound` remains, so a probable
                // prime cofactor or a prime power of one is safe to list.
                if is_probable_prime(&rest) {
                    probabilistic = true;
                    *found.entry(std::mem::replace(&mut rest, Natural::one())).or_insert(0) += 1;
                } else if let Some((root, k)) = perfect_power(&rest) {
                    if is_probable_prime(&root) {
                        probabilistic = true;
                        *found.entry(root).or_insert(0) += k;
                        rest = Natural::one();
                    }
                }
            }
            (bound.clone(), Guarantee::Proven, None, probabilistic)
        }
        Strategy::RhoHeuristic { budget } => {
            let trial = bound.min(&Natural::from(HEURISTIC_TRIAL_LIMIT)).clone();
            let limit = trial.to_u64().expect("small");
            let complete = trial_divide(&mut rest, limit, &mut found);
            let mut probabilistic = false;
            if !complete {
                probabilistic = true;
                let piece = std::mem::replace(&mut rest, Natural::one());
                rest = split_pieces(piece, budget, rng, &mut found);
            }
            let effective = (Natural::from(budget) * Natural::from(budget)).max(trial.clone());
            (trial, Guarantee::Heuristic, Some(effective), probabilistic)
        }
    };
    let factors = finish(&mut rest, found);
    if rest.is_one() && factors.iter().all(|f| f.prime < certified) {
        probabilistic = false;
    }
    let pf = PartialFactorization {
        n: n.clone(),
        factors,
        cofactor: rest,
        bound: certified,
        guarantee,
        effective_bound,
        probabilistic_primes: probabilistic,
    };
    debug_assert!(pf.check_reconstruction());
    Ok(pf)
}

/// Complete factorization of `n`, trying trial division to `√n` within the
/// default wall and then rho with a fixed seed. Fails when a composite piece
/// resists rho.
pub fn factorize(n: &Natural) -> Result<PartialFactorization> {
    let mut rng = TracedRng::seed_from_u64(0x5eed);
    let sqrt_reach = n.sqrt() + 1u32;
    let pf = if sqrt_reach <= Natural::from(DEFAULT_TRIAL_WALL) {
        partial_factor(n, &sqrt_reach, Strategy::TrialProven, &mut rng)?
    } else {
        partial_factor(n, &Natural::from(HEURISTIC_TRIAL_LIMIT), Strategy::TrialProven, &mut rng)?
            .extend_with_rho(1 << 24, &mut rng)
    };
    if pf.is_complete() {
        Ok(pf)
    } else {
        Err(Error::IncompleteFactorization(n.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(x: u64) -> Natural {
        Natural::from(x)
    }

    fn pairs(pf: &PartialFactorization) -> Vec<(u64, u32)> {
        pf.factors
            .iter()
            .map(|f| (f.prime.to_u64().unwrap(), f.exponent))
            .collect()
    }

    fn sieve_spf(limit: usize) -> Vec<u32> {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        spf
    }

    #[test]
    fn miller_rabin_examples() {
        assert_eq!(miller_rabin(&nat(13), &[nat(2)]).unwrap(), MillerRabin::ProbablePrime);
        // 2047 = 23 · 89 is the smallest strong pseudoprime to base 2.
        assert_eq!(miller_rabin(&nat(2047), &[nat(2)]).unwrap(), MillerRabin::ProbablePrime);
        assert_eq!(
            miller_rabin(&nat(2047), &[nat(2), nat(3)]).unwrap(),
            MillerRabin::Composite { witness: nat(3) }
        );
        assert!(miller_rabin(&nat(12), &[nat(2)]).is_err());
        assert!(miller_rabin(&nat(1), &[nat(2)]).is_err());
        assert!(miller_rabin(&nat(13), &[nat(12)]).is_err());
    }

    #[test]
    fn probable_primes_match_sieve() {
        let spf = sieve_spf(200_000);
        for n in 0..200_000u64 {
            let expected = n >= 2 && spf[n as usize] as u64 == n;
            assert_eq!(is_probable_prime(&nat(n)), expected, "n = {n}");
        }
        // Carmichael numbers and a large prime.
        for c in [561u64, 1729, 41041, 825265, 321197185, 37690903213] {
            assert!(!is_probable_prime(&nat(c)), "{c}");
        }
        let m127 = (Natural::one() << 127u32) - 1u32;
        assert!(is_probable_prime(&m127));
        assert!(!is_probable_prime(&(&m127 * &m127)));
    }

    #[test]
    fn segmented_sieve_matches_plain() {
        let plain: Vec<u64> = primes_below(1_000_000).into_iter().map(u64::from).collect();
        let mut seg = Vec::new();
        for_each_prime(0, 1_000_000, |p| {
            seg.push(p);
            ControlFlow::Continue(())
        });
        assert_eq!(plain, seg);
        let mut window = Vec::new();
        for_each_prime(100, 130, |p| {
            window.push(p);
            ControlFlow::Continue(())
        });
        assert_eq!(window, vec![101, 103, 107, 109, 113, 127]);
    }

    #[test]
    fn rho_classic_instances() {
        let mut rng = TracedRng::seed_from_u64(1);
        let d = rho_split(&nat(8051), 10_000, &mut rng).unwrap().unwrap();
        assert!(d == nat(83) || d == nat(97));
        for seed in 0..20 {
            let mut rng = TracedRng::seed_from_u64(seed);
            let d = rho_split(&nat(10403), 10_000, &mut rng).unwrap().unwrap();
            assert!(d == nat(101) || d == nat(103));
        }
        let p = nat(4_294_967_291);
        let mut rng = TracedRng::seed_from_u64(3);
        let d = rho_split(&(&p * &p), 1_000_000, &mut rng).unwrap().unwrap();
        assert_eq!(d, p);
        assert!(rho_split(&nat(8), 10, &mut rng).is_err());
    }

    #[test]
    fn rho_never_trivial_and_deterministic() {
        for n in (9u64..3000).step_by(2) {
            if is_probable_prime(&nat(n)) || perfect_power(&nat(n)).is_some() {
                continue;
            }
            let mut a = TracedRng::seed_from_u64(n);
            let mut b = TracedRng::seed_from_u64(n);
            let da = rho_split(&nat(n), 5000, &mut a).unwrap();
            let db = rho_split(&nat(n), 5000, &mut b).unwrap();
            assert_eq!(da, db);
            if let Some(d) = da {
                assert!(d > nat(1) && d < nat(n) && (nat(n) % &d).is_zero(), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn partial_factor_examples() {
        let mut rng = TracedRng::seed_from_u64(0);
        let pf = partial_factor(&nat(12), &nat(5), Strategy::TrialProven, &mut rng).unwrap();
        assert_eq!(pairs(&pf), vec![(2, 2), (3, 1)]);
        assert!(pf.is_complete());
        assert_eq!(pf.guarantee, Guarantee::Proven);

        let pf = partial_factor(&nat(37690903212), &nat(1450), Strategy::TrialProven, &mut rng).unwrap();
        assert_eq!(pairs(&pf), vec![(2, 2), (3, 1), (19, 1), (59, 1)]);
        assert_eq!(pf.cofactor, nat(1451 * 1931));
        assert_eq!(pf.guarantee, Guarantee::Proven);

        // Smallest prime above 2²⁰ is 1048583.
        let q = nat(1_048_583);
        let pf = partial_factor(&(nat(16) * &q), &nat(1 << 10), Strategy::TrialProven, &mut rng).unwrap();
        assert_eq!(pairs(&pf), vec![(2, 4), (1_048_583, 1)]);
        assert!(pf.is_complete());

        assert!(partial_factor(&nat(1), &nat(5), Strategy::TrialProven, &mut rng).is_err());
    }

    #[test]
    fn cost_wall_enforced() {
        let mut rng = TracedRng::seed_from_u64(0);
        let n = (Natural::one() << 200u32) + 1u32;
        let err = partial_factor(&n, &nat(1 << 30), Strategy::TrialProven, &mut rng).unwrap_err();
        assert!(matches!(err, Error::CostWall { .. }));
        // A small n completes below the wall whatever the bound.
        assert!(partial_factor(&nat(1_000_000), &nat(1 << 40), Strategy::TrialProven, &mut rng).is_ok());
    }

    #[test]
    fn proven_cofactor_has_no_small_factor() {
        let spf = sieve_spf(1_000_000);
        let mut rng = TracedRng::seed_from_u64(0);
        for n in (2u64..1_000_000).step_by(997) {
            for b in [2u64, 3, 10, 97, 500, 1000] {
                let pf = partial_factor(&nat(n), &nat(b), Strategy::TrialProven, &mut rng).unwrap();
                assert!(pf.check_reconstruction());
                let q = pf.cofactor.to_u64().unwrap();
                if q > 1 {
                    assert!(spf[q as usize] as u64 >= b, "n={n} b={b} q={q}");
                }
            }
        }
    }

    #[test]
    fn heuristic_strategy_splits_semiprimes() {
        let mut rng = TracedRng::seed_from_u64(11);
        // (2^31 − 1) · (2^61 − 1) · 2^3 · 3
        let p1 = nat((1 << 31) - 1);
        let p2 = nat((1 << 61) - 1);
        let n = &p1 * &p2 * nat(24);
        let pf = partial_factor(&n, &nat(1 << 40), Strategy::RhoHeuristic { budget: 1 << 20 }, &mut rng).unwrap();
        assert!(pf.is_complete(), "{pf}");
        assert_eq!(pf.guarantee, Guarantee::Heuristic);
        assert_eq!(pf.bound, nat(1 << 16));
        assert_eq!(pf.effective_bound, Some(nat(1 << 40)));
        assert_eq!(pf.factors.len(), 4);
    }

    #[test]
    fn perfect_power_cofactor() {
        let mut rng = TracedRng::seed_from_u64(5);
        let p = nat(4_294_967_291);
        let n = &p * &p * &p * nat(6);
        let pf = partial_factor(&n, &nat(1000), Strategy::TrialProven, &mut rng).unwrap();
        assert!(pf.is_complete());
        assert_eq!(pf.factors.last().unwrap(), &FactorPair::new(p.clone(), 3));
        let pf = partial_factor(&n, &nat(1000), Strategy::RhoHeuristic { budget: 100 }, &mut rng).unwrap();
        assert!(pf.is_complete());
    }

    #[test]
    fn line_format_round_trip() {
        let mut rng = TracedRng::seed_from_u64(0);
        let pf = partial_factor(&nat(37690903212), &nat(1450), Strategy::TrialProven, &mut rng).unwrap();
        let line = pf.to_string();
        assert_eq!(
            line,
            "37690903212 = 2^2 * 3 * 19 * 59 * Q [Q=2801881, bound=1450, guarantee=proven]"
        );
        let back: PartialFactorization = line.parse().unwrap();
        assert_eq!(back.to_string(), line);
        assert!("12 = 2^2 * 5 [bound=5, guarantee=proven]".parse::<PartialFactorization>().is_err());
        let done = partial_factor(&nat(12), &nat(5), Strategy::TrialProven, &mut rng).unwrap();
        assert_eq!(done.to_string(), "12 = 2^2 * 3 [bound=5, guarantee=proven]");
    }

    #[test]
    fn factorize_complete() {
        let pf = factorize(&nat(37690903213)).unwrap();
        assert_eq!(pairs(&pf), vec![(229, 1), (2243, 1), (73379, 1)]);
        let pf = factorize(&nat(1)).err();
        assert!(pf.is_some());
    }

    mod props {
        use super::*;
        use crate::factor::Strategy;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]
            #[test]
            fn reconstruction_holds(n in 2u128.., seed in any::<u64>(), heuristic in any::<bool>()) {
                let n = Natural::from(n);
                let mut rng = TracedRng::seed_from_u64(seed);
                let strategy = if heuristic {
                    Strategy::RhoHeuristic { budget: 2000 }
                } else {
                    Strategy::TrialProven
                };
                let pf = partial_factor(&n, &Natural::from(1000u32), strategy, &mut rng).unwrap();
                prop_assert!(pf.check_reconstruction());
                for f in &pf.factors {
                    prop_assert!(is_probable_prime(&f.prime));
                    prop_assert!(f.exponent >= 1);
                }
            }
        }
    }
}
