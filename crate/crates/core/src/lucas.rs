//! Probabilistic Lucas primality test with certificates, and Diffie–Hellman
//! parameter generation on top of it.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bounds::{failure_f, solve_failure_bound, ProbabilityBound};
use crate::factor::{
    for_each_prime, is_probable_prime, miller_rabin, rho_split, two_adic, FactorPair, MillerRabin,
    DEFAULT_TRIAL_WALL,
};
use crate::numeric::{exceeds_two_thirds, random_between};
use crate::primroot::{heuristic2_with_budget, RootCandidate};
use crate::{Error, Natural, Result, SeedTrace, TracedRng};

/// Version string written into certificates.
pub const GENERATOR: &str = concat!("primroot ", env!("CARGO_PKG_VERSION"));
const HEADER: &str = "primroot-certificate v1";

/// `a^t ≡ 1` or `a^(2^i·t) ≡ −1` for some `i < s`, where `n − 1 = 2^s·t`.
pub fn strong_probable_prime(n: &Natural, a: &Natural) -> Result<bool> {
    if n < &Natural::from(3u8) || n.is_even() {
        return Err(Error::InvalidInput(format!("n must be odd and >= 3, got {n}")));
    }
    if n < &Natural::from(5u8) {
        return Err(Error::InvalidInput(format!("no base lies in [2, n-2] for n = {n}")));
    }
    Ok(miller_rabin(n, std::slice::from_ref(a))? == MillerRabin::ProbablePrime)
}

/// Strong test from `y = a^t`, reusing a power already computed.
fn strong_from_odd_power(n: &Natural, y: Natural, s: u64) -> bool {
    let minus_one = n - 1u32;
    let mut x = y;
    if x.is_one() || x == minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == minus_one {
            return true;
        }
    }
    false
}

/// Why a number was found composite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// `1 < factor < n` and `factor | n`.
    Factor(Natural),
    /// `α^(n−1) ≢ 1`.
    FermatWitness(Natural),
    /// `α` fails the strong test.
    StrongWitness(Natural),
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::Factor(d) => write!(f, "factor {d}"),
            Evidence::FermatWitness(a) => write!(f, "Fermat witness {a}"),
            Evidence::StrongWitness(a) => write!(f, "strong witness {a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Prime(PrimalityCertificate),
    Composite(Evidence),
    /// Some accepted `q` could not be shown prime; the error is `F(B, q)`.
    ProbablyPrime(ProbabilityBound),
    /// Too many `α^((n−1)/q) ≡ 1` events; the error is the accumulated `P`.
    ProbablyComposite(BigRational),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LucasOutcome {
    pub verdict: Verdict,
    /// Number of bases `α` drawn.
    pub bases_drawn: u64,
    /// The error figure rests on the `4ε` refinement or the `P` accumulator
    /// rather than on a proof.
    pub heuristic_bound: bool,
    pub seed_trace: SeedTrace,
}

impl LucasOutcome {
    /// Error of a probabilistic verdict as `f64`; `None` for Prime and
    /// Composite.
    pub fn error_bound(&self) -> Option<f64> {
        match &self.verdict {
            Verdict::ProbablyPrime(b) => Some(b.failure()),
            Verdict::ProbablyComposite(p) => p.to_f64(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LucasConfig {
    /// Run the BLS square test before answering Prime.
    pub strict: bool,
    /// Trial-division ceiling when searching for the next `q`.
    pub trial_wall: u64,
    /// Rho budget used once trial division hits the wall.
    pub rho_budget: u64,
}

impl Default for LucasConfig {
    fn default() -> Self {
        LucasConfig {
            strict: true,
            trial_wall: DEFAULT_TRIAL_WALL,
            rho_budget: 1 << 20,
        }
    }
}

/// How a certificate proves primality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateMode {
    /// `n − 1` fully factored.
    Complete,
    /// Factored part `k > √n`.
    Pocklington,
    /// `n^(1/3) < k ≤ √n`, square test not run.
    BlsConditional,
    /// `n^(1/3) < k ≤ √n` and the square test passed.
    BlsDeterministic,
}

impl fmt::Display for CertificateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateMode::Complete => "complete",
            CertificateMode::Pocklington => "pocklington",
            CertificateMode::BlsConditional => "bls-conditional",
            CertificateMode::BlsDeterministic => "bls-deterministic",
        })
    }
}

impl FromStr for CertificateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "complete" => CertificateMode::Complete,
            "pocklington" => CertificateMode::Pocklington,
            "bls-conditional" => CertificateMode::BlsConditional,
            "bls-deterministic" => CertificateMode::BlsDeterministic,
            other => return Err(Error::Parse(format!("unknown certificate mode {other:?}"))),
        })
    }
}

/// `(a, k, Q)` with `n − 1 = (Π q^e)·Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimalityCertificate {
    pub n: Natural,
    pub a: Natural,
    pub prime_powers: Vec<FactorPair>,
    pub cofactor: Natural,
    pub mode: CertificateMode,
    pub generator: String,
}

impl PrimalityCertificate {
    /// `Π q^e`.
    pub fn k_value(&self) -> Natural {
        self.prime_powers.iter().map(FactorPair::value).product()
    }
}

impl fmt::Display for PrimalityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "a = {}", self.a)?;
        for pp in &self.prime_powers {
            writeln!(f, "prime_power = {} {}", pp.prime, pp.exponent)?;
        }
        writeln!(f, "Q = {}", self.cofactor)?;
        writeln!(f, "mode = {}", self.mode)?;
        writeln!(f, "generator = {}", self.generator)
    }
}

impl FromStr for PrimalityCertificate {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("certificate: {what}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some(HEADER) {
            return Err(bad("missing header"));
        }
        let (mut n, mut a, mut q, mut mode, mut generator) = (None, None, None, None, None);
        let mut prime_powers = Vec::new();
        for line in lines {
            let (key, value) = line.split_once(" = ").ok_or_else(|| bad(line))?;
            let num = |v: &str| v.trim().parse::<Natural>().map_err(|_| bad(line));
            match key.trim() {
                "n" => n = Some(num(value)?),
                "a" => a = Some(num(value)?),
                "Q" => q = Some(num(value)?),
                "mode" => mode = Some(value.trim().parse()?),
                "generator" => generator = Some(value.to_string()),
                "prime_power" => {
                    let (p, e) = value.trim().split_once(' ').ok_or_else(|| bad(line))?;
                    let e: u32 = e.parse().map_err(|_| bad(line))?;
                    prime_powers.push(FactorPair::new(num(p)?, e));
                }
                _ => return Err(bad(line)),
            }
        }
        Ok(PrimalityCertificate {
            n: n.ok_or_else(|| bad("missing n"))?,
            a: a.ok_or_else(|| bad("missing a"))?,
            prime_powers,
            cofactor: q.ok_or_else(|| bad("missing Q"))?,
            mode: mode.ok_or_else(|| bad("missing mode"))?,
            generator: generator.ok_or_else(|| bad("missing generator"))?,
        })
    }
}

/// First check a certificate failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidReason {
    ProductMismatch,
    ZeroExponent,
    NotPrime(Natural),
    FermatFails,
    GcdFails(Natural),
    FactoredPartTooSmall,
    SquareDiscriminant,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::ProductMismatch => f.write_str("product of prime powers and Q differs from n - 1"),
            InvalidReason::ZeroExponent => f.write_str("zero exponent"),
            InvalidReason::NotPrime(q) => write!(f, "{q} is not prime"),
            InvalidReason::FermatFails => f.write_str("a^(n-1) is not 1 mod n"),
            InvalidReason::GcdFails(q) => write!(f, "gcd(a^((n-1)/{q}) - 1, n) is not 1"),
            InvalidReason::FactoredPartTooSmall => f.write_str("factored part k has k^3 <= n"),
            InvalidReason::SquareDiscriminant => f.write_str("c1^2 - 4 c2 is a perfect square"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateCheck {
    Valid(CertificateMode),
    Invalid(InvalidReason),
}

/// `(c₁, c₂)` with `n = c₂k² + c₁k + 1`, `0 ≤ c₁ < k`.
fn bls_digits(n: &Natural, k: &Natural) -> (Natural, Natural) {
    let m = (n - 1u32) / k;
    (&m % k, m / k)
}

fn square_root_of(disc: &BigInt) -> Option<Natural> {
    if disc.is_negative() {
        return None;
    }
    let d = disc.magnitude();
    let r = d.sqrt();
    (&r * &r == *d).then_some(r)
}

fn discriminant(c1: &Natural, c2: &Natural) -> BigInt {
    let c1 = BigInt::from_biguint(Sign::Plus, c1.clone());
    let c2 = BigInt::from_biguint(Sign::Plus, c2.clone());
    &c1 * &c1 - BigInt::from(4) * c2
}

/// When the square test fails, `n = (xk + 1)(yk + 1)` with `x + y = c₁` (or
/// `c₁ + k`) and `xy = c₂` (or `c₂ − 1`); recover a factor.
fn bls_factor(n: &Natural, k: &Natural) -> Option<Natural> {
    let (c1, c2) = bls_digits(n, k);
    let mut options = vec![(c1.clone(), c2.clone())];
    if !c2.is_zero() {
        options.push((&c1 + k, &c2 - 1u32));
    }
    for (s, p) in options {
        let Some(r) = square_root_of(&discriminant(&s, &p)) else {
            continue;
        };
        if (&s + &r).is_odd() {
            continue;
        }
        for x in [(&s + &r) >> 1u32, if s >= r { (&s - &r) >> 1u32 } else { continue }] {
            let f = x * k + 1u32;
            if f > Natural::one() && &f < n && (n % &f).is_zero() {
                return Some(f);
            }
        }
    }
    None
}

/// Checks, in order: `(Π q^e)·Q = n − 1`, exponents positive, each `q`
/// prime, `a^(n−1) ≡ 1`, `gcd(a^((n−1)/q) − 1, n) = 1` for each `q`,
/// `k³ > n`. With `strict`, a certificate with `k ≤ √n` must also pass the
/// BLS square test.
pub fn verify_certificate(cert: &PrimalityCertificate, strict: bool) -> CertificateCheck {
    use CertificateCheck::Invalid;
    let n = &cert.n;
    if n < &Natural::from(3u8) {
        return Invalid(InvalidReason::ProductMismatch);
    }
    let n_minus_1 = n - 1u32;
    let k = cert.k_value();
    if &k * &cert.cofactor != n_minus_1 {
        return Invalid(InvalidReason::ProductMismatch);
    }
    for pp in &cert.prime_powers {
        if pp.exponent == 0 {
            return Invalid(InvalidReason::ZeroExponent);
        }
        if !is_probable_prime(&pp.prime) {
            return Invalid(InvalidReason::NotPrime(pp.prime.clone()));
        }
    }
    if !cert.a.modpow(&n_minus_1, n).is_one() {
        return Invalid(InvalidReason::FermatFails);
    }
    for pp in &cert.prime_powers {
        let z = cert.a.modpow(&(&n_minus_1 / &pp.prime), n);
        let g = if z.is_zero() { n.clone() } else { (z - 1u32).gcd(n) };
        if !g.is_one() {
            return Invalid(InvalidReason::GcdFails(pp.prime.clone()));
        }
    }
    if k.pow(3) <= *n {
        return Invalid(InvalidReason::FactoredPartTooSmall);
    }
    let mode = if cert.cofactor.is_one() {
        CertificateMode::Complete
    } else if &k * &k > *n {
        CertificateMode::Pocklington
    } else if strict {
        let (c1, c2) = bls_digits(n, &k);
        if square_root_of(&discriminant(&c1, &c2)).is_some() {
            return Invalid(InvalidReason::SquareDiscriminant);
        }
        CertificateMode::BlsDeterministic
    } else {
        CertificateMode::BlsConditional
    };
    CertificateCheck::Valid(mode)
}

/// Where the search for the next `q` stands. `Q` has no prime factor below
/// `searched`.
struct Search {
    searched: u64,
}

impl Search {
    /// Next prime `q | Q` below `limit`, or a proof that `Q` is prime, or
    /// nothing. Returns `(q, q_known_prime)`.
    fn next(&mut self, q_rest: &Natural, bound: &Natural, config: &LucasConfig, rng: &mut TracedRng) -> (Natural, bool) {
        if is_probable_prime(q_rest) {
            return (q_rest.clone(), true);
        }
        let reach = q_rest.sqrt() + 1u32;
        let limit = bound.min(&reach).min(&Natural::from(config.trial_wall)).to_u64().expect("wall fits");
        let mut found = None;
        if limit > self.searched {
            let mut last = self.searched;
            for_each_prime(self.searched, limit, |p| {
                last = p;
                if crate::numeric::mod_small(q_rest, p as u32) == 0 {
                    found = Some(p);
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            });
            self.searched = match found {
                Some(p) => p,
                None => limit.max(last + 1),
            };
        }
        if let Some(p) = found {
            return (Natural::from(p), true);
        }
        if Natural::from(self.searched) * Natural::from(self.searched) > *q_rest {
            return (q_rest.clone(), true);
        }
        let wall_hit = Natural::from(config.trial_wall) < *bound.min(&reach);
        if wall_hit {
            if let Some(p) = rho_prime_factor(q_rest, config.rho_budget, rng) {
                return (p, true);
            }
        }
        (q_rest.clone(), false)
    }
}

fn rho_prime_factor(m: &Natural, budget: u64, rng: &mut TracedRng) -> Option<Natural> {
    let mut piece = m.clone();
    while !is_probable_prime(&piece) {
        if piece.is_even() || piece < Natural::from(9u8) {
            return None;
        }
        let d = rho_split(&piece, budget, rng).ok()??;
        let other = &piece / &d;
        piece = d.min(other);
    }
    Some(piece)
}

fn four_eps_target(eps: f64) -> f64 {
    (4.0 * eps).min(0.5)
}

/// Algorithm 4. Draws bases `α` and walks the primes `q | n − 1` from small
/// to large, accumulating the factored part `k` until the cofactor drops
/// below `n^(2/3)` and `k³ > n`.
pub fn lucas_test(n: &Natural, eps: f64, rng: &mut TracedRng, config: &LucasConfig) -> Result<LucasOutcome> {
    if n < &Natural::from(3u8) || n.is_even() {
        return Err(Error::InvalidInput(format!("n must be odd and >= 3, got {n}")));
    }
    if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    let epsilon = BigRational::from_float(eps).expect("finite");
    let n_minus_1 = n - 1u32;
    let (s, _) = two_adic(n);
    let two = Natural::from(2u8);
    let draw_hi = if n > &Natural::from(4u8) { n - 2u32 } else { two.clone() };

    let mut p_acc = BigRational::one();
    let mut a = Natural::one();
    let mut q_rest = n_minus_1.clone();
    let mut k = Natural::one();
    let mut prime_powers: Vec<FactorPair> = Vec::new();
    let mut q = two.clone();
    let mut q_prime = true;
    let mut composite_q: Option<Natural> = None;
    let mut bound = Natural::from(3u8);
    let mut search = Search { searched: 3 };
    let mut drawn = 0u64;

    let outcome = |verdict: Verdict, drawn: u64, rng: &TracedRng| {
        let heuristic_bound = matches!(verdict, Verdict::ProbablyPrime(_) | Verdict::ProbablyComposite(_));
        LucasOutcome {
            verdict,
            bases_drawn: drawn,
            heuristic_bound,
            seed_trace: rng.trace(),
        }
    };

    while !q_rest.is_one() && (exceeds_two_thirds(&q_rest, n) || k.pow(3) <= *n) {
        let alpha = random_between(rng, &two, &draw_hi);
        drawn += 1;
        let g = alpha.gcd(n);
        if !g.is_one() {
            return Ok(outcome(Verdict::Composite(Evidence::Factor(g)), drawn, rng));
        }
        // Powers along the tree: y = α^((n−1)/q^e), z = α^((n−1)/q), α^(n−1).
        let mut e = 0u32;
        let mut probe = q_rest.clone();
        while (&probe % &q).is_zero() {
            probe /= &q;
            e += 1;
        }
        let q_e = num_traits::pow(q.clone(), e as usize);
        let y = alpha.modpow(&(&n_minus_1 / &q_e), n);
        let z = y.modpow(&(&q_e / &q), n);
        let g = if z.is_zero() { n.clone() } else { (&z - 1u32).gcd(n) };
        if !g.is_one() && &g != n {
            return Ok(outcome(Verdict::Composite(Evidence::Factor(g)), drawn, rng));
        }
        if !z.modpow(&q, n).is_one() {
            return Ok(outcome(Verdict::Composite(Evidence::FermatWitness(alpha)), drawn, rng));
        }
        if q == two && !strong_from_odd_power(n, y.clone(), s) {
            return Ok(outcome(Verdict::Composite(Evidence::StrongWitness(alpha)), drawn, rng));
        }
        if z.is_one() {
            p_acc /= BigRational::from_integer(BigInt::from_biguint(Sign::Plus, q.clone()));
            if p_acc <= epsilon {
                return Ok(outcome(Verdict::ProbablyComposite(p_acc), drawn, rng));
            }
            continue;
        }
        q_rest = probe;
        a = (a * y) % n;
        k *= &q_e;
        if !q_prime {
            composite_q = Some(q.clone());
        }
        prime_powers.push(FactorPair::new(q.clone(), e));
        if q_rest.is_one() {
            break;
        }
        bound = solve_failure_bound(&q_rest, four_eps_target(eps))?;
        let (next, known) = search.next(&q_rest, &bound, config, rng);
        q = next;
        q_prime = known;
    }

    let searched = Natural::from(search.searched.max(3));
    if let Some(cq) = composite_q {
        let err = failure_f(&searched, &cq)?;
        return Ok(outcome(Verdict::ProbablyPrime(err), drawn, rng));
    }
    let mut cert = PrimalityCertificate {
        n: n.clone(),
        a,
        prime_powers,
        cofactor: q_rest.clone(),
        mode: CertificateMode::Complete,
        generator: GENERATOR.to_string(),
    };
    match verify_certificate(&cert, config.strict) {
        CertificateCheck::Valid(mode) => {
            cert.mode = mode;
            Ok(outcome(Verdict::Prime(cert), drawn, rng))
        }
        CertificateCheck::Invalid(_) => {
            let verdict = match bls_factor(n, &k) {
                Some(f) => Verdict::Composite(Evidence::Factor(f)),
                None => Verdict::ProbablyPrime(failure_f(&searched.max(bound), &q_rest)?),
            };
            Ok(outcome(verdict, drawn, rng))
        }
    }
}

/// Result of [`generate_dh_params`].
#[derive(Debug, Clone)]
pub struct DhParams {
    pub p: Natural,
    pub root: RootCandidate,
    /// Miller–Rabin rounds used to accept `p`.
    pub rounds: u32,
    /// `4^(−rounds)`.
    pub prime_error: f64,
    /// Candidates examined before `p` was accepted.
    pub candidates: u64,
    pub seed_trace: SeedTrace,
}

/// Bits accepted by [`generate_dh_params`].
pub const DH_BITS: std::ops::RangeInclusive<u32> = 16..=4096;

/// `⌈log₄(1/ε)⌉`, at least 1.
pub fn rounds_for(eps: f64) -> u32 {
    ((1.0 / eps).log(4.0).ceil() as u32).max(1)
}

/// A `bits`-bit probable prime `p` found by trial and error, then a root from
/// [`crate::primroot::heuristic2`].
pub fn generate_dh_params(bits: u32, eps: f64, rho_budget: Option<u64>, rng: &mut TracedRng) -> Result<DhParams> {
    if !DH_BITS.contains(&bits) {
        return Err(Error::InvalidInput(format!(
            "bits must lie in [{}, {}], got {bits}",
            DH_BITS.start(),
            DH_BITS.end()
        )));
    }
    if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    let rounds = rounds_for(eps);
    let budget = 1000 * bits as u64;
    let lo = Natural::one() << (bits - 1);
    let hi = (Natural::one() << bits) - 1u32;
    let two = Natural::from(2u8);
    for candidates in 1..=budget {
        let c = random_between(rng, &lo, &hi) | Natural::one();
        if crate::factor::primes_below(200)
            .iter()
            .any(|&d| crate::numeric::mod_small(&c, d) == 0 && c != Natural::from(d))
        {
            continue;
        }
        let top = &c - 2u32;
        let bases: Vec<Natural> = (0..rounds).map(|_| random_between(rng, &two, &top)).collect();
        if miller_rabin(&c, &bases)? != MillerRabin::ProbablePrime {
            continue;
        }
        match heuristic2_with_budget(&c, rho_budget, rng) {
            Ok(root) => {
                return Ok(DhParams {
                    p: c,
                    root,
                    rounds,
                    prime_error: 4f64.powi(-(rounds as i32)),
                    candidates,
                    seed_trace: rng.trace(),
                })
            }
            Err(Error::NotPrime(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::BudgetExhausted(budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(x: u64) -> Natural {
        Natural::from(x)
    }

    fn cert13(a: u64, powers: &[(u64, u32)]) -> PrimalityCertificate {
        PrimalityCertificate {
            n: nat(13),
            a: nat(a),
            prime_powers: powers.iter().map(|&(q, e)| FactorPair::new(nat(q), e)).collect(),
            cofactor: nat(1),
            mode: CertificateMode::Complete,
            generator: GENERATOR.into(),
        }
    }

    fn run(n: u64, seed: u64) -> LucasOutcome {
        lucas_test(&nat(n), 1e-6, &mut TracedRng::seed_from_u64(seed), &LucasConfig::default()).unwrap()
    }

    #[test]
    fn strong_test_examples() {
        assert!(strong_probable_prime(&nat(13), &nat(2)).unwrap());
        assert!(!strong_probable_prime(&nat(15), &nat(2)).unwrap());
        assert!(strong_probable_prime(&nat(2047), &nat(2)).unwrap());
        assert!(strong_probable_prime(&nat(14), &nat(2)).is_err());
    }

    #[test]
    fn certificate_examples() {
        let good = cert13(2, &[(2, 2), (3, 1)]);
        assert_eq!(verify_certificate(&good, false), CertificateCheck::Valid(CertificateMode::Complete));
        assert_eq!(
            verify_certificate(&cert13(3, &[(2, 2), (3, 1)]), false),
            CertificateCheck::Invalid(InvalidReason::GcdFails(nat(2)))
        );
        assert_eq!(
            verify_certificate(&cert13(2, &[(2, 2), (5, 1)]), false),
            CertificateCheck::Invalid(InvalidReason::ProductMismatch)
        );
        assert_eq!(
            verify_certificate(&cert13(2, &[(4, 1), (3, 1)]), false),
            CertificateCheck::Invalid(InvalidReason::NotPrime(nat(4)))
        );
    }

    #[test]
    fn certificate_round_trip() {
        let cert = cert13(2, &[(2, 2), (3, 1)]);
        let text = cert.to_string();
        assert_eq!(
            text,
            "primroot-certificate v1\nn = 13\na = 2\nprime_power = 2 2\nprime_power = 3 1\nQ = 1\nmode = complete\ngenerator = primroot 0.1.0\n"
        );
        let back: PrimalityCertificate = text.parse().unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_string(), text);
        assert!("nonsense".parse::<PrimalityCertificate>().is_err());
    }

    #[test]
    fn lucas_examples() {
        match run(13, 0).verdict {
            Verdict::Prime(c) => {
                // The loop stops once Q = 3 ≤ 13^(2/3); k = 4 already has k² > 13.
                assert_eq!(c.k_value() * &c.cofactor, nat(12));
                assert_eq!(c.prime_powers, vec![FactorPair::new(nat(2), 2)]);
                assert_eq!(c.mode, CertificateMode::Pocklington);
            }
            v => panic!("{v:?}"),
        }
        for seed in 0..50 {
            assert!(matches!(run(221, seed).verdict, Verdict::Composite(_)));
            let v = run(1729, seed).verdict;
            assert!(matches!(v, Verdict::Composite(_) | Verdict::ProbablyComposite(_)), "{v:?}");
        }
        assert!(matches!(run(3, 0).verdict, Verdict::Prime(_)));
        assert!(matches!(run(5, 0).verdict, Verdict::Prime(_)));
        assert!(lucas_test(&nat(12), 1e-6, &mut TracedRng::seed_from_u64(0), &LucasConfig::default()).is_err());
        assert!(lucas_test(&nat(13), 0.0, &mut TracedRng::seed_from_u64(0), &LucasConfig::default()).is_err());
    }

    #[test]
    fn exhaustive_small_range() {
        for n in (3u64..3000).step_by(2) {
            let prime = is_probable_prime(&nat(n));
            for seed in 0..5 {
                let out = run(n, seed);
                match &out.verdict {
                    Verdict::Prime(c) => {
                        assert!(prime, "{n} declared prime");
                        assert!(matches!(verify_certificate(c, true), CertificateCheck::Valid(_)));
                    }
                    Verdict::Composite(Evidence::Factor(f)) => {
                        assert!(!prime);
                        assert!(f > &nat(1) && f < &nat(n) && (nat(n) % f).is_zero());
                    }
                    Verdict::Composite(_) => assert!(!prime),
                    v => assert!(!prime, "{n}: {v:?}"),
                }
            }
        }
    }

    #[test]
    fn large_prime_certified() {
        let p = (Natural::one() << 127u32) - 1u32;
        let out = lucas_test(&p, 1e-6, &mut TracedRng::seed_from_u64(1), &LucasConfig::default()).unwrap();
        match out.verdict {
            Verdict::Prime(c) => assert!(matches!(verify_certificate(&c, true), CertificateCheck::Valid(_))),
            Verdict::ProbablyPrime(b) => assert!(b.failure() < 1.0),
            v => panic!("{v:?}"),
        }
        let c = &p * nat(1_000_003);
        let out = lucas_test(&c, 1e-6, &mut TracedRng::seed_from_u64(1), &LucasConfig::default()).unwrap();
        assert!(matches!(out.verdict, Verdict::Composite(_) | Verdict::ProbablyComposite(_)));
    }

    #[test]
    fn p_accumulator_is_exact() {
        let mut p = BigRational::one();
        for q in [2u32, 3, 2, 7] {
            p /= BigRational::from_integer(BigInt::from(q));
        }
        assert_eq!(p, BigRational::new(BigInt::from(1), BigInt::from(84)));
    }

    #[test]
    fn bls_square_detects_composites() {
        // 7·13 = 91, k = 6 divides 90 and both factors are 1 mod 6.
        let f = bls_factor(&nat(91), &nat(6)).unwrap();
        assert!(f == nat(7) || f == nat(13));
        // 13·19 = 247, k = 6.
        assert!(bls_factor(&nat(247), &nat(6)).is_some());
    }

    #[test]
    fn dh_params() {
        let mut rng = TracedRng::seed_from_u64(5);
        let dh = generate_dh_params(16, 1e-6, None, &mut rng).unwrap();
        assert_eq!(dh.p.bits(), 16);
        assert!(dh.root.complete);
        let p = dh.p.to_u64().unwrap();
        let g = dh.root.g.value().to_u64().unwrap();
        assert_eq!(crate::primroot::multiplicative_order(p, g).unwrap(), p - 1);
        assert_eq!(dh.rounds, 10);

        let a = generate_dh_params(64, 1e-6, None, &mut TracedRng::seed_from_u64(5)).unwrap();
        let b = generate_dh_params(64, 1e-6, None, &mut TracedRng::seed_from_u64(5)).unwrap();
        assert_eq!((a.p, a.root.g), (b.p, b.root.g));
        assert!(generate_dh_params(8, 1e-6, None, &mut rng).is_err());
    }
}
