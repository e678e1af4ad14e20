//! Primitive-root generation modulo a prime.
//!
//! [`algorithm1`] draws a candidate whose success probability is bounded
//! below from a partial factorization of `p − 1`. [`heuristic2`] and
//! [`algorithm3`] fix the factoring bound from the size of `p`.
//! [`deterministic_root`] and [`is_primitive_root`] cover the fully
//! factored case.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::bounds::{
    log_power_bound, solve_bound, success_lower_bound, LogBase, ProbabilityBound, BoundKind,
    ALPHA_2_POW_40, SMALL_PRIME_THRESHOLD,
};
use crate::factor::{
    is_probable_prime, partial_factor, partial_factor_with_wall, FactorPair,
    PartialFactorization, Strategy, DEFAULT_TRIAL_WALL,
};
use crate::numeric::{ceil_log2, log2_f64, random_between};
use crate::{Error, Natural, Residue, Result, SeedTrace, TracedRng};

/// Rho budget ceiling used by the size-driven variants.
pub const MAX_RHO_BUDGET: u64 = 1 << 20;
/// Failure target of [`algorithm3`].
pub const ALGORITHM3_FAILURE_LOG2: i32 = -40;

/// A generated element together with what is known about it.
#[derive(Debug, Clone)]
pub struct RootCandidate {
    pub p: Natural,
    pub g: Residue,
    /// Certified lower bound on the probability that `g` is a primitive root.
    pub success_bound: ProbabilityBound,
    /// Bound computed from the rho reach `L²`; never certified.
    pub advisory_bound: Option<ProbabilityBound>,
    /// `order(g) ≥ order_lower_bound` holds unconditionally.
    pub order_lower_bound: Natural,
    /// Certified factoring bound actually achieved.
    pub bound_used: Natural,
    pub q_remaining: Natural,
    pub complete: bool,
    pub factorization: PartialFactorization,
    pub seed_trace: SeedTrace,
}

fn draw_cap(p: &Natural) -> u64 {
    128 * ceil_log2(p).max(1)
}

fn draw(p: &Natural, rng: &mut TracedRng) -> Natural {
    let two = Natural::from(2u8);
    let hi = if p > &Natural::from(4u8) { p - 2u32 } else { two.clone() };
    random_between(rng, &two, &hi)
}

/// `α^((p−1)/q^e) mod p` if `α^((p−1)/q) ≢ 1`, otherwise `None` (the draw
/// is rejected).
pub fn prime_power_component(p: &Natural, alpha: &Natural, pair: &FactorPair) -> Option<Natural> {
    let p_minus_1 = p - 1u32;
    let y = alpha.modpow(&(&p_minus_1 / pair.value()), p);
    // y^(q^(e−1)) = α^((p−1)/q).
    let top = y.modpow(&num_traits::pow(pair.prime.clone(), pair.exponent as usize - 1), p);
    if top.is_one() {
        None
    } else {
        Some(y)
    }
}

/// `b^((p−1)/Q) mod p` if it is not 1, otherwise `None`.
pub fn cofactor_component(p: &Natural, b: &Natural, q: &Natural) -> Option<Natural> {
    let y = b.modpow(&((p - 1u32) / q), p);
    if y.is_one() {
        None
    } else {
        Some(y)
    }
}

fn check_prime_input(p: &Natural) -> Result<()> {
    if p < &Natural::from(3u8) || p.is_even() {
        return Err(Error::InvalidInput(format!("p must be an odd prime >= 3, got {p}")));
    }
    if !is_probable_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    Ok(())
}

/// Algorithm 1 with the bound already solved, so repeated runs on the same
/// `p` skip the solver.
#[derive(Debug, Clone)]
pub struct Algorithm1 {
    pub p: Natural,
    pub epsilon: f64,
    pub bound: Natural,
}

impl Algorithm1 {
    pub fn prepare(p: &Natural, epsilon: f64) -> Result<Self> {
        check_prime_input(p)?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(epsilon));
        }
        Ok(Algorithm1 {
            p: p.clone(),
            epsilon,
            bound: solve_bound(p, epsilon)?,
        })
    }

    /// Uses `bound` instead of the solved one.
    pub fn with_bound(p: &Natural, bound: Natural) -> Result<Self> {
        check_prime_input(p)?;
        if bound < Natural::from(3u8) {
            return Err(Error::InvalidInput(format!("bound must be at least 3, got {bound}")));
        }
        Ok(Algorithm1 {
            p: p.clone(),
            epsilon: f64::NAN,
            bound,
        })
    }

    pub fn run(&self, strategy: Strategy, rng: &mut TracedRng) -> Result<RootCandidate> {
        let pf = partial_factor(&(&self.p - 1u32), &self.bound, strategy, rng)?;
        finish(&self.p, pf, rng)
    }
}

/// Algorithm 1: solve for `B`, partially factor `p − 1` below it and build
/// the candidate.
pub fn algorithm1(p: &Natural, epsilon: f64, strategy: Strategy, rng: &mut TracedRng) -> Result<RootCandidate> {
    Algorithm1::prepare(p, epsilon)?.run(strategy, rng)
}

/// Algorithm 1 from a caller-supplied factorization of `p − 1`, which may be
/// deliberately truncated.
pub fn algorithm1_with_factorization(
    p: &Natural,
    factorization: PartialFactorization,
    rng: &mut TracedRng,
) -> Result<RootCandidate> {
    check_prime_input(p)?;
    if factorization.n != p - 1u32 {
        return Err(Error::InvalidInput(format!(
            "factorization is of {}, expected p - 1 = {}",
            factorization.n,
            p - 1u32
        )));
    }
    finish(p, factorization, rng)
}

fn finish(p: &Natural, pf: PartialFactorization, rng: &mut TracedRng) -> Result<RootCandidate> {
    let cap = draw_cap(p);
    let cap_error = || Error::DrawCapExceeded {
        modulus: p.clone(),
        draws: cap,
    };
    let mut a = Natural::one();
    for pair in &pf.factors {
        let component = (0..cap)
            .find_map(|_| prime_power_component(p, &draw(p, rng), pair))
            .ok_or_else(cap_error)?;
        a = (a * component) % p;
    }
    let p_minus_1 = p - 1u32;
    let (g, success_bound, advisory_bound, order_lower_bound) = if pf.is_complete() {
        (
            a,
            ProbabilityBound::certain(BoundKind::SuccessLower),
            None,
            p_minus_1.clone(),
        )
    } else {
        let q = &pf.cofactor;
        let success = success_lower_bound(&pf.bound, q)?;
        let advisory = match &pf.effective_bound {
            Some(e) if e > &pf.bound => Some(success_lower_bound(e, q)?),
            _ => None,
        };
        let component = (0..cap)
            .find_map(|_| cofactor_component(p, &draw(p, rng), q))
            .ok_or_else(cap_error)?;
        let order = (&p_minus_1 / q) * &pf.bound;
        ((a * component) % p, success, advisory, order)
    };
    Ok(RootCandidate {
        p: p.clone(),
        g: Residue::new(g, p.clone())?,
        success_bound,
        advisory_bound,
        order_lower_bound: order_lower_bound.min(p_minus_1),
        bound_used: pf.bound.clone(),
        q_remaining: pf.cofactor.clone(),
        complete: pf.is_complete(),
        factorization: pf,
        seed_trace: rng.trace(),
    })
}

/// `⌈(log₂p)²·(log₂log₂p)²⌉`.
pub fn heuristic2_bound(p: &Natural) -> Natural {
    let l = log2_f64(p);
    let ll = l.log2().max(0.0);
    Natural::from(((l * l * ll * ll).ceil() as u64).max(3))
}

/// Default rho budget for a bound: `min(2²⁰, 2⌈√B⌉)`.
pub fn default_rho_budget(bound: &Natural) -> u64 {
    let root = bound.sqrt().to_u64().unwrap_or(u64::MAX);
    let root = if Natural::from(root) * Natural::from(root) < *bound { root + 1 } else { root };
    root.saturating_mul(2).min(MAX_RHO_BUDGET)
}

/// Algorithm 1 with `B = ⌈(log₂p)²(log₂log₂p)²⌉` and rho.
pub fn heuristic2(p: &Natural, rng: &mut TracedRng) -> Result<RootCandidate> {
    heuristic2_with_budget(p, None, rng)
}

/// [`heuristic2`] with an explicit rho budget.
pub fn heuristic2_with_budget(p: &Natural, budget: Option<u64>, rng: &mut TracedRng) -> Result<RootCandidate> {
    check_prime_input(p)?;
    let bound = heuristic2_bound(p);
    let budget = budget.unwrap_or_else(|| default_rho_budget(&bound));
    Algorithm1::with_bound(p, bound)?.run(Strategy::RhoHeuristic { budget }, rng)
}

/// The factoring target of [`algorithm3`] for `p` above the small-prime
/// threshold: the larger of `⌈(log₂p)^5.298514⌉` and the solved bound for
/// `2⁻⁴⁰`.
pub fn algorithm3_target(p: &Natural) -> Result<Natural> {
    let sized = log_power_bound(p, ALPHA_2_POW_40, LogBase::Two);
    let solved = solve_bound(p, 2f64.powi(ALGORITHM3_FAILURE_LOG2))?;
    Ok(sized.max(solved))
}

/// Complete factorization of `p − 1` below the threshold; above it, trial
/// division towards [`algorithm3_target`] (as far as the cost wall allows)
/// followed by rho on the cofactor.
pub fn algorithm3(p: &Natural, rng: &mut TracedRng) -> Result<RootCandidate> {
    algorithm3_with(p, DEFAULT_TRIAL_WALL, MAX_RHO_BUDGET, rng)
}

/// [`algorithm3`] with an explicit trial-division wall and rho budget.
pub fn algorithm3_with(p: &Natural, wall: u64, rho_budget: u64, rng: &mut TracedRng) -> Result<RootCandidate> {
    check_prime_input(p)?;
    let n = p - 1u32;
    if p < &Natural::from(SMALL_PRIME_THRESHOLD) {
        let bound = (&n >> 1u32) + 1u32;
        let pf = partial_factor(&n, &bound, Strategy::TrialProven, rng)?;
        return finish(p, pf, rng);
    }
    let target = algorithm3_target(p)?;
    let reach = n.sqrt() + 1u32;
    let bound = if target.clone().min(reach) <= Natural::from(wall) {
        target
    } else {
        Natural::from(wall)
    };
    let pf = partial_factor_with_wall(&n, &bound, Strategy::TrialProven, wall, rng)?
        .extend_with_rho(rho_budget, rng);
    finish(p, pf, rng)
}

fn check_complete(p: &Natural, pf: &PartialFactorization) -> Result<()> {
    if pf.n != p - 1u32 {
        return Err(Error::InvalidInput(format!(
            "factorization is of {}, expected {}",
            pf.n,
            p - 1u32
        )));
    }
    if !pf.is_complete() {
        return Err(Error::IncompleteFactorization(pf.n.clone()));
    }
    Ok(())
}

/// Lucas criterion: `g^(p−1) ≡ 1` and `g^((p−1)/q) ≢ 1` for every prime
/// `q | p − 1`.
pub fn is_primitive_root(p: &Natural, g: &Natural, pf: &PartialFactorization) -> Result<bool> {
    check_complete(p, pf)?;
    if g.is_zero() || g >= p {
        return Err(Error::InvalidInput(format!("g must lie in [1, p), got {g}")));
    }
    let n = p - 1u32;
    if !g.modpow(&n, p).is_one() {
        return Ok(false);
    }
    Ok(pf.primes().all(|q| !g.modpow(&(&n / q), p).is_one()))
}

/// Smallest primitive root, given the full factorization of `p − 1`.
pub fn deterministic_root(p: &Natural, pf: &PartialFactorization) -> Result<Residue> {
    check_complete(p, pf)?;
    if p < &Natural::from(3u8) {
        return Residue::new(Natural::one(), p.clone());
    }
    let mut g = Natural::from(2u8);
    while &g < p {
        if is_primitive_root(p, &g, pf)? {
            return Residue::new(g, p.clone());
        }
        g += 1u32;
    }
    Err(Error::NotPrime(p.clone()))
}

/// Cost wall of [`multiplicative_order`].
pub const ORDER_ORACLE_LIMIT: u64 = 1 << 24;

/// Least `t ≥ 1` with `g^t ≡ 1 (mod n)`, by stepping through the powers.
pub fn multiplicative_order(n: u64, g: u64) -> Result<u64> {
    if !(2..=ORDER_ORACLE_LIMIT).contains(&n) {
        return Err(Error::InvalidInput(format!("modulus {n} outside [2, 2^24]")));
    }
    let g = g % n;
    if g.gcd(&n) != 1 {
        return Err(Error::InvalidInput(format!("{g} is not invertible modulo {n}")));
    }
    let mut x = g;
    let mut t = 1;
    while x != 1 % n {
        x = x * g % n;
        t += 1;
    }
    Ok(t)
}
