//! Probability bounds for primitive-root generation.
//!
//! Every bound here has the shape
//!
//! ```text
//! success = (1 + 1/m) · (1 − 1/B)^(ln X / ln B)
//! ```
//!
//! with `(m, X) = (Q − 1, Q)` for the refined bound on a cofactor `Q` whose
//! prime factors all exceed `B`, and `(m, X) = (h, h)` with `h = (p − 1)/2`
//! for the a-priori bound used to pick `B`. Values are carried as the failure
//! complement at 160 bits of precision so that failures like `2⁻⁶⁰` keep their
//! full relative accuracy. Stored failures are nudged upward by a relative
//! `2⁻¹²⁰` so a bound never overstates success.

use std::fmt;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::UBig;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::numeric::{ln_f64, log2_f64};
use crate::{Error, Natural, Result};

type Hp = FBig<HalfEven>;

const PRECISION: usize = 160;
const NUDGE_BITS: isize = 120;

/// Refined ω bounds, valid once `B` reaches the given size. Each entry is
/// `(log2 of the minimum B, constant)`.
pub const OMEGA_REFINEMENTS: [(u32, f64); 3] = [(10, 1.0956448), (15, 1.0808280), (20, 1.0561364)];

/// Threshold below which `p − 1` is factored completely in the `2⁻⁴⁰` variant.
pub const SMALL_PRIME_THRESHOLD: u64 = 45_171_967;
/// Exponent `α` in `B = log^α p` for the `2⁻⁴⁰` variant.
pub const ALPHA_2_POW_40: f64 = 5.298514;
/// Exponent `α` quoted for `2⁻⁵⁵` with all `p < 2⁵¹²` factored.
pub const ALPHA_2_POW_55: f64 = 5.229921;

fn hp_from_natural(n: &Natural) -> Hp {
    Hp::from(UBig::from_le_bytes(&n.to_bytes_le()))
        .with_precision(PRECISION)
        .value()
}

fn hp_from_f64(x: f64) -> Hp {
    Hp::try_from(x)
        .expect("finite float")
        .with_precision(PRECISION)
        .value()
}

fn hp_one() -> Hp {
    Hp::ONE.with_precision(PRECISION).value()
}

fn hp_to_f64(x: &Hp) -> f64 {
    x.to_f64().value()
}

/// Which side of the probability a bound speaks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    SuccessLower,
    FailureUpper,
}

/// A probability in `[0, 1]`, stored through its failure complement.
#[derive(Clone)]
pub struct ProbabilityBound {
    kind: BoundKind,
    failure: Hp,
}

impl ProbabilityBound {
    fn from_failure(kind: BoundKind, failure: Hp) -> Self {
        let failure = if failure <= Hp::ZERO {
            Hp::ZERO
        } else if failure >= Hp::ONE {
            hp_one()
        } else {
            let nudge = failure.clone() * hp_from_f64(2f64.powi(-(NUDGE_BITS as i32)));
            let up = failure + nudge;
            if up > Hp::ONE {
                hp_one()
            } else {
                up
            }
        };
        ProbabilityBound { kind, failure }
    }

    /// Probability-one success (or zero failure).
    pub fn certain(kind: BoundKind) -> Self {
        ProbabilityBound {
            kind,
            failure: Hp::ZERO,
        }
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    /// The bound in its own sense: the success probability for
    /// [`BoundKind::SuccessLower`], the failure probability otherwise.
    pub fn value(&self) -> f64 {
        match self.kind {
            BoundKind::SuccessLower => self.success(),
            BoundKind::FailureUpper => self.failure(),
        }
    }

    pub fn failure(&self) -> f64 {
        hp_to_f64(&self.failure)
    }

    pub fn success(&self) -> f64 {
        hp_to_f64(&self.success_hp())
    }

    pub fn failure_hp(&self) -> Hp {
        self.failure.clone()
    }

    pub fn success_hp(&self) -> Hp {
        hp_one() - self.failure.clone()
    }

    /// `log2(failure)`, `-inf` for a certain outcome.
    pub fn failure_log2(&self) -> f64 {
        let f = self.failure();
        if f == 0.0 {
            f64::NEG_INFINITY
        } else {
            f.log2()
        }
    }

    pub fn is_certain(&self) -> bool {
        self.failure == Hp::ZERO
    }

    /// Same probability, seen from the other side.
    pub fn complement(&self) -> Self {
        let kind = match self.kind {
            BoundKind::SuccessLower => BoundKind::FailureUpper,
            BoundKind::FailureUpper => BoundKind::SuccessLower,
        };
        ProbabilityBound {
            kind,
            failure: self.failure.clone(),
        }
    }

    /// `failure ≤ target`, compared exactly at working precision.
    pub fn failure_at_most(&self, target: f64) -> bool {
        self.failure <= hp_from_f64(target)
    }
}

impl fmt::Debug for ProbabilityBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProbabilityBound")
            .field("kind", &self.kind)
            .field("success", &self.success())
            .field("failure", &self.failure())
            .finish()
    }
}

impl PartialEq for ProbabilityBound {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.failure == other.failure
    }
}

impl fmt::Display for ProbabilityBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BoundKind::SuccessLower => {
                write!(f, "success >= 1 - {:e} (2^{:.2})", self.failure(), self.failure_log2())
            }
            BoundKind::FailureUpper => {
                write!(f, "failure <= {:e} (2^{:.2})", self.failure(), self.failure_log2())
            }
        }
    }
}

/// `1 − (1 + 1/m)(1 − 1/B)^(ln_x / ln B)` at working precision.
fn failure_hp(m: &Hp, ln_x: &Hp, b: &Hp) -> Hp {
    let one = hp_one();
    let first = (one.clone() / m.clone()).ln_1p();
    let per_factor = (-(one / b.clone())).ln_1p();
    let exponent = first + ln_x.clone() / b.ln() * per_factor;
    -exponent.exp_m1()
}

/// Same quantity in `f64`, with an absolute error estimate for the result.
fn failure_f64(ln_m: f64, ln_x: f64, b: f64) -> (f64, f64) {
    let first = (-ln_m).exp().ln_1p();
    let second = ln_x / b.ln() * (-1.0 / b).ln_1p();
    let exponent = first + second;
    let failure = -exponent.exp_m1();
    let err = 1e-13 * (first.abs() + second.abs()) + 1e-13 * failure.abs();
    (failure, err)
}

/// Shape parameters of one bound family, cached in both precisions.
struct BoundShape {
    m: Hp,
    ln_x: Hp,
    ln_m_f64: f64,
    ln_x_f64: f64,
}

impl BoundShape {
    fn new(m: &Natural, x: &Natural) -> Self {
        let ln_x = if x.is_one() { Hp::ZERO } else { hp_from_natural(x).ln() };
        BoundShape {
            m: hp_from_natural(m),
            ln_x,
            ln_m_f64: ln_f64(m),
            ln_x_f64: if x.is_one() { 0.0 } else { ln_f64(x) },
        }
    }

    fn failure(&self, b: &Natural) -> Hp {
        failure_hp(&self.m, &self.ln_x, &hp_from_natural(b))
    }

    /// `failure(B) ≤ target`, using `f64` unless the answer is within
    /// rounding distance of the threshold.
    fn failure_at_most(&self, b: &Natural, target: f64) -> bool {
        if let Some(bf) = b.to_f64().filter(|x| x.is_finite()) {
            let (f, err) = failure_f64(self.ln_m_f64, self.ln_x_f64, bf);
            if f + err < target {
                return true;
            }
            if f - err > target {
                return false;
            }
        }
        self.failure(b) <= hp_from_f64(target)
    }
}

fn check_b(b: &Natural) -> Result<()> {
    if b < &Natural::from(3u8) {
        return Err(Error::InvalidInput(format!("bound B must be at least 3, got {b}")));
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(eps))
    }
}

/// Lower bound on the fraction of outputs that are primitive roots when the
/// unfactored cofactor `Q` has no prime factor below `B`:
/// `(1 + 1/(Q−1))(1 − 1/B)^(log_B Q)`, exactly 1 for `Q = 1`.
///
/// The caller vouches that `Q`'s prime factors are all at least `B`.
pub fn success_lower_bound(b: &Natural, q: &Natural) -> Result<ProbabilityBound> {
    Ok(failure_f(b, q)?.complement())
}

/// `F(B, Q) = 1 − success_lower_bound(B, Q)`.
pub fn failure_f(b: &Natural, q: &Natural) -> Result<ProbabilityBound> {
    check_b(b)?;
    if q.is_zero() {
        return Err(Error::InvalidInput("cofactor Q must be positive".into()));
    }
    if q.is_one() {
        return Ok(ProbabilityBound::certain(BoundKind::FailureUpper));
    }
    let shape = BoundShape::new(&(q - 1u32), q);
    Ok(ProbabilityBound::from_failure(BoundKind::FailureUpper, shape.failure(b)))
}

/// The a-priori bound `(1 + 2/(p−1))(1 − 1/B)^(log_B((p−1)/2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialBound {
    pub bound: ProbabilityBound,
    /// The formula exceeded 1 and was reported as 1.
    pub oversatisfied: bool,
}

pub fn initial_success_bound(p: &Natural, b: &Natural) -> Result<InitialBound> {
    check_odd_prime_candidate(p, 3)?;
    check_b(b)?;
    let h: Natural = (p - 1u32) >> 1;
    let shape = BoundShape::new(&h, &h);
    let failure = shape.failure(b);
    let oversatisfied = failure < Hp::ZERO;
    Ok(InitialBound {
        bound: ProbabilityBound::from_failure(BoundKind::SuccessLower, failure),
        oversatisfied,
    })
}

fn check_odd_prime_candidate(p: &Natural, min: u32) -> Result<()> {
    if p < &Natural::from(min) || p.is_even() {
        return Err(Error::InvalidInput(format!("expected an odd number >= {min}, got {p}")));
    }
    Ok(())
}

/// Smallest `B ≥ lo` satisfying a predicate that is monotone in `B`, or
/// `hi` when even `hi` fails. `guess` seeds the bracket.
fn smallest_satisfying(
    lo: Natural,
    hi: Natural,
    guess: Option<Natural>,
    pred: impl Fn(&Natural) -> bool,
) -> Natural {
    if pred(&lo) {
        return lo;
    }
    if !pred(&hi) {
        return hi;
    }
    // Invariant: !pred(lo) && pred(hi).
    let (mut lo, mut hi) = (lo, hi);
    if let Some(g) = guess.filter(|g| *g > lo && *g < hi) {
        // A good estimate lands within a small relative distance of the
        // answer; tighten the bracket around it before bisecting.
        let step = (&g >> 20u32) + 1u32;
        let below = if g > &lo + &step { &g - &step } else { lo.clone() };
        let above = &g + &step;
        if pred(&g) {
            hi = g;
            if below > lo && !pred(&below) {
                lo = below;
            }
        } else {
            lo = g;
            if above < hi && pred(&above) {
                hi = above;
            }
        }
    }
    while &hi - &lo > Natural::one() {
        let mid: Natural = (&lo + &hi) >> 1;
        if pred(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Continuous Newton estimate of `B` solving `failure(B) = target` for the
/// shape `(ln m, ln x)`, in `f64`. Works on `y = ln B`.
fn newton_estimate(ln_m: f64, ln_x: f64, target: f64) -> Option<Natural> {
    // failure(B) = target  ⇔  g(y) = ln(1+1/m) + ln_x·ln(1−e^(−y))/y − ln(1−target) = 0
    let first = (-ln_m).exp().ln_1p();
    let rhs = (-target).ln_1p();
    let g = |y: f64| first + ln_x * (-(-y).exp()).ln_1p() / y - rhs;
    // Leading-order start: failure ≈ ln_x / (B ln B).
    let mut y = (ln_x / target).max(3.0).ln();
    for _ in 0..60 {
        let h = 1e-6 * y;
        let d = (g(y + h) - g(y - h)) / (2.0 * h);
        if !d.is_finite() || d == 0.0 {
            break;
        }
        let next = y - g(y) / d;
        if !next.is_finite() || next <= 0.0 {
            break;
        }
        if (next - y).abs() < 1e-14 * y {
            y = next;
            break;
        }
        y = next;
    }
    let b = y.exp();
    if b.is_finite() && b >= 3.0 {
        num_bigint::BigUint::try_from(b.round() as u128).ok().or_else(|| {
            num_traits::FromPrimitive::from_f64(b.round())
        })
    } else {
        None
    }
}

/// Smallest integer `B ≥ 3` with `initial_success_bound(p, B) ≥ 1 − ε`,
/// capped at `h + 1` with `h = (p − 1)/2`, where trial division already
/// completes the factorization.
///
/// The bound is non-decreasing in `B`, so the search brackets the answer by
/// a Newton estimate and finishes by integer bisection.
pub fn solve_bound(p: &Natural, eps: f64) -> Result<Natural> {
    check_odd_prime_candidate(p, 3)?;
    check_epsilon(eps)?;
    let three = Natural::from(3u8);
    let h: Natural = (p - 1u32) >> 1;
    if h <= three {
        return Ok(three);
    }
    let shape = BoundShape::new(&h, &h);
    let guess = newton_estimate(shape.ln_m_f64, shape.ln_x_f64, eps);
    Ok(smallest_satisfying(three, h + 1u32, guess, |b| {
        shape.failure_at_most(b, eps)
    }))
}

/// Smallest `B ≥ 3` with `F(B, Q) ≤ target`; `Q = 1` gives 3.
pub fn solve_failure_bound(q: &Natural, target: f64) -> Result<Natural> {
    check_epsilon(target)?;
    let three = Natural::from(3u8);
    if q <= &three {
        return Ok(three);
    }
    let shape = BoundShape::new(&(q - 1u32), q);
    let guess = newton_estimate(shape.ln_m_f64, shape.ln_x_f64, target);
    Ok(smallest_satisfying(three, q.clone(), guess, |b| {
        shape.failure_at_most(b, target)
    }))
}

/// Which estimate produced an ω bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaEstimate {
    /// `ω(Q) ≤ log_B Q`.
    LogB,
    /// `ω(Q) ≤ c / log_B(ln Q) · log_B Q` for `B ≥ 2^k`.
    Refined { min_log2_b: u32 },
}

/// Every applicable ω estimate for `(Q, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaBounds {
    pub log_b: f64,
    /// Refined values for each threshold `B` qualifies for.
    pub refined: Vec<(OmegaEstimate, f64)>,
}

impl OmegaBounds {
    pub fn best(&self) -> (OmegaEstimate, f64) {
        self.refined
            .iter()
            .copied()
            .fold((OmegaEstimate::LogB, self.log_b), |acc, cur| {
                if cur.1 < acc.1 {
                    cur
                } else {
                    acc
                }
            })
    }
}

pub fn omega_bounds(q: &Natural, b: &Natural) -> Result<OmegaBounds> {
    if q < &Natural::from(2u8) || b < &Natural::from(2u8) {
        return Err(Error::InvalidInput("omega bounds need Q >= 2 and B >= 2".into()));
    }
    let ln_q = ln_f64(q);
    let ln_b = ln_f64(b);
    let log_b = ln_q / ln_b;
    let log2_b = log2_f64(b);
    let mut refined = Vec::new();
    let ln_ln_q = ln_q.ln();
    if ln_ln_q > 0.0 {
        for (min_log2, c) in OMEGA_REFINEMENTS {
            if log2_b >= min_log2 as f64 {
                // c / log_B(ln Q) · log_B Q
                let value = c / (ln_ln_q / ln_b) * log_b;
                refined.push((OmegaEstimate::Refined { min_log2_b: min_log2 }, value));
            }
        }
    }
    Ok(OmegaBounds { log_b, refined })
}

/// Upper bound on the number of distinct prime factors of `Q` when none is
/// below `B`: the floor of the smallest applicable estimate.
pub fn omega_upper_bound(q: &Natural, b: &Natural) -> Result<u64> {
    let (_, value) = omega_bounds(q, b)?.best();
    // Nudge up so a value landing just under an integer by rounding still
    // floors to a valid upper bound.
    Ok((value * (1.0 + 1e-12) + 1e-12).floor() as u64)
}

/// Logarithm base used for `B = log^α p` style sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Two,
    Natural,
}

impl LogBase {
    pub fn log(self, n: &Natural) -> f64 {
        match self {
            LogBase::Two => log2_f64(n),
            LogBase::Natural => ln_f64(n),
        }
    }
}

/// `⌈(log p)^α⌉` in the given base.
pub fn log_power_bound(p: &Natural, alpha: f64, base: LogBase) -> Natural {
    let value = base.log(p).powf(alpha).ceil();
    num_traits::FromPrimitive::from_f64(value.max(3.0)).expect("finite bound")
}

/// Result of [`solve_alpha`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSolution {
    pub alpha: f64,
    /// `(log p)^α` at the solution.
    pub bound_b: f64,
    /// `B ≥ (p − 1)/2`: the a-priori formula no longer describes a partial
    /// factorization.
    pub oversatisfied: bool,
    /// `|failure − target|` at the returned α.
    pub residual: f64,
}

const ALPHA_RANGE: (f64, f64) = (1.0, 20.0);

/// α such that `initial_success_bound(p, (log₂ p)^α) = 1 − target`.
pub fn solve_alpha(p: &Natural, target: f64) -> Result<AlphaSolution> {
    solve_alpha_with_base(p, target, LogBase::Two)
}

pub fn solve_alpha_with_base(p: &Natural, target: f64, base: LogBase) -> Result<AlphaSolution> {
    if p < &Natural::from(5u8) {
        return Err(Error::InvalidInput(format!("threshold must be at least 5, got {p}")));
    }
    check_epsilon(target)?;
    // h = (p − 1)/2 as a real number; p may be even (e.g. a power of two).
    let ln_h = ln_f64(&(p - 1u32)) - std::f64::consts::LN_2;
    let ln_log_p = base.log(p).ln();
    let failure_at = |alpha: f64| {
        let b = (alpha * ln_log_p).exp();
        failure_f64(ln_h, ln_h, b).0
    };
    let (mut lo, mut hi) = ALPHA_RANGE;
    // Failure decreases with α.
    if failure_at(lo) <= target || failure_at(hi) > target {
        return Err(Error::AlphaOutOfRange { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if failure_at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let alpha = hi;
    let bound_b = (alpha * ln_log_p).exp();
    Ok(AlphaSolution {
        alpha,
        bound_b,
        oversatisfied: bound_b.ln() >= ln_h,
        residual: (failure_at(alpha) - target).abs(),
    })
}

/// Failure-bound data for `B = ⌈(log₂ p)^α⌉` at a given `p`, used to report
/// where a fixed α meets a target.
pub fn alpha_failure(p: &Natural, alpha: f64) -> Result<(Natural, InitialBound)> {
    let b = log_power_bound(p, alpha, LogBase::Two);
    let bound = initial_success_bound(p, &b)?;
    Ok((b, bound))
}
