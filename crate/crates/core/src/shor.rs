//! The classical factoring loop with pluggable base selection.
//!
//! For a semiprime n = pq and a unit y of even order r = 2k with
//! y^k != -1 mod n, the pair (y^k - 1)(y^k + 1) = 0 mod n yields the
//! nontrivial factor gcd(y^k - 1, n). The loop samples candidate bases,
//! asks an order oracle for r, and applies that identity. Two selection
//! strategies are provided: uniform over the sampling range, and
//! Jacobi-filtered, which only accepts y with (y/n) = -1 and therefore
//! never sees an odd order.
//!
//! Order finding itself is classical here. The default oracle computes
//! orders from the factored group exponent; an opt-in oracle instead runs
//! the idealized measurement model (peaks at round(j*Q/r)) followed by
//! continued-fraction recovery, exercising the full post-processing path.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ntcore::{
    self, factorize, gcd, is_prime, jacobi, mod_pow, multiplicative_order, Factorization,
    FACTORING_CAP,
};
use crate::rational::ExactRational;

/// Default attempt budget. The filtered strategy fails a single attempt
/// with probability at most 1/4, so 64 attempts make the overall failure
/// probability at most 4^-64.
pub const DEFAULT_MAX_ATTEMPTS: u32 = 64;

/// How candidate bases are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionStrategy {
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "jacobi")]
    JacobiFiltered,
}

impl std::fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SelectionStrategy::Uniform => write!(f, "uniform"),
            SelectionStrategy::JacobiFiltered => write!(f, "jacobi"),
        }
    }
}

/// Result of drawing one candidate base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseDraw {
    /// A unit of Z_n^*, ready for order finding.
    Unit(u64),
    /// The draw shared a factor with n, which factors n outright.
    LuckyGcd { y: u64, factor: u64 },
}

fn check_odd_composite(n: u64) -> Result<()> {
    if n < 15 || n.is_multiple_of(2) {
        return Err(Error::NotOddComposite { n });
    }
    if n >= FACTORING_CAP {
        return Err(Error::CapExceeded {
            what: "factoring modulus",
            value: n,
            cap: FACTORING_CAP - 1,
        });
    }
    if is_prime(n) {
        return Err(Error::PrimeInput { n });
    }
    Ok(())
}

/// Draws a base from {2, ..., n-1}. Uniform selection accepts any draw;
/// Jacobi-filtered selection rejects until (y/n) = -1, which takes two
/// draws on average. A draw sharing a factor with n short-circuits as
/// [`BaseDraw::LuckyGcd`].
///
/// y = 1 is excluded from the range (it can only waste an oracle call);
/// the census over all of Z_n^* remains the normative probability model.
pub fn sample_base(n: u64, strategy: SelectionStrategy, rng: &mut impl Rng) -> Result<BaseDraw> {
    check_odd_composite(n)?;
    loop {
        let y = rng.gen_range(2..n);
        let g = gcd(y, n)?;
        if g != 1 {
            return Ok(BaseDraw::LuckyGcd { y, factor: g });
        }
        match strategy {
            SelectionStrategy::Uniform => return Ok(BaseDraw::Unit(y)),
            SelectionStrategy::JacobiFiltered => {
                if jacobi(y, n)? == -1 {
                    return Ok(BaseDraw::Unit(y));
                }
            }
        }
    }
}

/// Supplies the multiplicative order of bases modulo a fixed n.
pub trait OrderOracle {
    fn order(&mut self, y: u64) -> Result<u64>;
}

/// Order finding from the factored group exponent lambda(n).
#[derive(Debug, Clone)]
pub struct ExactOrderOracle {
    n: u64,
    exponent_bound: Factorization,
}

impl ExactOrderOracle {
    pub fn new(n: u64) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::NotOddComposite { n });
        }
        if n >= FACTORING_CAP {
            return Err(Error::CapExceeded {
                what: "factoring modulus",
                value: n,
                cap: FACTORING_CAP - 1,
            });
        }
        let lambda = ntcore::group_exponent(&factorize(n)?);
        Ok(ExactOrderOracle {
            n,
            exponent_bound: factorize(lambda)?,
        })
    }
}

impl OrderOracle for ExactOrderOracle {
    fn order(&mut self, y: u64) -> Result<u64> {
        multiplicative_order(y, self.n, &self.exponent_bound)
    }
}

/// Order finding through the idealized measurement model: draw a peak
/// c = round(j*Q/r), recover a candidate denominator from the convergents
/// of c/Q, and reduce it to the exact order. Useless measurements
/// (j sharing a factor with r) are redrawn; after 64 fruitless
/// measurements the exact path answers directly so the oracle always
/// terminates.
pub struct MeasurementOrderOracle {
    n: u64,
    modulus: u64,
    exact: ExactOrderOracle,
    rng: ChaCha8Rng,
}

impl MeasurementOrderOracle {
    const MAX_MEASUREMENTS: u32 = 64;

    pub fn new(n: u64, seed: u64) -> Result<Self> {
        let exact = ExactOrderOracle::new(n)?;
        // Q >= n^2 > r^2 for every order r, the standard sufficiency
        // condition for convergent recovery.
        let modulus = n
            .checked_mul(n)
            .and_then(u64::checked_next_power_of_two)
            .ok_or(Error::CapExceeded {
                what: "measurement modulus base",
                value: n,
                cap: u32::MAX as u64,
            })?;
        Ok(MeasurementOrderOracle {
            n,
            modulus,
            exact,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl OrderOracle for MeasurementOrderOracle {
    fn order(&mut self, y: u64) -> Result<u64> {
        let hidden = self.exact.order(y)?;
        for _ in 0..Self::MAX_MEASUREMENTS {
            let sample = simulate_measurement(hidden, self.modulus, &mut self.rng)?;
            if let Some(candidate) = recover_order(sample.c, self.modulus, y, self.n)? {
                // The recovered denominator is a multiple of the order;
                // strip it down to the order itself.
                return multiplicative_order(y, self.n, &factorize(candidate)?);
            }
        }
        Ok(hidden)
    }
}

/// What a factoring attempt (or a whole run) produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Factor,
    OddOrder,
    MinusOne,
    LuckyGcd,
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            OutcomeKind::Factor => "factor",
            OutcomeKind::OddOrder => "odd_order",
            OutcomeKind::MinusOne => "minus_one",
            OutcomeKind::LuckyGcd => "lucky_gcd",
        };
        write!(f, "{name}")
    }
}

/// Result of applying the factoring identity to one base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorOutcome {
    pub kind: OutcomeKind,
    pub y: u64,
    /// The order of y, when one was computed.
    pub order: Option<u64>,
    /// The nontrivial split (d, n/d) with d <= n/d, when one was found.
    pub factors: Option<(u64, u64)>,
    /// Attempts this outcome accounts for.
    pub attempts: u32,
}

fn split_pair(n: u64, d: u64) -> (u64, u64) {
    let other = n / d;
    (d.min(other), d.max(other))
}

/// Runs one attempt of the factoring identity on a unit y: odd order and
/// y^(r/2) = -1 are the two failure modes; anything else yields the
/// guaranteed nontrivial factor gcd(y^(r/2) - 1, n).
pub fn attempt_factor(n: u64, y: u64, oracle: &mut dyn OrderOracle) -> Result<FactorOutcome> {
    if n < 3 {
        return Err(Error::ModulusTooSmall { modulus: n });
    }
    let g = gcd(y % n, n)?;
    if g != 1 {
        return Err(Error::NotAUnit { y, n, gcd: g });
    }
    let order = oracle.order(y)?;
    if mod_pow(y, order, n)? != 1 {
        return Err(Error::InconsistentOracle { y, n, order });
    }
    if order % 2 == 1 {
        return Ok(FactorOutcome {
            kind: OutcomeKind::OddOrder,
            y,
            order: Some(order),
            factors: None,
            attempts: 1,
        });
    }
    let half_power = mod_pow(y, order / 2, n)?;
    if half_power == n - 1 {
        return Ok(FactorOutcome {
            kind: OutcomeKind::MinusOne,
            y,
            order: Some(order),
            factors: None,
            attempts: 1,
        });
    }
    if half_power == 1 {
        // The oracle must return the exact order, so y^(r/2) = 1 means it
        // returned a proper multiple.
        return Err(Error::InconsistentOracle { y, n, order });
    }
    let d = gcd(half_power - 1, n)?;
    if d == 1 || d == n {
        return Err(Error::Internal(format!(
            "gcd({half_power} - 1, {n}) = {d} is trivial despite y^(r/2) != +-1"
        )));
    }
    Ok(FactorOutcome {
        kind: OutcomeKind::Factor,
        y,
        order: Some(order),
        factors: Some(split_pair(n, d)),
        attempts: 1,
    })
}

/// One line of the attempt log. Serializes as a single JSON object with
/// `order` and `factor` present only where they apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: u32,
    pub y: u64,
    pub jacobi: i8,
    pub outcome: OutcomeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<u64>,
}

/// Fixed final-result object for a factoring run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSummary {
    pub n: u64,
    pub strategy: SelectionStrategy,
    pub seed: u64,
    pub attempts_used: u32,
    pub factors: Option<[u64; 2]>,
}

/// A full factoring run: the final outcome plus every attempt made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorReport {
    pub n: u64,
    pub strategy: SelectionStrategy,
    pub seed: u64,
    pub max_attempts: u32,
    pub attempts_used: u32,
    pub factors: Option<(u64, u64)>,
    pub log: Vec<AttemptRecord>,
}

impl FactorReport {
    pub fn succeeded(&self) -> bool {
        self.factors.is_some()
    }

    pub fn summary(&self) -> FactorSummary {
        FactorSummary {
            n: self.n,
            strategy: self.strategy,
            seed: self.seed,
            attempts_used: self.attempts_used,
            factors: self.factors.map(|(a, b)| [a, b]),
        }
    }

    /// One JSON object per attempt, then the summary object.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for record in &self.log {
            out.push_str(&serde_json::to_string(record).expect("attempt record serializes"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary()).expect("summary serializes"));
        out.push('\n');
        out
    }
}

fn check_semiprime(n: u64) -> Result<()> {
    check_odd_composite(n)?;
    let factors = factorize(n)?;
    if factors.len() != 2 || factors.iter().any(|&(_, e)| e != 1) {
        return Err(Error::NotSemiprime { n });
    }
    Ok(())
}

/// Repeats sample + attempt until a factor is found or the attempt budget
/// is exhausted, logging every attempt. Identical inputs produce an
/// identical log. Rejects inputs that are not odd semiprimes.
pub fn factor_with_oracle(
    n: u64,
    strategy: SelectionStrategy,
    seed: u64,
    max_attempts: u32,
    oracle: &mut dyn OrderOracle,
) -> Result<FactorReport> {
    check_semiprime(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = Vec::new();
    let mut factors = None;
    let mut attempts_used = 0;
    for attempt in 1..=max_attempts {
        attempts_used = attempt;
        match sample_base(n, strategy, &mut rng)? {
            BaseDraw::LuckyGcd { y, factor } => {
                let pair = split_pair(n, factor);
                log.push(AttemptRecord {
                    attempt,
                    y,
                    jacobi: 0,
                    outcome: OutcomeKind::LuckyGcd,
                    order: None,
                    factor: Some(pair.0),
                });
                factors = Some(pair);
            }
            BaseDraw::Unit(y) => {
                let outcome = attempt_factor(n, y, oracle)?;
                log.push(AttemptRecord {
                    attempt,
                    y,
                    jacobi: jacobi(y, n)?,
                    outcome: outcome.kind,
                    order: outcome.order,
                    factor: outcome.factors.map(|(d, _)| d),
                });
                factors = outcome.factors;
            }
        }
        if factors.is_some() {
            break;
        }
    }
    Ok(FactorReport {
        n,
        strategy,
        seed,
        max_attempts,
        attempts_used,
        factors,
        log,
    })
}

/// [`factor_with_oracle`] with the default exact order oracle.
pub fn factor(
    n: u64,
    strategy: SelectionStrategy,
    seed: u64,
    max_attempts: u32,
) -> Result<FactorReport> {
    let mut oracle = ExactOrderOracle::new(n)?;
    factor_with_oracle(n, strategy, seed, max_attempts, &mut oracle)
}

/// A simulated order-finding measurement: the peak c = round(j*Q/r) for
/// the hidden multiple j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementSample {
    pub c: u64,
    pub q: u64,
    pub source_multiple: u64,
}

/// The ideal peak round(j*Q/r) for a known multiple j. Q must be a power
/// of two with Q >= r^2.
pub fn measurement_outcome(r: u64, q: u64, j: u64) -> Result<u64> {
    if r == 0 || !q.is_power_of_two() || (r as u128 * r as u128) > q as u128 {
        return Err(Error::MeasurementModulus { q, r });
    }
    if j >= r {
        return Err(Error::Internal(format!("multiple {j} out of range for order {r}")));
    }
    let numerator = 2 * (j as u128) * (q as u128) + r as u128;
    Ok((numerator / (2 * r as u128)) as u64)
}

/// Draws j uniformly from {0, ..., r-1} and returns the ideal peak.
pub fn simulate_measurement(r: u64, q: u64, rng: &mut impl Rng) -> Result<MeasurementSample> {
    if r == 0 || !q.is_power_of_two() || (r as u128 * r as u128) > q as u128 {
        return Err(Error::MeasurementModulus { q, r });
    }
    let j = rng.gen_range(0..r);
    Ok(MeasurementSample {
        c: measurement_outcome(r, q, j)?,
        q,
        source_multiple: j,
    })
}

/// The convergents of c/Q in lowest terms, in order; the last convergent
/// equals c/Q exactly.
pub fn continued_fraction_convergents(c: u64, q: u64) -> Result<Vec<(u64, u64)>> {
    if q == 0 {
        return Err(Error::ModulusTooSmall { modulus: 0 });
    }
    if c >= q {
        return Err(Error::MeasurementOutOfRange { c, q });
    }
    let mut convergents = Vec::new();
    let (mut h_prev, mut h) = (0u64, 1u64);
    let (mut k_prev, mut k) = (1u64, 0u64);
    let (mut x, mut y) = (c, q);
    loop {
        let a = x / y;
        (h_prev, h) = (h, a * h + h_prev);
        (k_prev, k) = (k, a * k + k_prev);
        convergents.push((h, k));
        (x, y) = (y, x % y);
        if y == 0 {
            break;
        }
    }
    Ok(convergents)
}

/// Scans the convergents of c/Q for the smallest denominator d < n with
/// y^d = 1 mod n. Any such d is a multiple of the order of y.
pub fn recover_order(c: u64, q: u64, y: u64, n: u64) -> Result<Option<u64>> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { modulus: n });
    }
    let g = gcd(y % n, n)?;
    if g != 1 {
        return Err(Error::NotAUnit { y, n, gcd: g });
    }
    for (_, denominator) in continued_fraction_convergents(c, q)? {
        if denominator >= n {
            break;
        }
        if mod_pow(y, denominator, n)? == 1 {
            return Ok(Some(denominator));
        }
    }
    Ok(None)
}

/// Per-strategy tallies from a seeded Monte Carlo comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyStats {
    pub strategy: SelectionStrategy,
    pub trials: u64,
    pub successes: u64,
    pub exhausted_trials: u64,
    pub total_attempts: u64,
    pub odd_order_attempts: u64,
    pub minus_one_attempts: u64,
    pub max_trial_attempts: u32,
    pub mean_attempts: ExactRational,
    pub per_attempt_success: ExactRational,
}

/// Monte Carlo comparison of the two strategies on one semiprime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub max_attempts: u32,
    pub strategies: Vec<StrategyStats>,
}

impl CompareReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("compare report serializes")
    }
}

/// Draws a base from the normative sample space: all of Z_n^* for the
/// uniform strategy (including 1 and n-1), and its Jacobi -1 subset for
/// the filtered strategy. Non-units are simply redrawn, matching the
/// probability model the census accounts for.
fn sample_unit_normative(n: u64, strategy: SelectionStrategy, rng: &mut impl Rng) -> Result<u64> {
    loop {
        let y = rng.gen_range(1..n);
        if gcd(y, n)? != 1 {
            continue;
        }
        match strategy {
            SelectionStrategy::Uniform => return Ok(y),
            SelectionStrategy::JacobiFiltered => {
                if jacobi(y, n)? == -1 {
                    return Ok(y);
                }
            }
        }
    }
}

/// Runs `trials` seeded factoring trials per strategy, drawing bases from
/// the normative sample space, and tallies per-attempt outcomes. Every
/// probability in the result is an exact ratio of counts.
pub fn compare_strategies(
    n: u64,
    trials: u64,
    seed: u64,
    max_attempts: u32,
) -> Result<CompareReport> {
    check_semiprime(n)?;
    let mut strategies = Vec::new();
    if trials > 0 {
        for (index, strategy) in [SelectionStrategy::Uniform, SelectionStrategy::JacobiFiltered]
            .into_iter()
            .enumerate()
        {
            let mut oracle = ExactOrderOracle::new(n)?;
            let stream = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let mut successes = 0u64;
            let mut exhausted = 0u64;
            let mut total_attempts = 0u64;
            let mut odd_order = 0u64;
            let mut minus_one = 0u64;
            let mut max_trial_attempts = 0u32;
            for trial in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(stream.wrapping_add(trial));
                let mut attempts = 0u32;
                loop {
                    let y = sample_unit_normative(n, strategy, &mut rng)?;
                    let outcome = attempt_factor(n, y, &mut oracle)?;
                    attempts += 1;
                    total_attempts += 1;
                    match outcome.kind {
                        OutcomeKind::Factor => {
                            successes += 1;
                            break;
                        }
                        OutcomeKind::OddOrder => odd_order += 1,
                        OutcomeKind::MinusOne => minus_one += 1,
                        OutcomeKind::LuckyGcd => unreachable!("normative draws are units"),
                    }
                    if attempts == max_attempts {
                        exhausted += 1;
                        break;
                    }
                }
                max_trial_attempts = max_trial_attempts.max(attempts);
            }
            strategies.push(StrategyStats {
                strategy,
                trials,
                successes,
                exhausted_trials: exhausted,
                total_attempts,
                odd_order_attempts: odd_order,
                minus_one_attempts: minus_one,
                max_trial_attempts,
                mean_attempts: ExactRational::new(total_attempts, trials)?,
                per_attempt_success: ExactRational::new(successes, total_attempts)?,
            });
        }
    }
    Ok(CompareReport {
        n,
        trials,
        seed,
        max_attempts,
        strategies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn sampling_respects_the_strategy() {
        let mut rng = seeded(7);
        let filtered_set = [7u64, 11, 13, 14];
        let uniform_set = [2u64, 4, 7, 8, 11, 13, 14];
        let mut seen_filtered = std::collections::BTreeSet::new();
        let mut seen_uniform = std::collections::BTreeSet::new();
        for _ in 0..400 {
            match sample_base(15, SelectionStrategy::JacobiFiltered, &mut rng).unwrap() {
                BaseDraw::Unit(y) => {
                    assert!(filtered_set.contains(&y), "unexpected filtered draw {y}");
                    seen_filtered.insert(y);
                }
                BaseDraw::LuckyGcd { y, factor } => {
                    assert_eq!(y % factor, 0);
                    assert!(factor == 3 || factor == 5);
                }
            }
            match sample_base(15, SelectionStrategy::Uniform, &mut rng).unwrap() {
                BaseDraw::Unit(y) => {
                    assert!(uniform_set.contains(&y), "unexpected uniform draw {y}");
                    seen_uniform.insert(y);
                }
                BaseDraw::LuckyGcd { .. } => {}
            }
        }
        assert_eq!(seen_filtered.len(), filtered_set.len());
        assert_eq!(seen_uniform.len(), uniform_set.len());
    }

    #[test]
    fn sampling_short_circuits_shared_factors() {
        // Draw until the multiple y = 6 of 3 comes up for n = 21.
        let mut rng = seeded(1);
        let mut saw_lucky_six = false;
        for _ in 0..2000 {
            if let BaseDraw::LuckyGcd { y, factor } =
                sample_base(21, SelectionStrategy::Uniform, &mut rng).unwrap()
            {
                assert_eq!(gcd(y, 21).unwrap(), factor);
                if y == 6 {
                    assert_eq!(factor, 3);
                    saw_lucky_six = true;
                }
            }
        }
        assert!(saw_lucky_six);
    }

    #[test]
    fn sampling_rejects_bad_moduli() {
        let mut rng = seeded(0);
        assert!(matches!(
            sample_base(14, SelectionStrategy::Uniform, &mut rng),
            Err(Error::NotOddComposite { .. })
        ));
        assert!(matches!(
            sample_base(17, SelectionStrategy::Uniform, &mut rng),
            Err(Error::PrimeInput { .. })
        ));
    }

    #[test]
    fn attempt_factor_known_cases() {
        let mut oracle = ExactOrderOracle::new(15).unwrap();
        // ord(7) = 4 and 7^2 = 4, so gcd(3, 15) = 3 splits 15.
        let outcome = attempt_factor(15, 7, &mut oracle).unwrap();
        assert_eq!(outcome.kind, OutcomeKind::Factor);
        assert_eq!(outcome.order, Some(4));
        assert_eq!(outcome.factors, Some((3, 5)));

        // 14 = -1 mod 15 fails the half-power condition.
        let outcome = attempt_factor(15, 14, &mut oracle).unwrap();
        assert_eq!(outcome.kind, OutcomeKind::MinusOne);
        assert_eq!(outcome.order, Some(2));
        assert_eq!(outcome.factors, None);

        // ord(16) = 3 mod 21 is odd.
        let mut oracle = ExactOrderOracle::new(21).unwrap();
        let outcome = attempt_factor(21, 16, &mut oracle).unwrap();
        assert_eq!(outcome.kind, OutcomeKind::OddOrder);
        assert_eq!(outcome.order, Some(3));

        assert!(attempt_factor(21, 6, &mut oracle).is_err());
    }

    #[test]
    fn attempt_factor_rejects_inconsistent_oracles() {
        struct Fixed(u64);
        impl OrderOracle for Fixed {
            fn order(&mut self, _y: u64) -> Result<u64> {
                Ok(self.0)
            }
        }
        // ord(7) = 4 mod 15, so 3 is not the order of 7.
        assert_eq!(
            attempt_factor(15, 7, &mut Fixed(3)),
            Err(Error::InconsistentOracle { y: 7, n: 15, order: 3 })
        );
        // 8 is a multiple of the order but not the order itself.
        assert_eq!(
            attempt_factor(15, 7, &mut Fixed(8)),
            Err(Error::InconsistentOracle { y: 7, n: 15, order: 8 })
        );
    }

    #[test]
    fn factor_finds_the_split() {
        for seed in 0..20 {
            let report = factor(15, SelectionStrategy::JacobiFiltered, seed, 50).unwrap();
            assert_eq!(report.factors, Some((3, 5)));
            assert_eq!(report.log.len() as u32, report.attempts_used);
        }
        // Every Jacobi -1 base works for 21, so one attempt always does it
        // unless the draw was a lucky multiple (which also succeeds).
        for seed in 0..20 {
            let report = factor(21, SelectionStrategy::JacobiFiltered, seed, 1).unwrap();
            assert_eq!(report.factors, Some((3, 7)));
            assert_eq!(report.attempts_used, 1);
        }
    }

    #[test]
    fn factor_validates_input() {
        assert!(matches!(
            factor(17, SelectionStrategy::Uniform, 0, 10),
            Err(Error::PrimeInput { n: 17 })
        ));
        assert!(matches!(
            factor(45, SelectionStrategy::Uniform, 0, 10),
            Err(Error::NotSemiprime { n: 45 })
        ));
        assert!(matches!(
            factor(25, SelectionStrategy::Uniform, 0, 10),
            Err(Error::NotSemiprime { n: 25 })
        ));
        assert!(matches!(
            factor(22, SelectionStrategy::Uniform, 0, 10),
            Err(Error::NotOddComposite { n: 22 })
        ));
    }

    #[test]
    fn factor_runs_are_reproducible() {
        let a = factor(899, SelectionStrategy::Uniform, 42, 64).unwrap();
        let b = factor(899, SelectionStrategy::Uniform, 42, 64).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json_lines(), b.to_json_lines());
        assert_eq!(a.factors, Some((29, 31)));
    }

    #[test]
    fn measurement_outcomes() {
        assert_eq!(measurement_outcome(4, 256, 1).unwrap(), 64);
        assert_eq!(measurement_outcome(3, 256, 1).unwrap(), 85);
        assert_eq!(measurement_outcome(3, 256, 0).unwrap(), 0);
        assert_eq!(measurement_outcome(3, 256, 2).unwrap(), 171);
        assert!(matches!(
            measurement_outcome(4, 15, 1),
            Err(Error::MeasurementModulus { .. })
        ));
        assert!(matches!(
            measurement_outcome(4, 8, 1),
            Err(Error::MeasurementModulus { .. })
        ));
    }

    #[test]
    fn simulated_peaks_stay_in_range() {
        let mut rng = seeded(5);
        for r in 1..30u64 {
            let q = (r * r).next_power_of_two();
            for _ in 0..50 {
                let sample = simulate_measurement(r, q, &mut rng).unwrap();
                assert!(sample.c < q);
                assert!(sample.source_multiple < r);
                assert_eq!(
                    sample.c,
                    measurement_outcome(r, q, sample.source_multiple).unwrap()
                );
            }
        }
    }

    #[test]
    fn convergents_of_known_fractions() {
        assert_eq!(
            continued_fraction_convergents(85, 256).unwrap(),
            vec![(0, 1), (1, 3), (85, 256)]
        );
        assert_eq!(
            continued_fraction_convergents(64, 256).unwrap(),
            vec![(0, 1), (1, 4)]
        );
        assert_eq!(continued_fraction_convergents(0, 7).unwrap(), vec![(0, 1)]);
        assert!(continued_fraction_convergents(7, 7).is_err());
        assert!(continued_fraction_convergents(0, 0).is_err());
    }

    #[test]
    fn convergent_invariants() {
        for c in 0..200u64 {
            for q in (c + 1)..200 {
                let convergents = continued_fraction_convergents(c, q).unwrap();
                let &(num, den) = convergents.last().unwrap();
                let g = gcd(c.max(1), q).unwrap();
                if c == 0 {
                    assert_eq!((num, den), (0, 1));
                } else {
                    assert_eq!((num, den), (c / g, q / g));
                }
                for pair in convergents.windows(2) {
                    assert!(pair[0].1 <= pair[1].1);
                }
                for (num, den) in convergents {
                    assert_eq!(gcd(num.max(1), den).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn order_recovery_from_peaks() {
        assert_eq!(recover_order(64, 256, 7, 15).unwrap(), Some(4));
        // 4 has order 3 mod 21 and 85 = round(256/3).
        assert_eq!(recover_order(85, 256, 4, 21).unwrap(), Some(3));
        assert_eq!(recover_order(0, 256, 7, 15).unwrap(), None);
        assert!(recover_order(1, 256, 6, 15).is_err());
    }

    #[test]
    fn measurement_oracle_factors_correctly() {
        for (n, expected) in [(15u64, (3u64, 5u64)), (21, (3, 7)), (899, (29, 31))] {
            let mut oracle = MeasurementOrderOracle::new(n, 99).unwrap();
            let report =
                factor_with_oracle(n, SelectionStrategy::JacobiFiltered, 3, 64, &mut oracle)
                    .unwrap();
            assert_eq!(report.factors, Some(expected));
        }
    }

    #[test]
    fn measurement_oracle_matches_exact_orders() {
        let n = 143u64;
        let mut exact = ExactOrderOracle::new(n).unwrap();
        let mut measured = MeasurementOrderOracle::new(n, 7).unwrap();
        for y in 2..n {
            if gcd(y, n).unwrap() != 1 {
                continue;
            }
            assert_eq!(measured.order(y).unwrap(), exact.order(y).unwrap(), "y={y}");
        }
    }

    #[test]
    fn attempt_log_wire_format() {
        let record = AttemptRecord {
            attempt: 1,
            y: 14,
            jacobi: -1,
            outcome: OutcomeKind::MinusOne,
            order: Some(2),
            factor: None,
        };
        let json = serde_json::to_string(&record).unwrap();
        assert_eq!(
            json,
            r#"{"attempt":1,"y":14,"jacobi":-1,"outcome":"minus_one","order":2}"#
        );
        let back: AttemptRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, record);

        let report = factor(15, SelectionStrategy::JacobiFiltered, 1, 50).unwrap();
        let lines = report.to_json_lines();
        let last = lines.lines().last().unwrap();
        let summary: FactorSummary = serde_json::from_str(last).unwrap();
        assert_eq!(summary, report.summary());
        assert_eq!(summary.factors, Some([3, 5]));
    }

    #[test]
    fn comparison_tallies_are_exact_counts() {
        let report = compare_strategies(21, 500, 11, 64).unwrap();
        assert_eq!(report.strategies.len(), 2);
        let filtered = &report.strategies[1];
        assert_eq!(filtered.strategy, SelectionStrategy::JacobiFiltered);
        // Filtered selection on 21 succeeds on the first attempt, always.
        assert_eq!(filtered.total_attempts, 500);
        assert_eq!(filtered.successes, 500);
        assert_eq!(filtered.odd_order_attempts, 0);
        assert_eq!(filtered.mean_attempts, ExactRational::ONE);
        assert_eq!(filtered.per_attempt_success, ExactRational::ONE);

        let uniform = &report.strategies[0];
        assert_eq!(uniform.successes, 500);
        assert_eq!(
            uniform.total_attempts,
            500 + uniform.odd_order_attempts + uniform.minus_one_attempts
        );
    }

    #[test]
    fn comparison_with_zero_trials_is_empty() {
        let report = compare_strategies(15, 0, 1, 64).unwrap();
        assert!(report.strategies.is_empty());
    }
}
