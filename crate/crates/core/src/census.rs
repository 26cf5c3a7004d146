//! Exhaustive classification of the unit group of a small semiprime.
//!
//! For n = pq the census walks every y in Z_n^*, classifies it by Jacobi
//! symbol, multiplicative order, and the half-power test, and then checks
//! the resulting counts against the closed-form predictions:
//!
//! * the uniform failure probability 2^-(m1+m2) * (1 + sum_{j<min} 4^j),
//! * the Jacobi-filtered success probability 1 - 2^-(m2-m1+1)
//!   (exactly 1 when m1 = m2, and never below 3/4),
//! * the count of half-power failures among Jacobi -1 elements,
//!   phi(n)/4 * 2^-(m2-m1) for m1 != m2 and 0 for m1 = m2,
//!
//! where p - 1 = 2^m1 x1 and q - 1 = 2^m2 x2 with x1, x2 odd and the
//! profile ordered so that m1 <= m2. All probabilities are exact rationals
//! derived from integer counts; nothing is ever rounded.
//!
//! The scan is chunked and may run on any number of threads; partial counts
//! merge by addition, so reports are identical for every worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ntcore::{
    self, factorize, is_prime, jacobi, mod_pow, multiplicative_order,
    multiplicative_order_bruteforce, primes_up_to, two_adic_split, Factorization, TwoAdicSplit,
    CENSUS_CAP,
};
use crate::rational::ExactRational;

/// Units are scanned in disjoint ranges of this many candidates.
const SCAN_CHUNK: u64 = 1 << 14;

/// Every unit y with y % 97 == 1 and y below this bound also has its order
/// recomputed by brute force. Sampled so the scan stays near O(n log n).
const CROSS_CHECK_BOUND: u64 = 20_000;

/// A semiprime n = pq together with the two-adic splits of p-1 and q-1,
/// ordered so that m1 <= m2 (ties broken by p < q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiprimeProfile {
    p: u64,
    q: u64,
    n: u64,
    split_p: TwoAdicSplit,
    split_q: TwoAdicSplit,
    exponent_bound: Factorization,
}

impl SemiprimeProfile {
    /// Builds the canonical profile for two distinct odd primes.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        for value in [p, q] {
            if value < 3 || value % 2 == 0 || !is_prime(value) {
                return Err(Error::NotOddPrime { value });
            }
        }
        if p == q {
            return Err(Error::EqualPrimes { value: p });
        }
        let n = p
            .checked_mul(q)
            .filter(|&n| n <= CENSUS_CAP)
            .ok_or(Error::CapExceeded {
                what: "census modulus",
                value: p.saturating_mul(q),
                cap: CENSUS_CAP,
            })?;
        let split_p = two_adic_split(p - 1)?;
        let split_q = two_adic_split(q - 1)?;
        let swap = split_p.valuation > split_q.valuation
            || (split_p.valuation == split_q.valuation && p > q);
        let (p, q, split_p, split_q) = if swap {
            (q, p, split_q, split_p)
        } else {
            (p, q, split_p, split_q)
        };
        let exponent_bound = factorize(ntcore::lcm(p - 1, q - 1))?;
        Ok(SemiprimeProfile {
            p,
            q,
            n,
            split_p,
            split_q,
            exponent_bound,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// 2-adic valuation of p - 1 (the smaller of the two valuations).
    pub fn m1(&self) -> u32 {
        self.split_p.valuation
    }

    /// Odd part of p - 1.
    pub fn x1(&self) -> u64 {
        self.split_p.odd_part
    }

    /// 2-adic valuation of q - 1.
    pub fn m2(&self) -> u32 {
        self.split_q.valuation
    }

    /// Odd part of q - 1.
    pub fn x2(&self) -> u64 {
        self.split_q.odd_part
    }

    pub fn phi(&self) -> u64 {
        (self.p - 1) * (self.q - 1)
    }

    /// Factorization of lcm(p-1, q-1), the exponent of Z_n^*.
    pub fn exponent_bound(&self) -> &Factorization {
        &self.exponent_bound
    }

    fn is_unit(&self, y: u64) -> bool {
        !y.is_multiple_of(self.p) && !y.is_multiple_of(self.q)
    }
}

/// Why an element is unusable for the factoring identity, if it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    None,
    OddOrder,
    MinusOne,
}

/// Everything the census records about a single unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementClassification {
    pub y: u64,
    /// Jacobi symbol (y/n); always +1 or -1 for a unit.
    pub jacobi_symbol: i8,
    pub order: u64,
    /// 2-adic valuation of the order.
    pub order_valuation: u32,
    pub order_is_even: bool,
    /// y^(order/2) == -1 mod n; only defined for even orders.
    pub half_power_is_minus_one: Option<bool>,
    pub usable: bool,
    pub failure_reason: FailureReason,
}

/// Classifies one unit of Z_n^*: Jacobi symbol, order (via the factored
/// exponent bound lcm(p-1, q-1)), and the half-power test.
pub fn classify_element(y: u64, profile: &SemiprimeProfile) -> Result<ElementClassification> {
    let n = profile.n();
    let symbol = jacobi(y, n)?;
    if symbol == 0 {
        let g = ntcore::gcd(y % n, n)?;
        return Err(Error::NotAUnit { y, n, gcd: g });
    }
    let order = multiplicative_order(y, n, profile.exponent_bound())?;
    let order_is_even = order % 2 == 0;
    let half_power_is_minus_one = if order_is_even {
        Some(mod_pow(y, order / 2, n)? == n - 1)
    } else {
        None
    };
    let usable = order_is_even && half_power_is_minus_one == Some(false);
    let failure_reason = if !order_is_even {
        FailureReason::OddOrder
    } else if half_power_is_minus_one == Some(true) {
        FailureReason::MinusOne
    } else {
        FailureReason::None
    };
    Ok(ElementClassification {
        y,
        jacobi_symbol: symbol,
        order,
        order_valuation: order.trailing_zeros(),
        order_is_even,
        half_power_is_minus_one,
        usable,
        failure_reason,
    })
}

#[derive(Debug, Default, Clone, Copy)]
struct Counts {
    units: u64,
    usable_uniform: u64,
    odd_order: u64,
    minus_one: u64,
    jacobi_minus_one: u64,
    usable_filtered: u64,
    filtered_odd_order: u64,
    filtered_minus_one: u64,
    cross_checked: u64,
}

impl Counts {
    fn merge(self, other: Counts) -> Counts {
        Counts {
            units: self.units + other.units,
            usable_uniform: self.usable_uniform + other.usable_uniform,
            odd_order: self.odd_order + other.odd_order,
            minus_one: self.minus_one + other.minus_one,
            jacobi_minus_one: self.jacobi_minus_one + other.jacobi_minus_one,
            usable_filtered: self.usable_filtered + other.usable_filtered,
            filtered_odd_order: self.filtered_odd_order + other.filtered_odd_order,
            filtered_minus_one: self.filtered_minus_one + other.filtered_minus_one,
            cross_checked: self.cross_checked + other.cross_checked,
        }
    }
}

fn chunk_bounds(n: u64) -> Vec<(u64, u64)> {
    let mut bounds = Vec::new();
    let mut lo = 1;
    while lo < n {
        let hi = (lo + SCAN_CHUNK).min(n);
        bounds.push((lo, hi));
        lo = hi;
    }
    bounds
}

fn wants_cross_check(y: u64) -> bool {
    y % 97 == 1 && y <= CROSS_CHECK_BOUND
}

fn scan_chunk(profile: &SemiprimeProfile, lo: u64, hi: u64) -> Result<Counts> {
    let mut counts = Counts::default();
    for y in lo..hi {
        if !profile.is_unit(y) {
            continue;
        }
        let class = classify_element(y, profile)?;
        if wants_cross_check(y) {
            let brute = multiplicative_order_bruteforce(y, profile.n())?;
            if brute != class.order {
                return Err(Error::Internal(format!(
                    "order cross-check failed for y = {y} mod {}: {} vs {brute}",
                    profile.n(),
                    class.order
                )));
            }
            counts.cross_checked += 1;
        }
        counts.units += 1;
        match class.failure_reason {
            FailureReason::None => counts.usable_uniform += 1,
            FailureReason::OddOrder => counts.odd_order += 1,
            FailureReason::MinusOne => counts.minus_one += 1,
        }
        if class.jacobi_symbol == -1 {
            counts.jacobi_minus_one += 1;
            match class.failure_reason {
                FailureReason::None => counts.usable_filtered += 1,
                FailureReason::OddOrder => counts.filtered_odd_order += 1,
                FailureReason::MinusOne => counts.filtered_minus_one += 1,
            }
        }
    }
    Ok(counts)
}

/// The full census of Z_n^* with exact counts, exact probabilities, and
/// the closed-form predictions they are checked against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub profile: SemiprimeProfile,
    pub phi: u64,
    pub usable_uniform: u64,
    pub odd_order: u64,
    pub minus_one: u64,
    pub jacobi_minus_one: u64,
    pub usable_filtered: u64,
    /// Jacobi -1 elements with odd order; zero unless the even-order
    /// guarantee for non-residues is wrong.
    pub filtered_odd_order: u64,
    /// Jacobi -1 elements failing the half-power condition.
    pub filtered_minus_one: u64,
    /// Units whose order was re-derived by brute force during the scan.
    pub cross_checked: u64,
    pub failure_prob_uniform: ExactRational,
    pub success_prob_filtered: ExactRational,
    pub predicted_failure_uniform: ExactRational,
    pub predicted_success_filtered: ExactRational,
}

impl CensusReport {
    /// True when every enumerated quantity equals its closed-form
    /// prediction. This is what the `census` command's exit code reports.
    pub fn predictions_match(&self) -> bool {
        self.failure_prob_uniform == self.predicted_failure_uniform
            && self.success_prob_filtered == self.predicted_success_filtered
            && self.jacobi_minus_one == self.phi / 2
            && self.filtered_odd_order == 0
            && self.filtered_minus_one == predicted_minus_one_failures(&self.profile)
    }

    pub fn record(&self) -> CensusRecord {
        CensusRecord {
            n: self.profile.n(),
            p: self.profile.p(),
            q: self.profile.q(),
            m1: self.profile.m1(),
            x1: self.profile.x1(),
            m2: self.profile.m2(),
            x2: self.profile.x2(),
            phi: self.phi,
            usable_uniform: self.usable_uniform,
            odd_order: self.odd_order,
            minus_one: self.minus_one,
            jacobi_minus_one: self.jacobi_minus_one,
            usable_filtered: self.usable_filtered,
            failure_prob_uniform: self.failure_prob_uniform,
            success_prob_filtered: self.success_prob_filtered,
            predicted_failure_uniform: self.predicted_failure_uniform,
            predicted_success_filtered: self.predicted_success_filtered,
        }
    }
}

/// The census wire format. Field names and order are stable: JSON objects
/// and CSV rows both use exactly these columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub n: u64,
    pub p: u64,
    pub q: u64,
    pub m1: u32,
    pub x1: u64,
    pub m2: u32,
    pub x2: u64,
    pub phi: u64,
    pub usable_uniform: u64,
    pub odd_order: u64,
    pub minus_one: u64,
    pub jacobi_minus_one: u64,
    pub usable_filtered: u64,
    pub failure_prob_uniform: ExactRational,
    pub success_prob_filtered: ExactRational,
    pub predicted_failure_uniform: ExactRational,
    pub predicted_success_filtered: ExactRational,
}

impl CensusRecord {
    pub const CSV_HEADER: &'static str = "n,p,q,m1,x1,m2,x2,phi,usable_uniform,odd_order,\
         minus_one,jacobi_minus_one,usable_filtered,failure_prob_uniform,\
         success_prob_filtered,predicted_failure_uniform,predicted_success_filtered";

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("census record serializes")
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.p,
            self.q,
            self.m1,
            self.x1,
            self.m2,
            self.x2,
            self.phi,
            self.usable_uniform,
            self.odd_order,
            self.minus_one,
            self.jacobi_minus_one,
            self.usable_filtered,
            self.failure_prob_uniform,
            self.success_prob_filtered,
            self.predicted_failure_uniform,
            self.predicted_success_filtered,
        )
    }
}

/// Enumerates all of Z_n^* and assembles the report. Runs on the current
/// rayon thread pool; the result does not depend on the worker count.
pub fn run_census(profile: &SemiprimeProfile) -> Result<CensusReport> {
    let counts = chunk_bounds(profile.n())
        .into_par_iter()
        .map(|(lo, hi)| scan_chunk(profile, lo, hi))
        .try_reduce(Counts::default, |a, b| Ok(a.merge(b)))?;
    let phi = profile.phi();
    if counts.units != phi {
        return Err(Error::Internal(format!(
            "unit count {} does not match phi = {phi}",
            counts.units
        )));
    }
    Ok(CensusReport {
        phi,
        usable_uniform: counts.usable_uniform,
        odd_order: counts.odd_order,
        minus_one: counts.minus_one,
        jacobi_minus_one: counts.jacobi_minus_one,
        usable_filtered: counts.usable_filtered,
        filtered_odd_order: counts.filtered_odd_order,
        filtered_minus_one: counts.filtered_minus_one,
        cross_checked: counts.cross_checked,
        failure_prob_uniform: ExactRational::new(counts.odd_order + counts.minus_one, phi)?,
        success_prob_filtered: ExactRational::new(
            counts.usable_filtered,
            counts.jacobi_minus_one,
        )?,
        predicted_failure_uniform: uniform_failure_probability(profile.m1(), profile.m2())?,
        predicted_success_filtered: filtered_success_probability(profile.m1(), profile.m2())?,
        profile: profile.clone(),
    })
}

/// Closed-form probability that a uniform y in Z_n^* is unusable (odd
/// order, or even order with y^(r/2) = -1):
///
/// 2^-(m1+m2) * (1 + sum_{j=0}^{min(m1,m2)-1} 4^j)
///
/// The value never exceeds 1/2.
pub fn uniform_failure_probability(m1: u32, m2: u32) -> Result<ExactRational> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::ZeroValuation { m1, m2 });
    }
    if m1 + m2 > 62 {
        return Err(Error::CapExceeded {
            what: "valuation sum",
            value: (m1 + m2) as u64,
            cap: 62,
        });
    }
    let min = m1.min(m2);
    // 1 + (4^min - 1)/3 sums the geometric series.
    let numerator = 1 + ((1u64 << (2 * min)) - 1) / 3;
    ExactRational::new(numerator, 1 << (m1 + m2))
}

/// Closed-form probability that a uniform y with Jacobi symbol -1 is
/// usable: exactly 1 when m1 = m2, otherwise 1 - 2^-(m2-m1+1). Requires
/// the canonical ordering m1 <= m2; the value is always >= 3/4.
pub fn filtered_success_probability(m1: u32, m2: u32) -> Result<ExactRational> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::ZeroValuation { m1, m2 });
    }
    if m1 > m2 {
        return Err(Error::NonCanonicalValuations { m1, m2 });
    }
    if m1 == m2 {
        return Ok(ExactRational::ONE);
    }
    ExactRational::pow2_reciprocal(m2 - m1 + 1)?.complement()
}

/// The closed-form count of Jacobi -1 elements failing the half-power
/// condition: phi(n)/4 * 2^-(m2-m1) for m1 != m2, and 0 for m1 = m2.
pub fn predicted_minus_one_failures(profile: &SemiprimeProfile) -> u64 {
    let (m1, m2) = (profile.m1(), profile.m2());
    if m1 == m2 {
        return 0;
    }
    // phi = 2^(m1+m2) x1 x2, so phi / 2^(m2-m1+2) = 2^(2 m1 - 2) x1 x2.
    profile.phi() >> (m2 - m1 + 2)
}

/// Counts, by enumeration, the y in Z_n^* with Jacobi symbol -1, even
/// order r = 2k, and y^k = -1 mod n.
pub fn count_minus_one_failures(profile: &SemiprimeProfile) -> Result<u64> {
    chunk_bounds(profile.n())
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut count = 0u64;
            for y in lo..hi {
                if !profile.is_unit(y) {
                    continue;
                }
                let class = classify_element(y, profile)?;
                if class.jacobi_symbol == -1 && class.failure_reason == FailureReason::MinusOne {
                    count += 1;
                }
            }
            Ok(count)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// For an odd prime p with p - 1 = 2^m x, counts the elements of Z_p^*
/// whose order has each possible 2-adic valuation. The expected shape is
/// x elements at valuation 0 and 2^(k-1) x at valuation k for 1 <= k <= m.
pub fn order_valuation_histogram(p: u64) -> Result<std::collections::BTreeMap<u32, u64>> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::NotOddPrime { value: p });
    }
    if p > CENSUS_CAP {
        return Err(Error::CapExceeded {
            what: "census modulus",
            value: p,
            cap: CENSUS_CAP,
        });
    }
    let split = two_adic_split(p - 1)?;
    let bound = factorize(p - 1)?;
    let buckets = chunk_bounds(p)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut buckets = vec![0u64; split.valuation as usize + 1];
            for b in lo..hi {
                let order = multiplicative_order(b, p, &bound)?;
                buckets[order.trailing_zeros() as usize] += 1;
            }
            Ok(buckets)
        })
        .try_reduce(
            || vec![0u64; split.valuation as usize + 1],
            |mut a, b| {
                for (slot, add) in a.iter_mut().zip(b) {
                    *slot += add;
                }
                Ok(a)
            },
        )?;
    Ok(buckets
        .into_iter()
        .enumerate()
        .map(|(k, count)| (k as u32, count))
        .collect())
}

/// Outcome of checking that every non-square mod p has even order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonsquareOrderCheck {
    pub p: u64,
    /// How many elements with Legendre symbol -1 were examined.
    pub nonsquares: u64,
    /// Non-squares with odd order. Always empty.
    pub counterexamples: Vec<u64>,
}

impl NonsquareOrderCheck {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Verifies, for every a in Z_p^* with Legendre symbol -1, that the order
/// of a is even; any counterexample is reported rather than hidden.
pub fn nonsquare_even_order_check(p: u64) -> Result<NonsquareOrderCheck> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::NotOddPrime { value: p });
    }
    if p > CENSUS_CAP {
        return Err(Error::CapExceeded {
            what: "census modulus",
            value: p,
            cap: CENSUS_CAP,
        });
    }
    let bound = factorize(p - 1)?;
    let (nonsquares, mut counterexamples) = chunk_bounds(p)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut seen = 0u64;
            let mut bad = Vec::new();
            for a in lo..hi {
                if jacobi(a, p)? != -1 {
                    continue;
                }
                seen += 1;
                if multiplicative_order(a, p, &bound)? % 2 == 1 {
                    bad.push(a);
                }
            }
            Ok((seen, bad))
        })
        .try_reduce(
            || (0, Vec::new()),
            |(a, mut av), (b, bv)| {
                av.extend(bv);
                Ok((a + b, av))
            },
        )?;
    counterexamples.sort_unstable();
    Ok(NonsquareOrderCheck {
        p,
        nonsquares,
        counterexamples,
    })
}

/// All canonical profiles with the smaller prime at most `p_max` and the
/// larger at most `q_max`.
pub fn profile_family(p_max: u64, q_max: u64) -> Result<Vec<SemiprimeProfile>> {
    let primes = primes_up_to(p_max.max(q_max));
    let odd_primes: Vec<u64> = primes.into_iter().filter(|&p| p > 2).collect();
    let mut family = Vec::new();
    for (i, &p) in odd_primes.iter().enumerate() {
        if p > p_max {
            break;
        }
        for &q in &odd_primes[i + 1..] {
            if q > q_max {
                break;
            }
            family.push(SemiprimeProfile::new(p, q)?);
        }
    }
    Ok(family)
}
