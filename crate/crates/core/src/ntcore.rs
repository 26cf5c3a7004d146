//! Integer and modular arithmetic primitives.
//!
//! Values are `u64` with all products carried out in `u128`, so nothing here
//! can silently overflow as long as the explicit size caps hold: factoring
//! paths accept moduli below [`FACTORING_CAP`] (2^63) and the exhaustive
//! census paths accept moduli up to [`CENSUS_CAP`] (10^7). Every operation
//! is a pure function and safe to call from any number of threads.

use crate::error::{Error, Result};

/// Upper bound (exclusive) for moduli on factoring-driver paths.
pub const FACTORING_CAP: u64 = 1 << 63;

/// Upper bound (inclusive) for moduli on exhaustive-enumeration paths.
pub const CENSUS_CAP: u64 = 10_000_000;

/// Trial-division bound used by [`factorize`]; composites with no factor
/// below it are split by Brent's cycle-finding variant of Pollard's rho.
const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// A factorization as (prime, exponent) pairs, primes strictly increasing.
pub type Factorization = Vec<(u64, u32)>;

/// The split m = 2^valuation * odd_part with odd_part odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoAdicSplit {
    pub valuation: u32,
    pub odd_part: u64,
}

impl TwoAdicSplit {
    /// Reassembles 2^valuation * odd_part.
    pub fn value(&self) -> u64 {
        self.odd_part << self.valuation
    }
}

/// Greatest common divisor. Errors only when both inputs are zero.
pub fn gcd(a: u64, b: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(Error::GcdOfZeroes);
    }
    Ok(gcd_unchecked(a, b))
}

pub(crate) fn gcd_unchecked(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple of two nonzero values.
pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd_unchecked(a, b) * b
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

/// base^exponent mod modulus by binary exponentiation.
pub fn mod_pow(base: u64, exponent: u64, modulus: u64) -> Result<u64> {
    if modulus < 2 {
        return Err(Error::ModulusTooSmall { modulus });
    }
    Ok(mod_pow_unchecked(base, exponent, modulus))
}

pub(crate) fn mod_pow_unchecked(base: u64, mut exponent: u64, modulus: u64) -> u64 {
    let mut base = base % modulus;
    let mut acc = 1 % modulus;
    while exponent > 0 {
        if exponent & 1 == 1 {
            acc = mul_mod(acc, base, modulus);
        }
        base = mul_mod(base, base, modulus);
        exponent >>= 1;
    }
    acc
}

/// The Jacobi symbol (a/n) for odd n >= 3, by the binary algorithm with
/// quadratic reciprocity. Returns 0 exactly when gcd(a, n) > 1.
pub fn jacobi(a: u64, n: u64) -> Result<i8> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::JacobiModulus { n });
    }
    let mut a = a % n;
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        let twos = a.trailing_zeros();
        a >>= twos;
        // (2/n) = -1 iff n = +-3 mod 8; an even power of two leaves the sign.
        if twos % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        (a, n) = (n % a, a);
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Deterministic Miller-Rabin primality test, valid for all u64 inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    // This base set is known to be a deterministic witness set for
    // every n below 3.3 * 10^24, which covers the whole u64 range.
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow_unchecked(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes up to and including `limit`, by a sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for candidate in 2..=limit {
        if composite[candidate] {
            continue;
        }
        primes.push(candidate as u64);
        let mut multiple = candidate * candidate;
        while multiple <= limit {
            composite[multiple] = true;
            multiple += candidate;
        }
    }
    primes
}

fn pollard_rho(n: u64) -> u64 {
    // Brent's variant; n must be odd, composite, and not a prime power
    // divisible by anything below the trial bound.
    debug_assert!(n > 1 && n % 2 == 1 && !is_prime(n));
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_unchecked(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of n >= 2 as (prime, exponent) pairs in increasing
/// prime order. Trial division handles everything with a factor below
/// 10^6; the remaining cofactor is split by Pollard's rho.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::FactorizeRange { n });
    }
    if n >= FACTORING_CAP {
        return Err(Error::CapExceeded {
            what: "factorization input",
            value: n,
            cap: FACTORING_CAP - 1,
        });
    }
    let mut factors: Vec<u64> = Vec::new();
    let mut rest = n;
    let twos = rest.trailing_zeros();
    if twos > 0 {
        factors.extend(std::iter::repeat_n(2, twos as usize));
        rest >>= twos;
    }
    let mut divisor = 3u64;
    while divisor <= TRIAL_DIVISION_BOUND && divisor * divisor <= rest {
        while rest.is_multiple_of(divisor) {
            factors.push(divisor);
            rest /= divisor;
        }
        divisor += 2;
    }
    let mut pending = Vec::new();
    if rest > 1 {
        pending.push(rest);
    }
    while let Some(m) = pending.pop() {
        if is_prime(m) {
            factors.push(m);
        } else {
            let d = pollard_rho(m);
            pending.push(d);
            pending.push(m / d);
        }
    }
    factors.sort_unstable();
    let mut grouped: Factorization = Vec::new();
    for prime in factors {
        match grouped.last_mut() {
            Some((p, e)) if *p == prime => *e += 1,
            _ => grouped.push((prime, 1)),
        }
    }
    Ok(grouped)
}

/// Splits m >= 1 into 2^valuation * odd_part.
pub fn two_adic_split(m: u64) -> Result<TwoAdicSplit> {
    if m == 0 {
        return Err(Error::ZeroSplit);
    }
    let valuation = m.trailing_zeros();
    Ok(TwoAdicSplit {
        valuation,
        odd_part: m >> valuation,
    })
}

fn unit_check(y: u64, n: u64) -> Result<()> {
    let g = gcd_unchecked(y % n, n);
    if g != 1 {
        return Err(Error::NotAUnit { y, n, gcd: g });
    }
    Ok(())
}

/// The multiplicative order of y mod n, given a factorization of any
/// multiple of the group exponent (for n = pq that is lcm(p-1, q-1)).
/// Starts from the bound and divides out prime factors while the power
/// stays at 1; the result divides the bound.
pub fn multiplicative_order(y: u64, n: u64, exponent_bound: &Factorization) -> Result<u64> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { modulus: n });
    }
    unit_check(y, n)?;
    let mut order: u64 = exponent_bound
        .iter()
        .map(|&(p, e)| p.pow(e))
        .product();
    if mod_pow_unchecked(y, order, n) != 1 {
        return Err(Error::BadExponentBound { y, n });
    }
    for &(p, e) in exponent_bound {
        for _ in 0..e {
            if order.is_multiple_of(p) && mod_pow_unchecked(y, order / p, n) == 1 {
                order /= p;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// The multiplicative order of y mod n by successive multiplication.
/// O(order) products; the independent oracle for [`multiplicative_order`].
pub fn multiplicative_order_bruteforce(y: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { modulus: n });
    }
    unit_check(y, n)?;
    let y = y % n;
    let mut acc = y;
    let mut order = 1u64;
    while acc != 1 {
        acc = mul_mod(acc, y, n);
        order += 1;
    }
    Ok(order)
}

/// Carmichael's function lambda(n) from a factorization of n: the exponent
/// of the unit group, i.e. lcm over the prime-power components (with the
/// usual halving for 2^e, e >= 3).
pub fn group_exponent(factors: &Factorization) -> u64 {
    factors
        .iter()
        .map(|&(p, e)| match (p, e) {
            (2, 1) => 1,
            (2, 2) => 2,
            (2, e) => 1 << (e - 2),
            (p, e) => p.pow(e - 1) * (p - 1),
        })
        .fold(1, lcm)
}
