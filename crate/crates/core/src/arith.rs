//! Integer arithmetic shared by every other module: primality, integer
//! factorization (trial division followed by Brent's variant of Pollard rho)
//! and multiplicative orders.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Primes below this bound are removed by trial division before rho starts.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;
/// Iteration budget for Pollard rho, per composite cofactor.
pub const RHO_STEP_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("factorization budget exceeded while splitting {0}")]
    FactorBudgetExceeded(BigUint),
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("modulus must be at least 2")]
    BadModulus,
}

/// A factorization as sorted `(prime, exponent)` pairs.
pub type Factorization = Vec<(BigUint, u32)>;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_BOUND).into_iter().map(|p| p as u32).collect())
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse of `a` modulo the prime `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
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

const MR_BASES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

/// Strong probable-prime test to twenty fixed bases. Deterministic (and
/// proven) below 3.3e24; beyond that a strong pseudoprime to all twenty
/// bases is not known.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn insert_factor(out: &mut Factorization, p: BigUint, e: u32) {
    if let Some(slot) = out.iter_mut().find(|(q, _)| *q == p) {
        slot.1 += e;
    } else {
        out.push((p, e));
    }
}

/// Brent's cycle-finding variant of Pollard rho. Returns a nontrivial
/// factor of the odd composite `n` or `None` once `budget` steps are spent.
fn pollard_brent(n: &BigUint, rng: &mut ChaCha8Rng, budget: &mut u64) -> Option<BigUint> {
    let one = BigUint::one();
    loop {
        let c = BigUint::from(rng.gen_range(1u64..u64::MAX)) % n;
        let mut y = BigUint::from(rng.gen::<u64>()) % n;
        let m = 128u64;
        let mut g = one.clone();
        let mut r = 1u64;
        let mut q = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k = 0u64;
            while k < r && g == one {
                ys = y.clone();
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = (&y * &y + &c) % n;
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (&q * diff) % n;
                }
                *budget = budget.checked_sub(steps)?;
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            // Backtrack one step at a time from the saved position.
            loop {
                ys = (&ys * &ys + &c) % n;
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                *budget = budget.checked_sub(1)?;
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
}

/// Fully factor `n ≥ 1` by trial division up to [`TRIAL_DIVISION_BOUND`]
/// and then Pollard rho with at most [`RHO_STEP_BUDGET`] steps per
/// composite cofactor. Randomness comes only from `seed`.
pub fn factorize(n: &BigUint, seed: u64) -> Result<Factorization, ArithError> {
    let mut out: Factorization = Vec::new();
    if n.is_zero() {
        return Err(ArithError::BadModulus);
    }
    let mut rest = n.clone();
    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        let p64 = p as u64;
        if let Some(r) = rest.to_u64() {
            if p64.saturating_mul(p64) > r {
                break;
            }
        }
        let mut e = 0;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            out.push((BigUint::from(p), e));
        }
    }
    if !rest.is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_prime(&m) {
                insert_factor(&mut out, m, 1);
                continue;
            }
            if let Some(root) = exact_sqrt(&m) {
                stack.push(root.clone());
                stack.push(root);
                continue;
            }
            let mut budget = RHO_STEP_BUDGET;
            match pollard_brent(&m, &mut rng, &mut budget) {
                Some(f) => {
                    let cof = &m / &f;
                    stack.push(f);
                    stack.push(cof);
                }
                None => return Err(ArithError::FactorBudgetExceeded(m)),
            }
        }
    }
    out.sort();
    Ok(out)
}

fn exact_sqrt(n: &BigUint) -> Option<BigUint> {
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// Multiplicative order of `base` modulo the prime `ell`, by divisor descent
/// on the factorization of `ell - 1`.
pub fn multiplicative_order(base: &BigUint, ell: &BigUint, seed: u64) -> Result<BigUint, ArithError> {
    if *ell < BigUint::from(2u32) {
        return Err(ArithError::BadModulus);
    }
    let b = base % ell;
    if b.is_zero() {
        return Err(ArithError::BadModulus);
    }
    let group = ell - 1u32;
    let mut order = group.clone();
    for (s, _) in factorize(&group, seed)? {
        while (&order % &s).is_zero() {
            let candidate = &order / &s;
            if b.modpow(&candidate, ell).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Divisor descent on a known multiple: the order of an element `x` with
/// `x^exponent = 1`, given `exponent`'s prime factorization and an
/// exponentiation oracle deciding whether `x^e` is the identity.
pub fn order_by_descent<F>(exponent: &BigUint, factors: &Factorization, mut is_identity_at: F) -> BigUint
where
    F: FnMut(&BigUint) -> bool,
{
    let mut order = exponent.clone();
    for (s, _) in factors {
        while (&order % s).is_zero() {
            let candidate = &order / s;
            if is_identity_at(&candidate) {
                order = candidate;
            } else {
                break;
            }
        }
    }
    order
}

/// `p^a + s` for `s ∈ {+1, -1}`.
pub fn pow_plus_sign(p: u64, a: u32, s: i8) -> BigUint {
    let base = BigUint::from(p).pow(a);
    if s > 0 {
        base + 1u32
    } else {
        base - 1u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let sieve: std::collections::HashSet<u64> = primes_up_to(5000).into_iter().collect();
        for n in 0..5000u64 {
            assert_eq!(is_prime_u64(n), sieve.contains(&n), "n={n}");
            assert_eq!(is_prime(&big(n)), sieve.contains(&n), "n={n}");
        }
    }

    #[test]
    fn primality_large() {
        // 2^89 - 1 is a Mersenne prime, 2^67 - 1 is not.
        let m89 = (BigUint::one() << 89u32) - 1u32;
        let m67 = (BigUint::one() << 67u32) - 1u32;
        assert!(is_prime(&m89));
        assert!(!is_prime(&m67));
    }

    #[test]
    fn factorize_needs_rho() {
        // 2^67 - 1 = 193707721 · 761838257287, both beyond trial division.
        let m67 = (BigUint::one() << 67u32) - 1u32;
        let f = factorize(&m67, 7).unwrap();
        assert_eq!(f, vec![(big(193_707_721), 1), (big(761_838_257_287), 1)]);
    }

    #[test]
    fn factorize_reconstructs() {
        for n in [1u64, 2, 12, 97, 1024, 3 * 3 * 1_000_003 * 1_000_003, 600851475143] {
            let f = factorize(&big(n), 0).unwrap();
            let prod = f.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
            assert_eq!(prod, big(n));
            assert!(f.iter().all(|(p, _)| is_prime(p)));
        }
    }

    #[test]
    fn orders_mod_prime() {
        assert_eq!(multiplicative_order(&big(3), &big(41), 0).unwrap(), big(8));
        assert_eq!(multiplicative_order(&big(7), &big(5), 0).unwrap(), big(4));
        assert_eq!(multiplicative_order(&big(3), &big(7), 0).unwrap(), big(6));
        assert_eq!(multiplicative_order(&big(1), &big(7), 0).unwrap(), big(1));
        assert!(multiplicative_order(&big(7), &big(7), 0).is_err());
    }
}
