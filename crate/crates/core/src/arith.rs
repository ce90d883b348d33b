//! Small exact integer helpers: factorization, modular powers and orders.
//!
//! Inputs are desk-scale, so trial division is used throughout.

use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Prime factorization as ascending `(prime, multiplicity)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime factors with multiplicity, ascending.
pub fn prime_factors(n: u64) -> Vec<u64> {
    factorize(n)
        .into_iter()
        .flat_map(|(p, e)| std::iter::repeat_n(p, e as usize))
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Returns `(p, k)` with `q = p^k` when `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Multiplicative order of `a` modulo `n`; `None` when `gcd(a, n) != 1`.
pub fn multiplicative_order(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    if gcd(a % n, n) != 1 {
        return None;
    }
    let mut x = a % n;
    let mut k = 1;
    while x != 1 {
        x = (x as u128 * (a % n) as u128 % n as u128) as u64;
        k += 1;
    }
    Some(k)
}

/// Smallest primitive root of the prime `p`.
pub fn smallest_primitive_root(p: u64) -> Option<u64> {
    if !is_prime(p) {
        return None;
    }
    if p == 2 {
        return Some(1);
    }
    let factors = factorize(p - 1);
    (2..p).find(|&g| factors.iter().all(|&(f, _)| pow_mod(g, (p - 1) / f, p) != 1))
}

/// `1 + q + ... + q^(d-1)` reduced modulo `modulus`.
pub fn geometric_sum_mod(q: u128, d: u64, modulus: u128) -> u128 {
    let mut acc = 0u128;
    let q = q % modulus;
    let mut term = 1 % modulus;
    for _ in 0..d {
        acc = (acc + term) % modulus;
        term = mul_mod(term, q, modulus);
    }
    acc
}

/// `a * b mod n` without overflow for any `u128` inputs.
pub fn mul_mod(a: u128, b: u128, n: u128) -> u128 {
    let (mut a, mut b) = (a % n, b % n);
    if let Some(p) = a.checked_mul(b) {
        return p % n;
    }
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, n);
        }
        a = add_mod(a, a, n);
        b >>= 1;
    }
    acc
}

fn add_mod(a: u128, b: u128, n: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= n {
        s.wrapping_sub(n)
    } else {
        s
    }
}

/// Reduces a signed integer into `[0, modulus)`.
pub fn reduce(x: i128, modulus: u64) -> u64 {
    x.rem_euclid(modulus as i128) as u64
}

/// Reduces a decimal literal of arbitrary length, with optional sign, modulo `modulus`.
pub fn reduce_decimal(digits: &str, modulus: u64) -> Option<u64> {
    let (neg, body) = match digits.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, digits),
    };
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let m = modulus as u128;
    let r = body
        .bytes()
        .fold(0u128, |acc, b| (acc * 10 + (b - b'0') as u128) % m) as u64;
    Some(if neg { (modulus - r) % modulus } else { r })
}

/// Largest squarefree part bookkeeping: `n = s * f^2` with `s` squarefree (sign kept on `s`).
pub fn squarefree_part(n: i64) -> i64 {
    let sign = n.signum();
    let s: u64 = factorize(n.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product();
    sign * s as i64
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factorize(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(prime_factors(12), vec![2, 2, 3]);
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn orders_and_roots() {
        assert_eq!(multiplicative_order(7, 5), Some(4));
        assert_eq!(multiplicative_order(5, 3), Some(2));
        assert_eq!(multiplicative_order(6, 3), None);
        assert_eq!(smallest_primitive_root(7), Some(3));
        assert_eq!(smallest_primitive_root(13), Some(2));
        assert_eq!(smallest_primitive_root(9), None);
    }

    #[test]
    fn geometric_sums() {
        // q ≡ 1 mod m forces the sum to be d mod m
        for d in 1..8 {
            assert_eq!(geometric_sum_mod(7, d, 6), (d % 6) as u128);
            assert_eq!(geometric_sum_mod(13, d, 4), (d % 4) as u128);
        }
        assert_eq!(geometric_sum_mod(2, 3, 100), 7);
        assert_eq!(mul_mod(u128::MAX - 1, u128::MAX - 1, u128::MAX), 1);
    }

    #[test]
    fn decimal_reduction() {
        assert_eq!(reduce_decimal("123456789012345678901234567890", 7), Some((123456789012345678901234567890u128 % 7) as u64));
        assert_eq!(reduce_decimal("-1", 6), Some(5));
        assert_eq!(reduce_decimal("-12", 6), Some(0));
        assert_eq!(reduce_decimal("x", 6), None);
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(-12), -3);
        assert_eq!(squarefree_part(50), 2);
        assert!(is_squarefree(-30));
        assert!(!is_squarefree(18));
    }
}
