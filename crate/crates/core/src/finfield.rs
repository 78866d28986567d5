//! Arithmetic in `F_q = F_p[x]/(g)` for odd `p`, and univariate
//! polynomial factorization over `F_p`.
//!
//! Polynomials over `F_p` are dense coefficient vectors, lowest degree
//! first, with no trailing zeros (the zero polynomial is the empty vector).

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, ArithError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero input where a unit is required")]
    ZeroInput,
    #[error("characteristic must be an odd prime, got {0}")]
    BadCharacteristic(u64),
    #[error("modulus is not monic irreducible over F_{0}")]
    NotIrreducible(u64),
    #[error("element does not belong to this field")]
    ForeignElement,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Polynomial utilities over the prime field `F_p`.
pub mod poly {
    use super::*;

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn degree(f: &[u64]) -> Option<usize> {
        if f.is_empty() {
            None
        } else {
            Some(f.len() - 1)
        }
    }

    pub fn from_ints(coeffs: &[i64], p: u64) -> Vec<u64> {
        let mut v: Vec<u64> = coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
        trim(&mut v);
        v
    }

    pub fn add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> =
            (0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect();
        trim(&mut out);
        out
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> =
            (0..n).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect();
        trim(&mut out);
        out
    }

    pub fn scale(a: &[u64], c: u64, p: u64) -> Vec<u64> {
        let mut out: Vec<u64> = a.iter().map(|&x| arith::mul_mod(x, c, p)).collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + arith::mul_mod(x, y, p)) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        assert!(!b.is_empty(), "polynomial division by zero");
        let mut rem = a.to_vec();
        trim(&mut rem);
        if rem.len() < b.len() {
            return (Vec::new(), rem);
        }
        let lead_inv = arith::inv_mod(*b.last().unwrap(), p);
        let mut quot = vec![0u64; rem.len() - b.len() + 1];
        while rem.len() >= b.len() && !rem.is_empty() {
            let shift = rem.len() - b.len();
            let c = arith::mul_mod(*rem.last().unwrap(), lead_inv, p);
            quot[shift] = c;
            for (i, &bc) in b.iter().enumerate() {
                let t = arith::mul_mod(bc, c, p);
                rem[shift + i] = (rem[shift + i] + p - t) % p;
            }
            trim(&mut rem);
        }
        trim(&mut quot);
        (quot, rem)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        divrem(a, b, p).1
    }

    pub fn monic(a: &[u64], p: u64) -> Vec<u64> {
        match a.last() {
            None => Vec::new(),
            Some(&lead) => scale(a, arith::inv_mod(lead, p), p),
        }
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        monic(&x, p)
    }

    pub fn derivative(a: &[u64], p: u64) -> Vec<u64> {
        let mut out: Vec<u64> =
            a.iter().enumerate().skip(1).map(|(i, &c)| arith::mul_mod(c, i as u64 % p, p)).collect();
        trim(&mut out);
        out
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(base: &[u64], exp: &BigUint, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, p);
        let b = rem(base, m, p);
        for i in (0..exp.bits()).rev() {
            acc = mulmod(&acc, &acc, m, p);
            if exp.bit(i) {
                acc = mulmod(&acc, &b, m, p);
            }
        }
        acc
    }

    /// Rabin's test: monic `f` of degree `r ≥ 1` is irreducible iff
    /// `x^(p^r) ≡ x (mod f)` and `gcd(x^(p^(r/s)) - x, f) = 1` for every
    /// prime `s | r`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let r = match degree(f) {
            Some(0) | None => return false,
            Some(r) => r,
        };
        if r == 1 {
            return true;
        }
        let x = vec![0, 1];
        let pb = BigUint::from(p);
        let frob = |k: usize| -> Vec<u64> {
            let mut h = x.clone();
            for _ in 0..k {
                h = powmod(&h, &pb, f, p);
            }
            h
        };
        if sub(&frob(r), &x, p) != Vec::<u64>::new() {
            return false;
        }
        for (s, _) in arith::factorize(&BigUint::from(r as u64), 0).expect("small") {
            let s: usize = s.try_into().expect("small");
            let h = sub(&frob(r / s), &x, p);
            if gcd(&h, f, p) != vec![1] {
                return false;
            }
        }
        true
    }

    fn pth_root(f: &[u64], p: u64) -> Vec<u64> {
        let mut out: Vec<u64> = f.iter().step_by(p as usize).copied().collect();
        trim(&mut out);
        out
    }

    /// Squarefree decomposition of a monic polynomial.
    pub fn squarefree(f: &[u64], p: u64) -> Vec<(Vec<u64>, u32)> {
        let mut out = Vec::new();
        if degree(f).unwrap_or(0) == 0 {
            return out;
        }
        let mut c = gcd(f, &derivative(f, p), p);
        let mut w = divrem(f, &c, p).0;
        let mut i = 1u32;
        while w != vec![1] {
            let y = gcd(&w, &c, p);
            let fac = divrem(&w, &y, p).0;
            if degree(&fac).unwrap_or(0) > 0 {
                out.push((monic(&fac, p), i));
            }
            w = y;
            c = divrem(&c, &w, p).0;
            i += 1;
        }
        if degree(&c).unwrap_or(0) > 0 {
            let root = monic(&pth_root(&c, p), p);
            for (g, j) in squarefree(&root, p) {
                out.push((g, j * p as u32));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic squarefree polynomial:
    /// pairs `(product of all irreducible factors of degree d, d)`.
    pub fn distinct_degree(f: &[u64], p: u64) -> Vec<(Vec<u64>, usize)> {
        let mut out = Vec::new();
        let mut rest = f.to_vec();
        let x = vec![0, 1];
        let pb = BigUint::from(p);
        let mut h = rem(&x, &rest, p);
        let mut d = 0;
        while degree(&rest).unwrap_or(0) >= 2 * (d + 1) {
            d += 1;
            h = powmod(&h, &pb, &rest, p);
            let g = gcd(&sub(&h, &x, p), &rest, p);
            if degree(&g).unwrap_or(0) > 0 {
                rest = divrem(&rest, &g, p).0;
                h = rem(&h, &rest, p);
                out.push((g, d));
            }
        }
        if degree(&rest).unwrap_or(0) > 0 {
            let d = degree(&rest).unwrap();
            out.push((monic(&rest, p), d));
        }
        out
    }

    /// Cantor–Zassenhaus equal-degree splitting (odd `p`).
    pub fn equal_degree(f: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
        let n = degree(f).unwrap_or(0);
        if n <= d {
            return vec![monic(f, p)];
        }
        let exp = (BigUint::from(p).pow(d as u32) - 1u32) >> 1u32;
        loop {
            let mut a: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
            trim(&mut a);
            if degree(&a).unwrap_or(0) == 0 {
                continue;
            }
            let b = sub(&powmod(&a, &exp, f, p), &[1], p);
            let g = gcd(&b, f, p);
            let dg = degree(&g).unwrap_or(0);
            if dg > 0 && dg < n {
                let cof = divrem(f, &g, p).0;
                let mut out = equal_degree(&g, d, p, rng);
                out.extend(equal_degree(&monic(&cof, p), d, p, rng));
                return out;
            }
        }
    }
}

/// Factor a nonzero polynomial over `F_p` into monic irreducibles with
/// multiplicity. The leading unit is dropped. Output is sorted by degree
/// and then by coefficient vector, and is independent of `seed`.
pub fn factor_poly_mod_p(p: u64, f: &[u64], seed: u64) -> Result<Vec<(Vec<u64>, u32)>, FieldError> {
    if p.is_multiple_of(2) || !arith::is_prime_u64(p) {
        return Err(FieldError::BadCharacteristic(p));
    }
    let mut f = f.to_vec();
    poly::trim(&mut f);
    if f.is_empty() {
        return Err(FieldError::ZeroInput);
    }
    let f = poly::monic(&f, p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (sq, mult) in poly::squarefree(&f, p) {
        for (g, d) in poly::distinct_degree(&sq, p) {
            for h in poly::equal_degree(&g, d, p, &mut rng) {
                out.push((h, mult));
            }
        }
    }
    out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    Ok(out)
}

/// The field `F_p[x]/(modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FqContext {
    p: u64,
    modulus: Vec<u64>,
}

/// An element of some [`FqContext`]: exactly `r` residues mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FqElem {
    coeffs: Vec<u64>,
}

impl FqElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

impl FqContext {
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self, FieldError> {
        if p.is_multiple_of(2) || !arith::is_prime_u64(p) {
            return Err(FieldError::BadCharacteristic(p));
        }
        let mut modulus = modulus;
        poly::trim(&mut modulus);
        if modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) || !poly::is_irreducible(&modulus, p) {
            return Err(FieldError::NotIrreducible(p));
        }
        Ok(Self { p, modulus })
    }

    /// `F_p` itself, modulus `x`.
    pub fn prime_field(p: u64) -> Result<Self, FieldError> {
        Self::new(p, vec![0, 1])
    }

    /// Some field with `p^r` elements: the modulus is the first monic
    /// irreducible of degree `r` in enumeration order.
    pub fn of_degree(p: u64, r: usize) -> Result<Self, FieldError> {
        if r == 1 {
            return Self::prime_field(p);
        }
        if p.is_multiple_of(2) || !arith::is_prime_u64(p) {
            return Err(FieldError::BadCharacteristic(p));
        }
        let count = p.checked_pow(r as u32).ok_or(FieldError::BadCharacteristic(p))?;
        for idx in 0..count {
            let mut f: Vec<u64> = (0..r).map(|i| idx / p.pow(i as u32) % p).collect();
            f.push(1);
            if poly::is_irreducible(&f, p) {
                return Self::new(p, f);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field size `p^r`.
    pub fn q(&self) -> BigUint {
        BigUint::from(self.p).pow(self.r() as u32)
    }

    /// Field size as a machine integer, when it fits.
    pub fn q_u64(&self) -> Option<u64> {
        self.p.checked_pow(self.r() as u32)
    }

    fn wrap(&self, mut v: Vec<u64>) -> FqElem {
        v.resize(self.r(), 0);
        FqElem { coeffs: v }
    }

    fn poly_of<'a>(&self, a: &'a FqElem) -> &'a [u64] {
        let mut n = a.coeffs.len();
        while n > 0 && a.coeffs[n - 1] == 0 {
            n -= 1;
        }
        &a.coeffs[..n]
    }

    /// Element from a polynomial in the generator, reduced mod the modulus.
    pub fn from_poly(&self, coeffs: &[u64]) -> FqElem {
        let mut v: Vec<u64> = coeffs.iter().map(|c| c % self.p).collect();
        poly::trim(&mut v);
        self.wrap(poly::rem(&v, &self.modulus, self.p))
    }

    /// Checked constructor from raw residues.
    pub fn elem(&self, coeffs: &[u64]) -> Result<FqElem, FieldError> {
        if coeffs.len() != self.r() || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::ForeignElement);
        }
        Ok(FqElem { coeffs: coeffs.to_vec() })
    }

    pub fn from_u64(&self, c: u64) -> FqElem {
        self.from_poly(&[c % self.p])
    }

    pub fn from_i64(&self, c: i64) -> FqElem {
        self.from_u64(c.rem_euclid(self.p as i64) as u64)
    }

    pub fn zero(&self) -> FqElem {
        self.wrap(Vec::new())
    }

    pub fn one(&self) -> FqElem {
        self.from_u64(1)
    }

    /// The class of `x`.
    pub fn generator_class(&self) -> FqElem {
        self.from_poly(&[0, 1])
    }

    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    pub fn contains(&self, a: &FqElem) -> bool {
        a.coeffs.len() == self.r() && a.coeffs.iter().all(|&c| c < self.p)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let v = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x + y) % self.p).collect();
        FqElem { coeffs: v }
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let v = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x + self.p - y) % self.p).collect();
        FqElem { coeffs: v }
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        let v = a.coeffs.iter().map(|x| (self.p - x) % self.p).collect();
        FqElem { coeffs: v }
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        if self.r() == 1 {
            return FqElem { coeffs: vec![arith::mul_mod(a.coeffs[0], b.coeffs[0], self.p)] };
        }
        let prod = poly::mul(self.poly_of(a), self.poly_of(b), self.p);
        self.wrap(poly::rem(&prod, &self.modulus, self.p))
    }

    pub fn square(&self, a: &FqElem) -> FqElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &FqElem, exp: &BigUint) -> FqElem {
        let mut acc = self.one();
        for i in (0..exp.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if exp.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn pow_u64(&self, a: &FqElem, exp: u64) -> FqElem {
        self.pow(a, &BigUint::from(exp))
    }

    pub fn inv(&self, a: &FqElem) -> Result<FqElem, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, &(self.q() - 2u32)))
    }

    pub fn div(&self, a: &FqElem, b: &FqElem) -> Result<FqElem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Euler's criterion: `a^((q-1)/2) = 1`.
    pub fn is_square(&self, a: &FqElem) -> Result<bool, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::ZeroInput);
        }
        let e = (self.q() - 1u32) >> 1u32;
        Ok(self.pow(a, &e) == self.one())
    }

    /// A square root by Tonelli–Shanks, or `None` for nonsquares.
    pub fn sqrt(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a).ok()? {
            return None;
        }
        let q1 = self.q() - 1u32;
        let s = q1.trailing_zeros().unwrap_or(0);
        let t = &q1 >> s;
        let z = (1..)
            .map(|i| self.from_index(i))
            .find(|z| !self.is_square(z).unwrap_or(true))
            .expect("nonsquares exist in odd characteristic");
        let mut m = s;
        let mut c = self.pow(&z, &t);
        let mut x = self.pow(a, &((&t + 1u32) >> 1u32));
        let mut b = self.pow(a, &t);
        let one = self.one();
        while b != one {
            let mut i = 0;
            let mut bb = b.clone();
            while bb != one {
                bb = self.square(&bb);
                i += 1;
            }
            let mut w = c.clone();
            for _ in 0..(m - i - 1) {
                w = self.square(&w);
            }
            x = self.mul(&x, &w);
            c = self.square(&w);
            b = self.mul(&b, &c);
            m = i;
        }
        Some(x)
    }

    /// Enumeration order: index `i = Σ c_j p^j`.
    pub fn from_index(&self, mut idx: u64) -> FqElem {
        let mut v = Vec::with_capacity(self.r());
        for _ in 0..self.r() {
            v.push(idx % self.p);
            idx /= self.p;
        }
        FqElem { coeffs: v }
    }

    pub fn index_of(&self, a: &FqElem) -> u64 {
        a.coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    /// Every field element in enumeration order (small fields only).
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        let q = self.q_u64().expect("field too large to enumerate");
        (0..q).map(move |i| self.from_index(i))
    }

    pub fn random(&self, rng: &mut impl Rng) -> FqElem {
        FqElem { coeffs: (0..self.r()).map(|_| rng.gen_range(0..self.p)).collect() }
    }

    pub fn random_nonzero(&self, rng: &mut impl Rng) -> FqElem {
        loop {
            let a = self.random(rng);
            if !self.is_zero(&a) {
                return a;
            }
        }
    }

    /// Factorization of `q - 1`.
    pub fn unit_group_factors(&self) -> Result<arith::Factorization, FieldError> {
        Ok(arith::factorize(&(self.q() - 1u32), 0)?)
    }

    /// Exact multiplicative order by divisor descent on `q - 1`.
    pub fn element_order(&self, a: &FqElem) -> Result<BigUint, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::ZeroInput);
        }
        let n = self.q() - 1u32;
        let factors = self.unit_group_factors()?;
        let one = self.one();
        Ok(arith::order_by_descent(&n, &factors, |e| self.pow(a, e) == one))
    }

    /// The first element in enumeration order whose multiplicative order
    /// is `q - 1`.
    pub fn multiplicative_generator(&self) -> Result<FqElem, FieldError> {
        let n = self.q() - 1u32;
        let factors = self.unit_group_factors()?;
        let one = self.one();
        let mut idx = 1u64;
        loop {
            let a = self.from_index(idx);
            if factors.iter().all(|(s, _)| self.pow(&a, &(&n / s)) != one) {
                return Ok(a);
            }
            idx += 1;
        }
    }

    /// Render an element as integer residues, lowest power first.
    pub fn to_ints(&self, a: &FqElem) -> Vec<u64> {
        a.coeffs.clone()
    }
}

impl std::fmt::Display for FqContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.r() == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.r())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> FqContext {
        FqContext::prime_field(7).unwrap()
    }

    fn f9() -> FqContext {
        FqContext::new(3, vec![1, 0, 1]).unwrap()
    }

    #[test]
    fn basic_ops() {
        let k = f7();
        assert_eq!(k.mul(&k.from_u64(3), &k.from_u64(5)), k.one());
        assert_eq!(k.pow_u64(&k.from_u64(3), 6), k.one());
        let k9 = f9();
        let x = k9.generator_class();
        assert_eq!(k9.mul(&x, &x), k9.from_u64(2));
        assert_eq!(k.inv(&k.zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn rejects_bad_context() {
        assert!(FqContext::prime_field(2).is_err());
        assert!(FqContext::prime_field(9).is_err());
        // x^2 + 1 splits mod 5.
        assert!(FqContext::new(5, vec![1, 0, 1]).is_err());
    }

    #[test]
    fn squares() {
        let k = f7();
        assert!(k.is_square(&k.from_u64(4)).unwrap());
        assert!(!k.is_square(&k.from_u64(3)).unwrap());
        assert_eq!(k.is_square(&k.zero()), Err(FieldError::ZeroInput));
        let k9 = f9();
        let g = k9.multiplicative_generator().unwrap();
        assert!(!k9.is_square(&g).unwrap());
    }

    #[test]
    fn sqrt_roundtrip() {
        for k in [f7(), f9(), FqContext::of_degree(5, 2).unwrap(), FqContext::prime_field(17).unwrap()] {
            for a in k.elements().skip(1) {
                match k.sqrt(&a) {
                    Some(s) => assert_eq!(k.square(&s), a),
                    None => assert!(!k.is_square(&a).unwrap()),
                }
            }
        }
    }

    #[test]
    fn generators_and_orders() {
        let k = f7();
        assert_eq!(k.multiplicative_generator().unwrap(), k.from_u64(3));
        assert_eq!(FqContext::prime_field(3).unwrap().multiplicative_generator().unwrap().coeffs(), &[2]);
        assert_eq!(k.element_order(&k.from_u64(3)).unwrap(), BigUint::from(6u32));
        assert_eq!(k.element_order(&k.from_u64(2)).unwrap(), BigUint::from(3u32));
        assert_eq!(k.element_order(&k.one()).unwrap(), BigUint::from(1u32));
        let k25 = FqContext::of_degree(5, 2).unwrap();
        let g = k25.multiplicative_generator().unwrap();
        assert_eq!(k25.element_order(&g).unwrap(), BigUint::from(24u32));
        for s in [2u32, 3] {
            assert_ne!(k25.pow(&g, &BigUint::from(24 / s)), k25.one());
        }
    }

    #[test]
    fn factor_examples() {
        assert_eq!(
            factor_poly_mod_p(7, &poly::from_ints(&[-2, 0, 1], 7), 0).unwrap(),
            vec![(vec![3, 1], 1), (vec![4, 1], 1)]
        );
        assert_eq!(factor_poly_mod_p(5, &poly::from_ints(&[-2, 0, 1], 5), 0).unwrap(), vec![(vec![3, 0, 1], 1)]);
        assert_eq!(factor_poly_mod_p(3, &[0, 0, 1], 0).unwrap(), vec![(vec![0, 1], 2)]);
    }

    #[test]
    fn factor_inseparable_part() {
        // (x^3 + 2)^3 (x + 1) over F_3; x^3 + 2 = (x + 2)^3.
        let p = 3;
        let cube = poly::mul(&poly::mul(&[2, 0, 0, 1], &[2, 0, 0, 1], p), &[2, 0, 0, 1], p);
        let f = poly::mul(&cube, &[1, 1], p);
        let got = factor_poly_mod_p(p, &f, 3).unwrap();
        assert_eq!(got, vec![(vec![1, 1], 1), (vec![2, 1], 9)]);
    }
}
