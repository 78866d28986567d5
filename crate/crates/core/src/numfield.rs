//! Totally real number fields `Q(θ) = Q[x]/(f)` for a monic irreducible
//! integer polynomial `f`, with the ring of integers modelled as `Z[θ]`.
//!
//! Real embeddings are carried as disjoint rational isolating intervals
//! found with Sturm sequences; all field arithmetic is exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::finfield::{self, poly, FieldError, FqContext, FqElem};

/// Number of odd primes tried when certifying irreducibility modulo `p`.
pub const IRREDUCIBILITY_PRIMES: usize = 25;
/// Candidate cap for the exhaustive integer factor search.
const FACTOR_SEARCH_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumFieldError {
    #[error("polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is reducible over Q")]
    ReduciblePolynomial,
    #[error("could not decide irreducibility within the search budget")]
    IrreducibilityUndecided,
    #[error("p = 2 is excluded (dyadic prime)")]
    DyadicPrime,
    #[error("p = {0} divides the polynomial discriminant")]
    BadPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("a coefficient denominator is divisible by p = {0}")]
    DenominatorNotCoprime(u64),
    #[error("no prime up to {0} has two factors of equal residue degree")]
    NoSplitPrimeInBound(u64),
    #[error("the field is Q; a split prime pair needs degree at least 2")]
    FieldIsRationals,
    #[error("element has {got} coefficients, field degree is {want}")]
    WrongLength { got: usize, want: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Horner evaluation of an integer polynomial at a rational point.
fn eval_int_poly(f: &[i64], x: &BigRational) -> BigRational {
    f.iter().rev().fold(BigRational::zero(), |acc, &c| acc * x + rat(c))
}

fn eval_rat_poly(f: &[BigRational], x: &BigRational) -> BigRational {
    f.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn trim_rat(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn rat_poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim_rat(&mut r);
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &c * bc;
        }
        r.pop();
        trim_rat(&mut r);
    }
    r
}

fn rat_poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_rat(&mut out);
    out
}

/// Fraction-free Gaussian elimination (Bareiss) for an integer determinant.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two integer polynomials (low-to-high) via the Sylvester matrix.
fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in f.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in g.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    bareiss_det(rows)
}

/// Discriminant of a monic integer polynomial: `(-1)^(d(d-1)/2) Res(f, f')`.
pub fn poly_discriminant(f: &[i64]) -> BigInt {
    let d = f.len() - 1;
    if d <= 1 {
        return BigInt::one();
    }
    let fb: Vec<BigInt> = f.iter().map(|&c| BigInt::from(c)).collect();
    let df: Vec<BigInt> = fb.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let res = resultant(&fb, &df);
    if (d * (d - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

/// A rational interval `(lo, hi]` containing exactly one real root of the
/// defining polynomial; `lo == hi` only for a rational root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rat(2)
    }

    pub fn approx(&self) -> f64 {
        let mid = self.midpoint();
        mid.numer().to_f64().unwrap_or(f64::NAN) / mid.denom().to_f64().unwrap_or(f64::NAN)
    }

    /// Halve the interval, keeping the half with the sign change of `f`.
    pub fn bisect(&self, f: &[i64]) -> RootInterval {
        if self.lo == self.hi {
            return self.clone();
        }
        let mid = self.midpoint();
        let fm = eval_int_poly(f, &mid);
        if fm.is_zero() {
            return RootInterval { lo: mid.clone(), hi: mid };
        }
        let flo = eval_int_poly(f, &self.lo);
        if flo.is_positive() != fm.is_positive() && !flo.is_zero() {
            RootInterval { lo: self.lo.clone(), hi: mid }
        } else {
            RootInterval { lo: mid, hi: self.hi.clone() }
        }
    }
}

/// Sturm chain of `f`.
fn sturm_chain(f: &[i64]) -> Vec<Vec<BigRational>> {
    let f0: Vec<BigRational> = f.iter().map(|&c| rat(c)).collect();
    let f1: Vec<BigRational> = f0.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect();
    let mut chain = vec![f0, f1];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = rat_poly_rem(&chain[n - 2], &chain[n - 1]);
        let neg: Vec<BigRational> = r.into_iter().map(|c| -c).collect();
        if neg.is_empty() {
            break;
        }
        chain.push(neg);
    }
    chain
}

fn sign_changes(chain: &[Vec<BigRational>], x: &BigRational) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            let v = eval_rat_poly(p, x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Isolate all real roots of a squarefree integer polynomial.
pub fn isolate_real_roots(f: &[i64]) -> Vec<RootInterval> {
    let d = f.len() - 1;
    if d == 1 {
        let root = BigRational::new(BigInt::from(-f[0]), BigInt::from(f[1]));
        return vec![RootInterval { lo: root.clone(), hi: root }];
    }
    let lead = f[d].abs();
    let cauchy = 1 + f[..d].iter().map(|c| (c.abs() + lead - 1) / lead).max().unwrap_or(0);
    let chain = sturm_chain(f);
    let mut out = Vec::new();
    let mut stack = vec![(rat(-cauchy), rat(cauchy))];
    while let Some((lo, hi)) = stack.pop() {
        let count = sign_changes(&chain, &lo) - sign_changes(&chain, &hi);
        match count {
            0 => {}
            1 if !eval_int_poly(f, &hi).is_zero() && !eval_int_poly(f, &lo).is_zero() => {
                out.push(RootInterval { lo, hi });
            }
            _ => {
                let mid = (&lo + &hi) / rat(2);
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// How irreducibility over `Q` was established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum IrreducibilityWitness {
    Linear,
    /// Irreducible modulo this prime.
    ModPrime {
        p: u64,
    },
    /// No proper factor degree is compatible with the factorization
    /// patterns modulo these primes.
    DegreePatterns {
        primes: Vec<u64>,
    },
    /// Every monic integer candidate factor within the coefficient bound
    /// was tried.
    ExhaustiveSearch {
        coefficient_bound: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberField {
    min_poly: Vec<i64>,
    poly_disc: BigInt,
    real_roots: Vec<RootInterval>,
    irreducibility: IrreducibilityWitness,
}

fn subset_sums(degs: &[usize]) -> Vec<bool> {
    let total: usize = degs.iter().sum();
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &d in degs {
        for s in (d..=total).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Exact division of monic integer polynomials; `None` if `g ∤ f`.
fn int_poly_div(f: &[i64], g: &[i64]) -> Option<Vec<i64>> {
    let mut r: Vec<i128> = f.iter().map(|&c| c as i128).collect();
    let dg = g.len() - 1;
    let mut q = vec![0i128; f.len() - dg];
    for shift in (0..q.len()).rev() {
        let c = r[shift + dg];
        q[shift] = c;
        for (i, &gc) in g.iter().enumerate() {
            r[shift + i] = r[shift + i].checked_sub(c.checked_mul(gc as i128)?)?;
        }
    }
    if r[..dg].iter().all(|&c| c == 0) {
        q.into_iter().map(|c| i64::try_from(c).ok()).collect()
    } else {
        None
    }
}

fn divisors(n: i64) -> Vec<i64> {
    let n = n.unsigned_abs();
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            out.push(i as i64);
            if i * i != n {
                out.push((n / i) as i64);
            }
        }
        i += 1;
    }
    out.sort();
    out
}

fn certify_irreducible(f: &[i64], disc: &BigInt) -> Result<IrreducibilityWitness, NumFieldError> {
    let d = f.len() - 1;
    if d == 1 {
        return Ok(IrreducibilityWitness::Linear);
    }
    if f[0] == 0 {
        return Err(NumFieldError::ReduciblePolynomial);
    }
    let primes: Vec<u64> = arith::primes_up_to(10_000)
        .into_iter()
        .filter(|&p| p > 2 && !(disc % BigInt::from(p)).is_zero())
        .take(IRREDUCIBILITY_PRIMES)
        .collect();
    let mut allowed: Vec<bool> = vec![true; d / 2 + 1];
    for &p in &primes {
        let fp = poly::from_ints(f, p);
        let factors = finfield::factor_poly_mod_p(p, &fp, 0)?;
        if factors.len() == 1 && factors[0].1 == 1 {
            return Ok(IrreducibilityWitness::ModPrime { p });
        }
        let degs: Vec<usize> =
            factors.iter().flat_map(|(g, e)| std::iter::repeat_n(g.len() - 1, *e as usize)).collect();
        let reach = subset_sums(&degs);
        for (k, ok) in allowed.iter_mut().enumerate() {
            *ok &= reach[k];
        }
    }
    if allowed.iter().skip(1).all(|ok| !ok) {
        return Ok(IrreducibilityWitness::DegreePatterns { primes });
    }
    let norm = f.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt().ceil() as u64;
    let mut budget = FACTOR_SEARCH_BUDGET;
    let mut max_bound = 0;
    for k in (1..=d / 2).filter(|&k| allowed[k]) {
        let bounds: Vec<i64> = (0..k).map(|i| (binomial(k as u64, i as u64) * norm) as i64).collect();
        max_bound = max_bound.max(*bounds.iter().max().unwrap() as u64);
        for c0 in divisors(f[0]).into_iter().flat_map(|c| [c, -c]) {
            if c0.abs() > bounds[0] {
                continue;
            }
            let mut g = vec![0i64; k + 1];
            g[0] = c0;
            g[k] = 1;
            for i in 1..k {
                g[i] = -bounds[i];
            }
            loop {
                budget = budget.checked_sub(1).ok_or(NumFieldError::IrreducibilityUndecided)?;
                if int_poly_div(f, &g).is_some() {
                    return Err(NumFieldError::ReduciblePolynomial);
                }
                let mut i = 1;
                while i < k {
                    if g[i] < bounds[i] {
                        g[i] += 1;
                        break;
                    }
                    g[i] = -bounds[i];
                    i += 1;
                }
                if i >= k {
                    break;
                }
            }
        }
    }
    Ok(IrreducibilityWitness::ExhaustiveSearch { coefficient_bound: max_bound })
}

impl NumberField {
    /// Build `Q[x]/(f)` from integer coefficients, lowest degree first.
    pub fn new(coeffs: &[i64]) -> Result<Self, NumFieldError> {
        let mut f = coeffs.to_vec();
        while f.len() > 1 && f.last() == Some(&0) {
            f.pop();
        }
        if f.len() < 2 {
            return Err(NumFieldError::ConstantPolynomial);
        }
        if f.last() != Some(&1) {
            return Err(NumFieldError::NotMonic);
        }
        let poly_disc = poly_discriminant(&f);
        if poly_disc.is_zero() {
            return Err(NumFieldError::ReduciblePolynomial);
        }
        let irreducibility = certify_irreducible(&f, &poly_disc)?;
        let real_roots = isolate_real_roots(&f);
        Ok(Self { min_poly: f, poly_disc, real_roots, irreducibility })
    }

    pub fn min_poly(&self) -> &[i64] {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn poly_disc(&self) -> &BigInt {
        &self.poly_disc
    }

    pub fn real_roots(&self) -> &[RootInterval] {
        &self.real_roots
    }

    pub fn irreducibility(&self) -> &IrreducibilityWitness {
        &self.irreducibility
    }

    pub fn is_totally_real(&self) -> bool {
        self.real_roots.len() == self.degree()
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { coeffs: vec![BigRational::zero(); self.degree()] }
    }

    pub fn one(&self) -> FieldElem {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, c: BigRational) -> FieldElem {
        let mut e = self.zero();
        e.coeffs[0] = c;
        e
    }

    pub fn from_int(&self, c: i64) -> FieldElem {
        self.from_rational(rat(c))
    }

    /// The generator `θ`.
    pub fn theta(&self) -> FieldElem {
        self.elem(vec![BigRational::zero(), BigRational::one()])
    }

    /// Element from coefficients in powers of `θ`, reduced mod the minimal
    /// polynomial.
    pub fn elem(&self, coeffs: Vec<BigRational>) -> FieldElem {
        let f: Vec<BigRational> = self.min_poly.iter().map(|&c| rat(c)).collect();
        let mut r = rat_poly_rem(&coeffs, &f);
        r.resize(self.degree(), BigRational::zero());
        FieldElem { coeffs: r }
    }

    /// Strict constructor: exactly `degree` coefficients.
    pub fn elem_exact(&self, coeffs: Vec<BigRational>) -> Result<FieldElem, NumFieldError> {
        if coeffs.len() != self.degree() {
            return Err(NumFieldError::WrongLength { got: coeffs.len(), want: self.degree() });
        }
        Ok(FieldElem { coeffs })
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem { coeffs: a.coeffs.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.elem(rat_poly_mul(&a.coeffs, &b.coeffs))
    }

    /// Sign of `a` at the real place `place` (an index into
    /// [`real_roots`](Self::real_roots)), refining a local copy of the
    /// isolating interval until interval evaluation excludes zero.
    /// Returns `None` exactly when `a = 0`.
    pub fn sign_at(&self, a: &FieldElem, place: usize) -> Option<Ordering> {
        self.sign_at_with_interval(a, place).map(|(s, _)| s)
    }

    /// As [`sign_at`](Self::sign_at), also returning the interval at which
    /// the sign was certified.
    pub fn sign_at_with_interval(&self, a: &FieldElem, place: usize) -> Option<(Ordering, RootInterval)> {
        if a.is_zero() {
            return None;
        }
        let mut iv = self.real_roots[place].clone();
        loop {
            let (lo, hi) = interval_eval(&a.coeffs, &iv.lo, &iv.hi);
            if lo.is_positive() {
                return Some((Ordering::Greater, iv));
            }
            if hi.is_negative() {
                return Some((Ordering::Less, iv));
            }
            iv = iv.bisect(&self.min_poly);
        }
    }

    /// Dedekind factorization of `p`: one factor per monic irreducible
    /// factor of `f mod p`, in [`ideal_order`] order.
    pub fn factor_prime(&self, p: u64) -> Result<Vec<PrimeIdealFactor>, NumFieldError> {
        if p == 2 {
            return Err(NumFieldError::DyadicPrime);
        }
        if !arith::is_prime_u64(p) {
            return Err(NumFieldError::NotPrime(p));
        }
        if (&self.poly_disc % BigInt::from(p)).is_zero() {
            return Err(NumFieldError::BadPrime(p));
        }
        let fp = poly::from_ints(&self.min_poly, p);
        let mut out: Vec<PrimeIdealFactor> = finfield::factor_poly_mod_p(p, &fp, 0)?
            .into_iter()
            .map(|(g, e)| {
                debug_assert_eq!(e, 1);
                PrimeIdealFactor { p, residue_degree: g.len() - 1, factor_poly: g, ramification: 1 }
            })
            .collect();
        out.sort_by(ideal_order);
        Ok(out)
    }

    /// The smallest admissible odd prime `p ≤ bound` with two factors of
    /// equal residue degree that both pass `accept`; returns the first two
    /// such factors of the smallest available degree.
    pub fn find_split_pair_with<F>(
        &self,
        bound: u64,
        mut accept: F,
    ) -> Result<(u64, PrimeIdealFactor, PrimeIdealFactor), NumFieldError>
    where
        F: FnMut(&PrimeIdealFactor) -> bool,
    {
        if self.degree() < 2 {
            return Err(NumFieldError::FieldIsRationals);
        }
        for p in arith::primes_up_to(bound).into_iter().filter(|&p| p > 2) {
            let factors = match self.factor_prime(p) {
                Ok(f) => f,
                Err(NumFieldError::BadPrime(_)) => continue,
                Err(e) => return Err(e),
            };
            let usable: Vec<PrimeIdealFactor> = factors.into_iter().filter(|pf| accept(pf)).collect();
            for r in 1..=self.degree() {
                let same: Vec<&PrimeIdealFactor> = usable.iter().filter(|pf| pf.residue_degree == r).collect();
                if same.len() >= 2 {
                    return Ok((p, same[0].clone(), same[1].clone()));
                }
            }
        }
        Err(NumFieldError::NoSplitPrimeInBound(bound))
    }

    pub fn find_split_pair(&self, bound: u64) -> Result<(u64, PrimeIdealFactor, PrimeIdealFactor), NumFieldError> {
        self.find_split_pair_with(bound, |_| true)
    }

    /// Image of `a` in `O_k / 𝔭 ≅ F_p[x]/(factor_poly)` under `θ ↦ x`.
    pub fn reduce_element(
        &self,
        a: &FieldElem,
        pf: &PrimeIdealFactor,
        ctx: &FqContext,
    ) -> Result<FqElem, NumFieldError> {
        let p = pf.p;
        let pb = BigInt::from(p);
        let mut residues = Vec::with_capacity(a.coeffs.len());
        for c in &a.coeffs {
            let den = c.denom().mod_floor(&pb);
            if den.is_zero() {
                return Err(NumFieldError::DenominatorNotCoprime(p));
            }
            let num = c.numer().mod_floor(&pb).to_u64().unwrap();
            let den = den.to_u64().unwrap();
            residues.push(arith::mul_mod(num, arith::inv_mod(den, p), p));
        }
        Ok(ctx.from_poly(&residues))
    }
}

/// Interval Horner evaluation of a rational polynomial over `[lo, hi]`.
fn interval_eval(coeffs: &[BigRational], lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
    let mut acc_lo = BigRational::zero();
    let mut acc_hi = BigRational::zero();
    for c in coeffs.iter().rev() {
        let products = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
        let mn = products.iter().min().unwrap().clone();
        let mx = products.iter().max().unwrap().clone();
        acc_lo = mn + c;
        acc_hi = mx + c;
    }
    (acc_lo, acc_hi)
}

/// Deterministic order on prime ideals over the same `p`: by residue
/// degree, then by the non-leading coefficients of `-factor_poly` mod `p`
/// from the constant term up (so `(p, θ - 3)` precedes `(p, θ - 4)`).
pub fn ideal_order(a: &PrimeIdealFactor, b: &PrimeIdealFactor) -> Ordering {
    let key = |pf: &PrimeIdealFactor| -> (u64, usize, Vec<u64>) {
        let p = pf.p;
        let k: Vec<u64> = pf.factor_poly[..pf.residue_degree].iter().map(|&c| (p - c) % p).collect();
        (pf.p, pf.residue_degree, k)
    };
    key(a).cmp(&key(b))
}

/// An element of `Q(θ)` as exact rational coordinates in `1, θ, …, θ^(d-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    coeffs: Vec<BigRational>,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficients as `"num/den"` (or `"num"`) strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = format_rational(c);
            terms.push(match i {
                0 => c,
                1 => format!("{c}·θ"),
                _ => format!("{c}·θ^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

pub fn format_rational(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Parse `"num"` or `"num/den"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
    }
}

/// A prime `𝔭 = (p, g(θ))` of `Z[θ]` with `p` unramified.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeIdealFactor {
    pub p: u64,
    /// Monic irreducible factor of the minimal polynomial mod `p`, lowest
    /// degree first.
    pub factor_poly: Vec<u64>,
    pub residue_degree: usize,
    pub ramification: u32,
}

impl PrimeIdealFactor {
    /// The residue field `F_p[x]/(factor_poly)`.
    pub fn residue_field(&self) -> Result<FqContext, FieldError> {
        FqContext::new(self.p, self.factor_poly.clone())
    }
}

impl fmt::Display for PrimeIdealFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.factor_poly.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let t = match i {
                0 => format!("{c}"),
                1 if c == 1 => "θ".to_string(),
                1 => format!("{c}θ"),
                _ if c == 1 => format!("θ^{i}"),
                _ => format!("{c}θ^{i}"),
            };
            terms.push(t);
        }
        write!(f, "({}, {})", self.p, terms.join(" + "))
    }
}
