//! Property suites shared by the `properties` and `acceptance` targets.
#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use orbicover::arith;
use orbicover::finfield::{poly, FqContext};
use orbicover::matgroup::{self, FqMatrix};
use orbicover::numfield::NumberField;
use orbicover::orders::{self, FactoredOrder, PExponent};
use orbicover::quadform::{FqForm, SquareClass};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const CASES: u32 = 1000;

/// `(p, r)` for the fields used by the random suites.
pub const FIELDS: &[(u64, usize)] =
    &[(3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (3, 2), (5, 2), (3, 3), (7, 2), (11, 2)];

/// Totally real monic polynomials, lowest coefficient first.
pub const NUMBER_FIELDS: &[&[i64]] = &[&[-2, 0, 1], &[-5, 0, 1], &[-1, -1, 1], &[1, -3, 0, 1], &[-3, 0, 1]];

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn field(idx: usize) -> FqContext {
    let (p, r) = FIELDS[idx % FIELDS.len()];
    FqContext::of_degree(p, r).unwrap()
}

pub fn field_axioms(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(0..FIELDS.len(), any::<u64>(), any::<u64>(), any::<u64>()), |(i, a, b, c)| {
            let k = field(i);
            let q = k.q_u64().unwrap();
            let (a, b, c) = (k.from_index(a % q), k.from_index(b % q), k.from_index(c % q));
            prop_assert_eq!(k.add(&a, &b), k.add(&b, &a));
            prop_assert_eq!(k.mul(&a, &b), k.mul(&b, &a));
            prop_assert_eq!(k.add(&k.add(&a, &b), &c), k.add(&a, &k.add(&b, &c)));
            prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            prop_assert_eq!(k.add(&a, &k.neg(&a)), k.zero());
            prop_assert_eq!(k.mul(&a, &k.one()), a.clone());
            if !k.is_zero(&a) {
                prop_assert_eq!(k.mul(&a, &k.inv(&a).unwrap()), k.one());
                prop_assert_eq!(k.pow(&a, &(k.q() - 1u32)), k.one());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Odd prime powers up to 121.
pub fn small_prime_powers() -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    for p in arith::primes_up_to(121).into_iter().filter(|&p| p > 2) {
        let mut q = p;
        let mut r = 1;
        while q <= 121 {
            out.push((p, r));
            q *= p;
            r += 1;
        }
    }
    out
}

pub fn square_count(cases: u32) -> Result<(), String> {
    let fields = small_prime_powers();
    let n = fields.len();
    runner(cases)
        .run(&(0..n, any::<u64>()), |(i, x)| {
            let (p, r) = fields[i];
            let k = FqContext::of_degree(p, r).unwrap();
            let q = k.q_u64().unwrap();
            let squares = k.elements().filter(|a| !k.is_zero(a) && k.is_square(a).unwrap()).count() as u64;
            prop_assert_eq!(squares, (q - 1) / 2);
            let a = k.from_index(x % q);
            let sq = k.square(&a);
            let root = k.sqrt(&sq);
            prop_assert!(root.is_some_and(|s| k.square(&s) == sq));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 0u32..4).prop_map(|(n, e)| BigRational::new(BigInt::from(n), BigInt::from(1i64 << e)))
}

pub fn reduction_homomorphism(cases: u32) -> Result<(), String> {
    let coeffs = || proptest::collection::vec(small_rational(), 3);
    runner(cases)
        .run(&(0..NUMBER_FIELDS.len(), 0usize..40, any::<usize>(), coeffs(), coeffs()), |(fi, pi, fac, a, b)| {
            let field = NumberField::new(NUMBER_FIELDS[fi]).unwrap();
            let p = arith::primes_up_to(200)[1..][pi];
            let Ok(factors) = field.factor_prime(p) else {
                return Ok(());
            };
            let pf = &factors[fac % factors.len()];
            let k = pf.residue_field().unwrap();
            let (a, b) = (field.elem(a), field.elem(b));
            let red = |x: &_| field.reduce_element(x, pf, &k).unwrap();
            prop_assert_eq!(red(&field.add(&a, &b)), k.add(&red(&a), &red(&b)));
            prop_assert_eq!(red(&field.mul(&a, &b)), k.mul(&red(&a), &red(&b)));
            prop_assert_eq!(red(&field.one()), k.one());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn reflection_preserves_form(cases: u32) -> Result<(), String> {
    let vecs = proptest::collection::vec(any::<u64>(), 15);
    runner(cases)
        .run(&(0..FIELDS.len(), 2usize..=5, vecs), |(fi, dim, raw)| {
            let k = field(fi);
            let q = k.q_u64().unwrap();
            let diag: Vec<_> = raw[..dim].iter().map(|x| k.from_index(1 + x % (q - 1))).collect();
            let form = FqForm::new(k.clone(), diag);
            let v: Vec<_> = raw[5..5 + dim].iter().map(|x| k.from_index(x % q)).collect();
            let x: Vec<_> = raw[10..10 + dim].iter().map(|x| k.from_index(x % q)).collect();
            if k.is_zero(&form.evaluate(&v)) {
                prop_assert!(matgroup::reflection(&form, &v).is_err());
                return Ok(());
            }
            let refl = matgroup::reflection(&form, &v).unwrap();
            prop_assert_eq!(form.evaluate(&refl.apply(&x)), form.evaluate(&x));
            prop_assert_eq!(refl.det(), k.from_i64(-1));
            prop_assert!(refl.mul(&refl).is_identity());
            let g = FqMatrix::gram(&form);
            prop_assert_eq!(refl.transpose().mul(&g).mul(&refl), g);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn dedekind_degree_sum(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(0..NUMBER_FIELDS.len(), 0usize..45), |(fi, pi)| {
            let f = NUMBER_FIELDS[fi];
            let field = NumberField::new(f).unwrap();
            let p = arith::primes_up_to(200)[1..][pi];
            let Ok(factors) = field.factor_prime(p) else {
                prop_assert!((field.poly_disc() % BigInt::from(p)) == BigInt::from(0));
                return Ok(());
            };
            let total: usize = factors.iter().map(|pf| pf.residue_degree).sum();
            prop_assert_eq!(total, field.degree());
            let product = factors.iter().fold(vec![1u64], |acc, pf| poly::mul(&acc, &pf.factor_poly, p));
            prop_assert_eq!(product, poly::from_ints(f, p));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `|SO(dim; q)|` straight from the closed formulas, with `q = p^r`.
pub fn direct_so_order(dim: usize, p: u64, r: u32, class: Option<SquareClass>) -> BigUint {
    let q = BigUint::from(p).pow(r);
    let n = (dim / 2) as u32;
    let mut acc = BigUint::from(1u32);
    for j in 1..if dim % 2 == 1 { n + 1 } else { n } {
        acc *= q.pow(2 * j) - 1u32;
    }
    if dim % 2 == 1 {
        acc * q.pow(n * n)
    } else {
        let qn = q.pow(n);
        let middle = match class.unwrap() {
            SquareClass::Square => qn - 1u32,
            SquareClass::Nonsquare => qn + 1u32,
        };
        acc * middle * q.pow(n * (n - 1))
    }
}

pub fn factored_order_evaluation(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(2usize..=12, 0usize..14, 1u32..=3, any::<bool>()), |(dim, pi, r, square)| {
            let p = arith::primes_up_to(50)[1..][pi];
            let class = (dim % 2 == 0).then_some(if square { SquareClass::Square } else { SquareClass::Nonsquare });
            let fo = orders::so_order(dim, p, r, class).unwrap();
            prop_assert_eq!(fo.evaluate().unwrap(), direct_so_order(dim, p, r, class));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn prime_divides_matches_direct(cases: u32) -> Result<(), String> {
    let ells = arith::primes_up_to(10_000);
    let ps: Vec<u64> = arith::primes_up_to(100).into_iter().filter(|&p| p > 2).collect();
    runner(cases)
        .run(&(0..ells.len(), 0..ps.len(), 1u32..=40, any::<bool>()), |(li, pi, a, plus)| {
            let (ell, p) = (ells[li], ps[pi]);
            if ell == p {
                return Ok(());
            }
            let s = if plus { 1 } else { -1 };
            let fo = FactoredOrder { p, p_exponent: PExponent::Unbounded, factors: vec![(a, s)], label: String::new() };
            let claimed = orders::prime_divides_factored(&BigUint::from(ell), &fo).unwrap();
            let direct = (arith::pow_plus_sign(p, a, s) % ell) == BigUint::from(0u32);
            prop_assert_eq!(claimed, direct);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub type Suite = fn(u32) -> Result<(), String>;

/// The named suites, for reporting.
pub fn suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("finite-field axioms", field_axioms),
        ("square count (q-1)/2", square_count),
        ("reduction homomorphism", reduction_homomorphism),
        ("reflection form preservation", reflection_preserves_form),
        ("Dedekind degree sum", dedekind_degree_sum),
        ("factored-order evaluation", factored_order_evaluation),
    ]
}
