//! Orders of finite special orthogonal groups kept in factored form, the
//! divisor tables bounding reductions of totally geodesic subgroups,
//! primitive prime divisors, and the choice of the cover prime `ℓ`.
//!
//! Every order is `p^X · Π (p^a + s)` with `s = ±1`. Divisibility by a
//! prime `ℓ ≠ p` is decided through `ord_ℓ(p)` and never by expanding the
//! product.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{self, ArithError};
use crate::finfield::FieldError;
use crate::quadform::{FqForm, SquareClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdersError {
    #[error("even dimension {0} needs a discriminant square class")]
    MissingSquareClass(usize),
    #[error("dimension {0} is too small")]
    DimensionTooSmall(usize),
    #[error("the coarse bound is stated for odd ambient dimension, got {0}")]
    EvenDimension(usize),
    #[error("ℓ equals the characteristic p = {0}")]
    EllEqualsP(u64),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("p = {0} must be an odd prime")]
    BadCharacteristic(u64),
    #[error("Zsigmondy exponent must be at least 2, got {0}")]
    ExponentTooSmall(u32),
    #[error("no primitive prime divisor of {p}^{d} + 1 found")]
    ZsigmondyFailure { p: u64, d: u32 },
    #[error("{p}^{r} - 1 has no odd prime divisor")]
    NoOddPrimeDivisor { p: u64, r: u32 },
    #[error("ℓ = {ell} does not divide {p}^{r} - 1")]
    EllOffUnitGroup { ell: String, p: u64, r: u32 },
    #[error("form has dimension {got}, expected m + 1 = {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("degenerate reduced form")]
    Degenerate,
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Exponent of the `p`-part of an order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PExponent {
    Bounded(u64),
    /// `p^X` for some unknown `X ≥ 0`.
    Unbounded,
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PExponent::Bounded(x) => s.serialize_u64(*x),
            PExponent::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(x) => Ok(PExponent::Bounded(x)),
            Raw::S(s) if s == "unbounded" => Ok(PExponent::Unbounded),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad p_exponent {s:?}"))),
        }
    }
}

/// One cyclotomic-type factor `p^a + s`, serialized as `[a, s]`.
pub type Factor = (u32, i8);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredOrder {
    pub p: u64,
    pub p_exponent: PExponent,
    pub factors: Vec<Factor>,
    pub label: String,
}

impl FactoredOrder {
    /// The full value, when the `p`-part is known.
    pub fn evaluate(&self) -> Option<BigUint> {
        match self.p_exponent {
            PExponent::Unbounded => None,
            PExponent::Bounded(x) => Some(BigUint::from(self.p).pow(x as u32) * self.prime_to_p_part()),
        }
    }

    /// `Π (p^a + s)`.
    pub fn prime_to_p_part(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, &(a, s)| acc * arith::pow_plus_sign(self.p, a, s))
    }

    /// Factors in canonical (sorted) order, for multiset comparison.
    pub fn sorted_factors(&self) -> Vec<Factor> {
        let mut f = self.factors.clone();
        f.sort();
        f
    }
}

impl fmt::Display for FactoredOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        let mut parts = Vec::new();
        match self.p_exponent {
            PExponent::Bounded(0) => {}
            PExponent::Bounded(x) => parts.push(format!("{p}^{x}")),
            PExponent::Unbounded => parts.push(format!("{p}^X")),
        }
        for &(a, s) in &self.factors {
            let sign = if s > 0 { '+' } else { '-' };
            parts.push(if a == 1 { format!("({p}{sign}1)") } else { format!("({p}^{a}{sign}1)") });
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

/// `(p^{2rj} - 1)` for `j = 1..=upto`; `None` when `upto < 0` (the row
/// does not exist for this `n`).
fn prod_even(r: u32, upto: i64) -> Option<Vec<Factor>> {
    (upto >= 0).then(|| (1..=upto as u32).map(|j| (2 * r * j, -1)).collect())
}

/// `(p^{r·e} + s)`; `None` when `e ≤ 0`.
fn pm(r: u32, e: i64, s: i8) -> Option<Factor> {
    (e > 0).then(|| (r * e as u32, s))
}

fn order_of(p: u64, factors: Vec<Factor>, label: String) -> FactoredOrder {
    FactoredOrder { p, p_exponent: PExponent::Unbounded, factors, label }
}

fn sign_char(s: i8) -> char {
    if s > 0 {
        '+'
    } else {
        '-'
    }
}

/// `|SO(dim; p^r)|`. Even dimension needs the square class of the signed
/// discriminant: square gives the split form, nonsquare the quasi-split one.
pub fn so_order(dim: usize, p: u64, r: u32, square_class: Option<SquareClass>) -> Result<FactoredOrder, OrdersError> {
    if dim < 2 {
        return Err(OrdersError::DimensionTooSmall(dim));
    }
    let ru = r as u64;
    if dim % 2 == 1 {
        let n = (dim / 2) as u64;
        Ok(FactoredOrder {
            p,
            p_exponent: PExponent::Bounded(ru * n * n),
            factors: (1..=n as u32).map(|j| (2 * r * j, -1)).collect(),
            label: format!("B_{n}"),
        })
    } else {
        let class = square_class.ok_or(OrdersError::MissingSquareClass(dim))?;
        let n = (dim / 2) as u64;
        let s = match class {
            SquareClass::Square => -1,
            SquareClass::Nonsquare => 1,
        };
        let mut factors = vec![(r * n as u32, s)];
        factors.extend((1..n as u32).map(|j| (2 * r * j, -1)));
        let kind = if s < 0 { "split" } else { "nonsplit" };
        Ok(FactoredOrder {
            p,
            p_exponent: PExponent::Bounded(ru * n * (n - 1)),
            factors,
            label: format!("D_{n} {kind}"),
        })
    }
}

/// The (T1)–(T8) rows for an odd subform of dimension `2n - 1`, every `±`
/// expanded, rows with out-of-range indices omitted.
pub fn odd_subform_rows(n: usize, p: u64, r: u32) -> Vec<FactoredOrder> {
    let n = n as i64;
    let mut rows: Vec<FactoredOrder> = Vec::new();
    let mut push = |label: String, parts: Option<Vec<Factor>>| {
        if let Some(f) = parts {
            rows.push(order_of(p, f, label));
        }
    };
    let join = |pieces: Vec<Option<Vec<Factor>>>| -> Option<Vec<Factor>> {
        let mut out = Vec::new();
        for piece in pieces {
            out.extend(piece?);
        }
        Some(out)
    };
    let single = |f: Option<Factor>| f.map(|x| vec![x]);

    push("T1".into(), prod_even(r, n - 1));
    push("T2".into(), join(vec![Some(vec![(2 * r, -1), (2 * r, -1)]), prod_even(r, n - 3)]));
    for k in 3..=n - 3 {
        for s in [1i8, -1] {
            push(
                format!("T3 k={k} {}", sign_char(s)),
                join(vec![single(pm(r, k - 1, s)), prod_even(r, k - 2), prod_even(r, n - k)]),
            );
        }
    }
    for s in [1i8, -1] {
        push(
            format!("T4 {}", sign_char(s)),
            join(vec![Some(vec![(2 * r, -1)]), single(pm(r, n - 2, s)), prod_even(r, n - 3)]),
        );
    }
    for s in [1i8, -1] {
        push(format!("T5 {}", sign_char(s)), join(vec![single(pm(r, n - 1, s)), prod_even(r, n - 2)]));
    }
    push("T6".into(), prod_even(r, n - 2));
    push("T7".into(), join(vec![Some(vec![(2 * r, -1)]), prod_even(r, n - 3)]));
    for k in 3..=n - 3 {
        push(format!("T8 k={k}"), join(vec![prod_even(r, k - 1), prod_even(r, n - k - 1)]));
    }
    rows
}

/// The (S1)–(S6) rows for an even subform of dimension `2n` (without the
/// appended T-list).
pub fn even_subform_rows(n: usize, p: u64, r: u32) -> Vec<FactoredOrder> {
    let n = n as i64;
    let mut rows: Vec<FactoredOrder> = Vec::new();
    let mut push = |label: String, parts: Option<Vec<Factor>>| {
        if let Some(f) = parts {
            rows.push(order_of(p, f, label));
        }
    };
    let join = |pieces: Vec<Option<Vec<Factor>>>| -> Option<Vec<Factor>> {
        let mut out = Vec::new();
        for piece in pieces {
            out.extend(piece?);
        }
        Some(out)
    };
    let single = |f: Option<Factor>| f.map(|x| vec![x]);

    for s in [1i8, -1] {
        push(format!("S1 {}", sign_char(s)), join(vec![single(pm(r, n, s)), prod_even(r, n - 1)]));
    }
    for s in [1i8, -1] {
        push(
            format!("S2 {}", sign_char(s)),
            join(vec![Some(vec![(2 * r, -1), (2 * r, -1)]), single(pm(r, n - 2, s)), prod_even(r, n - 3)]),
        );
    }
    for k in 3..=n - 3 {
        for s1 in [1i8, -1] {
            for s2 in [1i8, -1] {
                push(
                    format!("S3 k={k} {}{}", sign_char(s1), sign_char(s2)),
                    join(vec![
                        single(pm(r, k, s1)),
                        single(pm(r, n - k, s2)),
                        prod_even(r, k - 1),
                        prod_even(r, n - k - 1),
                    ]),
                );
            }
        }
    }
    push("S4".into(), prod_even(r, n - 1));
    push("S5".into(), join(vec![Some(vec![(2 * r, -1)]), prod_even(r, n - 2)]));
    for k in 3..=n - 2 {
        push(format!("S6 k={k}"), join(vec![prod_even(r, k - 1), prod_even(r, n - k)]));
    }
    rows
}

/// Every candidate bound `p^X·Y` for the reductive quotient of a totally
/// geodesic subgroup with subform of dimension `subform_dim ≥ 4`.
pub fn subgroup_bound_tables(subform_dim: usize, p: u64, r: u32) -> Result<Vec<FactoredOrder>, OrdersError> {
    if subform_dim < 4 {
        return Err(OrdersError::DimensionTooSmall(subform_dim));
    }
    if subform_dim % 2 == 1 {
        Ok(odd_subform_rows(subform_dim.div_ceil(2), p, r))
    } else {
        let n = subform_dim / 2;
        let mut rows = even_subform_rows(n, p, r);
        rows.extend(odd_subform_rows(n, p, r));
        Ok(rows)
    }
}

/// `p^α Π_{j ≤ 2r(n-1)} (p^j - 1) Π_{j' ≤ r(n-1)} (p^{j'} + 1)`.
pub fn coarse_bound_for_n(n: usize, p: u64, r: u32) -> FactoredOrder {
    let top = r * (n as u32).saturating_sub(1);
    let mut factors: Vec<Factor> = (1..=2 * top).map(|j| (j, -1)).collect();
    factors.extend((1..=top).map(|j| (j, 1)));
    FactoredOrder { p, p_exponent: PExponent::Unbounded, factors, label: format!("coarse n={n}") }
}

/// The coarse bound on `|H_𝔭|` for ambient dimension `2n + 1`.
pub fn coarse_subgroup_bound(dim_q: usize, p: u64, r: u32) -> Result<FactoredOrder, OrdersError> {
    if dim_q.is_multiple_of(2) {
        return Err(OrdersError::EvenDimension(dim_q));
    }
    Ok(coarse_bound_for_n(dim_q / 2, p, r))
}

/// Decides `ℓ | p^a ± 1` from `ord_ℓ(p)`.
#[derive(Debug, Clone)]
pub struct DivisibilityOracle {
    ell: BigUint,
    order: BigUint,
}

impl DivisibilityOracle {
    pub fn new(ell: &BigUint, p: u64, seed: u64) -> Result<Self, OrdersError> {
        if !arith::is_prime(ell) {
            return Err(OrdersError::NotPrime(ell.to_string()));
        }
        if *ell == BigUint::from(p) {
            return Err(OrdersError::EllEqualsP(p));
        }
        let order = if *ell == BigUint::from(2u32) {
            BigUint::one()
        } else {
            arith::multiplicative_order(&BigUint::from(p), ell, seed)?
        };
        Ok(Self { ell: ell.clone(), order })
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn divides_factor(&self, (a, s): Factor) -> bool {
        let a = BigUint::from(a);
        if self.ell == BigUint::from(2u32) {
            // p odd: both p^a - 1 and p^a + 1 are even.
            return true;
        }
        if s < 0 {
            a.is_multiple_of(&self.order)
        } else {
            (&a * 2u32).is_multiple_of(&self.order) && !a.is_multiple_of(&self.order)
        }
    }

    pub fn divides(&self, fo: &FactoredOrder) -> bool {
        fo.factors.iter().any(|&f| self.divides_factor(f))
    }
}

/// `ℓ | Π (p^a + s)`; the `p`-part never matters since `ℓ ≠ p`.
pub fn prime_divides_factored(ell: &BigUint, fo: &FactoredOrder) -> Result<bool, OrdersError> {
    Ok(DivisibilityOracle::new(ell, fo.p, 0)?.divides(fo))
}

/// The smallest prime `ℓ | p^d + 1` with `ord_ℓ(p) = 2d`.
pub fn zsigmondy_prime(p: u64, d: u32, seed: u64) -> Result<BigUint, OrdersError> {
    if p.is_multiple_of(2) || !arith::is_prime_u64(p) {
        return Err(OrdersError::BadCharacteristic(p));
    }
    if d < 2 {
        return Err(OrdersError::ExponentTooSmall(d));
    }
    let target = BigUint::from(p).pow(d) + 1u32;
    let two_d = BigUint::from(2 * d);
    for (ell, _) in arith::factorize(&target, seed)? {
        if ell == BigUint::from(2u32) {
            continue;
        }
        if arith::multiplicative_order(&BigUint::from(p), &ell, seed)? == two_d {
            return Ok(ell);
        }
    }
    Err(OrdersError::ZsigmondyFailure { p, d })
}

/// Smallest odd prime dividing `p^r - 1`.
pub fn smallest_odd_prime_divisor(p: u64, r: u32, seed: u64) -> Result<BigUint, OrdersError> {
    let n = BigUint::from(p).pow(r) - 1u32;
    arith::factorize(&n, seed)?
        .into_iter()
        .map(|(q, _)| q)
        .find(|q| q.is_odd())
        .ok_or(OrdersError::NoOddPrimeDivisor { p, r })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    OddDim,
    EvenNonsquareDisc,
    EvenSquareDisc,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::OddDim => "OddDim",
            Branch::EvenNonsquareDisc => "EvenNonsquareDisc",
            Branch::EvenSquareDisc => "EvenSquareDisc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Paper,
    Strict,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Mode::Paper),
            "strict" => Ok(Mode::Strict),
            other => Err(format!("unknown mode {other:?} (expected paper or strict)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Strict => "strict",
        })
    }
}

/// Whether a report entry must hold for the certificate to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckRole {
    Required,
    /// Recorded for inspection only.
    Diagnostic,
    /// Required only in strict mode.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `ℓ` against the product of `factors`.
    Divisibility,
    /// No nontrivial power `g^{a t}` has eigenvalue `±1`.
    EigenvaluePm1,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidanceCheck {
    pub bound_label: String,
    pub factors: Vec<Factor>,
    pub criterion: Criterion,
    pub role: CheckRole,
    /// For divisibility checks, whether `ℓ` divides the bound; for the
    /// eigenvalue check, whether some nontrivial power hits `±1`.
    pub divides: bool,
}

impl AvoidanceCheck {
    pub fn holds(&self) -> bool {
        !self.divides
    }

    pub fn is_binding(&self, mode: Mode) -> bool {
        match self.role {
            CheckRole::Required => true,
            CheckRole::Strict => mode == Mode::Strict,
            CheckRole::Diagnostic => false,
        }
    }
}

/// An explicit generator of `C_𝔭`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Entries as residue vectors over the residue field, row-major.
    pub matrix: Vec<Vec<Vec<u64>>>,
    pub order: String,
    pub construction: String,
    /// Result of the eigenvalue test (even square-discriminant branch only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eigenvalue_avoidance: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPrime {
    pub ell: BigUint,
    pub branch: Branch,
    /// Zsigmondy exponent (`nr`), or `r` on the even square branch.
    pub d: u32,
    /// `(p^r - 1)/ℓ` on the even square branch.
    pub a: Option<BigUint>,
    pub divides_group_order: bool,
    pub witness: Option<Witness>,
    pub avoidance_report: Vec<AvoidanceCheck>,
}

impl CoverPrime {
    pub fn passes(&self, mode: Mode) -> bool {
        self.divides_group_order && self.avoidance_report.iter().filter(|c| c.is_binding(mode)).all(|c| c.holds())
    }

    pub fn failures(&self, mode: Mode) -> Vec<&AvoidanceCheck> {
        self.avoidance_report.iter().filter(|c| c.is_binding(mode) && !c.holds()).collect()
    }
}

fn divisibility_check(
    oracle: &DivisibilityOracle,
    label: String,
    factors: Vec<Factor>,
    role: CheckRole,
) -> AvoidanceCheck {
    let divides = factors.iter().any(|&f| oracle.divides_factor(f));
    AvoidanceCheck { bound_label: label, factors, criterion: Criterion::Divisibility, role, divides }
}

/// The checks that the report must contain for a given `ℓ`: required,
/// diagnostic and strict. Shared by selection and verification.
pub fn avoidance_checks(
    oracle: &DivisibilityOracle,
    branch: Branch,
    dim: usize,
    p: u64,
    r: u32,
) -> Result<Vec<AvoidanceCheck>, OrdersError> {
    let m = dim - 1;
    let mut out = Vec::new();
    match branch {
        Branch::OddDim | Branch::EvenNonsquareDisc => {
            let coarse = coarse_bound_for_n(dim / 2, p, r);
            for &f in &coarse.factors {
                let (a, s) = f;
                let label = format!("coarse: p^{a}{}1", if s > 0 { '+' } else { '-' });
                out.push(divisibility_check(oracle, label, vec![f], CheckRole::Required));
            }
            for d0 in 4..=m {
                for row in subgroup_bound_tables(d0, p, r)? {
                    let label = format!("table d0={d0} {}", row.label);
                    out.push(divisibility_check(oracle, label, row.factors, CheckRole::Diagnostic));
                }
            }
            for d1 in 2..=dim / 2 {
                let d0 = dim - d1;
                let classes: Vec<Option<SquareClass>> = if d1 % 2 == 0 {
                    vec![Some(SquareClass::Square), Some(SquareClass::Nonsquare)]
                } else {
                    vec![None]
                };
                for class in classes {
                    let comp = so_order(d1, p, r, class)?;
                    let label = format!("split {d0}+{d1}: complement {}", comp.label);
                    out.push(divisibility_check(oracle, label, comp.factors, CheckRole::Diagnostic));
                }
            }
        }
        Branch::EvenSquareDisc => {}
    }
    for d0 in 3..=m {
        let classes: Vec<Option<SquareClass>> =
            if d0 % 2 == 0 { vec![Some(SquareClass::Square), Some(SquareClass::Nonsquare)] } else { vec![None] };
        for class in classes {
            let full = so_order(d0, p, r, class)?;
            let label = format!("strict: SO({d0}) {}", full.label);
            out.push(divisibility_check(oracle, label, full.factors, CheckRole::Strict));
        }
    }
    Ok(out)
}

/// Scalar form of the eigenvalue criterion: with `μ = λ^a` for a generator
/// `λ` of `F_q^×`, no `μ^t` (`1 ≤ t < ℓ`) equals `±1`.
pub fn scalar_eigenvalue_check(form: &FqForm, ell: &BigUint, a: &BigUint) -> Result<AvoidanceCheck, OrdersError> {
    let k = form.ctx();
    let lambda = k.multiplicative_generator()?;
    let mu = k.pow(&lambda, a);
    let one = k.one();
    let minus_one = k.neg(&one);
    let mut hits = false;
    let mut power = one.clone();
    let mut t = BigUint::one();
    while t < *ell {
        power = k.mul(&power, &mu);
        if power == one || power == minus_one {
            hits = true;
            break;
        }
        t += 1u32;
    }
    Ok(AvoidanceCheck {
        bound_label: format!("eigenvalue ±1: powers of λ^{a}"),
        factors: Vec::new(),
        criterion: Criterion::EigenvaluePm1,
        role: CheckRole::Required,
        divides: hits,
    })
}

fn branch_of(form: &FqForm) -> Branch {
    match form.square_class() {
        None => Branch::OddDim,
        Some(SquareClass::Nonsquare) => Branch::EvenNonsquareDisc,
        Some(SquareClass::Square) => Branch::EvenSquareDisc,
    }
}

fn check_form(form: &FqForm, m: usize) -> Result<(), OrdersError> {
    if form.dim() != m + 1 {
        return Err(OrdersError::DimensionMismatch { got: form.dim(), want: m + 1 });
    }
    if !form.is_nondegenerate() {
        return Err(OrdersError::Degenerate);
    }
    Ok(())
}

/// Choose `ℓ` and `C_𝔭` data for a good reduction `q_𝔭` of an `(m+1)`-
/// dimensional form. The report lists every checked condition; in paper
/// mode only `Required` entries bind, strict mode adds the `Strict` ones.
pub fn select_cover_prime(form: &FqForm, m: usize, seed: u64) -> Result<CoverPrime, OrdersError> {
    check_form(form, m)?;
    let p = form.ctx().p();
    let r = form.ctx().r() as u32;
    let n = (form.dim() / 2) as u32;
    let ell = match branch_of(form) {
        Branch::OddDim | Branch::EvenNonsquareDisc => zsigmondy_prime(p, n * r, seed)?,
        Branch::EvenSquareDisc => smallest_odd_prime_divisor(p, r, seed)?,
    };
    cover_prime_for_ell(form, m, &ell, seed)
}

/// The cover-prime data and full report for a prescribed odd prime `ℓ`.
/// On the even square branch `ℓ` must divide `p^r - 1`.
pub fn cover_prime_for_ell(form: &FqForm, m: usize, ell: &BigUint, seed: u64) -> Result<CoverPrime, OrdersError> {
    check_form(form, m)?;
    let dim = form.dim();
    let p = form.ctx().p();
    let r = form.ctx().r() as u32;
    let branch = branch_of(form);
    let unit_order = BigUint::from(p).pow(r) - 1u32;
    let (d, a) = match branch {
        Branch::OddDim | Branch::EvenNonsquareDisc => ((dim / 2) as u32 * r, None),
        Branch::EvenSquareDisc => {
            if !unit_order.is_multiple_of(ell) {
                return Err(OrdersError::EllOffUnitGroup { ell: ell.to_string(), p, r });
            }
            (r, Some(&unit_order / ell))
        }
    };
    let oracle = DivisibilityOracle::new(ell, p, seed)?;
    let group = so_order(dim, p, r, form.square_class())?;
    let divides_group_order = oracle.divides(&group);
    let mut report = Vec::new();
    if let Some(a) = &a {
        report.push(scalar_eigenvalue_check(form, ell, a)?);
    }
    report.extend(avoidance_checks(&oracle, branch, dim, p, r)?);
    Ok(CoverPrime { ell: ell.clone(), branch, d, a, divides_group_order, witness: None, avoidance_report: report })
}
