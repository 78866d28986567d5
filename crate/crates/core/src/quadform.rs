//! Diagonal quadratic forms over a totally real field, admissibility of
//! `(k, q)` and reduction modulo prime ideals.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finfield::{FieldError, FqContext, FqElem};
use crate::numfield::{FieldElem, NumFieldError, NumberField, PrimeIdealFactor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadFormError {
    #[error("diagonal entry {0} is zero; the form is degenerate over k")]
    ZeroDiagonalEntry(usize),
    #[error("Gram matrix is not diagonal; diagonalize the form before input")]
    NonDiagonalGram,
    #[error("form has dimension {dim}; need m = dim - 1 ≥ 3")]
    DimensionTooSmall { dim: usize },
    #[error("place {0} does not exist")]
    PlaceOutOfRange(usize),
    #[error("entry {entry} vanishes at place {place}")]
    ZeroEntryAtPlace { entry: usize, place: usize },
    #[error("the field is not totally real")]
    NotTotallyReal,
    #[error("wrong signature profile{}: {}", .place.map(|p| format!(" at place {p}")).unwrap_or_default(), format_signatures(.signatures))]
    WrongSignatureProfile { place: Option<usize>, signatures: Vec<Signature> },
    #[error("reduction modulo {0} is degenerate")]
    BadReduction(String),
    #[error(transparent)]
    NumField(#[from] NumFieldError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn format_signatures(s: &[Signature]) -> String {
    s.iter().enumerate().map(|(i, s)| format!("place {i}: {s}")).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.pos, self.neg)
    }
}

/// `q = a_0 x_0^2 + … + a_m x_m^2` with every `a_i ≠ 0` in `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    diagonal: Vec<FieldElem>,
}

impl QuadraticForm {
    pub fn new(diagonal: Vec<FieldElem>) -> Result<Self, QuadFormError> {
        if let Some(i) = diagonal.iter().position(FieldElem::is_zero) {
            return Err(QuadFormError::ZeroDiagonalEntry(i));
        }
        Ok(Self { diagonal })
    }

    /// Accepts a symmetric Gram matrix only when it is already diagonal.
    pub fn from_gram(gram: Vec<Vec<FieldElem>>) -> Result<Self, QuadFormError> {
        let n = gram.len();
        let mut diag = Vec::with_capacity(n);
        for (i, row) in gram.into_iter().enumerate() {
            if row.len() != n {
                return Err(QuadFormError::NonDiagonalGram);
            }
            for (j, e) in row.into_iter().enumerate() {
                if i == j {
                    diag.push(e);
                } else if !e.is_zero() {
                    return Err(QuadFormError::NonDiagonalGram);
                }
            }
        }
        Self::new(diag)
    }

    pub fn diagonal(&self) -> &[FieldElem] {
        &self.diagonal
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Product of the diagonal entries.
    pub fn determinant(&self, field: &NumberField) -> FieldElem {
        self.diagonal.iter().fold(field.one(), |acc, a| field.mul(&acc, a))
    }
}

/// Signature of `form` at the real place `place`, with every entry's sign
/// certified by interval refinement.
pub fn signature_at(field: &NumberField, form: &QuadraticForm, place: usize) -> Result<Signature, QuadFormError> {
    if place >= field.real_roots().len() {
        return Err(QuadFormError::PlaceOutOfRange(place));
    }
    let mut sig = Signature { pos: 0, neg: 0 };
    for (entry, a) in form.diagonal.iter().enumerate() {
        match field.sign_at(a, place) {
            Some(Ordering::Greater) => sig.pos += 1,
            Some(Ordering::Less) => sig.neg += 1,
            _ => return Err(QuadFormError::ZeroEntryAtPlace { entry, place }),
        }
    }
    Ok(sig)
}

/// An admissible hyperbolic pair: `k` totally real, `q` of signature
/// `(m, 1)` at exactly one real place and positive definite elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissiblePair {
    field: NumberField,
    form: QuadraticForm,
    m: usize,
    distinguished_place: usize,
    signatures: Vec<Signature>,
}

pub fn is_admissible(field: NumberField, form: QuadraticForm) -> Result<AdmissiblePair, QuadFormError> {
    if !field.is_totally_real() {
        return Err(QuadFormError::NotTotallyReal);
    }
    let dim = form.dim();
    if dim < 4 {
        return Err(QuadFormError::DimensionTooSmall { dim });
    }
    let m = dim - 1;
    let signatures =
        (0..field.real_roots().len()).map(|i| signature_at(&field, &form, i)).collect::<Result<Vec<_>, _>>()?;
    let definite = Signature { pos: m + 1, neg: 0 };
    let lorentzian = Signature { pos: m, neg: 1 };
    let mut distinguished = None;
    let mut offending = None;
    for (i, s) in signatures.iter().enumerate() {
        if *s == lorentzian && distinguished.is_none() {
            distinguished = Some(i);
        } else if *s != definite {
            offending = Some(i);
            break;
        }
    }
    match (distinguished, offending) {
        (Some(place), None) => Ok(AdmissiblePair { field, form, m, distinguished_place: place, signatures }),
        (_, place) => Err(QuadFormError::WrongSignatureProfile { place, signatures }),
    }
}

impl AdmissiblePair {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    pub fn distinguished_place(&self) -> usize {
        self.distinguished_place
    }

    pub fn signatures(&self) -> &[Signature] {
        &self.signatures
    }

    /// Reduction `q_𝔭` over the residue field of `pf`.
    pub fn reduce_form(&self, pf: &PrimeIdealFactor) -> Result<FqForm, QuadFormError> {
        let ctx = pf.residue_field()?;
        let diagonal =
            self.form.diagonal.iter().map(|a| self.field.reduce_element(a, pf, &ctx)).collect::<Result<Vec<_>, _>>()?;
        let form = FqForm::new(ctx, diagonal);
        if form.ctx.is_zero(&form.disc) {
            return Err(QuadFormError::BadReduction(pf.to_string()));
        }
        Ok(form)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareClass {
    Square,
    Nonsquare,
}

impl SquareClass {
    pub fn other(self) -> Self {
        match self {
            SquareClass::Square => SquareClass::Nonsquare,
            SquareClass::Nonsquare => SquareClass::Square,
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SquareClass::Square => "square",
            SquareClass::Nonsquare => "nonsquare",
        })
    }
}

/// Killing–Cartan type of `SO(q_𝔭)` over a finite field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupType {
    #[serde(rename = "B_n")]
    B,
    #[serde(rename = "D_n_split")]
    DSplit,
    #[serde(rename = "D_n_nonsplit")]
    DNonsplit,
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupType::B => "B_n",
            GroupType::DSplit => "D_n_split",
            GroupType::DNonsplit => "D_n_nonsplit",
        })
    }
}

/// A diagonal form over `F_q`.
///
/// `disc` is the product of the diagonal. For even dimension `2n` the
/// square class is that of the signed discriminant `(-1)^n · disc`, which is
/// a square exactly when the form is a sum of hyperbolic planes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqForm {
    ctx: FqContext,
    diagonal: Vec<FqElem>,
    disc: FqElem,
    square_class: Option<SquareClass>,
}

impl FqForm {
    pub fn new(ctx: FqContext, diagonal: Vec<FqElem>) -> Self {
        let disc = diagonal.iter().fold(ctx.one(), |acc, a| ctx.mul(&acc, a));
        let dim = diagonal.len();
        let square_class = if dim.is_multiple_of(2) && !ctx.is_zero(&disc) {
            let signed = if (dim / 2) % 2 == 1 { ctx.neg(&disc) } else { disc.clone() };
            Some(if ctx.is_square(&signed).expect("nonzero") { SquareClass::Square } else { SquareClass::Nonsquare })
        } else {
            None
        };
        Self { ctx, diagonal, disc, square_class }
    }

    /// `diag(1, …, 1)`, or `diag(1, …, 1, c)` with `c` the first nonsquare
    /// when that is needed to reach the requested square class.
    pub fn model(ctx: &FqContext, dim: usize, class: Option<SquareClass>) -> Self {
        let ones = Self::new(ctx.clone(), vec![ctx.one(); dim]);
        match class {
            Some(c) if dim.is_multiple_of(2) && ones.square_class() != Some(c) => {
                let nonsquare = ctx
                    .elements()
                    .find(|a| !ctx.is_zero(a) && !ctx.is_square(a).unwrap_or(true))
                    .expect("odd q has nonsquares");
                ones.rescale_entry(dim - 1, &nonsquare)
            }
            _ => ones,
        }
    }

    /// Convenience constructor from integer residues.
    pub fn from_ints(ctx: FqContext, diagonal: &[i64]) -> Self {
        let d = diagonal.iter().map(|&c| ctx.from_i64(c)).collect();
        Self::new(ctx, d)
    }

    pub fn ctx(&self) -> &FqContext {
        &self.ctx
    }

    pub fn diagonal(&self) -> &[FqElem] {
        &self.diagonal
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn disc(&self) -> &FqElem {
        &self.disc
    }

    pub fn square_class(&self) -> Option<SquareClass> {
        self.square_class
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.ctx.is_zero(&self.disc)
    }

    pub fn group_type(&self) -> GroupType {
        match self.square_class {
            None => GroupType::B,
            Some(SquareClass::Square) => GroupType::DSplit,
            Some(SquareClass::Nonsquare) => GroupType::DNonsplit,
        }
    }

    /// `q(v) = Σ a_i v_i^2`.
    pub fn evaluate(&self, v: &[FqElem]) -> FqElem {
        let k = &self.ctx;
        self.diagonal.iter().zip(v).fold(k.zero(), |acc, (a, x)| k.add(&acc, &k.mul(a, &k.square(x))))
    }

    /// The same form with entry `i` multiplied by `c`.
    pub fn rescale_entry(&self, i: usize, c: &FqElem) -> Self {
        let mut d = self.diagonal.clone();
        d[i] = self.ctx.mul(&d[i], c);
        Self::new(self.ctx.clone(), d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn running_pair_parts() -> (NumberField, QuadraticForm) {
        let k = NumberField::new(&[-2, 0, 1]).unwrap();
        let one = k.one();
        let d = vec![one.clone(), one.clone(), one.clone(), one, k.neg(&k.theta())];
        (k, QuadraticForm::new(d).unwrap())
    }

    #[test]
    fn signatures() {
        let (k, q) = running_pair_parts();
        assert_eq!(signature_at(&k, &q, 1).unwrap(), Signature { pos: 4, neg: 1 });
        assert_eq!(signature_at(&k, &q, 0).unwrap(), Signature { pos: 5, neg: 0 });
        let ones = QuadraticForm::new(vec![k.one(); 6]).unwrap();
        assert_eq!(signature_at(&k, &ones, 0).unwrap(), Signature { pos: 6, neg: 0 });
        assert_eq!(signature_at(&k, &q, 2), Err(QuadFormError::PlaceOutOfRange(2)));
    }

    #[test]
    fn admissibility() {
        let (k, q) = running_pair_parts();
        let pair = is_admissible(k.clone(), q).unwrap();
        assert_eq!(pair.m(), 4);
        assert_eq!(pair.distinguished_place(), 1);
        assert!(k.real_roots()[1].approx() > 1.41);

        let mut d = vec![k.one(); 4];
        d.push(k.from_int(-1));
        let err = is_admissible(k.clone(), QuadraticForm::new(d).unwrap()).unwrap_err();
        assert!(matches!(err, QuadFormError::WrongSignatureProfile { place: Some(1), .. }));

        let gauss = NumberField::new(&[1, 0, 1]).unwrap();
        let q = QuadraticForm::new(vec![gauss.one(); 5]).unwrap();
        assert_eq!(is_admissible(gauss, q), Err(QuadFormError::NotTotallyReal));

        let small = QuadraticForm::new(vec![k.one(), k.one(), k.neg(&k.theta())]).unwrap();
        assert_eq!(is_admissible(k, small), Err(QuadFormError::DimensionTooSmall { dim: 3 }));
    }

    #[test]
    fn gram_input() {
        let k = NumberField::new(&[-2, 0, 1]).unwrap();
        let z = k.zero();
        let o = k.one();
        assert!(QuadraticForm::from_gram(vec![vec![o.clone(), z.clone()], vec![z.clone(), o.clone()]]).is_ok());
        assert_eq!(
            QuadraticForm::from_gram(vec![vec![o.clone(), o.clone()], vec![o.clone(), o.clone()]]),
            Err(QuadFormError::NonDiagonalGram)
        );
        assert_eq!(QuadraticForm::new(vec![o, z]), Err(QuadFormError::ZeroDiagonalEntry(1)));
    }

    #[test]
    fn reductions() {
        let (k, q) = running_pair_parts();
        let pair = is_admissible(k.clone(), q).unwrap();
        let f7 = k.factor_prime(7).unwrap();
        let r0 = pair.reduce_form(&f7[0]).unwrap();
        let ctx = r0.ctx().clone();
        assert_eq!(r0.diagonal().last().unwrap(), &ctx.from_u64(4));
        assert_eq!(r0.disc(), &ctx.from_u64(4));
        assert_eq!(r0.dim(), 5);
        assert_eq!(r0.group_type(), GroupType::B);
        let r1 = pair.reduce_form(&f7[1]).unwrap();
        assert_eq!(r1.disc(), &ctx.from_u64(3));

        // θ - 3 vanishes modulo (7, θ - 3). It is negative at both places,
        // so the pair is assembled directly rather than through is_admissible.
        let bad_entry = k.add(&k.theta(), &k.from_int(-3));
        let d = vec![k.one(), k.one(), k.one(), k.one(), k.neg(&k.theta()), bad_entry];
        let form = QuadraticForm::new(d).unwrap();
        let pair = AdmissiblePair { field: k.clone(), form, m: 5, distinguished_place: 1, signatures: vec![] };
        assert!(matches!(pair.reduce_form(&f7[0]), Err(QuadFormError::BadReduction(_))));
        assert!(pair.reduce_form(&f7[1]).is_ok());
    }

    #[test]
    fn denominators() {
        let k = NumberField::new(&[-2, 0, 1]).unwrap();
        let seventh = k.from_rational(BigRational::new(BigInt::from(1), BigInt::from(7)));
        let d = vec![k.one(), k.one(), k.one(), seventh, k.neg(&k.theta())];
        let pair = is_admissible(k.clone(), QuadraticForm::new(d).unwrap()).unwrap();
        let f7 = k.factor_prime(7).unwrap();
        assert_eq!(pair.reduce_form(&f7[0]), Err(QuadFormError::NumField(NumFieldError::DenominatorNotCoprime(7))));
        assert!(pair.reduce_form(&k.factor_prime(3).unwrap()[0]).is_ok());
    }

    #[test]
    fn signed_discriminant_class() {
        let f3 = FqContext::prime_field(3).unwrap();
        // x^2 + y^2 over F_3 is anisotropic: -1 is not a square.
        assert_eq!(FqForm::from_ints(f3.clone(), &[1, 1]).square_class(), Some(SquareClass::Nonsquare));
        assert_eq!(FqForm::from_ints(f3.clone(), &[1, 2]).square_class(), Some(SquareClass::Square));
        assert_eq!(FqForm::from_ints(f3.clone(), &[1, 1, 1, 1]).square_class(), Some(SquareClass::Square));
        assert_eq!(FqForm::from_ints(f3, &[1, 1, 1, 2]).square_class(), Some(SquareClass::Nonsquare));
        let f5 = FqContext::prime_field(5).unwrap();
        assert_eq!(FqForm::from_ints(f5, &[1, 1]).square_class(), Some(SquareClass::Square));
    }
}
