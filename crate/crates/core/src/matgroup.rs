//! Explicit matrices over `F_q` preserving a diagonal form: isometry tests,
//! reflections, two independent order oracles, the hyperbolic (Witt) basis
//! and the cyclic witness subgroup.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::{self, ArithError};
use crate::finfield::{FieldError, FqContext, FqElem};
use crate::orders::FactoredOrder;
use crate::quadform::{FqForm, SquareClass};

/// Enumeration guard for [`brute_force_so_count`]: `q^(dim²)`.
pub const BRUTE_FORCE_LIMIT: u64 = 100_000_000;
/// Enumeration guard per recursion level of [`point_count_so_order`]: `q^dim`.
pub const POINT_COUNT_LIMIT: u64 = 10_000_000;
pub const ISOTROPIC_SEARCH_BUDGET: usize = 100_000;
pub const CAUCHY_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatGroupError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("vector is isotropic")]
    IsotropicVector,
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("form is not a sum of hyperbolic planes")]
    NotSquareDisc,
    #[error("binary form has no isotropic vector")]
    NoIsotropicVector,
    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("{ell} does not divide the group order")]
    EllDoesNotDivide { ell: BigUint },
    #[error("group order has an unbounded p-part")]
    UnboundedOrder,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqMatrix {
    ctx: FqContext,
    rows: Vec<Vec<FqElem>>,
}

impl FqMatrix {
    pub fn from_rows(ctx: FqContext, rows: Vec<Vec<FqElem>>) -> Result<Self, MatGroupError> {
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(MatGroupError::DimMismatch(row.len(), n));
            }
            if row.iter().any(|a| !ctx.contains(a)) {
                return Err(FieldError::ForeignElement.into());
            }
        }
        Ok(Self { ctx, rows })
    }

    pub fn from_ints(ctx: FqContext, rows: &[Vec<i64>]) -> Result<Self, MatGroupError> {
        let rows = rows.iter().map(|r| r.iter().map(|&c| ctx.from_i64(c)).collect()).collect();
        Self::from_rows(ctx, rows)
    }

    pub fn identity(ctx: &FqContext, dim: usize) -> Self {
        Self::scalar(ctx, dim, &ctx.one())
    }

    pub fn scalar(ctx: &FqContext, dim: usize, c: &FqElem) -> Self {
        let rows = (0..dim).map(|i| (0..dim).map(|j| if i == j { c.clone() } else { ctx.zero() }).collect()).collect();
        Self { ctx: ctx.clone(), rows }
    }

    pub fn diagonal(ctx: &FqContext, d: &[FqElem]) -> Self {
        let n = d.len();
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { ctx.zero() }).collect()).collect();
        Self { ctx: ctx.clone(), rows }
    }

    /// Gram matrix of `q(v) = Σ a_i v_i²` (so `q(v) = vᵀ G v`).
    pub fn gram(form: &FqForm) -> Self {
        Self::diagonal(form.ctx(), form.diagonal())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(ctx: &FqContext, cols: &[Vec<FqElem>]) -> Self {
        let n = cols.len();
        let rows = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        Self { ctx: ctx.clone(), rows }
    }

    pub fn ctx(&self) -> &FqContext {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<FqElem>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &FqElem {
        &self.rows[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<FqElem> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let rows = (0..n).map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect()).collect();
        Self { ctx: self.ctx.clone(), rows }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = &self.ctx;
        let n = self.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(k.zero(), |acc, t| k.add(&acc, &k.mul(&self.rows[i][t], &other.rows[t][j]))))
                    .collect()
            })
            .collect();
        Self { ctx: k.clone(), rows }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let k = &self.ctx;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| k.sub(x, y)).collect())
            .collect();
        Self { ctx: k.clone(), rows }
    }

    pub fn apply(&self, v: &[FqElem]) -> Vec<FqElem> {
        let k = &self.ctx;
        self.rows.iter().map(|r| r.iter().zip(v).fold(k.zero(), |acc, (a, x)| k.add(&acc, &k.mul(a, x)))).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.ctx, self.dim())
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> FqElem {
        let k = &self.ctx;
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut det = k.one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&i| !k.is_zero(&a[i][col])) else {
                return k.zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = k.neg(&det);
            }
            det = k.mul(&det, &a[col][col]);
            let inv = k.inv(&a[col][col]).expect("nonzero pivot");
            for i in col + 1..n {
                if k.is_zero(&a[i][col]) {
                    continue;
                }
                let f = k.mul(&a[i][col], &inv);
                for j in col..n {
                    let t = k.mul(&f, &a[col][j]);
                    a[i][j] = k.sub(&a[i][j], &t);
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self, MatGroupError> {
        let k = &self.ctx;
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut b = Self::identity(k, n).rows;
        for col in 0..n {
            let piv = (col..n).find(|&i| !k.is_zero(&a[i][col])).ok_or(MatGroupError::Singular)?;
            a.swap(piv, col);
            b.swap(piv, col);
            let inv = k.inv(&a[col][col])?;
            for j in 0..n {
                a[col][j] = k.mul(&a[col][j], &inv);
                b[col][j] = k.mul(&b[col][j], &inv);
            }
            for i in 0..n {
                if i == col || k.is_zero(&a[i][col]) {
                    continue;
                }
                let f = a[i][col].clone();
                for j in 0..n {
                    let t = k.mul(&f, &a[col][j]);
                    a[i][j] = k.sub(&a[i][j], &t);
                    let t = k.mul(&f, &b[col][j]);
                    b[i][j] = k.sub(&b[i][j], &t);
                }
            }
        }
        Ok(Self { ctx: k.clone(), rows: b })
    }

    pub fn pow(&self, exp: &BigUint) -> Self {
        let mut result = Self::identity(&self.ctx, self.dim());
        for i in (0..exp.bits()).rev() {
            result = result.mul(&result);
            if exp.bit(i) {
                result = result.mul(self);
            }
        }
        result
    }

    pub fn pow_u64(&self, exp: u64) -> Self {
        self.pow(&BigUint::from(exp))
    }

    /// `det(x·I - M)`.
    pub fn charpoly_at(&self, x: &FqElem) -> FqElem {
        Self::scalar(&self.ctx, self.dim(), x).sub(self).det()
    }

    /// Exact order given a multiple `exponent` of it, by divisor descent.
    pub fn order_dividing(&self, exponent: &BigUint, seed: u64) -> Result<BigUint, MatGroupError> {
        let factors = arith::factorize(exponent, seed)?;
        Ok(arith::order_by_descent(exponent, &factors, |e| self.pow(e).is_identity()))
    }

    /// Entries as residue vectors, row-major.
    pub fn to_residues(&self) -> Vec<Vec<Vec<u64>>> {
        self.rows.iter().map(|r| r.iter().map(|a| self.ctx.to_ints(a)).collect()).collect()
    }

    pub fn from_residues(ctx: &FqContext, entries: &[Vec<Vec<u64>>]) -> Result<Self, MatGroupError> {
        let rows = entries
            .iter()
            .map(|r| r.iter().map(|c| ctx.elem(c)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(ctx.clone(), rows)
    }
}

/// `B(x, y) = Σ a_i x_i y_i`, so that `q(x) = B(x, x)`.
pub fn bilinear(form: &FqForm, x: &[FqElem], y: &[FqElem]) -> FqElem {
    let k = form.ctx();
    form.diagonal().iter().zip(x.iter().zip(y)).fold(k.zero(), |acc, (a, (s, t))| k.add(&acc, &k.mul(a, &k.mul(s, t))))
}

/// `Mᵀ G M = G` and `det M = 1`.
pub fn is_special_isometry(form: &FqForm, m: &FqMatrix) -> Result<bool, MatGroupError> {
    if m.dim() != form.dim() {
        return Err(MatGroupError::DimMismatch(m.dim(), form.dim()));
    }
    let g = FqMatrix::gram(form);
    Ok(m.transpose().mul(&g).mul(m) == g && m.det() == form.ctx().one())
}

/// Reflection `x ↦ x - (2B(x, v)/q(v))·v` in an anisotropic vector.
pub fn reflection(form: &FqForm, v: &[FqElem]) -> Result<FqMatrix, MatGroupError> {
    if v.len() != form.dim() {
        return Err(MatGroupError::DimMismatch(v.len(), form.dim()));
    }
    let k = form.ctx();
    let qv = form.evaluate(v);
    if k.is_zero(&qv) {
        return Err(MatGroupError::IsotropicVector);
    }
    let c = k.div(&k.from_u64(2), &qv)?;
    let n = form.dim();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let t = k.mul(&c, &k.mul(&form.diagonal()[j], &k.mul(&v[j], &v[i])));
                    let delta = if i == j { k.one() } else { k.zero() };
                    k.sub(&delta, &t)
                })
                .collect()
        })
        .collect();
    FqMatrix::from_rows(k.clone(), rows)
}

fn random_anisotropic(form: &FqForm, rng: &mut ChaCha8Rng) -> Vec<FqElem> {
    let k = form.ctx();
    loop {
        let v: Vec<FqElem> = (0..form.dim()).map(|_| k.random(rng)).collect();
        if !k.is_zero(&form.evaluate(&v)) {
            return v;
        }
    }
}

fn random_so_element_with(form: &FqForm, rng: &mut ChaCha8Rng) -> FqMatrix {
    let mut g = FqMatrix::identity(form.ctx(), form.dim());
    for _ in 0..2 * form.dim() {
        let v = random_anisotropic(form, rng);
        g = g.mul(&reflection(form, &v).expect("anisotropic"));
    }
    g
}

/// Product of `2·dim` reflections in seeded random anisotropic vectors.
pub fn random_so_element(form: &FqForm, seed: u64) -> FqMatrix {
    random_so_element_with(form, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn all_vectors(k: &FqContext, dim: usize) -> Vec<Vec<FqElem>> {
    let elems: Vec<FqElem> = k.elements().collect();
    let mut out: Vec<Vec<FqElem>> = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| elems.iter().map(move |e| [v.as_slice(), std::slice::from_ref(e)].concat()))
            .collect();
    }
    out
}

fn guard(k: &FqContext, exponent: usize, limit: u64, what: &str) -> Result<(), MatGroupError> {
    let size = k.q().pow(exponent as u32);
    if size > BigUint::from(limit) {
        return Err(MatGroupError::TooLarge(format!("{what}: q^{exponent} = {size} > {limit}")));
    }
    Ok(())
}

/// Number of `dim × dim` matrices `M` over `F_q` with `Mᵀ G M = G` and
/// `det M = 1`. Enumerates matrices column by column and abandons a
/// partial matrix as soon as one Gram entry disagrees, which counts the
/// same set as a full sweep over all `q^(dim²)` matrices.
pub fn brute_force_so_count(form: &FqForm) -> Result<BigUint, MatGroupError> {
    let k = form.ctx();
    let n = form.dim();
    guard(k, n * n, BRUTE_FORCE_LIMIT, "brute force")?;
    let vectors = all_vectors(k, n);
    // Column i must have q(c_i) = a_i.
    let candidates: Vec<Vec<&Vec<FqElem>>> =
        (0..n).map(|i| vectors.iter().filter(|v| form.evaluate(v) == form.diagonal()[i]).collect()).collect();
    let one = k.one();
    let mut count = BigUint::zero();
    let mut cols: Vec<Vec<FqElem>> = Vec::with_capacity(n);
    fn extend(
        form: &FqForm,
        candidates: &[Vec<&Vec<FqElem>>],
        cols: &mut Vec<Vec<FqElem>>,
        one: &FqElem,
        count: &mut BigUint,
    ) {
        let i = cols.len();
        if i == candidates.len() {
            if FqMatrix::from_columns(form.ctx(), cols).det() == *one {
                *count += 1u32;
            }
            return;
        }
        for v in &candidates[i] {
            if cols.iter().all(|c| form.ctx().is_zero(&bilinear(form, c, v))) {
                cols.push((*v).clone());
                extend(form, candidates, cols, one, count);
                cols.pop();
            }
        }
    }
    extend(form, &candidates, &mut cols, &one, &mut count);
    Ok(count)
}

/// `#{v : q(v) = c}` by enumerating every vector.
fn sphere_count(k: &FqContext, diag: &[FqElem], c: &FqElem) -> BigUint {
    let elems: Vec<FqElem> = k.elements().collect();
    let squares: Vec<Vec<FqElem>> =
        diag.iter().map(|a| elems.iter().map(|x| k.mul(a, &k.square(x))).collect()).collect();
    fn walk(k: &FqContext, squares: &[Vec<FqElem>], acc: FqElem, c: &FqElem, count: &mut u64) {
        match squares.split_first() {
            None => {
                if acc == *c {
                    *count += 1;
                }
            }
            Some((first, rest)) => {
                for s in first {
                    walk(k, rest, k.add(&acc, s), c, count);
                }
            }
        }
    }
    let mut count = 0u64;
    walk(k, &squares, k.zero(), c, &mut count);
    BigUint::from(count)
}

/// `|SO(q)|` via Witt transitivity: `|O(q)| = #{v : q(v) = a₁} · |O(q|e₁^⊥)|`.
pub fn point_count_so_order(form: &FqForm) -> Result<BigUint, MatGroupError> {
    let k = form.ctx();
    let n = form.dim();
    if n == 0 {
        return Err(MatGroupError::DimMismatch(0, 1));
    }
    guard(k, n, POINT_COUNT_LIMIT, "point count")?;
    let diag = form.diagonal();
    let mut o = BigUint::from(2u32);
    for i in (0..n - 1).rev() {
        o *= sphere_count(k, &diag[i..], &diag[i]);
    }
    Ok(o / 2u32)
}

/// Basis change `B` with `Bᵀ G B` a sum of hyperbolic planes `[[0,1],[1,0]]`.
pub fn witt_hyperbolic_basis(form: &FqForm, seed: u64) -> Result<FqMatrix, MatGroupError> {
    if form.dim() % 2 == 1 || form.square_class() != Some(SquareClass::Square) {
        return Err(MatGroupError::NotSquareDisc);
    }
    let k = form.ctx();
    let n = form.dim();
    let b = |x: &[FqElem], y: &[FqElem]| bilinear(form, x, y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut space: Vec<Vec<FqElem>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect();
    let mut cols: Vec<Vec<FqElem>> = Vec::with_capacity(n);
    let combine = |coeffs: &[FqElem], basis: &[Vec<FqElem>]| -> Vec<FqElem> {
        (0..n).map(|t| coeffs.iter().zip(basis).fold(k.zero(), |acc, (c, v)| k.add(&acc, &k.mul(c, &v[t])))).collect()
    };
    while !space.is_empty() {
        let u = if space.len() == 2 {
            let (w1, w2) = (&space[0], &space[1]);
            let (alpha, beta, gamma) = (b(w1, w1), b(w1, w2), b(w2, w2));
            if k.is_zero(&alpha) {
                w1.clone()
            } else {
                // alpha x² + 2 beta x + gamma = 0
                let disc = k.sub(&k.square(&beta), &k.mul(&alpha, &gamma));
                let s = k.sqrt(&disc).ok_or(MatGroupError::NoIsotropicVector)?;
                let x = k.div(&k.sub(&s, &beta), &alpha)?;
                combine(&[x, k.one()], &space)
            }
        } else {
            let mut found = None;
            for _ in 0..ISOTROPIC_SEARCH_BUDGET {
                let c: Vec<FqElem> = (0..space.len()).map(|_| k.random(&mut rng)).collect();
                let v = combine(&c, &space);
                if v.iter().any(|x| !k.is_zero(x)) && k.is_zero(&b(&v, &v)) {
                    found = Some(v);
                    break;
                }
            }
            found.ok_or(MatGroupError::SearchBudgetExceeded("isotropic vector"))?
        };
        let w = space.iter().find(|w| !k.is_zero(&b(&u, w))).ok_or(MatGroupError::Singular)?;
        let w = {
            let inv = k.inv(&b(&u, w))?;
            w.iter().map(|x| k.mul(x, &inv)).collect::<Vec<_>>()
        };
        let half = k.div(&b(&w, &w), &k.from_u64(2))?;
        let v: Vec<FqElem> = w.iter().zip(&u).map(|(x, y)| k.sub(x, &k.mul(&half, y))).collect();
        // Project the rest of the space onto {u, v}^⊥ and keep an independent set.
        let mut rest: Vec<Vec<FqElem>> = Vec::new();
        for x in &space {
            let (bxv, bxu) = (b(x, &v), b(x, &u));
            let y: Vec<FqElem> =
                (0..n).map(|t| k.sub(&k.sub(&x[t], &k.mul(&bxv, &u[t])), &k.mul(&bxu, &v[t]))).collect();
            let mut trial = rest.clone();
            trial.push(y.clone());
            if rank(k, &trial) == trial.len() {
                rest.push(y);
            }
        }
        cols.push(u);
        cols.push(v);
        space = rest;
    }
    Ok(FqMatrix::from_columns(k, &cols))
}

fn rank(k: &FqContext, vectors: &[Vec<FqElem>]) -> usize {
    let mut a: Vec<Vec<FqElem>> = vectors.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| !k.is_zero(&a[i][col])) else {
            continue;
        };
        a.swap(piv, r);
        let inv = k.inv(&a[r][col]).expect("nonzero pivot");
        for i in r + 1..a.len() {
            let f = k.mul(&a[i][col], &inv);
            for j in col..cols {
                let t = k.mul(&f, &a[r][j]);
                a[i][j] = k.sub(&a[i][j], &t);
            }
        }
        r += 1;
    }
    r
}

/// `g = B · blockdiag(diag(λ, λ⁻¹), …) · B⁻¹` in the hyperbolic basis `B`.
pub fn build_cyclic_generator(form: &FqForm, lambda: &FqElem, seed: u64) -> Result<FqMatrix, MatGroupError> {
    let k = form.ctx();
    let b = witt_hyperbolic_basis(form, seed)?;
    let inv = k.inv(lambda)?;
    let d: Vec<FqElem> = (0..form.dim()).map(|i| if i % 2 == 0 { lambda.clone() } else { inv.clone() }).collect();
    Ok(b.mul(&FqMatrix::diagonal(k, &d)).mul(&b.inverse()?))
}

/// True iff no `g^{a·t}`, `1 ≤ t < ℓ`, has eigenvalue `1` or `-1`.
pub fn eigenvalue_pm1_avoidance(g: &FqMatrix, a: &BigUint, ell: &BigUint) -> bool {
    let k = g.ctx();
    let one = k.one();
    let minus_one = k.neg(&one);
    let base = g.pow(a);
    let mut h = FqMatrix::identity(k, g.dim());
    let mut t = BigUint::one();
    while t < *ell {
        h = h.mul(&base);
        if k.is_zero(&h.charpoly_at(&one)) || k.is_zero(&h.charpoly_at(&minus_one)) {
            return false;
        }
        t += 1u32;
    }
    true
}

/// A matrix of exact order `ℓ` in `SO(q)`, found by powering random
/// elements into the Sylow `ℓ`-subgroup.
pub fn find_order_l_element(
    form: &FqForm,
    ell: &BigUint,
    group_order: &FactoredOrder,
    seed: u64,
) -> Result<FqMatrix, MatGroupError> {
    let order = group_order.evaluate().ok_or(MatGroupError::UnboundedOrder)?;
    if !order.is_multiple_of(ell) {
        return Err(MatGroupError::EllDoesNotDivide { ell: ell.clone() });
    }
    let mut cofactor = order;
    while cofactor.is_multiple_of(ell) {
        cofactor /= ell;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CAUCHY_ATTEMPTS {
        let mut x = random_so_element_with(form, &mut rng).pow(&cofactor);
        if x.is_identity() {
            continue;
        }
        loop {
            let y = x.pow(ell);
            if y.is_identity() {
                return Ok(x);
            }
            x = y;
        }
    }
    Err(MatGroupError::SearchBudgetExceeded("element of order ℓ"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::so_order;

    fn f(p: u64) -> FqContext {
        FqContext::prime_field(p).unwrap()
    }

    #[test]
    fn isometry_basics() {
        let form = FqForm::from_ints(f(5), &[1, 1, 1]);
        let id = FqMatrix::identity(form.ctx(), 3);
        assert!(is_special_isometry(&form, &id).unwrap());
        let neg = FqMatrix::diagonal(form.ctx(), &[form.ctx().one(), form.ctx().one(), form.ctx().from_i64(-1)]);
        assert!(!is_special_isometry(&form, &neg).unwrap());
        let other = FqMatrix::identity(form.ctx(), 2);
        assert_eq!(is_special_isometry(&form, &other), Err(MatGroupError::DimMismatch(2, 3)));
    }

    #[test]
    fn reflections() {
        let k = f(7);
        let form = FqForm::from_ints(k.clone(), &[1, 1]);
        let r = reflection(&form, &[k.one(), k.zero()]).unwrap();
        assert_eq!(r, FqMatrix::from_ints(k.clone(), &[vec![-1, 0], vec![0, 1]]).unwrap());
        let iso = [k.one(), k.zero()];
        let hyp = FqForm::from_ints(k, &[1, -1]);
        assert_eq!(reflection(&hyp, &[iso[0].clone(), iso[0].clone()]), Err(MatGroupError::IsotropicVector));

        let k = f(3);
        let form = FqForm::from_ints(k.clone(), &[1, 1, 1]);
        let v = vec![k.one(), k.one(), k.zero()];
        let r = reflection(&form, &v).unwrap();
        let fixed = vec![k.one(), k.from_i64(-1), k.zero()];
        assert_eq!(r.apply(&fixed), fixed);
        let e3 = vec![k.zero(), k.zero(), k.one()];
        assert_eq!(r.apply(&e3), e3);
        assert_eq!(r.apply(&v), v.iter().map(|x| k.neg(x)).collect::<Vec<_>>());
        assert_eq!(r.det(), k.from_i64(-1));
        let two = r.mul(&reflection(&form, &e3).unwrap());
        assert!(is_special_isometry(&form, &two).unwrap());
    }

    #[test]
    fn random_elements_are_deterministic_isometries() {
        let form = FqForm::from_ints(f(5), &[1, 1, 1]);
        let a = random_so_element(&form, 7);
        assert!(is_special_isometry(&form, &a).unwrap());
        assert_eq!(a, random_so_element(&form, 7));
    }

    #[test]
    fn brute_force_counts() {
        let k = f(3);
        assert_eq!(brute_force_so_count(&FqForm::from_ints(k.clone(), &[1, 1, 1])).unwrap(), BigUint::from(24u32));
        assert_eq!(brute_force_so_count(&FqForm::from_ints(k.clone(), &[1, 1, 1, 1])).unwrap(), BigUint::from(576u32));
        assert_eq!(brute_force_so_count(&FqForm::from_ints(k.clone(), &[1, 1, 1, 2])).unwrap(), BigUint::from(720u32));
        assert!(matches!(
            brute_force_so_count(&FqForm::from_ints(f(7), &[1, 1, 1, 1, 1])),
            Err(MatGroupError::TooLarge(_))
        ));
    }

    #[test]
    fn point_counts() {
        let k = f(3);
        assert_eq!(point_count_so_order(&FqForm::from_ints(k.clone(), &[1, 1, 1])).unwrap(), BigUint::from(24u32));
        assert_eq!(
            point_count_so_order(&FqForm::from_ints(k.clone(), &[1, 1, 1, 1, 1])).unwrap(),
            BigUint::from(51840u32)
        );
        assert_eq!(point_count_so_order(&FqForm::from_ints(k, &[2])).unwrap(), BigUint::one());
    }

    #[test]
    fn hyperbolic_basis() {
        let k = f(7);
        let form = FqForm::from_ints(k.clone(), &[1, -1]);
        let b = witt_hyperbolic_basis(&form, 0).unwrap();
        let h = FqMatrix::from_ints(k.clone(), &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(b.transpose().mul(&FqMatrix::gram(&form)).mul(&b), h);

        // x² + y² over F_7 is anisotropic, and its signed discriminant -1 is a nonsquare.
        assert_eq!(witt_hyperbolic_basis(&FqForm::from_ints(k.clone(), &[1, 1]), 0), Err(MatGroupError::NotSquareDisc));

        let form = FqForm::from_ints(f(5), &[1, 1]);
        let b = witt_hyperbolic_basis(&form, 0).unwrap();
        let h5 = FqMatrix::from_ints(f(5), &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(b.transpose().mul(&FqMatrix::gram(&form)).mul(&b), h5);

        let form = FqForm::from_ints(k.clone(), &[1, 6, 1, 6]);
        let b = witt_hyperbolic_basis(&form, 3).unwrap();
        let g = b.transpose().mul(&FqMatrix::gram(&form)).mul(&b);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i / 2 == j / 2 && i != j { 1 } else { 0 };
                assert_eq!(g.get(i, j), &k.from_u64(want));
            }
        }
    }

    #[test]
    fn cyclic_generator_on_hyperbolic_four_space() {
        let k = f(7);
        let form = FqForm::from_ints(k.clone(), &[1, 6, 1, 6]);
        let g = build_cyclic_generator(&form, &k.from_u64(3), 0).unwrap();
        assert!(is_special_isometry(&form, &g).unwrap());
        assert_eq!(g.order_dividing(&BigUint::from(6u32), 0).unwrap(), BigUint::from(6u32));
        for lam in [3u64, 5] {
            assert!(k.is_zero(&g.charpoly_at(&k.from_u64(lam))));
        }
        let g2 = g.pow_u64(2);
        for lam in [2u64, 4] {
            assert!(k.is_zero(&g2.charpoly_at(&k.from_u64(lam))));
        }
        assert_eq!(g2.charpoly_at(&k.one()), k.from_u64(2));
        assert_eq!(g2.charpoly_at(&k.from_i64(-1)), k.one());
        assert!(eigenvalue_pm1_avoidance(&g, &BigUint::from(2u32), &BigUint::from(3u32)));
        let id = FqMatrix::identity(&k, 4);
        assert!(!eigenvalue_pm1_avoidance(&id, &BigUint::one(), &BigUint::from(3u32)));
        assert!(build_cyclic_generator(&form, &k.one(), 0).unwrap().is_identity());
    }

    #[test]
    fn cauchy_elements() {
        let form = FqForm::from_ints(f(7), &[1, 1, 1, 1, 4]);
        let order = so_order(5, 7, 1, None).unwrap();
        let ell = BigUint::from(5u32);
        let g = find_order_l_element(&form, &ell, &order, 0).unwrap();
        assert!(!g.is_identity() && g.pow(&ell).is_identity());
        assert!(is_special_isometry(&form, &g).unwrap());

        let form = FqForm::from_ints(f(3), &[1, 1, 1]);
        let order = so_order(3, 3, 1, None).unwrap();
        let g = find_order_l_element(&form, &BigUint::from(3u32), &order, 0).unwrap();
        assert!(!g.is_identity() && g.pow_u64(3).is_identity());
        assert_eq!(
            find_order_l_element(&form, &BigUint::from(5u32), &order, 0),
            Err(MatGroupError::EllDoesNotDivide { ell: BigUint::from(5u32) })
        );
    }
}
