//! Certificates for geometrically equivalent covers: good primes,
//! single-prime equivalence certificates, split-prime isospectral pairs,
//! towers with growing volume ratio, and an independent verifier.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arith;
use crate::matgroup::{self, FqMatrix, MatGroupError};
use crate::numfield::{parse_rational, NumFieldError, NumberField, PrimeIdealFactor};
use crate::orders::{
    self, AvoidanceCheck, Branch, CoverPrime, Criterion, DivisibilityOracle, Factor, FactoredOrder, Mode, OrdersError,
    Witness,
};
use crate::quadform::{is_admissible, AdmissiblePair, FqForm, GroupType, QuadFormError, QuadraticForm, SquareClass};

pub const SCHEMA_VERSION: &str = "orbicover/1";
pub const DIGEST_ALGORITHM: &str = "sha256";
/// Largest odd prime tried when two primes need a common `ℓ`.
pub const COMMON_ELL_SEARCH_BOUND: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    NumField(#[from] NumFieldError),
    #[error(transparent)]
    QuadForm(#[from] QuadFormError),
    #[error(transparent)]
    Orders(#[from] OrdersError),
    #[error(transparent)]
    MatGroup(#[from] MatGroupError),
    #[error("p = {0} has no prime of good reduction")]
    NotGoodPrime(u64),
    #[error("no odd prime ℓ passes at both primes over {p}")]
    NoCommonEll { p: u64 },
    #[error("only {found} usable primes up to {bound}; the tower needs {needed}")]
    InsufficientPrimes { found: usize, needed: usize, bound: u64 },
    #[error("a tower needs at least one stage")]
    EmptyTower,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
}

/// User-facing description of an admissible pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairInput {
    pub min_poly: Vec<i64>,
    /// One coefficient vector per diagonal entry, in powers of `θ`,
    /// rationals written `"num/den"`.
    pub form_diagonal: Vec<Vec<String>>,
}

impl PairInput {
    pub fn from_json(text: &str) -> Result<Self, CertifyError> {
        serde_json::from_str(text).map_err(|e| CertifyError::Input(e.to_string()))
    }

    pub fn field_and_form(&self) -> Result<(NumberField, QuadraticForm), CertifyError> {
        let mut parsed = Vec::with_capacity(self.form_diagonal.len());
        for (i, entry) in self.form_diagonal.iter().enumerate() {
            let coeffs = entry
                .iter()
                .map(|s| parse_rational(s).ok_or_else(|| CertifyError::Input(format!("entry {i}: bad rational {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            parsed.push(coeffs);
        }
        let field = NumberField::new(&self.min_poly)?;
        let diagonal = parsed.into_iter().map(|c| field.elem(c)).collect();
        Ok((field.clone(), QuadraticForm::new(diagonal)?))
    }

    pub fn to_pair(&self) -> Result<AdmissiblePair, CertifyError> {
        let (field, form) = self.field_and_form()?;
        Ok(is_admissible(field, form)?)
    }
}

/// Normalized pair description embedded in certificates and hashed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertInput {
    pub min_poly: Vec<i64>,
    pub form_diagonal: Vec<Vec<String>>,
    pub m: usize,
}

impl CertInput {
    pub fn of_pair(pair: &AdmissiblePair) -> Self {
        Self {
            min_poly: pair.field().min_poly().to_vec(),
            form_diagonal: pair.form().diagonal().iter().map(|a| a.to_strings()).collect(),
            m: pair.m(),
        }
    }

    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("serializable");
        format!("{:x}", Sha256::digest(&bytes))
    }

    pub fn to_pair(&self) -> Result<AdmissiblePair, CertifyError> {
        PairInput { min_poly: self.min_poly.clone(), form_diagonal: self.form_diagonal.clone() }.to_pair()
    }
}

#[derive(Debug, Clone)]
pub struct GoodPrime {
    pub pf: PrimeIdealFactor,
    pub fqform: FqForm,
    pub group_order: FactoredOrder,
    /// `[G_𝔭 : ρ_𝔭(Γ)] ∈ {1, 2}`.
    pub index_bound: [u8; 2],
    pub type_label: GroupType,
}

impl GoodPrime {
    pub fn new(pair: &AdmissiblePair, pf: &PrimeIdealFactor) -> Result<Self, CertifyError> {
        let fqform = pair.reduce_form(pf)?;
        let group_order = orders::so_order(fqform.dim(), pf.p, pf.residue_degree as u32, fqform.square_class())?;
        let type_label = fqform.group_type();
        Ok(Self { pf: pf.clone(), fqform, group_order, index_bound: [1, 2], type_label })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    Dyadic,
    PolyDiscriminant,
    DenominatorNotCoprime,
    BadReduction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub factor_poly: Option<Vec<u64>>,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, Default)]
pub struct PrimeScan {
    pub good: Vec<GoodPrime>,
    pub exclusions: Vec<Exclusion>,
}

/// Good primes over rational primes `p ≤ bound`, with the excluded ones
/// and why.
pub fn good_primes(pair: &AdmissiblePair, bound: u64) -> PrimeScan {
    let mut scan = PrimeScan::default();
    for p in arith::primes_up_to(bound) {
        scan_prime(pair, p, &mut scan);
    }
    scan
}

fn scan_prime(pair: &AdmissiblePair, p: u64, scan: &mut PrimeScan) {
    if p == 2 {
        scan.exclusions.push(Exclusion { p, factor_poly: None, reason: ExclusionReason::Dyadic });
        return;
    }
    let factors = match pair.field().factor_prime(p) {
        Ok(f) => f,
        Err(_) => {
            scan.exclusions.push(Exclusion { p, factor_poly: None, reason: ExclusionReason::PolyDiscriminant });
            return;
        }
    };
    let pb = num_bigint::BigInt::from(p);
    let bad_denominator = pair.form().diagonal().iter().flat_map(|a| a.coeffs()).any(|c| c.denom().is_multiple_of(&pb));
    if bad_denominator {
        scan.exclusions.push(Exclusion { p, factor_poly: None, reason: ExclusionReason::DenominatorNotCoprime });
        return;
    }
    for pf in factors {
        match GoodPrime::new(pair, &pf) {
            Ok(gp) => scan.good.push(gp),
            Err(_) => scan.exclusions.push(Exclusion {
                p,
                factor_poly: Some(pf.factor_poly.clone()),
                reason: ExclusionReason::BadReduction,
            }),
        }
    }
}

/// The good primes over a single rational prime `p`.
pub fn good_primes_over(pair: &AdmissiblePair, p: u64) -> Result<Vec<GoodPrime>, CertifyError> {
    if !arith::is_prime_u64(p) {
        return Err(NumFieldError::NotPrime(p).into());
    }
    let mut scan = PrimeScan::default();
    scan_prime(pair, p, &mut scan);
    if scan.good.is_empty() {
        return Err(CertifyError::NotGoodPrime(p));
    }
    Ok(scan.good)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CertOptions {
    pub mode: Mode,
    pub with_witness: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub p: u64,
    pub factor_poly: Vec<u64>,
    pub r: usize,
    pub ideal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRecord {
    pub diagonal: Vec<Vec<u64>>,
    pub disc: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub square_class: Option<SquareClass>,
    pub type_label: GroupType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverPrimeRecord {
    pub ell: String,
    pub branch: Branch,
    pub d: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<String>,
    /// Multiplicative order of `p` modulo `ℓ`.
    pub ord_ell_p: String,
    pub divides_group_order: bool,
}

/// Everything certified at one prime ideal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCertificate {
    pub prime: PrimeRecord,
    pub reduction: ReductionRecord,
    pub group_order: FactoredOrder,
    pub cover_prime: CoverPrimeRecord,
    pub avoidance_report: Vec<AvoidanceCheck>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverData {
    /// `[G_𝔭 : ρ_𝔭(Γ)]` is one of these.
    pub index_bound: Vec<u8>,
    /// `[Γ : ker ρ_𝔭]` is one of these.
    pub kernel_index: Vec<String>,
    /// `[ρ_𝔭^{-1}(C_𝔭) : ker ρ_𝔭]`, the volume ratio of the two covers.
    pub index_ratio: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub text: String,
    pub anchor: String,
}

fn assertion(text: impl Into<String>, anchor: &str) -> Assertion {
    Assertion { text: text.into(), anchor: anchor.to_string() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceCertificate {
    pub version: String,
    pub input: CertInput,
    pub input_digest: String,
    pub digest_algorithm: String,
    #[serde(flatten)]
    pub local: LocalCertificate,
    pub volume_ratio: String,
    pub cover_data: CoverData,
    pub assertions: Vec<Assertion>,
    pub mode: Mode,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverRecord {
    pub name: String,
    pub subgroup: String,
    pub subgroup_order: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsospectralPairCertificate {
    pub version: String,
    pub input: CertInput,
    pub input_digest: String,
    pub digest_algorithm: String,
    pub p: u64,
    pub r: usize,
    pub primes: Vec<LocalCertificate>,
    pub shared_ell: String,
    pub covers: Vec<CoverRecord>,
    pub multiplicity_assertion: Assertion,
    pub nonisometry_assertion: Assertion,
    pub assertions: Vec<Assertion>,
    pub mode: Mode,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TowerStrategy {
    SameEllManyPrimes,
    ManyDistinctElls,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerStage {
    pub j: usize,
    /// Indices into the certificate's `locals`.
    pub locals: Vec<usize>,
    pub ells: Vec<String>,
    pub volume_ratio: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerCertificate {
    pub version: String,
    pub input: CertInput,
    pub input_digest: String,
    pub digest_algorithm: String,
    pub strategy: TowerStrategy,
    pub stages: Vec<TowerStage>,
    pub locals: Vec<LocalCertificate>,
    pub assertions: Vec<Assertion>,
    pub mode: Mode,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Equivalence(EquivalenceCertificate),
    IsospectralPair(IsospectralPairCertificate),
    Tower(TowerCertificate),
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, CertifyError> {
        serde_json::from_str(text).map_err(|e| CertifyError::MalformedCertificate(e.to_string()))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Equivalence(_) => "equivalence",
            Certificate::IsospectralPair(_) => "isospectral_pair",
            Certificate::Tower(_) => "tower",
        }
    }
}

fn prime_record(pf: &PrimeIdealFactor) -> PrimeRecord {
    PrimeRecord { p: pf.p, factor_poly: pf.factor_poly.clone(), r: pf.residue_degree, ideal: pf.to_string() }
}

fn reduction_record(form: &FqForm) -> ReductionRecord {
    let k = form.ctx();
    ReductionRecord {
        diagonal: form.diagonal().iter().map(|a| k.to_ints(a)).collect(),
        disc: k.to_ints(form.disc()),
        square_class: form.square_class(),
        type_label: form.group_type(),
    }
}

fn build_witness(gp: &GoodPrime, cp: &CoverPrime, seed: u64) -> Result<Witness, CertifyError> {
    let form = &gp.fqform;
    match (&cp.branch, &cp.a) {
        (Branch::EvenSquareDisc, Some(a)) => {
            let k = form.ctx();
            let lambda = k.multiplicative_generator().map_err(OrdersError::from)?;
            let g0 = matgroup::build_cyclic_generator(form, &lambda, seed)?;
            let avoids = matgroup::eigenvalue_pm1_avoidance(&g0, a, &cp.ell);
            Ok(Witness {
                matrix: g0.pow(a).to_residues(),
                order: cp.ell.to_string(),
                construction: format!("hyperbolic torus: g^{a} for g acting as diag(λ, λ⁻¹) on each plane"),
                eigenvalue_avoidance: Some(avoids),
            })
        }
        _ => {
            let g = matgroup::find_order_l_element(form, &cp.ell, &gp.group_order, seed)?;
            Ok(Witness {
                matrix: g.to_residues(),
                order: cp.ell.to_string(),
                construction: "power of a random product of reflections into the Sylow ℓ-subgroup".to_string(),
                eigenvalue_avoidance: None,
            })
        }
    }
}

fn local_certificate(gp: &GoodPrime, cp: CoverPrime, opts: &CertOptions) -> Result<LocalCertificate, CertifyError> {
    let oracle = DivisibilityOracle::new(&cp.ell, gp.pf.p, opts.seed)?;
    let witness = if opts.with_witness { Some(build_witness(gp, &cp, opts.seed)?) } else { None };
    let witness_ok = witness.as_ref().is_none_or(|w| w.eigenvalue_avoidance != Some(false));
    Ok(LocalCertificate {
        prime: prime_record(&gp.pf),
        reduction: reduction_record(&gp.fqform),
        group_order: gp.group_order.clone(),
        cover_prime: CoverPrimeRecord {
            ell: cp.ell.to_string(),
            branch: cp.branch,
            d: cp.d,
            a: cp.a.as_ref().map(|a| a.to_string()),
            ord_ell_p: oracle.order().to_string(),
            divides_group_order: cp.divides_group_order,
        },
        passes: cp.passes(opts.mode) && witness_ok,
        avoidance_report: cp.avoidance_report,
        witness,
    })
}

fn local_assertions(pair: &AdmissiblePair, ell: &BigUint) -> Vec<Assertion> {
    let mut out = vec![
        assertion(
            format!(
                "ℓ = {ell} divides no admissible bound on |H_𝔭| for the totally geodesic subgroups H (avoidance report), \
                 so C_𝔭 ∩ H_𝔭 = {{1}}"
            ),
            "subgroup-condition",
        ),
        assertion(
            "ρ_𝔭(Γ) has index 1 or 2 in G_𝔭; C_𝔭 is cyclic of odd prime order, hence C_𝔭 < ρ_𝔭(Γ)",
            "index-one-or-two",
        ),
        assertion(
            "strong approximation makes ρ_𝔭 onto its image for all but finitely many 𝔭; this 𝔭 is assumed to lie in that set",
            "strong-approximation",
        ),
        assertion(
            format!("the cover M_1 → M_C has odd degree {ell}, so orientability is inherited"),
            "odd-degree-orientability",
        ),
    ];
    if pair.dim().is_multiple_of(2) {
        out.push(assertion(
            "even dimension: SO(q) has center {±1}; the kernel of ρ_𝔭 may meet it, which the index bound {1, 2} absorbs",
            "central-kernel",
        ));
    }
    if pair.m() == 3 {
        out.push(assertion(
            "m = 3: only subforms of dimension 3 (totally geodesic surfaces) occur; their bounds are the strict-mode entries",
            "low-dimension",
        ));
    }
    out
}

fn header(pair: &AdmissiblePair) -> (CertInput, String) {
    let input = CertInput::of_pair(pair);
    let digest = input.digest();
    (input, digest)
}

/// Equivalence certificate at a single good prime: the covers for
/// `ker ρ_𝔭` and `ρ_𝔭^{-1}(C_𝔭)` are geometrically equivalent with volume
/// ratio `ℓ`.
pub fn build_certificate(
    pair: &AdmissiblePair,
    gp: &GoodPrime,
    opts: &CertOptions,
) -> Result<EquivalenceCertificate, CertifyError> {
    let cp = orders::select_cover_prime(&gp.fqform, pair.m(), opts.seed)?;
    let ell = cp.ell.clone();
    let local = local_certificate(gp, cp, opts)?;
    let kernel_index = match gp.group_order.evaluate() {
        Some(n) => vec![n.to_string(), (n / 2u32).to_string()],
        None => vec!["|G_𝔭|".to_string(), "|G_𝔭|/2".to_string()],
    };
    let (input, input_digest) = header(pair);
    let mut assertions = local_assertions(pair, &ell);
    assertions.push(assertion(format!("Vol(M_1) / Vol(M_C) = [C_𝔭 : 1] = {ell}"), "volume-ratio"));
    assertions.push(assertion("M_1 and M_C have the same totally geodesic set TG", "geometric-equivalence"));
    Ok(EquivalenceCertificate {
        version: SCHEMA_VERSION.to_string(),
        input,
        input_digest,
        digest_algorithm: DIGEST_ALGORITHM.to_string(),
        local,
        volume_ratio: ell.to_string(),
        cover_data: CoverData { index_bound: vec![1, 2], kernel_index, index_ratio: ell.to_string() },
        assertions,
        mode: opts.mode,
        seed: opts.seed,
    })
}

fn usable_for_pair(pair: &AdmissiblePair, pf: &PrimeIdealFactor, seed: u64) -> bool {
    GoodPrime::new(pair, pf).is_ok_and(|gp| orders::select_cover_prime(&gp.fqform, pair.m(), seed).is_ok())
}

/// Isospectral pair at the smallest split prime: `M_{ℓ,1}` and `M_{1,ℓ}`
/// have the same geometric spectrum.
pub fn build_pair_certificate(
    pair: &AdmissiblePair,
    bound: u64,
    opts: &CertOptions,
) -> Result<IsospectralPairCertificate, CertifyError> {
    let (p, pf1, pf2) = pair.field().find_split_pair_with(bound, |pf| usable_for_pair(pair, pf, opts.seed))?;
    let gp1 = GoodPrime::new(pair, &pf1)?;
    let gp2 = GoodPrime::new(pair, &pf2)?;
    let m = pair.m();
    let cp1 = orders::select_cover_prime(&gp1.fqform, m, opts.seed)?;
    let cp2 = orders::select_cover_prime(&gp2.fqform, m, opts.seed)?;
    let mut candidates = vec![cp1.ell.clone(), cp2.ell.clone()];
    candidates.extend(
        arith::primes_up_to(COMMON_ELL_SEARCH_BOUND).into_iter().filter(|&l| l > 2 && l != p).map(BigUint::from),
    );
    let mut chosen = None;
    for ell in candidates {
        let (Ok(c1), Ok(c2)) = (
            orders::cover_prime_for_ell(&gp1.fqform, m, &ell, opts.seed),
            orders::cover_prime_for_ell(&gp2.fqform, m, &ell, opts.seed),
        ) else {
            continue;
        };
        if c1.passes(opts.mode) && c2.passes(opts.mode) {
            chosen = Some((ell, c1, c2));
            break;
        }
    }
    let (ell, c1, c2) = chosen.ok_or(CertifyError::NoCommonEll { p })?;
    let locals = vec![local_certificate(&gp1, c1, opts)?, local_certificate(&gp2, c2, opts)?];
    let (input, input_digest) = header(pair);
    let l = ell.to_string();
    let l2 = (&ell * &ell).to_string();
    let covers = vec![
        CoverRecord { name: "M_{ℓ,1}".into(), subgroup: "C_𝔭₁ × {1}".into(), subgroup_order: l.clone() },
        CoverRecord { name: "M_{1,ℓ}".into(), subgroup: "{1} × C_𝔭₂".into(), subgroup_order: l.clone() },
        CoverRecord { name: "M_{ℓ,ℓ}".into(), subgroup: "C_𝔭₁ × C_𝔭₂".into(), subgroup_order: l2 },
    ];
    let mut assertions = local_assertions(pair, &ell);
    assertions.push(assertion(
        format!("O_k/𝔭₁ ≅ O_k/𝔭₂ ≅ F_{p}^{}, so G_𝔭₁ ≅ G_𝔭₂", pf1.residue_degree),
        "isomorphic-residue-fields",
    ));
    Ok(IsospectralPairCertificate {
        version: SCHEMA_VERSION.to_string(),
        input,
        input_digest,
        digest_algorithm: DIGEST_ALGORITHM.to_string(),
        p,
        r: pf1.residue_degree,
        primes: locals,
        shared_ell: l.clone(),
        covers,
        multiplicity_assertion: assertion(
            format!(
                "each totally geodesic X of M_{{ℓ,ℓ}} has exactly {l} distinct lifts to M_{{ℓ,1}} and to M_{{1,ℓ}}: \
                 𝒯𝒢(M_{{ℓ,1}}) = 𝒯𝒢(M_{{1,ℓ}}) = {{(X, {l}·m_X) : (X, m_X) ∈ 𝒯𝒢(M_{{ℓ,ℓ}})}}"
            ),
            "spectrum-relationship",
        ),
        nonisometry_assertion: assertion(
            "M_{ℓ,1} and M_{1,ℓ} have non-conjugate fundamental groups in the commensurator, so they are not isometric",
            "mostow-rigidity",
        ),
        assertions,
        mode: opts.mode,
        seed: opts.seed,
    })
}

/// Covers with volume ratios growing without bound: `ℓ, ℓ², …` from many
/// primes sharing `ℓ`, or `ℓ₁ < ℓ₂ < …` from primes with distinct `ℓ`.
pub fn build_tower_certificate(
    pair: &AdmissiblePair,
    j_max: usize,
    bound: u64,
    opts: &CertOptions,
) -> Result<TowerCertificate, CertifyError> {
    if j_max == 0 {
        return Err(CertifyError::EmptyTower);
    }
    let mut usable: Vec<(GoodPrime, CoverPrime)> = Vec::new();
    for gp in good_primes(pair, bound).good {
        if let Ok(cp) = orders::select_cover_prime(&gp.fqform, pair.m(), opts.seed) {
            if cp.passes(opts.mode) {
                usable.push((gp, cp));
            }
        }
    }
    let mut by_ell: BTreeMap<BigUint, Vec<usize>> = BTreeMap::new();
    for (i, (_, cp)) in usable.iter().enumerate() {
        by_ell.entry(cp.ell.clone()).or_default().push(i);
    }
    let same = by_ell.iter().find(|(_, idx)| idx.len() >= j_max);
    let (strategy, picked): (TowerStrategy, Vec<usize>) = match same {
        Some((_, idx)) => (TowerStrategy::SameEllManyPrimes, idx[..j_max].to_vec()),
        None => {
            let mut firsts: Vec<usize> = by_ell.values().map(|idx| idx[0]).collect();
            if firsts.len() < j_max {
                let found = by_ell.values().map(Vec::len).max().unwrap_or(0).max(firsts.len());
                return Err(CertifyError::InsufficientPrimes { found, needed: j_max, bound });
            }
            // Earliest primes first, then ordered by ℓ.
            firsts.sort();
            firsts.truncate(j_max);
            firsts.sort_by(|&a, &b| usable[a].1.ell.cmp(&usable[b].1.ell));
            (TowerStrategy::ManyDistinctElls, firsts)
        }
    };
    let mut locals = Vec::with_capacity(picked.len());
    for &i in &picked {
        let (gp, cp) = &usable[i];
        locals.push(local_certificate(gp, cp.clone(), opts)?);
    }
    let ells: Vec<BigUint> = picked.iter().map(|&i| usable[i].1.ell.clone()).collect();
    let stages = (1..=j_max)
        .map(|j| match strategy {
            TowerStrategy::SameEllManyPrimes => TowerStage {
                j,
                locals: (0..j).collect(),
                ells: ells[..j].iter().map(|l| l.to_string()).collect(),
                volume_ratio: ells[0].pow(j as u32).to_string(),
            },
            TowerStrategy::ManyDistinctElls => TowerStage {
                j,
                locals: vec![j - 1],
                ells: vec![ells[j - 1].to_string()],
                volume_ratio: ells[j - 1].to_string(),
            },
        })
        .collect();
    let (input, input_digest) = header(pair);
    let mut assertions = vec![
        assertion(
            "stage j pulls back {1} and Π C_𝔭 over its primes through the product of the reductions; \
             the two covers are geometrically equivalent",
            "geometric-equivalence",
        ),
        assertion(
            "strong approximation makes the product reduction onto a subgroup of index dividing 2^j for all but \
             finitely many choices; these primes are assumed generic",
            "strong-approximation",
        ),
        assertion("the volume ratios increase without bound along the stages", "unbounded-volume-ratio"),
    ];
    if pair.dim().is_multiple_of(2) {
        assertions.push(assertion(
            "even dimension: SO(q) has center {±1}; the kernel of each reduction may meet it",
            "central-kernel",
        ));
    }
    Ok(TowerCertificate {
        version: SCHEMA_VERSION.to_string(),
        input,
        input_digest,
        digest_algorithm: DIGEST_ALGORITHM.to_string(),
        strategy,
        stages,
        locals,
        assertions,
        mode: opts.mode,
        seed: opts.seed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Checks {
    prefix: String,
    out: Vec<CheckOutcome>,
}

impl Checks {
    fn new() -> Self {
        Self { prefix: String::new(), out: Vec::new() }
    }

    fn check(&mut self, name: impl AsRef<str>, passed: bool, detail: impl Into<String>) -> bool {
        let name = if self.prefix.is_empty() {
            name.as_ref().to_string()
        } else {
            format!("{} {}", self.prefix, name.as_ref())
        };
        self.out.push(CheckOutcome { name, passed, detail: detail.into() });
        passed
    }
}

/// `ℓ | p^a + s` by direct modular exponentiation.
fn direct_divides(ell: &BigUint, p: u64, (a, s): Factor) -> bool {
    let v = BigUint::from(p).modpow(&BigUint::from(a), ell);
    if s < 0 {
        v.is_one()
    } else {
        v == ell - 1u32
    }
}

/// Exact multiplicative order of `p` mod `ℓ` recomputed from scratch.
fn direct_order_check(p: u64, ell: &BigUint, claimed: &BigUint) -> bool {
    if num_traits::Zero::is_zero(claimed) || !(ell - 1u32).is_multiple_of(claimed) {
        return false;
    }
    let pb = BigUint::from(p);
    if !pb.modpow(claimed, ell).is_one() {
        return false;
    }
    match arith::factorize(claimed, 1) {
        Ok(fs) => fs.iter().all(|(s, _)| !pb.modpow(&(claimed / s), ell).is_one()),
        Err(_) => false,
    }
}

fn verify_input(c: &mut Checks, input: &CertInput, digest: &str, algorithm: &str) -> Option<AdmissiblePair> {
    c.check("digest algorithm", algorithm == DIGEST_ALGORITHM, algorithm.to_string());
    let pair = match input.to_pair() {
        Ok(p) => p,
        Err(e) => {
            c.check("input is an admissible pair", false, e.to_string());
            return None;
        }
    };
    c.check("input is an admissible pair", true, "");
    let canonical = CertInput::of_pair(&pair);
    c.check("input is normalized", canonical == *input, "");
    c.check("input digest", canonical.digest() == digest, canonical.digest());
    Some(pair)
}

fn verify_local(c: &mut Checks, pair: &AdmissiblePair, local: &LocalCertificate, mode: Mode) -> Option<BigUint> {
    let rec = &local.prime;
    c.prefix = rec.ideal.clone();
    let pf = match pair.field().factor_prime(rec.p) {
        Ok(fs) => fs.into_iter().find(|pf| pf.factor_poly == rec.factor_poly),
        Err(_) => None,
    };
    let Some(pf) = pf else {
        c.check("prime factor of p", false, "factor polynomial is not a Dedekind factor");
        return None;
    };
    c.check("prime factor of p", pf.residue_degree == rec.r && pf.to_string() == rec.ideal, "");
    let form = match pair.reduce_form(&pf) {
        Ok(f) => f,
        Err(e) => {
            c.check("good reduction", false, e.to_string());
            return None;
        }
    };
    c.check("reduction", reduction_record(&form) == local.reduction, "");
    let (p, r, dim) = (rec.p, rec.r as u32, form.dim());
    match orders::so_order(dim, p, r, form.square_class()) {
        Ok(g) => c.check("group order", g == local.group_order, g.to_string()),
        Err(e) => c.check("group order", false, e.to_string()),
    };

    let cp = &local.cover_prime;
    let Ok(ell) = cp.ell.parse::<BigUint>() else {
        c.check("ℓ parses", false, cp.ell.clone());
        return None;
    };
    if !c.check("ℓ is an odd prime other than p", arith::is_prime(&ell) && ell.is_odd() && ell != BigUint::from(p), "")
    {
        return None;
    }
    let ord_ok = cp.ord_ell_p.parse::<BigUint>().is_ok_and(|o| direct_order_check(p, &ell, &o));
    c.check("ord_ℓ(p)", ord_ok, cp.ord_ell_p.clone());
    let branch = match form.square_class() {
        None => Branch::OddDim,
        Some(SquareClass::Nonsquare) => Branch::EvenNonsquareDisc,
        Some(SquareClass::Square) => Branch::EvenSquareDisc,
    };
    c.check("branch", cp.branch == branch, branch.to_string());
    let unit_order = BigUint::from(p).pow(r) - 1u32;
    let d_ok = match branch {
        Branch::OddDim | Branch::EvenNonsquareDisc => cp.d == (dim as u32 / 2) * r && cp.a.is_none(),
        Branch::EvenSquareDisc => {
            cp.d == r
                && unit_order.is_multiple_of(&ell)
                && cp.a.as_deref() == Some((&unit_order / &ell).to_string().as_str())
        }
    };
    c.check("branch parameters", d_ok, "");
    let divides = local.group_order.factors.iter().any(|&f| direct_divides(&ell, p, f));
    c.check("ℓ divides |G_𝔭|", divides && cp.divides_group_order, "");

    // The report must list exactly the expected checks, each recomputed.
    let expected = DivisibilityOracle::new(&ell, p, 0).and_then(|o| orders::avoidance_checks(&o, branch, dim, p, r));
    let mut expected = match expected {
        Ok(e) => e,
        Err(e) => {
            c.check("report structure", false, e.to_string());
            return Some(ell);
        }
    };
    if branch == Branch::EvenSquareDisc {
        let a = &unit_order / &ell;
        match orders::scalar_eigenvalue_check(&form, &ell, &a) {
            Ok(chk) => expected.insert(0, chk),
            Err(e) => {
                c.check("report structure", false, e.to_string());
                return Some(ell);
            }
        }
    }
    let shape = |x: &AvoidanceCheck| (x.bound_label.clone(), x.factors.clone(), x.criterion, x.role);
    let same_shape = expected.len() == local.avoidance_report.len()
        && expected.iter().zip(&local.avoidance_report).all(|(a, b)| shape(a) == shape(b));
    c.check("report structure", same_shape, format!("{} entries", expected.len()));
    let mut binding_ok = true;
    for (claimed, fresh) in local.avoidance_report.iter().zip(&expected) {
        let actual = match claimed.criterion {
            Criterion::Divisibility => claimed.factors.iter().any(|&f| direct_divides(&ell, p, f)),
            Criterion::EigenvaluePm1 => fresh.divides,
        };
        if claimed.is_binding(mode) {
            let ok = actual == claimed.divides && !actual;
            binding_ok &= ok;
            c.check(&claimed.bound_label, ok, if actual { "ℓ divides" } else { "" });
        } else if actual != claimed.divides {
            c.check(&claimed.bound_label, false, "recorded outcome is wrong");
        }
    }

    let mut witness_ok = true;
    if let Some(w) = &local.witness {
        witness_ok = verify_witness(c, &form, &ell, w);
    }
    c.check("pass flag", local.passes == (binding_ok && witness_ok && divides), "");
    Some(ell)
}

fn verify_witness(c: &mut Checks, form: &FqForm, ell: &BigUint, w: &Witness) -> bool {
    let g = match FqMatrix::from_residues(form.ctx(), &w.matrix) {
        Ok(g) if g.dim() == form.dim() => g,
        _ => return c.check("witness matrix", false, "wrong shape or entries"),
    };
    let iso = matgroup::is_special_isometry(form, &g).unwrap_or(false);
    let mut ok = c.check("witness in SO(q_𝔭)", iso, "");
    let order_ok = !g.is_identity() && g.pow(ell).is_identity() && w.order == ell.to_string();
    ok &= c.check("witness has order ℓ", order_ok, w.order.clone());
    if let Some(claimed) = w.eigenvalue_avoidance {
        let actual = matgroup::eigenvalue_pm1_avoidance(&g, &BigUint::one(), ell);
        ok &= c.check("witness powers avoid eigenvalues ±1", actual && claimed, "");
    }
    ok
}

fn verify_equivalence(cert: &EquivalenceCertificate) -> Vec<CheckOutcome> {
    let mut c = Checks::new();
    c.check("schema version", cert.version == SCHEMA_VERSION, cert.version.clone());
    let Some(pair) = verify_input(&mut c, &cert.input, &cert.input_digest, &cert.digest_algorithm) else {
        return c.out;
    };
    if let Some(ell) = verify_local(&mut c, &pair, &cert.local, cert.mode) {
        c.prefix.clear();
        c.check("volume ratio = ℓ", cert.volume_ratio == ell.to_string(), cert.volume_ratio.clone());
        c.check("index ratio = ℓ", cert.cover_data.index_ratio == ell.to_string(), "");
        c.check("index bound {1, 2}", cert.cover_data.index_bound == [1, 2], "");
    }
    c.prefix.clear();
    c.check("local certificate passes", cert.local.passes, "");
    c.out
}

fn verify_pair(cert: &IsospectralPairCertificate) -> Vec<CheckOutcome> {
    let mut c = Checks::new();
    c.check("schema version", cert.version == SCHEMA_VERSION, cert.version.clone());
    let Some(pair) = verify_input(&mut c, &cert.input, &cert.input_digest, &cert.digest_algorithm) else {
        return c.out;
    };
    if !c.check("two primes", cert.primes.len() == 2, "") {
        return c.out;
    }
    let (a, b) = (&cert.primes[0].prime, &cert.primes[1].prime);
    c.check("same residue field", a.p == cert.p && b.p == cert.p && a.r == cert.r && b.r == cert.r, "");
    c.check("distinct primes", a.factor_poly != b.factor_poly, "");
    let ells: Vec<Option<BigUint>> = cert.primes.iter().map(|l| verify_local(&mut c, &pair, l, cert.mode)).collect();
    c.prefix.clear();
    let shared = ells.iter().all(|e| e.as_ref().is_some_and(|e| e.to_string() == cert.shared_ell));
    c.check("shared ℓ at both primes", shared, cert.shared_ell.clone());
    c.check("both local certificates pass", cert.primes.iter().all(|l| l.passes), "");
    if let Ok(ell) = cert.shared_ell.parse::<BigUint>() {
        let orders: Vec<String> = cert.covers.iter().map(|cv| cv.subgroup_order.clone()).collect();
        let want = vec![ell.to_string(), ell.to_string(), (&ell * &ell).to_string()];
        c.check("cover subgroup orders ℓ, ℓ, ℓ²", orders == want, "");
    }
    c.out
}

fn verify_tower(cert: &TowerCertificate) -> Vec<CheckOutcome> {
    let mut c = Checks::new();
    c.check("schema version", cert.version == SCHEMA_VERSION, cert.version.clone());
    let Some(pair) = verify_input(&mut c, &cert.input, &cert.input_digest, &cert.digest_algorithm) else {
        return c.out;
    };
    let ells: Vec<Option<BigUint>> = cert.locals.iter().map(|l| verify_local(&mut c, &pair, l, cert.mode)).collect();
    c.prefix.clear();
    c.check("all local certificates pass", cert.locals.iter().all(|l| l.passes), "");
    let distinct: std::collections::BTreeSet<(u64, &Vec<u64>)> =
        cert.locals.iter().map(|l| (l.prime.p, &l.prime.factor_poly)).collect();
    c.check("distinct primes", distinct.len() == cert.locals.len(), "");
    let mut previous: Option<BigUint> = None;
    for stage in &cert.stages {
        c.prefix = format!("stage {}:", stage.j);
        let refs_ok = !stage.locals.is_empty()
            && stage.locals.iter().all(|&i| i < ells.len())
            && stage.ells.len() == stage.locals.len()
            && stage
                .locals
                .iter()
                .zip(&stage.ells)
                .all(|(&i, l)| ells[i].as_ref().is_some_and(|e| e.to_string() == *l));
        c.check("ℓ matches its local certificate", refs_ok, "");
        let shape_ok = match cert.strategy {
            TowerStrategy::SameEllManyPrimes => {
                stage.locals.len() == stage.j && stage.ells.windows(2).all(|w| w[0] == w[1])
            }
            TowerStrategy::ManyDistinctElls => stage.locals.len() == 1,
        };
        c.check("strategy shape", shape_ok, "");
        let product = stage
            .ells
            .iter()
            .map(|l| l.parse::<BigUint>())
            .collect::<Result<Vec<_>, _>>()
            .map(|v| v.into_iter().fold(BigUint::one(), |acc, x| acc * x));
        let ratio = stage.volume_ratio.parse::<BigUint>();
        let ratio_ok = matches!((&product, &ratio), (Ok(a), Ok(b)) if a == b);
        c.check("volume ratio is the product of the ℓ", ratio_ok, stage.volume_ratio.clone());
        if let Ok(r) = ratio {
            let increasing = previous.as_ref().is_none_or(|prev| r > *prev);
            c.check("volume ratio increases", increasing, "");
            previous = Some(r);
        }
    }
    c.out
}

/// Re-derive every claim of a certificate from its input.
pub fn verify_certificate(cert: &Certificate) -> VerificationReport {
    let checks = match cert {
        Certificate::Equivalence(x) => verify_equivalence(x),
        Certificate::IsospectralPair(x) => verify_pair(x),
        Certificate::Tower(x) => verify_tower(x),
    };
    let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
    VerificationReport { kind: cert.kind().to_string(), passed, checks }
}

/// Parse one certificate or an array of them.
pub fn parse_certificates(text: &str) -> Result<Vec<Certificate>, CertifyError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CertifyError::MalformedCertificate(e.to_string()))?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .map(|v| serde_json::from_value(v).map_err(|e| CertifyError::MalformedCertificate(e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_pair() -> AdmissiblePair {
        let input = PairInput {
            min_poly: vec![-2, 0, 1],
            form_diagonal: vec![
                vec!["1".into()],
                vec!["1".into()],
                vec!["1".into()],
                vec!["1".into()],
                vec!["0".into(), "-1".into()],
            ],
        };
        input.to_pair().unwrap()
    }

    #[test]
    fn scan_of_running_pair() {
        let pair = running_pair();
        let scan = good_primes(&pair, 20);
        let ps: Vec<(u64, usize)> = scan.good.iter().map(|g| (g.pf.p, g.pf.residue_degree)).collect();
        assert_eq!(ps, vec![(3, 2), (5, 2), (7, 1), (7, 1), (11, 2), (13, 2), (17, 1), (17, 1), (19, 2)]);
        assert_eq!(scan.exclusions[0], Exclusion { p: 2, factor_poly: None, reason: ExclusionReason::Dyadic });
        assert_eq!(scan.exclusions.len(), 1);
        let at3 = good_primes(&pair, 3);
        assert_eq!(at3.good.len(), 1);
        assert_eq!(at3.good[0].pf.residue_degree, 2);
    }

    #[test]
    fn bad_reduction_is_excluded() {
        let input = PairInput {
            min_poly: vec![-2, 0, 1],
            form_diagonal: vec![
                vec!["1".into()],
                vec!["1".into()],
                vec!["1".into()],
                vec!["3".into()],
                vec!["0".into(), "-1".into()],
            ],
        };
        let scan = good_primes(&input.to_pair().unwrap(), 5);
        assert_eq!(
            scan.exclusions[1],
            Exclusion { p: 3, factor_poly: Some(vec![1, 0, 1]), reason: ExclusionReason::BadReduction }
        );
        assert_eq!(scan.good.len(), 1);
    }

    #[test]
    fn single_prime_certificates() {
        let pair = running_pair();
        let opts = CertOptions::default();
        for gp in good_primes_over(&pair, 7).unwrap() {
            let cert = build_certificate(&pair, &gp, &opts).unwrap();
            assert_eq!(cert.local.cover_prime.ell, "5");
            assert_eq!(cert.local.cover_prime.branch, Branch::OddDim);
            assert_eq!(cert.volume_ratio, "5");
            assert!(cert.local.passes);
            let report = verify_certificate(&Certificate::Equivalence(cert.clone()));
            assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
        }
        let gp5 = good_primes_over(&pair, 5).unwrap();
        let cert = build_certificate(&pair, &gp5[0], &opts).unwrap();
        assert_eq!(cert.local.cover_prime.ell, "313");
        assert_eq!(cert.local.cover_prime.ord_ell_p, "8");
    }

    #[test]
    fn tampered_ell_fails() {
        let pair = running_pair();
        let gp = &good_primes_over(&pair, 7).unwrap()[0];
        let mut cert = build_certificate(&pair, gp, &CertOptions::default()).unwrap();
        cert.local.cover_prime.ell = "3".into();
        cert.volume_ratio = "3".into();
        let report = verify_certificate(&Certificate::Equivalence(cert));
        assert!(!report.passed);
        assert!(report.failures().any(|c| c.name.contains("p^2-1")));
    }

    #[test]
    fn json_round_trip() {
        let pair = running_pair();
        let gp = &good_primes_over(&pair, 7).unwrap()[1];
        let cert = Certificate::Equivalence(build_certificate(&pair, gp, &CertOptions::default()).unwrap());
        let text = cert.to_json();
        assert_eq!(Certificate::from_json(&text).unwrap(), cert);
        assert!(text.contains("\"kind\": \"equivalence\""));
        assert!(matches!(Certificate::from_json("{\"kind\": 1}"), Err(CertifyError::MalformedCertificate(_))));
    }

    #[test]
    fn pair_and_tower() {
        let pair = running_pair();
        let opts = CertOptions { with_witness: true, ..CertOptions::default() };
        let cert = build_pair_certificate(&pair, 100, &opts).unwrap();
        assert_eq!(cert.p, 7);
        assert_eq!(cert.primes[0].prime.ideal, "(7, θ + 4)");
        assert_eq!(cert.primes[1].prime.ideal, "(7, θ + 3)");
        assert_eq!(cert.shared_ell, "5");
        let report = verify_certificate(&Certificate::IsospectralPair(cert));
        assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
        assert!(matches!(
            build_pair_certificate(&pair, 5, &opts),
            Err(CertifyError::NumField(NumFieldError::NoSplitPrimeInBound(5)))
        ));

        let tower = build_tower_certificate(&pair, 3, 500, &CertOptions::default()).unwrap();
        assert_eq!(tower.strategy, TowerStrategy::SameEllManyPrimes);
        let ratios: Vec<&str> = tower.stages.iter().map(|s| s.volume_ratio.as_str()).collect();
        assert_eq!(ratios, ["5", "25", "125"]);
        let report = verify_certificate(&Certificate::Tower(tower));
        assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
        assert!(matches!(
            build_tower_certificate(&pair, 3, 5, &CertOptions::default()),
            Err(CertifyError::InsufficientPrimes { .. })
        ));
    }
}
