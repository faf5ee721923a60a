//! Transposed Poisson structures on `I(X,K)`: Poisson-type, mutational and
//! λ-structures, the axiom checker, the `(μ, ν, λ)` decomposition and
//! ν-normalization.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{is_central_in_commutator, same_owner, ElementRecord, IncidenceElement};
use crate::error::{Error, Result};
use crate::halfder::{CentralElement, LinearOperator, PairValue};
use crate::linalg::Echelon;
use crate::poset::{extreme_sides, is_extreme, Elem, Pair, Poset};
use crate::rational::{is_zero_or_one, Q};

pub type NuElement = CentralElement;

/// Exhaustive checking up to this many basis vectors; beyond, triples are
/// sampled.
pub const VERIFY_BASIS_CAP: usize = 40;
const SAMPLED_TRIPLES: usize = 20_000;

/// Commutative product on basis pairs, stored for `i <= j` only.
#[derive(Debug, Clone)]
pub struct TPProduct {
    owner: Arc<Poset>,
    table: BTreeMap<(usize, usize), IncidenceElement>,
}

impl PartialEq for TPProduct {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && same_owner(&self.owner, &other.owner)
    }
}

impl Eq for TPProduct {}

fn key(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

impl TPProduct {
    pub fn zero(owner: &Arc<Poset>) -> Self {
        TPProduct {
            owner: owner.clone(),
            table: BTreeMap::new(),
        }
    }

    pub fn owner(&self) -> &Arc<Poset> {
        &self.owner
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    /// Sets `b_i · b_j = b_j · b_i = v`.
    pub fn set(&mut self, i: usize, j: usize, v: IncidenceElement) {
        if v.is_zero() {
            self.table.remove(&key(i, j));
        } else {
            self.table.insert(key(i, j), v);
        }
    }

    fn add_to(&mut self, i: usize, j: usize, v: &IncidenceElement) {
        let mut cur = self.get(i, j);
        cur.add_scaled(v, &Q::one());
        self.set(i, j, cur);
    }

    /// `b_i · b_j`.
    pub fn get(&self, i: usize, j: usize) -> IncidenceElement {
        self.table
            .get(&key(i, j))
            .cloned()
            .unwrap_or_else(|| IncidenceElement::zero(&self.owner))
    }

    fn get_ref(&self, i: usize, j: usize) -> Option<&IncidenceElement> {
        self.table.get(&key(i, j))
    }

    /// Nonzero entries `((i, j), b_i · b_j)` with `i <= j`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &IncidenceElement)> {
        self.table.iter().map(|(&k, v)| (k, v))
    }

    /// Bilinear extension.
    pub fn product(&self, a: &IncidenceElement, b: &IncidenceElement) -> Result<IncidenceElement> {
        if !same_owner(&self.owner, a.owner()) || !same_owner(&self.owner, b.owner()) {
            return Err(Error::OwnerMismatch);
        }
        Ok(self.mul(a, b))
    }

    fn mul(&self, a: &IncidenceElement, b: &IncidenceElement) -> IncidenceElement {
        let mut out = IncidenceElement::zero(&self.owner);
        for (i, x) in a.terms() {
            for (j, y) in b.terms() {
                if let Some(v) = self.get_ref(i, j) {
                    out.add_scaled(v, &(x * y));
                }
            }
        }
        out
    }

    /// `v · b_k`.
    fn mul_basis(&self, a: &IncidenceElement, k: usize) -> IncidenceElement {
        let mut out = IncidenceElement::zero(&self.owner);
        for (i, x) in a.terms() {
            if let Some(v) = self.get_ref(i, k) {
                out.add_scaled(v, x);
            }
        }
        out
    }

    /// The operator `b ↦ b_z · b`.
    pub fn left_operator(&self, z: usize) -> LinearOperator {
        LinearOperator::from_fn(&self.owner, |i| self.get(z, i))
    }

    pub fn to_json(&self) -> TableJson {
        let p = &self.owner;
        let basis = |i: usize| {
            let (x, y) = p.pairs()[i];
            BasisRef {
                from: p.label(x).to_string(),
                to: p.label(y).to_string(),
            }
        };
        TableJson {
            products: self
                .table
                .iter()
                .map(|(&(i, j), v)| ProductEntry {
                    left: basis(i),
                    right: basis(j),
                    value: v.to_records(),
                })
                .collect(),
        }
    }

    pub fn from_json(owner: &Arc<Poset>, json: &TableJson) -> Result<Self> {
        let idx = |b: &BasisRef| -> Result<usize> {
            let x = owner.index_of(&b.from)?;
            let y = owner.index_of(&b.to)?;
            owner
                .pair_index(x, y)
                .ok_or_else(|| Error::Json(format!("({},{}) is not a comparable pair", b.from, b.to)))
        };
        let mut t = Self::zero(owner);
        let mut seen = std::collections::BTreeSet::new();
        for e in &json.products {
            let (i, j) = (idx(&e.left)?, idx(&e.right)?);
            if !seen.insert(key(i, j)) {
                return Err(Error::Json(format!(
                    "product e({},{})·e({},{}) given twice",
                    e.left.from, e.left.to, e.right.from, e.right.to
                )));
            }
            t.set(i, j, IncidenceElement::from_records(owner, &e.value)?);
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisRef {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductEntry {
    pub left: BasisRef,
    pub right: BasisRef,
    pub value: Vec<ElementRecord>,
}

/// Full product table; one entry per unordered nonzero basis product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub products: Vec<ProductEntry>,
}

/// Entrywise sum.
pub fn sum_products(a: &TPProduct, b: &TPProduct) -> Result<TPProduct> {
    if !same_owner(&a.owner, &b.owner) {
        return Err(Error::OwnerMismatch);
    }
    let mut out = a.clone();
    for (&(i, j), v) in &b.table {
        out.add_to(i, j, v);
    }
    Ok(out)
}

/// Whether every `a`-product annihilates everything under `b` and vice versa.
pub fn orthogonal(a: &TPProduct, b: &TPProduct) -> Result<bool> {
    if !same_owner(&a.owner, &b.owner) {
        return Err(Error::OwnerMismatch);
    }
    let n = a.owner.pairs().len();
    let kills = |x: &TPProduct, y: &TPProduct| {
        x.table
            .values()
            .all(|v| (0..n).all(|k| y.mul_basis(v, k).is_zero()))
    };
    Ok(kills(a, b) && kills(b, a))
}

/// `μ : X × X → K`, symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuMap {
    values: Vec<Vec<Q>>,
}

impl MuMap {
    pub fn new(p: &Poset, values: Vec<Vec<Q>>) -> Result<Self> {
        let n = p.len();
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::Json(format!("mu must be {n}x{n}")));
        }
        for x in 0..n {
            for y in x + 1..n {
                if values[x][y] != values[y][x] {
                    return Err(Error::MuNotSymmetric(p.label(x).into(), p.label(y).into()));
                }
            }
        }
        Ok(MuMap { values })
    }

    pub fn zero(p: &Poset) -> Self {
        MuMap {
            values: vec![vec![Q::zero(); p.len()]; p.len()],
        }
    }

    /// `μ = a ⊗ a`.
    pub fn rank_one(a: &[Q]) -> Self {
        MuMap {
            values: a.iter().map(|x| a.iter().map(|y| x * y).collect()).collect(),
        }
    }

    pub fn get(&self, x: Elem, y: Elem) -> &Q {
        &self.values[x][y]
    }

    pub fn values(&self) -> &[Vec<Q>] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(Q::is_zero)
    }

    pub fn row_sum(&self, x: Elem) -> Q {
        self.values[x].iter().sum()
    }

    /// First `(x, y, z)` violating `μ(x,y) R(z) = μ(y,z) R(x)`.
    pub fn associativity_witness(&self) -> Option<(Elem, Elem, Elem)> {
        let n = self.values.len();
        let r: Vec<Q> = (0..n).map(|x| self.row_sum(x)).collect();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if &self.values[x][y] * &r[z] != &self.values[y][z] * &r[x] {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }
}

/// The Poisson-type associativity condition on a symmetric `μ`.
pub fn validate_mu(mu: &MuMap) -> bool {
    mu.associativity_witness().is_none()
}

/// `e_x · e_y = μ(x,y)δ`, all other basis products zero.
pub fn poisson_type(p: &Arc<Poset>, mu: &MuMap) -> Result<TPProduct> {
    if let Some((x, y, z)) = mu.associativity_witness() {
        return Err(Error::MuNotAssociative(
            p.label(x).into(),
            p.label(y).into(),
            p.label(z).into(),
        ));
    }
    Ok(poisson_type_unchecked(p, mu))
}

/// `poisson_type` without the associativity check.
pub fn poisson_type_unchecked(p: &Arc<Poset>, mu: &MuMap) -> TPProduct {
    let delta = IncidenceElement::identity(p);
    let mut t = TPProduct::zero(p);
    for x in 0..p.len() {
        for y in x..p.len() {
            let (i, j) = (p.pair_index(x, x).unwrap(), p.pair_index(y, y).unwrap());
            t.set(i, j, delta.scale(mu.get(x, y)));
        }
    }
    t
}

/// `a · b = [[a, ν], b]`.
pub fn mutational(nu: &NuElement) -> TPProduct {
    let nu = nu.element();
    let p = nu.owner().clone();
    let n = p.pairs().len();
    let mut t = TPProduct::zero(&p);
    for i in 0..n {
        let inner = IncidenceElement::basis(&p, i).bracket(nu);
        if inner.is_zero() {
            continue;
        }
        for j in i..n {
            t.set(i, j, inner.bracket(&IncidenceElement::basis(&p, j)));
        }
    }
    t
}

/// Checked constructor for `mutational` from a raw element.
pub fn mutational_from(nu: &IncidenceElement) -> Result<TPProduct> {
    if !is_central_in_commutator(nu) {
        return Err(Error::NotCentralInCommutator);
    }
    Ok(mutational(&CentralElement::new(nu.clone())?))
}

/// `λ : X²_e → K`; pairs not listed are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaMap {
    values: BTreeMap<Pair, Q>,
}

impl LambdaMap {
    pub fn new(p: &Poset, values: BTreeMap<Pair, Q>) -> Result<Self> {
        if let Some(&(x, y)) = values.keys().find(|e| !is_extreme(p, **e)) {
            return Err(Error::NotExtreme(p.label(x).into(), p.label(y).into()));
        }
        Ok(LambdaMap {
            values: values.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        })
    }

    pub fn zero() -> Self {
        LambdaMap { values: BTreeMap::new() }
    }

    pub fn get(&self, e: Pair) -> Q {
        self.values.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    /// Nonzero values.
    pub fn values(&self) -> &BTreeMap<Pair, Q> {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

/// The λ-structure relative to base point `u0`.
pub fn lambda_structure(p: &Arc<Poset>, lambda: &LambdaMap, u0: Elem) -> Result<TPProduct> {
    if u0 >= p.len() {
        return Err(Error::UnknownElement(u0.to_string()));
    }
    let d = |x: Elem| p.pair_index(x, x).unwrap();
    let mut t = TPProduct::zero(p);
    for side in extreme_sides(p, u0) {
        let (x, y) = side.pair;
        let l = lambda.get((x, y));
        if l.is_zero() {
            continue;
        }
        let xy = p.pair_index(x, y).unwrap();
        let exy = IncidenceElement::basis(p, xy);
        t.add_to(d(x), xy, &exy.scale(&l));
        t.add_to(d(y), xy, &exy.scale(&-l.clone()));
        let ev = IncidenceElement::e_set(p, &side.vset).scale(&(&l * Q::from_integer(BigInt::from(side.sign))));
        t.add_to(d(x), d(y), &ev);
        // x ∈ Min and y ∈ Max, so each picks up the diagonal term.
        t.add_to(d(x), d(x), &-&ev);
        t.add_to(d(y), d(y), &-&ev);
    }
    Ok(t)
}

/// Which axiom a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Associativity,
    TransposedLeibniz,
    HalfDerivationAgreement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub axiom: Axiom,
    /// Basis indices; for the Leibniz rule `(z, x, y)`.
    pub triple: (usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    /// Structural: only `i <= j` is stored.
    pub commutative: bool,
    pub associative: bool,
    pub transposed_leibniz: bool,
    /// Each left multiplication is a ½-derivation exactly when the Leibniz
    /// rule holds for it.
    pub half_derivation_agreement: bool,
    pub sampled: bool,
    pub witness: Option<Witness>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.commutative && self.associative && self.transposed_leibniz && self.half_derivation_agreement
    }
}

type Triples = Box<dyn Iterator<Item = (usize, usize, usize)>>;

fn triples(n: usize) -> (Triples, bool) {
    if n <= VERIFY_BASIS_CAP {
        let it = (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))));
        (Box::new(it), false)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let v: Vec<_> = (0..SAMPLED_TRIPLES)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        (Box::new(v.into_iter()), true)
    }
}

/// Checks commutativity, associativity and `2z·[x,y] = [z·x,y] + [x,z·y]`
/// on basis triples.
pub fn verify_tp(prod: &TPProduct) -> VerifyReport {
    let p = prod.owner.clone();
    let n = p.pairs().len();
    let basis: Vec<IncidenceElement> = (0..n).map(|i| IncidenceElement::basis(&p, i)).collect();
    let mut witness = None;

    let (assoc_triples, sampled) = triples(n);
    let mut associative = true;
    for (i, j, k) in assoc_triples {
        let lhs = prod.mul_basis(&prod.get(i, j), k);
        let rhs = prod.mul_basis(&prod.get(j, k), i);
        if lhs != rhs {
            associative = false;
            witness = Some(Witness {
                axiom: Axiom::Associativity,
                triple: (i, j, k),
            });
            break;
        }
    }

    let two = Q::from_integer(BigInt::from(2));
    let leibniz_fails = |z: usize, i: usize, j: usize| {
        let br = basis[i].bracket(&basis[j]);
        let mut lhs = prod.mul_basis(&br, z).scale(&two);
        lhs.add_scaled(&prod.get(z, i).bracket(&basis[j]), &-Q::one());
        lhs.add_scaled(&basis[i].bracket(&prod.get(z, j)), &-Q::one());
        !lhs.is_zero()
    };
    let mut transposed_leibniz = true;
    let mut per_z = vec![true; n];
    let (leib_triples, _) = triples(n);
    for (z, i, j) in leib_triples {
        if i < j && per_z[z] && leibniz_fails(z, i, j) {
            per_z[z] = false;
            if transposed_leibniz {
                transposed_leibniz = false;
                if witness.is_none() {
                    witness = Some(Witness {
                        axiom: Axiom::TransposedLeibniz,
                        triple: (z, i, j),
                    });
                }
            }
        }
    }

    // The ½-derivation check is exhaustive over basis pairs even when the
    // triples above were sampled.
    let mut half_derivation_agreement = true;
    for (z, &ok) in per_z.iter().enumerate() {
        let hd = prod.left_operator(z).half_derivation_witness();
        match (ok, hd) {
            (true, Some((i, j))) if sampled => {
                transposed_leibniz = false;
                witness.get_or_insert(Witness {
                    axiom: Axiom::TransposedLeibniz,
                    triple: (z, i, j),
                });
            }
            (true, Some((i, j))) => {
                half_derivation_agreement = false;
                witness.get_or_insert(Witness {
                    axiom: Axiom::HalfDerivationAgreement,
                    triple: (z, i, j),
                });
            }
            (false, None) => {
                half_derivation_agreement = false;
                witness.get_or_insert(Witness {
                    axiom: Axiom::HalfDerivationAgreement,
                    triple: (z, 0, 0),
                });
            }
            _ => {}
        }
    }

    VerifyReport {
        commutative: true,
        associative,
        transposed_leibniz,
        half_derivation_agreement,
        sampled,
        witness,
    }
}

/// `(μ, ν, λ)` relative to `u0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TPDecomposition {
    pub mu: MuMap,
    pub nu: NuElement,
    pub lambda: LambdaMap,
    pub u0: Elem,
}

impl TPDecomposition {
    pub fn owner(&self) -> &Arc<Poset> {
        self.nu.element().owner()
    }

    /// `poisson_type(μ) + mutational(ν) + lambda_structure(λ, u0)`, without
    /// checking `μ`.
    pub fn reconstruct(&self) -> TPProduct {
        let p = self.owner().clone();
        let a = poisson_type_unchecked(&p, &self.mu);
        let b = mutational(&self.nu);
        let c = lambda_structure(&p, &self.lambda, self.u0).expect("u0 in range");
        sum_products(&sum_products(&a, &b).unwrap(), &c).unwrap()
    }

    pub fn to_json(&self) -> ParamsJson {
        let p = self.owner();
        let mut mu = Vec::new();
        for x in 0..p.len() {
            for y in x..p.len() {
                let v = self.mu.get(x, y);
                if !v.is_zero() {
                    mu.push(PairValue::new(p, x, y, v));
                }
            }
        }
        let nu = self
            .nu
            .values()
            .into_iter()
            .map(|((x, y), v)| PairValue::new(p, x, y, &v))
            .collect();
        let lambda = self
            .lambda
            .values()
            .iter()
            .map(|(&(x, y), v)| PairValue::new(p, x, y, v))
            .collect();
        ParamsJson {
            u0: Some(p.label(self.u0).to_string()),
            mu,
            nu,
            lambda,
        }
    }

    /// Parses parameters; `u0` from the file wins over `default_u0`.
    pub fn from_json(p: &Arc<Poset>, json: &ParamsJson, default_u0: Elem) -> Result<Self> {
        let u0 = match &json.u0 {
            Some(l) => p.index_of(l)?,
            None => default_u0,
        };
        let n = p.len();
        let mut m: Vec<Vec<Option<Q>>> = vec![vec![None; n]; n];
        for pv in &json.mu {
            let ((x, y), v) = pv.parse(p)?;
            for (a, b) in [(x, y), (y, x)] {
                match &m[a][b] {
                    Some(old) if *old != v => {
                        return Err(Error::MuNotSymmetric(p.label(x).into(), p.label(y).into()))
                    }
                    _ => m[a][b] = Some(v.clone()),
                }
            }
        }
        let mu = MuMap::new(
            p,
            m.into_iter()
                .map(|r| r.into_iter().map(|v| v.unwrap_or_else(Q::zero)).collect())
                .collect(),
        )?;
        let mut nu_vals = Vec::new();
        for pv in &json.nu {
            nu_vals.push(pv.parse(p)?);
        }
        let nu = CentralElement::from_values(p, &nu_vals)?;
        let mut lam = BTreeMap::new();
        for pv in &json.lambda {
            let (e, v) = pv.parse(p)?;
            if lam.insert(e, v).is_some() {
                return Err(Error::Json(format!("lambda({},{}) given twice", pv.x, pv.y)));
            }
        }
        let lambda = LambdaMap::new(p, lam)?;
        Ok(TPDecomposition { mu, nu, lambda, u0 })
    }
}

/// Serialized `(μ, ν, λ)`; only nonzero values, `mu` with `x <= y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<String>,
    #[serde(default)]
    pub mu: Vec<PairValue>,
    #[serde(default)]
    pub nu: Vec<PairValue>,
    #[serde(default)]
    pub lambda: Vec<PairValue>,
}

fn reason(p: &Poset, r: &VerifyReport) -> String {
    let name = |i: usize| {
        let (x, y) = p.pairs()[i];
        if x == y {
            format!("e{}", p.label(x))
        } else {
            format!("e{}{}", p.label(x), p.label(y))
        }
    };
    match &r.witness {
        Some(w) => format!(
            "{:?} fails at ({}, {}, {})",
            w.axiom,
            name(w.triple.0),
            name(w.triple.1),
            name(w.triple.2)
        ),
        None => "axioms fail".into(),
    }
}

/// Reads `(μ, ν, λ)` off a verified product and checks the reconstruction.
pub fn decompose_tp(prod: &TPProduct, u0: Elem) -> Result<TPDecomposition> {
    let p = prod.owner().clone();
    if u0 >= p.len() {
        return Err(Error::UnknownElement(u0.to_string()));
    }
    let report = verify_tp(prod);
    if !report.passed() {
        return Err(Error::NotTransposedPoisson(reason(&p, &report)));
    }
    let d = |x: Elem| p.pair_index(x, x).unwrap();
    let mut lam = BTreeMap::new();
    for side in extreme_sides(&p, u0) {
        let (x, y) = side.pair;
        let xy = p.pair_index(x, y).unwrap();
        lam.insert((x, y), prod.get(d(x), xy).get(xy));
    }
    let lambda = LambdaMap::new(&p, lam)?;
    let nu_vals: Vec<(Pair, Q)> = p
        .min_max_pairs()
        .into_iter()
        .map(|(x, y)| ((x, y), prod.get(d(x), d(y)).coeff(x, y)))
        .collect();
    let nu = CentralElement::from_values(&p, &nu_vals)?;
    let n = p.len();
    let mu = MuMap::new(
        &p,
        (0..n)
            .map(|x| (0..n).map(|y| prod.get(d(x), d(y)).coeff(u0, u0)).collect())
            .collect(),
    )?;
    let dec = TPDecomposition { mu, nu, lambda, u0 };
    if dec.reconstruct() != *prod {
        return Err(Error::ReconstructionMismatch);
    }
    Ok(dec)
}

/// The Lie automorphism scaling each `e_xy` (`x` minimal, `y` maximal,
/// `ν(x,y) ≠ 0`) by `ν(x,y)⁻¹`; all other basis vectors are fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rescaling {
    owner: Arc<Poset>,
    /// Basis index → factor, only factors different from 1.
    pub scales: BTreeMap<usize, Q>,
}

impl Rescaling {
    pub fn is_identity(&self) -> bool {
        self.scales.is_empty()
    }

    fn factor(&self, i: usize) -> Q {
        self.scales.get(&i).cloned().unwrap_or_else(Q::one)
    }

    pub fn apply(&self, f: &IncidenceElement) -> IncidenceElement {
        IncidenceElement::from_terms(&self.owner, f.terms().map(|(i, v)| (i, v * self.factor(i))))
    }

    /// The product `∘` with `φ(a) ∘ φ(b) = φ(a · b)`.
    pub fn transport(&self, prod: &TPProduct) -> TPProduct {
        let mut t = TPProduct::zero(&self.owner);
        for (&(i, j), v) in &prod.table {
            let k = (self.factor(i) * self.factor(j)).recip();
            t.set(i, j, self.apply(v).scale(&k));
        }
        t
    }

    pub fn describe(&self) -> Vec<PairValue> {
        self.scales
            .iter()
            .map(|(&i, v)| {
                let (x, y) = self.owner.pairs()[i];
                PairValue::new(&self.owner, x, y, v)
            })
            .collect()
    }
}

/// Rescales so that `ν` takes values in `{0, 1}`; `μ` and `λ` are kept.
pub fn normalize_nu(d: &TPDecomposition) -> (TPDecomposition, Rescaling) {
    let p = d.owner().clone();
    let mut scales = BTreeMap::new();
    let mut nu = IncidenceElement::zero(&p);
    for ((x, y), v) in d.nu.values() {
        let i = p.pair_index(x, y).unwrap();
        if !v.is_one() {
            scales.insert(i, v.recip());
        }
        nu.add_term(i, &Q::one());
    }
    let out = TPDecomposition {
        mu: d.mu.clone(),
        nu: CentralElement::new(nu).expect("same support"),
        lambda: d.lambda.clone(),
        u0: d.u0,
    };
    debug_assert!(out.nu.values().iter().all(|(_, v)| is_zero_or_one(v)));
    (out, Rescaling { owner: p, scales })
}

/// Which family `μ` was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuFamily {
    RankOne,
    ZeroRowSum,
}

/// Knobs for `random_tp_params`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomTpConfig {
    /// Integer parameters are drawn from `-max_abs..=max_abs`; `0` gives the
    /// zero structure.
    pub max_abs: i64,
    pub family: Option<MuFamily>,
    pub u0: Elem,
}

impl Default for RandomTpConfig {
    fn default() -> Self {
        RandomTpConfig {
            max_abs: 3,
            family: None,
            u0: 0,
        }
    }
}

/// Basis of `{w : Σ_{v∈S} w(v) = 0 for each S in constraints}`.
fn kernel_basis(n: usize, constraints: &[Vec<Elem>]) -> Vec<Vec<Q>> {
    let mut ech = Echelon::new(n);
    for s in constraints {
        ech.insert(s.iter().map(|&v| (v, BigInt::one())).collect());
    }
    ech.nullspace()
        .into_iter()
        .map(|sparse| {
            let mut w = vec![Q::zero(); n];
            for (i, v) in sparse {
                w[i] = v;
            }
            w
        })
        .collect()
}

fn random_combination(basis: &[Vec<Q>], n: usize, rng: &mut ChaCha8Rng, m: i64) -> Vec<Q> {
    let mut w = vec![Q::zero(); n];
    for b in basis {
        let c = Q::from_integer(BigInt::from(rng.gen_range(-m..=m)));
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi += &c * bi;
        }
    }
    w
}

/// Seeded `(μ, ν, λ)` whose combined structure is transposed Poisson.
///
/// `μ` is `a ⊗ a` or `Σ c_k w_k ⊗ w_k` with `Σ w_k = 0`, where every vector
/// also sums to zero over `V_xy` for each extreme pair with `λ(x,y) ≠ 0`.
/// Without that restriction the λ-part and the Poisson part need not
/// combine associatively.
pub fn random_tp_params(p: &Arc<Poset>, seed: u64, cfg: RandomTpConfig) -> TPDecomposition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = cfg.max_abs;
    let n = p.len();
    let draw = |rng: &mut ChaCha8Rng| Q::from_integer(BigInt::from(rng.gen_range(-m..=m)));

    let sides = extreme_sides(p, cfg.u0);
    let mut lam = BTreeMap::new();
    let mut constraints = Vec::new();
    for s in &sides {
        let v = draw(&mut rng);
        if !v.is_zero() {
            constraints.push(s.vset.clone());
        }
        lam.insert(s.pair, v);
    }
    let lambda = LambdaMap::new(p, lam).expect("extreme by construction");

    let nu_vals: Vec<(Pair, Q)> = p.min_max_pairs().into_iter().map(|e| (e, draw(&mut rng))).collect();
    let nu = CentralElement::from_values(p, &nu_vals).expect("Min-Max support");

    let family = cfg.family.unwrap_or(if rng.gen_bool(0.5) {
        MuFamily::RankOne
    } else {
        MuFamily::ZeroRowSum
    });
    let mu = match family {
        MuFamily::RankOne => {
            let basis = kernel_basis(n, &constraints);
            MuMap::rank_one(&random_combination(&basis, n, &mut rng, m))
        }
        MuFamily::ZeroRowSum => {
            let mut cons = constraints.clone();
            cons.push((0..n).collect());
            let basis = kernel_basis(n, &cons);
            let mut values = vec![vec![Q::zero(); n]; n];
            let terms = rng.gen_range(1..=2);
            for _ in 0..terms {
                let w = random_combination(&basis, n, &mut rng, m);
                let c = draw(&mut rng);
                for x in 0..n {
                    for y in 0..n {
                        values[x][y] += &c * &w[x] * &w[y];
                    }
                }
            }
            MuMap { values }
        }
    };
    debug_assert!(validate_mu(&mu));
    TPDecomposition {
        mu,
        nu,
        lambda,
        u0: cfg.u0,
    }
}

/// `random_tp_params` with the default configuration, assembled.
pub fn random_tp(p: &Arc<Poset>, seed: u64) -> TPProduct {
    random_tp_params(p, seed, RandomTpConfig::default()).reconstruct()
}
