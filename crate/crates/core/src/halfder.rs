//! ½-derivations of the Lie incidence algebra: the three canonical families,
//! a brute-force nullspace solver, and the decomposition
//! `φ = ad_c + φ_σ + φ_κ`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{is_central_in_commutator, same_owner, ElementRecord, IncidenceElement};
use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::poset::{pair_classes, walk_between, Elem, Pair, PairClassPartition, Poset, Walk};
use crate::rational::{fmt_q, parse_q, Q};

/// Default bound on the number of unknowns, `(#pairs)^2`, of the brute-force
/// system.
pub const DEFAULT_ORACLE_CAP: usize = 5000;

/// Linear map of `I(X,K)`, stored as the images of the basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOperator {
    owner: Arc<Poset>,
    columns: Vec<IncidenceElement>,
}

impl LinearOperator {
    pub fn zero(owner: &Arc<Poset>) -> Self {
        let n = owner.pairs().len();
        LinearOperator {
            owner: owner.clone(),
            columns: vec![IncidenceElement::zero(owner); n],
        }
    }

    pub fn identity(owner: &Arc<Poset>) -> Self {
        Self::from_fn(owner, |i| IncidenceElement::basis(owner, i))
    }

    /// Builds the operator whose image of basis vector `i` is `f(i)`.
    pub fn from_fn(owner: &Arc<Poset>, mut f: impl FnMut(usize) -> IncidenceElement) -> Self {
        let columns = (0..owner.pairs().len()).map(&mut f).collect();
        LinearOperator {
            owner: owner.clone(),
            columns,
        }
    }

    /// Operator from explicit images; basis indices not listed map to zero.
    pub fn from_images(owner: &Arc<Poset>, images: impl IntoIterator<Item = (usize, IncidenceElement)>) -> Result<Self> {
        let mut op = Self::zero(owner);
        for (i, img) in images {
            if !same_owner(owner, img.owner()) {
                return Err(Error::OwnerMismatch);
            }
            op.columns[i] = img;
        }
        Ok(op)
    }

    pub fn owner(&self) -> &Arc<Poset> {
        &self.owner
    }

    /// Image of basis vector `i`.
    pub fn column(&self, i: usize) -> &IncidenceElement {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[IncidenceElement] {
        &self.columns
    }

    /// Image of `e_xy`.
    pub fn image(&self, x: Elem, y: Elem) -> Option<&IncidenceElement> {
        self.owner.pair_index(x, y).map(|i| &self.columns[i])
    }

    pub fn apply(&self, f: &IncidenceElement) -> Result<IncidenceElement> {
        if !same_owner(&self.owner, f.owner()) {
            return Err(Error::OwnerMismatch);
        }
        let mut out = IncidenceElement::zero(&self.owner);
        for (i, v) in f.terms() {
            out.add_scaled(&self.columns[i], v);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !same_owner(&self.owner, &other.owner) {
            return Err(Error::OwnerMismatch);
        }
        Ok(Self::from_fn(&self.owner, |i| &self.columns[i] + &other.columns[i]))
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::from_fn(&self.owner, |i| self.columns[i].scale(k))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(IncidenceElement::is_zero)
    }

    /// Flattened coordinates: entry `i * n + k` is the coefficient of `b_k`
    /// in the image of `b_i`.
    pub fn coordinates(&self) -> Vec<(usize, Q)> {
        let n = self.columns.len();
        let mut out = Vec::new();
        for (i, col) in self.columns.iter().enumerate() {
            for (k, v) in col.terms() {
                out.push((i * n + k, v.clone()));
            }
        }
        out
    }

    /// First unordered basis pair `(b_i, b_j)`, `i < j`, violating
    /// `2φ([a,b]) = [φ(a),b] + [a,φ(b)]`, or `None`.
    pub fn half_derivation_witness(&self) -> Option<(usize, usize)> {
        let p = &self.owner;
        let n = p.pairs().len();
        let basis: Vec<IncidenceElement> = (0..n).map(|i| IncidenceElement::basis(p, i)).collect();
        let two = Q::from_integer(BigInt::from(2));
        for i in 0..n {
            for j in i + 1..n {
                let br = basis[i].bracket(&basis[j]);
                let mut lhs = self.apply(&br).unwrap().scale(&two);
                lhs.add_scaled(&self.columns[i].bracket(&basis[j]), &-Q::one());
                lhs.add_scaled(&basis[i].bracket(&self.columns[j]), &-Q::one());
                if !lhs.is_zero() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_half_derivation(&self) -> bool {
        self.half_derivation_witness().is_none()
    }

    pub fn to_json(&self) -> OperatorJson {
        let p = &self.owner;
        let columns = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let (x, y) = p.pairs()[i];
                ColumnJson {
                    from: p.label(x).to_string(),
                    to: p.label(y).to_string(),
                    image: c.to_records(),
                }
            })
            .collect();
        OperatorJson { columns }
    }

    pub fn from_json(owner: &Arc<Poset>, json: &OperatorJson) -> Result<Self> {
        let mut images = BTreeMap::new();
        for c in &json.columns {
            let x = owner.index_of(&c.from)?;
            let y = owner.index_of(&c.to)?;
            let i = owner
                .pair_index(x, y)
                .ok_or_else(|| Error::Json(format!("({},{}) is not a comparable pair", c.from, c.to)))?;
            if images.contains_key(&i) {
                return Err(Error::Json(format!("image of e({},{}) given twice", c.from, c.to)));
            }
            images.insert(i, IncidenceElement::from_records(owner, &c.image)?);
        }
        Self::from_images(owner, images)
    }
}

/// Serialized operator: images of the basis vectors `e_(from,to)`; omitted
/// columns are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub columns: Vec<ColumnJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnJson {
    pub from: String,
    pub to: String,
    pub image: Vec<ElementRecord>,
}

/// Element of `Z([L,L])`, i.e. supported on pairs `Min ∋ x < y ∈ Max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralElement {
    element: IncidenceElement,
}

impl CentralElement {
    pub fn new(element: IncidenceElement) -> Result<Self> {
        if is_central_in_commutator(&element) {
            Ok(CentralElement { element })
        } else {
            Err(Error::NotCentralInCommutator)
        }
    }

    pub fn zero(p: &Arc<Poset>) -> Self {
        CentralElement {
            element: IncidenceElement::zero(p),
        }
    }

    pub fn from_values(p: &Arc<Poset>, values: &[(Pair, Q)]) -> Result<Self> {
        let mut e = IncidenceElement::zero(p);
        for ((x, y), v) in values {
            let i = p.pair_index(*x, *y).ok_or(Error::NotCentralInCommutator)?;
            e.add_term(i, v);
        }
        Self::new(e)
    }

    pub fn element(&self) -> &IncidenceElement {
        &self.element
    }

    pub fn value(&self, x: Elem, y: Elem) -> Q {
        self.element.coeff(x, y)
    }

    /// Nonzero values keyed by pair.
    pub fn values(&self) -> Vec<(Pair, Q)> {
        let p = self.element.owner();
        self.element.terms().map(|(i, v)| (p.pairs()[i], v.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.element.is_zero()
    }
}

/// `σ : X²_< → K`, one value per pair class, so every value is admissible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaMap {
    owner: Arc<Poset>,
    classes: PairClassPartition,
    values: Vec<Q>,
}

impl SigmaMap {
    /// `values[k]` is the value on class `k` of `pair_classes(p)`.
    pub fn new(p: &Arc<Poset>, values: Vec<Q>) -> Self {
        let classes = pair_classes(p);
        assert_eq!(values.len(), classes.len(), "one value per pair class");
        SigmaMap {
            owner: p.clone(),
            classes,
            values,
        }
    }

    pub fn constant(p: &Arc<Poset>, k: Q) -> Self {
        let n = pair_classes(p).len();
        Self::new(p, vec![k; n])
    }

    pub fn zero(p: &Arc<Poset>) -> Self {
        Self::constant(p, Q::zero())
    }

    /// Indicator of class `k`.
    pub fn indicator(p: &Arc<Poset>, k: usize) -> Self {
        let mut s = Self::zero(p);
        s.values[k] = Q::one();
        s
    }

    /// From a raw map on every strict pair; fails unless it is constant on
    /// each pair class. Missing pairs count as zero.
    pub fn from_raw(p: &Arc<Poset>, raw: &BTreeMap<Pair, Q>) -> Result<Self> {
        let classes = pair_classes(p);
        let mut values = Vec::with_capacity(classes.len());
        for class in classes.classes() {
            let get = |e: &Pair| raw.get(e).cloned().unwrap_or_else(Q::zero);
            let first = get(&class[0]);
            if let Some(bad) = class.iter().find(|e| get(e) != first) {
                return Err(Error::InadmissibleSigma(p.label(bad.0).into(), p.label(bad.1).into()));
            }
            values.push(first);
        }
        Ok(SigmaMap {
            owner: p.clone(),
            classes,
            values,
        })
    }

    pub fn owner(&self) -> &Arc<Poset> {
        &self.owner
    }

    pub fn classes(&self) -> &PairClassPartition {
        &self.classes
    }

    pub fn class_values(&self) -> &[Q] {
        &self.values
    }

    pub fn value(&self, x: Elem, y: Elem) -> Q {
        self.classes
            .class_of((x, y))
            .map_or_else(Q::zero, |k| self.values[k].clone())
    }

    /// The map on every strict pair.
    pub fn to_raw(&self) -> BTreeMap<Pair, Q> {
        self.owner
            .strict_pairs()
            .map(|e| (e, self.value(e.0, e.1)))
            .collect()
    }
}

/// `κ : X → K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaMap {
    pub values: Vec<Q>,
}

impl KappaMap {
    pub fn zero(p: &Poset) -> Self {
        KappaMap {
            values: vec![Q::zero(); p.len()],
        }
    }

    pub fn indicator(p: &Poset, x: Elem) -> Self {
        let mut k = Self::zero(p);
        k.values[x] = Q::one();
        k
    }
}

/// `(s⁺, s⁻, t⁺, t⁻)` of a walk at one element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkSums {
    pub s_plus: Q,
    pub s_minus: Q,
    pub t_plus: Q,
    pub t_minus: Q,
}

impl WalkSums {
    /// `s⁺ − s⁻ + t⁺ − t⁻`.
    pub fn balance(&self) -> Q {
        &self.s_plus - &self.s_minus + &self.t_plus - &self.t_minus
    }
}

pub fn walk_functionals(sigma: &SigmaMap, w: &Walk, x: Elem) -> Result<WalkSums> {
    let p = sigma.owner();
    if w.vertices().iter().any(|&v| v >= p.len()) || x >= p.len() {
        return Err(Error::InvalidWalk(w.to_string()));
    }
    let mut out = WalkSums {
        s_plus: Q::zero(),
        s_minus: Q::zero(),
        t_plus: Q::zero(),
        t_minus: Q::zero(),
    };
    for (a, b) in w.edges() {
        if !p.is_cover(a, b) && !p.is_cover(b, a) {
            return Err(Error::InvalidWalk(w.display(p)));
        }
        if p.lt(a, b) {
            let s = sigma.value(a, b);
            if a == x {
                out.s_plus += &s;
            }
            if b == x {
                out.t_minus += &s;
            }
        } else {
            let s = sigma.value(b, a);
            if b == x {
                out.s_minus += &s;
            }
            if a == x {
                out.t_plus += &s;
            }
        }
    }
    Ok(out)
}

/// Whether a raw `σ` on strict pairs is constant on chains and cycles.
pub fn is_admissible(p: &Arc<Poset>, raw: &BTreeMap<Pair, Q>) -> bool {
    SigmaMap::from_raw(p, raw).is_ok()
}

fn check_element(p: &Poset, x: Elem) -> Result<()> {
    if x < p.len() {
        Ok(())
    } else {
        Err(Error::UnknownElement(x.to_string()))
    }
}

/// `a ↦ [c, a]`.
pub fn inner(c: &CentralElement) -> LinearOperator {
    let p = c.element().owner().clone();
    LinearOperator::from_fn(&p, |i| c.element().bracket(&IncidenceElement::basis(&p, i)))
}

/// `e_x ↦ κ(x)δ`, `e_xy ↦ 0`.
pub fn central_valued(p: &Arc<Poset>, kappa: &KappaMap) -> LinearOperator {
    let delta = IncidenceElement::identity(p);
    LinearOperator::from_fn(p, |i| {
        let (x, y) = p.pairs()[i];
        if x == y {
            delta.scale(&kappa.values[x])
        } else {
            IncidenceElement::zero(p)
        }
    })
}

/// Diagonal value `φ_σ(e_x)(v,v)` computed along the walk `w` from `u0`.
pub fn phi_sigma_diagonal_along(sigma: &SigmaMap, w: &Walk, x: Elem) -> Result<Q> {
    let s = walk_functionals(sigma, w, x)?;
    Ok(-s.balance())
}

/// The diagonality preserving ½-derivation with `φ(e_xy) = σ(x,y)e_xy` and
/// `φ(e_x)(u0,u0) = 0`.
pub fn phi_sigma(sigma: &SigmaMap, u0: Elem) -> Result<LinearOperator> {
    let p = sigma.owner().clone();
    check_element(&p, u0)?;
    let n = p.len();
    // diag[x][v] = φ(e_x)(v,v)
    let mut diag = vec![vec![Q::zero(); n]; n];
    for v in 0..n {
        let w = walk_between(&p, u0, v);
        for (x, row) in diag.iter_mut().enumerate() {
            row[v] = phi_sigma_diagonal_along(sigma, &w, x)?;
        }
    }
    Ok(LinearOperator::from_fn(&p, |i| {
        let (x, y) = p.pairs()[i];
        if x == y {
            IncidenceElement::from_terms(
                &p,
                (0..n).map(|v| (p.pair_index(v, v).unwrap(), diag[x][v].clone())),
            )
        } else {
            IncidenceElement::basis(&p, i).scale(&sigma.value(x, y))
        }
    }))
}

/// Number of unknowns of the brute-force system.
pub fn oracle_unknowns(p: &Poset) -> usize {
    let n = p.pairs().len();
    n * n
}

fn oracle_system(p: &Arc<Poset>, cap: usize) -> Result<Echelon> {
    let unknowns = oracle_unknowns(p);
    if unknowns > cap {
        return Err(Error::TooLarge { unknowns, cap });
    }
    let n = p.pairs().len();
    let basis: Vec<IncidenceElement> = (0..n).map(|i| IncidenceElement::basis(p, i)).collect();
    let table: Vec<Vec<IncidenceElement>> = basis
        .iter()
        .map(|a| basis.iter().map(|b| a.bracket(b)).collect())
        .collect();
    let var = |col: usize, k: usize| col * n + k;
    let mut ech = Echelon::new(unknowns);
    for i in 0..n {
        for j in i + 1..n {
            // Coordinate m of 2φ([b_i,b_j]) − [φ(b_i),b_j] − [b_i,φ(b_j)].
            let mut rows: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
            for (l, c) in table[i][j].terms() {
                let c2 = c.numer() * BigInt::from(2);
                for m in 0..n {
                    rows.entry(m).or_default().push((var(l, m), c2.clone()));
                }
            }
            for k in 0..n {
                for (m, c) in table[k][j].terms() {
                    rows.entry(m).or_default().push((var(i, k), -c.numer().clone()));
                }
                for (m, c) in table[i][k].terms() {
                    rows.entry(m).or_default().push((var(j, k), -c.numer().clone()));
                }
            }
            for (_, row) in rows {
                ech.insert(row);
            }
        }
    }
    Ok(ech)
}

/// `dim Δ(L)` from the brute-force linear system.
pub fn half_derivation_dimension(p: &Arc<Poset>, cap: usize) -> Result<usize> {
    let ech = oracle_system(p, cap)?;
    Ok(ech.ncols() - ech.rank())
}

/// Basis of `Δ(L)` as the exact nullspace of the defining linear system.
pub fn half_derivation_space(p: &Arc<Poset>, cap: usize) -> Result<Vec<LinearOperator>> {
    let ech = oracle_system(p, cap)?;
    let n = p.pairs().len();
    Ok(ech
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut op = LinearOperator::zero(p);
            for (idx, q) in v {
                op.columns[idx / n].add_term(idx % n, &q);
            }
            op
        })
        .collect())
}

/// `|X| + #pair classes + |{Min ∋ x < y ∈ Max}|`.
pub fn predicted_dimension(p: &Poset) -> usize {
    p.len() + pair_classes(p).len() + p.min_max_pairs().len()
}

/// One generator of the structural basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Inner(Pair),
    Sigma(usize),
    Kappa(Elem),
}

/// `ad_{e_xy}` per Min-Max pair, `φ_σ` per class indicator, `φ_κ` per element
/// indicator.
pub fn structural_basis(p: &Arc<Poset>, u0: Elem) -> Result<Vec<(Generator, LinearOperator)>> {
    check_element(p, u0)?;
    let mut out = Vec::new();
    for (x, y) in p.min_max_pairs() {
        let c = CentralElement::new(IncidenceElement::e(p, x, y).unwrap())?;
        out.push((Generator::Inner((x, y)), inner(&c)));
    }
    for k in 0..pair_classes(p).len() {
        out.push((Generator::Sigma(k), phi_sigma(&SigmaMap::indicator(p, k), u0)?));
    }
    for x in 0..p.len() {
        out.push((Generator::Kappa(x), central_valued(p, &KappaMap::indicator(p, x))));
    }
    Ok(out)
}

/// Rank of a list of operators.
pub fn operator_rank(ops: &[LinearOperator]) -> usize {
    let Some(first) = ops.first() else { return 0 };
    let n = first.owner().pairs().len();
    let rows: Vec<_> = ops.iter().map(LinearOperator::coordinates).collect();
    crate::linalg::rank(&rows, n * n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfDerDecomposition {
    pub c: CentralElement,
    pub sigma: SigmaMap,
    pub kappa: KappaMap,
    pub u0: Elem,
}

impl HalfDerDecomposition {
    /// `ad_c + φ_σ + φ_κ`.
    pub fn reconstruct(&self) -> LinearOperator {
        let p = self.sigma.owner();
        inner(&self.c)
            .add(&phi_sigma(&self.sigma, self.u0).expect("u0 checked"))
            .unwrap()
            .add(&central_valued(p, &self.kappa))
            .unwrap()
    }

    pub fn report(&self) -> DecompositionReport {
        let p = self.sigma.owner();
        let c = self
            .c
            .values()
            .into_iter()
            .map(|((x, y), v)| PairValue::new(p, x, y, &v))
            .collect();
        let sigma = self
            .sigma
            .classes()
            .representatives()
            .into_iter()
            .zip(self.sigma.class_values())
            .map(|((x, y), v)| PairValue::new(p, x, y, v))
            .collect();
        let kappa = self
            .kappa
            .values
            .iter()
            .enumerate()
            .map(|(x, v)| ElementValue {
                x: p.label(x).to_string(),
                value: fmt_q(v),
            })
            .collect();
        DecompositionReport {
            u0: p.label(self.u0).to_string(),
            c,
            sigma,
            kappa,
        }
    }
}

/// `{x, y, value}` with the value as reduced `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairValue {
    pub x: String,
    pub y: String,
    pub value: String,
}

impl PairValue {
    pub fn new(p: &Poset, x: Elem, y: Elem, v: &Q) -> Self {
        PairValue {
            x: p.label(x).to_string(),
            y: p.label(y).to_string(),
            value: fmt_q(v),
        }
    }

    pub fn parse(&self, p: &Poset) -> Result<(Pair, Q)> {
        Ok(((p.index_of(&self.x)?, p.index_of(&self.y)?), parse_q(&self.value)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementValue {
    pub x: String,
    pub value: String,
}

/// Serialized decomposition; `sigma` is keyed by class representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub u0: String,
    pub c: Vec<PairValue>,
    pub sigma: Vec<PairValue>,
    pub kappa: Vec<ElementValue>,
}

fn basis_name(p: &Poset, i: usize) -> String {
    let (x, y) = p.pairs()[i];
    if x == y {
        format!("e{}", p.label(x))
    } else {
        format!("e{}{}", p.label(x), p.label(y))
    }
}

/// Splits a ½-derivation as `ad_c + φ_σ + φ_κ` relative to `u0`.
pub fn decompose(op: &LinearOperator, u0: Elem) -> Result<HalfDerDecomposition> {
    let p = op.owner().clone();
    check_element(&p, u0)?;
    if let Some((i, j)) = op.half_derivation_witness() {
        return Err(Error::NotHalfDerivation(basis_name(&p, i), basis_name(&p, j)));
    }
    let mut raw = BTreeMap::new();
    for (x, y) in p.strict_pairs() {
        let i = p.pair_index(x, y).unwrap();
        let img = op.column(i);
        if img.terms().any(|(k, _)| k != i) {
            return Err(Error::MalformedImage(basis_name(&p, i)));
        }
        raw.insert((x, y), img.get(i));
    }
    let sigma = SigmaMap::from_raw(&p, &raw)?;
    let cvals: Vec<(Pair, Q)> = p
        .min_max_pairs()
        .into_iter()
        .map(|(x, y)| ((x, y), op.image(y, y).unwrap().coeff(x, y)))
        .collect();
    let c = CentralElement::from_values(&p, &cvals)?;
    let kappa = KappaMap {
        values: (0..p.len())
            .map(|x| op.image(x, x).unwrap().coeff(u0, u0))
            .collect(),
    };
    let d = HalfDerDecomposition { c, sigma, kappa, u0 };
    if d.reconstruct() != *op {
        return Err(Error::ReconstructionMismatch);
    }
    Ok(d)
}
