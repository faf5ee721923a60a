//! The incidence algebra `I(X,K)` over the rationals, with its associative
//! product and the commutator bracket.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::poset::{Elem, Poset};
use crate::rational::{fmt_q, parse_q, Q};

/// Sparse element `f = sum f(x,y) e_xy`, keyed by basis (pair) index.
/// Zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct IncidenceElement {
    owner: Arc<Poset>,
    coeffs: BTreeMap<usize, Q>,
}

pub(crate) fn same_owner(a: &Arc<Poset>, b: &Arc<Poset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PartialEq for IncidenceElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_owner(&self.owner, &other.owner)
    }
}

impl Eq for IncidenceElement {}

impl IncidenceElement {
    pub fn zero(owner: &Arc<Poset>) -> Self {
        IncidenceElement {
            owner: owner.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis vector with the given pair index.
    pub fn basis(owner: &Arc<Poset>, index: usize) -> Self {
        let mut e = Self::zero(owner);
        e.coeffs.insert(index, Q::one());
        e
    }

    /// `e_xy`, or `None` when `x` is not below `y`.
    pub fn e(owner: &Arc<Poset>, x: Elem, y: Elem) -> Option<Self> {
        owner.pair_index(x, y).map(|i| Self::basis(owner, i))
    }

    /// `e_Y = sum_{y in Y} e_y`.
    pub fn e_set(owner: &Arc<Poset>, set: &[Elem]) -> Self {
        let mut e = Self::zero(owner);
        for &y in set {
            e.add_term(owner.pair_index(y, y).unwrap(), &Q::one());
        }
        e
    }

    /// The identity `delta = e_X`.
    pub fn identity(owner: &Arc<Poset>) -> Self {
        let all: Vec<Elem> = (0..owner.len()).collect();
        Self::e_set(owner, &all)
    }

    pub fn from_terms(owner: &Arc<Poset>, terms: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut e = Self::zero(owner);
        for (i, v) in terms {
            e.add_term(i, &v);
        }
        e
    }

    pub fn owner(&self) -> &Arc<Poset> {
        &self.owner
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at basis index `i`.
    pub fn get(&self, i: usize) -> Q {
        self.coeffs.get(&i).cloned().unwrap_or_else(Q::zero)
    }

    /// `f(x,y)`; zero for incomparable pairs.
    pub fn coeff(&self, x: Elem, y: Elem) -> Q {
        self.owner.pair_index(x, y).map_or_else(Q::zero, |i| self.get(i))
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.coeffs.iter().map(|(&i, v)| (i, v))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add_term(&mut self, i: usize, v: &Q) {
        if v.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(i).or_insert_with(Q::zero);
        *slot += v;
        if slot.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn add_scaled(&mut self, other: &IncidenceElement, k: &Q) {
        if k.is_zero() {
            return;
        }
        for (&i, v) in &other.coeffs {
            self.add_term(i, &(v * k));
        }
    }

    pub fn scale(&self, k: &Q) -> Self {
        let mut out = Self::zero(&self.owner);
        out.add_scaled(self, k);
        out
    }

    fn check_owner(&self, other: &Self) -> Result<()> {
        if same_owner(&self.owner, &other.owner) {
            Ok(())
        } else {
            Err(Error::OwnerMismatch)
        }
    }

    /// `(fg)(x,y) = sum_{x<=z<=y} f(x,z) g(z,y)`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_owner(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let p = &self.owner;
        let pairs = p.pairs();
        let mut by_start: BTreeMap<Elem, Vec<(Elem, &Q)>> = BTreeMap::new();
        for (&j, b) in &other.coeffs {
            let (z, y) = pairs[j];
            by_start.entry(z).or_default().push((y, b));
        }
        let mut out = Self::zero(p);
        for (&i, a) in &self.coeffs {
            let (x, z) = pairs[i];
            if let Some(row) = by_start.get(&z) {
                for &(y, b) in row {
                    out.add_term(p.pair_index(x, y).unwrap(), &(a * b));
                }
            }
        }
        out
    }

    /// `[f,g] = fg - gf`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_owner(other)?;
        Ok(self.bracket(other))
    }

    pub(crate) fn bracket(&self, other: &Self) -> Self {
        let mut out = self.mul_unchecked(other);
        out.add_scaled(&other.mul_unchecked(self), &-Q::one());
        out
    }

    /// `(f_D, f_J)`: diagonal part and strictly upper part.
    pub fn split_diag(&self) -> (Self, Self) {
        let pairs = self.owner.pairs();
        let mut d = Self::zero(&self.owner);
        let mut j = Self::zero(&self.owner);
        for (&i, v) in &self.coeffs {
            let (x, y) = pairs[i];
            if x == y {
                d.coeffs.insert(i, v.clone());
            } else {
                j.coeffs.insert(i, v.clone());
            }
        }
        (d, j)
    }

    /// `(f_Y, f_Y^c)` where `f_Y` keeps entries with both ends in `Y`.
    pub fn restrict(&self, set: &[Elem]) -> Result<(Self, Self)> {
        let n = self.owner.len();
        if let Some(&bad) = set.iter().find(|&&e| e >= n) {
            return Err(Error::UnknownElement(bad.to_string()));
        }
        let mut inside = vec![false; n];
        for &e in set {
            inside[e] = true;
        }
        let pairs = self.owner.pairs();
        let mut fy = Self::zero(&self.owner);
        let mut rest = Self::zero(&self.owner);
        for (&i, v) in &self.coeffs {
            let (x, y) = pairs[i];
            if inside[x] && inside[y] {
                fy.coeffs.insert(i, v.clone());
            } else {
                rest.coeffs.insert(i, v.clone());
            }
        }
        Ok((fy, rest))
    }

    pub fn to_records(&self) -> Vec<ElementRecord> {
        let p = &self.owner;
        self.coeffs
            .iter()
            .map(|(&i, v)| {
                let (x, y) = p.pairs()[i];
                ElementRecord {
                    from: p.label(x).to_string(),
                    to: p.label(y).to_string(),
                    numerator: v.numer().to_string(),
                    denominator: v.denom().to_string(),
                }
            })
            .collect()
    }

    pub fn from_records(owner: &Arc<Poset>, records: &[ElementRecord]) -> Result<Self> {
        let mut e = Self::zero(owner);
        for r in records {
            let x = owner.index_of(&r.from)?;
            let y = owner.index_of(&r.to)?;
            let i = owner
                .pair_index(x, y)
                .ok_or_else(|| Error::Json(format!("({},{}) is not a comparable pair", r.from, r.to)))?;
            let v = parse_q(&format!("{}/{}", r.numerator, r.denominator))?;
            e.add_term(i, &v);
        }
        Ok(e)
    }

    /// Human-readable form such as `-e13 + 1/2 e2`.
    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let p = &self.owner;
        let mut out = String::new();
        for (k, (&i, v)) in self.coeffs.iter().enumerate() {
            let (x, y) = p.pairs()[i];
            let name = if x == y {
                format!("e{}", p.label(x))
            } else {
                format!("e{}{}", p.label(x), p.label(y))
            };
            let neg = v < &Q::zero();
            let abs = if neg { -v.clone() } else { v.clone() };
            let sign = match (k, neg) {
                (0, true) => "-".to_string(),
                (0, false) => String::new(),
                (_, true) => " - ".to_string(),
                (_, false) => " + ".to_string(),
            };
            let coef = if abs.is_one() { String::new() } else { format!("{} ", fmt_q(&abs)) };
            out.push_str(&format!("{sign}{coef}{name}"));
        }
        out
    }
}

impl fmt::Display for IncidenceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

impl Add for &IncidenceElement {
    type Output = IncidenceElement;
    fn add(self, rhs: &IncidenceElement) -> IncidenceElement {
        assert!(same_owner(&self.owner, &rhs.owner), "owner mismatch");
        let mut out = self.clone();
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl Sub for &IncidenceElement {
    type Output = IncidenceElement;
    fn sub(self, rhs: &IncidenceElement) -> IncidenceElement {
        assert!(same_owner(&self.owner, &rhs.owner), "owner mismatch");
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl Neg for &IncidenceElement {
    type Output = IncidenceElement;
    fn neg(self) -> IncidenceElement {
        self.scale(&-Q::one())
    }
}

/// JSON record for one coefficient of an element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub from: String,
    pub to: String,
    pub numerator: String,
    pub denominator: String,
}

/// A linearly independent list of elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    vectors: Vec<IncidenceElement>,
}

impl SubspaceBasis {
    pub fn new(vectors: Vec<IncidenceElement>) -> Option<Self> {
        let ncols = vectors.first().map_or(0, |v| v.owner.pairs().len());
        let rows: Vec<Vec<(usize, Q)>> = vectors
            .iter()
            .map(|v| v.terms().map(|(i, q)| (i, q.clone())).collect())
            .collect();
        (linalg::rank(&rows, ncols) == vectors.len()).then_some(SubspaceBasis { vectors })
    }

    pub fn vectors(&self) -> &[IncidenceElement] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalBases {
    /// `Z(I(X,K)) = <delta>`.
    pub center: SubspaceBasis,
    /// `[L,L] = <e_xy : x<y>`.
    pub commutator_subspace: SubspaceBasis,
    /// `Z([L,L]) = <e_xy : Min(X) ∋ x < y ∈ Max(X)>`.
    pub center_of_commutator: SubspaceBasis,
}

pub fn canonical_bases(p: &Arc<Poset>) -> CanonicalBases {
    let center = SubspaceBasis::new(vec![IncidenceElement::identity(p)]).unwrap();
    let commutator_subspace = SubspaceBasis::new(
        p.strict_pairs()
            .map(|(x, y)| IncidenceElement::e(p, x, y).unwrap())
            .collect(),
    )
    .unwrap();
    let center_of_commutator = SubspaceBasis::new(
        p.min_max_pairs()
            .into_iter()
            .map(|(x, y)| IncidenceElement::e(p, x, y).unwrap())
            .collect(),
    )
    .unwrap();
    CanonicalBases {
        center,
        commutator_subspace,
        center_of_commutator,
    }
}

/// Whether `c` lies in `Z([L,L])`.
pub fn is_central_in_commutator(c: &IncidenceElement) -> bool {
    let p = c.owner();
    c.terms().all(|(i, _)| {
        let (x, y) = p.pairs()[i];
        x != y && p.is_min(x) && p.is_max(y)
    })
}

#[allow(dead_code)]
pub(crate) fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn arc(labels: &[&str], covers: &[(&str, &str)]) -> Arc<Poset> {
        Arc::new(Poset::new(labels, covers).unwrap())
    }

    fn chain3() -> Arc<Poset> {
        arc(&["1", "2", "3"], &[("1", "2"), ("2", "3")])
    }

    fn e(p: &Arc<Poset>, x: usize, y: usize) -> IncidenceElement {
        IncidenceElement::e(p, x, y).unwrap()
    }

    #[test]
    fn product_table() {
        let p = chain3();
        assert_eq!(e(&p, 0, 1).multiply(&e(&p, 1, 2)).unwrap(), e(&p, 0, 2));
        assert!(e(&p, 0, 0).multiply(&e(&p, 1, 1)).unwrap().is_zero());
        let y = IncidenceElement::e_set(&p, &[0, 1]);
        let z = IncidenceElement::e_set(&p, &[1, 2]);
        assert_eq!(y.multiply(&z).unwrap(), IncidenceElement::e_set(&p, &[1]));
        let f = &e(&p, 0, 1) + &e(&p, 1, 2).scale(&q(3));
        let d = IncidenceElement::identity(&p);
        assert_eq!(d.multiply(&f).unwrap(), f);
        assert_eq!(f.multiply(&d).unwrap(), f);
    }

    #[test]
    fn commutator_examples() {
        let p = chain3();
        assert_eq!(e(&p, 0, 0).commutator(&e(&p, 0, 1)).unwrap(), e(&p, 0, 1));
        assert_eq!(e(&p, 0, 1).commutator(&e(&p, 1, 1)).unwrap(), e(&p, 0, 1));
        let f = &e(&p, 0, 2) + &e(&p, 1, 1);
        assert!(IncidenceElement::identity(&p).commutator(&f).unwrap().is_zero());
    }

    #[test]
    fn owner_mismatch() {
        let a = chain3();
        let b = arc(&["1", "2"], &[("1", "2")]);
        assert_eq!(
            e(&a, 0, 1).multiply(&e(&b, 0, 1)),
            Err(Error::OwnerMismatch)
        );
        assert_eq!(e(&a, 0, 1).commutator(&e(&b, 0, 1)), Err(Error::OwnerMismatch));
    }

    #[test]
    fn split_and_restrict() {
        let p = chain3();
        let (d, j) = e(&p, 0, 0).split_diag();
        assert_eq!((d, j.is_zero()), (e(&p, 0, 0), true));
        let f = &IncidenceElement::identity(&p) + &e(&p, 0, 1).scale(&q(2));
        let (d, j) = f.split_diag();
        assert_eq!(d, IncidenceElement::identity(&p));
        assert_eq!(j, e(&p, 0, 1).scale(&q(2)));

        let f = &e(&p, 0, 1) + &e(&p, 0, 2);
        assert_eq!(f.restrict(&[0, 1]).unwrap(), (e(&p, 0, 1), e(&p, 0, 2)));
        assert_eq!(f.restrict(&[0, 1, 2]).unwrap(), (f.clone(), IncidenceElement::zero(&p)));
        assert_eq!(f.restrict(&[]).unwrap(), (IncidenceElement::zero(&p), f.clone()));
        assert!(matches!(f.restrict(&[7]), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn canonical_bases_examples() {
        let p = chain3();
        let b = canonical_bases(&p);
        assert_eq!(b.center.dim(), 1);
        assert_eq!(b.commutator_subspace.dim(), 3);
        assert_eq!(b.center_of_commutator.vectors(), &[e(&p, 0, 2)]);

        let v = arc(&["1", "2", "3"], &[("1", "2"), ("1", "3")]);
        assert_eq!(canonical_bases(&v).center_of_commutator.vectors(), &[e(&v, 0, 1), e(&v, 0, 2)]);

        let crown = arc(&["1", "2", "3", "4"], &[("1", "3"), ("1", "4"), ("2", "3"), ("2", "4")]);
        let z = canonical_bases(&crown).center_of_commutator;
        assert_eq!(z.vectors(), &[e(&crown, 0, 2), e(&crown, 0, 3), e(&crown, 1, 2), e(&crown, 1, 3)]);
    }

    #[test]
    fn canonical_bases_commute_as_claimed() {
        for p in [chain3(), arc(&["1", "2", "3", "4"], &[("1", "3"), ("2", "3"), ("2", "4")])] {
            let b = canonical_bases(&p);
            for i in 0..p.pairs().len() {
                let bi = IncidenceElement::basis(&p, i);
                assert!(b.center.vectors()[0].bracket(&bi).is_zero());
            }
            for c in b.center_of_commutator.vectors() {
                for l in b.commutator_subspace.vectors() {
                    assert!(c.bracket(l).is_zero());
                }
            }
            assert!(!SubspaceBasis::new(vec![IncidenceElement::identity(&p), IncidenceElement::identity(&p)]).is_some());
        }
    }

    #[test]
    fn records_and_display() {
        let p = chain3();
        let f = &e(&p, 0, 2).scale(&crate::rational::frac(-3, 2)) + &e(&p, 1, 1);
        let recs = f.to_records();
        assert_eq!(recs[0].from, "1");
        assert_eq!(recs[0].numerator, "-3");
        assert_eq!(IncidenceElement::from_records(&p, &recs).unwrap(), f);
        assert_eq!(f.display(), "-3/2 e13 + e2");
    }

    fn n_poset() -> Arc<Poset> {
        arc(&["1", "2", "3", "4", "5"], &[("1", "3"), ("2", "3"), ("2", "4"), ("3", "5"), ("4", "5")])
    }

    fn element(p: &Arc<Poset>) -> impl Strategy<Value = IncidenceElement> {
        let p = p.clone();
        let n = p.pairs().len();
        proptest::collection::vec(-3i64..=3, n).prop_map(move |v| {
            IncidenceElement::from_terms(&p, v.into_iter().enumerate().map(|(i, c)| (i, q(c))))
        })
    }

    proptest! {
        #[test]
        fn multiply_is_associative(
            (f, g, h) in {
                let p = n_poset();
                (element(&p), element(&p), element(&p))
            }
        ) {
            let lhs = f.multiply(&g).unwrap().multiply(&h).unwrap();
            let rhs = f.multiply(&g.multiply(&h).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn bracket_is_antisymmetric_and_jacobi(
            (f, g, h) in {
                let p = n_poset();
                (element(&p), element(&p), element(&p))
            }
        ) {
            prop_assert_eq!(f.bracket(&g), -&g.bracket(&f));
            let j = &(&f.bracket(&g).bracket(&h) + &g.bracket(&h).bracket(&f)) + &h.bracket(&f).bracket(&g);
            prop_assert!(j.is_zero());
        }

        #[test]
        fn restriction_reassembles_and_complement_is_ideal(
            (f, g, mask) in {
                let p = n_poset();
                (element(&p), element(&p), proptest::collection::vec(any::<bool>(), 5))
            }
        ) {
            let set: Vec<usize> = (0..5).filter(|&i| mask[i]).collect();
            let (fy, fc) = f.restrict(&set).unwrap();
            prop_assert_eq!(&(&fy + &fc), &f);
            let (gy, gc) = g.restrict(&set).unwrap();
            let _ = gy;
            for prod in [fy.multiply(&gc).unwrap(), gc.multiply(&fy).unwrap(), fy.commutator(&gc).unwrap()] {
                let (inside, _) = prod.restrict(&set).unwrap();
                prop_assert!(inside.is_zero());
            }
        }
    }
}
