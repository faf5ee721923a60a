//! Sparse fraction-free Gaussian elimination over the integers.
//!
//! Rows are kept primitive (content 1, positive leading coefficient) so
//! entries stay small on the structured systems this crate produces.
//! Rational input is cleared of denominators before insertion.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Q;

pub type IntRow = Vec<(usize, BigInt)>;

/// Row echelon form built incrementally, one row at a time.
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, IntRow>,
}

fn normalize(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let flip = row.first().is_some_and(|(_, v)| v.is_negative());
    if !g.is_one() || flip {
        let g = if flip { -g } else { g };
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// `a*r - b*p`, dropping zeros.
fn combine(r: &IntRow, a: &BigInt, p: &IntRow, b: &BigInt) -> IntRow {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let ci = r.get(i).map_or(usize::MAX, |e| e.0);
        let cj = p.get(j).map_or(usize::MAX, |e| e.0);
        let (col, v) = if ci < cj {
            i += 1;
            (ci, a * &r[i - 1].1)
        } else if cj < ci {
            j += 1;
            (cj, -(b * &p[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (ci, a * &r[i - 1].1 - b * &p[j - 1].1)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    out
}

/// Eliminates column `col` of `r` using pivot row `p` (whose entry at `col`
/// is nonzero).
fn eliminate(r: &IntRow, p: &IntRow, col: usize) -> IntRow {
    let rc = &r.iter().find(|e| e.0 == col).unwrap().1;
    let pc = &p.iter().find(|e| e.0 == col).unwrap().1;
    let g = rc.gcd(pc);
    let mut out = combine(r, &(pc / &g), p, &(rc / &g));
    normalize(&mut out);
    out
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Adds a row; returns whether the rank grew. Entries may be unsorted
    /// and may repeat a column (they are summed).
    pub fn insert(&mut self, row: IntRow) -> bool {
        let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (c, v) in row {
            debug_assert!(c < self.ncols);
            *acc.entry(c).or_default() += v;
        }
        let mut r: IntRow = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        normalize(&mut r);
        loop {
            let Some(&(lead, _)) = r.first() else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(p) => r = eliminate(&r, p, lead),
                None => {
                    self.pivots.insert(lead, r);
                    return true;
                }
            }
        }
    }

    pub fn insert_rational(&mut self, row: &[(usize, Q)]) -> bool {
        let lcm = row
            .iter()
            .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
        let ints = row
            .iter()
            .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
            .collect();
        self.insert(ints)
    }

    /// Basis of the right nullspace, one sparse vector per free column in
    /// increasing column order, with a 1 in that free column.
    pub fn nullspace(&self) -> Vec<Vec<(usize, Q)>> {
        let mut reduced: BTreeMap<usize, IntRow> = BTreeMap::new();
        for (&c, row) in self.pivots.iter().rev() {
            let mut r = row.clone();
            while let Some(d) = r.iter().map(|e| e.0).find(|&d| d != c && reduced.contains_key(&d)) {
                r = eliminate(&r, &reduced[&d], d);
            }
            reduced.insert(c, r);
        }
        let mut out = Vec::new();
        for f in (0..self.ncols).filter(|f| !self.pivots.contains_key(f)) {
            let mut v: Vec<(usize, Q)> = vec![(f, Q::one())];
            for (&c, row) in &reduced {
                if let Some((_, b)) = row.iter().find(|e| e.0 == f) {
                    let a = &row[0].1;
                    v.push((c, Q::new(-b.clone(), a.clone())));
                }
            }
            v.sort_by_key(|e| e.0);
            out.push(v);
        }
        out
    }
}

/// Rank of a set of sparse rational vectors.
pub fn rank(rows: &[Vec<(usize, Q)>], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert_rational(r);
    }
    e.rank()
}
