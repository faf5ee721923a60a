//! Small posets for testing: every connected poset on a few elements up to
//! isomorphism, and seeded random connected posets.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poset::Poset;

/// Strict order as bitmasks: bit `j` of `below[i]` is set when `j < i`.
type Relation = Vec<u32>;

fn invariant(rel: &Relation, i: usize) -> (u32, u32) {
    let down = rel[i].count_ones();
    let up = rel.iter().filter(|m| *m >> i & 1 == 1).count() as u32;
    (down, up)
}

/// Lexicographically smallest relabeling among those sorting elements by
/// `(#below, #above)`.
fn canonical(rel: &Relation) -> Relation {
    let n = rel.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| invariant(rel, i));
    let keys: Vec<(u32, u32)> = order.iter().map(|&i| invariant(rel, i)).collect();
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut s = 0;
    for e in 1..=n {
        if e == n || keys[e] != keys[s] {
            groups.push((s, e));
            s = e;
        }
    }
    let mut best: Option<Relation> = None;
    let mut perm = order.clone();
    fn rec(g: usize, groups: &[(usize, usize)], perm: &mut Vec<usize>, rel: &Relation, best: &mut Option<Relation>) {
        if g == groups.len() {
            // perm[new] = old
            let n = perm.len();
            let mut new_of = vec![0; n];
            for (new, &old) in perm.iter().enumerate() {
                new_of[old] = new;
            }
            let img: Relation = (0..n)
                .map(|new| {
                    let old = perm[new];
                    (0..n).filter(|&j| rel[old] >> j & 1 == 1).fold(0u32, |m, j| m | 1 << new_of[j])
                })
                .collect();
            if best.as_ref().is_none_or(|b| img < *b) {
                *best = Some(img);
            }
            return;
        }
        let (s, e) = groups[g];
        heap_permute(s, e, perm, &mut |perm| rec(g + 1, groups, perm, rel, best));
    }
    rec(0, &groups, &mut perm, rel, &mut best);
    best.unwrap()
}

/// Calls `f` once for every arrangement of `perm[s..e]`.
fn heap_permute(s: usize, e: usize, perm: &mut Vec<usize>, f: &mut dyn FnMut(&mut Vec<usize>)) {
    fn go(k: usize, s: usize, perm: &mut Vec<usize>, f: &mut dyn FnMut(&mut Vec<usize>)) {
        if k <= 1 {
            f(perm);
            return;
        }
        for i in 0..k - 1 {
            go(k - 1, s, perm, f);
            if k.is_multiple_of(2) {
                perm.swap(s + i, s + k - 1);
            } else {
                perm.swap(s, s + k - 1);
            }
        }
        go(k - 1, s, perm, f);
    }
    go(e - s, s, perm, f);
}

fn connected(rel: &Relation) -> bool {
    let n = rel.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(a) = stack.pop() {
        for b in 0..n {
            let adj = rel[a] >> b & 1 == 1 || rel[b] >> a & 1 == 1;
            if adj && !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn to_poset(rel: &Relation, labels: &[String]) -> Poset {
    let n = rel.len();
    let lt = |a: usize, b: usize| rel[b] >> a & 1 == 1;
    let mut covers = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                covers.push((labels[a].clone(), labels[b].clone()));
            }
        }
    }
    Poset::new(labels, &covers).expect("valid connected order")
}

fn numeric_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// All posets on `n` elements up to isomorphism, in canonical form.
fn all_relations(n: usize) -> Vec<Relation> {
    let mut level: BTreeSet<Relation> = BTreeSet::from([vec![0]]);
    for k in 1..n {
        let mut next = BTreeSet::new();
        for rel in &level {
            // the new element k sits above a down-closed set
            for down in 0u32..1 << k {
                let closed = (0..k).all(|a| down >> a & 1 == 0 || rel[a] & !down == 0);
                if closed {
                    let mut r = rel.clone();
                    r.push(down);
                    next.insert(canonical(&r));
                }
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Every connected poset on `n >= 2` elements up to isomorphism, labeled
/// `1..=n` along a linear extension. Practical up to `n = 7`.
pub fn connected_posets(n: usize) -> Vec<Poset> {
    assert!((2..=8).contains(&n), "catalog supports 2..=8 elements");
    let labels = numeric_labels(n);
    let mut rels: Vec<Relation> = all_relations(n).into_iter().filter(connected).collect();
    // relabel so that labels follow a linear extension
    for r in rels.iter_mut() {
        *r = linear_relabel(r);
    }
    rels.sort();
    rels.iter().map(|r| to_poset(r, &labels)).collect()
}

fn linear_relabel(rel: &Relation) -> Relation {
    let n = rel.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut depth = vec![0usize; n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for j in 0..n {
                if rel[i] >> j & 1 == 1 && depth[i] < depth[j] + 1 {
                    depth[i] = depth[j] + 1;
                    changed = true;
                }
            }
        }
    }
    order.sort_by_key(|&i| (depth[i], i));
    let mut new_of = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        new_of[old] = new;
    }
    order
        .iter()
        .map(|&old| (0..n).filter(|&j| rel[old] >> j & 1 == 1).fold(0u32, |m, j| m | 1 << new_of[j]))
        .collect()
}

/// `connected_posets(n)` for every `n` in `sizes`, shared behind `Arc`.
pub fn catalog(sizes: std::ops::RangeInclusive<usize>) -> Vec<Arc<Poset>> {
    sizes.flat_map(connected_posets).map(Arc::new).collect()
}

/// A random connected poset on `n` elements. Labels are `1..=n` but are
/// declared in shuffled order, so internal indices do not follow the order.
pub fn random_connected_poset(n: usize, seed: u64) -> Poset {
    assert!((2..=32).contains(&n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let density: f64 = rng.gen_range(0.15..0.6);
        let mut rel: Relation = vec![0; n];
        for b in 0..n {
            for a in 0..b {
                if rng.gen_bool(density) {
                    rel[b] |= 1 << a;
                }
            }
        }
        // transitive closure along the natural order
        for b in 0..n {
            let mut m = rel[b];
            for a in (0..b).rev() {
                if m >> a & 1 == 1 {
                    m |= rel[a];
                }
            }
            rel[b] = m;
        }
        if !connected(&rel) {
            continue;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let labels: Vec<String> = perm.iter().map(|&i| (i + 1).to_string()).collect();
        let named = to_poset(&rel, &labels);
        let mut declared: Vec<String> = labels.clone();
        declared.shuffle(&mut rng);
        let covers: Vec<(String, String)> = named
            .covers()
            .iter()
            .map(|&(a, b)| (named.label(a).to_string(), named.label(b).to_string()))
            .collect();
        return Poset::new(&declared, &covers).expect("valid connected order");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequence() {
        let counts: Vec<usize> = (2..=6).map(|n| connected_posets(n).len()).collect();
        assert_eq!(counts, vec![1, 3, 10, 44, 238]);
    }

    #[test]
    fn catalog_entries_are_pairwise_nonisomorphic() {
        for n in 2..=5 {
            let ps = connected_posets(n);
            let canon: BTreeSet<Relation> = ps
                .iter()
                .map(|p| {
                    let rel: Relation = (0..n)
                        .map(|i| (0..n).filter(|&j| p.lt(j, i)).fold(0u32, |m, j| m | 1 << j))
                        .collect();
                    canonical(&rel)
                })
                .collect();
            assert_eq!(canon.len(), ps.len());
            for p in &ps {
                for (a, b) in p.covers() {
                    assert!(a < b, "labels follow a linear extension");
                }
            }
        }
    }

    #[test]
    fn random_posets_are_deterministic_and_connected() {
        for seed in 0..30 {
            let a = random_connected_poset(7, seed);
            assert_eq!(a, random_connected_poset(7, seed));
            assert_eq!(a.len(), 7);
        }
        assert_ne!(random_connected_poset(6, 1), random_connected_poset(6, 2));
    }
}
