//! Definitional (slow) versions of the combinatorics in `poset`, computed
//! from maximal chains and an explicit list of cycles.

use crate::error::Result;
use crate::poset::{enumerate_cycles, Elem, Pair, PairClassPartition, Poset, UnionFind};

/// All maximal chains, each listed bottom to top.
pub fn maximal_chains(p: &Poset) -> Vec<Vec<Elem>> {
    fn extend(p: &Poset, chain: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        let top = *chain.last().unwrap();
        let ups: Vec<Elem> = (0..p.len()).filter(|&v| p.is_cover(top, v)).collect();
        if ups.is_empty() {
            out.push(chain.clone());
        }
        for v in ups {
            chain.push(v);
            extend(p, chain, out);
            chain.pop();
        }
    }
    let mut out = Vec::new();
    for m in (0..p.len()).filter(|&x| p.is_min(x)) {
        extend(p, &mut vec![m], &mut out);
    }
    out
}

/// Pairs `(x, y)` such that `x < y` is a maximal chain and no cycle passes
/// through both `x` and `y`.
pub fn extreme_pairs_by_cycles(p: &Poset, cycle_cap: usize) -> Result<Vec<Pair>> {
    let cycles = enumerate_cycles(p, cycle_cap)?;
    let mut out: Vec<Pair> = maximal_chains(p)
        .into_iter()
        .filter(|c| c.len() == 2)
        .map(|c| (c[0], c[1]))
        .filter(|&(x, y)| {
            !cycles
                .iter()
                .any(|w| w.vertices().contains(&x) && w.vertices().contains(&y))
        })
        .collect();
    out.sort_by_key(|&(x, y)| p.pair_index(x, y));
    Ok(out)
}

/// Identifies strict pairs lying in a common maximal chain and the edges of
/// every cycle.
pub fn pair_classes_by_cycles(p: &Poset, cycle_cap: usize) -> Result<PairClassPartition> {
    let strict: Vec<Pair> = p.strict_pairs().collect();
    let pos = |e: Pair| strict.iter().position(|&s| s == e).unwrap();
    let mut uf = UnionFind::new(strict.len());
    for chain in maximal_chains(p) {
        let mut first = None;
        for i in 0..chain.len() {
            for j in i + 1..chain.len() {
                let k = pos((chain[i], chain[j]));
                match first {
                    None => first = Some(k),
                    Some(f) => uf.union(f, k),
                }
            }
        }
    }
    for w in enumerate_cycles(p, cycle_cap)? {
        let edges: Vec<usize> = w
            .edges()
            .map(|(a, b)| if p.lt(a, b) { pos((a, b)) } else { pos((b, a)) })
            .collect();
        for e in edges.windows(2) {
            uf.union(e[0], e[1]);
        }
    }
    let blocks = uf
        .groups(strict.len())
        .into_iter()
        .map(|g| g.into_iter().map(|i| strict[i]).collect())
        .collect();
    Ok(PairClassPartition::from_blocks(p, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::connected_posets;
    use crate::poset::{extreme_pairs, pair_classes, DEFAULT_CYCLE_CAP};

    #[test]
    fn agrees_with_block_based_versions_on_small_catalog() {
        for n in 2..=5 {
            for p in connected_posets(n) {
                assert_eq!(extreme_pairs_by_cycles(&p, DEFAULT_CYCLE_CAP).unwrap(), extreme_pairs(&p));
                assert_eq!(pair_classes_by_cycles(&p, DEFAULT_CYCLE_CAP).unwrap(), pair_classes(&p));
            }
        }
    }

    #[test]
    fn maximal_chains_of_n_poset() {
        let p = Poset::new(&["1", "2", "3", "4"], &[("1", "3"), ("2", "3"), ("2", "4")]).unwrap();
        assert_eq!(maximal_chains(&p), vec![vec![0, 2], vec![1, 2], vec![1, 3]]);
    }
}
