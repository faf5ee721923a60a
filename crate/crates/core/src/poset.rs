//! Finite connected posets and the cover-graph combinatorics the algebra needs.
//!
//! Elements are addressed by their index in declaration order. Every set or
//! list returned here is sorted by that order, so downstream matrices and
//! reports are reproducible.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Index of an element in canonical (declaration) order.
pub type Elem = usize;

/// A comparable pair `x <= y`, as element indices.
pub type Pair = (Elem, Elem);

pub const DEFAULT_CYCLE_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    index: BTreeMap<String, Elem>,
    leq: Vec<Vec<bool>>,
    covers: Vec<Pair>,
    neighbors: Vec<Vec<Elem>>,
    pairs: Vec<Pair>,
    pair_index: Vec<Vec<Option<usize>>>,
    blocks: Vec<Vec<Pair>>,
    block_of: BTreeMap<Pair, usize>,
}

impl Poset {
    /// Builds a poset from its labels and cover pairs `(lower, upper)`.
    ///
    /// The transitive closure is computed and every input pair must be a
    /// cover of it. Disconnected and single-point posets are rejected.
    pub fn new<S: AsRef<str>>(labels: &[S], cover_pairs: &[(S, S)]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let n = labels.len();
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        let mut input = BTreeSet::new();
        for (a, b) in cover_pairs {
            let (x, y) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            if x == y {
                return Err(Error::CycleInOrder(labels[x].clone(), labels[y].clone()));
            }
            input.insert((x, y));
        }

        let mut lt = vec![vec![false; n]; n];
        for &(x, y) in &input {
            lt[x][y] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if lt[i][k] {
                    for j in 0..n {
                        if lt[k][j] {
                            lt[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                if lt[i][j] && lt[j][i] {
                    return Err(Error::CycleInOrder(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        for &(x, y) in &input {
            if (0..n).any(|z| lt[x][z] && lt[z][y]) {
                return Err(Error::RedundantCover(labels[x].clone(), labels[y].clone()));
            }
        }
        let covers: Vec<Pair> = input.into_iter().collect();

        let mut neighbors = vec![Vec::new(); n];
        for &(x, y) in &covers {
            neighbors[x].push(y);
            neighbors[y].push(x);
        }
        for adj in &mut neighbors {
            adj.sort_unstable();
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &neighbors[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::NotConnected);
        }

        let mut leq = lt;
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        let mut pairs = Vec::new();
        let mut pair_index = vec![vec![None; n]; n];
        for x in 0..n {
            for y in 0..n {
                if leq[x][y] {
                    pair_index[x][y] = Some(pairs.len());
                    pairs.push((x, y));
                }
            }
        }

        let mut blocks: Vec<Vec<Pair>> = biconnected_blocks(n, &neighbors)
            .into_iter()
            .map(|b| {
                let mut b: Vec<Pair> = b
                    .into_iter()
                    .map(|(a, c)| if leq[a][c] { (a, c) } else { (c, a) })
                    .collect();
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        let mut block_of = BTreeMap::new();
        for (b, edges) in blocks.iter().enumerate() {
            for &e in edges {
                block_of.insert(e, b);
            }
        }

        Ok(Poset {
            labels,
            index,
            leq,
            covers,
            neighbors,
            pairs,
            pair_index,
            blocks,
            block_of,
        })
    }

    /// Parses the line-oriented text format: `elements: a b c` followed by
    /// one `a < b` cover pair per line. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels: Option<Vec<String>> = None;
        let mut covers = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| Error::Parse {
                line: lineno + 1,
                message: message.to_string(),
            };
            match &labels {
                None => {
                    let rest = line
                        .strip_prefix("elements:")
                        .ok_or_else(|| err("expected `elements: ...`"))?;
                    labels = Some(rest.split_whitespace().map(String::from).collect());
                }
                Some(_) => {
                    let (a, b) = line.split_once('<').ok_or_else(|| err("expected `a < b`"))?;
                    let (a, b) = (a.trim(), b.trim());
                    if a.is_empty() || b.is_empty() || a.contains(char::is_whitespace) || b.contains(char::is_whitespace) {
                        return Err(err("expected `a < b`"));
                    }
                    covers.push((a.to_string(), b.to_string()));
                }
            }
        }
        let labels = labels.ok_or(Error::Parse {
            line: 0,
            message: "missing `elements:` line".into(),
        })?;
        Poset::new(&labels, &covers)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("elements: {}\n", self.labels.join(" "));
        for &(x, y) in &self.covers {
            out.push_str(&format!("{} < {}\n", self.labels[x], self.labels[y]));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: Elem) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Result<Elem> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.leq[x][y]
    }

    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        x != y && self.leq[x][y]
    }

    pub fn comparable(&self, x: Elem, y: Elem) -> bool {
        self.leq[x][y] || self.leq[y][x]
    }

    pub fn is_cover(&self, x: Elem, y: Elem) -> bool {
        self.covers.binary_search(&(x, y)).is_ok()
    }

    pub fn covers(&self) -> &[Pair] {
        &self.covers
    }

    /// Neighbors in the undirected cover graph, sorted.
    pub fn neighbors(&self, x: Elem) -> &[Elem] {
        &self.neighbors[x]
    }

    /// All comparable pairs `x <= y`: the basis of the incidence algebra.
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn pair_index(&self, x: Elem, y: Elem) -> Option<usize> {
        self.pair_index[x][y]
    }

    pub fn strict_pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.pairs.iter().copied().filter(|&(x, y)| x != y)
    }

    pub fn is_min(&self, x: Elem) -> bool {
        (0..self.len()).all(|z| !self.lt(z, x))
    }

    pub fn is_max(&self, x: Elem) -> bool {
        (0..self.len()).all(|z| !self.lt(x, z))
    }

    /// `(Min(X), Max(X))`.
    pub fn min_max(&self) -> (Vec<Elem>, Vec<Elem>) {
        let min = (0..self.len()).filter(|&x| self.is_min(x)).collect();
        let max = (0..self.len()).filter(|&x| self.is_max(x)).collect();
        (min, max)
    }

    /// Pairs `x < y` with `x` minimal and `y` maximal. Their `e_xy` span the
    /// center of the commutator subalgebra.
    pub fn min_max_pairs(&self) -> Vec<Pair> {
        self.strict_pairs()
            .filter(|&(x, y)| self.is_min(x) && self.is_max(y))
            .collect()
    }

    pub fn is_bridge(&self, x: Elem, y: Elem) -> bool {
        self.block_of
            .get(&(x, y))
            .is_some_and(|&b| self.blocks[b].len() == 1)
    }

    pub fn fmt_pair(&self, (x, y): Pair) -> String {
        format!("({},{})", self.labels[x], self.labels[y])
    }

    pub fn fmt_set(&self, elems: &[Elem]) -> String {
        let items: Vec<&str> = elems.iter().map(|&e| self.label(e)).collect();
        format!("{{{}}}", items.join(","))
    }
}

/// Biconnected components of the cover graph, as sets of cover pairs.
fn biconnected_blocks(n: usize, neighbors: &[Vec<Elem>]) -> Vec<Vec<Pair>> {
    struct State<'a> {
        neighbors: &'a [Vec<Elem>],
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<Pair>,
        blocks: Vec<Vec<Pair>>,
    }

    fn visit(s: &mut State, u: Elem, parent: Option<Elem>) {
        s.time += 1;
        s.disc[u] = s.time;
        s.low[u] = s.time;
        for i in 0..s.neighbors[u].len() {
            let w = s.neighbors[u][i];
            if Some(w) == parent {
                continue;
            }
            if s.disc[w] == 0 {
                s.stack.push((u, w));
                visit(s, w, Some(u));
                s.low[u] = s.low[u].min(s.low[w]);
                if s.low[w] >= s.disc[u] {
                    let mut block = Vec::new();
                    while let Some(e) = s.stack.pop() {
                        block.push(e);
                        if e == (u, w) {
                            break;
                        }
                    }
                    s.blocks.push(block);
                }
            } else if s.disc[w] < s.disc[u] {
                s.stack.push((u, w));
                s.low[u] = s.low[u].min(s.disc[w]);
            }
        }
    }

    let mut s = State {
        neighbors,
        disc: vec![0; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        blocks: Vec::new(),
    };
    for u in 0..n {
        if s.disc[u] == 0 {
            visit(&mut s, u, None);
        }
    }
    s.blocks
}

/// A walk in the cover graph: consecutive vertices form a cover pair in one
/// direction or the other.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    vertices: Vec<Elem>,
}

impl Walk {
    pub fn new(p: &Poset, vertices: Vec<Elem>) -> Result<Self> {
        if vertices.is_empty() || vertices.iter().any(|&v| v >= p.len()) {
            return Err(Error::InvalidWalk(format!("{vertices:?}")));
        }
        for w in vertices.windows(2) {
            if !(p.is_cover(w[0], w[1]) || p.is_cover(w[1], w[0])) {
                return Err(Error::InvalidWalk(format!(
                    "{} -- {} is not a cover edge",
                    p.label(w[0]),
                    p.label(w[1])
                )));
            }
        }
        Ok(Walk { vertices })
    }

    /// The walk of length zero at `v`.
    pub fn trivial(v: Elem) -> Self {
        Walk { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[Elem] {
        &self.vertices
    }

    pub fn start(&self) -> Elem {
        self.vertices[0]
    }

    pub fn end(&self) -> Elem {
        *self.vertices.last().unwrap()
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ordered edges `(u_i, u_{i+1})`.
    pub fn edges(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    pub fn is_cycle(&self) -> bool {
        if !self.is_closed() || self.len() < 4 {
            return false;
        }
        let inner = &self.vertices[..self.len()];
        let distinct: BTreeSet<_> = inner.iter().collect();
        distinct.len() == inner.len()
    }

    /// `self * other`; `None` when the walks are not composable.
    pub fn compose(&self, other: &Walk) -> Option<Walk> {
        if self.end() != other.start() {
            return None;
        }
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        Some(Walk { vertices })
    }

    pub fn inverse(&self) -> Walk {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Walk { vertices }
    }

    pub fn display(&self, p: &Poset) -> String {
        let labels: Vec<&str> = self.vertices.iter().map(|&v| p.label(v)).collect();
        labels.join(",")
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Shortest walk from `u` to `v`, breadth-first with neighbors visited in
/// canonical order.
pub fn walk_between(p: &Poset, u: Elem, v: Elem) -> Walk {
    let mut parent = vec![usize::MAX; p.len()];
    parent[u] = u;
    let mut queue = VecDeque::from([u]);
    while let Some(a) = queue.pop_front() {
        if a == v {
            break;
        }
        for &b in p.neighbors(a) {
            if parent[b] == usize::MAX {
                parent[b] = a;
                queue.push_back(b);
            }
        }
    }
    let mut vertices = vec![v];
    let mut cur = v;
    while cur != u {
        cur = parent[cur];
        vertices.push(cur);
    }
    vertices.reverse();
    Walk { vertices }
}

/// A random walk from `u` to `v`: up to `wander` random steps, a detour
/// through a random waypoint, then a shortest walk to `v`.
pub fn random_walk<R: Rng + ?Sized>(p: &Poset, u: Elem, v: Elem, wander: usize, rng: &mut R) -> Walk {
    let mut vertices = vec![u];
    let mut cur = u;
    for _ in 0..rng.gen_range(0..=wander) {
        let adj = p.neighbors(cur);
        cur = adj[rng.gen_range(0..adj.len())];
        vertices.push(cur);
    }
    let waypoint = rng.gen_range(0..p.len());
    let tail = walk_between(p, cur, waypoint).compose(&walk_between(p, waypoint, v)).unwrap();
    vertices.extend_from_slice(&tail.vertices[1..]);
    Walk { vertices }
}

/// All simple cycles of the cover graph, one per rotation/reflection class.
///
/// Exponential in general; meant as a test oracle on small posets.
pub fn enumerate_cycles(p: &Poset, cap: usize) -> Result<Vec<Walk>> {
    fn dfs(p: &Poset, start: Elem, path: &mut Vec<Elem>, on_path: &mut [bool], out: &mut Vec<Walk>, cap: usize) -> Result<()> {
        let cur = *path.last().unwrap();
        for &w in p.neighbors(cur) {
            if w == start && path.len() >= 3 && path[1] < path[path.len() - 1] {
                if out.len() == cap {
                    return Err(Error::CapExceeded(cap));
                }
                let mut vertices = path.clone();
                vertices.push(start);
                out.push(Walk { vertices });
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(p, start, path, on_path, out, cap)?;
                path.pop();
                on_path[w] = false;
            }
        }
        Ok(())
    }

    let mut out = Vec::new();
    let mut on_path = vec![false; p.len()];
    for start in 0..p.len() {
        let mut path = vec![start];
        on_path[start] = true;
        dfs(p, start, &mut path, &mut on_path, &mut out, cap)?;
        on_path[start] = false;
    }
    Ok(out)
}

/// Biconnected blocks of the cover graph and its bridges, as cover pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub blocks: Vec<Vec<Pair>>,
    pub bridges: Vec<Pair>,
}

pub fn blocks_and_bridges(p: &Poset) -> BlockDecomposition {
    let blocks = p.blocks.clone();
    let mut bridges: Vec<Pair> = blocks.iter().filter(|b| b.len() == 1).map(|b| b[0]).collect();
    bridges.sort_unstable();
    BlockDecomposition { blocks, bridges }
}

/// Partition of the strict pairs `x < y` into the classes on which a
/// `sigma` constant on chains and cycles must be constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairClassPartition {
    classes: Vec<Vec<Pair>>,
    class_of: BTreeMap<Pair, usize>,
}

impl PairClassPartition {
    /// Builds a partition from arbitrary blocks; classes are sorted by
    /// their smallest member.
    pub fn from_blocks(p: &Poset, blocks: Vec<Vec<Pair>>) -> Self {
        let key = |e: &Pair| p.pair_index(e.0, e.1).unwrap();
        let mut classes: Vec<Vec<Pair>> = blocks
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|mut b| {
                b.sort_by_key(key);
                b
            })
            .collect();
        classes.sort_by_key(|b| key(&b[0]));
        let mut class_of = BTreeMap::new();
        for (i, c) in classes.iter().enumerate() {
            for &e in c {
                class_of.insert(e, i);
            }
        }
        PairClassPartition { classes, class_of }
    }

    pub fn classes(&self) -> &[Vec<Pair>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, pair: Pair) -> Option<usize> {
        self.class_of.get(&pair).copied()
    }

    /// Smallest member of each class.
    pub fn representatives(&self) -> Vec<Pair> {
        self.classes.iter().map(|c| c[0]).collect()
    }
}

/// Disjoint-set forest over `0..n`.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    pub(crate) fn groups(&mut self, n: usize) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = self.find(i);
            by_root.entry(r).or_default().push(i);
        }
        by_root.into_values().collect()
    }
}

/// Identifies strict pairs lying in a common chain.
pub(crate) fn chain_union(p: &Poset, strict: &[Pair], uf: &mut UnionFind) {
    for i in 0..strict.len() {
        for j in i + 1..strict.len() {
            let (x, y) = strict[i];
            let (u, v) = strict[j];
            let pts = [x, y, u, v];
            let chain = pts.iter().all(|&a| pts.iter().all(|&b| p.comparable(a, b)));
            if chain {
                uf.union(i, j);
            }
        }
    }
}

/// Finest partition of `X^2_<` identifying pairs on a common chain and
/// cover pairs in a common non-bridge block of the cover graph.
pub fn pair_classes(p: &Poset) -> PairClassPartition {
    let strict: Vec<Pair> = p.strict_pairs().collect();
    let pos: BTreeMap<Pair, usize> = strict.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut uf = UnionFind::new(strict.len());
    chain_union(p, &strict, &mut uf);
    for block in blocks_and_bridges(p).blocks.iter().filter(|b| b.len() > 1) {
        for w in block.windows(2) {
            uf.union(pos[&w[0]], pos[&w[1]]);
        }
    }
    let blocks = uf
        .groups(strict.len())
        .into_iter()
        .map(|g| g.into_iter().map(|i| strict[i]).collect())
        .collect();
    PairClassPartition::from_blocks(p, blocks)
}

/// `X^2_e`: cover pairs from a minimal to a maximal element that are
/// bridges of the cover graph, i.e. lie on no cycle.
pub fn extreme_pairs(p: &Poset) -> Vec<Pair> {
    p.covers()
        .iter()
        .copied()
        .filter(|&(x, y)| p.is_min(x) && p.is_max(y) && p.is_bridge(x, y))
        .collect()
}

pub fn is_extreme(p: &Poset, (x, y): Pair) -> bool {
    p.is_cover(x, y) && p.is_min(x) && p.is_max(y) && p.is_bridge(x, y)
}

/// Sign of an extreme pair relative to a base point, and the side `V_xy`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremeSide {
    pub pair: Pair,
    /// `+1` when `u0` lies on the side of `x`, `-1` on the side of `y`.
    pub sign: i8,
    /// Elements on the opposite side of the bridge from `u0`, sorted.
    pub vset: Vec<Elem>,
}

pub fn sign_and_vset(p: &Poset, u0: Elem, pair: Pair) -> Result<ExtremeSide> {
    if !is_extreme(p, pair) {
        return Err(Error::NotExtreme(p.label(pair.0).into(), p.label(pair.1).into()));
    }
    let (x, y) = pair;
    let mut seen = vec![false; p.len()];
    seen[u0] = true;
    let mut queue = VecDeque::from([u0]);
    while let Some(a) = queue.pop_front() {
        for &b in p.neighbors(a) {
            let removed = (a, b) == (x, y) || (a, b) == (y, x);
            if !removed && !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    let sign = if seen[x] { 1 } else { -1 };
    let vset = (0..p.len()).filter(|&v| !seen[v]).collect();
    Ok(ExtremeSide { pair, sign, vset })
}

/// `sign_and_vset` for every extreme pair.
pub fn extreme_sides(p: &Poset, u0: Elem) -> Vec<ExtremeSide> {
    extreme_pairs(p)
        .into_iter()
        .map(|e| sign_and_vset(p, u0, e).expect("extreme by construction"))
        .collect()
}
