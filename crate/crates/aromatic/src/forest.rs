//! Aromatic forests and their canonical encoding.
//!
//! An aromatic forest is a finite directed graph in which every node has at
//! most one outgoing edge.  Nodes without an outgoing edge are *roots* and are
//! numbered `1..=n`; every connected component is therefore either a rooted
//! tree (hanging from one of the numbered roots) or an *aroma*: a tree-decorated
//! directed cycle.  Nodes are either plain vertices or *covertices* carrying
//! the labels `1..=p`, each label used exactly once.
//!
//! Two encodings coexist here.  [`RawForest`] is an index-based successor map,
//! convenient for graph surgery (grafting, unplugging, relabelling).
//! [`Forest`] is the canonical nested value produced by
//! [`RawForest::canonicalize`]: children are sorted, each cycle is rotated to
//! its lexicographically minimal phase, and aromas are sorted, so structural
//! equality of `Forest` values coincides with isomorphism of the underlying
//! graphs (preserving root numbers and covertex labels).

use std::collections::{BTreeMap, BTreeSet};

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Default cap on the node count accepted by the enumeration routines.
pub const DEFAULT_MAX_ORDER: usize = 7;

/// Global order capacity.  Read once from `AROMATIC_MAX_ORDER`; defaults to
/// [`DEFAULT_MAX_ORDER`].
pub fn max_order_bound() -> usize {
    static BOUND: Lazy<usize> = Lazy::new(|| {
        std::env::var("AROMATIC_MAX_ORDER")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_MAX_ORDER)
    });
    *BOUND
}

pub(crate) fn check_capacity(order: usize) -> Result<()> {
    let bound = max_order_bound();
    if order > bound {
        Err(Error::Capacity { requested: order, bound })
    } else {
        Ok(())
    }
}

/// Colour of a node: a plain vertex, or a covertex carrying a 1-based label.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NodeKind {
    Vertex,
    Covertex(u32),
}

/// Bigrading of a forest (and of the forms built from them): number of
/// ordered roots, number of labelled covertices, total node count.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Grade {
    pub roots: usize,
    pub covertices: usize,
    pub order: usize,
}

impl Grade {
    pub fn new(roots: usize, covertices: usize, order: usize) -> Self {
        Grade { roots, covertices, order }
    }
}

/// Canonical rooted tree: a node kind plus the sorted list of subtrees that
/// point at it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Tree {
    kind: NodeKind,
    children: Vec<Tree>,
}

impl Tree {
    /// A single node with no predecessors.
    pub fn leaf(kind: NodeKind) -> Self {
        Tree { kind, children: Vec::new() }
    }

    /// Canonical tree from a kind and arbitrary-order children.
    pub fn node(kind: NodeKind, mut children: Vec<Tree>) -> Self {
        children.sort();
        Tree { kind, children }
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn order(&self) -> usize {
        1 + self.children.iter().map(Tree::order).sum::<usize>()
    }

    fn count_covertices(&self) -> usize {
        let own = matches!(self.kind, NodeKind::Covertex(_)) as usize;
        own + self.children.iter().map(Tree::count_covertices).sum::<usize>()
    }
}

/// Canonical aroma: the trees hanging off a directed cycle, listed in cycle
/// order (the cycle edge leaves `cycle[i]`'s base node towards
/// `cycle[(i+1) % len]`'s base node) and rotated to the lexicographically
/// minimal phase.  Rotations are identified; reflections are not.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Aroma {
    cycle: Vec<Tree>,
}

impl Aroma {
    /// Canonical aroma from a cycle sequence in successor order.
    pub fn new(cycle: Vec<Tree>) -> Self {
        assert!(!cycle.is_empty(), "an aroma has at least one node");
        Aroma { cycle: minimal_rotation(cycle) }
    }

    pub fn cycle(&self) -> &[Tree] {
        &self.cycle
    }

    pub fn order(&self) -> usize {
        self.cycle.iter().map(Tree::order).sum()
    }
}

fn minimal_rotation(seq: Vec<Tree>) -> Vec<Tree> {
    let n = seq.len();
    let mut best: Option<Vec<Tree>> = None;
    for shift in 0..n {
        let rot: Vec<Tree> = (0..n).map(|k| seq[(shift + k) % n].clone()).collect();
        if best.as_ref().is_none_or(|b| rot < *b) {
            best = Some(rot);
        }
    }
    best.unwrap_or(seq)
}

/// Canonical aromatic forest: a sorted multiset of aromas and the ordered
/// list of root trees (`roots[k]` carries root number `k + 1`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Forest {
    aromas: Vec<Aroma>,
    roots: Vec<Tree>,
}

impl Forest {
    /// Canonical forest from parts (aromas get sorted; roots keep their order).
    pub fn new(mut aromas: Vec<Aroma>, roots: Vec<Tree>) -> Self {
        aromas.sort();
        Forest { aromas, roots }
    }

    /// The one-node forest `*`: a single rooted vertex.
    pub fn single_vertex() -> Self {
        Forest { aromas: Vec::new(), roots: vec![Tree::leaf(NodeKind::Vertex)] }
    }

    pub fn aromas(&self) -> &[Aroma] {
        &self.aromas
    }

    pub fn roots(&self) -> &[Tree] {
        &self.roots
    }

    pub fn order(&self) -> usize {
        self.aromas.iter().map(Aroma::order).sum::<usize>()
            + self.roots.iter().map(Tree::order).sum::<usize>()
    }

    pub fn grade(&self) -> Grade {
        let covertices = self
            .aromas
            .iter()
            .flat_map(|a| a.cycle.iter())
            .chain(self.roots.iter())
            .map(Tree::count_covertices)
            .sum();
        Grade { roots: self.roots.len(), covertices, order: self.order() }
    }

    /// Flatten into the index-based encoding (inverse of `canonicalize` up to
    /// node renumbering).
    pub fn to_raw(&self) -> RawForest {
        let mut raw = RawForest::default();
        for aroma in &self.aromas {
            let bases: Vec<usize> =
                aroma.cycle.iter().map(|t| add_tree(&mut raw, t, None)).collect();
            let len = bases.len();
            for (i, &b) in bases.iter().enumerate() {
                raw.succ[b] = Some(bases[(i + 1) % len]);
            }
        }
        for tree in &self.roots {
            let r = add_tree(&mut raw, tree, None);
            raw.roots.push(r);
        }
        raw
    }
}

fn add_tree(raw: &mut RawForest, tree: &Tree, succ: Option<usize>) -> usize {
    let idx = raw.kinds.len();
    raw.kinds.push(tree.kind);
    raw.succ.push(succ);
    for child in &tree.children {
        add_tree(raw, child, Some(idx));
    }
    idx
}

/// Mutable successor-map encoding used for graph surgery.
///
/// `succ[v]` is the head of `v`'s unique outgoing edge (`None` for roots);
/// `roots` lists the rootless nodes in root-number order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawForest {
    pub kinds: Vec<NodeKind>,
    pub succ: Vec<Option<usize>>,
    pub roots: Vec<usize>,
}

impl RawForest {
    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    /// Indices of the nodes whose successor is `target`.
    pub fn predecessors(&self, target: usize) -> Vec<usize> {
        (0..self.node_count()).filter(|&w| self.succ[w] == Some(target)).collect()
    }

    /// Append a disjoint copy of `other`; returns the index offset its nodes
    /// received.  `other`'s roots are *not* added to `self.roots`.
    pub fn absorb(&mut self, other: &RawForest) -> usize {
        let offset = self.node_count();
        self.kinds.extend_from_slice(&other.kinds);
        self.succ.extend(other.succ.iter().map(|s| s.map(|v| v + offset)));
        offset
    }

    fn validate(&self) -> Result<()> {
        if self.succ.len() != self.kinds.len() {
            return Err(Error::Structure(format!(
                "{} kinds vs {} successor entries",
                self.kinds.len(),
                self.succ.len()
            )));
        }
        let n = self.node_count();
        for (v, s) in self.succ.iter().enumerate() {
            if let Some(t) = s {
                if *t >= n {
                    return Err(Error::Structure(format!(
                        "node {v} points at {t}, but there are only {n} nodes"
                    )));
                }
            }
        }
        let mut seen = vec![false; n];
        for &r in &self.roots {
            if r >= n {
                return Err(Error::Structure(format!("root index {r} out of bounds")));
            }
            if self.succ[r].is_some() {
                return Err(Error::Structure(format!("root {r} has an outgoing edge")));
            }
            if seen[r] {
                return Err(Error::Structure(format!("node {r} listed as a root twice")));
            }
            seen[r] = true;
        }
        for (v, (s, numbered)) in self.succ.iter().zip(&seen).enumerate() {
            if s.is_none() && !numbered {
                return Err(Error::Structure(format!(
                    "node {v} has no outgoing edge but no root number"
                )));
            }
        }
        // Covertex labels must be exactly 1..=p, each once.
        let mut labels: Vec<u32> = self
            .kinds
            .iter()
            .filter_map(|k| match k {
                NodeKind::Covertex(l) => Some(*l),
                NodeKind::Vertex => None,
            })
            .collect();
        labels.sort_unstable();
        for (i, l) in labels.iter().enumerate() {
            if *l as usize != i + 1 {
                return Err(Error::Structure(format!(
                    "covertex labels {labels:?} are not 1..={}",
                    labels.len()
                )));
            }
        }
        Ok(())
    }

    /// Marks the nodes lying on a directed cycle.
    fn cycle_nodes(&self) -> Vec<bool> {
        let n = self.node_count();
        let mut on_cycle = vec![false; n];
        for (start, flag) in on_cycle.iter_mut().enumerate() {
            let mut v = start;
            for _ in 0..n {
                match self.succ[v] {
                    Some(next) => {
                        v = next;
                        if v == start {
                            *flag = true;
                            break;
                        }
                    }
                    None => break,
                }
            }
        }
        on_cycle
    }

    /// Canonical value of this graph.  Fails on malformed structures
    /// (dangling indices, root bookkeeping out of sync, bad covertex labels).
    pub fn canonicalize(&self) -> Result<Forest> {
        self.validate()?;
        let n = self.node_count();
        let cyclic = self.cycle_nodes();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            if let Some(t) = self.succ[v] {
                preds[t].push(v);
            }
        }

        fn tree_at(v: usize, raw: &RawForest, preds: &[Vec<usize>], cyclic: &[bool]) -> Tree {
            let children: Vec<Tree> = preds[v]
                .iter()
                .copied()
                // skip the in-cycle predecessor: that edge belongs to the cycle
                .filter(|&w| !(cyclic[w] && raw.succ[w] == Some(v)))
                .map(|w| tree_at(w, raw, preds, cyclic))
                .collect();
            Tree::node(raw.kinds[v], children)
        }

        let mut visited = vec![false; n];
        let mut aromas = Vec::new();
        for v in 0..n {
            if cyclic[v] && !visited[v] {
                let mut cycle_seq = Vec::new();
                let mut w = v;
                loop {
                    visited[w] = true;
                    cycle_seq.push(tree_at(w, self, &preds, &cyclic));
                    w = self.succ[w].expect("cycle nodes have successors");
                    if w == v {
                        break;
                    }
                }
                aromas.push(Aroma::new(cycle_seq));
            }
        }
        let roots: Vec<Tree> =
            self.roots.iter().map(|&r| tree_at(r, self, &preds, &cyclic)).collect();
        Ok(Forest::new(aromas, roots))
    }
}

/// Parity of a permutation given in one-line notation over `1..=n`
/// (`perm[i]` is the image of `i + 1`).  `1` for even, `-1` for odd.
pub fn permutation_sign(perm: &[usize]) -> Result<i8> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &img in perm {
        if img == 0 || img > n || seen[img - 1] {
            return Err(Error::Domain(format!("{perm:?} is not a permutation of 1..={n}")));
        }
        seen[img - 1] = true;
    }
    let mut inversions = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    Ok(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

/// Relabels roots by `root_perm` and covertices by `cov_perm` (both one-line
/// notation over `1..=n` resp. `1..=p`), recanonicalizes, and returns the
/// joint signature of the two permutations.
pub fn permute(forest: &Forest, root_perm: &[usize], cov_perm: &[usize]) -> Result<(Forest, i8)> {
    let grade = forest.grade();
    if root_perm.len() != grade.roots {
        return Err(Error::Grade(format!(
            "root permutation on {} symbols applied to a forest with {} roots",
            root_perm.len(),
            grade.roots
        )));
    }
    if cov_perm.len() != grade.covertices {
        return Err(Error::Grade(format!(
            "covertex permutation on {} symbols applied to a forest with {} covertices",
            cov_perm.len(),
            grade.covertices
        )));
    }
    let sign = permutation_sign(root_perm)? * permutation_sign(cov_perm)?;
    let mut raw = forest.to_raw();
    for kind in raw.kinds.iter_mut() {
        if let NodeKind::Covertex(l) = kind {
            *l = cov_perm[*l as usize - 1] as u32;
        }
    }
    let old_roots = raw.roots.clone();
    for (i, &r) in old_roots.iter().enumerate() {
        raw.roots[root_perm[i] - 1] = r;
    }
    Ok((raw.canonicalize()?, sign))
}

/// All permutations of `1..=n` in one-line notation, lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.remove(i);
            cur.push(v);
            rec(remaining, cur, out);
            cur.pop();
            remaining.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Sorted canonical vertex-only trees with exactly `order` nodes, for every
/// order up to `max`: `table[k]` lists the trees of order `k`.
fn vertex_trees_up_to(max: usize) -> Vec<Vec<Tree>> {
    let mut table: Vec<Vec<Tree>> = vec![Vec::new(); max + 1];
    if max == 0 {
        return table;
    }
    table[1] = vec![Tree::leaf(NodeKind::Vertex)];
    for k in 2..=max {
        // a tree of order k = a root vertex + a multiset of smaller trees
        // totalling k - 1 nodes
        let pool: Vec<Tree> = table[1..k].iter().flatten().cloned().collect();
        let mut out = BTreeSet::new();
        for children in multisets_totalling(&pool, k - 1) {
            out.insert(Tree::node(NodeKind::Vertex, children));
        }
        table[k] = out.into_iter().collect();
    }
    table
}

/// Multisets drawn from `pool` (assumed sorted) whose orders sum to `total`.
fn multisets_totalling(pool: &[Tree], total: usize) -> Vec<Vec<Tree>> {
    fn rec(
        pool: &[Tree],
        start: usize,
        remaining: usize,
        cur: &mut Vec<Tree>,
        out: &mut Vec<Vec<Tree>>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            let sz = pool[i].order();
            if sz <= remaining {
                cur.push(pool[i].clone());
                rec(pool, i, remaining - sz, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(pool, 0, total, &mut Vec::new(), &mut out);
    out
}

/// Sorted canonical vertex-only aromas of exactly `order` nodes.
fn vertex_aromas(order: usize, trees: &[Vec<Tree>]) -> Vec<Aroma> {
    let mut out = BTreeSet::new();
    let mut seq: Vec<Tree> = Vec::new();
    fn rec(order_left: usize, seq: &mut Vec<Tree>, trees: &[Vec<Tree>], out: &mut BTreeSet<Aroma>) {
        if order_left == 0 {
            if !seq.is_empty() {
                out.insert(Aroma::new(seq.clone()));
            }
            return;
        }
        for sz in 1..=order_left {
            for t in &trees[sz] {
                seq.push(t.clone());
                rec(order_left - sz, seq, trees, out);
                seq.pop();
            }
        }
    }
    rec(order, &mut seq, trees, &mut out);
    out.into_iter().collect()
}

/// Canonical covertex-free forests with `roots` numbered roots and `order`
/// nodes in total.
fn enumerate_shapes(roots: usize, order: usize) -> Vec<Forest> {
    if order < roots {
        return Vec::new();
    }
    let trees = vertex_trees_up_to(order);
    // aromas of every order we might need, flattened into one sorted pool
    let aroma_pool: Vec<Aroma> =
        (1..=order.saturating_sub(roots)).flat_map(|m| vertex_aromas(m, &trees)).collect();
    let mut out = BTreeSet::new();

    fn aroma_multisets(
        pool: &[Aroma],
        start: usize,
        remaining: usize,
        cur: &mut Vec<Aroma>,
        out: &mut Vec<Vec<Aroma>>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            let sz = pool[i].order();
            if sz <= remaining {
                cur.push(pool[i].clone());
                aroma_multisets(pool, i, remaining - sz, cur, out);
                cur.pop();
            }
        }
    }

    fn root_tuples(
        count: usize,
        total: usize,
        trees: &[Vec<Tree>],
        cur: &mut Vec<Tree>,
        out: &mut Vec<Vec<Tree>>,
    ) {
        if count == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let min_rest = count - 1; // each remaining root needs >= 1 node
        for sz in 1..=total.saturating_sub(min_rest) {
            for t in &trees[sz] {
                cur.push(t.clone());
                root_tuples(count - 1, total - sz, trees, cur, out);
                cur.pop();
            }
        }
    }

    for aroma_total in 0..=(order - roots) {
        let mut amss = Vec::new();
        aroma_multisets(&aroma_pool, 0, aroma_total, &mut Vec::new(), &mut amss);
        let mut rts = Vec::new();
        root_tuples(roots, order - aroma_total, &trees, &mut Vec::new(), &mut rts);
        for ams in &amss {
            if ams.iter().map(Aroma::order).sum::<usize>() != aroma_total {
                continue;
            }
            for rt in &rts {
                out.insert(Forest::new(ams.clone(), rt.clone()));
            }
        }
    }
    out.into_iter().collect()
}

/// Ordered tuples of `count` distinct values drawn from `0..n`.
fn injections(count: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(count: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == count {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(count, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if count <= n {
        rec(count, n, &mut Vec::new(), &mut out);
    }
    out
}

/// All canonical forests of the given grade, sorted.  Deterministic; bounded
/// by the global order capacity.
pub fn enumerate_forests(grade: Grade) -> Result<Vec<Forest>> {
    check_capacity(grade.order)?;
    let shapes = enumerate_shapes(grade.roots, grade.order);
    if grade.covertices == 0 {
        return Ok(shapes);
    }
    if grade.covertices > grade.order {
        return Ok(Vec::new());
    }
    let mut out = BTreeSet::new();
    for shape in shapes {
        let raw = shape.to_raw();
        for assignment in injections(grade.covertices, raw.node_count()) {
            let mut relabelled = raw.clone();
            for (label0, &node) in assignment.iter().enumerate() {
                relabelled.kinds[node] = NodeKind::Covertex(label0 as u32 + 1);
            }
            out.insert(relabelled.canonicalize()?);
        }
    }
    Ok(out.into_iter().collect())
}

/// Memoized variant of [`enumerate_forests`] used by the linear-algebra layer;
/// the result is shared behind a static table.
pub(crate) fn enumerate_forests_cached(grade: Grade) -> Result<std::sync::Arc<Vec<Forest>>> {
    use std::sync::{Arc, Mutex};
    static CACHE: Lazy<Mutex<BTreeMap<Grade, Arc<Vec<Forest>>>>> =
        Lazy::new(|| Mutex::new(BTreeMap::new()));
    let mut cache = CACHE.lock().expect("enumeration cache poisoned");
    if let Some(hit) = cache.get(&grade) {
        return Ok(hit.clone());
    }
    let computed = Arc::new(enumerate_forests(grade)?);
    cache.insert(grade, computed.clone());
    Ok(computed)
}
