//! Rooted, planar, weighted planar and decorated trees, with the coefficient
//! functions used by the series solvers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::error::{invalid, Result};
use crate::scalar::Q;

/// Rooted tree with labeled leaves. Each vertex carries the leaf labels
/// attached directly to it and its child vertices; arity of a vertex counts
/// both.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RTree {
    pub leaves: Vec<usize>,
    pub children: Vec<RTree>,
}

impl RTree {
    pub fn corolla(labels: Vec<usize>) -> Self {
        RTree { leaves: labels, children: Vec::new() }
    }

    pub fn vertex_arity(&self) -> usize {
        self.leaves.len() + self.children.len()
    }

    pub fn arity(&self) -> usize {
        self.leaves.len() + self.children.iter().map(RTree::arity).sum::<usize>()
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.children.iter().map(RTree::vertex_count).sum::<usize>()
    }

    pub fn labels(&self) -> Vec<usize> {
        let mut out = self.leaves.clone();
        for c in &self.children {
            out.extend(c.labels());
        }
        out.sort_unstable();
        out
    }

    pub fn is_reduced(&self) -> bool {
        self.vertex_arity() >= 2 && self.children.iter().all(RTree::is_reduced)
    }

    /// Canonical encoding: leaves sorted, children sorted by encoding.
    pub fn encode(&self) -> String {
        let mut leaves = self.leaves.clone();
        leaves.sort_unstable();
        let mut kids: Vec<String> = self.children.iter().map(RTree::encode).collect();
        kids.sort();
        let leaves: Vec<String> = leaves.iter().map(usize::to_string).collect();
        format!("({};{})", leaves.join(","), kids.concat())
    }

    pub fn canonical(&self) -> RTree {
        let mut leaves = self.leaves.clone();
        leaves.sort_unstable();
        let mut children: Vec<RTree> = self.children.iter().map(RTree::canonical).collect();
        children.sort_by_key(RTree::encode);
        RTree { leaves, children }
    }

    pub fn to_json(&self) -> Value {
        json!([self.leaves, self.children.iter().map(RTree::to_json).collect::<Vec<_>>()])
    }
}

/// All set partitions of `items` into nonempty blocks, blocks ordered by
/// their first element.
pub fn set_partitions<T: Clone>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    index_partitions(items.len())
        .into_iter()
        .map(|p| p.into_iter().map(|b| b.into_iter().map(|i| items[i].clone()).collect()).collect())
        .collect()
}

fn subsets(items: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    (0u64..1 << items.len())
        .map(|mask| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (i, &x) in items.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    a.push(x);
                } else {
                    b.push(x);
                }
            }
            (a, b)
        })
        .collect()
}

/// Ordered set partitions of the index range, blocks ordered by minimum.
pub fn index_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            go(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        go(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

fn rooted_on(labels: &[usize], reduced: bool, max_vertices: usize) -> Vec<RTree> {
    if max_vertices == 0 || labels.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (leaves, rest) in subsets(labels) {
        let rest_parts: Vec<Vec<Vec<usize>>> = if rest.is_empty() { vec![Vec::new()] } else { set_partitions(&rest) };
        for blocks in rest_parts {
            let arity = leaves.len() + blocks.len();
            if arity < if reduced { 2 } else { 1 } {
                continue;
            }
            // distribute the remaining vertex budget over the blocks
            let mut partial: Vec<(Vec<RTree>, usize)> = vec![(Vec::new(), 1)];
            for block in &blocks {
                let mut next = Vec::new();
                for (kids, used) in &partial {
                    for t in rooted_on(block, reduced, max_vertices - used) {
                        let used = used + t.vertex_count();
                        if used <= max_vertices {
                            let mut kids = kids.clone();
                            kids.push(t);
                            next.push((kids, used));
                        }
                    }
                }
                partial = next;
            }
            for (children, _) in partial {
                out.push(RTree { leaves: leaves.clone(), children });
            }
        }
    }
    out
}

/// Isomorphism classes of rooted trees of arity `n` with labeled leaves.
/// Reduced trees have all vertices of arity at least 2; otherwise unary
/// vertices are allowed and trees are capped at `2n - 1` vertices.
pub fn enumerate_rooted(n: usize, reduced: bool) -> Result<Vec<RTree>> {
    if n == 0 {
        return invalid("arity must be positive");
    }
    let labels: Vec<usize> = (0..n).collect();
    let mut trees: Vec<RTree> = rooted_on(&labels, reduced, 2 * n - 1).iter().map(RTree::canonical).collect();
    trees.sort_by_key(RTree::encode);
    trees.dedup();
    Ok(trees)
}

/// One input slot of a planar vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PSlot {
    Leaf,
    Node(PTree),
}

/// Planar rooted tree: a vertex with ordered input slots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PTree {
    pub slots: Vec<PSlot>,
}

impl PTree {
    pub fn corolla(n: usize) -> Self {
        PTree { slots: vec![PSlot::Leaf; n] }
    }

    pub fn arity(&self) -> usize {
        self.slots
            .iter()
            .map(|s| match s {
                PSlot::Leaf => 1,
                PSlot::Node(t) => t.arity(),
            })
            .sum()
    }

    pub fn vertex_count(&self) -> usize {
        1 + self
            .slots
            .iter()
            .map(|s| match s {
                PSlot::Leaf => 0,
                PSlot::Node(t) => t.vertex_count(),
            })
            .sum::<usize>()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.slots
                .iter()
                .map(|s| match s {
                    PSlot::Leaf => Value::Null,
                    PSlot::Node(t) => t.to_json(),
                })
                .collect(),
        )
    }
}

/// Planar trees with exactly `n` leaves, vertices of arity at least
/// `min_arity` (at least 1) and at most `max_vertices` vertices.
pub fn planar_trees(n: usize, min_arity: usize, max_vertices: usize) -> Vec<PTree> {
    let mut memo = BTreeMap::new();
    planar_memo(n, min_arity.max(1), max_vertices, &mut memo)
}

fn planar_memo(
    n: usize,
    min_arity: usize,
    max_vertices: usize,
    memo: &mut BTreeMap<(usize, usize), Vec<PTree>>,
) -> Vec<PTree> {
    if n == 0 || max_vertices == 0 {
        return Vec::new();
    }
    if let Some(v) = memo.get(&(n, max_vertices)) {
        return v.clone();
    }
    let mut out = Vec::new();
    for comp in compositions(n) {
        if comp.len() < min_arity {
            continue;
        }
        // each part is a bare leaf (size 1) or a subtree
        let mut partial: Vec<(Vec<PSlot>, usize)> = vec![(Vec::new(), 1)];
        for &part in &comp {
            let mut next = Vec::new();
            for (slots, used) in &partial {
                if part == 1 {
                    let mut s = slots.clone();
                    s.push(PSlot::Leaf);
                    next.push((s, *used));
                }
                for t in planar_memo(part, min_arity, max_vertices - used, memo) {
                    let used = used + t.vertex_count();
                    if used <= max_vertices {
                        let mut s = slots.clone();
                        s.push(PSlot::Node(t));
                        next.push((s, used));
                    }
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(|(slots, _)| PTree { slots }));
    }
    memo.insert((n, max_vertices), out.clone());
    out
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (1..=n)
        .flat_map(|first| {
            compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Planar trees of arity `n`. Reduced trees have vertices of arity at least
/// 2; otherwise unary vertices are allowed up to `2n - 1` vertices.
pub fn enumerate_planar(n: usize, reduced: bool) -> Result<Vec<PTree>> {
    if n == 0 {
        return invalid("arity must be positive");
    }
    Ok(planar_trees(n, if reduced { 2 } else { 1 }, 2 * n - 1))
}

/// Weighted planar tree. Empty slots pass the initial value through.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WPTree {
    Empty,
    Node { weight: u32, children: Vec<WPTree> },
}

impl WPTree {
    pub fn corolla(arity: usize, weight: u32) -> Self {
        WPTree::Node { weight, children: vec![WPTree::Empty; arity] }
    }

    /// Total weight `W`.
    pub fn total_weight(&self) -> u32 {
        match self {
            WPTree::Empty => 0,
            WPTree::Node { weight, children } => weight + children.iter().map(WPTree::total_weight).sum::<u32>(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            WPTree::Empty => Value::Null,
            WPTree::Node { weight, children } => {
                json!([weight, children.iter().map(WPTree::to_json).collect::<Vec<_>>()])
            }
        }
    }

    /// Grafts `other` into the `slot`-th empty leaf (depth first, left to
    /// right). Returns `None` when there are fewer empty leaves.
    pub fn graft(&self, slot: usize, other: &WPTree) -> Option<WPTree> {
        let mut counter = slot;
        let out = graft_at(self, &mut counter, other);
        (counter == usize::MAX).then_some(out)
    }

    pub fn empty_leaves(&self) -> usize {
        match self {
            WPTree::Empty => 1,
            WPTree::Node { children, .. } => children.iter().map(WPTree::empty_leaves).sum(),
        }
    }
}

fn graft_at(t: &WPTree, counter: &mut usize, other: &WPTree) -> WPTree {
    match t {
        WPTree::Empty => {
            if *counter == 0 {
                *counter = usize::MAX;
                return other.clone();
            }
            if *counter != usize::MAX {
                *counter -= 1;
            }
            WPTree::Empty
        }
        WPTree::Node { weight, children } => WPTree::Node {
            weight: *weight,
            children: children.iter().map(|c| graft_at(c, counter, other)).collect(),
        },
    }
}

pub fn coeff_w(t: &WPTree) -> u32 {
    t.total_weight()
}

/// `F(∅) = 1`, `F(τ) = W(τ) ∏ F(τ_i)`.
pub fn coeff_f(t: &WPTree) -> BigInt {
    match t {
        WPTree::Empty => BigInt::one(),
        WPTree::Node { children, .. } => {
            children.iter().fold(BigInt::from(t.total_weight()), |acc, c| acc * coeff_f(c))
        }
    }
}

/// All weighted planar trees of total weight at most `cap` whose vertices use
/// only the allowed `(arity, weight)` pairs. Ordered by weight, then shape.
pub fn enumerate_wptrees(cap: u32, allowed: &[(usize, u32)]) -> Vec<WPTree> {
    let allowed: BTreeSet<(usize, u32)> = allowed.iter().copied().filter(|&(_, w)| w >= 1).collect();
    let mut by_weight: Vec<Vec<WPTree>> = vec![vec![WPTree::Empty]];
    for w in 1..=cap {
        let mut level = Vec::new();
        for &(arity, vw) in &allowed {
            if vw > w {
                continue;
            }
            for weights in weight_splits(w - vw, arity) {
                let mut partial: Vec<Vec<WPTree>> = vec![Vec::new()];
                for &cw in &weights {
                    partial = partial
                        .into_iter()
                        .flat_map(|kids| {
                            by_weight[cw as usize].iter().map(move |t| {
                                let mut k = kids.clone();
                                k.push(t.clone());
                                k
                            })
                        })
                        .collect();
                }
                level.extend(partial.into_iter().map(|children| WPTree::Node { weight: vw, children }));
            }
        }
        by_weight.push(level);
    }
    by_weight.into_iter().flatten().collect()
}

/// Ordered tuples of `k` nonnegative integers summing to `total`.
fn weight_splits(total: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..=total)
        .flat_map(|first| {
            weight_splits(total - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Planar tree whose leaves are black or white and whose vertices carry a
/// planar decoration of matching arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DecTree {
    White,
    Black,
    Vertex { deco: PTree, children: Vec<DecTree> },
}

impl DecTree {
    pub fn validate(&self) -> Result<()> {
        match self {
            DecTree::White | DecTree::Black => Ok(()),
            DecTree::Vertex { deco, children } => {
                if children.is_empty() {
                    return invalid("decorated tree vertex of arity 0");
                }
                if deco.arity() != children.len() {
                    return invalid("decoration arity differs from vertex arity");
                }
                if !min_arity_at_least(deco, 1) {
                    return invalid("decoration has a vertex of arity 0");
                }
                children.iter().try_for_each(DecTree::validate)
            }
        }
    }

    /// Leaves of the tree plus vertices of all decorations.
    pub fn weight(&self) -> usize {
        match self {
            DecTree::White | DecTree::Black => 1,
            DecTree::Vertex { deco, children } => {
                deco.vertex_count() + children.iter().map(DecTree::weight).sum::<usize>()
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            DecTree::White => json!("white"),
            DecTree::Black => json!("black"),
            DecTree::Vertex { deco, children } => {
                json!([deco.to_json(), children.iter().map(DecTree::to_json).collect::<Vec<_>>()])
            }
        }
    }
}

fn min_arity_at_least(t: &PTree, k: usize) -> bool {
    t.slots.len() >= k
        && t.slots.iter().all(|s| match s {
            PSlot::Leaf => true,
            PSlot::Node(c) => min_arity_at_least(c, k),
        })
}

/// The decoration with a 0-corolla grafted at each leaf fed by an inner
/// vertex or a black leaf; all vertices weight 1.
pub fn tau_bar(deco: &PTree, children: &[DecTree]) -> WPTree {
    let mut next = 0;
    bar_rec(deco, children, &mut next)
}

fn bar_rec(t: &PTree, children: &[DecTree], next: &mut usize) -> WPTree {
    WPTree::Node {
        weight: 1,
        children: t
            .slots
            .iter()
            .map(|s| match s {
                PSlot::Leaf => {
                    let c = &children[*next];
                    *next += 1;
                    match c {
                        DecTree::White => WPTree::Empty,
                        _ => WPTree::corolla(0, 1),
                    }
                }
                PSlot::Node(sub) => bar_rec(sub, children, next),
            })
            .collect(),
    }
}

/// `G(T) = ∏_v -1/F(τ̄_v)`.
pub fn coeff_g(t: &DecTree) -> Result<Q> {
    if matches!(t, DecTree::White | DecTree::Black) {
        return invalid("a decorated tree has at least one vertex");
    }
    t.validate()?;
    Ok(g_rec(t))
}

fn g_rec(t: &DecTree) -> Q {
    match t {
        DecTree::White | DecTree::Black => Q::one(),
        DecTree::Vertex { deco, children } => {
            let f = coeff_f(&tau_bar(deco, children));
            children.iter().fold(-Q::new(BigInt::one(), f), |acc, c| acc * g_rec(c))
        }
    }
}

/// All decorated trees with at least one vertex and weight at most `cap`.
pub fn enumerate_dectrees(cap: usize) -> Vec<DecTree> {
    let mut by_weight: Vec<Vec<DecTree>> = vec![Vec::new(), vec![DecTree::White, DecTree::Black]];
    for w in 2..=cap {
        let mut level = Vec::new();
        // a decoration with a vertices and k leaves needs k children of weight >= 1
        for k in 1..w {
            for deco in planar_trees(k, 1, w - k) {
                let a = deco.vertex_count();
                if a + k > w {
                    continue;
                }
                for weights in weight_splits((w - a - k) as u32, k) {
                    let mut partial: Vec<Vec<DecTree>> = vec![Vec::new()];
                    for &cw in &weights {
                        let pool = &by_weight[cw as usize + 1];
                        partial = partial
                            .into_iter()
                            .flat_map(|kids| {
                                pool.iter().map(move |t| {
                                    let mut k = kids.clone();
                                    k.push(t.clone());
                                    k
                                })
                            })
                            .collect();
                    }
                    level.extend(partial.into_iter().map(|children| DecTree::Vertex { deco: deco.clone(), children }));
                }
            }
        }
        by_weight.push(level);
    }
    by_weight.into_iter().flatten().filter(|t| matches!(t, DecTree::Vertex { .. })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, q};
    use num_traits::Zero;
    use std::collections::HashSet;

    /// Brute force: every parent function on `k` vertices with vertex 0 as
    /// root, every assignment of labels to vertices, filtered and quotiented.
    fn brute_force_rooted(n: usize, reduced: bool, max_vertices: usize) -> HashSet<String> {
        let mut out = HashSet::new();
        for k in 1..=max_vertices {
            let parent_choices: Vec<Vec<usize>> = (1..k).map(|v| (0..v).collect()).collect();
            let mut parents = vec![Vec::new()];
            for choices in &parent_choices {
                parents = parents
                    .into_iter()
                    .flat_map(|p: Vec<usize>| {
                        choices.iter().map(move |&c| {
                            let mut p = p.clone();
                            p.push(c);
                            p
                        })
                    })
                    .collect();
            }
            for parent in parents {
                let mut assign = vec![0usize; n];
                loop {
                    let mut leaves = vec![Vec::new(); k];
                    for (label, &v) in assign.iter().enumerate() {
                        leaves[v].push(label);
                    }
                    let mut kids = vec![Vec::new(); k];
                    for (v, &p) in parent.iter().enumerate() {
                        kids[p].push(v + 1);
                    }
                    let min = if reduced { 2 } else { 1 };
                    if (0..k).all(|v| leaves[v].len() + kids[v].len() >= min) {
                        fn build(v: usize, leaves: &[Vec<usize>], kids: &[Vec<usize>]) -> RTree {
                            RTree {
                                leaves: leaves[v].clone(),
                                children: kids[v].iter().map(|&c| build(c, leaves, kids)).collect(),
                            }
                        }
                        out.insert(build(0, &leaves, &kids).encode());
                    }
                    let mut i = 0;
                    loop {
                        if i == n {
                            break;
                        }
                        assign[i] += 1;
                        if assign[i] < k {
                            break;
                        }
                        assign[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn rooted_counts() {
        assert_eq!(enumerate_rooted(2, true).unwrap().len(), 1);
        assert!(enumerate_rooted(1, true).unwrap().is_empty());
        assert!(enumerate_rooted(0, true).is_err());
        for n in 2..=4 {
            let trees = enumerate_rooted(n, true).unwrap();
            let oracle = brute_force_rooted(n, true, n - 1);
            let ours: HashSet<String> = trees.iter().map(RTree::encode).collect();
            assert_eq!(ours.len(), trees.len(), "duplicates at n={n}");
            assert_eq!(ours, oracle, "n={n}");
        }
        assert_eq!(enumerate_rooted(3, true).unwrap().len(), 4);
        assert_eq!(enumerate_rooted(4, true).unwrap().len(), 26);
    }

    #[test]
    fn unreduced_rooted_matches_brute_force() {
        for n in 1..=3 {
            let ours: HashSet<String> = enumerate_rooted(n, false).unwrap().iter().map(RTree::encode).collect();
            assert_eq!(ours, brute_force_rooted(n, false, 2 * n - 1), "n={n}");
        }
    }

    #[test]
    fn enumeration_is_stable() {
        assert_eq!(enumerate_rooted(4, true).unwrap(), enumerate_rooted(4, true).unwrap());
    }

    fn schroeder_oracle(n: usize) -> usize {
        // reduced planar trees: root of arity k >= 2 over a composition of n
        fn count(n: usize, memo: &mut Vec<Option<usize>>) -> usize {
            if n == 1 {
                return 1;
            }
            if let Some(c) = memo[n] {
                return c;
            }
            let mut total = 0;
            for comp in compositions(n) {
                if comp.len() >= 2 {
                    total += comp.iter().map(|&p| count(p, memo)).product::<usize>();
                }
            }
            memo[n] = Some(total);
            total
        }
        count(n, &mut vec![None; n + 1])
    }

    #[test]
    fn planar_counts() {
        assert_eq!(enumerate_planar(2, true).unwrap().len(), 1);
        assert_eq!(enumerate_planar(3, true).unwrap().len(), 3);
        for n in 2..=5 {
            let trees = enumerate_planar(n, true).unwrap();
            assert_eq!(trees.len(), schroeder_oracle(n));
            let set: HashSet<_> = trees.iter().collect();
            assert_eq!(set.len(), trees.len());
            assert!(trees.iter().all(|t| t.arity() == n));
        }
        assert_eq!(schroeder_oracle(4), 11);
    }

    #[test]
    fn f_coefficients() {
        assert_eq!(coeff_f(&WPTree::Empty), BigInt::one());
        assert_eq!(coeff_f(&WPTree::corolla(3, 4)), BigInt::from(4));
        let mut ladder = WPTree::Empty;
        for n in 1..=6u32 {
            ladder = WPTree::Node { weight: 1, children: vec![ladder] };
            assert_eq!(coeff_f(&ladder), crate::scalar::factorial(n as usize));
            assert_eq!(coeff_w(&ladder), n);
        }
    }

    #[test]
    fn wptree_enumeration() {
        assert_eq!(enumerate_wptrees(0, &[(2, 1)]), vec![WPTree::Empty]);
        let trees = enumerate_wptrees(2, &[(2, 1)]);
        let c2 = WPTree::corolla(2, 1);
        let expected: HashSet<WPTree> = [
            WPTree::Empty,
            c2.clone(),
            WPTree::Node { weight: 1, children: vec![c2.clone(), WPTree::Empty] },
            WPTree::Node { weight: 1, children: vec![WPTree::Empty, c2.clone()] },
        ]
        .into_iter()
        .collect();
        assert_eq!(trees.len(), 4);
        assert_eq!(trees.into_iter().collect::<HashSet<_>>(), expected);
        assert_eq!(enumerate_wptrees(1, &[(0, 1)]), vec![WPTree::Empty, WPTree::corolla(0, 1)]);
    }

    #[test]
    fn binary_tree_coefficients_sum_to_one() {
        let trees = enumerate_wptrees(5, &[(2, 1)]);
        for k in 0..=5 {
            let s = trees
                .iter()
                .filter(|t| t.total_weight() == k)
                .fold(Q::zero(), |acc, t| acc + Q::new(BigInt::one(), coeff_f(t)));
            assert_eq!(s, q(1), "weight {k}");
        }
    }

    #[test]
    fn grafting() {
        let c2 = WPTree::corolla(2, 1);
        assert_eq!(WPTree::Empty.graft(0, &c2), Some(c2.clone()));
        let left = c2.graft(0, &c2).unwrap();
        assert_eq!(left, WPTree::Node { weight: 1, children: vec![c2.clone(), WPTree::Empty] });
        assert_eq!(c2.graft(0, &WPTree::Empty), Some(c2.clone()));
        assert_eq!(c2.graft(2, &c2), None);
        // associativity: (a ∘_0 b) ∘_0 c = a ∘_0 (b ∘_0 c)
        let c1 = WPTree::corolla(1, 2);
        let lhs = c2.graft(0, &c1).unwrap().graft(0, &c2).unwrap();
        let rhs = c2.graft(0, &c1.graft(0, &c2).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn g_coefficients() {
        let single = DecTree::Vertex { deco: PTree::corolla(1), children: vec![DecTree::White] };
        assert_eq!(coeff_g(&single).unwrap(), q(-1));
        let black2 = DecTree::Vertex { deco: PTree::corolla(2), children: vec![DecTree::Black, DecTree::Black] };
        assert_eq!(coeff_g(&black2).unwrap(), frac(-1, 3));
        let two = DecTree::Vertex { deco: PTree::corolla(1), children: vec![black2.clone()] };
        // outer vertex: c_1 with a 0-corolla grafted, F = 2
        assert_eq!(coeff_g(&two).unwrap(), frac(-1, 2) * frac(-1, 3));
        let bad = DecTree::Vertex { deco: PTree::corolla(2), children: vec![DecTree::White] };
        assert!(coeff_g(&bad).is_err());
        assert!(coeff_g(&DecTree::White).is_err());
    }

    #[test]
    fn dectree_enumeration_weights() {
        let trees = enumerate_dectrees(3);
        assert!(trees.iter().all(|t| t.weight() <= 3 && t.validate().is_ok()));
        // weight 2: c_1 decoration over one leaf of either colour
        assert_eq!(trees.iter().filter(|t| t.weight() == 2).count(), 2);
        let set: HashSet<_> = trees.iter().collect();
        assert_eq!(set.len(), trees.len());
    }

    #[test]
    fn set_partitions_count_bell_numbers() {
        assert_eq!(index_partitions(4).len(), 15);
        assert_eq!(index_partitions(0).len(), 1);
        assert_eq!(set_partitions(&[1, 2, 3]).len(), 5);
    }
}
