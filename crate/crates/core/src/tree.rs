//! Planar binary trees, grafting, and the map from permutations to trees.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::AlgebraError;
use crate::perm::Perm;

/// A planar binary tree: the bare edge `|`, or the grafting `l ∨ r`.
///
/// Leaves are numbered `0..=order` from left to right. Subtrees are shared,
/// so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Tree {
    Leaf,
    Node(Arc<Branch>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    left: Tree,
    right: Tree,
    order: usize,
}

impl Tree {
    /// The generator `(1) = | ∨ |`.
    pub fn generator() -> Tree {
        graft(&Tree::Leaf, &Tree::Leaf)
    }

    /// Number of internal vertices.
    pub fn order(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::Node(b) => b.order,
        }
    }

    pub fn leaves(&self) -> usize {
        self.order() + 1
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf)
    }

    /// `(left, right)` for a node, `None` for the bare edge.
    pub fn children(&self) -> Option<(&Tree, &Tree)> {
        match self {
            Tree::Leaf => None,
            Tree::Node(b) => Some((&b.left, &b.right)),
        }
    }

    /// Reflection through the vertical axis of the root.
    pub fn mirror(&self) -> Tree {
        match self.children() {
            None => Tree::Leaf,
            Some((l, r)) => graft(&r.mirror(), &l.mirror()),
        }
    }

    /// The tree of a permutation given by its digits, e.g. `Tree::of_perm_str("132")`.
    pub fn of_perm_str(s: &str) -> Result<Tree, AlgebraError> {
        let images = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| AlgebraError::NotAPermutation(vec![])))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(perm_to_tree(&Perm::new(images)?))
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| match (self, other) {
            (Tree::Node(a), Tree::Node(b)) => a.left.cmp(&b.left).then_with(|| a.right.cmp(&b.right)),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.children() {
            None => write!(f, "|"),
            Some((l, r)) => write!(f, "({l},{r})"),
        }
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `t1 ∨ t2`.
pub fn graft(t1: &Tree, t2: &Tree) -> Tree {
    Tree::Node(Arc::new(Branch {
        left: t1.clone(),
        right: t2.clone(),
        order: t1.order() + t2.order() + 1,
    }))
}

/// Inverse of [`graft`].
pub fn ungraft(t: &Tree) -> Result<(Tree, Tree), AlgebraError> {
    t.children()
        .map(|(l, r)| (l.clone(), r.clone()))
        .ok_or(AlgebraError::UngraftLeaf)
}

/// Split at the position of the largest letter and recurse on the
/// standardized left and right parts.
pub fn perm_to_tree(sigma: &Perm) -> Tree {
    tree_of_word(sigma.images())
}

fn tree_of_word(word: &[usize]) -> Tree {
    let Some((pos, _)) = word.iter().enumerate().max_by_key(|(_, &x)| x) else {
        return Tree::Leaf;
    };
    graft(&tree_of_word(&word[..pos]), &tree_of_word(&word[pos + 1..]))
}

/// All permutations whose tree is `t`, in increasing order.
///
/// The largest value sits at the root position; the left subtree receives any
/// `|t1|`-subset of the remaining values arranged as a word of its own fiber.
pub fn tree_to_perms(t: &Tree) -> Vec<Perm> {
    let mut out: Vec<Perm> = fiber_words(t).into_iter().map(Perm::from_images_unchecked).collect();
    out.sort();
    out
}

fn fiber_words(t: &Tree) -> Vec<Vec<usize>> {
    let Some((l, r)) = t.children() else {
        return vec![Vec::new()];
    };
    let n = t.order();
    let left_words = fiber_words(l);
    let right_words = fiber_words(r);
    let mut out = Vec::new();
    for subset in subsets(n - 1, l.order()) {
        let complement: Vec<usize> = (1..n).filter(|x| !subset.contains(x)).collect();
        for lw in &left_words {
            for rw in &right_words {
                let mut w: Vec<usize> = lw.iter().map(|&x| subset[x - 1]).collect();
                w.push(n);
                w.extend(rw.iter().map(|&x| complement[x - 1]));
                out.push(w);
            }
        }
    }
    out
}

/// Increasing `k`-subsets of `1..=n`.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            if n + 1 - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All planar binary trees of order `n`, sorted.
pub fn enumerate_trees(n: usize) -> Vec<Tree> {
    let mut memo: HashMap<usize, Vec<Tree>> = HashMap::new();
    enumerate_memo(n, &mut memo)
}

fn enumerate_memo(n: usize, memo: &mut HashMap<usize, Vec<Tree>>) -> Vec<Tree> {
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let out = if n == 0 {
        vec![Tree::Leaf]
    } else {
        let mut out = Vec::new();
        for p in 0..n {
            let lefts = enumerate_memo(p, memo);
            let rights = enumerate_memo(n - 1 - p, memo);
            for l in &lefts {
                for r in &rights {
                    out.push(graft(l, r));
                }
            }
        }
        out.sort();
        out
    };
    memo.insert(n, out.clone());
    out
}

/// `(2n)! / (n! (n+1)!)`.
pub fn catalan(n: usize) -> BigUint {
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for k in 2..=n {
        num *= BigUint::from(n + k);
        den *= BigUint::from(k);
    }
    num / den
}
