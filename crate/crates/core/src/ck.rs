//! Planar rooted forests and their map into planar binary trees.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::hopf::{generator_power, TreeComb};
use crate::lincomb::LinComb;
use crate::tree::{graft, Tree};

/// A planar rooted tree: a root with an ordered list of subtrees.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RootedTree {
    pub children: Vec<RootedTree>,
}

/// An ordered sequence of planar rooted trees.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Forest(pub Vec<RootedTree>);

pub type ForestComb<R> = LinComb<Forest, R>;

impl RootedTree {
    pub fn vertex() -> Self {
        RootedTree::default()
    }

    pub fn with_children(children: Vec<RootedTree>) -> Self {
        RootedTree { children }
    }

    /// A path with `n ≥ 1` vertices.
    pub fn ladder(n: usize) -> Self {
        (1..n).fold(RootedTree::vertex(), |acc, _| RootedTree::with_children(vec![acc]))
    }

    pub fn vertices(&self) -> usize {
        1 + self.children.iter().map(RootedTree::vertices).sum::<usize>()
    }
}

impl Forest {
    pub fn empty() -> Self {
        Forest(Vec::new())
    }

    pub fn vertices(&self) -> usize {
        self.0.iter().map(RootedTree::vertices).sum()
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "•")?;
        if !self.children.is_empty() {
            write!(f, "[")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `t1 \ t2`: `t2` grafted on the rightmost leaf of `t1`.
pub fn under(t1: &Tree, t2: &Tree) -> Tree {
    match t1.children() {
        None => t2.clone(),
        Some((l, r)) => graft(l, &under(r, t2)),
    }
}

/// `t1 / t2`: `t1` grafted on the leftmost leaf of `t2`.
pub fn over(t1: &Tree, t2: &Tree) -> Tree {
    match t2.children() {
        None => t1.clone(),
        Some((l, r)) => graft(&over(t1, l), r),
    }
}

/// `φ(t1 … tk) = φ(t1) \ … \ φ(tk)` and `φ(t) = φ(children of t) / (1)`.
pub fn phi(forest: &Forest) -> Tree {
    forest
        .0
        .iter()
        .rev()
        .fold(Tree::Leaf, |acc, t| under(&phi_tree(t), &acc))
}

pub fn phi_tree(t: &RootedTree) -> Tree {
    over(&phi(&Forest(t.children.clone())), &Tree::generator())
}

/// All planar rooted trees with `n ≥ 1` vertices.
pub fn enumerate_rooted_trees(n: usize) -> Vec<RootedTree> {
    if n == 0 {
        return Vec::new();
    }
    enumerate_forests(n - 1)
        .into_iter()
        .map(|f| RootedTree::with_children(f.0))
        .collect()
}

/// All planar forests with `n` vertices, sorted.
pub fn enumerate_forests(n: usize) -> Vec<Forest> {
    let mut out = vec![];
    if n == 0 {
        return vec![Forest::empty()];
    }
    for first in 1..=n {
        for head in enumerate_rooted_trees(first) {
            for tail in enumerate_forests(n - first) {
                let mut trees = vec![head.clone()];
                trees.extend(tail.0);
                out.push(Forest(trees));
            }
        }
    }
    out.sort();
    out
}

fn inverse_table(order: usize) -> HashMap<Tree, Forest> {
    static TABLES: OnceLock<Mutex<HashMap<usize, HashMap<Tree, Forest>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    let mut guard = tables.lock().expect("table lock");
    guard
        .entry(order)
        .or_insert_with(|| enumerate_forests(order).into_iter().map(|f| (phi(&f), f)).collect())
        .clone()
}

/// `φ⁻¹` by inverting the table of `φ` on forests of the same size.
pub fn phi_inverse(t: &Tree) -> Option<Forest> {
    inverse_table(t.order()).get(t).cloned()
}

/// One order of `exp(g·(1)) = Σ gⁿ/n! (1)^{∗n}`.
#[derive(Clone, Debug)]
pub struct ExpTerm {
    pub order: usize,
    /// `1/n!`.
    pub factor: BigRational,
    /// `(1)^{∗n}` in the tree basis.
    pub trees: TreeComb<BigRational>,
    /// The same element pulled back termwise to forests, multiplicities kept.
    pub forests: ForestComb<BigRational>,
    /// The forests that occur, each once.
    pub support: Vec<Forest>,
}

/// Orders `1..=max_order` of the exponential of the generator.
pub fn exp_series(max_order: usize) -> Vec<ExpTerm> {
    (1..=max_order)
        .map(|n| {
            let trees = generator_power::<BigRational>(n);
            let forests: ForestComb<BigRational> =
                trees.map_basis(|t| phi_inverse(t).expect("φ is onto each order"));
            let support = forests.basis_elements().cloned().collect();
            let fact: BigInt = (1..=n as u64).map(BigInt::from).product();
            ExpTerm {
                order: n,
                factor: BigRational::new(BigInt::from(1), fact),
                trees,
                forests,
                support,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::tree::enumerate_trees;
    use crate::Q;
    use std::collections::BTreeSet;

    fn t(s: &str) -> Tree {
        Tree::of_perm_str(s).unwrap()
    }

    fn dot() -> RootedTree {
        RootedTree::vertex()
    }

    fn forest(trees: &[RootedTree]) -> Forest {
        Forest(trees.to_vec())
    }

    /// Structural inverse: left subtree holds the first tree's children,
    /// right subtree the remaining trees.
    fn unphi(t: &Tree) -> Forest {
        match t.children() {
            None => Forest::empty(),
            Some((l, r)) => {
                let mut trees = vec![RootedTree::with_children(unphi(l).0)];
                trees.extend(unphi(r).0);
                Forest(trees)
            }
        }
    }

    #[test]
    fn graftings() {
        let one = Tree::generator();
        assert_eq!(under(&one, &one), t("21"));
        assert_eq!(over(&one, &one), t("12"));
        assert_eq!(under(&Tree::Leaf, &t("132")), t("132"));
        assert_eq!(under(&one, &Tree::Leaf), one);
        assert_eq!(over(&t("213"), &Tree::Leaf), t("213"));
        assert_eq!(over(&Tree::Leaf, &t("213")), t("213"));
    }

    #[test]
    fn grafting_associativity() {
        let small: Vec<Tree> = (0..=3).flat_map(enumerate_trees).collect();
        for a in &small {
            for b in &small {
                for c in &small {
                    assert_eq!(under(&under(a, b), c), under(a, &under(b, c)));
                    assert_eq!(over(&over(a, b), c), over(a, &over(b, c)));
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&forest(&[dot()])), Tree::generator());
        assert_eq!(phi(&forest(&[RootedTree::ladder(2)])), t("12"));
        assert_eq!(phi(&forest(&[dot(), dot()])), t("21"));
        assert_eq!(phi(&Forest::empty()), Tree::Leaf);
        assert_eq!(phi(&forest(&[RootedTree::ladder(2), dot()])), t("132"));
    }

    #[test]
    fn phi_is_a_bijection_per_order() {
        for n in 0..=8 {
            let forests = enumerate_forests(n);
            let images: BTreeSet<Tree> = forests.iter().map(phi).collect();
            assert_eq!(images.len(), forests.len(), "injective at {n}");
            assert_eq!(forests.len(), enumerate_trees(n).len(), "Catalan at {n}");
            for f in &forests {
                assert_eq!(phi_inverse(&phi(f)).as_ref(), Some(f));
                assert_eq!(&unphi(&phi(f)), f);
            }
        }
    }

    #[test]
    fn exp_series_low_orders() {
        let s = exp_series(3);
        assert_eq!(s[0].support, vec![forest(&[dot()])]);
        let second: BTreeSet<Forest> = s[1].support.iter().cloned().collect();
        let expect: BTreeSet<Forest> = [forest(&[RootedTree::ladder(2)]), forest(&[dot(), dot()])].into();
        assert_eq!(second, expect);
        assert_eq!(s[1].factor, Q::new(1.into(), 2.into()));
        let cherry = RootedTree::with_children(vec![dot(), dot()]);
        let third: BTreeSet<Forest> = s[2].support.iter().cloned().collect();
        let expect: BTreeSet<Forest> = [
            forest(&[RootedTree::ladder(3)]),
            forest(&[cherry]),
            forest(&[RootedTree::ladder(2), dot()]),
            forest(&[dot(), RootedTree::ladder(2)]),
            forest(&[dot(), dot(), dot()]),
        ]
        .into();
        assert_eq!(third, expect);
        let doubled = forest(&[RootedTree::ladder(2), dot()]);
        assert_eq!(s[2].forests.coeff(&doubled), Q::from_int(2));
    }

    #[test]
    fn rendering() {
        let f = forest(&[RootedTree::with_children(vec![dot(), RootedTree::ladder(2)]), dot()]);
        assert_eq!(f.to_string(), "•[•,•[•]] •");
        assert_eq!(f.vertices(), 5);
    }
}
