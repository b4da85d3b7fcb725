//! The Loday-Ronco Hopf algebra `k[Y^∞]`.
//!
//! Trees are the quotient of `k[S^∞]` by the fibers of [`perm_to_tree`]: the
//! product and coproduct of trees are computed on any permutation in the
//! fiber and pushed forward. Both are independent of the representative
//! (checked by [`coproduct_all_representatives`] and in the test suite), and
//! the result keeps fiber multiplicities, e.g. `(1)∗(1)∗(1)` carries the
//! coefficient 2 on `(1)∨(1)`.
//!
//! [`star_shuffle_identity`] is the separate recursive product
//! `t∗t' = t1∨(t2∗t') + (t∗t1')∨t2'`; it agrees with [`star`] up to order 2
//! and counts each tree once from order 3 on.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::lincomb::{map_slot, LinComb, Tensor};
use crate::perm::{coproduct_perm, star_perm, Perm};
use crate::scalar::Scalar;
use crate::tree::{graft, perm_to_tree, tree_to_perms, Tree};

pub type TreeComb<R> = LinComb<Tree, R>;
pub type TreeTensor<R> = LinComb<Tensor<Tree>, R>;

/// Smallest permutation in the fiber of `t`.
pub fn representative(t: &Tree) -> Perm {
    fn rec(t: &Tree) -> Vec<usize> {
        // Left subtree takes the smallest values, so the word is minimal.
        let Some((l, r)) = t.children() else { return Vec::new() };
        let lw = rec(l);
        let shift = l.order();
        let mut w = lw;
        w.push(t.order());
        w.extend(rec(r).into_iter().map(|x| x + shift));
        w
    }
    Perm::new(rec(t)).expect("fiber word is a permutation")
}

/// `(1)^{∗n}`.
pub fn generator_power<R: Scalar>(n: usize) -> TreeComb<R> {
    let mut acc = TreeComb::basis(Tree::Leaf);
    let one = TreeComb::basis(Tree::generator());
    for _ in 0..n {
        acc = star(&acc, &one);
    }
    acc
}

pub fn star_basis<R: Scalar>(t: &Tree, u: &Tree) -> TreeComb<R> {
    star_perm::<R>(&representative(t), &representative(u)).map_basis(perm_to_tree)
}

/// `a ∗ b`.
pub fn star<R: Scalar>(a: &TreeComb<R>, b: &TreeComb<R>) -> TreeComb<R> {
    a.bilinear(b, star_basis)
}

/// The recursion `t∗t' = t1∨(t2∗t') + (t∗t1')∨t2'` with `t∗| = |∗t = t`.
pub fn star_shuffle_identity<R: Scalar>(a: &TreeComb<R>, b: &TreeComb<R>) -> TreeComb<R> {
    fn rec<R: Scalar>(t: &Tree, u: &Tree) -> TreeComb<R> {
        let (Some((t1, t2)), Some((u1, u2))) = (t.children(), u.children()) else {
            return TreeComb::basis(if t.is_leaf() { u.clone() } else { t.clone() });
        };
        let left = rec::<R>(t2, u).map_basis(|x| graft(t1, x));
        let right = rec::<R>(t, u1).map_basis(|x| graft(x, u2));
        left + right
    }
    a.bilinear(b, rec)
}

pub fn coproduct_basis<R: Scalar>(t: &Tree) -> TreeTensor<R> {
    coproduct_perm::<R>(&representative(t))
        .map_basis(|tens| Tensor(tens.0.iter().map(perm_to_tree).collect()))
}

/// `Δa`.
pub fn coproduct<R: Scalar>(a: &TreeComb<R>) -> TreeTensor<R> {
    a.flat_map(coproduct_basis)
}

/// Coproduct of `t` through every permutation in its fiber; `Err` carries
/// the first representative that disagrees.
pub fn coproduct_all_representatives<R: Scalar>(t: &Tree) -> Result<TreeTensor<R>, Perm> {
    let expected = coproduct_basis::<R>(t);
    for sigma in tree_to_perms(t) {
        let got: TreeTensor<R> =
            coproduct_perm::<R>(&sigma).map_basis(|tens| Tensor(tens.0.iter().map(perm_to_tree).collect()));
        if got != expected {
            return Err(sigma);
        }
    }
    Ok(expected)
}

/// `Δ'a = Δa − 1⊗a − a⊗1`, with `Δ'1 = 0`.
pub fn reduced_coproduct<R: Scalar>(a: &TreeComb<R>) -> TreeTensor<R> {
    a.flat_map(|t| {
        if t.is_leaf() {
            return TreeTensor::zero();
        }
        let mut d = coproduct_basis::<R>(t);
        d.add_term(Tensor::pair(Tree::Leaf, t.clone()), -R::one());
        d.add_term(Tensor::pair(t.clone(), Tree::Leaf), -R::one());
        d
    })
}

/// `Δ'^{(k)} = (Δ' ⊗ Id) Δ'^{(k-1)}`, landing in `k+1` tensor factors.
pub fn iterated_reduced<R: Scalar>(a: &TreeComb<R>, k: usize) -> TreeTensor<R> {
    assert!(k >= 1, "iteration count starts at 1");
    let mut acc = reduced_coproduct(a);
    for _ in 1..k {
        acc = map_slot(&acc, 0, |t| reduced_coproduct(&TreeComb::basis(t.clone())));
    }
    acc
}

pub fn is_primitive<R: Scalar>(a: &TreeComb<R>) -> bool {
    reduced_coproduct(a).is_zero()
}

/// `ε(a)`: the coefficient of `|`.
pub fn counit<R: Scalar>(a: &TreeComb<R>) -> R {
    a.coeff(&Tree::Leaf)
}

fn antipode_cache() -> &'static Mutex<HashMap<Tree, TreeComb<i64>>> {
    static CACHE: OnceLock<Mutex<HashMap<Tree, TreeComb<i64>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `S(t) = −t − Σ S(t') ∗ t''` over the reduced coproduct `Δ't = Σ t'⊗t''`.
///
/// Structure constants are integers; they are computed once per tree and
/// cached.
pub fn antipode_basis(t: &Tree) -> TreeComb<i64> {
    if let Some(hit) = antipode_cache().lock().expect("cache lock").get(t) {
        return hit.clone();
    }
    let value = if t.is_leaf() {
        TreeComb::basis(Tree::Leaf)
    } else {
        let mut acc = TreeComb::term(t.clone(), -1);
        for (tens, c) in reduced_coproduct::<i64>(&TreeComb::basis(t.clone())).iter() {
            let s = antipode_basis(&tens.0[0]);
            let prod = star(&s, &TreeComb::basis(tens.0[1].clone()));
            acc.add_scaled(&prod, &-*c);
        }
        acc
    };
    antipode_cache().lock().expect("cache lock").insert(t.clone(), value.clone());
    value
}

pub fn antipode<R: Scalar>(a: &TreeComb<R>) -> TreeComb<R> {
    a.flat_map(|t| antipode_basis(t).convert(|&c| R::from_int(c)))
}

/// `m ∘ (f ⊗ g) ∘ Δ` applied to `a`.
pub fn convolve<R: Scalar>(
    a: &TreeComb<R>,
    f: impl Fn(&TreeComb<R>) -> TreeComb<R>,
    g: impl Fn(&TreeComb<R>) -> TreeComb<R>,
) -> TreeComb<R> {
    coproduct(a).flat_map(|tens| {
        star(
            &f(&TreeComb::basis(tens.0[0].clone())),
            &g(&TreeComb::basis(tens.0[1].clone())),
        )
    })
}

/// Componentwise product on `Tree ⊗ Tree`.
pub fn star_tensor<R: Scalar>(a: &TreeTensor<R>, b: &TreeTensor<R>) -> TreeTensor<R> {
    a.bilinear(b, |x, y| {
        let left = star_basis::<R>(&x.0[0], &y.0[0]);
        let right = star_basis::<R>(&x.0[1], &y.0[1]);
        crate::lincomb::tensor(&left, &right)
    })
}
