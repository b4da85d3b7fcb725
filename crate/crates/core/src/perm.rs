//! Permutations and the Hopf algebra structure on `k[S^∞]`.
//!
//! A permutation of `{1..n}` is stored by its images `(σ(1) … σ(n))` and
//! [`compose`] applies its right argument first.
//!
//! The Hopf structure is the one that descends to planar binary trees along
//! [`perm_to_tree`](crate::tree::perm_to_tree):
//!
//! * `ρ ∗ σ = Σ (ρ×σ)∘α⁻¹` over `(|ρ|,|σ|)`-shuffles `α`, the shifted shuffle
//!   of the two words;
//! * `σ = w∘(σ_i × σ'_{n-i})` with `w` a shuffle, so `σ_i` is the
//!   standardized prefix of length `i` and `σ'` the standardized suffix.
//!
//! Written with the opposite composition order (`α·(ρ×σ)`, `(σ_i×σ')·w⁻¹`)
//! these are the classical formulas on inverse permutations; the convolution
//! and value-splitting pair they would give with `σ` applied first does not
//! respect the tree fibers.

use std::cmp::Ordering;
use std::fmt;

use crate::error::AlgebraError;
use crate::lincomb::{LinComb, Tensor};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    /// Build from one-based images, checking that they form a bijection.
    pub fn new(images: Vec<usize>) -> Result<Self, AlgebraError> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &x in &images {
            if x == 0 || x > n || seen[x] {
                return Err(AlgebraError::NotAPermutation(images));
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Perm::new(images.clone()).is_ok());
        Perm { images }
    }

    pub fn empty() -> Self {
        Perm { images: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Perm { images: (1..=n).collect() }
    }

    pub fn order(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `σ(i)` for one-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.order()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x - 1] = i + 1;
        }
        Perm { images: inv }
    }

    /// The standard permutation of a sequence of distinct integers.
    pub fn standardize(seq: &[usize]) -> Perm {
        let mut idx: Vec<usize> = (0..seq.len()).collect();
        idx.sort_by_key(|&i| seq[i]);
        let mut images = vec![0; seq.len()];
        for (rank, &i) in idx.iter().enumerate() {
            images[i] = rank + 1;
        }
        Perm { images }
    }

    /// All permutations of order `n`, in lexicographic order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n + 1];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Perm>) {
            if cur.len() == n {
                out.push(Perm { images: cur.clone() });
                return;
            }
            for x in 1..=n {
                if !used[x] {
                    used[x] = true;
                    cur.push(x);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[x] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

impl Ord for Perm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.images.cmp(&other.images))
    }
}

impl PartialOrd for Perm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.images.is_empty() {
            return write!(f, "e");
        }
        if self.order() <= 9 {
            for x in &self.images {
                write!(f, "{x}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", parts.join(","))
        }
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// `ρ∘σ`: apply `σ` first, then `ρ`.
pub fn compose(rho: &Perm, sigma: &Perm) -> Result<Perm, AlgebraError> {
    if rho.order() != sigma.order() {
        return Err(AlgebraError::OrderMismatch(rho.order(), sigma.order()));
    }
    Ok(Perm {
        images: sigma.images.iter().map(|&i| rho.apply(i)).collect(),
    })
}

/// Shuffles of type `(p, q)`: increasing on `1..=p` and on `p+1..=p+q`.
pub fn shuffles(p: usize, q: usize) -> Vec<Perm> {
    let n = p + q;
    let mut out = Vec::new();
    // Choose the image set of the first block; the second block gets the rest.
    let mut chosen = Vec::with_capacity(p);
    fn rec(start: usize, n: usize, p: usize, chosen: &mut Vec<usize>, out: &mut Vec<Perm>) {
        if chosen.len() == p {
            let mut images = chosen.clone();
            images.extend((1..=n).filter(|x| !chosen.contains(x)));
            out.push(Perm { images });
            return;
        }
        let need = p - chosen.len();
        for x in start..=n + 1 - need {
            chosen.push(x);
            rec(x + 1, n, p, chosen, out);
            chosen.pop();
        }
    }
    rec(1, n, p, &mut chosen, &mut out);
    out.sort();
    out
}

/// `ρ × σ`: `ρ` on the first letters and `σ`, shifted, on the rest.
pub fn cross(rho: &Perm, sigma: &Perm) -> Perm {
    let shift = rho.order();
    let mut images = rho.images.clone();
    images.extend(sigma.images.iter().map(|x| x + shift));
    Perm { images }
}

/// The pieces of `σ = w∘(σ_i × σ'_{n-i})` with `w` an `(i, n-i)`-shuffle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub left: Perm,
    pub right: Perm,
    pub shuffle: Perm,
}

/// The unique decomposition of `σ` at `i`.
///
/// `w` sends `1..=i` increasingly onto the values of the first `i` letters
/// and the rest onto the remaining values.
pub fn decompose(sigma: &Perm, i: usize) -> Result<Decomposition, AlgebraError> {
    let n = sigma.order();
    if i > n {
        return Err(AlgebraError::IndexOutOfRange { index: i, len: n + 1 });
    }
    let (head, tail) = sigma.images.split_at(i);
    let mut w = head.to_vec();
    w.sort_unstable();
    let mut rest = tail.to_vec();
    rest.sort_unstable();
    w.extend(rest);
    Ok(Decomposition {
        left: Perm::standardize(head),
        right: Perm::standardize(tail),
        shuffle: Perm { images: w },
    })
}

/// `ρ ∗ σ` on basis permutations.
pub fn star_perm<R: Scalar>(rho: &Perm, sigma: &Perm) -> LinComb<Perm, R> {
    let base = cross(rho, sigma);
    shuffles(rho.order(), sigma.order())
        .iter()
        .map(|alpha| (compose(&base, &alpha.inverse()).expect("orders agree"), R::one()))
        .collect()
}

/// Bilinear extension of [`star_perm`].
pub fn star_perm_comb<R: Scalar>(a: &LinComb<Perm, R>, b: &LinComb<Perm, R>) -> LinComb<Perm, R> {
    a.bilinear(b, star_perm)
}

/// `Δσ = Σ_i σ_i ⊗ σ'_{n-i}`.
pub fn coproduct_perm<R: Scalar>(sigma: &Perm) -> LinComb<Tensor<Perm>, R> {
    (0..=sigma.order())
        .map(|i| {
            let d = decompose(sigma, i).expect("index in range");
            (Tensor::pair(d.left, d.right), R::one())
        })
        .collect()
}
