//! Formal finite linear combinations over an ordered basis.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use crate::scalar::Scalar;

/// A finite sum `Σ c_b · b` with nonzero coefficients only.
///
/// Terms are kept in a `BTreeMap`, so iteration order is the basis order and
/// two equal combinations always iterate identically.
#[derive(Clone, PartialEq)]
pub struct LinComb<B: Ord, R> {
    terms: BTreeMap<B, R>,
}

impl<B: Ord, R> Default for LinComb<B, R> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<B: Ord + Clone, R: Scalar> LinComb<B, R> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis element `b` with coefficient one.
    pub fn basis(b: B) -> Self {
        Self::term(b, R::one())
    }

    pub fn term(b: B, c: R) -> Self {
        let mut out = Self::zero();
        out.add_term(b, c);
        out
    }

    pub fn add_term(&mut self, b: B, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &R) {
        for (b, x) in other.iter() {
            self.add_term(b.clone(), x.clone() * c.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of basis elements with a nonzero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, b: &B) -> R {
        self.terms.get(b).cloned().unwrap_or_else(R::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&B, &R)> {
        self.terms.iter()
    }

    pub fn basis_elements(&self) -> impl Iterator<Item = &B> {
        self.terms.keys()
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    /// Extend `f: B -> LinComb<C>` linearly.
    pub fn flat_map<C: Ord + Clone>(&self, mut f: impl FnMut(&B) -> LinComb<C, R>) -> LinComb<C, R> {
        let mut out = LinComb::zero();
        for (b, c) in self.iter() {
            out.add_scaled(&f(b), c);
        }
        out
    }

    /// Push forward along a map of bases.
    pub fn map_basis<C: Ord + Clone>(&self, mut f: impl FnMut(&B) -> C) -> LinComb<C, R> {
        let mut out = LinComb::zero();
        for (b, c) in self.iter() {
            out.add_term(f(b), c.clone());
        }
        out
    }

    /// Extend a map on pairs of basis elements bilinearly.
    pub fn bilinear<B2: Ord + Clone, C: Ord + Clone>(
        &self,
        other: &LinComb<B2, R>,
        mut f: impl FnMut(&B, &B2) -> LinComb<C, R>,
    ) -> LinComb<C, R> {
        let mut out = LinComb::zero();
        for (a, x) in self.iter() {
            for (b, y) in other.iter() {
                out.add_scaled(&f(a, b), &(x.clone() * y.clone()));
            }
        }
        out
    }

    /// Change of scalars.
    pub fn convert<S: Scalar>(&self, mut f: impl FnMut(&R) -> S) -> LinComb<B, S> {
        let mut out = LinComb::zero();
        for (b, c) in self.iter() {
            out.add_term(b.clone(), f(c));
        }
        out
    }

    /// If `self == c · other` for a scalar `c`, return `c`.
    pub fn ratio_to(&self, other: &Self) -> Option<R> {
        if other.is_zero() {
            return self.is_zero().then(R::zero);
        }
        let (b, y) = other.iter().next()?;
        let c = self.coeff(b).checked_div(y)?;
        (other.scale(&c) == *self).then_some(c)
    }
}

impl<B: Ord + Clone, R: Scalar> FromIterator<(B, R)> for LinComb<B, R> {
    fn from_iter<I: IntoIterator<Item = (B, R)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (b, c) in iter {
            out.add_term(b, c);
        }
        out
    }
}

impl<B: Ord + Clone, R: Scalar> AddAssign<&LinComb<B, R>> for LinComb<B, R> {
    fn add_assign(&mut self, rhs: &LinComb<B, R>) {
        self.add_scaled(rhs, &R::one());
    }
}

impl<B: Ord + Clone, R: Scalar> Add for &LinComb<B, R> {
    type Output = LinComb<B, R>;
    fn add(self, rhs: Self) -> LinComb<B, R> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<B: Ord + Clone, R: Scalar> Add for LinComb<B, R> {
    type Output = LinComb<B, R>;
    fn add(mut self, rhs: Self) -> LinComb<B, R> {
        self += &rhs;
        self
    }
}

impl<B: Ord + Clone, R: Scalar> Sub for &LinComb<B, R> {
    type Output = LinComb<B, R>;
    fn sub(self, rhs: Self) -> LinComb<B, R> {
        let mut out = self.clone();
        out.add_scaled(rhs, &-R::one());
        out
    }
}

impl<B: Ord + Clone, R: Scalar> Sub for LinComb<B, R> {
    type Output = LinComb<B, R>;
    fn sub(self, rhs: Self) -> LinComb<B, R> {
        &self - &rhs
    }
}

impl<B: Ord + Clone, R: Scalar> Neg for LinComb<B, R> {
    type Output = LinComb<B, R>;
    fn neg(self) -> LinComb<B, R> {
        self.scale(&-R::one())
    }
}

impl<B: Ord + fmt::Debug, R: fmt::Display> fmt::Debug for LinComb<B, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{b:?}")?;
        }
        Ok(())
    }
}

impl<B: Ord + Clone, R: Scalar> LinComb<B, R> {
    /// `c*b + …` with unit coefficients dropped; `0` when empty.
    pub fn render_with(&self, mut name: impl FnMut(&B) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (b, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if c.is_negative() { (true, -c.clone()) } else { (false, c.clone()) };
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if !mag.is_one() {
                out.push_str(&mag.to_text());
                out.push('*');
            }
            out.push_str(&name(b));
        }
        out
    }
}

/// An element of a tensor power, `b_1 ⊗ … ⊗ b_k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tensor<B>(pub Vec<B>);

impl<B> Tensor<B> {
    pub fn pair(a: B, b: B) -> Self {
        Tensor(vec![a, b])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

/// `a ⊗ b` for linear combinations.
pub fn tensor<B: Ord + Clone, R: Scalar>(a: &LinComb<B, R>, b: &LinComb<B, R>) -> LinComb<Tensor<B>, R> {
    a.bilinear(b, |x, y| LinComb::basis(Tensor::pair(x.clone(), y.clone())))
}

/// Apply a linear map to one slot of every tensor.
pub fn map_slot<B: Ord + Clone, R: Scalar>(
    t: &LinComb<Tensor<B>, R>,
    slot: usize,
    mut f: impl FnMut(&B) -> LinComb<Tensor<B>, R>,
) -> LinComb<Tensor<B>, R> {
    t.flat_map(|tens| {
        let image = f(&tens.0[slot]);
        image.map_basis(|inner| {
            let mut v = Vec::with_capacity(tens.0.len() + inner.0.len() - 1);
            v.extend_from_slice(&tens.0[..slot]);
            v.extend_from_slice(&inner.0);
            v.extend_from_slice(&tens.0[slot + 1..]);
            Tensor(v)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn cancellation_removes_terms() {
        let mut a: LinComb<u32, Q> = LinComb::basis(3);
        a.add_term(3, Q::from_int(-1));
        assert!(a.is_zero());
        assert_eq!(a.len(), 0);
    }

    #[test]
    fn iteration_is_canonical() {
        let a: LinComb<u32, i64> = [(5, 1), (1, 2), (3, 3)].into_iter().collect();
        let b: LinComb<u32, i64> = [(3, 3), (5, 1), (1, 2)].into_iter().collect();
        assert_eq!(a, b);
        assert_eq!(a.basis_elements().copied().collect::<Vec<_>>(), vec![1, 3, 5]);
    }

    #[test]
    fn map_slot_splices() {
        let t: LinComb<Tensor<u32>, i64> = LinComb::basis(Tensor::pair(1, 2));
        let out = map_slot(&t, 0, |&x| LinComb::basis(Tensor::pair(x, x + 10)));
        assert_eq!(out, LinComb::basis(Tensor(vec![1, 11, 2])));
    }
}
