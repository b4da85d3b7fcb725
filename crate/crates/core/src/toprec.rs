//! Correlation functions as kernel/cylinder expressions.
//!
//! A tree stands for a product of recursion kernels `K_x(q_i, q̄_i)`, one per
//! vertex, and cylinders `W^0_2`, one per leaf. Kernel pairs are numbered
//! from 1 in depth-first order from the root. Loops of a loop graph become
//! cylinders joining two internal labels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;
use crate::hopf::{antipode, generator_power};
use crate::lincomb::{LinComb, Tensor};
use crate::loops::{weighted_loop_graphs, LoopGraph};
use crate::scalar::Scalar;
use crate::tree::{enumerate_trees, Tree};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Root,
    External(usize),
    /// `q_i`; index 0 is the unindexed `q` of a single recursion step.
    Q(usize),
    QBar(usize),
}

impl Label {
    pub fn is_internal(&self) -> bool {
        matches!(self, Label::Q(_) | Label::QBar(_))
    }

    pub fn latex(&self) -> String {
        fn sub(i: usize) -> String {
            if i < 10 {
                format!("_{i}")
            } else {
                format!("_{{{i}}}")
            }
        }
        match *self {
            Label::Root => "p".into(),
            Label::External(j) => format!("p{}", sub(j)),
            Label::Q(0) => "q".into(),
            Label::QBar(0) => "\\bar q".into(),
            Label::Q(i) => format!("q{}", sub(i)),
            Label::QBar(i) => format!("\\bar q{}", sub(i)),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Label::Root => write!(f, "p"),
            Label::External(j) => write!(f, "p{j}"),
            Label::Q(0) => write!(f, "q"),
            Label::QBar(0) => write!(f, "qb"),
            Label::Q(i) => write!(f, "q{i}"),
            Label::QBar(i) => write!(f, "qb{i}"),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An unexpanded `W^g_k(labels)`; the first label is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CorrRef {
    pub genus: usize,
    pub labels: Vec<Label>,
}

impl CorrRef {
    pub fn new(genus: usize, labels: Vec<Label>) -> Self {
        CorrRef { genus, labels }
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// `2 - 2g - k`.
    pub fn euler(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.k() as i64
    }

    pub fn root(&self) -> Label {
        self.labels[0]
    }

    pub fn is_cylinder(&self) -> bool {
        self.genus == 0 && self.k() == 2
    }

    fn with_root(&self, root: Label) -> CorrRef {
        let mut labels = self.labels.clone();
        labels[0] = root;
        CorrRef { genus: self.genus, labels }
    }

    pub fn latex(&self) -> String {
        let sup = |x: usize| if x < 10 { x.to_string() } else { format!("{{{x}}}") };
        let args: Vec<String> = self.labels.iter().map(Label::latex).collect();
        format!("W^{}_{}({})", sup(self.genus), sup(self.k()), args.join(","))
    }
}

impl fmt::Display for CorrRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "W[g={},k={}]({})", self.genus, self.k(), args.join(","))
    }
}

impl fmt::Debug for CorrRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A nested kernel/cylinder expression.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorrExpr {
    Cylinder(Label, Label),
    Kernel {
        base: Label,
        pair: usize,
        left: Box<CorrExpr>,
        right: Box<CorrExpr>,
    },
    Ref(CorrRef),
}

impl CorrExpr {
    pub fn kernels(&self) -> usize {
        match self {
            CorrExpr::Kernel { left, right, .. } => 1 + left.kernels() + right.kernels(),
            _ => 0,
        }
    }

    pub fn cylinders(&self) -> usize {
        match self {
            CorrExpr::Cylinder(..) => 1,
            CorrExpr::Kernel { left, right, .. } => left.cylinders() + right.cylinders(),
            CorrExpr::Ref(_) => 0,
        }
    }

    /// The flat product of factors.
    pub fn monomial(&self) -> Monomial {
        fn rec(e: &CorrExpr, out: &mut Vec<Factor>) {
            match e {
                CorrExpr::Cylinder(x, y) => out.push(Factor::Cylinder(*x, *y)),
                CorrExpr::Kernel { base, pair, left, right } => {
                    out.push(Factor::Kernel {
                        base: *base,
                        q: Label::Q(*pair),
                        qb: Label::QBar(*pair),
                    });
                    rec(left, out);
                    rec(right, out);
                }
                CorrExpr::Ref(r) => out.push(Factor::from_ref(r.clone())),
            }
        }
        let mut out = Vec::new();
        rec(self, &mut out);
        Monomial::new(out)
    }
}

impl fmt::Display for CorrExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrExpr::Cylinder(x, y) => write!(f, "W2({x},{y})"),
            CorrExpr::Kernel { base, pair, left, right } => {
                write!(f, "K[{base};{},{}]({left}, {right})", Label::Q(*pair), Label::QBar(*pair))
            }
            CorrExpr::Ref(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for CorrExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    Kernel { base: Label, q: Label, qb: Label },
    Cylinder(Label, Label),
    Ref(CorrRef),
}

impl Factor {
    /// `W^0_2` references become cylinders.
    pub fn from_ref(r: CorrRef) -> Factor {
        if r.is_cylinder() {
            Factor::Cylinder(r.labels[0], r.labels[1])
        } else {
            Factor::Ref(r)
        }
    }

    fn relabel(&self, f: &impl Fn(Label) -> Label) -> Factor {
        match self {
            Factor::Kernel { base, q, qb } => Factor::Kernel { base: f(*base), q: f(*q), qb: f(*qb) },
            Factor::Cylinder(x, y) => Factor::Cylinder(f(*x), f(*y)),
            Factor::Ref(r) => Factor::Ref(CorrRef::new(r.genus, r.labels.iter().map(|l| f(*l)).collect())),
        }
    }

    fn labels(&self) -> Vec<Label> {
        match self {
            Factor::Kernel { base, q, qb } => vec![*base, *q, *qb],
            Factor::Cylinder(x, y) => vec![*x, *y],
            Factor::Ref(r) => r.labels.clone(),
        }
    }

    pub fn latex(&self) -> String {
        match self {
            Factor::Kernel { base, q, qb } => format!("K_{}({},{})", base.latex(), q.latex(), qb.latex()),
            Factor::Cylinder(x, y) => format!("W^0_2({},{})", x.latex(), y.latex()),
            Factor::Ref(r) => r.latex(),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Kernel { base, q, qb } => write!(f, "K[{base};{q},{qb}]"),
            Factor::Cylinder(x, y) => write!(f, "W2({x},{y})"),
            Factor::Ref(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A commutative product of factors, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(Vec<Factor>);

impl Monomial {
    pub fn new(mut factors: Vec<Factor>) -> Self {
        factors.sort();
        Monomial(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn relabel(&self, f: &impl Fn(Label) -> Label) -> Monomial {
        Monomial::new(self.0.iter().map(|x| x.relabel(f)).collect())
    }

    /// All label occurrences, with repetition.
    pub fn labels(&self) -> Vec<Label> {
        self.0.iter().flat_map(Factor::labels).collect()
    }

    pub fn latex(&self) -> String {
        self.0.iter().map(Factor::latex).collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type CorrSum<R> = LinComb<Monomial, R>;

/// `ψ(t)` with `labels = [root, leaf_0, …, leaf_n]`.
pub fn psi_tree(t: &Tree, labels: &[Label]) -> Result<CorrExpr, AlgebraError> {
    if labels.len() != t.leaves() + 1 {
        return Err(AlgebraError::LabelCount {
            expected: t.leaves() + 1,
            got: labels.len(),
        });
    }
    fn rec(t: &Tree, base: Label, counter: &mut usize, leaves: &mut std::slice::Iter<'_, Label>) -> CorrExpr {
        match t.children() {
            None => CorrExpr::Cylinder(base, *leaves.next().expect("label count checked")),
            Some((l, r)) => {
                *counter += 1;
                let pair = *counter;
                let left = rec(l, Label::Q(pair), counter, leaves);
                let right = rec(r, Label::QBar(pair), counter, leaves);
                CorrExpr::Kernel {
                    base,
                    pair,
                    left: Box::new(left),
                    right: Box::new(right),
                }
            }
        }
    }
    let mut counter = 0;
    Ok(rec(t, labels[0], &mut counter, &mut labels[1..].iter()))
}

fn externals(k: usize) -> Vec<Label> {
    (1..=k).map(Label::External).collect()
}

/// `ψ` of a loop graph: free leaves carry `p_1, …` in order, each loop is a
/// cylinder between the two internal labels it joins.
pub fn psi_graph(graph: &LoopGraph) -> Monomial {
    let leaves = graph.base().leaves();
    let mut labels = vec![Label::Root];
    labels.extend(externals(leaves));
    let mono = psi_tree(graph.base(), &labels).expect("label count").monomial();
    let mut attach = vec![Label::Root; leaves];
    let mut rest = Vec::new();
    for factor in mono.factors() {
        match factor {
            Factor::Cylinder(x, Label::External(j)) => attach[j - 1] = *x,
            other => rest.push(other.clone()),
        }
    }
    for &(a, b) in graph.loops() {
        rest.push(Factor::Cylinder(attach[a], attach[b]));
    }
    for (rank, leaf) in graph.free_leaves().into_iter().enumerate() {
        rest.push(Factor::Cylinder(attach[leaf], Label::External(rank + 1)));
    }
    Monomial::new(rest)
}

/// A sum symmetrized over a set of labels, kept as one representative per
/// orbit.
#[derive(Clone, Debug)]
pub struct Symmetrized<R: Scalar> {
    pub representative: CorrSum<R>,
    pub symmetric: Vec<Label>,
}

impl<R: Scalar> Symmetrized<R> {
    /// Number of terms before collecting.
    pub fn term_count(&self) -> usize {
        self.representative.len() * (1..=self.symmetric.len()).product::<usize>()
    }

    /// Every relabelling of the representative by a permutation of the
    /// symmetric labels, as a list.
    pub fn terms(&self) -> Vec<(Monomial, R)> {
        let mut out = Vec::with_capacity(self.term_count());
        for perm in permutations(self.symmetric.len()) {
            let map = |l: Label| match self.symmetric.iter().position(|x| *x == l) {
                Some(i) => self.symmetric[perm[i]],
                None => l,
            };
            for (m, c) in self.representative.iter() {
                out.push((m.relabel(&map), c.clone()));
            }
        }
        out
    }

    pub fn expand(&self) -> CorrSum<R> {
        self.terms().into_iter().collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    crate::perm::Perm::all(n)
        .into_iter()
        .map(|p| p.images().iter().map(|x| x - 1).collect())
        .collect()
}

/// `ψ(W^0_{n+2})`: all trees of order `n`, symmetrized over `p_1…p_{n+1}`.
pub fn expand_w0<R: Scalar>(n: usize) -> Symmetrized<R> {
    let mut labels = vec![Label::Root];
    labels.extend(externals(n + 1));
    let representative = enumerate_trees(n)
        .iter()
        .map(|t| (psi_tree(t, &labels).expect("label count").monomial(), R::one()))
        .collect();
    Symmetrized {
        representative,
        symmetric: externals(n + 1),
    }
}

/// `ψ(W^g_{n+2-2g})`: weighted loop graphs, symmetrized over the free labels.
pub fn expand_wg<R: Scalar>(g: usize, n: usize) -> Result<Symmetrized<R>, AlgebraError> {
    let graphs = weighted_loop_graphs(n, g)?;
    let representative = graphs.iter().map(|(x, w)| (psi_graph(x), R::from_int(*w))).collect();
    Ok(Symmetrized {
        representative,
        symmetric: externals(n + 1 - 2 * g),
    })
}

/// How the external labels are split between the two branches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitMode {
    /// `L = (p_1…p_j)`, `M = (p_{j+1}…)`: the planar splits.
    #[default]
    Contiguous,
    /// Every subset `L`, order kept.
    AllSubsets,
}

/// `K_x(q,q̄)` times an ordered list of terms.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelStep<R: Scalar> {
    pub base: Label,
    pub terms: Vec<(R, Vec<CorrRef>)>,
}

impl<R: Scalar> KernelStep<R> {
    fn kernel(&self) -> Factor {
        Factor::Kernel {
            base: self.base,
            q: Label::Q(0),
            qb: Label::QBar(0),
        }
    }

    /// As a flat sum of monomials.
    pub fn to_sum(&self) -> CorrSum<R> {
        self.terms
            .iter()
            .map(|(c, refs)| {
                let mut fs = vec![self.kernel()];
                fs.extend(refs.iter().cloned().map(Factor::from_ref));
                (Monomial::new(fs), c.clone())
            })
            .collect()
    }

    fn render(&self, kernel: String, term: impl Fn(&CorrRef) -> String, open: &str, close: &str, sep: &str) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, refs)| {
                let body: String = refs.iter().map(&term).collect::<Vec<_>>().join(sep);
                if c.is_one() {
                    body
                } else {
                    format!("{}{sep}{body}", c.to_text())
                }
            })
            .collect();
        format!("{kernel}{open}{}{close}", parts.join(" + ").replace(" + -", " - "))
    }

    pub fn latex(&self) -> String {
        let k = format!("K_{}(q,\\bar q)", self.base.latex());
        let body = self.render(k, |r| Factor::from_ref(r.clone()).latex(), "\\left(", "\\right)", "");
        body.replace(" + ", "+").replace(" - ", "-")
    }
}

impl<R: Scalar> fmt::Display for KernelStep<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = format!("K[{};q,qb]", self.base);
        let s = self.render(k, |r| Factor::from_ref(r.clone()).to_string(), "(", ")", "*");
        write!(f, "{s}")
    }
}

fn check_rhs(g: usize, k: usize) -> Result<(), AlgebraError> {
    // χ = 2 - 2g - (k+1) must be at most -1.
    if 2 * g + k < 2 {
        return Err(AlgebraError::InconsistentEuler { order: k.saturating_sub(1), genus: g });
    }
    Ok(())
}

/// One step of the recursion for `W^g(p, K)`:
/// `K_p(q,q̄)[W^{g-1}(q,q̄,K) + Σ W^h(q,L) W^{g-h}(q̄,M)]`, dropping the
/// unstable terms `W^0(q)` and `W^0(q̄)`.
pub fn toprec_rhs<R: Scalar>(g: usize, external: &[Label], mode: SplitMode) -> Result<KernelStep<R>, AlgebraError> {
    check_rhs(g, external.len())?;
    let mut terms = Vec::new();
    if g >= 1 {
        let mut labels = vec![Label::Q(0), Label::QBar(0)];
        labels.extend_from_slice(external);
        terms.push((R::one(), vec![CorrRef::new(g - 1, labels)]));
    }
    let m = external.len();
    let splits: Vec<(Vec<Label>, Vec<Label>)> = match mode {
        SplitMode::Contiguous => (0..=m).map(|j| (external[..j].to_vec(), external[j..].to_vec())).collect(),
        SplitMode::AllSubsets => (0..1usize << m)
            .map(|mask| {
                let (l, r): (Vec<_>, Vec<_>) = external.iter().enumerate().partition(|(i, _)| mask >> i & 1 == 1);
                (l.into_iter().map(|x| *x.1).collect(), r.into_iter().map(|x| *x.1).collect())
            })
            .collect(),
    };
    let mut split_terms = Vec::new();
    for h in 0..=g {
        for (l, r) in &splits {
            if (h == 0 && l.is_empty()) || (g - h == 0 && r.is_empty()) {
                continue;
            }
            let mut ll = vec![Label::Q(0)];
            ll.extend(l);
            let mut rr = vec![Label::QBar(0)];
            rr.extend(r);
            split_terms.push(vec![CorrRef::new(h, ll), CorrRef::new(g - h, rr)]);
        }
    }
    split_terms.sort_by(|a, b| {
        let key = |t: &Vec<CorrRef>| (-t[1].euler(), t[1].genus, t[0].labels.clone());
        key(a).cmp(&key(b))
    });
    terms.extend(split_terms.into_iter().map(|t| (R::one(), t)));
    Ok(KernelStep { base: Label::Root, terms })
}

/// A tensor factor of the correlation coproduct.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CorrFactor {
    Unit,
    Ref(CorrRef),
}

impl fmt::Display for CorrFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrFactor::Unit => write!(f, "1"),
            CorrFactor::Ref(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for CorrFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type CorrTensor<R> = LinComb<Tensor<CorrFactor>, R>;

fn w0_with(labels: Vec<Label>) -> CorrFactor {
    CorrFactor::Ref(CorrRef::new(0, labels))
}

/// `ΔW^0_{n+2}` with the `n!` normalization absorbed:
/// `1⊗W + W⊗1 + Σ_{k=1}^{n-1} W(p,p_1..p_k,q̄) ⊗ W(q̄,p_{k+1}..)
///  + Σ_{k=1}^{n-1} W(q,p_1..p_{k+1}) ⊗ W(p,q,p_{k+2}..)`.
///
/// The two sums come from cutting the right and the left spine; the
/// boundary values `k = 0, n` would repeat the primitive terms and are left
/// out.
pub fn corr_coproduct<R: Scalar>(n: usize) -> CorrTensor<R> {
    let p = |j: usize| Label::External(j);
    let mut all = vec![Label::Root];
    all.extend(externals(n + 1));
    let whole = w0_with(all);
    let mut out = CorrTensor::zero();
    out.add_term(Tensor::pair(CorrFactor::Unit, whole.clone()), R::one());
    out.add_term(Tensor::pair(whole, CorrFactor::Unit), R::one());
    for k in 1..n {
        let mut lower = vec![Label::Root];
        lower.extend((1..=k).map(p));
        lower.push(Label::QBar(0));
        let mut upper = vec![Label::QBar(0)];
        upper.extend((k + 1..=n + 1).map(p));
        out.add_term(Tensor::pair(w0_with(lower), w0_with(upper)), R::one());

        let mut upper = vec![Label::Q(0)];
        upper.extend((1..=k + 1).map(p));
        let mut lower = vec![Label::Root, Label::Q(0)];
        lower.extend((k + 2..=n + 1).map(p));
        out.add_term(Tensor::pair(w0_with(upper), w0_with(lower)), R::one());
    }
    out
}

/// [`corr_coproduct`] without the primitive part.
pub fn reduced_corr_coproduct<R: Scalar>(n: usize) -> CorrTensor<R> {
    corr_coproduct::<R>(n)
        .iter()
        .filter(|(t, _)| !t.0.contains(&CorrFactor::Unit))
        .map(|(t, c)| (t.clone(), c.clone()))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CutSide {
    /// The cut vertex is a left child; the new leaf is `q`.
    Left,
    /// The cut vertex is a right child; the new leaf is `q̄`.
    Right,
}

/// A cut along a spine: `lower` keeps the root and gains a leaf where
/// `upper` was attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpineCut {
    pub side: CutSide,
    pub lower: Tree,
    pub upper: Tree,
}

/// Cuts below a non-root vertex on the leftmost or rightmost path.
pub fn spine_cuts(t: &Tree) -> Vec<SpineCut> {
    fn right(t: &Tree) -> Vec<(Tree, Tree)> {
        let Some((l, r)) = t.children() else { return Vec::new() };
        let mut out = Vec::new();
        if !r.is_leaf() {
            out.push((crate::tree::graft(l, &Tree::Leaf), r.clone()));
        }
        out.extend(right(r).into_iter().map(|(lo, up)| (crate::tree::graft(l, &lo), up)));
        out
    }
    let mut out: Vec<SpineCut> = right(t)
        .into_iter()
        .map(|(lower, upper)| SpineCut { side: CutSide::Right, lower, upper })
        .collect();
    out.extend(right(&t.mirror()).into_iter().map(|(lo, up)| SpineCut {
        side: CutSide::Left,
        lower: lo.mirror(),
        upper: up.mirror(),
    }));
    out
}

/// The chain product `W^0(x, a…, c) ∗ W^0(x, c, b…) = W^0(x, a…, c, b…)`.
pub fn chain_merge(a: &CorrRef, b: &CorrRef) -> Option<CorrRef> {
    if a.genus != 0 || b.genus != 0 || a.root() != b.root() || a.labels.last() != b.labels.get(1) {
        return None;
    }
    let mut labels = a.labels.clone();
    labels.extend_from_slice(&b.labels[2..]);
    Some(CorrRef::new(0, labels))
}

/// The product of genus-0 correlation functions. A cylinder `W^0_2(x,y)`
/// on either side glues its leaf `y` to the other root and renames that
/// root to `x`; otherwise roots must agree and the last leaf of `a` must be
/// the first leaf of `b`. A mismatch is zero.
pub fn corr_product(a: &CorrRef, b: &CorrRef) -> Result<Option<CorrRef>, AlgebraError> {
    if a.genus != 0 || b.genus != 0 {
        return Err(AlgebraError::Unsupported("product is defined in genus 0".into()));
    }
    let glue = |cyl: &CorrRef, other: &CorrRef| (cyl.labels[1] == other.root()).then(|| other.with_root(cyl.root()));
    Ok(if a.is_cylinder() {
        glue(a, b)
    } else if b.is_cylinder() {
        glue(b, a)
    } else {
        chain_merge(a, b)
    })
}

/// One recursion step applied to `W^0_{l+2}(p,p_1..p_{l+1}) ∗
/// W^0_{m+2}(p,p_{l+1}..p_{l+m+1})` through the grafting recursion: the
/// splits of the left factor with the right factor merged into their `q̄`
/// side, plus the splits of the right factor with the left merged into
/// their `q` side.
pub fn product_rhs<R: Scalar>(l: usize, m: usize) -> Result<KernelStep<R>, AlgebraError> {
    if l == 0 || m == 0 {
        return Err(AlgebraError::Unsupported("both factors need order at least 1".into()));
    }
    let left_ext = externals(l + 1);
    let right_ext: Vec<Label> = (l + 1..=l + m + 1).map(Label::External).collect();
    let a_step = toprec_rhs::<R>(0, &left_ext, SplitMode::Contiguous)?;
    let b_step = toprec_rhs::<R>(0, &right_ext, SplitMode::Contiguous)?;
    let mut b_ref = vec![Label::QBar(0)];
    b_ref.extend(&right_ext);
    let b_at_qbar = CorrRef::new(0, b_ref);
    let mut a_ref = vec![Label::Q(0)];
    a_ref.extend(&left_ext);
    let a_at_q = CorrRef::new(0, a_ref);
    let mut terms = Vec::new();
    for (c, refs) in &a_step.terms {
        let merged = chain_merge(&refs[1], &b_at_qbar).expect("chain labels agree");
        terms.push((c.clone(), vec![refs[0].clone(), merged]));
    }
    for (c, refs) in &b_step.terms {
        let merged = chain_merge(&a_at_q, &refs[0]).expect("chain labels agree");
        terms.push((c.clone(), vec![merged, refs[1].clone()]));
    }
    Ok(KernelStep { base: Label::Root, terms })
}

/// `c` with `S((1)^{∗n}) = c·(1)^{∗n}`; the antipode on `W^0_{n+2}`.
pub fn transported_antipode_sign<R: Scalar>(n: usize) -> Option<R> {
    let w = generator_power::<R>(n);
    antipode(&w).ratio_to(&w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::catalan;
    use crate::Q;
    use std::collections::{BTreeMap, BTreeSet};

    fn p(j: usize) -> Label {
        Label::External(j)
    }

    fn t(s: &str) -> Tree {
        Tree::of_perm_str(s).unwrap()
    }

    fn w0(labels: &[Label]) -> CorrRef {
        CorrRef::new(0, labels.to_vec())
    }

    #[test]
    fn psi_examples() {
        let e = psi_tree(&Tree::generator(), &[Label::Root, p(1), p(2)]).unwrap();
        assert_eq!(e.to_string(), "K[p;q1,qb1](W2(q1,p1), W2(qb1,p2))");
        let e = psi_tree(&Tree::Leaf, &[Label::Q(1), p(1)]).unwrap();
        assert_eq!(e, CorrExpr::Cylinder(Label::Q(1), p(1)));
        assert!(matches!(
            psi_tree(&Tree::generator(), &[Label::Root]),
            Err(AlgebraError::LabelCount { expected: 3, got: 1 })
        ));
        let e = psi_tree(&t("12"), &[Label::Root, p(1), p(2), p(3)]).unwrap();
        assert_eq!(e.to_string(), "K[p;q1,qb1](K[q1;q2,qb2](W2(q2,p1), W2(qb2,p2)), W2(qb1,p3))");
    }

    #[test]
    fn psi_grafting_is_kernel_on_branches() {
        for n in 1..=4 {
            for tree in enumerate_trees(n) {
                let mut labels = vec![Label::Root];
                labels.extend(externals(n + 1));
                let e = psi_tree(&tree, &labels).unwrap();
                assert_eq!(e.kernels(), n);
                assert_eq!(e.cylinders(), n + 1);
                let CorrExpr::Kernel { left, right, .. } = &e else { panic!("root kernel") };
                let (l, r) = tree.children().unwrap();
                assert_eq!(left.kernels(), l.order());
                assert_eq!(right.kernels(), r.order());
            }
        }
    }

    #[test]
    fn w0_term_counts() {
        for n in 1..=5 {
            let s = expand_w0::<Q>(n);
            let expect = catalan(n) * (1..=n as u64 + 1).product::<u64>();
            assert_eq!(num_bigint::BigUint::from(s.term_count()), expect, "n={n}");
            if n <= 4 {
                assert_eq!(s.expand().len(), s.term_count(), "terms stay distinct at n={n}");
            }
        }
        assert_eq!(expand_w0::<Q>(1).term_count(), 2);
        assert_eq!(expand_w0::<Q>(2).term_count(), 12);
    }

    #[test]
    fn internal_labels_appear_twice() {
        for (m, _) in expand_w0::<Q>(4).representative.iter() {
            let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
            for l in m.labels() {
                *counts.entry(l).or_default() += 1;
            }
            for (l, c) in counts {
                if l.is_internal() {
                    assert_eq!(c, 2, "{l} in {m}");
                }
            }
        }
    }

    #[test]
    fn genus_one_order_one() {
        let s = expand_wg::<Q>(1, 1).unwrap();
        assert_eq!(s.symmetric, vec![]);
        let expect = Monomial::new(vec![
            Factor::Kernel { base: Label::Root, q: Label::Q(1), qb: Label::QBar(1) },
            Factor::Cylinder(Label::Q(1), Label::QBar(1)),
        ]);
        assert_eq!(s.expand(), CorrSum::basis(expect));
    }

    #[test]
    fn genus_expansions_follow_graph_lists() {
        let s = expand_wg::<Q>(1, 2).unwrap();
        assert_eq!(s.representative.len(), 4);
        assert_eq!(s.symmetric, vec![p(1)]);
        let s = expand_wg::<Q>(1, 3).unwrap();
        assert_eq!(s.representative.len(), 15);
        assert_eq!(s.representative.iter().filter(|(_, c)| **c == Q::from_int(2)).count(), 1);
        assert_eq!(s.term_count(), 15 * 2);
        let s = expand_wg::<Q>(2, 3).unwrap();
        assert_eq!(s.representative.len(), 5);
        assert!(expand_wg::<Q>(2, 2).is_err());
    }

    #[test]
    fn rhs_genus_zero() {
        let step = toprec_rhs::<Q>(0, &[p(1), p(2), p(3)], SplitMode::Contiguous).unwrap();
        assert_eq!(
            step.latex(),
            "K_p(q,\\bar q)\\left(W^0_3(q,p_1,p_2)W^0_2(\\bar q,p_3)+W^0_2(q,p_1)W^0_3(\\bar q,p_2,p_3)\\right)"
        );
        assert_eq!(
            step.to_string(),
            "K[p;q,qb](W[g=0,k=3](q,p1,p2)*W2(qb,p3) + W2(q,p1)*W[g=0,k=3](qb,p2,p3))"
        );
    }

    #[test]
    fn rhs_genus_one() {
        let step = toprec_rhs::<Q>(1, &[p(1)], SplitMode::Contiguous).unwrap();
        assert_eq!(
            step.latex(),
            "K_p(q,\\bar q)\\left(W^0_3(q,\\bar q,p_1)+W^1_1(q)W^0_2(\\bar q,p_1)+W^0_2(q,p_1)W^1_1(\\bar q)\\right)"
        );
    }

    #[test]
    fn rhs_excludes_unstable_terms() {
        for g in 0..=2 {
            for k in 0..=3usize {
                let Ok(step) = toprec_rhs::<Q>(g, &externals(k), SplitMode::AllSubsets) else {
                    assert!(2 * g + k < 2);
                    continue;
                };
                for (_, refs) in &step.terms {
                    assert!(refs.iter().all(|r| r.euler() <= 0), "{step}");
                    let chi: i64 = refs.iter().map(CorrRef::euler).sum();
                    // One kernel adds -1 to the Euler characteristic.
                    assert_eq!(chi - 1, 2 - 2 * g as i64 - (k as i64 + 1));
                }
            }
        }
        let all = toprec_rhs::<Q>(0, &externals(3), SplitMode::AllSubsets).unwrap();
        assert_eq!(all.terms.len(), 6);
    }

    #[test]
    fn coproduct_of_w04() {
        let d = corr_coproduct::<Q>(2);
        let mut whole = vec![Label::Root];
        whole.extend(externals(3));
        let w = CorrFactor::Ref(w0(&whole));
        let r = |ls: &[Label]| CorrFactor::Ref(w0(ls));
        let (q, qb) = (Label::Q(0), Label::QBar(0));
        let expect: CorrTensor<Q> = [
            Tensor::pair(CorrFactor::Unit, w.clone()),
            Tensor::pair(w, CorrFactor::Unit),
            Tensor::pair(r(&[Label::Root, p(1), qb]), r(&[qb, p(2), p(3)])),
            Tensor::pair(r(&[q, p(1), p(2)]), r(&[Label::Root, q, p(3)])),
        ]
        .into_iter()
        .map(|x| (x, Q::from_int(1)))
        .collect();
        assert_eq!(d, expect);
        assert!(reduced_corr_coproduct::<Q>(1).is_zero());
    }

    #[test]
    fn cut_admissibility() {
        let c21 = spine_cuts(&t("21"));
        assert_eq!(c21.len(), 1);
        assert_eq!(c21[0].side, CutSide::Right);
        let c12 = spine_cuts(&t("12"));
        assert_eq!(c12.len(), 1);
        assert_eq!(c12[0].side, CutSide::Left);
        assert_eq!((c12[0].lower.clone(), c12[0].upper.clone()), (Tree::generator(), Tree::generator()));
    }

    #[test]
    fn spine_cuts_biject_onto_pairs() {
        for n in 2..=5 {
            for side in [CutSide::Left, CutSide::Right] {
                let mut seen = BTreeSet::new();
                let mut total = 0;
                for tree in enumerate_trees(n) {
                    for cut in spine_cuts(&tree).into_iter().filter(|c| c.side == side) {
                        assert_eq!(cut.lower.order() + cut.upper.order(), n);
                        seen.insert((cut.lower, cut.upper));
                        total += 1;
                    }
                }
                let expect: usize = (1..n).map(|k| enumerate_trees(k).len() * enumerate_trees(n - k).len()).sum();
                assert_eq!(total, expect);
                assert_eq!(seen.len(), expect);
            }
            // One spine term per split k in each of the two sums.
            assert_eq!(reduced_corr_coproduct::<Q>(n).len(), 2 * (n - 1));
        }
    }

    #[test]
    fn product_examples() {
        let a = w0(&[Label::Root, p(1), p(2)]);
        let b = w0(&[Label::Root, p(2), p(3)]);
        assert_eq!(corr_product(&a, &b).unwrap(), Some(w0(&[Label::Root, p(1), p(2), p(3)])));
        let cyl = w0(&[Label::Root, p(9)]);
        let other = w0(&[p(9), p(1), p(2), p(3)]);
        let glued = w0(&[Label::Root, p(1), p(2), p(3)]);
        assert_eq!(corr_product(&cyl, &other).unwrap(), Some(glued.clone()));
        assert_eq!(corr_product(&other, &cyl).unwrap(), Some(glued));
        assert_eq!(corr_product(&a, &w0(&[Label::Root, p(3), p(4)])).unwrap(), None);
        assert_eq!(corr_product(&a, &w0(&[p(7), p(2), p(4)])).unwrap(), None);
        assert!(corr_product(&CorrRef::new(1, vec![Label::Root]), &a).is_err());
    }

    #[test]
    fn product_is_associative_and_additive() {
        let chain = |from: usize, len: usize| {
            let mut ls = vec![Label::Root];
            ls.extend((from..from + len).map(p));
            w0(&ls)
        };
        // Factors of orders 1..=2 laid end to end on shared labels.
        for la in 2..=3 {
            for lb in 2..=3 {
                for lc in 2..=3 {
                    let a = chain(1, la);
                    let b = chain(la, lb);
                    let c = chain(la + lb - 1, lc);
                    let ab = corr_product(&a, &b).unwrap().unwrap();
                    let bc = corr_product(&b, &c).unwrap().unwrap();
                    let left = corr_product(&ab, &c).unwrap().unwrap();
                    let right = corr_product(&a, &bc).unwrap().unwrap();
                    assert_eq!(left, right);
                    assert_eq!(left.euler(), a.euler() + b.euler() + c.euler());
                }
            }
        }
    }

    #[test]
    fn product_is_compatible_with_recursion() {
        for l in 1..=3 {
            for m in 1..=(4 - l) {
                let merged = product_rhs::<Q>(l, m).unwrap();
                let direct = toprec_rhs::<Q>(0, &externals(l + m + 1), SplitMode::Contiguous).unwrap();
                assert_eq!(merged.to_sum(), direct.to_sum(), "l={l} m={m}");
                assert_eq!(merged.terms.len(), l + m);
            }
        }
    }

    #[test]
    fn antipode_on_correlations() {
        for n in 0..=5usize {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(transported_antipode_sign::<Q>(n), Some(Q::from_int(sign)));
        }
    }

    #[test]
    fn bridged_graphs_ungraft_onto_lower_order() {
        use crate::loops::{enumerate_loop_graphs, ungraft_bridge};
        for n in 1..=4 {
            let images: BTreeSet<Tree> = enumerate_loop_graphs(n, 1)
                .unwrap()
                .basis_elements()
                .filter(|x| x.root_bridge().is_some())
                .map(|x| ungraft_bridge(x).unwrap().base().clone())
                .collect();
            assert_eq!(images, enumerate_trees(n - 1).into_iter().collect(), "n={n}");
        }
    }
}
