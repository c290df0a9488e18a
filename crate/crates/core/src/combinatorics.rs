//! Index sets, partitions and the structural operations on Horn tuples.
//!
//! An [`IndexSet`] is a finite strictly increasing set of positive integers.
//! It doubles as the function `ℓ ↦ I(ℓ)` returning its ℓ-th smallest
//! element (1-based), which is how composition `I∘I′` is defined.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;

    fn try_from(elements: Vec<usize>) -> Result<Self> {
        Self::new(elements)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(set: IndexSet) -> Self {
        set.0
    }
}

impl IndexSet {
    pub fn new(elements: Vec<usize>) -> Result<Self> {
        let valid = elements.first().is_none_or(|&e| e >= 1) && elements.windows(2).all(|w| w[0] < w[1]);
        if valid {
            Ok(Self(elements))
        } else {
            Err(Error::InvalidIndexSet(elements))
        }
    }

    /// Builds a set from arbitrary distinct positive integers, sorting them.
    pub fn from_unsorted(mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        Self::new(elements)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `[n] = {1, …, n}`.
    pub fn range(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// `I(ℓ)` for `1 ≤ ℓ ≤ |I|`.
    pub fn at(&self, l: usize) -> usize {
        self.0[l - 1]
    }

    pub fn max_element(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_subset_of_range(&self, n: usize) -> bool {
        self.max_element().is_none_or(|e| e <= n)
    }

    /// `Σ_ℓ (I(ℓ) − ℓ)`, the size of [`pi`].
    pub fn weight(&self) -> usize {
        self.0.iter().enumerate().map(|(l, &e)| e - (l + 1)).sum()
    }

    /// Pointwise order `I(ℓ) ≤ J(ℓ)` for sets of equal cardinality.
    pub fn pointwise_le(&self, other: &IndexSet) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Complement inside `[n]`.
    pub fn complement_in(&self, n: usize) -> IndexSet {
        IndexSet((1..=n).filter(|x| !self.contains(*x)).collect())
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A weakly decreasing list of nonnegative integers. Trailing zeros are
/// ignored by equality, hashing and ordering.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).all(|w| w[0] >= w[1]) {
            Ok(Self(parts))
        } else {
            Err(Error::InvalidPartition(parts))
        }
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Parts with trailing zeros stripped.
    pub fn parts(&self) -> &[usize] {
        let len = self.0.iter().rposition(|&p| p > 0).map_or(0, |k| k + 1);
        &self.0[..len]
    }

    /// Parts as stored, trailing zeros included.
    pub fn raw_parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of nonzero parts.
    pub fn length(&self) -> usize {
        self.parts().len()
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Part `t` (0-based), zero beyond the stored length.
    pub fn part(&self, t: usize) -> usize {
        self.0.get(t).copied().unwrap_or(0)
    }

    /// Young-diagram containment `self ⊆ other`.
    pub fn is_contained_in(&self, other: &Partition) -> bool {
        self.parts().iter().enumerate().all(|(t, &p)| p <= other.part(t))
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.parts() == other.parts()
    }
}

impl Eq for Partition {}

impl Hash for Partition {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parts().hash(state);
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts().cmp(other.parts())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts().iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// An `(m+1)`-tuple `(I, J⁽¹⁾, …, J⁽ᵐ⁾)` of `r`-subsets of `[N]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTuple", into = "RawTuple")]
pub struct HornTuple {
    pub n: usize,
    pub i: IndexSet,
    pub j: Vec<IndexSet>,
}

#[derive(Serialize, Deserialize)]
struct RawTuple {
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    r: usize,
    #[serde(rename = "I")]
    i: IndexSet,
    #[serde(rename = "J")]
    j: Vec<IndexSet>,
}

impl TryFrom<RawTuple> for HornTuple {
    type Error = Error;

    fn try_from(raw: RawTuple) -> Result<Self> {
        if raw.j.len() != raw.m {
            return Err(Error::DimensionMismatch(format!("m = {} but {} J sets given", raw.m, raw.j.len())));
        }
        let t = HornTuple::new(raw.n, raw.i, raw.j)?;
        if t.r() != raw.r {
            return Err(Error::DimensionMismatch(format!("r = {} but sets have cardinality {}", raw.r, t.r())));
        }
        Ok(t)
    }
}

impl From<HornTuple> for RawTuple {
    fn from(t: HornTuple) -> Self {
        RawTuple { m: t.m(), n: t.n, r: t.r(), i: t.i, j: t.j }
    }
}

impl HornTuple {
    pub fn new(n: usize, i: IndexSet, j: Vec<IndexSet>) -> Result<Self> {
        if j.is_empty() {
            return Err(Error::DimensionMismatch("at least one J set is required".into()));
        }
        let r = i.len();
        if j.iter().any(|s| s.len() != r) {
            return Err(Error::DimensionMismatch(format!("all sets must have cardinality {r}")));
        }
        for s in std::iter::once(&i).chain(&j) {
            if let Some(e) = s.max_element().filter(|&e| e > n) {
                return Err(Error::OutOfRange { element: e, bound: n });
            }
        }
        Ok(Self { n, i, j })
    }

    /// Convenience constructor from plain vectors; panics on invalid input.
    pub fn from_vecs(n: usize, i: Vec<usize>, j: Vec<Vec<usize>>) -> Self {
        let i = IndexSet::new(i).expect("valid I");
        let j = j.into_iter().map(|s| IndexSet::new(s).expect("valid J")).collect();
        Self::new(n, i, j).expect("valid tuple")
    }

    pub fn empty(n: usize, m: usize) -> Self {
        Self { n, i: IndexSet::empty(), j: vec![IndexSet::empty(); m] }
    }

    /// `([N], …, [N])`.
    pub fn full(n: usize, m: usize) -> Self {
        Self { n, i: IndexSet::range(n), j: vec![IndexSet::range(n); m] }
    }

    pub fn m(&self) -> usize {
        self.j.len()
    }

    pub fn r(&self) -> usize {
        self.i.len()
    }

    /// `w(I) − Σ_k w(J⁽ᵏ⁾)`; zero for members of T, nonnegative for T̄.
    pub fn weight_excess(&self) -> i64 {
        self.i.weight() as i64 - self.j.iter().map(|s| s.weight() as i64).sum::<i64>()
    }

    /// Same sets viewed inside a different ambient size.
    pub fn with_ambient(&self, n: usize) -> Result<Self> {
        Self::new(n, self.i.clone(), self.j.clone())
    }

    /// The dual tuple `([N]∖I_sym, [N]∖J⁽¹⁾_sym, …)` of cardinality `N − r`.
    pub fn dual(&self) -> HornTuple {
        let n = self.n;
        let d = |s: &IndexSet| sym(s, n).expect("subset of [N]").complement_in(n);
        HornTuple { n, i: d(&self.i), j: self.j.iter().map(d).collect() }
    }
}

impl PartialOrd for HornTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by ambient size, cardinality, then lexicographically on the sets.
impl Ord for HornTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.r(), &self.i, &self.j).cmp(&(other.n, other.r(), &other.i, &other.j))
    }
}

impl fmt::Display for HornTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.i)?;
        for s in &self.j {
            write!(f, ",{s}")?;
        }
        write!(f, ")")
    }
}

/// `π(I) = (I(r)−r ≥ … ≥ I(1)−1)`.
pub fn pi(set: &IndexSet) -> Partition {
    let r = set.len();
    Partition((1..=r).rev().map(|l| set.at(l) - l).collect())
}

/// `I_sym = {N+1−i : i ∈ I}`.
pub fn sym(set: &IndexSet, n: usize) -> Result<IndexSet> {
    if let Some(e) = set.max_element().filter(|&e| e > n) {
        return Err(Error::OutOfRange { element: e, bound: n });
    }
    Ok(IndexSet(set.as_slice().iter().rev().map(|&i| n + 1 - i).collect()))
}

/// The `p` smallest positive integers not in `set`.
pub fn complement_prefix(set: &IndexSet, p: usize) -> IndexSet {
    IndexSet((1..).filter(|x| !set.contains(*x)).take(p).collect())
}

/// `I∘I′ = {I(ℓ) : ℓ ∈ I′}`.
pub fn compose(set: &IndexSet, inner: &IndexSet) -> Result<IndexSet> {
    if let Some(e) = inner.max_element().filter(|&e| e > set.len()) {
        return Err(Error::OutOfRange { element: e, bound: set.len() });
    }
    Ok(IndexSet(inner.iter().map(|l| set.at(l)).collect()))
}

/// Shifts the largest `Σq_k` elements of `I` and the largest `q_k` elements
/// of each `J⁽ᵏ⁾` up by `shift`, landing in `T_r^{N+shift}`.
pub fn insert_gaps(t: &HornTuple, q: &[usize], shift: usize) -> Result<HornTuple> {
    if q.len() != t.m() {
        return Err(Error::DimensionMismatch(format!("{} shift counts for m = {}", q.len(), t.m())));
    }
    let r = t.r();
    let total: usize = q.iter().sum();
    if total > r {
        return Err(Error::ShiftOverflow { total, r });
    }
    let lift = |s: &IndexSet, count: usize| {
        IndexSet(s.iter().enumerate().map(|(k, e)| if k + 1 > r - count { e + shift } else { e }).collect())
    };
    Ok(HornTuple { n: t.n + shift, i: lift(&t.i, total), j: t.j.iter().zip(q).map(|(s, &qk)| lift(s, qk)).collect() })
}

/// `(I∘I′, J⁽¹⁾∘J′⁽¹⁾, …)` for `t` of cardinality `r` and `inner` with ambient size `r`.
pub fn compose_tuples(t: &HornTuple, inner: &HornTuple) -> Result<HornTuple> {
    if inner.n != t.r() || inner.m() != t.m() {
        return Err(Error::DimensionMismatch(format!(
            "inner tuple has ambient {} and m = {}, expected {} and {}",
            inner.n,
            inner.m(),
            t.r(),
            t.m()
        )));
    }
    Ok(HornTuple {
        n: t.n,
        i: compose(&t.i, &inner.i)?,
        j: t.j.iter().zip(&inner.j).map(|(a, b)| compose(a, b)).collect::<Result<_>>()?,
    })
}

/// `I″ = I ∪ (I^c∘I′)` and likewise for each `J`, complements within `[N]`.
pub fn union_tuples(t: &HornTuple, other: &HornTuple) -> Result<HornTuple> {
    if other.n != t.n - t.r() || other.m() != t.m() {
        return Err(Error::DimensionMismatch(format!(
            "second tuple has ambient {} and m = {}, expected {} and {}",
            other.n,
            other.m(),
            t.n - t.r(),
            t.m()
        )));
    }
    let n = t.n;
    let merge = |a: &IndexSet, b: &IndexSet| -> Result<IndexSet> { Ok(a.union(&compose(&a.complement_in(n), b)?)) };
    Ok(HornTuple {
        n,
        i: merge(&t.i, &other.i)?,
        j: t.j.iter().zip(&other.j).map(|(a, b)| merge(a, b)).collect::<Result<_>>()?,
    })
}

/// All `r`-subsets of `[n]` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<IndexSet> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=r).collect();
    loop {
        out.push(IndexSet(cur.clone()));
        // advance to the next combination
        let mut k = r;
        while k > 0 && cur[k - 1] == n - r + k {
            k -= 1;
        }
        if k == 0 {
            return out;
        }
        cur[k - 1] += 1;
        for t in k..r {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.to_vec()).unwrap()
    }

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pi_examples() {
        assert_eq!(pi(&IndexSet::range(4)), part(&[0, 0, 0, 0]));
        assert_eq!(pi(&IndexSet::range(4)), Partition::empty());
        assert_eq!(pi(&set(&[2, 5, 6])), part(&[3, 3, 1]));
        assert_eq!(pi(&set(&[2])), part(&[1]));
        assert_eq!(pi(&set(&[2, 5, 6])).raw_parts().len(), 3);
    }

    #[test]
    fn sym_examples() {
        assert_eq!(sym(&set(&[1, 3]), 4).unwrap(), set(&[2, 4]));
        assert_eq!(sym(&IndexSet::range(5), 5).unwrap(), IndexSet::range(5));
        assert_eq!(sym(&set(&[2]), 2).unwrap(), set(&[1]));
        assert!(matches!(sym(&set(&[5]), 4), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn complement_prefix_examples() {
        assert_eq!(complement_prefix(&IndexSet::empty(), 3), set(&[1, 2, 3]));
        assert_eq!(complement_prefix(&set(&[2, 4]), 3), set(&[1, 3, 5]));
        assert_eq!(complement_prefix(&set(&[1, 2, 3]), 1), set(&[4]));
        assert_eq!(complement_prefix(&set(&[1, 2]), 0), IndexSet::empty());
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(&set(&[2, 3]), &set(&[1])).unwrap(), set(&[2]));
        let i = set(&[3, 5, 9]);
        assert_eq!(compose(&i, &IndexSet::range(3)).unwrap(), i);
        assert_eq!(compose(&i, &set(&[2, 3])).unwrap(), set(&[5, 9]));
        assert!(compose(&i, &set(&[4])).is_err());
    }

    #[test]
    fn insert_gaps_examples() {
        let t = HornTuple::from_vecs(2, vec![2], vec![vec![1], vec![2]]);
        let g = insert_gaps(&t, &[0, 1], 2).unwrap();
        assert_eq!(g, HornTuple::from_vecs(4, vec![4], vec![vec![1], vec![4]]));

        assert_eq!(insert_gaps(&t, &[0, 0], 0).unwrap(), t);

        let one = HornTuple::from_vecs(1, vec![1], vec![vec![1], vec![1]]);
        let g = insert_gaps(&one, &[1, 0], 1).unwrap();
        assert_eq!(g, HornTuple::from_vecs(2, vec![2], vec![vec![2], vec![1]]));

        assert!(matches!(insert_gaps(&one, &[1, 1], 1), Err(Error::ShiftOverflow { total: 2, r: 1 })));
    }

    #[test]
    fn compose_tuples_examples() {
        let t = HornTuple::from_vecs(3, vec![2, 3], vec![vec![1, 3], vec![1, 3]]);
        let inner = HornTuple::from_vecs(2, vec![1], vec![vec![1], vec![1]]);
        assert_eq!(compose_tuples(&t, &inner).unwrap(), HornTuple::from_vecs(3, vec![2], vec![vec![1], vec![1]]));
        assert_eq!(compose_tuples(&t, &HornTuple::full(2, 2)).unwrap(), t);
        let inner = HornTuple::from_vecs(2, vec![2], vec![vec![2], vec![1]]);
        assert_eq!(compose_tuples(&t, &inner).unwrap(), HornTuple::from_vecs(3, vec![3], vec![vec![3], vec![1]]));
        let bad = HornTuple::from_vecs(3, vec![1], vec![vec![1], vec![1]]);
        assert!(matches!(compose_tuples(&t, &bad), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn union_tuples_examples() {
        let t = HornTuple::from_vecs(3, vec![1], vec![vec![1], vec![1]]);
        let other = HornTuple::from_vecs(2, vec![1], vec![vec![1], vec![1]]);
        assert_eq!(
            union_tuples(&t, &other).unwrap(),
            HornTuple::from_vecs(3, vec![1, 2], vec![vec![1, 2], vec![1, 2]])
        );
        assert_eq!(union_tuples(&t, &HornTuple::empty(2, 2)).unwrap(), t);

        let t = HornTuple::from_vecs(3, vec![2], vec![vec![1], vec![2]]);
        let other = HornTuple::from_vecs(2, vec![2], vec![vec![1], vec![2]]);
        assert_eq!(
            union_tuples(&t, &other).unwrap(),
            HornTuple::from_vecs(3, vec![2, 3], vec![vec![1, 2], vec![2, 3]])
        );
        assert!(union_tuples(&t, &HornTuple::empty(3, 2)).is_err());
    }

    #[test]
    fn partition_trailing_zeros() {
        assert_eq!(part(&[2, 1, 0, 0]), part(&[2, 1]));
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(part(&[2, 1]).is_contained_in(&part(&[3, 1, 1])));
        assert!(!part(&[2, 2]).is_contained_in(&part(&[3, 1])));
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::new(vec![0, 1]).is_err());
        assert!(IndexSet::new(vec![2, 2]).is_err());
        assert!(IndexSet::new(vec![3, 1]).is_err());
        assert_eq!(IndexSet::from_unsorted(vec![3, 1]).unwrap(), set(&[1, 3]));
    }

    #[test]
    fn tuple_json_form() {
        let t = HornTuple::from_vecs(3, vec![2, 3], vec![vec![1, 3], vec![1, 3]]);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"m":2,"N":3,"r":2,"I":[2,3],"J":[[1,3],[1,3]]}"#);
        let back: HornTuple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<HornTuple>(r#"{"m":2,"N":2,"r":1,"I":[3],"J":[[1],[1]]}"#).is_err());
        assert!(serde_json::from_str::<HornTuple>(r#"{"m":1,"N":2,"r":1,"I":[1],"J":[[1],[1]]}"#).is_err());
    }

    #[test]
    fn subsets_counts() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(3, 0), vec![IndexSet::empty()]);
        assert_eq!(subsets(3, 3), vec![IndexSet::range(3)]);
        assert!(subsets(2, 3).is_empty());
    }

    #[test]
    fn weight_and_sym_identity_exhaustive() {
        for n in 0..=8 {
            for r in 0..=n {
                for s in subsets(n, r) {
                    let total = pi(&s).size() + pi(&sym(&s, n).unwrap()).size();
                    assert_eq!(total, r * (n - r), "I = {s}, N = {n}");
                    assert_eq!(s.weight(), pi(&s).size());
                }
            }
        }
    }

    #[test]
    fn complement_prefix_is_initial_segment_of_complement() {
        for n in 0..=6 {
            for r in 0..=n {
                for s in subsets(n, r) {
                    for p in 0..=4 {
                        let c = complement_prefix(&s, p);
                        assert_eq!(c.len(), p);
                        assert!(c.iter().all(|x| !s.contains(x)));
                        let rest_min = (1..).find(|x| !s.contains(*x) && !c.contains(*x)).unwrap();
                        assert!(c.iter().all(|x| x < rest_min));
                    }
                }
            }
        }
    }
}
