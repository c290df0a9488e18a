//! Spectra (finite and two-sided) and evaluation of every inequality family:
//! ordinary Horn inequalities, their complement form, the reverse form used
//! for upper data, the extended inequalities mixing positive and negative
//! eigenvalues, and the reverse inequalities for positive operators.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{complement_prefix, sym, HornTuple, IndexSet};
use crate::error::{Error, Result};
use crate::horn_sets::{HornCatalog, HornSetKind};

/// Slack below which an inequality counts as violated, and within which
/// (in absolute value) it counts as tight.
pub const TOL: f64 = 1e-9;

/// Serde adapter writing `±∞` as the strings `"inf"` / `"-inf"`.
pub mod ext_real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn to_repr(x: f64) -> serde_json::Value {
        if x == f64::INFINITY {
            "inf".into()
        } else if x == f64::NEG_INFINITY {
            "-inf".into()
        } else {
            serde_json::json!(x)
        }
    }

    fn parse(r: Repr) -> Result<f64, String> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(s) => match s.as_str() {
                "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
                "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
                other => other.parse().map_err(|_| format!("not a number: {other:?}")),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        parse(Repr::deserialize(d)?).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            xs.iter().map(|&x| to_repr(x)).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(|r| parse(r).map_err(serde::de::Error::custom)).collect()
        }
    }
}

/// A weakly decreasing vector of extended reals, indexed from 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExtVec", into = "ExtVec")]
pub struct Spectrum(Vec<f64>);

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct ExtVec(#[serde(with = "ext_real::vec")] Vec<f64>);

impl TryFrom<ExtVec> for Spectrum {
    type Error = Error;

    fn try_from(v: ExtVec) -> Result<Self> {
        Spectrum::new(v.0)
    }
}

impl From<Spectrum> for ExtVec {
    fn from(s: Spectrum) -> Self {
        ExtVec(s.0)
    }
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|x| x.is_nan()) {
            return Err(Error::Precondition("spectrum contains NaN".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition(format!("spectrum is not decreasing: {values:?}")));
        }
        Ok(Spectrum(values))
    }

    /// Sorts the values into decreasing order first.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum::new(values)
    }

    pub fn zeros(n: usize) -> Self {
        Spectrum(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry `i`, 1-based.
    pub fn at(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `(α_{i₁}, …, α_{i_r})` for `I = {i₁ < … < i_r}`.
    pub fn restrict(&self, set: &IndexSet) -> Vec<f64> {
        set.iter().map(|i| self.at(i)).collect()
    }

    /// Two-sided view of a finite spectrum: positive entries descending,
    /// negative entries from the bottom up.
    pub fn to_two_sided(&self) -> TwoSidedSpectrum {
        TwoSidedSpectrum::from_eigenvalues(&self.0)
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Finite-support element of `c↓0↑`: `pos[t-1] = α_t` and `neg[t-1] = α_{-t}`,
/// with zero beyond the stored lengths.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawTwoSided", into = "RawTwoSided")]
pub struct TwoSidedSpectrum {
    pos: Vec<f64>,
    neg: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawTwoSided {
    #[serde(with = "ext_real::vec", default)]
    pos: Vec<f64>,
    #[serde(with = "ext_real::vec", default)]
    neg: Vec<f64>,
}

impl TryFrom<RawTwoSided> for TwoSidedSpectrum {
    type Error = Error;

    fn try_from(r: RawTwoSided) -> Result<Self> {
        TwoSidedSpectrum::new(r.pos, r.neg)
    }
}

impl From<TwoSidedSpectrum> for RawTwoSided {
    fn from(s: TwoSidedSpectrum) -> Self {
        RawTwoSided { pos: s.pos, neg: s.neg }
    }
}

impl TwoSidedSpectrum {
    pub fn new(pos: Vec<f64>, neg: Vec<f64>) -> Result<Self> {
        Self::new_unchecked_sign(pos, neg).and_then(|s| {
            if s.pos.iter().any(|&x| x < 0.0) || s.neg.iter().any(|&x| x > 0.0) {
                Err(Error::Precondition("positive part must be ≥ 0 and negative part ≤ 0".into()))
            } else {
                Ok(s)
            }
        })
    }

    fn new_unchecked_sign(pos: Vec<f64>, neg: Vec<f64>) -> Result<Self> {
        if pos.iter().chain(&neg).any(|x| x.is_nan()) {
            return Err(Error::Precondition("spectrum contains NaN".into()));
        }
        if pos.windows(2).any(|w| w[0] < w[1]) || neg.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Precondition(format!("two-sided spectrum out of order: pos {pos:?}, neg {neg:?}")));
        }
        Ok(TwoSidedSpectrum { pos, neg })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Splits an arbitrary list of eigenvalues into its two-sided sequence.
    pub fn from_eigenvalues(values: &[f64]) -> Self {
        let mut pos: Vec<f64> = values.iter().copied().filter(|&x| x > 0.0).collect();
        let mut neg: Vec<f64> = values.iter().copied().filter(|&x| x < 0.0).collect();
        pos.sort_by(|a, b| b.total_cmp(a));
        neg.sort_by(|a, b| a.total_cmp(b));
        TwoSidedSpectrum { pos, neg }
    }

    pub fn pos(&self) -> &[f64] {
        &self.pos
    }

    pub fn neg(&self) -> &[f64] {
        &self.neg
    }

    /// `α_n` for `n ≠ 0`; zero beyond the stored support.
    pub fn lookup(&self, n: i64) -> f64 {
        let (side, k) = if n > 0 { (&self.pos, n) } else { (&self.neg, -n) };
        assert!(k != 0, "two-sided index 0 is not defined");
        side.get(k as usize - 1).copied().unwrap_or(0.0)
    }

    /// `(ᾱ)_k = −α_{−k}`, the sequence of `−A`.
    pub fn bar(&self) -> Self {
        TwoSidedSpectrum { pos: self.neg.iter().map(|x| -x).collect(), neg: self.pos.iter().map(|x| -x).collect() }
    }

    /// Drops stored trailing zeros.
    pub fn trimmed(&self) -> Self {
        let trim = |v: &[f64]| {
            let end = v.iter().rposition(|&x| x != 0.0).map_or(0, |p| p + 1);
            v[..end].to_vec()
        };
        TwoSidedSpectrum { pos: trim(&self.pos), neg: trim(&self.neg) }
    }

    pub fn is_finite(&self) -> bool {
        self.pos.iter().chain(&self.neg).all(|x| x.is_finite())
    }

    /// Positive sequence embedded with zero negative part.
    pub fn positive(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Vec::new())
    }

    /// Largest `|n|` at which a nonzero entry is stored.
    pub fn support(&self) -> usize {
        let t = self.trimmed();
        t.pos.len().max(t.neg.len())
    }
}

/// Which inequality a record evaluates.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `Σ_{I} α ≤ Σ_k Σ_{J⁽ᵏ⁾} β⁽ᵏ⁾`.
    Horn,
    /// `Σ_{i∉I_sym} α ≤ Σ_k Σ_{j∉J⁽ᵏ⁾_sym} β⁽ᵏ⁾`, the complement form.
    HornSym,
    /// `Σ_{i∉I} α ≥ Σ_k Σ_{j∉J⁽ᵏ⁾} β⁽ᵏ⁾`, required of upper interpolation data.
    Reverse,
    /// Two-sided inequality with `q_k` top indices moved to the negative side.
    Extended,
    /// The extended inequality for the barred data, negated back so that
    /// `lhs ≥ rhs` is required.
    ExtendedReverse,
    /// `Σ_{I^c_q} α ≥ Σ_k Σ_{J⁽ᵏ⁾ᶜ_{q_k}} β⁽ᵏ⁾` for positive sequences.
    ReversePositive,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Horn => "horn",
            Family::HornSym => "horn_sym",
            Family::Reverse => "reverse",
            Family::Extended => "extended",
            Family::ExtendedReverse => "extended_reverse",
            Family::ReversePositive => "reverse_positive",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Satisfied when `lhs ≤ rhs`.
    Le,
    /// Satisfied when `lhs ≥ rhs`.
    Ge,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Violated,
    Tight,
    Strict,
}

/// One evaluated inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub family: Family,
    pub tuple: HornTuple,
    pub q: Vec<usize>,
    #[serde(with = "ext_real")]
    pub lhs: f64,
    #[serde(with = "ext_real")]
    pub rhs: f64,
    pub direction: Direction,
    /// An infinite term makes the inequality hold trivially.
    pub auto_satisfied: bool,
}

impl InequalityRecord {
    /// Signed margin; negative means violated. `+∞` when auto-satisfied.
    pub fn slack(&self) -> f64 {
        if self.auto_satisfied {
            return f64::INFINITY;
        }
        match self.direction {
            Direction::Le => self.rhs - self.lhs,
            Direction::Ge => self.lhs - self.rhs,
        }
    }

    pub fn status(&self) -> Status {
        self.status_at(TOL)
    }

    pub fn status_at(&self, tol: f64) -> Status {
        let s = self.slack();
        if s < -tol {
            Status::Violated
        } else if s <= tol {
            Status::Tight
        } else {
            Status::Strict
        }
    }

    pub fn is_violated(&self) -> bool {
        self.status() == Status::Violated
    }

    pub fn csv_header() -> &'static str {
        "family,N,r,tuple,q,lhs,rhs,slack"
    }

    /// CSV row; sets are written space-separated and joined by `|`.
    pub fn csv_row(&self) -> String {
        let set = |s: &IndexSet| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let tuple = std::iter::once(&self.tuple.i).chain(&self.tuple.j).map(set).collect::<Vec<_>>().join("|");
        let q = self.q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        format!(
            "{},{},{},{},{},{},{},{}",
            self.family,
            self.tuple.n,
            self.tuple.r(),
            tuple,
            q,
            self.lhs,
            self.rhs,
            self.slack()
        )
    }
}

/// Accumulates one side of an inequality, tracking infinite terms.
#[derive(Default)]
struct Side {
    sum: f64,
    plus_inf: bool,
    minus_inf: bool,
}

impl Side {
    fn add(&mut self, x: f64) {
        if x == f64::INFINITY {
            self.plus_inf = true;
        } else if x == f64::NEG_INFINITY {
            self.minus_inf = true;
        } else {
            self.sum += x;
        }
    }

    fn value(&self) -> f64 {
        match (self.plus_inf, self.minus_inf) {
            (true, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            (true, true) => f64::NAN,
            (false, false) => self.sum,
        }
    }
}

fn finish(
    family: Family,
    tuple: &HornTuple,
    q: &[usize],
    lhs: Side,
    rhs: Side,
    direction: Direction,
) -> Result<InequalityRecord> {
    // an infinity is harmless when it pushes its side the satisfying way
    let (good_l, bad_l, good_r, bad_r) = match direction {
        Direction::Le => (lhs.minus_inf, lhs.plus_inf, rhs.plus_inf, rhs.minus_inf),
        Direction::Ge => (lhs.plus_inf, lhs.minus_inf, rhs.minus_inf, rhs.plus_inf),
    };
    if bad_l || bad_r {
        return Err(Error::InfinityPlacement(format!("{family} inequality for {tuple}")));
    }
    Ok(InequalityRecord {
        family,
        tuple: tuple.clone(),
        q: q.to_vec(),
        lhs: lhs.value(),
        rhs: rhs.value(),
        direction,
        auto_satisfied: good_l || good_r,
    })
}

fn check_lengths(t: &HornTuple, alpha: &Spectrum, betas: &[Spectrum]) -> Result<()> {
    if betas.len() != t.m() {
        return Err(Error::DimensionMismatch(format!(
            "tuple has m = {} but {} summand spectra were given",
            t.m(),
            betas.len()
        )));
    }
    if std::iter::once(alpha).chain(betas).any(|s| s.len() < t.n) {
        return Err(Error::DimensionMismatch(format!("spectra shorter than N = {}", t.n)));
    }
    Ok(())
}

/// `Σ_{ℓ} α_{I(ℓ)} ≤ Σ_k Σ_ℓ β⁽ᵏ⁾_{J⁽ᵏ⁾(ℓ)}`.
pub fn eval_horn(t: &HornTuple, alpha: &Spectrum, betas: &[Spectrum]) -> Result<InequalityRecord> {
    check_lengths(t, alpha, betas)?;
    let mut lhs = Side::default();
    let mut rhs = Side::default();
    t.i.iter().for_each(|i| lhs.add(alpha.at(i)));
    for (j, b) in t.j.iter().zip(betas) {
        j.iter().for_each(|x| rhs.add(b.at(x)));
    }
    finish(Family::Horn, t, &vec![0; t.m()], lhs, rhs, Direction::Le)
}

fn complement_sums(
    family: Family,
    t: &HornTuple,
    sets: (IndexSet, Vec<IndexSet>),
    alpha: &Spectrum,
    betas: &[Spectrum],
    direction: Direction,
) -> Result<InequalityRecord> {
    let n = t.n;
    let mut lhs = Side::default();
    let mut rhs = Side::default();
    sets.0.complement_in(n).iter().for_each(|i| lhs.add(alpha.at(i)));
    for (j, b) in sets.1.iter().zip(betas) {
        j.complement_in(n).iter().for_each(|x| rhs.add(b.at(x)));
    }
    finish(family, t, &vec![0; t.m()], lhs, rhs, direction)
}

/// `Σ_{i∉I_sym} α_i ≤ Σ_k Σ_{j∉J⁽ᵏ⁾_sym} β⁽ᵏ⁾_j`.
pub fn eval_horn_sym(t: &HornTuple, alpha: &Spectrum, betas: &[Spectrum]) -> Result<InequalityRecord> {
    check_lengths(t, alpha, betas)?;
    let n = t.n;
    let s = |x: &IndexSet| sym(x, n).expect("tuple sets lie in [N]");
    complement_sums(Family::HornSym, t, (s(&t.i), t.j.iter().map(s).collect()), alpha, betas, Direction::Le)
}

/// `Σ_{i∉I} α_i ≥ Σ_k Σ_{j∉J⁽ᵏ⁾} β⁽ᵏ⁾_j`.
pub fn eval_reverse(t: &HornTuple, alpha: &Spectrum, betas: &[Spectrum]) -> Result<InequalityRecord> {
    check_lengths(t, alpha, betas)?;
    complement_sums(Family::Reverse, t, (t.i.clone(), t.j.clone()), alpha, betas, Direction::Ge)
}

fn q_total(t: &HornTuple, q: &[usize]) -> Result<usize> {
    if q.len() != t.m() {
        return Err(Error::DimensionMismatch(format!("{} split counts for m = {}", q.len(), t.m())));
    }
    let total: usize = q.iter().sum();
    if total > t.r() {
        return Err(Error::ShiftOverflow { total, r: t.r() });
    }
    Ok(total)
}

/// Two-sided sum of `α` over `I`, the top `shift` elements taken at `I(ℓ) − N − 1`.
fn extended_sum(side: &mut Side, set: &IndexSet, shift: usize, n: usize, s: &TwoSidedSpectrum) {
    let r = set.len();
    for (l, i) in set.iter().enumerate() {
        let idx = if l < r - shift { i as i64 } else { i as i64 - n as i64 - 1 };
        side.add(s.lookup(idx));
    }
}

fn extended_sides(
    t: &HornTuple,
    q: &[usize],
    alpha: &TwoSidedSpectrum,
    betas: &[TwoSidedSpectrum],
) -> Result<(Side, Side)> {
    let total = q_total(t, q)?;
    if betas.len() != t.m() {
        return Err(Error::DimensionMismatch(format!("{} spectra for m = {}", betas.len(), t.m())));
    }
    let mut lhs = Side::default();
    let mut rhs = Side::default();
    extended_sum(&mut lhs, &t.i, total, t.n, alpha);
    for ((j, &qk), b) in t.j.iter().zip(q).zip(betas) {
        extended_sum(&mut rhs, j, qk, t.n, b);
    }
    Ok((lhs, rhs))
}

/// The extended Horn inequality for `(t, q)` on two-sided sequences.
pub fn eval_extended(
    t: &HornTuple,
    q: &[usize],
    alpha: &TwoSidedSpectrum,
    betas: &[TwoSidedSpectrum],
) -> Result<InequalityRecord> {
    let (lhs, rhs) = extended_sides(t, q, alpha, betas)?;
    finish(Family::Extended, t, q, lhs, rhs, Direction::Le)
}

/// The extended inequality for `(ᾱ, β̄⁽ᵏ⁾)`, reported negated (`lhs ≥ rhs`).
pub fn eval_extended_reverse(
    t: &HornTuple,
    q: &[usize],
    alpha: &TwoSidedSpectrum,
    betas: &[TwoSidedSpectrum],
) -> Result<InequalityRecord> {
    let bars: Vec<_> = betas.iter().map(TwoSidedSpectrum::bar).collect();
    let (l, r) = extended_sides(t, q, &alpha.bar(), &bars)?;
    let neg = |s: Side| Side { sum: -s.sum, plus_inf: s.minus_inf, minus_inf: s.plus_inf };
    finish(Family::ExtendedReverse, t, q, neg(l), neg(r), Direction::Ge)
}

/// `Σ_{i∈I^c_q} α_i ≥ Σ_k Σ_{j∈J⁽ᵏ⁾ᶜ_{q_k}} β⁽ᵏ⁾_j` with `q = Σ q_k`; entries
/// beyond the stored lengths are zero.
pub fn eval_reverse_positive(
    t: &HornTuple,
    q: &[usize],
    alpha: &Spectrum,
    betas: &[Spectrum],
) -> Result<InequalityRecord> {
    if q.len() != t.m() || betas.len() != t.m() {
        return Err(Error::DimensionMismatch("split counts, spectra and m disagree".into()));
    }
    let get = |s: &Spectrum, i: usize| s.values().get(i - 1).copied().unwrap_or(0.0);
    let mut lhs = Side::default();
    let mut rhs = Side::default();
    complement_prefix(&t.i, q.iter().sum()).iter().for_each(|i| lhs.add(get(alpha, i)));
    for ((j, &qk), b) in t.j.iter().zip(q).zip(betas) {
        complement_prefix(j, qk).iter().for_each(|x| rhs.add(get(b, x)));
    }
    finish(Family::ReversePositive, t, q, lhs, rhs, Direction::Ge)
}

/// All `(q₁, …, q_m)` with `Σ q_k ≤ bound`, in lexicographic order.
pub fn q_splits(m: usize, bound: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(m, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, bound, &mut Vec::with_capacity(m), &mut out);
    out
}

fn sort_records(mut v: Vec<InequalityRecord>) -> Vec<InequalityRecord> {
    v.sort_by(|a, b| (&a.tuple, &a.q, a.family).cmp(&(&b.tuple, &b.q, b.family)));
    v.dedup_by(|a, b| a.tuple == b.tuple && a.q == b.q && a.family == b.family);
    v
}

fn check_catalog(cat: &HornCatalog, m: usize) -> Result<()> {
    if cat.m() != m {
        return Err(Error::DimensionMismatch(format!("catalog built for m = {}, instance has m = {m}", cat.m())));
    }
    Ok(())
}

/// Every record of one finite family over all `t ∈ kind_r^N`, `0 ≤ r ≤ N`.
pub fn evaluate_finite(
    cat: &HornCatalog,
    family: Family,
    alpha: &Spectrum,
    betas: &[Spectrum],
    n: usize,
    kind: HornSetKind,
) -> Result<Vec<InequalityRecord>> {
    check_catalog(cat, betas.len())?;
    let eval = match family {
        Family::Horn => eval_horn,
        Family::HornSym => eval_horn_sym,
        Family::Reverse => eval_reverse,
        other => return Err(Error::Precondition(format!("{other} is not a finite family"))),
    };
    let tables = (0..=n).map(|r| cat.enumerate(kind, n, r)).collect::<Result<Vec<_>>>()?;
    let records =
        tables.par_iter().flat_map_iter(|tab| tab.iter().map(|t| eval(t, alpha, betas))).collect::<Result<Vec<_>>>()?;
    Ok(sort_records(records))
}

fn violations(records: Vec<InequalityRecord>) -> Vec<InequalityRecord> {
    records.into_iter().filter(InequalityRecord::is_violated).collect()
}

/// Violated Horn inequalities at size `N`; empty iff the Horn condition holds.
pub fn scan_finite(
    cat: &HornCatalog,
    alpha: &Spectrum,
    betas: &[Spectrum],
    n: usize,
    kind: HornSetKind,
) -> Result<Vec<InequalityRecord>> {
    Ok(violations(evaluate_finite(cat, Family::Horn, alpha, betas, n, kind)?))
}

/// Violations of the complement form.
pub fn scan_finite_sym(
    cat: &HornCatalog,
    alpha: &Spectrum,
    betas: &[Spectrum],
    n: usize,
    kind: HornSetKind,
) -> Result<Vec<InequalityRecord>> {
    Ok(violations(evaluate_finite(cat, Family::HornSym, alpha, betas, n, kind)?))
}

/// Violations of `Σ_{i∉I} α ≥ Σ_k Σ_{j∉J⁽ᵏ⁾} β⁽ᵏ⁾`.
pub fn scan_reverse_finite(
    cat: &HornCatalog,
    alpha: &Spectrum,
    betas: &[Spectrum],
    n: usize,
) -> Result<Vec<InequalityRecord>> {
    Ok(violations(evaluate_finite(cat, Family::Reverse, alpha, betas, n, HornSetKind::T)?))
}

/// Truncation orders for the infinite scans.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Every cell `(N, r)` with `N ≤ n_max` is scanned.
    pub n_max: usize,
    /// The trivial cells `r ∈ {0, N}` are scanned up to this larger size.
    pub trace_n_max: usize,
    /// Largest `q` for the reverse positive family; `N − r` when unset.
    pub reverse_q_max: Option<usize>,
}

impl ScanConfig {
    pub fn new(n_max: usize) -> Self {
        ScanConfig { n_max, trace_n_max: n_max, reverse_q_max: None }
    }

    fn cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for n in 0..=self.n_max.max(self.trace_n_max) {
            for r in 0..=n {
                if n <= self.n_max || r == 0 || r == n {
                    out.push((n, r));
                }
            }
        }
        out
    }
}

fn scan_cells<F>(cat: &HornCatalog, cfg: &ScanConfig, per_tuple: F) -> Result<Vec<InequalityRecord>>
where
    F: Fn(&HornTuple) -> Result<Vec<InequalityRecord>> + Sync,
{
    let tables = cfg
        .cells()
        .into_iter()
        .map(|(n, r)| {
            if r == 0 {
                Ok(std::sync::Arc::new(vec![HornTuple::empty(n, cat.m())]))
            } else if r == n {
                Ok(std::sync::Arc::new(vec![HornTuple::full(n, cat.m())]))
            } else {
                cat.enumerate(HornSetKind::T, n, r)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let found = tables.par_iter().flat_map_iter(|tab| tab.iter().map(&per_tuple)).collect::<Result<Vec<_>>>()?;
    Ok(sort_records(found.into_iter().flatten().filter(InequalityRecord::is_violated).collect()))
}

/// Violated extended inequalities for `(α, β⁽ᵏ⁾)` and for the barred data,
/// over every cell of the configured truncation and every `q` with `Σq ≤ r`.
pub fn scan_extended(
    cat: &HornCatalog,
    alpha: &TwoSidedSpectrum,
    betas: &[TwoSidedSpectrum],
    cfg: &ScanConfig,
) -> Result<Vec<InequalityRecord>> {
    scan_extended_pair(cat, (alpha, betas), (alpha, betas), cfg)
}

/// Like [`scan_extended`], with the direct family evaluated on `lower` and the
/// barred family on `upper`.
pub fn scan_extended_pair(
    cat: &HornCatalog,
    lower: (&TwoSidedSpectrum, &[TwoSidedSpectrum]),
    upper: (&TwoSidedSpectrum, &[TwoSidedSpectrum]),
    cfg: &ScanConfig,
) -> Result<Vec<InequalityRecord>> {
    check_catalog(cat, lower.1.len())?;
    check_catalog(cat, upper.1.len())?;
    scan_cells(cat, cfg, |t| {
        let mut out = Vec::new();
        for q in q_splits(t.m(), t.r()) {
            out.push(eval_extended(t, &q, lower.0, lower.1)?);
            out.push(eval_extended_reverse(t, &q, upper.0, upper.1)?);
        }
        Ok(out)
    })
}

/// Violations for positive sequences: the Horn inequalities with any `q`
/// top indices dropped (`Σq ≤ r`, `q = 0` being the plain Horn family) and
/// the reverse positive family.
pub fn scan_positive(
    cat: &HornCatalog,
    alpha: &Spectrum,
    betas: &[Spectrum],
    cfg: &ScanConfig,
) -> Result<Vec<InequalityRecord>> {
    check_catalog(cat, betas.len())?;
    if std::iter::once(alpha).chain(betas).any(|s| s.values().iter().any(|&x| x < 0.0)) {
        return Err(Error::Precondition("positive scan needs nonnegative spectra".into()));
    }
    let a2 = TwoSidedSpectrum::positive(alpha.values().to_vec())?;
    let b2 = betas.iter().map(|b| TwoSidedSpectrum::positive(b.values().to_vec())).collect::<Result<Vec<_>>>()?;
    scan_cells(cat, cfg, |t| {
        let mut out = Vec::new();
        for q in q_splits(t.m(), t.r()) {
            let mut rec = eval_extended(t, &q, &a2, &b2)?;
            if q.iter().all(|&x| x == 0) {
                rec.family = Family::Horn;
            }
            out.push(rec);
        }
        let bound = cfg.reverse_q_max.unwrap_or(t.n - t.r());
        for q in q_splits(t.m(), bound) {
            out.push(eval_reverse_positive(t, &q, alpha, betas)?);
        }
        Ok(out)
    })
}

/// `Σα − Σ_k Σβ⁽ᵏ⁾`.
pub fn trace_gap(alpha: &Spectrum, betas: &[Spectrum]) -> Result<f64> {
    if !alpha.is_finite() || betas.iter().any(|b| !b.is_finite()) {
        return Err(Error::InfinityPlacement("trace of a spectrum with infinite entries".into()));
    }
    Ok(alpha.sum() - betas.iter().map(Spectrum::sum).sum::<f64>())
}
