//! Recursive enumeration of the Horn sets `T_r^N(m+1)`, their relaxation
//! `T̄` (weight equality weakened to `≥`) and the subset `Ṫ` whose
//! iterated Littlewood–Richardson coefficient is exactly one.
//!
//! A tuple of `r`-subsets of `[N]` belongs to `T` when
//! `w(I) = Σ_k w(J⁽ᵏ⁾)` with `w(I) = Σ_ℓ (I(ℓ) − ℓ)`, and for every `s < r`
//! and every `(I′, J′…) ∈ T_s^r` the composed sets satisfy
//! `w(I∘I′) ≥ Σ_k w(J⁽ᵏ⁾∘J′⁽ᵏ⁾)` (weights taken relative to `1..s`).
//! Tables are memoized per `(kind, N, r)` cell and published once.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use once_cell::sync::Lazy;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{pi, subsets, HornTuple, IndexSet};
use crate::error::{Error, Result};
use crate::schur::{multi_lr_coeff, partitions_between, LrQuery};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HornSetKind {
    T,
    Tbar,
    Tdot,
}

impl fmt::Display for HornSetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HornSetKind::T => "T",
            HornSetKind::Tbar => "Tbar",
            HornSetKind::Tdot => "Tdot",
        })
    }
}

impl FromStr for HornSetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(HornSetKind::T),
            "Tbar" | "tbar" | "bar" => Ok(HornSetKind::Tbar),
            "Tdot" | "tdot" | "dot" => Ok(HornSetKind::Tdot),
            other => Err(Error::Precondition(format!("unknown Horn set kind {other:?}"))),
        }
    }
}

/// Desk-scale guards on enumeration.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_n: usize,
    pub max_candidates: u64,
}

impl Limits {
    pub fn default_for(m: usize) -> Self {
        let max_n = match m {
            0 | 1 => 12,
            2 => 8,
            3 => 6,
            _ => 5,
        };
        Limits { max_n, max_candidates: 200_000_000 }
    }

    pub fn unlimited() -> Self {
        Limits { max_n: usize::MAX, max_candidates: u64::MAX }
    }
}

type Table = Arc<Vec<HornTuple>>;

/// Write-once-per-cell cache of Horn set tables for a fixed `m`.
pub struct HornCatalog {
    m: usize,
    limits: Limits,
    cache_dir: Option<PathBuf>,
    cells: RwLock<HashMap<(HornSetKind, usize, usize), Table>>,
}

static SHARED: Lazy<Mutex<HashMap<usize, Arc<HornCatalog>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Environment variable naming the on-disk table cache.
pub const CACHE_DIR_ENV: &str = "HORN_CACHE_DIR";

impl fmt::Debug for HornCatalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HornCatalog")
            .field("m", &self.m)
            .field("limits", &self.limits)
            .field("cache_dir", &self.cache_dir)
            .finish_non_exhaustive()
    }
}

/// A precompiled inequality `w(I∘I′) ≥ Σ_k w(J⁽ᵏ⁾∘J′⁽ᵏ⁾)` from a smaller table.
struct Constraint {
    outer: Vec<usize>,
    inner: Vec<Vec<usize>>,
    offset: i64,
}

impl Constraint {
    fn from_tuple(t: &HornTuple) -> Self {
        let s = t.r() as i64;
        let m = t.m() as i64;
        Constraint {
            outer: t.i.iter().map(|l| l - 1).collect(),
            inner: t.j.iter().map(|j| j.iter().map(|l| l - 1).collect()).collect(),
            // Σ(a−ℓ) ≥ Σ_k Σ(b_k−ℓ)  ⇔  Σa − ΣΣb_k ≥ (1−m)·s(s+1)/2
            offset: (1 - m) * s * (s + 1) / 2,
        }
    }

    fn holds(&self, i: &[usize], js: &[&[usize]]) -> bool {
        let lhs: i64 = self.outer.iter().map(|&l| i[l] as i64).sum();
        let rhs: i64 = self.inner.iter().zip(js).map(|(idx, j)| idx.iter().map(|&l| j[l] as i64).sum::<i64>()).sum();
        lhs - rhs >= self.offset
    }
}

impl HornCatalog {
    pub fn new(m: usize) -> Self {
        Self::with_limits(m, Limits::default_for(m))
    }

    pub fn with_limits(m: usize, limits: Limits) -> Self {
        HornCatalog { m, limits, cache_dir: None, cells: RwLock::new(HashMap::new()) }
    }

    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    /// Process-wide catalog for `m` summands with default limits; honours
    /// [`CACHE_DIR_ENV`].
    pub fn shared(m: usize) -> Arc<HornCatalog> {
        let mut map = SHARED.lock().expect("catalog registry poisoned");
        map.entry(m)
            .or_insert_with(|| {
                let mut cat = HornCatalog::new(m);
                if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
                    cat.cache_dir = Some(PathBuf::from(dir));
                }
                Arc::new(cat)
            })
            .clone()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    /// Exact sorted list of `kind` tuples of `r`-subsets of `[n]`.
    pub fn enumerate(&self, kind: HornSetKind, n: usize, r: usize) -> Result<Table> {
        if r > n {
            return Err(Error::Precondition(format!("r = {r} exceeds N = {n}")));
        }
        if n > self.limits.max_n {
            return Err(Error::ResourceCap(format!(
                "N = {n} exceeds the cap {} for m = {}",
                self.limits.max_n, self.m
            )));
        }
        let key = (kind, n, r);
        if let Some(t) = self.cells.read().expect("catalog poisoned").get(&key) {
            return Ok(t.clone());
        }
        let table = match self.load(key)? {
            Some(t) => t,
            None => {
                let t = self.compute(kind, n, r)?;
                self.store(key, &t)?;
                t
            }
        };
        let mut cells = self.cells.write().expect("catalog poisoned");
        Ok(cells.entry(key).or_insert_with(|| Arc::new(table)).clone())
    }

    fn cache_path(&self, (kind, n, r): (HornSetKind, usize, usize)) -> Option<PathBuf> {
        self.cache_dir.as_deref().map(|d: &Path| d.join(format!("{kind}_m{}_N{n}_r{r}.json", self.m)))
    }

    fn load(&self, key: (HornSetKind, usize, usize)) -> Result<Option<Vec<HornTuple>>> {
        match self.cache_path(key) {
            Some(p) if p.exists() => Ok(Some(serde_json::from_slice(&std::fs::read(p)?)?)),
            _ => Ok(None),
        }
    }

    fn store(&self, key: (HornSetKind, usize, usize), table: &[HornTuple]) -> Result<()> {
        if let Some(p) = self.cache_path(key) {
            if let Some(dir) = p.parent() {
                std::fs::create_dir_all(dir)?;
            }
            // write then rename so concurrent readers never see partial files
            let tmp = p.with_extension(format!("tmp{}", std::process::id()));
            std::fs::write(&tmp, serde_json::to_vec(table)?)?;
            std::fs::rename(tmp, p)?;
        }
        Ok(())
    }

    fn compute(&self, kind: HornSetKind, n: usize, r: usize) -> Result<Vec<HornTuple>> {
        let m = self.m;
        if kind == HornSetKind::Tdot {
            let t = self.enumerate(HornSetKind::T, n, r)?;
            return Ok(t.iter().filter(|t| lr_multiplicity(t) == 1).cloned().collect());
        }
        if r == 0 {
            return Ok(vec![HornTuple::empty(n, m)]);
        }
        if r == n {
            return Ok(vec![HornTuple::full(n, m)]);
        }
        let constraints = self.constraints(r)?;
        let all = subsets(n, r);
        let mut by_weight: Vec<Vec<&IndexSet>> = vec![Vec::new(); r * (n - r) + 1];
        for s in &all {
            by_weight[s.weight()].push(s);
        }
        let exact = kind == HornSetKind::T;
        let seen = AtomicU64::new(0);
        let cap = self.limits.max_candidates;

        let found: Vec<Vec<HornTuple>> = all
            .par_iter()
            .map(|i| -> Result<Vec<HornTuple>> {
                let below: Vec<&IndexSet> = all.iter().filter(|j| j.pointwise_le(i)).collect();
                let mut out = Vec::new();
                let mut chosen: Vec<&IndexSet> = Vec::with_capacity(m);
                let ctx = Search {
                    i,
                    below: &below,
                    by_weight: &by_weight,
                    constraints: &constraints,
                    exact,
                    m,
                    n,
                    seen: &seen,
                    cap,
                };
                ctx.descend(i.weight(), &mut chosen, &mut out)?;
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut table: Vec<HornTuple> = found.into_iter().flatten().collect();
        table.sort();
        Ok(table)
    }

    /// Inequalities contributed by `T_s^r`, `1 ≤ s < r`, cheapest first.
    fn constraints(&self, r: usize) -> Result<Vec<Constraint>> {
        let mut out = Vec::new();
        for s in 1..r {
            for t in self.enumerate(HornSetKind::T, r, s)?.iter() {
                out.push(Constraint::from_tuple(t));
            }
        }
        Ok(out)
    }

    /// Membership by the recursive definition (or LR multiplicity for `Ṫ`).
    pub fn member(&self, kind: HornSetKind, t: &HornTuple) -> Result<bool> {
        if t.m() != self.m {
            return Err(Error::DimensionMismatch(format!("tuple has m = {}, catalog has m = {}", t.m(), self.m)));
        }
        let r = t.r();
        let excess = t.weight_excess();
        let weight_ok = match kind {
            HornSetKind::Tbar => excess >= 0,
            _ => excess == 0,
        };
        if !weight_ok {
            return Ok(false);
        }
        if r < t.n {
            let i = t.i.as_slice();
            let js: Vec<&[usize]> = t.j.iter().map(IndexSet::as_slice).collect();
            if !self.constraints(r)?.iter().all(|c| c.holds(i, &js)) {
                return Ok(false);
            }
        }
        Ok(kind != HornSetKind::Tdot || lr_multiplicity(t) == 1)
    }

    /// A member `t′ ∈ T_r^N` with `I′ ≤ I` and `J′⁽ᵏ⁾ ≥ J⁽ᵏ⁾` pointwise; ties
    /// broken by minimal `w(I′)`, then lexicographically.
    pub fn reduce_to_t(&self, t: &HornTuple) -> Result<HornTuple> {
        if !self.member(HornSetKind::Tbar, t)? {
            return Err(Error::Precondition(format!("{t} is not in Tbar")));
        }
        let table = self.enumerate(HornSetKind::T, t.n, t.r())?;
        table
            .iter()
            .filter(|c| c.i.pointwise_le(&t.i) && c.j.iter().zip(&t.j).all(|(cj, tj)| tj.pointwise_le(cj)))
            .min_by(|a, b| (a.i.weight(), *a).cmp(&(b.i.weight(), *b)))
            .cloned()
            .ok_or_else(|| Error::Inconsistency(format!("no T-reduction exists for {t}")))
    }
}

struct Search<'a> {
    i: &'a IndexSet,
    below: &'a [&'a IndexSet],
    by_weight: &'a [Vec<&'a IndexSet>],
    constraints: &'a [Constraint],
    exact: bool,
    m: usize,
    n: usize,
    seen: &'a AtomicU64,
    cap: u64,
}

impl<'a> Search<'a> {
    fn descend(&self, budget: usize, chosen: &mut Vec<&'a IndexSet>, out: &mut Vec<HornTuple>) -> Result<()> {
        if chosen.len() + 1 == self.m {
            let buckets = if self.exact { budget..=budget } else { 0..=budget };
            for w in buckets {
                for &last in self.by_weight.get(w).map(Vec::as_slice).unwrap_or(&[]) {
                    if !last.pointwise_le(self.i) {
                        continue;
                    }
                    if self.seen.fetch_add(1, Ordering::Relaxed) >= self.cap {
                        return Err(Error::ResourceCap(format!("more than {} candidates at N = {}", self.cap, self.n)));
                    }
                    chosen.push(last);
                    let js: Vec<&[usize]> = chosen.iter().map(|s| s.as_slice()).collect();
                    if self.constraints.iter().all(|c| c.holds(self.i.as_slice(), &js)) {
                        out.push(HornTuple {
                            n: self.n,
                            i: self.i.clone(),
                            j: chosen.iter().map(|s| (*s).clone()).collect(),
                        });
                    }
                    chosen.pop();
                }
            }
            return Ok(());
        }
        for &j in self.below {
            let w = j.weight();
            if w > budget {
                continue;
            }
            chosen.push(j);
            self.descend(budget - w, chosen, out)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// Membership decided through Littlewood–Richardson coefficients instead of
/// the recursion: `T` needs weight equality and a positive coefficient, `Ṫ`
/// a coefficient of exactly one, and `T̄` some `μ ≤ π(I)` of the right size
/// with a positive coefficient.
pub fn lr_member(kind: HornSetKind, t: &HornTuple) -> bool {
    let excess = t.weight_excess();
    match kind {
        HornSetKind::T => excess == 0 && lr_multiplicity(t) > 0,
        HornSetKind::Tdot => excess == 0 && lr_multiplicity(t) == 1,
        HornSetKind::Tbar => {
            if excess < 0 {
                return false;
            }
            let factors: Vec<_> = t.j.iter().map(pi).collect();
            let size = factors.iter().map(|f| f.size()).sum();
            partitions_between(&crate::Partition::empty(), &pi(&t.i), size)
                .into_iter()
                .any(|mu| multi_lr_coeff(&LrQuery { target: mu, factors: factors.clone() }) > 0)
        }
    }
}

/// Iterated LR coefficient `c^{π(I)}_{π(J⁽¹⁾),…,π(J⁽ᵐ⁾)}`.
pub fn lr_multiplicity(t: &HornTuple) -> u64 {
    multi_lr_coeff(&LrQuery { target: pi(&t.i), factors: t.j.iter().map(pi).collect() })
}
