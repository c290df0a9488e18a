//! Littlewood–Richardson coefficients by counting LR skew tableaux.
//!
//! `c^λ_{μν}` is the number of semistandard fillings of the skew shape `λ/μ`
//! with content `ν` whose reverse reading word (right to left, top to
//! bottom) is a lattice word. Fillings are built row by row, right to left,
//! pruning as soon as the lattice or column condition fails.

use std::collections::HashMap;

use once_cell::sync::Lazy;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::RwLock;

use crate::combinatorics::Partition;

type Key = (Vec<usize>, Vec<usize>, Vec<usize>);

static LR_CACHE: Lazy<RwLock<HashMap<Key, u64>>> = Lazy::new(|| RwLock::new(HashMap::new()));

/// Target and factors of an iterated product `s_{f₁}⋯s_{f_m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrQuery {
    pub target: Partition,
    pub factors: Vec<Partition>,
}

/// `c^λ_{μν}`, memoized in a process-wide table.
pub fn lr_coeff(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if lambda.size() != mu.size() + nu.size() || !mu.is_contained_in(lambda) || !nu.is_contained_in(lambda) {
        return 0;
    }
    if mu.size() == 0 || nu.size() == 0 {
        return 1;
    }
    // c^λ_{μν} = c^λ_{νμ}; cache under a canonical factor order
    let (a, b) = if mu.parts() <= nu.parts() { (mu, nu) } else { (nu, mu) };
    let key = (lambda.parts().to_vec(), a.parts().to_vec(), b.parts().to_vec());
    if let Some(&c) = LR_CACHE.read().expect("lr cache poisoned").get(&key) {
        return c;
    }
    let c = count_lr_tableaux(lambda.parts(), mu.parts(), nu.parts());
    LR_CACHE.write().expect("lr cache poisoned").insert(key, c);
    c
}

fn count_lr_tableaux(lambda: &[usize], mu: &[usize], nu: &[usize]) -> u64 {
    let rows = lambda.len();
    let mu_at = |i: usize| mu.get(i).copied().unwrap_or(0);
    let cells: Vec<(usize, usize)> = (0..rows).flat_map(|i| (mu_at(i)..lambda[i]).rev().map(move |j| (i, j))).collect();
    let mut filler = Filler {
        lambda,
        mu_at: (0..rows).map(mu_at).collect(),
        nu,
        cells,
        grid: lambda.iter().map(|&l| vec![0u8; l]).collect(),
        counts: vec![0; nu.len() + 1],
    };
    filler.fill(0)
}

struct Filler<'a> {
    lambda: &'a [usize],
    mu_at: Vec<usize>,
    nu: &'a [usize],
    cells: Vec<(usize, usize)>,
    grid: Vec<Vec<u8>>,
    counts: Vec<usize>,
}

impl Filler<'_> {
    fn fill(&mut self, k: usize) -> u64 {
        if k == self.cells.len() {
            return 1;
        }
        let (i, j) = self.cells[k];
        let upper = if j + 1 < self.lambda[i] { self.grid[i][j + 1] as usize } else { self.nu.len() };
        let lower = if i > 0 && j >= self.mu_at[i - 1] { self.grid[i - 1][j] as usize + 1 } else { 1 };
        let upper = upper.min(i + 1).min(self.nu.len());
        let mut total = 0;
        for v in lower..=upper {
            if self.counts[v] >= self.nu[v - 1] {
                continue;
            }
            if v > 1 && self.counts[v] + 1 > self.counts[v - 1] {
                continue;
            }
            self.counts[v] += 1;
            self.grid[i][j] = v as u8;
            total += self.fill(k + 1);
            self.counts[v] -= 1;
        }
        self.grid[i][j] = 0;
        total
    }
}

/// Coefficient of `s_target` in `s_{f₁} s_{f₂} ⋯ s_{f_m}`.
pub fn multi_lr_coeff(q: &LrQuery) -> u64 {
    let target = &q.target;
    let total: usize = q.factors.iter().map(Partition::size).sum();
    if total != target.size() {
        return 0;
    }
    let Some((first, rest)) = q.factors.split_first() else {
        return u64::from(target.size() == 0);
    };
    if !first.is_contained_in(target) {
        return 0;
    }
    // expand the product left to right, keeping only shapes inside the target
    let mut current: HashMap<Partition, u64> = HashMap::from([(first.clone(), 1)]);
    for (k, f) in rest.iter().enumerate() {
        if k + 1 == rest.len() {
            return current.iter().map(|(kappa, &c)| c * lr_coeff(target, kappa, f)).sum();
        }
        let mut next: HashMap<Partition, u64> = HashMap::new();
        for (kappa, &c) in &current {
            let size = kappa.size() + f.size();
            let shapes = partitions_between(kappa, target, size);
            let terms: Vec<(Partition, u64)> = shapes
                .into_par_iter()
                .filter_map(|lam| {
                    let v = lr_coeff(&lam, kappa, f);
                    (v > 0).then_some((lam, v))
                })
                .collect();
            for (lam, v) in terms {
                *next.entry(lam).or_default() += c * v;
            }
        }
        current = next;
    }
    current.get(target).copied().unwrap_or(0)
}

/// Partitions `λ` with `inner ⊆ λ ⊆ outer` and `|λ| = size`.
pub fn partitions_between(inner: &Partition, outer: &Partition, size: usize) -> Vec<Partition> {
    let rows = outer.length();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(rows);
    fn rec(
        t: usize,
        rows: usize,
        remaining: usize,
        inner: &Partition,
        outer: &Partition,
        cur: &mut Vec<usize>,
        out: &mut Vec<Partition>,
    ) {
        if t == rows {
            if remaining == 0 {
                out.push(Partition::new(cur.clone()).expect("decreasing by construction"));
            }
            return;
        }
        let cap = outer.part(t).min(if t == 0 { usize::MAX } else { cur[t - 1] });
        let lo = inner.part(t);
        // the remaining rows can absorb at most this many cells
        let room: usize = (t + 1..rows).map(|s| outer.part(s).min(cap)).sum();
        for p in lo..=cap.min(remaining) {
            if remaining - p > room {
                continue;
            }
            cur.push(p);
            rec(t + 1, rows, remaining - p, inner, outer, cur, out);
            cur.pop();
        }
    }
    if inner.is_contained_in(outer) {
        rec(0, rows, size, inner, outer, &mut cur, &mut out);
    }
    out
}
