//! Interpolation between lower data satisfying the Horn inequalities and upper
//! data satisfying the reverse inequalities, producing spectra of an actual
//! sum `A = ΣB⁽ᵏ⁾` that lie entrywise between the two.
//!
//! Along the segment `α(t) = tα′ + (1−t)α″` every Horn constraint is affine
//! in `t`, so the feasible parameters form an interval `[τ, 1]`. At `τ = 0`
//! the upper data is itself feasible. Otherwise some constraint `t` is an
//! equality at `τ`; its `r` indices form a block that is feasible on its own,
//! and the complementary indices are solved recursively. The integer variant
//! walks one unit step at a time instead of jumping to `τ`.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{HornTuple, IndexSet};
use crate::error::{Error, Result};
use crate::horn_sets::{HornCatalog, HornSetKind};
use crate::spectra::{scan_finite, scan_reverse_finite, Spectrum, TwoSidedSpectrum, TOL};

/// One side of an interpolation problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub alpha: Spectrum,
    pub betas: Vec<Spectrum>,
}

impl Bounds {
    pub fn new(alpha: Spectrum, betas: Vec<Spectrum>) -> Self {
        Bounds { alpha, betas }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn m(&self) -> usize {
        self.betas.len()
    }
}

/// `start` satisfies the Horn inequalities, `target` the reverse ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationInput {
    pub start: Bounds,
    pub target: Bounds,
}

/// How a subproblem of size `n` was solved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub n: usize,
    /// Absent when the subproblem was solved without splitting.
    pub split: Option<Box<Split>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    /// Tight tuple in the coordinates of the subproblem.
    pub tuple: HornTuple,
    /// Segment parameter at which it became tight (real mode).
    pub tau: Option<f64>,
    /// Recursion on the complementary indices.
    pub rest: Decomposition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationResult {
    pub alpha: Spectrum,
    pub betas: Vec<Spectrum>,
    pub decomposition: Decomposition,
    /// Unit steps taken (integer mode).
    pub unit_steps: usize,
    pub log: Vec<String>,
}

/// A Horn constraint compiled to zero-based positions.
struct Constraint<'a> {
    tuple: &'a HornTuple,
    i: Vec<usize>,
    j: Vec<Vec<usize>>,
}

impl Constraint<'_> {
    /// `rhs − lhs` of the Horn inequality.
    fn slack(&self, a: &[f64], b: &[Vec<f64>]) -> f64 {
        let lhs: f64 = self.i.iter().map(|&p| a[p]).sum();
        let rhs: f64 = self.j.iter().zip(b).map(|(j, bk)| j.iter().map(|&p| bk[p]).sum::<f64>()).sum();
        rhs - lhs
    }

    fn scale(&self, a: &[f64], b: &[Vec<f64>]) -> f64 {
        let s: f64 = self.i.iter().map(|&p| a[p].abs()).sum::<f64>()
            + self.j.iter().zip(b).map(|(j, bk)| j.iter().map(|&p| bk[p].abs()).sum::<f64>()).sum::<f64>();
        1.0 + s
    }

    /// Change of the slack when entry `pos` of summand `which` moves by `delta`
    /// (`which = 0` is `α`).
    fn slack_delta(&self, which: usize, pos: usize, delta: f64) -> f64 {
        if which == 0 {
            if self.i.contains(&pos) {
                -delta
            } else {
                0.0
            }
        } else if self.j[which - 1].contains(&pos) {
            delta
        } else {
            0.0
        }
    }
}

fn compile(tables: &[std::sync::Arc<Vec<HornTuple>>]) -> Vec<Constraint<'_>> {
    tables
        .iter()
        .flat_map(|t| t.iter())
        .map(|t| Constraint {
            tuple: t,
            i: t.i.iter().map(|x| x - 1).collect(),
            j: t.j.iter().map(|s| s.iter().map(|x| x - 1).collect()).collect(),
        })
        .collect()
}

/// Tables `T_r^n` for `1 ≤ r ≤ n`, in (r, tuple) order.
fn tables(cat: &HornCatalog, n: usize) -> Result<Vec<std::sync::Arc<Vec<HornTuple>>>> {
    (1..=n).map(|r| cat.enumerate(HornSetKind::T, n, r)).collect()
}

fn check_shapes(cat: &HornCatalog, input: &InterpolationInput) -> Result<()> {
    let (s, t) = (&input.start, &input.target);
    let n = s.n();
    if s.m() != t.m() || s.m() != cat.m() {
        return Err(Error::DimensionMismatch(format!(
            "start has m = {}, target m = {}, catalog m = {}",
            s.m(),
            t.m(),
            cat.m()
        )));
    }
    if std::iter::once(&s.alpha)
        .chain(&s.betas)
        .chain(std::iter::once(&t.alpha))
        .chain(&t.betas)
        .any(|v| v.len() != n || !v.is_finite())
    {
        return Err(Error::DimensionMismatch(format!("all spectra must be finite of length {n}")));
    }
    Ok(())
}

fn check_hypothesis(cat: &HornCatalog, input: &InterpolationInput) -> Result<()> {
    let n = input.start.n();
    let lower = scan_finite(cat, &input.start.alpha, &input.start.betas, n, HornSetKind::T)?;
    if let Some(v) = lower.first() {
        return Err(Error::Hypothesis(format!(
            "start data violates {} Horn inequalities, first at {} (slack {:e})",
            lower.len(),
            v.tuple,
            v.slack()
        )));
    }
    let upper = scan_reverse_finite(cat, &input.target.alpha, &input.target.betas, n)?;
    if let Some(v) = upper.first() {
        return Err(Error::Hypothesis(format!(
            "target data violates {} reverse inequalities, first at {} (slack {:e})",
            upper.len(),
            v.tuple,
            v.slack()
        )));
    }
    Ok(())
}

/// `τ` and every constraint tight at `τ`.
pub fn tau_tight(cat: &HornCatalog, input: &InterpolationInput) -> Result<(f64, Vec<HornTuple>)> {
    check_shapes(cat, input)?;
    check_hypothesis(cat, input)?;
    let (lo, hi) = (flat(&input.start), flat(&input.target));
    let tabs = tables(cat, input.start.n())?;
    let cons = compile(&tabs);
    let (tau, _) = critical_tau(&cons, &lo, &hi);
    let (a, b) = lerp(&lo, &hi, tau);
    let tight =
        cons.iter().filter(|c| c.slack(&a, &b).abs() <= TOL * c.scale(&a, &b)).map(|c| c.tuple.clone()).collect();
    Ok((tau, tight))
}

type Flat = (Vec<f64>, Vec<Vec<f64>>);

fn flat(b: &Bounds) -> Flat {
    (b.alpha.values().to_vec(), b.betas.iter().map(|s| s.values().to_vec()).collect())
}

fn lerp(lo: &Flat, hi: &Flat, t: f64) -> Flat {
    let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
    (mix(&lo.0, &hi.0), lo.1.iter().zip(&hi.1).map(|(x, y)| mix(x, y)).collect())
}

/// Smallest feasible segment parameter and the index of a constraint that
/// attains it (if `τ > 0`).
fn critical_tau(cons: &[Constraint<'_>], lo: &Flat, hi: &Flat) -> (f64, Option<usize>) {
    let mut tau = 0.0;
    let mut arg = None;
    for (k, c) in cons.iter().enumerate() {
        let g0 = c.slack(&hi.0, &hi.1);
        let g1 = c.slack(&lo.0, &lo.1);
        if g0 < -TOL * c.scale(&hi.0, &hi.1) {
            // g(t) = (1−t)·g0 + t·g1 vanishes at t = g0 / (g0 − g1)
            let root = (g0 / (g0 - g1)).clamp(0.0, 1.0);
            if root > tau {
                tau = root;
                arg = Some(k);
            }
        }
    }
    (tau, arg)
}

fn pick(v: &[f64], set: &[usize]) -> Vec<f64> {
    set.iter().map(|&p| v[p]).collect()
}

fn complement(set: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|p| !set.contains(p)).collect()
}

fn pick_flat(f: &Flat, c: &Constraint<'_>, complement_side: bool, n: usize) -> Flat {
    let sel = |set: &[usize]| if complement_side { complement(set, n) } else { set.to_vec() };
    (pick(&f.0, &sel(&c.i)), f.1.iter().zip(&c.j).map(|(v, j)| pick(v, &sel(j))).collect())
}

/// Places block and rest values at their original positions and sorts.
fn merge(block: &Flat, rest: &Flat, c: &Constraint<'_>, n: usize) -> Flat {
    let place = |b: &[f64], r: &[f64], set: &[usize]| {
        let mut out = vec![0.0; n];
        for (&p, &x) in set.iter().zip(b) {
            out[p] = x;
        }
        for (p, &x) in complement(set, n).into_iter().zip(r) {
            out[p] = x;
        }
        out.sort_by(|x, y| y.total_cmp(x));
        out
    };
    (place(&block.0, &rest.0, &c.i), block.1.iter().zip(&rest.1).zip(&c.j).map(|((b, r), j)| place(b, r, j)).collect())
}

struct Solver<'c> {
    cat: &'c HornCatalog,
    integer: bool,
    steps: usize,
    log: Vec<String>,
}

impl Solver<'_> {
    fn solve(&mut self, lo: Flat, hi: Flat) -> Result<(Flat, Decomposition)> {
        let n = lo.0.len();
        if n == 0 {
            return Ok((lo, Decomposition { n, split: None }));
        }
        let tabs = tables(self.cat, n)?;
        let cons = compile(&tabs);
        if self.integer {
            self.solve_integer(&cons, lo, hi)
        } else {
            self.solve_real(&cons, lo, hi)
        }
    }

    fn solve_real(&mut self, cons: &[Constraint<'_>], lo: Flat, hi: Flat) -> Result<(Flat, Decomposition)> {
        let n = lo.0.len();
        let (tau, arg) = critical_tau(cons, &lo, &hi);
        let Some(arg) = arg else {
            self.log.push(format!("n={n}: tau=0, upper data is feasible"));
            return Ok((hi, Decomposition { n, split: None }));
        };
        let cur = lerp(&lo, &hi, tau);
        let chosen =
            cons.iter().position(|c| c.slack(&cur.0, &cur.1).abs() <= TOL * c.scale(&cur.0, &cur.1)).unwrap_or(arg);
        self.split(cons, chosen, cur, hi, Some(tau))
    }

    fn split(
        &mut self,
        cons: &[Constraint<'_>],
        chosen: usize,
        cur: Flat,
        hi: Flat,
        tau: Option<f64>,
    ) -> Result<(Flat, Decomposition)> {
        let n = cur.0.len();
        let c = &cons[chosen];
        self.log.push(match tau {
            Some(t) => format!("n={n}: tau={t}, split on {} (r={})", c.tuple, c.tuple.r()),
            None => format!("n={n}: split on {} (r={}) after {} steps", c.tuple, c.tuple.r(), self.steps),
        });
        let block = pick_flat(&cur, c, false, n);
        let (rest, sub) = self.solve(pick_flat(&cur, c, true, n), pick_flat(&hi, c, true, n))?;
        let merged = merge(&block, &rest, c, n);
        let split = Split { tuple: c.tuple.clone(), tau, rest: sub };
        Ok((merged, Decomposition { n, split: Some(Box::new(split)) }))
    }

    fn solve_integer(&mut self, cons: &[Constraint<'_>], mut cur: Flat, hi: Flat) -> Result<(Flat, Decomposition)> {
        let n = cur.0.len();
        let m = cur.1.len();
        let mut slack: Vec<f64> = cons.iter().map(|c| c.slack(&cur.0, &cur.1)).collect();
        loop {
            if let Some(k) = slack.iter().position(|&s| s < -0.5) {
                return Err(Error::Hypothesis(format!("{} violated during the walk", cons[k].tuple)));
            }
            if let Some(k) = slack.iter().position(|&s| s.abs() < 0.5) {
                return self.split(cons, k, cur, hi, None);
            }
            if cur == hi {
                return Err(Error::Hypothesis(format!("reached the target at size {n} with strict trace inequality")));
            }
            let mut moved = false;
            'scan: for which in 0..=m {
                for pos in 0..n {
                    let (now, goal) = if which == 0 {
                        (cur.0[pos], hi.0[pos])
                    } else {
                        (cur.1[which - 1][pos], hi.1[which - 1][pos])
                    };
                    if now == goal {
                        continue;
                    }
                    let delta = if goal > now { 1.0 } else { -1.0 };
                    let vec = if which == 0 { &cur.0 } else { &cur.1[which - 1] };
                    let next = now + delta;
                    let ordered = (pos == 0 || vec[pos - 1] >= next) && (pos + 1 == n || next >= vec[pos + 1]);
                    if !ordered {
                        continue;
                    }
                    let ok = cons.iter().zip(&slack).all(|(c, &s)| s + c.slack_delta(which, pos, delta) >= -0.5);
                    if !ok {
                        continue;
                    }
                    for (c, s) in cons.iter().zip(slack.iter_mut()) {
                        *s += c.slack_delta(which, pos, delta);
                    }
                    if which == 0 {
                        cur.0[pos] = next;
                    } else {
                        cur.1[which - 1][pos] = next;
                    }
                    self.steps += 1;
                    let name = if which == 0 { "alpha".to_string() } else { format!("beta{which}") };
                    self.log.push(format!("step {}: {name}[{}] {now} -> {next}", self.steps, pos + 1));
                    moved = true;
                    break 'scan;
                }
            }
            if !moved {
                return Err(Error::Stuck(format!("no legal unit step at size {n}")));
            }
        }
    }
}

fn to_result(out: Flat, decomposition: Decomposition, steps: usize, log: Vec<String>) -> Result<InterpolationResult> {
    Ok(InterpolationResult {
        alpha: Spectrum::new(out.0)?,
        betas: out.1.into_iter().map(Spectrum::new).collect::<Result<_>>()?,
        decomposition,
        unit_steps: steps,
        log,
    })
}

/// Spectra of some `A = ΣB⁽ᵏ⁾` lying between `start` and `target`.
pub fn interpolate(cat: &HornCatalog, input: &InterpolationInput, integer_mode: bool) -> Result<InterpolationResult> {
    check_shapes(cat, input)?;
    if integer_mode {
        let all = flat(&input.start)
            .0
            .into_iter()
            .chain(flat(&input.target).0)
            .chain(input.start.betas.iter().chain(&input.target.betas).flat_map(|s| s.values().to_vec()));
        if all.into_iter().any(|x| x.fract() != 0.0) {
            return Err(Error::Precondition("integer mode needs integer entries".into()));
        }
    }
    check_hypothesis(cat, input)?;
    let mut solver = Solver { cat, integer: integer_mode, steps: 0, log: Vec::new() };
    let (out, dec) = solver.solve(flat(&input.start), flat(&input.target))?;
    to_result(out, dec, solver.steps, solver.log)
}

/// `small`: `s_i` for `i ≤ keep`, else `s_{i−N−1}`; used with `keep = n` for
/// the lower `α` and upper `β` data and with `keep = N − n` for the others.
fn pad(s: &TwoSidedSpectrum, keep: usize, size: usize) -> Result<Spectrum> {
    Spectrum::new(
        (1..=size).map(|i| if i <= keep { s.lookup(i as i64) } else { s.lookup(i as i64 - size as i64 - 1) }).collect(),
    )
}

/// Finite data of size `(m+1)n` built from two-sided lower and upper data.
pub fn truncate_pad_between(
    lower_alpha: &TwoSidedSpectrum,
    lower_betas: &[TwoSidedSpectrum],
    upper_alpha: &TwoSidedSpectrum,
    upper_betas: &[TwoSidedSpectrum],
    n: usize,
) -> Result<InterpolationInput> {
    if n == 0 {
        return Err(Error::Precondition("truncation order must be at least 1".into()));
    }
    let m = lower_betas.len();
    if upper_betas.len() != m {
        return Err(Error::DimensionMismatch("lower and upper data have different m".into()));
    }
    let size = (m + 1) * n;
    let small = |s: &TwoSidedSpectrum| pad(s, n, size);
    let large = |s: &TwoSidedSpectrum| pad(s, size - n, size);
    Ok(InterpolationInput {
        start: Bounds { alpha: small(lower_alpha)?, betas: lower_betas.iter().map(large).collect::<Result<_>>()? },
        target: Bounds { alpha: large(upper_alpha)?, betas: upper_betas.iter().map(small).collect::<Result<_>>()? },
    })
}

pub fn truncate_pad(alpha: &TwoSidedSpectrum, betas: &[TwoSidedSpectrum], n: usize) -> Result<InterpolationInput> {
    truncate_pad_between(alpha, betas, alpha, betas, n)
}

/// Finite-rank spectra whose two-sided entries at `±i`, `i ≤ n`, match the
/// given data.
pub fn realize_two_sided(
    cat: &HornCatalog,
    alpha: &TwoSidedSpectrum,
    betas: &[TwoSidedSpectrum],
    n: usize,
) -> Result<InterpolationResult> {
    interpolate(cat, &truncate_pad(alpha, betas, n)?, false)
}

/// Whether `x` lies entrywise between `a` and `b` (within `tol`).
pub fn is_between(x: &[f64], a: &[f64], b: &[f64], tol: f64) -> bool {
    x.len() == a.len()
        && x.len() == b.len()
        && x.iter().zip(a).zip(b).all(|((&v, &p), &q)| v >= p.min(q) - tol && v <= p.max(q) + tol)
}

/// Decreasing rearrangement.
pub fn rearranged(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Tight-set selection helper exposed for audits: the tuple used to split a
/// real-mode problem at its critical parameter.
pub fn split_tuple(cat: &HornCatalog, input: &InterpolationInput) -> Result<Option<HornTuple>> {
    let (tau, tight) = tau_tight(cat, input)?;
    Ok(if tau > 0.0 { tight.into_iter().next() } else { None })
}

impl InterpolationResult {
    /// Every tight tuple along the decomposition, outermost first.
    pub fn split_tuples(&self) -> Vec<HornTuple> {
        let mut out = Vec::new();
        let mut d = &self.decomposition;
        while let Some(s) = &d.split {
            out.push(s.tuple.clone());
            d = &s.rest;
        }
        out
    }

    pub fn index_blocks(&self) -> Vec<IndexSet> {
        self.split_tuples().into_iter().map(|t| t.i).collect()
    }
}
