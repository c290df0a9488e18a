//! Sums with partially specified eigenvalues.
//!
//! A partial spectrum fixes some entries of a decreasing vector (or of a
//! two-sided sequence). Its extensions are exactly the vectors between the
//! envelopes `min` and `max`, and feasibility reduces to the Horn
//! inequalities on `(α^min, β^max)` together with the reverse inequalities
//! on `(α^max, β^min)`, an infinite term making an inequality hold trivially.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::horn_sets::{HornCatalog, HornSetKind};
use crate::interpolate::{interpolate, truncate_pad_between, Bounds, InterpolationInput, InterpolationResult};
use crate::spectra::{
    evaluate_finite, scan_extended_pair, scan_finite, scan_reverse_finite, Family, InequalityRecord, ScanConfig,
    Spectrum, TwoSidedSpectrum,
};

/// Specified entries of a decreasing vector, keyed by index. Keys are
/// `1..=N` in finite mode and nonzero integers in two-sided mode.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialSpectrum {
    pub spec: BTreeMap<i64, f64>,
}

impl PartialSpectrum {
    pub fn new(spec: BTreeMap<i64, f64>) -> Self {
        PartialSpectrum { spec }
    }

    pub fn from_pairs(pairs: &[(i64, f64)]) -> Self {
        PartialSpectrum { spec: pairs.iter().copied().collect() }
    }

    pub fn unspecified() -> Self {
        Self::default()
    }

    /// Every entry of `s` specified.
    pub fn full(s: &Spectrum) -> Self {
        PartialSpectrum { spec: s.values().iter().enumerate().map(|(i, &x)| (i as i64 + 1, x)).collect() }
    }

    pub fn full_two_sided(s: &TwoSidedSpectrum) -> Self {
        let pos = s.pos().iter().enumerate().map(|(i, &x)| (i as i64 + 1, x));
        let neg = s.neg().iter().enumerate().map(|(i, &x)| (-(i as i64) - 1, x));
        PartialSpectrum { spec: pos.chain(neg).collect() }
    }

    fn validate_finite(&self, n: usize) -> Result<()> {
        if let Some((&k, _)) = self.spec.iter().find(|(&k, _)| k < 1 || k > n as i64) {
            return Err(Error::OutOfRange { element: k.max(0) as usize, bound: n });
        }
        if self.spec.values().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("specified entries must be finite".into()));
        }
        let v: Vec<f64> = self.spec.values().copied().collect();
        if v.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition(format!("specified entries are not decreasing: {v:?}")));
        }
        Ok(())
    }

    fn validate_two_sided(&self, support: Support) -> Result<()> {
        if self.spec.values().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("specified entries must be finite".into()));
        }
        for (&k, &x) in &self.spec {
            let inside = (k > 0 && k as usize <= support.pos) || (k < 0 && (-k) as usize <= support.neg);
            if !inside {
                return Err(Error::Precondition(format!("index {k} lies outside the support {support:?}")));
            }
            if (k > 0 && x < 0.0) || (k < 0 && x > 0.0) {
                return Err(Error::Precondition(format!("entry {k} has the wrong sign")));
            }
        }
        let pos: Vec<f64> = self.spec.range(1..).map(|(_, &x)| x).collect();
        let neg: Vec<f64> = self.spec.range(..0).rev().map(|(_, &x)| x).collect();
        if pos.windows(2).any(|w| w[0] < w[1]) || neg.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Precondition("specified entries are out of order".into()));
        }
        Ok(())
    }
}

/// Lengths of the two sides in two-sided mode; every entry beyond them is
/// an implicitly specified zero.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub pos: usize,
    pub neg: usize,
}

impl Support {
    /// Just large enough for the specified indices of all inputs.
    pub fn covering<'a>(parts: impl IntoIterator<Item = &'a PartialSpectrum>) -> Self {
        let mut s = Support { pos: 0, neg: 0 };
        for p in parts {
            for &k in p.spec.keys() {
                if k > 0 {
                    s.pos = s.pos.max(k as usize);
                } else {
                    s.neg = s.neg.max((-k) as usize);
                }
            }
        }
        s
    }
}

/// Entrywise bounds `min ≤ β ≤ max` describing all extensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub min: Spectrum,
    pub max: Spectrum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedEnvelope {
    pub min: TwoSidedSpectrum,
    pub max: TwoSidedSpectrum,
}

impl Envelope {
    pub fn contains(&self, v: &Spectrum) -> bool {
        v.len() == self.min.len()
            && v.values().iter().zip(self.min.values()).zip(self.max.values()).all(|((x, lo), hi)| lo <= x && x <= hi)
    }

    /// `∓∞` replaced by `∓c`.
    pub fn clamped(&self, c: f64) -> (Spectrum, Spectrum) {
        let f = |s: &Spectrum| {
            Spectrum::new(s.values().iter().map(|x| x.clamp(-c, c)).collect()).expect("clamping keeps order")
        };
        (f(&self.min), f(&self.max))
    }
}

/// Envelopes along the increasing list of specified `(index, value)` pairs on
/// one side, `len` entries long; `missing` fills positions past the last
/// specified index for the lower envelope.
fn side_envelope(spec: &[(usize, f64)], len: usize, missing: f64) -> (Vec<f64>, Vec<f64>) {
    let mut lo = Vec::with_capacity(len);
    let mut hi = Vec::with_capacity(len);
    for i in 1..=len {
        lo.push(spec.iter().find(|&&(k, _)| k >= i).map_or(missing, |&(_, x)| x));
        hi.push(spec.iter().rev().find(|&&(k, _)| k <= i).map_or(f64::INFINITY, |&(_, x)| x));
    }
    (lo, hi)
}

/// Finite envelopes at size `n`.
pub fn min_max(p: &PartialSpectrum, n: usize) -> Result<Envelope> {
    p.validate_finite(n)?;
    let spec: Vec<(usize, f64)> = p.spec.iter().map(|(&k, &x)| (k as usize, x)).collect();
    let (lo, hi) = side_envelope(&spec, n, f64::NEG_INFINITY);
    Ok(Envelope { min: Spectrum::new(lo)?, max: Spectrum::new(hi)? })
}

/// Two-sided envelopes; entries beyond `support` are zero.
pub fn min_max_two_sided(p: &PartialSpectrum, support: Support) -> Result<TwoSidedEnvelope> {
    p.validate_two_sided(support)?;
    let mut pos: Vec<(usize, f64)> = p.spec.range(1..).map(|(&k, &x)| (k as usize, x)).collect();
    pos.push((support.pos + 1, 0.0));
    // on the negative side work with the mirrored sequence −α_{−n}, which is
    // decreasing like the positive side
    let mut neg: Vec<(usize, f64)> = p.spec.range(..0).rev().map(|(&k, &x)| ((-k) as usize, -x)).collect();
    neg.push((support.neg + 1, 0.0));
    let (plo, phi) = side_envelope(&pos, support.pos, 0.0);
    let (nlo, nhi) = side_envelope(&neg, support.neg, 0.0);
    let flip = |v: Vec<f64>| v.into_iter().map(|x| -x).collect::<Vec<_>>();
    Ok(TwoSidedEnvelope { min: TwoSidedSpectrum::new(plo, flip(nhi))?, max: TwoSidedSpectrum::new(phi, flip(nlo))? })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialVerdict {
    pub feasible: bool,
    pub violations: Vec<InequalityRecord>,
}

impl PartialVerdict {
    fn from(violations: Vec<InequalityRecord>) -> Self {
        PartialVerdict { feasible: violations.is_empty(), violations }
    }
}

fn check_m(cat: &HornCatalog, m: usize) -> Result<()> {
    if cat.m() != m {
        return Err(Error::DimensionMismatch(format!("catalog has m = {}, got {m} summands", cat.m())));
    }
    Ok(())
}

/// Horn inequalities on the lower data and reverse inequalities on the upper
/// data for arbitrary envelopes of `α` and the summands.
pub fn check_envelopes(cat: &HornCatalog, alpha: &Envelope, betas: &[Envelope], n: usize) -> Result<PartialVerdict> {
    check_m(cat, betas.len())?;
    let bmax: Vec<Spectrum> = betas.iter().map(|e| e.max.clone()).collect();
    let bmin: Vec<Spectrum> = betas.iter().map(|e| e.min.clone()).collect();
    let mut v = scan_finite(cat, &alpha.min, &bmax, n, HornSetKind::T)?;
    v.extend(scan_reverse_finite(cat, &alpha.max, &bmin, n)?);
    Ok(PartialVerdict::from(v))
}

fn envelopes(alpha: &PartialSpectrum, betas: &[PartialSpectrum], n: usize) -> Result<(Envelope, Vec<Envelope>)> {
    Ok((min_max(alpha, n)?, betas.iter().map(|b| min_max(b, n)).collect::<Result<_>>()?))
}

/// Whether `A = ΣB⁽ᵏ⁾` exists with `Λ(A) ⊃ α` and `Λ(B⁽ᵏ⁾) ⊃ β⁽ᵏ⁾`.
pub fn check_partial(
    cat: &HornCatalog,
    alpha: &PartialSpectrum,
    betas: &[PartialSpectrum],
    n: usize,
) -> Result<PartialVerdict> {
    let (a, bs) = envelopes(alpha, betas, n)?;
    check_envelopes(cat, &a, &bs, n)
}

/// Every inequality evaluated for the partial data, violated or not.
pub fn partial_records(
    cat: &HornCatalog,
    alpha: &PartialSpectrum,
    betas: &[PartialSpectrum],
    n: usize,
) -> Result<Vec<InequalityRecord>> {
    let (a, bs) = envelopes(alpha, betas, n)?;
    check_m(cat, bs.len())?;
    let bmax: Vec<Spectrum> = bs.iter().map(|e| e.max.clone()).collect();
    let bmin: Vec<Spectrum> = bs.iter().map(|e| e.min.clone()).collect();
    let mut out = evaluate_finite(cat, Family::Horn, &a.min, &bmax, n, HornSetKind::T)?;
    out.extend(evaluate_finite(cat, Family::Reverse, &a.max, &bmin, n, HornSetKind::T)?);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialRealization {
    pub result: InterpolationResult,
    /// Value substituted for the infinite envelope entries.
    pub bound: f64,
}

const DOUBLINGS: usize = 60;

/// Full spectra extending the envelopes, realized by interpolation.
pub fn realize_envelopes(
    cat: &HornCatalog,
    alpha: &Envelope,
    betas: &[Envelope],
    n: usize,
) -> Result<PartialRealization> {
    let verdict = check_envelopes(cat, alpha, betas, n)?;
    if let Some(v) = verdict.violations.first() {
        return Err(Error::Hypothesis(format!("partial data is infeasible: {} {} fails", v.family, v.tuple)));
    }
    let finite = |s: &Spectrum| s.values().iter().filter(|x| x.is_finite()).map(|x| x.abs()).sum::<f64>();
    let mut c = 1.0
        + finite(&alpha.min)
        + finite(&alpha.max)
        + betas.iter().map(|e| finite(&e.min) + finite(&e.max)).sum::<f64>();
    for _ in 0..=DOUBLINGS {
        let (amin, amax) = alpha.clamped(c);
        let (bmin, bmax): (Vec<_>, Vec<_>) = betas.iter().map(|e| e.clamped(c)).unzip();
        let input = InterpolationInput { start: Bounds::new(amin, bmax), target: Bounds::new(amax, bmin) };
        if scan_finite(cat, &input.start.alpha, &input.start.betas, n, HornSetKind::T)?.is_empty()
            && scan_reverse_finite(cat, &input.target.alpha, &input.target.betas, n)?.is_empty()
        {
            return Ok(PartialRealization { result: interpolate(cat, &input, false)?, bound: c });
        }
        c *= 2.0;
    }
    Err(Error::Hypothesis(format!("no finite bound up to {c:e} satisfies the substituted inequalities")))
}

pub fn realize_partial(
    cat: &HornCatalog,
    alpha: &PartialSpectrum,
    betas: &[PartialSpectrum],
    n: usize,
) -> Result<PartialRealization> {
    let (a, bs) = envelopes(alpha, betas, n)?;
    realize_envelopes(cat, &a, &bs, n)
}

/// Feasible interval for a single specified `α_p` when every summand is
/// fully specified: `(lower, upper)`.
pub fn johnson_bounds(betas: &[Spectrum], p: usize, n: usize) -> Result<(f64, f64)> {
    if p == 0 || p > n {
        return Err(Error::OutOfRange { element: p, bound: n });
    }
    if betas.is_empty() || betas.iter().any(|b| b.len() != n || !b.is_finite()) {
        return Err(Error::DimensionMismatch(format!("need at least one finite spectrum of length {n}")));
    }
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    // index choices j ∈ [N]^m, visited as an odometer
    let m = betas.len();
    let mut j = vec![1usize; m];
    loop {
        let value: f64 = j.iter().zip(betas).map(|(&x, b)| b.at(x)).sum();
        if j.iter().map(|x| x - 1).sum::<usize>() == p - 1 {
            upper = upper.min(value);
        }
        if j.iter().map(|x| n - x).sum::<usize>() == n - p {
            lower = lower.max(value);
        }
        let Some(k) = j.iter().rposition(|&x| x < n) else { break };
        j[k] += 1;
        j[k + 1..].iter_mut().for_each(|x| *x = 1);
    }
    Ok((lower, upper))
}

/// Values `v` on the grid for which `α_p = v` is feasible with the given
/// fully specified summands.
pub fn feasible_on_grid(cat: &HornCatalog, betas: &[Spectrum], p: usize, n: usize, grid: &[f64]) -> Result<Vec<bool>> {
    let bs: Vec<PartialSpectrum> = betas.iter().map(PartialSpectrum::full).collect();
    grid.iter()
        .map(|&v| Ok(check_partial(cat, &PartialSpectrum::from_pairs(&[(p as i64, v)]), &bs, n)?.feasible))
        .collect()
}

/// Envelope of a positive vector of rank at most `rho`.
pub fn lowrank_envelope(n: usize, rho: usize) -> Result<Envelope> {
    if rho > n {
        return Err(Error::OutOfRange { element: rho, bound: n });
    }
    let max = (1..=n).map(|i| if i <= rho { f64::INFINITY } else { 0.0 }).collect();
    Ok(Envelope { min: Spectrum::zeros(n), max: Spectrum::new(max)? })
}

/// Whether Hermitian matrices with the given spectra can have a positive sum
/// of rank at most `rho`.
pub fn lowrank_check(cat: &HornCatalog, betas: &[Spectrum], rho: usize, n: usize) -> Result<PartialVerdict> {
    let bs: Vec<Envelope> = betas.iter().map(|b| min_max(&PartialSpectrum::full(b), n)).collect::<Result<_>>()?;
    check_envelopes(cat, &lowrank_envelope(n, rho)?, &bs, n)
}

fn two_sided_envelopes(
    alpha: &PartialSpectrum,
    betas: &[PartialSpectrum],
    support: Support,
) -> Result<(TwoSidedEnvelope, Vec<TwoSidedEnvelope>)> {
    Ok((
        min_max_two_sided(alpha, support)?,
        betas.iter().map(|b| min_max_two_sided(b, support)).collect::<Result<_>>()?,
    ))
}

/// Extended inequalities on `(α^min, β^max)` and on the barred upper data,
/// up to the truncation order of `cfg`.
pub fn check_partial_two_sided(
    cat: &HornCatalog,
    alpha: &PartialSpectrum,
    betas: &[PartialSpectrum],
    support: Support,
    cfg: &ScanConfig,
) -> Result<PartialVerdict> {
    let (a, bs) = two_sided_envelopes(alpha, betas, support)?;
    let bmax: Vec<_> = bs.iter().map(|e| e.max.clone()).collect();
    let bmin: Vec<_> = bs.iter().map(|e| e.min.clone()).collect();
    Ok(PartialVerdict::from(scan_extended_pair(cat, (&a.min, &bmax), (&a.max, &bmin), cfg)?))
}

/// Finite sequences between the envelopes: `lower` passes the extended
/// inequalities and `upper` their barred form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedExtension {
    pub lower_alpha: TwoSidedSpectrum,
    pub lower_betas: Vec<TwoSidedSpectrum>,
    pub upper_alpha: TwoSidedSpectrum,
    pub upper_betas: Vec<TwoSidedSpectrum>,
}

fn fill_neg(s: &TwoSidedSpectrum, idx: usize, value: f64) -> TwoSidedSpectrum {
    let mut neg = s.neg().to_vec();
    neg[idx] = value;
    TwoSidedSpectrum::new(s.pos().to_vec(), neg).expect("filled value respects the order")
}

fn check_lower(
    cat: &HornCatalog,
    alpha: &TwoSidedSpectrum,
    betas: &[TwoSidedSpectrum],
    cfg: &ScanConfig,
) -> Result<()> {
    let v = scan_extended_pair(
        cat,
        (alpha, betas),
        (&TwoSidedSpectrum::zero(), &vec![TwoSidedSpectrum::zero(); betas.len()]),
        cfg,
    )?;
    match v.into_iter().find(|r| r.family == Family::Extended) {
        Some(r) => Err(Error::Hypothesis(format!(
            "extended inequality {} with q = {:?} fails after filling (lhs {}, rhs {})",
            r.tuple, r.q, r.lhs, r.rhs
        ))),
        None => Ok(()),
    }
}

/// Replaces the `−∞` entries of `alpha` one at a time, outermost first, by
/// `min(Σ_k β⁽ᵏ⁾_{−1}, next entry outwards)`.
fn fill_alpha(
    cat: &HornCatalog,
    mut alpha: TwoSidedSpectrum,
    betas: &[TwoSidedSpectrum],
    cfg: &ScanConfig,
) -> Result<TwoSidedSpectrum> {
    let cap: f64 = betas.iter().map(|b| b.lookup(-1)).sum();
    while let Some(u) = alpha.neg().iter().rposition(|x| *x == f64::NEG_INFINITY) {
        let outer = alpha.lookup(-(u as i64) - 2);
        alpha = fill_neg(&alpha, u, cap.min(outer));
        check_lower(cat, &alpha, betas, cfg)?;
    }
    Ok(alpha)
}

/// Fills the lower pair: `α` first, then each summand through the swap
/// `(β̄⁽ᵏ⁾, ᾱ, other summands)`.
fn fill_lower(
    cat: &HornCatalog,
    alpha: TwoSidedSpectrum,
    mut betas: Vec<TwoSidedSpectrum>,
    cfg: &ScanConfig,
) -> Result<(TwoSidedSpectrum, Vec<TwoSidedSpectrum>)> {
    let alpha = fill_alpha(cat, alpha, &betas, cfg)?;
    for k in 0..betas.len() {
        let mut others = vec![alpha.bar()];
        others.extend(betas.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, b)| b.clone()));
        betas[k] = fill_alpha(cat, betas[k].bar(), &others, cfg)?.bar();
        check_lower(cat, &alpha, &betas, cfg)?;
    }
    Ok((alpha, betas))
}

/// Finite sequences realizing the two-sided envelopes.
pub fn extend_two_sided(
    cat: &HornCatalog,
    alpha: &PartialSpectrum,
    betas: &[PartialSpectrum],
    support: Support,
    cfg: &ScanConfig,
) -> Result<TwoSidedExtension> {
    let verdict = check_partial_two_sided(cat, alpha, betas, support, cfg)?;
    if let Some(v) = verdict.violations.first() {
        return Err(Error::Hypothesis(format!("partial data is infeasible: {} {} q = {:?}", v.family, v.tuple, v.q)));
    }
    let (a, bs) = two_sided_envelopes(alpha, betas, support)?;
    let (lower_alpha, lower_betas) = fill_lower(cat, a.min, bs.iter().map(|e| e.max.clone()).collect(), cfg)?;
    let (ua, ub) = fill_lower(cat, a.max.bar(), bs.iter().map(|e| e.min.bar()).collect(), cfg)?;
    Ok(TwoSidedExtension {
        lower_alpha,
        lower_betas,
        upper_alpha: ua.bar(),
        upper_betas: ub.iter().map(TwoSidedSpectrum::bar).collect(),
    })
}

/// Finite-rank realization of two-sided partial data at truncation order `n`.
pub fn realize_partial_two_sided(
    cat: &HornCatalog,
    alpha: &PartialSpectrum,
    betas: &[PartialSpectrum],
    support: Support,
    cfg: &ScanConfig,
    n: usize,
) -> Result<InterpolationResult> {
    let ext = extend_two_sided(cat, alpha, betas, support, cfg)?;
    let input = truncate_pad_between(&ext.lower_alpha, &ext.lower_betas, &ext.upper_alpha, &ext.upper_betas, n)?;
    interpolate(cat, &input, false)
}
