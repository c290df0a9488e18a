//! Numerical witnesses `A = ΣB⁽ᵏ⁾` with prescribed spectra, compressions to
//! subspaces, and common reducing subspaces in equality cases.
//!
//! `A` is pinned to `diag(α)`. The summands start as randomly rotated
//! diagonal matrices and alternate between the affine set `{ΣB = A}` and the
//! isospectral orbits. Any tight Horn inequality splits the problem into a
//! block and its complement first, since every witness is reducible there
//! and the projections converge slowly on the boundary of the cone.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::combinatorics::HornTuple;
use crate::error::{Error, Result};
use crate::horn_sets::{HornCatalog, HornSetKind};
use crate::spectra::{eval_extended, scan_finite, trace_gap, Spectrum, TwoSidedSpectrum};

pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance for self-adjointness.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows = |f: fn(&Complex64) -> f64| (0..n).map(|i| (0..n).map(|j| f(&self.0[(i, j)])).collect()).collect();
        RawMatrix { re: rows(|z| z.re), im: rows(|z| z.im) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(d)?;
        let n = raw.re.len();
        if raw.im.len() != n || raw.re.iter().chain(&raw.im).any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix parts must be square and of equal size"));
        }
        let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(raw.re[i][j], raw.im[i][j]));
        HermitianMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl HermitianMatrix {
    /// Accepts `m` if `‖m − m*‖ ≤ 1e−12·max(1, ‖m‖)`, storing its Hermitian part.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!("{}×{} matrix is not square", m.nrows(), m.ncols())));
        }
        let skew = frob(&(&m - m.adjoint()));
        if skew > HERMITIAN_TOL * frob(&m).max(1.0) {
            return Err(Error::Precondition(format!("matrix is not Hermitian (residual {skew:e})")));
        }
        Ok(Self::hermitian_part(&m))
    }

    fn hermitian_part(m: &CMatrix) -> Self {
        HermitianMatrix((m + m.adjoint()).scale(0.5))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)));
        HermitianMatrix(CMatrix::from_diagonal(&d))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(CMatrix::zeros(n, n))
    }

    /// `U diag(values) U*`.
    pub fn with_spectrum(values: &[f64], u: &CMatrix) -> Self {
        Self::hermitian_part(&(u * Self::diagonal(values).0 * u.adjoint()))
    }

    pub fn conjugated(&self, u: &CMatrix) -> Self {
        Self::hermitian_part(&(u * &self.0 * u.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        frob(&self.0)
    }

    /// Eigenvalues in decreasing order with matching eigenvector columns.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        let n = self.dim();
        if n == 0 {
            return (Vec::new(), CMatrix::zeros(0, 0));
        }
        let e = SymmetricEigen::new(self.0.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]).then(a.cmp(&b)));
        let values = order.iter().map(|&k| e.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| e.eigenvectors[(i, order[j])]);
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }
}

impl std::ops::Add for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn add(self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &other.0)
    }
}

/// Haar-distributed unitary matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix the phases of R's diagonal so the distribution is exactly Haar
    let phases = DVector::from_fn(n, |i, _| {
        let d = r[(i, i)];
        if d.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / d.norm()
        }
    });
    q * CMatrix::from_diagonal(&phases)
}

/// Random Hermitian matrix with the given eigenvalues.
pub fn random_hermitian<R: Rng>(values: &[f64], rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::with_spectrum(values, &random_unitary(values.len(), rng))
}

/// Two-sided eigenvalue sequence; eigenvalues within `1e−12·max(1, ‖H‖)` of
/// zero count as zero.
pub fn lambda0_of_matrix(h: &HermitianMatrix) -> TwoSidedSpectrum {
    let eps = 1e-12 * h.frobenius_norm().max(1.0);
    let values: Vec<f64> = h.eigenvalues().into_iter().map(|x| if x.abs() <= eps { 0.0 } else { x }).collect();
    TwoSidedSpectrum::from_eigenvalues(&values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Proceed even if the Horn inequalities or the trace identity fail.
    pub skip_check: bool,
    /// Split on tight Horn inequalities before iterating.
    pub split_tight: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { tol: 1e-8, max_iter: 10_000, restarts: 5, seed: 0, skip_check: false, split_tight: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSet {
    pub a: HermitianMatrix,
    pub betas: Vec<HermitianMatrix>,
    /// `‖A − ΣB⁽ᵏ⁾‖_F`.
    pub sum_residual: f64,
    /// Largest eigenvalue deviation from the target, `A` first.
    pub spectrum_errors: Vec<f64>,
    pub seed: u64,
    pub iterations: usize,
    pub restarts: usize,
}

fn max_dev(h: &HermitianMatrix, target: &[f64]) -> f64 {
    h.eigenvalues().iter().zip(target).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl WitnessSet {
    /// Builds a witness set from matrices, computing its metrics against the
    /// given targets.
    pub fn from_parts(
        a: HermitianMatrix,
        betas: Vec<HermitianMatrix>,
        alpha: &Spectrum,
        targets: &[Spectrum],
    ) -> Result<Self> {
        let n = a.dim();
        if betas.len() != targets.len()
            || alpha.len() != n
            || betas.iter().zip(targets).any(|(b, t)| b.dim() != n || t.len() != n)
        {
            return Err(Error::DimensionMismatch("matrices and target spectra disagree".into()));
        }
        let mut w = WitnessSet {
            a,
            betas,
            sum_residual: 0.0,
            spectrum_errors: Vec::new(),
            seed: 0,
            iterations: 0,
            restarts: 0,
        };
        w.sum_residual = w.residual();
        w.spectrum_errors = std::iter::once(max_dev(&w.a, alpha.values()))
            .chain(w.betas.iter().zip(targets).map(|(b, t)| max_dev(b, t.values())))
            .collect();
        Ok(w)
    }

    /// `‖A − ΣB⁽ᵏ⁾‖_F`, recomputed.
    pub fn residual(&self) -> f64 {
        let mut r = self.a.0.clone();
        for b in &self.betas {
            r -= &b.0;
        }
        frob(&r)
    }

    pub fn n(&self) -> usize {
        self.a.dim()
    }

    pub fn m(&self) -> usize {
        self.betas.len()
    }

    /// Sorted eigenvalues of `A` and of each summand.
    pub fn spectra(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        (self.a.eigenvalues(), self.betas.iter().map(HermitianMatrix::eigenvalues).collect())
    }

    pub fn two_sided_spectra(&self) -> (TwoSidedSpectrum, Vec<TwoSidedSpectrum>) {
        (lambda0_of_matrix(&self.a), self.betas.iter().map(lambda0_of_matrix).collect())
    }

    /// The same witness in another orthonormal basis.
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        WitnessSet {
            a: self.a.conjugated(u),
            betas: self.betas.iter().map(|b| b.conjugated(u)).collect(),
            ..self.clone()
        }
    }
}

/// Closest matrix with spectrum `target` (decreasing): eigenvalues are
/// replaced in the order of the current ones.
fn isospectral(b: &CMatrix, target: &[f64]) -> CMatrix {
    let (_, v) = HermitianMatrix::hermitian_part(b).eigen();
    HermitianMatrix::with_spectrum(target, &v).0
}

struct Attempt {
    betas: Vec<CMatrix>,
    residual: f64,
    iterations: usize,
}

fn alternate(alpha: &[f64], targets: &[Vec<f64>], opts: &SynthOptions, rng: &mut ChaCha8Rng) -> Attempt {
    let a = HermitianMatrix::diagonal(alpha).0;
    let m = targets.len() as f64;
    let mut betas: Vec<CMatrix> = targets.iter().map(|t| random_hermitian(t, rng).0).collect();
    let residual_of = |bs: &[CMatrix]| {
        let mut r = a.clone();
        for b in bs {
            r -= b;
        }
        r
    };
    let mut r = residual_of(&betas);
    let mut best = frob(&r);
    for it in 0..opts.max_iter {
        if best <= opts.tol {
            return Attempt { betas, residual: best, iterations: it };
        }
        let step = r.scale(1.0 / m);
        for (b, t) in betas.iter_mut().zip(targets) {
            *b = isospectral(&(&*b + &step), t);
        }
        r = residual_of(&betas);
        best = frob(&r);
    }
    Attempt { betas, residual: best, iterations: opts.max_iter }
}

/// A tight inequality `t ∈ T_r^N`, `1 ≤ r < N`, if any.
fn tight_split(cat: &HornCatalog, alpha: &[f64], betas: &[Vec<f64>]) -> Option<HornTuple> {
    let n = alpha.len();
    let scale = 1.0 + alpha.iter().chain(betas.iter().flatten()).map(|x| x.abs()).sum::<f64>();
    for r in 1..n {
        let tab = cat.enumerate(HornSetKind::T, n, r).ok()?;
        for t in tab.iter() {
            let lhs: f64 = t.i.iter().map(|i| alpha[i - 1]).sum();
            let rhs: f64 = t.j.iter().zip(betas).map(|(j, b)| j.iter().map(|x| b[x - 1]).sum::<f64>()).sum();
            if (rhs - lhs).abs() <= 1e-10 * scale {
                return Some(t.clone());
            }
        }
    }
    None
}

struct Synth<'a> {
    cat: &'a HornCatalog,
    opts: &'a SynthOptions,
    rng: ChaCha8Rng,
    iterations: usize,
    restarts: usize,
}

impl Synth<'_> {
    /// Summands for `A = diag(alpha)`.
    fn solve(&mut self, alpha: &[f64], targets: &[Vec<f64>]) -> Result<Vec<CMatrix>> {
        let n = alpha.len();
        if n == 1 || targets.len() == 1 {
            return Ok(targets.iter().map(|t| HermitianMatrix::diagonal(t).0).collect());
        }
        if self.opts.split_tight {
            if let Some(t) = tight_split(self.cat, alpha, targets) {
                let pick = |v: &[f64], set: &[usize]| set.iter().map(|&i| v[i - 1]).collect::<Vec<_>>();
                let ic = t.i.complement_in(n);
                let inner: Vec<Vec<f64>> = targets.iter().zip(&t.j).map(|(b, j)| pick(b, j.as_slice())).collect();
                let outer: Vec<Vec<f64>> =
                    targets.iter().zip(&t.j).map(|(b, j)| pick(b, j.complement_in(n).as_slice())).collect();
                let block = self.solve(&pick(alpha, t.i.as_slice()), &inner)?;
                let rest = self.solve(&pick(alpha, ic.as_slice()), &outer)?;
                // place each block on the coordinates of its α entries
                let pos: Vec<usize> = t.i.iter().chain(ic.iter()).map(|i| i - 1).collect();
                let r = t.r();
                return Ok(block
                    .iter()
                    .zip(&rest)
                    .map(|(b, c)| {
                        let mut out = CMatrix::zeros(n, n);
                        for x in 0..n {
                            for y in 0..n {
                                out[(pos[x], pos[y])] = match (x < r, y < r) {
                                    (true, true) => b[(x, y)],
                                    (false, false) => c[(x - r, y - r)],
                                    _ => Complex64::new(0.0, 0.0),
                                };
                            }
                        }
                        out
                    })
                    .collect());
            }
        }
        let mut best = f64::INFINITY;
        for attempt in 0..=self.opts.restarts {
            let run = alternate(alpha, targets, self.opts, &mut self.rng);
            self.iterations += run.iterations;
            if run.residual <= self.opts.tol {
                self.restarts = self.restarts.max(attempt);
                return Ok(run.betas);
            }
            best = best.min(run.residual);
        }
        Err(Error::NonConvergence { restarts: self.opts.restarts, best_residual: best })
    }
}

/// Hermitian `A = diag(α) = ΣB⁽ᵏ⁾` with `Λ(B⁽ᵏ⁾) = β⁽ᵏ⁾`.
pub fn synthesize(cat: &HornCatalog, alpha: &Spectrum, betas: &[Spectrum], opts: &SynthOptions) -> Result<WitnessSet> {
    let n = alpha.len();
    if betas.iter().any(|b| b.len() != n) || !alpha.is_finite() || betas.iter().any(|b| !b.is_finite()) {
        return Err(Error::DimensionMismatch(format!("need finite spectra of length {n}")));
    }
    if betas.is_empty() {
        return Err(Error::DimensionMismatch("at least one summand is required".into()));
    }
    if !opts.skip_check {
        let gap = trace_gap(alpha, betas)?;
        let scale = 1.0 + alpha.values().iter().map(|x| x.abs()).sum::<f64>();
        if gap.abs() > 1e-9 * scale {
            return Err(Error::Hypothesis(format!("trace identity fails by {gap:e}")));
        }
        if let Some(v) = scan_finite(cat, alpha, betas, n, HornSetKind::T)?.first() {
            return Err(Error::Hypothesis(format!("Horn inequality {} fails (slack {:e})", v.tuple, v.slack())));
        }
    }
    let targets: Vec<Vec<f64>> = betas.iter().map(|b| b.values().to_vec()).collect();
    let mut s = Synth { cat, opts, rng: ChaCha8Rng::seed_from_u64(opts.seed), iterations: 0, restarts: 0 };
    let mats = if n == 0 { vec![CMatrix::zeros(0, 0); betas.len()] } else { s.solve(alpha.values(), &targets)? };
    let mut w = WitnessSet::from_parts(
        HermitianMatrix::diagonal(alpha.values()),
        mats.into_iter().map(|m| HermitianMatrix::hermitian_part(&m)).collect(),
        alpha,
        betas,
    )?;
    w.seed = opts.seed;
    w.iterations = s.iterations;
    w.restarts = s.restarts;
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interlacing {
    pub original: TwoSidedSpectrum,
    pub compressed: TwoSidedSpectrum,
    /// Largest of `β_n − α_n` and `α_{−n} − β_{−n}` over `n ≥ 1`.
    pub max_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub rank: usize,
    /// `A` first, then each summand.
    pub matrices: Vec<Interlacing>,
    pub max_violation: f64,
    pub holds: bool,
}

fn check_projection(p: &CMatrix, n: usize) -> Result<()> {
    if p.nrows() != n || p.ncols() != n {
        return Err(Error::InvalidProjection(format!("expected a {n}×{n} matrix")));
    }
    let scale = frob(p).max(1.0);
    let herm = frob(&(p - p.adjoint()));
    let idem = frob(&(p * p - p));
    if herm > 1e-10 * scale || idem > 1e-10 * scale {
        return Err(Error::InvalidProjection(format!("‖P − P*‖ = {herm:e}, ‖P² − P‖ = {idem:e}")));
    }
    Ok(())
}

/// Orthonormal basis of the range of a projection.
fn range_basis(p: &CMatrix) -> CMatrix {
    let (values, vectors) = HermitianMatrix::hermitian_part(p).eigen();
    let k = values.iter().filter(|&&x| x > 0.5).count();
    vectors.columns(0, k).into_owned()
}

fn compress_matrix(h: &HermitianMatrix, q: &CMatrix) -> HermitianMatrix {
    HermitianMatrix::hermitian_part(&(q.adjoint() * &h.0 * q))
}

fn interlacing(original: TwoSidedSpectrum, compressed: TwoSidedSpectrum) -> Interlacing {
    let len = original.pos().len().max(original.neg().len()).max(compressed.pos().len()).max(compressed.neg().len());
    let max_violation = (1..=len as i64)
        .map(|n| {
            let top = compressed.lookup(n) - original.lookup(n);
            let bottom = original.lookup(-n) - compressed.lookup(-n);
            top.max(bottom)
        })
        .fold(0.0, f64::max);
    Interlacing { original, compressed, max_violation }
}

/// Spectra of `PAP` and `PB⁽ᵏ⁾P` on the range of `P`, with the interlacing
/// `α_n ≥ β_n ≥ β_{−n} ≥ α_{−n}` checked for every `n`.
pub fn compress(w: &WitnessSet, p: &CMatrix) -> Result<CompressionReport> {
    check_projection(p, w.n())?;
    let q = range_basis(p);
    let matrices: Vec<Interlacing> = std::iter::once(&w.a)
        .chain(&w.betas)
        .map(|h| interlacing(lambda0_of_matrix(h), lambda0_of_matrix(&compress_matrix(h, &q))))
        .collect();
    let max_violation = matrices.iter().map(|x| x.max_violation).fold(0.0, f64::max);
    let scale = std::iter::once(&w.a).chain(&w.betas).map(HermitianMatrix::frobenius_norm).fold(1.0, f64::max);
    Ok(CompressionReport { rank: q.ncols(), matrices, max_violation, holds: max_violation <= 1e-10 * scale })
}

/// Projection onto the span of the given columns.
pub fn projector(basis: &CMatrix) -> CMatrix {
    basis * basis.adjoint()
}

/// Which data the tuple's inequality is read on.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `(α, β⁽ᵏ⁾)`.
    Direct,
    /// `(ᾱ, β̄⁽ᵏ⁾)`, the spectra of `−A` and `−B⁽ᵏ⁾`.
    Bar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducingReport {
    pub rank: usize,
    /// Slack of the extended inequality on the witness spectra.
    pub slack: f64,
    pub projector: HermitianMatrix,
    /// `‖PA − AP‖` then `‖PB⁽ᵏ⁾ − B⁽ᵏ⁾P‖` (Frobenius).
    pub commutator_norms: Vec<f64>,
    /// Decreasing eigenvalues of the compressions to the candidate subspace.
    pub compressed: Vec<Vec<f64>>,
    /// The lists the equality case predicts, decreasing.
    pub expected: Vec<Vec<f64>>,
    pub spectrum_mismatch: f64,
    pub found: bool,
    pub note: Option<String>,
}

/// Two-sided indices selected by a set with its top `q` entries wrapped.
fn selected_indices(set: &[usize], q: usize, n: usize, orientation: Orientation) -> Vec<i64> {
    let r = set.len();
    set.iter()
        .enumerate()
        .map(|(l, &i)| {
            let k = if l < r - q { i as i64 } else { i as i64 - n as i64 - 1 };
            match orientation {
                Orientation::Direct => k,
                Orientation::Bar => -k,
            }
        })
        .collect()
}

fn predicted(s: &TwoSidedSpectrum, idx: &[i64]) -> Vec<f64> {
    let mut v: Vec<f64> = idx.iter().map(|&k| s.lookup(k)).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Column positions (in decreasing eigenvalue order) realizing two-sided
/// indices; zero entries draw on the kernel.
fn eigen_positions(values: &[f64], idx: &[i64], eps: f64) -> Option<Vec<usize>> {
    let n = values.len();
    let npos = values.iter().filter(|&&x| x > eps).count();
    let nneg = values.iter().filter(|&&x| x < -eps).count();
    let mut kernel = npos..n - nneg;
    let mut out = Vec::new();
    for &k in idx {
        let p = k.unsigned_abs() as usize;
        let pos = if k > 0 && p <= npos {
            p - 1
        } else if k < 0 && p <= nneg {
            n - p
        } else {
            kernel.next()?
        };
        out.push(pos);
    }
    Some(out)
}

fn commutator(p: &CMatrix, h: &HermitianMatrix) -> f64 {
    frob(&(p * &h.0 - &h.0 * p))
}

/// Candidate reducing subspace for an extended inequality holding with
/// equality on the witness spectra.
pub fn detect_reducing(
    w: &WitnessSet,
    t: &HornTuple,
    q: &[usize],
    orientation: Orientation,
    tol: f64,
    seed: u64,
) -> Result<ReducingReport> {
    let (alpha, betas) = w.two_sided_spectra();
    let (a_eval, b_eval) = match orientation {
        Orientation::Direct => (alpha.clone(), betas.clone()),
        Orientation::Bar => (alpha.bar(), betas.iter().map(TwoSidedSpectrum::bar).collect()),
    };
    let rec = eval_extended(t, q, &a_eval, &b_eval)?;
    let slack = rec.slack();
    if slack.abs() > tol {
        return Err(Error::Precondition(format!("inequality is not tight on the witness (slack {slack:e})")));
    }
    let n = t.n;
    let qa: usize = q.iter().sum();
    let a_idx = selected_indices(t.i.as_slice(), qa, n, orientation);
    let b_idx: Vec<Vec<i64>> =
        t.j.iter().zip(q).map(|(j, &qk)| selected_indices(j.as_slice(), qk, n, orientation)).collect();
    let expected: Vec<Vec<f64>> = std::iter::once(predicted(&alpha, &a_idx))
        .chain(betas.iter().zip(&b_idx).map(|(b, idx)| predicted(b, idx)))
        .collect();

    let (values, vectors) = w.a.eigen();
    let scale = w.a.frobenius_norm().max(1.0);
    let eps = 1e-12 * scale;
    let fail = |note: String| ReducingReport {
        rank: 0,
        slack,
        projector: HermitianMatrix::zeros(w.n()),
        commutator_norms: Vec::new(),
        compressed: Vec::new(),
        expected: expected.clone(),
        spectrum_mismatch: f64::INFINITY,
        found: false,
        note: Some(note),
    };
    let Some(cols) = eigen_positions(&values, &a_idx, eps) else {
        return Ok(fail("A has too few zero eigenvalues for the selected indices".into()));
    };
    let basis = refine(&values, &vectors, &cols, &w.betas, 1e-9 * scale, seed);
    let p = projector(&basis);
    let commutator_norms: Vec<f64> = std::iter::once(&w.a).chain(&w.betas).map(|h| commutator(&p, h)).collect();
    let compressed: Vec<Vec<f64>> =
        std::iter::once(&w.a).chain(&w.betas).map(|h| compress_matrix(h, &basis).eigenvalues()).collect();
    let spectrum_mismatch = compressed
        .iter()
        .zip(&expected)
        .flat_map(|(c, e)| c.iter().zip(e).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    let found = commutator_norms.iter().all(|&c| c <= tol) && spectrum_mismatch <= tol;
    Ok(ReducingReport {
        rank: basis.ncols(),
        slack,
        projector: HermitianMatrix::hermitian_part(&p),
        commutator_norms,
        compressed,
        expected,
        spectrum_mismatch,
        found,
        note: (!found).then(|| "no candidate commutes within tolerance".to_string()),
    })
}

/// Eigenvector columns for the chosen positions. Where only part of a
/// degenerate eigenspace is chosen, the subspace inside it is picked among
/// seeded spectral candidates to minimize the commutators with the summands.
fn refine(
    values: &[f64],
    vectors: &CMatrix,
    cols: &[usize],
    betas: &[HermitianMatrix],
    eps: f64,
    seed: u64,
) -> CMatrix {
    let n = values.len();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match clusters.last_mut() {
            Some(c) if (values[c[0]] - values[k]).abs() <= eps => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<DVector<Complex64>> = Vec::new();
    for cluster in &clusters {
        let want = cluster.iter().filter(|k| cols.contains(k)).count();
        if want == 0 {
            continue;
        }
        let e = CMatrix::from_fn(n, cluster.len(), |i, j| vectors[(i, cluster[j])]);
        if want == cluster.len() {
            chosen.extend(e.column_iter().map(|c| c.into_owned()));
            continue;
        }
        let mut best: Option<(f64, CMatrix)> = None;
        for trial in 0..32 {
            let weights: Vec<f64> = if trial < betas.len() {
                (0..betas.len()).map(|k| if k == trial { 1.0 } else { 0.0 }).collect()
            } else {
                (0..betas.len()).map(|_| rng.sample(StandardNormal)).collect()
            };
            let mut h = CMatrix::zeros(cluster.len(), cluster.len());
            for (b, &c) in betas.iter().zip(&weights) {
                h += (e.adjoint() * &b.0 * &e).scale(c);
            }
            let (_, u) = HermitianMatrix::hermitian_part(&h).eigen();
            for cand in [u.columns(0, want).into_owned(), u.columns(cluster.len() - want, want).into_owned()] {
                let sub = &e * cand;
                let p = projector(&sub);
                let score: f64 = betas.iter().map(|b| commutator(&p, b)).sum();
                if best.as_ref().is_none_or(|(s, _)| score < *s) {
                    best = Some((score, sub));
                }
            }
        }
        let (_, sub) = best.expect("at least one candidate");
        chosen.extend(sub.column_iter().map(|c| c.into_owned()));
    }
    CMatrix::from_columns(&chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    fn check(w: &WitnessSet, alpha: &[f64], betas: &[&[f64]], tol: f64) {
        assert!(w.residual() <= tol, "residual {}", w.residual());
        assert!((w.residual() - w.sum_residual).abs() < 1e-15);
        for (x, y) in w.a.eigenvalues().iter().zip(alpha) {
            assert!((x - y).abs() <= 10.0 * tol);
        }
        for (b, t) in w.betas.iter().zip(betas) {
            for (x, y) in b.eigenvalues().iter().zip(t.iter()) {
                assert!((x - y).abs() <= 10.0 * tol);
            }
        }
    }

    #[test]
    fn lambda0_examples() {
        let l = lambda0_of_matrix(&HermitianMatrix::diagonal(&[2.0, -3.0, 0.0]));
        assert_eq!((l.pos(), l.neg()), (&[2.0][..], &[-3.0][..]));
        assert_eq!(lambda0_of_matrix(&HermitianMatrix::zeros(3)), TwoSidedSpectrum::zero());
        let l = lambda0_of_matrix(&HermitianMatrix::diagonal(&[1.0, 1.0, -1.0]));
        assert_eq!((l.pos(), l.neg()), (&[1.0, 1.0][..], &[-1.0][..]));
    }

    #[test]
    fn hermitian_validation() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 1.0);
        assert!(HermitianMatrix::new(m.clone()).is_err());
        m[(1, 0)] = Complex64::new(1.0, -1.0);
        let h = HermitianMatrix::new(m).unwrap();
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<HermitianMatrix>(&json).unwrap(), h);
    }

    #[test]
    fn synth_examples() {
        let cat = HornCatalog::new(2);
        let opts = SynthOptions::default();
        let w = synthesize(&HornCatalog::new(2), &s(&[5.0]), &[s(&[2.0]), s(&[3.0])], &opts).unwrap();
        assert_eq!(w.residual(), 0.0);
        let w = synthesize(&cat, &s(&[2.0, 0.0]), &[s(&[1.0, 0.0]), s(&[1.0, 0.0])], &opts).unwrap();
        check(&w, &[2.0, 0.0], &[&[1.0, 0.0], &[1.0, 0.0]], 1e-8);
        let w = synthesize(&cat, &s(&[1.0, 1.0]), &[s(&[1.0, 0.0]), s(&[1.0, 0.0])], &opts).unwrap();
        check(&w, &[1.0, 1.0], &[&[1.0, 0.0], &[1.0, 0.0]], 1e-8);
    }

    #[test]
    fn synth_by_iteration_only() {
        let cat = HornCatalog::new(2);
        let opts = SynthOptions { split_tight: false, ..SynthOptions::default() };
        let alpha = [3.2, 1.3, -0.5];
        let (b, c) = ([2.0, 1.0, 0.0], [1.5, 0.5, -1.0]);
        let w = synthesize(&cat, &s(&alpha), &[s(&b), s(&c)], &opts).unwrap();
        check(&w, &alpha, &[&b, &c], 1e-8);
        assert!(w.iterations > 0);
    }

    #[test]
    fn synth_rejects_infeasible() {
        let cat = HornCatalog::new(2);
        let r = synthesize(&cat, &s(&[3.0, 0.0]), &[s(&[1.0, 0.0]), s(&[1.0, 0.0])], &SynthOptions::default());
        assert!(matches!(r, Err(Error::Hypothesis(_))));
    }

    #[test]
    fn compression_examples() {
        let alpha = s(&[3.0, 1.0, -2.0]);
        let w = WitnessSet::from_parts(
            HermitianMatrix::diagonal(alpha.values()),
            vec![HermitianMatrix::diagonal(alpha.values())],
            &alpha,
            std::slice::from_ref(&alpha),
        )
        .unwrap();
        let id = CMatrix::identity(3, 3);
        let full = compress(&w, &id).unwrap();
        assert_eq!(full.rank, 3);
        assert_eq!(full.matrices[0].compressed, full.matrices[0].original);
        let zero = compress(&w, &CMatrix::zeros(3, 3)).unwrap();
        assert!(zero.holds && zero.rank == 0 && zero.matrices[0].compressed == TwoSidedSpectrum::zero());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(3, &mut rng);
        let p = projector(&u.columns(0, 2).into_owned());
        let r = compress(&w, &p).unwrap();
        assert!(r.holds && r.rank == 2);
        assert!(matches!(compress(&w, &id.scale(2.0)), Err(Error::InvalidProjection(_))));
    }

    #[test]
    fn reducing_on_block_diagonal() {
        // A = diag(1, ½) ⊕ diag(¼·2), B = diag(0, ½) ⊕ diag(¼), C = diag(1, 0) ⊕ diag(¼)
        let a = s(&[1.0, 0.5, 0.5]);
        let b = HermitianMatrix::diagonal(&[0.0, 0.5, 0.25]);
        let c = HermitianMatrix::diagonal(&[1.0, 0.0, 0.25]);
        let w = WitnessSet::from_parts(
            HermitianMatrix::diagonal(a.values()),
            vec![b, c],
            &a,
            &[s(&[0.5, 0.25, 0.0]), s(&[1.0, 0.25, 0.0])],
        )
        .unwrap();
        let t = HornTuple::from_vecs(2, vec![1, 2], vec![vec![1, 2], vec![1, 2]]);
        let rep = detect_reducing(&w, &t, &[1, 1], Orientation::Bar, 1e-9, 0).unwrap();
        assert!(rep.found, "{rep:?}");
        assert_eq!(rep.rank, 2);
        assert!(rep.commutator_norms.iter().all(|&x| x <= 1e-12));
        assert_eq!(rep.expected, vec![vec![1.0, 0.5], vec![0.5, 0.0], vec![1.0, 0.0]]);
        let t1 = HornTuple::from_vecs(2, vec![1], vec![vec![1], vec![1]]);
        assert!(matches!(detect_reducing(&w, &t1, &[0, 0], Orientation::Direct, 1e-9, 0), Err(Error::Precondition(_))));
    }
}
