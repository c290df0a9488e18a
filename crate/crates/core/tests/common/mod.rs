#![allow(dead_code)]

use horn_core::witness::{random_hermitian, HermitianMatrix};
use horn_core::{Spectrum, TwoSidedSpectrum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Decreasing integer list with entries in `lo..=hi`.
pub fn int_spectrum<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> Spectrum {
    Spectrum::from_unsorted((0..n).map(|_| rng.random_range(lo..=hi) as f64).collect()).unwrap()
}

/// Random summands with the given spectra, and their sum.
pub fn random_sum<R: Rng>(rng: &mut R, betas: &[Spectrum]) -> (HermitianMatrix, Vec<HermitianMatrix>) {
    let mats: Vec<HermitianMatrix> = betas.iter().map(|b| random_hermitian(b.values(), rng)).collect();
    let n = betas[0].len();
    let sum = mats.iter().fold(HermitianMatrix::zeros(n), |acc, b| &acc + b);
    (sum, mats)
}

/// `(α, β⁽ᵏ⁾)` from a random sum of Hermitian matrices with integer spectra.
pub fn feasible_instance<R: Rng>(rng: &mut R, n: usize, m: usize, lo: i64, hi: i64) -> (Spectrum, Vec<Spectrum>) {
    let betas: Vec<Spectrum> = (0..m).map(|_| int_spectrum(rng, n, lo, hi)).collect();
    let (a, _) = random_sum(rng, &betas);
    (Spectrum::new(a.eigenvalues()).unwrap(), betas)
}

/// The length-`k` decreasing list of a two-sided sequence supported in `k` places.
pub fn finite_of(s: &TwoSidedSpectrum, k: usize) -> Spectrum {
    let mut v: Vec<f64> = s.pos().to_vec();
    v.resize(k - s.neg().len(), 0.0);
    v.extend(s.neg().iter().rev());
    Spectrum::new(v).unwrap()
}

pub fn random_two_sided<R: Rng>(rng: &mut R, max_len: usize, hi: i64) -> TwoSidedSpectrum {
    let side = |rng: &mut R| -> Vec<f64> {
        let len = rng.random_range(0..=max_len);
        let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(0..=hi) as f64).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let pos = side(rng);
    let mut neg: Vec<f64> = side(rng).into_iter().map(|x| -x).collect();
    neg.sort_by(|a, b| a.total_cmp(b));
    TwoSidedSpectrum::new(pos, neg).unwrap()
}

/// Two-sided data at size 3: even seeds come from matrix sums, odd seeds
/// replace `α` by random data.
pub fn two_sided_instance(seed: u64) -> (TwoSidedSpectrum, Vec<TwoSidedSpectrum>) {
    let mut rng = rng(seed);
    let (alpha, betas) = feasible_instance(&mut rng, 3, 2, -3, 3);
    let mut alpha = TwoSidedSpectrum::from_eigenvalues(alpha.values());
    let betas: Vec<_> = betas.iter().map(|b| TwoSidedSpectrum::from_eigenvalues(b.values())).collect();
    if seed % 2 == 1 {
        alpha = random_two_sided(&mut rng, 3, 4);
    }
    (alpha, betas)
}

/// Finite data of size `1..=4` satisfying the trace identity: even seeds are
/// matrix sums, odd seeds random `α` shifted to balance the trace.
pub fn balanced_instance(seed: u64) -> (Spectrum, Vec<Spectrum>) {
    let mut rng = rng(1000 + seed);
    let n = rng.random_range(1..=4);
    if seed.is_multiple_of(2) {
        return feasible_instance(&mut rng, n, 2, -3, 3);
    }
    let betas: Vec<_> = (0..2).map(|_| int_spectrum(&mut rng, n, -3, 3)).collect();
    let raw = int_spectrum(&mut rng, n, -5, 5);
    let shift = (betas.iter().map(Spectrum::sum).sum::<f64>() - raw.sum()) / n as f64;
    (Spectrum::new(raw.values().iter().map(|x| x + shift).collect()).unwrap(), betas)
}
