mod common;

use common::*;
use horn_core::spectra::{eval_extended, q_splits};
use horn_core::witness::{
    compress, detect_reducing, lambda0_of_matrix, projector, random_hermitian, random_unitary, synthesize, CMatrix,
    HermitianMatrix, Orientation, SynthOptions, WitnessSet,
};
use horn_core::{HornCatalog, HornSetKind, HornTuple, Spectrum, TwoSidedSpectrum};
use num_complex::Complex64;
use rand::Rng;

fn block_sum(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    let (p, q) = (a.dim(), b.dim());
    let m = CMatrix::from_fn(p + q, p + q, |i, j| match (i < p, j < p) {
        (true, true) => a.matrix()[(i, j)],
        (false, false) => b.matrix()[(i - p, j - p)],
        _ => Complex64::new(0.0, 0.0),
    });
    HermitianMatrix::new(m).unwrap()
}

#[test]
fn converged_witnesses_meet_their_targets() {
    let cats: Vec<_> = (1..=3).map(HornCatalog::new).collect();
    let opts = SynthOptions::default();
    for seed in 0..25u64 {
        let mut rng = rng(40 + seed);
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=3);
        let (alpha, betas) = feasible_instance(&mut rng, n, m, -3, 3);
        let w = synthesize(&cats[m - 1], &alpha, &betas, &SynthOptions { seed, ..opts.clone() })
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(w.residual() <= opts.tol, "seed {seed}: {}", w.residual());
        assert!(w.spectrum_errors.iter().all(|&e| e <= 10.0 * opts.tol), "seed {seed}: {:?}", w.spectrum_errors);
        let close = |h: &HermitianMatrix, s: &Spectrum| {
            let got = lambda0_of_matrix(h);
            let want = s.to_two_sided();
            (1..=n as i64).flat_map(|i| [i, -i]).all(|i| (got.lookup(i) - want.lookup(i)).abs() <= 10.0 * opts.tol)
        };
        assert!(close(&w.a, &alpha));
        assert!(w.betas.iter().zip(&betas).all(|(b, s)| close(b, s)));
    }
}

#[test]
fn extended_inequalities_hold_on_witnesses() {
    let cat = HornCatalog::new(2);
    for seed in 0..20u64 {
        let mut rng = rng(70 + seed);
        let n = rng.random_range(2..=4);
        let (alpha, betas) = feasible_instance(&mut rng, n, 2, -3, 3);
        let w = synthesize(&cat, &alpha, &betas, &SynthOptions { seed, ..Default::default() }).unwrap();
        let (a2, b2) = w.two_sided_spectra();
        for data in [(a2.clone(), b2.clone()), (a2.bar(), b2.iter().map(TwoSidedSpectrum::bar).collect())] {
            for size in 0..=3 {
                for r in 0..=size {
                    for t in cat.enumerate(HornSetKind::T, size, r).unwrap().iter() {
                        for q in q_splits(2, r) {
                            let rec = eval_extended(t, &q, &data.0, &data.1).unwrap();
                            assert!(rec.slack() >= -1e-8, "seed {seed}: {t} q = {q:?} slack {}", rec.slack());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn compressions_interlace() {
    let mut rng = rng(5);
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let k = rng.random_range(0..=n);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let h = random_hermitian(&values, &mut rng);
        let sorted = Spectrum::from_unsorted(values).unwrap();
        let w = WitnessSet::from_parts(h.clone(), vec![h], &sorted, std::slice::from_ref(&sorted)).unwrap();
        let u = random_unitary(n, &mut rng);
        let report = compress(&w, &projector(&u.columns(0, k).into_owned())).unwrap();
        assert_eq!(report.rank, k);
        assert!(report.holds && report.max_violation <= 1e-10, "{}", report.max_violation);
    }
}

#[test]
fn block_diagonal_witnesses_reduce_exactly() {
    for seed in 0..20u64 {
        let mut rng = rng(900 + seed);
        let r = rng.random_range(1..=2);
        let rest = rng.random_range(1..=2);
        let top = |rng: &mut _| int_spectrum(rng, r, 5, 8);
        let low = |rng: &mut _| int_spectrum(rng, rest, -3, 2);
        let (b1, c1, b2, c2) = (top(&mut rng), top(&mut rng), low(&mut rng), low(&mut rng));
        let (a1, m1) = random_sum(&mut rng, &[b1, c1]);
        let (a2, m2) = random_sum(&mut rng, &[b2, c2]);
        let a = block_sum(&a1, &a2);
        let betas = vec![block_sum(&m1[0], &m2[0]), block_sum(&m1[1], &m2[1])];
        let alpha = Spectrum::new(a.eigenvalues()).unwrap();
        let targets: Vec<_> = betas.iter().map(|b| Spectrum::new(b.eigenvalues()).unwrap()).collect();
        let w = WitnessSet::from_parts(a, betas, &alpha, &targets).unwrap();
        let n = r + rest;
        let head: Vec<usize> = (1..=r).collect();
        let t = HornTuple::from_vecs(n, head.clone(), vec![head.clone(), head]);
        let rep = detect_reducing(&w, &t, &[0, 0], Orientation::Direct, 1e-9, seed).unwrap();
        assert!(rep.found && rep.rank == r, "seed {seed}: {rep:?}");
        assert!(rep.commutator_norms.iter().all(|&x| x <= 1e-12), "seed {seed}: {:?}", rep.commutator_norms);
    }
}
