//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use horn_core::combinatorics::{pi, subsets};
use horn_core::hive::{example_beta, example_hive, verify_example, EXACT_TOL};
use horn_core::interpolate::{interpolate, is_between, Bounds, InterpolationInput};
use horn_core::partial::{feasible_on_grid, johnson_bounds};
use horn_core::scenarios::{
    half_harmonic, harmonic, harmonic_violation, odd_harmonic, positive_scan_config, reducing_witness,
};
use horn_core::spectra::{scan_extended, scan_finite, scan_finite_sym, scan_positive, trace_gap};
use horn_core::witness::{
    compress, detect_reducing, projector, random_hermitian, random_unitary, synthesize, Orientation, SynthOptions,
    WitnessSet,
};
use horn_core::{lr_coeff, HornCatalog, HornSetKind, HornTuple, ScanConfig, Spectrum};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() <= limit_secs as f64, format!("took {elapsed:.1?}, limit {limit_secs} s"))
}

fn all_triples(n: usize, r: usize) -> Vec<HornTuple> {
    let sets = subsets(n, r);
    let mut out = Vec::new();
    for i in &sets {
        for j in &sets {
            for k in &sets {
                out.push(HornTuple { n, i: i.clone(), j: vec![j.clone(), k.clone()] });
            }
        }
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cat = HornCatalog::new(2);
    let mut cells = 0;
    for n in 0..=5 {
        for r in 0..=n {
            let mut t_set = BTreeSet::new();
            let mut dot_set = BTreeSet::new();
            for t in all_triples(n, r) {
                if t.weight_excess() != 0 {
                    continue;
                }
                let c = lr_coeff(&pi(&t.i), &pi(&t.j[0]), &pi(&t.j[1]));
                if c > 0 {
                    t_set.insert(t.clone());
                }
                if c == 1 {
                    dot_set.insert(t);
                }
            }
            let got: BTreeSet<_> =
                cat.enumerate(HornSetKind::T, n, r).map_err(|e| e.to_string())?.iter().cloned().collect();
            let dot: BTreeSet<_> =
                cat.enumerate(HornSetKind::Tdot, n, r).map_err(|e| e.to_string())?.iter().cloned().collect();
            ensure(got == t_set, format!("T differs at N = {n}, r = {r}"))?;
            ensure(dot == dot_set, format!("Tdot differs at N = {n}, r = {r}"))?;
            cells += 1;
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!("{cells} cells agree, {:.2?}", start.elapsed()))
}

fn exact_small_sets() -> Outcome {
    let cat = HornCatalog::new(2);
    let got = cat.enumerate(HornSetKind::T, 2, 1).map_err(|e| e.to_string())?;
    let want = vec![
        HornTuple::from_vecs(2, vec![1], vec![vec![1], vec![1]]),
        HornTuple::from_vecs(2, vec![2], vec![vec![1], vec![2]]),
        HornTuple::from_vecs(2, vec![2], vec![vec![2], vec![1]]),
    ];
    ensure(*got == want, format!("T_1^2(3) = {got:?}"))?;
    for m in 1..=3 {
        let cat = HornCatalog::new(m);
        for n in 0..=5 {
            let tab = cat.enumerate(HornSetKind::T, n, n).map_err(|e| e.to_string())?;
            ensure(*tab == vec![HornTuple::full(n, m)], format!("full cell at m = {m}, N = {n} is {tab:?}"))?;
        }
    }
    Ok("T_1^2(3) has 3 tuples; full cells are singletons for N <= 5, m <= 3".into())
}

fn count_bound() -> Outcome {
    let m = 2;
    let cat = HornCatalog::new(m);
    let mut checked = 0;
    for n in 1..=2 {
        let size = (m + 1) * n;
        for r in 0..=size {
            for t in cat.enumerate(HornSetKind::Tbar, size, r).map_err(|e| e.to_string())?.iter() {
                let low = t.i.iter().filter(|&x| x <= n).count();
                let high: usize = t.j.iter().map(|j| j.iter().filter(|&x| x > m * n).count()).sum();
                ensure(low + high <= r, format!("{t} breaks the bound"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} relaxed tuples at N = 3, 6"))
}

fn feasible_sequences() -> Outcome {
    let start = Instant::now();
    let cat = HornCatalog::shared(2);
    let cfg = positive_scan_config();
    let mut counts = Vec::new();
    for gamma in [half_harmonic(64), odd_harmonic(64)] {
        let v = scan_positive(&cat, &harmonic(64), &[half_harmonic(64), gamma], &cfg).map_err(|e| e.to_string())?;
        ensure(v.is_empty(), format!("{} violations, first {:?}", v.len(), v.first()))?;
        counts.push(v.len());
    }
    within(start.elapsed(), 60)?;
    Ok(format!("no violations for gamma' and gamma'', {:.2?}", start.elapsed()))
}

fn harmonic_rejection() -> Outcome {
    let cat = HornCatalog::shared(2);
    let v = scan_positive(&cat, &harmonic(64), &[half_harmonic(64), harmonic(64)], &positive_scan_config())
        .map_err(|e| e.to_string())?;
    let rec = harmonic_violation(&v).ok_or("no reverse record at q = (8, 8) among the violations")?;
    let h = |n: usize| (1..=n).map(|k| 1.0 / k as f64).sum::<f64>();
    ensure((rec.lhs - h(16)).abs() <= 1e-6 && (rec.lhs - 3.380729).abs() <= 1e-6, format!("lhs {}", rec.lhs))?;
    ensure((rec.rhs - 1.5 * h(8)).abs() <= 1e-6 && (rec.rhs - 4.076786).abs() <= 1e-6, format!("rhs {}", rec.rhs))?;
    ensure(rec.is_violated(), "record is not violated")?;
    Ok(format!("lhs {:.6} < rhs {:.6}", rec.lhs, rec.rhs))
}

fn reducing_subspace() -> Outcome {
    let w = reducing_witness(16, 0).map_err(|e| e.to_string())?;
    let t = HornTuple::from_vecs(2, vec![1, 2], vec![vec![1, 2], vec![1, 2]]);
    let r = detect_reducing(&w, &t, &[1, 1], Orientation::Bar, 1e-6, 0).map_err(|e| e.to_string())?;
    ensure(r.found && r.rank == 2, format!("rank {}, found {}", r.rank, r.found))?;
    let worst = r.commutator_norms.iter().copied().fold(0.0, f64::max);
    ensure(worst <= 1e-6, format!("commutator norm {worst:e}"))?;
    let want = [[1.0, 0.5], [0.5, 0.0], [1.0, 0.0]];
    let gap = r
        .compressed
        .iter()
        .zip(&want)
        .flat_map(|(got, w)| got.iter().zip(w).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    ensure(r.compressed.len() == 3 && gap <= 1e-6, format!("compressed {:?}", r.compressed))?;
    Ok(format!("rank 2, max commutator {worst:.1e}, spectra within {gap:.1e}"))
}

fn hive() -> Outcome {
    let r = verify_example(60, 60, EXACT_TOL).map_err(|e| e.to_string())?;
    ensure(r.max_rhombus_violation <= 1e-12, format!("rhombus violation {:e}", r.max_rhombus_violation))?;
    ensure(
        r.bottom_mismatch <= 1e-12 && r.left_mismatch <= 1e-12,
        format!("boundary {:e} {:e}", r.bottom_mismatch, r.left_mismatch),
    )?;
    let h = example_hive(60, 60).map_err(|e| e.to_string())?;
    let tail = (1..=10).map(|i| (h.z(i, 60) + example_beta(i)).abs()).fold(0.0, f64::max);
    ensure(tail <= 1.0 / 124.0, format!("tail gap {tail}"))?;
    Ok(format!("max violation {:.1e}, tail gap {tail:.6} <= {:.6}", r.max_rhombus_violation, 1.0 / 124.0))
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(2024);
    let mut max_iter = 0;
    let mut max_restarts = 0;
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=3);
        let betas: Vec<Spectrum> = (0..m).map(|_| int_spectrum(&mut rng, n, -4, 4)).collect();
        let (a, _) = random_sum(&mut rng, &betas);
        let alpha = a.eigenvalues();
        let floor = Spectrum::new(alpha.iter().map(|x| (x + 1e-9).floor()).collect()).unwrap();
        let ceil = Spectrum::new(alpha.iter().map(|x| (x - 1e-9).ceil()).collect()).unwrap();
        let input = InterpolationInput {
            start: Bounds::new(floor.clone(), betas.clone()),
            target: Bounds::new(ceil.clone(), betas.clone()),
        };
        let cat = HornCatalog::shared(m);
        let res = interpolate(&cat, &input, true).map_err(|e| format!("case {case}: {e}"))?;
        ensure(trace_gap(&res.alpha, &res.betas).unwrap() == 0.0, format!("case {case}: trace gap"))?;
        let v = scan_finite(&cat, &res.alpha, &res.betas, n, HornSetKind::T).map_err(|e| e.to_string())?;
        ensure(v.is_empty(), format!("case {case}: {} Horn violations", v.len()))?;
        ensure(
            is_between(res.alpha.values(), floor.values(), ceil.values(), 0.0),
            format!("case {case}: alpha out of bounds"),
        )?;
        ensure(res.betas == betas, format!("case {case}: summands moved"))?;
        let opts = SynthOptions { seed: case, ..SynthOptions::default() };
        let w = synthesize(&cat, &res.alpha, &res.betas, &opts).map_err(|e| format!("case {case}: {e}"))?;
        ensure(w.residual() <= 1e-8, format!("case {case}: residual {:e}", w.residual()))?;
        ensure(w.iterations <= 10_000 && w.restarts <= 5, format!("case {case}: {} iterations", w.iterations))?;
        max_iter = max_iter.max(w.iterations);
        max_restarts = max_restarts.max(w.restarts);
        worst = worst.max(w.residual());
    }
    within(start.elapsed(), 300)?;
    Ok(format!(
        "100 instances, max residual {worst:.1e}, max iterations {max_iter}, max restarts {max_restarts}, {:.2?}",
        start.elapsed()
    ))
}

fn johnson_agreement() -> Outcome {
    let cat = HornCatalog::shared(2);
    let mut rng = rng(31);
    let mut samples = 0;
    let grid: Vec<f64> = (-28..=28).map(|k| k as f64 / 2.0).collect();
    for case in 0..20 {
        let n = case % 4 + 1;
        let betas: Vec<Spectrum> = (0..2).map(|_| int_spectrum(&mut rng, n, -3, 3)).collect();
        let bounds: Vec<(f64, f64)> = (1..=n).map(|p| johnson_bounds(&betas, p, n).unwrap()).collect();
        for (p, &(lo, hi)) in (1..=n).zip(&bounds) {
            let ok = feasible_on_grid(&cat, &betas, p, n, &grid).map_err(|e| e.to_string())?;
            for (v, accepted) in grid.iter().zip(ok) {
                ensure(accepted == (lo..=hi).contains(v), format!("beta {betas:?}, p = {p}, v = {v}"))?;
            }
        }
        let mats_per_case = 10_000 / 20;
        for _ in 0..mats_per_case {
            let (a, _) = random_sum(&mut rng, &betas);
            for (x, &(lo, hi)) in a.eigenvalues().iter().zip(&bounds) {
                ensure(lo - 1e-9 <= *x && *x <= hi + 1e-9, format!("sample {x} outside [{lo}, {hi}]"))?;
            }
            samples += 1;
        }
    }
    Ok(format!("20 instances, every p, grid of {} values, {samples} samples", grid.len()))
}

fn batteries() -> Outcome {
    let cat = HornCatalog::shared(2);
    let cfg = ScanConfig::new(3);
    let mut swap_rejected = 0;
    for seed in 0..200 {
        let (alpha, betas) = two_sided_instance(seed);
        let direct = scan_extended(&cat, &alpha, &betas, &cfg).map_err(|e| e.to_string())?.is_empty();
        let other = scan_extended(&cat, &betas[0].bar(), &[alpha.bar(), betas[1].clone()], &cfg)
            .map_err(|e| e.to_string())?
            .is_empty();
        ensure(direct == other, format!("swap verdicts differ for seed {seed}"))?;
        swap_rejected += usize::from(!direct);
    }
    let mut forms_rejected = 0;
    for seed in 0..200 {
        let (alpha, betas) = balanced_instance(seed);
        let n = alpha.len();
        let a = scan_finite(&cat, &alpha, &betas, n, HornSetKind::T).map_err(|e| e.to_string())?.is_empty();
        let b = scan_finite_sym(&cat, &alpha, &betas, n, HornSetKind::T).map_err(|e| e.to_string())?.is_empty();
        ensure(a == b, format!("Horn and complement forms differ for seed {seed}"))?;
        forms_rejected += usize::from(!a);
    }
    let mut rng = rng(5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let k = rng.random_range(0..=n);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let h = random_hermitian(&values, &mut rng);
        let sorted = Spectrum::from_unsorted(values).unwrap();
        let w = WitnessSet::from_parts(h.clone(), vec![h], &sorted, std::slice::from_ref(&sorted))
            .map_err(|e| e.to_string())?;
        let u = random_unitary(n, &mut rng);
        let rep = compress(&w, &projector(&u.columns(0, k).into_owned())).map_err(|e| e.to_string())?;
        ensure(rep.max_violation <= 1e-10, format!("interlacing violated by {:e}", rep.max_violation))?;
        worst = worst.max(rep.max_violation);
    }
    Ok(format!(
        "swap: 200 agree ({swap_rejected} rejected); forms: 200 agree ({forms_rejected} rejected); interlacing: 100 within {worst:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence, m = 2, N <= 5", oracle_equivalence),
        ("exact small sets", exact_small_sets),
        ("count bound on relaxed sets at size 3N", count_bound),
        ("feasible 1/n sequences, N_max = 4", feasible_sequences),
        ("harmonic violation at q = (8, 8)", harmonic_rejection),
        ("rank-2 reducing subspace, K = 16", reducing_subspace),
        ("example hive 60 x 60", hive),
        ("interpolation and witness round trip", round_trip),
        ("Johnson interval agreement", johnson_agreement),
        ("symmetry and equivalence batteries", batteries),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2} s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2} s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
