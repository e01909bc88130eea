//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use magnipersist::filtration::{build_enriched_nerve, build_vietoris_rips, ComplexKind};
use magnipersist::homology::{chain_block, euler_check, magnitude_homology, mh_boundary, Mode};
use magnipersist::limits::{c_approximation_check, limit_homology, separation_witness};
use magnipersist::magnitude::{magnitude_function_eval, magnitude_rational, Poly, RationalFunctionQ};
use magnipersist::metric::length_spectrum;
use magnipersist::persistence::{blurred_mh, coend_complex_at, reduce_persistence, Bar};
use magnipersist::snf::{smith_normal_form, IntMatrix};
use magnipersist::FiniteMetricSpace;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_spaces(seed: u64, count: usize, sizes: std::ops::RangeInclusive<usize>, symmetric: bool) -> Vec<FiniteMetricSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = acceptance_values();
    (0..count)
        .map(|_| {
            let m = rng.gen_range(sizes.clone());
            random_space(&mut rng, m, &values, symmetric)
        })
        .collect()
}

/// Fixtures plus random symmetric spaces: the shared "test spaces".
fn test_spaces() -> Vec<FiniteMetricSpace> {
    let mut v: Vec<_> = fixtures().into_iter().map(|(_, s)| s).collect();
    v.extend(random_spaces(30, 20, 1..=5, true));
    v
}

fn categorification() -> Check {
    let spaces = random_spaces(10, 50, 3..=5, true);
    let mut rows = 0;
    for (i, s) in spaces.iter().enumerate() {
        let delta = s.min_positive_distance().unwrap();
        let l_max = &delta * BigInt::from(2);
        let n_max = (&l_max / &delta).ceil().to_integer().try_into().unwrap_or(0usize) + 1;
        let report = euler_check(s, n_max, &l_max).map_err(|e| format!("space {i}: {e}"))?;
        for row in &report.rows {
            ensure(row.ok, || format!("space {i}: grade {} chi {} series {} expansion {}", row.grade, row.chi, row.series, row.expansion))?;
            let oracle = signed_tuple_count(s, &row.grade);
            ensure(row.chi == oracle, || format!("space {i}: grade {} chi {} but brute force {oracle}", row.grade, row.chi))?;
        }
        rows += report.rows.len();
    }
    Ok(format!("50 spaces, {rows} grades"))
}

fn blurred_equals_nerve_persistence() -> Check {
    let mut spaces = random_spaces(20, 10, 1..=5, true);
    spaces.extend(random_spaces(21, 10, 1..=5, false));
    let dim_max = 3;
    let mut checks = 0;
    for (i, s) in spaces.iter().enumerate() {
        let eps_max = s.diameter() * BigInt::from(dim_max as u64);
        let barcode = blurred_mh(s, dim_max, &eps_max, 2).map_err(|e| e.to_string())?;
        let complex = build_enriched_nerve(s, dim_max, &eps_max).map_err(|e| e.to_string())?;
        for eps in complex.critical_values() {
            let betti = coend_complex_at(s, &eps, dim_max, false).and_then(|c| c.betti(2)).map_err(|e| e.to_string())?;
            for (k, &rank) in betti.iter().enumerate() {
                let alive = barcode.alive_at(k, &eps);
                ensure(rank == alive, || format!("space {i}: eps {eps} k {k}: coend rank {rank}, bars {alive}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("20 spaces, {checks} (eps, k) checks"))
}

fn limit_separation() -> Check {
    let spaces = test_spaces();
    for (i, s) in spaces.iter().enumerate() {
        let w = separation_witness(s, 2).map_err(|e| e.to_string())?;
        ensure(w == (s.len(), 0), || format!("space {i}: witness {w:?}, expected ({}, 0)", s.len()))?;
    }
    Ok(format!("{} spaces", spaces.len()))
}

fn limit_agreement() -> Check {
    let spaces = test_spaces();
    for (i, s) in spaces.iter().enumerate() {
        for which in [ComplexKind::Nerve, ComplexKind::Rips] {
            let h0 = limit_homology(s, 0, which, 2).map_err(|e| e.to_string())?;
            let h1 = limit_homology(s, 1, which, 2).map_err(|e| e.to_string())?;
            ensure((h0, h1) == (s.len(), 0), || format!("space {i} {which}: limits ({h0}, {h1})"))?;
        }
    }
    let mut diagrams = 0;
    for (i, s) in random_spaces(40, 20, 1..=5, true).iter().enumerate() {
        let mut sample: Vec<BigRational> = Vec::new();
        for a in 0..s.len() {
            for b in 0..s.len() {
                let d = s.dist(a, b).finite().unwrap().clone();
                sample.push(&d / BigInt::from(2));
                sample.push(d);
            }
        }
        for k in [0, 1] {
            let rep = c_approximation_check(s, k, 2, &sample).map_err(|e| e.to_string())?;
            let failed: Vec<_> = rep.checks.iter().filter(|c| !c.pass).map(|c| format!("{}@{}", c.diagram, c.eps)).collect();
            ensure(failed.is_empty(), || format!("space {i} k {k}: failed {failed:?}"))?;
            ensure(rep.isomorphic, || format!("space {i} k {k}: limits {} vs {}", rep.limit_nerve, rep.limit_rips))?;
            diagrams += rep.checks.len();
        }
    }
    Ok(format!("{} spaces for limits, {diagrams} diagram checks", spaces.len()))
}

fn closed_forms() -> Check {
    let cases: [(&str, FiniteMetricSpace, &[i64], &[i64]); 3] =
        [("two", two_points(), &[2], &[1, 1]), ("t3", t3(), &[3, -1], &[1, 1]), ("e3", e3(), &[3], &[1, 2])];
    for (name, s, num, den) in cases {
        let f = magnitude_rational(&s).map_err(|e| e.to_string())?;
        let want = RationalFunctionQ::new(1, Poly::from_i64(num), Poly::from_i64(den));
        ensure(f == want, || format!("{name}: magnitude {f}"))?;
        for u in [r(1, 2), r(1, 3), r(2, 7)] {
            let num_v: BigRational = num.iter().rev().fold(BigRational::zero(), |a, &c| a * &u + r(c, 1));
            let den_v: BigRational = den.iter().rev().fold(BigRational::zero(), |a, &c| a * &u + r(c, 1));
            let oracle = magnitude_at_u(&s, &u).unwrap();
            ensure(oracle == num_v / den_v, || format!("{name}: closed form disagrees with direct inversion at {u}"))?;
        }
    }
    let s = two_points();
    let table = magnitude_homology(&s, 2, &r(2, 1), Mode::Normalized).map_err(|e| e.to_string())?;
    for n in [1usize, 2] {
        let g = table.get(n, &r(n as i64, 1));
        ensure(g.rank == 2 && g.torsion.is_empty(), || format!("two: H_{n} at grade {n} is {g}"))?;
        let oracle = mh_ranks_oracle(&s, n, &r(n as i64, 1));
        ensure(oracle == (2, 2, 2), || format!("two: brute-force ranks {oracle:?}"))?;
    }
    let b = blurred_mh(&s, 3, &r(3, 1), 2).map_err(|e| e.to_string())?;
    let h1: Vec<&Bar> = b.in_degree(1).collect();
    ensure(h1.len() == 1 && h1[0].birth == r(1, 1) && h1[0].death == Some(r(2, 1)), || format!("two: H_1 bars {h1:?}"))?;
    Ok("3 magnitudes, MH of two points, blurred H_1".into())
}

fn magnitude_function() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let mut worst = 0f64;
    for i in 0..10 {
        let s = random_grid_space(&mut rng, 4, 6);
        let v = magnitude_function_eval(&s, &r(20, 1), 12).map_err(|e| e.to_string())?;
        let err = (v.value - 4.0).abs();
        worst = worst.max(err);
        ensure(err <= 1e-6, || format!("grid {i}: |tX| at t=20 is {}", v.decimal))?;
        for t in [r(1, 10), r(1, 1), r(10, 1)] {
            let v = magnitude_function_eval(&s, &t, 12).map_err(|e| e.to_string())?;
            ensure(v.value >= 1.0, || format!("grid {i}: |tX| at t={t} is {}", v.decimal))?;
        }
    }
    Ok(format!("10 grid spaces, max |f - 4| at t=20: {worst:.2e}"))
}

fn check_snf(m: &IntMatrix) -> Result<(), String> {
    let f = smith_normal_form(m);
    ensure(f.u.mul(m).mul(&f.v) == f.d, || format!("U M V != D for\n{m}"))?;
    ensure(f.u.determinant().abs().is_one() && f.v.determinant().abs().is_one(), || format!("transforms not unimodular for\n{m}"))?;
    for i in 0..f.d.rows() {
        for j in 0..f.d.cols() {
            ensure(i == j || f.d[(i, j)].is_zero(), || format!("D not diagonal for\n{m}"))?;
        }
    }
    let diag = f.diagonal();
    ensure(diag.iter().all(|x| !x.is_negative()), || format!("negative invariant factor for\n{m}"))?;
    for w in diag.windows(2) {
        ensure(if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) }, || format!("divisibility fails for\n{m}"))?;
    }
    Ok(())
}

fn structural_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let mut spaces = test_spaces();
    spaces.extend(random_spaces(71, 5, 2..=4, false));

    let mut blocks = 0;
    for (i, s) in spaces.iter().enumerate() {
        let modes: &[Mode] = if s.flags().get(magnipersist::Flag::Separated) { &[Mode::Normalized, Mode::Unnormalized] } else { &[Mode::Unnormalized] };
        let l_max = s.diameter() * BigInt::from(3);
        for &mode in modes {
            for l in length_spectrum(s, 3, &l_max) {
                for n in 2..=4 {
                    let (c0, c1, c2) = (chain_block(s, n - 2, &l, mode), chain_block(s, n - 1, &l, mode), chain_block(s, n, &l, mode));
                    let d1 = mh_boundary(s, &c1, &c0).map_err(|e| e.to_string())?;
                    let d2 = mh_boundary(s, &c2, &c1).map_err(|e| e.to_string())?;
                    ensure(d1.mul(&d2).is_zero(), || format!("space {i}: MH boundary squares to nonzero at ({n}, {l}) {mode}"))?;
                    blocks += 1;
                }
            }
        }
        let eps = s.diameter() * BigInt::from(3);
        let mut complexes = vec![build_enriched_nerve(s, 3, &eps).map_err(|e| e.to_string())?];
        if s.flags().get(magnipersist::Flag::Symmetric) {
            complexes.push(build_vietoris_rips(s, 3, &eps).map_err(|e| e.to_string())?);
        }
        for c in &complexes {
            for k in 2..=3 {
                ensure(c.boundary_in_dim(k - 1, None).composes_to_zero(&c.boundary_in_dim(k, None)), || format!("space {i}: {} boundary squares to nonzero", c.kind))?;
                blocks += 1;
            }
        }
        for e in [&eps, &s.diameter()] {
            let c = coend_complex_at(s, e, 3, true).map_err(|e| e.to_string())?;
            ensure(c.boundary_squares_to_zero(), || format!("space {i}: sublevel boundary squares to nonzero"))?;
            blocks += 1;
        }
    }

    for _ in 0..100 {
        let (rows, cols) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let data: Vec<Vec<i64>> = if rng.gen_bool(0.3) {
            // Low rank: a product through a thin inner dimension.
            let k = rng.gen_range(1..=rows.min(cols));
            let a: Vec<Vec<i64>> = (0..rows).map(|_| (0..k).map(|_| rng.gen_range(-4..=4)).collect()).collect();
            let b: Vec<Vec<i64>> = (0..k).map(|_| (0..cols).map(|_| rng.gen_range(-4..=4)).collect()).collect();
            (0..rows).map(|i| (0..cols).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
        } else {
            (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect()).collect()
        };
        check_snf(&IntMatrix::from_rows(&data))?;
    }

    let small = all_small_spaces(&[r(1, 1), r(2, 1), r(3, 1)]);
    for (i, s) in small.iter().enumerate() {
        let l_max = s.diameter() * BigInt::from(3);
        let a = magnitude_homology(s, 3, &l_max, Mode::Normalized).map_err(|e| e.to_string())?;
        let b = magnitude_homology(s, 3, &l_max, Mode::Unnormalized).map_err(|e| e.to_string())?;
        ensure(a.groups == b.groups, || format!("small space {i}: normalized and unnormalized differ"))?;
    }

    let mut relabels = 0;
    for (i, s) in test_spaces().iter().enumerate() {
        let l_max = s.min_positive_distance().unwrap_or_else(BigRational::one) * BigInt::from(2);
        let eps = s.diameter() * BigInt::from(2);
        let mh = magnitude_homology(s, 2, &l_max, Mode::Normalized).map_err(|e| e.to_string())?;
        let blurred = blurred_mh(s, 2, &eps, 2).map_err(|e| e.to_string())?;
        let rips = reduce_persistence(&build_vietoris_rips(s, 2, &eps).map_err(|e| e.to_string())?, 2).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let p = s.relabel(&random_permutation(&mut rng, s.len())).map_err(|e| e.to_string())?;
            let mh2 = magnitude_homology(&p, 2, &l_max, Mode::Normalized).map_err(|e| e.to_string())?;
            ensure(mh2.groups == mh.groups, || format!("space {i}: MH changed under relabeling"))?;
            ensure(blurred_mh(&p, 2, &eps, 2).map_err(|e| e.to_string())? == blurred, || format!("space {i}: blurred barcode changed under relabeling"))?;
            let rips2 = reduce_persistence(&build_vietoris_rips(&p, 2, &eps).map_err(|e| e.to_string())?, 2).map_err(|e| e.to_string())?;
            ensure(rips2 == rips, || format!("space {i}: Rips barcode changed under relabeling"))?;
            relabels += 1;
        }
    }
    Ok(format!("{blocks} boundary compositions, 100 SNFs, {} small spaces, {relabels} relabelings", small.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Option<Duration>); 7] = [
        ("categorification", categorification, Some(Duration::from_secs(60))),
        ("blurred MH equals nerve persistence", blurred_equals_nerve_persistence, Some(Duration::from_secs(120))),
        ("limit separation", limit_separation, None),
        ("limit agreement", limit_agreement, None),
        ("closed-form fixtures", closed_forms, None),
        ("magnitude function", magnitude_function, None),
        ("structural invariants", structural_invariants, Some(Duration::from_secs(60))),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if elapsed > *l => Err(format!("took {:.1}s, limit {}s", elapsed.as_secs_f64(), l.as_secs())),
            (r, _) => r,
        };
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d.as_str()),
            Err(e) => ("FAIL", e.as_str()),
        };
        if result.is_err() {
            failures += 1;
        }
        println!("criterion {} ({name}): {status} [{:.2}s] {detail}", i + 1, elapsed.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
