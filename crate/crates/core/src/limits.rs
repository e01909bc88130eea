//! Small-scale limits of the nerve and Vietoris–Rips filtrations, the limit
//! of ordinary magnitude homology, and the chain-level comparison between
//! the two filtrations.
//!
//! A finite space has no distances in `(0, δ)` where `δ` is the smallest
//! positive distance, so every inverse system here is constant below `δ`
//! and its limit is read off at `ε = δ / 2`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::chain::check_prime;
use crate::error::{Error, Result};
use crate::filtration::{build_enriched_nerve, build_vietoris_rips, ComplexKind};
use crate::homology::{mh_generators, Mode};
use crate::metric::{length_spectrum, FiniteMetricSpace, Flag, ScaledDistances};
use crate::persistence::reduce_persistence;

/// Scale below which both filtrations are constant, or `None` for a single point.
pub fn stabilization_threshold(space: &FiniteMetricSpace) -> Option<BigRational> {
    space.min_positive_distance()
}

/// A scale inside the stable range.
pub fn stable_scale(space: &FiniteMetricSpace) -> BigRational {
    stabilization_threshold(space).map_or_else(BigRational::zero, |d| d / BigInt::from(2))
}

/// Rank over `F_p` of `H_k` of the chosen filtration in its stable range.
pub fn limit_homology(space: &FiniteMetricSpace, k: usize, which: ComplexKind, p: u64) -> Result<usize> {
    check_prime(p)?;
    space.require(&[Flag::Separated])?;
    let eps = stable_scale(space);
    let complex = match which {
        ComplexKind::Nerve => build_enriched_nerve(space, k + 1, &eps)?,
        ComplexKind::Rips => build_vietoris_rips(space, k + 1, &eps)?,
    };
    Ok(reduce_persistence(&complex, p)?.alive_at(k, &eps))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinaryLimit {
    pub k: usize,
    pub rank: usize,
    /// Grade pairs `(l, l')` whose connecting map was built and found zero.
    pub audited: Vec<(BigRational, BigRational)>,
}

/// Limit of ordinary magnitude homology in degree `k`.
///
/// For every pair of grades `l < l'` in the length spectrum (tuples of
/// degree up to `k + 2`), the map induced on degree `k` and `k + 1` chains
/// is built generator by generator; every one must vanish.
pub fn ordinary_mh_limit(space: &FiniteMetricSpace, k: usize) -> Result<OrdinaryLimit> {
    space.require(&[Flag::ZeroDiagonal, Flag::Separated, Flag::TriangleOk])?;
    let scaled = space.scaled();
    let bound = space.diameter() * BigInt::from(k as u64 + 2);
    let spectrum = length_spectrum(space, k + 2, &bound);
    let mut audited = Vec::new();
    for (a, l) in spectrum.iter().enumerate() {
        for l2 in &spectrum[a + 1..] {
            for n in [k, k + 1] {
                let target = scaled.exact_scaled(l2);
                for g in mh_generators(space, n, l, Mode::Normalized) {
                    if connecting_image(scaled, g.indices(), target) {
                        return Err(Error::InternalCheck(format!(
                            "connecting map from grade {l} to {l2} is nonzero on {:?}",
                            g.indices()
                        )));
                    }
                }
            }
            audited.push((l.clone(), l2.clone()));
        }
    }
    Ok(OrdinaryLimit { k, rank: 0, audited })
}

/// Whether `x` survives in the grade-`target` chains.
fn connecting_image(scaled: &ScaledDistances, x: &[usize], target: Option<u64>) -> bool {
    target.is_some() && scaled.tuple_length(x) == target
}

/// `(blurred limit, ordinary limit)` in degree 0.
pub fn separation_witness(space: &FiniteMetricSpace, p: u64) -> Result<(usize, usize)> {
    let blurred = limit_homology(space, 0, ComplexKind::Nerve, p)?;
    let ordinary = ordinary_mh_limit(space, 0)?.rank;
    Ok((blurred, ordinary))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramCheck {
    pub diagram: &'static str,
    pub eps: BigRational,
    /// Larger scale for the naturality squares.
    pub eps_to: Option<BigRational>,
    pub cells: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximationReport {
    pub k: usize,
    pub c: BigRational,
    pub sampled_eps: Vec<BigRational>,
    pub checks: Vec<DiagramCheck>,
    pub threshold: Option<BigRational>,
    pub limit_nerve: usize,
    pub limit_rips: usize,
    pub isomorphic: bool,
}

impl ApproximationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let threshold = self.threshold.as_ref().map_or("none".to_string(), |t| t.to_string());
        let eps: Vec<String> = self.sampled_eps.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(s, "k: {}", self.k);
        let _ = writeln!(s, "c: {}", self.c);
        let _ = writeln!(s, "sampled eps: {}", eps.join(" "));
        let _ = writeln!(s, "stabilization threshold: {threshold}");
        let _ = writeln!(s, "checks passed: {passed}/{}", self.checks.len());
        let _ = writeln!(s, "limit nerve: {}", self.limit_nerve);
        let _ = writeln!(s, "limit rips: {}", self.limit_rips);
        let _ = writeln!(s, "isomorphic: {}", self.isomorphic);
        s
    }

    /// `diagram<TAB>eps<TAB>eps_to<TAB>cells<TAB>pass`; `-` when there is no second scale.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let to = c.eps_to.as_ref().map_or("-".to_string(), |e| e.to_string());
            let _ = writeln!(s, "{}\t{}\t{to}\t{}\t{}", c.diagram, c.eps, c.cells, c.pass);
        }
        s
    }
}

/// Nondegenerate tuples of degree `<= max_degree` with every pairwise distance `<= bound`.
fn rips_tuples(scaled: &ScaledDistances, max_degree: usize, bound: Option<u64>) -> Vec<Vec<usize>> {
    fn extend(s: &ScaledDistances, stack: &mut Vec<usize>, max_degree: usize, bound: u64, out: &mut Vec<Vec<usize>>) {
        out.push(stack.clone());
        if stack.len() > max_degree {
            return;
        }
        for v in 0..s.size() {
            if Some(&v) == stack.last() {
                continue;
            }
            if stack.iter().all(|&u| s.step(u, v).is_some_and(|d| d <= bound)) {
                stack.push(v);
                extend(s, stack, max_degree, bound, out);
                stack.pop();
            }
        }
    }
    let mut out = Vec::new();
    if let Some(bound) = bound {
        for v in 0..scaled.size() {
            extend(scaled, &mut vec![v], max_degree, bound, &mut out);
        }
    }
    out
}

fn nerve_tuples(scaled: &ScaledDistances, max_degree: usize, bound: Option<u64>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if let Some(bound) = bound {
        let _ = scaled.for_each_tuple(max_degree, bound, true, &mut |t, _| {
            out.push(t.to_vec());
            Ok(())
        });
    }
    out
}

struct Membership<'a> {
    scaled: &'a ScaledDistances,
}

impl Membership<'_> {
    fn nerve(&self, t: &[usize], eps: &BigRational) -> bool {
        match (self.scaled.tuple_length(t), self.scaled.floor_bound(eps)) {
            (Some(len), Some(b)) => len <= b,
            _ => false,
        }
    }

    fn rips(&self, t: &[usize], eps: &BigRational) -> bool {
        let Some(b) = self.scaled.floor_bound(eps) else { return false };
        t.iter().all(|&u| t.iter().all(|&v| self.scaled.step(u, v).is_some_and(|d| d <= b)))
    }
}

/// Chain-level check that the truncated nerve and Vietoris–Rips systems are
/// `(k + 1)`-approximations of each other, plus both limits in degree `k`.
pub fn c_approximation_check(
    space: &FiniteMetricSpace,
    k: usize,
    p: u64,
    sample_eps: &[BigRational],
) -> Result<ApproximationReport> {
    check_prime(p)?;
    space.require(&[Flag::ZeroDiagonal, Flag::Symmetric, Flag::Separated, Flag::TriangleOk])?;
    if let Some(e) = sample_eps.iter().find(|e| e < &&BigRational::zero()) {
        return Err(Error::Usage(format!("sampled eps must be non-negative, got {e}")));
    }
    let scaled = space.scaled();
    let c = BigRational::from_integer(BigInt::from(k as u64 + 1));
    let c2 = &c * &c;
    let dim = k + 1;
    let mem = Membership { scaled };
    let mut sampled: Vec<BigRational> = sample_eps.to_vec();
    sampled.sort();
    sampled.dedup();

    let mut checks = Vec::new();
    let mut record = |diagram, eps: &BigRational, eps_to: Option<&BigRational>, cells: &[Vec<usize>], ok: &dyn Fn(&[usize]) -> bool| {
        checks.push(DiagramCheck {
            diagram,
            eps: eps.clone(),
            eps_to: eps_to.cloned(),
            cells: cells.len(),
            pass: cells.iter().all(|t| ok(t)),
        });
    };
    for (i, eps) in sampled.iter().enumerate() {
        let ce = &c * eps;
        let c2e = &c2 * eps;
        let nerve = nerve_tuples(scaled, dim, scaled.floor_bound(eps));
        let rips = rips_tuples(scaled, dim, scaled.floor_bound(eps));
        record("nerve_in_rips", eps, None, &nerve, &|t| mem.rips(t, eps));
        record("rips_in_nerve", eps, None, &rips, &|t| mem.nerve(t, &ce));
        record("triangle_nerve", eps, None, &nerve, &|t| mem.rips(t, &ce) && mem.nerve(t, &c2e));
        record("triangle_rips", eps, None, &rips, &|t| mem.nerve(t, &ce) && mem.rips(t, &c2e));
        let next = sampled.get(i + 1).unwrap_or(eps);
        let cn = &c * next;
        record("square_phi", eps, Some(next), &nerve, &|t| {
            mem.nerve(t, next) && mem.rips(t, &ce) && mem.rips(t, &cn)
        });
        record("square_psi", eps, Some(next), &rips, &|t| {
            mem.rips(t, next) && mem.nerve(t, &ce) && mem.nerve(t, &cn)
        });
    }

    let limit_nerve = limit_homology(space, k, ComplexKind::Nerve, p)?;
    let limit_rips = limit_homology(space, k, ComplexKind::Rips, p)?;
    Ok(ApproximationReport {
        k,
        c,
        sampled_eps: sampled,
        threshold: stabilization_threshold(space),
        isomorphic: limit_nerve == limit_rips,
        limit_nerve,
        limit_rips,
        checks,
    })
}
