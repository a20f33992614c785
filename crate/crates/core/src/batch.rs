//! Data-parallel sweeps over seeded sample batches.
//!
//! Each sample derives its own generator from (seed, index), so the
//! parallel and sequential paths produce identical results; rayon only
//! changes the wall-clock time. Built with the `parallel` feature
//! (default) the dispatching entry points fan out; without it they fall
//! back to the sequential loops.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::caps::Caps;
use crate::dims::Dims;
use crate::error::Result;
use crate::linear_tests::{eval_test, pearl_suite, LinearTest};
use crate::polyhedra::{lp_feasible_with, verify_certificate, verify_witness, FeasibilityResult};
use crate::response::{response_matrix, sample_compatible, ResponseMatrix};
use crate::sampling;

/// Outcome of checking necessary tests and membership on model samples.
#[derive(Clone, Debug, Default)]
pub struct NecessityReport {
    pub total: usize,
    /// Indices of samples that violated a necessary test or came back
    /// infeasible; must stay empty.
    pub failures: Vec<u64>,
}

fn necessity_one(
    rm: &ResponseMatrix,
    suite: &[LinearTest],
    seed: u64,
    index: u64,
    caps: &Caps,
) -> Result<bool> {
    let q = sampling::response_dist(rm.dims, seed, index, caps)?;
    let f = sample_compatible(rm, &q)?;
    for t in suite {
        if !eval_test(t, &f)?.pass {
            return Ok(false);
        }
    }
    Ok(lp_feasible_with(rm, &f)?.is_feasible())
}

fn collect_failures(results: Vec<(u64, bool)>) -> NecessityReport {
    let total = results.len();
    let failures = results
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(idx, _)| idx)
        .collect();
    NecessityReport { total, failures }
}

/// Sequential sweep: `count` model samples against `suite` and membership.
pub fn necessity_sweep_seq(
    dims: Dims,
    suite: &[LinearTest],
    seed: u64,
    count: u64,
    caps: &Caps,
) -> Result<NecessityReport> {
    let rm = response_matrix(dims, caps)?;
    let results = (0..count)
        .map(|idx| necessity_one(&rm, suite, seed, idx, caps).map(|ok| (idx, ok)))
        .collect::<Result<Vec<_>>>()?;
    Ok(collect_failures(results))
}

/// Parallel sweep; identical output to the sequential one.
#[cfg(feature = "parallel")]
pub fn necessity_sweep_par(
    dims: Dims,
    suite: &[LinearTest],
    seed: u64,
    count: u64,
    caps: &Caps,
) -> Result<NecessityReport> {
    let rm = response_matrix(dims, caps)?;
    let results = (0..count)
        .into_par_iter()
        .map(|idx| necessity_one(&rm, suite, seed, idx, caps).map(|ok| (idx, ok)))
        .collect::<Result<Vec<_>>>()?;
    Ok(collect_failures(results))
}

pub fn necessity_sweep(
    dims: Dims,
    suite: &[LinearTest],
    seed: u64,
    count: u64,
    caps: &Caps,
) -> Result<NecessityReport> {
    #[cfg(feature = "parallel")]
    {
        necessity_sweep_par(dims, suite, seed, count, caps)
    }
    #[cfg(not(feature = "parallel"))]
    {
        necessity_sweep_seq(dims, suite, seed, count, caps)
    }
}

/// The full necessary suite for one dims: the instrumental-inequality
/// tests plus, where the domain can host it, the extended five-term orbit.
pub fn necessary_suite(dims: Dims, caps: &Caps) -> Result<Vec<LinearTest>> {
    let mut suite = pearl_suite(dims, caps)?;
    if let Ok(eq11) = crate::linear_tests::eq11_suite_for(dims, caps) {
        suite.extend(eq11);
    }
    Ok(suite)
}

/// Outcome of the witness/certificate dichotomy over arbitrary valid
/// distributions.
#[derive(Clone, Debug, Default)]
pub struct DichotomyReport {
    pub total: usize,
    pub feasible: usize,
    pub infeasible: usize,
    /// Samples whose witness or certificate failed direct re-verification;
    /// must stay empty.
    pub verify_failures: Vec<u64>,
}

#[derive(Clone, Copy)]
enum DichotomyOutcome {
    FeasibleOk,
    InfeasibleOk,
    VerifyFailed,
}

fn dichotomy_one(rm: &ResponseMatrix, seed: u64, index: u64) -> Result<DichotomyOutcome> {
    let mut rng = sampling::rng_for(seed, sampling::Stream::CondDist, index);
    let dist = sampling::random_cond_dist(rm.dims, &mut rng);
    Ok(match lp_feasible_with(rm, &dist)? {
        FeasibilityResult::Feasible(q) => {
            if verify_witness(rm, &dist, &q) {
                DichotomyOutcome::FeasibleOk
            } else {
                DichotomyOutcome::VerifyFailed
            }
        }
        FeasibilityResult::Infeasible(cert) => {
            if verify_certificate(rm, &dist, &cert) {
                DichotomyOutcome::InfeasibleOk
            } else {
                DichotomyOutcome::VerifyFailed
            }
        }
    })
}

fn collect_dichotomy(results: Vec<(u64, DichotomyOutcome)>) -> DichotomyReport {
    let mut report = DichotomyReport {
        total: results.len(),
        ..Default::default()
    };
    for (idx, outcome) in results {
        match outcome {
            DichotomyOutcome::FeasibleOk => report.feasible += 1,
            DichotomyOutcome::InfeasibleOk => report.infeasible += 1,
            DichotomyOutcome::VerifyFailed => report.verify_failures.push(idx),
        }
    }
    report
}

pub fn dichotomy_sweep_seq(
    dims: Dims,
    seed: u64,
    count: u64,
    caps: &Caps,
) -> Result<DichotomyReport> {
    let rm = response_matrix(dims, caps)?;
    let results = (0..count)
        .map(|idx| dichotomy_one(&rm, seed, idx).map(|o| (idx, o)))
        .collect::<Result<Vec<_>>>()?;
    Ok(collect_dichotomy(results))
}

#[cfg(feature = "parallel")]
pub fn dichotomy_sweep_par(
    dims: Dims,
    seed: u64,
    count: u64,
    caps: &Caps,
) -> Result<DichotomyReport> {
    let rm = response_matrix(dims, caps)?;
    let results = (0..count)
        .into_par_iter()
        .map(|idx| dichotomy_one(&rm, seed, idx).map(|o| (idx, o)))
        .collect::<Result<Vec<_>>>()?;
    Ok(collect_dichotomy(results))
}

pub fn dichotomy_sweep(dims: Dims, seed: u64, count: u64, caps: &Caps) -> Result<DichotomyReport> {
    #[cfg(feature = "parallel")]
    {
        dichotomy_sweep_par(dims, seed, count, caps)
    }
    #[cfg(not(feature = "parallel"))]
    {
        dichotomy_sweep_seq(dims, seed, count, caps)
    }
}

/// Fraction of uniform-random valid distributions that are compatible.
pub fn feasible_fraction(dims: Dims, seed: u64, count: u64, caps: &Caps) -> Result<(u64, u64)> {
    let report = dichotomy_sweep(dims, seed, count, caps)?;
    if !report.verify_failures.is_empty() {
        return Err(crate::error::Error::Internal(format!(
            "verification failures at indices {:?}",
            report.verify_failures
        )));
    }
    Ok((report.feasible as u64, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_dispatch_agree() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let caps = Caps::default();
        let suite = necessary_suite(dims, &caps).unwrap();
        let a = necessity_sweep_seq(dims, &suite, 31, 40, &caps).unwrap();
        let b = necessity_sweep(dims, &suite, 31, 40, &caps).unwrap();
        assert_eq!(a.total, b.total);
        assert_eq!(a.failures, b.failures);
        assert!(a.failures.is_empty());
    }

    #[test]
    fn dichotomy_counts_add_up() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let caps = Caps::default();
        let r = dichotomy_sweep(dims, 77, 60, &caps).unwrap();
        assert_eq!(r.total, 60);
        assert!(r.verify_failures.is_empty());
        assert_eq!(r.feasible + r.infeasible, 60);
        // Random binary distributions land on both sides.
        assert!(r.feasible > 0);
        assert!(r.infeasible > 0);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential_exactly() {
        let dims = Dims::new(2, 2, 3).unwrap();
        let caps = Caps::default();
        let a = dichotomy_sweep_seq(dims, 5, 30, &caps).unwrap();
        let b = dichotomy_sweep_par(dims, 5, 30, &caps).unwrap();
        assert_eq!(a.feasible, b.feasible);
        assert_eq!(a.infeasible, b.infeasible);
        assert_eq!(a.verify_failures, b.verify_failures);
    }
}
