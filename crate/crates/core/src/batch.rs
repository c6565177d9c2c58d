//! Batch drivers for the embarrassingly parallel workloads: validating
//! families of laws, reversion roundtrips, and the certificate sweeps.
//!
//! With the `parallel` feature (default) the batch map fans out over rayon;
//! without it the same code runs sequentially. Results are collected in
//! input order either way, so output never depends on scheduling. The
//! explicitly sequential variant stays available for benchmarking both paths
//! against each other.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::category::{from_alg_system, to_alg_system};
use crate::error::Result;
use crate::fgl::{validate, FormalGroupLaw};
use crate::ring::Ring;
use crate::sampling::{ring_suite, Sampler};
use crate::series::Series1;

/// Map a pure function over a batch, in parallel when the feature is on.
pub fn map_batch<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(|t| f(t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(|t| f(t)).collect()
    }
}

/// The always-sequential variant, for comparing against the parallel path.
pub fn map_batch_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Validate a family of laws; true iff every one passes.
pub fn validate_all(laws: &[FormalGroupLaw]) -> bool {
    map_batch(laws, |law| validate(law.series().clone()).is_ok())
        .into_iter()
        .all(|ok| ok)
}

/// One pass/fail line per suite of the self-test mode.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Run the invariant suites on seeded samples. Deterministic for a fixed
/// seed and order.
pub fn run_self_test(seed: u64, order: usize) -> Vec<SuiteReport> {
    let mut reports = Vec::new();
    let rings = ring_suite();

    // ring axioms on sampled triples
    {
        let mut sampler = Sampler::new(seed);
        let mut cases = 0;
        let mut failures = 0;
        for ring in &rings {
            for _ in 0..20 {
                let a = sampler.element(ring);
                let b = sampler.element(ring);
                let c = sampler.element(ring);
                cases += 1;
                let assoc = a.mul(&b).mul(&c) == a.mul(&b.mul(&c));
                let comm = a.mul(&b) == b.mul(&a) && a.add(&b) == b.add(&a);
                let distr = a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c));
                let units = a.mul(&ring.one()) == a && a.add(&ring.zero()) == a;
                if !(assoc && comm && distr && units) {
                    failures += 1;
                }
            }
        }
        reports.push(SuiteReport {
            name: "ring axioms on sampled triples",
            cases,
            failures,
        });
    }

    // reversion roundtrips
    {
        let mut sampler = Sampler::new(seed.wrapping_add(1));
        let mut batch: Vec<(Ring, Series1)> = Vec::new();
        for ring in &rings {
            for _ in 0..20 {
                batch.push((ring.clone(), sampler.reversible_series(ring, order)));
            }
        }
        let results = map_batch(&batch, |(ring, g)| {
            let t = Series1::identity(ring, order);
            match g.reverse() {
                Ok(rev) => {
                    g.compose(&rev).map(|c| c == t).unwrap_or(false)
                        && rev.compose(g).map(|c| c == t).unwrap_or(false)
                        && rev.reverse().map(|rr| rr == *g).unwrap_or(false)
                }
                Err(_) => false,
            }
        });
        reports.push(SuiteReport {
            name: "reversion roundtrips",
            cases: results.len(),
            failures: results.iter().filter(|ok| !**ok).count(),
        });
    }

    // transform contravariance and inverse laws
    {
        let mut sampler = Sampler::new(seed.wrapping_add(2));
        let mut batch = Vec::new();
        for ring in &rings {
            for _ in 0..10 {
                let f = sampler.law(ring, order);
                let g = sampler.coordinate_change(ring, order);
                let h = sampler.coordinate_change(ring, order);
                batch.push((f, g, h));
            }
        }
        let results = map_batch(&batch, |(f, g, h)| -> Result<bool> {
            let lhs = f.transform(g)?.transform(h)?;
            let rhs = f.transform(&h.compose(g)?)?;
            let back = f.transform(g)?.transform(&g.reverse()?)?;
            let inv = f.formal_inverse()?;
            let x = Series1::identity(f.ring(), f.order());
            let composed = f.series().subst_into1(&x, &inv)?;
            Ok(lhs == rhs && back == *f && composed.is_zero())
        });
        reports.push(SuiteReport {
            name: "transform contravariance, roundtrip, formal inverses",
            cases: results.len(),
            failures: results.iter().filter(|r| !matches!(r, Ok(true))).count(),
        });
    }

    // coordinate-system/law-chain equivalence roundtrip
    {
        let mut sampler = Sampler::new(seed.wrapping_add(3));
        let mut batch = Vec::new();
        for ring in &rings {
            for r in 0..3usize {
                batch.push(sampler.fg_object(ring, order, r));
            }
        }
        let results = map_batch(&batch, |x| -> Result<bool> {
            let sys = to_alg_system(x)?;
            let back = from_alg_system(&sys)?;
            Ok(back == *x)
        });
        reports.push(SuiteReport {
            name: "coordinate-system/law-chain equivalence roundtrip",
            cases: results.len(),
            failures: results.iter().filter(|r| !matches!(r, Ok(true))).count(),
        });
    }

    // presentation composition agreement on generators
    {
        let mut sampler = Sampler::new(seed.wrapping_add(4));
        let mut cases = 0;
        let mut failures = 0;
        for _ in 0..10 {
            let inner = sampler.triangular_presentation(4, 2);
            let Ok(inner_result) = inner.result_ring() else {
                failures += 1;
                cases += 1;
                continue;
            };
            // quotient one of the free variables of the result
            let extra = inner_result.var("v3").unwrap().sub(&inner_result.from_int(1));
            let outer =
                crate::lrq::Presentation::new(inner_result, vec![], vec![extra]).unwrap();
            cases += 1;
            match crate::lrq::compose(&outer, &inner) {
                Ok(composed) => {
                    if composed.validate().result().is_none() {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
        reports.push(SuiteReport {
            name: "presentation composition on sampled towers",
            cases,
            failures,
        });
    }

    reports
}
