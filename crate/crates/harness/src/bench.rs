//! Latency of the coupled allocator with and without the template cache.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use tiltalloc::aero::AircraftConfig;
use tiltalloc::alloc::{AllocOptions, AllocResult, Allocator, SolvePath};
use tiltalloc::zerodim::TemplateCache;
use tiltalloc::AllocError;

use crate::campaign::CampaignSpec;
use crate::stats::Summary;
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub warm_iters: usize,
    pub cold_iters: usize,
    /// Leading warm iterations left out of the statistics.
    pub warmup: usize,
    pub seed: u64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            warm_iters: 200,
            cold_iters: 5,
            warmup: 10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub path: SolvePath,
    pub iteration: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub cold: Summary,
    pub warm: Summary,
    /// Warm iterations that fell back to a full basis computation.
    pub warm_fallbacks: usize,
    /// Timed requests without an admissible command.
    pub infeasible: usize,
    #[serde(skip)]
    pub timings: Vec<Timing>,
}

impl BenchReport {
    pub fn warm_faster(&self) -> bool {
        self.warm.median < self.cold.median
    }
}

/// Times `allocate_coupled` on envelope requests: cold iterations compute the
/// basis from scratch, warm iterations replay a cached template. Only the
/// allocation call is timed. Requests without an admissible command are timed
/// and counted; other errors abort.
pub fn run_bench(cfg: &AircraftConfig<f64>, spec: &BenchSpec) -> Result<BenchReport, HarnessError> {
    if spec.warm_iters == 0 && spec.cold_iters == 0 {
        return Err(HarnessError::Invalid("nothing to time".into()));
    }
    let requests = CampaignSpec::reference_envelope(
        spec.warm_iters.max(spec.cold_iters) + spec.warmup,
        spec.seed,
    );
    let alloc = Allocator::with_options(
        *cfg,
        AllocOptions::default(),
        Arc::new(TemplateCache::new()),
    );
    let mut timings = Vec::new();
    let mut infeasible = 0;
    for i in 0..spec.cold_iters {
        let req = requests.request(i)?;
        let t = Instant::now();
        let r = alloc.allocate_coupled_cold(&req);
        let seconds = t.elapsed().as_secs_f64();
        if feasible(r)?.is_none() {
            infeasible += 1;
        }
        timings.push(Timing {
            path: SolvePath::Cold,
            iteration: i,
            seconds,
        });
    }
    let mut fallbacks = 0;
    for i in 0..spec.warm_iters + spec.warmup {
        let req = requests.request(i)?;
        let t = Instant::now();
        let r = alloc.allocate_coupled(&req);
        let seconds = t.elapsed().as_secs_f64();
        let r = feasible(r)?;
        if i >= spec.warmup {
            match r {
                Some(r) if r.path != SolvePath::Warm => fallbacks += 1,
                None => infeasible += 1,
                _ => {}
            }
            timings.push(Timing {
                path: SolvePath::Warm,
                iteration: i - spec.warmup,
                seconds,
            });
        }
    }
    let of = |p: SolvePath| Summary::of(timings.iter().filter(|t| t.path == p).map(|t| t.seconds));
    Ok(BenchReport {
        cold: of(SolvePath::Cold),
        warm: of(SolvePath::Warm),
        warm_fallbacks: fallbacks,
        infeasible,
        timings,
    })
}

fn feasible(r: Result<AllocResult, AllocError>) -> Result<Option<AllocResult>, HarnessError> {
    match r {
        Ok(r) => Ok(Some(r)),
        Err(AllocError::NoFeasibleSolution { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn write_csv<W: Write>(timings: &[Timing], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path", "iteration", "seconds"])?;
    for t in timings {
        w.write_record([
            t.path.as_str().to_string(),
            t.iteration.to_string(),
            t.seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_iteration() {
        let spec = BenchSpec {
            warm_iters: 1,
            cold_iters: 1,
            warmup: 0,
            seed: 1,
        };
        let r = run_bench(&AircraftConfig::reference(), &spec).unwrap();
        assert_eq!(r.timings.len(), 2);
        assert!(r.timings.iter().all(|t| t.seconds > 0.0));
    }
}
