//! Thread-pool evaluation. Results are gathered in input order and reduced
//! sequentially, so output does not depend on the thread count.

use rayon::prelude::*;

use qda_core::fitting::{fit_curve, pick_best, FitOptions, OmegaSelection};
use qda_core::{evaluate_case_with, CaseEvaluation, DisplacementField, HistogramDistribution, OmegaSearch, PipelineConfig};

/// Grid search that fits candidate ω values in parallel.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParallelGrid;

impl OmegaSearch for ParallelGrid {
    fn search(&self, hist: &HistogramDistribution, omegas: &[f64], opts: &FitOptions) -> qda_core::Result<OmegaSelection> {
        let fits: Vec<_> = omegas.par_iter().map(|&w| fit_curve(hist, w, opts)).collect();
        pick_best(fits)
    }
}

pub fn thread_pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// Evaluates every field, keeping input order.
pub fn evaluate_cases(
    fields: &[DisplacementField],
    config: &PipelineConfig,
    threads: usize,
) -> Vec<qda_core::Result<CaseEvaluation>> {
    thread_pool(threads).install(|| {
        fields
            .par_iter()
            .map(|f| evaluate_case_with(f, config, &ParallelGrid))
            .collect()
    })
}
