//! Subset evaluation, attribute core, and forward selection.
//!
//! The reducer works on a cached full granularity representation G^(C∪D):
//! every candidate evaluation coarsens it to B∪D, groups by condition key,
//! and folds the per-group terms in a fixed chunk order. Candidate
//! evaluations within one round are independent read-only jobs executed
//! through the bounded pool; the selection step is a sequential barrier.
//!
//! A sequential baseline reducer with identical selection semantics, driven
//! entirely by object-level partitions of the raw table, serves as the
//! end-to-end oracle for the granularity path.

use std::num::NonZeroUsize;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::granule::GranularityRepresentation;
use crate::measures::{self, Metric};
use crate::parallel::{bounded_map, chunked_fold, ChunkPlan};
use crate::table::{AttributeSubset, DecisionTable};

/// Candidates whose evaluation is within this distance of the round minimum
/// are treated as tied; the lowest attribute index wins. Also guards the
/// core-membership comparison, so that evaluations that are equal in exact
/// arithmetic but differ by rounding never flip a strict inequality.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Reduction parameters.
#[derive(Clone, Debug)]
pub struct ReductionConfig {
    pub metric: Metric,
    /// Core threshold: an attribute enters the core when its inner
    /// significance exceeds `epsilon` (plus [`TIE_TOLERANCE`]).
    pub epsilon: f64,
    /// Absolute stopping tolerance on Θ: selection stops once
    /// Θ(D|R) ≤ Θ(D|C) + stop_tolerance.
    pub stop_tolerance: f64,
    /// Maximum number of candidate evaluations in flight.
    pub model_parallelism_level: NonZeroUsize,
    /// Number of contiguous chunks in the per-evaluation fold.
    pub data_chunks: NonZeroUsize,
    /// Optional cap on selection iterations; `None` runs to the stopping
    /// criterion. Used by benchmarking to time a fixed iteration prefix.
    pub max_iterations: Option<usize>,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        let cores = std::thread::available_parallelism().unwrap_or(NonZeroUsize::MIN);
        ReductionConfig {
            metric: Metric::PositiveRegion,
            epsilon: 0.0,
            stop_tolerance: 1e-10,
            model_parallelism_level: cores,
            data_chunks: cores,
            max_iterations: None,
        }
    }
}

/// Probe direction of a significance record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignificanceKind {
    /// Θ(D|B∖{a}) − Θ(D|B) for a ∈ B.
    Inner,
    /// Θ(D|B) − Θ(D|B∪{a}) for a ∉ B.
    Outer,
}

/// One probed attribute: the evaluation of the probed subset and the
/// significance it implies against the baseline.
#[derive(Clone, Debug)]
pub struct SignificanceRecord {
    pub attribute: usize,
    /// Θ(D|B′) where B′ is the probed subset (B∖{a} or B∪{a}).
    pub theta_probed: f64,
    pub significance: f64,
    pub kind: SignificanceKind,
}

/// Per-attribute significances against a common baseline subset.
#[derive(Clone, Debug)]
pub struct SignificanceReport {
    /// Θ(D|B) of the baseline subset the probes are measured against.
    pub baseline_theta: f64,
    pub records: Vec<SignificanceRecord>,
}

/// One forward-selection round.
#[derive(Clone, Debug)]
pub struct IterationRecord {
    pub candidate_count: usize,
    pub chosen: usize,
    /// Θ(D|R) after appending the chosen attribute.
    pub theta: f64,
    pub wall: Duration,
}

/// Outcome of a reduction run.
#[derive(Clone, Debug)]
pub struct ReductResult {
    /// The subset selection started from (the attribute core, unless the
    /// core stage was skipped).
    pub core: AttributeSubset,
    /// Selected attributes: core first (ascending), then picks in order.
    pub reduct: Vec<usize>,
    /// Θ(D|C).
    pub theta_full: f64,
    /// Θ(D|R) at the start of the iterative stage.
    pub theta_core: f64,
    pub iterations: Vec<IterationRecord>,
    pub warnings: Vec<String>,
}

impl ReductResult {
    pub fn reduct_subset(&self) -> AttributeSubset {
        AttributeSubset::new(self.reduct.iter().copied())
    }

    /// Θ(D|R) at termination.
    pub fn theta_final(&self) -> f64 {
        self.iterations.last().map_or(self.theta_core, |it| it.theta)
    }
}

fn job_error(e: crate::parallel::TaskError<Error>) -> Error {
    Error::Job {
        index: e.index,
        source: Box::new(e.source),
    }
}

/// Θ(D|B): coarsens the cached G^(C∪D) onto B∪D, groups by condition key,
/// and folds the per-group terms over `data_chunks` contiguous chunks in
/// chunk-index order. The coarsen/group steps run fused, reducing each class
/// to its decision-count slice without materializing intermediate keys.
pub fn evaluate(
    g_full: &GranularityRepresentation,
    subset: &AttributeSubset,
    metric: Metric,
    data_chunks: NonZeroUsize,
) -> Result<f64> {
    let universe = g_full.universe_size();
    measures::validate_universe(metric, universe)?;
    let grouped = g_full.grouped_counts(subset)?;
    let plan = ChunkPlan::new(grouped.len(), data_chunks);
    chunked_fold(grouped.runs(), &plan, |&run| {
        measures::group_term_counts(metric, grouped.class_counts(run).iter().copied(), universe)
    })
}

/// Θ(D|B∖{a}) − Θ(D|B): how much the evaluation degrades when `attr` is
/// removed. Requires `attr ∈ subset`.
pub fn inner_significance(
    g_full: &GranularityRepresentation,
    subset: &AttributeSubset,
    attr: usize,
    metric: Metric,
) -> Result<f64> {
    if !subset.contains(attr) {
        return Err(Error::domain(format!(
            "inner significance requires attribute {attr} to be in the subset {subset}"
        )));
    }
    let chunks = NonZeroUsize::MIN;
    let with = evaluate(g_full, subset, metric, chunks)?;
    let without = evaluate(g_full, &subset.without(attr), metric, chunks)?;
    Ok(without - with)
}

/// Θ(D|B) − Θ(D|B∪{a}): how much the evaluation improves when `attr` is
/// added. Requires `attr ∉ subset`.
pub fn outer_significance(
    g_full: &GranularityRepresentation,
    subset: &AttributeSubset,
    attr: usize,
    metric: Metric,
) -> Result<f64> {
    if subset.contains(attr) {
        return Err(Error::domain(format!(
            "outer significance requires attribute {attr} to be outside the subset {subset}"
        )));
    }
    let chunks = NonZeroUsize::MIN;
    let with = evaluate(g_full, &subset.with(attr), metric, chunks)?;
    let without = evaluate(g_full, subset, metric, chunks)?;
    Ok(without - with)
}

/// Evaluates `{C} ∪ {C∖{a} : a ∈ C}` (concurrently, up to the configured
/// level) and keeps the attributes whose inner significance exceeds
/// `cfg.epsilon`.
pub fn compute_core(
    g_full: &GranularityRepresentation,
    cfg: &ReductionConfig,
) -> Result<(AttributeSubset, SignificanceReport)> {
    let full = g_full.attrs().clone();
    let mut candidates: Vec<AttributeSubset> = Vec::with_capacity(full.len() + 1);
    candidates.push(full.clone());
    candidates.extend(full.iter().map(|a| full.without(a)));

    let thetas = bounded_map(&candidates, cfg.model_parallelism_level, |subset| {
        evaluate(g_full, subset, cfg.metric, cfg.data_chunks)
    })
    .map_err(job_error)?;

    let theta_full = thetas[0];
    let mut core = Vec::new();
    let mut records = Vec::with_capacity(full.len());
    for (i, attr) in full.iter().enumerate() {
        let theta_probed = thetas[i + 1];
        let significance = theta_probed - theta_full;
        if significance > cfg.epsilon + TIE_TOLERANCE {
            core.push(attr);
        }
        records.push(SignificanceRecord {
            attribute: attr,
            theta_probed,
            significance,
            kind: SignificanceKind::Inner,
        });
    }

    Ok((
        AttributeSubset::new(core),
        SignificanceReport {
            baseline_theta: theta_full,
            records,
        },
    ))
}

/// Lowest-index candidate within [`TIE_TOLERANCE`] of the minimum.
fn pick_argmin(thetas: &[f64]) -> usize {
    let min = thetas.iter().copied().fold(f64::INFINITY, f64::min);
    thetas
        .iter()
        .position(|&t| t <= min + TIE_TOLERANCE)
        .expect("candidate list is non-empty")
}

fn iterate(
    g_full: &GranularityRepresentation,
    initial: AttributeSubset,
    theta_full: f64,
    cfg: &ReductionConfig,
) -> Result<ReductResult> {
    let full = g_full.attrs().clone();
    let mut selected = initial.clone();
    let mut reduct: Vec<usize> = selected.indices().to_vec();
    let mut theta_current = evaluate(g_full, &selected, cfg.metric, cfg.data_chunks)?;
    let theta_core = theta_current;
    let mut iterations = Vec::new();
    let mut warnings = Vec::new();

    while theta_current > theta_full + cfg.stop_tolerance && selected.len() < full.len() {
        if cfg.max_iterations.is_some_and(|max| iterations.len() >= max) {
            warnings.push(format!(
                "iteration cap {} reached before the stopping criterion",
                iterations.len()
            ));
            break;
        }
        let started = Instant::now();
        let candidates: Vec<usize> = full.iter().filter(|a| !selected.contains(*a)).collect();
        let thetas = bounded_map(&candidates, cfg.model_parallelism_level, |&attr| {
            evaluate(g_full, &selected.with(attr), cfg.metric, cfg.data_chunks)
        })
        .map_err(job_error)?;

        let pick = pick_argmin(&thetas);
        let chosen = candidates[pick];
        selected = selected.with(chosen);
        reduct.push(chosen);
        theta_current = thetas[pick];
        iterations.push(IterationRecord {
            candidate_count: candidates.len(),
            chosen,
            theta: theta_current,
            wall: started.elapsed(),
        });
    }

    if theta_current > theta_full + cfg.stop_tolerance && selected.len() == full.len() {
        warnings.push(
            "all attributes selected without reaching the full-set evaluation value".to_string(),
        );
    }

    Ok(ReductResult {
        core: initial,
        reduct,
        theta_full,
        theta_core,
        iterations,
        warnings,
    })
}

/// Forward selection on the granularity representation: seeds the reduct
/// with the attribute core, then repeatedly evaluates Θ(D|R∪{a}) for every
/// remaining attribute (model-parallel) and appends the argmin, until
/// Θ(D|R) reaches Θ(D|C) within the stopping tolerance.
pub fn reduce(g_full: &GranularityRepresentation, cfg: &ReductionConfig) -> Result<ReductResult> {
    let (core, report) = compute_core(g_full, cfg)?;
    iterate(g_full, core, report.baseline_theta, cfg)
}

/// The iterative stage alone, started from an arbitrary subset instead of
/// the computed core.
pub fn reduce_from(
    g_full: &GranularityRepresentation,
    initial: AttributeSubset,
    cfg: &ReductionConfig,
) -> Result<ReductResult> {
    if !initial.is_subset_of(g_full.attrs()) {
        return Err(Error::domain(
            "initial subset names attributes outside the representation",
        ));
    }
    let theta_full = evaluate(g_full, g_full.attrs(), cfg.metric, cfg.data_chunks)?;
    iterate(g_full, initial, theta_full, cfg)
}

/// Sequential baseline with identical selection semantics, computed from
/// object-level partitions of the raw table (no granularity representation,
/// no concurrency). The end-to-end oracle for [`reduce`].
pub fn reduce_baseline(table: &DecisionTable, cfg: &ReductionConfig) -> Result<ReductResult> {
    let full = AttributeSubset::full(table.n_condition_attrs());
    let theta_full = measures::direct_evaluate(table, &full, cfg.metric)?;

    let mut core = Vec::new();
    for attr in full.iter() {
        let probed = measures::direct_evaluate(table, &full.without(attr), cfg.metric)?;
        if probed - theta_full > cfg.epsilon + TIE_TOLERANCE {
            core.push(attr);
        }
    }
    let core = AttributeSubset::new(core);

    let mut selected = core.clone();
    let mut reduct: Vec<usize> = selected.indices().to_vec();
    let mut theta_current = measures::direct_evaluate(table, &selected, cfg.metric)?;
    let theta_core = theta_current;
    let mut iterations = Vec::new();
    let mut warnings = Vec::new();

    while theta_current > theta_full + cfg.stop_tolerance && selected.len() < full.len() {
        if cfg.max_iterations.is_some_and(|max| iterations.len() >= max) {
            warnings.push(format!(
                "iteration cap {} reached before the stopping criterion",
                iterations.len()
            ));
            break;
        }
        let started = Instant::now();
        let candidates: Vec<usize> = full.iter().filter(|a| !selected.contains(*a)).collect();
        let mut thetas = Vec::with_capacity(candidates.len());
        for &attr in &candidates {
            thetas.push(measures::direct_evaluate(table, &selected.with(attr), cfg.metric)?);
        }

        let pick = pick_argmin(&thetas);
        let chosen = candidates[pick];
        selected = selected.with(chosen);
        reduct.push(chosen);
        theta_current = thetas[pick];
        iterations.push(IterationRecord {
            candidate_count: candidates.len(),
            chosen,
            theta: theta_current,
            wall: started.elapsed(),
        });
    }

    if theta_current > theta_full + cfg.stop_tolerance && selected.len() == full.len() {
        warnings.push(
            "all attributes selected without reaching the full-set evaluation value".to_string(),
        );
    }

    Ok(ReductResult {
        core,
        reduct,
        theta_full,
        theta_core,
        iterations,
        warnings,
    })
}
