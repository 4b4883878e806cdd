//! Machine-readable run reports: one self-describing JSON document per run,
//! with timing fields in integer milliseconds.

use serde::{Deserialize, Serialize};

use crate::engine::{ReductResult, ReductionConfig, SignificanceKind, SignificanceReport};
use crate::granule::GranularityRepresentation;
use crate::measures::Metric;
use crate::table::DecisionTable;

/// An attribute identified both ways: stable index and display name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeRef {
    pub index: usize,
    pub name: String,
}

pub fn attribute_ref(table: &DecisionTable, index: usize) -> AttributeRef {
    AttributeRef {
        index,
        name: table.condition_attr(index).name().to_string(),
    }
}

pub fn attribute_refs(table: &DecisionTable, indices: impl IntoIterator<Item = usize>) -> Vec<AttributeRef> {
    indices.into_iter().map(|i| attribute_ref(table, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub source: String,
    pub n_objects: usize,
    pub n_condition_attrs: usize,
    pub decision_cardinality: usize,
    /// Granule count of the full representation G^(C∪D).
    pub granule_count: usize,
    /// Rows removed by the missing-value policy during parsing.
    pub dropped_rows: usize,
}

impl DatasetSummary {
    pub fn new(
        source: &str,
        table: &DecisionTable,
        g_full: &GranularityRepresentation,
        dropped_rows: usize,
    ) -> Self {
        DatasetSummary {
            source: source.to_string(),
            n_objects: table.n_objects(),
            n_condition_attrs: table.n_condition_attrs(),
            decision_cardinality: table.decision_cardinality(),
            granule_count: g_full.len(),
            dropped_rows,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub metric: Metric,
    pub epsilon: f64,
    pub stop_tolerance: f64,
    pub model_parallelism: usize,
    pub data_chunks: usize,
}

impl From<&ReductionConfig> for ConfigEcho {
    fn from(cfg: &ReductionConfig) -> Self {
        ConfigEcho {
            metric: cfg.metric,
            epsilon: cfg.epsilon,
            stop_tolerance: cfg.stop_tolerance,
            model_parallelism: cfg.model_parallelism_level.get(),
            data_chunks: cfg.data_chunks.get(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub candidate_count: usize,
    pub chosen: AttributeRef,
    pub theta: f64,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub core: Vec<AttributeRef>,
    pub reduct: Vec<AttributeRef>,
    pub theta_full: f64,
    pub theta_core: f64,
    pub theta_final: f64,
    pub iterations: Vec<IterationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ReductionSummary {
    pub fn new(table: &DecisionTable, result: &ReductResult) -> Self {
        ReductionSummary {
            core: attribute_refs(table, result.core.iter()),
            reduct: attribute_refs(table, result.reduct.iter().copied()),
            theta_full: result.theta_full,
            theta_core: result.theta_core,
            theta_final: result.theta_final(),
            iterations: result
                .iterations
                .iter()
                .map(|it| IterationReport {
                    candidate_count: it.candidate_count,
                    chosen: attribute_ref(table, it.chosen),
                    theta: it.theta,
                    wall_ms: it.wall.as_millis() as u64,
                })
                .collect(),
            warnings: result.warnings.clone(),
        }
    }
}

/// Document emitted by a full reduction run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dataset: DatasetSummary,
    pub config: ConfigEcho,
    pub result: ReductionSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySummary>,
    pub total_wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceEntry {
    pub attribute: AttributeRef,
    pub theta_probed: f64,
    pub significance: f64,
    pub kind: String,
}

/// Document emitted by the core stage alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreReport {
    pub dataset: DatasetSummary,
    pub config: ConfigEcho,
    pub theta_full: f64,
    pub core: Vec<AttributeRef>,
    pub significances: Vec<SignificanceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySummary>,
    pub total_wall_ms: u64,
}

/// Outcome of the `--verify` cross-check against the object-level oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub checks: usize,
    pub max_abs_diff: f64,
    pub tolerance: f64,
}

pub fn significance_entries(table: &DecisionTable, report: &SignificanceReport) -> Vec<SignificanceEntry> {
    report
        .records
        .iter()
        .map(|r| SignificanceEntry {
            attribute: attribute_ref(table, r.attribute),
            theta_probed: r.theta_probed,
            significance: r.significance,
            kind: match r.kind {
                SignificanceKind::Inner => "inner".to_string(),
                SignificanceKind::Outer => "outer".to_string(),
            },
        })
        .collect()
}

/// Document emitted by a single subset evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluateReport {
    pub dataset: DatasetSummary,
    pub metric: Metric,
    pub subset: Vec<AttributeRef>,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<EvaluateVerify>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluateVerify {
    pub direct_theta: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
}

/// One grid cell of a benchmark run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub model_parallelism: usize,
    pub data_chunks: usize,
    pub iteration_ms: Vec<u64>,
    pub total_ms: u64,
    /// Total time at level 1 (same chunk count) divided by this row's total.
    pub speedup_vs_level1: f64,
    pub reduct: Vec<AttributeRef>,
}

/// Document emitted by a benchmark sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: DatasetSummary,
    pub metric: Metric,
    pub epsilon: f64,
    pub stop_tolerance: f64,
    pub skip_core: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    pub repeats: usize,
    pub rows: Vec<BenchRow>,
}
