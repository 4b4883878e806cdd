//! The four attribute-significance measures and their definitional oracles.
//!
//! Every measure is a function Θ(D|B) of a condition partition against the
//! decision partition, decomposable into a per-class term θ so that
//! Θ(D|B) = Σᵢ θ(Eᵢ). Lower is better for all four:
//!
//! * positive region: θ = −|Eᵢ|·sgn(Eᵢ)/|U|, sgn = 1 iff Eᵢ is decision-pure,
//!   so Θ = −|POS_B(D)|/|U|;
//! * Shannon conditional entropy: θ = −(1/|U|) Σⱼ |Dᵢⱼ| log₂(|Dᵢⱼ|/|Eᵢ|);
//! * Liang conditional entropy: θ = Σⱼ |Dᵢⱼ|(|Eᵢ|−|Dᵢⱼ|)/|U|²;
//! * combination conditional entropy:
//!   θ = (|Eᵢ|²(|Eᵢ|−1) − Σⱼ |Dᵢⱼ|²(|Dᵢⱼ|−1)) / (|U|²(|U|−1)).
//!
//! `direct_*` functions recompute the same quantities from object-level
//! partitions of the raw table, independently of the granularity pipeline;
//! they are the verification oracles and the reference path for the
//! sequential baseline reducer.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::granule::ConditionGroup;
use crate::table::{AttributeSubset, DecisionTable};

/// Which significance measure drives an evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "pr")]
    PositiveRegion,
    #[serde(rename = "sce")]
    ShannonEntropy,
    #[serde(rename = "lce")]
    LiangEntropy,
    #[serde(rename = "cce")]
    CombinationEntropy,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::PositiveRegion,
        Metric::ShannonEntropy,
        Metric::LiangEntropy,
        Metric::CombinationEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::PositiveRegion => "pr",
            Metric::ShannonEntropy => "sce",
            Metric::LiangEntropy => "lce",
            Metric::CombinationEntropy => "cce",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pr" => Ok(Metric::PositiveRegion),
            "sce" => Ok(Metric::ShannonEntropy),
            "lce" => Ok(Metric::LiangEntropy),
            "cce" => Ok(Metric::CombinationEntropy),
            other => Err(Error::domain(format!(
                "unknown metric {other:?}; expected one of pr, sce, lce, cce"
            ))),
        }
    }
}

pub(crate) fn validate_universe(metric: Metric, universe_size: u64) -> Result<()> {
    if universe_size == 0 {
        return Err(Error::domain("universe size must be positive"));
    }
    if metric == Metric::CombinationEntropy && universe_size < 2 {
        return Err(Error::domain(
            "combination conditional entropy is undefined on a single-object universe",
        ));
    }
    Ok(())
}

/// Per-class sub-evaluation θ for a condition group; summing over all groups
/// of `U/B` yields Θ(D|B).
pub fn group_term(metric: Metric, group: &ConditionGroup, universe_size: u64) -> Result<f64> {
    validate_universe(metric, universe_size)?;
    Ok(group_term_counts(
        metric,
        group.decision_counts().iter().map(|&(_, c)| c),
        universe_size,
    ))
}

/// θ computed straight from a class's decision counts (the labels carried by
/// a [`ConditionGroup`] never enter the formulas). Universe precondition must
/// already hold.
pub(crate) fn group_term_counts<I>(metric: Metric, decision_counts: I, universe_size: u64) -> f64
where
    I: Iterator<Item = u64> + Clone,
{
    let u = universe_size as f64;
    let size: u64 = decision_counts.clone().sum();
    let size = size as f64;
    match metric {
        Metric::PositiveRegion => {
            let consistent = decision_counts.clone().take(2).count() == 1;
            if consistent {
                -size / u
            } else {
                0.0
            }
        }
        Metric::ShannonEntropy => {
            let mut acc = 0.0;
            for c in decision_counts {
                let c = c as f64;
                acc += c * (c / size).log2();
            }
            -acc / u
        }
        Metric::LiangEntropy => {
            let mut acc = 0.0;
            for c in decision_counts {
                let c = c as f64;
                acc += c * (size - c);
            }
            acc / (u * u)
        }
        Metric::CombinationEntropy => {
            let mut impure = 0.0;
            for c in decision_counts {
                let c = c as f64;
                impure += c * c * (c - 1.0);
            }
            (size * size * (size - 1.0) - impure) / (u * u * (u - 1.0))
        }
    }
}

/// Object-level partition of the universe by a condition subset. Classes are
/// ordered by their projected key; member ids ascend within a class.
fn partition_objects(table: &DecisionTable, subset: &AttributeSubset) -> Vec<Vec<usize>> {
    let n = table.n_objects();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        subset
            .iter()
            .map(|attr| table.value(a, attr))
            .cmp(subset.iter().map(|attr| table.value(b, attr)))
            .then(a.cmp(&b))
    });

    let mut classes = Vec::new();
    let mut start = 0;
    while start < n {
        let anchor = order[start];
        let mut end = start + 1;
        while end < n
            && subset
                .iter()
                .all(|attr| table.value(order[end], attr) == table.value(anchor, attr))
        {
            end += 1;
        }
        classes.push(order[start..end].to_vec());
        start = end;
    }
    classes
}

/// Union of the decision-pure condition classes, computed by object-level
/// partitioning. Returns sorted object indices.
pub fn direct_positive_region(table: &DecisionTable, subset: &AttributeSubset) -> Vec<usize> {
    let mut region = Vec::new();
    for class in partition_objects(table, subset) {
        let first = table.decision_value(class[0]);
        if class.iter().all(|&obj| table.decision_value(obj) == first) {
            region.extend(class);
        }
    }
    region.sort_unstable();
    region
}

/// Θ(D|B) evaluated from the original definitional formulas over object-level
/// partitions `U/B` and `U/D`, with no use of the granularity representation.
pub fn direct_evaluate(table: &DecisionTable, subset: &AttributeSubset, metric: Metric) -> Result<f64> {
    let universe = table.n_objects() as u64;
    validate_universe(metric, universe)?;
    let u = universe as f64;
    let m = table.decision_cardinality();
    let classes = partition_objects(table, subset);

    let value = match metric {
        Metric::PositiveRegion => -(direct_positive_region(table, subset).len() as f64) / u,
        Metric::ShannonEntropy => {
            let mut total = 0.0;
            let mut tally = vec![0u64; m];
            for class in &classes {
                tally.iter_mut().for_each(|c| *c = 0);
                for &obj in class {
                    tally[table.decision_value(obj) as usize] += 1;
                }
                let e = class.len() as f64;
                let mut h = 0.0;
                for &c in &tally {
                    if c > 0 {
                        let p = c as f64 / e;
                        h += p * p.log2();
                    }
                }
                total += -(e / u) * h;
            }
            total
        }
        Metric::LiangEntropy => {
            // |D_j^c \ E_i^c| is taken literally as the set difference
            // E_i − D_j, counted by membership tests against D_j.
            let mut total = 0.0;
            for class in &classes {
                for j in 0..m as u32 {
                    let in_dj = class.iter().filter(|&&obj| table.decision_value(obj) == j).count();
                    let not_in_dj = class.iter().filter(|&&obj| table.decision_value(obj) != j).count();
                    total += (in_dj as f64 / u) * (not_in_dj as f64 / u);
                }
            }
            total
        }
        Metric::CombinationEntropy => {
            let pairs = |x: f64| x * (x - 1.0) / 2.0;
            let universe_pairs = pairs(u);
            let mut total = 0.0;
            let mut tally = vec![0u64; m];
            for class in &classes {
                tally.iter_mut().for_each(|c| *c = 0);
                for &obj in class {
                    tally[table.decision_value(obj) as usize] += 1;
                }
                let e = class.len() as f64;
                let mut term = (e / u) * (pairs(e) / universe_pairs);
                for &c in &tally {
                    let c = c as f64;
                    term -= (c / u) * (pairs(c) / universe_pairs);
                }
                total += term;
            }
            total
        }
    };
    Ok(value)
}

/// All 2^|C| condition subsets of a table; test helper for exhaustive checks.
pub fn all_subsets(n_attrs: usize) -> Vec<AttributeSubset> {
    assert!(n_attrs < usize::BITS as usize);
    (0..1usize << n_attrs)
        .map(|mask| AttributeSubset::new((0..n_attrs).filter(|a| mask & (1 << a) != 0)))
        .collect()
}

/// Decision histogram per condition class, object-level; exposed for tests
/// that need the multiset view without the granularity pipeline.
pub fn direct_condition_histograms(
    table: &DecisionTable,
    subset: &AttributeSubset,
) -> Vec<(Vec<u32>, HashMap<u32, u64>)> {
    partition_objects(table, subset)
        .into_iter()
        .map(|class| {
            let key = table.project_row(class[0], subset, false);
            let mut hist = HashMap::new();
            for obj in class {
                *hist.entry(table.decision_value(obj)).or_insert(0) += 1;
            }
            (key, hist)
        })
        .collect()
}
