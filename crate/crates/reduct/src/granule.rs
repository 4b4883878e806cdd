//! Granularity representations: the compressed form every evaluation runs on.
//!
//! A representation over an attribute set `A` stores one granule per distinct
//! feature vector over `A`, together with the number of objects carrying that
//! vector. Coarsening projects keys onto a smaller attribute set and merges
//! counts; refining re-partitions classes using the underlying table. Storage
//! is proportional to the number of distinct vectors, never the number of
//! objects.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::table::{AttributeSubset, DecisionTable};

/// A compressed partition: distinct keys with multiplicities.
///
/// Keys are stored flattened and sorted lexicographically, which fixes a
/// deterministic iteration order for all downstream folds. Immutable after
/// construction and safely shareable by concurrent readers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GranularityRepresentation {
    attrs: AttributeSubset,
    includes_decision: bool,
    key_width: usize,
    keys: Vec<u32>,
    counts: Vec<u64>,
    universe_size: u64,
    /// Exclusive upper bound of the value ids at each key position; lets
    /// narrow keys be packed into single words for sorting.
    value_bounds: Vec<u32>,
}

/// One condition equivalence class together with its decision histogram.
///
/// `decision_counts` holds `(decision value id, count)` pairs sorted by id;
/// zero-count decisions are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionGroup {
    key: Vec<u32>,
    decision_counts: Vec<(u32, u64)>,
    size: u64,
}

/// Condition classes reduced to their decision-count slices: the minimal
/// view the evaluation functions need, one contiguous run per class.
pub(crate) struct GroupedCounts {
    counts: Vec<u64>,
    /// `(start, len)` of each class's slice in `counts`, in key order.
    runs: Vec<(usize, usize)>,
}

impl GroupedCounts {
    pub(crate) fn len(&self) -> usize {
        self.runs.len()
    }

    pub(crate) fn runs(&self) -> &[(usize, usize)] {
        &self.runs
    }

    pub(crate) fn class_counts(&self, run: (usize, usize)) -> &[u64] {
        &self.counts[run.0..run.0 + run.1]
    }
}

impl ConditionGroup {
    /// Builds a group, validating that it is non-empty with positive counts.
    pub fn new(key: Vec<u32>, decision_counts: Vec<(u32, u64)>) -> Result<Self> {
        if decision_counts.is_empty() {
            return Err(Error::domain("condition group needs at least one decision entry"));
        }
        if decision_counts.iter().any(|&(_, c)| c == 0) {
            return Err(Error::domain("condition group counts must be positive"));
        }
        let size = decision_counts.iter().map(|&(_, c)| c).sum();
        Ok(ConditionGroup {
            key,
            decision_counts,
            size,
        })
    }

    /// The condition key (value ids over `B` in ascending attribute order).
    pub fn key(&self) -> &[u32] {
        &self.key
    }

    pub fn decision_counts(&self) -> &[(u32, u64)] {
        &self.decision_counts
    }

    /// `|E_i|`: total objects in the class.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// True when every object in the class shares one decision value.
    pub fn is_consistent(&self) -> bool {
        self.decision_counts.len() == 1
    }
}

/// Bits needed to hold values in `0..bound`.
fn bits_for(bound: u32) -> u32 {
    if bound <= 1 {
        0
    } else {
        32 - (bound - 1).leading_zeros()
    }
}

/// Comparison sort beats the radix passes below this size.
const RADIX_THRESHOLD: usize = 1 << 13;

/// Stable LSB radix sort of `(packed key, count)` pairs over the low
/// `total_bits` of the key, 8 bits per pass.
fn sort_packed_pairs(mut pairs: Vec<(u64, u64)>, total_bits: u32) -> Vec<(u64, u64)> {
    if pairs.len() < RADIX_THRESHOLD || total_bits == 0 {
        pairs.sort_unstable_by_key(|&(word, _)| word);
        return pairs;
    }
    let mut buf = vec![(0u64, 0u64); pairs.len()];
    for pass in 0..total_bits.div_ceil(8) {
        let shift = pass * 8;
        let mut offsets = [0usize; 257];
        for &(word, _) in &pairs {
            offsets[((word >> shift) & 0xFF) as usize + 1] += 1;
        }
        for i in 0..256 {
            offsets[i + 1] += offsets[i];
        }
        for &(word, count) in &pairs {
            let bucket = ((word >> shift) & 0xFF) as usize;
            buf[offsets[bucket]] = (word, count);
            offsets[bucket] += 1;
        }
        std::mem::swap(&mut pairs, &mut buf);
    }
    pairs
}

impl GranularityRepresentation {
    fn from_sorted_parts(
        attrs: AttributeSubset,
        includes_decision: bool,
        key_width: usize,
        keys: Vec<u32>,
        counts: Vec<u64>,
        universe_size: u64,
        value_bounds: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(keys.len(), counts.len() * key_width);
        debug_assert_eq!(value_bounds.len(), key_width);
        debug_assert_eq!(counts.iter().sum::<u64>(), universe_size);
        debug_assert!(counts.len() as u64 <= universe_size);
        GranularityRepresentation {
            attrs,
            includes_decision,
            key_width,
            keys,
            counts,
            universe_size,
            value_bounds,
        }
    }

    /// Condition attributes the keys range over.
    pub fn attrs(&self) -> &AttributeSubset {
        &self.attrs
    }

    pub fn includes_decision(&self) -> bool {
        self.includes_decision
    }

    /// Entries per key: `attrs().len() + 1` when the decision is included.
    pub fn key_width(&self) -> usize {
        self.key_width
    }

    /// Number of granules (distinct keys).
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    pub fn key(&self, i: usize) -> &[u32] {
        &self.keys[i * self.key_width..(i + 1) * self.key_width]
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn granules(&self) -> impl Iterator<Item = (&[u32], u64)> + '_ {
        (0..self.len()).map(|i| (self.key(i), self.count(i)))
    }

    /// Projects onto `attrs` (optionally keeping the decision) and merges the
    /// counts of all granules sharing a projected key.
    ///
    /// `attrs` must be a subset of this representation's attributes, and the
    /// decision flag may only be dropped, never added.
    pub fn coarsen(&self, attrs: &AttributeSubset, include_decision: bool) -> Result<Self> {
        let positions = self.projection_positions(attrs, include_decision)?;

        // Identity projection keeps the representation as-is.
        if attrs == &self.attrs && include_decision == self.includes_decision {
            return Ok(self.clone());
        }

        let n = self.len();
        let width = positions.len();
        let bounds: Vec<u32> = positions.iter().map(|&p| self.value_bounds[p]).collect();
        let field_bits: Vec<u32> = bounds.iter().map(|&b| bits_for(b)).collect();
        let total_bits: u32 = field_bits.iter().sum();

        let (keys, counts) = if total_bits <= u64::BITS {
            // Narrow keys pack into one word whose numeric order matches the
            // tuple's lexicographic order.
            let mut packed: Vec<(u64, u64)> = Vec::with_capacity(n);
            for i in 0..n {
                let key = self.key(i);
                let mut word = 0u64;
                for (&pos, &bits) in positions.iter().zip(&field_bits) {
                    word = (word << bits) | u64::from(key[pos]);
                }
                packed.push((word, self.counts[i]));
            }
            let packed = sort_packed_pairs(packed, total_bits);

            let mut keys = Vec::new();
            let mut counts: Vec<u64> = Vec::new();
            let mut last_word = 0u64;
            for (word, count) in packed {
                if counts.is_empty() || word != last_word {
                    let start = keys.len();
                    keys.resize(start + width, 0);
                    let mut rest = word;
                    // Fields unpack in reverse: the last position sits in the
                    // low bits. Field widths never exceed 32 bits.
                    for (slot, &bits) in keys[start..].iter_mut().zip(&field_bits).rev() {
                        *slot = (rest & ((1u64 << bits) - 1)) as u32;
                        rest >>= bits;
                    }
                    counts.push(count);
                    last_word = word;
                } else {
                    *counts.last_mut().expect("just checked non-empty") += count;
                }
            }
            (keys, counts)
        } else {
            let mut buf = vec![0u32; n * width];
            for i in 0..n {
                let key = self.key(i);
                let dst = &mut buf[i * width..(i + 1) * width];
                for (slot, &pos) in dst.iter_mut().zip(&positions) {
                    *slot = key[pos];
                }
            }

            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_unstable_by(|&a, &b| {
                let (a, b) = (a as usize, b as usize);
                buf[a * width..(a + 1) * width].cmp(&buf[b * width..(b + 1) * width])
            });

            let mut keys = Vec::new();
            let mut counts: Vec<u64> = Vec::new();
            for &i in &order {
                let i = i as usize;
                let key = &buf[i * width..(i + 1) * width];
                if counts.is_empty() || &keys[keys.len() - width..] != key {
                    keys.extend_from_slice(key);
                    counts.push(self.counts[i]);
                } else {
                    *counts.last_mut().expect("just checked non-empty") += self.counts[i];
                }
            }
            (keys, counts)
        };

        Ok(Self::from_sorted_parts(
            attrs.clone(),
            include_decision,
            width,
            keys,
            counts,
            self.universe_size,
            bounds,
        ))
    }

    /// Splits the key-sorted granules into condition classes by stripping the
    /// trailing decision entry, aggregating a decision histogram per class.
    pub fn group_by_condition(&self) -> Result<Vec<ConditionGroup>> {
        if !self.includes_decision {
            return Err(Error::domain(
                "grouping by condition requires the decision attribute in the representation",
            ));
        }
        let cond_width = self.key_width - 1;
        let mut groups: Vec<ConditionGroup> = Vec::new();
        for (key, count) in self.granules() {
            let cond = &key[..cond_width];
            let decision = key[cond_width];
            match groups.last_mut() {
                // Keys are sorted, so equal condition prefixes are adjacent
                // and decision ids arrive in increasing order.
                Some(last) if last.key() == cond => {
                    last.decision_counts.push((decision, count));
                    last.size += count;
                }
                _ => groups.push(ConditionGroup {
                    key: cond.to_vec(),
                    decision_counts: vec![(decision, count)],
                    size: count,
                }),
            }
        }
        Ok(groups)
    }

    /// Positions of `attrs` (plus the decision slot when requested) within
    /// this representation's keys.
    fn projection_positions(&self, attrs: &AttributeSubset, include_decision: bool) -> Result<Vec<usize>> {
        if include_decision && !self.includes_decision {
            return Err(Error::domain(
                "cannot include the decision attribute: source representation lacks it",
            ));
        }
        let mut positions = Vec::with_capacity(attrs.len() + usize::from(include_decision));
        for a in attrs.iter() {
            match self.attrs.indices().binary_search(&a) {
                Ok(pos) => positions.push(pos),
                Err(_) => {
                    return Err(Error::domain(format!(
                        "attribute {a} is not part of the source representation"
                    )))
                }
            }
        }
        if include_decision {
            positions.push(self.key_width - 1);
        }
        Ok(positions)
    }

    /// Condition classes of the projection onto `attrs ∪ D`, reduced to the
    /// per-class decision counts the evaluation functions consume. Equivalent
    /// to `coarsen(attrs, true)` followed by [`Self::group_by_condition`],
    /// without materializing either; classes come out in condition-key order.
    pub(crate) fn grouped_counts(&self, attrs: &AttributeSubset) -> Result<GroupedCounts> {
        let positions = self.projection_positions(attrs, true)?;
        let field_bits: Vec<u32> = positions.iter().map(|&p| bits_for(self.value_bounds[p])).collect();
        let total_bits: u32 = field_bits.iter().sum();

        if total_bits <= u64::BITS {
            let decision_bits = *field_bits.last().expect("decision field present");
            let n = self.len();
            let mut packed: Vec<(u64, u64)> = Vec::with_capacity(n);
            for i in 0..n {
                let key = self.key(i);
                let mut word = 0u64;
                for (&pos, &bits) in positions.iter().zip(&field_bits) {
                    word = (word << bits) | u64::from(key[pos]);
                }
                packed.push((word, self.counts[i]));
            }
            let packed = sort_packed_pairs(packed, total_bits);

            let mut counts: Vec<u64> = Vec::new();
            let mut runs: Vec<(usize, usize)> = Vec::new();
            let mut last_word = 0u64;
            for (word, count) in packed {
                if !counts.is_empty() && word == last_word {
                    // Same projected key: one merged decision entry.
                    *counts.last_mut().expect("non-empty") += count;
                } else {
                    if counts.is_empty() || (word >> decision_bits) != (last_word >> decision_bits) {
                        runs.push((counts.len(), 0));
                    }
                    counts.push(count);
                    runs.last_mut().expect("non-empty").1 += 1;
                    last_word = word;
                }
            }
            Ok(GroupedCounts { counts, runs })
        } else {
            let coarse = self.coarsen(attrs, true)?;
            let cond_width = coarse.key_width - 1;
            let mut runs: Vec<(usize, usize)> = Vec::new();
            for i in 0..coarse.len() {
                if i == 0 || coarse.key(i)[..cond_width] != coarse.key(i - 1)[..cond_width] {
                    runs.push((i, 0));
                }
                runs.last_mut().expect("non-empty").1 += 1;
            }
            Ok(GroupedCounts {
                counts: coarse.counts,
                runs,
            })
        }
    }

    /// Writes one `key TAB count` line per granule, keys comma-separated and
    /// already sorted.
    pub fn dump<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let mut rendered = String::new();
        for (key, count) in self.granules() {
            rendered.clear();
            for (i, v) in key.iter().enumerate() {
                if i > 0 {
                    rendered.push(',');
                }
                rendered.push_str(&v.to_string());
            }
            writeln!(w, "{rendered}\t{count}")?;
        }
        Ok(())
    }
}

/// Value bounds of a projected key, taken from the table's dictionaries.
fn table_bounds(table: &DecisionTable, attrs: &AttributeSubset, include_decision: bool) -> Vec<u32> {
    let mut bounds: Vec<u32> = attrs
        .iter()
        .map(|a| table.condition_attr(a).cardinality() as u32)
        .collect();
    if include_decision {
        bounds.push(table.decision_cardinality() as u32);
    }
    bounds
}

/// Builds the full representation over all condition attributes plus the
/// decision: one granule per distinct encoded row.
pub fn build_granularity(table: &DecisionTable) -> GranularityRepresentation {
    let n = table.n_objects();
    let width = table.row_width();
    let attrs = AttributeSubset::full(table.n_condition_attrs());
    let bounds = table_bounds(table, &attrs, true);
    let field_bits: Vec<u32> = bounds.iter().map(|&b| bits_for(b)).collect();
    let total_bits: u32 = field_bits.iter().sum();

    let (keys, counts) = if total_bits <= u64::BITS {
        let mut packed: Vec<u64> = Vec::with_capacity(n);
        for obj in 0..n {
            let row = table.row(obj);
            let mut word = 0u64;
            for (&v, &bits) in row.iter().zip(&field_bits) {
                word = (word << bits) | u64::from(v);
            }
            packed.push(word);
        }
        packed.sort_unstable();

        let mut keys = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        let mut last_word = 0u64;
        for word in packed {
            if counts.is_empty() || word != last_word {
                let start = keys.len();
                keys.resize(start + width, 0);
                let mut rest = word;
                for (slot, &bits) in keys[start..].iter_mut().zip(&field_bits).rev() {
                    *slot = (rest & ((1u64 << bits) - 1)) as u32;
                    rest >>= bits;
                }
                counts.push(1);
                last_word = word;
            } else {
                *counts.last_mut().expect("just checked non-empty") += 1;
            }
        }
        (keys, counts)
    } else {
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by(|&a, &b| table.row(a as usize).cmp(table.row(b as usize)));

        let mut keys = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for &i in &order {
            let row = table.row(i as usize);
            if counts.is_empty() || &keys[keys.len() - width..] != row {
                keys.extend_from_slice(row);
                counts.push(1);
            } else {
                *counts.last_mut().expect("just checked non-empty") += 1;
            }
        }
        (keys, counts)
    };

    GranularityRepresentation::from_sorted_parts(attrs, true, width, keys, counts, n as u64, bounds)
}

/// Re-partitions a coarse representation onto the larger attribute set
/// `attrs` (optionally adding the decision), using object-level membership
/// from `table`; each coarse class is split by the added attributes.
///
/// `g` must have been built from `table`: per-key counts are checked against
/// the table's object partition.
pub fn refine(
    table: &DecisionTable,
    g: &GranularityRepresentation,
    attrs: &AttributeSubset,
    include_decision: bool,
) -> Result<GranularityRepresentation> {
    if !g.attrs.is_subset_of(attrs) {
        return Err(Error::domain(
            "refinement target must be a superset of the source attributes",
        ));
    }
    if g.includes_decision && !include_decision {
        return Err(Error::domain(
            "refinement cannot drop the decision attribute",
        ));
    }
    if attrs.indices().iter().any(|&a| a >= table.n_condition_attrs()) {
        return Err(Error::domain("refinement target names an unknown attribute"));
    }
    if g.universe_size != table.n_objects() as u64 {
        return Err(Error::domain(format!(
            "representation is inconsistent with the table: covers {} objects, table has {}",
            g.universe_size,
            table.n_objects()
        )));
    }

    let n = table.n_objects();
    let coarse_keys: Vec<Vec<u32>> = (0..n)
        .map(|obj| table.project_row(obj, &g.attrs, g.includes_decision))
        .collect();

    // Group objects by their coarse class and check each class against g.
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| coarse_keys[a as usize].cmp(&coarse_keys[b as usize]));

    let mut fine: Vec<(Vec<u32>, u64)> = Vec::new();
    let mut start = 0;
    while start < n {
        let class_key = &coarse_keys[order[start] as usize];
        let mut end = start + 1;
        while end < n && &coarse_keys[order[end] as usize] == class_key {
            end += 1;
        }

        let found = (0..g.len()).find(|&i| g.key(i) == class_key.as_slice());
        let matches = found.is_some_and(|i| g.count(i) == (end - start) as u64);
        if !matches {
            return Err(Error::domain(
                "representation is inconsistent with the table: class counts differ",
            ));
        }

        // Split this coarse class by the target attribute set.
        let mut members: Vec<Vec<u32>> = order[start..end]
            .iter()
            .map(|&obj| table.project_row(obj as usize, attrs, include_decision))
            .collect();
        members.sort_unstable();
        let mut i = 0;
        while i < members.len() {
            let mut j = i + 1;
            while j < members.len() && members[j] == members[i] {
                j += 1;
            }
            fine.push((members[i].clone(), (j - i) as u64));
            i = j;
        }

        start = end;
    }

    fine.sort_unstable();
    let width = attrs.len() + usize::from(include_decision);
    let mut keys = Vec::with_capacity(fine.len() * width);
    let mut counts = Vec::with_capacity(fine.len());
    for (key, count) in fine {
        keys.extend_from_slice(&key);
        counts.push(count);
    }
    Ok(GranularityRepresentation::from_sorted_parts(
        attrs.clone(),
        include_decision,
        width,
        keys,
        counts,
        n as u64,
        table_bounds(table, attrs, include_decision),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::SyntheticSpec;
    use crate::table::{parse_table_str, SchemaConfig};
    use proptest::prelude::*;
    use std::collections::HashMap;

    const TABLE4_CSV: &str = "0,0,Y\n0,0,Y\n0,0,N\n0,1,Y\n0,1,Y\n0,1,Y\n1,0,N\n1,1,Y\n";

    fn table4() -> DecisionTable {
        parse_table_str(TABLE4_CSV, &SchemaConfig::default()).unwrap().table
    }

    fn granules_of(g: &GranularityRepresentation) -> Vec<(Vec<u32>, u64)> {
        g.granules().map(|(k, c)| (k.to_vec(), c)).collect()
    }

    /// Object-level reference partition for cross-checking.
    fn brute_force_partition(
        table: &DecisionTable,
        attrs: &AttributeSubset,
        include_decision: bool,
    ) -> Vec<(Vec<u32>, u64)> {
        let mut map: HashMap<Vec<u32>, u64> = HashMap::new();
        for obj in 0..table.n_objects() {
            *map.entry(table.project_row(obj, attrs, include_decision)).or_insert(0) += 1;
        }
        let mut out: Vec<_> = map.into_iter().collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn build_matches_worked_example() {
        // Y encodes to 0 and N to 1 (first-occurrence order).
        let g = build_granularity(&table4());
        assert_eq!(
            granules_of(&g),
            vec![
                (vec![0, 0, 0], 2),
                (vec![0, 0, 1], 1),
                (vec![0, 1, 0], 3),
                (vec![1, 0, 1], 1),
                (vec![1, 1, 0], 1),
            ]
        );
        assert_eq!(g.universe_size(), 8);
    }

    #[test]
    fn identical_rows_collapse() {
        let cfg = SchemaConfig {
            header: crate::table::HeaderMode::No,
            ..SchemaConfig::default()
        };
        let t = parse_table_str("x,Y\nx,Y\nx,Y\nx,Y\n", &cfg).unwrap().table;
        let g = build_granularity(&t);
        assert_eq!(g.len(), 1);
        assert_eq!(g.count(0), 4);
    }

    #[test]
    fn distinct_rows_stay_distinct() {
        let cfg = SchemaConfig {
            header: crate::table::HeaderMode::No,
            ..SchemaConfig::default()
        };
        let t = parse_table_str("a,Y\nb,N\nc,Y\n", &cfg).unwrap().table;
        let g = build_granularity(&t);
        assert_eq!(g.len(), 3);
        assert!(g.granules().all(|(_, c)| c == 1));
    }

    #[test]
    fn coarsen_matches_worked_partitions() {
        let g = build_granularity(&table4());
        // {a2, D}: classes {x1,x2}, {x3,x7}, {x4,x5,x6,x8}.
        let a2d = g.coarsen(&AttributeSubset::new([1]), true).unwrap();
        assert_eq!(
            granules_of(&a2d),
            vec![(vec![0, 0], 2), (vec![0, 1], 2), (vec![1, 0], 4)]
        );
        // {a2}: classes {x1,x2,x3,x7}, {x4,x5,x6,x8}.
        let a2 = a2d.coarsen(&AttributeSubset::new([1]), false).unwrap();
        assert_eq!(granules_of(&a2), vec![(vec![0], 4), (vec![1], 4)]);
    }

    #[test]
    fn coarsen_to_self_is_identity() {
        let g = build_granularity(&table4());
        let same = g.coarsen(&AttributeSubset::new([0, 1]), true).unwrap();
        assert_eq!(g, same);
    }

    #[test]
    fn coarsen_rejects_non_subsets() {
        let g = build_granularity(&table4());
        let a2 = g.coarsen(&AttributeSubset::new([1]), false).unwrap();
        assert!(matches!(
            a2.coarsen(&AttributeSubset::new([0]), false),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            a2.coarsen(&AttributeSubset::new([1]), true),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn group_by_condition_worked_examples() {
        let g = build_granularity(&table4());
        let a2d = g.coarsen(&AttributeSubset::new([1]), true).unwrap();
        let groups = a2d.group_by_condition().unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].key(), &[0]);
        assert_eq!(groups[0].decision_counts(), &[(0, 2), (1, 2)]);
        assert_eq!(groups[0].size(), 4);
        assert_eq!(groups[1].key(), &[1]);
        assert_eq!(groups[1].decision_counts(), &[(0, 4)]);

        // Full condition set: sizes 3,3,1,1 with <0,0> mixed {Y:2, N:1}.
        let groups = g.group_by_condition().unwrap();
        let sizes: Vec<u64> = groups.iter().map(|g| g.size()).collect();
        assert_eq!(sizes, vec![3, 3, 1, 1]);
        assert_eq!(groups[0].key(), &[0, 0]);
        assert_eq!(groups[0].decision_counts(), &[(0, 2), (1, 1)]);

        // Empty condition set: one group carrying the global histogram.
        let empty = g.coarsen(&AttributeSubset::empty(), true).unwrap();
        let groups = empty.group_by_condition().unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].key(), &[] as &[u32]);
        assert_eq!(groups[0].decision_counts(), &[(0, 6), (1, 2)]);
    }

    #[test]
    fn group_requires_decision() {
        let g = build_granularity(&table4());
        let bare = g.coarsen(&AttributeSubset::new([0, 1]), false).unwrap();
        assert!(matches!(bare.group_by_condition(), Err(Error::Domain(_))));
    }

    #[test]
    fn refine_matches_worked_example() {
        let t = table4();
        let g = build_granularity(&t);
        let a2 = g.coarsen(&AttributeSubset::new([1]), false).unwrap();
        let refined = refine(&t, &a2, &AttributeSubset::new([1]), true).unwrap();
        assert_eq!(
            granules_of(&refined),
            vec![(vec![0, 0], 2), (vec![0, 1], 2), (vec![1, 0], 4)]
        );
        // Q = P leaves the representation unchanged.
        let same = refine(&t, &a2, &AttributeSubset::new([1]), false).unwrap();
        assert_eq!(same, a2);
    }

    #[test]
    fn refine_rejects_inconsistent_source() {
        let t = table4();
        let other = parse_table_str("0,0,Y\n1,1,N\n", &SchemaConfig::default()).unwrap().table;
        let g_other = build_granularity(&other);
        assert!(matches!(
            refine(&t, &g_other, &AttributeSubset::new([0, 1]), true),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn dump_is_sorted_and_tab_separated() {
        let g = build_granularity(&table4());
        let mut out = Vec::new();
        g.dump(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "0,0,0\t2\n0,0,1\t1\n0,1,0\t3\n1,0,1\t1\n1,1,0\t1\n"
        );
    }

    #[test]
    fn wide_keys_take_the_general_path_and_agree() {
        // 40 attributes at 3 bits each exceed one word, so coarsening falls
        // back to slice sorting; results must match the object-level oracle.
        let spec = SyntheticSpec {
            n_objects: 200,
            n_attrs: 40,
            values_per_attr: 5,
            decision_classes: 3,
            seed: 4242,
        };
        let table = spec.generate_table().unwrap();
        let g = build_granularity(&table);
        assert_eq!(g.granules().map(|(_, c)| c).sum::<u64>(), 200);

        for attrs in [
            AttributeSubset::full(40),
            AttributeSubset::new((0..40).step_by(2)),
            AttributeSubset::new([0, 7, 13, 39]),
        ] {
            let coarse = g.coarsen(&attrs, true).unwrap();
            assert_eq!(granules_of(&coarse), brute_force_partition(&table, &attrs, true));
        }
    }

    fn small_spec() -> impl Strategy<Value = SyntheticSpec> {
        (1usize..=12, 1usize..=4, 1u32..=3, 1u32..=3, 0u64..1000).prop_map(
            |(n_objects, n_attrs, values_per_attr, decision_classes, seed)| SyntheticSpec {
                n_objects,
                n_attrs,
                values_per_attr,
                decision_classes,
                seed,
            },
        )
    }

    proptest! {
        #[test]
        fn counts_cover_universe_and_keys_distinct(spec in small_spec(), subset_mask in 0usize..16) {
            let table = spec.generate_table().unwrap();
            let g = build_granularity(&table);
            prop_assert_eq!(g.granules().map(|(_, c)| c).sum::<u64>(), g.universe_size());
            prop_assert!(g.len() as u64 <= g.universe_size());

            let attrs = AttributeSubset::new((0..table.n_condition_attrs()).filter(|a| subset_mask & (1 << a) != 0));
            let coarse = g.coarsen(&attrs, true).unwrap();
            prop_assert_eq!(coarse.granules().map(|(_, c)| c).sum::<u64>(), g.universe_size());
            let mut keys: Vec<&[u32]> = (0..coarse.len()).map(|i| coarse.key(i)).collect();
            let total = keys.len();
            keys.dedup();
            prop_assert_eq!(keys.len(), total);

            // Granule-level coarsening agrees with object-level partitioning.
            prop_assert_eq!(granules_of(&coarse), brute_force_partition(&table, &attrs, true));
        }

        #[test]
        fn coarsen_composes(spec in small_spec(), mid_mask in 0usize..16, small_mask in 0usize..16) {
            let table = spec.generate_table().unwrap();
            let g = build_granularity(&table);
            let n = table.n_condition_attrs();
            let mid = AttributeSubset::new((0..n).filter(|a| mid_mask & (1 << a) != 0));
            let small = AttributeSubset::new(mid.iter().filter(|a| small_mask & (1 << a) != 0));

            let direct = g.coarsen(&small, false).unwrap();
            let via_mid = g.coarsen(&mid, true).unwrap().coarsen(&small, false).unwrap();
            prop_assert_eq!(direct, via_mid);
        }

        #[test]
        fn refine_then_coarsen_round_trips(spec in small_spec(), subset_mask in 0usize..16) {
            let table = spec.generate_table().unwrap();
            let g = build_granularity(&table);
            let attrs = AttributeSubset::new((0..table.n_condition_attrs()).filter(|a| subset_mask & (1 << a) != 0));
            let coarse = g.coarsen(&attrs, false).unwrap();
            let refined = refine(&table, &coarse, &AttributeSubset::full(table.n_condition_attrs()), true).unwrap();
            prop_assert_eq!(&refined, &g);
            prop_assert_eq!(refined.coarsen(&attrs, false).unwrap(), coarse);
        }

        #[test]
        fn group_count_matches_condition_coarsening(spec in small_spec(), subset_mask in 0usize..16) {
            let table = spec.generate_table().unwrap();
            let g = build_granularity(&table);
            let attrs = AttributeSubset::new((0..table.n_condition_attrs()).filter(|a| subset_mask & (1 << a) != 0));
            let coarse = g.coarsen(&attrs, true).unwrap();
            let groups = coarse.group_by_condition().unwrap();
            prop_assert_eq!(groups.len(), g.coarsen(&attrs, false).unwrap().len());
            prop_assert_eq!(groups.iter().map(|grp| grp.size()).sum::<u64>(), g.universe_size());
            for grp in &groups {
                prop_assert_eq!(grp.size(), grp.decision_counts().iter().map(|&(_, c)| c).sum::<u64>());
            }
        }
    }
}
