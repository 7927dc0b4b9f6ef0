//! Connected components of the interval-overlap graph.

use crate::lexcore::ArmSet;

/// Closed interval `[lo, hi]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is reversed");
        Self { lo, hi }
    }

    /// Closed intervals that share at least one point, endpoints included.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Groups interval indices into chains: two indices share a component iff a
/// path of pairwise-overlapping intervals connects them.
///
/// Sort-and-sweep, O(n log n). Components come out ordered by their leftmost
/// endpoint, each holding its indices in ascending order.
pub fn chained_components(intervals: &[Interval]) -> Vec<ArmSet> {
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by(|&a, &b| intervals[a].lo.total_cmp(&intervals[b].lo).then(a.cmp(&b)));

    let mut components: Vec<ArmSet> = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    for idx in order {
        let iv = intervals[idx];
        match components.last_mut() {
            Some(current) if iv.lo <= reach => {
                current.push(idx);
                reach = reach.max(iv.hi);
            }
            _ => {
                components.push(vec![idx]);
                reach = iv.hi;
            }
        }
    }
    for c in &mut components {
        c.sort_unstable();
    }
    components
}

/// The chain containing `target`.
pub fn component_of(intervals: &[Interval], target: usize) -> ArmSet {
    chained_components(intervals)
        .into_iter()
        .find(|c| c.binary_search(&target).is_ok())
        .expect("every index belongs to a component")
}
