use serde::{Deserialize, Serialize};

use super::Rat;
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self> {
        if lo > hi {
            return Err(Error::input(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

/// Sorted union of pairwise disjoint closed intervals.
///
/// Intervals that overlap or share an endpoint are merged on construction.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// Canonicalizes arbitrary closed intervals.
    pub fn from_intervals(mut raw: Vec<Interval>) -> Self {
        raw.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn from_pairs(raw: Vec<(Rat, Rat)>) -> Result<Self> {
        let ivs = raw
            .into_iter()
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalSet::from_intervals(ivs))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> Rat {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let idx = self.intervals.partition_point(|iv| &iv.hi < x);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(x))
    }

    /// Restriction to a window.
    pub fn clip(&self, window: &Interval) -> IntervalSet {
        IntervalSet {
            intervals: self.intervals.iter().filter_map(|iv| iv.intersect(window)).collect(),
        }
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        IntervalSet::from_intervals(all)
    }
}

/// Canonical merged set together with its exact total length.
pub fn interval_union_length(raw: Vec<(Rat, Rat)>) -> Result<(IntervalSet, Rat)> {
    let set = IntervalSet::from_pairs(raw)?;
    let len = set.total_length();
    Ok((set, len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn union_examples() {
        let (_, len) = interval_union_length(vec![(r("0"), r("1/2")), (r("1/4"), r("3/4"))]).unwrap();
        assert_eq!(len, r("3/4"));
        let (set, len) = interval_union_length(vec![]).unwrap();
        assert!(set.is_empty());
        assert_eq!(len, Rat::zero());
        let (set, len) =
            interval_union_length(vec![(r("0"), r("1/3")), (r("1/3"), r("1/2")), (r("2/3"), r("1"))]).unwrap();
        assert_eq!(len, r("5/6"));
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn malformed_pair_rejected() {
        let err = interval_union_length(vec![(r("1"), r("0"))]).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn membership_and_clip() {
        let set = IntervalSet::from_pairs(vec![(r("0"), r("1/4")), (r("1/2"), r("1"))]).unwrap();
        assert!(set.contains(&r("1/4")));
        assert!(!set.contains(&r("1/3")));
        let w = Interval::new(r("1/8"), r("3/4")).unwrap();
        assert_eq!(set.clip(&w).total_length(), r("3/8"));
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-50i64..50, 1i64..12).prop_map(|(n, d)| Rat::new(n, d))
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent(raw in prop::collection::vec((small_rat(), small_rat()), 0..20)) {
            let raw: Vec<(Rat, Rat)> = raw.into_iter()
                .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
                .collect();
            let (set, len) = interval_union_length(raw.clone()).unwrap();
            let again: Vec<(Rat, Rat)> = set.intervals().iter().map(|iv| (iv.lo.clone(), iv.hi.clone())).collect();
            let (set2, len2) = interval_union_length(again).unwrap();
            prop_assert_eq!(&set, &set2);
            prop_assert_eq!(&len, &len2);
            for w in set.intervals().windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
            let max_single = raw.iter().map(|(a, b)| b - a).max().unwrap_or_else(Rat::zero);
            let sum: Rat = raw.iter().map(|(a, b)| b - a).sum();
            prop_assert!(len >= max_single && len <= sum);
        }
    }
}
