use serde::{Deserialize, Serialize};

/// A set of closed tick intervals, kept sorted with overlapping and
/// adjacent intervals merged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<[i64; 2]>", try_from = "Vec<[i64; 2]>")]
pub struct TimeSpec {
    intervals: Vec<(i64, i64)>,
}

impl TimeSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn point(t: i64) -> Self {
        TimeSpec { intervals: vec![(t, t)] }
    }

    /// `None` when `start > end`.
    pub fn interval(start: i64, end: i64) -> Option<Self> {
        (start <= end).then(|| TimeSpec { intervals: vec![(start, end)] })
    }

    /// Builds a normalized spec; `None` if any interval has `start > end`.
    pub fn from_intervals(intervals: impl IntoIterator<Item = (i64, i64)>) -> Option<Self> {
        let mut spec = TimeSpec::empty();
        for (s, e) in intervals {
            if s > e {
                return None;
            }
            spec.intervals.push((s, e));
        }
        spec.normalize();
        Some(spec)
    }

    fn normalize(&mut self) {
        self.intervals.sort_unstable();
        let mut merged: Vec<(i64, i64)> = Vec::with_capacity(self.intervals.len());
        for &(s, e) in &self.intervals {
            match merged.last_mut() {
                Some(last) if s <= last.1.saturating_add(1) => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        self.intervals = merged;
    }

    pub fn insert(&mut self, start: i64, end: i64) {
        if start <= end {
            self.intervals.push((start, end));
            self.normalize();
        }
    }

    pub fn union(&self, other: &TimeSpec) -> TimeSpec {
        let mut out = TimeSpec { intervals: self.intervals.iter().chain(&other.intervals).copied().collect() };
        out.normalize();
        out
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn start(&self) -> Option<i64> {
        self.intervals.first().map(|i| i.0)
    }

    pub fn end(&self) -> Option<i64> {
        self.intervals.last().map(|i| i.1)
    }

    pub fn contains(&self, t: i64) -> bool {
        let idx = self.intervals.partition_point(|&(_, e)| e < t);
        self.intervals.get(idx).is_some_and(|&(s, _)| s <= t)
    }

    pub fn intersects_interval(&self, start: i64, end: i64) -> bool {
        let idx = self.intervals.partition_point(|&(_, e)| e < start);
        self.intervals.get(idx).is_some_and(|&(s, _)| s <= end)
    }

    pub fn intersects(&self, other: &TimeSpec) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a, b) = (self.intervals[i], other.intervals[j]);
            if a.0 <= b.1 && b.0 <= a.1 {
                return true;
            }
            if a.1 < b.1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    /// Smallest tick distance between the two specs: 0 when they
    /// intersect, otherwise the later start minus the earlier end.
    /// `None` if either is empty.
    pub fn distance(&self, other: &TimeSpec) -> Option<i64> {
        if self.is_empty() || other.is_empty() {
            return None;
        }
        let mut best = i64::MAX;
        for &(s1, e1) in &self.intervals {
            for &(s2, e2) in &other.intervals {
                let d = if s2 > e1 {
                    s2 - e1
                } else if s1 > e2 {
                    s1 - e2
                } else {
                    0
                };
                best = best.min(d);
            }
        }
        Some(best)
    }
}

impl From<TimeSpec> for Vec<[i64; 2]> {
    fn from(spec: TimeSpec) -> Self {
        spec.intervals.into_iter().map(|(s, e)| [s, e]).collect()
    }
}

impl TryFrom<Vec<[i64; 2]>> for TimeSpec {
    type Error = String;

    fn try_from(raw: Vec<[i64; 2]>) -> Result<Self, Self::Error> {
        TimeSpec::from_intervals(raw.into_iter().map(|[s, e]| (s, e)))
            .ok_or_else(|| "interval start exceeds its end".to_string())
    }
}
