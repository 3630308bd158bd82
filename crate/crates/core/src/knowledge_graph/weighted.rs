use std::collections::HashMap;

use super::ThingId;

/// Query result: distinct things with a membership weight in `[0, 1]`.
/// Crisp membership has weight 1.0. Iteration follows insertion order.
#[derive(Debug, Clone, Default)]
pub struct WeightedSet {
    members: Vec<(ThingId, f64)>,
    index: HashMap<ThingId, usize>,
}

impl PartialEq for WeightedSet {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|(id, w)| other.weight(id) == Some(w))
    }
}

impl WeightedSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn crisp(ids: impl IntoIterator<Item = ThingId>) -> Self {
        let mut set = Self::new();
        for id in ids {
            set.insert(id, 1.0);
        }
        set
    }

    /// Adds `id`, keeping the larger weight if it is already present.
    /// Weights are clamped into `[0, 1]`.
    pub fn insert(&mut self, id: ThingId, weight: f64) {
        let weight = weight.clamp(0.0, 1.0);
        match self.index.get(&id) {
            Some(&i) => {
                if weight > self.members[i].1 {
                    self.members[i].1 = weight;
                }
            }
            None => {
                self.index.insert(id, self.members.len());
                self.members.push((id, weight));
            }
        }
    }

    pub fn weight(&self, id: ThingId) -> Option<f64> {
        self.index.get(&id).map(|&i| self.members[i].1)
    }

    pub fn contains(&self, id: ThingId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ThingId, f64)> + '_ {
        self.members.iter().copied()
    }

    pub fn ids(&self) -> Vec<ThingId> {
        self.members.iter().map(|m| m.0).collect()
    }

    /// Fuzzy union: maximum weight.
    pub fn union(&self, other: &WeightedSet) -> WeightedSet {
        let mut out = self.clone();
        for (id, w) in other.iter() {
            out.insert(id, w);
        }
        out
    }

    /// Fuzzy intersection: minimum weight.
    pub fn intersection(&self, other: &WeightedSet) -> WeightedSet {
        let mut out = WeightedSet::new();
        for (id, w) in self.iter() {
            if let Some(v) = other.weight(id) {
                out.insert(id, w.min(v));
            }
        }
        out
    }

    pub fn retain(&mut self, mut keep: impl FnMut(ThingId, f64) -> bool) {
        self.members.retain(|&(id, w)| keep(id, w));
        self.index = self.members.iter().enumerate().map(|(i, m)| (m.0, i)).collect();
    }
}

impl FromIterator<(ThingId, f64)> for WeightedSet {
    fn from_iter<I: IntoIterator<Item = (ThingId, f64)>>(iter: I) -> Self {
        let mut set = WeightedSet::new();
        for (id, w) in iter {
            set.insert(id, w);
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_and_intersection() {
        let a: WeightedSet = [(ThingId(1), 0.3), (ThingId(2), 1.0)].into_iter().collect();
        let b: WeightedSet = [(ThingId(1), 0.7), (ThingId(3), 0.5)].into_iter().collect();
        let u = a.union(&b);
        assert_eq!(u.weight(ThingId(1)), Some(0.7));
        assert_eq!(u.len(), 3);
        let i = a.intersection(&b);
        assert_eq!(i.ids(), vec![ThingId(1)]);
        assert_eq!(i.weight(ThingId(1)), Some(0.3));
    }

    #[test]
    fn weights_clamped_and_distinct() {
        let mut s = WeightedSet::new();
        s.insert(ThingId(4), 2.0);
        s.insert(ThingId(4), -1.0);
        assert_eq!(s.len(), 1);
        assert_eq!(s.weight(ThingId(4)), Some(1.0));
    }
}
