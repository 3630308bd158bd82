//! Closed frequent itemsets by prefix-preserving closure extension.

/// A closed itemset with the indices of the transactions containing it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClosedItemset {
    pub items: Vec<u32>,
    pub support: Vec<usize>,
}

/// All non-empty itemsets contained in at least `min_support`
/// transactions and having no superset with the same support. Output is
/// sorted by items.
pub fn closed_itemsets(transactions: &[Vec<u32>], min_support: usize) -> Vec<ClosedItemset> {
    let min_support = min_support.max(1);
    let sets: Vec<Vec<u32>> = transactions
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t.sort_unstable();
            t.dedup();
            t
        })
        .collect();
    let mut universe: Vec<u32> = sets.iter().flatten().copied().collect();
    universe.sort_unstable();
    universe.dedup();
    let all: Vec<usize> = (0..sets.len()).collect();
    let mut out = Vec::new();
    if all.len() < min_support {
        return out;
    }
    let root = closure(&sets, &all);
    let miner = Miner { sets: &sets, universe: &universe, min_support };
    if !root.is_empty() {
        out.push(ClosedItemset { items: root.clone(), support: all.clone() });
    }
    miner.extend(&root, &all, None, &mut out);
    out.sort();
    out
}

fn closure(sets: &[Vec<u32>], tids: &[usize]) -> Vec<u32> {
    let mut iter = tids.iter();
    let Some(&first) = iter.next() else { return Vec::new() };
    let mut items = sets[first].clone();
    for &t in iter {
        items.retain(|i| sets[t].binary_search(i).is_ok());
    }
    items
}

struct Miner<'a> {
    sets: &'a [Vec<u32>],
    universe: &'a [u32],
    min_support: usize,
}

impl Miner<'_> {
    fn extend(&self, p: &[u32], tids: &[usize], core: Option<u32>, out: &mut Vec<ClosedItemset>) {
        for &e in self.universe {
            if core.is_some_and(|c| e <= c) || p.binary_search(&e).is_ok() {
                continue;
            }
            let sub: Vec<usize> = tids.iter().copied().filter(|&t| self.sets[t].binary_search(&e).is_ok()).collect();
            if sub.len() < self.min_support {
                continue;
            }
            let q = closure(self.sets, &sub);
            let below = |s: &[u32]| s.iter().copied().filter(|&i| i < e).collect::<Vec<u32>>();
            if below(&q) != below(p) {
                continue;
            }
            out.push(ClosedItemset { items: q.clone(), support: sub.clone() });
            self.extend(&q, &sub, Some(e), out);
        }
    }
}
