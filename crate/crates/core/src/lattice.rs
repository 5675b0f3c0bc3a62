//! Subset lattices quotiented by interchangeable ("twin") vertices.
//!
//! Two vertices with identical neighborhoods are swapped by a graph
//! automorphism, so any quantity that is invariant under automorphisms and
//! depends only on a vertex subset depends only on how many members of each
//! twin class the subset contains. A subset is then a count vector, stored
//! in mixed radix. With all classes singletons this is the plain bitmask
//! lattice.

use std::collections::HashMap;

/// Partition of `0..n` into twin classes.
///
/// `forward[v]` / `backward[v]` are neighbor masks; for undirected graphs
/// `backward` is all zeros. Vertices sharing both masks are false twins.
/// For undirected graphs, vertices sharing a closed neighborhood (true
/// twins) are grouped as well.
pub(crate) fn twin_classes(forward: &[u64], backward: &[u64], undirected: bool) -> Vec<Vec<usize>> {
    let n = forward.len();
    let mut groups: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for v in 0..n {
        groups.entry((forward[v], backward[v])).or_default().push(v);
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut lonely = Vec::new();
    for members in groups.into_values() {
        if members.len() > 1 {
            classes.push(members);
        } else {
            lonely.push(members[0]);
        }
    }
    if undirected {
        let mut closed: HashMap<u64, Vec<usize>> = HashMap::new();
        for v in lonely {
            closed.entry(forward[v] | 1 << v).or_default().push(v);
        }
        classes.extend(closed.into_values());
    } else {
        classes.extend(lonely.into_iter().map(|v| vec![v]));
    }
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.sort_unstable_by_key(|c| c[0]);
    classes
}

pub(crate) struct ClassLattice {
    pub classes: Vec<Vec<usize>>,
    pub strides: Vec<usize>,
    pub size: usize,
    /// `prefix[k][c]`: mask of the first `c` members of class `k`.
    prefix: Vec<Vec<u64>>,
}

impl ClassLattice {
    /// Returns `None` when the number of states exceeds `max_states`.
    pub fn new(classes: Vec<Vec<usize>>, max_states: usize) -> Option<Self> {
        let mut strides = Vec::with_capacity(classes.len());
        let mut size = 1usize;
        for c in &classes {
            strides.push(size);
            size = size.checked_mul(c.len() + 1)?;
            if size > max_states {
                return None;
            }
        }
        let prefix = classes
            .iter()
            .map(|c| {
                let mut masks = vec![0u64];
                let mut m = 0u64;
                for &v in c {
                    m |= 1 << v;
                    masks.push(m);
                }
                masks
            })
            .collect();
        Some(Self {
            classes,
            strides,
            size,
            prefix,
        })
    }

    /// Number of states the lattice would have, saturating.
    pub fn state_count(classes: &[Vec<usize>]) -> usize {
        classes
            .iter()
            .fold(1usize, |acc, c| acc.saturating_mul(c.len() + 1))
    }

    pub fn full_index(&self) -> usize {
        self.size - 1
    }

    pub fn mask_of(&self, counts: &[usize]) -> u64 {
        counts
            .iter()
            .enumerate()
            .fold(0, |m, (k, &c)| m | self.prefix[k][c])
    }

    pub fn counts_of(&self, mut index: usize) -> Vec<usize> {
        self.classes
            .iter()
            .map(|c| {
                let r = c.len() + 1;
                let digit = index % r;
                index /= r;
                digit
            })
            .collect()
    }

    /// Visits every state in increasing index order with its counts and
    /// canonical mask (lowest-id members of each class first).
    pub fn for_each_state(&self, mut visit: impl FnMut(usize, &[usize], u64)) {
        let k = self.classes.len();
        let mut counts = vec![0usize; k];
        let mut mask = 0u64;
        for index in 0..self.size {
            visit(index, &counts, mask);
            // Odometer increment.
            for j in 0..k {
                let cap = self.classes[j].len();
                if counts[j] < cap {
                    mask |= 1 << self.classes[j][counts[j]];
                    counts[j] += 1;
                    break;
                }
                mask &= !self.prefix[j][cap];
                counts[j] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_false_and_true_twins() {
        // Star K_{1,3}: leaves 1,2,3 are false twins.
        let fwd = [0b1110, 0b0001, 0b0001, 0b0001];
        let classes = twin_classes(&fwd, &[0; 4], true);
        assert_eq!(classes, vec![vec![0], vec![1, 2, 3]]);
        // K3: all true twins.
        let fwd = [0b110, 0b101, 0b011];
        assert_eq!(twin_classes(&fwd, &[0; 3], true), vec![vec![0, 1, 2]]);
        // Same neighborhoods but directed: true twins are not merged.
        assert_eq!(twin_classes(&fwd, &[0; 3], false).len(), 3);
    }

    #[test]
    fn odometer_masks_are_canonical() {
        let lat = ClassLattice::new(vec![vec![0, 2], vec![1]], 100).unwrap();
        assert_eq!(lat.size, 6);
        let mut seen = Vec::new();
        lat.for_each_state(|i, counts, mask| {
            assert_eq!(lat.mask_of(counts), mask);
            assert_eq!(lat.counts_of(i), counts);
            seen.push(mask);
        });
        assert_eq!(seen, vec![0, 0b001, 0b101, 0b010, 0b011, 0b111]);
        assert!(ClassLattice::new(vec![vec![0, 2], vec![1]], 5).is_none());
    }
}
