//! Degree-1 pairs by reducing the coboundary matrix of the 2-skeleton.
//!
//! Edges are processed from last to first. A column's pivot is the earliest
//! triangle of its reduced coboundary. Edges that merge components in degree
//! 0 have trivial cocycles and are skipped. Only the edge combinations of
//! reduced columns are stored; coboundaries are recomputed when needed and
//! accumulated in a heap where equal entries cancel lazily.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::collections::HashMap;

use super::sorted_edges;
use super::union_find::UnionFind;

#[derive(Debug, Clone, Copy)]
struct TriKey {
    value: f64,
    verts: [u32; 3],
}

impl TriKey {
    fn new(value: f64, a: u32, b: u32, c: u32) -> Self {
        let mut verts = [a, b, c];
        verts.sort_unstable();
        TriKey { value, verts }
    }
}

impl PartialEq for TriKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TriKey {}

impl PartialOrd for TriKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TriKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then(self.verts.cmp(&other.verts))
    }
}

/// Returns the finite pairs and the births of essential classes.
///
/// `values` holds the `n x n` edge values, `tri` the value of a triangle. A
/// triangle must never enter before its edges.
pub(crate) fn degree1_pairs<F>(n: usize, values: &[f64], tri: F, trunc: f64) -> (Vec<(f64, f64)>, Vec<f64>)
where
    F: Fn(usize, usize, usize) -> f64,
{
    let edges = sorted_edges(values, n, trunc);
    let mut uf = UnionFind::new(n);
    let mut tree = vec![false; edges.len()];
    for (idx, &(_, i, j)) in edges.iter().enumerate() {
        tree[idx] = uf.union(i as usize, j as usize);
    }

    // Vertices are sorted before evaluation so every coface sees identical bits.
    let tri_key = |a: u32, b: u32, c: u32| {
        let mut t = TriKey::new(0.0, a, b, c);
        t.value = tri(t.verts[0] as usize, t.verts[1] as usize, t.verts[2] as usize);
        t
    };
    let coboundary = |i: u32, j: u32, out: &mut Vec<TriKey>| {
        for k in 0..n as u32 {
            if k == i || k == j {
                continue;
            }
            let t = tri_key(i, j, k);
            if t.value <= trunc {
                out.push(t);
            }
        }
    };
    let min_coface = |i: u32, j: u32| -> Option<TriKey> {
        let mut best: Option<TriKey> = None;
        for k in 0..n as u32 {
            if k == i || k == j {
                continue;
            }
            let t = tri_key(i, j, k);
            if t.value <= trunc {
                if best.is_none_or(|b| t < b) {
                    best = Some(t);
                }
            }
        }
        best
    };

    // pivot triangle -> (edge combination of the owning column)
    let mut pivots: HashMap<[u32; 3], Vec<(u32, u32)>> = HashMap::new();
    let mut finite = Vec::new();
    let mut essential = Vec::new();
    let mut scratch = Vec::new();
    let mut heap: BinaryHeap<Reverse<TriKey>> = BinaryHeap::new();

    for (idx, &(value, i, j)) in edges.iter().enumerate().rev() {
        if tree[idx] {
            continue;
        }
        let Some(first) = min_coface(i, j) else {
            essential.push(value);
            continue;
        };
        if !pivots.contains_key(&first.verts) {
            finite.push((value, first.value));
            pivots.insert(first.verts, vec![(i, j)]);
            continue;
        }

        let mut combo = vec![(i, j)];
        heap.clear();
        scratch.clear();
        coboundary(i, j, &mut scratch);
        heap.extend(scratch.iter().map(|&t| Reverse(t)));
        loop {
            let Some(pivot) = pop_pivot(&mut heap) else {
                essential.push(value);
                break;
            };
            let Some(other) = pivots.get(&pivot.verts) else {
                finite.push((value, pivot.value));
                pivots.insert(pivot.verts, combo);
                break;
            };
            heap.push(Reverse(pivot));
            for &(a, b) in other {
                scratch.clear();
                coboundary(a, b, &mut scratch);
                heap.extend(scratch.iter().map(|&t| Reverse(t)));
            }
            combo = xor_sorted(&combo, other);
        }
    }
    (finite, essential)
}

/// Smallest entry of odd multiplicity, removing everything before it.
fn pop_pivot(heap: &mut BinaryHeap<Reverse<TriKey>>) -> Option<TriKey> {
    while let Some(Reverse(top)) = heap.pop() {
        if heap.peek() == Some(&Reverse(top)) {
            heap.pop();
            continue;
        }
        return Some(top);
    }
    None
}

/// Symmetric difference of two sorted lists without repeats.
fn xor_sorted<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            Ordering::Less => {
                out.push(a[x]);
                x += 1;
            }
            Ordering::Greater => {
                out.push(b[y]);
                y += 1;
            }
            Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tri_key_orders_by_value_then_vertices() {
        let a = TriKey::new(1.0, 3, 1, 2);
        let b = TriKey::new(1.0, 0, 4, 2);
        let c = TriKey::new(0.5, 7, 8, 9);
        assert_eq!(a.verts, [1, 2, 3]);
        assert!(c < b && b < a);
    }

    #[test]
    fn xor_and_cancel() {
        assert_eq!(xor_sorted(&[(0, 1), (1, 2)], &[(1, 2), (2, 3)]), vec![(0, 1), (2, 3)]);
        let t = |v| TriKey::new(v, 0, 1, 2);
        let mut heap: BinaryHeap<_> = [t(0.1), t(0.3), t(0.1), t(0.2), t(0.3), t(0.3)].into_iter().map(Reverse).collect();
        assert_eq!(pop_pivot(&mut heap), Some(t(0.2)));
        assert_eq!(pop_pivot(&mut heap), Some(t(0.3)));
        assert_eq!(pop_pivot(&mut heap), None);
    }
}
