//! Bottleneck distance and maximal persistence.

use crate::error::{Error, Result};
use crate::filtration::{PersistenceDiagram, PersistencePoint};

/// The diagram with points only on the diagonal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiagonalDiagram;

impl DiagonalDiagram {
    pub fn as_diagram(self, scale: crate::filtration::Scale) -> PersistenceDiagram {
        PersistenceDiagram::empty(scale)
    }
}

#[inline]
pub(crate) fn linf(a: &PersistencePoint, b: &PersistencePoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// L∞ distance from a point to its projection on the diagonal.
#[inline]
pub(crate) fn to_diagonal(p: &PersistencePoint) -> f64 {
    (p.death - p.birth) / 2.0
}

/// Bottleneck distance between the finite `dim`-points of two diagrams.
///
/// Essential points are not matched; their counts must agree.
pub fn bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: usize) -> Result<f64> {
    if a.essential_count(dim) != b.essential_count(dim) {
        return Err(Error::IncomparableEssential);
    }
    let left: Vec<PersistencePoint> = a.finite(dim).copied().collect();
    let right: Vec<PersistencePoint> = b.finite(dim).copied().collect();
    Ok(bottleneck_points(&left, &right))
}

/// Distance to the empty diagonal diagram.
pub fn bottleneck_to_diagonal(a: &PersistenceDiagram, dim: usize) -> f64 {
    a.finite(dim).map(to_diagonal).fold(0.0, f64::max)
}

/// Exact bottleneck distance between two finite point multisets.
///
/// The answer is one of the candidate costs (pairwise L∞ distances and
/// half-persistences); binary search picks the smallest for which the
/// threshold graph has a perfect matching.
pub fn bottleneck_points(left: &[PersistencePoint], right: &[PersistencePoint]) -> f64 {
    if left.is_empty() && right.is_empty() {
        return 0.0;
    }
    let mut candidates: Vec<f64> = Vec::with_capacity(left.len() * right.len() + left.len() + right.len() + 1);
    candidates.push(0.0);
    for p in left {
        candidates.push(to_diagonal(p));
        for q in right {
            candidates.push(linf(p, q));
        }
    }
    candidates.extend(right.iter().map(to_diagonal));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let matcher = ThresholdGraph::new(left, right);
    // the largest candidate always admits the all-diagonal matching
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if matcher.has_perfect_matching(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Bipartite graph of size n+m on each side: left points plus diagonal
/// copies of right points, against right points plus diagonal copies of
/// left points.
struct ThresholdGraph<'a> {
    left: &'a [PersistencePoint],
    right: &'a [PersistencePoint],
}

impl<'a> ThresholdGraph<'a> {
    fn new(left: &'a [PersistencePoint], right: &'a [PersistencePoint]) -> Self {
        Self { left, right }
    }

    fn adjacency(&self, t: f64) -> Vec<Vec<u32>> {
        let (n, m) = (self.left.len(), self.right.len());
        let size = n + m;
        let mut adj = vec![Vec::new(); size];
        for (i, p) in self.left.iter().enumerate() {
            for (j, q) in self.right.iter().enumerate() {
                if linf(p, q) <= t {
                    adj[i].push(j as u32);
                }
            }
            if to_diagonal(p) <= t {
                adj[i].push((m + i) as u32);
            }
        }
        for (j, q) in self.right.iter().enumerate() {
            let row = &mut adj[n + j];
            if to_diagonal(q) <= t {
                row.push(j as u32);
            }
            // diagonal to diagonal is free
            row.extend((0..n).map(|i| (m + i) as u32));
        }
        adj
    }

    fn has_perfect_matching(&self, t: f64) -> bool {
        let adj = self.adjacency(t);
        hopcroft_karp(&adj, adj.len()) == adj.len()
    }
}

/// Maximum matching size in a bipartite graph given as left adjacency lists.
fn hopcroft_karp(adj: &[Vec<u32>], right_size: usize) -> usize {
    const FREE: u32 = u32::MAX;
    let n = adj.len();
    let mut match_left = vec![FREE; n];
    let mut match_right = vec![FREE; right_size];
    let mut dist = vec![0u32; n];
    let mut queue = Vec::with_capacity(n);
    let mut matched = 0;
    loop {
        // BFS layering from free left vertices
        queue.clear();
        let mut found = false;
        for u in 0..n {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push(u as u32);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            for &v in &adj[u] {
                let w = match_right[v as usize];
                if w == FREE {
                    found = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }
        if !found {
            return matched;
        }
        let mut iter = vec![0usize; n];
        for u in 0..n {
            if match_left[u] == FREE && augment(u, adj, &mut match_left, &mut match_right, &mut dist, &mut iter) {
                matched += 1;
            }
        }
    }

    fn augment(
        u: usize,
        adj: &[Vec<u32>],
        match_left: &mut [u32],
        match_right: &mut [u32],
        dist: &mut [u32],
        iter: &mut [usize],
    ) -> bool {
        while iter[u] < adj[u].len() {
            let v = adj[u][iter[u]] as usize;
            iter[u] += 1;
            let w = match_right[v];
            let ok = w == FREE
                || (dist[w as usize] == dist[u] + 1 && augment(w as usize, adj, match_left, match_right, dist, iter));
            if ok {
                match_left[u] = v as u32;
                match_right[v] = u as u32;
                return true;
            }
        }
        dist[u] = u32::MAX;
        false
    }
}

/// Largest finite lifetime among `dim`-points; 0 when there are none.
pub fn max_persistence(d: &PersistenceDiagram, dim: usize) -> f64 {
    d.finite(dim).map(|p| p.persistence()).fold(0.0, f64::max)
}
