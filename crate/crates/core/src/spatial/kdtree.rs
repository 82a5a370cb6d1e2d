//! Static 2-d kd-tree with exact k-nearest-neighbor queries.
//!
//! Candidates are ranked by the pair `(squared distance, original index)`, so
//! equidistant points resolve to the lower index, and results agree exactly
//! with an exhaustive scan that uses the same key. Every node also records the
//! smallest original index it contains, which lets predecessor-constrained
//! queries (only indices `< limit`) skip whole subtrees.

use alloc::vec::Vec;
use core::cmp::Ordering;

use super::Location;

const LEAF_SIZE: usize = 8;
const NO_CHILD: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    lo: [f64; 2],
    hi: [f64; 2],
    start: u32,
    end: u32,
    min_index: usize,
    left: u32,
    right: u32,
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.left == NO_CHILD
    }

    /// Lower bound on the squared distance from `q` to any point in the box.
    fn min_dist2(&self, q: Location) -> f64 {
        let dx = if q.x < self.lo[0] {
            self.lo[0] - q.x
        } else if q.x > self.hi[0] {
            q.x - self.hi[0]
        } else {
            0.0
        };
        let dy = if q.y < self.lo[1] {
            self.lo[1] - q.y
        } else if q.y > self.hi[1] {
            q.y - self.hi[1]
        } else {
            0.0
        };
        dx * dx + dy * dy
    }
}

/// A kd-tree over a fixed point set. Immutable after construction.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Location>,
    perm: Vec<usize>,
    nodes: Vec<Node>,
}

/// Bounded candidate list kept sorted by `(d2, index)`.
struct Best {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl Best {
    fn with_capacity(k: usize) -> Self {
        Best {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn is_full(&self) -> bool {
        self.items.len() == self.k
    }

    fn worst_d2(&self) -> f64 {
        self.items.last().map_or(f64::INFINITY, |c| c.0)
    }

    fn offer(&mut self, d2: f64, index: usize) {
        if self.is_full() {
            let (wd, wi) = self.items[self.k - 1];
            if key_cmp((d2, index), (wd, wi)) != Ordering::Less {
                return;
            }
            self.items.pop();
        }
        let pos = self
            .items
            .partition_point(|&c| key_cmp(c, (d2, index)) == Ordering::Less);
        self.items.insert(pos, (d2, index));
    }
}

fn key_cmp(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

impl KdTree {
    pub fn new(points: &[Location]) -> Self {
        let mut tree = KdTree {
            points: points.to_vec(),
            perm: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            tree.build(0, points.len());
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Location] {
        &self.points
    }

    fn build(&mut self, start: usize, end: usize) -> u32 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut min_index = usize::MAX;
        for &i in &self.perm[start..end] {
            let p = self.points[i];
            lo[0] = lo[0].min(p.x);
            lo[1] = lo[1].min(p.y);
            hi[0] = hi[0].max(p.x);
            hi[1] = hi[1].max(p.y);
            min_index = min_index.min(i);
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            lo,
            hi,
            start: start as u32,
            end: end as u32,
            min_index,
            left: NO_CHILD,
            right: NO_CHILD,
        });
        if end - start > LEAF_SIZE {
            let axis = usize::from(hi[1] - lo[1] > hi[0] - lo[0]);
            let mid = start + (end - start) / 2;
            let points = &self.points;
            let coord = |i: usize| if axis == 0 { points[i].x } else { points[i].y };
            self.perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                coord(a).total_cmp(&coord(b)).then(a.cmp(&b))
            });
            let left = self.build(start, mid);
            let right = self.build(mid, end);
            let node = &mut self.nodes[id as usize];
            node.left = left;
            node.right = right;
        }
        id
    }

    /// The `k` nearest points to `query` among original indices `< limit`,
    /// ascending by `(distance, index)`, as `(index, squared distance)`.
    pub fn nearest_below(&self, query: Location, k: usize, limit: usize) -> Vec<(usize, f64)> {
        let mut best = Best::with_capacity(k);
        if k > 0 && !self.nodes.is_empty() {
            self.search(0, query, limit, &mut best);
        }
        best.items.into_iter().map(|(d2, i)| (i, d2)).collect()
    }

    /// The `k` nearest points to `query`, ascending by `(distance, index)`,
    /// as `(index, squared distance)`.
    pub fn nearest(&self, query: Location, k: usize) -> Vec<(usize, f64)> {
        self.nearest_below(query, k, usize::MAX)
    }

    fn search(&self, id: u32, q: Location, limit: usize, best: &mut Best) {
        let node = &self.nodes[id as usize];
        if node.min_index >= limit {
            return;
        }
        if node.is_leaf() {
            for &i in &self.perm[node.start as usize..node.end as usize] {
                if i < limit {
                    best.offer(q.dist2(self.points[i]), i);
                }
            }
            return;
        }
        let (a, b) = (node.left, node.right);
        let da = self.nodes[a as usize].min_dist2(q);
        let db = self.nodes[b as usize].min_dist2(q);
        let order = if db < da { [(b, db), (a, da)] } else { [(a, da), (b, db)] };
        for (child, lb) in order {
            // Equality must still be visited: a tied point may have a lower index.
            if best.is_full() && lb > best.worst_d2() {
                continue;
            }
            self.search(child, q, limit, best);
        }
    }
}
