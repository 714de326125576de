// SPDX-License-Identifier: Apache-2.0

//! Static R-tree over POI coordinates.
//!
//! Trees are packed with sort-tile-recursive bulk loading and answer
//! best-first nearest-neighbor and group-nearest-neighbor (sum of distances)
//! queries under the Euclidean metric. Ties go to the smaller vertex id.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{Error, Result};
use crate::VertexId;

pub const DEFAULT_FANOUT: usize = 16;
pub const DEFAULT_MIN_FILL: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn point(x: f64, y: f64) -> Self {
        Self {
            min_x: x,
            min_y: y,
            max_x: x,
            max_y: y,
        }
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            min_x: self.min_x.min(other.min_x),
            min_y: self.min_y.min(other.min_y),
            max_x: self.max_x.max(other.max_x),
            max_y: self.max_y.max(other.max_y),
        }
    }

    pub fn contains(&self, other: &Rect) -> bool {
        self.min_x <= other.min_x
            && self.min_y <= other.min_y
            && self.max_x >= other.max_x
            && self.max_y >= other.max_y
    }

    fn center(&self) -> (f64, f64) {
        (
            self.min_x / 2.0 + self.max_x / 2.0,
            self.min_y / 2.0 + self.max_y / 2.0,
        )
    }

    /// Smallest Euclidean distance from `(x, y)` to any point of the rectangle.
    pub fn min_dist(&self, x: f64, y: f64) -> f64 {
        let dx = (self.min_x - x).max(0.0).max(x - self.max_x);
        let dy = (self.min_y - y).max(0.0).max(y - self.max_y);
        (dx * dx + dy * dy).sqrt()
    }
}

/// Euclidean distance between two points.
pub fn euclidean(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let dx = ax - bx;
    let dy = ay - by;
    (dx * dx + dy * dy).sqrt()
}

/// Sum of distances from `(x, y)` to every query point, in order.
pub fn aggregate_distance(x: f64, y: f64, points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .fold(0.0, |acc, &(px, py)| acc + euclidean(x, y, px, py))
}

/// Lower bound on [`aggregate_distance`] for any point inside `rect`.
pub fn aggregate_lower_bound(rect: &Rect, points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .fold(0.0, |acc, &(px, py)| acc + rect.min_dist(px, py))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub id: VertexId,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone)]
enum Children {
    Entries(Vec<usize>),
    Nodes(Vec<usize>),
}

#[derive(Debug, Clone)]
struct Node {
    rect: Rect,
    children: Children,
}

#[derive(Debug, Clone)]
pub struct RTree {
    entries: Vec<Entry>,
    nodes: Vec<Node>,
    root: usize,
    height: usize,
    fanout: usize,
    min_fill: usize,
}

/// Splits `count` items into `parts` groups whose sizes differ by at most one.
fn balanced(count: usize, parts: usize) -> Vec<usize> {
    (0..parts)
        .map(|i| count / parts + usize::from(i < count % parts))
        .collect()
}

/// One STR packing pass: groups `items` (rect, payload) into nodes of at most
/// `fanout` children with balanced sizes.
fn pack_level(mut items: Vec<(Rect, usize)>, fanout: usize) -> Vec<Vec<(Rect, usize)>> {
    let n = items.len();
    let node_count = n.div_ceil(fanout);
    let slice_count = (node_count as f64).sqrt().ceil() as usize;
    let node_sizes = balanced(n, node_count);
    let nodes_per_slice = balanced(node_count, slice_count);

    let by_axis = |axis: usize| {
        move |a: &(Rect, usize), b: &(Rect, usize)| -> Ordering {
            let (ca, cb) = (a.0.center(), b.0.center());
            let (ka, kb) = if axis == 0 { (ca.0, cb.0) } else { (ca.1, cb.1) };
            ka.total_cmp(&kb).then(a.1.cmp(&b.1))
        }
    };
    items.sort_by(by_axis(0));

    let mut groups = Vec::with_capacity(node_count);
    let mut rest = items.as_mut_slice();
    let mut node_iter = node_sizes.iter();
    for &slice_nodes in &nodes_per_slice {
        let sizes: Vec<usize> = node_iter.by_ref().take(slice_nodes).copied().collect();
        let slice_len: usize = sizes.iter().sum();
        let (slice, tail) = rest.split_at_mut(slice_len);
        rest = tail;
        slice.sort_by(by_axis(1));
        let mut offset = 0;
        for s in sizes {
            groups.push(slice[offset..offset + s].to_vec());
            offset += s;
        }
    }
    groups
}

impl RTree {
    /// Packs the tree with the default minimum fill.
    pub fn bulk_load(entries: &[(VertexId, f64, f64)], fanout: usize) -> Result<Self> {
        Self::bulk_load_with(entries, fanout, DEFAULT_MIN_FILL.min(fanout / 2).max(1))
    }

    pub fn bulk_load_with(
        entries: &[(VertexId, f64, f64)],
        fanout: usize,
        min_fill: usize,
    ) -> Result<Self> {
        if fanout < 2 || min_fill == 0 || min_fill > fanout / 2 {
            return Err(Error::InvalidFanout { fanout, min_fill });
        }
        if entries.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for &(id, _, _) in entries {
            if !seen.insert(id) {
                return Err(Error::DuplicateEntry(id));
            }
        }
        let entries: Vec<Entry> = entries
            .iter()
            .map(|&(id, x, y)| Entry { id, x, y })
            .collect();

        let mut nodes: Vec<Node> = Vec::new();
        let leaf_items: Vec<(Rect, usize)> = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (Rect::point(e.x, e.y), i))
            .collect();
        let mut level: Vec<usize> = Vec::new();
        for group in pack_level(leaf_items, fanout) {
            level.push(nodes.len());
            nodes.push(Node {
                rect: bounding(&group),
                children: Children::Entries(group.iter().map(|g| g.1).collect()),
            });
        }
        let mut height = 1;
        while level.len() > 1 {
            let items = level.iter().map(|&i| (nodes[i].rect, i)).collect();
            let mut next = Vec::new();
            for group in pack_level(items, fanout) {
                next.push(nodes.len());
                nodes.push(Node {
                    rect: bounding(&group),
                    children: Children::Nodes(group.iter().map(|g| g.1).collect()),
                });
            }
            level = next;
            height += 1;
        }
        Ok(Self {
            entries,
            root: level[0],
            nodes,
            height,
            fanout,
            min_fill,
        })
    }

    /// Number of node levels; a single leaf has height 1.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root_rect(&self) -> Rect {
        self.nodes[self.root].rect
    }

    /// Checks containment, fill factors, uniform leaf depth and that every
    /// entry sits in exactly one leaf.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let mut hits = vec![0usize; self.entries.len()];
        let mut stack = vec![(self.root, 1usize)];
        while let Some((idx, depth)) = stack.pop() {
            let node = &self.nodes[idx];
            let count = match &node.children {
                Children::Entries(es) => es.len(),
                Children::Nodes(ns) => ns.len(),
            };
            let lower = if idx == self.root { 1 } else { self.min_fill };
            if count < lower || count > self.fanout {
                return Err(format!("node {idx} holds {count} children"));
            }
            match &node.children {
                Children::Entries(es) => {
                    if depth != self.height {
                        return Err(format!("leaf {idx} at depth {depth}"));
                    }
                    for &e in es {
                        let ent = self.entries[e];
                        if !node.rect.contains(&Rect::point(ent.x, ent.y)) {
                            return Err(format!("entry {} escapes leaf {idx}", ent.id));
                        }
                        hits[e] += 1;
                    }
                }
                Children::Nodes(ns) => {
                    for &c in ns {
                        if !node.rect.contains(&self.nodes[c].rect) {
                            return Err(format!("node {c} escapes parent {idx}"));
                        }
                        stack.push((c, depth + 1));
                    }
                }
            }
        }
        if let Some(e) = hits.iter().position(|&h| h != 1) {
            return Err(format!(
                "entry {} appears {} times",
                self.entries[e].id, hits[e]
            ));
        }
        Ok(())
    }

    /// Every node's rectangle with the entries stored beneath it.
    pub fn subtrees(&self) -> Vec<(Rect, Vec<Entry>)> {
        (0..self.nodes.len())
            .map(|i| {
                let mut below = Vec::new();
                let mut stack = vec![i];
                while let Some(n) = stack.pop() {
                    match &self.nodes[n].children {
                        Children::Entries(es) => below.extend(es.iter().map(|&e| self.entries[e])),
                        Children::Nodes(ns) => stack.extend(ns),
                    }
                }
                (self.nodes[i].rect, below)
            })
            .collect()
    }

    /// Nearest entry to `(x, y)`.
    pub fn euclidean_nn(&self, x: f64, y: f64) -> Result<VertexId> {
        Ok(self.nearest_by(|r| r.min_dist(x, y), |e| euclidean(e.x, e.y, x, y))?.0)
    }

    /// Entry minimizing the summed distance to `points`.
    pub fn euclidean_gnn(&self, points: &[(f64, f64)]) -> Result<VertexId> {
        if points.is_empty() {
            return Err(Error::EmptyQueryPoints);
        }
        Ok(self
            .nearest_by(
                |r| aggregate_lower_bound(r, points),
                |e| aggregate_distance(e.x, e.y, points),
            )?
            .0)
    }

    /// Like [`RTree::euclidean_gnn`], also returning how many nodes were expanded.
    pub fn euclidean_gnn_counted(&self, points: &[(f64, f64)]) -> Result<(VertexId, usize)> {
        if points.is_empty() {
            return Err(Error::EmptyQueryPoints);
        }
        self.nearest_by(
            |r| aggregate_lower_bound(r, points),
            |e| aggregate_distance(e.x, e.y, points),
        )
    }

    /// Best-first search with an admissible rectangle bound. Nodes whose bound
    /// exceeds the incumbent are never expanded.
    fn nearest_by(
        &self,
        bound: impl Fn(&Rect) -> f64,
        cost: impl Fn(&Entry) -> f64,
    ) -> Result<(VertexId, usize)> {
        if self.entries.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let mut heap = BinaryHeap::new();
        heap.push(Pending {
            bound: bound(&self.nodes[self.root].rect),
            node: self.root,
        });
        let mut best: Option<(f64, VertexId)> = None;
        let mut expanded = 0;
        while let Some(Pending { bound: lb, node }) = heap.pop() {
            if let Some((d, _)) = best {
                if lb > d {
                    break;
                }
            }
            expanded += 1;
            match &self.nodes[node].children {
                Children::Entries(es) => {
                    for &e in es {
                        let ent = &self.entries[e];
                        let c = cost(ent);
                        let wins = match best {
                            None => true,
                            Some((d, id)) => c < d || (c == d && ent.id < id),
                        };
                        if wins {
                            best = Some((c, ent.id));
                        }
                    }
                }
                Children::Nodes(ns) => {
                    for &child in ns {
                        let b = bound(&self.nodes[child].rect);
                        if best.is_none_or(|(d, _)| b <= d) {
                            heap.push(Pending {
                                bound: b,
                                node: child,
                            });
                        }
                    }
                }
            }
        }
        let (_, id) = best.expect("nonempty tree yields a result");
        Ok((id, expanded))
    }
}

fn bounding(group: &[(Rect, usize)]) -> Rect {
    group[1..]
        .iter()
        .fold(group[0].0, |acc, (r, _)| acc.union(r))
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    bound: f64,
    node: usize,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.node.cmp(&self.node))
    }
}
