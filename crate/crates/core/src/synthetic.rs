// SPDX-License-Identifier: Apache-2.0

//! Seeded road-like test networks.
//!
//! Points are scattered uniformly in a square and joined by their Euclidean
//! minimum spanning tree, then the shortest non-tree links among each
//! vertex's nearest neighbors are added until the edge budget is met. The
//! result is connected, planar-looking and sparse like real road topology
//! files; edges carry unit weight and vertices carry coordinates.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{Edge, RoadNetwork};

const SIDE: f64 = 1000.0;
const NEIGHBORS: usize = 8;

/// Builds a connected network with exactly `vertices` vertices and `edges`
/// edges. External ids are `1..=vertices`.
pub fn road_like_network(vertices: usize, edges: usize, seed: u64) -> Result<RoadNetwork> {
    if vertices == 0 {
        return Err(Error::EmptyNetwork);
    }
    let max_edges = vertices * (vertices - 1) / 2;
    if edges + 1 < vertices || edges > max_edges.min(vertices * NEIGHBORS / 2 + vertices) {
        return Err(Error::InvalidConfig(format!(
            "cannot build a road-like network with {vertices} vertices and {edges} edges"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..vertices)
        .map(|_| (rng.gen_range(0.0..SIDE), rng.gen_range(0.0..SIDE)))
        .collect();
    let d2 = |a: usize, b: usize| {
        let (dx, dy) = (points[a].0 - points[b].0, points[a].1 - points[b].1);
        dx * dx + dy * dy
    };

    // Prim's algorithm on the complete Euclidean graph.
    let mut in_tree = vec![false; vertices];
    let mut best = vec![f64::INFINITY; vertices];
    let mut parent = vec![usize::MAX; vertices];
    let mut pairs: HashSet<(usize, usize)> = HashSet::with_capacity(edges);
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(edges);
    best[0] = 0.0;
    for _ in 0..vertices {
        let u = (0..vertices)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]).then(a.cmp(&b)))
            .expect("vertex left");
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            let key = (parent[u].min(u), parent[u].max(u));
            pairs.insert(key);
            chosen.push(key);
        }
        for v in 0..vertices {
            if !in_tree[v] {
                let d = d2(u, v);
                if d < best[v] {
                    best[v] = d;
                    parent[v] = u;
                }
            }
        }
    }

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for u in 0..vertices {
        let mut near: Vec<(f64, usize)> = (0..vertices)
            .filter(|&v| v != u)
            .map(|v| (d2(u, v), v))
            .collect();
        let take = NEIGHBORS.min(near.len());
        if take < near.len() {
            near.select_nth_unstable_by(take, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        for &(d, v) in &near[..take] {
            if u < v {
                candidates.push((d, u, v));
            } else {
                candidates.push((d, v, u));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, u, v) in candidates {
        if chosen.len() == edges {
            break;
        }
        if pairs.insert((u, v)) {
            chosen.push((u, v));
        }
    }
    if chosen.len() != edges {
        return Err(Error::InvalidConfig(format!(
            "only {} candidate edges available",
            chosen.len()
        )));
    }

    let external_ids: Vec<u64> = (1..=vertices as u64).collect();
    let edge_list = chosen
        .into_iter()
        .map(|(u, v)| Edge { u, v, weight: 1.0 })
        .collect();
    let net = RoadNetwork::new(external_ids.clone(), edge_list)?;
    let coords = external_ids.into_iter().zip(points).collect();
    net.with_coordinates(&coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sizes_and_connected() {
        let net = road_like_network(300, 370, 4).unwrap();
        assert_eq!(net.vertex_count(), 300);
        assert_eq!(net.edge_count(), 370);
        assert!(net.is_connected());
        assert!(net.coords().is_some());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = road_like_network(120, 150, 9).unwrap();
        let b = road_like_network(120, 150, 9).unwrap();
        let c = road_like_network(120, 150, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_impossible_budgets() {
        assert!(road_like_network(10, 5, 0).is_err());
        assert!(road_like_network(10, 46, 0).is_err());
        assert!(road_like_network(0, 0, 0).is_err());
        assert!(road_like_network(1, 0, 0).is_ok());
    }
}
