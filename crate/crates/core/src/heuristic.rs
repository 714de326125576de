// SPDX-License-Identifier: Apache-2.0

//! Greedy route construction from group and single nearest-neighbor queries.
//!
//! The first POI is the group nearest neighbor of the sources, each middle POI
//! is the nearest neighbor of its predecessor, and the last POI is the group
//! nearest neighbor of the destinations. The route is then scored with the
//! same evaluation as the exact solver; the envy bound is reported, not
//! enforced.

use crate::error::{Error, Result};
use crate::exact::{evaluate_route, EvaluatedRoute};
use crate::network::{CategoryAssignment, RoadNetwork};
use crate::oracle::DistanceOracle;
use crate::query::{EfGtpQuery, PoiCombination};
use crate::rtree::RTree;
use crate::{Length, VertexId};

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicResult {
    pub route: EvaluatedRoute,
    pub gnn_queries: usize,
    pub nn_queries: usize,
}

/// Candidate minimizing the summed network distance to `points`.
pub fn group_nearest_neighbor(
    points: &[VertexId],
    candidates: &[VertexId],
    oracle: &DistanceOracle,
) -> Result<VertexId> {
    let mut best: Option<(Length, VertexId)> = None;
    for &c in candidates {
        let mut sum = 0.0;
        for &p in points {
            sum += oracle.dist(p, c)?;
        }
        if best.is_none_or(|(d, id)| sum < d || (sum == d && c < id)) {
            best = Some((sum, c));
        }
    }
    best.map(|(_, id)| id).ok_or(Error::EmptyCandidates)
}

/// Candidate closest to `point` in network distance.
pub fn nearest_neighbor(
    point: VertexId,
    candidates: &[VertexId],
    oracle: &DistanceOracle,
) -> Result<VertexId> {
    let mut best: Option<(Length, VertexId)> = None;
    for &c in candidates {
        let d = oracle.dist(point, c)?;
        if best.is_none_or(|(bd, id)| d < bd || (d == bd && c < id)) {
            best = Some((d, c));
        }
    }
    best.map(|(_, id)| id).ok_or(Error::EmptyCandidates)
}

/// Answers the NN/GNN steps of the heuristic.
trait NeighborSource {
    fn gnn(&self, category: usize, points: &[VertexId]) -> Result<VertexId>;
    fn nn(&self, category: usize, point: VertexId) -> Result<VertexId>;
}

struct NetworkNeighbors<'a> {
    categories: &'a CategoryAssignment,
    oracle: &'a DistanceOracle,
}

impl NeighborSource for NetworkNeighbors<'_> {
    fn gnn(&self, category: usize, points: &[VertexId]) -> Result<VertexId> {
        group_nearest_neighbor(points, self.categories.category(category), self.oracle)
    }

    fn nn(&self, category: usize, point: VertexId) -> Result<VertexId> {
        nearest_neighbor(point, self.categories.category(category), self.oracle)
    }
}

/// One Euclidean R-tree per category, plus the coordinates of every vertex.
#[derive(Debug, Clone)]
pub struct CategoryIndex {
    trees: Vec<RTree>,
    coords: Vec<(f64, f64)>,
}

impl CategoryIndex {
    pub fn build(net: &RoadNetwork, categories: &CategoryAssignment, fanout: usize) -> Result<Self> {
        let coords = match net.coords() {
            Some(c) => c.to_vec(),
            None => {
                let ext = net.external_ids().first().copied().unwrap_or(0);
                return Err(Error::MissingCoordinates(ext));
            }
        };
        let trees = categories
            .categories()
            .iter()
            .map(|cat| {
                let entries: Vec<_> = cat
                    .iter()
                    .map(|&v| (v, coords[v].0, coords[v].1))
                    .collect();
                RTree::bulk_load(&entries, fanout)
            })
            .collect::<Result<_>>()?;
        Ok(Self { trees, coords })
    }

    pub fn tree(&self, category: usize) -> &RTree {
        &self.trees[category]
    }

    fn coord(&self, v: VertexId) -> Result<(f64, f64)> {
        self.coords.get(v).copied().ok_or(Error::InvalidVertex(v))
    }
}

impl NeighborSource for CategoryIndex {
    fn gnn(&self, category: usize, points: &[VertexId]) -> Result<VertexId> {
        let pts = points
            .iter()
            .map(|&p| self.coord(p))
            .collect::<Result<Vec<_>>>()?;
        self.trees[category].euclidean_gnn(&pts)
    }

    fn nn(&self, category: usize, point: VertexId) -> Result<VertexId> {
        let (x, y) = self.coord(point)?;
        self.trees[category].euclidean_nn(x, y)
    }
}

fn build_route(
    query: &EfGtpQuery,
    oracle: &DistanceOracle,
    neighbors: &dyn NeighborSource,
) -> Result<HeuristicResult> {
    let k = query.k();
    let group = query.group();
    let mut pois = Vec::with_capacity(k);
    let (gnn_queries, nn_queries) = if k == 1 {
        let joint: Vec<VertexId> = group
            .sources()
            .iter()
            .chain(group.destinations())
            .copied()
            .collect();
        pois.push(neighbors.gnn(0, &joint)?);
        (1, 0)
    } else {
        pois.push(neighbors.gnn(0, group.sources())?);
        for i in 1..k - 1 {
            let prev = pois[i - 1];
            pois.push(neighbors.nn(i, prev)?);
        }
        pois.push(neighbors.gnn(k - 1, group.destinations())?);
        (2, k - 2)
    };
    let route = evaluate_route(query, &PoiCombination::new(pois), oracle)?;
    Ok(HeuristicResult {
        route,
        gnn_queries,
        nn_queries,
    })
}

/// Heuristic route using network distances for every NN/GNN step.
pub fn solve_heuristic(query: &EfGtpQuery, oracle: &DistanceOracle) -> Result<HeuristicResult> {
    build_route(
        query,
        oracle,
        &NetworkNeighbors {
            categories: query.categories(),
            oracle,
        },
    )
}

/// Heuristic route whose NN/GNN steps use Euclidean R-tree searches. The
/// resulting route is still scored with network distances.
pub fn solve_heuristic_indexed(
    query: &EfGtpQuery,
    oracle: &DistanceOracle,
    index: &CategoryIndex,
) -> Result<HeuristicResult> {
    if index.trees.len() != query.k() {
        return Err(Error::InvalidCombination);
    }
    build_route(query, oracle, index)
}
