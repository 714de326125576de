// SPDX-License-Identifier: Apache-2.0

//! Exact shortest-path distances over a road network.
//!
//! Two storage modes answer identically: a full `n x n` matrix, or rows
//! computed lazily per source and memoized. `dist(u, v)` always reads the row
//! of `min(u, v)` so both modes are exactly symmetric.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::io::{Read, Write};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::RoadNetwork;
use crate::{Length, VertexId};

const MATRIX_MAGIC: &[u8; 8] = b"EFGTPDM1";

/// Default memory ceiling for full-matrix mode.
pub const DEFAULT_MATRIX_LIMIT_BYTES: u128 = 4 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMode {
    Full,
    #[default]
    OnDemand,
}

/// Compressed adjacency used by the label-setting search.
#[derive(Debug, Clone)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<Length>,
}

impl Csr {
    fn from_network(net: &RoadNetwork) -> Self {
        let n = net.vertex_count();
        let mut degree = vec![0usize; n];
        for e in net.edges() {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        for e in net.edges() {
            targets[fill[e.u]] = e.v;
            weights[fill[e.u]] = e.weight;
            fill[e.u] += 1;
            targets[fill[e.v]] = e.u;
            weights[fill[e.v]] = e.weight;
            fill[e.v] += 1;
        }
        Self {
            offsets,
            targets,
            weights,
        }
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    fn shortest_from(&self, source: VertexId) -> Vec<Length> {
        let mut dist = vec![Length::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Frontier {
            dist: 0.0,
            vertex: source,
        });
        while let Some(Frontier { dist: d, vertex: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for i in self.offsets[u]..self.offsets[u + 1] {
                let v = self.targets[i];
                let nd = d + self.weights[i];
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Frontier { dist: nd, vertex: v });
                }
            }
        }
        dist
    }
}

#[derive(Debug, Clone, Copy)]
struct Frontier {
    dist: Length,
    vertex: VertexId,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Reversed so the max-heap pops the closest vertex first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Shortest-path lengths from `source` to every vertex.
///
/// Unreachable vertices get `f64::INFINITY`.
pub fn single_source(net: &RoadNetwork, source: VertexId) -> Result<Vec<Length>> {
    net.check_vertex(source)?;
    Ok(Csr::from_network(net).shortest_from(source))
}

enum Store {
    Full(Vec<Length>),
    OnDemand(RwLock<HashMap<VertexId, Arc<[Length]>>>),
}

/// Shortest-path distance lookup.
pub struct DistanceOracle {
    graph: Csr,
    store: Store,
}

impl std::fmt::Debug for DistanceOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DistanceOracle")
            .field("vertices", &self.vertex_count())
            .field("mode", &self.mode())
            .finish()
    }
}

impl DistanceOracle {
    /// Builds an oracle with the default full-matrix memory ceiling.
    pub fn build(
        net: &RoadNetwork,
        mode: OracleMode,
        required_sources: Option<&[VertexId]>,
    ) -> Result<Self> {
        Self::build_with_limit(net, mode, required_sources, DEFAULT_MATRIX_LIMIT_BYTES)
    }

    pub fn build_with_limit(
        net: &RoadNetwork,
        mode: OracleMode,
        required_sources: Option<&[VertexId]>,
        limit_bytes: u128,
    ) -> Result<Self> {
        if net.vertex_count() == 0 {
            return Err(Error::EmptyNetwork);
        }
        if !net.is_connected() {
            return Err(Error::Disconnected);
        }
        if let Some(req) = required_sources {
            for &s in req {
                net.check_vertex(s)?;
            }
        }
        let graph = Csr::from_network(net);
        let n = graph.len();
        let store = match mode {
            OracleMode::Full => {
                let required_bytes = (n as u128) * (n as u128) * 8;
                if required_bytes > limit_bytes {
                    return Err(Error::MatrixCapacity {
                        required_bytes,
                        limit_bytes,
                    });
                }
                let mut matrix = vec![0.0; n * n];
                matrix
                    .par_chunks_mut(n)
                    .enumerate()
                    .for_each(|(s, row)| row.copy_from_slice(&graph.shortest_from(s)));
                // Entry (u, v) with u < v comes from row u; mirror it.
                for u in 0..n {
                    for v in (u + 1)..n {
                        matrix[v * n + u] = matrix[u * n + v];
                    }
                }
                Store::Full(matrix)
            }
            OracleMode::OnDemand => {
                let rows: HashMap<VertexId, Arc<[Length]>> = match required_sources {
                    Some(req) => {
                        let mut uniq = req.to_vec();
                        uniq.sort_unstable();
                        uniq.dedup();
                        uniq.par_iter()
                            .map(|&s| (s, Arc::from(graph.shortest_from(s))))
                            .collect()
                    }
                    None => HashMap::new(),
                };
                Store::OnDemand(RwLock::new(rows))
            }
        };
        Ok(Self { graph, store })
    }

    pub fn mode(&self) -> OracleMode {
        match self.store {
            Store::Full(_) => OracleMode::Full,
            Store::OnDemand(_) => OracleMode::OnDemand,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.len()
    }

    /// Number of memoized rows (on-demand) or `n` (full).
    pub fn cached_rows(&self) -> usize {
        match &self.store {
            Store::Full(_) => self.vertex_count(),
            Store::OnDemand(rows) => rows.read().expect("oracle lock").len(),
        }
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    fn row(&self, source: VertexId) -> Arc<[Length]> {
        match &self.store {
            Store::Full(m) => {
                let n = self.vertex_count();
                Arc::from(&m[source * n..(source + 1) * n])
            }
            Store::OnDemand(rows) => {
                if let Some(r) = rows.read().expect("oracle lock").get(&source) {
                    return Arc::clone(r);
                }
                let fresh: Arc<[Length]> = Arc::from(self.graph.shortest_from(source));
                let mut guard = rows.write().expect("oracle lock");
                Arc::clone(guard.entry(source).or_insert(fresh))
            }
        }
    }

    /// Exact shortest-path length between `u` and `v`.
    pub fn dist(&self, u: VertexId, v: VertexId) -> Result<Length> {
        self.check(u)?;
        self.check(v)?;
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        Ok(match &self.store {
            Store::Full(m) => m[a * self.vertex_count() + b],
            Store::OnDemand(_) => self.row(a)[b],
        })
    }

    /// Distances from `u` to each vertex of `targets`, in order.
    pub fn dist_many(&self, u: VertexId, targets: &[VertexId]) -> Result<Vec<Length>> {
        self.check(u)?;
        for &t in targets {
            self.check(t)?;
        }
        let n = self.vertex_count();
        match &self.store {
            Store::Full(m) => Ok(targets
                .iter()
                .map(|&t| {
                    let (a, b) = if u <= t { (u, t) } else { (t, u) };
                    m[a * n + b]
                })
                .collect()),
            Store::OnDemand(_) => {
                let own = self.row(u);
                targets
                    .iter()
                    .map(|&t| {
                        if u <= t {
                            Ok(own[t])
                        } else {
                            Ok(self.row(t)[u])
                        }
                    })
                    .collect()
            }
        }
    }

    /// Freshly computed (not memoized) distance vector from `source`.
    pub fn compute_row(&self, source: VertexId) -> Result<Vec<Length>> {
        self.check(source)?;
        Ok(self.graph.shortest_from(source))
    }

    /// Memoized row for `source`, computing and caching it if absent.
    pub fn cached_row(&self, source: VertexId) -> Result<Vec<Length>> {
        self.check(source)?;
        Ok(self.row(source).to_vec())
    }

    /// Symmetric row-major matrix of all distances.
    pub fn to_matrix(&self) -> Vec<Length> {
        match &self.store {
            Store::Full(m) => m.clone(),
            Store::OnDemand(_) => {
                let n = self.vertex_count();
                let mut m = vec![0.0; n * n];
                for u in 0..n {
                    let row = self.row(u);
                    for v in u..n {
                        m[u * n + v] = row[v];
                        m[v * n + u] = row[v];
                    }
                }
                m
            }
        }
    }

    /// Writes the matrix cache file: magic, `n` as u64 LE, then `n^2` f64 LE.
    pub fn write_matrix<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.vertex_count();
        out.write_all(MATRIX_MAGIC)?;
        out.write_all(&(n as u64).to_le_bytes())?;
        let m = self.to_matrix();
        let mut buf = Vec::with_capacity(n * 8);
        for row in m.chunks(n) {
            buf.clear();
            for x in row {
                buf.extend_from_slice(&x.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Loads a full-matrix oracle from a cache file written for `net`.
    pub fn read_matrix<R: Read>(net: &RoadNetwork, mut input: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != MATRIX_MAGIC {
            return Err(Error::BadMatrixFile("wrong magic".into()));
        }
        let mut len = [0u8; 8];
        input.read_exact(&mut len)?;
        let n = u64::from_le_bytes(len) as usize;
        if n != net.vertex_count() {
            return Err(Error::BadMatrixFile(format!(
                "matrix is for {n} vertices, network has {}",
                net.vertex_count()
            )));
        }
        let mut bytes = vec![0u8; n * n * 8];
        input.read_exact(&mut bytes)?;
        let matrix = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Ok(Self {
            graph: Csr::from_network(net),
            store: Store::Full(matrix),
        })
    }
}
