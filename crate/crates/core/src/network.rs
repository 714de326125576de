// SPDX-License-Identifier: Apache-2.0

//! Road network loading, validation and labelling.
//!
//! Vertices carry dense 0-based internal ids assigned in first-appearance
//! order; the original dataset ids are kept alongside for reporting and for
//! resolving coordinates, category files and queries.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::{Length, VertexId};

/// Undirected weighted edge between two internal vertex ids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Length,
}

/// Weighted undirected road graph.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    vertex_count: usize,
    edges: Vec<Edge>,
    coords: Option<Vec<(f64, f64)>>,
    external_ids: Vec<u64>,
    by_external: HashMap<u64, VertexId>,
}

impl RoadNetwork {
    /// Builds a network from already-densified parts.
    ///
    /// Self-loops are dropped and parallel edges collapse to the minimum weight.
    pub fn new(external_ids: Vec<u64>, edges: Vec<Edge>) -> Result<Self> {
        let vertex_count = external_ids.len();
        let mut by_external = HashMap::with_capacity(vertex_count);
        for (i, &ext) in external_ids.iter().enumerate() {
            if by_external.insert(ext, i).is_some() {
                return Err(Error::DuplicateEntry(i));
            }
        }
        let mut slot: HashMap<(VertexId, VertexId), usize> = HashMap::new();
        let mut kept: Vec<Edge> = Vec::with_capacity(edges.len());
        for e in edges {
            if e.u >= vertex_count {
                return Err(Error::InvalidVertex(e.u));
            }
            if e.v >= vertex_count {
                return Err(Error::InvalidVertex(e.v));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(Error::NonPositiveWeight {
                    line: 0,
                    weight: e.weight,
                });
            }
            if e.u == e.v {
                continue;
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            match slot.get(&key) {
                Some(&i) => {
                    if e.weight < kept[i].weight {
                        kept[i].weight = e.weight;
                    }
                }
                None => {
                    slot.insert(key, kept.len());
                    kept.push(e);
                }
            }
        }
        Ok(Self {
            vertex_count,
            edges: kept,
            coords: None,
            external_ids,
            by_external,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn coord(&self, v: VertexId) -> Option<(f64, f64)> {
        self.coords.as_ref().and_then(|c| c.get(v).copied())
    }

    pub fn external_ids(&self) -> &[u64] {
        &self.external_ids
    }

    pub fn external_id(&self, v: VertexId) -> Result<u64> {
        self.external_ids
            .get(v)
            .copied()
            .ok_or(Error::InvalidVertex(v))
    }

    pub fn internal_id(&self, external: u64) -> Result<VertexId> {
        self.by_external
            .get(&external)
            .copied()
            .ok_or(Error::UnknownExternalId(external))
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Adjacency lists, one `(neighbor, weight)` list per vertex.
    pub fn adjacency(&self) -> Vec<Vec<(VertexId, Length)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        adj
    }

    /// Connected components as lists of internal ids, each sorted ascending.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertex_count];
        let mut out = Vec::new();
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count > 0 && self.components().len() == 1
    }

    /// Attaches planar coordinates keyed by external id. Every vertex needs one.
    pub fn with_coordinates(mut self, coords: &HashMap<u64, (f64, f64)>) -> Result<Self> {
        let mut out = Vec::with_capacity(self.vertex_count);
        for &ext in &self.external_ids {
            let c = coords.get(&ext).ok_or(Error::MissingCoordinates(ext))?;
            out.push(*c);
        }
        self.coords = Some(out);
        Ok(self)
    }

    /// Replaces every edge weight with the Euclidean length between its endpoints.
    pub fn with_euclidean_weights(mut self) -> Result<Self> {
        let coords = match &self.coords {
            Some(c) => c,
            None => {
                let ext = self.external_ids.first().copied().unwrap_or(0);
                return Err(Error::MissingCoordinates(ext));
            }
        };
        for e in &mut self.edges {
            let (ax, ay) = coords[e.u];
            let (bx, by) = coords[e.v];
            let w = ((ax - bx) * (ax - bx) + (ay - by) * (ay - by)).sqrt();
            if !(w > 0.0) {
                return Err(Error::NonPositiveWeight { line: 0, weight: w });
            }
            e.weight = w;
        }
        Ok(self)
    }

    /// Serializes as a weighted `u v w` edge list using external ids.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{} {} {}",
                self.external_ids[e.u], self.external_ids[e.v], e.weight
            );
        }
        out
    }
}

/// Parses a line-oriented edge list (`u v` or `u v w`, `%`/`#` comments).
///
/// MatrixMarket coordinate files are accepted: the banner is a comment and the
/// first data line after it (the size line) is skipped. With `weighted` off
/// every edge gets unit length; with it on the third column is required.
pub fn parse_edge_list(text: &str, weighted: bool) -> Result<RoadNetwork> {
    let mut external_ids: Vec<u64> = Vec::new();
    let mut dense: HashMap<u64, VertexId> = HashMap::new();
    let mut edges = Vec::new();
    let mut matrix_market = false;
    let mut skip_size_line = false;

    let mut intern = |ext: u64, ids: &mut Vec<u64>| -> VertexId {
        *dense.entry(ext).or_insert_with(|| {
            ids.push(ext);
            ids.len() - 1
        })
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('%') || line.starts_with('#') {
            if !matrix_market && line.to_ascii_lowercase().starts_with("%%matrixmarket") {
                matrix_market = true;
                skip_size_line = true;
            }
            continue;
        }
        if skip_size_line {
            skip_size_line = false;
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::parse(
                line_no,
                format!("expected `u v` or `u v w`, got {} fields", fields.len()),
            ));
        }
        let u: u64 = fields[0]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad vertex id `{}`", fields[0])))?;
        let v: u64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad vertex id `{}`", fields[1])))?;
        let weight = if weighted {
            let raw_w = fields
                .get(2)
                .ok_or_else(|| Error::parse(line_no, "missing edge weight"))?;
            let w: f64 = raw_w
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad weight `{raw_w}`")))?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NonPositiveWeight {
                    line: line_no,
                    weight: w,
                });
            }
            w
        } else {
            1.0
        };
        let ui = intern(u, &mut external_ids);
        let vi = intern(v, &mut external_ids);
        edges.push(Edge {
            u: ui,
            v: vi,
            weight,
        });
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    RoadNetwork::new(external_ids, edges)
}

/// Serializes coordinates as `id x y` lines, or `None` without coordinates.
pub fn coordinates_to_string(net: &RoadNetwork) -> Option<String> {
    let coords = net.coords()?;
    let mut out = String::new();
    for (ext, (x, y)) in net.external_ids().iter().zip(coords) {
        let _ = writeln!(out, "{ext} {x} {y}");
    }
    Some(out)
}

/// Loads a dataset file, optional coordinates, and restricts it to the
/// largest connected component.
pub fn read_network(
    graph: &Path,
    coords: Option<&Path>,
    weighted: bool,
    euclidean_weights: bool,
) -> Result<RoadNetwork> {
    let text = std::fs::read_to_string(graph)?;
    let mut net = parse_edge_list(&text, weighted)?;
    if let Some(path) = coords {
        let table = parse_coordinates(&std::fs::read_to_string(path)?)?;
        net = net.with_coordinates(&table)?;
    }
    let before = net.vertex_count();
    let net = largest_connected_component(&net)?;
    if net.vertex_count() != before {
        log::info!(
            "kept largest component: {} of {} vertices",
            net.vertex_count(),
            before
        );
    }
    if euclidean_weights {
        net.with_euclidean_weights()
    } else {
        Ok(net)
    }
}

/// Parses a coordinates file of `id x y` lines.
pub fn parse_coordinates(text: &str) -> Result<HashMap<u64, (f64, f64)>> {
    let mut out = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(line_no, "expected `id x y`"));
        }
        let id: u64 = fields[0]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad vertex id `{}`", fields[0])))?;
        let x: f64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad coordinate `{}`", fields[1])))?;
        let y: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad coordinate `{}`", fields[2])))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::parse(line_no, "coordinates must be finite"));
        }
        out.insert(id, (x, y));
    }
    Ok(out)
}

/// Returns the induced subgraph on the largest connected component.
///
/// Ties go to the component holding the smallest external id. Internal ids are
/// re-densified in their original relative order.
pub fn largest_connected_component(net: &RoadNetwork) -> Result<RoadNetwork> {
    if net.vertex_count == 0 {
        return Err(Error::EmptyNetwork);
    }
    let comps = net.components();
    if comps.len() == 1 {
        return Ok(net.clone());
    }
    let best = comps
        .iter()
        .max_by(|a, b| {
            let min_a = a.iter().map(|&v| net.external_ids[v]).min();
            let min_b = b.iter().map(|&v| net.external_ids[v]).min();
            a.len().cmp(&b.len()).then(min_b.cmp(&min_a))
        })
        .expect("at least one component");

    let mut remap = vec![usize::MAX; net.vertex_count];
    for (new, &old) in best.iter().enumerate() {
        remap[old] = new;
    }
    let external_ids = best.iter().map(|&v| net.external_ids[v]).collect();
    let edges = net
        .edges
        .iter()
        .filter(|e| remap[e.u] != usize::MAX)
        .map(|e| Edge {
            u: remap[e.u],
            v: remap[e.v],
            weight: e.weight,
        })
        .collect();
    let mut sub = RoadNetwork::new(external_ids, edges)?;
    if let Some(coords) = &net.coords {
        sub.coords = Some(best.iter().map(|&v| coords[v]).collect());
    }
    Ok(sub)
}

/// Ordered POI categories; the list order is the visiting order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryAssignment {
    categories: Vec<Vec<VertexId>>,
}

impl CategoryAssignment {
    /// Validates disjointness, nonemptiness and vertex range.
    pub fn new(categories: Vec<Vec<VertexId>>, vertex_count: usize) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::EmptyCategory(0));
        }
        let mut seen = HashSet::new();
        for (i, cat) in categories.iter().enumerate() {
            if cat.is_empty() {
                return Err(Error::EmptyCategory(i));
            }
            for &v in cat {
                if v >= vertex_count {
                    return Err(Error::InvalidVertex(v));
                }
                if !seen.insert(v) {
                    return Err(Error::OverlappingCategories(v));
                }
            }
        }
        Ok(Self { categories })
    }

    pub fn k(&self) -> usize {
        self.categories.len()
    }

    pub fn categories(&self) -> &[Vec<VertexId>] {
        &self.categories
    }

    pub fn category(&self, i: usize) -> &[VertexId] {
        &self.categories[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.categories.iter().map(Vec::len).collect()
    }

    /// Number of POI combinations, the product of the category sizes.
    pub fn combination_count(&self) -> u128 {
        self.categories.iter().map(|c| c.len() as u128).product()
    }
}

/// Samples `k * per_category` distinct vertices and splits them into `k`
/// equal blocks. Each block is sorted by internal id.
pub fn assign_categories(
    net: &RoadNetwork,
    k: usize,
    per_category: usize,
    seed: u64,
) -> Result<CategoryAssignment> {
    if k == 0 {
        return Err(Error::EmptyCategory(0));
    }
    if per_category == 0 {
        return Err(Error::EmptyCategory(0));
    }
    let needed = k
        .checked_mul(per_category)
        .ok_or(Error::InsufficientVertices {
            needed: usize::MAX,
            available: net.vertex_count,
        })?;
    if needed > net.vertex_count {
        return Err(Error::InsufficientVertices {
            needed,
            available: net.vertex_count,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = index::sample(&mut rng, net.vertex_count, needed).into_vec();
    let categories = picked
        .chunks(per_category)
        .map(|block| {
            let mut b = block.to_vec();
            b.sort_unstable();
            b
        })
        .collect();
    CategoryAssignment::new(categories, net.vertex_count)
}

/// Parses a category file: line `i` lists the external ids of category `i`.
pub fn parse_categories(text: &str, net: &RoadNetwork) -> Result<CategoryAssignment> {
    let mut categories = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let mut cat = Vec::new();
        for tok in line.split_whitespace() {
            let ext: u64 = tok
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("bad vertex id `{tok}`")))?;
            cat.push(net.internal_id(ext)?);
        }
        categories.push(cat);
    }
    CategoryAssignment::new(categories, net.vertex_count)
}

/// Source and destination vertices of the group members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    sources: Vec<VertexId>,
    destinations: Vec<VertexId>,
}

impl GroupSpec {
    pub fn new(
        sources: Vec<VertexId>,
        destinations: Vec<VertexId>,
        vertex_count: usize,
    ) -> Result<Self> {
        if sources.is_empty() || sources.len() != destinations.len() {
            return Err(Error::InvalidGroup {
                sources: sources.len(),
                destinations: destinations.len(),
            });
        }
        if let Some(&v) = sources
            .iter()
            .chain(destinations.iter())
            .find(|&&v| v >= vertex_count)
        {
            return Err(Error::InvalidVertex(v));
        }
        Ok(Self {
            sources,
            destinations,
        })
    }

    /// Group size `b`.
    pub fn size(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    pub fn destinations(&self) -> &[VertexId] {
        &self.destinations
    }
}
