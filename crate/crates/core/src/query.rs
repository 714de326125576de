// SPDX-License-Identifier: Apache-2.0

//! Query types shared by the exact and heuristic solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{CategoryAssignment, GroupSpec, RoadNetwork};
use crate::{Length, VertexId};

/// An envy-free group trip planning query.
#[derive(Debug, Clone, PartialEq)]
pub struct EfGtpQuery {
    group: GroupSpec,
    categories: CategoryAssignment,
    threshold: Length,
}

impl EfGtpQuery {
    /// `threshold` may be `+inf` (no envy bound) but not negative or NaN.
    pub fn new(group: GroupSpec, categories: CategoryAssignment, threshold: Length) -> Result<Self> {
        check_threshold(threshold)?;
        Ok(Self {
            group,
            categories,
            threshold,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn categories(&self) -> &CategoryAssignment {
        &self.categories
    }

    pub fn threshold(&self) -> Length {
        self.threshold
    }

    pub fn with_threshold(&self, threshold: Length) -> Result<Self> {
        check_threshold(threshold)?;
        Ok(Self {
            threshold,
            ..self.clone()
        })
    }

    /// Number of categories `k`.
    pub fn k(&self) -> usize {
        self.categories.k()
    }

    /// Group size `b`.
    pub fn b(&self) -> usize {
        self.group.size()
    }

    /// Checks that `rho` picks one POI from each category, in order.
    pub fn check_combination(&self, rho: &PoiCombination) -> Result<()> {
        if rho.pois.len() != self.k() {
            return Err(Error::InvalidCombination);
        }
        for (i, v) in rho.pois.iter().enumerate() {
            if !self.categories.category(i).contains(v) {
                return Err(Error::InvalidCombination);
            }
        }
        Ok(())
    }

    /// Maps per-category positions to the combination they select.
    pub fn combination_at(&self, positions: &[usize]) -> PoiCombination {
        PoiCombination {
            pois: positions
                .iter()
                .enumerate()
                .map(|(i, &p)| self.categories.category(i)[p])
                .collect(),
        }
    }
}

fn check_threshold(threshold: Length) -> Result<()> {
    if threshold.is_nan() || threshold < 0.0 {
        Err(Error::InvalidThreshold(threshold))
    } else {
        Ok(())
    }
}

/// One POI per category in visiting order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PoiCombination {
    pub pois: Vec<VertexId>,
}

impl PoiCombination {
    pub fn new(pois: Vec<VertexId>) -> Self {
        Self { pois }
    }

    pub fn first(&self) -> VertexId {
        self.pois[0]
    }

    pub fn last(&self) -> VertexId {
        self.pois[self.pois.len() - 1]
    }
}

/// JSON query file using external vertex ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryFile {
    pub sources: Vec<u64>,
    pub destinations: Vec<u64>,
    pub categories: Vec<Vec<u64>>,
    #[serde(rename = "D")]
    pub threshold: f64,
}

impl QueryFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Resolves external ids against `net`.
    pub fn resolve(&self, net: &RoadNetwork) -> Result<EfGtpQuery> {
        let lookup = |ids: &[u64]| -> Result<Vec<VertexId>> {
            ids.iter().map(|&e| net.internal_id(e)).collect()
        };
        let group = GroupSpec::new(
            lookup(&self.sources)?,
            lookup(&self.destinations)?,
            net.vertex_count(),
        )?;
        let categories = self
            .categories
            .iter()
            .map(|c| lookup(c))
            .collect::<Result<Vec<_>>>()?;
        let categories = CategoryAssignment::new(categories, net.vertex_count())?;
        EfGtpQuery::new(group, categories, self.threshold)
    }

    pub fn from_query(query: &EfGtpQuery, net: &RoadNetwork) -> Result<Self> {
        let ext = |ids: &[VertexId]| -> Result<Vec<u64>> {
            ids.iter().map(|&v| net.external_id(v)).collect()
        };
        Ok(Self {
            sources: ext(query.group().sources())?,
            destinations: ext(query.group().destinations())?,
            categories: query
                .categories()
                .categories()
                .iter()
                .map(|c| ext(c))
                .collect::<Result<_>>()?,
            threshold: query.threshold(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_edge_list;

    #[test]
    fn query_file_resolves_external_ids() {
        let net = parse_edge_list("10 11\n11 12\n12 13\n13 14", false).unwrap();
        let text = r#"{"sources": [10, 14], "destinations": [14, 10], "categories": [[11], [12, 13]], "D": 2.5}"#;
        let file = QueryFile::from_json(text).unwrap();
        let q = file.resolve(&net).unwrap();
        assert_eq!(q.group().sources(), &[0, 4]);
        assert_eq!(q.categories().categories(), &[vec![1], vec![2, 3]]);
        assert_eq!(q.threshold(), 2.5);
        assert_eq!(QueryFile::from_query(&q, &net).unwrap(), file);

        let again = QueryFile::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(again, file);
    }

    #[test]
    fn query_rejects_bad_threshold_and_ids() {
        let net = parse_edge_list("1 2\n2 3", false).unwrap();
        let bad = QueryFile {
            sources: vec![1],
            destinations: vec![3],
            categories: vec![vec![2]],
            threshold: -1.0,
        };
        assert!(matches!(bad.resolve(&net), Err(Error::InvalidThreshold(_))));
        let unknown = QueryFile {
            threshold: 1.0,
            sources: vec![77],
            ..bad
        };
        assert!(matches!(
            unknown.resolve(&net),
            Err(Error::UnknownExternalId(77))
        ));
    }

    #[test]
    fn combination_membership() {
        let group = GroupSpec::new(vec![0], vec![3], 4).unwrap();
        let cats = CategoryAssignment::new(vec![vec![1], vec![2, 3]], 4).unwrap();
        let q = EfGtpQuery::new(group, cats, f64::INFINITY).unwrap();
        assert!(q.check_combination(&PoiCombination::new(vec![1, 3])).is_ok());
        assert!(q.check_combination(&PoiCombination::new(vec![3, 1])).is_err());
        assert!(q.check_combination(&PoiCombination::new(vec![1])).is_err());
        assert_eq!(q.combination_at(&[0, 1]).pois, vec![1, 3]);
    }
}
