// SPDX-License-Identifier: Apache-2.0

//! Sweep and benchmark harness.
//!
//! A sweep fixes a network, samples one instance per `(k, seed)` and solves it
//! for every threshold and solver in the config. Records come back sorted by
//! `(k, D, seed, solver)` so the CSV does not depend on scheduling.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{additional_distance, endpoint_gaps, solve_exact_with, SolveOptions};
use crate::heuristic::{solve_heuristic, solve_heuristic_indexed, CategoryIndex, HeuristicResult};
use crate::network::{assign_categories, read_network, CategoryAssignment, GroupSpec, RoadNetwork};
use crate::oracle::{DistanceOracle, OracleMode};
use crate::query::EfGtpQuery;
use crate::rtree::DEFAULT_FANOUT;
use crate::Length;

/// Instances above this many combinations are refused by the benchmark.
pub const BENCH_COMBINATION_LIMIT: u128 = 10_000_000;

pub const SWEEP_HEADER: [&str; 11] = [
    "dataset",
    "k",
    "b",
    "D",
    "seed",
    "solver",
    "feasible_count",
    "optimal_aggregated",
    "d",
    "epsilon",
    "wall_time_ms",
];

pub const BENCH_HEADER: [&str; 11] = [
    "instance",
    "k",
    "seed",
    "D",
    "heuristic",
    "exact_optimum",
    "heuristic_value",
    "heuristic_feasible",
    "ratio",
    "exact_time_ms",
    "heuristic_time_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exact,
    ExactFaithful,
    Heuristic,
    HeuristicIndexed,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::ExactFaithful => "exact-faithful",
            SolverKind::Heuristic => "heuristic",
            SolverKind::HeuristicIndexed => "heuristic-indexed",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "exact" => Ok(SolverKind::Exact),
            "exact-faithful" => Ok(SolverKind::ExactFaithful),
            "heuristic" => Ok(SolverKind::Heuristic),
            "heuristic-indexed" => Ok(SolverKind::HeuristicIndexed),
            other => Err(Error::InvalidConfig(format!("unknown solver `{other}`"))),
        }
    }

    fn is_heuristic(self) -> bool {
        matches!(self, SolverKind::Heuristic | SolverKind::HeuristicIndexed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleSetting {
    Full,
    #[default]
    OnDemand,
}

impl From<OracleSetting> for OracleMode {
    fn from(s: OracleSetting) -> Self {
        match s {
            OracleSetting::Full => OracleMode::Full,
            OracleSetting::OnDemand => OracleMode::OnDemand,
        }
    }
}

/// Sweep configuration, read from JSON.
///
/// Thresholds come either from `d_values` directly or from `d_quantiles`,
/// which picks each `D` as a quantile of the instance's envy gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dataset: PathBuf,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub coords: Option<PathBuf>,
    #[serde(default)]
    pub weighted: bool,
    #[serde(default)]
    pub euclidean_weights: bool,
    pub k_values: Vec<usize>,
    pub per_category: usize,
    pub group_size: usize,
    #[serde(default)]
    pub d_values: Vec<Length>,
    #[serde(default)]
    pub d_quantiles: Vec<f64>,
    pub seeds: Vec<u64>,
    pub solvers: Vec<SolverKind>,
    #[serde(default)]
    pub oracle: OracleSetting,
    #[serde(default = "default_fanout")]
    pub fanout: usize,
}

fn default_fanout() -> usize {
    DEFAULT_FANOUT
}

fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SweepConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return bad("k_values must be nonempty and positive");
        }
        if self.per_category == 0 || self.group_size == 0 {
            return bad("per_category and group_size must be positive");
        }
        if self.seeds.is_empty() || self.solvers.is_empty() {
            return bad("seeds and solvers must be nonempty");
        }
        match (self.d_values.is_empty(), self.d_quantiles.is_empty()) {
            (false, true) => {
                if !strictly_increasing(&self.d_values)
                    || self.d_values.iter().any(|d| d.is_nan() || *d < 0.0)
                {
                    return bad("d_values must be nonnegative and strictly increasing");
                }
            }
            (true, false) => {
                if !strictly_increasing(&self.d_quantiles)
                    || self.d_quantiles.iter().any(|q| !(0.0..=1.0).contains(q))
                {
                    return bad("d_quantiles must lie in [0, 1] and strictly increase");
                }
            }
            _ => return bad("give exactly one of d_values or d_quantiles"),
        }
        Ok(())
    }

    pub fn dataset_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.dataset
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }

    pub fn load_network(&self) -> Result<RoadNetwork> {
        read_network(
            &self.dataset,
            self.coords.as_deref(),
            self.weighted,
            self.euclidean_weights,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub dataset: String,
    pub k: usize,
    pub b: usize,
    #[serde(rename = "D")]
    pub threshold: Length,
    pub seed: u64,
    pub solver: SolverKind,
    pub feasible_count: u64,
    pub optimal_aggregated: Option<Length>,
    pub d: Length,
    pub epsilon: Length,
    pub wall_time_ms: f64,
}

/// Samples `b` sources and `b` destinations, preferring non-POI vertices.
pub fn generate_query(
    net: &RoadNetwork,
    b: usize,
    assignment: &CategoryAssignment,
    threshold: Length,
    seed: u64,
) -> Result<EfGtpQuery> {
    if b == 0 {
        return Err(Error::InvalidGroup {
            sources: 0,
            destinations: 0,
        });
    }
    let n = net.vertex_count();
    let mut is_poi = vec![false; n];
    for &v in assignment.categories().iter().flatten() {
        is_poi[v] = true;
    }
    let outside: Vec<usize> = (0..n).filter(|&v| !is_poi[v]).collect();
    let pool: Vec<usize> = if outside.len() >= 2 * b {
        outside
    } else if n >= 2 * b {
        (0..n).collect()
    } else {
        return Err(Error::InsufficientVertices {
            needed: 2 * b,
            available: n,
        });
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked: Vec<usize> = index::sample(&mut rng, pool.len(), 2 * b)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    let group = GroupSpec::new(picked[..b].to_vec(), picked[b..].to_vec(), n)?;
    EfGtpQuery::new(group, assignment.clone(), threshold)
}

/// Query seed derived from the sweep seed so it does not reuse the category
/// sampling stream.
fn query_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Threshold at quantile `q` of `gaps` (nearest rank).
pub fn gap_quantile(gaps: &[Length], q: f64) -> Length {
    let mut sorted = gaps.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

struct Instance {
    k: usize,
    seed: u64,
    query: EfGtpQuery,
    thresholds: Vec<Length>,
}

fn build_instances(net: &RoadNetwork, config: &SweepConfig, oracle: &DistanceOracle) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for &k in &config.k_values {
        for &seed in &config.seeds {
            let assignment = assign_categories(net, k, config.per_category, seed)?;
            let query = generate_query(net, config.group_size, &assignment, 0.0, query_seed(seed))?;
            let thresholds = if config.d_quantiles.is_empty() {
                config.d_values.clone()
            } else {
                let gaps = endpoint_gaps(&query, oracle)?;
                let mut ds: Vec<Length> =
                    config.d_quantiles.iter().map(|&q| gap_quantile(&gaps, q)).collect();
                ds.dedup();
                ds
            };
            out.push(Instance {
                k,
                seed,
                query,
                thresholds,
            });
        }
    }
    Ok(out)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn build_oracle(net: &RoadNetwork, config: &SweepConfig) -> Result<DistanceOracle> {
    let start = Instant::now();
    let oracle = DistanceOracle::build(net, config.oracle.into(), None)?;
    log::info!("distance oracle ready in {:.1} ms", elapsed_ms(start));
    Ok(oracle)
}

fn heuristic_record(result: &HeuristicResult, threshold: Length) -> (u64, Option<Length>, Length, Length) {
    let gap = result.route.max_gap;
    if result.route.feasible {
        (1, Some(result.route.aggregated), gap, 0.0)
    } else {
        (0, None, gap, additional_distance(gap, threshold))
    }
}

/// Runs the sweep on an already-loaded network.
pub fn run_sweep_on(net: &RoadNetwork, dataset: &str, config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let oracle = build_oracle(net, config)?;
    let instances = build_instances(net, config, &oracle)?;
    let mut records = Vec::new();
    for inst in &instances {
        let index = if config.solvers.contains(&SolverKind::HeuristicIndexed) {
            Some(CategoryIndex::build(net, inst.query.categories(), config.fanout)?)
        } else {
            None
        };
        for &threshold in &inst.thresholds {
            let query = inst.query.with_threshold(threshold)?;
            for &solver in &config.solvers {
                let start = Instant::now();
                let (feasible_count, optimal_aggregated, d, epsilon) = if solver.is_heuristic() {
                    let result = match &index {
                        Some(ix) if solver == SolverKind::HeuristicIndexed => {
                            solve_heuristic_indexed(&query, &oracle, ix)?
                        }
                        _ => solve_heuristic(&query, &oracle)?,
                    };
                    heuristic_record(&result, threshold)
                } else {
                    let options = SolveOptions {
                        faithful: solver == SolverKind::ExactFaithful,
                    };
                    let outcome = solve_exact_with(&query, &oracle, options)?;
                    (
                        outcome.feasible_count(),
                        outcome.optimal_aggregated(),
                        outcome.d(),
                        outcome.epsilon(),
                    )
                };
                let wall_time_ms = elapsed_ms(start);
                records.push(SweepRecord {
                    dataset: dataset.to_string(),
                    k: inst.k,
                    b: query.b(),
                    threshold,
                    seed: inst.seed,
                    solver,
                    feasible_count,
                    optimal_aggregated,
                    d,
                    epsilon,
                    wall_time_ms,
                });
            }
        }
    }
    records.sort_by(|a, b| {
        a.k.cmp(&b.k)
            .then(a.threshold.total_cmp(&b.threshold))
            .then(a.seed.cmp(&b.seed))
            .then(a.solver.cmp(&b.solver))
    });
    Ok(records)
}

/// Loads the configured dataset and runs the sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let net = config.load_network()?;
    run_sweep_on(&net, &config.dataset_name(), config)
}

fn opt(v: Option<Length>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in records {
        w.write_record([
            r.dataset.clone(),
            r.k.to_string(),
            r.b.to_string(),
            format!("{}", r.threshold),
            r.seed.to_string(),
            r.solver.as_str().to_string(),
            r.feasible_count.to_string(),
            opt(r.optimal_aggregated),
            format!("{}", r.d),
            format!("{}", r.epsilon),
            format!("{}", r.wall_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(line, format!("bad `{}` column", SWEEP_HEADER[i])))
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(SWEEP_HEADER.iter().copied()) {
        return Err(Error::parse(1, "unexpected sweep header"));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let optimal = match rec.get(7) {
            Some("") => None,
            _ => Some(field(&rec, 7, line)?),
        };
        out.push(SweepRecord {
            dataset: rec.get(0).unwrap_or_default().to_string(),
            k: field(&rec, 1, line)?,
            b: field(&rec, 2, line)?,
            threshold: field(&rec, 3, line)?,
            seed: field(&rec, 4, line)?,
            solver: SolverKind::parse(rec.get(5).unwrap_or_default())?,
            feasible_count: field(&rec, 6, line)?,
            optimal_aggregated: optimal,
            d: field(&rec, 8, line)?,
            epsilon: field(&rec, 9, line)?,
            wall_time_ms: field(&rec, 10, line)?,
        });
    }
    Ok(out)
}

/// One exact-vs-heuristic comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRecord {
    pub instance: String,
    pub k: usize,
    pub seed: u64,
    pub threshold: Length,
    pub heuristic: SolverKind,
    pub exact_optimum: Option<Length>,
    pub heuristic_value: Length,
    pub heuristic_feasible: bool,
    /// Heuristic over exact aggregated distance, when both routes are feasible.
    pub ratio: Option<f64>,
    pub exact_time_ms: f64,
    pub heuristic_time_ms: f64,
}

/// Times the exact solver against the heuristic(s) named in the config.
pub fn compare_solvers_on(
    net: &RoadNetwork,
    dataset: &str,
    config: &SweepConfig,
) -> Result<Vec<ComparisonRecord>> {
    config.validate()?;
    for &k in &config.k_values {
        let combinations = (config.per_category as u128).pow(k as u32);
        if combinations > BENCH_COMBINATION_LIMIT {
            return Err(Error::CombinationGuard {
                combinations,
                limit: BENCH_COMBINATION_LIMIT,
            });
        }
    }
    let faithful = config.solvers.contains(&SolverKind::ExactFaithful)
        && !config.solvers.contains(&SolverKind::Exact);
    let mut heuristics: Vec<SolverKind> = config
        .solvers
        .iter()
        .copied()
        .filter(|s| s.is_heuristic())
        .collect();
    if heuristics.is_empty() {
        heuristics.push(SolverKind::Heuristic);
    }

    let oracle = build_oracle(net, config)?;
    let instances = build_instances(net, config, &oracle)?;
    let mut out = Vec::new();
    for inst in &instances {
        let index = if heuristics.contains(&SolverKind::HeuristicIndexed) {
            Some(CategoryIndex::build(net, inst.query.categories(), config.fanout)?)
        } else {
            None
        };
        for &threshold in &inst.thresholds {
            let query = inst.query.with_threshold(threshold)?;
            let start = Instant::now();
            let exact = solve_exact_with(&query, &oracle, SolveOptions { faithful })?;
            let exact_time_ms = elapsed_ms(start);
            for &h in &heuristics {
                let start = Instant::now();
                let result = match (&index, h) {
                    (Some(ix), SolverKind::HeuristicIndexed) => {
                        solve_heuristic_indexed(&query, &oracle, ix)?
                    }
                    _ => solve_heuristic(&query, &oracle)?,
                };
                let heuristic_time_ms = elapsed_ms(start);
                let exact_optimum = exact.optimal_aggregated();
                let ratio = match exact_optimum {
                    Some(opt) if result.route.feasible => Some(result.route.aggregated / opt),
                    _ => None,
                };
                out.push(ComparisonRecord {
                    instance: format!("{dataset}/k{}/s{}/D{}", inst.k, inst.seed, threshold),
                    k: inst.k,
                    seed: inst.seed,
                    threshold,
                    heuristic: h,
                    exact_optimum,
                    heuristic_value: result.route.aggregated,
                    heuristic_feasible: result.route.feasible,
                    ratio,
                    exact_time_ms,
                    heuristic_time_ms,
                });
            }
        }
    }
    Ok(out)
}

pub fn compare_solvers(config: &SweepConfig) -> Result<Vec<ComparisonRecord>> {
    let net = config.load_network()?;
    compare_solvers_on(&net, &config.dataset_name(), config)
}

pub fn write_bench_csv<W: Write>(records: &[ComparisonRecord], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(BENCH_HEADER)?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.k.to_string(),
            r.seed.to_string(),
            format!("{}", r.threshold),
            r.heuristic.as_str().to_string(),
            opt(r.exact_optimum),
            format!("{}", r.heuristic_value),
            r.heuristic_feasible.to_string(),
            opt(r.ratio),
            format!("{}", r.exact_time_ms),
            format!("{}", r.heuristic_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::road_like_network;

    fn config(solvers: Vec<SolverKind>) -> SweepConfig {
        SweepConfig {
            dataset: PathBuf::from("unused.edges"),
            name: Some("synthetic".into()),
            coords: None,
            weighted: false,
            euclidean_weights: false,
            k_values: vec![2, 3],
            per_category: 4,
            group_size: 3,
            d_values: vec![0.0, 2.0, 4.0, 8.0, 16.0, 64.0],
            d_quantiles: vec![],
            seeds: vec![1, 2],
            solvers,
            oracle: OracleSetting::OnDemand,
            fanout: 16,
        }
    }

    #[test]
    fn config_validation() {
        let mut c = config(vec![SolverKind::Exact]);
        assert!(c.validate().is_ok());
        c.d_values = vec![3.0, 3.0];
        assert!(c.validate().is_err());
        c.d_values = vec![];
        assert!(c.validate().is_err());
        c.d_quantiles = vec![0.1, 0.5];
        assert!(c.validate().is_ok());
        c.d_values = vec![1.0];
        assert!(c.validate().is_err());
        c.d_values = vec![];
        c.k_values = vec![0];
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json() {
        let text = r#"{
            "dataset": "road.mtx", "k_values": [2, 3, 4], "per_category": 10,
            "group_size": 12, "d_values": [4400, 4800, 5200, 5600, 6000],
            "seeds": [1], "solvers": ["exact", "exact-faithful", "heuristic", "heuristic-indexed"]
        }"#;
        let c = SweepConfig::from_json(text).unwrap();
        assert_eq!(c.dataset_name(), "road");
        assert_eq!(c.solvers.len(), 4);
        assert_eq!(c.oracle, OracleSetting::OnDemand);
        assert_eq!(c.fanout, 16);
    }

    #[test]
    fn query_generation_is_deterministic() {
        let net = road_like_network(60, 75, 1).unwrap();
        let cats = assign_categories(&net, 2, 5, 3).unwrap();
        let a = generate_query(&net, 12, &cats, 1.0, 5).unwrap();
        let b = generate_query(&net, 12, &cats, 1.0, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.b(), 12);
        let poi: Vec<_> = cats.categories().concat();
        assert!(a
            .group()
            .sources()
            .iter()
            .chain(a.group().destinations())
            .all(|v| !poi.contains(v)));
        assert_eq!(generate_query(&net, 1, &cats, 0.0, 5).unwrap().b(), 1);
        assert!(matches!(
            generate_query(&net, 31, &cats, 0.0, 5),
            Err(Error::InsufficientVertices { .. })
        ));
    }

    #[test]
    fn sweep_is_monotone_and_csv_round_trips() {
        let net = road_like_network(80, 100, 2).unwrap();
        let c = config(vec![SolverKind::Exact, SolverKind::ExactFaithful, SolverKind::Heuristic]);
        let records = run_sweep_on(&net, "synthetic", &c).unwrap();
        assert_eq!(records.len(), 2 * 6 * 2 * 3);
        for r in &records {
            assert_eq!(r.epsilon > 0.0, r.feasible_count == 0, "{r:?}");
        }
        for k in [2, 3] {
            for seed in [1, 2] {
                let cell: Vec<_> = records
                    .iter()
                    .filter(|r| r.k == k && r.seed == seed && r.solver == SolverKind::Exact)
                    .collect();
                for w in cell.windows(2) {
                    assert!(w[0].feasible_count <= w[1].feasible_count);
                    assert!(w[0].epsilon >= w[1].epsilon);
                    assert_eq!(w[0].d, w[1].d);
                }
                let faithful: Vec<_> = records
                    .iter()
                    .filter(|r| r.k == k && r.seed == seed && r.solver == SolverKind::ExactFaithful)
                    .collect();
                for (a, b) in cell.iter().zip(&faithful) {
                    assert_eq!(
                        (a.feasible_count, a.optimal_aggregated, a.d, a.epsilon),
                        (b.feasible_count, b.optimal_aggregated, b.d, b.epsilon)
                    );
                }
            }
        }
        let mut buf = Vec::new();
        write_sweep_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "dataset,k,b,D,seed,solver,feasible_count,optimal_aggregated,d,epsilon,wall_time_ms\n"
        ));
        assert!(!text.contains('\r'));
        assert_eq!(read_sweep_csv(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn quantile_thresholds() {
        assert_eq!(gap_quantile(&[5.0, 1.0, 3.0, 2.0], 0.0), 1.0);
        assert_eq!(gap_quantile(&[5.0, 1.0, 3.0, 2.0], 0.5), 2.0);
        assert_eq!(gap_quantile(&[5.0, 1.0, 3.0, 2.0], 1.0), 5.0);
        let net = road_like_network(80, 100, 5).unwrap();
        let mut c = config(vec![SolverKind::Exact]);
        c.d_values.clear();
        c.d_quantiles = vec![0.0, 0.25, 0.5, 1.0];
        let records = run_sweep_on(&net, "synthetic", &c).unwrap();
        // The 0-quantile equals d, so even the tightest cell is feasible.
        assert!(records.iter().all(|r| r.feasible_count > 0));
    }

    #[test]
    fn comparison_ratio_and_guard() {
        let net = road_like_network(90, 110, 3).unwrap();
        let c = config(vec![SolverKind::Exact, SolverKind::Heuristic]);
        let rows = compare_solvers_on(&net, "synthetic", &c).unwrap();
        assert!(!rows.is_empty());
        for r in &rows {
            if let Some(ratio) = r.ratio {
                assert!(ratio >= 1.0, "{r:?}");
                assert!(r.heuristic_feasible);
            }
        }
        let mut buf = Vec::new();
        write_bench_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("instance,k,seed,D,heuristic,"));

        let mut big = c.clone();
        big.per_category = 3000;
        big.k_values = vec![3];
        assert!(matches!(
            compare_solvers_on(&net, "synthetic", &big),
            Err(Error::CombinationGuard { .. })
        ));
    }
}
