// SPDX-License-Identifier: Apache-2.0

//! Random instances and a brute-force reference evaluator shared by the
//! integration tests. Nothing here calls the library's solvers.

#![allow(dead_code)]

use efgtp::network::{Edge, RoadNetwork};
use efgtp::{CategoryAssignment, EfGtpQuery, GroupSpec};
use rand::seq::SliceRandom;
use rand::Rng;

/// Connected random graph with integer weights in `1..=max_w`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, extra: usize, max_w: u32) -> (RoadNetwork, Vec<Vec<f64>>) {
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(1..=max_w) as f64));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        edges.push((u, v, rng.gen_range(1..=max_w) as f64));
    }
    let net = RoadNetwork::new(
        (0..n as u64).collect(),
        edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }).collect(),
    )
    .unwrap();
    (net, floyd_warshall(n, &edges))
}

pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        if u != v && w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][m] + d[m][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub struct Instance {
    pub net: RoadNetwork,
    pub apsp: Vec<Vec<f64>>,
    pub query: EfGtpQuery,
}

/// Random instance within the bounds `n <= 50`, k in {1,2,3}, b in {1,2,4},
/// at most 6 POIs per category.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let k = *[1usize, 2, 3].choose(rng).unwrap();
    let b = *[1usize, 2, 4].choose(rng).unwrap();
    let n = rng.gen_range(20..=50);
    let extra = rng.gen_range(0..n);
    let (net, apsp) = random_graph(rng, n, extra, 20);
    let mut vertices: Vec<usize> = (0..n).collect();
    vertices.shuffle(rng);
    let mut cats = Vec::new();
    let mut next = 0;
    for _ in 0..k {
        let size = rng.gen_range(1..=6);
        cats.push(vertices[next..next + size].to_vec());
        next += size;
    }
    let sources = (0..b).map(|_| rng.gen_range(0..n)).collect();
    let destinations = (0..b).map(|_| rng.gen_range(0..n)).collect();
    let threshold = rng.gen_range(0..=40) as f64 / 2.0;
    let query = EfGtpQuery::new(
        GroupSpec::new(sources, destinations, n).unwrap(),
        CategoryAssignment::new(cats, n).unwrap(),
        threshold,
    )
    .unwrap();
    Instance { net, apsp, query }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Optimal {
        pois: Vec<usize>,
        aggregated: f64,
        feasible_count: u64,
        d: f64,
    },
    Infeasible {
        d: f64,
        epsilon: f64,
        witness: Vec<usize>,
    },
}

/// Literal evaluation of every combination: member distances summed leg by
/// leg, gap as the largest pairwise difference, strict improvement so the
/// first (lexicographically smallest) tuple wins ties.
pub fn brute_force(query: &EfGtpQuery, apsp: &[Vec<f64>]) -> Reference {
    let cats = query.categories().categories();
    let k = cats.len();
    let sources = query.group().sources();
    let dests = query.group().destinations();
    let mut pos = vec![0usize; k];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut count = 0u64;
    let mut min_gap: Option<(f64, Vec<usize>)> = None;
    loop {
        let pois: Vec<usize> = (0..k).map(|i| cats[i][pos[i]]).collect();
        let dis: Vec<f64> = (0..sources.len())
            .map(|m| {
                let mut acc = apsp[sources[m]][pois[0]];
                for w in pois.windows(2) {
                    acc += apsp[w[0]][w[1]];
                }
                acc + apsp[pois[k - 1]][dests[m]]
            })
            .collect();
        let aggregated = dis.iter().fold(0.0, |a, &x| a + x);
        let mut gap: f64 = 0.0;
        for i in 0..dis.len() {
            for j in i + 1..dis.len() {
                gap = gap.max((dis[i] - dis[j]).abs());
            }
        }
        if min_gap.as_ref().is_none_or(|(g, _)| gap < *g) {
            min_gap = Some((gap, pois.clone()));
        }
        if gap <= query.threshold() {
            count += 1;
            if best.as_ref().is_none_or(|(a, _)| aggregated < *a) {
                best = Some((aggregated, pois));
            }
        }
        let mut i = k;
        loop {
            if i == 0 {
                let (d, witness) = min_gap.unwrap();
                return match best {
                    Some((aggregated, pois)) => Reference::Optimal {
                        pois,
                        aggregated,
                        feasible_count: count,
                        d,
                    },
                    None => Reference::Infeasible {
                        d,
                        epsilon: d - query.threshold(),
                        witness,
                    },
                };
            }
            i -= 1;
            pos[i] += 1;
            if pos[i] < cats[i].len() {
                break;
            }
            pos[i] = 0;
        }
    }
}
