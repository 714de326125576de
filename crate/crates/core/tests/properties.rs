// SPDX-License-Identifier: Apache-2.0

mod common;

use common::{brute_force, random_graph, Reference};
use efgtp::exact::enumerate_combinations;
use efgtp::network::{assign_categories, parse_edge_list};
use efgtp::rtree::{euclidean, RTree};
use efgtp::{
    solve_exact, solve_heuristic, CategoryAssignment, DistanceOracle, EfGtpQuery, GroupSpec,
    OracleMode, QueryFile,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Case {
    oracle: DistanceOracle,
    apsp: Vec<Vec<f64>>,
    query: EfGtpQuery,
}

fn case(seed: u64, k: usize, b: usize, per: usize) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 12 + k * per;
    let (net, apsp) = random_graph(&mut rng, n, n / 2, 9);
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(&mut rng);
    let cats = (0..k).map(|i| vs[i * per..(i + 1) * per].to_vec()).collect();
    let sources = (0..b).map(|_| rng.gen_range(0..n)).collect();
    let dests = (0..b).map(|_| rng.gen_range(0..n)).collect();
    let query = EfGtpQuery::new(
        GroupSpec::new(sources, dests, n).unwrap(),
        CategoryAssignment::new(cats, n).unwrap(),
        0.0,
    )
    .unwrap();
    let oracle = DistanceOracle::build(&net, OracleMode::OnDemand, None).unwrap();
    Case { oracle, apsp, query }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_is_symmetric_and_exact(seed in any::<u64>(), n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (net, apsp) = random_graph(&mut rng, n, n, 30);
        let lazy = DistanceOracle::build(&net, OracleMode::OnDemand, None).unwrap();
        let full = DistanceOracle::build(&net, OracleMode::Full, None).unwrap();
        for u in 0..n {
            for v in 0..n {
                let d = lazy.dist(u, v).unwrap();
                prop_assert_eq!(d, apsp[u][v]);
                prop_assert_eq!(d, lazy.dist(v, u).unwrap());
                prop_assert_eq!(d.to_bits(), full.dist(u, v).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn monotone_in_threshold(seed in any::<u64>(), k in 1usize..4, b in 1usize..5, per in 1usize..5) {
        let c = case(seed, k, b, per);
        let mut last_count = 0;
        let mut last_opt = f64::INFINITY;
        let mut d_seen = None;
        for step in 0..12 {
            let d = step as f64 * 1.5;
            let out = solve_exact(&c.query.with_threshold(d).unwrap(), &c.oracle).unwrap();
            prop_assert!(out.feasible_count() >= last_count);
            last_count = out.feasible_count();
            if let Some(opt) = out.optimal_aggregated() {
                prop_assert!(opt <= last_opt);
                last_opt = opt;
            } else {
                prop_assert_eq!(d + out.epsilon(), out.d());
            }
            prop_assert_eq!(*d_seen.get_or_insert(out.d()), out.d());
        }
    }

    #[test]
    fn matches_brute_force(seed in any::<u64>(), k in 1usize..4, b in 1usize..5, per in 1usize..5, t in 0u32..20) {
        let c = case(seed, k, b, per);
        let q = c.query.with_threshold(t as f64).unwrap();
        let out = solve_exact(&q, &c.oracle).unwrap();
        match brute_force(&q, &c.apsp) {
            Reference::Optimal { pois, aggregated, feasible_count, .. } => {
                prop_assert_eq!(out.feasible_count(), feasible_count);
                prop_assert_eq!(out.optimal_aggregated(), Some(aggregated));
                if let efgtp::SolveOutcome::Optimal { route, .. } = out {
                    prop_assert_eq!(route.combination.pois, pois);
                }
            }
            Reference::Infeasible { d, epsilon, .. } => {
                prop_assert!(!out.is_feasible());
                prop_assert_eq!((out.d(), out.epsilon()), (d, epsilon));
            }
        }
    }

    #[test]
    fn heuristic_never_beats_feasible_optimum(seed in any::<u64>(), k in 1usize..5, b in 1usize..5, per in 1usize..5) {
        let c = case(seed, k, b, per);
        let q = c.query.with_threshold(f64::INFINITY).unwrap();
        let h = solve_heuristic(&q, &c.oracle).unwrap();
        prop_assert!(q.check_combination(&h.route.combination).is_ok());
        let opt = solve_exact(&q, &c.oracle).unwrap().optimal_aggregated().unwrap();
        prop_assert!(h.route.aggregated >= opt);
    }

    #[test]
    fn enumeration_covers_product(sizes in proptest::collection::vec(1usize..5, 1..5)) {
        let mut next = 0;
        let cats: Vec<Vec<usize>> = sizes.iter().map(|&s| { next += s; (next - s..next).collect() }).collect();
        let cats = CategoryAssignment::new(cats, next).unwrap();
        let all: Vec<_> = enumerate_combinations(&cats).unwrap().collect();
        prop_assert_eq!(all.len() as u128, cats.combination_count());
        prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rtree_nn_matches_scan(
        points in proptest::collection::vec((0u8..50, 0u8..50), 1..300),
        fanout in 2usize..20,
        qx in -5.0f64..55.0,
        qy in -5.0f64..55.0,
    ) {
        let entries: Vec<(usize, f64, f64)> =
            points.iter().enumerate().map(|(i, &(x, y))| (i, x as f64, y as f64)).collect();
        let tree = RTree::bulk_load(&entries, fanout).unwrap();
        prop_assert!(tree.validate().is_ok());
        prop_assert_eq!(tree.len(), entries.len());
        let mut best = (f64::INFINITY, usize::MAX);
        for &(id, x, y) in &entries {
            let d = euclidean(x, y, qx, qy);
            if d < best.0 || (d == best.0 && id < best.1) {
                best = (d, id);
            }
        }
        prop_assert_eq!(tree.euclidean_nn(qx, qy).unwrap(), best.1);
        prop_assert_eq!(tree.euclidean_gnn(&[(qx, qy)]).unwrap(), best.1);
    }

    #[test]
    fn category_assignment_is_disjoint(seed in any::<u64>(), k in 1usize..5, per in 1usize..8) {
        let text: String = (0..60).map(|i| format!("{} {}\n", i, (i + 1) % 60)).collect();
        let net = parse_edge_list(&text, false).unwrap();
        let a = assign_categories(&net, k, per, seed).unwrap();
        let mut all: Vec<usize> = a.categories().concat();
        prop_assert_eq!(all.len(), k * per);
        all.sort_unstable();
        all.dedup();
        prop_assert_eq!(all.len(), k * per);
        prop_assert_eq!(a, assign_categories(&net, k, per, seed).unwrap());
    }

    #[test]
    fn query_file_round_trips(seed in any::<u64>(), k in 1usize..4, b in 1usize..5) {
        let text: String = (0..40).map(|i| format!("{} {}\n", 100 + i, 100 + (i + 1) % 40)).collect();
        let net = parse_edge_list(&text, false).unwrap();
        let cats = assign_categories(&net, k, 3, seed).unwrap();
        let q = efgtp::experiments::generate_query(&net, b, &cats, 2.5, seed).unwrap();
        let file = QueryFile::from_query(&q, &net).unwrap();
        let back = QueryFile::from_json(&file.to_json().unwrap()).unwrap().resolve(&net).unwrap();
        prop_assert_eq!(back, q);
    }
}
