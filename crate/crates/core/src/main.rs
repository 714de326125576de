// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use efgtp::exact::{solve_exact_with, write_route_matrix, SolveOptions, SolveOutcome};
use efgtp::experiments::{
    compare_solvers, generate_query, run_sweep, write_bench_csv, write_sweep_csv, SweepConfig,
};
use efgtp::heuristic::{solve_heuristic, solve_heuristic_indexed, CategoryIndex};
use efgtp::network::{assign_categories, coordinates_to_string, read_network, RoadNetwork};
use efgtp::oracle::{DistanceOracle, OracleMode};
use efgtp::query::{PoiCombination, QueryFile};
use efgtp::rtree::DEFAULT_FANOUT;
use efgtp::synthetic::road_like_network;
use efgtp::{Error, EvaluatedRoute, Result};

#[derive(Parser)]
#[command(name = "efgtp", version, about = "Envy-free group trip planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct GraphArgs {
    /// Edge list (`u v [w]` lines, MatrixMarket banner allowed).
    #[arg(long)]
    graph: PathBuf,
    /// Coordinates file of `id x y` lines.
    #[arg(long)]
    coords: Option<PathBuf>,
    /// Read edge weights from the third column.
    #[arg(long)]
    weighted: bool,
    /// Replace edge weights by Euclidean lengths (needs --coords).
    #[arg(long)]
    euclidean_weights: bool,
    /// How shortest-path distances are stored.
    #[arg(long, value_enum, default_value_t = OracleArg::OnDemand)]
    oracle: OracleArg,
    /// Load the full distance matrix from this file, or write it there.
    #[arg(long)]
    matrix_cache: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Full,
    OnDemand,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexArg {
    Euclidean,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal envy-free route, or the additional distance needed.
    SolveExact {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        query: PathBuf,
        /// Enumerate every combination and compare every member pair.
        #[arg(long)]
        faithful: bool,
        /// Write every combination's distances as CSV.
        #[arg(long)]
        debug_matrix: Option<PathBuf>,
    },
    /// Greedy route from nearest-neighbor queries.
    SolveHeuristic {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        query: PathBuf,
        /// Answer NN/GNN steps with Euclidean R-trees.
        #[arg(long, value_enum)]
        index: Option<IndexArg>,
        #[arg(long, default_value_t = DEFAULT_FANOUT)]
        fanout: usize,
    },
    /// Threshold sweep; one CSV row per (k, D, seed, solver).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact versus heuristic comparison.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded road-like network with coordinates.
    GenerateNetwork {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        coords_out: Option<PathBuf>,
    },
    /// Random query file over an existing network.
    GenerateQuery {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        per_category: usize,
        #[arg(long)]
        group_size: usize,
        #[arg(long = "D")]
        threshold: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Parse { .. } | Error::BadMatrixFile(_) => 2,
        Error::NonPositiveWeight { .. } | Error::EmptyInput => 2,
        Error::MatrixCapacity { .. } | Error::CombinationGuard { .. } => 3,
        _ => 1,
    }
}

fn load(args: &GraphArgs) -> Result<(RoadNetwork, DistanceOracle)> {
    let net = read_network(
        &args.graph,
        args.coords.as_deref(),
        args.weighted,
        args.euclidean_weights,
    )?;
    let oracle = match &args.matrix_cache {
        Some(path) if path.exists() => {
            DistanceOracle::read_matrix(&net, BufReader::new(File::open(path)?))?
        }
        Some(path) => {
            let oracle = DistanceOracle::build(&net, OracleMode::Full, None)?;
            let mut out = BufWriter::new(File::create(path)?);
            oracle.write_matrix(&mut out)?;
            out.flush()?;
            oracle
        }
        None => {
            let mode = match args.oracle {
                OracleArg::Full => OracleMode::Full,
                OracleArg::OnDemand => OracleMode::OnDemand,
            };
            DistanceOracle::build(&net, mode, None)?
        }
    };
    Ok((net, oracle))
}

fn external(net: &RoadNetwork, combo: &PoiCombination) -> Result<String> {
    let ids = combo
        .pois
        .iter()
        .map(|&v| net.external_id(v).map(|e| e.to_string()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ids.join(" "))
}

fn print_route(net: &RoadNetwork, route: &EvaluatedRoute) -> Result<()> {
    println!("route {}", external(net, &route.combination)?);
    let per: Vec<String> = route.per_member.iter().map(|d| format!("{d}")).collect();
    println!("member_distances {}", per.join(" "));
    Ok(())
}

fn read_query(path: &Path) -> Result<QueryFile> {
    QueryFile::from_json(&std::fs::read_to_string(path)?)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    Ok(std::fs::write(path, contents)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SolveExact {
            graph,
            query,
            faithful,
            debug_matrix,
        } => {
            let (net, oracle) = load(&graph)?;
            let query = read_query(&query)?.resolve(&net)?;
            if let Some(path) = debug_matrix {
                let out = BufWriter::new(File::create(path)?);
                write_route_matrix(&query, &oracle, out, |v| {
                    net.external_id(v).map(|e| e.to_string()).unwrap_or_default()
                })?;
            }
            match solve_exact_with(&query, &oracle, SolveOptions { faithful })? {
                SolveOutcome::Optimal {
                    route,
                    feasible_count,
                    d,
                } => {
                    println!(
                        "OPTIMAL aggregated={} max_gap={} feasible_count={} d={}",
                        route.aggregated, route.max_gap, feasible_count, d
                    );
                    print_route(&net, &route)?;
                }
                SolveOutcome::Infeasible { d, epsilon, witness } => {
                    println!("INFEASIBLE d={d} epsilon={epsilon}");
                    println!("witness {}", external(&net, &witness)?);
                }
            }
        }
        Command::SolveHeuristic {
            graph,
            query,
            index,
            fanout,
        } => {
            let (net, oracle) = load(&graph)?;
            let query = read_query(&query)?.resolve(&net)?;
            let result = match index {
                Some(IndexArg::Euclidean) => {
                    let ix = CategoryIndex::build(&net, query.categories(), fanout)?;
                    solve_heuristic_indexed(&query, &oracle, &ix)?
                }
                None => solve_heuristic(&query, &oracle)?,
            };
            let route = &result.route;
            println!(
                "{} aggregated={} max_gap={} gnn_queries={} nn_queries={}",
                if route.feasible { "FEASIBLE" } else { "INFEASIBLE" },
                route.aggregated,
                route.max_gap,
                result.gnn_queries,
                result.nn_queries
            );
            print_route(&net, route)?;
        }
        Command::Sweep { config, out } => {
            let config = SweepConfig::from_json(&std::fs::read_to_string(config)?)?;
            let records = run_sweep(&config)?;
            write_sweep_csv(&records, BufWriter::new(File::create(out)?))?;
            log::info!("wrote {} sweep records", records.len());
        }
        Command::Bench { config, out } => {
            let config = SweepConfig::from_json(&std::fs::read_to_string(config)?)?;
            let records = compare_solvers(&config)?;
            write_bench_csv(&records, BufWriter::new(File::create(out)?))?;
            log::info!("wrote {} comparison records", records.len());
        }
        Command::GenerateNetwork {
            vertices,
            edges,
            seed,
            out,
            coords_out,
        } => {
            let net = road_like_network(vertices, edges, seed)?;
            write_file(&out, &net.to_edge_list())?;
            if let Some(path) = coords_out {
                write_file(&path, &coordinates_to_string(&net).unwrap_or_default())?;
            }
        }
        Command::GenerateQuery {
            graph,
            k,
            per_category,
            group_size,
            threshold,
            seed,
            out,
        } => {
            let net = read_network(
                &graph.graph,
                graph.coords.as_deref(),
                graph.weighted,
                graph.euclidean_weights,
            )?;
            let cats = assign_categories(&net, k, per_category, seed)?;
            let query = generate_query(&net, group_size, &cats, threshold, seed)?;
            write_file(&out, &QueryFile::from_query(&query, &net)?.to_json()?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(threads) = std::env::var("EFGTP_THREADS").ok().and_then(|t| t.parse().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
