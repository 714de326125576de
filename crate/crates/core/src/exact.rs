// SPDX-License-Identifier: Apache-2.0

//! Exhaustive envy-free trip planning.
//!
//! Every member walks the same POI chain, so the chain length cancels in any
//! pairwise difference of individual distances and the envy gap of a
//! combination depends only on its first and last POI:
//!
//! ```text
//! gap(rho) = max_i e_i - min_i e_i,   e_i = dist(s_i, v_1) + dist(v_k, d_i)
//! ```
//!
//! The default solver uses that identity to decide feasibility and to find the
//! minimum achievable gap over `n_1 * n_k` endpoint pairs. Faithful mode walks
//! every combination and compares every member pair the long way.
//!
//! All sums run in a fixed order (source leg, chain legs left to right,
//! destination leg; members by index) and ties break on the lexicographically
//! smallest tuple of per-category positions, so results are independent of
//! the worker count.

use std::cmp::Ordering;
use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::CategoryAssignment;
use crate::oracle::DistanceOracle;
use crate::query::{EfGtpQuery, PoiCombination};
use crate::Length;

/// Largest instance the debug route matrix dump accepts.
pub const ROUTE_MATRIX_LIMIT: u128 = 1_000_000;

/// Faithful-mode progress is logged after this many combinations.
pub const PROGRESS_INTERVAL: u64 = 1_000_000;

/// A combination with its per-member and aggregated distances.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedRoute {
    pub combination: PoiCombination,
    pub per_member: Vec<Length>,
    pub aggregated: Length,
    pub max_gap: Length,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    /// `d` is the smallest envy gap over all combinations.
    Optimal {
        route: EvaluatedRoute,
        feasible_count: u64,
        d: Length,
    },
    Infeasible {
        d: Length,
        epsilon: Length,
        witness: PoiCombination,
    },
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Optimal { .. })
    }

    pub fn feasible_count(&self) -> u64 {
        match self {
            SolveOutcome::Optimal { feasible_count, .. } => *feasible_count,
            SolveOutcome::Infeasible { .. } => 0,
        }
    }

    pub fn d(&self) -> Length {
        match self {
            SolveOutcome::Optimal { d, .. } | SolveOutcome::Infeasible { d, .. } => *d,
        }
    }

    /// Zero for feasible instances.
    pub fn epsilon(&self) -> Length {
        match self {
            SolveOutcome::Optimal { .. } => 0.0,
            SolveOutcome::Infeasible { epsilon, .. } => *epsilon,
        }
    }

    pub fn optimal_aggregated(&self) -> Option<Length> {
        match self {
            SolveOutcome::Optimal { route, .. } => Some(route.aggregated),
            SolveOutcome::Infeasible { .. } => None,
        }
    }
}

/// Result of the minimum-additional-distance problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Infeasibility {
    pub d: Length,
    pub epsilon: Length,
    pub witness: PoiCombination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    /// Enumerate every combination and compare every member pair.
    pub faithful: bool,
}

fn checked_member(query: &EfGtpQuery, member: usize) -> Result<()> {
    if member < query.b() {
        Ok(())
    } else {
        Err(Error::InvalidMemberIndex {
            index: member,
            size: query.b(),
        })
    }
}

/// Distance travelled by one member along `rho`.
pub fn individual_distance(
    query: &EfGtpQuery,
    member: usize,
    rho: &PoiCombination,
    oracle: &DistanceOracle,
) -> Result<Length> {
    checked_member(query, member)?;
    query.check_combination(rho)?;
    let group = query.group();
    let mut acc = oracle.dist(group.sources()[member], rho.first())?;
    for pair in rho.pois.windows(2) {
        acc += oracle.dist(pair[0], pair[1])?;
    }
    acc += oracle.dist(rho.last(), group.destinations()[member])?;
    Ok(acc)
}

fn member_distances(
    query: &EfGtpQuery,
    rho: &PoiCombination,
    oracle: &DistanceOracle,
) -> Result<Vec<Length>> {
    (0..query.b())
        .map(|i| individual_distance(query, i, rho, oracle))
        .collect()
}

fn sum_in_order(values: &[Length]) -> Length {
    values.iter().fold(0.0, |acc, &x| acc + x)
}

/// Total distance travelled by the group along `rho`.
pub fn aggregated_distance(
    query: &EfGtpQuery,
    rho: &PoiCombination,
    oracle: &DistanceOracle,
) -> Result<Length> {
    Ok(sum_in_order(&member_distances(query, rho, oracle)?))
}

/// Largest absolute difference over all member pairs; zero for one member.
pub fn pairwise_gap(per_member: &[Length]) -> Length {
    let mut max = 0.0;
    for i in 0..per_member.len() {
        for j in (i + 1)..per_member.len() {
            let g = (per_member[i] - per_member[j]).abs();
            if g > max {
                max = g;
            }
        }
    }
    max
}

/// Spread of the endpoint terms `dist(s_i, v_1) + dist(v_k, d_i)`.
fn endpoint_spread(endpoint_terms: impl Iterator<Item = Length>) -> Length {
    let mut lo = Length::INFINITY;
    let mut hi = Length::NEG_INFINITY;
    for e in endpoint_terms {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    hi - lo
}

/// Envy gap of `rho`, computed from its endpoint legs.
///
/// Equals [`pairwise_gap`] of the individual distances; the two agree
/// bit-for-bit whenever leg sums are exactly representable (e.g. integer
/// lengths).
pub fn max_pair_gap(
    query: &EfGtpQuery,
    rho: &PoiCombination,
    oracle: &DistanceOracle,
) -> Result<Length> {
    query.check_combination(rho)?;
    let group = query.group();
    let terms = group
        .sources()
        .iter()
        .zip(group.destinations())
        .map(|(&s, &d)| Ok(oracle.dist(s, rho.first())? + oracle.dist(rho.last(), d)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(endpoint_spread(terms.into_iter()))
}

/// Evaluates `rho` with the same arithmetic as the default solver.
pub fn evaluate_route(
    query: &EfGtpQuery,
    rho: &PoiCombination,
    oracle: &DistanceOracle,
) -> Result<EvaluatedRoute> {
    let per_member = member_distances(query, rho, oracle)?;
    let aggregated = sum_in_order(&per_member);
    let max_gap = max_pair_gap(query, rho, oracle)?;
    Ok(EvaluatedRoute {
        combination: rho.clone(),
        per_member,
        aggregated,
        max_gap,
        feasible: max_gap <= query.threshold(),
    })
}

/// Lexicographic odometer over per-category positions.
#[derive(Debug, Clone)]
pub struct Combinations<'a> {
    categories: &'a CategoryAssignment,
    positions: Vec<usize>,
    done: bool,
}

impl Iterator for Combinations<'_> {
    type Item = PoiCombination;

    fn next(&mut self) -> Option<PoiCombination> {
        if self.done {
            return None;
        }
        let current = PoiCombination::new(
            self.positions
                .iter()
                .enumerate()
                .map(|(i, &p)| self.categories.category(i)[p])
                .collect(),
        );
        self.done = !advance(&mut self.positions, &self.categories.sizes(), 0);
        Some(current)
    }
}

/// Advances `positions[from..]` to the next tuple; false once exhausted.
fn advance(positions: &mut [usize], sizes: &[usize], from: usize) -> bool {
    for i in (from..positions.len()).rev() {
        positions[i] += 1;
        if positions[i] < sizes[i] {
            return true;
        }
        positions[i] = 0;
    }
    false
}

/// Streams every combination, last category varying fastest.
pub fn enumerate_combinations(categories: &CategoryAssignment) -> Result<Combinations<'_>> {
    if let Some(i) = categories.sizes().iter().position(|&s| s == 0) {
        return Err(Error::EmptyCategory(i));
    }
    Ok(Combinations {
        categories,
        positions: vec![0; categories.k()],
        done: false,
    })
}

/// Leg lengths gathered once per query into flat tables.
struct Legs {
    b: usize,
    sizes: Vec<usize>,
    /// `source[p * b + i] = dist(s_i, V_1[p])`
    source: Vec<Length>,
    /// `dest[p * b + i] = dist(V_k[p], d_i)`
    dest: Vec<Length>,
    /// `chain[j][p * n_{j+1} + q] = dist(V_j[p], V_{j+1}[q])`
    chain: Vec<Vec<Length>>,
}

impl Legs {
    fn gather(query: &EfGtpQuery, oracle: &DistanceOracle) -> Result<Self> {
        let cats = query.categories();
        let group = query.group();
        let b = query.b();
        let k = cats.k();
        let first = cats.category(0);
        let last = cats.category(k - 1);

        let mut source = vec![0.0; first.len() * b];
        for (i, &s) in group.sources().iter().enumerate() {
            for (p, d) in oracle.dist_many(s, first)?.into_iter().enumerate() {
                source[p * b + i] = d;
            }
        }
        let mut dest = Vec::with_capacity(last.len() * b);
        for &v in last {
            dest.extend(oracle.dist_many(v, group.destinations())?);
        }
        let mut chain = Vec::with_capacity(k.saturating_sub(1));
        for j in 0..k.saturating_sub(1) {
            let next = cats.category(j + 1);
            let mut table = Vec::with_capacity(cats.category(j).len() * next.len());
            for &v in cats.category(j) {
                table.extend(oracle.dist_many(v, next)?);
            }
            chain.push(table);
        }
        Ok(Self {
            b,
            sizes: cats.sizes(),
            source,
            dest,
            chain,
        })
    }

    fn k(&self) -> usize {
        self.sizes.len()
    }

    fn member_distances(&self, pos: &[usize], out: &mut [Length]) {
        let (first, last) = (pos[0], pos[self.k() - 1]);
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = self.source[first * self.b + i];
            for (j, table) in self.chain.iter().enumerate() {
                acc += table[pos[j] * self.sizes[j + 1] + pos[j + 1]];
            }
            acc += self.dest[last * self.b + i];
            *slot = acc;
        }
    }

    fn endpoint_gap(&self, first: usize, last: usize) -> Length {
        endpoint_spread(
            (0..self.b).map(|i| self.source[first * self.b + i] + self.dest[last * self.b + i]),
        )
    }

    /// Endpoint position pairs a combination can have. For `k = 1` the first
    /// and last POI coincide.
    fn endpoint_pairs(&self) -> Vec<(usize, usize)> {
        let n_first = self.sizes[0];
        if self.k() == 1 {
            (0..n_first).map(|p| (p, p)).collect()
        } else {
            let n_last = self.sizes[self.k() - 1];
            (0..n_first)
                .flat_map(|p| (0..n_last).map(move |q| (p, q)))
                .collect()
        }
    }

    /// Smallest endpoint gap and the lexicographically smallest pair reaching it.
    fn min_endpoint_gap(&self) -> (Length, (usize, usize)) {
        let mut best = (Length::INFINITY, (0, 0));
        for (p, q) in self.endpoint_pairs() {
            let g = self.endpoint_gap(p, q);
            if g < best.0 {
                best = (g, (p, q));
            }
        }
        best
    }

    fn witness_positions(&self, first: usize, last: usize) -> Vec<usize> {
        let mut pos = vec![0; self.k()];
        pos[0] = first;
        let k = self.k();
        pos[k - 1] = last;
        pos
    }
}

/// Best feasible combination, minimum gap witness and feasible count for one
/// slice of the combination space.
#[derive(Debug, Clone, Default)]
struct Partial {
    best: Option<(Length, Vec<usize>)>,
    min_gap: Option<(Length, Vec<usize>)>,
    feasible: u64,
}

fn better(candidate: &(Length, Vec<usize>), incumbent: &Option<(Length, Vec<usize>)>) -> bool {
    match incumbent {
        None => true,
        Some(cur) => {
            candidate
                .0
                .total_cmp(&cur.0)
                .then_with(|| candidate.1.cmp(&cur.1))
                == Ordering::Less
        }
    }
}

impl Partial {
    fn offer_best(&mut self, value: Length, pos: &[usize]) {
        let cand = (value, pos.to_vec());
        if better(&cand, &self.best) {
            self.best = Some(cand);
        }
    }

    fn offer_gap(&mut self, gap: Length, pos: &[usize]) {
        let cand = (gap, pos.to_vec());
        if better(&cand, &self.min_gap) {
            self.min_gap = Some(cand);
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        if let Some(b) = other.best {
            if better(&b, &self.best) {
                self.best = Some(b);
            }
        }
        if let Some(g) = other.min_gap {
            if better(&g, &self.min_gap) {
                self.min_gap = Some(g);
            }
        }
        self.feasible += other.feasible;
        self
    }
}

/// `d - threshold`, nudged up by ulps if needed so `threshold + epsilon >= d`
/// holds in floating point.
pub(crate) fn additional_distance(d: Length, threshold: Length) -> Length {
    let mut epsilon = d - threshold;
    while threshold + epsilon < d {
        epsilon = epsilon.next_up();
    }
    epsilon
}

/// Solves the query exhaustively with default options.
pub fn solve_exact(query: &EfGtpQuery, oracle: &DistanceOracle) -> Result<SolveOutcome> {
    solve_exact_with(query, oracle, SolveOptions::default())
}

pub fn solve_exact_with(
    query: &EfGtpQuery,
    oracle: &DistanceOracle,
    options: SolveOptions,
) -> Result<SolveOutcome> {
    enumerate_combinations(query.categories())?;
    let legs = Legs::gather(query, oracle)?;
    let partial = if options.faithful {
        faithful_scan(query, &legs)
    } else {
        let (d, (p, q)) = legs.min_endpoint_gap();
        if d > query.threshold() {
            return Ok(SolveOutcome::Infeasible {
                d,
                epsilon: additional_distance(d, query.threshold()),
                witness: query.combination_at(&legs.witness_positions(p, q)),
            });
        }
        let mut partial = feasible_scan(query, &legs);
        partial.min_gap = Some((d, legs.witness_positions(p, q)));
        partial
    };
    let (d, gap_pos) = partial.min_gap.expect("nonempty combination space");
    match partial.best {
        Some((_, pos)) => {
            let combination = query.combination_at(&pos);
            let mut per_member = vec![0.0; legs.b];
            legs.member_distances(&pos, &mut per_member);
            let aggregated = sum_in_order(&per_member);
            let max_gap = if options.faithful {
                pairwise_gap(&per_member)
            } else {
                legs.endpoint_gap(pos[0], pos[legs.k() - 1])
            };
            Ok(SolveOutcome::Optimal {
                route: EvaluatedRoute {
                    combination,
                    per_member,
                    aggregated,
                    max_gap,
                    feasible: true,
                },
                feasible_count: partial.feasible,
                d,
            })
        }
        None => Ok(SolveOutcome::Infeasible {
            d,
            epsilon: additional_distance(d, query.threshold()),
            witness: query.combination_at(&gap_pos),
        }),
    }
}

/// Walks every combination whose endpoint pair is feasible.
fn feasible_scan(query: &EfGtpQuery, legs: &Legs) -> Partial {
    let k = legs.k();
    let threshold = query.threshold();
    (0..legs.sizes[0])
        .into_par_iter()
        .map(|first| {
            let mut partial = Partial::default();
            let mut pos = vec![0; k];
            pos[0] = first;
            let mut dist = vec![0.0; legs.b];
            loop {
                let last = pos[k - 1];
                if legs.endpoint_gap(first, last) <= threshold {
                    legs.member_distances(&pos, &mut dist);
                    partial.feasible += 1;
                    partial.offer_best(sum_in_order(&dist), &pos);
                }
                if !advance(&mut pos, &legs.sizes, 1) {
                    break;
                }
            }
            partial
        })
        .reduce(Partial::default, Partial::merge)
}

/// Literal full enumeration: every combination, every member pair.
fn faithful_scan(query: &EfGtpQuery, legs: &Legs) -> Partial {
    let k = legs.k();
    let b = legs.b;
    let threshold = query.threshold();
    let pairs = (b * b.saturating_sub(1) / 2) as u64;
    let total = query.categories().combination_count();
    let processed = AtomicU64::new(0);
    (0..legs.sizes[0])
        .into_par_iter()
        .map(|first| {
            let mut partial = Partial::default();
            let mut pos = vec![0; k];
            pos[0] = first;
            let mut dist = vec![0.0; b];
            let mut local = 0u64;
            loop {
                legs.member_distances(&pos, &mut dist);
                let aggregated = sum_in_order(&dist);
                let mut count = 0u64;
                let mut max = 0.0;
                for i in 0..b {
                    for j in (i + 1)..b {
                        let g = (dist[i] - dist[j]).abs();
                        if g <= threshold {
                            count += 1;
                        }
                        if g > max {
                            max = g;
                        }
                    }
                }
                partial.offer_gap(max, &pos);
                if count == pairs {
                    partial.feasible += 1;
                    partial.offer_best(aggregated, &pos);
                }
                local += 1;
                if local == 4096 {
                    report_progress(&processed, local, total);
                    local = 0;
                }
                if !advance(&mut pos, &legs.sizes, 1) {
                    break;
                }
            }
            report_progress(&processed, local, total);
            partial
        })
        .reduce(Partial::default, Partial::merge)
}

fn report_progress(processed: &AtomicU64, add: u64, total: u128) {
    let before = processed.fetch_add(add, AtomicOrdering::Relaxed);
    let after = before + add;
    if after / PROGRESS_INTERVAL > before / PROGRESS_INTERVAL {
        log::info!("evaluated {after} of {total} combinations");
    }
}

/// Minimum gap `d`, the slack `epsilon = d - D` and a witness reaching `d`.
///
/// Only defined for infeasible queries.
pub fn min_additional_distance(
    query: &EfGtpQuery,
    oracle: &DistanceOracle,
) -> Result<Infeasibility> {
    enumerate_combinations(query.categories())?;
    let legs = Legs::gather(query, oracle)?;
    let (d, (p, q)) = legs.min_endpoint_gap();
    if d <= query.threshold() {
        return Err(Error::FeasibleInstance);
    }
    Ok(Infeasibility {
        d,
        epsilon: additional_distance(d, query.threshold()),
        witness: query.combination_at(&legs.witness_positions(p, q)),
    })
}

/// Envy gap of every endpoint pair, in enumeration order.
pub fn endpoint_gaps(query: &EfGtpQuery, oracle: &DistanceOracle) -> Result<Vec<Length>> {
    enumerate_combinations(query.categories())?;
    let legs = Legs::gather(query, oracle)?;
    Ok(legs
        .endpoint_pairs()
        .into_iter()
        .map(|(p, q)| legs.endpoint_gap(p, q))
        .collect())
}

/// Writes the debug route matrix as CSV: `v1..vk,aggregated,max_gap,feasible`.
///
/// Rows follow enumeration order and use the faithful pairwise gap. `label`
/// maps internal ids to the names printed in the `v` columns.
pub fn write_route_matrix<W: Write>(
    query: &EfGtpQuery,
    oracle: &DistanceOracle,
    out: W,
    label: impl Fn(usize) -> String,
) -> Result<()> {
    let combinations = query.categories().combination_count();
    if combinations > ROUTE_MATRIX_LIMIT {
        return Err(Error::CombinationGuard {
            combinations,
            limit: ROUTE_MATRIX_LIMIT,
        });
    }
    let legs = Legs::gather(query, oracle)?;
    let k = legs.k();
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
    header.extend(["aggregated", "max_gap", "feasible"].map(String::from));
    writer.write_record(&header)?;

    let mut pos = vec![0; k];
    let mut dist = vec![0.0; legs.b];
    loop {
        legs.member_distances(&pos, &mut dist);
        let gap = pairwise_gap(&dist);
        let mut row: Vec<String> = pos
            .iter()
            .enumerate()
            .map(|(i, &p)| label(query.categories().category(i)[p]))
            .collect();
        row.push(format!("{}", sum_in_order(&dist)));
        row.push(format!("{gap}"));
        row.push(if gap <= query.threshold() { "1" } else { "0" }.to_string());
        writer.write_record(&row)?;
        if !advance(&mut pos, &legs.sizes, 0) {
            break;
        }
    }
    writer.flush()?;
    Ok(())
}
