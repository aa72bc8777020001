//! `K_m` counting and enumeration, clique number, per-edge statistics.
//!
//! Cliques are listed once each, as increasing vertex sequences: a clique is
//! extended only by candidates larger than its last vertex.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::graph::{iter_bits, popcount, AdjRows, Graph};
use crate::rational::ExactRational;

/// Default cap on enumerated cliques.
pub const DEFAULT_CLIQUE_CAP: u64 = 100_000_000;

/// `cand ∩ row(v) ∩ {w > v}`.
fn successors(g: &impl AdjRows, cand: &[u64], v: usize) -> Vec<u64> {
    let row = g.row(v);
    let mut out: Vec<u64> = cand.iter().zip(row).map(|(a, b)| a & b).collect();
    let wi = v >> 6;
    out[..wi].iter_mut().for_each(|w| *w = 0);
    out[wi] &= if v & 63 == 63 { 0 } else { !0u64 << ((v & 63) + 1) };
    out
}

/// Number of `size`-cliques inside the vertex set `cand`.
pub(crate) fn count_within(g: &impl AdjRows, cand: &[u64], size: usize) -> u64 {
    match size {
        0 => 1,
        1 => popcount(cand) as u64,
        _ => {
            if popcount(cand) < size {
                return 0;
            }
            iter_bits(cand).map(|v| count_within(g, &successors(g, cand, v), size - 1)).sum()
        }
    }
}

/// Number of `K_m` copies containing the edge `uv`.
pub fn cliques_on_edge(g: &impl AdjRows, u: usize, v: usize, m: usize) -> u64 {
    if m < 2 || !g.has_edge(u, v) {
        return 0;
    }
    let common: Vec<u64> = g.row(u).iter().zip(g.row(v)).map(|(a, b)| a & b).collect();
    count_within(g, &common, m - 2)
}

/// Number of `K_m` copies containing `v`.
pub fn cliques_on_vertex(g: &impl AdjRows, v: usize, m: usize) -> u64 {
    if m == 0 {
        return 0;
    }
    count_within(g, g.row(v), m - 1)
}

fn full_candidates(g: &impl AdjRows) -> Vec<u64> {
    let mut all = vec![0u64; g.words()];
    for v in 0..g.n() {
        all[v >> 6] |= 1 << (v & 63);
    }
    all
}

/// Total number of `K_m` copies, without per-edge bookkeeping.
pub fn clique_total(g: &(impl AdjRows + Sync), m: usize) -> Result<u64> {
    if m < 2 {
        return domain(format!("clique order must be >= 2, got {m}"));
    }
    let all = full_candidates(g);
    Ok((0..g.n()).into_par_iter().map(|v| count_within(g, &successors(g, &all, v), m - 1)).sum())
}

fn collect_from(g: &impl AdjRows, cand: &[u64], m: usize, current: &mut Vec<u32>, out: &mut Vec<u32>) {
    if current.len() == m {
        out.extend_from_slice(current);
        return;
    }
    if popcount(cand) < m - current.len() {
        return;
    }
    for v in iter_bits(cand) {
        current.push(v as u32);
        collect_from(g, &successors(g, cand, v), m, current, out);
        current.pop();
    }
}

/// Every `K_m` copy as an increasing vertex list, in lexicographic order.
pub fn list_cliques(g: &(impl AdjRows + Sync), m: usize, cap: u64) -> Result<Vec<Vec<usize>>> {
    let flat = list_flat(g, m, cap)?;
    Ok(flat.chunks(m).map(|c| c.iter().map(|&v| v as usize).collect()).collect())
}

fn list_flat(g: &(impl AdjRows + Sync), m: usize, cap: u64) -> Result<Vec<u32>> {
    if m < 2 {
        return domain(format!("clique order must be >= 2, got {m}"));
    }
    let total = clique_total(g, m)?;
    if total > cap {
        return Err(Error::CapExceeded { what: "clique enumeration", limit: cap });
    }
    let all = full_candidates(g);
    let parts: Vec<Vec<u32>> = (0..g.n())
        .into_par_iter()
        .map(|v| {
            let mut out = Vec::new();
            let mut current = vec![v as u32];
            collect_from(g, &successors(g, &all, v), m, &mut current, &mut out);
            out
        })
        .collect();
    Ok(parts.concat())
}

/// Clique statistics of a graph for one clique order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueStats {
    pub m: usize,
    pub total: u64,
    /// Copies containing each edge; edges in no copy are absent.
    pub per_edge: BTreeMap<(usize, usize), u64>,
    /// Unordered pairs of distinct copies sharing at least one edge.
    pub sharing_pairs: u64,
    /// Copies sharing an edge with at least one other copy.
    pub involved: u64,
}

impl CliqueStats {
    /// Fraction of copies that share an edge with another copy.
    pub fn involved_fraction(&self) -> Option<ExactRational> {
        (self.total > 0).then(|| ExactRational::new(self.involved as i64, self.total as i64).expect("total > 0"))
    }
}

/// Exact `K_m` statistics. Pairs sharing several edges are counted once:
/// a pair is attributed to the edge spanned by its two smallest shared
/// vertices.
pub fn count_cliques(g: &Graph, m: usize) -> Result<CliqueStats> {
    count_cliques_with_cap(g, m, DEFAULT_CLIQUE_CAP)
}

pub fn count_cliques_with_cap(g: &Graph, m: usize, cap: u64) -> Result<CliqueStats> {
    let flat = list_flat(g, m, cap)?;
    let total = (flat.len() / m) as u64;
    let mut by_edge: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (id, clique) in flat.chunks(m).enumerate() {
        for i in 0..m {
            for j in i + 1..m {
                by_edge.entry((clique[i], clique[j])).or_default().push(id as u32);
            }
        }
    }
    let per_edge: BTreeMap<(usize, usize), u64> =
        by_edge.iter().map(|(&(u, v), ids)| ((u as usize, v as usize), ids.len() as u64)).collect();

    let mut involved = vec![false; total as usize];
    let mut sharing_pairs = 0u64;
    for (&edge, ids) in by_edge.iter().filter(|(_, ids)| ids.len() >= 2) {
        for (i, &a) in ids.iter().enumerate() {
            involved[a as usize] = true;
            let ca = &flat[a as usize * m..(a as usize + 1) * m];
            for &b in &ids[i + 1..] {
                let cb = &flat[b as usize * m..(b as usize + 1) * m];
                if first_shared_pair(ca, cb) == Some(edge) {
                    sharing_pairs += 1;
                }
            }
        }
    }
    Ok(CliqueStats { m, total, per_edge, sharing_pairs, involved: involved.iter().filter(|&&x| x).count() as u64 })
}

/// The two smallest common members of two increasing sequences.
fn first_shared_pair(a: &[u32], b: &[u32]) -> Option<(u32, u32)> {
    let (mut i, mut j) = (0, 0);
    let mut found = Vec::with_capacity(2);
    while i < a.len() && j < b.len() && found.len() < 2 {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                found.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    (found.len() == 2).then(|| (found[0], found[1]))
}

/// `|E| · Σ c_e² / (Σ c_e)²` over all edges, where `c_e` counts copies of
/// `K_m` on `e`: the second moment ratio of the clique count on a uniformly
/// random edge.
pub fn second_moment_ratio(g: &Graph, m: usize) -> Result<ExactRational> {
    if g.edge_count() == 0 {
        return domain("second moment ratio needs at least one edge");
    }
    let stats = count_cliques(g, m)?;
    if stats.total == 0 {
        return domain("second moment ratio undefined: no cliques");
    }
    let sum: i128 = stats.per_edge.values().map(|&c| c as i128).sum();
    let sum_sq: i128 = stats.per_edge.values().map(|&c| (c as i128) * (c as i128)).sum();
    let num = num_bigint::BigInt::from(g.edge_count() as i128 * sum_sq);
    let den = num_bigint::BigInt::from(sum * sum);
    ExactRational::from_big(num, den)
}

/// Size of a largest clique (branch and bound with a greedy colouring bound).
pub fn clique_number(g: &impl AdjRows) -> usize {
    let mut best = 0;
    if g.n() == 0 {
        return 0;
    }
    expand(g, full_candidates(g), 0, &mut best);
    best
}

fn expand(g: &impl AdjRows, cand: Vec<u64>, size: usize, best: &mut usize) {
    let (order, bounds) = colour_order(g, &cand);
    let mut cand = cand;
    for idx in (0..order.len()).rev() {
        if size + bounds[idx] <= *best {
            return;
        }
        let v = order[idx];
        let next: Vec<u64> = cand.iter().zip(g.row(v)).map(|(a, b)| a & b).collect();
        if next.iter().all(|&w| w == 0) {
            *best = (*best).max(size + 1);
        } else {
            expand(g, next, size + 1, best);
        }
        cand[v >> 6] &= !(1 << (v & 63));
    }
}

/// Greedy sequential colouring of `cand`; returns vertices in colour order
/// and, for each, the number of colours used so far.
fn colour_order(g: &impl AdjRows, cand: &[u64]) -> (Vec<usize>, Vec<usize>) {
    let mut uncoloured = cand.to_vec();
    let mut order = Vec::new();
    let mut bounds = Vec::new();
    let mut colour = 0;
    while uncoloured.iter().any(|&w| w != 0) {
        colour += 1;
        let mut avail = uncoloured.clone();
        loop {
            let Some(v) = iter_bits(&avail).next() else { break };
            avail[v >> 6] &= !(1 << (v & 63));
            uncoloured[v >> 6] &= !(1 << (v & 63));
            for (a, b) in avail.iter_mut().zip(g.row(v)) {
                *a &= !b;
            }
            order.push(v);
            bounds.push(colour);
        }
    }
    (order, bounds)
}
