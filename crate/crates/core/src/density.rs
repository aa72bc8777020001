//! d²-density, the 2-density `m₂` and potentials.
//!
//! All comparisons are exact. Exhaustive routines sweep vertex subsets in
//! Gray-code order, updating the induced edge count with one popcount per
//! step, and split the subset space across rayon workers by fixing the top
//! bits of the universe.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{AdjRows, Graph, VertexSet};
use crate::rational::{cmp_fractions, ExactRational};

/// Largest universe swept exhaustively.
pub const EXHAUSTIVE_CAP: usize = 30;

/// `(e(G[A]) - 1) / (|A| - 2)`.
pub fn d2_density(g: &Graph, a: &VertexSet) -> Result<ExactRational> {
    check_members(g, a)?;
    let size = a.len();
    if size < 3 {
        return domain(format!("d2 density needs |A| >= 3, got {size}"));
    }
    ExactRational::new(g.edges_within(a) as i64 - 1, size as i64 - 2)
}

/// `(k+1)(k-2)|A| - 2(k-1) e(G[A])`.
pub fn potential(g: &Graph, k: usize, a: &VertexSet) -> Result<i64> {
    check_k(k)?;
    check_members(g, a)?;
    if a.is_empty() {
        return domain("potential of the empty set");
    }
    let (c_vertex, c_edge) = potential_coefficients(k);
    Ok(c_vertex * a.len() as i64 - c_edge * g.edges_within(a) as i64)
}

/// The lower bound on `m₂` of a `k`-chromatic graph: `(k+1)(k-2) / (2(k-1))`.
pub fn ky_bound(k: usize) -> ExactRational {
    let k = k as i64;
    ExactRational::new((k + 1) * (k - 2), 2 * (k - 1)).expect("k >= 2")
}

/// Thresholds used by the tower/complex potential lemmas: the general bound
/// `2(k+1)(k-2) - 2(k-1)` and the bound `2(k+1)(k-2)` for sets containing
/// the base.
pub fn potential_thresholds(k: usize) -> (i64, i64) {
    let (c_vertex, c_edge) = potential_coefficients(k);
    (2 * c_vertex - c_edge, 2 * c_vertex)
}

fn potential_coefficients(k: usize) -> (i64, i64) {
    let k = k as i64;
    ((k + 1) * (k - 2), 2 * (k - 1))
}

fn check_k(k: usize) -> Result<()> {
    if k < 4 {
        return domain(format!("potential requires k >= 4, got {k}"));
    }
    Ok(())
}

fn check_members(g: &Graph, a: &VertexSet) -> Result<()> {
    match a.iter().find(|&v| v >= g.vertex_count()) {
        Some(v) => Err(Error::VertexOutOfRange { vertex: v, n: g.vertex_count() }),
        None => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum M2Method {
    /// Full Gray-code sweep over all `2ⁿ` vertex subsets.
    Exhaustive,
    /// Parametric search: Dinkelbach iterations over minimum cuts.
    Parametric,
}

/// `m₂` together with a maximizing vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub value: ExactRational,
    pub witness: VertexSet,
    /// Subsets evaluated (exhaustive) or minimum cuts solved (parametric).
    pub subsets_examined: u64,
    pub method: M2Method,
}

/// The 2-density of `g`: the maximum of `d2_density` over vertex sets of
/// size at least 3. Only induced subgraphs need to be considered, since on
/// a fixed vertex set more edges only raise the ratio.
///
/// Ties are broken by the smallest witness, then by the lexicographically
/// smallest member list. Graphs above [`EXHAUSTIVE_CAP`] vertices require
/// `pruned`, which switches to the parametric min-cut search; its witness
/// obeys the same tie-break.
pub fn m2(g: &Graph, pruned: bool) -> Result<DensityReport> {
    let n = g.vertex_count();
    if n < 3 {
        return domain(format!("m2 needs at least 3 vertices, got {n}"));
    }
    if g.edge_count() < 2 {
        return domain("m2 needs at least 2 edges");
    }
    if pruned {
        return m2_parametric(g);
    }
    if n > EXHAUSTIVE_CAP {
        return Err(Error::CapExceeded { what: "exhaustive m2 vertex count", limit: EXHAUSTIVE_CAP as u64 });
    }
    Ok(m2_exhaustive(g))
}

/// Subset state for the Gray-code sweep: masks over original vertex ids.
struct SweepSpace {
    rows: Vec<u64>,
    universe: Vec<usize>,
}

impl SweepSpace {
    fn new(g: &Graph, universe: &[usize]) -> Self {
        let umask: u64 = universe.iter().map(|&v| 1u64 << v).sum();
        let rows = (0..g.vertex_count()).map(|v| g.row(v)[0] & umask).collect();
        Self { rows, universe: universe.to_vec() }
    }

    fn edges_in(&self, mask: u64) -> u32 {
        let mut m = mask;
        let mut total = 0;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            total += (self.rows[v] & mask).count_ones();
        }
        total / 2
    }

    /// Visits every subset of the universe exactly once; `visit` receives
    /// `(mask, size, edges)`. One accumulator per chunk is returned, in
    /// chunk order.
    fn sweep<R, F>(&self, init: impl Fn() -> R + Sync, visit: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&mut R, u64, u32, u32) + Sync,
    {
        let u = self.universe.len();
        let top = if u >= 20 { 6 } else if u >= 12 { 3 } else { 0 };
        let low = &self.universe[..u - top];
        let high = &self.universe[u - top..];
        (0..1u64 << top)
            .into_par_iter()
            .map(|chunk| {
                let mut acc = init();
                let mut mask: u64 = high.iter().enumerate().filter(|(i, _)| chunk >> i & 1 == 1).map(|(_, &v)| 1u64 << v).sum();
                let mut size = mask.count_ones();
                let mut edges = self.edges_in(mask);
                visit(&mut acc, mask, size, edges);
                for step in 1u64..1u64 << low.len() {
                    let v = low[step.trailing_zeros() as usize];
                    let bit = 1u64 << v;
                    if mask & bit == 0 {
                        edges += (self.rows[v] & mask).count_ones();
                        mask |= bit;
                        size += 1;
                    } else {
                        mask &= !bit;
                        edges -= (self.rows[v] & mask).count_ones();
                        size -= 1;
                    }
                    visit(&mut acc, mask, size, edges);
                }
                acc
            })
            .collect()
    }
}

/// Lexicographic comparison of the member lists of two equal-size masks.
fn lex_cmp_masks(a: u64, b: u64) -> Ordering {
    let d = a ^ b;
    if d == 0 {
        Ordering::Equal
    } else if a & d & d.wrapping_neg() != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    num: i64,
    den: i64,
    size: u32,
    mask: u64,
}

impl Candidate {
    /// `Less` means `self` is preferred.
    fn rank(&self, other: &Candidate) -> Ordering {
        cmp_fractions(other.num, other.den, self.num, self.den)
            .then(self.size.cmp(&other.size))
            .then_with(|| lex_cmp_masks(self.mask, other.mask))
    }
}

fn m2_exhaustive(g: &Graph) -> DensityReport {
    let n = g.vertex_count();
    let universe: Vec<usize> = (0..n).collect();
    let space = SweepSpace::new(g, &universe);
    let chunks = space.sweep(
        || (None::<Candidate>, 0u64),
        |(best, examined), mask, size, edges| {
            if size < 3 {
                return;
            }
            *examined += 1;
            let c = Candidate { num: edges as i64 - 1, den: size as i64 - 2, size, mask };
            if best.as_ref().is_none_or(|b| c.rank(b) == Ordering::Less) {
                *best = Some(c);
            }
        },
    );
    let examined = chunks.iter().map(|c| c.1).sum();
    let best = chunks.into_iter().filter_map(|c| c.0).min_by(|a, b| a.rank(b)).expect("n >= 3");
    DensityReport {
        value: ExactRational::new(best.num, best.den).expect("den > 0"),
        witness: VertexSet::from_mask(n, best.mask),
        subsets_examined: examined,
        method: M2Method::Exhaustive,
    }
}

/// Minimal vertex set `A ⊇ forced` maximizing `q·e(A) - p·|A|`, via the
/// project-selection network (edge nodes worth `q`, vertex nodes cost `p`).
fn min_closure(g: &Graph, edges: &[(usize, usize)], forced: &[usize], p: i64, q: i64) -> VertexSet {
    let n = g.vertex_count();
    let (s, t) = (0, 1);
    let inf = q * edges.len() as i64 + p * n as i64 + 1;
    let mut net = FlowNetwork::new(2 + n + edges.len());
    for (i, &(u, v)) in edges.iter().enumerate() {
        let node = 2 + n + i;
        net.add_arc(s, node, q);
        net.add_arc(node, 2 + u, inf);
        net.add_arc(node, 2 + v, inf);
    }
    for v in 0..n {
        net.add_arc(2 + v, t, p);
    }
    for &v in forced {
        net.add_arc(s, 2 + v, inf);
    }
    net.max_flow(s, t);
    let side = net.source_side(s);
    VertexSet::from_vertices(n, (0..n).filter(|&v| side[2 + v])).expect("in range")
}

fn reduced(num: i64, den: i64) -> (i64, i64) {
    let g = num_integer::gcd(num, den).max(1);
    (num / g, den / g)
}

fn m2_parametric(g: &Graph) -> Result<DensityReport> {
    let n = g.vertex_count();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let full = VertexSet::full(n);
    let mut lambda = reduced(g.edge_count() as i64 - 1, n as i64 - 2);
    let mut cuts = 0u64;

    // Every set with ratio above λ (≥ 1/(n-2) > 0) has at least two edges,
    // so forcing each edge in turn covers all improving sets; a forced edge
    // alone scores exactly zero, so any positive optimum has ≥ 3 vertices.
    loop {
        let (p, q) = lambda;
        let improved = edges
            .par_iter()
            .map(|&(u, v)| {
                let a = min_closure(g, &edges, &[u, v], p, q);
                let size = a.len() as i64;
                let e = g.edges_within(&a) as i64;
                (size >= 3).then(|| reduced(e - 1, size - 2)).filter(|&(num, den)| cmp_fractions(num, den, p, q).is_gt())
            })
            .collect::<Vec<_>>();
        cuts += edges.len() as u64;
        match improved.into_iter().flatten().max_by(|a, b| cmp_fractions(a.0, a.1, b.0, b.1)) {
            Some(better) => lambda = better,
            None => break,
        }
    }

    // Every smallest maximizer is the minimal maximizer containing any edge
    // of it plus any third member, so scanning (edge, vertex) triples finds
    // all of them.
    let (p, q) = lambda;
    let found: Vec<VertexSet> = edges
        .par_iter()
        .flat_map_iter(|&(u, v)| {
            let mut local: Vec<VertexSet> = Vec::new();
            for w in (0..n).filter(|&w| w != u && w != v) {
                let a = min_closure(g, &edges, &[u, v, w], p, q);
                let size = a.len() as i64;
                if size >= 3 && cmp_fractions(g.edges_within(&a) as i64 - 1, size - 2, p, q).is_eq() {
                    local.push(a);
                }
            }
            local
        })
        .collect();
    cuts += (edges.len() * (n - 2)) as u64;
    let witness = found
        .into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.lex_cmp(b)))
        .unwrap_or(full);
    Ok(DensityReport { value: ExactRational::new(p, q)?, witness, subsets_examined: cuts, method: M2Method::Parametric })
}

/// Which subsets a potential sweep covers.
#[derive(Clone, Debug, Default)]
pub struct SubsetFilter {
    /// Only subsets of this set are examined (all vertices when absent).
    pub universe: Option<VertexSet>,
    /// Only subsets of at most this size are examined.
    pub max_size: Option<usize>,
}

/// A set whose potential falls below the bound that applies to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub set: VertexSet,
    pub potential: i64,
    /// The largest threshold that applies to `set`.
    pub threshold: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaOutcome {
    pub examined: u64,
    pub violations: u64,
    /// The deepest violation: smallest `potential - threshold`, then smallest
    /// set, then lexicographically first.
    pub worst: Option<Violation>,
}

impl LemmaOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Examined count, violation count, and the worst violation as
/// `(slack, size, mask, potential, threshold)`.
type SweepTally = (u64, u64, Option<(i64, u32, u64, i64, i64)>);

/// Checks `potential(A) ≥ threshold_general` for every examined `A` with
/// `|A| ≥ 2`, and additionally `potential(A) ≥ threshold_base` when
/// `base ⊆ A`.
pub fn verify_potential_lemma(
    g: &Graph,
    k: usize,
    threshold_general: i64,
    threshold_base: i64,
    base: &VertexSet,
    filter: &SubsetFilter,
) -> Result<LemmaOutcome> {
    check_k(k)?;
    check_members(g, base)?;
    let n = g.vertex_count();
    let universe: Vec<usize> = match &filter.universe {
        Some(u) => {
            check_members(g, u)?;
            u.to_vec()
        }
        None => (0..n).collect(),
    };
    if n > 64 {
        return Err(Error::CapExceeded { what: "potential sweep graph size", limit: 64 });
    }
    let (c_vertex, c_edge) = potential_coefficients(k);
    let base_mask = base.to_mask().unwrap_or(0);
    let space = SweepSpace::new(g, &universe);

    let judge = move |state: &mut SweepTally, mask: u64, size: u32, edges: u32| {
        if size < 2 {
            return;
        }
        state.0 += 1;
        let rho = c_vertex * size as i64 - c_edge * edges as i64;
        let threshold = if mask & base_mask == base_mask { threshold_general.max(threshold_base) } else { threshold_general };
        if rho >= threshold {
            return;
        }
        state.1 += 1;
        let slack = rho - threshold;
        let better = match state.2 {
            None => true,
            Some((s, sz, m, _, _)) => slack.cmp(&s).then(size.cmp(&sz)).then_with(|| lex_cmp_masks(mask, m)).is_lt(),
        };
        if better {
            state.2 = Some((slack, size, mask, rho, threshold));
        }
    };

    let chunks = match filter.max_size {
        None => {
            if universe.len() > EXHAUSTIVE_CAP {
                return Err(Error::CapExceeded { what: "exhaustive sweep universe", limit: EXHAUSTIVE_CAP as u64 });
            }
            space.sweep(|| (0, 0, None), judge)
        }
        Some(limit) => {
            let count: f64 = (0..=limit.min(universe.len())).map(|i| binom_f64(universe.len(), i)).sum();
            if count > (1u64 << EXHAUSTIVE_CAP) as f64 {
                return Err(Error::CapExceeded { what: "bounded-size sweep subsets", limit: 1 << EXHAUSTIVE_CAP });
            }
            let mut state = (0, 0, None);
            bounded_subsets(&space, limit, &mut |mask, size, edges| judge(&mut state, mask, size, edges));
            vec![state]
        }
    };

    let examined = chunks.iter().map(|c| c.0).sum();
    let violations = chunks.iter().map(|c| c.1).sum();
    let worst = chunks
        .into_iter()
        .filter_map(|c| c.2)
        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then_with(|| lex_cmp_masks(a.2, b.2)))
        .map(|(_, _, mask, rho, threshold)| Violation { set: VertexSet::from_mask(n, mask), potential: rho, threshold });
    Ok(LemmaOutcome { examined, violations, worst })
}

fn binom_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Depth-first enumeration of all subsets of the universe with at most
/// `limit` members, with incremental edge counts.
fn bounded_subsets(space: &SweepSpace, limit: usize, visit: &mut dyn FnMut(u64, u32, u32)) {
    fn go(space: &SweepSpace, start: usize, mask: u64, size: u32, edges: u32, limit: usize, visit: &mut dyn FnMut(u64, u32, u32)) {
        visit(mask, size, edges);
        if size as usize == limit {
            return;
        }
        for i in start..space.universe.len() {
            let v = space.universe[i];
            let e = edges + (space.rows[v] & mask).count_ones();
            go(space, i + 1, mask | 1 << v, size + 1, e, limit, visit);
        }
    }
    go(space, 0, 0, 0, 0, limit, visit);
}
