//! H-free clique maximization: subgraph containment, the `K_m` cleanup,
//! an exact branch-and-bound for tiny hosts, and two lower-bound heuristics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cliques::{clique_total, cliques_on_edge, count_cliques, count_within};
use crate::coloring::{chromatic_number, Budget};
use crate::density::{m2, EXHAUSTIVE_CAP};
use crate::error::{domain, Error, Result};
use crate::graph::{iter_bits, words_for, AdjRows, Adjacency, Graph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Exact,
    Partite,
    Delete,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Partite => "partite",
            Method::Delete => "delete",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Method::Exact),
            "partite" => Ok(Method::Partite),
            "delete" => Ok(Method::Delete),
            other => domain(format!("unknown method {other:?}")),
        }
    }
}

/// A spanning subgraph of a host, with its `K_m` count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalResult {
    pub method: Method,
    pub survivor: Graph,
    pub clique_count: u64,
    pub host_edges: usize,
    pub h_free_certified: bool,
}

impl ExtremalResult {
    /// One `key=value` line.
    pub fn record(&self) -> String {
        format!(
            "method={} clique_count={} h_free_certified={} edges_kept={} edges_total={}",
            self.method,
            self.clique_count,
            self.h_free_certified,
            self.survivor.edge_count(),
            self.host_edges
        )
    }
}

/// One embedded copy of a pattern: the image of its non-isolated vertices
/// and its edge set, both sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PatternCopy {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// Search order over the non-isolated pattern vertices. Each vertex after
/// the first maximizes its number of already-placed neighbours.
struct Pattern {
    n: usize,
    edges: Vec<(usize, usize)>,
    order: Vec<usize>,
    back: Vec<Vec<usize>>,
    degree: Vec<usize>,
}

impl Pattern {
    fn new(p: &Graph) -> Self {
        let n = p.vertex_count();
        let degree: Vec<usize> = (0..n).map(|v| p.degree(v)).collect();
        let mut remaining: Vec<usize> = (0..n).filter(|&v| degree[v] > 0).collect();
        let mut order = Vec::with_capacity(remaining.len());
        let mut placed = vec![false; n];
        while !remaining.is_empty() {
            let (idx, _) = remaining
                .iter()
                .enumerate()
                .max_by(|(_, &a), (_, &b)| {
                    let na = p.neighbors(a).filter(|&w| placed[w]).count();
                    let nb = p.neighbors(b).filter(|&w| placed[w]).count();
                    (na, degree[a]).cmp(&(nb, degree[b])).then(b.cmp(&a))
                })
                .expect("nonempty");
            let v = remaining.remove(idx);
            placed[v] = true;
            order.push(v);
        }
        let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let back = order
            .iter()
            .enumerate()
            .map(|(i, &v)| p.neighbors(v).map(|w| pos[&w]).filter(|&j| j < i).collect())
            .collect();
        Pattern { n, edges: p.edges().collect(), order, back, degree }
    }

    fn fits(&self, g: &impl AdjRows, host_edges: usize) -> bool {
        self.n <= g.n() && self.edges.len() <= host_edges
    }

    /// Calls `visit` with every injective edge-preserving map of the
    /// non-isolated vertices (indexed by search position); stops when
    /// `visit` returns `false`.
    fn search(&self, g: &impl AdjRows, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let host_deg: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
        let mut used = vec![0u64; words_for(g.n())];
        let mut map = Vec::with_capacity(self.order.len());
        self.extend(g, &host_deg, &mut used, &mut map, visit);
    }

    fn extend(
        &self,
        g: &impl AdjRows,
        host_deg: &[usize],
        used: &mut Vec<u64>,
        map: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let d = map.len();
        if d == self.order.len() {
            return visit(map);
        }
        let need = self.degree[self.order[d]];
        let mut cand: Vec<u64> = match self.back[d].first() {
            Some(&b) => g.row(map[b]).to_vec(),
            None => {
                let mut all = vec![0u64; g.words()];
                (0..g.n()).for_each(|v| all[v >> 6] |= 1 << (v & 63));
                all
            }
        };
        for &b in self.back[d].iter().skip(1) {
            cand.iter_mut().zip(g.row(map[b])).for_each(|(c, r)| *c &= r);
        }
        cand.iter_mut().zip(used.iter()).for_each(|(c, u)| *c &= !u);
        for x in iter_bits(&cand) {
            if host_deg[x] < need {
                continue;
            }
            used[x >> 6] |= 1 << (x & 63);
            map.push(x);
            let go_on = self.extend(g, host_deg, used, map, visit);
            map.pop();
            used[x >> 6] &= !(1 << (x & 63));
            if !go_on {
                return false;
            }
        }
        true
    }

    fn copy_of(&self, map: &[usize]) -> PatternCopy {
        let mut image = BTreeMap::new();
        for (i, &v) in self.order.iter().enumerate() {
            image.insert(v, map[i]);
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (image[&a], image[&b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        let mut vertices: Vec<usize> = map.to_vec();
        vertices.sort_unstable();
        PatternCopy { vertices, edges }
    }

    /// Full vertex map: isolated pattern vertices go to the smallest unused
    /// host vertices.
    fn full_map(&self, g_n: usize, map: &[usize]) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.n];
        let mut used = vec![false; g_n];
        for (i, &v) in self.order.iter().enumerate() {
            out[v] = map[i];
            used[map[i]] = true;
        }
        let mut free = (0..g_n).filter(|&x| !used[x]);
        for slot in out.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = free.next().expect("pattern fits host");
        }
        out
    }
}

fn find_copy(g: &impl AdjRows, host_edges: usize, pattern: &Pattern) -> Option<Vec<usize>> {
    if !pattern.fits(g, host_edges) {
        return None;
    }
    let mut found = None;
    pattern.search(g, &mut |map| {
        found = Some(map.to_vec());
        false
    });
    found
}

/// Whether `g` has a (not necessarily induced) subgraph isomorphic to
/// `pattern`, with the first embedding found as `witness[pattern vertex]`.
pub fn contains(g: &Graph, pattern: &Graph) -> Result<Option<Vec<usize>>> {
    if pattern.vertex_count() == 0 {
        return domain("pattern must have at least one vertex");
    }
    let p = Pattern::new(pattern);
    Ok(find_copy(g, g.edge_count(), &p).map(|map| p.full_map(g.vertex_count(), &map)))
}

/// All copies of `pattern` in `g`, distinct as edge sets, sorted.
pub fn enumerate_copies(g: &Graph, pattern: &Graph, cap: usize) -> Result<Vec<PatternCopy>> {
    if cap == 0 {
        return domain("copy cap must be >= 1");
    }
    if pattern.vertex_count() == 0 {
        return domain("pattern must have at least one vertex");
    }
    let p = Pattern::new(pattern);
    if !p.fits(g, g.edge_count()) {
        return Ok(Vec::new());
    }
    let mut seen = BTreeSet::new();
    let mut overflow = false;
    p.search(g, &mut |map| {
        seen.insert(p.copy_of(map));
        overflow = seen.len() > cap;
        !overflow
    });
    if overflow {
        return Err(Error::CapExceeded { what: "pattern copies", limit: cap as u64 });
    }
    Ok(seen.into_iter().collect())
}

/// Deletes every edge in two or more `K_m` copies until none is, then every
/// edge in no copy. Each remaining edge lies in exactly one copy.
pub fn km_cleanup(g: &Graph, m: usize) -> Result<Graph> {
    if m < 2 {
        return domain(format!("clique order must be >= 2, got {m}"));
    }
    let mut current = g.clone();
    loop {
        let stats = count_cliques(&current, m)?;
        let shared: Vec<(usize, usize)> = stats.per_edge.iter().filter(|(_, &c)| c >= 2).map(|(&e, _)| e).collect();
        if shared.is_empty() {
            let idle: Vec<(usize, usize)> = current.edges().filter(|e| !stats.per_edge.contains_key(e)).collect();
            return if idle.is_empty() { Ok(current) } else { current.with_edges_removed(&idle) };
        }
        current = current.with_edges_removed(&shared)?;
    }
}

/// Node limit of the exact search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactBudget {
    pub max_nodes: u64,
}

impl Default for ExactBudget {
    fn default() -> Self {
        ExactBudget { max_nodes: 20_000_000 }
    }
}

struct ExactSearch<'a> {
    pattern: &'a Pattern,
    m: usize,
    budget: u64,
    nodes: u64,
    kept: BTreeSet<(usize, usize)>,
    best: Option<(u64, Vec<(usize, usize)>)>,
}

impl ExactSearch<'_> {
    fn run(&mut self, g: &mut Adjacency) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExhausted(format!("exact search exceeded {} nodes", self.budget)));
        }
        // Deleting edges never creates cliques.
        let bound = clique_total(g, self.m)?;
        if matches!(&self.best, Some((b, _)) if bound <= *b) {
            return Ok(());
        }
        let Some(map) = find_copy(g, g.edge_count(), self.pattern) else {
            self.best = Some((bound, g.edges().collect()));
            return Ok(());
        };
        let copy = self.pattern.copy_of(&map);
        let branch: Vec<(usize, usize)> = copy.edges.into_iter().filter(|e| !self.kept.contains(e)).collect();
        for &(u, v) in &branch {
            g.remove_edge(u, v);
            let r = self.run(g);
            g.add_edge(u, v)?;
            r?;
            self.kept.insert((u, v));
        }
        for e in &branch {
            self.kept.remove(e);
        }
        Ok(())
    }
}

/// Maximum `K_m` count over H-free spanning subgraphs of `host`.
///
/// Branches on the edges of one H-copy of the current graph: branch `i`
/// deletes the `i`-th unfixed edge and keeps the earlier ones.
pub fn exact_max_hfree_cliques(host: &Graph, h: &Graph, m: usize, budget: ExactBudget) -> Result<ExtremalResult> {
    if m < 2 {
        return domain(format!("clique order must be >= 2, got {m}"));
    }
    if h.edge_count() == 0 {
        return domain("forbidden graph must have an edge");
    }
    let pattern = Pattern::new(h);
    let mut search = ExactSearch { pattern: &pattern, m, budget: budget.max_nodes, nodes: 0, kept: BTreeSet::new(), best: None };
    search.run(&mut Adjacency::from_graph(host))?;
    let (count, edges) = search.best.expect("the edgeless subgraph is H-free");
    let survivor = Graph::from_edges(host.vertex_count(), edges)?;
    let h_free_certified = contains(&survivor, h)?.is_none();
    Ok(ExtremalResult { method: Method::Exact, survivor, clique_count: count, host_edges: host.edge_count(), h_free_certified })
}

/// Local optimum of one restart: part index per vertex and its `K_m` count.
fn partite_restart(host: &Graph, parts: usize, m: usize, seed: u64) -> (Vec<usize>, u64) {
    let n = host.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled: Vec<usize> = (0..n).collect();
    shuffled.shuffle(&mut rng);
    let mut part = vec![0usize; n];
    for (i, &v) in shuffled.iter().enumerate() {
        part[v] = i % parts;
    }
    let words = words_for(n);
    let mut members = vec![vec![0u64; words]; parts];
    for v in 0..n {
        members[part[v]][v >> 6] |= 1 << (v & 63);
    }
    let mut survivor = Adjacency::new(n).expect("host fits");
    for (u, v) in host.edges() {
        if part[u] != part[v] {
            survivor.add_edge(u, v).expect("host edge");
        }
    }
    // Copies through v if v sat in part `q`; other vertices' edges are fixed.
    let through = |survivor: &Adjacency, members: &[Vec<u64>], v: usize, q: usize| -> u64 {
        let cand: Vec<u64> = host.row(v).iter().zip(&members[q]).map(|(r, s)| r & !s).collect();
        count_within(survivor, &cand, m - 1)
    };
    loop {
        let mut improved = false;
        for v in 0..n {
            let here = part[v];
            let mut members_wo = members.clone();
            members_wo[here][v >> 6] &= !(1 << (v & 63));
            let current = through(&survivor, &members_wo, v, here);
            let mut best = (current, here);
            for q in (0..parts).filter(|&q| q != here) {
                let c = through(&survivor, &members_wo, v, q);
                if c > best.0 {
                    best = (c, q);
                }
            }
            if best.1 != here {
                let q = best.1;
                for w in host.neighbors(v) {
                    if part[w] == q {
                        survivor.remove_edge(v, w);
                    } else if part[w] == here {
                        survivor.add_edge(v, w).expect("host edge");
                    }
                }
                members = members_wo;
                members[q][v >> 6] |= 1 << (v & 63);
                part[v] = q;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let count = clique_total(&survivor, m).expect("m >= 2");
    (part, count)
}

/// Best `(k-1)`-partite subgraph over `restarts` random balanced
/// partitions, each improved by single-vertex moves.
///
/// The survivor is `(k-1)`-colourable, so it is free of every graph with
/// chromatic number at least `k`; `h_free_certified` records exactly that.
/// Restart `r` uses seed `seed ^ r`.
pub fn partite_heuristic(host: &Graph, k: usize, m: usize, restarts: usize, seed: u64) -> Result<ExtremalResult> {
    if m < 2 {
        return domain(format!("clique order must be >= 2, got {m}"));
    }
    if k <= m {
        return domain(format!("need k > m, got k = {k}, m = {m}"));
    }
    if restarts == 0 {
        return domain("at least one restart is required");
    }
    let parts = k - 1;
    let (part, count) = (0..restarts)
        .into_par_iter()
        .map(|r| partite_restart(host, parts, m, seed ^ r as u64))
        .collect::<Vec<_>>()
        .into_iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.1.cmp(&b.1).then(j.cmp(i)))
        .map(|(_, best)| best)
        .expect("restarts >= 1");
    let survivor = Graph::from_edges(host.vertex_count(), host.edges().filter(|&(u, v)| part[u] != part[v]))?;
    Ok(ExtremalResult { method: Method::Partite, survivor, clique_count: count, host_edges: host.edge_count(), h_free_certified: true })
}

/// Re-derives `h_free_certified` of a partite result for a concrete `H`:
/// structural when `χ(H) ≥ k` is confirmed within `budget`, otherwise by
/// containment search.
pub fn certify_partite(result: &mut ExtremalResult, h: &Graph, k: usize, budget: Budget) -> Result<()> {
    let structural = matches!(chromatic_number(h, budget), Ok((chi, _)) if chi >= k);
    result.h_free_certified = structural || contains(&result.survivor, h)?.is_none();
    Ok(())
}

/// The densest part of `h` used by the deletion heuristic: the vertex set
/// attaining `m₂(h)` with isolated vertices dropped. Graphs too small for
/// `m₂` are used whole.
pub fn densest_part(h: &Graph) -> Result<Graph> {
    let set = match m2(h, h.vertex_count() > EXHAUSTIVE_CAP) {
        Ok(report) => report.witness,
        Err(Error::Domain(_)) => {
            VertexSet::from_vertices(h.vertex_count(), (0..h.vertex_count()).filter(|&v| h.degree(v) > 0))?
        }
        Err(e) => return Err(e),
    };
    h.clone().without_labels().induced_subgraph(&set)
}

/// Greedy deletion: repeatedly take the first surviving copy of the densest
/// part `H'` of `h` and delete its edge that destroys the most surviving
/// copies, ties broken by fewest `K_m` lost and then lexicographically.
pub fn deletion_heuristic(host: &Graph, h: &Graph, m: usize, cap: usize) -> Result<ExtremalResult> {
    if m < 2 {
        return domain(format!("clique order must be >= 2, got {m}"));
    }
    if h.edge_count() == 0 {
        return domain("forbidden graph must have an edge");
    }
    let dense = densest_part(h)?;
    let copies = enumerate_copies(host, &dense, cap)?;
    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, c) in copies.iter().enumerate() {
        for &e in &c.edges {
            by_edge.entry(e).or_default().push(i);
        }
    }
    let mut alive = vec![true; copies.len()];
    let mut current = Adjacency::from_graph(host);
    for i in 0..copies.len() {
        if !alive[i] {
            continue;
        }
        let (_, _, &(u, v)) = copies[i]
            .edges
            .iter()
            .map(|e| {
                let destroyed = by_edge[e].iter().filter(|&&j| alive[j]).count();
                let lost = cliques_on_edge(&current, e.0, e.1, m);
                (std::cmp::Reverse(destroyed), lost, e)
            })
            .min()
            .expect("copies have edges");
        current.remove_edge(u, v);
        for &j in &by_edge[&(u, v)] {
            alive[j] = false;
        }
    }
    let survivor = current.into_graph();
    let clique_count = clique_total(&survivor, m)?;
    let h_free_certified = contains(&survivor, h)?.is_none();
    Ok(ExtremalResult { method: Method::Delete, survivor, clique_count, host_edges: host.edge_count(), h_free_certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::tower;
    use crate::graph::{complete_graph, cycle, path};

    fn k4_minus_edge() -> Graph {
        complete_graph(4).unwrap().with_edges_removed(&[(2, 3)]).unwrap()
    }

    #[test]
    fn containment() {
        let k3 = complete_graph(3).unwrap();
        assert!(contains(&cycle(5).unwrap(), &k3).unwrap().is_none());
        let w = contains(&k4_minus_edge(), &k3).unwrap().unwrap();
        assert_eq!(w.len(), 3);
        assert!(contains(&tower(4, 2).unwrap(), &k3).unwrap().is_none());
        assert!(contains(&k3, &complete_graph(4).unwrap()).unwrap().is_none());
        assert!(contains(&k3, &Graph::empty(0).unwrap()).is_err());
        // Isolated pattern vertices need spare host vertices.
        let edge_plus_point = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(contains(&path(3).unwrap(), &edge_plus_point).unwrap(), Some(vec![0, 1, 2]));
        assert!(contains(&path(2).unwrap(), &edge_plus_point).unwrap().is_none());
    }

    #[test]
    fn copy_enumeration() {
        assert_eq!(enumerate_copies(&complete_graph(4).unwrap(), &complete_graph(3).unwrap(), 100).unwrap().len(), 4);
        assert_eq!(enumerate_copies(&complete_graph(5).unwrap(), &complete_graph(4).unwrap(), 100).unwrap().len(), 5);
        assert_eq!(enumerate_copies(&cycle(6).unwrap(), &path(3).unwrap(), 100).unwrap().len(), 6);
        assert!(matches!(
            enumerate_copies(&complete_graph(5).unwrap(), &complete_graph(3).unwrap(), 3),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn cleanup() {
        assert_eq!(km_cleanup(&complete_graph(4).unwrap(), 3).unwrap().edge_count(), 0);
        let two = Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]).unwrap();
        let out = km_cleanup(&two, 3).unwrap();
        assert_eq!(out.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]);
        let k3 = complete_graph(3).unwrap();
        assert_eq!(km_cleanup(&k3, 3).unwrap(), k3);
    }

    #[test]
    fn exact_small() {
        let k4 = complete_graph(4).unwrap();
        let r = exact_max_hfree_cliques(&k4, &k4, 3, ExactBudget::default()).unwrap();
        assert_eq!(r.clique_count, 2);
        assert!(r.h_free_certified);
        let r = exact_max_hfree_cliques(&complete_graph(5).unwrap(), &k4, 3, ExactBudget::default()).unwrap();
        assert_eq!(r.clique_count, 4);
        let r = exact_max_hfree_cliques(&cycle(5).unwrap(), &complete_graph(3).unwrap(), 3, ExactBudget::default())
            .unwrap();
        assert_eq!(r.clique_count, 0);
        assert!(matches!(
            exact_max_hfree_cliques(&complete_graph(8).unwrap(), &k4, 3, ExactBudget { max_nodes: 5 }),
            Err(Error::BudgetExhausted(_))
        ));
    }

    #[test]
    fn partite() {
        let r = partite_heuristic(&complete_graph(6).unwrap(), 4, 3, 8, 1).unwrap();
        assert_eq!(r.clique_count, 8);
        let r = partite_heuristic(&cycle(5).unwrap(), 4, 3, 4, 1).unwrap();
        assert_eq!(r.clique_count, 0);
        assert!(r.survivor.edge_count() > 0);
        assert!(partite_heuristic(&cycle(5).unwrap(), 3, 3, 4, 1).is_err());
    }

    #[test]
    fn deletion() {
        let k4 = complete_graph(4).unwrap();
        let r = deletion_heuristic(&k4, &k4, 3, 1000).unwrap();
        assert_eq!(r.clique_count, 2);
        assert!(r.h_free_certified);
        let c6 = cycle(6).unwrap();
        let r = deletion_heuristic(&c6, &k4, 3, 1000).unwrap();
        assert_eq!(r.survivor, c6);
        assert_eq!(r.clique_count, 0);
    }

    #[test]
    fn densest_part_of_k4_plus_pendant() {
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        assert_eq!(densest_part(&g).unwrap(), complete_graph(4).unwrap());
    }

    #[test]
    fn method_names() {
        for m in [Method::Exact, Method::Partite, Method::Delete] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("greedy".parse::<Method>().is_err());
    }
}
