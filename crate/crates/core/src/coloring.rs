//! Exact colouring: DSATUR-ordered backtracking with symmetry breaking.
//!
//! The vertex with the most distinct neighbour colours is branched on first
//! (ties: higher degree, then smaller id); colours are tried in increasing
//! order and a new colour is only opened as the next unused one.

use std::time::{Duration, Instant};

use crate::cliques::clique_number;
use crate::construct::tower;
use crate::error::{domain, Error, Result};
use crate::graph::{AdjRows, Adjacency, Graph};

/// A proper colouring with colours in `0..q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<u32>,
    pub q: u32,
}

impl Coloring {
    pub fn is_proper(&self, g: &Graph) -> bool {
        self.colors.len() == g.vertex_count()
            && self.colors.iter().all(|&c| c < self.q)
            && g.edges().all(|(u, v)| self.colors[u] != self.colors[v])
    }

    pub fn colors_used(&self) -> usize {
        let mut seen: Vec<u32> = self.colors.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// Side conditions on a colouring.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Constraints {
    /// Pairs that must receive the same colour.
    pub equal: Vec<(usize, usize)>,
    /// Vertices pinned to a specific colour.
    pub fixed: Vec<(usize, u32)>,
}

impl Constraints {
    pub fn equal(u: usize, v: usize) -> Self {
        Self { equal: vec![(u, v)], fixed: Vec::new() }
    }
}

/// Wall-clock limit for a solve; exceeding it is an error, never a
/// silently approximate answer.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub limit: Option<Duration>,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget { limit: None };

    pub fn seconds(s: f64) -> Self {
        Budget { limit: Some(Duration::from_secs_f64(s)) }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Finds a proper `q`-colouring satisfying `constraints`, or `None`.
///
/// Equalities are handled by contracting vertex classes; pinned colours
/// become equalities (same colour) and extra edges (different colours),
/// and the solution is relabelled to honour the pins afterwards.
pub fn is_q_colorable(g: &Graph, q: u32, constraints: &Constraints, budget: Budget) -> Result<Option<Coloring>> {
    if q == 0 {
        return domain("q must be at least 1");
    }
    if q > 64 {
        return Err(Error::CapExceeded { what: "palette size", limit: 64 });
    }
    let n = g.vertex_count();
    for &(u, v) in &constraints.equal {
        if u >= n || v >= n {
            return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
        }
    }
    for &(v, c) in &constraints.fixed {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if c >= q {
            return Ok(None);
        }
    }

    let mut uf = UnionFind((0..n).collect());
    for &(u, v) in &constraints.equal {
        uf.union(u, v);
    }
    let mut pinned: Vec<(u32, usize)> = constraints.fixed.iter().map(|&(v, c)| (c, v)).collect();
    pinned.sort_unstable();
    for w in pinned.windows(2) {
        if w[0].0 == w[1].0 {
            uf.union(w[0].1, w[1].1);
        }
    }

    // Quotient graph on class representatives.
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        if class_of[r] == usize::MAX {
            class_of[r] = reps.len();
            reps.push(r);
        }
        class_of[v] = class_of[r];
    }
    let mut quotient = Adjacency::new(reps.len())?;
    for (u, v) in g.edges() {
        let (a, b) = (class_of[u], class_of[v]);
        if a == b {
            return Ok(None);
        }
        quotient.add_edge(a, b)?;
    }
    let mut pin_classes: Vec<(u32, usize)> = pinned.iter().map(|&(c, v)| (c, class_of[v])).collect();
    pin_classes.dedup();
    for (i, &(ci, a)) in pin_classes.iter().enumerate() {
        for &(cj, b) in &pin_classes[i + 1..] {
            if ci != cj {
                if a == b {
                    return Ok(None);
                }
                quotient.add_edge(a, b)?;
            }
        }
    }

    let Some(class_colors) = Dsatur::new(&quotient, q, budget).solve()? else {
        return Ok(None);
    };

    // Relabel so pinned classes get their requested colours.
    let mut perm: Vec<Option<u32>> = vec![None; q as usize];
    let mut taken = vec![false; q as usize];
    for &(c, class) in &pin_classes {
        perm[class_colors[class] as usize] = Some(c);
        taken[c as usize] = true;
    }
    let mut free = (0..q).filter(|&c| !taken[c as usize]);
    for slot in perm.iter_mut().filter(|p| p.is_none()) {
        *slot = free.next();
    }
    let colors = (0..n).map(|v| perm[class_colors[class_of[v]] as usize].expect("perm is total")).collect();
    Ok(Some(Coloring { colors, q }))
}

struct Dsatur<'a> {
    g: &'a Adjacency,
    q: usize,
    colour: Vec<Option<u32>>,
    /// `counts[v * q + c]`: neighbours of `v` currently coloured `c`.
    counts: Vec<u32>,
    saturation: Vec<u32>,
    degree: Vec<usize>,
    nodes: u64,
    started: Instant,
    budget: Budget,
}

impl<'a> Dsatur<'a> {
    fn new(g: &'a Adjacency, q: u32, budget: Budget) -> Self {
        let n = g.n();
        Self {
            g,
            q: q as usize,
            colour: vec![None; n],
            counts: vec![0; n * q as usize],
            saturation: vec![0; n],
            degree: (0..n).map(|v| g.degree(v)).collect(),
            nodes: 0,
            started: Instant::now(),
            budget,
        }
    }

    fn solve(mut self) -> Result<Option<Vec<u32>>> {
        if self.search(0)? {
            Ok(Some(self.colour.into_iter().map(|c| c.expect("all coloured")).collect()))
        } else {
            Ok(None)
        }
    }

    fn assign(&mut self, v: usize, c: u32) {
        self.colour[v] = Some(c);
        for u in crate::graph::iter_bits(self.g.row(v)) {
            let slot = &mut self.counts[u * self.q + c as usize];
            *slot += 1;
            if *slot == 1 {
                self.saturation[u] += 1;
            }
        }
    }

    fn unassign(&mut self, v: usize, c: u32) {
        self.colour[v] = None;
        for u in crate::graph::iter_bits(self.g.row(v)) {
            let slot = &mut self.counts[u * self.q + c as usize];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[u] -= 1;
            }
        }
    }

    fn pick(&self) -> Option<usize> {
        (0..self.g.n())
            .filter(|&v| self.colour[v].is_none())
            .max_by(|&a, &b| {
                self.saturation[a].cmp(&self.saturation[b]).then(self.degree[a].cmp(&self.degree[b])).then(b.cmp(&a))
            })
    }

    fn search(&mut self, used: u32) -> Result<bool> {
        self.nodes += 1;
        if self.nodes & 0x3ff == 0 {
            if let Some(limit) = self.budget.limit {
                if self.started.elapsed() > limit {
                    return Err(Error::BudgetExhausted(format!("colouring search exceeded {limit:?}")));
                }
            }
        }
        let Some(v) = self.pick() else {
            return Ok(true);
        };
        if self.saturation[v] as usize >= self.q {
            return Ok(false);
        }
        let limit = (used + 1).min(self.q as u32);
        for c in 0..limit {
            if self.counts[v * self.q + c as usize] != 0 {
                continue;
            }
            self.assign(v, c);
            if self.search(used.max(c + 1))? {
                return Ok(true);
            }
            self.unassign(v, c);
        }
        Ok(false)
    }
}

/// Greedy DSATUR colouring (no backtracking); an upper bound on `χ`.
pub fn greedy_dsatur(g: &Graph) -> Coloring {
    let n = g.vertex_count();
    let mut colors: Vec<Option<u32>> = vec![None; n];
    let mut neighbour_colours: Vec<u64> = vec![0; n];
    let mut extra: Vec<Vec<u32>> = vec![Vec::new(); n];
    let saturation = |v: usize, nc: &[u64], ex: &[Vec<u32>]| nc[v].count_ones() as usize + ex[v].len();
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colors[v].is_none())
            .max_by(|&a, &b| {
                saturation(a, &neighbour_colours, &extra)
                    .cmp(&saturation(b, &neighbour_colours, &extra))
                    .then(g.degree(a).cmp(&g.degree(b)))
                    .then(b.cmp(&a))
            })
            .expect("uncoloured vertex remains");
        let c = (0u32..)
            .find(|&c| if c < 64 { neighbour_colours[v] >> c & 1 == 0 } else { !extra[v].contains(&c) })
            .expect("some colour is free");
        colors[v] = Some(c);
        for u in g.neighbors(v) {
            if c < 64 {
                neighbour_colours[u] |= 1 << c;
            } else if !extra[u].contains(&c) {
                extra[u].push(c);
            }
        }
    }
    let colors: Vec<u32> = colors.into_iter().map(|c| c.expect("coloured")).collect();
    let q = colors.iter().max().map_or(0, |&c| c + 1);
    Coloring { colors, q }
}

/// `χ(g)` with a witness colouring. The search is bracketed by the clique
/// number from below and a greedy DSATUR colouring from above.
pub fn chromatic_number(g: &Graph, budget: Budget) -> Result<(usize, Coloring)> {
    if g.vertex_count() == 0 {
        return Ok((0, Coloring { colors: Vec::new(), q: 0 }));
    }
    let greedy = greedy_dsatur(g);
    let upper = greedy.q as usize;
    let lower = clique_number(g).max(1);
    for q in lower..upper {
        if let Some(c) = is_q_colorable(g, q as u32, &Constraints::default(), budget)? {
            return Ok((q, c));
        }
    }
    Ok((upper, greedy))
}

/// Result of enumerating constrained colourings of a tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcedPairs {
    /// Number of `(k-1)`-colourings with `f(v_{0,0}) = f(v_{0,1})`.
    pub colorings: u64,
    /// Pairs `(u, w)`, `u < w`, equal in every such colouring. Empty when no
    /// constrained colouring exists.
    pub pairs: Vec<(usize, usize)>,
}

/// Colourings enumerated before giving up.
pub const ENUMERATION_CAP: u64 = 100_000_000;

/// Enumerates every `(k-1)`-colouring of `tower(k, t)` with the two base
/// vertices equal and reports the vertex pairs that are always equal.
pub fn forced_pairs_under_base_equality(k: usize, t: usize) -> Result<ForcedPairs> {
    forced_pairs_with_cap(k, t, ENUMERATION_CAP)
}

fn forced_pairs_with_cap(k: usize, t: usize, cap: u64) -> Result<ForcedPairs> {
    let g = tower(k, t)?;
    let n = g.vertex_count();
    let q = (k - 1) as u32;
    let mut colour = vec![u32::MAX; n];
    let mut always_equal = vec![true; n * n];
    let mut count = 0u64;

    fn rec(
        g: &Graph,
        v: usize,
        q: u32,
        colour: &mut Vec<u32>,
        always_equal: &mut [bool],
        count: &mut u64,
        cap: u64,
    ) -> Result<()> {
        let n = g.vertex_count();
        if v == n {
            *count += 1;
            if *count > cap {
                return Err(Error::CapExceeded { what: "colouring enumeration", limit: cap });
            }
            for a in 0..n {
                for b in a + 1..n {
                    if colour[a] != colour[b] {
                        always_equal[a * n + b] = false;
                    }
                }
            }
            return Ok(());
        }
        for c in 0..q {
            if v == 1 && c != colour[0] {
                continue;
            }
            if g.neighbors(v).any(|u| u < v && colour[u] == c) {
                continue;
            }
            colour[v] = c;
            rec(g, v + 1, q, colour, always_equal, count, cap)?;
        }
        colour[v] = u32::MAX;
        Ok(())
    }

    rec(&g, 0, q, &mut colour, &mut always_equal, &mut count, cap)?;
    let pairs = if count == 0 {
        Vec::new()
    } else {
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| always_equal[a * n + b]).collect()
    };
    Ok(ForcedPairs { colorings: count, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{sparse_k_chromatic, supercomplex};
    use crate::graph::{complete_graph, complete_multipartite, cycle};

    #[test]
    fn odd_cycle() {
        let c5 = cycle(5).unwrap();
        assert!(is_q_colorable(&c5, 2, &Constraints::default(), Budget::UNLIMITED).unwrap().is_none());
        let c = is_q_colorable(&c5, 3, &Constraints::default(), Budget::UNLIMITED).unwrap().unwrap();
        assert!(c.is_proper(&c5));
    }

    #[test]
    fn chromatic_numbers() {
        assert_eq!(chromatic_number(&complete_graph(4).unwrap(), Budget::UNLIMITED).unwrap().0, 4);
        assert_eq!(chromatic_number(&tower(4, 1).unwrap(), Budget::UNLIMITED).unwrap().0, 2);
        assert_eq!(chromatic_number(&Graph::empty(0).unwrap(), Budget::UNLIMITED).unwrap().0, 0);
        assert_eq!(chromatic_number(&Graph::empty(3).unwrap(), Budget::UNLIMITED).unwrap().0, 1);
        let km = complete_multipartite(&[3, 1, 2, 2]).unwrap();
        assert_eq!(chromatic_number(&km, Budget::UNLIMITED).unwrap().0, 4);
    }

    #[test]
    fn tower_bipartition() {
        // {v00, v12} vs {v01, v10, v11}
        let g = tower(4, 1).unwrap();
        let c = Coloring { colors: vec![0, 1, 1, 1, 0], q: 2 };
        assert!(c.is_proper(&g));
    }

    #[test]
    fn constraints_contract_and_pin() {
        let k3 = complete_graph(3).unwrap();
        assert!(is_q_colorable(&k3, 3, &Constraints::equal(0, 1), Budget::UNLIMITED).unwrap().is_none());
        let p = crate::graph::path(3).unwrap();
        let c = is_q_colorable(&p, 2, &Constraints { equal: vec![], fixed: vec![(0, 1), (1, 0)] }, Budget::UNLIMITED)
            .unwrap()
            .unwrap();
        assert_eq!(c.colors, vec![1, 0, 1]);
        let none = is_q_colorable(&p, 3, &Constraints { equal: vec![(0, 2)], fixed: vec![(0, 0), (2, 1)] }, Budget::UNLIMITED)
            .unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn supercomplex_forces_distinct_base_colours() {
        let s = supercomplex(4, 1).unwrap();
        assert!(is_q_colorable(&s, 3, &Constraints::equal(0, 1), Budget::UNLIMITED).unwrap().is_none());
        let free = is_q_colorable(&s, 3, &Constraints::default(), Budget::UNLIMITED).unwrap().unwrap();
        assert!(free.is_proper(&s));
    }

    #[test]
    fn forced_pairs_small_towers() {
        let fp = forced_pairs_under_base_equality(4, 1).unwrap();
        assert!(fp.colorings > 0);
        assert!(fp.pairs.contains(&(2, 3)));
        let fp = forced_pairs_under_base_equality(5, 1).unwrap();
        assert!(fp.pairs.contains(&(2, 3)));
        let fp = forced_pairs_under_base_equality(4, 4).unwrap();
        for level in 1..=4 {
            let v0 = 2 + (level - 1) * 3;
            assert!(fp.pairs.contains(&(v0, v0 + 1)));
        }
        assert!(matches!(forced_pairs_with_cap(4, 3, 10), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn final_graph_is_four_chromatic() {
        let g = sparse_k_chromatic(4, 1).unwrap();
        let (chi, c) = chromatic_number(&g, Budget::seconds(60.0)).unwrap();
        assert_eq!(chi, 4);
        assert!(c.is_proper(&g));
    }
}
