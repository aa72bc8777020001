//! Brute-force oracles and small reference graphs shared by the
//! integration tests. Nothing here calls the search routines under test.

#![allow(dead_code)]

use hfree::graph::{complete_graph, cycle};
use hfree::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense adjacency matrix.
pub struct Matrix {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
}

impl Matrix {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Matrix { n, adj }
    }

    pub fn of(g: &Graph) -> Self {
        Matrix::new(g.vertex_count(), &g.edges().collect::<Vec<_>>())
    }

    pub fn edges_in(&self, members: &[usize]) -> usize {
        let mut e = 0;
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                e += self.adj[u][v] as usize;
            }
        }
        e
    }

    pub fn is_clique(&self, members: &[usize]) -> bool {
        self.edges_in(members) == members.len() * members.len().saturating_sub(1) / 2
    }
}

pub fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// `m₂` as a reduced fraction, maximizing over every vertex subset of size
/// at least 3. `None` when no subset qualifies.
pub fn brute_m2(g: &Graph) -> Option<(i64, i64)> {
    let mat = Matrix::of(g);
    let mut best: Option<(i64, i64)> = None;
    for mask in 0u64..(1u64 << g.vertex_count()) {
        let s = members(mask);
        if s.len() < 3 {
            continue;
        }
        let num = mat.edges_in(&s) as i64 - 1;
        let den = s.len() as i64 - 2;
        if best.is_none_or(|(bn, bd)| num * bd > bn * den) {
            best = Some((num, den));
        }
    }
    best.map(|(a, b)| {
        let g = gcd(a.abs(), b);
        (a / g, b / g)
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.max(1) } else { gcd(b, a % b) }
}

/// `K_m` count and per-edge counts by testing every `m`-subset.
pub fn brute_cliques(g: &Graph, m: usize) -> (u64, std::collections::BTreeMap<(usize, usize), u64>) {
    let mat = Matrix::of(g);
    let mut per_edge = std::collections::BTreeMap::new();
    let mut total = 0;
    for s in combinations(g.vertex_count(), m) {
        if mat.is_clique(&s) {
            total += 1;
            for (i, &u) in s.iter().enumerate() {
                for &v in &s[i + 1..] {
                    *per_edge.entry((u, v)).or_insert(0) += 1;
                }
            }
        }
    }
    (total, per_edge)
}

/// Whether some injective map sends every pattern edge to a host edge.
pub fn naive_contains(host: &Matrix, pattern: &Matrix) -> bool {
    fn rec(i: usize, host: &Matrix, pattern: &Matrix, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if i == pattern.n {
            return true;
        }
        for x in 0..host.n {
            if used[x] {
                continue;
            }
            if (0..i).any(|j| pattern.adj[i][j] && !host.adj[x][map[j]]) {
                continue;
            }
            used[x] = true;
            map.push(x);
            let ok = rec(i + 1, host, pattern, map, used);
            map.pop();
            used[x] = false;
            if ok {
                return true;
            }
        }
        false
    }
    pattern.n <= host.n && rec(0, host, pattern, &mut Vec::new(), &mut vec![false; host.n])
}

/// Maximum `K_m` count over all H-free edge subsets of `host`.
pub fn brute_extremal(host: &Graph, h: &Graph, m: usize) -> u64 {
    let edges: Vec<(usize, usize)> = host.edges().collect();
    assert!(edges.len() <= 16, "oracle is exponential in |E|");
    let pattern = Matrix::of(h);
    let cliques = combinations(host.vertex_count(), m);
    let mut best = 0;
    for mask in 0u64..(1u64 << edges.len()) {
        let kept: Vec<(usize, usize)> = members(mask).into_iter().map(|i| edges[i]).collect();
        let sub = Matrix::new(host.vertex_count(), &kept);
        let count = cliques.iter().filter(|s| sub.is_clique(s)).count() as u64;
        if count > best && !naive_contains(&sub, &pattern) {
            best = count;
        }
    }
    best
}

/// Wheel with a 5-cycle rim and hub 5.
pub fn wheel5() -> Graph {
    let rim = cycle(5).unwrap();
    let mut edges: Vec<(usize, usize)> = rim.edges().collect();
    edges.extend((0..5).map(|v| (v, 5)));
    Graph::from_edges(6, edges).unwrap()
}

/// Moser spindle: two rhombi of triangles sharing vertex 0, tips joined.
pub fn moser_spindle() -> Graph {
    Graph::from_edges(
        7,
        [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (0, 4), (0, 5), (4, 5), (4, 6), (5, 6), (3, 6)],
    )
    .unwrap()
}

/// Triangle `{0,1,2}` with pendant edge `2-3`.
pub fn triangle_with_pendant() -> Graph {
    Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap()
}

/// Small k-critical graphs with their chromatic numbers.
pub fn critical_graphs() -> Vec<(&'static str, Graph, usize)> {
    vec![
        ("K4", complete_graph(4).unwrap(), 4),
        ("K5", complete_graph(5).unwrap(), 5),
        ("W5", wheel5(), 4),
        ("Moser spindle", moser_spindle(), 4),
    ]
}

/// Deterministic pseudo-random graph for oracle inputs.
pub fn random_graph(n: usize, density_percent: u32, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_range(0..100) < density_percent {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}
