//! Towers, tower complexes, bridge graphs, supercomplexes and the sparse
//! `k`-chromatic graphs built from them.
//!
//! Vertex numbering is canonical: the two base vertices first (`v_{0,0}` = 0,
//! `v_{0,1}` = 1), then towers in index order, levels ascending, positions
//! ascending. In the final graph the `K_k` skeleton comes first, followed by
//! the non-base vertices of each supercomplex copy in skeleton-edge order.

use num_traits::ToPrimitive;

use crate::density::{potential_thresholds, verify_potential_lemma, LemmaOutcome, SubsetFilter};
use crate::error::{domain, Error, Result};
use crate::graph::{Adjacency, Graph, StructuredLabel, VertexSet};
use crate::rational::ExactRational;

/// Parameters of the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    pub k: usize,
    pub t: usize,
    pub epsilon: Option<ExactRational>,
}

impl ConstructionParams {
    pub fn new(k: usize, t: usize) -> Result<Self> {
        check_kt(k, t)?;
        Ok(Self { k, t, epsilon: None })
    }

    /// `t = ⌈k³/ε⌉`.
    pub fn from_epsilon(k: usize, epsilon: ExactRational) -> Result<Self> {
        let t = height_for_epsilon(k, &epsilon)?;
        check_kt(k, t)?;
        Ok(Self { k, t, epsilon: Some(epsilon) })
    }
}

/// `⌈k³/ε⌉` for a positive rational `ε`.
pub fn height_for_epsilon(k: usize, epsilon: &ExactRational) -> Result<usize> {
    if epsilon.is_negative() || epsilon.is_zero() {
        return domain("epsilon must be positive");
    }
    let k3 = ExactRational::from_integer((k * k * k) as i64);
    (&k3 / epsilon).ceil().to_usize().ok_or_else(|| Error::Domain("tower height overflows".into()))
}

fn check_k(k: usize) -> Result<()> {
    if k < 4 {
        return domain(format!("construction requires k >= 4, got {k}"));
    }
    if k > 64 {
        return Err(Error::CapExceeded { what: "construction k", limit: 64 });
    }
    Ok(())
}

fn check_kt(k: usize, t: usize) -> Result<()> {
    check_k(k)?;
    if t < 1 {
        return domain("construction requires t >= 1");
    }
    Ok(())
}

/// Edges of one tower between local ids: 0, 1 for the base, then
/// `2 + (level-1)(k-1) + position`.
fn tower_edges(k: usize, t: usize) -> Vec<(usize, usize)> {
    let id = |level: usize, pos: usize| if level == 0 { pos } else { 2 + (level - 1) * (k - 1) + pos };
    let mut edges = Vec::new();
    for level in 1..=t {
        for a in 0..k - 1 {
            for b in a + 1..k - 1 {
                if (a, b) != (0, 1) {
                    edges.push((id(level, a), id(level, b)));
                }
            }
        }
        // v_{i-1,0} ~ v_{i,j} for j ≤ (k-2)/2; v_{i-1,1} ~ v_{i,j} for j ≥ (k-1)/2.
        for j in 0..k - 1 {
            if 2 * j <= k - 2 {
                edges.push((id(level - 1, 0), id(level, j)));
            }
            if 2 * j >= k - 1 {
                edges.push((id(level - 1, 1), id(level, j)));
            }
        }
    }
    edges
}

fn tower_size(k: usize, t: usize) -> usize {
    t * (k - 1)
}

/// The `(k,t)`-tower with base `{v_{0,0}, v_{0,1}}`.
pub fn tower(k: usize, t: usize) -> Result<Graph> {
    check_kt(k, t)?;
    let n = 2 + tower_size(k, t);
    let mut labels = vec![StructuredLabel::base(0), StructuredLabel::base(1)];
    for level in 1..=t {
        labels.extend((0..k - 1).map(|pos| StructuredLabel::tower(None, level as u32, pos as u32)));
    }
    Graph::from_edges(n, tower_edges(k, t))?.with_labels(labels)
}

fn complex_adjacency(k: usize, t: usize) -> Result<(Adjacency, Vec<StructuredLabel>)> {
    let per = tower_size(k, t);
    let n = 2 + k * per;
    let mut adj = Adjacency::new(n)?;
    let mut labels = vec![StructuredLabel::base(0), StructuredLabel::base(1)];
    let local = tower_edges(k, t);
    for i in 0..k {
        let map = |v: usize| if v < 2 { v } else { 2 + i * per + (v - 2) };
        for &(u, v) in &local {
            adj.add_edge(map(u), map(v))?;
        }
        for level in 1..=t {
            labels.extend((0..k - 1).map(|pos| StructuredLabel::tower(Some(i as u32 + 1), level as u32, pos as u32)));
        }
    }
    Ok((adj, labels))
}

/// `k` copies of the tower sharing the base and nothing else.
pub fn tower_complex(k: usize, t: usize) -> Result<Graph> {
    check_kt(k, t)?;
    let (adj, labels) = complex_adjacency(k, t)?;
    adj.into_graph().with_labels(labels)
}

/// Id of `v^tower_{level,pos}` in a complex or supercomplex (`tower` is 1-based).
pub fn complex_vertex(k: usize, t: usize, tower: usize, level: usize, pos: usize) -> usize {
    2 + (tower - 1) * tower_size(k, t) + (level - 1) * (k - 1) + pos
}

/// Bridge edges between the top special vertices of the `k` towers: for
/// `i < j`, `v^i_{t,0} v^j_{t,1}` when `j - i ≤ k/2`, else `v^i_{t,1} v^j_{t,0}`.
pub fn bridge(k: usize, t: usize) -> Result<Vec<(StructuredLabel, StructuredLabel)>> {
    check_k(k)?;
    let side = |tower: usize, s: u32| StructuredLabel::bridge_side(tower as u32, t as u32, s);
    let mut edges = Vec::with_capacity(k * (k - 1) / 2);
    for i in 1..=k {
        for j in i + 1..=k {
            if 2 * (j - i) <= k {
                edges.push((side(i, 0), side(j, 1)));
            } else {
                edges.push((side(i, 1), side(j, 0)));
            }
        }
    }
    Ok(edges)
}

/// Tower complex plus the bridge edges on the level-`t` vertices.
pub fn supercomplex(k: usize, t: usize) -> Result<Graph> {
    check_kt(k, t)?;
    let (mut adj, labels) = complex_adjacency(k, t)?;
    for (a, b) in bridge(k, t)? {
        let id = |l: StructuredLabel| complex_vertex(k, t, l.tower.unwrap() as usize, t, l.position as usize);
        adj.add_edge(id(a), id(b))?;
    }
    adj.into_graph().with_labels(labels)
}

/// `K_k` with every edge `uv` replaced by a copy of the supercomplex with
/// base `{u, v}`.
pub fn sparse_k_chromatic(k: usize, t: usize) -> Result<Graph> {
    check_kt(k, t)?;
    let gadget = supercomplex(k, t)?;
    let inner = gadget.vertex_count() - 2;
    let copies = k * (k - 1) / 2;
    let n = k + copies * inner;
    let mut adj = Adjacency::new(n)?;
    let mut labels: Vec<StructuredLabel> = (0..k).map(|p| StructuredLabel::clique_origin(p as u32)).collect();
    let gadget_labels = gadget.labels().expect("supercomplex is labeled");
    let mut copy = 0;
    for u in 0..k {
        for v in u + 1..k {
            let offset = k + copy * inner;
            let map = |x: usize| match x {
                0 => u,
                1 => v,
                _ => offset + x - 2,
            };
            for (a, b) in gadget.edges() {
                adj.add_edge(map(a), map(b))?;
            }
            labels.extend(gadget_labels[2..].iter().map(|l| l.in_copy(copy as u32)));
            copy += 1;
        }
    }
    adj.into_graph().with_labels(labels)
}

/// The final graph for an explicit `ε`.
pub fn sparse_k_chromatic_for_epsilon(k: usize, epsilon: &ExactRational) -> Result<Graph> {
    let params = ConstructionParams::from_epsilon(k, epsilon.clone())?;
    sparse_k_chromatic(params.k, params.t)
}

/// The base `{v_{0,0}, v_{0,1}}` of a tower, complex or supercomplex.
pub fn base_set(g: &Graph) -> VertexSet {
    VertexSet::from_vertices(g.vertex_count(), [0, 1]).expect("constructions have a base")
}

/// The potential lemmas that can be swept exhaustively.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    /// Towers: general bound for `|A| ≥ 2`, base bound when `V₀ ⊆ A`.
    Tower,
    /// Tower complexes: same bounds as towers.
    Complex,
    /// Supercomplexes, sets avoiding the base: general bound only.
    SupercomplexAvoidingBase,
    /// Supercomplexes, sets of size at most `t + 1`: both bounds.
    SupercomplexSmallSets,
}

impl Lemma {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "cl1" => Ok(Lemma::Tower),
            "cl2" => Ok(Lemma::Complex),
            "cl3" => Ok(Lemma::SupercomplexAvoidingBase),
            "cl4" => Ok(Lemma::SupercomplexSmallSets),
            other => domain(format!("unknown lemma {other:?} (expected cl1..cl4)")),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Tower => "cl1",
            Lemma::Complex => "cl2",
            Lemma::SupercomplexAvoidingBase => "cl3",
            Lemma::SupercomplexSmallSets => "cl4",
        }
    }
}

/// Builds the object a lemma is about and sweeps it.
pub fn verify_lemma(lemma: Lemma, k: usize, t: usize) -> Result<LemmaOutcome> {
    let g = match lemma {
        Lemma::Tower => tower(k, t)?,
        Lemma::Complex => tower_complex(k, t)?,
        Lemma::SupercomplexAvoidingBase | Lemma::SupercomplexSmallSets => supercomplex(k, t)?,
    };
    verify_lemma_on(lemma, &g, k, t)
}

/// Runs a lemma's sweep on an already-built (possibly modified) graph.
pub fn verify_lemma_on(lemma: Lemma, g: &Graph, k: usize, t: usize) -> Result<LemmaOutcome> {
    let (general, with_base) = potential_thresholds(k);
    let base = base_set(g);
    let filter = match lemma {
        Lemma::Tower | Lemma::Complex => SubsetFilter::default(),
        Lemma::SupercomplexAvoidingBase => {
            let mut universe = VertexSet::full(g.vertex_count());
            universe.remove(0);
            universe.remove(1);
            SubsetFilter { universe: Some(universe), max_size: None }
        }
        Lemma::SupercomplexSmallSets => SubsetFilter { universe: None, max_size: Some(t + 1) },
    };
    verify_potential_lemma(g, k, general, with_base, &base, &filter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AdjRows;

    #[test]
    fn tower_4_1_matches_figure() {
        let g = tower(4, 1).unwrap();
        assert_eq!(g.vertex_count(), 5);
        // v00=0 v01=1 v10=2 v11=3 v12=4
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]);
        assert_eq!(g.label(3), Some(&StructuredLabel::tower(None, 1, 1)));
    }

    #[test]
    fn odd_k_splits_level_at_half() {
        // k = 5: v_{i-1,0} sees j ∈ {0,1}; v_{i-1,1} sees j ∈ {2,3}.
        let g = tower(5, 1).unwrap();
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(g.neighbors(1).collect::<Vec<_>>(), vec![4, 5]);
        assert!(!g.has_edge(2, 3));
    }

    #[test]
    fn sizes() {
        let t = tower(4, 3).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (11, 15));
        let c = tower_complex(4, 1).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (14, 20));
        assert_eq!(tower_complex(5, 2).unwrap().vertex_count(), 42);
        let s = supercomplex(4, 1).unwrap();
        assert_eq!((s.vertex_count(), s.edge_count()), (14, 26));
        let s = supercomplex(4, 2).unwrap();
        assert_eq!((s.vertex_count(), s.edge_count()), (26, 46));
        let g = sparse_k_chromatic(4, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (76, 156));
        assert_eq!(sparse_k_chromatic(4, 2).unwrap().vertex_count(), 148);
    }

    #[test]
    fn base_degree_in_supercomplex() {
        let s = supercomplex(4, 1).unwrap();
        assert_eq!(s.degree(0), 8);
        assert_eq!(s.degree(1), 4);
    }

    #[test]
    fn bridge_shape() {
        for k in 4..=9 {
            let b = bridge(k, 1).unwrap();
            assert_eq!(b.len(), k * (k - 1) / 2);
            let mut deg = std::collections::HashMap::new();
            for (a, c) in &b {
                assert_ne!(a.position, c.position, "bipartite between W0 and W1");
                *deg.entry(*a).or_insert(0) += 1;
                *deg.entry(*c).or_insert(0) += 1;
            }
            assert_eq!(deg.values().max().copied(), Some(k / 2));
        }
    }

    #[test]
    fn epsilon_height() {
        let p = ConstructionParams::from_epsilon(4, ExactRational::new(1, 2).unwrap()).unwrap();
        assert_eq!(p.t, 128);
        let p = ConstructionParams::from_epsilon(5, ExactRational::new(7, 3).unwrap()).unwrap();
        assert_eq!(p.t, 54); // ⌈375/7⌉
        assert!(ConstructionParams::from_epsilon(4, ExactRational::zero()).is_err());
    }

    #[test]
    fn domain_errors() {
        assert!(tower(3, 1).is_err());
        assert!(tower(4, 0).is_err());
        assert!(bridge(3, 1).is_err());
    }

    #[test]
    fn lemma_names() {
        for name in ["cl1", "cl2", "cl3", "cl4"] {
            assert_eq!(Lemma::from_name(name).unwrap().name(), name);
        }
        assert!(Lemma::from_name("cl5").is_err());
    }
}
