//! Simple undirected graphs over dense vertex ids with bitset adjacency.
//!
//! Vertices are `0..n`. Each vertex owns a row of `words` 64-bit words; bit
//! `u` of row `v` is set iff `uv` is an edge. Graphs are immutable once built;
//! operations that "delete" edges return fresh graphs. [`Adjacency`] is the
//! mutable scratch counterpart used inside search routines.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest vertex count accepted by constructors and parsers.
pub const MAX_VERTICES: usize = 10_000;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[inline]
pub(crate) fn test_bit(row: &[u64], v: usize) -> bool {
    row[v >> 6] >> (v & 63) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(row: &mut [u64], v: usize) {
    row[v >> 6] |= 1 << (v & 63);
}

#[inline]
pub(crate) fn clear_bit(row: &mut [u64], v: usize) {
    row[v >> 6] &= !(1 << (v & 63));
}

pub(crate) fn popcount(row: &[u64]) -> usize {
    row.iter().map(|w| w.count_ones() as usize).sum()
}

pub(crate) fn iter_bits(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

/// Read access to a bitset adjacency structure.
pub trait AdjRows {
    fn n(&self) -> usize;
    fn words(&self) -> usize;
    fn row(&self, v: usize) -> &[u64];

    fn has_edge(&self, u: usize, v: usize) -> bool {
        test_bit(self.row(u), v)
    }

    fn degree(&self, v: usize) -> usize {
        popcount(self.row(v))
    }
}

/// A subset of `0..universe`, stored as a fixed-width bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    universe: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        Self { universe, words: vec![0; words_for(universe)] }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for v in 0..universe {
            set_bit(&mut s.words, v);
        }
        s
    }

    pub fn from_vertices(universe: usize, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(universe);
        for v in vertices {
            s.insert(v)?;
        }
        Ok(s)
    }

    /// Builds a set from the low bits of `mask` (universe ≤ 64).
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(universe <= 64);
        let mask = if universe == 64 { mask } else { mask & ((1u64 << universe) - 1) };
        let mut s = Self::empty(universe);
        s.words[0] = mask;
        s
    }

    pub fn to_mask(&self) -> Option<u64> {
        (self.universe <= 64).then(|| self.words[0])
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, v: usize) -> Result<bool> {
        if v >= self.universe {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.universe });
        }
        let had = test_bit(&self.words, v);
        set_bit(&mut self.words, v);
        Ok(!had)
    }

    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.universe {
            return false;
        }
        let had = test_bit(&self.words, v);
        clear_bit(&mut self.words, v);
        had
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && test_bit(&self.words, v)
    }

    pub fn len(&self) -> usize {
        popcount(&self.words)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.words)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(other.words.iter().chain(std::iter::repeat(&0))).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let universe = self.universe.max(other.universe);
        let mut out = VertexSet::empty(universe);
        for (i, w) in out.words.iter_mut().enumerate() {
            *w = self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0);
        }
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Lexicographic order on the ascending member lists.
    pub fn lex_cmp(&self, other: &VertexSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// What part of a construction a vertex came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelKind {
    /// One of the two base vertices `v_{0,0}`, `v_{0,1}`.
    Base,
    /// `v_{level,position}` of a tower, optionally tagged with its tower index.
    Tower,
    /// Top vertex of tower `tower` seen as an endpoint of a bridge edge;
    /// `position` is the side (0 for W0, 1 for W1).
    BridgeSide,
    /// Vertex of the `K_k` skeleton of the final graph.
    CliqueOrigin,
}

/// Provenance of a vertex in a built graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructuredLabel {
    pub kind: LabelKind,
    /// Index of the supercomplex copy (skeleton edge) inside the final graph.
    pub copy: Option<u32>,
    pub tower: Option<u32>,
    pub level: u32,
    pub position: u32,
}

impl StructuredLabel {
    pub fn base(position: u32) -> Self {
        Self { kind: LabelKind::Base, copy: None, tower: None, level: 0, position }
    }

    pub fn tower(tower: Option<u32>, level: u32, position: u32) -> Self {
        Self { kind: LabelKind::Tower, copy: None, tower, level, position }
    }

    pub fn bridge_side(tower: u32, level: u32, side: u32) -> Self {
        Self { kind: LabelKind::BridgeSide, copy: None, tower: Some(tower), level, position: side }
    }

    pub fn clique_origin(position: u32) -> Self {
        Self { kind: LabelKind::CliqueOrigin, copy: None, tower: None, level: 0, position }
    }

    pub fn in_copy(mut self, copy: u32) -> Self {
        self.copy = Some(copy);
        self
    }
}

/// Text form: `base/P`, `tower/L/P`, `towerI/L/P`, `bridgeI/L/S`, `clique/P`,
/// optionally prefixed with `sC:` for supercomplex copy `C`.
impl fmt::Display for StructuredLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.copy {
            write!(f, "s{c}:")?;
        }
        let tower = self.tower.map(|t| t.to_string()).unwrap_or_default();
        match self.kind {
            LabelKind::Base => write!(f, "base/{}", self.position),
            LabelKind::Tower => write!(f, "tower{tower}/{}/{}", self.level, self.position),
            LabelKind::BridgeSide => write!(f, "bridge{tower}/{}/{}", self.level, self.position),
            LabelKind::CliqueOrigin => write!(f, "clique/{}", self.position),
        }
    }
}

impl FromStr for StructuredLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: 1, msg: format!("bad label {s:?}") };
        let num = |t: &str| -> Result<u32> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse().map_err(|_| bad())
        };
        let (copy, body) = match s.split_once(':') {
            Some((c, rest)) => (Some(num(c.strip_prefix('s').ok_or_else(bad)?)?), rest),
            None => (None, s),
        };
        let parts: Vec<&str> = body.split('/').collect();
        let label = match parts.as_slice() {
            ["base", p] => {
                let p = num(p)?;
                if p > 1 {
                    return Err(bad());
                }
                StructuredLabel::base(p)
            }
            ["clique", p] => StructuredLabel::clique_origin(num(p)?),
            [head, l, p] => {
                if let Some(t) = head.strip_prefix("tower") {
                    let tower = if t.is_empty() { None } else { Some(num(t)?) };
                    StructuredLabel::tower(tower, num(l)?, num(p)?)
                } else if let Some(t) = head.strip_prefix("bridge") {
                    let side = num(p)?;
                    if side > 1 {
                        return Err(bad());
                    }
                    StructuredLabel::bridge_side(num(t)?, num(l)?, side)
                } else {
                    return Err(bad());
                }
            }
            _ => return Err(bad()),
        };
        Ok(match copy {
            Some(c) => label.in_copy(c),
            None => label,
        })
    }
}

/// Immutable simple undirected graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edge_count: usize,
    labels: Option<Vec<StructuredLabel>>,
}

impl AdjRows for Graph {
    fn n(&self) -> usize {
        self.n
    }

    fn words(&self) -> usize {
        self.words
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("edges", &self.edges().collect::<Vec<_>>()).finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        Ok(Adjacency::new(n)?.into_graph())
    }

    /// Builds a graph from an edge list. Self-loops, out-of-range endpoints
    /// and repeated edges are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = Adjacency::new(n)?;
        for (u, v) in edges {
            if !adj.add_edge(u, v)? {
                return Err(Error::InvalidEdge { u, v, reason: "duplicate edge" });
            }
        }
        Ok(adj.into_graph())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(v))
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| iter_bits(self.row(u)).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn labels(&self) -> Option<&[StructuredLabel]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<&StructuredLabel> {
        self.labels.as_ref().and_then(|l| l.get(v))
    }

    /// Vertex carrying `label`, if labels are attached and the label occurs.
    pub fn find_label(&self, label: &StructuredLabel) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    pub fn with_labels(mut self, labels: Vec<StructuredLabel>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Domain(format!("{} labels for {} vertices", labels.len(), self.n)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    /// `G[s]`: the subgraph induced by `s`, renumbered in increasing order of
    /// the original ids. Labels are restricted accordingly.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<Graph> {
        if let Some(v) = s.iter().find(|&v| v >= self.n) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        let members = s.to_vec();
        let mut adj = Adjacency::new(members.len())?;
        for (i, &u) in members.iter().enumerate() {
            for (j, &v) in members.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    adj.add_edge(i, j)?;
                }
            }
        }
        let mut g = adj.into_graph();
        if let Some(labels) = &self.labels {
            g.labels = Some(members.iter().map(|&v| labels[v]).collect());
        }
        Ok(g)
    }

    pub fn edges_within(&self, s: &VertexSet) -> usize {
        let mut total = 0;
        for u in s.iter().filter(|&u| u < self.n) {
            total += self.row(u).iter().zip(s.words()).map(|(a, b)| (a & b).count_ones() as usize).sum::<usize>();
        }
        total / 2
    }

    /// Copy of the graph with the given extra edges; labels are kept.
    pub fn with_edges_added(&self, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut adj = Adjacency::from_graph(self);
        for &(u, v) in edges {
            if !adj.add_edge(u, v)? {
                return Err(Error::InvalidEdge { u, v, reason: "edge already present" });
            }
        }
        let mut g = adj.into_graph();
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Copy of the graph without the given edges; labels are kept.
    pub fn with_edges_removed(&self, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut adj = Adjacency::from_graph(self);
        for &(u, v) in edges {
            if u >= self.n || v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n: self.n });
            }
            if !adj.remove_edge(u, v) {
                return Err(Error::InvalidEdge { u, v, reason: "edge not present" });
            }
        }
        let mut g = adj.into_graph();
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph> {
        let shift = self.n;
        Graph::from_edges(shift + other.n, self.edges().chain(other.edges().map(|(u, v)| (u + shift, v + shift))))
    }
}

/// `K_m`.
pub fn complete_graph(m: usize) -> Result<Graph> {
    let mut adj = Adjacency::new(m)?;
    for u in 0..m {
        for v in u + 1..m {
            adj.add_edge(u, v)?;
        }
    }
    Ok(adj.into_graph())
}

/// Complete multipartite graph; parts occupy consecutive id ranges.
pub fn complete_multipartite(sizes: &[usize]) -> Result<Graph> {
    if sizes.is_empty() {
        return Err(Error::Domain("complete_multipartite needs at least one part".into()));
    }
    let n: usize = sizes.iter().sum();
    let mut part = Vec::with_capacity(n);
    for (i, &s) in sizes.iter().enumerate() {
        part.extend(std::iter::repeat_n(i, s));
    }
    let mut adj = Adjacency::new(n)?;
    for u in 0..n {
        for v in u + 1..n {
            if part[u] != part[v] {
                adj.add_edge(u, v)?;
            }
        }
    }
    Ok(adj.into_graph())
}

/// `C_n` for `n ≥ 3`.
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Domain(format!("cycle needs at least 3 vertices, got {n}")));
    }
    Graph::from_edges(n, (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))))
}

/// Path on `n` vertices (`n - 1` edges).
pub fn path(n: usize) -> Result<Graph> {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
}

/// Mutable bitset adjacency used as scratch space by search routines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edge_count: usize,
}

impl AdjRows for Adjacency {
    fn n(&self) -> usize {
        self.n
    }

    fn words(&self) -> usize {
        self.words
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }
}

impl Adjacency {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::CapExceeded { what: "vertex count", limit: MAX_VERTICES as u64 });
        }
        let words = words_for(n);
        Ok(Self { n, words, rows: vec![0; n * words], edge_count: 0 })
    }

    pub fn from_graph(g: &Graph) -> Self {
        Self { n: g.n, words: g.words, rows: g.rows.clone(), edge_count: g.edge_count }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Returns `Ok(false)` if the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        if u >= self.n || v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: u.max(v), n: self.n });
        }
        if u == v {
            return Err(Error::InvalidEdge { u, v, reason: "self-loop" });
        }
        if self.has_edge(u, v) {
            return Ok(false);
        }
        let w = self.words;
        set_bit(&mut self.rows[u * w..(u + 1) * w], v);
        set_bit(&mut self.rows[v * w..(v + 1) * w], u);
        self.edge_count += 1;
        Ok(true)
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n || !self.has_edge(u, v) {
            return false;
        }
        let w = self.words;
        clear_bit(&mut self.rows[u * w..(u + 1) * w], v);
        clear_bit(&mut self.rows[v * w..(v + 1) * w], u);
        self.edge_count -= 1;
        true
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| iter_bits(self.row(u)).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn into_graph(self) -> Graph {
        Graph { n: self.n, words: self.words, rows: self.rows, edge_count: self.edge_count, labels: None }
    }
}

/// Parses the edge-list format: first non-comment line is `n`, then one
/// `u v` line per edge with `u < v < n`. Blank lines and lines starting
/// with `#` are ignored.
pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut adj: Option<Adjacency> = None;
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut tokens = line.split_ascii_whitespace();
        match adj.as_mut() {
            None => {
                let n: usize = parse_id(tokens.next().unwrap_or(""))
                    .ok_or_else(|| err(format!("expected vertex count, found {line:?}")))?;
                if tokens.next().is_some() {
                    return Err(err("trailing tokens after vertex count".into()));
                }
                if n > MAX_VERTICES {
                    return Err(err(format!("vertex count {n} exceeds cap {MAX_VERTICES}")));
                }
                adj = Some(Adjacency::new(n).map_err(|e| err(e.to_string()))?);
            }
            Some(a) => {
                let (Some(ut), Some(vt), None) = (tokens.next(), tokens.next(), tokens.next()) else {
                    return Err(err(format!("expected `u v`, found {line:?}")));
                };
                let (Some(u), Some(v)) = (parse_id(ut), parse_id(vt)) else {
                    return Err(err(format!("malformed vertex id in {line:?}")));
                };
                if u == v {
                    return Err(err(format!("self-loop at vertex {u}")));
                }
                if u.max(v) >= a.n {
                    return Err(err(format!("vertex id {} out of range (n = {})", u.max(v), a.n)));
                }
                if u > v {
                    return Err(err(format!("edge endpoints must be ordered u < v, found {u} {v}")));
                }
                if !a.add_edge(u, v).map_err(|e| err(e.to_string()))? {
                    return Err(err(format!("duplicate edge {u} {v}")));
                }
            }
        }
    }
    adj.map(Adjacency::into_graph)
        .ok_or(Error::Parse { line: text.split('\n').count(), msg: "missing vertex count".into() })
}

fn parse_id(t: &str) -> Option<usize> {
    if t.is_empty() || t.len() > 12 || !t.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

/// Canonical edge-list text: `n`, then edges in lexicographic order, LF-terminated.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n);
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parses a label sidecar (`vertex_id<TAB>label` lines) for a graph on `n`
/// vertices. Every vertex must be labeled exactly once.
pub fn read_labels(text: &str, n: usize) -> Result<Vec<StructuredLabel>> {
    let mut labels: Vec<Option<StructuredLabel>> = vec![None; n];
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let (id, label) = line.split_once('\t').ok_or_else(|| err(format!("expected `id<TAB>label`, found {line:?}")))?;
        let v = parse_id(id.trim()).ok_or_else(|| err(format!("bad vertex id {id:?}")))?;
        if v >= n {
            return Err(err(format!("vertex id {v} out of range (n = {n})")));
        }
        let label: StructuredLabel = label.trim().parse().map_err(|_| err(format!("bad label {label:?}")))?;
        if labels[v].replace(label).is_some() {
            return Err(err(format!("vertex {v} labeled twice")));
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| l.ok_or(Error::Parse { line: 0, msg: format!("vertex {v} has no label") }))
        .collect()
}

pub fn write_labels(labels: &[StructuredLabel]) -> String {
    labels.iter().enumerate().map(|(v, l)| format!("{v}\t{l}\n")).collect()
}
