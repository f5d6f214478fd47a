//! Configurations (perfect matchings of half-edges), their multigraph
//! projection, simplicity and components.
//!
//! Half-edge labelling: vertices are ordered by ascending degree (the order of
//! [`TypeSequence::degree_list`]) and vertex `v` owns the consecutive stubs
//! `first_stub[v] .. first_stub[v] + d_v`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::degrees::TypeSequence;
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::par::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    type_seq: TypeSequence,
    first_stub: Vec<u32>,
    vertex_of_stub: Vec<u32>,
    partner: Vec<u32>,
}

/// Stub ownership for a type sequence.
fn layout(t: &TypeSequence) -> (Vec<u32>, Vec<u32>) {
    let degrees = t.degree_list();
    let mut first = Vec::with_capacity(degrees.len() + 1);
    let mut owner = Vec::with_capacity(t.total_degree() as usize);
    let mut next = 0u32;
    for (v, &d) in degrees.iter().enumerate() {
        first.push(next);
        owner.extend(std::iter::repeat(v as u32).take(d as usize));
        next += d;
    }
    first.push(next);
    (first, owner)
}

impl Configuration {
    /// Wraps an explicit matching; `partner[s]` is the stub paired with `s`.
    pub fn from_matching(t: &TypeSequence, partner: Vec<u32>) -> Result<Self> {
        let l = t.total_degree() as usize;
        if partner.len() != l {
            return Err(Error::InvalidConfiguration(format!("{} stubs, expected {l}", partner.len())));
        }
        for (s, &p) in partner.iter().enumerate() {
            if p as usize >= l || p as usize == s || partner[p as usize] as usize != s {
                return Err(Error::InvalidConfiguration(format!("stub {s} is not properly paired")));
            }
        }
        let (first_stub, vertex_of_stub) = layout(t);
        Ok(Configuration { type_seq: t.clone(), first_stub, vertex_of_stub, partner })
    }

    /// Builds a configuration from stub pairs.
    pub fn from_pairs(t: &TypeSequence, pairs: &[(u32, u32)]) -> Result<Self> {
        let l = t.total_degree() as usize;
        let mut partner = vec![u32::MAX; l];
        for &(a, b) in pairs {
            for s in [a, b] {
                if s as usize >= l || partner[s as usize] != u32::MAX {
                    return Err(Error::InvalidConfiguration(format!("stub {s} reused or out of range")));
                }
            }
            partner[a as usize] = b;
            partner[b as usize] = a;
        }
        Self::from_matching(t, partner)
    }

    pub fn type_sequence(&self) -> &TypeSequence {
        &self.type_seq
    }

    pub fn stubs(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, stub: u32) -> u32 {
        self.partner[stub as usize]
    }

    pub fn matching(&self) -> &[u32] {
        &self.partner
    }

    pub fn vertex_of(&self, stub: u32) -> u32 {
        self.vertex_of_stub[stub as usize]
    }

    /// Global index of stub `j` (0-based) of vertex `v`.
    pub fn stub_of(&self, v: u32, j: u32) -> u32 {
        self.first_stub[v as usize] + j
    }

    pub fn vertices(&self) -> usize {
        self.first_stub.len() - 1
    }

    /// Edges as `(lower stub, upper stub)` in increasing lower-stub order.
    pub fn stub_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(s, &p)| (s as u32) < p)
            .map(|(s, &p)| (s as u32, p))
    }

    pub(crate) fn with_partner(&self, partner: Vec<u32>) -> Configuration {
        Configuration {
            type_seq: self.type_seq.clone(),
            first_stub: self.first_stub.clone(),
            vertex_of_stub: self.vertex_of_stub.clone(),
            partner,
        }
    }
}

fn check_sampleable(t: &TypeSequence) -> Result<()> {
    let l = t.total_degree();
    if l % 2 == 1 {
        return Err(Error::OddTotalDegree { total: l });
    }
    if l < 2 {
        return Err(Error::EmptySequence);
    }
    Ok(())
}

/// Uniform configuration: Fisher-Yates shuffle of the stubs, then pairs
/// `(2j, 2j+1)` of the shuffled array.
pub fn sample_configuration(t: &TypeSequence, seed: u64) -> Result<Configuration> {
    check_sampleable(t)?;
    let mut rng = rng_from_seed(seed);
    Ok(sample_configuration_with(t, &mut rng))
}

pub fn sample_configuration_with<R: Rng>(t: &TypeSequence, rng: &mut R) -> Configuration {
    let l = t.total_degree() as usize;
    let mut stubs: Vec<u32> = (0..l as u32).collect();
    stubs.shuffle(rng);
    let mut partner = vec![0u32; l];
    for pair in stubs.chunks_exact(2) {
        partner[pair[0] as usize] = pair[1];
        partner[pair[1] as usize] = pair[0];
    }
    let (first_stub, vertex_of_stub) = layout(t);
    Configuration { type_seq: t.clone(), first_stub, vertex_of_stub, partner }
}

/// Multigraph on `0..n`; loops count twice toward the degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    degrees: Vec<u32>,
}

impl MultiGraph {
    pub fn new(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        let mut degrees = vec![0u32; n];
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidConfiguration(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
            normalized.push((u.min(v), u.max(v)));
        }
        Ok(MultiGraph { n, edges: normalized, degrees })
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.degrees[v as usize]
    }

    pub fn type_sequence(&self) -> Result<TypeSequence> {
        let mut counts = BTreeMap::new();
        for &d in &self.degrees {
            *counts.entry(d).or_insert(0u64) += 1;
        }
        TypeSequence::new(counts)
    }

    /// Adjacency lists (a loop appears twice in its vertex's list).
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj: Vec<Vec<u32>> = self.degrees.iter().map(|&d| Vec::with_capacity(d as usize)).collect();
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }

    /// Disjoint union, relabelling `other` after `self`.
    pub fn disjoint_union(&self, other: &MultiGraph) -> MultiGraph {
        let shift = self.n as u32;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        MultiGraph::new(self.n + other.n, edges).expect("shifted edges are in range")
    }

    /// Induced subgraph on `keep` (sorted ascending), relabelled `0..keep.len()`.
    pub fn induced(&self, keep: &[u32]) -> MultiGraph {
        let mut index = vec![u32::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v as usize] = i as u32;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u as usize] != u32::MAX && index[v as usize] != u32::MAX)
            .map(|&(u, v)| (index[u as usize], index[v as usize]))
            .collect();
        MultiGraph::new(keep.len(), edges).expect("relabelled edges are in range")
    }

    /// One `u v` line per edge, 1-indexed.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            writeln!(out, "{} {}", u + 1, v + 1).unwrap();
        }
        out
    }

    /// Parses the edge-list format; blank lines and `#` comments are skipped.
    /// The vertex count is the largest label unless `n` is given.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<MultiGraph> {
        let mut edges = Vec::new();
        let mut max = 0u32;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace().map(str::parse::<u32>);
            let (Some(Ok(u)), Some(Ok(v)), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::InvalidConfiguration(format!("line {}: expected `u v`", lineno + 1)));
            };
            if u == 0 || v == 0 {
                return Err(Error::InvalidConfiguration(format!("line {}: labels are 1-indexed", lineno + 1)));
            }
            max = max.max(u).max(v);
            edges.push((u - 1, v - 1));
        }
        MultiGraph::new(n.unwrap_or(max as usize), edges)
    }
}

pub fn project(c: &Configuration) -> MultiGraph {
    let edges = c.stub_edges().map(|(a, b)| (c.vertex_of(a), c.vertex_of(b))).collect();
    MultiGraph::new(c.vertices(), edges).expect("stub owners are valid vertices")
}

pub fn is_simple(g: &MultiGraph) -> bool {
    let mut keys: Vec<u64> = Vec::with_capacity(g.edges.len());
    for &(u, v) in &g.edges {
        if u == v {
            return false;
        }
        keys.push(((u as u64) << 32) | v as u64);
    }
    keys.sort_unstable();
    keys.windows(2).all(|w| w[0] != w[1])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentView {
    /// Component id per vertex; ids follow first appearance in vertex order.
    pub component_of: Vec<u32>,
    pub types: Vec<TypeSequence>,
    pub sizes: Vec<u64>,
    pub edge_counts: Vec<u64>,
    /// Largest component by vertex count, lowest id on ties.
    pub giant: usize,
}

impl ComponentView {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn giant_type(&self) -> &TypeSequence {
        &self.types[self.giant]
    }

    /// `|E| - (|V| - 1)` for component `c`.
    pub fn surplus(&self, c: usize) -> i64 {
        self.edge_counts[c] as i64 - (self.sizes[c] as i64 - 1)
    }

    pub fn members(&self, c: usize) -> Vec<u32> {
        (0..self.component_of.len() as u32).filter(|&v| self.component_of[v as usize] == c as u32).collect()
    }
}

pub fn components(g: &MultiGraph) -> ComponentView {
    let mut dsu = DisjointSets::new(g.n);
    for &(u, v) in &g.edges {
        dsu.union(u, v);
    }
    let mut id_of_root = vec![u32::MAX; g.n];
    let mut component_of = Vec::with_capacity(g.n);
    let mut counts: Vec<BTreeMap<u32, u64>> = Vec::new();
    let mut sizes = Vec::new();
    for v in 0..g.n as u32 {
        let r = dsu.find(v) as usize;
        if id_of_root[r] == u32::MAX {
            id_of_root[r] = sizes.len() as u32;
            sizes.push(0);
            counts.push(BTreeMap::new());
        }
        let id = id_of_root[r];
        component_of.push(id);
        sizes[id as usize] += 1;
        *counts[id as usize].entry(g.degrees[v as usize]).or_insert(0) += 1;
    }
    let mut edge_counts = vec![0u64; sizes.len()];
    for &(u, _) in &g.edges {
        edge_counts[component_of[u as usize] as usize] += 1;
    }
    let mut giant = 0;
    for (i, &s) in sizes.iter().enumerate() {
        if s > sizes[giant] {
            giant = i;
        }
    }
    let types = counts
        .into_iter()
        .map(|c| TypeSequence::new(c).expect("component degree sums are even"))
        .collect();
    ComponentView { component_of, types, sizes, edge_counts, giant }
}

/// What a fast sampling pass reports about one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GiantSummary {
    /// Vertex counts of the giant, indexed like [`Sampler::classes`].
    pub counts: Vec<u64>,
    pub components: usize,
    pub giant_simple: bool,
    pub simple: bool,
}

/// Allocation-free repeated sampling for one type sequence.
#[derive(Debug, Clone)]
pub struct Sampler {
    classes: Vec<u32>,
    class_of_vertex: Vec<u32>,
    vertex_of_stub: Vec<u32>,
    stubs: Vec<u32>,
    keys: Vec<u64>,
    dsu: DisjointSets,
    n: usize,
}

impl Sampler {
    pub fn new(t: &TypeSequence) -> Result<Self> {
        check_sampleable(t)?;
        let (_, vertex_of_stub) = layout(t);
        let classes: Vec<u32> = t.iter().map(|(k, _)| k).collect();
        let mut class_of_vertex = Vec::new();
        for (i, (_, c)) in t.iter().enumerate() {
            class_of_vertex.extend(std::iter::repeat(i as u32).take(c as usize));
        }
        let n = class_of_vertex.len();
        Ok(Sampler {
            classes,
            class_of_vertex,
            stubs: (0..vertex_of_stub.len() as u32).collect(),
            vertex_of_stub,
            keys: Vec::new(),
            dsu: DisjointSets::new(n),
            n,
        })
    }

    /// Degrees of the classes, ascending.
    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    fn shuffle<R: Rng>(&mut self, rng: &mut R) {
        // Fisher-Yates from the identity each time so a draw depends only on the rng.
        for (i, s) in self.stubs.iter_mut().enumerate() {
            *s = i as u32;
        }
        self.stubs.shuffle(rng);
    }

    fn edge(&self, j: usize) -> (u32, u32) {
        let a = self.vertex_of_stub[self.stubs[2 * j] as usize];
        let b = self.vertex_of_stub[self.stubs[2 * j + 1] as usize];
        (a.min(b), a.max(b))
    }

    fn has_loop_or_multi(&mut self, mut keep: impl FnMut(u32) -> bool) -> bool {
        self.keys.clear();
        for j in 0..self.stubs.len() / 2 {
            let (a, b) = self.edge(j);
            if !keep(a) {
                continue;
            }
            if a == b {
                return true;
            }
            self.keys.push(((a as u64) << 32) | b as u64);
        }
        self.keys.sort_unstable();
        self.keys.windows(2).any(|w| w[0] == w[1])
    }

    /// Draws a configuration and reports whether it projects to a simple graph.
    pub fn sample_simple<R: Rng>(&mut self, rng: &mut R) -> bool {
        self.shuffle(rng);
        !self.has_loop_or_multi(|_| true)
    }

    /// Draws a configuration and reports whether it is connected.
    pub fn sample_connected<R: Rng>(&mut self, rng: &mut R) -> bool {
        self.shuffle(rng);
        self.dsu = DisjointSets::new(self.n);
        let mut merges = 0;
        for j in 0..self.stubs.len() / 2 {
            let (a, b) = self.edge(j);
            if self.dsu.union(a, b) {
                merges += 1;
            }
        }
        merges + 1 == self.n
    }

    /// Draws a configuration and summarises its giant component.
    pub fn sample_giant<R: Rng>(&mut self, rng: &mut R) -> GiantSummary {
        self.shuffle(rng);
        self.dsu = DisjointSets::new(self.n);
        let mut merges = 0;
        for j in 0..self.stubs.len() / 2 {
            let (a, b) = self.edge(j);
            if self.dsu.union(a, b) {
                merges += 1;
            }
        }
        let mut size = vec![0u32; self.n];
        let mut best: Option<(u32, u32)> = None;
        for v in 0..self.n as u32 {
            let r = self.dsu.find(v);
            size[r as usize] += 1;
        }
        for v in 0..self.n as u32 {
            let r = self.dsu.find(v);
            let s = size[r as usize];
            // first vertex in order reaching the maximum identifies the lowest-id giant
            if best.map_or(true, |(_, bs)| s > bs) {
                best = Some((r, s));
            }
        }
        let giant_root = best.map(|(r, _)| r).unwrap_or(0);
        let mut counts = vec![0u64; self.classes.len()];
        let mut in_giant = vec![false; self.n];
        for v in 0..self.n as u32 {
            if self.dsu.find(v) == giant_root {
                counts[self.class_of_vertex[v as usize] as usize] += 1;
                in_giant[v as usize] = true;
            }
        }
        let simple = !self.has_loop_or_multi(|_| true);
        let giant_simple = simple || !self.has_loop_or_multi(|a| in_giant[a as usize]);
        GiantSummary { counts, components: self.n - merges, giant_simple, simple }
    }

    /// Draws a configuration and reports whether it is connected and simple.
    pub fn sample_connected_simple<R: Rng>(&mut self, rng: &mut R) -> bool {
        self.sample_connected(rng) && !self.has_loop_or_multi(|_| true)
    }

    /// Projection of the most recent draw, edges sorted.
    pub fn current_graph(&self) -> MultiGraph {
        let mut edges: Vec<(u32, u32)> = (0..self.stubs.len() / 2).map(|j| self.edge(j)).collect();
        edges.sort_unstable();
        MultiGraph::new(self.n, edges).expect("stub owners are valid vertices")
    }

    /// The type sequence described by a giant summary.
    pub fn summary_type(&self, summary: &GiantSummary) -> TypeSequence {
        TypeSequence::new(self.classes.iter().copied().zip(summary.counts.iter().copied()).collect())
            .expect("giant degree sums are even")
    }
}
