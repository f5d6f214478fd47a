//! Neighbourhood census, branching-process tree laws and exact samplers of
//! connected simple graphs.
//!
//! Rooted trees are identified by AHU codes: a leaf is `()`, an internal node
//! is `(` followed by its children's codes in lexicographic order and `)`.
//!
//! The tree law conditions a unimodular branching process (root offspring
//! `q`, later offspring `q*`) on survival. Given the first `r` generations,
//! the process dies out exactly when all `L` individuals at depth `r` do,
//! each independently with probability `beta`, so
//! `mu(t) = P(t) (1 - beta^L) / (1 - sum_k q_k beta^k)`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::confmodel::{components, MultiGraph, Sampler};
use crate::degrees::{size_biased, DegreeDistribution, TypeSequence};
use crate::embedding::build_embedding;
use crate::error::{Error, Result};
use crate::par::{map_replicates, rng_from_seed, Execution};
use crate::rate::one_minus_pow;

/// Histogram key for balls that contain a cycle.
pub const NON_TREE: &str = "NON_TREE";

/// Upper limit on the number of trees [`enumerate_bp_trees`] builds.
pub const TREE_ENUMERATION_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RootedTreeCode {
    pub code: String,
    pub radius: u32,
    /// Number of vertices at depth exactly `radius`.
    pub leaves_at_depth: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum BallShape {
    Tree(RootedTreeCode),
    NonTree,
}

impl BallShape {
    pub fn key(&self) -> &str {
        match self {
            BallShape::Tree(t) => &t.code,
            BallShape::NonTree => NON_TREE,
        }
    }
}

struct Node {
    code: String,
    children: Vec<Node>,
}

fn parse_node(bytes: &[u8], pos: &mut usize) -> Result<Node> {
    if bytes.get(*pos) != Some(&b'(') {
        return Err(Error::InvalidTreeCode(format!("expected '(' at offset {pos}")));
    }
    let start = *pos;
    *pos += 1;
    let mut children = Vec::new();
    while bytes.get(*pos) == Some(&b'(') {
        children.push(parse_node(bytes, pos)?);
    }
    if bytes.get(*pos) != Some(&b')') {
        return Err(Error::InvalidTreeCode(format!("expected ')' at offset {pos}")));
    }
    *pos += 1;
    if children.windows(2).any(|w| w[0].code > w[1].code) {
        return Err(Error::InvalidTreeCode("children are not in canonical order".into()));
    }
    let code = String::from_utf8(bytes[start..*pos].to_vec()).expect("ascii");
    Ok(Node { code, children })
}

fn depth_counts(node: &Node, depth: u32, counts: &mut Vec<u64>) {
    if counts.len() <= depth as usize {
        counts.resize(depth as usize + 1, 0);
    }
    counts[depth as usize] += 1;
    for c in &node.children {
        depth_counts(c, depth + 1, counts);
    }
}

impl RootedTreeCode {
    /// Parses a canonical code, checking its depth is at most `radius`.
    pub fn parse(code: &str, radius: u32) -> Result<RootedTreeCode> {
        let node = Self::parse_tree(code)?;
        let mut counts = Vec::new();
        depth_counts(&node, 0, &mut counts);
        if counts.len() > radius as usize + 1 {
            return Err(Error::InvalidTreeCode(format!("depth {} exceeds radius {radius}", counts.len() - 1)));
        }
        let leaves_at_depth = counts.get(radius as usize).copied().unwrap_or(0);
        Ok(RootedTreeCode { code: code.to_string(), radius, leaves_at_depth })
    }

    fn parse_tree(code: &str) -> Result<Node> {
        let mut pos = 0;
        let node = parse_node(code.as_bytes(), &mut pos)?;
        if pos != code.len() {
            return Err(Error::InvalidTreeCode(format!("trailing input at offset {pos}")));
        }
        Ok(node)
    }

    /// Root with `k` leaf children.
    pub fn star(k: usize, radius: u32) -> RootedTreeCode {
        let code = format!("({})", "()".repeat(k));
        RootedTreeCode::parse(&code, radius.max(1)).expect("stars are canonical")
    }

    pub fn root_degree(&self) -> usize {
        Self::parse_tree(&self.code).map(|n| n.children.len()).unwrap_or(0)
    }
}

/// Radius-`r` ball around `v` in a graph given by adjacency lists.
fn ball_shape(adjacency: &[Vec<u32>], v: u32, r: u32) -> BallShape {
    let mut depth: HashMap<u32, u32> = HashMap::from([(v, 0)]);
    let mut order = vec![v];
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        let d = depth[&u];
        if d == r {
            continue;
        }
        for &w in &adjacency[u as usize] {
            if !depth.contains_key(&w) {
                depth.insert(w, d + 1);
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let incidences: usize =
        order.iter().map(|&u| adjacency[u as usize].iter().filter(|w| depth.contains_key(w)).count()).sum();
    if incidences / 2 + 1 != order.len() {
        return BallShape::NonTree;
    }
    let mut codes: HashMap<u32, String> = HashMap::with_capacity(order.len());
    let mut at_radius = 0;
    for &u in order.iter().rev() {
        let du = depth[&u];
        at_radius += (du == r) as u64;
        let mut children: Vec<&str> = adjacency[u as usize]
            .iter()
            .filter(|w| depth.get(w) == Some(&(du + 1)))
            .map(|w| codes[w].as_str())
            .collect();
        children.sort_unstable();
        let code = format!("({})", children.concat());
        codes.insert(u, code);
    }
    BallShape::Tree(RootedTreeCode { code: codes.remove(&v).expect("root coded"), radius: r, leaves_at_depth: at_radius })
}

pub fn neighborhood_tree(g: &MultiGraph, v: u32, r: u32) -> BallShape {
    ball_shape(&g.adjacency(), v, r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusHistogram {
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
    pub radius: u32,
}

impl CensusHistogram {
    pub fn empty(radius: u32) -> Self {
        CensusHistogram { counts: BTreeMap::new(), total: 0, radius }
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn fraction(&self, key: &str) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(key) as f64 / self.total as f64
        }
    }

    pub fn merge(&mut self, other: &CensusHistogram) {
        for (k, &c) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += c;
        }
        self.total += other.total;
    }
}

pub fn empirical_census(g: &MultiGraph, r: u32) -> CensusHistogram {
    empirical_census_with(g, r, Execution::default())
}

pub fn empirical_census_with(g: &MultiGraph, r: u32, exec: Execution) -> CensusHistogram {
    let adjacency = g.adjacency();
    let shapes = map_replicates(exec, g.vertices() as u64, |v| ball_shape(&adjacency, v as u32, r));
    let mut hist = CensusHistogram::empty(r);
    for s in &shapes {
        *hist.counts.entry(s.key().to_string()).or_insert(0) += 1;
    }
    hist.total = shapes.len() as u64;
    hist
}

fn multinomial_factor(codes: &[&str]) -> f64 {
    let mut f = 1.0;
    for i in 1..=codes.len() {
        f *= i as f64;
    }
    let mut run = 1;
    for i in 1..=codes.len() {
        if i < codes.len() && codes[i] == codes[i - 1] {
            run += 1;
        } else {
            for j in 2..=run {
                f /= j as f64;
            }
            run = 1;
        }
    }
    f
}

/// Probability of a tree under the survival-conditioned unimodular process
/// with root law `q` and extinction probability `beta` of the `q*` process.
pub fn bp_tree_probability(q: &DegreeDistribution, beta: f64, t: &RootedTreeCode) -> Result<f64> {
    if t.radius == 0 {
        return Err(Error::Domain("radius must be at least 1".into()));
    }
    let root = RootedTreeCode::parse_tree(&t.code)?;
    let q_star = size_biased(q);
    fn unconditioned(node: &Node, depth: u32, r: u32, law: &dyn Fn(u32, u32) -> f64) -> f64 {
        if depth == r {
            return 1.0;
        }
        let codes: Vec<&str> = node.children.iter().map(|c| c.code.as_str()).collect();
        let mut p = law(depth, node.children.len() as u32) * multinomial_factor(&codes);
        for c in &node.children {
            if p == 0.0 {
                break;
            }
            p *= unconditioned(c, depth + 1, r, law);
        }
        p
    }
    let law = |depth: u32, k: u32| if depth == 0 { q.weight(k) } else { q_star.weight(k) };
    let p = unconditioned(&root, 0, t.radius, &law);
    let root_survival: f64 = q.iter().map(|(k, w)| w * one_minus_pow(beta, k)).sum();
    Ok(p * one_minus_pow(beta, t.leaves_at_depth as u32) / root_survival)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeProbability {
    pub tree: RootedTreeCode,
    pub mu: f64,
}

/// Every tree of depth at most `r` the process can produce, with `mu >= min_prob`,
/// sorted by decreasing `mu` then code.
pub fn enumerate_bp_trees(q: &DegreeDistribution, beta: f64, r: u32, min_prob: f64) -> Result<Vec<TreeProbability>> {
    if r == 0 {
        return Err(Error::Domain("radius must be at least 1".into()));
    }
    #[derive(Clone)]
    struct Sub {
        code: String,
        prob: f64,
        at_radius: u64,
    }
    let q_star = size_biased(q);
    let mut level = vec![Sub { code: "()".into(), prob: 1.0, at_radius: 1 }];
    for depth in (0..r).rev() {
        let law: Vec<(u32, f64)> = if depth == 0 { q.iter().collect() } else { q_star.iter().collect() };
        // Children codes must come out sorted, so order the pool by code.
        level.sort_by(|a, b| a.code.cmp(&b.code));
        let mut next = Vec::new();
        for (c, w) in law {
            if w == 0.0 {
                continue;
            }
            let mut pick = vec![0usize; c as usize];
            loop {
                if next.len() >= TREE_ENUMERATION_LIMIT {
                    return Err(Error::Domain(format!("more than {TREE_ENUMERATION_LIMIT} trees")));
                }
                let codes: Vec<&str> = pick.iter().map(|&i| level[i].code.as_str()).collect();
                let prob = pick.iter().fold(w * multinomial_factor(&codes), |acc, &i| acc * level[i].prob);
                next.push(Sub {
                    code: format!("({})", codes.concat()),
                    prob,
                    at_radius: pick.iter().map(|&i| level[i].at_radius).sum(),
                });
                // next non-decreasing index tuple
                let Some(i) = (0..pick.len()).rev().find(|&i| pick[i] + 1 < level.len()) else { break };
                let v = pick[i] + 1;
                for p in &mut pick[i..] {
                    *p = v;
                }
            }
        }
        level = next;
    }
    let root_survival: f64 = q.iter().map(|(k, w)| w * one_minus_pow(beta, k)).sum();
    let mut out: Vec<TreeProbability> = level
        .into_iter()
        .map(|s| TreeProbability {
            mu: s.prob * one_minus_pow(beta, s.at_radius as u32) / root_survival,
            tree: RootedTreeCode { code: s.code, radius: r, leaves_at_depth: s.at_radius },
        })
        .filter(|t| t.mu >= min_prob && t.mu > 0.0)
        .collect();
    out.sort_by(|a, b| b.mu.total_cmp(&a.mu).then_with(|| a.tree.code.cmp(&b.tree.code)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformSample {
    pub graph: MultiGraph,
    pub attempts: u64,
}

/// Uniform connected simple graph with type `t`, by rejection from the
/// configuration model.
pub fn sample_uniform_connected(t: &TypeSequence, seed: u64, budget: u64) -> Result<UniformSample> {
    let mut sampler = Sampler::new(t)?;
    let mut rng = rng_from_seed(seed);
    for attempt in 1..=budget {
        if sampler.sample_connected_simple(&mut rng) {
            return Ok(UniformSample { graph: sampler.current_graph(), attempts: attempt });
        }
    }
    Err(Error::BudgetExhausted { attempts: budget })
}

/// How close the giants came to the target when no attempt was accepted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearMissReport {
    pub attempts: u64,
    pub target: TypeSequence,
    /// Histogram of `sum_k |v_k(giant) - n_k|` over attempts.
    pub distances: BTreeMap<u64, u64>,
    pub min_distance: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GiantOutcome {
    Accepted { graph: MultiGraph, attempts: u64 },
    Exhausted(NearMissReport),
}

impl GiantOutcome {
    pub fn into_result(self) -> Result<UniformSample> {
        match self {
            GiantOutcome::Accepted { graph, attempts } => Ok(UniformSample { graph, attempts }),
            GiantOutcome::Exhausted(r) => Err(Error::BudgetExhausted { attempts: r.attempts }),
        }
    }
}

/// Samples configurations on the enlarged sequence and keeps the first whose
/// giant is simple with type `p.integerize(n)`; the giant is returned
/// relabelled in vertex order.
pub fn giant_rejection_sample(p: &DegreeDistribution, eps: f64, n: u64, seed: u64, budget: u64) -> Result<GiantOutcome> {
    let target = p.integerize(n);
    let plan = build_embedding(p, eps, n)?;
    let mut sampler = Sampler::new(&plan.big)?;
    let mut rng = rng_from_seed(seed);
    let mut distances = BTreeMap::new();
    for attempt in 1..=budget {
        let summary = sampler.sample_giant(&mut rng);
        let giant = sampler.summary_type(&summary);
        let distance: u64 = target
            .iter()
            .map(|(k, c)| giant.count(k).abs_diff(c))
            .chain(giant.iter().filter(|&(k, _)| target.count(k) == 0).map(|(_, c)| c))
            .sum();
        if distance == 0 && summary.giant_simple {
            let g = sampler.current_graph();
            let view = components(&g);
            return Ok(GiantOutcome::Accepted { graph: g.induced(&view.members(view.giant)), attempts: attempt });
        }
        *distances.entry(distance).or_insert(0) += 1;
    }
    let min_distance = distances.keys().next().copied();
    Ok(GiantOutcome::Exhausted(NearMissReport { attempts: budget, target, distances, min_distance }))
}
