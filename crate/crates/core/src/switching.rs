//! Degree-preserving rewiring of configurations.
//!
//! An `i`-switching breaks `2i` edges into `4i` stubs and re-pairs them.
//! [`connect_repair`] is the specific switching that attaches every small
//! component to the giant: one surplus (non-spanning-tree) edge `x-y` of the
//! giant and one edge `a-b` of a small component become `x-a` and `y-b`.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::confmodel::{components, project, Configuration};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchingMove {
    /// Edges to break, as stub pairs.
    pub broken: Vec<(u32, u32)>,
    /// New pairing of the freed stubs.
    pub repairing: Vec<(u32, u32)>,
}

impl SwitchingMove {
    /// The move that undoes this one on the switched configuration.
    pub fn inverse(&self) -> SwitchingMove {
        SwitchingMove { broken: self.repairing.clone(), repairing: self.broken.clone() }
    }
}

fn stub_set(pairs: &[(u32, u32)], what: &str) -> Result<BTreeSet<u32>> {
    let mut set = BTreeSet::new();
    for &(a, b) in pairs {
        if a == b {
            return Err(Error::InvalidMove(format!("{what} pairs stub {a} with itself")));
        }
        if !set.insert(a) || !set.insert(b) {
            return Err(Error::InvalidMove(format!("{what} uses a stub twice")));
        }
    }
    Ok(set)
}

pub fn apply_switching(c: &Configuration, mv: &SwitchingMove) -> Result<Configuration> {
    if mv.broken.len() % 2 == 1 {
        return Err(Error::InvalidMove(format!("{} broken edges; an i-switching breaks 2i", mv.broken.len())));
    }
    let freed = stub_set(&mv.broken, "broken edge list")?;
    for &(a, b) in &mv.broken {
        if a as usize >= c.stubs() || c.partner(a) != b {
            return Err(Error::InvalidMove(format!("({a}, {b}) is not an edge")));
        }
    }
    if stub_set(&mv.repairing, "repairing")? != freed {
        return Err(Error::InvalidMove("repairing does not cover exactly the freed stubs".into()));
    }
    let mut partner = c.matching().to_vec();
    for &(a, b) in &mv.repairing {
        partner[a as usize] = b;
        partner[b as usize] = a;
    }
    Ok(c.with_partner(partner))
}

/// The switching that [`connect_repair`] applies, or `None` when `c` is
/// already connected.
pub fn connect_repair_move(c: &Configuration) -> Result<Option<SwitchingMove>> {
    let g = project(c);
    let view = components(&g);
    if view.count() <= 1 {
        return Ok(None);
    }
    let needed = view.count() as u64 - 1;
    let surplus = view.surplus(view.giant).max(0) as u64;
    if surplus < needed {
        return Err(Error::InsufficientSurplus { surplus, needed });
    }
    let giant = view.giant as u32;

    // BFS spanning tree of the giant over stubs.
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); c.vertices()];
    for s in 0..c.stubs() as u32 {
        adjacency[c.vertex_of(s) as usize].push(s);
    }
    let root = view.component_of.iter().position(|&id| id == giant).expect("giant is nonempty") as u32;
    let mut seen = vec![false; c.vertices()];
    let mut tree_edge = vec![false; c.stubs()];
    let mut queue = VecDeque::from([root]);
    seen[root as usize] = true;
    while let Some(v) = queue.pop_front() {
        for &s in &adjacency[v as usize] {
            let t = c.partner(s);
            let w = c.vertex_of(t);
            if !seen[w as usize] {
                seen[w as usize] = true;
                tree_edge[s as usize] = true;
                tree_edge[t as usize] = true;
                queue.push_back(w);
            }
        }
    }
    let surplus_edges = c
        .stub_edges()
        .filter(|&(a, _)| view.component_of[c.vertex_of(a) as usize] == giant && !tree_edge[a as usize]);

    // First edge of each small component, in component-id order.
    let mut first_edge: Vec<Option<(u32, u32)>> = vec![None; view.count()];
    for (a, b) in c.stub_edges() {
        let id = view.component_of[c.vertex_of(a) as usize] as usize;
        first_edge[id].get_or_insert((a, b));
    }
    let small_edges = first_edge
        .into_iter()
        .enumerate()
        .filter(|&(id, _)| id != view.giant)
        .map(|(_, e)| e.expect("a small component has an edge"));

    let mut broken = Vec::new();
    let mut repairing = Vec::new();
    for ((x, y), (a, b)) in surplus_edges.zip(small_edges) {
        broken.push((x, y));
        broken.push((a, b));
        repairing.push((x, a));
        repairing.push((y, b));
    }
    Ok(Some(SwitchingMove { broken, repairing }))
}

/// Attaches every small component to the giant with one switching, keeping
/// the degree sequence and simplicity.
pub fn connect_repair(c: &Configuration) -> Result<Configuration> {
    match connect_repair_move(c)? {
        None => Ok(c.clone()),
        Some(mv) => apply_switching(c, &mv),
    }
}
