//! Brute-force ground truth: reduction graphs, normal forms, longest chains
//! and strong-normalization checks, plus typability inference for strongly
//! normalizing untyped terms.

mod generate;
mod infer;

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Display, Write as _};
use std::hash::Hash;

use serde_json::{json, Value};
use thiserror::Error;

use crate::reduction::{redexes_in, step, Calculus, ReductionError};
use crate::syntax::{Position, Term, UntypedTerm};
use crate::typing::TypeError;

pub use generate::{random_untyped, sn_corpus, CorpusEntry};
pub use infer::{head_subject_expansion, infer_sn, Inferred};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("fuel exhausted after {0} nodes or steps")]
    FuelExhausted(usize),
    #[error("the reduction graph has a cycle")]
    CycleDetected,
    #[error("not strongly normalizing within fuel: {0}")]
    NotSnWithinFuel(String),
    #[error(transparent)]
    IllTyped(#[from] TypeError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Exploration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fuel {
    pub max_nodes: usize,
    pub max_depth: usize,
}

impl Fuel {
    pub fn new(max_nodes: usize, max_depth: usize) -> Fuel {
        Fuel { max_nodes, max_depth }
    }

    /// A node budget with the depth bounded only by it.
    pub fn nodes(max_nodes: usize) -> Fuel {
        Fuel { max_nodes, max_depth: max_nodes }
    }
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel::nodes(10_000)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub position: Position,
}

/// The part of a reduction graph reachable within fuel. Nodes are nameless
/// terms, so α-variants coincide.
#[derive(Clone, Debug)]
pub struct ReductionGraph<T> {
    pub nodes: Vec<T>,
    pub edges: Vec<Edge>,
    pub root: usize,
    /// Some reachable node was left unexpanded.
    pub truncated: bool,
    index: HashMap<T, usize>,
}

impl<T: Clone + Eq + Hash + Display> ReductionGraph<T> {
    fn explore_with(root: T, fuel: Fuel, mut successors: impl FnMut(&T) -> Vec<(Position, T)>) -> Self {
        let mut g = ReductionGraph {
            nodes: vec![root.clone()],
            edges: Vec::new(),
            root: 0,
            truncated: false,
            index: HashMap::from([(root, 0)]),
        };
        let mut depth = vec![0usize];
        let mut queue = VecDeque::from([0usize]);
        while let Some(id) = queue.pop_front() {
            if depth[id] >= fuel.max_depth {
                g.truncated = true;
                continue;
            }
            let succ = successors(&g.nodes[id]);
            for (position, s) in succ {
                let to = match g.index.get(&s) {
                    Some(&to) => to,
                    None => {
                        if g.nodes.len() >= fuel.max_nodes {
                            g.truncated = true;
                            break;
                        }
                        let to = g.nodes.len();
                        g.nodes.push(s.clone());
                        g.index.insert(s, to);
                        depth.push(depth[id] + 1);
                        queue.push_back(to);
                        to
                    }
                };
                g.edges.push(Edge { from: id, to, position });
            }
            if g.truncated {
                break;
            }
        }
        g
    }

    pub fn node_id(&self, t: &T) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes without outgoing edges. Meaningful only when not truncated.
    pub fn sinks(&self) -> Vec<usize> {
        let mut out_degree = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            out_degree[e.from] += 1;
        }
        (0..self.nodes.len()).filter(|&i| out_degree[i] == 0).collect()
    }

    /// True if the explored part contains a cycle; any such cycle is real.
    pub fn has_cycle(&self) -> bool {
        self.longest_path().is_none()
    }

    /// Length of the longest path from the root, or `None` on a cycle.
    pub fn longest_path(&self) -> Option<usize> {
        let n = self.nodes.len();
        let mut in_degree = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for e in &self.edges {
            in_degree[e.to] += 1;
            succ[e.from].push(e.to);
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| in_degree[i] == 0).collect();
        let mut dist = vec![0usize; n];
        let mut seen = 0;
        while let Some(i) = queue.pop_front() {
            seen += 1;
            for &j in &succ[i] {
                dist[j] = dist[j].max(dist[i] + 1);
                in_degree[j] -= 1;
                if in_degree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        // Every node is reachable from the root, which has no predecessor on
        // an acyclic graph, so the longest path starts there.
        (seen == n).then(|| dist.into_iter().max().unwrap_or(0))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "formatVersion": 1,
            "nodes": self.nodes.iter().enumerate().map(|(i, t)| json!({"id": i, "term": t.to_string()})).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({"from": e.from, "to": e.to, "position": e.position.path()})).collect::<Vec<_>>(),
            "roots": [self.root],
            "truncated": self.truncated,
            "stats": {
                "nodeCount": self.nodes.len(),
                "edgeCount": self.edges.len(),
                "longestPath": self.longest_path(),
            },
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph reductions {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (i, t) in self.nodes.iter().enumerate() {
            let label = t.to_string().replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  n{i} [label=\"{label}\"];");
        }
        for e in &self.edges {
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.from, e.to, e.position);
        }
        out.push_str("}\n");
        out
    }
}

impl<T: Display> fmt::Display for ReductionGraph<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nodes, {} edges{}", self.nodes.len(), self.edges.len(), if self.truncated { " (truncated)" } else { "" })
    }
}

/// Breadth-first closure of `t` under single steps of the calculus.
pub fn explore(t: &Term, calculus: Calculus, fuel: Fuel) -> ReductionGraph<Term> {
    ReductionGraph::explore_with(t.clone(), fuel, |u| crate::reduction::reducts(u, calculus))
}

/// Breadth-first closure of `m` under β-steps.
pub fn explore_beta(m: &UntypedTerm, fuel: Fuel) -> ReductionGraph<UntypedTerm> {
    ReductionGraph::explore_with(m.clone(), fuel, UntypedTerm::beta_reducts)
}

/// Leftmost-innermost: the first redex in preorder with no redex inside it.
fn leftmost_innermost(positions: &[Position]) -> Option<&Position> {
    positions
        .iter()
        .enumerate()
        .find(|(i, p)| !positions[i + 1..].iter().any(|q| p.is_prefix_of(q) && q != *p))
        .map(|(_, p)| p)
}

/// Normal form by leftmost-innermost reduction; `fuel.max_depth` bounds the
/// number of steps.
pub fn normal_form(t: &Term, calculus: Calculus, fuel: Fuel) -> Result<(Term, usize), OracleError> {
    let mut cur = t.clone();
    for steps in 0..=fuel.max_depth {
        let positions: Vec<Position> = redexes_in(&cur, calculus).into_iter().map(|r| r.position).collect();
        let Some(p) = leftmost_innermost(&positions) else { return Ok((cur, steps)) };
        if steps == fuel.max_depth {
            break;
        }
        cur = step(&cur, p, calculus)?;
    }
    Err(OracleError::FuelExhausted(fuel.max_depth))
}

pub fn normal_form_beta(m: &UntypedTerm, fuel: Fuel) -> Result<(UntypedTerm, usize), OracleError> {
    let mut cur = m.clone();
    for steps in 0..=fuel.max_depth {
        let positions = cur.beta_redexes();
        let Some(p) = leftmost_innermost(&positions) else { return Ok((cur, steps)) };
        if steps == fuel.max_depth {
            break;
        }
        cur = cur.beta_step(p).expect("enumerated redex");
    }
    Err(OracleError::FuelExhausted(fuel.max_depth))
}

/// Length of the longest reduction sequence from `t`.
pub fn longest_chain(t: &Term, calculus: Calculus, fuel: Fuel) -> Result<usize, OracleError> {
    chain_of(&explore(t, calculus, fuel), fuel)
}

pub fn longest_chain_beta(m: &UntypedTerm, fuel: Fuel) -> Result<usize, OracleError> {
    chain_of(&explore_beta(m, fuel), fuel)
}

fn chain_of<T: Clone + Eq + Hash + Display>(g: &ReductionGraph<T>, fuel: Fuel) -> Result<usize, OracleError> {
    match g.longest_path() {
        None => Err(OracleError::CycleDetected),
        Some(_) if g.truncated => Err(OracleError::FuelExhausted(fuel.max_nodes)),
        Some(n) => Ok(n),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnVerdict {
    Yes,
    No,
    Unknown,
}

impl Display for SnVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SnVerdict::Yes => "yes",
            SnVerdict::No => "no",
            SnVerdict::Unknown => "unknown",
        })
    }
}

/// Yes if the β-graph closes without a cycle, no if a cycle is reachable,
/// unknown when fuel runs out first.
pub fn is_sn(m: &UntypedTerm, fuel: Fuel) -> SnVerdict {
    let g = explore_beta(m, fuel);
    if g.has_cycle() {
        SnVerdict::No
    } else if g.truncated {
        SnVerdict::Unknown
    } else {
        SnVerdict::Yes
    }
}
