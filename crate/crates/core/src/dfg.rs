//! Data-flow graphs: typed operation nodes joined by precedence edges.
//!
//! Nodes are stored sorted by id, so a node's index doubles as its rank in
//! the ascending-id tie-break used throughout the crate.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// Symbolic operation type, e.g. `mul` or `add`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpType(String);

impl OpType {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "op type name must be non-empty");
        OpType(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for OpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for OpType {
    fn from(s: &str) -> Self {
        OpType::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: u32,
    pub op: OpType,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateNode(u32),
    #[error("edge {0} -> {1} references unknown node {2}")]
    DanglingEdge(u32, u32, u32),
    #[error("self-loop on node {0}")]
    SelfLoop(u32),
    #[error("cycle detected through nodes {0:?}")]
    Cycle(Vec<u32>),
}

/// A validated directed acyclic operation graph.
#[derive(Clone, Debug)]
pub struct Dfg {
    name: String,
    nodes: Vec<Node>,
    edges: Vec<(usize, usize)>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    index: HashMap<u32, usize>,
    topo: Vec<usize>,
}

impl Dfg {
    /// Builds a graph from nodes and `(src id, dst id)` edges.
    pub fn new(
        name: impl Into<String>,
        nodes: impl IntoIterator<Item = Node>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        let mut nodes: Vec<Node> = nodes.into_iter().collect();
        nodes.sort_by_key(|n| n.id);
        if let Some(w) = nodes.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateNode(w[0].id));
        }
        let index: HashMap<u32, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();

        // Parallel edges collapse into one precedence.
        let mut edge_set = BTreeSet::new();
        for (src, dst) in edges {
            let s = *index.get(&src).ok_or(GraphError::DanglingEdge(src, dst, src))?;
            let d = *index.get(&dst).ok_or(GraphError::DanglingEdge(src, dst, dst))?;
            if s == d {
                return Err(GraphError::SelfLoop(src));
            }
            edge_set.insert((s, d));
        }
        let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
        let mut preds = vec![Vec::new(); nodes.len()];
        let mut succs = vec![Vec::new(); nodes.len()];
        for &(s, d) in &edges {
            succs[s].push(d);
            preds[d].push(s);
        }

        let mut g = Dfg { name: name.into(), nodes, edges, preds, succs, index, topo: Vec::new() };
        g.topo = match kahn(&g.preds, &g.succs) {
            Ok(order) => order,
            Err(remaining) => {
                let cycle = find_cycle(&g.succs, &remaining);
                return Err(GraphError::Cycle(cycle.into_iter().map(|i| g.nodes[i].id).collect()));
            }
        };
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    /// Edges as `(src index, dst index)`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn preds(&self, idx: usize) -> &[usize] {
        &self.preds[idx]
    }

    pub fn succs(&self, idx: usize) -> &[usize] {
        &self.succs[idx]
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Distinct op types used by the graph, sorted by name.
    pub fn op_types(&self) -> Vec<OpType> {
        let set: BTreeSet<&OpType> = self.nodes.iter().map(|n| &n.op).collect();
        set.into_iter().cloned().collect()
    }

    /// Node indices in topological order, ties broken by ascending id.
    pub fn topo_indices(&self) -> &[usize] {
        &self.topo
    }

    /// Node ids in topological order, ties broken by ascending id.
    pub fn topological_order(&self) -> Vec<u32> {
        self.topo.iter().map(|&i| self.nodes[i].id).collect()
    }

    /// Parses the line-oriented DFG format.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_dfg(text)
    }

    /// Renders the graph back into the textual format.
    pub fn to_text(&self) -> String {
        let mut out = format!("name {}\n", self.name);
        for n in &self.nodes {
            out.push_str(&format!("node {} {}\n", n.id, n.op));
        }
        for &(s, d) in &self.edges {
            out.push_str(&format!("edge {} -> {}\n", self.nodes[s].id, self.nodes[d].id));
        }
        out
    }
}

fn kahn(preds: &[Vec<usize>], succs: &[Vec<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let n = preds.len();
    let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(u)) = ready.pop() {
        order.push(u);
        for &v in &succs[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(Reverse(v));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).filter(|&i| indeg[i] > 0).collect())
    }
}

/// Walks successors inside the leftover (cyclic) subgraph until a node repeats.
fn find_cycle(succs: &[Vec<usize>], remaining: &[usize]) -> Vec<usize> {
    let alive: BTreeSet<usize> = remaining.iter().copied().collect();
    let mut pos = HashMap::new();
    let mut path = Vec::new();
    let mut cur = remaining[0];
    loop {
        if let Some(&p) = pos.get(&cur) {
            return path[p..].to_vec();
        }
        pos.insert(cur, path.len());
        path.push(cur);
        // Every leftover node keeps a leftover successor, otherwise Kahn would have freed it.
        cur = *succs[cur].iter().find(|s| alive.contains(s)).expect("leftover node without leftover successor");
    }
}

fn parse_dfg(text: &str) -> Result<Dfg, ParseError> {
    let mut name: Option<String> = None;
    let mut seen_stanza = false;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("");
        for stmt in line.split(';') {
            let toks: Vec<&str> = stmt.split_whitespace().collect();
            let Some(&kw) = toks.first() else { continue };
            match kw {
                "name" => {
                    if seen_stanza || name.is_some() {
                        return Err(ParseError::syntax(line_no, "`name` must be the first stanza"));
                    }
                    if toks.len() != 2 {
                        return Err(ParseError::syntax(line_no, "expected `name <identifier>`"));
                    }
                    name = Some(toks[1].to_string());
                }
                "node" => {
                    seen_stanza = true;
                    if toks.len() != 3 {
                        return Err(ParseError::syntax(line_no, "expected `node <id> <optype>`"));
                    }
                    let id = parse_id(toks[1], line_no)?;
                    nodes.push(Node { id, op: OpType::new(toks[2]) });
                }
                "edge" => {
                    seen_stanza = true;
                    if toks.len() != 4 || toks[2] != "->" {
                        return Err(ParseError::syntax(line_no, "expected `edge <src> -> <dst>`"));
                    }
                    edges.push((parse_id(toks[1], line_no)?, parse_id(toks[3], line_no)?));
                }
                other => {
                    return Err(ParseError::syntax(line_no, format!("unknown stanza `{other}`")));
                }
            }
        }
    }
    Dfg::new(name.unwrap_or_else(|| "dfg".to_string()), nodes, edges).map_err(ParseError::Graph)
}

fn parse_id(tok: &str, line: usize) -> Result<u32, ParseError> {
    tok.parse().map_err(|_| ParseError::syntax(line, format!("invalid node id `{tok}`")))
}
