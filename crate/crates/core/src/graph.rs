//! Plant graph data model.
//!
//! A [`PlantGraph`] is a weighted digraph whose nodes carry a [`NodeRole`]
//! and whose edges carry the [`EdgeLogic`] of their head node. Graphs are
//! immutable once validated; reconfiguration is expressed through a
//! [`SwitchState`] and [`PlantGraph::effective_graph`].
//!
//! Nodes are stored in canonical order (see [`natural_cmp`]), so node
//! indices, switch gene order and worklist order all follow ascending id.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::switches::SwitchState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NodeRole {
    Source,
    Hub,
    Switch,
    User,
}

impl fmt::Display for NodeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeRole::Source => "SOURCE",
            NodeRole::Hub => "HUB",
            NodeRole::Switch => "SWITCH",
            NodeRole::User => "USER",
        };
        f.write_str(s)
    }
}

/// Predecessor logic of an edge's head node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EdgeLogic {
    /// The head's unique predecessor.
    Single,
    /// Every AND predecessor is required.
    And,
    /// One surviving OR predecessor suffices.
    Or,
}

impl fmt::Display for EdgeLogic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeLogic::Single => "SINGLE",
            EdgeLogic::And => "AND",
            EdgeLogic::Or => "OR",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub role: NodeRole,
    pub area: String,
    pub passive_resistant: bool,
    /// Service injected by a SOURCE; zero for every other role.
    pub service: f64,
    /// Initial switch value; `Some` iff the role is SWITCH.
    pub switch: Option<bool>,
    /// No predecessors in the loaded graph.
    pub orphan: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
    pub logic: EdgeLogic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: String,
    pub role: NodeRole,
    pub area: String,
    pub passive_resistant: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub service: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch: Option<bool>,
    /// Accepted on input and checked against the topology; never emitted.
    #[serde(default, skip_serializing)]
    pub orphan: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub from: String,
    pub to: String,
    pub weight: f64,
    pub logic: EdgeLogic,
}

/// On-disk graph document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
}

/// Compares ids by runs: digit runs numerically, everything else bytewise,
/// so `"S2" < "S10"` and `"9" < "83"`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    loop {
        match (a.first(), b.first()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let la = a.iter().take_while(|c| c.is_ascii_digit()).count();
                let lb = b.iter().take_while(|c| c.is_ascii_digit()).count();
                let (da, db) = (&a[..la], &b[..lb]);
                let ta = trim_zeros(da);
                let tb = trim_zeros(db);
                let ord = ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb)).then(la.cmp(&lb));
                if ord != Ordering::Equal {
                    return ord;
                }
                a = &a[la..];
                b = &b[lb..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                a = &a[1..];
                b = &b[1..];
            }
        }
    }
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let k = digits.iter().take_while(|&&c| c == b'0').count();
    &digits[k..]
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    switches: Vec<usize>,
}

impl PlantGraph {
    /// Validates a document and builds the graph.
    pub fn from_document(doc: GraphDocument) -> Result<Self> {
        if doc.nodes.is_empty() {
            return Err(Error::validation("no nodes"));
        }
        let mut records = doc.nodes;
        records.sort_by(|a, b| natural_cmp(&a.id, &b.id));

        let mut nodes = Vec::with_capacity(records.len());
        let mut index = HashMap::with_capacity(records.len());
        let mut claimed_orphan = Vec::with_capacity(records.len());
        for (i, rec) in records.into_iter().enumerate() {
            if rec.id.is_empty() {
                return Err(Error::validation("node with empty id"));
            }
            if index.insert(rec.id.clone(), i).is_some() {
                return Err(Error::validation(format!("duplicate node `{}`", rec.id)));
            }
            let service = match rec.service {
                Some(s) if !s.is_finite() || s < 0.0 => {
                    return Err(Error::validation(format!(
                        "node `{}`: service must be finite and nonnegative",
                        rec.id
                    )))
                }
                Some(s) if s > 0.0 && rec.role != NodeRole::Source => {
                    return Err(Error::validation(format!(
                        "node `{}`: only SOURCE nodes provide service",
                        rec.id
                    )))
                }
                Some(s) => s,
                None if rec.role == NodeRole::Source => 1.0,
                None => 0.0,
            };
            match (rec.role, rec.switch) {
                (NodeRole::Switch, None) => {
                    return Err(Error::validation(format!("switch `{}` has no initial value", rec.id)))
                }
                (role, Some(_)) if role != NodeRole::Switch => {
                    return Err(Error::validation(format!(
                        "node `{}`: switch value on a {role} node",
                        rec.id
                    )))
                }
                _ => {}
            }
            claimed_orphan.push(rec.orphan);
            nodes.push(Node {
                id: rec.id,
                role: rec.role,
                area: rec.area,
                passive_resistant: rec.passive_resistant,
                service,
                switch: rec.switch,
                orphan: false,
            });
        }

        let mut edges = Vec::with_capacity(doc.edges.len());
        let mut seen = HashSet::with_capacity(doc.edges.len());
        for rec in &doc.edges {
            let tail = *index.get(&rec.from).ok_or_else(|| {
                Error::validation(format!("edge {}->{}: unknown node `{}`", rec.from, rec.to, rec.from))
            })?;
            let head = *index.get(&rec.to).ok_or_else(|| {
                Error::validation(format!("edge {}->{}: unknown node `{}`", rec.from, rec.to, rec.to))
            })?;
            if tail == head {
                return Err(Error::validation(format!("edge {}->{}: self-loop", rec.from, rec.to)));
            }
            if !(rec.weight.is_finite() && rec.weight > 0.0) {
                return Err(Error::validation(format!(
                    "edge {}->{}: weight must be positive, got {}",
                    rec.from, rec.to, rec.weight
                )));
            }
            if !seen.insert((tail, head)) {
                return Err(Error::validation(format!(
                    "edge {}->{}: parallel edge",
                    rec.from, rec.to
                )));
            }
            edges.push(Edge {
                tail,
                head,
                weight: rec.weight,
                logic: rec.logic,
            });
        }

        let graph = Self::assemble(nodes, edges);
        for (v, node) in graph.nodes.iter().enumerate() {
            let preds = graph.in_edges[v].len();
            for &e in &graph.in_edges[v] {
                let edge = &graph.edges[e];
                let ok = match edge.logic {
                    EdgeLogic::Single => preds == 1,
                    EdgeLogic::And | EdgeLogic::Or => preds >= 2,
                };
                if !ok {
                    return Err(Error::validation(format!(
                        "edge {}->{}: {} edge but `{}` has {} predecessor(s)",
                        graph.nodes[edge.tail].id, node.id, edge.logic, node.id, preds
                    )));
                }
            }
            if let Some(claimed) = claimed_orphan[v] {
                if claimed != node.orphan {
                    return Err(Error::validation(format!(
                        "node `{}`: orphan flag contradicts its {} predecessor(s)",
                        node.id, preds
                    )));
                }
            }
        }
        Ok(graph)
    }

    /// Builds adjacency and derived flags without checking edge logic.
    /// Used for derived graphs (effective, damaged, generated).
    pub(crate) fn assemble(mut nodes: Vec<Node>, mut edges: Vec<Edge>) -> Self {
        let n = nodes.len();
        edges.sort_by_key(|e| (e.tail, e.head));
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.tail].push(i);
            in_edges[e.head].push(i);
        }
        for (v, node) in nodes.iter_mut().enumerate() {
            node.orphan = in_edges[v].is_empty();
        }
        let index = nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
        let switches = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.role == NodeRole::Switch)
            .map(|(i, _)| i)
            .collect();
        PlantGraph {
            nodes,
            edges,
            index,
            out_edges,
            in_edges,
            switches,
        }
    }

    /// Parses and validates a JSON graph document.
    pub fn load(json: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(json)?;
        Self::from_document(doc)
    }

    pub fn to_document(&self) -> GraphDocument {
        let nodes = self
            .nodes
            .iter()
            .map(|n| NodeRecord {
                id: n.id.clone(),
                role: n.role,
                area: n.area.clone(),
                passive_resistant: n.passive_resistant,
                service: (n.role == NodeRole::Source).then_some(n.service),
                switch: n.switch,
                orphan: None,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeRecord {
                from: self.nodes[e.tail].id.clone(),
                to: self.nodes[e.head].id.clone(),
                weight: e.weight,
                logic: e.logic,
            })
            .collect();
        GraphDocument { nodes, edges }
    }

    /// Canonical JSON text: nodes in id order, edges by (tail, head).
    pub fn save(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph document serializes")
    }

    /// Hex SHA-256 of the canonical JSON text.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.save().as_bytes()))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Indices of edges leaving `v`.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    /// Indices of edges entering `v`.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges[v].iter().map(move |&e| self.edges[e].head)
    }

    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_edges[v].iter().map(move |&e| self.edges[e].tail)
    }

    /// SWITCH node indices in gene order.
    pub fn switches(&self) -> &[usize] {
        &self.switches
    }

    pub fn switch_ids(&self) -> Vec<String> {
        self.switches.iter().map(|&i| self.nodes[i].id.clone()).collect()
    }

    pub fn nodes_with_role(&self, role: NodeRole) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.role == role)
            .map(|(i, _)| i)
    }

    /// Per-node flag: true for SWITCH nodes set to False in `state`.
    pub fn open_mask(&self, state: &SwitchState) -> Result<Vec<bool>> {
        if state.len() != self.switches.len() {
            return Err(Error::StateLength {
                expected: self.switches.len(),
                found: state.len(),
            });
        }
        let mut open = vec![false; self.nodes.len()];
        for (&v, &closed) in self.switches.iter().zip(state.genes()) {
            open[v] = !closed;
        }
        Ok(open)
    }

    /// The graph with every in-edge of every False switch removed.
    pub fn effective_graph(&self, state: &SwitchState) -> Result<PlantGraph> {
        let open = self.open_mask(state)?;
        let edges = self.edges.iter().filter(|e| !open[e.head]).copied().collect();
        Ok(self.derive(edges))
    }

    /// Effective graph restricted to `alive` nodes: edges touching a broken
    /// node are dropped, the node universe is kept.
    pub fn damaged_graph(&self, state: &SwitchState, alive: &[bool]) -> Result<PlantGraph> {
        let open = self.open_mask(state)?;
        let edges = self
            .edges
            .iter()
            .filter(|e| !open[e.head] && alive[e.tail] && alive[e.head])
            .copied()
            .collect();
        Ok(self.derive(edges))
    }

    /// Same nodes (roles, services, orphan flags from this graph), new edges.
    fn derive(&self, edges: Vec<Edge>) -> PlantGraph {
        let mut g = Self::assemble(self.nodes.clone(), edges);
        for (node, orig) in g.nodes.iter_mut().zip(&self.nodes) {
            node.orphan = orig.orphan;
        }
        g
    }

    /// Copy with new node attributes; topology is unchanged.
    pub(crate) fn with_nodes(&self, nodes: Vec<Node>) -> PlantGraph {
        debug_assert_eq!(nodes.len(), self.nodes.len());
        Self::assemble(nodes, self.edges.clone())
    }

    pub(crate) fn with_edges(&self, edges: Vec<Edge>) -> PlantGraph {
        Self::assemble(self.nodes.clone(), edges)
    }
}
