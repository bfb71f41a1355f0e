//! Random plant generation: directed G(n, p) graphs with role
//! classification, nested switch promotion and OR-edge conversion.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeLogic, Node, NodeRole, PlantGraph};

const PROMOTE_STREAM: u64 = 0x5157_4954_4348;
const OR_STREAM: u64 = 0x4f52_4544_4745;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationRecipe {
    pub n: usize,
    /// Edge probability; `1 / n` when omitted.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Ascending switch fractions of the HUB population.
    #[serde(default)]
    pub switch_percentages: Vec<f64>,
    #[serde(default)]
    pub or_fraction: f64,
}

impl GenerationRecipe {
    pub fn edge_probability(&self) -> f64 {
        self.p.unwrap_or(1.0 / self.n.max(1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter("n must be at least 2".into()));
        }
        let p = self.edge_probability();
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
        }
        check_percentages(&self.switch_percentages)?;
        if !(0.0..=1.0).contains(&self.or_fraction) {
            return Err(Error::InvalidParameter("or_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

fn check_percentages(pcts: &[f64]) -> Result<()> {
    if pcts.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidParameter("switch percentages must lie in [0, 1]".into()));
    }
    if pcts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "switch percentages must be strictly ascending".into(),
        ));
    }
    Ok(())
}

/// Round half up, as used for switch and OR-edge counts.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Directed G(n, p) with unit weights. Nodes are `0..n` as HUBs; edge logic
/// follows head in-degree. `p = 0` gives the empty graph.
pub fn generate_gnp(n: usize, p: f64, seed: u64) -> Result<PlantGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for tail in 0..n {
        for head in 0..n {
            if tail != head && rng.random_bool(p) {
                edges.push(Edge {
                    tail,
                    head,
                    weight: 1.0,
                    logic: EdgeLogic::And,
                });
            }
        }
    }
    // ids 0..n are already in natural order
    let nodes = (0..n)
        .map(|i| Node {
            id: i.to_string(),
            role: NodeRole::Hub,
            area: "random".into(),
            passive_resistant: false,
            service: 0.0,
            switch: None,
            orphan: false,
        })
        .collect();
    Ok(relabel_logic(PlantGraph::assemble(nodes, edges)))
}

fn relabel_logic(g: PlantGraph) -> PlantGraph {
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge {
            logic: if g.in_edges(e.head).len() == 1 {
                EdgeLogic::Single
            } else {
                EdgeLogic::And
            },
            ..*e
        })
        .collect();
    g.with_edges(edges)
}

/// In-degree 0 becomes SOURCE (service 1, isolated nodes included),
/// out-degree 0 becomes USER, everything else HUB. Edges are relabelled
/// SINGLE or AND by head in-degree.
pub fn classify_roles(g: &PlantGraph) -> PlantGraph {
    let nodes = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(v, node)| {
            let role = if g.in_edges(v).is_empty() {
                NodeRole::Source
            } else if g.out_edges(v).is_empty() {
                NodeRole::User
            } else {
                NodeRole::Hub
            };
            Node {
                role,
                service: if role == NodeRole::Source { 1.0 } else { 0.0 },
                switch: None,
                ..node.clone()
            }
        })
        .collect();
    relabel_logic(g.with_nodes(nodes))
}

/// One graph per percentage. HUB ids are shuffled once, so each switch set
/// is a prefix of the next; new switches start True.
pub fn promote_switches(g: &PlantGraph, percentages: &[f64], seed: u64) -> Result<Vec<PlantGraph>> {
    check_percentages(percentages)?;
    let mut hubs: Vec<usize> = g.nodes_with_role(NodeRole::Hub).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ PROMOTE_STREAM);
    hubs.shuffle(&mut rng);
    Ok(percentages
        .iter()
        .map(|&pct| {
            let count = round_half_up(pct * hubs.len() as f64).min(hubs.len());
            let mut nodes = g.nodes().to_vec();
            for &v in &hubs[..count] {
                nodes[v].role = NodeRole::Switch;
                nodes[v].switch = Some(true);
            }
            g.with_nodes(nodes)
        })
        .collect())
}

/// Relabels a seeded random subset of `round(fraction * #AND)` AND edges as
/// OR. SINGLE edges are never touched.
pub fn convert_or_edges(g: &PlantGraph, fraction: f64, seed: u64) -> Result<PlantGraph> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter("fraction must lie in [0, 1]".into()));
    }
    let mut and_edges: Vec<usize> = (0..g.edge_count())
        .filter(|&e| g.edge(e).logic == EdgeLogic::And)
        .collect();
    let count = round_half_up(fraction * and_edges.len() as f64).min(and_edges.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ OR_STREAM);
    and_edges.shuffle(&mut rng);
    let mut edges = g.edges().to_vec();
    for &e in &and_edges[..count] {
        edges[e].logic = EdgeLogic::Or;
    }
    Ok(g.with_edges(edges))
}

/// Full pipeline: G(n, p), roles, optional OR conversion, then one graph
/// per switch percentage (a single graph without switches if none given).
pub fn generate(recipe: &GenerationRecipe) -> Result<Vec<PlantGraph>> {
    recipe.validate()?;
    let base = classify_roles(&generate_gnp(recipe.n, recipe.edge_probability(), recipe.seed)?);
    let base = if recipe.or_fraction > 0.0 {
        convert_or_edges(&base, recipe.or_fraction, recipe.seed)?
    } else {
        base
    };
    if recipe.switch_percentages.is_empty() {
        Ok(vec![base])
    } else {
        promote_switches(&base, &recipe.switch_percentages, recipe.seed)
    }
}
