use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PlantGraph;

/// One boolean gene per SWITCH node, in the graph's switch order.
/// `true` lets commodities (and damage) through.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SwitchState(Vec<bool>);

impl SwitchState {
    pub fn from_genes(genes: Vec<bool>) -> Self {
        SwitchState(genes)
    }

    pub fn all(g: &PlantGraph, value: bool) -> Self {
        SwitchState(vec![value; g.switches().len()])
    }

    /// The initial values recorded in the graph document.
    pub fn initial(g: &PlantGraph) -> Self {
        SwitchState(g.switches().iter().map(|&v| g.node(v).switch.unwrap_or(true)).collect())
    }

    /// A total assignment by switch id. Every switch must be named.
    pub fn from_assignments(g: &PlantGraph, values: &BTreeMap<String, bool>) -> Result<Self> {
        check_names(g, values.keys().map(String::as_str))?;
        g.switches()
            .iter()
            .map(|&v| {
                let id = &g.node(v).id;
                values.get(id).copied().ok_or_else(|| Error::MissingSwitch(id.clone()))
            })
            .collect::<Result<Vec<_>>>()
            .map(SwitchState)
    }

    /// `base` with the named switches overridden.
    pub fn with_overrides(&self, g: &PlantGraph, overrides: &BTreeMap<String, bool>) -> Result<Self> {
        if self.len() != g.switches().len() {
            return Err(Error::StateLength {
                expected: g.switches().len(),
                found: self.len(),
            });
        }
        check_names(g, overrides.keys().map(String::as_str))?;
        let mut genes = self.0.clone();
        for (gene, &v) in genes.iter_mut().zip(g.switches()) {
            if let Some(&value) = overrides.get(&g.node(v).id) {
                *gene = value;
            }
        }
        Ok(SwitchState(genes))
    }

    /// All switches set to `default` except the listed ones.
    pub fn from_pairs(g: &PlantGraph, default: bool, pairs: &[(&str, bool)]) -> Result<Self> {
        let overrides = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Self::all(g, default).with_overrides(g, &overrides)
    }

    /// Decodes bit `i` of `mask` as gene `i`.
    pub fn from_bits(mask: u64, len: usize) -> Self {
        SwitchState((0..len).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn genes(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of positions where the two states differ.
    pub fn hamming(&self, other: &SwitchState) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::StateLength {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }

    /// Switch ids whose value differs from `initial`.
    pub fn flipped(&self, g: &PlantGraph, initial: &SwitchState) -> Vec<String> {
        g.switches()
            .iter()
            .zip(self.0.iter().zip(initial.genes()))
            .filter(|(_, (a, b))| a != b)
            .map(|(&v, _)| g.node(v).id.clone())
            .collect()
    }

    pub fn to_map(&self, g: &PlantGraph) -> BTreeMap<String, bool> {
        g.switches()
            .iter()
            .zip(&self.0)
            .map(|(&v, &b)| (g.node(v).id.clone(), b))
            .collect()
    }
}

fn check_names<'a>(g: &PlantGraph, mut names: impl Iterator<Item = &'a str>) -> Result<()> {
    names.try_for_each(|id| {
        let v = g.require(id)?;
        if g.switches().contains(&v) {
            Ok(())
        } else {
            Err(Error::NotASwitch(id.to_string()))
        }
    })
}

impl fmt::Display for SwitchState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(if *g { "True" } else { "False" })?;
        }
        f.write_str("}")
    }
}

/// Number of flips turning `initial` into `candidate`.
pub fn n_actions(initial: &SwitchState, candidate: &SwitchState) -> Result<usize> {
    initial.hamming(candidate)
}
