use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use augur_core::graph::UndirGraph;
use augur_core::instance::{CaInstance, LinkSet};

pub const FORMAT_VERSION: u32 = 1;

/// On-disk instance document. Node ids are dense nonnegative integers;
/// role is one of terminal / steiner / plain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format_version: u32,
    pub kind: String,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub links: Vec<[usize; 2]>,
    #[serde(default)]
    pub terminals: Vec<usize>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub label: String,
    pub role: String,
}

#[derive(Debug)]
pub struct IoError(pub String);

impl std::fmt::Display for IoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for IoError {}

fn err(msg: impl Into<String>) -> IoError {
    IoError(msg.into())
}

pub const KINDS: [&str; 4] = ["ca", "block-tap", "one-node-cap", "cacap"];

impl InstanceFile {
    pub fn validate(&self) -> Result<(), IoError> {
        if self.format_version != FORMAT_VERSION {
            return Err(err(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if !KINDS.contains(&self.kind.as_str()) {
            return Err(err(format!("unknown kind '{}'", self.kind)));
        }
        let n = self.nodes.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(err(format!("node ids must be dense; slot {i} holds id {}", node.id)));
            }
            if !["terminal", "steiner", "plain"].contains(&node.role.as_str()) {
                return Err(err(format!("node {i} has unknown role '{}'", node.role)));
            }
        }
        for e in self.edges.iter().chain(self.links.iter()) {
            if e[0] >= n || e[1] >= n || e[0] == e[1] {
                return Err(err(format!("edge or link [{}, {}] invalid", e[0], e[1])));
            }
        }
        let role_terminals: BTreeSet<usize> = self
            .nodes
            .iter()
            .filter(|r| r.role == "terminal")
            .map(|r| r.id)
            .collect();
        let listed: BTreeSet<usize> = self.terminals.iter().copied().collect();
        if role_terminals != listed {
            return Err(err("terminals list disagrees with node roles"));
        }
        if self.kind == "ca" && self.nodes.iter().any(|r| r.role == "plain") {
            return Err(err("ca instances admit only terminal and steiner roles"));
        }
        Ok(())
    }

    pub fn to_ca_instance(&self) -> Result<CaInstance, IoError> {
        self.validate()?;
        if self.kind != "ca" {
            return Err(err(format!("expected a ca instance, found kind '{}'", self.kind)));
        }
        let labels = self.nodes.iter().map(|r| r.label.clone()).collect();
        let mut g = UndirGraph::with_labels(labels);
        for e in &self.edges {
            g.add_edge(e[0], e[1]).map_err(|e| err(e.to_string()))?;
        }
        let terminals: BTreeSet<usize> = self.terminals.iter().copied().collect();
        Ok(CaInstance::new(g, terminals))
    }

    pub fn to_base_and_links(&self) -> Result<(UndirGraph, LinkSet), IoError> {
        self.validate()?;
        if self.kind == "ca" {
            return Err(err("kind 'ca' carries no base graph + links"));
        }
        let labels = self.nodes.iter().map(|r| r.label.clone()).collect();
        let mut g = UndirGraph::with_labels(labels);
        for e in &self.edges {
            g.add_edge(e[0], e[1]).map_err(|e| err(e.to_string()))?;
        }
        let links = LinkSet::new(self.links.iter().map(|l| (l[0], l[1])));
        Ok((g, links))
    }

    pub fn from_ca_instance(inst: &CaInstance, metadata: BTreeMap<String, String>) -> Self {
        let nodes = (0..inst.graph.node_count())
            .map(|id| NodeRecord {
                id,
                label: inst.graph.label(id).to_string(),
                role: if inst.terminals.contains(&id) {
                    "terminal".to_string()
                } else {
                    "steiner".to_string()
                },
            })
            .collect();
        InstanceFile {
            format_version: FORMAT_VERSION,
            kind: "ca".to_string(),
            nodes,
            edges: inst.graph.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            links: Vec::new(),
            terminals: inst.terminals.iter().copied().collect(),
            metadata,
        }
    }

    pub fn from_base_and_links(
        kind: &str,
        g: &UndirGraph,
        links: &LinkSet,
        metadata: BTreeMap<String, String>,
    ) -> Self {
        let nodes = (0..g.node_count())
            .map(|id| NodeRecord {
                id,
                label: g.label(id).to_string(),
                role: "plain".to_string(),
            })
            .collect();
        InstanceFile {
            format_version: FORMAT_VERSION,
            kind: kind.to_string(),
            nodes,
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            links: links.links().iter().map(|&(u, v)| [u, v]).collect(),
            terminals: Vec::new(),
            metadata,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| err(format!("malformed instance JSON: {e}")))?;
        file.validate()?;
        Ok(file)
    }
}
