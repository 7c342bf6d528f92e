//! Significance-styled interaction networks in DOT and JSON.
//!
//! Nodes are blue, grey or red for a significantly positive, insignificant or
//! significantly negative bias; opacity grows with `|bias|`. Edges are solid
//! when the interaction is significant, blue when positive and red when
//! negative, with pen width `−log10(p)`.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::InferenceReport;

pub const MIN_THICKNESS: f64 = 0.1;
pub const MAX_THICKNESS: f64 = 10.0;
pub const MIN_OPACITY: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionMode {
    /// Raw p-values at significance level α.
    Raw,
    /// FDR-adjusted p-values at level q.
    Fdr,
}

impl std::str::FromStr for DecisionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(DecisionMode::Raw),
            "fdr" => Ok(DecisionMode::Fdr),
            other => Err(Error::Config(format!("unknown decision mode {other:?}; expected raw or fdr"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeDecision {
    PositiveSignificant,
    Insignificant,
    NegativeSignificant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkNode {
    pub label: String,
    pub bias: f64,
    pub p_value: f64,
    pub decision: NodeDecision,
    pub opacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub source: usize,
    pub target: usize,
    pub estimate: f64,
    /// `+1`, `-1`, or `0` for an exactly zero estimate.
    pub sign: i8,
    pub p_value: f64,
    pub significant: bool,
    pub thickness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub mode: DecisionMode,
    pub level: f64,
    pub nodes: Vec<NetworkNode>,
    pub edges: Vec<NetworkEdge>,
}

impl NetworkSpec {
    pub fn significant_nodes(&self) -> usize {
        self.nodes.iter().filter(|n| n.decision != NodeDecision::Insignificant).count()
    }

    pub fn significant_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.significant).count()
    }
}

/// `−log10(p)` clamped to the drawable range; `p = 0` maps to the maximum.
pub fn edge_thickness(p: f64) -> f64 {
    if p <= 0.0 {
        return MAX_THICKNESS;
    }
    (-p.log10()).clamp(MIN_THICKNESS, MAX_THICKNESS)
}

pub fn build_network(report: &InferenceReport, labels: &[String], mode: DecisionMode, level: f64) -> Result<NetworkSpec> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("level must lie in (0, 1), got {level}")));
    }
    let d = report.d;
    if labels.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: labels.len() });
    }
    let layout = report.layout();
    let p = match mode {
        DecisionMode::Raw => &report.p_values,
        DecisionMode::Fdr => &report.adjusted_p_values,
    };
    if p.len() != layout.len() || report.estimates.len() != layout.len() {
        return Err(Error::DimensionMismatch { expected: layout.len(), found: p.len().min(report.estimates.len()) });
    }

    let max_bias = (0..d).map(|j| report.estimates[j].abs()).fold(0.0, f64::max);
    let nodes = (0..d)
        .map(|j| {
            let bias = report.estimates[layout.bias_index(j)];
            let p_value = p[layout.bias_index(j)];
            let decision = match (p_value <= level, bias > 0.0, bias < 0.0) {
                (true, true, _) => NodeDecision::PositiveSignificant,
                (true, _, true) => NodeDecision::NegativeSignificant,
                _ => NodeDecision::Insignificant,
            };
            let ratio = if max_bias > 0.0 { bias.abs() / max_bias } else { 0.0 };
            NetworkNode { label: labels[j].clone(), bias, p_value, decision, opacity: ratio.clamp(MIN_OPACITY, 1.0) }
        })
        .collect();

    let mut edges = Vec::with_capacity(layout.len() - d);
    for j in 0..d {
        for k in j + 1..d {
            let index = layout.pair_index(j, k);
            let estimate = report.estimates[index];
            edges.push(NetworkEdge {
                source: j,
                target: k,
                estimate,
                sign: if estimate > 0.0 { 1 } else if estimate < 0.0 { -1 } else { 0 },
                p_value: p[index],
                significant: p[index] <= level,
                thickness: edge_thickness(p[index]),
            });
        }
    }
    Ok(NetworkSpec { mode, level, nodes, edges })
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Deterministic GraphViz rendering of a network.
pub fn emit_dot(spec: &NetworkSpec) -> String {
    let mut out = String::new();
    out.push_str("graph fvbm {\n");
    out.push_str("  layout=circo;\n");
    out.push_str("  node [shape=circle, style=filled, fontname=\"Helvetica\"];\n");
    for (i, node) in spec.nodes.iter().enumerate() {
        let (rgb, border) = match node.decision {
            NodeDecision::PositiveSignificant => ("0000ff", "blue"),
            NodeDecision::NegativeSignificant => ("ff0000", "red"),
            NodeDecision::Insignificant => ("808080", "grey"),
        };
        let alpha = (node.opacity * 255.0).round() as u8;
        let _ = writeln!(
            out,
            "  n{i} [label={}, fillcolor=\"#{rgb}{alpha:02x}\", color={border}];",
            quote(&node.label)
        );
    }
    for edge in &spec.edges {
        let color = match edge.sign {
            1 => "blue",
            -1 => "red",
            _ => "grey",
        };
        let style = if edge.significant { "solid" } else { "dashed" };
        let _ = writeln!(
            out,
            "  n{} -- n{} [style={style}, color={color}, penwidth={:.3}];",
            edge.source, edge.target, edge.thickness
        );
    }
    out.push_str("}\n");
    out
}
