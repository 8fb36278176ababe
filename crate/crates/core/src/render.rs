//! Text, JSON, CSV and DOT output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::class_distribution;
use crate::game::{Node, NodeId, PlayerValues, StrategyProfile};
use crate::model::{OutcomeClass, Param};
use crate::payoff::Payoff;
use crate::scenario::ScenarioFile;
use crate::solver::SolveResult;

pub const TOOL_VERSION: &str = concat!("wbgame ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected text, json or csv)")),
        }
    }
}

/// Ordered `key: value` metadata embedded in every artifact.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Meta(pub Vec<(String, String)>);

impl Meta {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    /// Tool version plus the full effective scenario.
    pub fn for_scenario(s: &ScenarioFile) -> Meta {
        let mut m = Meta::default();
        m.push("tool", TOOL_VERSION);
        m.push("scenario", &s.name);
        m.push("variant", s.parameters.variant);
        for p in Param::ALL {
            m.push(p.name(), s.parameters.get(p));
        }
        m.push("risk_alice", s.risk.alice);
        m.push("risk_tom", s.risk.tom);
        m.push("tie_alice", s.ties.alice);
        m.push("tie_tom", s.ties.tom);
        m
    }

    /// `# key: value` lines.
    pub fn comment_lines(&self) -> String {
        self.0.iter().map(|(k, v)| format!("# {k}: {v}\n")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(self.0.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect())
    }
}

fn phrase(label: &str) -> String {
    match label {
        "leak" => "Alice leaks".into(),
        "stay" => "Alice does not leak".into(),
        "trust" => "Duncan trusts Alice".into(),
        "no-trust" => "Duncan does not trust Alice".into(),
        "block" => "Tom blocks the story".into(),
        "proceed" => "Tom lets the story proceed".into(),
        "censor" => "Tom censors".into(),
        "hold" => "Tom does not censor".into(),
        "supports-tom" => "World supports Tom".into(),
        "supports-duncan" => "World supports Duncan".into(),
        "neutral" => "World neutral".into(),
        "pursue" => "Tom pursues Alice".into(),
        "drop" => "Tom leaves Alice alone".into(),
        "strong" => "Harry strong".into(),
        "weak" => "Harry weak".into(),
        other => other.to_string(),
    }
}

/// Domain wording for an edge label; merged labels (`hold/neutral`) are
/// described part by part.
pub fn describe_edge(label: &str) -> String {
    label.split('/').map(phrase).collect::<Vec<_>>().join(", ")
}

fn terminal_text(label: &str, v: &PlayerValues) -> String {
    match OutcomeClass::from_slug(label) {
        Some(c) => {
            let (a, t) = c.letters();
            format!("{} ({a}, {t}): Alice {}, Tom {}", c.describe(), v.alice, v.tom)
        }
        None => format!("{label}: Alice {}, Tom {}", v.alice, v.tom),
    }
}

fn walk(out: &mut String, node: &Node, id: &NodeId, result: &SolveResult, depth: usize, reach: f64) {
    let pad = "  ".repeat(depth);
    match node {
        Node::Terminal { label, payoffs } => {
            let _ = writeln!(out, "{pad}-> {} [p = {reach}]", terminal_text(label, payoffs));
        }
        Node::Decision { actions, .. } => {
            let chosen = result.choice(id);
            for a in actions.iter().filter(|a| Some(a.label.as_str()) == chosen) {
                let child = id.child(&a.label);
                let value = result.value_at(&child).map(|v| format!("  (Alice {}, Tom {})", v.alice, v.tom)).unwrap_or_default();
                let _ = writeln!(out, "{pad}{}{value}", describe_edge(&a.label));
                walk(out, &a.child, &child, result, depth + 1, reach);
            }
        }
        Node::Chance { branches, .. } => {
            for b in branches.iter().filter(|b| b.probability > 0.0) {
                let _ = writeln!(out, "{pad}{} [{}]", describe_edge(&b.label), b.probability);
                walk(out, &b.child, &id.child(&b.label), result, depth + 1, reach * b.probability);
            }
        }
    }
}

#[derive(Serialize)]
struct JsonResult<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
    profile: &'a StrategyProfile,
    root_value: PlayerValues,
    node_values: &'a BTreeMap<NodeId, PlayerValues>,
    outcome_distribution: &'a BTreeMap<NodeId, f64>,
    classes: BTreeMap<OutcomeClass, f64>,
    terminals: &'a [crate::solver::TerminalOutcome],
}

/// Renders a solved game. `meta`, when given, is embedded as comment lines
/// (text, csv) or a `meta` object (json).
pub fn render_result(tree: &Node, result: &SolveResult, format: Format, meta: Option<&Meta>) -> String {
    match format {
        Format::Text => {
            let mut out = meta.map(Meta::comment_lines).unwrap_or_default();
            out.push_str("Equilibrium path:\n");
            walk(&mut out, tree, &NodeId::root(), result, 1, 1.0);
            out.push_str("Outcome distribution:\n");
            for (class, p) in class_distribution(result).into_iter().filter(|(_, p)| *p > 0.0) {
                let _ = writeln!(out, "  {:<22} {p}", class.slug());
            }
            let _ = writeln!(out, "Root value: Alice {}, Tom {}", result.root_value.alice, result.root_value.tom);
            out
        }
        Format::Json => {
            let doc = JsonResult {
                meta: meta.map(Meta::to_json),
                profile: &result.profile,
                root_value: result.root_value,
                node_values: &result.node_values,
                outcome_distribution: &result.outcome_distribution,
                classes: class_distribution(result),
                terminals: &result.terminals,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("result serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = meta.map(Meta::comment_lines).unwrap_or_default();
            out.push_str("id,class,probability,alice,tom\n");
            for t in &result.terminals {
                let _ = writeln!(out, "{},{},{},{},{}", t.id, t.label, t.probability, t.payoffs.alice, t.payoffs.tom);
            }
            out
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn payoff_text(p: Payoff) -> String {
    p.to_string()
}

/// Graphviz digraph of `tree`. Decision nodes are boxes, chance nodes
/// circles, terminals plain text; with a result, chosen actions are bold.
pub fn export_dot(tree: &Node, result: Option<&SolveResult>) -> String {
    let mut out = String::from("digraph game {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n");
    let mut next = 0usize;
    dot_node(&mut out, tree, &NodeId::root(), result, &mut next);
    out.push_str("}\n");
    out
}

fn dot_node(out: &mut String, node: &Node, id: &NodeId, result: Option<&SolveResult>, next: &mut usize) -> usize {
    let me = *next;
    *next += 1;
    match node {
        Node::Terminal { label, payoffs } => {
            let letters = OutcomeClass::from_slug(label).map(|c| {
                let (a, t) = c.letters();
                format!("\\n({a}, {t})")
            });
            let _ = writeln!(
                out,
                "  n{me} [shape=plaintext, label=\"{}{}\\n{}, {}\"];",
                escape(label),
                letters.unwrap_or_default(),
                payoff_text(payoffs.alice),
                payoff_text(payoffs.tom)
            );
        }
        Node::Decision { owner, label, actions } => {
            let _ = writeln!(out, "  n{me} [shape=box, label=\"{}\\n{owner}\"];", escape(label));
            let chosen = result.and_then(|r| r.choice(id));
            for a in actions {
                let child = dot_node(out, &a.child, &id.child(&a.label), result, next);
                let style = if chosen == Some(a.label.as_str()) { ", style=bold, color=blue" } else { "" };
                let _ = writeln!(out, "  n{me} -> n{child} [label=\"{}\"{style}];", escape(&a.label));
            }
        }
        Node::Chance { label, branches } => {
            let _ = writeln!(out, "  n{me} [shape=ellipse, label=\"{}\"];", escape(label));
            for b in branches {
                let child = dot_node(out, &b.child, &id.child(&b.label), result, next);
                let _ = writeln!(out, "  n{me} -> n{child} [label=\"{}\\np = {}\"];", escape(&b.label), b.probability);
            }
        }
    }
    me
}
