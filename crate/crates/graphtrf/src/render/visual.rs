//! DOT sources for the five visual TRFs. Style is fixed (white background,
//! circular nodes, default edge thickness); only the layout engine varies.
//! Bipartite instances draw box-shaped hosts and circle-shaped tasks with
//! host -> task arrows.

use std::fmt::Write as _;

use crate::graph::{QaInstance, QueryParams, TaskKind};
use crate::trf::TrfKind;

pub fn render_visual(instance: &QaInstance, trf: TrfKind) -> String {
    let engine = trf.engine().expect("visual TRF");
    let graph = &instance.graph;
    let arrows = graph.directed || instance.task == TaskKind::Bgm;
    let (keyword, connector) = if arrows { ("digraph", "->") } else { ("graph", "--") };

    let mut out = String::new();
    writeln!(out, "{keyword} G {{").unwrap();
    writeln!(out, "    layout=\"{engine}\";").unwrap();
    writeln!(out, "    bgcolor=\"white\";").unwrap();
    writeln!(out, "    node [shape=circle];").unwrap();

    if let Some(split) = graph.bipartite {
        for h in 0..split.host_count {
            writeln!(out, "    h{h} [shape=box, label=\"Host {h}\"];").unwrap();
        }
        for t in 0..split.task_count {
            writeln!(out, "    t{t} [shape=circle, label=\"Task {t}\"];").unwrap();
        }
        for e in &graph.edges {
            writeln!(out, "    h{} {connector} t{};", e.u, e.v - split.host_count).unwrap();
        }
    } else {
        let hidden = match (instance.task, instance.params) {
            (TaskKind::Nc, QueryParams::Node { target }) => Some(target),
            _ => None,
        };
        for node in 0..graph.node_count {
            let suffix = node_label_suffix(instance, node, hidden);
            match suffix {
                Some(s) => {
                    writeln!(out, "    {node} [label=\"{node}\\n{s}\"];").unwrap()
                }
                None => writeln!(out, "    {node};").unwrap(),
            }
        }
        for e in &graph.edges {
            match e.weight {
                Some(w) => {
                    writeln!(out, "    {} {connector} {} [label=\"{w}\"];", e.u, e.v).unwrap()
                }
                None => writeln!(out, "    {} {connector} {};", e.u, e.v).unwrap(),
            }
        }
    }
    out.push('}');
    out.push('\n');
    out
}

/// LP/NC node attributes travel as label suffixes in visual TRFs.
fn node_label_suffix(instance: &QaInstance, node: usize, hidden: Option<usize>) -> Option<String> {
    if let Some(attrs) = &instance.graph.node_attrs {
        return attrs.get(&node).cloned();
    }
    if let Some(classes) = &instance.graph.node_classes {
        if Some(node) == hidden {
            return None;
        }
        return classes.get(&node).map(|c| format!("Class {c}"));
    }
    None
}
