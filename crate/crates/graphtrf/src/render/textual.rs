//! Byte-exact textual topology templates (edge set, adjacency list,
//! adjacency matrix). The exact whitespace conventions are frozen in golden
//! files under `templates/golden/`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{GraphInstance, QaInstance, QueryParams, TaskKind};
use crate::trf::TrfKind;

pub fn render_textual(instance: &QaInstance, trf: TrfKind) -> Result<String> {
    if trf.is_visual() {
        return Err(Error::UnsupportedCombination {
            task: instance.task,
            trf,
        });
    }
    let task = instance.task;
    if task.is_weighted() && !instance.graph.edges.iter().all(|e| e.weight.is_some()) {
        return Err(Error::UnsupportedCombination { task, trf });
    }
    let body = match trf {
        TrfKind::Tset => render_tset(instance),
        TrfKind::Tlist => render_tlist(instance),
        TrfKind::Tmat => render_tmat(instance),
        _ => unreachable!(),
    };
    Ok(match task {
        TaskKind::Lp | TaskKind::Nc => body + &attribute_suffix(instance),
        _ => body,
    })
}

fn sorted_edges(graph: &GraphInstance) -> Vec<(usize, usize, Option<u32>)> {
    let mut edges: Vec<_> = graph.edges.iter().map(|e| (e.u, e.v, e.weight)).collect();
    edges.sort_unstable();
    edges
}

fn render_tset(instance: &QaInstance) -> String {
    let graph = &instance.graph;
    let n = graph.node_count;
    let edges = sorted_edges(graph);
    match instance.task {
        TaskKind::Conn | TaskKind::Cyc | TaskKind::Hp | TaskKind::Lp | TaskKind::Nc => {
            let list: Vec<String> = edges
                .iter()
                .map(|&(u, v, _)| format!("({u}, {v})"))
                .collect();
            format!(
                "In an undirected graph, (i,j) means that node i and node j are connected \
                 with an undirected edge. The nodes are numbered from 0 to {}, and the edges are:\n{}",
                n - 1,
                list.join(", ")
            )
        }
        TaskKind::Ts => {
            let mut out = format!(
                "In a directed graph with {} nodes numbered from 0 to {}:",
                n,
                n - 1
            );
            for (u, v, _) in edges {
                write!(out, "\nnode {u} should be visited before node {v}").unwrap();
            }
            out
        }
        TaskKind::Sp => {
            let lines: Vec<String> = edges
                .iter()
                .map(|&(u, v, w)| {
                    format!(
                        "an edge between node {u} and node {v} with weight {}",
                        w.unwrap()
                    )
                })
                .collect();
            format!(
                "In an undirected graph, the nodes are numbered from 0 to {}, and the edges are:\n{}",
                n - 1,
                lines.join(",\n")
            )
        }
        TaskKind::Mf => {
            let lines: Vec<String> = edges
                .iter()
                .map(|&(u, v, w)| {
                    format!(
                        "an edge from node {u} to node {v} with capacity {}",
                        w.unwrap()
                    )
                })
                .collect();
            format!(
                "In a directed graph, the nodes are numbered from 0 to {}, and the edges are:\n{}",
                n - 1,
                lines.join(",\n")
            )
        }
        TaskKind::Bgm => {
            let split = instance.graph.bipartite.expect("BGM instance is bipartite");
            let mut out = bgm_header(split.host_count, split.task_count);
            for (h, t, _) in edges {
                write!(
                    out,
                    "\nHost {h} is interested in task {}.",
                    t - split.host_count
                )
                .unwrap();
            }
            out
        }
    }
}

fn bgm_header(hosts: usize, tasks: usize) -> String {
    format!(
        "There are {hosts} hosts numbered from 0 to {}, and {tasks} tasks numbered from 0 to {}. \
         Each host has a set of tasks that it is interested in:",
        hosts - 1,
        tasks - 1
    )
}

fn render_tlist(instance: &QaInstance) -> String {
    let graph = &instance.graph;
    let n = graph.node_count;
    match instance.task {
        TaskKind::Conn | TaskKind::Cyc | TaskKind::Hp | TaskKind::Lp | TaskKind::Nc => {
            let adj = graph.adjacency();
            let mut out = format!(
                "In an undirected graph, (i,j) means that node i and node j are connected \
                 with an undirected edge. The nodes are numbered from 0 to {}, and the edges \
                 are presented in an adjacent list format:",
                n - 1
            );
            for (u, nbrs) in adj.iter().enumerate() {
                if nbrs.is_empty() {
                    continue;
                }
                let list: Vec<String> = nbrs.iter().map(|v| v.to_string()).collect();
                write!(out, "\n{u} <-> {}", list.join(", ")).unwrap();
            }
            out
        }
        TaskKind::Ts => {
            let adj = graph.adjacency();
            let mut out = format!(
                "In a directed graph with {} nodes numbered from 0 to {}:",
                n,
                n - 1
            );
            for (u, nbrs) in adj.iter().enumerate() {
                if nbrs.is_empty() {
                    continue;
                }
                let list: Vec<String> = nbrs.iter().map(|v| v.to_string()).collect();
                write!(out, "\nnode {u} should be visited before node {}", list.join(", "))
                    .unwrap();
            }
            out
        }
        TaskKind::Sp | TaskKind::Mf => {
            let adj = graph.adjacency_weighted();
            let unit = if instance.task == TaskKind::Sp { "distance" } else { "capacity" };
            let mut out = if instance.task == TaskKind::Sp {
                format!(
                    "In an undirected graph, the nodes are numbered from 0 to {}, and the \
                     edges are presented in an adjacent list format:",
                    n - 1
                )
            } else {
                format!(
                    "In a directed graph, the nodes are numbered from 0 to {}, and the \
                     edges are presented in an adjacent list format:",
                    n - 1
                )
            };
            for (u, nbrs) in adj.iter().enumerate() {
                if nbrs.is_empty() {
                    continue;
                }
                let list: Vec<String> = nbrs
                    .iter()
                    .map(|&(v, w)| format!("node {v} with {unit}: {w}"))
                    .collect();
                write!(out, "\nnode {u} is connected to: {}", list.join(", ")).unwrap();
            }
            out
        }
        TaskKind::Bgm => {
            let split = graph.bipartite.expect("BGM instance is bipartite");
            let mut by_host = vec![Vec::new(); split.host_count];
            for (h, t, _) in sorted_edges(graph) {
                by_host[h].push(t - split.host_count);
            }
            let mut out = bgm_header(split.host_count, split.task_count);
            for (h, tasks) in by_host.iter().enumerate() {
                if tasks.is_empty() {
                    continue;
                }
                let list: Vec<String> = tasks.iter().map(|t| t.to_string()).collect();
                write!(out, "\nHost {h} is interested in tasks {}.", list.join(", ")).unwrap();
            }
            out
        }
    }
}

/// Full adjacency matrix with 0 for absent edges and the weight (or 1) for
/// present edges.
fn matrix_body(
    rows: usize,
    cols: usize,
    row_label: &str,
    col_label: &str,
    cell: impl Fn(usize, usize) -> u32,
) -> String {
    let mut out = String::new();
    out.push(' ');
    out.push_str(col_label);
    out.push('0');
    for j in 1..cols {
        write!(out, " {j}").unwrap();
    }
    for i in 0..rows {
        write!(out, "\n{row_label}{i}").unwrap();
        for j in 0..cols {
            write!(out, " {}", cell(i, j)).unwrap();
        }
    }
    out
}

fn square_matrix(graph: &GraphInstance) -> Vec<Vec<u32>> {
    let n = graph.node_count;
    let mut m = vec![vec![0u32; n]; n];
    for e in &graph.edges {
        let w = e.weight.unwrap_or(1);
        m[e.u][e.v] = w;
        if !graph.directed {
            m[e.v][e.u] = w;
        }
    }
    m
}

fn render_tmat(instance: &QaInstance) -> String {
    let graph = &instance.graph;
    let n = graph.node_count;
    match instance.task {
        TaskKind::Conn | TaskKind::Cyc | TaskKind::Hp | TaskKind::Lp | TaskKind::Nc => {
            let m = square_matrix(graph);
            format!(
                "In an undirected graph, (i,j) means that node i and node j are connected \
                 with an undirected edge. The nodes are numbered from 0 to {}, and the edges \
                 are represented in an adjacent matrix format:\n{}",
                n - 1,
                matrix_body(n, n, "node", "node", |i, j| m[i][j])
            )
        }
        TaskKind::Ts => {
            let m = square_matrix(graph);
            format!(
                "In a directed graph with {} nodes numbered from 0 to {}, the edges are \
                 represented in an adjacent matrix format:\n{}",
                n,
                n - 1,
                matrix_body(n, n, "node", "node", |i, j| m[i][j])
            )
        }
        // The source templates merge SP and MF into a single weighted-matrix row.
        TaskKind::Sp | TaskKind::Mf => {
            let m = square_matrix(graph);
            format!(
                "In an undirected graph, the nodes are numbered from 0 to {}, and the edges \
                 are represented in an adjacent matrix format with weights:\n{}",
                n - 1,
                matrix_body(n, n, "node", "node", |i, j| m[i][j])
            )
        }
        TaskKind::Bgm => {
            let split = graph.bipartite.expect("BGM instance is bipartite");
            let mut m = vec![vec![0u32; split.task_count]; split.host_count];
            for e in &graph.edges {
                m[e.u][e.v - split.host_count] = 1;
            }
            format!(
                "{}\n{}",
                bgm_header(split.host_count, split.task_count),
                matrix_body(split.host_count, split.task_count, "Host", "Task", |i, j| m[i][j])
            )
        }
    }
}

/// `The node attributes are:` block appended for LP/NC. NC renders the known
/// classes as attributes, hiding the queried node.
fn attribute_suffix(instance: &QaInstance) -> String {
    let mut out = String::from("\n\nThe node attributes are:");
    if let Some(attrs) = &instance.graph.node_attrs {
        for (node, attr) in attrs {
            write!(out, "\nNode {node}, Attribute {attr}").unwrap();
        }
    } else if let Some(classes) = &instance.graph.node_classes {
        let hidden = match instance.params {
            QueryParams::Node { target } => Some(target),
            _ => None,
        };
        for (node, class) in classes {
            if Some(*node) == hidden {
                continue;
            }
            write!(out, "\nNode {node}, Attribute Class {class}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BipartiteSplit, Edge, GoldAnswer};

    fn instance(task: TaskKind, graph: GraphInstance) -> QaInstance {
        QaInstance {
            schema: 1,
            id: "test".into(),
            task,
            graph,
            params: QueryParams::None,
            gold: GoldAnswer::Bool(true),
        }
    }

    fn undirected(n: usize, edges: &[(usize, usize)]) -> GraphInstance {
        GraphInstance {
            directed: false,
            node_count: n,
            edges: edges
                .iter()
                .map(|&(u, v)| Edge { u, v, weight: None })
                .collect(),
            bipartite: None,
            node_attrs: None,
            node_classes: None,
        }
    }

    #[test]
    fn tset_single_edge() {
        let inst = instance(TaskKind::Conn, undirected(2, &[(0, 1)]));
        let text = render_textual(&inst, TrfKind::Tset).unwrap();
        assert!(text.contains("the edges are:"));
        assert!(text.contains("(0, 1)"));
    }

    #[test]
    fn tlist_groups_neighbors() {
        let inst = instance(TaskKind::Conn, undirected(3, &[(0, 1), (0, 2)]));
        let text = render_textual(&inst, TrfKind::Tlist).unwrap();
        assert!(text.contains("0 <-> 1, 2"), "{text}");
    }

    #[test]
    fn tmat_empty_graph_all_zero() {
        let inst = instance(TaskKind::Conn, undirected(2, &[]));
        let text = render_textual(&inst, TrfKind::Tmat).unwrap();
        let body = text.split("format:\n").nth(1).unwrap();
        assert_eq!(body, " node0 1\nnode0 0 0\nnode1 0 0");
    }

    #[test]
    fn visual_trf_rejected() {
        let inst = instance(TaskKind::Conn, undirected(2, &[(0, 1)]));
        assert!(matches!(
            render_textual(&inst, TrfKind::Vdot),
            Err(Error::UnsupportedCombination { .. })
        ));
    }

    #[test]
    fn bgm_tset_lines() {
        let graph = GraphInstance {
            directed: false,
            node_count: 3,
            edges: vec![
                Edge { u: 0, v: 2, weight: None },
                Edge { u: 1, v: 2, weight: None },
            ],
            bipartite: Some(BipartiteSplit { host_count: 2, task_count: 1 }),
            node_attrs: None,
            node_classes: None,
        };
        let inst = instance(TaskKind::Bgm, graph);
        let text = render_textual(&inst, TrfKind::Tset).unwrap();
        assert!(text.contains("Host 0 is interested in task 0."));
        assert!(text.contains("Host 1 is interested in task 0."));
    }

    #[test]
    fn renders_are_deterministic() {
        let inst = instance(TaskKind::Cyc, undirected(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]));
        for trf in TrfKind::TEXTUAL {
            assert_eq!(
                render_textual(&inst, trf).unwrap(),
                render_textual(&inst, trf).unwrap()
            );
        }
    }
}
