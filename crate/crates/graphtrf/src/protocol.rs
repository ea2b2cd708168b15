//! Answer extraction and correctness judging.
//!
//! Extraction takes the last well-formed `<answer>...</answer>` span.
//! Validation is semantic, not string equality: any valid witness is
//! accepted for ordering/path tasks, judged against the oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GoldAnswer, QaInstance, QueryParams, TaskKind};
use crate::metrics::ProbeStats;
use crate::oracles;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgedRun {
    pub response_text: String,
    pub completion_tokens: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub extracted: Option<String>,
    pub correct: bool,
}

/// Content of the last well-formed `<answer>...</answer>` span, trimmed.
/// Absence is a value (the run is simply judged incorrect).
pub fn extract_answer(response_text: &str) -> Option<String> {
    const OPEN: &str = "<answer>";
    const CLOSE: &str = "</answer>";
    let close = response_text.rfind(CLOSE)?;
    let open = response_text[..close].rfind(OPEN)?;
    Some(response_text[open + OPEN.len()..close].trim().to_string())
}

/// Wraps an answer string in the control-instruction tag format.
pub fn wrap_answer(answer: &str) -> String {
    format!("<answer>{answer}</answer>")
}

/// Serializes a gold answer the way the control instructions ask for it.
pub fn format_gold(gold: &GoldAnswer) -> String {
    match gold {
        GoldAnswer::Bool(true) => "Yes".to_string(),
        GoldAnswer::Bool(false) => "No".to_string(),
        GoldAnswer::Int(v) => v.to_string(),
        GoldAnswer::Ordering(nodes) | GoldAnswer::Path(nodes) => nodes
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join("->"),
        GoldAnswer::Class(c) => format!("Class {c}"),
    }
}

fn parse_path(answer: &str) -> Option<Vec<usize>> {
    let parts: Vec<&str> = answer.split("->").map(str::trim).collect();
    if parts.is_empty() {
        return None;
    }
    parts.iter().map(|p| p.parse::<usize>().ok()).collect()
}

fn parse_yes_no(answer: &str) -> Option<bool> {
    match answer.trim().to_ascii_lowercase().as_str() {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}

fn parse_class(answer: &str) -> Option<usize> {
    let rest = answer.trim();
    let rest = rest
        .strip_prefix("Class")
        .or_else(|| rest.strip_prefix("class"))
        .or_else(|| rest.strip_prefix("CLASS"))?;
    rest.trim().parse::<usize>().ok()
}

/// Task-specific semantic validation; unparseable answers are false.
pub fn validate_answer(instance: &QaInstance, answer: &str) -> bool {
    let graph = &instance.graph;
    match instance.task {
        TaskKind::Conn | TaskKind::Cyc | TaskKind::Lp => {
            let GoldAnswer::Bool(gold) = instance.gold else { return false };
            parse_yes_no(answer) == Some(gold)
        }
        TaskKind::Mf | TaskKind::Bgm => {
            let GoldAnswer::Int(gold) = instance.gold else { return false };
            answer.trim().parse::<u64>() == Ok(gold)
        }
        TaskKind::Nc => {
            let GoldAnswer::Class(gold) = instance.gold else { return false };
            parse_class(answer) == Some(gold)
        }
        TaskKind::Ts => {
            let Some(order) = parse_path(answer) else { return false };
            // Must be a permutation of all nodes respecting every edge.
            if order.len() != graph.node_count {
                return false;
            }
            let mut position = vec![usize::MAX; graph.node_count];
            for (i, &node) in order.iter().enumerate() {
                if node >= graph.node_count || position[node] != usize::MAX {
                    return false;
                }
                position[node] = i;
            }
            graph.edges.iter().all(|e| position[e.u] < position[e.v])
        }
        TaskKind::Sp => {
            let QueryParams::Pair { u, v } = instance.params else { return false };
            let Some(path) = parse_path(answer) else { return false };
            if path.first() != Some(&u) || path.last() != Some(&v) {
                return false;
            }
            let adj = graph.adjacency_weighted();
            let mut total = 0u64;
            for hop in path.windows(2) {
                if hop[0] >= graph.node_count {
                    return false;
                }
                match adj[hop[0]].iter().find(|&&(nbr, _)| nbr == hop[1]) {
                    Some(&(_, w)) => total += w as u64,
                    None => return false,
                }
            }
            match oracles::shortest_path(graph, u, v) {
                Ok((dist, _)) => total == dist,
                Err(_) => false,
            }
        }
        TaskKind::Hp => {
            let Some(path) = parse_path(answer) else { return false };
            if path.len() != graph.node_count || path.first() != Some(&0) {
                return false;
            }
            let mut seen = vec![false; graph.node_count];
            for &node in &path {
                if node >= graph.node_count || seen[node] {
                    return false;
                }
                seen[node] = true;
            }
            let adj = graph.adjacency();
            path.windows(2).all(|hop| adj[hop[0]].contains(&hop[1]))
        }
    }
}

/// Aggregates k judged runs into per-question probe statistics.
/// Token averaging covers all runs, correct and incorrect alike.
pub fn judge_runs(runs: &[JudgedRun]) -> Result<ProbeStats> {
    if runs.is_empty() {
        return Err(Error::EmptyRuns);
    }
    let k = runs.len() as f64;
    let correct = runs.iter().filter(|r| r.correct).count() as f64;
    let tokens: u64 = runs.iter().map(|r| r.completion_tokens).sum();
    Ok(ProbeStats {
        accuracy: correct / k,
        avg_tok: tokens as f64 / k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, GraphInstance};
    use proptest::prelude::*;

    fn weighted_triangle() -> QaInstance {
        QaInstance {
            schema: 1,
            id: "t".into(),
            task: TaskKind::Sp,
            graph: GraphInstance {
                directed: false,
                node_count: 3,
                edges: vec![
                    Edge { u: 0, v: 1, weight: Some(1) },
                    Edge { u: 1, v: 2, weight: Some(1) },
                    Edge { u: 0, v: 2, weight: Some(3) },
                ],
                bipartite: None,
                node_attrs: None,
                node_classes: None,
            },
            params: QueryParams::Pair { u: 0, v: 2 },
            gold: GoldAnswer::Path(vec![0, 1, 2]),
        }
    }

    #[test]
    fn extracts_tagged_answer() {
        assert_eq!(extract_answer("...so <answer>Yes</answer>"), Some("Yes".into()));
        assert_eq!(extract_answer("no tags here"), None);
        assert_eq!(
            extract_answer("<answer>3</answer> then <answer>5</answer>"),
            Some("5".into())
        );
        assert_eq!(extract_answer("<answer> padded </answer>"), Some("padded".into()));
        assert_eq!(extract_answer("</answer> before <answer>"), None);
    }

    #[test]
    fn sp_rejects_suboptimal_path() {
        let inst = weighted_triangle();
        assert!(validate_answer(&inst, "0->1->2"));
        assert!(!validate_answer(&inst, "0->2"), "weight 3 exceeds optimum 2");
        assert!(!validate_answer(&inst, "0->1"), "wrong endpoint");
        assert!(!validate_answer(&inst, "garbage"));
    }

    #[test]
    fn ts_accepts_any_valid_order() {
        let inst = QaInstance {
            schema: 1,
            id: "t".into(),
            task: TaskKind::Ts,
            graph: GraphInstance {
                directed: true,
                node_count: 3,
                edges: vec![Edge { u: 0, v: 2, weight: None }],
                bipartite: None,
                node_attrs: None,
                node_classes: None,
            },
            params: QueryParams::None,
            gold: GoldAnswer::Ordering(vec![0, 1, 2]),
        };
        assert!(validate_answer(&inst, "0->1->2"));
        assert!(validate_answer(&inst, "1->0->2"), "non-canonical but valid");
        assert!(validate_answer(&inst, "0->2->1"));
        assert!(!validate_answer(&inst, "2->0->1"), "violates 0->2");
        assert!(!validate_answer(&inst, "0->1"), "not a permutation");
        assert!(!validate_answer(&inst, "0->1->1"), "repeated node");
    }

    #[test]
    fn integer_answers_trimmed() {
        let inst = QaInstance {
            schema: 1,
            id: "t".into(),
            task: TaskKind::Mf,
            graph: GraphInstance {
                directed: true,
                node_count: 2,
                edges: vec![Edge { u: 0, v: 1, weight: Some(3) }],
                bipartite: None,
                node_attrs: None,
                node_classes: None,
            },
            params: QueryParams::Pair { u: 0, v: 1 },
            gold: GoldAnswer::Int(3),
        };
        assert!(validate_answer(&inst, "3"));
        assert!(validate_answer(&inst, " 3 "));
        assert!(!validate_answer(&inst, "4"));
    }

    #[test]
    fn yes_no_case_insensitive() {
        let inst = QaInstance {
            schema: 1,
            id: "t".into(),
            task: TaskKind::Conn,
            graph: GraphInstance {
                directed: false,
                node_count: 2,
                edges: vec![Edge { u: 0, v: 1, weight: None }],
                bipartite: None,
                node_attrs: None,
                node_classes: None,
            },
            params: QueryParams::Pair { u: 0, v: 1 },
            gold: GoldAnswer::Bool(true),
        };
        assert!(validate_answer(&inst, "yes"));
        assert!(validate_answer(&inst, " YES "));
        assert!(!validate_answer(&inst, "No"));
        assert!(!validate_answer(&inst, "maybe"));
    }

    #[test]
    fn judge_runs_aggregates() {
        let run = |correct, tokens| JudgedRun {
            response_text: String::new(),
            completion_tokens: tokens,
            extracted: None,
            correct,
        };
        let runs: Vec<JudgedRun> = (0..10).map(|i| run(i != 0, 8)).collect();
        let stats = judge_runs(&runs).unwrap();
        assert_eq!(stats.accuracy, 0.9);
        assert_eq!(stats.avg_tok, 8.0);

        let stats = judge_runs(&[run(false, 100), run(false, 200), run(false, 300)]).unwrap();
        assert_eq!(stats.accuracy, 0.0);
        assert_eq!(stats.avg_tok, 200.0);

        assert!(matches!(judge_runs(&[]), Err(Error::EmptyRuns)));
    }

    proptest! {
        #[test]
        fn extract_inverts_wrap(answer in "[^<>]*") {
            let trimmed = answer.trim().to_string();
            prop_assert_eq!(extract_answer(&wrap_answer(&answer)), Some(trimmed));
        }
    }
}
