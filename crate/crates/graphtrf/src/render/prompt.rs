//! Task instructions, control instructions, and full prompt assembly.
//!
//! For textual TRFs the topology travels inline before the instructions; for
//! visual TRFs the topology travels as an image (DOT source here, rasterized
//! by the client) and the text carries only the instructions.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{QaInstance, QueryParams, TaskKind};
use crate::render::{render_textual, render_visual};
use crate::trf::TrfKind;

/// Chain-of-thought suffix, appended only when explicitly enabled.
pub const COT_SUFFIX: &str = "Please think step by step and present the rationales in a \
     well-structured manner, to make the answer more reliable and robust.";

const CONTROL_YES_NO: &str = "Please put the answer between <answer> and </answer> tags. \
     For example, <answer>Yes</answer> or <answer>No</answer>.";
const CONTROL_PATH: &str = "Please put the answer between <answer> and </answer> tags. \
     For example, <answer>0->1->2->3->4</answer> or <answer>0->1->3->7->8->4->6->5->9->2</answer>.";
const CONTROL_INT: &str = "Please put the answer between <answer> and </answer> tags. \
     For example, <answer>3</answer> or <answer>8</answer>.";
const CONTROL_CLASS: &str = "Please put the answer between <answer> and </answer> tags. \
     For example, <answer>Class 1</answer> or <answer>Class 3</answer>.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub trf: TrfKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub topology_text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dot_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub image_bytes: Option<Vec<u8>>,
    pub instruction: String,
    pub control: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cot_suffix: Option<String>,
}

impl RenderedPrompt {
    /// The full user-message text sent alongside the (optional) image.
    pub fn user_text(&self) -> String {
        let mut parts = Vec::new();
        if let Some(topo) = &self.topology_text {
            parts.push(topo.as_str());
        }
        let mut text = if parts.is_empty() {
            String::new()
        } else {
            format!("{}\n\n", parts.join("\n\n"))
        };
        text.push_str(&self.instruction);
        text.push('\n');
        text.push_str(&self.control);
        if let Some(cot) = &self.cot_suffix {
            text.push('\n');
            text.push_str(cot);
        }
        text
    }
}

/// Task instruction with query parameters substituted.
pub fn task_instruction(instance: &QaInstance) -> String {
    match (instance.task, instance.params) {
        (TaskKind::Conn, QueryParams::Pair { u, v }) => format!(
            "Is there a path between node {u} and node {v} in this undirected graph?"
        ),
        (TaskKind::Cyc, _) => "Is there a cycle in this undirected graph?".to_string(),
        (TaskKind::Ts, _) => "This representation depicts a directed graph, in which each \
             directed edge from node A to node B signifies that, according to the topological \
             order, node A must precede node B. Q: The topological order of the directed \
             graph is:"
            .to_string(),
        (TaskKind::Sp, QueryParams::Pair { u, v }) => {
            format!("What is the shortest path from node {u} to node {v}?")
        }
        (TaskKind::Mf, QueryParams::Pair { u, v }) => format!(
            "This representation illustrates a directed graph, with each edge's capacity \
             indicated by a numerical label in close proximity. Q: What is the maximum flow \
             from node {u} to node {v}:"
        ),
        (TaskKind::Bgm, _) => {
            let split = instance.graph.bipartite.expect("BGM instance is bipartite");
            format!(
                "There are {h} hosts numbered from 0 to {hm}, and {t} tasks numbered from 0 \
                 to {tm}. Each host has a set of tasks that it is interested in, represented \
                 by arrows from a host to a task in the diagram. However, each host is \
                 capable of solving only one task, and similarly, each task can be resolved \
                 by just one host. Q: What is the maximum number of hosts that can be \
                 assigned a task they are interested in?",
                h = split.host_count,
                hm = split.host_count - 1,
                t = split.task_count,
                tm = split.task_count - 1
            )
        }
        (TaskKind::Hp, _) => "Q: Begin with node 0, what is the path in this graph that \
             visits every node exactly once?"
            .to_string(),
        (TaskKind::Lp, QueryParams::Pair { u, v }) => format!(
            "The task is link prediction, aiming to predict the presence or absence of an \
             unknown edge between Node {u} and Node {v} based on the known graph structure. \
             Q: Does an unknown edge exist between Node {u} and Node {v}?"
        ),
        (TaskKind::Nc, QueryParams::Node { target }) => format!(
            "The task is semi-supervised node classification, and needs to predict which \
             class Node {target} belongs to, based on graph structure and known node \
             classes. Q: Node {target} belongs to Class:"
        ),
        (task, params) => panic!("inconsistent task/params: {task:?} with {params:?}"),
    }
}

/// Control instruction fixing the answer-tag format per task family.
pub fn control_instruction(task: TaskKind) -> &'static str {
    match task {
        TaskKind::Conn | TaskKind::Cyc | TaskKind::Lp => CONTROL_YES_NO,
        TaskKind::Ts | TaskKind::Sp | TaskKind::Hp => CONTROL_PATH,
        TaskKind::Mf | TaskKind::Bgm => CONTROL_INT,
        TaskKind::Nc => CONTROL_CLASS,
    }
}

pub fn assemble_prompt(instance: &QaInstance, trf: TrfKind, cot: bool) -> Result<RenderedPrompt> {
    let (topology_text, dot_source) = if trf.is_visual() {
        (None, Some(render_visual(instance, trf)))
    } else {
        (Some(render_textual(instance, trf)?), None)
    };
    Ok(RenderedPrompt {
        trf,
        topology_text,
        dot_source,
        image_bytes: None,
        instruction: task_instruction(instance),
        control: control_instruction(instance.task).to_string(),
        cot_suffix: cot.then(|| COT_SUFFIX.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, GenConfig, GoldAnswer, GraphInstance};

    fn conn_instance() -> QaInstance {
        QaInstance {
            schema: 1,
            id: "t".into(),
            task: TaskKind::Conn,
            graph: GraphInstance {
                directed: false,
                node_count: 3,
                edges: vec![Edge { u: 0, v: 1, weight: None }],
                bipartite: None,
                node_attrs: None,
                node_classes: None,
            },
            params: QueryParams::Pair { u: 0, v: 2 },
            gold: GoldAnswer::Bool(false),
        }
    }

    #[test]
    fn conn_tset_ends_with_yes_no_control() {
        let p = assemble_prompt(&conn_instance(), TrfKind::Tset, false).unwrap();
        let text = p.user_text();
        assert!(text.ends_with(CONTROL_YES_NO));
        assert!(text.contains("<answer>Yes</answer>"));
    }

    #[test]
    fn hp_instruction_mentions_node_zero() {
        let mut inst = conn_instance();
        inst.task = TaskKind::Hp;
        inst.params = QueryParams::None;
        for trf in TrfKind::ALL {
            let p = assemble_prompt(&inst, trf, false).unwrap();
            assert!(p.instruction.contains("Begin with node 0"));
        }
    }

    #[test]
    fn cot_suffix_appended() {
        let p = assemble_prompt(&conn_instance(), TrfKind::Tset, true).unwrap();
        assert!(p.user_text().contains("think step by step"));
        let p = assemble_prompt(&conn_instance(), TrfKind::Tset, false).unwrap();
        assert!(!p.user_text().contains("think step by step"));
    }

    #[test]
    fn visual_prompt_carries_dot_not_text() {
        let p = assemble_prompt(&conn_instance(), TrfKind::Vneato, false).unwrap();
        assert!(p.topology_text.is_none());
        assert!(p.dot_source.is_some());
        assert!(!p.user_text().contains("the edges are"));
    }

    #[test]
    fn all_generated_tasks_assemble() {
        use rand::SeedableRng;
        let config = GenConfig { seed: 4, ..GenConfig::default() };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for task in TaskKind::IN_DOMAIN {
            let inst = crate::graph::gen_qa_instance(task, &config, 0, &mut rng).unwrap();
            for trf in TrfKind::ALL {
                assemble_prompt(&inst, trf, false).unwrap();
            }
        }
        for task in [TaskKind::Lp, TaskKind::Nc] {
            let inst =
                crate::graph::gen_attributed_instance(task, &config, 3, 0, &mut rng).unwrap();
            for trf in TrfKind::ALL {
                assemble_prompt(&inst, trf, false).unwrap();
            }
        }
    }
}
