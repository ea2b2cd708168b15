//! Deterministic simulated backend. Each (task, TRF) cell of a profile fixes
//! a per-run correctness probability and a truncated-normal token budget, so
//! end-to-end runs are reproducible and cheap. Incorrect answers are always
//! format-valid: they parse under the answer protocol but fail semantic
//! validation, exercising the full judging path.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::client::{ChatResponse, Client, RunKey};
use crate::error::{Error, Result};
use crate::graph::{GoldAnswer, QaInstance, TaskKind};
use crate::protocol::{format_gold, wrap_answer};
use crate::render::RenderedPrompt;
use crate::trf::TrfKind;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SimCell {
    /// Probability that a single run answers correctly.
    pub accuracy_p: f64,
    /// Mean of the completion-token distribution.
    pub token_mean: f64,
    /// Standard deviation of the completion-token distribution.
    pub token_spread: f64,
}

/// TOML-declared profile: an optional default cell plus overrides keyed by
/// task name then TRF name, e.g. `[cells.Conn.Tset]`.
#[derive(Debug, Clone, Deserialize)]
pub struct SimProfile {
    #[serde(default)]
    pub default: Option<SimCell>,
    #[serde(default)]
    pub cells: HashMap<String, HashMap<String, SimCell>>,
}

impl SimProfile {
    pub fn parse(text: &str) -> Result<SimProfile> {
        let profile: SimProfile = toml::from_str(text).map_err(|e| Error::Toml(e.to_string()))?;
        for (task, row) in &profile.cells {
            if TaskKind::parse(task).is_none() {
                return Err(Error::Config(format!("unknown task `{task}` in sim profile")));
            }
            for trf in row.keys() {
                if TrfKind::parse(trf).is_none() {
                    return Err(Error::Config(format!("unknown TRF `{trf}` in sim profile")));
                }
            }
        }
        Ok(profile)
    }

    /// Uniform profile used when no TOML is supplied.
    pub fn uniform(cell: SimCell) -> SimProfile {
        SimProfile { default: Some(cell), cells: HashMap::new() }
    }

    pub fn cell(&self, task: TaskKind, trf: TrfKind) -> Result<SimCell> {
        self.cells
            .iter()
            .find(|(k, _)| TaskKind::parse(k) == Some(task))
            .and_then(|(_, row)| {
                row.iter()
                    .find(|(k, _)| TrfKind::parse(k) == Some(trf))
                    .map(|(_, c)| *c)
            })
            .or(self.default)
            .ok_or(Error::ProfileMissing { task, trf })
    }
}

pub struct SimClient {
    profile: SimProfile,
    base_seed: u64,
}

impl SimClient {
    pub fn new(profile: SimProfile, base_seed: u64) -> SimClient {
        SimClient { profile, base_seed }
    }

    /// RNG keyed by (seed, question, TRF, run index) so a resumed session
    /// replays each run identically regardless of completion order.
    fn run_rng(&self, key: RunKey<'_>) -> ChaCha8Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.base_seed.to_le_bytes());
        hasher.update(key.question_id.as_bytes());
        hasher.update([0]);
        hasher.update(key.trf.name().as_bytes());
        hasher.update((key.run_idx as u64).to_le_bytes());
        let digest = hasher.finalize();
        ChaCha8Rng::seed_from_u64(u64::from_le_bytes(digest[..8].try_into().unwrap()))
    }
}

impl Client for SimClient {
    fn complete(
        &self,
        instance: &QaInstance,
        _prompt: &RenderedPrompt,
        key: RunKey<'_>,
    ) -> Result<ChatResponse> {
        let cell = self.profile.cell(instance.task, key.trf)?;
        let mut rng = self.run_rng(key);
        let correct = rng.gen_bool(cell.accuracy_p.clamp(0.0, 1.0));
        let tokens = draw_tokens(&mut rng, cell);
        let answer = if correct {
            format_gold(&instance.gold)
        } else {
            wrong_answer(instance)
        };
        let text = format!("Considering the graph, {}", wrap_answer(&answer));
        Ok(ChatResponse { text, completion_tokens: tokens })
    }
}

fn draw_tokens(rng: &mut ChaCha8Rng, cell: SimCell) -> u64 {
    if cell.token_spread <= 0.0 {
        return (cell.token_mean.round() as i64).max(1) as u64;
    }
    let normal = Normal::new(cell.token_mean, cell.token_spread).expect("finite params");
    // Truncate rather than clamp: redraw until positive.
    for _ in 0..64 {
        let draw = normal.sample(rng);
        if draw >= 0.5 {
            return draw.round() as u64;
        }
    }
    1
}

/// A syntactically valid answer that semantic validation rejects.
fn wrong_answer(instance: &QaInstance) -> String {
    match (&instance.gold, instance.task) {
        (GoldAnswer::Bool(b), _) => if *b { "No" } else { "Yes" }.to_string(),
        (GoldAnswer::Int(v), _) => (v + 1).to_string(),
        (GoldAnswer::Class(c), _) => {
            let classes = instance
                .graph
                .node_classes
                .as_ref()
                .and_then(|m| m.values().max().copied())
                .map_or(*c + 1, |max| max + 1);
            format!("Class {}", (c + 1) % classes.max(1))
        }
        (GoldAnswer::Ordering(order), _) => {
            // Swapping the endpoints of one edge breaks that precedence;
            // an edgeless graph accepts every permutation, so truncate.
            match instance.graph.edges.first() {
                Some(e) => {
                    let mut bad = order.clone();
                    let pu = bad.iter().position(|&n| n == e.u).unwrap();
                    let pv = bad.iter().position(|&n| n == e.v).unwrap();
                    bad.swap(pu, pv);
                    join_path(&bad)
                }
                None => join_path(&order[..order.len() - 1]),
            }
        }
        (GoldAnswer::Path(path), TaskKind::Sp) => {
            if path.len() > 1 {
                join_path(&path[..1])
            } else {
                // Degenerate u == v query: a self-loop hop is never an edge.
                format!("{0}->{0}", path[0])
            }
        }
        (GoldAnswer::Path(path), _) => {
            if path.len() > 1 {
                join_path(&path[..path.len() - 1])
            } else {
                "1".to_string()
            }
        }
    }
}

fn join_path(nodes: &[usize]) -> String {
    nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("->")
}
