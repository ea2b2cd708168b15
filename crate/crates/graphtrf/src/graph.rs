//! Graph data model, Erdős–Rényi generation, and QA-instance construction.
//!
//! Generation follows a regenerate-until-valid loop: graphs that fail the
//! task-specific validity criterion (e.g. acyclicity for topological sort,
//! existence of a Hamiltonian path from node 0) are discarded and redrawn,
//! up to a bounded attempt budget.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles;

/// Hard cap on the regenerate-until-valid loop.
pub const MAX_GEN_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    Conn,
    Cyc,
    Ts,
    Sp,
    Mf,
    Bgm,
    Hp,
    Lp,
    Nc,
}

impl TaskKind {
    pub const ALL: [TaskKind; 9] = [
        TaskKind::Conn,
        TaskKind::Cyc,
        TaskKind::Ts,
        TaskKind::Sp,
        TaskKind::Mf,
        TaskKind::Bgm,
        TaskKind::Hp,
        TaskKind::Lp,
        TaskKind::Nc,
    ];

    /// The seven in-domain algorithmic tasks.
    pub const IN_DOMAIN: [TaskKind; 7] = [
        TaskKind::Conn,
        TaskKind::Cyc,
        TaskKind::Ts,
        TaskKind::Sp,
        TaskKind::Mf,
        TaskKind::Bgm,
        TaskKind::Hp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Conn => "Conn",
            TaskKind::Cyc => "Cyc",
            TaskKind::Ts => "TS",
            TaskKind::Sp => "SP",
            TaskKind::Mf => "MF",
            TaskKind::Bgm => "BGM",
            TaskKind::Hp => "HP",
            TaskKind::Lp => "LP",
            TaskKind::Nc => "NC",
        }
    }

    pub fn parse(s: &str) -> Option<TaskKind> {
        match s.to_ascii_lowercase().as_str() {
            "conn" => Some(TaskKind::Conn),
            "cyc" => Some(TaskKind::Cyc),
            "ts" => Some(TaskKind::Ts),
            "sp" => Some(TaskKind::Sp),
            "mf" => Some(TaskKind::Mf),
            "bgm" => Some(TaskKind::Bgm),
            "hp" => Some(TaskKind::Hp),
            "lp" => Some(TaskKind::Lp),
            "nc" => Some(TaskKind::Nc),
            _ => None,
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, TaskKind::Sp | TaskKind::Mf)
    }

    pub fn is_directed(self) -> bool {
        matches!(self, TaskKind::Ts | TaskKind::Mf)
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|t| *t == self).unwrap()
    }
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteSplit {
    pub host_count: usize,
    pub task_count: usize,
}

/// A generated graph. Undirected edges are canonicalized with `u < v`.
/// Bipartite instances place hosts at ids `0..host_count` and tasks at
/// `host_count..host_count + task_count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphInstance {
    pub directed: bool,
    pub node_count: usize,
    pub edges: Vec<Edge>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bipartite: Option<BipartiteSplit>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub node_attrs: Option<BTreeMap<usize, String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub node_classes: Option<BTreeMap<usize, usize>>,
}

impl GraphInstance {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight.is_some()) && !self.edges.is_empty()
            || self.edges.first().map(|e| e.weight.is_some()).unwrap_or(false)
    }

    /// Undirected adjacency check (ignores direction for directed graphs).
    pub fn has_edge_undirected(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|e| (e.u == a && e.v == b) || (e.u == b && e.v == a))
    }

    /// Neighbor lists. For directed graphs, out-neighbors only.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            if !self.directed {
                adj[e.v].push(e.u);
            }
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        adj
    }

    /// Weighted neighbor lists `(neighbor, weight)`; weight defaults to 1.
    pub fn adjacency_weighted(&self) -> Vec<Vec<(usize, u32)>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            let w = e.weight.unwrap_or(1);
            adj[e.u].push((e.v, w));
            if !self.directed {
                adj[e.v].push((e.u, w));
            }
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        adj
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GenConfig {
    /// Inclusive node-count interval, default [3, 30].
    pub node_range: (usize, usize),
    /// Edge probability drawn once per graph from this interval.
    pub edge_prob_range: (f64, f64),
    /// Inclusive integer weight interval for weighted tasks.
    pub weight_range: (u32, u32),
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            node_range: (3, 30),
            edge_prob_range: (0.1, 0.7),
            weight_range: (1, 10),
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.node_range.0 < 2 || self.node_range.0 > self.node_range.1 {
            return Err(Error::Config(format!(
                "node_range [{}, {}] invalid (min >= 2, min <= max)",
                self.node_range.0, self.node_range.1
            )));
        }
        let (lo, hi) = self.edge_prob_range;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::Config(format!(
                "edge_prob_range [{lo}, {hi}] invalid"
            )));
        }
        if self.weight_range.0 < 1 || self.weight_range.0 > self.weight_range.1 {
            return Err(Error::Config(format!(
                "weight_range [{}, {}] invalid",
                self.weight_range.0, self.weight_range.1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueryParams {
    None,
    /// Node pair: (u, v) for Conn/SP/LP, (source, sink) for MF.
    Pair { u: usize, v: usize },
    /// Target node whose class is queried (NC).
    Node { target: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GoldAnswer {
    Bool(bool),
    Int(u64),
    Ordering(Vec<usize>),
    Path(Vec<usize>),
    Class(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaInstance {
    pub schema: u32,
    pub id: String,
    pub task: TaskKind,
    pub graph: GraphInstance,
    pub params: QueryParams,
    pub gold: GoldAnswer,
}

/// Erdős–Rényi G(n, p): node count uniform in `node_range`, edge probability
/// drawn once per graph from `edge_prob_range`, each (ordered or unordered)
/// pair included independently.
pub fn gen_er_graph<R: Rng>(
    config: &GenConfig,
    directed: bool,
    weighted: bool,
    rng: &mut R,
) -> GraphInstance {
    let n = rng.gen_range(config.node_range.0..=config.node_range.1);
    let p = if config.edge_prob_range.0 == config.edge_prob_range.1 {
        config.edge_prob_range.0
    } else {
        rng.gen_range(config.edge_prob_range.0..config.edge_prob_range.1)
    };
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            if !directed && u > v {
                continue;
            }
            if rng.gen::<f64>() < p {
                let weight = if weighted {
                    Some(rng.gen_range(config.weight_range.0..=config.weight_range.1))
                } else {
                    None
                };
                edges.push(Edge { u, v, weight });
            }
        }
    }
    GraphInstance {
        directed,
        node_count: n,
        edges,
        bipartite: None,
        node_attrs: None,
        node_classes: None,
    }
}

/// Bipartite graph: host/task counts each drawn from the halves of
/// `node_range`, edges only host -> task with probability p.
fn gen_bipartite_graph<R: Rng>(config: &GenConfig, rng: &mut R) -> GraphInstance {
    let lo = (config.node_range.0 / 2).max(1);
    let hi = (config.node_range.1 / 2).max(lo);
    let hosts = rng.gen_range(lo..=hi);
    let tasks = rng.gen_range(lo..=hi);
    let p = if config.edge_prob_range.0 == config.edge_prob_range.1 {
        config.edge_prob_range.0
    } else {
        rng.gen_range(config.edge_prob_range.0..config.edge_prob_range.1)
    };
    let mut edges = Vec::new();
    for h in 0..hosts {
        for t in 0..tasks {
            if rng.gen::<f64>() < p {
                edges.push(Edge {
                    u: h,
                    v: hosts + t,
                    weight: None,
                });
            }
        }
    }
    GraphInstance {
        directed: false,
        node_count: hosts + tasks,
        edges,
        bipartite: Some(BipartiteSplit {
            host_count: hosts,
            task_count: tasks,
        }),
        node_attrs: None,
        node_classes: None,
    }
}

fn instance_id(task: TaskKind, seed: u64, nonce: u64) -> String {
    format!("{}-{:016x}-{:06}", task.name().to_ascii_lowercase(), seed, nonce)
}

/// Generates one QA instance for an in-domain task, regenerating until the
/// task validity criterion holds, then computes the gold answer with the
/// matching oracle.
pub fn gen_qa_instance<R: Rng>(
    task: TaskKind,
    config: &GenConfig,
    nonce: u64,
    rng: &mut R,
) -> Result<QaInstance> {
    config.validate()?;
    let id = instance_id(task, config.seed, nonce);
    for _ in 0..MAX_GEN_ATTEMPTS {
        let (graph, params, gold) = match task {
            TaskKind::Conn => {
                let g = gen_er_graph(config, false, false, rng);
                let (u, v) = distinct_pair(g.node_count, rng);
                let gold = GoldAnswer::Bool(oracles::connectivity(&g, u, v)?);
                (g, QueryParams::Pair { u, v }, gold)
            }
            TaskKind::Cyc => {
                let g = gen_er_graph(config, false, false, rng);
                let gold = GoldAnswer::Bool(oracles::has_cycle(&g));
                (g, QueryParams::None, gold)
            }
            TaskKind::Ts => {
                let g = gen_er_graph(config, true, false, rng);
                match oracles::topo_sort(&g) {
                    Ok(order) => (g, QueryParams::None, GoldAnswer::Ordering(order)),
                    Err(_) => continue, // cyclic, regenerate
                }
            }
            TaskKind::Sp => {
                let g = gen_er_graph(config, false, true, rng);
                let (u, v) = distinct_pair(g.node_count, rng);
                match oracles::shortest_path(&g, u, v) {
                    Ok((_, path)) => (g, QueryParams::Pair { u, v }, GoldAnswer::Path(path)),
                    Err(_) => continue, // unreachable, regenerate
                }
            }
            TaskKind::Mf => {
                let g = gen_er_graph(config, true, true, rng);
                let (s, t) = distinct_pair(g.node_count, rng);
                let flow = oracles::max_flow(&g, s, t)?;
                if flow == 0 {
                    continue;
                }
                (g, QueryParams::Pair { u: s, v: t }, GoldAnswer::Int(flow))
            }
            TaskKind::Bgm => {
                let g = gen_bipartite_graph(config, rng);
                let m = oracles::max_bipartite_matching(&g)?;
                if m == 0 {
                    continue;
                }
                (g, QueryParams::None, GoldAnswer::Int(m))
            }
            TaskKind::Hp => {
                let g = gen_er_graph(config, false, false, rng);
                match oracles::hamilton_path_from(&g, 0) {
                    Some(path) => (g, QueryParams::None, GoldAnswer::Path(path)),
                    None => continue,
                }
            }
            TaskKind::Lp | TaskKind::Nc => {
                return Err(Error::Config(format!(
                    "task {task:?} requires gen_attributed_instance"
                )))
            }
        };
        return Ok(QaInstance {
            schema: 1,
            id,
            task,
            graph,
            params,
            gold,
        });
    }
    Err(Error::GenerationExhausted {
        task,
        attempts: MAX_GEN_ATTEMPTS,
    })
}

/// Synthetic attributed instances for the out-of-domain tasks.
///
/// LP: generate a graph, then with probability 1/2 remove an existing edge
/// (gold = Yes) or pick a non-edge (gold = No). NC: planted-partition graph
/// with higher intra-class than inter-class edge probability; one node's
/// class is hidden as the query and its planted class is the gold answer.
pub fn gen_attributed_instance<R: Rng>(
    task: TaskKind,
    config: &GenConfig,
    class_count: usize,
    nonce: u64,
    rng: &mut R,
) -> Result<QaInstance> {
    config.validate()?;
    let id = instance_id(task, config.seed, nonce);
    match task {
        TaskKind::Lp => {
            for _ in 0..MAX_GEN_ATTEMPTS {
                let mut g = gen_er_graph(config, false, false, rng);
                let attrs: BTreeMap<usize, String> = (0..g.node_count)
                    .map(|i| (i, format!("A{}", rng.gen_range(0..5))))
                    .collect();
                g.node_attrs = Some(attrs);
                let n = g.node_count;
                let want_edge = rng.gen::<bool>();
                if want_edge {
                    if g.edges.is_empty() {
                        continue;
                    }
                    let idx = rng.gen_range(0..g.edges.len());
                    let e = g.edges.remove(idx);
                    return Ok(QaInstance {
                        schema: 1,
                        id,
                        task,
                        graph: g,
                        params: QueryParams::Pair { u: e.u, v: e.v },
                        gold: GoldAnswer::Bool(true),
                    });
                } else {
                    let max_edges = n * (n - 1) / 2;
                    if g.edges.len() >= max_edges {
                        continue;
                    }
                    let (u, v) = loop {
                        let (a, b) = distinct_pair(n, rng);
                        let (a, b) = (a.min(b), a.max(b));
                        if !g.has_edge_undirected(a, b) {
                            break (a, b);
                        }
                    };
                    return Ok(QaInstance {
                        schema: 1,
                        id,
                        task,
                        graph: g,
                        params: QueryParams::Pair { u, v },
                        gold: GoldAnswer::Bool(false),
                    });
                }
            }
            Err(Error::GenerationExhausted {
                task,
                attempts: MAX_GEN_ATTEMPTS,
            })
        }
        TaskKind::Nc => {
            if class_count < 2 {
                return Err(Error::Config("NC requires class_count >= 2".into()));
            }
            let n = rng.gen_range(config.node_range.0..=config.node_range.1);
            // Planted partition: intra-class edges dense, inter-class sparse.
            let intra_p = 0.8;
            let inter_p = 0.05;
            let classes: BTreeMap<usize, usize> =
                (0..n).map(|i| (i, rng.gen_range(0..class_count))).collect();
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    let p = if classes[&u] == classes[&v] { intra_p } else { inter_p };
                    if rng.gen::<f64>() < p {
                        edges.push(Edge { u, v, weight: None });
                    }
                }
            }
            let target = rng.gen_range(0..n);
            let gold = classes[&target];
            let graph = GraphInstance {
                directed: false,
                node_count: n,
                edges,
                bipartite: None,
                node_attrs: None,
                node_classes: Some(classes),
            };
            Ok(QaInstance {
                schema: 1,
                id,
                task,
                graph,
                params: QueryParams::Node { target },
                gold: GoldAnswer::Class(gold),
            })
        }
        _ => Err(Error::Config(format!(
            "task {task:?} is not an attributed task"
        ))),
    }
}

pub fn write_instances(path: impl AsRef<std::path::Path>, instances: &[QaInstance]) -> Result<()> {
    use std::io::Write as _;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for inst in instances {
        serde_json::to_writer(&mut w, inst)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_instances(path: impl AsRef<std::path::Path>) -> Result<Vec<QaInstance>> {
    use std::io::BufRead as _;
    let file = std::fs::File::open(&path).map_err(|_| Error::MissingArtifact {
        path: path.as_ref().display().to_string(),
        producer: "gen".to_string(),
    })?;
    let mut out = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

fn distinct_pair<R: Rng>(n: usize, rng: &mut R) -> (usize, usize) {
    debug_assert!(n >= 2);
    let u = rng.gen_range(0..n);
    let mut v = rng.gen_range(0..n - 1);
    if v >= u {
        v += 1;
    }
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn zero_probability_yields_empty_graph() {
        let config = GenConfig {
            node_range: (5, 5),
            edge_prob_range: (0.0, 0.0),
            ..GenConfig::default()
        };
        let g = gen_er_graph(&config, false, false, &mut rng(1));
        assert_eq!(g.node_count, 5);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn certainty_yields_complete_graph() {
        let config = GenConfig {
            node_range: (4, 4),
            edge_prob_range: (1.0, 1.0),
            ..GenConfig::default()
        };
        let g = gen_er_graph(&config, false, false, &mut rng(2));
        assert_eq!(g.edges.len(), 6);
        for e in &g.edges {
            assert!(e.u < e.v);
        }
    }

    #[test]
    fn mean_edge_count_matches_binomial() {
        // n=20, p=0.3: mean 0.3*190 = 57, var = 190*0.3*0.7 = 39.9 per graph.
        let config = GenConfig {
            node_range: (20, 20),
            edge_prob_range: (0.3, 0.3),
            ..GenConfig::default()
        };
        let mut r = rng(3);
        let samples = 10_000usize;
        let total: usize = (0..samples)
            .map(|_| gen_er_graph(&config, false, false, &mut r).edges.len())
            .sum();
        let mean = total as f64 / samples as f64;
        let expected = 0.3 * 190.0;
        let sigma_of_mean = (190.0f64 * 0.3 * 0.7 / samples as f64).sqrt();
        assert!(
            (mean - expected).abs() < 3.0 * sigma_of_mean,
            "mean {mean} vs expected {expected}"
        );
    }

    #[test]
    fn ts_instances_are_acyclic() {
        let config = GenConfig {
            node_range: (3, 8),
            seed: 7,
            ..GenConfig::default()
        };
        let mut r = rng(7);
        for nonce in 0..20 {
            let inst = gen_qa_instance(TaskKind::Ts, &config, nonce, &mut r).unwrap();
            assert!(oracles::topo_sort(&inst.graph).is_ok());
        }
    }

    #[test]
    fn sp_chain_gold_path() {
        // Deterministic chain 0-1-2 with weights 1,1; gold must be 0->1->2.
        let g = GraphInstance {
            directed: false,
            node_count: 3,
            edges: vec![
                Edge { u: 0, v: 1, weight: Some(1) },
                Edge { u: 1, v: 2, weight: Some(1) },
            ],
            bipartite: None,
            node_attrs: None,
            node_classes: None,
        };
        let (dist, path) = oracles::shortest_path(&g, 0, 2).unwrap();
        assert_eq!(dist, 2);
        assert_eq!(path, vec![0, 1, 2]);
    }

    #[test]
    fn generation_is_deterministic() {
        let config = GenConfig {
            seed: 99,
            ..GenConfig::default()
        };
        let a = gen_qa_instance(TaskKind::Conn, &config, 0, &mut rng(99)).unwrap();
        let b = gen_qa_instance(TaskKind::Conn, &config, 0, &mut rng(99)).unwrap();
        assert_eq!(
            serde_json::to_vec(&a).unwrap(),
            serde_json::to_vec(&b).unwrap()
        );
    }

    #[test]
    fn different_seeds_differ_in_id() {
        let c1 = GenConfig { seed: 1, ..GenConfig::default() };
        let c2 = GenConfig { seed: 2, ..GenConfig::default() };
        let a = gen_qa_instance(TaskKind::Conn, &c1, 0, &mut rng(1)).unwrap();
        let b = gen_qa_instance(TaskKind::Conn, &c2, 0, &mut rng(2)).unwrap();
        assert_ne!(a.id, b.id);
    }

    #[test]
    fn lp_gold_matches_construction() {
        let config = GenConfig { seed: 5, ..GenConfig::default() };
        let mut r = rng(5);
        let mut saw_yes = false;
        let mut saw_no = false;
        for nonce in 0..40 {
            let inst =
                gen_attributed_instance(TaskKind::Lp, &config, 2, nonce, &mut r).unwrap();
            let QueryParams::Pair { u, v } = inst.params else { panic!() };
            match inst.gold {
                GoldAnswer::Bool(true) => {
                    saw_yes = true;
                    assert!(!inst.graph.has_edge_undirected(u, v));
                }
                GoldAnswer::Bool(false) => {
                    saw_no = true;
                    assert!(!inst.graph.has_edge_undirected(u, v));
                }
                _ => panic!("LP gold must be boolean"),
            }
        }
        assert!(saw_yes && saw_no);
    }

    #[test]
    fn nc_plurality_neighbor_recovers_planted_class() {
        // Statistical oracle: with intra 0.8 / inter 0.05 at n in [18,22],
        // the plurality class among the hidden node's neighbors should equal
        // the planted class in >= 95% of seeds.
        let config = GenConfig {
            node_range: (18, 22),
            seed: 11,
            ..GenConfig::default()
        };
        let mut r = rng(11);
        let trials = 1000;
        let mut hits = 0;
        for nonce in 0..trials {
            let inst =
                gen_attributed_instance(TaskKind::Nc, &config, 2, nonce as u64, &mut r).unwrap();
            let QueryParams::Node { target } = inst.params else { panic!() };
            let GoldAnswer::Class(gold) = inst.gold else { panic!() };
            let classes = inst.graph.node_classes.as_ref().unwrap();
            let adj = inst.graph.adjacency();
            let mut votes = [0usize; 2];
            for &nbr in &adj[target] {
                votes[classes[&nbr]] += 1;
            }
            let plurality = if votes[0] >= votes[1] { 0 } else { 1 };
            if plurality == gold {
                hits += 1;
            }
        }
        assert!(hits * 100 >= trials * 95, "only {hits}/{trials} recovered");
    }

    #[test]
    fn bipartite_edges_cross_partition() {
        let config = GenConfig { seed: 3, ..GenConfig::default() };
        let mut r = rng(3);
        for nonce in 0..10 {
            let inst = gen_qa_instance(TaskKind::Bgm, &config, nonce, &mut r).unwrap();
            let split = inst.graph.bipartite.unwrap();
            for e in &inst.graph.edges {
                assert!(e.u < split.host_count);
                assert!(e.v >= split.host_count);
                assert!(e.v < split.host_count + split.task_count);
            }
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let config = GenConfig {
            node_range: (1, 0),
            ..GenConfig::default()
        };
        assert!(gen_qa_instance(TaskKind::Conn, &config, 0, &mut rng(0)).is_err());
    }
}
