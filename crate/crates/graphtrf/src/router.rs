//! Question featurization, the multi-label TRF classifier, routing
//! strategies, and the empirical Pareto-optimality verifier.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::QaInstance;
use crate::journal::{Journal, TrfpExample};
use crate::metrics::{gre, log_objectives, preferred_set};
use crate::render::task_instruction;
use crate::trf::TrfKind;

pub const TASK_BLOCK: usize = 9;
pub const NUMERIC_BLOCK: usize = 6;
pub const BOW_BUCKETS: usize = 256;
pub const FEATURE_DIM: usize = TASK_BLOCK + NUMERIC_BLOCK + BOW_BUCKETS;
/// Bump when the feature layout changes; stored in the model file so stale
/// weights are rejected rather than silently misapplied.
pub const FEATURE_LAYOUT: &str = "task9+graph6+bow256-v1";

/// Deterministic feature vector: task one-hot, normalized graph statistics,
/// then a signed-hash bag of words over the question text. Graph statistics
/// come from the instance itself, never parsed back out of the prompt.
pub fn featurize(instance: &QaInstance) -> Vec<f64> {
    let mut x = vec![0.0; FEATURE_DIM];
    x[instance.task.index()] = 1.0;

    let g = &instance.graph;
    let n = g.node_count as f64;
    let pairs = match g.bipartite {
        Some(split) => (split.host_count * split.task_count) as f64,
        None if g.directed => n * (n - 1.0),
        None => n * (n - 1.0) / 2.0,
    };
    let base = TASK_BLOCK;
    x[base] = n / 30.0;
    x[base + 1] = g.edges.len() as f64 / 435.0;
    x[base + 2] = if pairs > 0.0 { g.edges.len() as f64 / pairs } else { 0.0 };
    x[base + 3] = if g.directed { 1.0 } else { 0.0 };
    x[base + 4] = if g.edges.iter().any(|e| e.weight.is_some()) { 1.0 } else { 0.0 };
    x[base + 5] = if g.bipartite.is_some() { 1.0 } else { 0.0 };

    let text = task_instruction(instance).to_lowercase();
    let tokens: Vec<&str> =
        text.split(|c: char| !c.is_ascii_alphanumeric()).filter(|t| !t.is_empty()).collect();
    if !tokens.is_empty() {
        let base = TASK_BLOCK + NUMERIC_BLOCK;
        let scale = 1.0 / tokens.len() as f64;
        for token in tokens {
            let h = fnv1a(token.as_bytes());
            let bucket = (h % BOW_BUCKETS as u64) as usize;
            let sign = if (h >> 8) & 1 == 0 { 1.0 } else { -1.0 };
            x[base + bucket] += sign * scale;
        }
    }
    x
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Hyper {
        Hyper { lr: 0.5, epochs: 60, batch: 32, l2: 1e-5, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouterModel {
    pub version: u32,
    pub feature_layout: String,
    pub feature_dim: usize,
    /// One weight row per TRF in canonical order.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub hyper: Hyper,
    /// Mean dataset BCE before training, then after each epoch.
    pub loss_curve: Vec<f64>,
}

impl RouterModel {
    pub fn zeros(hyper: Hyper) -> RouterModel {
        RouterModel {
            version: 1,
            feature_layout: FEATURE_LAYOUT.to_string(),
            feature_dim: FEATURE_DIM,
            weights: vec![vec![0.0; FEATURE_DIM]; TrfKind::COUNT],
            bias: vec![0.0; TrfKind::COUNT],
            hyper,
            loss_curve: Vec::new(),
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn targets(ex: &TrfpExample) -> [f64; TrfKind::COUNT] {
    let mut y = [0.0; TrfKind::COUNT];
    for trf in &ex.label_set {
        y[trf.index()] = 1.0;
    }
    y
}

/// Mean multi-label BCE over the dataset (no regularization term).
pub fn bce_loss(model: &RouterModel, examples: &[TrfpExample]) -> f64 {
    let mut total = 0.0;
    for ex in examples {
        let y = targets(ex);
        let p = raw_predict(model, &ex.features);
        for f in 0..TrfKind::COUNT {
            // Clamp away from 0/1 so the log stays finite.
            let pf = p[f].clamp(1e-12, 1.0 - 1e-12);
            total -= y[f] * pf.ln() + (1.0 - y[f]) * (1.0 - pf).ln();
        }
    }
    total / (examples.len() as f64 * TrfKind::COUNT as f64)
}

fn raw_predict(model: &RouterModel, features: &[f64]) -> [f64; TrfKind::COUNT] {
    let mut p = [0.0; TrfKind::COUNT];
    for f in 0..TrfKind::COUNT {
        let z: f64 = model.weights[f]
            .iter()
            .zip(features)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + model.bias[f];
        p[f] = sigmoid(z);
    }
    p
}

/// Mini-batch gradient descent on the BCE objective with a fixed shuffle
/// seed; identical (dataset, hyper) pairs reproduce the model bit-for-bit.
pub fn train(examples: &[TrfpExample], hyper: Hyper) -> Result<RouterModel> {
    if examples.is_empty() {
        return Err(Error::EmptyRecords);
    }
    for ex in examples {
        if ex.features.len() != FEATURE_DIM {
            return Err(Error::DimensionMismatch { expected: FEATURE_DIM, got: ex.features.len() });
        }
    }
    let mut model = RouterModel::zeros(hyper);
    model.loss_curve.push(bce_loss(&model, examples));

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    for _ in 0..hyper.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(hyper.batch.max(1)) {
            let mut grad_w = vec![vec![0.0; FEATURE_DIM]; TrfKind::COUNT];
            let mut grad_b = [0.0; TrfKind::COUNT];
            for &i in chunk {
                let ex = &examples[i];
                let y = targets(ex);
                let p = raw_predict(&model, &ex.features);
                for f in 0..TrfKind::COUNT {
                    let delta = p[f] - y[f];
                    grad_b[f] += delta;
                    for (gw, x) in grad_w[f].iter_mut().zip(&ex.features) {
                        *gw += delta * x;
                    }
                }
            }
            let scale = hyper.lr / chunk.len() as f64;
            for f in 0..TrfKind::COUNT {
                model.bias[f] -= scale * grad_b[f];
                for (w, gw) in model.weights[f].iter_mut().zip(&grad_w[f]) {
                    *w -= scale * (gw + hyper.l2 * *w * chunk.len() as f64);
                }
            }
        }
        model.loss_curve.push(bce_loss(&model, examples));
    }

    let first = &examples[0].label_set;
    let all_identical = examples.iter().all(|e| &e.label_set == first);
    let never_improved = model
        .loss_curve
        .windows(2)
        .all(|w| w[1] >= w[0] - 1e-15);
    if all_identical && never_improved && hyper.epochs > 0 {
        return Err(Error::Degenerate);
    }
    Ok(model)
}

/// Per-TRF preference probabilities for a feature vector.
pub fn predict(model: &RouterModel, features: &[f64]) -> Result<[f64; TrfKind::COUNT]> {
    if features.len() != model.feature_dim {
        return Err(Error::DimensionMismatch { expected: model.feature_dim, got: features.len() });
    }
    Ok(raw_predict(model, features))
}

/// Highest-probability TRF, canonical order breaking exact ties.
pub fn route(model: &RouterModel, instance: &QaInstance) -> Result<TrfKind> {
    let probs = predict(model, &featurize(instance))?;
    Ok(argmax_trf(&probs))
}

pub fn argmax_trf(scores: &[f64; TrfKind::COUNT]) -> TrfKind {
    let mut best = 0;
    for i in 1..TrfKind::COUNT {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    TrfKind::from_index(best).unwrap()
}

/// Oracle routing: first member (canonical order) of the GRE argmax set.
pub fn ideal_route(per_trf_gre: &[f64; TrfKind::COUNT]) -> TrfKind {
    TrfKind::from_index(preferred_set(per_trf_gre)[0]).unwrap()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoRow {
    pub trf: TrfKind,
    /// E_q[GRE of ideal routing] − E_q[GRE of always using this TRF].
    pub mean_gre_gap: f64,
    pub gap_nonnegative: bool,
    /// Rearranged per-question inequality ΔAcc_obj ≥ α·(Eff_f − Eff*),
    /// checked on questions where both strategies have nonzero accuracy.
    pub inequality_holds: bool,
    pub questions_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoReport {
    pub mean_ideal_gre: f64,
    pub rows: Vec<ParetoRow>,
}

impl ParetoReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.gap_nonnegative && r.inequality_holds)
    }
}

/// Empirically verifies that GRE-optimal routing dominates every fixed TRF
/// on a complete probe journal.
pub fn verify_pareto(
    journal: &Journal,
    question_ids: &[String],
    k: usize,
    alpha: f64,
) -> Result<ParetoReport> {
    let mut ideal_sum = 0.0;
    let mut fixed_sum = [0.0; TrfKind::COUNT];
    let mut inequality_ok = [true; TrfKind::COUNT];
    let mut checked = [0usize; TrfKind::COUNT];

    for qid in question_ids {
        let mut stats = Vec::with_capacity(TrfKind::COUNT);
        let mut gres = [0.0; TrfKind::COUNT];
        for trf in TrfKind::ALL {
            let s = journal.stats(qid, trf, k)?;
            gres[trf.index()] = gre(s, alpha);
            stats.push(s);
        }
        let star = ideal_route(&gres);
        ideal_sum += gres[star.index()];
        for trf in TrfKind::ALL {
            let i = trf.index();
            fixed_sum[i] += gres[i];
            // The log-domain inequality is only defined when both sides
            // have nonzero accuracy.
            if stats[star.index()].accuracy > 0.0 && stats[i].accuracy > 0.0 {
                let (acc_star, eff_star) = log_objectives(stats[star.index()]).unwrap();
                let (acc_f, eff_f) = log_objectives(stats[i]).unwrap();
                checked[i] += 1;
                if acc_star - acc_f < alpha * (eff_f - eff_star) - 1e-9 {
                    inequality_ok[i] = false;
                }
            }
        }
    }

    let n = question_ids.len() as f64;
    let mean_ideal = ideal_sum / n;
    let rows = TrfKind::ALL
        .iter()
        .map(|&trf| {
            let gap = mean_ideal - fixed_sum[trf.index()] / n;
            ParetoRow {
                trf,
                mean_gre_gap: gap,
                gap_nonnegative: gap >= -1e-9,
                inequality_holds: inequality_ok[trf.index()],
                questions_checked: checked[trf.index()],
            }
        })
        .collect();
    Ok(ParetoReport { mean_ideal_gre: mean_ideal, rows })
}

pub fn save_model(path: impl AsRef<std::path::Path>, model: &RouterModel) -> Result<()> {
    let json = serde_json::to_string_pretty(model)?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<std::path::Path>) -> Result<RouterModel> {
    let text = std::fs::read_to_string(&path).map_err(|_| Error::MissingArtifact {
        path: path.as_ref().display().to_string(),
        producer: "train".to_string(),
    })?;
    let model: RouterModel = serde_json::from_str(&text)?;
    if model.feature_layout != FEATURE_LAYOUT {
        return Err(Error::Config(format!(
            "model feature layout `{}` does not match this build (`{FEATURE_LAYOUT}`)",
            model.feature_layout
        )));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GenConfig, TaskKind};
    use rand::Rng;
    use std::collections::BTreeMap;

    fn sample_instance(task: TaskKind, seed: u64) -> QaInstance {
        let config = GenConfig { seed, ..GenConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match task {
            TaskKind::Lp | TaskKind::Nc => {
                crate::graph::gen_attributed_instance(task, &config, 3, 0, &mut rng).unwrap()
            }
            _ => crate::graph::gen_qa_instance(task, &config, 0, &mut rng).unwrap(),
        }
    }

    /// Separable dataset: each task's label is fixed, mirroring the observed
    /// visual-for-perception / textual-for-weighted split.
    fn separable_dataset(per_task: usize) -> Vec<TrfpExample> {
        let label_for = |task: TaskKind| match task {
            TaskKind::Conn => TrfKind::Vneato,
            TaskKind::Cyc => TrfKind::Vdot,
            TaskKind::Bgm => TrfKind::Vsfdp,
            TaskKind::Ts => TrfKind::Tset,
            TaskKind::Sp => TrfKind::Tlist,
            TaskKind::Mf => TrfKind::Tlist,
            TaskKind::Hp => TrfKind::Tmat,
            TaskKind::Lp => TrfKind::Tset,
            TaskKind::Nc => TrfKind::Vdot,
        };
        let mut out = Vec::new();
        for task in TaskKind::IN_DOMAIN {
            for i in 0..per_task {
                let inst = sample_instance(task, 100 + i as u64);
                let label = label_for(task);
                let mut gres = BTreeMap::new();
                for trf in TrfKind::ALL {
                    gres.insert(trf, if trf == label { 10.0 } else { 1.0 });
                }
                out.push(TrfpExample {
                    question_id: format!("{task:?}-{i}"),
                    task,
                    features: featurize(&inst),
                    label_set: vec![label],
                    per_trf_gre: gres,
                });
            }
        }
        out
    }

    #[test]
    fn featurize_layout() {
        let a = sample_instance(TaskKind::Conn, 1);
        let x = featurize(&a);
        assert_eq!(x.len(), FEATURE_DIM);
        assert_eq!(x[TaskKind::Conn.index()], 1.0);
        assert_eq!(featurize(&a), x, "determinism");

        let mut b = a.clone();
        b.task = TaskKind::Cyc;
        b.params = crate::graph::QueryParams::None;
        let y = featurize(&b);
        assert_eq!(y[TaskKind::Cyc.index()], 1.0);
        assert_eq!(y[TaskKind::Conn.index()], 0.0);
        // Graph-stat block is untouched by the task switch.
        assert_eq!(&x[TASK_BLOCK..TASK_BLOCK + NUMERIC_BLOCK],
                   &y[TASK_BLOCK..TASK_BLOCK + NUMERIC_BLOCK]);
    }

    #[test]
    fn zero_model_predicts_half() {
        let model = RouterModel::zeros(Hyper { epochs: 0, ..Hyper::default() });
        let p = predict(&model, &vec![0.3; FEATURE_DIM]).unwrap();
        assert!(p.iter().all(|&v| v == 0.5));
        assert!(matches!(
            predict(&model, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: FEATURE_DIM, got: 2 })
        ));
    }

    #[test]
    fn loss_decreases_in_first_epoch() {
        let data = separable_dataset(20);
        let hyper = Hyper { lr: 1e-2, epochs: 1, ..Hyper::default() };
        let model = train(&data, hyper).unwrap();
        assert_eq!(model.loss_curve.len(), 2);
        assert!(model.loss_curve[1] < model.loss_curve[0]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = separable_dataset(3);
        let mut model = RouterModel::zeros(Hyper::default());
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for row in &mut model.weights {
            for w in row.iter_mut() {
                *w = rng.gen_range(-0.5..0.5);
            }
        }

        // Analytic gradient of the mean BCE for a few random coordinates.
        let n = data.len() as f64 * TrfKind::COUNT as f64;
        for _ in 0..10 {
            let f = rng.gen_range(0..TrfKind::COUNT);
            let j = rng.gen_range(0..FEATURE_DIM);
            let analytic: f64 = data
                .iter()
                .map(|ex| {
                    let p = raw_predict(&model, &ex.features);
                    (p[f] - targets(ex)[f]) * ex.features[j]
                })
                .sum::<f64>()
                / n;
            let eps = 1e-6;
            let mut plus = model.clone();
            plus.weights[f][j] += eps;
            let mut minus = model.clone();
            minus.weights[f][j] -= eps;
            let numeric = (bce_loss(&plus, &data) - bce_loss(&minus, &data)) / (2.0 * eps);
            let denom = analytic.abs().max(numeric.abs()).max(1e-8);
            assert!(
                ((analytic - numeric) / denom).abs() < 1e-5,
                "f={f} j={j}: analytic {analytic} vs numeric {numeric}"
            );
        }
    }

    #[test]
    fn separable_dataset_recovered_held_out() {
        let data = separable_dataset(40);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut rng);
        let split = data.len() * 8 / 10;
        let train_set: Vec<TrfpExample> = order[..split].iter().map(|&i| data[i].clone()).collect();
        let test_set: Vec<&TrfpExample> = order[split..].iter().map(|&i| &data[i]).collect();

        let model = train(&train_set, Hyper::default()).unwrap();
        let hits = test_set
            .iter()
            .filter(|ex| {
                let p = predict(&model, &ex.features).unwrap();
                ex.label_set.contains(&argmax_trf(&p))
            })
            .count();
        let recovery = hits as f64 / test_set.len() as f64;
        assert!(recovery >= 0.95, "top-1 recovery {recovery}");
    }

    #[test]
    fn training_is_bit_reproducible() {
        let data = separable_dataset(10);
        let a = train(&data, Hyper::default()).unwrap();
        let b = train(&data, Hyper::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tie_breaks_canonically() {
        let mut scores = [0.5; TrfKind::COUNT];
        assert_eq!(argmax_trf(&scores), TrfKind::Vdot);
        scores[TrfKind::Vneato.index()] = 0.9;
        scores[TrfKind::Tset.index()] = 0.9;
        assert_eq!(argmax_trf(&scores), TrfKind::Vneato);

        let gres = [2.0; TrfKind::COUNT];
        assert_eq!(ideal_route(&gres), TrfKind::Vdot);
    }

    #[test]
    fn model_roundtrip_and_layout_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("router.json");
        let model = train(&separable_dataset(5), Hyper { epochs: 2, ..Hyper::default() }).unwrap();
        save_model(&path, &model).unwrap();
        assert_eq!(load_model(&path).unwrap(), model);

        let mut stale = model.clone();
        stale.feature_layout = "other-v0".into();
        save_model(&path, &stale).unwrap();
        assert!(matches!(load_model(&path), Err(Error::Config(_))));
        assert!(matches!(
            load_model(dir.path().join("absent.json")),
            Err(Error::MissingArtifact { .. })
        ));
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(matches!(train(&[], Hyper::default()), Err(Error::EmptyRecords)));
    }
}
