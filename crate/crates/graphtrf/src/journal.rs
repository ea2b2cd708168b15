//! Append-only probe journal and the TRF-preference dataset built from it.
//!
//! The journal is the source of truth: every (question, TRF, run) response
//! lands here before any aggregation, so interrupted probing sessions resume
//! exactly where they stopped and all statistics are recomputable.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::client::{Client, RunKey};
use crate::error::{Error, Result};
use crate::graph::{QaInstance, TaskKind};
use crate::metrics::{gre, preferred_set, GreParams, ProbeStats};
use crate::protocol::{extract_answer, judge_runs, validate_answer, JudgedRun};
use crate::render::assemble_prompt;
use crate::router::featurize;
use crate::trf::TrfKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub question_id: String,
    pub trf: TrfKind,
    pub run_idx: usize,
    pub response: String,
    pub tokens: u64,
    pub correct: bool,
}

pub struct Journal {
    path: PathBuf,
    writer: BufWriter<File>,
    // (question, trf) -> run_idx -> record; BTreeMap keeps runs ordered.
    index: HashMap<(String, TrfKind), BTreeMap<usize, JournalRecord>>,
}

impl Journal {
    /// Opens (or creates) a journal, loading any existing records so callers
    /// can skip work already done.
    pub fn open(path: impl AsRef<Path>) -> Result<Journal> {
        let path = path.as_ref().to_path_buf();
        let mut index: HashMap<(String, TrfKind), BTreeMap<usize, JournalRecord>> = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: JournalRecord = serde_json::from_str(&line)?;
                index
                    .entry((rec.question_id.clone(), rec.trf))
                    .or_default()
                    .insert(rec.run_idx, rec);
            }
        }
        let writer = BufWriter::new(OpenOptions::new().create(true).append(true).open(&path)?);
        Ok(Journal { path, writer, index })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn record_count(&self) -> usize {
        self.index.values().map(|m| m.len()).sum()
    }

    pub fn has_run(&self, question_id: &str, trf: TrfKind, run_idx: usize) -> bool {
        self.index
            .get(&(question_id.to_string(), trf))
            .is_some_and(|m| m.contains_key(&run_idx))
    }

    pub fn append(&mut self, rec: JournalRecord) -> Result<()> {
        serde_json::to_writer(&mut self.writer, &rec)?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;
        self.index
            .entry((rec.question_id.clone(), rec.trf))
            .or_default()
            .insert(rec.run_idx, rec);
        Ok(())
    }

    /// Per-question stats over runs 0..k; errors if any run is missing.
    pub fn stats(&self, question_id: &str, trf: TrfKind, k: usize) -> Result<ProbeStats> {
        let runs = self.index.get(&(question_id.to_string(), trf));
        let mut judged = Vec::with_capacity(k);
        for run_idx in 0..k {
            let rec = runs.and_then(|m| m.get(&run_idx)).ok_or_else(|| {
                Error::IncompleteJournal { question_id: question_id.to_string(), trf }
            })?;
            judged.push(JudgedRun {
                response_text: rec.response.clone(),
                completion_tokens: rec.tokens,
                extracted: None,
                correct: rec.correct,
            });
        }
        judge_runs(&judged)
    }

    pub fn question_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> =
            self.index.keys().map(|(q, _)| q.clone()).collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
        ids.sort();
        ids
    }
}

/// Probes one question across all 8 TRFs, k runs each, skipping runs the
/// journal already holds. Returns per-TRF stats in canonical order.
pub fn probe_question(
    journal: &mut Journal,
    client: &dyn Client,
    instance: &QaInstance,
    params: &GreParams,
    k: usize,
    cot: bool,
) -> Result<[ProbeStats; TrfKind::COUNT]> {
    let _ = params;
    let mut out = [ProbeStats { accuracy: 0.0, avg_tok: 1.0 }; TrfKind::COUNT];
    for trf in TrfKind::ALL {
        let prompt = assemble_prompt(instance, trf, cot)?;
        for run_idx in 0..k {
            if journal.has_run(&instance.id, trf, run_idx) {
                continue;
            }
            let key = RunKey { question_id: &instance.id, trf, run_idx };
            let resp = client.complete(instance, &prompt, key)?;
            let correct = extract_answer(&resp.text)
                .map(|a| validate_answer(instance, &a))
                .unwrap_or(false);
            journal.append(JournalRecord {
                question_id: instance.id.clone(),
                trf,
                run_idx,
                response: resp.text,
                tokens: resp.completion_tokens,
                correct,
            })?;
        }
        out[trf.index()] = journal.stats(&instance.id, trf, k)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrfpExample {
    pub question_id: String,
    pub task: TaskKind,
    pub features: Vec<f64>,
    pub label_set: Vec<TrfKind>,
    pub per_trf_gre: BTreeMap<TrfKind, f64>,
}

/// Labels every question from the journal: per-TRF GRE, exact-tie argmax
/// label set, and router features.
pub fn build_trfp(
    journal: &Journal,
    instances: &[QaInstance],
    params: &GreParams,
) -> Result<Vec<TrfpExample>> {
    let mut out = Vec::with_capacity(instances.len());
    for instance in instances {
        let mut per_trf = [0.0; TrfKind::COUNT];
        for trf in TrfKind::ALL {
            let stats = journal.stats(&instance.id, trf, params.probe_k)?;
            per_trf[trf.index()] = gre(stats, params.alpha);
        }
        let label_set: Vec<TrfKind> = preferred_set(&per_trf)
            .into_iter()
            .map(|i| TrfKind::from_index(i).unwrap())
            .collect();
        out.push(TrfpExample {
            question_id: instance.id.clone(),
            task: instance.task,
            features: featurize(instance),
            label_set,
            per_trf_gre: TrfKind::ALL.iter().map(|&t| (t, per_trf[t.index()])).collect(),
        });
    }
    Ok(out)
}

pub fn write_trfp(path: impl AsRef<Path>, examples: &[TrfpExample]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for ex in examples {
        serde_json::to_writer(&mut w, ex)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trfp(path: impl AsRef<Path>) -> Result<Vec<TrfpExample>> {
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Task-preferred TRF ranking as TSV: one column per task, rows ranked by
/// how often each TRF appears in that task's label sets. Percentages use the
/// fraction of questions whose label set contains the TRF, so multi-label
/// ties can push a column's total above 100%.
pub fn frequency_table(examples: &[TrfpExample]) -> String {
    let mut tasks: Vec<TaskKind> = Vec::new();
    for ex in examples {
        if !tasks.contains(&ex.task) {
            tasks.push(ex.task);
        }
    }
    tasks.sort_by_key(|t| t.index());

    let mut columns: Vec<Vec<String>> = Vec::new();
    for &task in &tasks {
        let of_task: Vec<&TrfpExample> = examples.iter().filter(|e| e.task == task).collect();
        let n = of_task.len() as f64;
        let mut ranked: Vec<(TrfKind, usize)> = TrfKind::ALL
            .iter()
            .map(|&trf| (trf, of_task.iter().filter(|e| e.label_set.contains(&trf)).count()))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.index().cmp(&b.0.index())));
        columns.push(
            ranked
                .into_iter()
                .map(|(trf, count)| format!("{} ({:.1}%)", trf, 100.0 * count as f64 / n))
                .collect(),
        );
    }

    let mut out = String::from("rank");
    for task in &tasks {
        out.push('\t');
        out.push_str(task.name());
    }
    out.push('\n');
    for rank in 0..TrfKind::COUNT {
        out.push_str(&(rank + 1).to_string());
        for col in &columns {
            out.push('\t');
            out.push_str(&col[rank]);
        }
        out.push('\n');
    }
    out
}
