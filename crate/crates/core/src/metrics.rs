//! Threshold-free ranking metrics and the comparison report.
//!
//! Scores follow the convention "higher means more likely OOD".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::score::{ScoreKind, ScoreRecord};

fn check(name: &str, scores: &[f64]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::Degenerate(format!("{name} score list is empty")));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument(format!("{name} scores contain NaN")));
    }
    Ok(())
}

/// Probability that a random OOD score exceeds a random ID score, ties
/// counting one half (Mann-Whitney U via mid-ranks).
pub fn auroc(id_scores: &[f64], ood_scores: &[f64]) -> Result<f64> {
    check("ID", id_scores)?;
    check("OOD", ood_scores)?;
    let mut all: Vec<(f64, bool)> = id_scores
        .iter()
        .map(|&s| (s, false))
        .chain(ood_scores.iter().map(|&s| (s, true)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Twice the rank sum keeps mid-ranks integral.
    let mut twice_rank_sum: u128 = 0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let twice_mid = (i + 1 + j) as u128;
        let ood_in_group = all[i..j].iter().filter(|x| x.1).count() as u128;
        twice_rank_sum += twice_mid * ood_in_group;
        i = j;
    }
    let (n_id, n_ood) = (id_scores.len() as u128, ood_scores.len() as u128);
    let twice_u = twice_rank_sum - n_ood * (n_ood + 1);
    Ok(twice_u as f64 / (2 * n_id * n_ood) as f64)
}

/// Step-wise average precision, sweeping thresholds from the highest score
/// down and treating tied scores as one step.
pub fn aupr(positives: &[f64], negatives: &[f64]) -> Result<f64> {
    check("positive", positives)?;
    check("negative", negatives)?;
    let mut all: Vec<(f64, bool)> = positives
        .iter()
        .map(|&s| (s, true))
        .chain(negatives.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    let n_pos = positives.len() as f64;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut ap = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        let mut new_tp = 0;
        while j < all.len() && all[j].0 == all[i].0 {
            if all[j].1 {
                new_tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        tp += new_tp;
        if new_tp > 0 {
            ap += new_tp as f64 * (tp as f64 / (tp + fp) as f64);
        }
        i = j;
    }
    Ok(ap / n_pos)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodMetrics {
    pub method: String,
    pub auroc: f64,
    pub aupr_in: f64,
    pub aupr_out: f64,
}

/// AUROC, AUPR with ID as positive (on negated scores) and AUPR with OOD as
/// positive.
pub fn method_metrics(
    method: &str,
    records: &[ScoreRecord],
    kind: ScoreKind,
) -> Result<MethodMetrics> {
    let (id, ood) = split_scores(records, kind)?;
    let neg = |v: &[f64]| v.iter().map(|s| -s).collect::<Vec<_>>();
    Ok(MethodMetrics {
        method: method.to_string(),
        auroc: auroc(&id, &ood)?,
        aupr_in: aupr(&neg(&id), &neg(&ood))?,
        aupr_out: aupr(&ood, &id)?,
    })
}

fn split_scores(records: &[ScoreRecord], kind: ScoreKind) -> Result<(Vec<f64>, Vec<f64>)> {
    let (id, ood): (Vec<&ScoreRecord>, Vec<&ScoreRecord>) =
        records.iter().partition(|r| r.label.is_id());
    if id.is_empty() || ood.is_empty() {
        return Err(Error::Degenerate(format!(
            "evaluation needs both classes, got {} ID and {} OOD records",
            id.len(),
            ood.len()
        )));
    }
    let s = |v: Vec<&ScoreRecord>| v.into_iter().map(|r| r.score(kind)).collect();
    Ok((s(id), s(ood)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub methods: Vec<MethodMetrics>,
    pub n_id: usize,
    pub n_ood: usize,
    pub dataset_seed: Option<u64>,
    pub weights_digest: Option<String>,
}

pub const METHOD_REC: &str = "PB-REC";
pub const METHOD_LSE: &str = "PB-LSE";
pub const METHOD_BASELINE: &str = "Baseline-REC";

/// Both patch-based rows from one record set.
pub fn evaluate(records: &[ScoreRecord]) -> Result<EvalReport> {
    let n_id = records.iter().filter(|r| r.label.is_id()).count();
    Ok(EvalReport {
        methods: vec![
            method_metrics(METHOD_REC, records, ScoreKind::Rec)?,
            method_metrics(METHOD_LSE, records, ScoreKind::Energy)?,
        ],
        n_id,
        n_ood: records.len() - n_id,
        dataset_seed: None,
        weights_digest: None,
    })
}

impl EvalReport {
    pub fn method(&self, name: &str) -> Option<&MethodMetrics> {
        self.methods.iter().find(|m| m.method == name)
    }

    /// Aligned text table, metrics in percent.
    pub fn table(&self) -> String {
        let width = self
            .methods
            .iter()
            .map(|m| m.method.len())
            .max()
            .unwrap_or(0)
            .max(6);
        let mut out = format!(
            "{:<width$}  {:>8}  {:>8}  {:>8}\n",
            "Method", "AUROC", "AUPR_IN", "AUPR_OUT"
        );
        for m in &self.methods {
            out.push_str(&format!(
                "{:<width$}  {:>8.2}  {:>8.2}  {:>8.2}\n",
                m.method,
                100.0 * m.auroc,
                100.0 * m.aupr_in,
                100.0 * m.aupr_out
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
