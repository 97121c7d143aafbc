//! File-driven pipeline: simulate, preprocess, train, score, calibrate and
//! evaluate, each stage reading and writing the declared file formats.
//!
//! One JSON document configures every stage. Relative paths resolve against
//! the directory holding the config file. Text outputs start with a
//! `# manifest config_sha256=… seed=…` comment; the digest covers every
//! setting except `paths`, so moving a run to another directory leaves its
//! outputs byte-identical.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ae::{
    read_weights, save_weights, train_variant, Autoencoder, TrainConfig, Variant, WEIGHTS_MAGIC,
};
use crate::dsp::{load_rdis, read_rdis, save_rdis, Preprocessor, RangeDopplerImage};
use crate::error::{Error, Result};
use crate::io::{open_file, read_to_string, sha256_hex, write_string};
use crate::metrics::{evaluate, method_metrics, EvalReport, METHOD_BASELINE};
use crate::radar::{
    build_dataset, load_adc, read_adc, save_adc, DatasetSpec, RadarConfig, SceneLabel, Split,
};
use crate::score::{
    calibrate_from_records, classify, load_scores, load_threshold, read_scores, read_threshold,
    save_scores, save_threshold, score_dataset, Decision, ScoreKind, ScoreRecord, Threshold,
};

pub const CONFIG_VERSION: u32 = 1;
pub const LOSS_HEADER: &str = "epoch,mean_loss";

/// Optimizer settings; the seed comes from the top-level `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub epochs: usize,
    pub batch_frames: usize,
    pub lr: f64,
    pub shuffle: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            epochs: t.epochs,
            batch_frames: t.batch_frames,
            lr: t.lr,
            shuffle: t.shuffle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    pub quantile: f64,
    pub score_kind: ScoreKind,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        Self {
            quantile: 0.95,
            score_kind: ScoreKind::Energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    /// Adds the full-image autoencoder row, read from
    /// `paths.baseline_scores_test`.
    pub baseline: bool,
}

impl Default for ReportSection {
    fn default() -> Self {
        Self { baseline: true }
    }
}

/// Locations of every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub adc_train: PathBuf,
    pub adc_val: PathBuf,
    pub adc_test: PathBuf,
    pub rdi_train: PathBuf,
    pub rdi_val: PathBuf,
    pub rdi_test: PathBuf,
    pub weights: PathBuf,
    pub loss_history: PathBuf,
    pub baseline_weights: PathBuf,
    pub baseline_loss_history: PathBuf,
    pub scores_val: PathBuf,
    pub scores_test: PathBuf,
    pub baseline_scores_test: PathBuf,
    pub threshold: PathBuf,
    pub report_text: PathBuf,
    pub report_json: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        let p = |s: &str| PathBuf::from(s);
        Self {
            adc_train: p("train.radc"),
            adc_val: p("val.radc"),
            adc_test: p("test.radc"),
            rdi_train: p("train.rdif"),
            rdi_val: p("val.rdif"),
            rdi_test: p("test.rdif"),
            weights: p("patch.aewt"),
            loss_history: p("patch_loss.csv"),
            baseline_weights: p("baseline.aewt"),
            baseline_loss_history: p("baseline_loss.csv"),
            scores_val: p("scores_val.csv"),
            scores_test: p("scores_test.csv"),
            baseline_scores_test: p("baseline_scores_test.csv"),
            threshold: p("threshold.txt"),
            report_text: p("report.txt"),
            report_json: p("report.json"),
        }
    }
}

impl Paths {
    fn all(&self) -> [(&'static str, &PathBuf); 16] {
        [
            ("adc_train", &self.adc_train),
            ("adc_val", &self.adc_val),
            ("adc_test", &self.adc_test),
            ("rdi_train", &self.rdi_train),
            ("rdi_val", &self.rdi_val),
            ("rdi_test", &self.rdi_test),
            ("weights", &self.weights),
            ("loss_history", &self.loss_history),
            ("baseline_weights", &self.baseline_weights),
            ("baseline_loss_history", &self.baseline_loss_history),
            ("scores_val", &self.scores_val),
            ("scores_test", &self.scores_test),
            ("baseline_scores_test", &self.baseline_scores_test),
            ("threshold", &self.threshold),
            ("report_text", &self.report_text),
            ("report_json", &self.report_json),
        ]
    }

    fn all_mut(&mut self) -> [&mut PathBuf; 16] {
        [
            &mut self.adc_train,
            &mut self.adc_val,
            &mut self.adc_test,
            &mut self.rdi_train,
            &mut self.rdi_val,
            &mut self.rdi_test,
            &mut self.weights,
            &mut self.loss_history,
            &mut self.baseline_weights,
            &mut self.baseline_loss_history,
            &mut self.scores_val,
            &mut self.scores_test,
            &mut self.baseline_scores_test,
            &mut self.threshold,
            &mut self.report_text,
            &mut self.report_json,
        ]
    }

    /// Joins every relative path onto `base`.
    pub fn resolve(&mut self, base: &Path) {
        for p in self.all_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    fn adc(&self, split: Split) -> &Path {
        match split {
            Split::Train => &self.adc_train,
            Split::Val => &self.adc_val,
            Split::Test => &self.adc_test,
        }
    }

    fn rdi(&self, split: Split) -> &Path {
        match split {
            Split::Train => &self.rdi_train,
            Split::Val => &self.rdi_val,
            Split::Test => &self.rdi_test,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub version: u32,
    /// Drives scene generation, weight initialization and shuffling.
    pub seed: u64,
    #[serde(default)]
    pub radar: RadarConfig,
    #[serde(default)]
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub calibration: CalibrationSection,
    #[serde(default)]
    pub report: ReportSection,
    #[serde(default)]
    pub paths: Paths,
}

/// The digested part of the config.
#[derive(Serialize)]
struct Digested<'a> {
    version: u32,
    seed: u64,
    radar: &'a RadarConfig,
    dataset: &'a DatasetSpec,
    train: &'a TrainSection,
    calibration: &'a CalibrationSection,
    report: &'a ReportSection,
}

pub const SPLITS: [Split; 3] = [Split::Train, Split::Val, Split::Test];

fn split_name(split: Split) -> &'static str {
    match split {
        Split::Train => "train",
        Split::Val => "val",
        Split::Test => "test",
    }
}

impl PipelineConfig {
    /// Default settings with every artifact under `dir`.
    pub fn with_dir(seed: u64, dir: &Path) -> Self {
        let mut paths = Paths::default();
        paths.resolve(dir);
        Self {
            version: CONFIG_VERSION,
            seed,
            radar: RadarConfig::default(),
            dataset: DatasetSpec::default(),
            train: TrainSection::default(),
            calibration: CalibrationSection::default(),
            report: ReportSection::default(),
            paths,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads, validates and resolves paths against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_json(&read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.paths.resolve(base);
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        self.radar.validate()?;
        self.dataset.validate()?;
        self.train_config().validate()?;
        let q = self.calibration.quantile;
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Config(format!(
                "calibration quantile must lie in (0, 1), got {q}"
            )));
        }
        let mut seen = HashSet::new();
        for (name, p) in self.paths.all() {
            if p.as_os_str().is_empty() {
                return Err(Error::Config(format!("path {name} is empty")));
            }
            if !seen.insert(p) {
                return Err(Error::Config(format!(
                    "path {name} = {} is used twice",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.train.epochs,
            batch_frames: self.train.batch_frames,
            lr: self.train.lr,
            seed: self.seed,
            shuffle: self.train.shuffle,
        }
    }

    /// SHA-256 of the canonical JSON of everything but `paths`.
    pub fn digest(&self) -> String {
        let d = Digested {
            version: self.version,
            seed: self.seed,
            radar: &self.radar,
            dataset: &self.dataset,
            train: &self.train,
            calibration: &self.calibration,
            report: &self.report,
        };
        sha256_hex(
            serde_json::to_string(&d)
                .expect("config serializes")
                .as_bytes(),
        )
    }

    pub fn manifest(&self) -> String {
        format!(
            "manifest config_sha256={} seed={}",
            self.digest(),
            self.seed
        )
    }
}

/// Frames per label, in label order.
pub fn label_counts(
    labels: impl IntoIterator<Item = SceneLabel>,
) -> BTreeMap<u8, (SceneLabel, usize)> {
    let mut counts = BTreeMap::new();
    for l in labels {
        counts.entry(l.code()).or_insert((l, 0)).1 += 1;
    }
    counts
}

fn format_counts(counts: &BTreeMap<u8, (SceneLabel, usize)>) -> String {
    let parts: Vec<String> = counts.values().map(|(l, n)| format!("{l}={n}")).collect();
    if parts.is_empty() {
        "(empty)".into()
    } else {
        parts.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSummary {
    pub split: Split,
    pub path: PathBuf,
    pub counts: BTreeMap<u8, (SceneLabel, usize)>,
}

impl SplitSummary {
    pub fn total(&self) -> usize {
        self.counts.values().map(|c| c.1).sum()
    }

    pub fn count(&self, label: SceneLabel) -> usize {
        self.counts.get(&label.code()).map_or(0, |c| c.1)
    }
}

impl std::fmt::Display for SplitSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<5} {:>5} frames  {}  -> {}",
            split_name(self.split),
            self.total(),
            format_counts(&self.counts),
            self.path.display()
        )
    }
}

/// Writes the three ADC frame files.
pub fn cmd_simulate(cfg: &PipelineConfig) -> Result<Vec<SplitSummary>> {
    cfg.validate()?;
    SPLITS
        .into_iter()
        .map(|split| {
            let recipe = cfg.dataset.recipe(split, &cfg.radar, cfg.seed)?;
            let set = build_dataset(&recipe, &cfg.radar, cfg.seed)?;
            let path = cfg.paths.adc(split);
            save_adc(&set, path)?;
            Ok(SplitSummary {
                split,
                path: path.to_path_buf(),
                counts: label_counts(set.labels.iter().copied()),
            })
        })
        .collect()
}

/// Turns each ADC file into its image file.
pub fn cmd_preprocess(cfg: &PipelineConfig) -> Result<Vec<SplitSummary>> {
    cfg.validate()?;
    let pre = Preprocessor::new(&cfg.radar)?;
    SPLITS
        .into_iter()
        .map(|split| {
            let frames = load_adc(cfg.paths.adc(split), &cfg.radar)?;
            let images = pre.preprocess(&frames)?;
            let path = cfg.paths.rdi(split);
            save_rdis(&images, path)?;
            Ok(SplitSummary {
                split,
                path: path.to_path_buf(),
                counts: label_counts(images.iter().map(|r| r.label)),
            })
        })
        .collect()
}

fn variant_of(baseline: bool) -> Variant {
    if baseline {
        Variant::FullImage
    } else {
        Variant::Patch
    }
}

fn weights_path(cfg: &PipelineConfig, baseline: bool) -> &Path {
    if baseline {
        &cfg.paths.baseline_weights
    } else {
        &cfg.paths.weights
    }
}

fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub variant: Variant,
    pub loss_history: Vec<f64>,
    pub weights_path: PathBuf,
    pub loss_path: PathBuf,
}

/// Trains the patch model, or the full-image baseline, on the train split.
/// `on_epoch` sees the 1-based epoch and its mean loss.
pub fn cmd_train(
    cfg: &PipelineConfig,
    baseline: bool,
    on_epoch: impl FnMut(usize, f64),
) -> Result<TrainSummary> {
    cfg.validate()?;
    let variant = variant_of(baseline);
    let images = load_rdis(&cfg.paths.rdi_train)?;
    let outcome = train_variant(&images, variant, &cfg.train_config(), on_epoch)?;
    let weights_path = weights_path(cfg, baseline);
    save_weights(&outcome.weights, false, weights_path)?;

    let loss_path = if baseline {
        &cfg.paths.baseline_loss_history
    } else {
        &cfg.paths.loss_history
    };
    let mut csv = format!(
        "# {}\n# variant={}\n{LOSS_HEADER}\n",
        cfg.manifest(),
        variant.name()
    );
    for (e, loss) in outcome.loss_history.iter().enumerate() {
        writeln!(csv, "{},{}", e + 1, sci(*loss)).expect("string write");
    }
    write_string(loss_path, &csv)?;
    Ok(TrainSummary {
        variant,
        loss_history: outcome.loss_history,
        weights_path: weights_path.to_path_buf(),
        loss_path: loss_path.to_path_buf(),
    })
}

/// Epoch losses from a loss-history CSV.
pub fn read_loss_history(path: &Path) -> Result<Vec<f64>> {
    let text = read_to_string(path)?;
    let mut rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    if rows.next().map(str::trim) != Some(LOSS_HEADER) {
        return Err(Error::Format(format!(
            "{} lacks the {LOSS_HEADER:?} header",
            path.display()
        )));
    }
    rows.enumerate()
        .map(|(i, row)| {
            let (epoch, loss) = row
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("bad loss row {row:?}")))?;
            if epoch.trim().parse::<usize>().ok() != Some(i + 1) {
                return Err(Error::Format(format!(
                    "loss row {} has epoch {epoch:?}",
                    i + 1
                )));
            }
            loss.trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad loss value {loss:?}")))
        })
        .collect()
}

fn load_model(path: &Path, expected: Variant) -> Result<(Autoencoder, String)> {
    let bytes = {
        let mut buf = Vec::new();
        open_file(path)?
            .read_to_end(&mut buf)
            .map_err(|e| Error::io(path, e))?;
        buf
    };
    let weights = read_weights(&bytes[..])?;
    let variant = weights.variant()?;
    if variant != expected {
        return Err(Error::Format(format!(
            "{} holds {} weights, expected {}",
            path.display(),
            variant.name(),
            expected.name()
        )));
    }
    if !weights.has_decoder() {
        return Err(Error::Format(format!(
            "{} is encoder-only; reconstruction scores need the decoder",
            path.display()
        )));
    }
    Ok((Autoencoder::from_weights(&weights)?, sha256_hex(&bytes)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSummary {
    pub path: PathBuf,
    pub records: Vec<ScoreRecord>,
}

fn score_file(
    cfg: &PipelineConfig,
    ae: &Autoencoder,
    digest: &str,
    variant: Variant,
    images: &Path,
    out: &Path,
) -> Result<ScoreSummary> {
    let rdis: Vec<RangeDopplerImage> = load_rdis(images)?;
    let records = score_dataset(&rdis, ae)?;
    let comments = vec![
        cfg.manifest(),
        format!("variant={} weights_sha256={digest}", variant.name()),
    ];
    save_scores(&records, &comments, out)?;
    Ok(ScoreSummary {
        path: out.to_path_buf(),
        records,
    })
}

/// Scores the validation and test images with the patch model, or the test
/// images with the baseline.
pub fn cmd_score(cfg: &PipelineConfig, baseline: bool) -> Result<Vec<ScoreSummary>> {
    cfg.validate()?;
    let variant = variant_of(baseline);
    let (ae, digest) = load_model(weights_path(cfg, baseline), variant)?;
    let p = &cfg.paths;
    let jobs: Vec<(&Path, &Path)> = if baseline {
        vec![(&p.rdi_test, &p.baseline_scores_test)]
    } else {
        vec![(&p.rdi_val, &p.scores_val), (&p.rdi_test, &p.scores_test)]
    };
    jobs.into_iter()
        .map(|(images, out)| score_file(cfg, &ae, &digest, variant, images, out))
        .collect()
}

/// τ from the validation scores at the configured quantile and kind.
pub fn cmd_calibrate(cfg: &PipelineConfig) -> Result<Threshold> {
    cfg.validate()?;
    let table = load_scores(&cfg.paths.scores_val)?;
    let t = calibrate_from_records(
        &table.records,
        cfg.calibration.quantile,
        cfg.calibration.score_kind,
    )?;
    save_threshold(&t, &cfg.paths.threshold)?;
    Ok(t)
}

/// Decisions under τ, split by true label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionCounts {
    pub score_kind: ScoreKind,
    pub quantile: f64,
    pub tau: f64,
    pub id_accepted: usize,
    pub id_rejected: usize,
    pub ood_accepted: usize,
    pub ood_rejected: usize,
}

pub fn decision_counts(records: &[ScoreRecord], t: &Threshold) -> DecisionCounts {
    let mut c = DecisionCounts {
        score_kind: t.kind,
        quantile: t.quantile,
        tau: t.value,
        id_accepted: 0,
        id_rejected: 0,
        ood_accepted: 0,
        ood_rejected: 0,
    };
    for r in records {
        let slot = match (r.label.is_id(), classify(r.score(t.kind), t)) {
            (true, Decision::Id) => &mut c.id_accepted,
            (true, Decision::Ood) => &mut c.id_rejected,
            (false, Decision::Id) => &mut c.ood_accepted,
            (false, Decision::Ood) => &mut c.ood_rejected,
        };
        *slot += 1;
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub seed: u64,
}

/// Contents of the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub manifest: Manifest,
    pub report: EvalReport,
    pub decisions: DecisionCounts,
}

impl Evaluation {
    pub fn text(&self) -> String {
        let d = &self.decisions;
        let mut out = self.report.table();
        writeln!(
            out,
            "\nID {} / OOD {} test frames; {} threshold tau = {} (quantile {})",
            self.report.n_id,
            self.report.n_ood,
            d.score_kind,
            sci(d.tau),
            d.quantile
        )
        .expect("string write");
        writeln!(out, "{:<12}{:>10}{:>10}", "true label", "as ID", "as OOD").expect("string write");
        writeln!(
            out,
            "{:<12}{:>10}{:>10}",
            "ID", d.id_accepted, d.id_rejected
        )
        .expect("string write");
        writeln!(
            out,
            "{:<12}{:>10}{:>10}",
            "OOD", d.ood_accepted, d.ood_rejected
        )
        .expect("string write");
        out
    }
}

fn comment_value(comments: &[String], key: &str) -> Option<String> {
    comments
        .iter()
        .flat_map(|c| c.split_whitespace())
        .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .map(str::to_string)
}

/// Metrics on the test scores plus decision counts under τ; writes the
/// text and JSON reports.
pub fn cmd_evaluate(cfg: &PipelineConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let table = load_scores(&cfg.paths.scores_test)?;
    let threshold = load_threshold(&cfg.paths.threshold)?;
    let mut report = evaluate(&table.records)?;
    if cfg.report.baseline {
        let base = load_scores(&cfg.paths.baseline_scores_test)?;
        report.methods.push(method_metrics(
            METHOD_BASELINE,
            &base.records,
            ScoreKind::Rec,
        )?);
    }
    report.dataset_seed = Some(cfg.seed);
    report.weights_digest = comment_value(&table.comments, "weights_sha256");
    let evaluation = Evaluation {
        manifest: Manifest {
            config_sha256: cfg.digest(),
            seed: cfg.seed,
        },
        decisions: decision_counts(&table.records, &threshold),
        report,
    };
    write_string(
        &cfg.paths.report_text,
        &format!("# {}\n{}", cfg.manifest(), evaluation.text()),
    )?;
    let json = serde_json::to_string_pretty(&evaluation).expect("report serializes");
    write_string(&cfg.paths.report_json, &(json + "\n"))?;
    Ok(evaluation)
}

/// Human-readable summary of any artifact, recognized by magic or header.
pub fn inspect(path: &Path, radar: &RadarConfig) -> Result<String> {
    let mut bytes = Vec::new();
    open_file(path)?
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    let mut out = format!(
        "{}: {} bytes, sha256 {}\n",
        path.display(),
        bytes.len(),
        sha256_hex(&bytes)
    );
    let magic = bytes.get(..4).unwrap_or(&[]);
    if magic == b"RADC" {
        let set = read_adc(&bytes[..], radar)?;
        writeln!(
            out,
            "ADC frames: {} of ({}, {}, {}), dataset seed {}\nlabels: {}",
            set.n_frames(),
            radar.n_rx,
            radar.n_c,
            radar.n_s,
            set.seed,
            format_counts(&label_counts(set.labels.iter().copied()))
        )
        .expect("string write");
    } else if magic == b"RDIF" {
        let images = read_rdis(&bytes[..])?;
        writeln!(
            out,
            "range-Doppler images: {}\nlabels: {}",
            images.len(),
            format_counts(&label_counts(images.iter().map(|r| r.label)))
        )
        .expect("string write");
    } else if magic == WEIGHTS_MAGIC {
        let w = read_weights(&bytes[..])?;
        writeln!(
            out,
            "{} autoencoder weights{}, seed {}, {} parameters",
            w.variant()?.name(),
            if w.has_decoder() {
                ""
            } else {
                " (encoder only)"
            },
            w.seed,
            w.param_count()
        )
        .expect("string write");
        for (name, t) in &w.tensors {
            writeln!(out, "  {name:<12} {:?}", t.shape()).expect("string write");
        }
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::Format("unrecognized binary file".into()))?;
        inspect_text(text, &mut out)?;
    }
    Ok(out)
}

fn inspect_text(text: &str, out: &mut String) -> Result<()> {
    let first = text
        .lines()
        .find(|l| !l.starts_with('#') && !l.trim().is_empty())
        .unwrap_or("");
    for c in text.lines().filter_map(|l| l.strip_prefix("# ")) {
        writeln!(out, "{c}").expect("string write");
    }
    if first.trim() == crate::score::SCORE_HEADER {
        let table = read_scores(text.as_bytes())?;
        writeln!(
            out,
            "score table: {} records\nlabels: {}",
            table.records.len(),
            format_counts(&label_counts(table.records.iter().map(|r| r.label)))
        )
        .expect("string write");
    } else if first.trim() == LOSS_HEADER {
        let n = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .count()
            - 1;
        writeln!(out, "loss history: {n} epochs").expect("string write");
    } else if first.trim_start().starts_with('{') {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let keys: Vec<&String> = v
            .as_object()
            .map(|o| o.keys().collect())
            .unwrap_or_default();
        writeln!(out, "JSON object with keys {keys:?}").expect("string write");
    } else {
        let t = read_threshold(text.as_bytes())?;
        writeln!(
            out,
            "threshold: {} tau = {} at quantile {}",
            t.kind, t.value, t.quantile
        )
        .expect("string write");
    }
    Ok(())
}
