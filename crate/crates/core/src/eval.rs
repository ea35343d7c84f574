//! ROC-AUC, method dispatch and the timing harness.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::anoedge::{AnoEdgeG, AnoEdgeL};
use crate::anograph::{AnoGraph, AnoGraphK};
use crate::error::{Error, Result};
use crate::stream_io::{label_snapshots, window_graphs};
use crate::{EdgeRecord, EdgeScorer, GraphScorer};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoredItem {
    pub score: f64,
    pub label: bool,
}

/// Zips scores with labels, checking lengths and finiteness.
pub fn scored_items(scores: &[f64], labels: &[bool]) -> Result<Vec<ScoredItem>> {
    if scores.len() != labels.len() {
        return Err(Error::Alignment {
            items: scores.len(),
            labels: labels.len(),
        });
    }
    scores
        .iter()
        .zip(labels)
        .map(|(&score, &label)| {
            if score.is_finite() {
                Ok(ScoredItem { score, label })
            } else {
                Err(Error::NonFiniteScore(score))
            }
        })
        .collect()
}

/// Area under the ROC curve from the Mann-Whitney rank statistic, with tied
/// scores given their average rank.
pub fn roc_auc(items: &[ScoredItem]) -> Result<f64> {
    if let Some(bad) = items.iter().find(|i| !i.score.is_finite()) {
        return Err(Error::NonFiniteScore(bad.score));
    }
    let positives = items.iter().filter(|i| i.label).count();
    let negatives = items.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateLabels);
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_unstable_by(|&a, &b| items[a].score.total_cmp(&items[b].score));

    let mut positive_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && items[order[j]].score == items[order[i]].score {
            j += 1;
        }
        // ranks i+1 ..= j share their mean
        let midrank = (i + 1 + j) as f64 / 2.0;
        let pos_in_group = order[i..j].iter().filter(|&&k| items[k].label).count();
        positive_rank_sum += midrank * pos_in_group as f64;
        i = j;
    }
    let p = positives as f64;
    let n = negatives as f64;
    Ok((positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    AnoEdgeG,
    AnoEdgeL,
    AnoGraph,
    AnoGraphK,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::AnoEdgeG,
        Method::AnoEdgeL,
        Method::AnoGraph,
        Method::AnoGraphK,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Method::AnoEdgeG => "anoedge-g",
            Method::AnoEdgeL => "anoedge-l",
            Method::AnoGraph => "anograph",
            Method::AnoGraphK => "anograph-k",
        }
    }

    /// Whether the method scores snapshots rather than edges.
    pub fn is_graph(self) -> bool {
        matches!(self, Method::AnoGraph | Method::AnoGraphK)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Everything a scoring run needs besides the input stream.
#[derive(Clone, Debug, PartialEq)]
pub struct RunParams {
    pub rows: usize,
    pub buckets: usize,
    pub decay: f64,
    pub k: usize,
    pub window_ticks: u64,
    pub edge_threshold: usize,
    pub seed: u64,
    pub undirected: bool,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            rows: 2,
            buckets: 32,
            decay: 0.9,
            k: 5,
            window_ticks: 60,
            edge_threshold: 100,
            seed: 0,
            undirected: false,
        }
    }
}

pub fn edge_scorer(method: Method, p: &RunParams) -> Result<Box<dyn EdgeScorer>> {
    Ok(match method {
        Method::AnoEdgeG => Box::new(AnoEdgeG::new(p.rows, p.buckets, p.decay, p.seed)?),
        Method::AnoEdgeL => Box::new(AnoEdgeL::new(p.rows, p.buckets, p.decay, p.seed)?),
        other => {
            return Err(Error::UnknownMethod(format!(
                "{other} is not an edge scorer"
            )))
        }
    })
}

pub fn graph_scorer(method: Method, p: &RunParams) -> Result<Box<dyn GraphScorer>> {
    Ok(match method {
        Method::AnoGraph => Box::new(AnoGraph::new(p.rows, p.buckets, p.seed)?),
        Method::AnoGraphK => Box::new(AnoGraphK::new(p.rows, p.buckets, p.k, p.seed)?),
        other => {
            return Err(Error::UnknownMethod(format!(
                "{other} is not a graph scorer"
            )))
        }
    })
}

/// Output of a single scoring pass.
#[derive(Clone, Debug)]
pub struct RunOutput {
    /// One score per edge, or one per snapshot for graph methods.
    pub scores: Vec<f64>,
    /// Labels aligned with `scores`, when edge labels were supplied.
    pub labels: Option<Vec<bool>>,
    /// Wall-clock time of the scoring loop alone.
    pub runtime: Duration,
    pub peak_state_bytes: usize,
}

impl RunOutput {
    pub fn auc(&self) -> Option<Result<f64>> {
        self.labels
            .as_ref()
            .map(|l| scored_items(&self.scores, l).and_then(|items| roc_auc(&items)))
    }
}

/// Runs `method` over `edges` once. Windowing, label joining and undirected
/// expansion happen before the clock starts.
pub fn run_method(
    method: Method,
    edges: &[EdgeRecord],
    labels: Option<&[bool]>,
    params: &RunParams,
) -> Result<RunOutput> {
    if let Some(l) = labels {
        if l.len() != edges.len() {
            return Err(Error::Alignment {
                items: edges.len(),
                labels: l.len(),
            });
        }
    }
    if method.is_graph() {
        let mut snapshots = window_graphs(edges, params.window_ticks)?;
        let snapshot_labels = match labels {
            Some(l) => {
                snapshots = label_snapshots(snapshots, l, params.edge_threshold)?;
                Some(snapshots.iter().map(|s| s.label == Some(true)).collect())
            }
            None => None,
        };
        if params.undirected {
            for s in &mut snapshots {
                let reversed: Vec<EdgeRecord> = s.edges.iter().map(EdgeRecord::reversed).collect();
                s.edges.extend(reversed);
            }
        }
        let mut scorer = graph_scorer(method, params)?;
        let mut scores = Vec::with_capacity(snapshots.len());
        let mut peak = scorer.footprint_bytes();
        let clock = Instant::now();
        for s in &snapshots {
            scores.push(scorer.score_graph(s)?);
            peak = peak.max(scorer.footprint_bytes());
        }
        let runtime = clock.elapsed();
        Ok(RunOutput {
            scores,
            labels: snapshot_labels,
            runtime,
            peak_state_bytes: peak,
        })
    } else {
        let mut scorer = edge_scorer(method, params)?;
        let mut scores = Vec::with_capacity(edges.len());
        let mut peak = scorer.footprint_bytes();
        let clock = Instant::now();
        for e in edges {
            let s = if params.undirected {
                let forward = scorer.score_edge(e)?;
                forward.max(scorer.score_edge(&e.reversed())?)
            } else {
                scorer.score_edge(e)?
            };
            scores.push(s);
            peak = peak.max(scorer.footprint_bytes());
        }
        let runtime = clock.elapsed();
        Ok(RunOutput {
            scores,
            labels: labels.map(<[bool]>::to_vec),
            runtime,
            peak_state_bytes: peak,
        })
    }
}

/// Mean and sample standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub method: Method,
    pub auc: Option<Summary>,
    pub runtime_seconds: Summary,
    pub peak_state_bytes: usize,
    /// Scores from the first repeat.
    pub scores: Vec<f64>,
}

/// Runs `method` `repeats` times, with hash seeds `seed, seed + 1, ...`.
pub fn run_benchmark(
    method: Method,
    edges: &[EdgeRecord],
    labels: Option<&[bool]>,
    params: &RunParams,
    repeats: usize,
) -> Result<BenchReport> {
    let repeats = repeats.max(1);
    let mut aucs = Vec::new();
    let mut times = Vec::with_capacity(repeats);
    let mut peak = 0;
    let mut first_scores = None;
    for r in 0..repeats {
        let p = RunParams {
            seed: params.seed.wrapping_add(r as u64),
            ..params.clone()
        };
        let out = run_method(method, edges, labels, &p)?;
        if let Some(auc) = out.auc() {
            aucs.push(auc?);
        }
        times.push(out.runtime.as_secs_f64());
        peak = peak.max(out.peak_state_bytes);
        if first_scores.is_none() {
            first_scores = Some(out.scores);
        }
    }
    Ok(BenchReport {
        method,
        auc: (!aucs.is_empty()).then(|| Summary::of(&aucs)),
        runtime_seconds: Summary::of(&times),
        peak_state_bytes: peak,
        scores: first_scores.unwrap_or_default(),
    })
}

pub const RESULTS_HEADER: &str =
    "method,dataset,n_r,n_b,decay,K,window,threshold,auc_mean,auc_std,runtime_s";

/// One CSV results row matching [`RESULTS_HEADER`]. Missing AUC is left
/// blank.
pub fn results_row(report: &BenchReport, dataset: &str, params: &RunParams) -> String {
    let (auc_mean, auc_std) = match report.auc {
        Some(s) => (format!("{:.6}", s.mean), format!("{:.6}", s.std)),
        None => (String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{:.6}",
        report.method,
        dataset,
        params.rows,
        params.buckets,
        params.decay,
        params.k,
        params.window_ticks,
        params.edge_threshold,
        auc_mean,
        auc_std,
        report.runtime_seconds.mean
    )
}
