//! Resumable exhaustion of all length-3 decompositions of `h`.
//!
//! The four shapes `(1,3)³`, `(1,3)²(2,2)`, `(1,3)(2,2)²` and `(2,2)³` are
//! searched in order. Each shape's first-factor range is cut into chunks;
//! after every chunk the progress is written to a JSON checkpoint, so an
//! interrupted run resumes where it stopped. Exhausting length 3 also rules
//! out lengths 1 and 2, since a shorter decomposition extends to a length-3
//! tuple whose extra cofactors vanish.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::arith::Field;
use crate::strength::{
    Certificate, DegreeSplitShape, Exhaustion, Mode, Quantity, SearchPlan, SearchReport, SearchStats,
};
use crate::textio::print_poly;

use super::{build_h, paper_ring, PaperError};

const VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub field: Field,
    pub checkpoint: PathBuf,
    /// Indices into the four shapes; `None` searches all of them.
    pub shapes: Option<Vec<usize>>,
    /// First-factor indices per chunk.
    pub chunk_size: u64,
    pub workers: usize,
    /// Stop once the projected total time exceeds this.
    pub budget: Option<Duration>,
    /// Required for fields other than GF(2).
    pub confirm: bool,
    /// Stop after this many chunks in this session.
    pub max_chunks: Option<usize>,
}

impl CampaignConfig {
    pub fn new(checkpoint: impl Into<PathBuf>) -> CampaignConfig {
        CampaignConfig {
            field: Field::Prime(2),
            checkpoint: checkpoint.into(),
            shapes: None,
            chunk_size: 1,
            workers: 1,
            budget: None,
            confirm: false,
            max_chunks: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeProgress {
    pub shape: String,
    pub first_level: u64,
    /// Next first-factor index to search.
    pub next: u64,
    pub tuples: u64,
    pub nodes: u64,
    /// Total normalized tuples of the shape, in decimal.
    pub total_tuples: String,
}

impl ShapeProgress {
    pub fn is_done(&self) -> bool {
        self.next >= self.first_level
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Found {
    shape: usize,
    picks: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    field: String,
    target: String,
    chunk_size: u64,
    shapes: Vec<ShapeProgress>,
    found: Option<Found>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignStatus {
    /// Every selected shape was searched without a solution.
    Completed,
    /// A length-3 decomposition was found and verified.
    CounterexampleFound,
    /// The projected running time exceeds the budget.
    BudgetExceeded,
    /// The per-session chunk limit was reached.
    Paused,
}

#[derive(Debug, Clone)]
pub struct CampaignOutcome {
    pub status: CampaignStatus,
    /// Present when all four shapes are done or a certificate was found.
    pub report: Option<SearchReport>,
    pub progress: Vec<ShapeProgress>,
    pub remaining_tuples: u128,
    pub eta_seconds: Option<f64>,
    pub elapsed: Duration,
}

fn load(path: &Path) -> Result<Option<Checkpoint>, PaperError> {
    match fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| PaperError::CheckpointCorrupt(e.to_string())),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(PaperError::Io(e.to_string())),
    }
}

fn save(path: &Path, cp: &Checkpoint) -> Result<(), PaperError> {
    let tmp = path.with_extension("tmp");
    let text = serde_json::to_string_pretty(cp).expect("checkpoint serializes");
    fs::write(&tmp, text).map_err(|e| PaperError::Io(e.to_string()))?;
    fs::rename(&tmp, path).map_err(|e| PaperError::Io(e.to_string()))
}

fn remaining(cp: &Checkpoint) -> u128 {
    cp.shapes
        .iter()
        .map(|s| {
            let total: u128 = s.total_tuples.parse().unwrap_or(u128::MAX);
            total.saturating_sub(s.tuples as u128)
        })
        .sum()
}

/// Runs or resumes the length-3 exhaustion for `h` over `config.field`.
pub fn campaign_full(config: &CampaignConfig) -> Result<CampaignOutcome, PaperError> {
    let start = Instant::now();
    let ring = paper_ring(config.field, false);
    let h = build_h(&ring);
    let plan = SearchPlan::new(&h)?;
    let all: Vec<DegreeSplitShape> = plan.shapes(3);
    let selected: Vec<usize> = match &config.shapes {
        Some(idx) => {
            let mut idx = idx.clone();
            idx.sort_unstable();
            idx.dedup();
            if idx.iter().any(|&i| i >= all.len()) {
                return Err(PaperError::Io(format!("shape index out of range 0..{}", all.len())));
            }
            idx
        }
        None => (0..all.len()).collect(),
    };
    let shapes: Vec<&DegreeSplitShape> = selected.iter().map(|&i| &all[i]).collect();
    let fresh = Checkpoint {
        version: VERSION,
        field: config.field.to_string(),
        target: print_poly(&h),
        chunk_size: config.chunk_size.max(1),
        shapes: shapes
            .iter()
            .map(|s| {
                Ok(ShapeProgress {
                    shape: s.to_string(),
                    first_level: plan.first_level_count(s)?,
                    next: 0,
                    tuples: 0,
                    nodes: 0,
                    total_tuples: plan.tuple_count(s).map_or("overflow".into(), |n| n.to_string()),
                })
            })
            .collect::<Result<_, PaperError>>()?,
        found: None,
    };
    if config.field != Field::Prime(2) && !config.confirm {
        return Err(PaperError::ConfirmationRequired {
            field: config.field.to_string(),
            projected: remaining(&fresh).to_string(),
        });
    }
    let mut cp = match load(&config.checkpoint)? {
        Some(old) => {
            let compatible = old.version == fresh.version
                && old.field == fresh.field
                && old.target == fresh.target
                && old.chunk_size == fresh.chunk_size
                && old.shapes.len() == fresh.shapes.len()
                && old.shapes.iter().zip(&fresh.shapes).all(|(a, b)| {
                    a.shape == b.shape
                        && a.first_level == b.first_level
                        && a.total_tuples == b.total_tuples
                        && a.next <= a.first_level
                });
            if !compatible {
                return Err(PaperError::CheckpointCorrupt(
                    "checkpoint does not match this campaign configuration".into(),
                ));
            }
            old
        }
        None => fresh,
    };

    let finish = |cp: &Checkpoint, status: CampaignStatus, eta: Option<f64>| -> Result<CampaignOutcome, PaperError> {
        let mut stats = SearchStats {
            workers: config.workers.max(1),
            elapsed_ms: start.elapsed().as_millis() as u64,
            ..SearchStats::default()
        };
        for s in &cp.shapes {
            stats.nodes += s.nodes;
            stats.tuples += s.tuples;
        }
        let report = match (&cp.found, status) {
            (Some(found), _) => {
                let dec = plan.certificate(shapes[found.shape], &found.picks)?;
                Some(SearchReport {
                    quantity: Quantity::Strength,
                    field: cp.field.clone(),
                    mode: Mode::UpperOnly,
                    lower: 1,
                    upper: Some(dec.len()),
                    certificate: Certificate::Decomposition(dec),
                    exhausted: vec![],
                    stats,
                })
            }
            (None, CampaignStatus::Completed) if cp.shapes.len() == all.len() => Some(SearchReport {
                quantity: Quantity::Strength,
                field: cp.field.clone(),
                mode: Mode::ExhaustedBelow,
                lower: 4,
                upper: None,
                certificate: Certificate::None,
                exhausted: vec![Exhaustion {
                    r: 3,
                    shapes: cp.shapes.iter().map(|s| s.shape.clone()).collect(),
                    tuples: cp.shapes.iter().map(|s| s.tuples).sum(),
                }],
                stats,
            }),
            _ => None,
        };
        Ok(CampaignOutcome {
            status,
            report,
            progress: cp.shapes.clone(),
            remaining_tuples: remaining(cp),
            eta_seconds: eta,
            elapsed: start.elapsed(),
        })
    };

    if cp.found.is_some() {
        return finish(&cp, CampaignStatus::CounterexampleFound, None);
    }
    save(&config.checkpoint, &cp)?;
    let mut chunks = 0usize;
    let mut session_tuples: u64 = 0;
    for si in 0..cp.shapes.len() {
        while !cp.shapes[si].is_done() {
            if config.max_chunks.is_some_and(|m| chunks >= m) {
                return finish(&cp, CampaignStatus::Paused, eta(start, session_tuples, &cp));
            }
            let a = cp.shapes[si].next;
            let b = (a + cp.chunk_size).min(cp.shapes[si].first_level);
            let cancel = AtomicBool::new(false);
            let out = plan.search_range(shapes[si], a..b, config.workers, &cancel);
            chunks += 1;
            session_tuples += out.tuples;
            let progress = &mut cp.shapes[si];
            progress.tuples += out.tuples;
            progress.nodes += out.nodes;
            if let Some(picks) = out.found {
                cp.found = Some(Found { shape: si, picks });
                save(&config.checkpoint, &cp)?;
                return finish(&cp, CampaignStatus::CounterexampleFound, None);
            }
            progress.next = b;
            save(&config.checkpoint, &cp)?;
            if let (Some(budget), Some(secs)) = (config.budget, eta(start, session_tuples, &cp)) {
                if start.elapsed().as_secs_f64() + secs > budget.as_secs_f64() {
                    return finish(&cp, CampaignStatus::BudgetExceeded, Some(secs));
                }
            }
        }
    }
    finish(&cp, CampaignStatus::Completed, Some(0.0))
}

/// Seconds left at the session's tuple rate.
fn eta(start: Instant, session_tuples: u64, cp: &Checkpoint) -> Option<f64> {
    let secs = start.elapsed().as_secs_f64();
    if session_tuples == 0 || secs <= 0.0 {
        return None;
    }
    Some(remaining(cp) as f64 / (session_tuples as f64 / secs))
}

impl CampaignOutcome {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "status": self.status,
            "progress": self.progress,
            "remaining_tuples": self.remaining_tuples.to_string(),
            "result": self.report.as_ref().map(|r| r.result_json()),
            "certificate": self.report.as_ref().map(|r| r.certificate_json()),
        })
    }
}
