//! Attractor atlases over a grid of couplings and starting states.
//!
//! Every cell is classified independently on a fixed-size worker pool and the
//! records are ordered by cell index afterwards, so the output depends only on
//! the [`SweepSpec`] and never on the number of workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{observe, AttractorClass, AttractorTag, ClassifyOptions};
use crate::dynamics::{ConflictAlpha, CoupledState, ModelParams};
use crate::error::{Error, Region, Result};

/// `count` evenly spaced values from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridRange {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        let range = GridRange { lo, hi, count };
        range.validate("range")?;
        Ok(range)
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.count == 0 || !(self.lo <= self.hi) || !self.lo.is_finite() || !self.hi.is_finite()
        {
            return Err(Error::invalid(
                what,
                format!("need finite lo <= hi and count >= 1, got {self:?}"),
            ));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeedGrid {
    /// `(P1, P2, R1, R2)` starting states.
    Explicit(Vec<[f64; 4]>),
    /// Rectangular grid over region A's prey and predator with region B fixed.
    Rectangular {
        prey: GridRange,
        predator: GridRange,
        region_b: [f64; 2],
    },
}

impl SeedGrid {
    pub fn seeds(&self) -> Vec<[f64; 4]> {
        match self {
            SeedGrid::Explicit(seeds) => seeds.clone(),
            SeedGrid::Rectangular {
                prey,
                predator,
                region_b,
            } => prey
                .values()
                .flat_map(|x| {
                    predator
                        .values()
                        .map(move |y| [x, y, region_b[0], region_b[1]])
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub params: ModelParams,
    pub alpha_range: GridRange,
    pub seeds: SeedGrid,
    pub classify: ClassifyOptions,
    pub workers: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.alpha_range.validate("alpha range")?;
        if let SeedGrid::Rectangular { prey, predator, .. } = &self.seeds {
            prey.validate("prey range")?;
            predator.validate("predator range")?;
        }
        if self.seeds.seeds().is_empty() {
            return Err(Error::invalid("seeds", "grid is empty"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        Ok(())
    }
}

/// Tag-specific scalars of an atlas cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellDetail {
    FixedPoint { point: [f64; 4] },
    Cycle { lag: usize, extent: f64 },
    Divergent { step: u64 },
    Extinct { region: Region },
    Undetermined { note: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasRecord {
    pub cell: usize,
    pub alpha: f64,
    pub seed: [f64; 4],
    pub class: AttractorTag,
    pub detail: CellDetail,
}

impl AtlasRecord {
    fn from_class(cell: usize, alpha: f64, seed: [f64; 4], class: &AttractorClass) -> Self {
        let detail = match class {
            AttractorClass::FixedPoint { point } => CellDetail::FixedPoint { point: *point },
            AttractorClass::Cycle { lag, extent, .. } => CellDetail::Cycle {
                lag: *lag,
                extent: *extent,
            },
            AttractorClass::Divergent { step } => CellDetail::Divergent { step: *step },
            AttractorClass::Extinct { region } => CellDetail::Extinct { region: *region },
            AttractorClass::Undetermined => CellDetail::Undetermined { note: None },
        };
        AtlasRecord {
            cell,
            alpha,
            seed,
            class: class.tag(),
            detail,
        }
    }

    fn failed(cell: usize, alpha: f64, seed: [f64; 4], err: &Error) -> Self {
        AtlasRecord {
            cell,
            alpha,
            seed,
            class: AttractorTag::Undetermined,
            detail: CellDetail::Undetermined {
                note: Some(err.to_string()),
            },
        }
    }
}

/// Classifies one cell; failures become `Undetermined` records carrying the error.
pub fn classify_cell(
    params: &ModelParams,
    opts: &ClassifyOptions,
    cell: usize,
    alpha: f64,
    seed: [f64; 4],
) -> AtlasRecord {
    let outcome = ConflictAlpha::new(alpha).and_then(|al| {
        let state = CoupledState::from_array(seed)?;
        observe(&state, params, al, opts)
    });
    match outcome {
        Ok(obs) => AtlasRecord::from_class(cell, alpha, seed, &obs.class),
        Err(e) => AtlasRecord::failed(cell, alpha, seed, &e),
    }
}

/// Classifies every `(alpha, seed)` cell. Cell `i * seeds + j` holds alpha
/// value `i` and seed `j`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<AtlasRecord>> {
    spec.validate()?;
    let seeds = spec.seeds.seeds();
    let alphas: Vec<f64> = spec.alpha_range.values().collect();
    let total = alphas.len() * seeds.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let records: Vec<AtlasRecord> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|cell| {
                let alpha = alphas[cell / seeds.len()];
                let seed = seeds[cell % seeds.len()];
                classify_cell(&spec.params, &spec.classify, cell, alpha, seed)
            })
            .collect()
    });
    merge_partial(vec![records])
}

/// Merges partial record lists into one list sorted by cell index. The cell
/// indices must cover `0..total` exactly once.
pub fn merge_partial(partials: Vec<Vec<AtlasRecord>>) -> Result<Vec<AtlasRecord>> {
    let mut merged: Vec<AtlasRecord> = partials.into_iter().flatten().collect();
    merged.sort_by_key(|r| r.cell);
    for (expected, record) in merged.iter().enumerate() {
        if record.cell != expected {
            let what = if record.cell < expected {
                "duplicate"
            } else {
                "missing"
            };
            let idx = if record.cell < expected {
                record.cell
            } else {
                expected
            };
            return Err(Error::Integrity(format!("{what} cell index {idx}")));
        }
    }
    Ok(merged)
}
