//! Synthetic stand-in for the seeded-growth nanorod dataset.
//!
//! Recipes are drawn uniformly from the experimental feature box and mapped to
//! rod dimensions by a fixed smooth function:
//!
//! ```text
//! e = (core_edge_nm - 489) / 81          in [0, 1]
//! c = (core_amount_nmol - 10) / 50       in [0, 1]
//! s = (s_amount_mg - 20) / 60            in [0, 1]
//! width_nm     = 4 + 1.2 s + 0.4 e + 0.4 c
//! aspect_ratio = 6.1 * 5^(1 - c) * (0.97 + 0.06 e)
//! length_nm    = aspect_ratio * width_nm
//! ```
//!
//! More core seeds give shorter rods; at mid-range core size the aspect ratio
//! runs from 30.5 (10 nmol) down to 6.1 (60 nmol). Width is driven mostly by
//! the sulfur amount.

use std::path::Path;

use rand::Rng;

use super::{Dataset, Sample, Table};
use crate::error::{Error, Result};
use crate::numfmt::format_sig;
use crate::seed;

pub const FEATURE_COLUMNS: [&str; 3] = ["core_edge_nm", "core_amount_nmol", "s_amount_mg"];

pub const CORE_EDGE_RANGE: (f64, f64) = (489.0, 570.0);
pub const CORE_AMOUNT_RANGE: (f64, f64) = (10.0, 60.0);
pub const S_AMOUNT_RANGE: (f64, f64) = (20.0, 80.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NanorodTarget {
    Length,
    Width,
    AspectRatio,
}

impl NanorodTarget {
    pub const ALL: [NanorodTarget; 3] = [Self::Length, Self::Width, Self::AspectRatio];

    pub fn column(self) -> &'static str {
        match self {
            Self::Length => "length_nm",
            Self::Width => "width_nm",
            Self::AspectRatio => "aspect_ratio",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NanorodRecord {
    pub core_edge_nm: f64,
    pub core_amount_nmol: f64,
    pub s_amount_mg: f64,
    pub length_nm: f64,
    pub width_nm: f64,
    pub aspect_ratio: f64,
}

impl NanorodRecord {
    pub fn features(&self) -> [f64; 3] {
        [self.core_edge_nm, self.core_amount_nmol, self.s_amount_mg]
    }

    pub fn target(&self, target: NanorodTarget) -> f64 {
        match target {
            NanorodTarget::Length => self.length_nm,
            NanorodTarget::Width => self.width_nm,
            NanorodTarget::AspectRatio => self.aspect_ratio,
        }
    }
}

fn unit(v: f64, (lo, hi): (f64, f64)) -> f64 {
    (v - lo) / (hi - lo)
}

/// Noise-free `(length_nm, width_nm, aspect_ratio)` for one recipe.
pub fn ground_truth(core_edge_nm: f64, core_amount_nmol: f64, s_amount_mg: f64) -> (f64, f64, f64) {
    let e = unit(core_edge_nm, CORE_EDGE_RANGE);
    let c = unit(core_amount_nmol, CORE_AMOUNT_RANGE);
    let s = unit(s_amount_mg, S_AMOUNT_RANGE);
    let width = 4.0 + 1.2 * s + 0.4 * e + 0.4 * c;
    let aspect = 6.1 * 5f64.powf(1.0 - c) * (0.97 + 0.06 * e);
    (aspect * width, width, aspect)
}

pub fn synth_records(n: usize, seed: u64) -> Result<Vec<NanorodRecord>> {
    if n < 1 {
        return Err(Error::config("benchmark needs at least one sample"));
    }
    let mut rng = seed::rng(seed);
    Ok((0..n)
        .map(|_| {
            let core_edge_nm = rng.random_range(CORE_EDGE_RANGE.0..=CORE_EDGE_RANGE.1);
            let core_amount_nmol = rng.random_range(CORE_AMOUNT_RANGE.0..=CORE_AMOUNT_RANGE.1);
            let s_amount_mg = rng.random_range(S_AMOUNT_RANGE.0..=S_AMOUNT_RANGE.1);
            let (length_nm, width_nm, aspect_ratio) =
                ground_truth(core_edge_nm, core_amount_nmol, s_amount_mg);
            NanorodRecord {
                core_edge_nm,
                core_amount_nmol,
                s_amount_mg,
                length_nm,
                width_nm,
                aspect_ratio,
            }
        })
        .collect())
}

/// Benchmark rows with one of the three rod dimensions as the target.
pub fn synth_benchmark(n: usize, seed: u64, target: NanorodTarget) -> Result<Dataset> {
    let samples = synth_records(n, seed)?
        .iter()
        .map(|r| Sample::original(r.features().to_vec(), r.target(target)))
        .collect();
    Dataset::new(
        FEATURE_COLUMNS.iter().map(|s| s.to_string()).collect(),
        target.column(),
        samples,
    )
}

/// Canonical schema: three recipe columns then all three dimension columns.
pub fn write_records_csv(records: &[NanorodRecord], path: impl AsRef<Path>) -> Result<()> {
    let headers = FEATURE_COLUMNS
        .iter()
        .copied()
        .chain(NanorodTarget::ALL.iter().map(|t| t.column()))
        .map(String::from)
        .collect();
    let rows = records
        .iter()
        .map(|r| {
            [
                r.core_edge_nm,
                r.core_amount_nmol,
                r.s_amount_mg,
                r.length_nm,
                r.width_nm,
                r.aspect_ratio,
            ]
            .iter()
            .map(|&v| format_sig(v, 17))
            .collect()
        })
        .collect();
    Table { headers, rows }.write(path)
}
