//! Operation-count predictions and wall-clock benchmarks for the 2D transforms.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::array::NdArray;
use crate::error::{Result, SwdftError};
use crate::memory::{MemoryBudget, MemoryPlan};
use crate::oracle::{swdft_2d_naive_budgeted, swfft_2d_budgeted};
use crate::probe::OpCounter;
use crate::schedule::level_geometry;
use crate::tree2d::{tree_swdft_2d_with, TreeOptions};
use crate::window::WindowSpec;
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Naive,
    Swfft,
    Tree,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Naive, Algorithm::Swfft, Algorithm::Tree];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Swfft => "swfft",
            Algorithm::Tree => "tree",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = SwdftError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| SwdftError::Shape(format!("unknown algorithm {s:?}")))
    }
}

/// Predicted operation count for a full run over an array of extents `dims`.
///
/// Tree: one per node over every level and every position holding that level.
/// Naive: one kernel multiply-add per input sample per coefficient.
/// Swfft: `n/2 log2 n` butterflies per window, `n` the window length.
pub fn predict_ops(algorithm: Algorithm, dims: &[usize], window: &WindowSpec) -> Result<u64> {
    window.check_fits(dims)?;
    let windows: u64 = window.positions(dims)?.iter().map(|&p| p as u64).product();
    let len = window.window_len() as u64;
    Ok(match algorithm {
        Algorithm::Naive => windows * len * len,
        Algorithm::Swfft => windows * (len / 2) * u64::from(window.total_levels()),
        Algorithm::Tree => {
            let mut total = 0;
            for level in 1..=window.total_levels() {
                let g = level_geometry(level, window)?;
                total += (1u64 << level) * g.valid_positions(dims) as u64;
            }
            total
        }
    })
}

/// Operations spent on one interior window by the tree algorithm.
pub fn tree_ops_per_window(window: &WindowSpec) -> u64 {
    2 * (window.window_len() as u64 - 1)
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub dims: [usize; 2],
    pub windows: Vec<[usize; 2]>,
    pub algorithms: Vec<Algorithm>,
    pub repetitions: usize,
    pub seed: u64,
    pub budget: MemoryBudget,
    /// Skip runs whose predicted count exceeds this (naive only).
    pub max_naive_ops: Option<u64>,
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            dims: [100, 100],
            windows: [4, 8, 16, 32, 64].into_iter().map(|n| [n, n]).collect(),
            algorithms: Algorithm::ALL.to_vec(),
            repetitions: 5,
            seed: 0x5eed,
            budget: MemoryBudget::default(),
            max_naive_ops: None,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub dims: [usize; 2],
    pub window: [usize; 2],
    /// Median wall time; `None` when skipped.
    pub seconds: Option<f64>,
    pub ops: u64,
    pub peak_bytes: u64,
    pub skipped: Option<String>,
}

/// Complex values with both parts uniform in `[-1, 1)`, reproducible from `seed`.
pub fn random_array(dims: &[usize], seed: u64) -> NdArray {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = dims.iter().product();
    let data = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    NdArray::from_vec(dims, data).expect("length matches extents")
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len().is_multiple_of(2) {
        (xs[mid - 1] + xs[mid]) / 2.0
    } else {
        xs[mid]
    }
}

fn run_one(
    x: &NdArray,
    spec: &WindowSpec,
    algorithm: Algorithm,
    config: &BenchConfig,
) -> Result<BenchRecord> {
    let predicted = predict_ops(algorithm, x.dims(), spec)?;
    let plan = match algorithm {
        Algorithm::Tree => MemoryPlan::tree(x.dims(), spec)?,
        _ => MemoryPlan::output_only(x.dims(), spec)?,
    };
    let mut record = BenchRecord {
        algorithm,
        dims: [x.dims()[0], x.dims()[1]],
        window: [spec.size(0), spec.size(1)],
        seconds: None,
        ops: predicted,
        peak_bytes: plan.total_bytes(),
        skipped: None,
    };
    if let Err(e) = plan.check(config.budget) {
        record.skipped = Some(e.to_string());
        return Ok(record);
    }
    if let (Algorithm::Naive, Some(cap)) = (algorithm, config.max_naive_ops) {
        if predicted > cap {
            record.skipped = Some(format!(
                "predicted {predicted} operations exceeds cap {cap}"
            ));
            return Ok(record);
        }
    }
    let options = TreeOptions {
        budget: config.budget,
        parallel: config.parallel,
        ..TreeOptions::default()
    };
    let mut times = Vec::with_capacity(config.repetitions);
    for _ in 0..config.repetitions.max(1) {
        let start = Instant::now();
        match algorithm {
            Algorithm::Naive => drop(swdft_2d_naive_budgeted(x, spec, config.budget)?),
            Algorithm::Swfft => drop(swfft_2d_budgeted(x, spec, config.budget)?),
            Algorithm::Tree => {
                let mut counter = OpCounter::new();
                let out = tree_swdft_2d_with(x, spec, &options, &mut counter)?;
                drop(out);
                if counter.total() != predicted {
                    return Err(SwdftError::State(format!(
                        "tree counted {} operations, predicted {predicted}",
                        counter.total()
                    )));
                }
                record.peak_bytes = counter.peak_bytes() + plan.output_bytes();
            }
        }
        times.push(start.elapsed().as_secs_f64());
    }
    record.seconds = Some(median(times));
    Ok(record)
}

/// One record per (algorithm, window), ordered by algorithm then window.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let x = random_array(&config.dims, config.seed);
    let mut algorithms = config.algorithms.clone();
    algorithms.sort();
    algorithms.dedup();
    let mut windows = config.windows.clone();
    windows.sort_by_key(|w| (w[0] * w[1], *w));
    let mut records = Vec::new();
    for &algorithm in &algorithms {
        for w in &windows {
            let spec = WindowSpec::from_sizes(w)?;
            records.push(run_one(&x, &spec, algorithm, config)?);
        }
    }
    Ok(records)
}

pub const CSV_HEADER: [&str; 8] = [
    "algorithm",
    "N0",
    "N1",
    "n0",
    "n1",
    "seconds",
    "ops",
    "peak_bytes",
];

/// Skipped records leave `seconds` empty.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.algorithm.id().to_string(),
            r.dims[0].to_string(),
            r.dims[1].to_string(),
            r.window[0].to_string(),
            r.window[1].to_string(),
            r.seconds.map(|s| format!("{s:.9}")).unwrap_or_default(),
            r.ops.to_string(),
            r.peak_bytes.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n0: usize, n1: usize) -> WindowSpec {
        WindowSpec::from_sizes(&[n0, n1]).unwrap()
    }

    #[test]
    fn per_window_counts() {
        assert_eq!(tree_ops_per_window(&spec(2, 2)), 6);
        assert_eq!(tree_ops_per_window(&spec(32, 32)), 2046);
        assert_eq!(tree_ops_per_window(&spec(1, 1)), 0);
        assert_eq!(
            predict_ops(Algorithm::Tree, &[9, 9], &spec(1, 1)).unwrap(),
            0
        );
    }

    #[test]
    fn closed_forms() {
        let s = spec(4, 8);
        // 17 x 13 windows
        assert_eq!(
            predict_ops(Algorithm::Naive, &[20, 20], &s).unwrap(),
            17 * 13 * 32 * 32
        );
        assert_eq!(
            predict_ops(Algorithm::Swfft, &[20, 20], &s).unwrap(),
            17 * 13 * 16 * 5
        );
        assert!(predict_ops(Algorithm::Tree, &[3, 20], &s).is_err());
    }

    #[test]
    fn tree_prediction_splits_into_interior_and_boundary() {
        let s = spec(32, 32);
        let total = predict_ops(Algorithm::Tree, &[431, 431], &s).unwrap();
        let interior = 400 * 400 * 2046;
        assert!(total > interior);
        // every level-l node is either in an interior window's tree or in a
        // truncated tree along the first n-1 rows or columns
        let mut boundary = 0u64;
        for level in 1..=10u32 {
            let g = level_geometry(level, &s).unwrap();
            boundary += (1u64 << level) * (g.valid_positions(&[431, 431]) as u64 - 400 * 400);
        }
        assert_eq!(total, interior + boundary);
    }

    #[test]
    fn loglog_slope_recovers_exponent() {
        let pts: Vec<(f64, f64)> = (1..6)
            .map(|i| (i as f64, 3.0 * (i as f64).powf(1.7)))
            .collect();
        assert!((loglog_slope(&pts).unwrap() - 1.7).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
    }

    #[test]
    fn minimal_run_and_csv() {
        let config = BenchConfig {
            dims: [20, 20],
            windows: vec![[8, 8], [2, 2], [4, 4]],
            repetitions: 1,
            max_naive_ops: Some(100_000),
            ..BenchConfig::default()
        };
        let records = run_bench(&config).unwrap();
        assert_eq!(records.len(), 9);
        let order: Vec<(&str, usize)> = records
            .iter()
            .map(|r| (r.algorithm.id(), r.window[0]))
            .collect();
        assert_eq!(
            order[..4],
            [("naive", 2), ("naive", 4), ("naive", 8), ("swfft", 2)]
        );
        let naive8 = &records[2];
        assert!(naive8.seconds.is_none() && naive8.skipped.is_some());
        for r in &records[3..] {
            assert!(r.seconds.unwrap() > 0.0);
            assert_eq!(
                r.ops,
                predict_ops(r.algorithm, &[20, 20], &spec(r.window[0], r.window[1])).unwrap()
            );
        }
        let tree4 = &records[7];
        assert_eq!(tree4.peak_bytes, (2 * 400 * 16 + 17 * 17 * 16) * 16);

        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("algorithm,N0,N1,n0,n1,seconds,ops,peak_bytes")
        );
        assert!(lines.nth(2).unwrap().starts_with("naive,20,20,8,8,,"));
    }

    #[test]
    fn default_config_emits_fifteen_records() {
        let defaults = BenchConfig::default();
        assert_eq!(defaults.dims, [100, 100]);
        assert_eq!(
            defaults.windows,
            vec![[4, 4], [8, 8], [16, 16], [32, 32], [64, 64]]
        );
        assert_eq!(defaults.algorithms, Algorithm::ALL.to_vec());
        assert_eq!(defaults.repetitions, 5);

        // skip every naive run; it still leaves a record
        let config = BenchConfig {
            repetitions: 1,
            max_naive_ops: Some(0),
            ..defaults
        };
        let records = run_bench(&config).unwrap();
        assert_eq!(records.len(), 15);
        assert!(records[..5].iter().all(|r| r.skipped.is_some()));
        assert!(records[5..].iter().all(|r| r.seconds.is_some()));
    }

    #[test]
    fn budget_skips() {
        let config = BenchConfig {
            dims: [16, 16],
            windows: vec![[4, 4]],
            algorithms: vec![Algorithm::Tree],
            repetitions: 1,
            budget: MemoryBudget(1000),
            ..BenchConfig::default()
        };
        let records = run_bench(&config).unwrap();
        assert!(records[0].skipped.as_deref().unwrap().contains("bytes"));
    }

    #[test]
    fn random_array_is_seeded() {
        assert_eq!(random_array(&[3, 4], 7), random_array(&[3, 4], 7));
        assert_ne!(random_array(&[3, 4], 7), random_array(&[3, 4], 8));
    }
}
