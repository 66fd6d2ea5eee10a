//! Aggregation of per-seed run CSVs into plot-ready quantile/CI curves.

use std::path::{Path, PathBuf};

use crate::experiment::CSV_HEADER;
use crate::CliError;

pub const AGGREGATE_HEADER: &str = "episodes,n,mean,median,p25,p75,ci_lo,ci_hi";

#[derive(Debug, Clone)]
pub struct Series {
    pub source: PathBuf,
    pub episodes: Vec<u64>,
    pub best_cost: Vec<f64>,
}

/// Parse one run CSV (schema-checked against the fixed header).
pub fn read_series(path: &Path) -> Result<Series, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(h) => {
            return Err(CliError::config(format!(
                "{}: unexpected header `{h}`",
                path.display()
            )))
        }
        None => return Err(CliError::config(format!("{}: empty file", path.display()))),
    }
    let mut episodes = Vec::new();
    let mut best_cost = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::config(format!(
                "{}:{}: expected 6 fields, got {}",
                path.display(),
                lineno + 2,
                fields.len()
            )));
        }
        let ep: u64 = fields[1].parse().map_err(|_| {
            CliError::config(format!("{}:{}: bad episodes field", path.display(), lineno + 2))
        })?;
        let bc: f64 = fields[3].parse().map_err(|_| {
            CliError::config(format!("{}:{}: bad best_cost field", path.display(), lineno + 2))
        })?;
        episodes.push(ep);
        best_cost.push(bc);
    }
    Ok(Series {
        source: path.to_path_buf(),
        episodes,
        best_cost,
    })
}

/// Collect every `seed_*.csv` under the given run directories.
pub fn collect_series(dirs: &[PathBuf]) -> Result<Vec<Series>, CliError> {
    let mut series = Vec::new();
    for dir in dirs {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| CliError::config(format!("cannot read dir {}: {e}", dir.display())))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .map(|n| n.starts_with("seed_") && n.ends_with(".csv"))
                    .unwrap_or(false)
            })
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(CliError::config(format!(
                "{}: no seed_*.csv files found",
                dir.display()
            )));
        }
        for f in files {
            series.push(read_series(&f)?);
        }
    }
    Ok(series)
}

/// Percentile with linear interpolation between order statistics.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

#[derive(Debug)]
pub struct AggregateResult {
    pub csv: String,
    pub resampled: bool,
}

/// Aggregate best-cost curves across runs. Compatible episode grids (all
/// identical) are used as-is; otherwise every series is resampled onto the
/// coarsest input grid by carrying its best cost forward (first value
/// backward for checkpoints before a series starts).
pub fn aggregate(series: &[Series]) -> Result<AggregateResult, CliError> {
    if series.len() < 2 {
        return Err(CliError::config(format!(
            "aggregation needs at least 2 runs, got {}",
            series.len()
        )));
    }
    for s in series {
        if s.episodes.is_empty() {
            return Err(CliError::config(format!(
                "{}: run has no records to aggregate",
                s.source.display()
            )));
        }
    }

    let identical = series
        .iter()
        .all(|s| s.episodes == series[0].episodes);
    let grid: Vec<u64> = if identical {
        series[0].episodes.clone()
    } else {
        series
            .iter()
            .min_by_key(|s| s.episodes.len())
            .unwrap()
            .episodes
            .clone()
    };

    let mut csv = String::new();
    csv.push_str(AGGREGATE_HEADER);
    csv.push('\n');
    let n = series.len();
    for &checkpoint in &grid {
        let mut values: Vec<f64> = series
            .iter()
            .map(|s| value_at(s, checkpoint))
            .collect();
        values.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let half = 1.96 * sd / (n as f64).sqrt();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            checkpoint,
            n,
            mean,
            percentile(&values, 0.5),
            percentile(&values, 0.25),
            percentile(&values, 0.75),
            mean - half,
            mean + half,
        ));
    }
    Ok(AggregateResult {
        csv,
        resampled: !identical,
    })
}

/// Last observation carried forward; checkpoints before the first record
/// take the first value.
fn value_at(s: &Series, checkpoint: u64) -> f64 {
    match s.episodes.partition_point(|&e| e <= checkpoint) {
        0 => s.best_cost[0],
        idx => s.best_cost[idx - 1],
    }
}
