//! Hyperparameter sweep: Cartesian product over multi-valued keys in a grid
//! file, runs at the grid's budget, ranked by median final best cost.

use std::path::{Path, PathBuf};

use crate::aggregate::read_series;
use crate::config::{ExperimentConfig, RawConfig};
use crate::experiment::{run_experiment, seed_csv_name};
use crate::CliError;

/// Keys whose values are inherently comma-lists and never swept.
const LIST_KEYS: &[&str] = &["seeds"];

#[derive(Debug, Clone)]
pub struct Grid {
    /// Fixed (single-valued) entries.
    pub base: Vec<(String, String)>,
    /// Swept entries: key -> candidate values.
    pub axes: Vec<(String, Vec<String>)>,
}

impl Grid {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let raw = RawConfig::from_file(path)?;
        let mut base = Vec::new();
        let mut axes = Vec::new();
        for (key, value) in raw.entries() {
            if LIST_KEYS.contains(&key.as_str()) {
                base.push((key.clone(), value.clone()));
                continue;
            }
            let candidates = split_top_level(value);
            if candidates.len() > 1 {
                axes.push((key.clone(), candidates));
            } else {
                base.push((key.clone(), value.clone()));
            }
        }
        Ok(Grid { base, axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Key/value assignment of combo `index` in mixed-radix order.
    pub fn combo(&self, mut index: usize) -> Vec<(String, String)> {
        let mut out = self.base.clone();
        for (key, values) in &self.axes {
            let v = &values[index % values.len()];
            index /= values.len();
            out.push((key.clone(), v.clone()));
        }
        out
    }
}

/// Split on commas that are outside brackets; single-element input returns
/// itself.
fn split_top_level(value: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in value.chars() {
        match c {
            '[' | '(' => {
                depth += 1;
                current.push(c);
            }
            ']' | ')' => {
                depth -= 1;
                current.push(c);
            }
            ',' if depth == 0 => {
                parts.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(c),
        }
    }
    parts.push(current.trim().to_string());
    parts.retain(|p| !p.is_empty());
    parts
}

#[derive(Debug)]
pub struct SweepRow {
    pub combo_index: usize,
    pub assignment: Vec<(String, String)>,
    pub median_final_best: f64,
    pub dir: PathBuf,
    pub ok: bool,
}

#[derive(Debug)]
pub struct SweepResult {
    pub ranked: Vec<SweepRow>,
    pub ranked_csv: String,
    pub best_config: String,
}

pub fn run_sweep(grid: &Grid, out_dir: &Path, cap: usize) -> Result<SweepResult, CliError> {
    let total = grid.len();
    if total > cap {
        return Err(CliError::config(format!(
            "grid enumerates {total} configurations, above the cap of {cap} (raise sweep.cap to allow)"
        )));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut rows = Vec::with_capacity(total);
    for index in 0..total {
        let assignment = grid.combo(index);
        let mut raw = RawConfig::empty();
        for (k, v) in &assignment {
            if k == "out" || k == "sweep.cap" {
                continue;
            }
            raw.set(k, v, "grid");
        }
        let dir = out_dir.join(format!("combo_{index:04}"));
        raw.set("out", &dir.display().to_string(), "sweep");

        let cfg = ExperimentConfig::resolve(&raw)?;
        let run = run_experiment(&cfg);
        let ok = run.is_ok();
        if let Err(e) = &run {
            eprintln!("combo {index}: failed: {e}");
        }
        let median = median_final_best(&cfg, &dir).unwrap_or(f64::INFINITY);
        rows.push(SweepRow {
            combo_index: index,
            assignment,
            median_final_best: if ok { median } else { f64::INFINITY },
            dir,
            ok,
        });
    }

    rows.sort_by(|a, b| {
        a.median_final_best
            .total_cmp(&b.median_final_best)
            .then(a.combo_index.cmp(&b.combo_index))
    });

    let axis_names: Vec<String> = grid.axes.iter().map(|(k, _)| k.clone()).collect();
    let mut csv = String::from("rank,combo,status,median_final_best,dir");
    for name in &axis_names {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push('\n');
    for (rank, row) in rows.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{}",
            rank + 1,
            row.combo_index,
            if row.ok { "ok" } else { "failed" },
            row.median_final_best,
            row.dir.display()
        ));
        for name in &axis_names {
            let value = row
                .assignment
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| v.as_str())
                .unwrap_or("");
            csv.push(',');
            // Swept values may contain commas inside brackets; quote them.
            if value.contains(',') {
                csv.push('"');
                csv.push_str(value);
                csv.push('"');
            } else {
                csv.push_str(value);
            }
        }
        csv.push('\n');
    }

    let best = rows
        .first()
        .ok_or_else(|| CliError::config("empty sweep grid"))?;
    if !best.ok {
        return Err(CliError::runtime("every sweep combination failed"));
    }
    let mut best_config = String::from("# best configuration found by the sweep\n");
    for (k, v) in &best.assignment {
        if k == "out" || k == "sweep.cap" {
            continue;
        }
        best_config.push_str(&format!("{k} = {v}\n"));
    }

    std::fs::write(out_dir.join("ranked.csv"), &csv)
        .map_err(|e| CliError::runtime(format!("cannot write ranked.csv: {e}")))?;
    std::fs::write(out_dir.join("best_config.conf"), &best_config)
        .map_err(|e| CliError::runtime(format!("cannot write best_config.conf: {e}")))?;

    Ok(SweepResult {
        ranked: rows,
        ranked_csv: csv,
        best_config,
    })
}

/// Median over seeds of the last best_cost in each seed CSV.
fn median_final_best(cfg: &ExperimentConfig, dir: &Path) -> Option<f64> {
    let mut finals = Vec::new();
    for &seed in &cfg.seeds {
        let series = read_series(&dir.join(seed_csv_name(seed))).ok()?;
        finals.push(*series.best_cost.last()?);
    }
    if finals.is_empty() {
        return None;
    }
    finals.sort_by(f64::total_cmp);
    Some(finals[finals.len() / 2])
}
