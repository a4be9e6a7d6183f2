use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use revquant::{check_equivalence, optimize, CostModel, EquivalenceOptions, OptimizeOptions, Verdict};

use crate::commands::read_circuit;
use crate::{CliError, EXIT_FAILED, EXIT_OK};

pub const CSV_HEADER: &str =
    "name,in,out,gates_before,cost_before,gates_after,cost_after,ancillae,improvement_pct,verdict,ms";

/// One line of the benchmark table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub lines_in: usize,
    pub lines_out: usize,
    pub gates_before: usize,
    pub cost_before: u64,
    pub gates_after: usize,
    pub cost_after: u64,
    pub ancillae: usize,
    pub improvement_pct: f64,
    /// `Equivalent`, `Inconclusive` or `FAILED`.
    pub verdict: String,
    pub ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl BenchRow {
    fn failed(name: String, detail: String) -> Self {
        BenchRow {
            name,
            lines_in: 0,
            lines_out: 0,
            gates_before: 0,
            cost_before: 0,
            gates_after: 0,
            cost_after: 0,
            ancillae: 0,
            improvement_pct: 0.0,
            verdict: "FAILED".into(),
            ms: 0,
            detail: Some(detail),
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.2},{},{}",
            self.name,
            self.lines_in,
            self.lines_out,
            self.gates_before,
            self.cost_before,
            self.gates_after,
            self.cost_after,
            self.ancillae,
            self.improvement_pct,
            self.verdict,
            self.ms
        )
    }
}

fn bench_file(path: &Path, opts: &OptimizeOptions, check: &EquivalenceOptions) -> BenchRow {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let started = Instant::now();
    let c = match read_circuit(path) {
        Ok(c) => c,
        Err(e) => return BenchRow::failed(name, e.to_string()),
    };
    let (out, report) = match optimize(&c, opts) {
        Ok(r) => r,
        Err(e) => return BenchRow::failed(name, e.to_string()),
    };
    let verdict = check_equivalence(&c, &out, &report.ancilla_lines, check);
    let model = CostModel::default();
    let detail = match &verdict {
        Verdict::Equivalent => None,
        other => Some(other.to_string()),
    };
    BenchRow {
        name,
        lines_in: c.line_count(),
        lines_out: out.line_count(),
        gates_before: c.len(),
        cost_before: model.circuit_cost(&c),
        gates_after: out.len(),
        cost_after: model.circuit_cost(&out),
        ancillae: report.ancillae_used,
        improvement_pct: report.improvement_pct(),
        verdict: verdict.label().into(),
        ms: started.elapsed().as_millis(),
        detail,
    }
}

/// Benchmark every `.real` file in `dir`, in file-name order.
pub fn bench_directory(dir: &Path, opts: &OptimizeOptions, check: &EquivalenceOptions) -> Result<Vec<BenchRow>, CliError> {
    let io = |source| CliError::Io { path: dir.display().to_string(), source };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "real"));
    files.sort();
    Ok(files.par_iter().map(|p| bench_file(p, opts, check)).collect())
}

pub(crate) fn run(
    dir: &Path,
    csv: Option<&Path>,
    json: Option<&Path>,
    opts: &OptimizeOptions,
    check: EquivalenceOptions,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let rows = bench_directory(dir, opts, &check)?;
    let mut table = String::from(CSV_HEADER);
    table.push('\n');
    for row in &rows {
        table.push_str(&row.to_csv());
        table.push('\n');
    }
    let write = |path: &Path, text: &str| {
        fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
    };
    match csv {
        Some(path) => write(path, &table)?,
        None => out.write_all(table.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
    }
    if let Some(path) = json {
        write(path, &(serde_json::to_string_pretty(&rows)? + "\n"))?;
    }
    Ok(if rows.iter().any(|r| r.verdict == "FAILED") { EXIT_FAILED } else { EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_row_matches_header() {
        let row = BenchRow::failed("x".into(), "boom".into());
        assert_eq!(row.to_csv(), "x,0,0,0,0,0,0,0,0.00,FAILED,0");
        assert_eq!(row.to_csv().split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        let err = bench_directory(Path::new("/nonexistent/dir"), &OptimizeOptions::default(), &EquivalenceOptions::default());
        assert!(matches!(err, Err(CliError::Io { .. })));
    }
}
