use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use revquant::sim::bits;
use revquant::{
    check_equivalence, emit, optimize as run_optimizer, parse, Circuit, CostModel, EquivalenceOptions, GateDistribution,
    OptimizeOptions, RewriteReport, Verdict,
};

use crate::{CliError, EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_OK};

pub(crate) fn read_circuit(path: &Path) -> Result<Circuit, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    parse(&text).map_err(|e| CliError::Parse { path: path.display().to_string(), message: e.to_string() })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn io_err(source: std::io::Error) -> CliError {
    CliError::Io { path: "<output>".into(), source }
}

#[derive(Serialize)]
struct CostSummary {
    lines: usize,
    gates: usize,
    cost: u64,
    distribution: GateDistribution,
}

pub(crate) fn cost(input: &Path, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let c = read_circuit(input)?;
    let model = CostModel::default();
    let summary =
        CostSummary { lines: c.line_count(), gates: c.len(), cost: model.circuit_cost(&c), distribution: GateDistribution::of(&c) };
    let text = if json {
        serde_json::to_string_pretty(&summary)? + "\n"
    } else {
        let mut s = format!("lines {}\ngates {}\ncost {}\nclass count cost\n", summary.lines, summary.gates, summary.cost);
        for (class, count) in summary.distribution.iter() {
            let _ = writeln!(s, "{class} {count} {}", count * model.class_cost(class));
        }
        s
    };
    out.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(EXIT_OK)
}

pub(crate) struct OptimizeJob<'a> {
    pub input: &'a Path,
    pub output: Option<&'a Path>,
    pub json: Option<&'a Path>,
    pub force: bool,
    pub options: OptimizeOptions,
    pub check: Option<EquivalenceOptions>,
    pub strict: bool,
}

#[derive(Serialize)]
struct OptimizeSummary<'a> {
    input: String,
    lines_in: usize,
    lines_out: usize,
    gates_before: usize,
    gates_after: usize,
    improvement_pct: String,
    verdict: &'static str,
    verdict_detail: String,
    #[serde(flatten)]
    report: &'a RewriteReport,
}

/// Verdict label and detail; `Unverified` when checking is off.
fn describe(verdict: Option<&Verdict>, primary_names: &[String]) -> (&'static str, String) {
    match verdict {
        None => ("Unverified", "verification disabled".into()),
        Some(Verdict::CounterExample { input, expected, got }) => {
            let w = got.width();
            let mut s = format!("input {} over lines {}; expected |{}>, got", bits(*input, primary_names.len()), primary_names.join(" "), bits(*expected, w));
            for (k, a) in got.terms().iter().take(4) {
                let _ = write!(s, " ({:+.6}{:+.6}i)|{}>", a.re, a.im, bits(*k, w));
            }
            if got.len() > 4 {
                let _ = write!(s, " ... {} terms", got.len());
            }
            ("FAILED", s)
        }
        Some(Verdict::Inconclusive(reason)) => ("Inconclusive", reason.clone()),
        Some(Verdict::Equivalent) => ("Equivalent", String::new()),
    }
}

fn render_report(summary: &OptimizeSummary<'_>) -> String {
    let r = summary.report;
    let mut s = String::new();
    let _ = writeln!(s, "input {}", summary.input);
    let _ = writeln!(s, "lines {} -> {}", summary.lines_in, summary.lines_out);
    let _ = writeln!(s, "gates {} -> {}", summary.gates_before, summary.gates_after);
    let _ = writeln!(s, "cost {} -> {} ({}%)", r.cost_before, r.cost_after, summary.improvement_pct);
    let _ = writeln!(s, "ancillae {} of {}", r.ancillae_used, r.ancilla_budget);
    if r.pre_pass_gates_moved > 0 {
        let _ = writeln!(s, "pre-pass moves {}", r.pre_pass_gates_moved);
    }
    let _ = writeln!(s, "blocks {}", r.blocks.len());
    for b in &r.blocks {
        let shared: Vec<String> = b.block.shared.iter().map(|c| c.to_string()).collect();
        let plan: Vec<&str> = b
            .plan
            .actions()
            .iter()
            .map(|a| match a {
                revquant::optimize::PrepAction::ApplyH => "H",
                revquant::optimize::PrepAction::ApplyNot => "NOT",
                revquant::optimize::PrepAction::Nothing => "-",
            })
            .collect();
        let _ = writeln!(
            s,
            "  pass {} gates {}..{} shared [{}] residual {} prep [{}] cost {} -> {}",
            b.pass,
            b.block.start,
            b.block.end,
            shared.join(" "),
            b.block.residual.len(),
            plan.join(" "),
            b.cost_before,
            b.cost_after
        );
    }
    let _ = write!(s, "verdict {}", summary.verdict);
    if !summary.verdict_detail.is_empty() {
        let _ = write!(s, ": {}", summary.verdict_detail);
    }
    s.push('\n');
    s
}

pub(crate) fn optimize(job: &OptimizeJob<'_>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let c = read_circuit(job.input)?;
    let (optimized, report) = run_optimizer(&c, &job.options)?;
    let verdict = job.check.map(|opts| check_equivalence(&c, &optimized, &report.ancilla_lines, &opts));
    let names: Vec<String> = c.line_names().map(str::to_owned).collect();
    let (label, detail) = describe(verdict.as_ref(), &names);
    let summary = OptimizeSummary {
        input: job.input.display().to_string(),
        lines_in: c.line_count(),
        lines_out: optimized.line_count(),
        gates_before: c.len(),
        gates_after: optimized.len(),
        improvement_pct: format!("{:.2}", report.improvement_pct()),
        verdict: label,
        verdict_detail: detail,
        report: &report,
    };

    let code = match &verdict {
        Some(Verdict::CounterExample { .. }) => EXIT_FAILED,
        Some(Verdict::Inconclusive(_)) if job.strict => EXIT_INCONCLUSIVE,
        _ => EXIT_OK,
    };
    if let Some(path) = job.json {
        write_file(path, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    }
    let text = render_report(&summary);
    let report_sink: &mut dyn Write = if job.output.is_some() { out } else { err };
    report_sink.write_all(text.as_bytes()).map_err(io_err)?;
    if code != EXIT_OK && !job.force {
        return Ok(code);
    }
    let real = emit(&optimized);
    match job.output {
        Some(path) => write_file(path, &real)?,
        None => out.write_all(real.as_bytes()).map_err(io_err)?,
    }
    Ok(code)
}

pub(crate) fn verify(
    a: &Path,
    b: &Path,
    check: Option<EquivalenceOptions>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let original = read_circuit(a)?;
    let candidate = read_circuit(b)?;
    let opts = check.unwrap_or_default();
    let ancillas: Vec<usize> = (original.line_count()..candidate.line_count()).collect();
    let verdict = check_equivalence(&original, &candidate, &ancillas, &opts);
    let names: Vec<String> = original.line_names().map(str::to_owned).collect();
    let (label, detail) = describe(Some(&verdict), &names);
    let line = match label {
        "FAILED" => format!("CounterExample: {detail}\n"),
        "Inconclusive" => format!("Inconclusive: {detail}\n"),
        _ => "Equivalent\n".to_string(),
    };
    out.write_all(line.as_bytes()).map_err(io_err)?;
    Ok(match verdict {
        Verdict::Equivalent => EXIT_OK,
        Verdict::CounterExample { .. } => EXIT_FAILED,
        Verdict::Inconclusive(_) => EXIT_INCONCLUSIVE,
    })
}
