//! Text renderings of solves and sweeps.

use std::fmt::Write as _;

use lane8_core::bench::{ErrorKind, Order, Sweep};
use lane8_core::{ProblemSpec, Real, SolveReport, Termination};
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;

/// JSON form of a solve. Scalars are decimal strings that parse back to
/// the same bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveJson {
    pub example: String,
    pub beta: String,
    pub alpha: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub precision: String,
    pub iterations: usize,
    pub termination: String,
    pub nodes: Vec<String>,
    pub values: Vec<String>,
}

fn decode<S: Decimal>(texts: &[String]) -> Result<Vec<S>, String> {
    texts
        .iter()
        .map(|t| S::from_decimal(t).ok_or_else(|| format!("invalid decimal '{t}'")))
        .collect()
}

impl SolveJson {
    pub fn new<S: Decimal>(example: &str, spec: &ProblemSpec<S>, report: &SolveReport<S>) -> Self {
        SolveJson {
            example: example.into(),
            beta: spec.beta.to_string(),
            alpha: spec.alpha.to_decimal(),
            n: report.solution.grid().intervals(),
            precision: S::PRECISION.name().into(),
            iterations: report.iterations,
            termination: report.termination.name().into(),
            nodes: report.nodes.iter().map(|v| v.to_decimal()).collect(),
            values: report.solution.values().iter().map(|v| v.to_decimal()).collect(),
        }
    }

    pub fn node_values<S: Decimal>(&self) -> Result<Vec<S>, String> {
        decode(&self.nodes)
    }

    pub fn solution_values<S: Decimal>(&self) -> Result<Vec<S>, String> {
        decode(&self.values)
    }
}

pub fn solve_json<S: Decimal>(example: &str, spec: &ProblemSpec<S>, report: &SolveReport<S>) -> String {
    let mut out = serde_json::to_string(&SolveJson::new(example, spec, report)).expect("plain data");
    out.push('\n');
    out
}

pub fn solve_csv<S: Decimal>(report: &SolveReport<S>) -> String {
    #[derive(Serialize)]
    struct Row {
        x: String,
        #[serde(rename = "U")]
        u: String,
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for (x, u) in report.nodes.iter().zip(report.solution.values()) {
        w.serialize(Row {
            x: x.to_decimal(),
            u: u.to_decimal(),
        })
        .expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

pub fn solve_markdown<S: Decimal>(example: &str, spec: &ProblemSpec<S>, report: &SolveReport<S>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "## {example}\n");
    let _ = writeln!(
        out,
        "beta = {}, alpha = {}, N = {}, precision = {}\n",
        spec.beta,
        spec.alpha.to_decimal(),
        report.solution.grid().intervals(),
        S::PRECISION.name()
    );
    let _ = writeln!(out, "iterations: {}  ", report.iterations);
    let _ = writeln!(out, "termination: {}\n", report.termination);
    out.push_str("| i | x | U(x) |\n|--:|---|---|\n");
    for (i, (x, u)) in report.nodes.iter().zip(report.solution.values()).enumerate() {
        let _ = writeln!(out, "| {i} | {} | {} |", x.to_decimal(), u.to_decimal());
    }
    out
}

/// One sweep level; the CSV header and the JSON keys are the field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub example: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    #[serde(rename = "E")]
    pub error: f64,
    pub order: Option<f64>,
    /// `;`-separated: `floored`, `unreliable`, `max_iter`.
    pub flag: String,
    pub seconds: f64,
}

pub fn sweep_rows<S: Real>(sweep: &Sweep<S>) -> Vec<SweepRow> {
    sweep
        .runs
        .iter()
        .map(|r| {
            let mut flags = Vec::new();
            if r.floored {
                flags.push("floored");
            }
            if r.order == Some(Order::Unreliable) {
                flags.push("unreliable");
            }
            if r.termination == Termination::MaxIter {
                flags.push("max_iter");
            }
            SweepRow {
                example: r.example.clone(),
                n: r.n,
                k: r.iterations,
                error: r.error.to_f64(),
                order: r.order.and_then(Order::value).map(Real::to_f64),
                flag: flags.join(";"),
                seconds: r.seconds,
            }
        })
        .collect()
}

pub fn sweep_csv<S: Real>(sweep: &Sweep<S>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in sweep_rows(sweep) {
        w.serialize(row).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

pub fn sweep_jsonl<S: Real>(sweep: &Sweep<S>) -> String {
    let mut out = String::new();
    for row in sweep_rows(sweep) {
        out.push_str(&serde_json::to_string(&row).expect("plain data"));
        out.push('\n');
    }
    out
}

pub fn sweep_markdown<S: Real>(sweep: &Sweep<S>) -> String {
    let kind = match sweep.kind {
        ErrorKind::Exact => "error against the exact solution",
        ErrorKind::DoubleMesh => "double-mesh error",
    };
    let mut out = format!("## {} ({kind}, {} precision)\n\n", sweep.example, S::PRECISION.name());
    out.push_str("| N | k | E | Order | Flag | Seconds |\n|--:|--:|--:|--:|---|--:|\n");
    for row in sweep_rows(sweep) {
        let order = match row.order {
            Some(o) => format!("{o:.4}"),
            None if row.flag.contains("unreliable") => "-".into(),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "| {} | {} | {:.4e} | {order} | {} | {:.3} |",
            row.n, row.k, row.error, row.flag, row.seconds
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use lane8_core::bench::RunResult;

    fn sweep() -> Sweep<f64> {
        let run = |n, error, order| RunResult {
            example: "ex1".into(),
            n,
            iterations: 27,
            termination: Termination::Converged,
            error,
            order,
            floored: error < 100.0 * f64::EPSILON,
            seconds: 0.5,
        };
        Sweep {
            example: "ex1".into(),
            kind: ErrorKind::Exact,
            runs: vec![
                run(8, 3.8713e-10, None),
                run(16, 9.1226e-13, Some(Order::Value(8.7292))),
                run(32, 1e-15, Some(Order::Unreliable)),
            ],
        }
    }

    #[test]
    fn csv_columns() {
        let text = sweep_csv(&sweep());
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("example,N,k,E,order,flag,seconds"));
        assert_eq!(lines.next(), Some("ex1,8,27,3.8713e-10,,,0.5"));
        assert_eq!(lines.next(), Some("ex1,16,27,9.1226e-13,8.7292,,0.5"));
        assert_eq!(lines.next(), Some("ex1,32,27,1e-15,,floored;unreliable,0.5"));
    }

    #[test]
    fn jsonl_keys_match_csv() {
        let text = sweep_jsonl(&sweep());
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        let keys: Vec<&str> = first.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = vec!["example", "N", "k", "E", "order", "flag", "seconds"];
        expected.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, expected);
        let rows: Vec<SweepRow> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(rows, sweep_rows(&sweep()));
    }

    #[test]
    fn markdown_table() {
        let text = sweep_markdown(&sweep());
        assert!(text.contains("| 16 | 27 | 9.1226e-13 | 8.7292 |  | 0.500 |"), "{text}");
        assert!(text.contains("| 32 | 27 | 1.0000e-15 | - | floored;unreliable |"));
    }
}
