//! Trace output: one JSON object per trigger, or a flat CSV summary.

use crate::ansf::SelectionOutcome;
use crate::pipeline::{DecisionTrace, TriggerRecord};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceFormat {
    #[default]
    Jsonl,
    Csv,
}

impl FromStr for TraceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown format '{other}', expected jsonl or csv")),
        }
    }
}

impl fmt::Display for TraceFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Jsonl => "jsonl",
            Self::Csv => "csv",
        })
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "trigger_index",
    "trigger",
    "current_network",
    "seed",
    "threshold",
    "initiated",
    "factors",
    "current_score",
    "ranking",
    "decision",
    "target",
];

fn csv_row(r: &TriggerRecord) -> [String; 11] {
    let factors = r
        .initiation
        .iter()
        .filter_map(|i| i.factor.map(|f| format!("{}={f}", i.network)))
        .collect::<Vec<_>>()
        .join(";");
    let ranking = r
        .ranking
        .iter()
        .map(|n| format!("{}={}", n.network, n.score))
        .collect::<Vec<_>>()
        .join(";");
    let (decision, target) = match &r.decision {
        SelectionOutcome::Handoff { target, .. } => ("handoff", target.clone()),
        SelectionOutcome::Stay => ("stay", String::new()),
    };
    [
        r.trigger_index.to_string(),
        r.trigger.clone(),
        r.current_network.clone(),
        r.seed.to_string(),
        r.threshold.to_string(),
        r.initiated.to_string(),
        factors,
        r.current_score.map(|s| s.to_string()).unwrap_or_default(),
        ranking,
        decision.to_string(),
        target,
    ]
}

fn render(trace: &DecisionTrace, format: TraceFormat) -> io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        TraceFormat::Jsonl => {
            for r in &trace.records {
                serde_json::to_writer(&mut buf, r)?;
                buf.push(b'\n');
            }
        }
        TraceFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(CSV_HEADER)?;
            for r in &trace.records {
                w.write_record(csv_row(r))?;
            }
            w.flush()?;
        }
    }
    Ok(buf)
}

/// Writes the trace and returns the number of bytes written.
pub fn emit_trace<W: Write>(
    trace: &DecisionTrace,
    format: TraceFormat,
    sink: &mut W,
) -> io::Result<usize> {
    let buf = render(trace, format)?;
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(buf.len())
}

/// Reads back JSONL written by [`emit_trace`]. Blank lines are skipped.
pub fn read_jsonl<R: BufRead>(reader: R) -> io::Result<DecisionTrace> {
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(DecisionTrace { records })
}
