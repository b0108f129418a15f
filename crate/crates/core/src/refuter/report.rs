use std::fmt;

use num::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crn::Bit;
use crate::machine::{
    encode, run_traced, GoedelIndex, HostCall, HostId, HostRegistry, Program, RunStatus, TraceEvent,
};
use crate::unextendible::clamp;

/// A verified disagreement between a candidate extender and `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub witness: GoedelIndex,
    pub f_value: Bit,
    pub extender_value: Bit,
    /// Steps `φ_e(e)` needed to halt; also the least certifying budget.
    pub f_budget: u64,
    pub program: Program,
    pub trace: Vec<TraceEvent>,
    /// Program listing and trace, enough to re-run without the candidate.
    pub replay: String,
}

pub(crate) fn render_replay(program: &Program, trace: &[TraceEvent]) -> String {
    let mut s = String::from("program:\n");
    s.push_str(&program.to_string());
    s.push_str("trace:\n");
    for ev in trace {
        s.push_str(&ev.to_string());
        s.push('\n');
    }
    s
}

impl WitnessReport {
    pub fn host_calls(&self) -> impl Iterator<Item = &HostCall> {
        self.trace.iter().filter_map(|e| e.host_call.as_ref())
    }

    pub fn to_record(&self) -> WitnessRecord {
        WitnessRecord {
            witness: self.witness.clone(),
            f_value: self.f_value.as_u8(),
            extender_value: self.extender_value.as_u8(),
            f_budget: self.f_budget,
            program: self
                .program
                .instructions()
                .iter()
                .map(|i| i.to_string())
                .collect(),
            host_calls: self.host_calls().cloned().collect(),
            trace: self.trace.iter().map(|e| e.to_string()).collect(),
        }
    }
}

/// The text record:
///
/// ```text
/// witness: <index>
/// f_value: <0|1>
/// extender_value: <0|1>
/// f_budget: <steps>
/// program:
/// <one instruction per line>
/// trace:
/// <one outermost step per line>
/// end
/// ```
impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "witness: {}", self.witness)?;
        writeln!(f, "f_value: {}", self.f_value)?;
        writeln!(f, "extender_value: {}", self.extender_value)?;
        writeln!(f, "f_budget: {}", self.f_budget)?;
        f.write_str(&self.replay)?;
        writeln!(f, "end")
    }
}

/// Serializable form of a [`WitnessReport`]; numbers are decimal strings
/// where they may exceed 64 bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub witness: GoedelIndex,
    pub f_value: u8,
    pub extender_value: u8,
    pub f_budget: u64,
    pub program: Vec<String>,
    pub host_calls: Vec<HostCall>,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("record line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("program listing encodes to {actual}, record claims {claimed}")]
    IndexMismatch {
        claimed: GoedelIndex,
        actual: GoedelIndex,
    },
    #[error("re-run diverged from the recorded trace: {0}")]
    TraceMismatch(String),
    #[error("values do not witness a disagreement: f = {f_value}, extender = {extender_value}")]
    NoDisagreement { f_value: u8, extender_value: u8 },
}

fn parse_host_call(line: &str) -> Option<HostCall> {
    let rest = line.split(" ; host ").nth(1)?;
    let (id, rest) = rest.split_once('(')?;
    let (input, rest) = rest.split_once(") = ")?;
    let (output, rest) = rest.split_once(" cost ")?;
    let cost = rest.split(' ').next()?;
    Some(HostCall {
        id: HostId(id.parse().ok()?),
        input: input.parse().ok()?,
        output: output.parse().ok()?,
        cost: cost.parse().ok()?,
    })
}

/// Re-verifies a text record with nothing but the record itself.
///
/// Host answers are taken from the trace, the listing is re-encoded and
/// re-run on the witness, and the fresh trace must match the recorded one
/// line for line.
pub fn replay_verify(record: &str) -> Result<WitnessRecord, ReplayError> {
    let mut lines = record.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = |key: &str| -> Result<String, ReplayError> {
        let (line, text) = lines.next().ok_or(ReplayError::Malformed {
            line: 0,
            message: "truncated".into(),
        })?;
        text.strip_prefix(key)
            .and_then(|v| v.strip_prefix(": "))
            .map(str::to_string)
            .ok_or(ReplayError::Malformed {
                line,
                message: format!("expected `{key}: ...`"),
            })
    };
    let bad = |line: usize, what: &str| ReplayError::Malformed {
        line,
        message: format!("bad {what}"),
    };
    let witness: GoedelIndex = header("witness")?.parse().map_err(|_| bad(1, "witness"))?;
    let f_value: u8 = header("f_value")?.parse().map_err(|_| bad(2, "f_value"))?;
    let extender_value: u8 = header("extender_value")?
        .parse()
        .map_err(|_| bad(3, "extender_value"))?;
    let f_budget: u64 = header("f_budget")?
        .parse()
        .map_err(|_| bad(4, "f_budget"))?;

    let mut section = None;
    let (mut program_lines, mut trace_lines) = (Vec::new(), Vec::new());
    let mut ended = false;
    for (line, text) in lines {
        match (text, section) {
            ("program:", None) => section = Some(0),
            ("trace:", Some(0)) => section = Some(1),
            ("end", Some(1)) => {
                ended = true;
                break;
            }
            (t, Some(0)) => program_lines.push(t.to_string()),
            (t, Some(1)) => trace_lines.push(t.to_string()),
            _ => return Err(bad(line, "section header")),
        }
    }
    if !ended {
        return Err(ReplayError::Malformed {
            line: 0,
            message: "missing `end`".into(),
        });
    }

    let program: Program =
        program_lines
            .join("\n")
            .parse()
            .map_err(|e| ReplayError::Malformed {
                line: 5,
                message: format!("program: {e}"),
            })?;
    let actual = encode(&program);
    if actual != witness {
        return Err(ReplayError::IndexMismatch {
            claimed: witness,
            actual,
        });
    }

    let host_calls: Vec<HostCall> = trace_lines
        .iter()
        .filter_map(|l| parse_host_call(l))
        .collect();
    let mut stub = HostRegistry::new();
    for call in &host_calls {
        let answer = call.output.clone();
        if stub
            .register_at(call.id, "recorded answer", call.cost, move |_| {
                answer.clone()
            })
            .is_err()
        {
            return Err(ReplayError::TraceMismatch(format!(
                "host {} answered twice",
                call.id
            )));
        }
    }

    let (result, trace) = run_traced(&program, witness.value(), f_budget, &stub);
    let fresh: Vec<String> = trace.iter().map(|e| e.to_string()).collect();
    if fresh != trace_lines {
        return Err(ReplayError::TraceMismatch("trace lines differ".into()));
    }
    let RunStatus::Halted(out) = &result.status else {
        return Err(ReplayError::TraceMismatch(format!(
            "run did not halt within {f_budget} steps"
        )));
    };
    if result.steps_used != f_budget || clamp(out).as_u8() != f_value {
        return Err(ReplayError::TraceMismatch(format!(
            "halted with {out} after {} steps",
            result.steps_used
        )));
    }
    let answered_at_witness = host_calls
        .iter()
        .find(|c| c.input == *witness.value())
        .and_then(|c| Bit::from_natural(&c.output));
    let disagree = f_value <= 1 && f_value + extender_value == 1;
    if !disagree || answered_at_witness.map(Bit::as_u8) != Some(extender_value) {
        return Err(ReplayError::NoDisagreement {
            f_value,
            extender_value,
        });
    }
    Ok(WitnessRecord {
        witness,
        f_value,
        extender_value,
        f_budget,
        program: program_lines,
        host_calls,
        trace: trace_lines,
    })
}

/// Re-verifies against a live registry: decode, run on the witness, clamp,
/// compare with a fresh evaluation of the host at the witness.
pub fn verify_report(report: &WitnessReport, reg: &HostRegistry) -> bool {
    let program = crate::machine::decode(&report.witness);
    if program != report.program {
        return false;
    }
    let (result, _) = run_traced(&program, report.witness.value(), report.f_budget, reg);
    let halted_right = matches!(&result.status, RunStatus::Halted(v) if clamp(v) == report.f_value);
    let host_answer: Option<BigUint> = program
        .host_ids()
        .next()
        .and_then(|id| reg.call(id, report.witness.value()));
    let host_right =
        host_answer.as_ref().and_then(Bit::from_natural) == Some(report.extender_value);
    halted_right && host_right && report.f_value == report.extender_value.flip()
}
