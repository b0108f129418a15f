use std::borrow::Cow;
use std::fmt;

use num::{BigUint, One, Zero};
use serde::{Deserialize, Serialize};

use super::encoding::{decode, GoedelIndex};
use super::host::HostRegistry;
use super::program::{HostId, Instruction, Program, Reg, REGISTER_COUNT};

/// Nesting limit for `EXEC`. Exceeding it is a fault, which callers treat
/// like divergence.
pub const MAX_CALL_DEPTH: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Halted(BigUint),
    OutOfBudget,
    Fault(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    pub steps_used: u64,
}

impl RunResult {
    pub fn output(&self) -> Option<&BigUint> {
        match &self.status {
            RunStatus::Halted(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_halted(&self) -> bool {
        matches!(self.status, RunStatus::Halted(_))
    }
}

/// One answer given by a host primitive during a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostCall {
    pub id: HostId,
    #[serde(with = "decimal")]
    pub input: BigUint,
    #[serde(with = "decimal")]
    pub output: BigUint,
    pub cost: u64,
}

/// A step of the outermost frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    /// Total steps used once this instruction finished, callee steps included.
    pub step: u64,
    pub pc: usize,
    pub instruction: Instruction,
    pub host_call: Option<HostCall>,
    /// Register 0 after the instruction.
    pub r0: BigUint,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} pc {}: {}", self.step, self.pc, self.instruction)?;
        if let Some(call) = &self.host_call {
            write!(
                f,
                " ; host {}({}) = {} cost {}",
                call.id, call.input, call.output, call.cost
            )?;
        }
        write!(f, " ; r0 = {}", self.r0)
    }
}

struct Frame<'p> {
    program: Cow<'p, Program>,
    pc: usize,
    regs: Vec<BigUint>,
    /// Register in the caller that receives this frame's output.
    ret: Reg,
}

impl<'p> Frame<'p> {
    fn new(program: Cow<'p, Program>, input: BigUint, ret: Reg) -> Self {
        let mut regs = vec![BigUint::zero(); REGISTER_COUNT as usize];
        regs[0] = input;
        Frame {
            program,
            pc: 0,
            regs,
            ret,
        }
    }
}

/// Runs `p` on `input` for at most `budget` steps.
///
/// Every instruction costs one step except `HOST`, which costs the entry's
/// declared cost; an `EXEC` additionally spends whatever its callee uses.
/// Reaching the position one past the last instruction halts for free.
pub fn run_bounded(p: &Program, input: &BigUint, budget: u64, reg: &HostRegistry) -> RunResult {
    execute(p, input, budget, reg, None)
}

/// Like [`run_bounded`], also recording the outermost frame's steps.
pub fn run_traced(
    p: &Program,
    input: &BigUint,
    budget: u64,
    reg: &HostRegistry,
) -> (RunResult, Vec<TraceEvent>) {
    let mut trace = Vec::new();
    let result = execute(p, input, budget, reg, Some(&mut trace));
    (result, trace)
}

fn execute(
    p: &Program,
    input: &BigUint,
    budget: u64,
    reg: &HostRegistry,
    mut trace: Option<&mut Vec<TraceEvent>>,
) -> RunResult {
    let mut stack = vec![Frame::new(Cow::Borrowed(p), input.clone(), 0)];
    let mut steps: u64 = 0;
    let fault = |steps, msg: String| RunResult {
        status: RunStatus::Fault(msg),
        steps_used: steps,
    };

    loop {
        let depth = stack.len() - 1;
        let frame = stack.last_mut().expect("stack is never empty here");

        if frame.pc == frame.program.len() {
            let done = stack.pop().expect("frame present");
            let output = done.regs.into_iter().next().expect("register 0");
            let Some(caller) = stack.last_mut() else {
                return RunResult {
                    status: RunStatus::Halted(output),
                    steps_used: steps,
                };
            };
            let exec_pc = caller.pc;
            caller.regs[done.ret as usize] = output;
            caller.pc += 1;
            if depth == 1 {
                if let Some(t) = trace.as_deref_mut() {
                    t.push(TraceEvent {
                        step: steps,
                        pc: exec_pc,
                        instruction: caller.program.instructions()[exec_pc],
                        host_call: None,
                        r0: caller.regs[0].clone(),
                    });
                }
            }
            continue;
        }

        let pc = frame.pc;
        let ins = frame.program.instructions()[pc];
        let cost = match ins {
            Instruction::Host { id, .. } => match reg.get(id) {
                Some(entry) => entry.cost,
                None => return fault(steps, format!("HOST {id} is not registered")),
            },
            _ => 1,
        };
        if budget.saturating_sub(steps) < cost {
            return RunResult {
                status: RunStatus::OutOfBudget,
                steps_used: budget,
            };
        }
        steps += cost;

        let mut host_call = None;
        match ins {
            Instruction::Inc(r) => {
                frame.regs[r as usize] += 1u8;
                frame.pc += 1;
            }
            Instruction::Dec(r) => {
                let v = &mut frame.regs[r as usize];
                if !v.is_zero() {
                    *v -= BigUint::one();
                }
                frame.pc += 1;
            }
            Instruction::Jz(r, t) => {
                frame.pc = if frame.regs[r as usize].is_zero() {
                    t
                } else {
                    pc + 1
                };
            }
            Instruction::Jmp(t) => frame.pc = t,
            Instruction::Halt => frame.pc = frame.program.len(),
            Instruction::Host { id, input } => {
                let arg = std::mem::take(&mut frame.regs[input as usize]);
                let out = reg.call(id, &arg).expect("checked above");
                if depth == 0 && trace.is_some() {
                    host_call = Some(HostCall {
                        id,
                        input: arg,
                        output: out.clone(),
                        cost,
                    });
                }
                frame.regs[input as usize] = out;
                frame.pc += 1;
            }
            Instruction::Exec { code, input } => {
                if depth + 1 >= MAX_CALL_DEPTH {
                    return fault(steps, format!("EXEC nesting exceeded {MAX_CALL_DEPTH}"));
                }
                let callee = decode(&GoedelIndex(frame.regs[code as usize].clone()));
                let arg = frame.regs[input as usize].clone();
                stack.push(Frame::new(Cow::Owned(callee), arg, input));
                // Traced when the callee returns.
                continue;
            }
        }

        if depth == 0 {
            if let Some(t) = trace.as_deref_mut() {
                let top = &stack[0];
                t.push(TraceEvent {
                    step: steps,
                    pc,
                    instruction: ins,
                    host_call,
                    r0: top.regs[0].clone(),
                });
            }
        }
    }
}

pub(crate) mod decimal {
    use num::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
