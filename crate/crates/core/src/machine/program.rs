use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of registers per frame.
pub const REGISTER_COUNT: u8 = 16;

/// A register operand, always `< REGISTER_COUNT` inside a valid program.
pub type Reg = u8;

/// Identifier of a host primitive in a [`HostRegistry`](super::HostRegistry).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HostId(pub u64);

impl fmt::Display for HostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    Inc(Reg),
    /// Decrement, saturating at zero.
    Dec(Reg),
    /// Jump to `target` when the register holds zero.
    Jz(Reg, usize),
    Jmp(usize),
    /// Run the program whose index is in `code` on the value in `input`;
    /// the callee's register 0 is written back into `input`.
    Exec {
        code: Reg,
        input: Reg,
    },
    /// Replace `input` with the host primitive's value on it.
    Host {
        id: HostId,
        input: Reg,
    },
    Halt,
}

impl Instruction {
    fn registers(&self) -> impl Iterator<Item = Reg> {
        let regs: [Option<Reg>; 2] = match *self {
            Instruction::Inc(r) | Instruction::Dec(r) | Instruction::Jz(r, _) => [Some(r), None],
            Instruction::Exec { code, input } => [Some(code), Some(input)],
            Instruction::Host { input, .. } => [Some(input), None],
            Instruction::Jmp(_) | Instruction::Halt => [None, None],
        };
        regs.into_iter().flatten()
    }

    fn target(&self) -> Option<usize> {
        match *self {
            Instruction::Jz(_, t) | Instruction::Jmp(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Inc(r) => write!(f, "INC {r}"),
            Instruction::Dec(r) => write!(f, "DEC {r}"),
            Instruction::Jz(r, t) => write!(f, "JZ {r} {t}"),
            Instruction::Jmp(t) => write!(f, "JMP {t}"),
            Instruction::Exec { code, input } => write!(f, "EXEC {code} {input}"),
            Instruction::Host { id, input } => write!(f, "HOST {id} {input}"),
            Instruction::Halt => write!(f, "HALT"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("program has no instructions")]
    Empty,
    #[error("instruction {at} uses register {reg}, registers are 0..{REGISTER_COUNT}")]
    BadRegister { at: usize, reg: u64 },
    #[error("instruction {at} jumps to {target}, past the halt position {len}")]
    BadTarget {
        at: usize,
        target: usize,
        len: usize,
    },
}

/// A well-formed, non-empty instruction sequence.
///
/// Input arrives in register 0 and the output is read from register 0. Jump
/// targets may equal `len()`, the halt position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(instructions: Vec<Instruction>) -> Result<Self, ProgramError> {
        if instructions.is_empty() {
            return Err(ProgramError::Empty);
        }
        let len = instructions.len();
        for (at, ins) in instructions.iter().enumerate() {
            if let Some(reg) = ins.registers().find(|&r| r >= REGISTER_COUNT) {
                return Err(ProgramError::BadRegister {
                    at,
                    reg: reg.into(),
                });
            }
            if let Some(target) = ins.target().filter(|&t| t > len) {
                return Err(ProgramError::BadTarget { at, target, len });
            }
        }
        Ok(Program { instructions })
    }

    /// `[JMP 0]`, which never halts.
    pub fn diverging() -> Self {
        Program {
            instructions: vec![Instruction::Jmp(0)],
        }
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn host_ids(&self) -> impl Iterator<Item = HostId> + '_ {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::Host { id, .. } => Some(*id),
            _ => None,
        })
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ins in &self.instructions {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] ProgramError),
}

fn parse_instruction(text: &str) -> Result<Instruction, String> {
    let mut words = text.split_whitespace();
    let op = words.next().ok_or("empty instruction")?;
    let args: Vec<&str> = words.collect();
    let num = |i: usize| -> Result<u64, String> {
        let w = args
            .get(i)
            .ok_or_else(|| format!("{op} is missing operand {}", i + 1))?;
        w.parse::<u64>()
            .map_err(|_| format!("operand `{w}` is not a natural"))
    };
    let reg = |i: usize| -> Result<Reg, String> {
        let v = num(i)?;
        Reg::try_from(v)
            .ok()
            .filter(|&r| r < REGISTER_COUNT)
            .ok_or_else(|| format!("register {v} out of range"))
    };
    let target = |i: usize| -> Result<usize, String> {
        usize::try_from(num(i)?).map_err(|_| "jump target too large".to_string())
    };
    let arity = match op {
        "HALT" => 0,
        "INC" | "DEC" | "JMP" => 1,
        "JZ" | "EXEC" | "HOST" => 2,
        other => return Err(format!("unknown opcode `{other}`")),
    };
    if args.len() != arity {
        return Err(format!("{op} takes {arity} operand(s), got {}", args.len()));
    }
    Ok(match op {
        "HALT" => Instruction::Halt,
        "INC" => Instruction::Inc(reg(0)?),
        "DEC" => Instruction::Dec(reg(0)?),
        "JMP" => Instruction::Jmp(target(0)?),
        "JZ" => Instruction::Jz(reg(0)?, target(1)?),
        "EXEC" => Instruction::Exec {
            code: reg(0)?,
            input: reg(1)?,
        },
        _ => Instruction::Host {
            id: HostId(num(0)?),
            input: reg(1)?,
        },
    })
}

impl FromStr for Program {
    type Err = ParseError;

    /// One instruction per line. Blank lines and `#` comments are skipped.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut instructions = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let ins = parse_instruction(text).map_err(|message| ParseError::Syntax {
                line: i + 1,
                message,
            })?;
            instructions.push(ins);
        }
        Ok(Program::new(instructions)?)
    }
}
