//! Goedel numbering of programs.
//!
//! A program is written as a bit string by concatenating a prefix-free code
//! for each instruction:
//!
//! | opcode | tag   | operands                          |
//! |--------|-------|-----------------------------------|
//! | HALT   | `00`  |                                   |
//! | INC r  | `010` | γ(r+1)                            |
//! | DEC r  | `011` | γ(r+1)                            |
//! | JZ r t | `100` | γ(r+1) γ(t+1)                     |
//! | JMP t  | `101` | γ(t+1)                            |
//! | EXEC   | `110` | γ(code+1) γ(input+1)              |
//! | HOST   | `111` | γ(id+1) γ(input+1)                |
//!
//! where γ is the Elias gamma code. The index of a program with bit string
//! `w` is the natural whose binary expansion is `1w`. Every other natural
//! (0, 1, truncated codes, out-of-range operands, dangling jumps) decodes
//! to `[JMP 0]`.

use std::fmt;
use std::str::FromStr;

use num::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::program::{HostId, Instruction, Program, Reg, REGISTER_COUNT};

/// The Goedel number of a program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoedelIndex(pub BigUint);

impl GoedelIndex {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl From<u64> for GoedelIndex {
    fn from(value: u64) -> Self {
        GoedelIndex(BigUint::from(value))
    }
}

impl From<BigUint> for GoedelIndex {
    fn from(value: BigUint) -> Self {
        GoedelIndex(value)
    }
}

impl fmt::Display for GoedelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for GoedelIndex {
    type Err = num::bigint::ParseBigIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim().parse::<BigUint>().map(GoedelIndex)
    }
}

impl Serialize for GoedelIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for GoedelIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Default)]
struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    fn push(&mut self, pattern: &str) {
        self.bits.extend(pattern.bytes().map(|b| b == b'1'));
    }

    fn gamma(&mut self, x: u128) {
        debug_assert!(x >= 1);
        let width = 128 - x.leading_zeros();
        self.bits
            .extend(std::iter::repeat_n(false, width as usize - 1));
        self.bits
            .extend((0..width).rev().map(|i| (x >> i) & 1 == 1));
    }
}

struct BitReader<'a> {
    n: &'a BigUint,
    /// Next bit position, counting down; reading stops below zero.
    pos: u64,
    remaining: u64,
}

impl BitReader<'_> {
    fn bit(&mut self) -> Option<bool> {
        if self.remaining == 0 {
            return None;
        }
        let b = self.n.bit(self.pos);
        self.remaining -= 1;
        self.pos = self.pos.wrapping_sub(1);
        Some(b)
    }

    fn gamma(&mut self) -> Option<u128> {
        let mut zeros = 0u32;
        while !self.bit()? {
            zeros += 1;
            if zeros >= 127 {
                return None;
            }
        }
        let mut x: u128 = 1;
        for _ in 0..zeros {
            x = (x << 1) | u128::from(self.bit()?);
        }
        Some(x)
    }

    fn reg(&mut self) -> Option<Reg> {
        let r = self.gamma()? - 1;
        (r < u128::from(REGISTER_COUNT)).then_some(r as Reg)
    }

    fn target(&mut self) -> Option<usize> {
        usize::try_from(self.gamma()? - 1).ok()
    }

    fn host(&mut self) -> Option<HostId> {
        u64::try_from(self.gamma()? - 1).ok().map(HostId)
    }

    fn instruction(&mut self) -> Option<Instruction> {
        let ins = if !self.bit()? {
            if !self.bit()? {
                Instruction::Halt
            } else if !self.bit()? {
                Instruction::Inc(self.reg()?)
            } else {
                Instruction::Dec(self.reg()?)
            }
        } else {
            match (self.bit()?, self.bit()?) {
                (false, false) => {
                    let r = self.reg()?;
                    Instruction::Jz(r, self.target()?)
                }
                (false, true) => Instruction::Jmp(self.target()?),
                (true, false) => {
                    let code = self.reg()?;
                    Instruction::Exec {
                        code,
                        input: self.reg()?,
                    }
                }
                (true, true) => {
                    let id = self.host()?;
                    Instruction::Host {
                        id,
                        input: self.reg()?,
                    }
                }
            }
        };
        Some(ins)
    }
}

fn write_instruction(w: &mut BitWriter, ins: &Instruction) {
    let g = |w: &mut BitWriter, v: u64| w.gamma(u128::from(v) + 1);
    match *ins {
        Instruction::Halt => w.push("00"),
        Instruction::Inc(r) => {
            w.push("010");
            g(w, r.into());
        }
        Instruction::Dec(r) => {
            w.push("011");
            g(w, r.into());
        }
        Instruction::Jz(r, t) => {
            w.push("100");
            g(w, r.into());
            g(w, t as u64);
        }
        Instruction::Jmp(t) => {
            w.push("101");
            g(w, t as u64);
        }
        Instruction::Exec { code, input } => {
            w.push("110");
            g(w, code.into());
            g(w, input.into());
        }
        Instruction::Host { id, input } => {
            w.push("111");
            g(w, id.0);
            g(w, input.into());
        }
    }
}

/// The index of `p`. Injective, and `decode(&encode(p)) == *p`.
pub fn encode(p: &Program) -> GoedelIndex {
    let mut w = BitWriter::default();
    w.push("1");
    for ins in p.instructions() {
        write_instruction(&mut w, ins);
    }
    let mut n = BigUint::default();
    for (i, &b) in w.bits.iter().rev().enumerate() {
        if b {
            n.set_bit(i as u64, true);
        }
    }
    GoedelIndex(n)
}

/// Decodes `n` if it lies in the range of [`encode`].
pub fn try_decode(n: &GoedelIndex) -> Option<Program> {
    let len = n.0.bits();
    if len < 2 {
        return None;
    }
    let mut r = BitReader {
        n: &n.0,
        pos: len - 2,
        remaining: len - 1,
    };
    let mut instructions = Vec::new();
    while r.remaining > 0 {
        instructions.push(r.instruction()?);
    }
    Program::new(instructions).ok()
}

/// Total decoding: indices outside the range of [`encode`] yield `[JMP 0]`.
pub fn decode(n: &GoedelIndex) -> Program {
    try_decode(n).unwrap_or_else(Program::diverging)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(src: &str) -> Program {
        src.parse().unwrap()
    }

    #[test]
    fn small_indices() {
        assert_eq!(encode(&prog("HALT")), GoedelIndex::from(4));
        assert_eq!(encode(&prog("JMP 0")), GoedelIndex::from(27));
        for n in 0..4u64 {
            assert_eq!(try_decode(&GoedelIndex::from(n)), None, "{n}");
            assert_eq!(decode(&GoedelIndex::from(n)), Program::diverging());
        }
        assert_eq!(decode(&GoedelIndex::from(4)), prog("HALT"));
    }

    #[test]
    fn gamma_widths() {
        let mut w = BitWriter::default();
        w.gamma(1);
        w.gamma(4);
        let s: String = w.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        assert_eq!(s, "100100");
    }

    #[test]
    fn dangling_jump_falls_back() {
        // "1" + JMP + γ(3): a jump to 2 in a one-instruction program.
        let n = GoedelIndex::from(0b1_101_011u64);
        assert_eq!(try_decode(&n), None);
    }

    #[test]
    fn round_trip_all_shapes() {
        let p = prog("INC 3\nDEC 15\nJZ 2 7\nJMP 0\nEXEC 1 9\nHOST 123456789 4\nHALT\nHALT");
        assert_eq!(decode(&encode(&p)), p);
        let big = Program::new(vec![Instruction::Host {
            id: HostId(u64::MAX),
            input: 0,
        }])
        .unwrap();
        assert_eq!(decode(&encode(&big)), big);
    }

    #[test]
    fn distinct_single_instructions() {
        assert_ne!(encode(&prog("INC 0")), encode(&prog("DEC 0")));
    }
}
