//! A small corpus of total 0/1 functions used as extension candidates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::BigUint;
use thiserror::Error;

use crate::crn::Bit;
use crate::machine::{GoedelIndex, HostId, HostRegistry};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinExtender {
    Const0,
    Const1,
    /// `n mod 2`.
    Parity,
    /// 1 iff `n >= threshold`.
    Threshold(BigUint),
    /// Listed values, `default` elsewhere.
    TableLookup {
        table: BTreeMap<GoedelIndex, Bit>,
        default: Bit,
    },
}

impl BuiltinExtender {
    pub fn eval(&self, n: &BigUint) -> Bit {
        match self {
            BuiltinExtender::Const0 => Bit::Zero,
            BuiltinExtender::Const1 => Bit::One,
            BuiltinExtender::Parity => {
                if n.bit(0) {
                    Bit::One
                } else {
                    Bit::Zero
                }
            }
            BuiltinExtender::Threshold(t) => {
                if n >= t {
                    Bit::One
                } else {
                    Bit::Zero
                }
            }
            BuiltinExtender::TableLookup { table, default } => table
                .get(&GoedelIndex(n.clone()))
                .copied()
                .unwrap_or(*default),
        }
    }

    pub fn register(&self, reg: &mut HostRegistry) -> HostId {
        let me = self.clone();
        reg.register(self.to_string(), move |n| BigUint::from(me.eval(n).as_u8()))
    }
}

impl fmt::Display for BuiltinExtender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinExtender::Const0 => f.write_str("const0"),
            BuiltinExtender::Const1 => f.write_str("const1"),
            BuiltinExtender::Parity => f.write_str("parity"),
            BuiltinExtender::Threshold(t) => write!(f, "threshold:{t}"),
            BuiltinExtender::TableLookup { table, default } => {
                f.write_str("table:")?;
                for (i, (k, v)) in table.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{k}={v}")?;
                }
                write!(f, ";default={default}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown extender `{0}` (expected const0, const1, parity, threshold:N or table:I=B,...;default=B)")]
pub struct ExtenderParseError(pub String);

fn parse_bit(s: &str) -> Option<Bit> {
    match s.trim() {
        "0" => Some(Bit::Zero),
        "1" => Some(Bit::One),
        _ => None,
    }
}

impl FromStr for BuiltinExtender {
    type Err = ExtenderParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ExtenderParseError(s.to_string());
        match s {
            "const0" => return Ok(BuiltinExtender::Const0),
            "const1" => return Ok(BuiltinExtender::Const1),
            "parity" => return Ok(BuiltinExtender::Parity),
            _ => {}
        }
        if let Some(t) = s.strip_prefix("threshold:") {
            return t.parse().map(BuiltinExtender::Threshold).map_err(|_| err());
        }
        let body = s.strip_prefix("table:").ok_or_else(err)?;
        let (entries, default) = body.split_once(";default=").ok_or_else(err)?;
        let default = parse_bit(default).ok_or_else(err)?;
        let mut table = BTreeMap::new();
        for entry in entries.split(',').filter(|e| !e.trim().is_empty()) {
            let (k, v) = entry.split_once('=').ok_or_else(err)?;
            let k: GoedelIndex = k.parse().map_err(|_| err())?;
            table.insert(k, parse_bit(v).ok_or_else(err)?);
        }
        Ok(BuiltinExtender::TableLookup { table, default })
    }
}
