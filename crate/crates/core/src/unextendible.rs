//! The unextendible function `f(n) = clamp(φ_n(n))` and its level sets.
//!
//! `f` is defined exactly on the indices whose program halts on its own
//! index. `A = f⁻¹(0)` and `B = f⁻¹(1)` are both computably enumerable, but
//! no total computable function agrees with `f` on `A ∪ B`; see
//! [`crate::refuter`].

use std::fmt;
use std::str::FromStr;

use num::{BigUint, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crn::Bit;
use crate::machine::{decode, run_bounded, GoedelIndex, HostRegistry, RunStatus};

/// Which level set of `f` an index belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetTag {
    A,
    B,
}

impl SetTag {
    pub fn bit(self) -> Bit {
        match self {
            SetTag::A => Bit::Zero,
            SetTag::B => Bit::One,
        }
    }

    pub fn from_bit(bit: Bit) -> SetTag {
        match bit {
            Bit::Zero => SetTag::A,
            Bit::One => SetTag::B,
        }
    }
}

impl fmt::Display for SetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetTag::A => "A",
            SetTag::B => "B",
        })
    }
}

impl FromStr for SetTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(SetTag::A),
            "B" => Ok(SetTag::B),
            other => Err(format!("unknown set tag `{other}`")),
        }
    }
}

/// Machine outputs become bits: 0 stays 0, anything else is 1.
pub fn clamp(v: &BigUint) -> Bit {
    if v.is_zero() {
        Bit::Zero
    } else {
        Bit::One
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialBitResult {
    Defined {
        bit: Bit,
        steps: u64,
    },
    /// Not yet defined within this budget. Says nothing about larger budgets.
    UnknownAtBudget,
}

impl PartialBitResult {
    pub fn bit(&self) -> Option<Bit> {
        match self {
            PartialBitResult::Defined { bit, .. } => Some(*bit),
            PartialBitResult::UnknownAtBudget => None,
        }
    }
}

/// Evaluates `f(n)` with at most `budget` steps of `φ_n(n)`.
///
/// A run that faults never produces an output and is reported like one that
/// has not halted yet.
pub fn f_partial(n: &GoedelIndex, budget: u64, reg: &HostRegistry) -> PartialBitResult {
    let result = run_bounded(&decode(n), n.value(), budget, reg);
    match result.status {
        RunStatus::Halted(v) => PartialBitResult::Defined {
            bit: clamp(&v),
            steps: result.steps_used,
        },
        RunStatus::OutOfBudget | RunStatus::Fault(_) => PartialBitResult::UnknownAtBudget,
    }
}

/// An index certified to lie in `A` or `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationItem {
    pub index: GoedelIndex,
    pub set_tag: SetTag,
    /// Least budget at which `f_partial` becomes defined.
    pub certifying_budget: u64,
}

impl fmt::Display for EnumerationItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.index, self.set_tag, self.certifying_budget
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed enumeration line `{0}`")]
pub struct ItemParseError(pub String);

impl FromStr for EnumerationItem {
    type Err = ItemParseError;

    /// Parses the `<index> <A|B> <budget>` line format.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ItemParseError(s.to_string());
        let mut words = s.split_whitespace();
        let (Some(i), Some(t), Some(b), None) =
            (words.next(), words.next(), words.next(), words.next())
        else {
            return Err(err());
        };
        Ok(EnumerationItem {
            index: i.parse().map_err(|_| err())?,
            set_tag: t.parse().map_err(|_| err())?,
            certifying_budget: b.parse().map_err(|_| err())?,
        })
    }
}

/// Dovetails `f_partial(n, b)` over `n <= max_index`, `1 <= b <= max_budget`.
///
/// Items come out in (budget, index) order, each with its least certifying
/// budget. Because halting runs are budget-monotone, one run per index at
/// `max_budget` determines that least budget exactly.
pub fn enumerate_members(
    max_index: u64,
    max_budget: u64,
    reg: &HostRegistry,
) -> Vec<EnumerationItem> {
    let mut items: Vec<EnumerationItem> = (0..=max_index)
        .filter_map(|n| {
            let index = GoedelIndex::from(n);
            match f_partial(&index, max_budget, reg) {
                PartialBitResult::Defined { bit, steps } => Some(EnumerationItem {
                    index,
                    set_tag: SetTag::from_bit(bit),
                    certifying_budget: steps.max(1),
                }),
                PartialBitResult::UnknownAtBudget => None,
            }
        })
        .collect();
    items.sort_by(|x, y| (x.certifying_budget, &x.index).cmp(&(y.certifying_budget, &y.index)));
    items
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Confirmed(u64),
    /// No budget in the schedule certified membership. This is not a proof
    /// of non-membership.
    NotConfirmed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("budget schedule is empty")]
    Empty,
    #[error("budget schedule must be strictly increasing and start at 1 or more")]
    NotIncreasing,
}

/// Semi-decision of `n ∈ A` (or `B`) along an increasing budget schedule.
pub fn membership_semidecide(
    n: &GoedelIndex,
    tag: SetTag,
    schedule: &[u64],
    reg: &HostRegistry,
) -> Result<Membership, ScheduleError> {
    if schedule.is_empty() {
        return Err(ScheduleError::Empty);
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ScheduleError::NotIncreasing);
    }
    for &b in schedule {
        match f_partial(n, b, reg) {
            PartialBitResult::Defined { bit, .. } if bit == tag.bit() => {
                return Ok(Membership::Confirmed(b))
            }
            // A run has one output: the other tag can never certify.
            PartialBitResult::Defined { .. } => return Ok(Membership::NotConfirmed),
            PartialBitResult::UnknownAtBudget => {}
        }
    }
    Ok(Membership::NotConfirmed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{encode, Program};

    fn idx(src: &str) -> GoedelIndex {
        encode(&src.parse::<Program>().unwrap())
    }

    #[test]
    fn halt_index_is_in_b() {
        let n = idx("HALT");
        assert_ne!(n, GoedelIndex::from(0));
        let reg = HostRegistry::new();
        assert_eq!(
            f_partial(&n, 10, &reg),
            PartialBitResult::Defined {
                bit: Bit::One,
                steps: 1
            }
        );
    }

    #[test]
    fn divergent_index_is_unknown() {
        let n = idx("JMP 0");
        assert_eq!(
            f_partial(&n, 100_000, &HostRegistry::new()),
            PartialBitResult::UnknownAtBudget
        );
    }

    #[test]
    fn zeroing_index_is_in_a() {
        let n = idx("JZ 0 3\nDEC 0\nJMP 0");
        let reg = HostRegistry::new();
        let r = f_partial(&n, 10_000_000, &reg);
        assert_eq!(r.bit(), Some(Bit::Zero));
    }

    #[test]
    fn index_zero_diverges() {
        assert!(enumerate_members(0, 10, &HostRegistry::new()).is_empty());
    }

    #[test]
    fn semidecide_halt() {
        let n = idx("HALT");
        let reg = HostRegistry::new();
        assert_eq!(
            membership_semidecide(&n, SetTag::B, &[10, 100], &reg),
            Ok(Membership::Confirmed(10))
        );
        assert_eq!(
            membership_semidecide(&n, SetTag::A, &[10, 100], &reg),
            Ok(Membership::NotConfirmed)
        );
        let d = idx("JMP 0");
        for tag in [SetTag::A, SetTag::B] {
            let sched = [10, 100, 1_000, 10_000, 100_000];
            assert_eq!(
                membership_semidecide(&d, tag, &sched, &reg),
                Ok(Membership::NotConfirmed)
            );
        }
    }

    #[test]
    fn semidecide_takes_least_budget() {
        let n = idx("INC 0\nINC 0\nHALT");
        let reg = HostRegistry::new();
        assert_eq!(
            membership_semidecide(&n, SetTag::B, &[1, 2, 3, 4], &reg),
            Ok(Membership::Confirmed(3))
        );
    }

    #[test]
    fn schedule_validation() {
        let n = idx("HALT");
        let reg = HostRegistry::new();
        assert_eq!(
            membership_semidecide(&n, SetTag::B, &[], &reg),
            Err(ScheduleError::Empty)
        );
        assert_eq!(
            membership_semidecide(&n, SetTag::B, &[5, 5], &reg),
            Err(ScheduleError::NotIncreasing)
        );
        assert_eq!(
            membership_semidecide(&n, SetTag::B, &[0, 5], &reg),
            Err(ScheduleError::NotIncreasing)
        );
    }

    /// Literal dovetailing: budgets outer, indices inner, first definition wins.
    fn dovetail_oracle(
        max_index: u64,
        max_budget: u64,
        reg: &HostRegistry,
    ) -> Vec<EnumerationItem> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for b in 1..=max_budget {
            for n in 0..=max_index {
                if seen.contains(&n) {
                    continue;
                }
                let index = GoedelIndex::from(n);
                if let Some(bit) = f_partial(&index, b, reg).bit() {
                    seen.insert(n);
                    out.push(EnumerationItem {
                        index,
                        set_tag: SetTag::from_bit(bit),
                        certifying_budget: b,
                    });
                }
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_literal_dovetailing() {
        let reg = HostRegistry::new();
        let fast = enumerate_members(300, 40, &reg);
        assert!(!fast.is_empty());
        assert_eq!(fast, dovetail_oracle(300, 40, &reg));
    }

    #[test]
    fn enumeration_lines_parse_back() {
        let reg = HostRegistry::new();
        for item in enumerate_members(100, 50, &reg) {
            assert_eq!(item.to_string().parse::<EnumerationItem>().unwrap(), item);
        }
        assert!("4 C 1".parse::<EnumerationItem>().is_err());
        assert!("4 A".parse::<EnumerationItem>().is_err());
    }
}
