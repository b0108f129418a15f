//! Diagonal refutation of candidate extensions of `f`.
//!
//! Any total 0/1 function `E` can be called from a program. The program
//! computing `1 - E(n)` has some index `e`; run on `e` it halts with
//! `1 - E(e)`, so `f(e) = 1 - E(e)` and `E` is not an extension of `f`. A
//! real-valued candidate `F` is first rounded to bits by `h = g ∘ F`, which
//! is total because both `F` and `g` are.

mod extenders;
mod report;

use std::collections::HashMap;
use std::sync::Arc;

use num::BigUint;
use thiserror::Error;

use crate::crn::{check_modulus, round_step_g, Bit, Crn, Precision};
use crate::machine::{
    decode, diagonal_index, run_traced, GoedelIndex, HostId, HostRegistry, RunStatus,
};
use crate::unextendible::{clamp, EnumerationItem};

pub use extenders::{BuiltinExtender, ExtenderParseError};
pub use report::{replay_verify, verify_report, ReplayError, WitnessRecord, WitnessReport};

pub type CrnMap = Arc<dyn Fn(&GoedelIndex) -> Crn + Send + Sync>;

#[derive(Clone)]
pub enum CandidateKind {
    /// A registered host primitive claimed to be total with values in {0, 1}.
    TotalBits(HostId),
    /// A claimed total map from indices to reals.
    CrnValued(CrnMap),
}

impl std::fmt::Debug for CandidateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CandidateKind::TotalBits(id) => write!(f, "TotalBits({id})"),
            CandidateKind::CrnValued(_) => f.write_str("CrnValued(..)"),
        }
    }
}

/// Default cap on the steps spent running a diagonal program on its index.
pub const DEFAULT_VERIFICATION_CAP: u64 = 10_000_000;
/// First budget tried for `φ_e(e)`; doubled until the cap.
pub const INITIAL_VERIFICATION_BUDGET: u64 = 1_000;
/// Precisions probed when checking a candidate's reals.
pub const PROBE_PRECISION: Precision = 16;
/// Indices `0..PROBE_INDICES` probed when inducing `h`.
pub const PROBE_INDICES: u64 = 8;

#[derive(Debug, Clone)]
pub struct ExtenderCandidate {
    pub kind: CandidateKind,
    /// Cap on the steps spent running the diagonal program.
    pub verification_budget: u64,
}

impl ExtenderCandidate {
    pub fn total_bits(id: HostId) -> Self {
        ExtenderCandidate {
            kind: CandidateKind::TotalBits(id),
            verification_budget: DEFAULT_VERIFICATION_CAP,
        }
    }

    pub fn crn_valued(f: impl Fn(&GoedelIndex) -> Crn + Send + Sync + 'static) -> Self {
        ExtenderCandidate {
            kind: CandidateKind::CrnValued(Arc::new(f)),
            verification_budget: DEFAULT_VERIFICATION_CAP,
        }
    }

    pub fn with_verification_budget(mut self, cap: u64) -> Self {
        self.verification_budget = cap;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefuteError {
    #[error("candidate is invalid at index {index}: {reason}")]
    InvalidCandidate { index: GoedelIndex, reason: String },
    #[error("host primitive {0} is not registered")]
    UnregisteredHost(HostId),
    #[error("induce_h needs a real-valued candidate")]
    NotCrnValued,
    #[error("diagonal program {witness} did not halt within {budget} steps")]
    BudgetExceeded {
        witness: GoedelIndex,
        budget: u64,
        partial_trace: Vec<String>,
    },
}

/// A refutation session: a host registry plus the candidates induced into it.
#[derive(Default)]
pub struct Refuter {
    registry: HostRegistry,
    /// Host ids already induced for real-valued candidates, by map identity.
    induced: HashMap<usize, HostId>,
}

fn map_key(f: &CrnMap) -> usize {
    Arc::as_ptr(f) as *const () as usize
}

fn probe_real(f: &CrnMap, n: &GoedelIndex) -> Result<Crn, RefuteError> {
    let x = f(n);
    check_modulus(&x, PROBE_PRECISION).map_err(|v| RefuteError::InvalidCandidate {
        index: n.clone(),
        reason: format!("modulus violation at precision {}: {v}", v.k),
    })?;
    Ok(x)
}

impl Refuter {
    pub fn new(registry: HostRegistry) -> Self {
        Refuter {
            registry,
            induced: HashMap::new(),
        }
    }

    pub fn registry(&self) -> &HostRegistry {
        &self.registry
    }

    pub fn register_bits(
        &mut self,
        name: impl Into<String>,
        f: impl Fn(&BigUint) -> BigUint + Send + Sync + 'static,
    ) -> HostId {
        self.registry.register(name, f)
    }

    pub fn register_builtin(&mut self, e: &BuiltinExtender) -> HostId {
        e.register(&mut self.registry)
    }

    /// Registers `h(n) = round_step_g(F(n))` as a host primitive.
    ///
    /// `F` is probed at the first few indices; a modulus violation there
    /// rejects the candidate. Inducing the same map twice returns the same id.
    pub fn induce_h(&mut self, candidate: &ExtenderCandidate) -> Result<HostId, RefuteError> {
        let CandidateKind::CrnValued(f) = &candidate.kind else {
            return Err(RefuteError::NotCrnValued);
        };
        if let Some(&id) = self.induced.get(&map_key(f)) {
            return Ok(id);
        }
        for n in 0..PROBE_INDICES {
            probe_real(f, &GoedelIndex::from(n))?;
        }
        let g_of_f = f.clone();
        let id = self.registry.register("h = g . F", move |n| {
            let x = g_of_f(&GoedelIndex(n.clone()));
            BigUint::from(round_step_g(&x).as_u8())
        });
        self.induced.insert(map_key(f), id);
        Ok(id)
    }

    /// The candidate's bit at `n`, evaluated directly rather than through the
    /// machine.
    pub fn candidate_bit(
        &self,
        candidate: &ExtenderCandidate,
        n: &GoedelIndex,
    ) -> Result<Bit, RefuteError> {
        match &candidate.kind {
            CandidateKind::TotalBits(id) => {
                let v = self
                    .registry
                    .call(*id, n.value())
                    .ok_or(RefuteError::UnregisteredHost(*id))?;
                Bit::from_natural(&v).ok_or_else(|| RefuteError::InvalidCandidate {
                    index: n.clone(),
                    reason: format!("returned {v}, not a bit"),
                })
            }
            CandidateKind::CrnValued(f) => Ok(round_step_g(&probe_real(f, n)?)),
        }
    }

    fn bit_host(&mut self, candidate: &ExtenderCandidate) -> Result<HostId, RefuteError> {
        match &candidate.kind {
            CandidateKind::TotalBits(id) if self.registry.contains(*id) => Ok(*id),
            CandidateKind::TotalBits(id) => Err(RefuteError::UnregisteredHost(*id)),
            CandidateKind::CrnValued(_) => self.induce_h(candidate),
        }
    }

    /// Produces an index where the candidate disagrees with `f`.
    pub fn refute(&mut self, candidate: &ExtenderCandidate) -> Result<WitnessReport, RefuteError> {
        let host = self.bit_host(candidate)?;
        let witness = diagonal_index(host, &self.registry)
            .map_err(|_| RefuteError::UnregisteredHost(host))?;
        let extender_value = self.candidate_bit(candidate, &witness)?;
        let program = decode(&witness);

        let cap = candidate.verification_budget.max(1);
        let mut budget = INITIAL_VERIFICATION_BUDGET.min(cap);
        let (result, trace) = loop {
            let (result, trace) = run_traced(&program, witness.value(), budget, &self.registry);
            match result.status {
                RunStatus::OutOfBudget if budget < cap => {
                    budget = budget.saturating_mul(2).min(cap)
                }
                RunStatus::OutOfBudget => {
                    return Err(RefuteError::BudgetExceeded {
                        witness,
                        budget,
                        partial_trace: trace.iter().map(|e| e.to_string()).collect(),
                    })
                }
                _ => break (result, trace),
            }
        };
        let output = match &result.status {
            RunStatus::Halted(v) => v.clone(),
            RunStatus::Fault(msg) => {
                return Err(RefuteError::InvalidCandidate {
                    index: witness,
                    reason: msg.clone(),
                })
            }
            RunStatus::OutOfBudget => unreachable!("handled in the budget loop"),
        };
        let f_value = clamp(&output);
        if f_value != extender_value.flip() {
            // Only possible if the candidate answers differently on repeat calls.
            return Err(RefuteError::InvalidCandidate {
                index: witness,
                reason: "candidate is not deterministic".into(),
            });
        }
        let replay = report::render_replay(&program, &trace);
        Ok(WitnessReport {
            witness,
            f_value,
            extender_value,
            f_budget: result.steps_used,
            program,
            trace,
            replay,
        })
    }

    /// Compares the candidate with the certified values of `f` on `items`.
    pub fn check_agreement_on_domain(
        &self,
        candidate: &ExtenderCandidate,
        items: &[EnumerationItem],
    ) -> Result<Vec<(GoedelIndex, bool)>, RefuteError> {
        items
            .iter()
            .map(|item| {
                let bit = self.candidate_bit(candidate, &item.index)?;
                Ok((item.index.clone(), bit == item.set_tag.bit()))
            })
            .collect()
    }
}
