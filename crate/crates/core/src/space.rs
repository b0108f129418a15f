//! The naturals under the discrete metric.
//!
//! Every subset is open (each point's ball of radius 1/2 is the point
//! itself) and sequentially closed (a convergent sequence is eventually
//! constant, so its limit is one of its terms).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num::BigUint;
use thiserror::Error;

use crate::machine::{GoedelIndex, HostRegistry};
use crate::rational::Rational;
use crate::unextendible::{membership_semidecide, Membership, ScheduleError, SetTag};

pub type Natural = BigUint;

/// `d(x, y)`: 0 on the diagonal, 1 elsewhere.
pub fn discrete_distance(x: &Natural, y: &Natural) -> Rational {
    if x == y {
        Rational::zero()
    } else {
        Rational::one()
    }
}

/// The open ball `{ y : d(x, y) < radius }`, materialized for radius <= 1.
/// For larger radii the ball is the whole space and `None` is returned.
pub fn ball(center: &Natural, radius: &Rational) -> Option<BTreeSet<Natural>> {
    if radius > &Rational::one() {
        return None;
    }
    let mut s = BTreeSet::new();
    if radius > &Rational::zero() {
        s.insert(center.clone());
    }
    Some(s)
}

/// A finite prefix of a sequence with a claimed stabilization position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePrefix {
    terms: Vec<Natural>,
    claimed_stabilization: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("stabilization position {position} is outside a prefix of length {len}")]
    StabilizationOutOfRange { position: usize, len: usize },
    #[error("epsilon must lie strictly between 0 and 1")]
    BadEpsilon,
    #[error("term {0} is not a member of the set")]
    TermNotInSet(Natural),
    #[error("finite list repeats {0}")]
    DuplicateMember(Natural),
    #[error("sets are not disjoint: both contain {0}")]
    NotDisjoint(Natural),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

impl SequencePrefix {
    pub fn new(terms: Vec<Natural>, claimed_stabilization: usize) -> Result<Self, SpaceError> {
        if claimed_stabilization >= terms.len() {
            return Err(SpaceError::StabilizationOutOfRange {
                position: claimed_stabilization,
                len: terms.len(),
            });
        }
        Ok(SequencePrefix {
            terms,
            claimed_stabilization,
        })
    }

    pub fn from_u64(terms: &[u64], claimed_stabilization: usize) -> Result<Self, SpaceError> {
        Self::new(
            terms.iter().map(|&t| Natural::from(t)).collect(),
            claimed_stabilization,
        )
    }

    pub fn terms(&self) -> &[Natural] {
        &self.terms
    }

    pub fn claimed_stabilization(&self) -> usize {
        self.claimed_stabilization
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stabilization {
    StabilizedAt {
        position: usize,
        limit: Natural,
    },
    /// First position past the claim whose term differs from the claimed limit.
    Violation {
        position: usize,
    },
}

/// Default epsilon for stabilization checks; any value in (0, 1) behaves
/// the same under the discrete metric.
pub fn default_epsilon() -> Rational {
    Rational::half()
}

/// Checks that every term from the claimed position on is within `epsilon`
/// of the term there, which for `epsilon < 1` means equal to it.
pub fn check_stabilizes(
    seq: &SequencePrefix,
    epsilon: &Rational,
) -> Result<Stabilization, SpaceError> {
    if epsilon <= &Rational::zero() || epsilon >= &Rational::one() {
        return Err(SpaceError::BadEpsilon);
    }
    let s = seq.claimed_stabilization;
    let limit = &seq.terms[s];
    for (position, term) in seq.terms.iter().enumerate().skip(s + 1) {
        if &discrete_distance(term, limit) >= epsilon {
            return Ok(Stabilization::Violation { position });
        }
    }
    Ok(Stabilization::StabilizedAt {
        position: s,
        limit: limit.clone(),
    })
}

pub type MembershipTest = Arc<dyn Fn(&Natural) -> bool + Send + Sync>;

/// A subset of the space, given in one of three ways.
#[derive(Clone)]
pub enum SetSpec {
    FiniteList(Vec<Natural>),
    Predicate(MembershipTest),
    /// `A` or `B`, certified by budgeted simulation.
    SemiDecidable {
        tag: SetTag,
        schedule: Vec<u64>,
        registry: Arc<HostRegistry>,
    },
}

impl fmt::Debug for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::FiniteList(m) => f.debug_tuple("FiniteList").field(m).finish(),
            SetSpec::Predicate(_) => f.write_str("Predicate(..)"),
            SetSpec::SemiDecidable { tag, schedule, .. } => f
                .debug_struct("SemiDecidable")
                .field("tag", tag)
                .field("schedule", schedule)
                .finish(),
        }
    }
}

impl SetSpec {
    pub fn finite(members: Vec<Natural>) -> Result<Self, SpaceError> {
        let mut seen = BTreeSet::new();
        for m in &members {
            if !seen.insert(m) {
                return Err(SpaceError::DuplicateMember(m.clone()));
            }
        }
        Ok(SetSpec::FiniteList(members))
    }

    pub fn predicate(test: impl Fn(&Natural) -> bool + Send + Sync + 'static) -> Self {
        SetSpec::Predicate(Arc::new(test))
    }
}

/// Evidence that a term belongs to a semi-decidable set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub index: GoedelIndex,
    pub tag: SetTag,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureVerdict {
    LimitInSet {
        limit: Natural,
        certificate: Option<MembershipCertificate>,
    },
    /// The limit did not certify within the schedule. Not a refutation.
    LimitMembershipUnconfirmed {
        limit: Natural,
    },
    NotStabilized {
        position: usize,
    },
}

/// Checks that the limit of an eventually constant sequence of members is
/// itself a member.
///
/// For decidable sets every term must be a member, otherwise the input is
/// rejected. Semi-decidable sets are only asked about the limit, which is
/// one of the terms.
pub fn sequentially_closed_check(
    set: &SetSpec,
    seq: &SequencePrefix,
) -> Result<ClosureVerdict, SpaceError> {
    let decidable_member = |t: &Natural| match set {
        SetSpec::FiniteList(m) => Some(m.contains(t)),
        SetSpec::Predicate(p) => Some(p(t)),
        SetSpec::SemiDecidable { .. } => None,
    };
    for t in &seq.terms {
        if decidable_member(t) == Some(false) {
            return Err(SpaceError::TermNotInSet(t.clone()));
        }
    }
    let limit = match check_stabilizes(seq, &default_epsilon())? {
        Stabilization::Violation { position } => {
            return Ok(ClosureVerdict::NotStabilized { position })
        }
        Stabilization::StabilizedAt { limit, .. } => limit,
    };
    let SetSpec::SemiDecidable {
        tag,
        schedule,
        registry,
    } = set
    else {
        return Ok(ClosureVerdict::LimitInSet {
            limit,
            certificate: None,
        });
    };
    let index = GoedelIndex(limit.clone());
    Ok(
        match membership_semidecide(&index, *tag, schedule, registry)? {
            Membership::Confirmed(budget) => ClosureVerdict::LimitInSet {
                limit,
                certificate: Some(MembershipCertificate {
                    index,
                    tag: *tag,
                    budget,
                }),
            },
            Membership::NotConfirmed => ClosureVerdict::LimitMembershipUnconfirmed { limit },
        },
    )
}

/// Disjoint open neighbourhoods of two disjoint finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub open_c: Vec<Natural>,
    pub open_d: Vec<Natural>,
    /// For every member, the radius-1/2 ball around it, which is the singleton.
    pub balls: Vec<(Natural, BTreeSet<Natural>)>,
}

/// In the discrete space the sets are their own neighbourhoods.
pub fn normal_separation(c: &[Natural], d: &[Natural]) -> Result<Separation, SpaceError> {
    let cs: BTreeSet<&Natural> = c.iter().collect();
    if let Some(common) = d.iter().find(|x| cs.contains(x)) {
        return Err(SpaceError::NotDisjoint(common.clone()));
    }
    let half = Rational::half();
    let balls = c
        .iter()
        .chain(d)
        .map(|x| (x.clone(), ball(x, &half).expect("radius below 1")))
        .collect();
    Ok(Separation {
        open_c: c.to_vec(),
        open_d: d.to_vec(),
        balls,
    })
}

impl Separation {
    /// Each ball is a singleton inside its own set, and the sets share no point.
    pub fn verify(&self) -> bool {
        let c: BTreeSet<&Natural> = self.open_c.iter().collect();
        let d: BTreeSet<&Natural> = self.open_d.iter().collect();
        c.is_disjoint(&d)
            && self
                .balls
                .iter()
                .all(|(x, b)| b.len() == 1 && b.contains(x) && (c.contains(x) || d.contains(x)))
    }
}
