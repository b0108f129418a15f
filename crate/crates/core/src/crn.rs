//! Constructive real numbers.
//!
//! A [`Crn`] is an approximation procedure: for every precision index `k` it
//! yields a rational within `2^-k` of the value it represents. Values are
//! never compared for equality; only approximants are inspected.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num::bigint::BigInt;
use num::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{within, Rational};

/// Precision index.
pub type Precision = u32;

type Approximant = dyn Fn(Precision) -> Rational + Send + Sync;

struct CrnInner {
    approximant: Box<Approximant>,
    memo: Mutex<HashMap<Precision, Rational>>,
    label: String,
}

/// A computable real given by its approximant `k -> q_k` with `|x - q_k| < 2^-k`.
///
/// Cloning is cheap and clones share the memo table.
#[derive(Clone)]
pub struct Crn(Arc<CrnInner>);

impl Crn {
    /// Builds a real from a raw approximant. The caller is responsible for the
    /// modulus contract; [`check_modulus`] can probe it.
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(Precision) -> Rational + Send + Sync + 'static,
    ) -> Self {
        Crn(Arc::new(CrnInner {
            approximant: Box::new(f),
            memo: Mutex::new(HashMap::new()),
            label: label.into(),
        }))
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    /// The approximant at precision `k`. Memoized per value.
    pub fn approx(&self, k: Precision) -> Rational {
        if let Some(q) = self.0.memo.lock().expect("memo poisoned").get(&k) {
            return q.clone();
        }
        // Lock is not held while the approximant runs.
        let q = (self.0.approximant)(k);
        self.0
            .memo
            .lock()
            .expect("memo poisoned")
            .entry(k)
            .or_insert(q)
            .clone()
    }
}

impl fmt::Debug for Crn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Crn").field(&self.0.label).finish()
    }
}

/// The exact embedding of a rational.
pub fn crn_from_rational(q: Rational) -> Crn {
    let label = q.to_string();
    Crn::from_fn(label, move |_| q.clone())
}

pub fn crn_approx(x: &Crn, k: Precision) -> Rational {
    x.approx(k)
}

pub fn crn_add(a: &Crn, b: &Crn) -> Crn {
    let (a, b) = (a.clone(), b.clone());
    let label = format!("({} + {})", a.label(), b.label());
    Crn::from_fn(label, move |k| &a.approx(k + 1) + &b.approx(k + 1))
}

pub fn crn_neg(a: &Crn) -> Crn {
    let a = a.clone();
    let label = format!("-{}", a.label());
    Crn::from_fn(label, move |k| -a.approx(k))
}

/// Number of extra precision bits multiplication asks of its operands.
///
/// With `B = ceil(max(|a_0|, |b_0|) + 1)` bounding both magnitudes, the
/// shift is the least `s` with `2^s >= 2B + 1`.
fn mul_shift(a0: &Rational, b0: &Rational) -> Precision {
    let m = if a0.abs() >= b0.abs() {
        a0.abs()
    } else {
        b0.abs()
    };
    let bound: BigInt = (m + Rational::one()).ceil();
    let target = bound * 2 + 1;
    let mut s = 0u32;
    while (BigInt::from(1) << s as usize) < target {
        s += 1;
    }
    s
}

pub fn crn_mul(a: &Crn, b: &Crn) -> Crn {
    let (a, b) = (a.clone(), b.clone());
    let label = format!("({} * {})", a.label(), b.label());
    Crn::from_fn(label, move |k| {
        let s = mul_shift(&a.approx(0), &b.approx(0));
        &a.approx(k + s) * &b.approx(k + s)
    })
}

/// A value in `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    /// `1 - b`.
    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    /// `Some` only for the naturals 0 and 1.
    pub fn from_natural(n: &num::BigUint) -> Option<Bit> {
        match n.to_u8() {
            Some(0) => Some(Bit::Zero),
            Some(1) => Some(Bit::One),
            _ => None,
        }
    }

    pub fn to_rational(self) -> Rational {
        Rational::from_integer(self.as_u8())
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Precision index read by [`round_step_g`]: the coarsest approximant whose
/// error bound (`1/2`) still separates the values 0 and 1 at threshold `1/2`.
pub const G_PRECISION: Precision = 1;

/// Reads one approximant `a` of `x` and returns 0 if `a < 1/2`, else 1.
///
/// Total on every `Crn`, but not extensional: two approximant schedules for
/// the same real may land on different sides of the threshold (see
/// [`g_extensionality_counterexample`]). On exact 0 it returns 0 and on
/// exact 1 it returns 1.
pub fn round_step_g(x: &Crn) -> Bit {
    if x.approx(G_PRECISION) < Rational::half() {
        Bit::Zero
    } else {
        Bit::One
    }
}

/// Two representations of `1/2` that `round_step_g` maps to different bits.
///
/// `u` approaches from below (`1/2 - 2^-(k+1)`), `v` from above
/// (`1/2 + 2^-(k+1)`), so at `k = 1` they read `1/4` and `3/4`.
pub fn g_extensionality_counterexample() -> (Crn, Crn, Bit, Bit) {
    let u = Crn::from_fn("1/2 from below", |k| {
        &Rational::half() - &Rational::pow2_neg(k + 1)
    });
    let v = Crn::from_fn("1/2 from above", |k| {
        &Rational::half() + &Rational::pow2_neg(k + 1)
    });
    let (gu, gv) = (round_step_g(&u), round_step_g(&v));
    (u, v, gu, gv)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "approximants at {j} and {k} are {} apart, exceeding 2^-{j} + 2^-{k}",
    distance
)]
pub struct ModulusViolation {
    pub j: Precision,
    pub k: Precision,
    pub distance: Rational,
}

/// Checks `|q_j - q_k| < 2^-j + 2^-k` for all `j < k <= max_k`.
pub fn check_modulus(x: &Crn, max_k: Precision) -> Result<(), ModulusViolation> {
    let approximants: Vec<Rational> = (0..=max_k).map(|k| x.approx(k)).collect();
    for k in 0..=max_k {
        for j in 0..k {
            let bound = &Rational::pow2_neg(j) + &Rational::pow2_neg(k);
            let (qj, qk) = (&approximants[j as usize], &approximants[k as usize]);
            if !within(qj, qk, &bound) {
                return Err(ModulusViolation {
                    j,
                    k,
                    distance: (qj - qk).abs(),
                });
            }
        }
    }
    Ok(())
}

/// Checks that two reals are indistinguishable up to `max_k`:
/// `|u_k - v_k| < 2^-(k-1)` for every `1 <= k <= max_k`, and `< 2` at `k = 0`.
pub fn approximately_equal(u: &Crn, v: &Crn, max_k: Precision) -> bool {
    (0..=max_k).all(|k| {
        let bound = if k == 0 {
            Rational::from_integer(2)
        } else {
            Rational::pow2_neg(k - 1)
        };
        within(&u.approx(k), &v.approx(k), &bound)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn embedding_is_constant() {
        let x = crn_from_rational(r(1, 3));
        for k in [0, 5, 10, 40] {
            assert_eq!(x.approx(k), r(1, 3));
        }
        assert_eq!(
            crn_from_rational(Rational::zero()).approx(7),
            Rational::zero()
        );
        assert_eq!(
            crn_from_rational(Rational::one()).approx(5),
            Rational::one()
        );
    }

    #[test]
    fn neg_is_pointwise() {
        let x = crn_from_rational(r(2, 7));
        assert_eq!(crn_neg(&x).approx(9), r(-2, 7));
        let y = Crn::from_fn(
            "five eighths at 3",
            |k| if k == 3 { r(5, 8) } else { r(1, 2) },
        );
        assert_eq!(crn_neg(&y).approx(3), r(-5, 8));
        let twice = crn_neg(&crn_neg(&y));
        for k in 0..8 {
            assert_eq!(twice.approx(k), y.approx(k));
        }
    }

    #[test]
    fn add_queries_one_bit_deeper() {
        let x = Crn::from_fn("index", Rational::from_integer);
        let sum = crn_add(&crn_from_rational(Rational::zero()), &x);
        assert_eq!(sum.approx(4), Rational::from_integer(5));
    }

    #[test]
    fn mul_shift_matches_bound() {
        // B = ceil(0 + 1) = 1, 2B + 1 = 3 -> s = 2
        assert_eq!(mul_shift(&Rational::zero(), &Rational::zero()), 2);
        // B = ceil(3 + 1) = 4, 2B + 1 = 9 -> s = 4
        assert_eq!(mul_shift(&r(3, 1), &r(1, 3)), 4);
        // B = ceil(5/2 + 1) = 4 -> s = 4
        assert_eq!(mul_shift(&r(-5, 2), &r(1, 1)), 4);
    }

    #[test]
    fn g_anchors() {
        assert_eq!(
            round_step_g(&crn_from_rational(Rational::zero())),
            Bit::Zero
        );
        assert_eq!(round_step_g(&crn_from_rational(Rational::one())), Bit::One);
        let tie = Crn::from_fn("half at 1", |_| Rational::half());
        assert_eq!(round_step_g(&tie), Bit::One);
    }

    #[test]
    fn g_reads_only_precision_one() {
        let x = Crn::from_fn("liar", |k| {
            if k == 1 {
                r(1, 4)
            } else {
                Rational::from_integer(100)
            }
        });
        assert_eq!(round_step_g(&x), Bit::Zero);
    }

    #[test]
    fn counterexample_pair() {
        let (u, v, gu, gv) = g_extensionality_counterexample();
        assert_eq!(u.approx(1), r(1, 4));
        assert_eq!(v.approx(1), r(3, 4));
        assert_eq!((gu, gv), (Bit::Zero, Bit::One));
        assert!(approximately_equal(&u, &v, 32));
        check_modulus(&u, 32).unwrap();
        check_modulus(&v, 32).unwrap();
    }

    #[test]
    fn modulus_violation_is_reported() {
        let bad = Crn::from_fn("jumper", |k| {
            if k < 3 {
                Rational::zero()
            } else {
                Rational::from_integer(2)
            }
        });
        let err = check_modulus(&bad, 6).unwrap_err();
        assert_eq!((err.j, err.k), (0, 3));
    }

    #[test]
    fn memo_returns_identical_values() {
        let x = crn_mul(&crn_from_rational(r(3, 2)), &crn_from_rational(r(2, 3)));
        assert_eq!(x.approx(16), x.approx(16));
    }

    #[test]
    fn bit_helpers() {
        assert_eq!(Bit::Zero.flip(), Bit::One);
        assert_eq!(Bit::from_natural(&num::BigUint::from(1u8)), Some(Bit::One));
        assert_eq!(Bit::from_natural(&num::BigUint::from(2u8)), None);
    }
}
