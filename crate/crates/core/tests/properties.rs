use num::BigUint;
use proptest::prelude::*;

use tietze_core::crn::{
    check_modulus, crn_add, crn_from_rational, crn_mul, crn_neg, round_step_g, Bit, Crn,
};
use tietze_core::machine::{
    decode, encode, run_bounded, GoedelIndex, HostId, HostRegistry, Instruction, Program, RunStatus,
};
use tietze_core::rational::{within, Rational};
use tietze_core::space::{sequentially_closed_check, ClosureVerdict, SequencePrefix, SetSpec};
use tietze_core::unextendible::{f_partial, PartialBitResult};

fn rational() -> impl Strategy<Value = Rational> {
    (-1_000_000i64..=1_000_000, 1i64..=1_000_000).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

#[derive(Debug, Clone)]
enum Expr {
    Lit(Rational),
    Add(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn exact(&self) -> Rational {
        match self {
            Expr::Lit(q) => q.clone(),
            Expr::Add(a, b) => &a.exact() + &b.exact(),
            Expr::Neg(a) => -a.exact(),
            Expr::Mul(a, b) => &a.exact() * &b.exact(),
        }
    }

    fn build(&self) -> Crn {
        match self {
            Expr::Lit(q) => crn_from_rational(q.clone()),
            Expr::Add(a, b) => crn_add(&a.build(), &b.build()),
            Expr::Neg(a) => crn_neg(&a.build()),
            Expr::Mul(a, b) => crn_mul(&a.build(), &b.build()),
        }
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    let small = (-50i64..=50, 1i64..=50).prop_map(|(n, d)| Expr::Lit(Rational::new(n, d).unwrap()));
    small.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
        ]
    })
}

fn instruction(len: usize) -> impl Strategy<Value = Instruction> {
    let reg = 0u8..16;
    prop_oneof![
        reg.clone().prop_map(Instruction::Inc),
        reg.clone().prop_map(Instruction::Dec),
        (reg.clone(), 0..=len).prop_map(|(r, t)| Instruction::Jz(r, t)),
        (0..=len).prop_map(Instruction::Jmp),
        (reg.clone(), reg.clone()).prop_map(|(code, input)| Instruction::Exec { code, input }),
        (0u64..4, reg).prop_map(|(id, input)| Instruction::Host {
            id: HostId(id),
            input
        }),
        Just(Instruction::Halt),
    ]
}

fn program() -> impl Strategy<Value = Program> {
    (1usize..=12).prop_flat_map(|len| {
        proptest::collection::vec(instruction(len), len).prop_map(|ins| Program::new(ins).unwrap())
    })
}

fn registry() -> HostRegistry {
    let mut reg = HostRegistry::new();
    reg.register("zero", |_| BigUint::from(0u8));
    reg.register("parity", |n| n % 2u8);
    reg.register_with_cost("double", 3, |n| n * 2u8);
    reg
}

proptest! {
    #[test]
    fn composite_reals_keep_their_modulus(e in expr()) {
        let x = e.build();
        check_modulus(&x, 24).unwrap();
        let exact = e.exact();
        for k in [0u32, 3, 17, 30] {
            prop_assert!(within(&x.approx(k), &exact, &Rational::pow2_neg(k)));
        }
    }

    #[test]
    fn binary_ops_match_rational_oracle(p in rational(), q in rational(), k in 0u32..=48) {
        let (a, b) = (crn_from_rational(p.clone()), crn_from_rational(q.clone()));
        let bound = Rational::pow2_neg(k);
        prop_assert!(within(&crn_add(&a, &b).approx(k), &(&p + &q), &bound));
        prop_assert!(within(&crn_neg(&a).approx(k), &(-&p), &bound));
        prop_assert!(within(&crn_mul(&a, &b).approx(k), &(&p * &q), &bound));
    }

    #[test]
    fn g_separates_at_most_zero_and_at_least_one(n in 0i64..=1_000_000, d in 1i64..=1_000_000) {
        let nonpos = Rational::new(-n, d).unwrap();
        let at_least_one = &Rational::one() + &Rational::new(n, d).unwrap();
        prop_assert_eq!(round_step_g(&crn_from_rational(nonpos)), Bit::Zero);
        prop_assert_eq!(round_step_g(&crn_from_rational(at_least_one)), Bit::One);
    }

    #[test]
    fn goedel_round_trip(p in program()) {
        prop_assert_eq!(decode(&encode(&p)), p);
    }

    #[test]
    fn halting_is_budget_monotone(p in program(), input in 0u64..=100, budget in 1u64..=512, extra in 0u64..=512) {
        let reg = registry();
        let input = BigUint::from(input);
        let small = run_bounded(&p, &input, budget, &reg);
        let again = run_bounded(&p, &input, budget, &reg);
        prop_assert_eq!(&small, &again);
        match &small.status {
            RunStatus::Halted(_) => {
                prop_assert!(small.steps_used <= budget);
                prop_assert_eq!(run_bounded(&p, &input, budget + extra, &reg), small);
            }
            RunStatus::OutOfBudget => prop_assert_eq!(small.steps_used, budget),
            RunStatus::Fault(_) => {}
        }
    }

    #[test]
    fn defined_values_are_stable(n in 0u64..5_000, budget in 1u64..200) {
        let reg = HostRegistry::new();
        let index = GoedelIndex::from(n);
        if let PartialBitResult::Defined { bit, steps } = f_partial(&index, budget, &reg) {
            prop_assert_eq!(f_partial(&index, budget * 4, &reg), PartialBitResult::Defined { bit, steps });
        }
    }

    #[test]
    fn eventually_constant_sequences_close(
        members in proptest::collection::btree_set(0u64..1_000, 1..20),
        pick in any::<prop::sample::Index>(),
        prefix in proptest::collection::vec(any::<prop::sample::Index>(), 0..10),
        tail in 1usize..10,
    ) {
        let members: Vec<u64> = members.into_iter().collect();
        let limit = members[pick.index(members.len())];
        let mut terms: Vec<u64> = prefix.iter().map(|i| members[i.index(members.len())]).collect();
        let s = terms.len();
        terms.extend(std::iter::repeat_n(limit, tail));
        let set = SetSpec::finite(members.iter().map(|&m| BigUint::from(m)).collect()).unwrap();
        let seq = SequencePrefix::from_u64(&terms, s).unwrap();
        let verdict = sequentially_closed_check(&set, &seq).unwrap();
        prop_assert_eq!(verdict, ClosureVerdict::LimitInSet { limit: BigUint::from(limit), certificate: None });
    }
}

#[test]
fn encode_decode_idempotent_up_to_ten_thousand() {
    for n in 0..=10_000u64 {
        let once = encode(&decode(&GoedelIndex::from(n)));
        let twice = encode(&decode(&once));
        assert_eq!(once, twice, "index {n}");
    }
}

#[test]
fn decoded_programs_are_well_formed() {
    for n in 0..=1_000u64 {
        let p = decode(&GoedelIndex::from(n));
        assert_eq!(Program::new(p.instructions().to_vec()), Ok(p));
    }
}

#[test]
fn spec_examples_for_approx() {
    let sum = crn_add(
        &crn_from_rational(Rational::new(1, 3).unwrap()),
        &crn_from_rational(Rational::new(1, 6).unwrap()),
    );
    assert!(within(
        &sum.approx(8),
        &Rational::half(),
        &Rational::pow2_neg(8)
    ));
    let prod = crn_mul(
        &crn_from_rational(Rational::from_integer(3)),
        &crn_from_rational(Rational::new(1, 3).unwrap()),
    );
    assert!(within(
        &prod.approx(20),
        &Rational::one(),
        &Rational::pow2_neg(20)
    ));
    let quarter = crn_from_rational(Rational::new(1, 4).unwrap());
    assert!(within(
        &crn_add(&quarter, &quarter).approx(6),
        &Rational::half(),
        &Rational::pow2_neg(6)
    ));
    let one = crn_from_rational(Rational::one());
    assert!(within(
        &crn_add(&one, &crn_neg(&one)).approx(30),
        &Rational::zero(),
        &Rational::pow2_neg(30)
    ));
    let prod = crn_mul(
        &crn_from_rational(Rational::new(3, 2).unwrap()),
        &crn_from_rational(Rational::new(2, 3).unwrap()),
    );
    assert!(within(
        &prod.approx(16),
        &Rational::one(),
        &Rational::pow2_neg(16)
    ));
}
