use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use tietze_core::crn::{
    approximately_equal, crn_approx, crn_from_rational, g_extensionality_counterexample, Bit,
    Precision,
};
use tietze_core::machine::{encode, GoedelIndex, HostRegistry, Program};
use tietze_core::refuter::{
    replay_verify, BuiltinExtender, ExtenderCandidate, RefuteError, Refuter, WitnessReport,
};
use tietze_core::space::{
    normal_separation, sequentially_closed_check, ClosureVerdict, SequencePrefix, SetSpec,
};
use tietze_core::unextendible::{
    enumerate_members, f_partial, membership_semidecide, EnumerationItem, Membership, SetTag,
};
use tietze_core::Rational;

use crate::expr;

/// Environment variable overriding the step cap for diagonal runs.
pub const STEP_CAP_ENV: &str = "TIETZE_STEP_CAP";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error at {0}")]
    Parse(#[from] expr::ExprError),
    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),
    #[error("step cap exceeded: {0}")]
    BudgetCap(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 1,
            CliError::InvalidCandidate(_) => 2,
            CliError::BudgetCap(_) => 3,
            CliError::Stage { source, .. } => source.exit_code(),
        }
    }
}

impl From<RefuteError> for CliError {
    fn from(e: RefuteError) -> Self {
        match e {
            RefuteError::BudgetExceeded { .. } => CliError::BudgetCap(e.to_string()),
            other => CliError::InvalidCandidate(other.to_string()),
        }
    }
}

/// What a command prints: a text rendering and the equivalent json-lines.
#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub records: Vec<Value>,
}

impl Output {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

pub fn step_cap() -> Result<u64, CliError> {
    match std::env::var(STEP_CAP_ENV) {
        Ok(v) => v.trim().parse().ok().filter(|&c| c >= 1).ok_or_else(|| {
            CliError::Usage(format!(
                "{STEP_CAP_ENV} must be a positive natural, got `{v}`"
            ))
        }),
        Err(_) => Ok(tietze_core::refuter::DEFAULT_VERIFICATION_CAP),
    }
}

pub fn approx(expression: &str, k: Precision) -> Result<Output, CliError> {
    let value = crn_approx(&expr::parse(expression)?.to_crn(), k);
    let mut out = Output::default();
    out.line(value.to_string());
    out.records.push(
        json!({ "command": "approx", "expr": expression, "k": k, "value": value.to_string() }),
    );
    Ok(out)
}

pub fn arith(
    lhs: &Rational,
    rhs: Option<&Rational>,
    op: &str,
    k: Precision,
) -> Result<Output, CliError> {
    let a = crn_from_rational(lhs.clone());
    let need_rhs = || {
        rhs.cloned()
            .ok_or_else(|| CliError::Usage(format!("--rhs is required for {op}")))
    };
    let x = match op {
        "add" => tietze_core::crn_add(&a, &crn_from_rational(need_rhs()?)),
        "mul" => tietze_core::crn_mul(&a, &crn_from_rational(need_rhs()?)),
        "neg" => tietze_core::crn_neg(&a),
        other => {
            return Err(CliError::Usage(format!(
                "unknown op `{other}` (add, neg, mul)"
            )))
        }
    };
    let mut out = Output::default();
    for j in 0..=k {
        let q = crn_approx(&x, j);
        out.line(format!("{j} {q}"));
        out.records
            .push(json!({ "command": "arith", "op": op, "k": j, "value": q.to_string() }));
    }
    Ok(out)
}

fn item_record(item: &EnumerationItem) -> Value {
    json!({ "index": item.index.to_string(), "set": item.set_tag.to_string(), "budget": item.certifying_budget })
}

pub fn enumerate(max_index: u64, max_budget: u64) -> Result<Output, CliError> {
    if max_budget == 0 {
        return Err(CliError::Usage("--max-budget must be at least 1".into()));
    }
    let mut out = Output::default();
    for item in enumerate_members(max_index, max_budget, &HostRegistry::new()) {
        out.line(item.to_string());
        out.records.push(item_record(&item));
    }
    Ok(out)
}

/// Sample used to build the `table-lookup` extender.
const TABLE_SAMPLE: (u64, u64) = (64, 1_000);

fn sample_table() -> BuiltinExtender {
    let items = enumerate_members(TABLE_SAMPLE.0, TABLE_SAMPLE.1, &HostRegistry::new());
    let table = items
        .into_iter()
        .map(|i| (i.index, i.set_tag.bit()))
        .collect();
    BuiltinExtender::TableLookup {
        table,
        default: Bit::Zero,
    }
}

/// Resolves a `--candidate` spec into a candidate registered in `session`.
pub fn candidate(
    spec: &str,
    session: &mut Refuter,
    cap: u64,
) -> Result<ExtenderCandidate, CliError> {
    if let Some(q) = spec.strip_prefix("crn-const:") {
        let q: Rational = q
            .parse()
            .map_err(|e| CliError::Usage(format!("crn-const: {e}")))?;
        return Ok(
            ExtenderCandidate::crn_valued(move |_| crn_from_rational(q.clone()))
                .with_verification_budget(cap),
        );
    }
    let builtin = if spec == "table-lookup" {
        sample_table()
    } else {
        spec.parse::<BuiltinExtender>()
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    let id = session.register_builtin(&builtin);
    Ok(ExtenderCandidate::total_bits(id).with_verification_budget(cap))
}

fn report_record(stage: &str, report: &WitnessReport) -> Value {
    let mut v = serde_json::to_value(report.to_record()).expect("record serializes");
    v["stage"] = json!(stage);
    v
}

pub fn refute(spec: &str) -> Result<Output, CliError> {
    let mut session = Refuter::default();
    let cand = candidate(spec, &mut session, step_cap()?)?;
    let report = session.refute(&cand)?;
    let mut out = Output::default();
    out.text.push_str(&report.to_string());
    let mut rec = report_record("refute", &report);
    rec["candidate"] = json!(spec);
    out.records.push(rec);
    Ok(out)
}

fn parse_list(s: &str) -> Result<Vec<num::BigUint>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Usage(format!("`{t}` is not a natural")))
        })
        .collect()
}

pub fn check_space(
    set: &str,
    terms: &str,
    stabilization: usize,
    disjoint_from: Option<&str>,
) -> Result<Output, CliError> {
    let usage = |e: tietze_core::space::SpaceError| CliError::Usage(e.to_string());
    let members = parse_list(set)?;
    let spec = SetSpec::finite(members.clone()).map_err(usage)?;
    let seq = SequencePrefix::new(parse_list(terms)?, stabilization).map_err(usage)?;
    let verdict = sequentially_closed_check(&spec, &seq).map_err(usage)?;
    let mut out = Output::default();
    let (name, detail) = match &verdict {
        ClosureVerdict::LimitInSet { limit, .. } => ("LimitInSet", limit.to_string()),
        ClosureVerdict::LimitMembershipUnconfirmed { limit } => {
            ("LimitMembershipUnconfirmed", limit.to_string())
        }
        ClosureVerdict::NotStabilized { position } => ("NotStabilized", position.to_string()),
    };
    out.line(format!("closure: {name} {detail}"));
    out.records
        .push(json!({ "check": "closure", "verdict": name, "detail": detail }));
    if let Some(other) = disjoint_from {
        let sep = normal_separation(&members, &parse_list(other)?).map_err(usage)?;
        let show = |v: &[num::BigUint]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        out.line(format!(
            "separation: C' = {{{}}} D' = {{{}}} verified {}",
            show(&sep.open_c).join(","),
            show(&sep.open_d).join(","),
            sep.verify()
        ));
        out.records.push(json!({
            "check": "separation",
            "open_c": show(&sep.open_c),
            "open_d": show(&sep.open_d),
            "verified": sep.verify(),
        }));
    }
    Ok(out)
}

/// `[JZ 0 3, DEC 0, JMP 0]`: drains its input, so it halts with 0 on itself.
pub fn zeroing_program() -> Program {
    "JZ 0 3\nDEC 0\nJMP 0".parse().expect("valid listing")
}

fn stage<T>(name: &'static str, r: Result<T, CliError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Stage {
        stage: name,
        source: Box::new(e),
    })
}

pub fn demo() -> Result<Output, CliError> {
    let mut out = Output::default();
    let registry = HostRegistry::new();

    // 1. A and B, certified by simulation
    let mut items = enumerate_members(64, 1_000, &registry);
    let zeroing = encode(&zeroing_program());
    let schedule: Vec<u64> = (3..=7).map(|e| 10u64.pow(e)).collect();
    let confirmed = stage(
        "enumerate",
        membership_semidecide(&zeroing, SetTag::A, &schedule, &registry)
            .map_err(|e| CliError::Usage(e.to_string())),
    )?;
    let Membership::Confirmed(_) = confirmed else {
        return Err(CliError::Stage {
            stage: "enumerate",
            source: Box::new(CliError::BudgetCap("zeroing program not certified".into())),
        });
    };
    let steps = f_partial(&zeroing, *schedule.last().expect("nonempty"), &registry);
    if let tietze_core::unextendible::PartialBitResult::Defined { steps, .. } = steps {
        items.push(EnumerationItem {
            index: zeroing.clone(),
            set_tag: SetTag::A,
            certifying_budget: steps,
        });
    }
    let (a_count, b_count) = (
        items.iter().filter(|i| i.set_tag == SetTag::A).count(),
        items.iter().filter(|i| i.set_tag == SetTag::B).count(),
    );
    out.line("== f(n) = clamp(program n run on n); A = f^-1(0), B = f^-1(1)");
    out.line(format!(
        "sampled {a_count} members of A and {b_count} members of B"
    ));
    for item in &items {
        out.line(format!("  {item}"));
    }
    out.records.push(json!({
        "stage": "enumerate",
        "a_count": a_count,
        "b_count": b_count,
        "items": items.iter().map(item_record).collect::<Vec<_>>(),
    }));

    // 2. Every subset of the discrete space is sequentially closed, and A, B are separated by themselves
    let a_members: Vec<_> = items
        .iter()
        .filter(|i| i.set_tag == SetTag::A)
        .map(|i| i.index.value().clone())
        .collect();
    let b_members: Vec<_> = items
        .iter()
        .filter(|i| i.set_tag == SetTag::B)
        .map(|i| i.index.value().clone())
        .collect();
    let a_set = SetSpec::SemiDecidable {
        tag: SetTag::A,
        schedule: schedule.clone(),
        registry: Arc::new(registry.clone()),
    };
    let seq = SequencePrefix::new(vec![zeroing.value().clone(); 3], 0)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let closure = stage(
        "space",
        sequentially_closed_check(&a_set, &seq).map_err(|e| CliError::Usage(e.to_string())),
    )?;
    let closed = matches!(closure, ClosureVerdict::LimitInSet { .. });
    let sep = stage(
        "space",
        normal_separation(&a_members, &b_members).map_err(|e| CliError::Usage(e.to_string())),
    )?;
    out.line("== discrete metric: A and B are sequentially closed and open");
    out.line(format!(
        "constant sequence in A converges inside A: {closed}"
    ));
    out.line(format!(
        "A and B are their own disjoint open neighbourhoods: {}",
        sep.verify()
    ));
    out.records.push(json!({ "stage": "space", "closure_limit_in_set": closed, "separation_verified": sep.verify() }));

    // 3. A would-be real-valued extension: 0 on sampled A, 1 on sampled B, 0 elsewhere
    let table: HashMap<GoedelIndex, Bit> = items
        .iter()
        .map(|i| (i.index.clone(), i.set_tag.bit()))
        .collect();
    let cand = ExtenderCandidate::crn_valued(move |n| {
        crn_from_rational(table.get(n).copied().unwrap_or(Bit::Zero).to_rational())
    })
    .with_verification_budget(stage("refute", step_cap())?);
    let mut session = Refuter::default();
    let agreement = stage(
        "agreement",
        session
            .check_agreement_on_domain(&cand, &items)
            .map_err(CliError::from),
    )?;
    let all_agree = agreement.iter().all(|(_, ok)| *ok);
    out.line("== assume F: X -> CRN extends f, i.e. F = 0 on A and F = 1 on B");
    out.line(format!(
        "candidate F agrees with f on all {} sampled points: {all_agree}",
        agreement.len()
    ));
    out.records
        .push(json!({ "stage": "agreement", "checked": agreement.len(), "all_agree": all_agree }));
    if !all_agree {
        return Err(CliError::Stage {
            stage: "agreement",
            source: Box::new(CliError::InvalidCandidate(
                "candidate disagrees on the sample".into(),
            )),
        });
    }

    // 4. h = g . F is a total 0/1 program
    let h = stage("induce_h", session.induce_h(&cand).map_err(CliError::from))?;
    out.line("== h(n) = g(F(n)), g reads the approximant at precision 1 and compares with 1/2");
    out.line(format!(
        "h registered as host primitive {h}; it halts on every input"
    ));
    out.records
        .push(json!({ "stage": "induce_h", "host_id": h.0 }));

    // 5. diagonalize against h
    let report = stage("refute", session.refute(&cand).map_err(CliError::from))?;
    out.line("== the program computing 1 - h(n), run on its own index e, halts with 1 - h(e)");
    out.line("so e is in A or B and h(e) differs from f(e): h does not extend f");
    out.text.push_str(&report.to_string());
    out.records.push(report_record("refute", &report));

    // 6. independent re-verification
    let replayed = replay_verify(&report.to_string()).is_ok();
    let fresh = f_partial(&report.witness, report.f_budget, session.registry());
    let fresh_ok = fresh.bit() == Some(report.f_value);
    out.line(format!(
        "replayed from the record alone: {replayed}; fresh simulation agrees: {fresh_ok}"
    ));
    out.records
        .push(json!({ "stage": "verify", "replay_ok": replayed, "fresh_simulation_ok": fresh_ok }));
    if !(replayed && fresh_ok) {
        return Err(CliError::Stage {
            stage: "verify",
            source: Box::new(CliError::InvalidCandidate(
                "witness did not re-verify".into(),
            )),
        });
    }

    // 7. g is not extensional, yet h is well defined
    let (u, v, gu, gv) = g_extensionality_counterexample();
    let same = approximately_equal(&u, &v, 32);
    out.line("== g is not a function of the real number, only of its approximation program");
    out.line(format!(
        "u and v both represent 1/2 (checked to precision 32: {same}); u_1 = {}, v_1 = {}; g(u) = {gu}, g(v) = {gv}",
        u.approx(1),
        v.approx(1)
    ));
    out.records.push(json!({
        "stage": "g-non-extensionality",
        "equal_to_precision_32": same,
        "u_1": u.approx(1).to_string(),
        "v_1": v.approx(1).to_string(),
        "g_u": gu.as_u8(),
        "g_v": gv.as_u8(),
    }));
    Ok(out)
}
