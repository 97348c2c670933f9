//! Certification of plan sets.
//!
//! Two independent paths decide whether a candidate set `P` solves a
//! top-quality, dominance top-quality or top-k problem:
//!
//! * the oracle path enumerates every plan within the bound and checks the
//!   three solution conditions directly (members within the bound, every other
//!   plan within the bound dominated by a member, minimality);
//! * the transformation path forbids `P` (and what it dominates) and asks an
//!   optimal search whether a plan within the bound remains.
//!
//! Minimality is checked by single-plan removal: a set is minimal iff dropping
//! any one member breaks the coverage condition, since coverage is monotone
//! under supersets.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::plan::{dominates, validate_plan, DominanceRelation, Plan};
use crate::search::{enumerate_plans, optimal_search, SearchLimits, SearchOutcome, SearchStatus};
use crate::task::{ActionId, Cost, Task};
use crate::transform::{forbid_set, LooplessOptions, TransformResult};

/// The problem a candidate set is certified for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Problem {
    TopQuality {
        q: Cost,
    },
    DominanceTopQuality {
        q: Cost,
        relation: DominanceRelation,
    },
    TopK {
        k: usize,
    },
}

/// A plan as it appears in a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanSummary {
    pub actions: Vec<String>,
    pub cost: Cost,
    #[serde(skip)]
    pub steps: Vec<ActionId>,
}

impl PlanSummary {
    pub fn new(task: &Task, plan: &Plan) -> Self {
        PlanSummary {
            actions: plan
                .action_names(task)
                .into_iter()
                .map(String::from)
                .collect(),
            cost: plan.cost(),
            steps: plan.steps().to_vec(),
        }
    }
}

/// Evidence that a candidate set is not a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A plan within the bound that is neither in `P` nor dominated by it.
    Missing { plan: PlanSummary },
    /// A member costing more than the bound.
    OverCost { index: usize, plan: PlanSummary },
    /// A member whose removal leaves the remaining set covering every plan.
    Removable { index: usize, plan: PlanSummary },
    /// A member listed twice.
    Duplicate {
        index: usize,
        first: usize,
        plan: PlanSummary,
    },
    /// A member with a loop, which a loopless solution never contains.
    Looped { index: usize, plan: PlanSummary },
    /// More plans than `k`.
    TooMany { count: usize, k: usize },
    /// The optimum of a sub-check differs from what the set requires.
    CostMismatch {
        expected: Cost,
        found: Option<Cost>,
        plan: Option<PlanSummary>,
    },
}

impl Witness {
    /// The plan carried by the witness, if any.
    pub fn plan(&self) -> Option<&PlanSummary> {
        match self {
            Witness::Missing { plan }
            | Witness::OverCost { plan, .. }
            | Witness::Removable { plan, .. }
            | Witness::Duplicate { plan, .. }
            | Witness::Looped { plan, .. } => Some(plan),
            Witness::CostMismatch { plan, .. } => plan.as_ref(),
            Witness::TooMany { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Refuted(Witness),
    Inconclusive(String),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::Refuted(_) => "refuted",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }
}

/// What the oracle of one sub-check reported.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OracleRecord {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<Cost>,
    pub expanded: u64,
}

impl OracleRecord {
    fn from_search(outcome: &SearchOutcome) -> Self {
        let (status, cost) = match &outcome.status {
            SearchStatus::OptimalFound { cost, .. } => ("optimal_found", Some(*cost)),
            SearchStatus::ProvedUnsolvable => ("proved_unsolvable", None),
            SearchStatus::BoundExceeded { .. } => ("bound_exceeded", None),
        };
        OracleRecord {
            status: status.into(),
            cost,
            expanded: outcome.statistics.expanded,
        }
    }

    fn resource(message: &str) -> Self {
        OracleRecord {
            status: format!("resource_exhausted: {}", message),
            cost: None,
            expanded: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub name: String,
    pub oracle: OracleRecord,
    pub transformed_actions: usize,
    pub transformed_variables: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub steps: usize,
    pub expanded: u64,
    pub max_transformed_actions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificationReport {
    pub problem: Problem,
    pub verdict: Verdict,
    pub steps: Vec<StepRecord>,
}

impl CertificationReport {
    fn new(problem: Problem) -> Self {
        CertificationReport {
            problem,
            verdict: Verdict::Certified,
            steps: Vec::new(),
        }
    }

    fn refuted(mut self, witness: Witness) -> Self {
        self.verdict = Verdict::Refuted(witness);
        self
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Refuted(w) => Some(w),
            _ => None,
        }
    }

    pub fn totals(&self) -> Totals {
        Totals {
            steps: self.steps.len(),
            expanded: self.steps.iter().map(|s| s.oracle.expanded).sum(),
            max_transformed_actions: self
                .steps
                .iter()
                .map(|s| s.transformed_actions)
                .max()
                .unwrap_or(0),
        }
    }

    /// The report as JSON. Contains no timings, so equal inputs give equal
    /// output.
    pub fn to_json(&self) -> serde_json::Value {
        let mut out = json!({
            "problem": self.problem,
            "verdict": self.verdict.name(),
            "steps": self.steps,
            "totals": self.totals(),
        });
        let obj = out.as_object_mut().expect("object literal");
        match &self.verdict {
            Verdict::Refuted(w) => {
                obj.insert(
                    "witness".into(),
                    serde_json::to_value(w).expect("serializable"),
                );
            }
            Verdict::Inconclusive(reason) => {
                obj.insert("reason".into(), reason.clone().into());
            }
            Verdict::Certified => {}
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, Default)]
pub struct CertifyOptions {
    pub limits: SearchLimits,
    /// Length cap for enumeration in the oracle path; required when the task
    /// has zero-cost actions.
    pub length_cap: Option<usize>,
    /// Run the per-plan minimality checks on the rayon pool.
    pub parallel: bool,
    pub loopless: LooplessOptions,
}

fn revalidate(task: &Task, plans: &[Plan]) -> Result<Vec<Plan>> {
    plans
        .iter()
        .enumerate()
        .map(|(i, p)| {
            validate_plan(task, p.steps())
                .map_err(|e| Error::Usage(format!("plan {} is not valid for the task: {}", i, e)))
        })
        .collect()
}

fn duplicate(task: &Task, plans: &[Plan]) -> Option<Witness> {
    let mut seen: HashMap<&[ActionId], usize> = HashMap::new();
    for (index, p) in plans.iter().enumerate() {
        if let Some(&first) = seen.get(p.steps()) {
            return Some(Witness::Duplicate {
                index,
                first,
                plan: PlanSummary::new(task, p),
            });
        }
        seen.insert(p.steps(), index);
    }
    None
}

fn over_cost(task: &Task, plans: &[Plan], q: Cost) -> Option<Witness> {
    plans
        .iter()
        .enumerate()
        .find(|(_, p)| p.cost() > q)
        .map(|(index, p)| Witness::OverCost {
            index,
            plan: PlanSummary::new(task, p),
        })
}

/// Pre-checks shared by both paths: duplicates, then members over the bound.
fn member_checks(task: &Task, plans: &[Plan], q: Cost) -> Option<Witness> {
    duplicate(task, plans).or_else(|| over_cost(task, plans, q))
}

/// Result of running the optimal search on a transformed task.
enum Probe {
    Done(StepRecord, SearchOutcome),
    Exhausted(StepRecord, String),
}

fn probe(
    name: String,
    transformed: &TransformResult,
    bound: Option<Cost>,
    options: &CertifyOptions,
) -> Result<Probe> {
    let base = |oracle| StepRecord {
        name,
        oracle,
        transformed_actions: transformed.task.actions.len(),
        transformed_variables: transformed.task.variables.len(),
        passed: false,
    };
    match optimal_search(&transformed.task, bound, &options.limits) {
        Ok(outcome) => Ok(Probe::Done(
            base(OracleRecord::from_search(&outcome)),
            outcome,
        )),
        Err(Error::Resource(msg)) => {
            let record = base(OracleRecord::resource(&msg));
            Ok(Probe::Exhausted(record, msg))
        }
        Err(e) => Err(e),
    }
}

fn forbid(
    task: &Task,
    plans: &[Plan],
    relation: DominanceRelation,
    options: &CertifyOptions,
) -> Result<TransformResult> {
    if options.loopless == LooplessOptions::default() || relation != DominanceRelation::Loopless {
        return forbid_set(task, plans, relation);
    }
    let mut current = TransformResult::identity(task);
    for plan in plans {
        if let Some(next) = current.forbid_further_with(relation, plan, options.loopless)? {
            current = next;
        }
    }
    Ok(current)
}

/// The witness plan of a search in original-task terms.
fn found_plan(transformed: &TransformResult, outcome: &SearchOutcome) -> Result<Option<Plan>> {
    match &outcome.status {
        SearchStatus::OptimalFound { plan, .. } => transformed.r_image(plan).map(Some),
        _ => Ok(None),
    }
}

/// Runs the "nothing within `q` remains after forbidding `plans`" step.
/// Returns the refuting plan, if any.
fn coverage_step(
    report: &mut CertificationReport,
    name: &str,
    task: &Task,
    plans: &[Plan],
    q: Cost,
    relation: DominanceRelation,
    options: &CertifyOptions,
) -> Result<Option<Option<Plan>>> {
    let transformed = forbid(task, plans, relation, options)?;
    match probe(name.into(), &transformed, Some(q), options)? {
        Probe::Exhausted(record, msg) => {
            report.steps.push(record);
            report.verdict = Verdict::Inconclusive(format!("{}: {}", name, msg));
            Ok(None)
        }
        Probe::Done(mut record, outcome) => {
            record.passed = outcome.excludes_cost(q);
            report.steps.push(record);
            if record_passed(report) {
                Ok(Some(None))
            } else {
                Ok(Some(found_plan(&transformed, &outcome)?))
            }
        }
    }
}

fn record_passed(report: &CertificationReport) -> bool {
    report.steps.last().is_some_and(|s| s.passed)
}

/// Certifies that `plans` is exactly the set of plans of cost `<= q`.
pub fn certify_top_quality(
    task: &Task,
    plans: &[Plan],
    q: Cost,
    options: &CertifyOptions,
) -> Result<CertificationReport> {
    let plans = revalidate(task, plans)?;
    let report = CertificationReport::new(Problem::TopQuality { q });
    top_quality_steps(report, "forbid-all", task, &plans, q, options)
}

fn top_quality_steps(
    mut report: CertificationReport,
    name: &str,
    task: &Task,
    plans: &[Plan],
    q: Cost,
    options: &CertifyOptions,
) -> Result<CertificationReport> {
    if let Some(w) = member_checks(task, plans, q) {
        return Ok(report.refuted(w));
    }
    match coverage_step(
        &mut report,
        name,
        task,
        plans,
        q,
        DominanceRelation::Empty,
        options,
    )? {
        None | Some(None) => Ok(report),
        Some(Some(plan)) => {
            let plan = PlanSummary::new(task, &plan);
            Ok(report.refuted(Witness::Missing { plan }))
        }
    }
}

/// Certifies that `plans` is a minimal set covering every plan of cost `<= q`
/// up to `relation`.
pub fn certify_dominance(
    task: &Task,
    plans: &[Plan],
    q: Cost,
    relation: DominanceRelation,
    options: &CertifyOptions,
) -> Result<CertificationReport> {
    let plans = revalidate(task, plans)?;
    let mut report = CertificationReport::new(Problem::DominanceTopQuality { q, relation });
    if let Some(w) = member_checks(task, &plans, q) {
        return Ok(report.refuted(w));
    }
    if relation == DominanceRelation::Loopless {
        if let Some((index, p)) = plans.iter().enumerate().find(|(_, p)| !p.is_loopless()) {
            let plan = PlanSummary::new(task, p);
            return Ok(report.refuted(Witness::Looped { index, plan }));
        }
    }

    match coverage_step(
        &mut report,
        "forbid-extended",
        task,
        &plans,
        q,
        relation,
        options,
    )? {
        None => return Ok(report),
        Some(Some(plan)) => {
            let plan = PlanSummary::new(task, &plan);
            return Ok(report.refuted(Witness::Missing { plan }));
        }
        Some(None) => {}
    }

    let check = |index: usize| -> Result<Probe> {
        let rest: Vec<Plan> = plans
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, p)| p.clone())
            .collect();
        let transformed = forbid(task, &rest, relation, options)?;
        probe(
            format!("minimality-{}", index),
            &transformed,
            Some(q),
            options,
        )
    };
    let indices: Vec<usize> = (0..plans.len()).collect();
    let probes: Vec<Result<Probe>> = if options.parallel {
        indices.par_iter().map(|&i| check(i)).collect()
    } else {
        let mut out = Vec::new();
        for &i in &indices {
            let p = check(i);
            let stop = !matches!(&p, Ok(Probe::Done(_, o)) if !o.excludes_cost(q));
            out.push(p);
            if stop {
                break;
            }
        }
        out
    };

    for (index, p) in probes.into_iter().enumerate() {
        match p? {
            Probe::Exhausted(record, msg) => {
                let reason = format!("{}: {}", record.name, msg);
                report.steps.push(record);
                report.verdict = Verdict::Inconclusive(reason);
                return Ok(report);
            }
            Probe::Done(mut record, outcome) => {
                record.passed = !outcome.excludes_cost(q);
                report.steps.push(record);
                if !record_passed(&report) {
                    let plan = PlanSummary::new(task, &plans[index]);
                    return Ok(report.refuted(Witness::Removable { index, plan }));
                }
            }
        }
    }
    Ok(report)
}

/// Certifies that `plans` is a top-k solution: pairwise distinct, at most `k`
/// plans, every plan outside costs at least as much as every plan inside,
/// and fewer than `k` plans only when no other plan exists.
pub fn certify_top_k(
    task: &Task,
    plans: &[Plan],
    k: usize,
    options: &CertifyOptions,
) -> Result<CertificationReport> {
    if k == 0 {
        return Err(Error::Usage("k must be positive".into()));
    }
    let plans = revalidate(task, plans)?;
    let mut report = CertificationReport::new(Problem::TopK { k });
    if let Some(w) = duplicate(task, &plans) {
        return Ok(report.refuted(w));
    }
    if plans.len() > k {
        return Ok(report.refuted(Witness::TooMany {
            count: plans.len(),
            k,
        }));
    }

    if plans.len() < k {
        let transformed = forbid(task, &plans, DominanceRelation::Empty, options)?;
        return match probe("no-other-plan".into(), &transformed, None, options)? {
            Probe::Exhausted(record, msg) => {
                report.steps.push(record);
                report.verdict = Verdict::Inconclusive(format!("no-other-plan: {}", msg));
                Ok(report)
            }
            Probe::Done(mut record, outcome) => {
                record.passed = outcome.status == SearchStatus::ProvedUnsolvable;
                report.steps.push(record);
                match found_plan(&transformed, &outcome)? {
                    Some(plan) if !record_passed(&report) => {
                        let plan = PlanSummary::new(task, &plan);
                        Ok(report.refuted(Witness::Missing { plan }))
                    }
                    _ => Ok(report),
                }
            }
        };
    }

    let m = plans.iter().map(Plan::cost).max().expect("k >= 1 plans");
    let lower: Vec<Plan> = plans.iter().filter(|p| p.cost() < m).cloned().collect();
    if !lower.is_empty() {
        let q = lower.iter().map(Plan::cost).max().expect("non-empty");
        report = top_quality_steps(report, "lower-part", task, &lower, q, options)?;
        if !report.verdict.is_certified() {
            return Ok(report);
        }
    }
    let name = if lower.is_empty() {
        "optimum"
    } else {
        "next-cost"
    };
    let transformed = forbid(task, &lower, DominanceRelation::Empty, options)?;
    match probe(name.into(), &transformed, None, options)? {
        Probe::Exhausted(record, msg) => {
            report.steps.push(record);
            report.verdict = Verdict::Inconclusive(format!("{}: {}", name, msg));
            Ok(report)
        }
        Probe::Done(mut record, outcome) => {
            let found = match &outcome.status {
                SearchStatus::OptimalFound { cost, .. } => Some(*cost),
                _ => None,
            };
            record.passed = found == Some(m);
            report.steps.push(record);
            if record_passed(&report) {
                return Ok(report);
            }
            let plan = found_plan(&transformed, &outcome)?.map(|p| PlanSummary::new(task, &p));
            Ok(report.refuted(Witness::CostMismatch {
                expected: m,
                found,
                plan,
            }))
        }
    }
}

/// Checks the three solution conditions directly against the enumerated set
/// of plans of cost `<= q`.
pub fn check_by_enumeration(
    task: &Task,
    plans: &[Plan],
    q: Cost,
    relation: DominanceRelation,
    options: &CertifyOptions,
) -> Result<CertificationReport> {
    let plans = revalidate(task, plans)?;
    let mut report = CertificationReport::new(Problem::DominanceTopQuality { q, relation });
    if let Some(w) = member_checks(task, &plans, q) {
        return Ok(report.refuted(w));
    }
    if options.length_cap.is_none() && task.has_zero_cost_action() {
        report.verdict =
            Verdict::Inconclusive("zero-cost actions need a length cap for enumeration".into());
        return Ok(report);
    }
    let enumerated = match enumerate_plans(task, q, options.length_cap, &options.limits) {
        Ok(e) => e,
        Err(Error::Resource(msg)) => {
            report.steps.push(enumeration_record(
                OracleRecord::resource(&msg),
                task,
                false,
            ));
            report.verdict = Verdict::Inconclusive(format!("enumerate: {}", msg));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let oracle = OracleRecord {
        status: if enumerated.complete {
            "enumerated"
        } else {
            "truncated"
        }
        .into(),
        cost: None,
        expanded: enumerated.nodes,
    };
    report
        .steps
        .push(enumeration_record(oracle, task, enumerated.complete));
    if !enumerated.complete {
        report.verdict = Verdict::Inconclusive("enumeration truncated by the length cap".into());
        return Ok(report);
    }
    let mut all = enumerated.plans;
    all.sort_by(|a, b| (a.cost(), a.steps()).cmp(&(b.cost(), b.steps())));

    if let Some(missing) = first_uncovered(&all, &plans, None, relation) {
        let plan = PlanSummary::new(task, missing);
        return Ok(report.refuted(Witness::Missing { plan }));
    }
    for (index, p) in plans.iter().enumerate() {
        if first_uncovered(&all, &plans, Some(index), relation).is_none() {
            let plan = PlanSummary::new(task, p);
            return Ok(report.refuted(Witness::Removable { index, plan }));
        }
    }
    Ok(report)
}

fn enumeration_record(oracle: OracleRecord, task: &Task, passed: bool) -> StepRecord {
    StepRecord {
        name: "enumerate".into(),
        oracle,
        transformed_actions: task.actions.len(),
        transformed_variables: task.variables.len(),
        passed,
    }
}

/// First plan of `all` that is outside `members ∖ {without}` and not
/// dominated by any of them.
fn first_uncovered<'a>(
    all: &'a [Plan],
    members: &[Plan],
    without: Option<usize>,
    relation: DominanceRelation,
) -> Option<&'a Plan> {
    let kept: Vec<&Plan> = members
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != without)
        .map(|(_, p)| p)
        .collect();
    all.iter().find(|candidate| {
        !kept
            .iter()
            .any(|m| m.steps() == candidate.steps() || dominates(relation, m, candidate))
    })
}

/// The extended set `P̄`: `P` plus every plan of cost `<= q` dominated by a
/// member. Only described, never built, unless [`materialize_extended_set`]
/// is asked to.
#[derive(Clone, Debug)]
pub struct ExtendedSetSpec {
    pub base: Vec<Plan>,
    pub relation: DominanceRelation,
    pub q: Cost,
}

/// Builds `P̄` explicitly where that is finite and cheap: always for the
/// empty relation, by permutation for `Unordered`, and by bounded
/// enumeration for `MultisetSubset` on tasks without zero-cost actions.
/// `Loopless` is refused.
pub fn materialize_extended_set(
    task: &Task,
    spec: &ExtendedSetSpec,
    limits: &SearchLimits,
) -> Result<Vec<Plan>> {
    let base = revalidate(task, &spec.base)?;
    let mut out: Vec<Plan> = Vec::new();
    let mut push = |p: Plan| {
        if !out.iter().any(|o| o.steps() == p.steps()) {
            out.push(p);
        }
    };
    match spec.relation {
        DominanceRelation::Empty => base.into_iter().for_each(push),
        DominanceRelation::Unordered => {
            for p in base {
                let fits = p.cost() <= spec.q;
                push(p.clone());
                if fits {
                    for perm in valid_permutations(task, &p) {
                        push(perm);
                    }
                }
            }
        }
        DominanceRelation::MultisetSubset => {
            if task.has_zero_cost_action() {
                return Err(Error::Unsupported(
                    "the subset extended set is unbounded with zero-cost actions".into(),
                ));
            }
            let all = enumerate_plans(task, spec.q, None, limits)?.plans;
            for p in &base {
                push(p.clone());
            }
            for candidate in all {
                if base.iter().any(|p| dominates(spec.relation, p, &candidate)) {
                    push(candidate);
                }
            }
        }
        DominanceRelation::Loopless => {
            return Err(Error::Unsupported(
                "the loopless extended set can be infinite and is never materialized".into(),
            ))
        }
    }
    Ok(out)
}

/// Distinct orderings of `plan`'s actions that are plans of `task`.
fn valid_permutations(task: &Task, plan: &Plan) -> Vec<Plan> {
    fn go(
        task: &Task,
        counts: &mut Vec<(ActionId, usize)>,
        state: &crate::task::State,
        path: &mut Vec<ActionId>,
        remaining: usize,
        out: &mut Vec<Plan>,
    ) {
        if remaining == 0 {
            if let Ok(p) = validate_plan(task, path) {
                out.push(p);
            }
            return;
        }
        for i in 0..counts.len() {
            let (a, c) = counts[i];
            if c == 0 || !task.actions[a].is_applicable_in(state) {
                continue;
            }
            counts[i].1 -= 1;
            path.push(a);
            let mut next = state.clone();
            next.apply(&task.actions[a].effect);
            go(task, counts, &next, path, remaining - 1, out);
            path.pop();
            counts[i].1 += 1;
        }
    }
    let mut counts: Vec<(ActionId, usize)> = plan.multiset().iter().collect();
    let mut out = Vec::new();
    go(
        task,
        &mut counts,
        &task.initial,
        &mut Vec::new(),
        plan.len(),
        &mut out,
    );
    out
}
