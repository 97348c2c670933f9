//! Iterative generation of solutions: find an optimal plan, forbid it (and
//! what it dominates), repeat.

use serde::Serialize;

use crate::certify::PlanSummary;
use crate::error::{Error, Result};
use crate::plan::{remove_loops, DominanceRelation, Plan};
use crate::search::{optimal_search, SearchLimits, SearchStatus};
use crate::task::{Cost, Task};
use crate::transform::{LooplessOptions, TransformKind, TransformResult};

#[derive(Clone, Debug)]
pub struct PlannerOptions {
    pub limits: SearchLimits,
    /// Stop with a partial result once a transformed task has more actions.
    pub max_actions: usize,
    pub loopless: LooplessOptions,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            limits: SearchLimits::default(),
            max_actions: 1_000_000,
            loopless: LooplessOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", content = "detail", rename_all = "snake_case")]
pub enum Termination {
    /// Every remaining plan costs more than the bound.
    BoundExceeded,
    /// The transformed task has no plan left.
    Unsolvable,
    KReached,
    /// A limit was hit; the plans found so far are returned.
    Incomplete(String),
}

/// One search on the current transformed task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Round {
    /// The plan found, in original-task terms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSummary>,
    pub status: String,
    pub expanded: u64,
    pub kind: TransformKind,
    pub transformed_actions: usize,
    pub transformed_variables: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationTrace {
    pub rounds: Vec<Round>,
    pub termination: Termination,
}

impl IterationTrace {
    pub fn is_complete(&self) -> bool {
        !matches!(self.termination, Termination::Incomplete(_))
    }
}

#[derive(Clone, Debug)]
pub struct PlannerResult {
    pub plans: Vec<Plan>,
    pub trace: IterationTrace,
}

/// What a single round decided.
enum Step {
    Found(Plan),
    Stop(Termination),
}

struct Run<'t> {
    task: &'t Task,
    options: &'t PlannerOptions,
    current: TransformResult,
    plans: Vec<Plan>,
    rounds: Vec<Round>,
}

impl<'t> Run<'t> {
    fn new(task: &'t Task, options: &'t PlannerOptions) -> Self {
        Run {
            task,
            options,
            current: TransformResult::identity(task),
            plans: Vec::new(),
            rounds: Vec::new(),
        }
    }

    fn search(&mut self, bound: Option<Cost>) -> Result<Step> {
        let mut round = Round {
            plan: None,
            status: String::new(),
            expanded: 0,
            kind: self.current.kind,
            transformed_actions: self.current.task.actions.len(),
            transformed_variables: self.current.task.variables.len(),
        };
        let outcome = match optimal_search(&self.current.task, bound, &self.options.limits) {
            Ok(o) => o,
            Err(Error::Resource(msg)) => {
                round.status = "resource_exhausted".into();
                self.rounds.push(round);
                return Ok(Step::Stop(Termination::Incomplete(msg)));
            }
            Err(e) => return Err(e),
        };
        round.expanded = outcome.statistics.expanded;
        let step = match &outcome.status {
            SearchStatus::OptimalFound { plan, .. } => {
                round.status = "optimal_found".into();
                let original = self.current.r_image(plan)?;
                round.plan = Some(PlanSummary::new(self.task, &original));
                Step::Found(original)
            }
            SearchStatus::ProvedUnsolvable => {
                round.status = "proved_unsolvable".into();
                Step::Stop(Termination::Unsolvable)
            }
            SearchStatus::BoundExceeded { .. } => {
                round.status = "bound_exceeded".into();
                Step::Stop(Termination::BoundExceeded)
            }
        };
        self.rounds.push(round);
        Ok(step)
    }

    /// Records `plan` and forbids it. Returns a termination when the
    /// transformed task grows past the ceiling.
    fn forbid(&mut self, relation: DominanceRelation, plan: Plan) -> Result<Option<Termination>> {
        let next = self
            .current
            .forbid_further_with(relation, &plan, self.options.loopless)?
            .ok_or_else(|| {
                Error::Contract("a plan of the transformed task is already forbidden".into())
            })?;
        self.plans.push(plan);
        if next.task.actions.len() > self.options.max_actions {
            return Ok(Some(Termination::Incomplete(format!(
                "transformed task has {} actions, above the ceiling of {}",
                next.task.actions.len(),
                self.options.max_actions
            ))));
        }
        self.current = next;
        Ok(None)
    }

    fn finish(self, termination: Termination) -> PlannerResult {
        PlannerResult {
            plans: self.plans,
            trace: IterationTrace {
                rounds: self.rounds,
                termination,
            },
        }
    }
}

/// All plans of cost `<= q` up to `relation`, found in non-decreasing cost
/// order. Under `Loopless` a looped optimal plan (possible only through
/// zero-cost loops) is shortened by removing loops before it is forbidden.
pub fn plan_top_quality(
    task: &Task,
    q: Cost,
    relation: DominanceRelation,
    options: &PlannerOptions,
) -> Result<PlannerResult> {
    let mut run = Run::new(task, options);
    loop {
        let plan = match run.search(Some(q))? {
            Step::Found(p) => p,
            Step::Stop(t) => return Ok(run.finish(t)),
        };
        let plan = if relation == DominanceRelation::Loopless && !plan.is_loopless() {
            remove_loops(task, &plan)
        } else {
            plan
        };
        if let Some(t) = run.forbid(relation, plan)? {
            return Ok(run.finish(t));
        }
    }
}

/// The `k` cheapest plans, or every plan if there are fewer.
pub fn plan_top_k(task: &Task, k: usize, options: &PlannerOptions) -> Result<PlannerResult> {
    if k == 0 {
        return Err(Error::Usage("k must be positive".into()));
    }
    let mut run = Run::new(task, options);
    while run.plans.len() < k {
        let plan = match run.search(None)? {
            Step::Found(p) => p,
            Step::Stop(t) => return Ok(run.finish(t)),
        };
        if let Some(t) = run.forbid(DominanceRelation::Empty, plan)? {
            return Ok(run.finish(t));
        }
    }
    Ok(run.finish(Termination::KReached))
}
