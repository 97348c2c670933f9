//! Plan-forbidding task transformations.
//!
//! Every transformation maps a task `Π` to a task `Π'` whose plans are the
//! plans of `Π` minus a forbidden set, together with a cost-preserving map
//! `r` from the actions of `Π'` back to the actions of `Π`.
//!
//! Transformations compose: forbidding a further plan lifts it into the
//! current transformed task and adds one more layer on top. Layers only
//! append variables, so the first `original_variables` variables of any
//! transformed task are the variables of the original task, and each layer
//! reasons about actions through their original labels.

mod cover;
mod exact;
mod loopless;
mod multiset;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::plan::{validate_plan, DominanceRelation, Plan, PlanRejection, RejectionReason};
use crate::task::{Action, ActionId, PartialAssignment, State, Task, Value, VarId, Variable};

pub use loopless::LooplessOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Identity,
    ExactPlan,
    Unordered,
    Superset,
    Loopless,
}

impl TransformKind {
    pub fn for_relation(relation: DominanceRelation) -> Self {
        match relation {
            DominanceRelation::Empty => TransformKind::ExactPlan,
            DominanceRelation::Unordered => TransformKind::Unordered,
            DominanceRelation::MultisetSubset => TransformKind::Superset,
            DominanceRelation::Loopless => TransformKind::Loopless,
        }
    }
}

/// A plan that was not forbidden because an earlier layer already forbids it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkippedPlan {
    pub index: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct TransformResult {
    pub task: Task,
    /// `r`: action of `task` → action of the original task.
    pub mapping: Vec<ActionId>,
    pub kind: TransformKind,
    /// Plans (of the original task) forbidden by the layers, in order.
    pub source_plans: Vec<Plan>,
    pub skipped: Vec<SkippedPlan>,
    original: Arc<Task>,
}

/// Outcome of lifting an original plan into a transformed task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForwardMapped {
    /// The unique lifted sequence, a plan of the transformed task.
    Lifted(Plan),
    /// The plan is forbidden: its lift gets stuck or misses the goal.
    Forbidden(PlanRejection),
}

impl TransformResult {
    /// The trivial transformation: same task, `r` = identity.
    pub fn identity(task: &Task) -> Self {
        TransformResult {
            task: task.clone(),
            mapping: (0..task.actions.len()).collect(),
            kind: TransformKind::Identity,
            source_plans: Vec::new(),
            skipped: Vec::new(),
            original: Arc::new(task.clone()),
        }
    }

    pub fn original(&self) -> &Task {
        &self.original
    }

    pub fn original_variables(&self) -> usize {
        self.original.variables.len()
    }

    /// `r(ρ)` for a plan of the transformed task, validated in the original.
    pub fn r_image(&self, plan: &Plan) -> Result<Plan> {
        let steps: Vec<ActionId> = plan.steps().iter().map(|&a| self.mapping[a]).collect();
        validate_plan(&self.original, &steps).map_err(|e| {
            Error::Contract(format!("r-image is not a plan of the original task: {}", e))
        })
    }

    /// Lifts `plan` (a plan of the original task) step by step through the
    /// unique applicable copy of each action.
    pub fn forward_map(&self, plan: &Plan) -> Result<ForwardMapped> {
        validate_plan(&self.original, plan.steps()).map_err(|e| {
            Error::Usage(format!("input is not a plan of the original task: {}", e))
        })?;
        let mut copies: BTreeMap<ActionId, Vec<ActionId>> = BTreeMap::new();
        for (new, &orig) in self.mapping.iter().enumerate() {
            copies.entry(orig).or_default().push(new);
        }
        let mut state = self.task.initial.clone();
        let mut lifted = Vec::with_capacity(plan.len());
        for (i, &a) in plan.steps().iter().enumerate() {
            let mut applicable = copies
                .get(&a)
                .into_iter()
                .flatten()
                .copied()
                .filter(|&c| self.task.actions[c].is_applicable_in(&state));
            let Some(copy) = applicable.next() else {
                return Ok(ForwardMapped::Forbidden(PlanRejection {
                    step: i,
                    reason: RejectionReason::Inapplicable,
                }));
            };
            if let Some(other) = applicable.next() {
                return Err(Error::Contract(format!(
                    "copies {} and {} of action {} are both applicable",
                    self.task.actions[copy].name, self.task.actions[other].name, a
                )));
            }
            state.apply(&self.task.actions[copy].effect);
            lifted.push(copy);
        }
        match validate_plan(&self.task, &lifted) {
            Ok(p) => Ok(ForwardMapped::Lifted(p)),
            Err(rejection) => Ok(ForwardMapped::Forbidden(rejection)),
        }
    }

    /// Adds a layer forbidding `plan` (and what it dominates under
    /// `relation`). Returns `None` when `plan` is already forbidden.
    pub fn forbid_further(
        &self,
        relation: DominanceRelation,
        plan: &Plan,
    ) -> Result<Option<TransformResult>> {
        self.forbid_further_with(relation, plan, LooplessOptions::default())
    }

    pub fn forbid_further_with(
        &self,
        relation: DominanceRelation,
        plan: &Plan,
        options: LooplessOptions,
    ) -> Result<Option<TransformResult>> {
        if relation == DominanceRelation::Loopless && !plan.is_loopless() {
            return Err(Error::Contract(
                "the loopless transformation requires a loopless plan".into(),
            ));
        }
        let lifted = match self.forward_map(plan)? {
            ForwardMapped::Lifted(p) => p,
            ForwardMapped::Forbidden(_) => return Ok(None),
        };
        let layer = LayerInput {
            base: &self.task,
            labels: &self.mapping,
            observed: self.original_variables(),
            lifted: &lifted,
            tag: self.source_plans.len(),
        };
        let built = match relation {
            DominanceRelation::Empty => exact::build(&layer),
            DominanceRelation::Unordered => multiset::build_unordered(&layer),
            DominanceRelation::MultisetSubset => multiset::build_superset(&layer),
            DominanceRelation::Loopless => loopless::build(&layer, options),
        };
        let mut source_plans = self.source_plans.clone();
        source_plans.push(plan.clone());
        Ok(Some(TransformResult {
            task: built.task,
            mapping: built.labels,
            kind: TransformKind::for_relation(relation),
            source_plans,
            skipped: self.skipped.clone(),
            original: Arc::clone(&self.original),
        }))
    }

    /// The `r` map as `{new action name: original action name}`.
    pub fn mapping_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .mapping
            .iter()
            .enumerate()
            .map(|(new, &orig)| {
                (
                    self.task.actions[new].name.clone(),
                    serde_json::Value::String(self.original.actions[orig].name.clone()),
                )
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

fn single(task: &Task, plan: &Plan, relation: DominanceRelation) -> Result<TransformResult> {
    let plan = revalidate(task, plan)?;
    Ok(TransformResult::identity(task)
        .forbid_further(relation, &plan)?
        .expect("a valid plan is never forbidden by the identity transformation"))
}

fn revalidate(task: &Task, plan: &Plan) -> Result<Plan> {
    validate_plan(task, plan.steps())
        .map_err(|e| Error::Usage(format!("plan is not valid for the task: {}", e)))
}

/// Forbids exactly `plan`.
pub fn forbid_exact_plan(task: &Task, plan: &Plan) -> Result<TransformResult> {
    single(task, plan, DominanceRelation::Empty)
}

/// Forbids every plan with the same action multiset as `plan`.
pub fn forbid_unordered(task: &Task, plan: &Plan) -> Result<TransformResult> {
    single(task, plan, DominanceRelation::Unordered)
}

/// Forbids `plan` and every plan whose action multiset strictly contains
/// the multiset of `plan`.
pub fn forbid_superset(task: &Task, plan: &Plan) -> Result<TransformResult> {
    single(task, plan, DominanceRelation::MultisetSubset)
}

/// Forbids the loopless `plan` and every plan visiting one of its states
/// more than once.
pub fn forbid_loopless(task: &Task, plan: &Plan) -> Result<TransformResult> {
    single(task, plan, DominanceRelation::Loopless)
}

pub fn forbid_loopless_with(
    task: &Task,
    plan: &Plan,
    options: LooplessOptions,
) -> Result<TransformResult> {
    let plan = revalidate(task, plan)?;
    Ok(TransformResult::identity(task)
        .forbid_further_with(DominanceRelation::Loopless, &plan, options)?
        .expect("a valid plan is never forbidden by the identity transformation"))
}

/// Forbids the extended set of `plans` under `relation` by composing the
/// relation's single-plan transformation. Plans already forbidden by an
/// earlier layer are skipped and recorded in [`TransformResult::skipped`].
pub fn forbid_set(
    task: &Task,
    plans: &[Plan],
    relation: DominanceRelation,
) -> Result<TransformResult> {
    let mut current = TransformResult::identity(task);
    let mut skipped = Vec::new();
    for (index, plan) in plans.iter().enumerate() {
        let plan = revalidate(task, plan)?;
        match current.forbid_further(relation, &plan)? {
            Some(next) => current = next,
            None => skipped.push(SkippedPlan {
                index,
                reason: "already forbidden by an earlier plan".into(),
            }),
        }
    }
    if !plans.is_empty() && current.kind == TransformKind::Identity {
        current.kind = TransformKind::for_relation(relation);
    }
    current.skipped = skipped;
    Ok(current)
}

/// What a layer builder sees.
pub(crate) struct LayerInput<'a> {
    pub base: &'a Task,
    /// Original action of each base action.
    pub labels: &'a [ActionId],
    /// Number of original variables (a prefix of the base variables).
    pub observed: usize,
    /// The forbidden plan, lifted into the base task.
    pub lifted: &'a Plan,
    /// Layer number, used to keep variable names unique.
    pub tag: usize,
}

impl LayerInput<'_> {
    pub fn steps(&self) -> &[ActionId] {
        self.lifted.steps()
    }

    pub fn traversal(&self) -> &[State] {
        self.lifted.traversal()
    }

    pub fn n(&self) -> usize {
        self.lifted.len()
    }
}

pub(crate) struct BuiltLayer {
    pub task: Task,
    pub labels: Vec<ActionId>,
}

/// Accumulates the variables and action copies of a new layer.
pub(crate) struct LayerBuilder<'a> {
    input: &'a LayerInput<'a>,
    variables: Vec<Variable>,
    initial: Vec<Value>,
    goal: Vec<(VarId, Value)>,
    actions: Vec<Action>,
    labels: Vec<ActionId>,
}

impl<'a> LayerBuilder<'a> {
    pub fn new(input: &'a LayerInput<'a>) -> Self {
        LayerBuilder {
            input,
            variables: input.base.variables.clone(),
            initial: input.base.initial.values().to_vec(),
            goal: input.base.goal.pairs().to_vec(),
            actions: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn add_variable(&mut self, name: &str, values: &[String], initial: Value) -> VarId {
        let id = self.variables.len();
        self.variables.push(Variable {
            name: format!("forbid{}-{}", self.input.tag, name),
            domain_size: values.len() as u32,
            value_names: values.to_vec(),
        });
        self.initial.push(initial);
        id
    }

    pub fn add_flag(&mut self, name: &str, initial: bool) -> VarId {
        self.add_variable(
            name,
            &["F".to_string(), "T".to_string()],
            Value::from(initial),
        )
    }

    pub fn add_counter(&mut self, name: &str, max: usize, initial: Value) -> VarId {
        let values: Vec<String> = (0..=max).map(|i| i.to_string()).collect();
        self.add_variable(name, &values, initial)
    }

    pub fn add_goal(&mut self, var: VarId, value: Value) {
        self.goal.push((var, value));
    }

    /// Adds a copy of base action `base` with extra precondition and effect
    /// pairs. Copies whose precondition is contradictory are dropped.
    pub fn add_copy(
        &mut self,
        base: ActionId,
        suffix: &str,
        extra_pre: &[(VarId, Value)],
        extra_eff: &[(VarId, Value)],
    ) {
        let action = &self.input.base.actions[base];
        let extra_pre: PartialAssignment = extra_pre.iter().copied().collect();
        let Some(precondition) = action.precondition.merged(&extra_pre) else {
            return;
        };
        let effect = action
            .effect
            .overwritten_by(&extra_eff.iter().copied().collect());
        self.actions.push(Action {
            name: format!("{}@{}", action.name, suffix),
            precondition,
            effect,
            cost: action.cost,
        });
        self.labels.push(self.input.labels[base]);
    }

    pub fn finish(self) -> BuiltLayer {
        BuiltLayer {
            task: Task {
                variables: self.variables,
                actions: self.actions,
                initial: State::new(self.initial),
                goal: PartialAssignment::new(self.goal),
                metric: self.input.base.metric,
            },
            labels: self.labels,
        }
    }
}

#[cfg(test)]
mod tests;
