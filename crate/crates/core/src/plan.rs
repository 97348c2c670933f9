//! Plans, action multisets and the dominance relations between plans.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::task::{ActionId, Cost, State, Task};

/// A validated plan: the step sequence together with its cost and the
/// states `s_0..s_n` it traverses.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Plan {
    steps: Vec<ActionId>,
    cost: Cost,
    traversal: Vec<State>,
}

impl Plan {
    pub fn steps(&self) -> &[ActionId] {
        &self.steps
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }

    pub fn traversal(&self) -> &[State] {
        &self.traversal
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn multiset(&self) -> ActionMultiset {
        ActionMultiset::from_steps(&self.steps)
    }

    /// True iff `s_0..s_n` are pairwise distinct.
    pub fn is_loopless(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.traversal.len());
        self.traversal.iter().all(|s| seen.insert(s))
    }

    pub fn action_names<'t>(&self, task: &'t Task) -> Vec<&'t str> {
        self.steps
            .iter()
            .map(|&a| task.actions[a].name.as_str())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionReason {
    UnknownAction,
    Inapplicable,
    GoalUnsatisfied,
}

/// Why a step sequence is not a plan. `step` is the index of the first
/// failing step, or the sequence length when the goal is not reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanRejection {
    pub step: usize,
    pub reason: RejectionReason,
}

impl fmt::Display for PlanRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.reason {
            RejectionReason::UnknownAction => write!(f, "step {}: unknown action", self.step),
            RejectionReason::Inapplicable => write!(f, "step {}: action not applicable", self.step),
            RejectionReason::GoalUnsatisfied => write!(f, "final state does not satisfy the goal"),
        }
    }
}

impl std::error::Error for PlanRejection {}

pub fn validate_plan(task: &Task, steps: &[ActionId]) -> std::result::Result<Plan, PlanRejection> {
    let mut state = task.initial.clone();
    let mut traversal = Vec::with_capacity(steps.len() + 1);
    let mut cost = 0;
    for (i, &a) in steps.iter().enumerate() {
        let action = task.actions.get(a).ok_or(PlanRejection {
            step: i,
            reason: RejectionReason::UnknownAction,
        })?;
        if !action.is_applicable_in(&state) {
            return Err(PlanRejection {
                step: i,
                reason: RejectionReason::Inapplicable,
            });
        }
        let mut next = state.clone();
        next.apply(&action.effect);
        traversal.push(std::mem::replace(&mut state, next));
        cost += action.cost;
    }
    if !task.is_goal(&state) {
        return Err(PlanRejection {
            step: steps.len(),
            reason: RejectionReason::GoalUnsatisfied,
        });
    }
    traversal.push(state);
    Ok(Plan {
        steps: steps.to_vec(),
        cost,
        traversal,
    })
}

/// Removes loops greedily from left to right: whenever the walk returns to a
/// state already on the kept prefix, the steps in between are dropped. The
/// result is a loopless plan whose states are a subset of the input's.
pub fn remove_loops(task: &Task, plan: &Plan) -> Plan {
    let mut states: Vec<&State> = vec![&plan.traversal[0]];
    let mut steps = Vec::new();
    for (i, &a) in plan.steps.iter().enumerate() {
        let next = &plan.traversal[i + 1];
        if let Some(pos) = states.iter().position(|s| *s == next) {
            states.truncate(pos + 1);
            steps.truncate(pos);
        } else {
            states.push(next);
            steps.push(a);
        }
    }
    validate_plan(task, &steps).expect("loop removal preserves plan validity")
}

/// Multiset of action ids, `M(π)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionMultiset(BTreeMap<ActionId, usize>);

impl ActionMultiset {
    pub fn from_steps(steps: &[ActionId]) -> Self {
        let mut counts = BTreeMap::new();
        for &a in steps {
            *counts.entry(a).or_insert(0) += 1;
        }
        ActionMultiset(counts)
    }

    pub fn count(&self, action: ActionId) -> usize {
        self.0.get(&action).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ActionId, usize)> + '_ {
        self.0.iter().map(|(&a, &m)| (a, m))
    }

    pub fn is_submultiset_of(&self, other: &ActionMultiset) -> bool {
        self.0.iter().all(|(&a, &m)| other.count(a) >= m)
    }

    pub fn is_strict_submultiset_of(&self, other: &ActionMultiset) -> bool {
        self.is_submultiset_of(other) && self.total() < other.total()
    }
}

/// The built-in dominance relations over plans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceRelation {
    /// No plan dominates another (plain top-quality).
    Empty,
    /// Equal action multisets.
    Unordered,
    /// Strict sub-multiset.
    MultisetSubset,
    /// A loopless plan dominates every plan revisiting one of its states.
    Loopless,
}

impl DominanceRelation {
    pub const ALL: [DominanceRelation; 4] = [
        DominanceRelation::Empty,
        DominanceRelation::Unordered,
        DominanceRelation::MultisetSubset,
        DominanceRelation::Loopless,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DominanceRelation::Empty => "none",
            DominanceRelation::Unordered => "unordered",
            DominanceRelation::MultisetSubset => "subset",
            DominanceRelation::Loopless => "loopless",
        }
    }
}

impl fmt::Display for DominanceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DominanceRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "empty" => Ok(DominanceRelation::Empty),
            "unordered" => Ok(DominanceRelation::Unordered),
            "subset" => Ok(DominanceRelation::MultisetSubset),
            "loopless" => Ok(DominanceRelation::Loopless),
            _ => Err(Error::Usage(format!("unknown relation `{}`", s))),
        }
    }
}

/// `(pi, pi_prime) ∈ R`.
pub fn dominates(relation: DominanceRelation, pi: &Plan, pi_prime: &Plan) -> bool {
    match relation {
        DominanceRelation::Empty => false,
        DominanceRelation::Unordered => pi.multiset() == pi_prime.multiset(),
        DominanceRelation::MultisetSubset => {
            pi.multiset().is_strict_submultiset_of(&pi_prime.multiset())
        }
        DominanceRelation::Loopless => {
            if !pi.is_loopless() {
                return false;
            }
            let on_pi: HashSet<&State> = pi.traversal.iter().collect();
            let mut visits: HashMap<&State, usize> = HashMap::new();
            pi_prime
                .traversal
                .iter()
                .filter(|s| on_pi.contains(s))
                .any(|s| {
                    let n = visits.entry(s).or_insert(0);
                    *n += 1;
                    *n > 1
                })
        }
    }
}

/// A plan file as read from disk, before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanFile {
    pub steps: Vec<ActionId>,
    pub declared_cost: Option<Cost>,
}

/// Parses `(action name)` lines; `;` starts a comment. The conventional
/// `; cost = N (...)` trailer is captured for cross-checking.
pub fn parse_plan_file(task: &Task, text: &str) -> Result<PlanFile> {
    let index = task.action_name_index().ok_or_else(|| {
        Error::Usage("task has duplicate action names; name-based plans are ambiguous".into())
    })?;
    let mut steps = Vec::new();
    let mut declared_cost = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix(';') {
            if let Some(rest) = comment.trim().strip_prefix("cost") {
                if let Some(value) = rest.trim().strip_prefix('=') {
                    let number = value.split_whitespace().next().unwrap_or("");
                    declared_cost = number.parse().ok();
                }
            }
            continue;
        }
        let name = line
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| Error::parse(i + 1, format!("expected `(action)`, found `{}`", line)))?
            .trim();
        let id = index
            .get(name)
            .ok_or_else(|| Error::parse(i + 1, format!("unknown action `{}`", name)))?;
        steps.push(*id);
    }
    Ok(PlanFile {
        steps,
        declared_cost,
    })
}

pub fn format_plan(task: &Task, plan: &Plan) -> String {
    let mut out = String::new();
    for name in plan.action_names(task) {
        out.push('(');
        out.push_str(name);
        out.push_str(")\n");
    }
    let kind = if task.metric {
        "general cost"
    } else {
        "unit cost"
    };
    out.push_str(&format!("; cost = {} ({})\n", plan.cost, kind));
    out
}
