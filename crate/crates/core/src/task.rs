//! SAS+ task representation and its state-transition semantics.
//!
//! Values are dense indices `0..domain_size`; value names are carried as
//! metadata only. A [`Task`] is immutable once built.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VarId = usize;
pub type ActionId = usize;
pub type Value = u32;
pub type Cost = i64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub domain_size: u32,
    pub value_names: Vec<String>,
}

impl Variable {
    /// A variable whose value names are generated as `Atom <name>=<i>`.
    pub fn with_domain(name: impl Into<String>, domain_size: u32) -> Self {
        let name = name.into();
        let value_names = (0..domain_size)
            .map(|i| format!("Atom {}={}", name, i))
            .collect();
        Variable {
            name,
            domain_size,
            value_names,
        }
    }
}

/// A set of `(variable, value)` pairs kept sorted by variable.
///
/// Construction does not reject a variable appearing twice so that malformed
/// input can be reported by [`Task::validate`] instead of failing early.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialAssignment(Vec<(VarId, Value)>);

impl PartialAssignment {
    pub fn new(mut pairs: Vec<(VarId, Value)>) -> Self {
        pairs.sort();
        pairs.dedup();
        PartialAssignment(pairs)
    }

    pub fn empty() -> Self {
        PartialAssignment(Vec::new())
    }

    pub fn pairs(&self) -> &[(VarId, Value)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: VarId) -> Option<Value> {
        self.0
            .binary_search_by_key(&var, |&(v, _)| v)
            .ok()
            .map(|i| self.0[i].1)
    }

    pub fn contains_var(&self, var: VarId) -> bool {
        self.get(var).is_some()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    /// `p ⊆ s`: the state agrees with every pair.
    pub fn holds_in(&self, state: &[Value]) -> bool {
        self.0.iter().all(|&(v, d)| state.get(v) == Some(&d))
    }

    /// Union of two assignments, `None` when they disagree on a variable.
    pub fn merged(&self, other: &PartialAssignment) -> Option<PartialAssignment> {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if a.1 != b.1 {
                        return None;
                    }
                    out.push(a);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Some(PartialAssignment(out))
    }

    /// Like [`merged`](Self::merged) but later pairs overwrite earlier ones.
    pub fn overwritten_by(&self, other: &PartialAssignment) -> PartialAssignment {
        let mut pairs: Vec<_> = self
            .0
            .iter()
            .copied()
            .filter(|&(v, _)| !other.contains_var(v))
            .collect();
        pairs.extend_from_slice(&other.0);
        PartialAssignment::new(pairs)
    }

    /// Pairs whose variable satisfies `keep`.
    pub fn restricted(&self, mut keep: impl FnMut(VarId) -> bool) -> PartialAssignment {
        PartialAssignment(self.0.iter().copied().filter(|&(v, _)| keep(v)).collect())
    }
}

impl FromIterator<(VarId, Value)> for PartialAssignment {
    fn from_iter<I: IntoIterator<Item = (VarId, Value)>>(iter: I) -> Self {
        PartialAssignment::new(iter.into_iter().collect())
    }
}

/// A full assignment, one value per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State(Vec<Value>);

impl State {
    pub fn new(values: Vec<Value>) -> Self {
        State(values)
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Value> {
        self.0
    }

    /// Overwrites the effect variables in place.
    pub fn apply(&mut self, effect: &PartialAssignment) {
        for &(v, d) in effect.pairs() {
            self.0[v] = d;
        }
    }
}

impl Deref for State {
    type Target = [Value];

    fn deref(&self) -> &[Value] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub name: String,
    pub precondition: PartialAssignment,
    pub effect: PartialAssignment,
    pub cost: Cost,
}

impl Action {
    pub fn new(
        name: impl Into<String>,
        precondition: PartialAssignment,
        effect: PartialAssignment,
        cost: Cost,
    ) -> Self {
        Action {
            name: name.into(),
            precondition,
            effect,
            cost,
        }
    }

    /// Precondition restricted to variables the action does not affect.
    pub fn prevail(&self) -> PartialAssignment {
        self.precondition
            .restricted(|v| !self.effect.contains_var(v))
    }

    pub fn is_applicable_in(&self, state: &[Value]) -> bool {
        self.precondition.holds_in(state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub variables: Vec<Variable>,
    pub actions: Vec<Action>,
    pub initial: State,
    pub goal: PartialAssignment,
    /// Whether the SAS metric section declared action costs.
    pub metric: bool,
}

/// One violated task invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl Task {
    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn action(&self, id: ActionId) -> Result<&Action> {
        self.actions.get(id).ok_or_else(|| {
            Error::Usage(format!(
                "action id {} out of range (task has {} actions)",
                id,
                self.actions.len()
            ))
        })
    }

    pub fn is_applicable(&self, state: &State, action: ActionId) -> Result<bool> {
        Ok(self.action(action)?.is_applicable_in(state))
    }

    pub fn successor(&self, state: &State, action: ActionId) -> Result<State> {
        let a = self.action(action)?;
        if !a.is_applicable_in(state) {
            return Err(Error::Contract(format!(
                "action {} ({}) is not applicable",
                action, a.name
            )));
        }
        let mut next = state.clone();
        next.apply(&a.effect);
        Ok(next)
    }

    pub fn is_goal(&self, state: &[Value]) -> bool {
        self.goal.holds_in(state)
    }

    pub fn has_zero_cost_action(&self) -> bool {
        self.actions.iter().any(|a| a.cost == 0)
    }

    /// Action ids in name order; `None` when two actions share a name.
    pub fn action_name_index(&self) -> Option<std::collections::HashMap<&str, ActionId>> {
        let mut index = std::collections::HashMap::with_capacity(self.actions.len());
        for (id, a) in self.actions.iter().enumerate() {
            if index.insert(a.name.as_str(), id).is_some() {
                return None;
            }
        }
        Some(index)
    }

    /// Every violated invariant; empty iff the task is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut diag = |location: String, message: String| {
            out.push(Diagnostic { location, message });
        };

        for (i, var) in self.variables.iter().enumerate() {
            if var.domain_size == 0 {
                diag(
                    format!("variable {}", i),
                    "domain size must be at least 1".into(),
                );
            }
            if var.value_names.len() != var.domain_size as usize {
                diag(
                    format!("variable {}", i),
                    format!(
                        "{} value names for domain size {}",
                        var.value_names.len(),
                        var.domain_size
                    ),
                );
            }
        }

        if self.initial.len() != self.variables.len() {
            diag(
                "initial state".into(),
                format!(
                    "has {} values for {} variables",
                    self.initial.len(),
                    self.variables.len()
                ),
            );
        }
        for (v, &d) in self.initial.iter().enumerate() {
            if let Some(var) = self.variables.get(v) {
                if d >= var.domain_size {
                    diag(
                        "initial state".into(),
                        format!("value {} out of range for variable {}", d, v),
                    );
                }
            }
        }

        let mut check_assignment = |location: String, p: &PartialAssignment| {
            let mut last = None;
            for &(v, d) in p.pairs() {
                if last == Some(v) {
                    diag(location.clone(), format!("variable {} assigned twice", v));
                }
                last = Some(v);
                match self.variables.get(v) {
                    None => diag(location.clone(), format!("unknown variable {}", v)),
                    Some(var) if d >= var.domain_size => diag(
                        location.clone(),
                        format!(
                            "value {} out of range for variable {} (domain size {})",
                            d, v, var.domain_size
                        ),
                    ),
                    Some(_) => {}
                }
            }
        };

        check_assignment("goal".into(), &self.goal);
        for (i, a) in self.actions.iter().enumerate() {
            check_assignment(
                format!("action {} ({}) precondition", i, a.name),
                &a.precondition,
            );
            check_assignment(format!("action {} ({}) effect", i, a.name), &a.effect);
        }
        for (i, a) in self.actions.iter().enumerate() {
            if a.cost < 0 {
                out.push(Diagnostic {
                    location: format!("action {} ({})", i, a.name),
                    message: format!("negative cost {}", a.cost),
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn t1() -> Task {
        Task {
            variables: vec![Variable::with_domain("v0", 3)],
            actions: vec![
                Action::new(
                    "a",
                    [(0, 0)].into_iter().collect(),
                    [(0, 1)].into_iter().collect(),
                    1,
                ),
                Action::new(
                    "b",
                    [(0, 1)].into_iter().collect(),
                    [(0, 2)].into_iter().collect(),
                    1,
                ),
            ],
            initial: State::new(vec![0]),
            goal: [(0, 2)].into_iter().collect(),
            metric: false,
        }
    }

    #[test]
    fn applicability_follows_precondition() {
        let t = t1();
        assert!(t.is_applicable(&State::new(vec![0]), 0).unwrap());
        assert!(!t.is_applicable(&State::new(vec![1]), 0).unwrap());
        assert!(t.is_applicable(&State::new(vec![1]), 1).unwrap());
        assert!(matches!(
            t.is_applicable(&State::new(vec![0]), 7),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn successor_applies_effect() {
        let t = t1();
        assert_eq!(
            t.successor(&State::new(vec![0]), 0).unwrap(),
            State::new(vec![1])
        );
        assert_eq!(
            t.successor(&State::new(vec![1]), 1).unwrap(),
            State::new(vec![2])
        );
        assert!(matches!(
            t.successor(&State::new(vec![0]), 1),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn successor_leaves_other_variables_alone() {
        let t = Task {
            variables: vec![Variable::with_domain("x", 2), Variable::with_domain("y", 2)],
            actions: vec![Action::new(
                "flip",
                PartialAssignment::empty(),
                [(0, 1)].into_iter().collect(),
                1,
            )],
            initial: State::new(vec![0, 1]),
            goal: PartialAssignment::empty(),
            metric: true,
        };
        assert_eq!(t.successor(&t.initial, 0).unwrap(), State::new(vec![1, 1]));
    }

    #[test]
    fn prevail_excludes_affected_variables() {
        let a = Action::new(
            "a",
            [(0, 0), (1, 1)].into_iter().collect(),
            [(0, 1)].into_iter().collect(),
            1,
        );
        assert_eq!(a.prevail(), [(1, 1)].into_iter().collect());
    }

    #[test]
    fn validate_reports_each_violation() {
        let t = t1();
        assert!(t.validate().is_empty());

        let mut bad_goal = t1();
        bad_goal.goal = [(0, 3)].into_iter().collect();
        assert_eq!(bad_goal.validate().len(), 1);

        let mut bad_cost = t1();
        bad_cost.actions[0].cost = -1;
        assert_eq!(bad_cost.validate().len(), 1);

        let mut dup = t1();
        dup.actions[1].precondition = PartialAssignment::new(vec![(0, 1), (0, 2)]);
        assert_eq!(dup.validate().len(), 1);
    }

    #[test]
    fn merged_detects_conflicts() {
        let p: PartialAssignment = [(0, 1), (2, 0)].into_iter().collect();
        let q: PartialAssignment = [(1, 1), (2, 0)].into_iter().collect();
        let r: PartialAssignment = [(2, 1)].into_iter().collect();
        assert_eq!(
            p.merged(&q),
            Some([(0, 1), (1, 1), (2, 0)].into_iter().collect())
        );
        assert_eq!(p.merged(&r), None);
    }
}
