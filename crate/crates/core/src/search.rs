//! Exhaustive search oracles: uniform-cost search for optimality and
//! unsolvability, and depth-first enumeration of bounded-cost plans.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use indexmap::map::Entry;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plan::{validate_plan, Plan};
use crate::task::{ActionId, Cost, State, Task, Value, VarId};

pub const DEFAULT_MAX_EXPANSIONS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Expansions allowed to a single uniform-cost search.
    pub max_expansions: u64,
    /// Nodes allowed to a single enumeration.
    pub max_enumeration_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_expansions: DEFAULT_MAX_EXPANSIONS,
            max_enumeration_nodes: 10 * DEFAULT_MAX_EXPANSIONS,
        }
    }
}

/// Decision tree over preconditions returning the actions applicable in a
/// state without scanning the whole action list.
pub struct SuccessorGenerator {
    nodes: Vec<GenNode>,
}

struct GenNode {
    immediate: Vec<ActionId>,
    switch: Option<(VarId, Vec<Option<usize>>)>,
    dont_care: Option<usize>,
}

impl SuccessorGenerator {
    pub fn new(task: &Task) -> Self {
        // Preconditions are consumed from the highest variable index down.
        let conditions: Vec<Vec<(VarId, Value)>> = task
            .actions
            .iter()
            .map(|a| a.precondition.pairs().iter().rev().copied().collect())
            .collect();
        let mut generator = SuccessorGenerator { nodes: Vec::new() };
        let items: Vec<(ActionId, usize)> = (0..task.actions.len()).map(|a| (a, 0)).collect();
        generator.build(&conditions, items);
        generator
    }

    fn build(
        &mut self,
        conditions: &[Vec<(VarId, Value)>],
        items: Vec<(ActionId, usize)>,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(GenNode {
            immediate: Vec::new(),
            switch: None,
            dont_care: None,
        });
        let mut immediate = Vec::new();
        let mut pending = Vec::new();
        for (a, pos) in items {
            if pos == conditions[a].len() {
                immediate.push(a);
            } else {
                pending.push((a, pos));
            }
        }
        self.nodes[id].immediate = immediate;
        if pending.is_empty() {
            return id;
        }
        let var = pending
            .iter()
            .map(|&(a, pos)| conditions[a][pos].0)
            .max()
            .expect("non-empty");
        let mut by_value: Vec<Vec<(ActionId, usize)>> = Vec::new();
        let mut rest = Vec::new();
        for (a, pos) in pending {
            let (v, d) = conditions[a][pos];
            if v == var {
                let d = d as usize;
                if by_value.len() <= d {
                    by_value.resize_with(d + 1, Vec::new);
                }
                by_value[d].push((a, pos + 1));
            } else {
                rest.push((a, pos));
            }
        }
        let children = by_value
            .into_iter()
            .map(|group| (!group.is_empty()).then(|| self.build(conditions, group)))
            .collect();
        let dont_care = (!rest.is_empty()).then(|| self.build(conditions, rest));
        self.nodes[id].switch = Some((var, children));
        self.nodes[id].dont_care = dont_care;
        id
    }

    /// Appends the applicable actions to `out` (unordered).
    pub fn applicable(&self, state: &[Value], out: &mut Vec<ActionId>) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            out.extend_from_slice(&node.immediate);
            if let Some((var, children)) = &node.switch {
                if let Some(Some(child)) = children.get(state[*var] as usize) {
                    stack.push(*child);
                }
            }
            if let Some(dc) = node.dont_care {
                stack.push(dc);
            }
        }
    }

    /// Applicable actions sorted by id, for deterministic expansion order.
    pub fn applicable_sorted(&self, state: &[Value]) -> Vec<ActionId> {
        let mut out = Vec::new();
        self.applicable(state, &mut out);
        out.sort_unstable();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    OptimalFound {
        cost: Cost,
        plan: Plan,
    },
    ProvedUnsolvable,
    /// Every plan, if any, costs more than the bound.
    BoundExceeded {
        bound: Cost,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStatistics {
    pub expanded: u64,
    pub generated: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub statistics: SearchStatistics,
}

impl SearchOutcome {
    /// True when the task provably has no plan of cost `<= q`.
    pub fn excludes_cost(&self, q: Cost) -> bool {
        match &self.status {
            SearchStatus::OptimalFound { cost, .. } => *cost > q,
            SearchStatus::ProvedUnsolvable => true,
            SearchStatus::BoundExceeded { bound } => *bound >= q,
        }
    }
}

struct NodeInfo {
    g: Cost,
    parent: usize,
    action: ActionId,
    closed: bool,
}

/// Uniform-cost search with full-state duplicate detection.
///
/// Ties on `g` are broken by insertion order. Nodes whose cost would exceed
/// `upper_bound` are never generated.
pub fn optimal_search(
    task: &Task,
    upper_bound: Option<Cost>,
    limits: &SearchLimits,
) -> Result<SearchOutcome> {
    let start = Instant::now();
    let generator = SuccessorGenerator::new(task);
    let mut stats = SearchStatistics::default();
    let mut nodes: IndexMap<State, NodeInfo> = IndexMap::new();
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    let mut pruned = false;

    if upper_bound.is_some_and(|b| b < 0) {
        pruned = true;
    } else {
        nodes.insert(
            task.initial.clone(),
            NodeInfo {
                g: 0,
                parent: usize::MAX,
                action: usize::MAX,
                closed: false,
            },
        );
        open.push(Reverse((0, seq, 0usize)));
        stats.generated = 1;
    }

    let mut buffer = Vec::new();
    while let Some(Reverse((g, _, id))) = open.pop() {
        let (state, info) = nodes.get_index_mut(id).expect("registered node");
        if info.closed || g > info.g {
            continue;
        }
        info.closed = true;
        stats.expanded += 1;
        if stats.expanded > limits.max_expansions {
            return Err(Error::Resource(format!(
                "uniform-cost search exceeded {} expansions",
                limits.max_expansions
            )));
        }
        if task.is_goal(state) {
            let mut steps = Vec::new();
            let mut cur = id;
            while cur != 0 {
                let info = &nodes[cur];
                steps.push(info.action);
                cur = info.parent;
            }
            steps.reverse();
            let plan = validate_plan(task, &steps).expect("search path is a plan");
            stats.elapsed = start.elapsed();
            return Ok(SearchOutcome {
                status: SearchStatus::OptimalFound { cost: g, plan },
                statistics: stats,
            });
        }
        let state = state.clone();
        buffer.clear();
        generator.applicable(&state, &mut buffer);
        buffer.sort_unstable();
        for &a in &buffer {
            let action = &task.actions[a];
            let succ_g = g + action.cost;
            if upper_bound.is_some_and(|b| succ_g > b) {
                pruned = true;
                continue;
            }
            let mut succ = state.clone();
            succ.apply(&action.effect);
            stats.generated += 1;
            let succ_id = match nodes.entry(succ) {
                Entry::Occupied(mut e) => {
                    let info = e.get_mut();
                    if info.closed || info.g <= succ_g {
                        continue;
                    }
                    info.g = succ_g;
                    info.parent = id;
                    info.action = a;
                    e.index()
                }
                Entry::Vacant(e) => {
                    let idx = e.index();
                    e.insert(NodeInfo {
                        g: succ_g,
                        parent: id,
                        action: a,
                        closed: false,
                    });
                    idx
                }
            };
            seq += 1;
            open.push(Reverse((succ_g, seq, succ_id)));
        }
    }

    stats.elapsed = start.elapsed();
    let status = match (pruned, upper_bound) {
        (true, Some(bound)) => SearchStatus::BoundExceeded { bound },
        _ => SearchStatus::ProvedUnsolvable,
    };
    Ok(SearchOutcome {
        status,
        statistics: stats,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationResult {
    pub plans: Vec<Plan>,
    /// False when the length cap cut off a branch that could have continued.
    pub complete: bool,
    pub bound_used: Option<Cost>,
    pub length_cap: Option<usize>,
    pub nodes: u64,
}

struct Enumerator<'t> {
    task: &'t Task,
    generator: SuccessorGenerator,
    bound: Option<Cost>,
    length_cap: Option<usize>,
    loopless: bool,
    node_limit: u64,
    nodes: u64,
    complete: bool,
    path: Vec<ActionId>,
    on_path: HashSet<State>,
    plans: Vec<Plan>,
}

impl Enumerator<'_> {
    fn visit(&mut self, state: &State, g: Cost) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::Resource(format!(
                "plan enumeration exceeded {} nodes",
                self.node_limit
            )));
        }
        if self.task.is_goal(state) {
            let plan = validate_plan(self.task, &self.path).expect("enumerated path is a plan");
            self.plans.push(plan);
        }
        let applicable = self.generator.applicable_sorted(state);
        for a in applicable {
            let action = &self.task.actions[a];
            let succ_g = g + action.cost;
            if self.bound.is_some_and(|b| succ_g > b) {
                continue;
            }
            if self.length_cap.is_some_and(|cap| self.path.len() >= cap) {
                self.complete = false;
                continue;
            }
            let mut succ = state.clone();
            succ.apply(&action.effect);
            if self.loopless {
                if self.on_path.contains(&succ) {
                    continue;
                }
                self.on_path.insert(succ.clone());
            }
            self.path.push(a);
            self.visit(&succ, succ_g)?;
            self.path.pop();
            if self.loopless {
                self.on_path.remove(&succ);
            }
        }
        Ok(())
    }
}

/// All plans of cost `<= q` (and length `<= length_cap`), as distinct step
/// sequences, in depth-first order.
pub fn enumerate_plans(
    task: &Task,
    q: Cost,
    length_cap: Option<usize>,
    limits: &SearchLimits,
) -> Result<EnumerationResult> {
    if length_cap.is_none() && task.has_zero_cost_action() {
        return Err(Error::Usage(
            "zero-cost actions make bounded-cost enumeration infinite; a length cap is required"
                .into(),
        ));
    }
    run_enumeration(task, Some(q), length_cap, false, limits)
}

/// All loopless plans, optionally restricted to cost `<= q`. Always
/// complete: the number of loopless paths is finite.
pub fn enumerate_loopless(
    task: &Task,
    q: Option<Cost>,
    limits: &SearchLimits,
) -> Result<EnumerationResult> {
    run_enumeration(task, q, None, true, limits)
}

fn run_enumeration(
    task: &Task,
    bound: Option<Cost>,
    length_cap: Option<usize>,
    loopless: bool,
    limits: &SearchLimits,
) -> Result<EnumerationResult> {
    let mut e = Enumerator {
        task,
        generator: SuccessorGenerator::new(task),
        bound,
        length_cap,
        loopless,
        node_limit: limits.max_enumeration_nodes,
        nodes: 0,
        complete: true,
        path: Vec::new(),
        on_path: HashSet::new(),
        plans: Vec::new(),
    };
    if bound.is_some_and(|b| b < 0) {
        return Ok(EnumerationResult {
            plans: Vec::new(),
            complete: true,
            bound_used: bound,
            length_cap,
            nodes: 0,
        });
    }
    if loopless {
        e.on_path.insert(task.initial.clone());
    }
    e.visit(&task.initial, 0)?;
    Ok(EnumerationResult {
        plans: e.plans,
        complete: e.complete,
        bound_used: bound,
        length_cap,
        nodes: e.nodes,
    })
}

/// Number of states reachable from the initial state.
pub fn count_reachable_states(task: &Task, limits: &SearchLimits) -> Result<usize> {
    let generator = SuccessorGenerator::new(task);
    let mut seen = HashSet::new();
    seen.insert(task.initial.clone());
    let mut queue = vec![task.initial.clone()];
    let mut buffer = Vec::new();
    while let Some(s) = queue.pop() {
        if seen.len() as u64 > limits.max_expansions {
            return Err(Error::Resource("reachable state space too large".into()));
        }
        buffer.clear();
        generator.applicable(&s, &mut buffer);
        for &a in &buffer {
            let mut succ = s.clone();
            succ.apply(&task.actions[a].effect);
            if seen.insert(succ.clone()) {
                queue.push(succ);
            }
        }
    }
    Ok(seen.len())
}
