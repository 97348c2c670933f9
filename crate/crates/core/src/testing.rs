//! Worked-example tasks and a seeded generator of small random tasks, shared
//! by the test suites and the benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::plan::{dominates, DominanceRelation, Plan};
use crate::task::{Action, ActionId, Cost, PartialAssignment, State, Task, Value, VarId, Variable};

fn act(name: &str, pre: &[(VarId, Value)], eff: &[(VarId, Value)], cost: Cost) -> Action {
    Action::new(
        name,
        pre.iter().copied().collect(),
        eff.iter().copied().collect(),
        cost,
    )
}

/// One 3-valued variable, `a: 0→1`, `b: 1→2`, goal `v0=2`.
pub fn t1() -> Task {
    Task {
        variables: vec![Variable::with_domain("v0", 3)],
        actions: vec![
            act("a", &[(0, 0)], &[(0, 1)], 1),
            act("b", &[(0, 1)], &[(0, 2)], 1),
        ],
        initial: State::new(vec![0]),
        goal: [(0, 2)].into_iter().collect(),
        metric: true,
    }
}

/// [`t1`] plus `c: 1→0`.
pub fn t1c() -> Task {
    let mut t = t1();
    t.actions.push(act("c", &[(0, 1)], &[(0, 0)], 1));
    t
}

/// Two binary variables; `a` sets `v0=1`, `b` sets `v1=1`; goal both.
pub fn two_goals() -> Task {
    Task {
        variables: vec![
            Variable::with_domain("v0", 2),
            Variable::with_domain("v1", 2),
        ],
        actions: vec![
            act("a", &[(0, 0)], &[(0, 1)], 1),
            act("b", &[(1, 0)], &[(1, 1)], 1),
        ],
        initial: State::new(vec![0, 0]),
        goal: [(0, 1), (1, 1)].into_iter().collect(),
        metric: true,
    }
}

/// [`two_goals`] plus a cost-1 action `d` setting a third variable.
pub fn two_goals_with_noop() -> Task {
    let mut t = two_goals();
    t.variables.push(Variable::with_domain("v2", 2));
    t.initial = State::new(vec![0, 0, 0]);
    t.actions.push(act("d", &[(2, 0)], &[(2, 1)], 1));
    t
}

/// [`t1`] plus `d` toggling a fresh variable, giving detours through states
/// that are not on `⟨a,b⟩`.
pub fn detour() -> Task {
    let mut t = t1();
    t.variables.push(Variable::with_domain("v1", 2));
    t.initial = State::new(vec![0, 0]);
    t.actions.push(act("d", &[(1, 0)], &[(1, 1)], 1));
    t
}

/// Whether forbidding `pi` under `relation` removes `candidate`.
pub fn forbids(relation: DominanceRelation, pi: &Plan, candidate: &Plan) -> bool {
    pi.steps() == candidate.steps() || dominates(relation, pi, candidate)
}

/// Step sequences of `plans`, sorted, duplicates kept.
pub fn sorted_steps<'a>(plans: impl IntoIterator<Item = &'a Plan>) -> Vec<Vec<ActionId>> {
    let mut v: Vec<Vec<ActionId>> = plans.into_iter().map(|p| p.steps().to_vec()).collect();
    v.sort();
    v
}

#[derive(Clone, Debug)]
pub struct RandomTaskConfig {
    pub variables: (usize, usize),
    pub max_domain: u32,
    pub actions: (usize, usize),
    pub costs: (Cost, Cost),
    /// Length of the random walk whose end state supplies the goal.
    pub walk: usize,
}

impl Default for RandomTaskConfig {
    fn default() -> Self {
        RandomTaskConfig {
            variables: (2, 4),
            max_domain: 3,
            actions: (3, 8),
            costs: (1, 3),
            walk: 4,
        }
    }
}

/// Seeded source of random tasks.
pub struct RandomTasks {
    rng: ChaCha8Rng,
    pub config: RandomTaskConfig,
}

impl RandomTasks {
    pub fn new(seed: u64, config: RandomTaskConfig) -> Self {
        RandomTasks {
            rng: ChaCha8Rng::seed_from_u64(seed),
            config,
        }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        items.choose(&mut self.rng)
    }

    fn assignment(&mut self, domains: &[u32], min: usize, max: usize) -> PartialAssignment {
        let k = self.rng.gen_range(min..=max.min(domains.len()));
        let mut vars: Vec<VarId> = (0..domains.len()).collect();
        vars.shuffle(&mut self.rng);
        vars.truncate(k);
        vars.into_iter()
            .map(|v| (v, self.rng.gen_range(0..domains[v])))
            .collect()
    }

    pub fn task(&mut self) -> Task {
        let cfg = self.config.clone();
        let nvars = self.rng.gen_range(cfg.variables.0..=cfg.variables.1);
        let domains: Vec<u32> = (0..nvars)
            .map(|_| self.rng.gen_range(2..=cfg.max_domain.max(2)))
            .collect();
        let variables = domains
            .iter()
            .enumerate()
            .map(|(i, &d)| Variable::with_domain(format!("v{}", i), d))
            .collect();
        let nactions = self.rng.gen_range(cfg.actions.0..=cfg.actions.1);
        let actions: Vec<Action> = (0..nactions)
            .map(|i| {
                let precondition = self.assignment(&domains, 0, 2);
                let effect = self.assignment(&domains, 1, 2);
                let cost = self.rng.gen_range(cfg.costs.0..=cfg.costs.1);
                Action::new(format!("o{}", i), precondition, effect, cost)
            })
            .collect();
        let initial: Vec<Value> = domains.iter().map(|&d| self.rng.gen_range(0..d)).collect();

        let mut state = initial.clone();
        for _ in 0..cfg.walk {
            let applicable: Vec<&Action> = actions
                .iter()
                .filter(|a| a.is_applicable_in(&state))
                .collect();
            let Some(a) = applicable.choose(&mut self.rng) else {
                break;
            };
            for &(v, d) in a.effect.pairs() {
                state[v] = d;
            }
        }
        let goal_size = self.rng.gen_range(1..=nvars.min(2));
        let mut vars: Vec<VarId> = (0..nvars).collect();
        vars.shuffle(&mut self.rng);
        let goal = vars[..goal_size].iter().map(|&v| (v, state[v])).collect();

        Task {
            variables,
            actions,
            initial: State::new(initial),
            goal,
            metric: true,
        }
    }
}
