//! Scalable task families for the benchmarks.

use topcert::{validate_plan, Action, Plan, State, Task, Variable};

/// A corridor of `n + 1` cells with unit-cost moves in both directions,
/// starting at cell 0 with the goal at cell `n`.
pub fn corridor(n: usize) -> Task {
    let mut actions = Vec::new();
    for i in 0..n {
        let (a, b) = (i as u32, i as u32 + 1);
        actions.push(Action::new(
            format!("fwd{}", i),
            [(0, a)].into_iter().collect(),
            [(0, b)].into_iter().collect(),
            1,
        ));
        actions.push(Action::new(
            format!("back{}", i),
            [(0, b)].into_iter().collect(),
            [(0, a)].into_iter().collect(),
            1,
        ));
    }
    Task {
        variables: vec![Variable::with_domain("pos", n as u32 + 1)],
        actions,
        initial: State::new(vec![0]),
        goal: [(0, n as u32)].into_iter().collect(),
        metric: true,
    }
}

/// The shortest corridor plan, all forward moves.
pub fn corridor_plan(task: &Task) -> Plan {
    let steps: Vec<usize> = (0..task.actions.len()).step_by(2).collect();
    validate_plan(task, &steps).expect("forward moves reach the goal")
}

/// `n` independent binary switches that must all be turned on, each by a
/// unit-cost action. Every ordering of the `n` actions is a plan.
pub fn switches(n: usize) -> Task {
    Task {
        variables: (0..n)
            .map(|i| Variable::with_domain(format!("s{}", i), 2))
            .collect(),
        actions: (0..n)
            .map(|i| {
                Action::new(
                    format!("on{}", i),
                    [(i, 0)].into_iter().collect(),
                    [(i, 1)].into_iter().collect(),
                    1,
                )
            })
            .collect(),
        initial: State::new(vec![0; n]),
        goal: (0..n).map(|i| (i, 1)).collect(),
        metric: true,
    }
}

/// The switches plan turning them on in index order, and in reverse order.
pub fn switches_plans(task: &Task) -> (Plan, Plan) {
    let n = task.actions.len();
    let forward: Vec<usize> = (0..n).collect();
    let backward: Vec<usize> = (0..n).rev().collect();
    (
        validate_plan(task, &forward).expect("valid"),
        validate_plan(task, &backward).expect("valid"),
    )
}
