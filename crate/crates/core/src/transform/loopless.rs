//! The loopless transformation: forbids a loopless plan `π = o_1..o_n` and
//! every plan that visits one of the states `s_0..s_n` of `π` twice.
//!
//! New variables: `d` (execution has diverged from `π`), `e` (a state of `π`
//! was reached a second time, a sink), and one ternary `v_i` per state of
//! `π` with values `0` (not visited), `1` (visited) and `C` (current state
//! while following `π`). The action copies come in the families below; the
//! names used in suffixes follow the colours of the usual illustration.
//!
//! | family   | when                                         |
//! |----------|----------------------------------------------|
//! | follow   | `o = o_{k+1}` while following                |
//! | red      | first deviation lands on `s_i`, `i < k`      |
//! | loop     | first deviation lands back on `s_k`          |
//! | cyan     | first deviation lands on `s_{k+1}`           |
//! | magenta  | first deviation lands on `s_j`, `j > k+1`    |
//! | blue     | first deviation lands off `π` (`o` in some `O_i`) |
//! | violet   | first deviation, `o` in no `O_i`             |
//! | green    | after deviation, first visit of `s_i`        |
//! | again    | after deviation, second visit of `s_i`       |
//! | orange   | after deviation, off `π` (`o` in some `O_i`) |
//! | purple   | after deviation, `o` in no `O_i`             |
//!
//! States are compared on the original variables only, which lets the
//! construction sit on top of other transformations.

use super::cover::complement_cover;
use super::{BuiltLayer, LayerBuilder, LayerInput};
use crate::task::{PartialAssignment, State, Value, VarId};

const UNVISITED: Value = 0;
const VISITED: Value = 1;
const CURRENT: Value = 2;
const F: Value = 0;
const T: Value = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LooplessOptions {
    /// Emit first-deviation copies only when they can fire. While following
    /// `π` the state is known to be exactly `s_k`, so for each action at most
    /// one first-deviation copy is reachable.
    pub prune_static: bool,
}

impl Default for LooplessOptions {
    fn default() -> Self {
        LooplessOptions { prune_static: true }
    }
}

/// What one base action needs to know about the states of `π`.
struct Reach {
    /// `i` such that `o ∈ O_i`, i.e. `prv(o) ∪ eff(o) ⊆ s_i`.
    targets: Vec<usize>,
    /// `cond_i(o)` for each target, aligned with `targets`.
    conds: Vec<PartialAssignment>,
    /// Disjoint instances of `⋀_i ¬cond_i(o)` over the targets.
    elsewhere: Vec<PartialAssignment>,
}

fn reach(input: &LayerInput<'_>, projected: &[Vec<Value>], o: usize) -> Reach {
    let action = &input.base.actions[o];
    let observed = input.observed;
    let fixed = action
        .precondition
        .overwritten_by(&action.effect)
        .restricted(|v| v < observed);
    let free: Vec<(VarId, u32)> = (0..observed)
        .filter(|&v| !fixed.contains_var(v))
        .map(|v| (v, input.base.variables[v].domain_size))
        .collect();

    let mut targets = Vec::new();
    let mut conds = Vec::new();
    let mut rows = Vec::new();
    for (i, s) in projected.iter().enumerate() {
        if fixed.holds_in(s) {
            targets.push(i);
            conds.push(free.iter().map(|&(v, _)| (v, s[v])).collect());
            rows.push(free.iter().map(|&(v, _)| s[v]).collect::<Vec<_>>());
        }
    }
    let elsewhere = if targets.is_empty() {
        Vec::new()
    } else {
        complement_cover(&free, &rows)
    };
    Reach {
        targets,
        conds,
        elsewhere,
    }
}

pub(crate) fn build(input: &LayerInput<'_>, options: LooplessOptions) -> BuiltLayer {
    let n = input.n();
    let steps = input.steps();
    let traversal = input.traversal();
    let observed = input.observed;
    let projected: Vec<Vec<Value>> = traversal.iter().map(|s| s[..observed].to_vec()).collect();

    let mut b = LayerBuilder::new(input);
    let d = b.add_flag("d", false);
    let e = b.add_flag("e", false);
    let ternary = ["0".to_string(), "1".to_string(), "C".to_string()];
    let v: Vec<VarId> = (0..=n)
        .map(|i| {
            b.add_variable(
                &format!("v{}", i),
                &ternary,
                if i == 0 { CURRENT } else { UNVISITED },
            )
        })
        .collect();

    // A proper prefix of π reaching the goal is a loopless plan that must
    // stay valid; then acceptance needs its own flag instead of `d`.
    let prefix_goal = traversal[..n].iter().any(|s| input.base.is_goal(s));
    let acc = prefix_goal.then(|| b.add_flag("acc", n != 0));
    b.add_goal(e, F);
    match acc {
        Some(acc) => b.add_goal(acc, T),
        None => b.add_goal(d, T),
    }
    let leave = |mut eff: Vec<(VarId, Value)>| {
        if let Some(acc) = acc {
            eff.push((acc, T));
        }
        eff
    };

    for (o, action) in input.base.actions.iter().enumerate() {
        let r = reach(input, &projected, o);

        for i in 1..=n {
            if steps[i - 1] == o {
                let mut eff = vec![(v[i - 1], VISITED), (v[i], CURRENT)];
                if let (Some(acc), true) = (acc, i == n) {
                    eff.push((acc, F));
                }
                b.add_copy(
                    o,
                    &format!("follow{}", i),
                    &[(e, F), (d, F), (v[i - 1], CURRENT)],
                    &eff,
                );
            }
        }

        for k in 0..=n {
            if k < n && steps[k] == o {
                continue;
            }
            let (landing, instance) = if options.prune_static {
                if !action.is_applicable_in(&traversal[k]) {
                    continue;
                }
                let mut next: State = traversal[k].clone();
                next.apply(&action.effect);
                let landing = r
                    .targets
                    .iter()
                    .position(|&i| projected[i] == next[..observed]);
                let instance = match landing {
                    Some(_) => None,
                    None => r.elsewhere.iter().position(|p| p.holds_in(&next)),
                };
                (Some(landing), instance)
            } else {
                (None, None)
            };
            let deviate = [(e, F), (d, F), (v[k], CURRENT)];

            for (t, &i) in r.targets.iter().enumerate() {
                if landing.is_some_and(|l| l != Some(t)) {
                    continue;
                }
                let cond = r.conds[t].pairs();
                if i < k {
                    let mut pre = deviate.to_vec();
                    pre.push((v[i], VISITED));
                    pre.extend_from_slice(cond);
                    b.add_copy(o, &format!("red{}k{}", i, k), &pre, &[(e, T)]);
                } else if i == k {
                    let mut pre = deviate.to_vec();
                    pre.extend_from_slice(cond);
                    b.add_copy(o, &format!("loop{}", k), &pre, &[(e, T)]);
                } else if i == k + 1 {
                    let mut pre = deviate.to_vec();
                    pre.extend_from_slice(cond);
                    let eff = leave(vec![(d, T), (v[k], VISITED), (v[k + 1], VISITED)]);
                    b.add_copy(o, &format!("cyan{}", k), &pre, &eff);
                } else {
                    let mut pre = deviate.to_vec();
                    pre.push((v[i], UNVISITED));
                    pre.extend_from_slice(cond);
                    let eff = leave(vec![(d, T), (v[i], VISITED), (v[k], VISITED)]);
                    b.add_copy(o, &format!("magenta{}k{}", i, k), &pre, &eff);
                }
            }

            let off_plan = leave(vec![(d, T), (v[k], VISITED)]);
            if r.targets.is_empty() {
                b.add_copy(o, &format!("violet{}", k), &deviate, &off_plan);
            } else {
                for (idx, inst) in r.elsewhere.iter().enumerate() {
                    if landing.is_some() && instance != Some(idx) {
                        continue;
                    }
                    let mut pre = deviate.to_vec();
                    pre.extend_from_slice(inst.pairs());
                    b.add_copy(o, &format!("blue{}#{}", k, idx), &pre, &off_plan);
                }
            }
        }

        for (t, &i) in r.targets.iter().enumerate() {
            let cond = r.conds[t].pairs();
            let mut pre = vec![(e, F), (d, T), (v[i], UNVISITED)];
            pre.extend_from_slice(cond);
            b.add_copy(o, &format!("green{}", i), &pre, &[(v[i], VISITED)]);
            let mut pre = vec![(e, F), (d, T), (v[i], VISITED)];
            pre.extend_from_slice(cond);
            b.add_copy(o, &format!("again{}", i), &pre, &[(e, T)]);
        }
        if r.targets.is_empty() {
            b.add_copy(o, "purple", &[(e, F), (d, T)], &[]);
        } else {
            for (idx, inst) in r.elsewhere.iter().enumerate() {
                let mut pre = vec![(e, F), (d, T)];
                pre.extend_from_slice(inst.pairs());
                b.add_copy(o, &format!("orange#{}", idx), &pre, &[]);
            }
        }
    }
    b.finish()
}
