use proptest::prelude::*;

use super::*;
use crate::plan::{validate_plan, DominanceRelation as R};
use crate::search::{enumerate_plans, SearchLimits};
use crate::testing::{
    detour, forbids, sorted_steps, t1, t1c, two_goals, two_goals_with_noop, RandomTaskConfig,
    RandomTasks,
};

fn plan(task: &Task, steps: &[ActionId]) -> Plan {
    validate_plan(task, steps).unwrap()
}

/// r-images of every plan of the transformed task with cost `<= q`.
fn images(result: &TransformResult, q: i64) -> Vec<Vec<ActionId>> {
    let limits = SearchLimits::default();
    let plans = enumerate_plans(&result.task, q, None, &limits)
        .unwrap()
        .plans;
    let images: Vec<Plan> = plans.iter().map(|p| result.r_image(p).unwrap()).collect();
    for (p, img) in plans.iter().zip(&images) {
        assert_eq!(p.cost(), img.cost());
    }
    sorted_steps(&images)
}

/// Plans of the original task with cost `<= q` not forbidden by any of `forbidden`.
fn expected(task: &Task, q: i64, relation: R, forbidden: &[Plan]) -> Vec<Vec<ActionId>> {
    let limits = SearchLimits::default();
    let all = enumerate_plans(task, q, None, &limits).unwrap().plans;
    sorted_steps(
        all.iter()
            .filter(|p| !forbidden.iter().any(|f| forbids(relation, f, p))),
    )
}

#[test]
fn exact_on_t1() {
    let t = t1();
    let r = forbid_exact_plan(&t, &plan(&t, &[0, 1])).unwrap();
    assert!(images(&r, 2).is_empty());
    let t = t1c();
    let r = forbid_exact_plan(&t, &plan(&t, &[0, 1])).unwrap();
    assert_eq!(images(&r, 4), vec![vec![0, 2, 0, 1]]);
}

#[test]
fn exact_on_two_goals_keeps_other_order() {
    let t = two_goals();
    let r = forbid_exact_plan(&t, &plan(&t, &[0, 1])).unwrap();
    assert_eq!(images(&r, 2), vec![vec![1, 0]]);
}

#[test]
fn exact_forbids_empty_plan_only() {
    let mut t = two_goals();
    t.goal = PartialAssignment::empty();
    let r = forbid_exact_plan(&t, &plan(&t, &[])).unwrap();
    let got = images(&r, 2);
    assert!(!got.contains(&vec![]));
    assert_eq!(got, expected(&t, 2, R::Empty, &[plan(&t, &[])]));
    assert!(got.contains(&vec![0]));
}

#[test]
fn unordered_examples() {
    let t = two_goals();
    let r = forbid_unordered(&t, &plan(&t, &[0, 1])).unwrap();
    assert!(images(&r, 2).is_empty());

    let t = t1c();
    let r = forbid_unordered(&t, &plan(&t, &[0, 1])).unwrap();
    assert_eq!(images(&r, 4), vec![vec![0, 2, 0, 1]]);

    // Multiset {a,a}: ⟨a⟩ has a different multiset and survives.
    let mut t = two_goals();
    t.goal = PartialAssignment::empty();
    t.actions[0].precondition = PartialAssignment::empty();
    let r = forbid_unordered(&t, &plan(&t, &[0, 0])).unwrap();
    let got = images(&r, 2);
    assert!(got.contains(&vec![0]));
    assert!(!got.contains(&vec![0, 0]));
}

#[test]
fn superset_examples() {
    let t = t1c();
    let r = forbid_superset(&t, &plan(&t, &[0, 1])).unwrap();
    assert!(images(&r, 4).is_empty());

    let t = two_goals_with_noop();
    let r = forbid_superset(&t, &plan(&t, &[0, 1])).unwrap();
    let got = images(&r, 3);
    assert!(!got.contains(&vec![0, 2, 1]));
    // ⟨b,a⟩ has the same multiset, which is not a strict superset.
    assert_eq!(got, vec![vec![1, 0]]);

    // {a,b} ⊄ {a}: a one-step plan survives.
    let mut t = two_goals();
    t.goal = [(0, 1)].into_iter().collect();
    let r = forbid_superset(&t, &plan(&t, &[0, 1])).unwrap();
    assert!(images(&r, 2).contains(&vec![0]));
}

#[test]
fn loopless_on_t1c() {
    let t = t1c();
    for options in [
        LooplessOptions::default(),
        LooplessOptions {
            prune_static: false,
        },
    ] {
        let r = forbid_loopless_with(&t, &plan(&t, &[0, 1]), options).unwrap();
        assert!(images(&r, 4).is_empty());
        assert!(images(&r, 8).is_empty());
    }
}

#[test]
fn loopless_detour_survives_with_diverged_flags() {
    let t = detour();
    let r = forbid_loopless(&t, &plan(&t, &[0, 1])).unwrap();
    assert_eq!(
        images(&r, 3),
        vec![vec![0, 1, 2], vec![0, 2, 1], vec![2, 0, 1]]
    );
    let ForwardMapped::Lifted(lifted) = r.forward_map(&plan(&t, &[0, 2, 1])).unwrap() else {
        panic!("detour must survive");
    };
    let last = lifted.traversal().last().unwrap();
    let d = r
        .task
        .variables
        .iter()
        .position(|v| v.name == "forbid0-d")
        .unwrap();
    let e = r
        .task
        .variables
        .iter()
        .position(|v| v.name == "forbid0-e")
        .unwrap();
    assert_eq!((last[d], last[e]), (1, 0));
}

#[test]
fn loopless_unique_plan_leaves_nothing() {
    let t = t1();
    let r = forbid_loopless(&t, &plan(&t, &[0, 1])).unwrap();
    let limits = SearchLimits::default();
    let out = crate::search::optimal_search(&r.task, None, &limits).unwrap();
    assert_eq!(out.status, crate::search::SearchStatus::ProvedUnsolvable);
}

#[test]
fn loopless_rejects_plans_with_loops() {
    let t = t1c();
    assert!(matches!(
        forbid_loopless(&t, &plan(&t, &[0, 2, 0, 1])),
        Err(Error::Contract(_))
    ));
}

#[test]
fn forward_map_examples() {
    let t = t1();
    let r = forbid_exact_plan(&t, &plan(&t, &[0, 1])).unwrap();
    assert!(matches!(
        r.forward_map(&plan(&t, &[0, 1])).unwrap(),
        ForwardMapped::Forbidden(_)
    ));

    let t = t1c();
    let r = forbid_loopless(&t, &plan(&t, &[0, 1])).unwrap();
    assert!(matches!(
        r.forward_map(&plan(&t, &[0, 2, 0, 1])).unwrap(),
        ForwardMapped::Forbidden(_)
    ));

    let t = two_goals_with_noop();
    let r = forbid_unordered(&t, &plan(&t, &[0, 1])).unwrap();
    let other = plan(&t, &[2, 1, 0]);
    match r.forward_map(&other).unwrap() {
        ForwardMapped::Lifted(l) => {
            assert_eq!(l.cost(), other.cost());
            assert_eq!(r.r_image(&l).unwrap(), other);
        }
        ForwardMapped::Forbidden(why) => panic!("{}", why),
    }

    assert!(matches!(
        r.forward_map(&plan(&two_goals(), &[0, 1])).map(|_| ()),
        Ok(())
    ));
    let mut short_goal = t1();
    short_goal.goal = [(0, 1)].into_iter().collect();
    let bogus = plan(&short_goal, &[0]);
    assert!(matches!(r.forward_map(&bogus), Err(Error::Usage(_))));
}

#[test]
fn forbid_set_examples() {
    let t = two_goals();
    let both = [plan(&t, &[0, 1]), plan(&t, &[1, 0])];
    let r = forbid_set(&t, &both, R::Empty).unwrap();
    assert!(images(&r, 2).is_empty());
    assert!(r.skipped.is_empty());

    let r = forbid_set(&t, &both[..1], R::Unordered).unwrap();
    assert!(images(&r, 2).is_empty());

    let r = forbid_set(&t, &both, R::Unordered).unwrap();
    assert_eq!(r.skipped.len(), 1);
    assert_eq!(r.skipped[0].index, 1);

    let r = forbid_set(&t, &[], R::Loopless).unwrap();
    assert_eq!(r.task, t);
    assert_eq!(r.mapping, vec![0, 1]);
}

#[test]
fn mapping_json_names_original_actions() {
    let t = t1();
    let r = forbid_exact_plan(&t, &plan(&t, &[0, 1])).unwrap();
    let json = r.mapping_json();
    let obj = json.as_object().unwrap();
    assert_eq!(obj.len(), r.task.actions.len());
    assert_eq!(obj["a@f1"], "a");
    assert_eq!(obj["b@off"], "b");
}

#[test]
fn transformed_task_round_trips_through_sas() {
    let t = t1c();
    let r = forbid_loopless(&t, &plan(&t, &[0, 1])).unwrap();
    let text = crate::sas::serialize_sas(&r.task);
    assert_eq!(crate::sas::parse_sas_str(&text).unwrap(), r.task);
    assert!(r.task.validate().is_empty());
}

/// For `o ∉ O_i` no application of `o` can produce `s_i`.
#[test]
fn actions_outside_o_i_never_reach_s_i() {
    let mut gen = RandomTasks::new(7, RandomTaskConfig::default());
    for _ in 0..300 {
        let task = gen.task();
        let domains: Vec<u32> = task.variables.iter().map(|v| v.domain_size).collect();
        let target: Vec<u32> = domains
            .iter()
            .map(|&d| gen.below(d as usize) as u32)
            .collect();
        for a in &task.actions {
            let fixed = a.precondition.overwritten_by(&a.effect);
            if fixed.holds_in(&target) {
                continue;
            }
            for _ in 0..10 {
                let mut s: Vec<u32> = domains
                    .iter()
                    .map(|&d| gen.below(d as usize) as u32)
                    .collect();
                for &(v, d) in a.precondition.pairs() {
                    s[v] = d;
                }
                let mut next = State::new(s);
                next.apply(&a.effect);
                assert_ne!(next.values(), &target[..]);
            }
        }
    }
}

fn random_case(seed: u64) -> Option<(Task, Plan)> {
    let mut gen = RandomTasks::new(seed, RandomTaskConfig::default());
    let task = gen.task();
    let limits = SearchLimits::default();
    let loopless = crate::search::enumerate_loopless(&task, None, &limits)
        .ok()?
        .plans;
    let short: Vec<&Plan> = loopless.iter().filter(|p| p.cost() <= 6).collect();
    let pi = (*gen.pick(&short)?).clone();
    Some((task, pi))
}

fn check_single(task: &Task, pi: &Plan, relation: R, options: LooplessOptions) {
    let q = pi.cost() + 3;
    let result = TransformResult::identity(task)
        .forbid_further_with(relation, pi, options)
        .unwrap()
        .unwrap();
    assert_eq!(
        images(&result, q),
        expected(task, q, relation, std::slice::from_ref(pi))
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_plan_equivalence(seed in any::<u64>()) {
        if let Some((task, pi)) = random_case(seed) {
            for relation in R::ALL {
                check_single(&task, &pi, relation, LooplessOptions::default());
            }
            check_single(&task, &pi, R::Loopless, LooplessOptions { prune_static: false });
        }
    }

    #[test]
    fn composed_equivalence(seed in any::<u64>()) {
        if let Some((task, pi)) = random_case(seed) {
            let limits = SearchLimits::default();
            let loopless = crate::search::enumerate_loopless(&task, Some(pi.cost() + 2), &limits)
                .unwrap()
                .plans;
            let second = loopless.iter().find(|p| p.steps() != pi.steps()).cloned();
            let plans: Vec<Plan> = std::iter::once(pi.clone()).chain(second).collect();
            let q = pi.cost() + 3;
            for relation in R::ALL {
                let r = forbid_set(&task, &plans, relation).unwrap();
                prop_assert_eq!(images(&r, q), expected(&task, q, relation, &plans));
            }
        }
    }

    #[test]
    fn lifting_is_unique_and_cost_preserving(seed in any::<u64>()) {
        if let Some((task, pi)) = random_case(seed) {
            let q = pi.cost() + 3;
            let all = enumerate_plans(&task, q, None, &SearchLimits::default()).unwrap().plans;
            for relation in R::ALL {
                let r = forbid_set(&task, std::slice::from_ref(&pi), relation).unwrap();
                for p in &all {
                    match r.forward_map(p).unwrap() {
                        ForwardMapped::Lifted(l) => {
                            prop_assert_eq!(l.cost(), p.cost());
                            prop_assert!(!forbids(relation, &pi, p));
                        }
                        ForwardMapped::Forbidden(_) => prop_assert!(forbids(relation, &pi, p)),
                    }
                }
            }
        }
    }

    #[test]
    fn sas_round_trip_of_transformed_tasks(seed in any::<u64>()) {
        if let Some((task, pi)) = random_case(seed) {
            let r = forbid_loopless(&task, &pi).unwrap();
            let text = crate::sas::serialize_sas(&r.task);
            prop_assert_eq!(crate::sas::parse_sas_str(&text).unwrap(), r.task);
        }
    }
}
