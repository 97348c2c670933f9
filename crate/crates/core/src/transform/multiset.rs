//! Forbidding by action multiset.
//!
//! Actions are counted by their original label, so a layer placed on top of
//! another transformation still compares multisets of original actions.
//! Counter `c_o` counts occurrences of `o ∈ M(π)` up to `m_o`, and `t` is the
//! sum of the counters.

use std::collections::BTreeMap;

use super::{BuiltLayer, LayerBuilder, LayerInput};
use crate::task::{ActionId, VarId};

struct Counters {
    /// original action → (counter variable, multiplicity)
    vars: BTreeMap<ActionId, (VarId, usize)>,
    total: VarId,
}

fn add_counters(b: &mut LayerBuilder<'_>, input: &LayerInput<'_>) -> Counters {
    let mut multiplicity: BTreeMap<ActionId, usize> = BTreeMap::new();
    for &s in input.steps() {
        *multiplicity.entry(input.labels[s]).or_insert(0) += 1;
    }
    let vars = multiplicity
        .into_iter()
        .map(|(label, m)| (label, (b.add_counter(&format!("count{}", label), m, 0), m)))
        .collect();
    let total = b.add_counter("total", input.n(), 0);
    Counters { vars, total }
}

/// Forbids exactly the plans `π′` with `M(π′) = M(π)`.
///
/// While `within` holds every action so far belongs to `M(π)` without
/// exceeding its multiplicity; the plan is rejected iff it ends within and
/// with `t = n`.
pub(crate) fn build_unordered(input: &LayerInput<'_>) -> BuiltLayer {
    let n = input.n();
    let mut b = LayerBuilder::new(input);
    let counters = add_counters(&mut b, input);
    let t = counters.total;
    let within = b.add_flag("within", true);
    let acc = b.add_flag("acc", n != 0);
    b.add_goal(acc, 1);

    for o in 0..input.base.actions.len() {
        let label = input.labels[o];
        match counters.vars.get(&label) {
            Some(&(c, m)) => {
                for j in 0..m {
                    for y in j..=(n - m + j) {
                        let (j32, y32) = (j as u32, y as u32);
                        let mut eff = vec![(c, j32 + 1), (t, y32 + 1)];
                        if y + 1 == n {
                            eff.push((acc, 0));
                        }
                        b.add_copy(
                            o,
                            &format!("inc{}t{}", j, y),
                            &[(within, 1), (c, j32), (t, y32)],
                            &eff,
                        );
                    }
                }
                b.add_copy(
                    o,
                    "over",
                    &[(within, 1), (c, m as u32)],
                    &[(within, 0), (acc, 1)],
                );
            }
            None => b.add_copy(o, "outside", &[(within, 1)], &[(within, 0), (acc, 1)]),
        }
        b.add_copy(o, "out", &[(within, 0)], &[]);
    }
    b.finish()
}

/// Forbids `π` and the plans `π′` with `M(π) ⊊ M(π′)`.
///
/// Besides the capped counters, `extra` records an action beyond `M(π)` and
/// the position `p` recognises `π` itself. The plan is rejected iff it ends
/// with `p = n`, or with `t = n` and `extra`.
pub(crate) fn build_superset(input: &LayerInput<'_>) -> BuiltLayer {
    let n = input.n();
    let steps = input.steps();
    let traversal = input.traversal();
    let mut b = LayerBuilder::new(input);
    let counters = add_counters(&mut b, input);
    let t = counters.total;
    let extra = b.add_flag("extra", false);
    let mut names: Vec<String> = (0..=n).map(|k| format!("at-{}", k)).collect();
    names.push("off".into());
    let off = n as u32 + 1;
    let p = b.add_variable("pos", &names, 0);
    let acc = b.add_flag("acc", n != 0);
    b.add_goal(acc, 1);

    // Counter values along the forbidden plan: prefix_counts[k][label].
    let mut prefix_counts: Vec<BTreeMap<ActionId, usize>> = vec![BTreeMap::new()];
    for &s in steps {
        let mut next = prefix_counts.last().expect("non-empty").clone();
        *next.entry(input.labels[s]).or_insert(0) += 1;
        prefix_counts.push(next);
    }

    for (o, action) in input.base.actions.iter().enumerate() {
        let label = input.labels[o];
        let counter = counters.vars.get(&label).copied();

        for k in 0..=n {
            let k32 = k as u32;
            let seen = prefix_counts[k].get(&label).copied().unwrap_or(0);
            if k < n && steps[k] == o {
                let (c, _) = counter.expect("plan actions are counted");
                b.add_copy(
                    o,
                    &format!("f{}", k + 1),
                    &[(p, k32)],
                    &[
                        (p, k32 + 1),
                        (c, seen as u32 + 1),
                        (t, k32 + 1),
                        (acc, u32::from(k + 1 != n)),
                    ],
                );
            } else if action.is_applicable_in(&traversal[k]) {
                let eff = match counter {
                    Some((c, m)) if seen < m => {
                        vec![(p, off), (c, seen as u32 + 1), (t, k32 + 1), (acc, 1)]
                    }
                    _ => vec![(p, off), (extra, 1), (acc, u32::from(k != n))],
                };
                b.add_copy(o, &format!("dev{}", k), &[(p, k32)], &eff);
            }
        }

        let full_pre: Vec<_> = match counter {
            Some((c, m)) => {
                for j in 0..m {
                    for y in j..=(n - m + j) {
                        let (j32, y32) = (j as u32, y as u32);
                        let pre = [(p, off), (c, j32), (t, y32)];
                        let eff = [(c, j32 + 1), (t, y32 + 1)];
                        if y + 1 < n {
                            b.add_copy(o, &format!("inc{}t{}", j, y), &pre, &eff);
                        } else {
                            let mut pre_x = pre.to_vec();
                            pre_x.push((extra, 0));
                            b.add_copy(o, &format!("inc{}t{}x0", j, y), &pre_x, &eff);
                            pre_x.pop();
                            pre_x.push((extra, 1));
                            let mut eff_x = eff.to_vec();
                            eff_x.push((acc, 0));
                            b.add_copy(o, &format!("inc{}t{}x1", j, y), &pre_x, &eff_x);
                        }
                    }
                }
                vec![(p, off), (c, m as u32)]
            }
            None => vec![(p, off)],
        };
        let min_total = counter.map_or(0, |(_, m)| m);
        for y in min_total..=n {
            let mut pre = full_pre.clone();
            pre.push((t, y as u32));
            let mut eff = vec![(extra, 1)];
            if y == n {
                eff.push((acc, 0));
            }
            b.add_copy(o, &format!("beyond-t{}", y), &pre, &eff);
        }
    }
    b.finish()
}
