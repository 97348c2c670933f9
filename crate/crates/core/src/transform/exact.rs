//! Forbidding a single plan.
//!
//! A position variable `p ∈ {0..n, off}` follows the forbidden plan; the
//! first step that leaves it moves to `off` for good. `acc` is false exactly
//! when the whole plan has been followed, and the goal requires `acc`.

use super::{BuiltLayer, LayerBuilder, LayerInput};

pub(crate) fn build(input: &LayerInput<'_>) -> BuiltLayer {
    let n = input.n();
    let steps = input.steps();
    let traversal = input.traversal();
    let mut b = LayerBuilder::new(input);

    let mut names: Vec<String> = (0..=n).map(|k| format!("at-{}", k)).collect();
    names.push("off".into());
    let off = n as u32 + 1;
    let p = b.add_variable("pos", &names, 0);
    let acc = b.add_flag("acc", n != 0);
    b.add_goal(acc, 1);

    for (o, action) in input.base.actions.iter().enumerate() {
        for k in 0..=n {
            let k32 = k as u32;
            if k < n && steps[k] == o {
                b.add_copy(
                    o,
                    &format!("f{}", k + 1),
                    &[(p, k32)],
                    &[(p, k32 + 1), (acc, u32::from(k + 1 != n))],
                );
            } else if action.is_applicable_in(&traversal[k]) {
                b.add_copy(o, &format!("dev{}", k), &[(p, k32)], &[(p, off), (acc, 1)]);
            }
        }
        b.add_copy(o, "off", &[(p, off)], &[]);
    }
    b.finish()
}
