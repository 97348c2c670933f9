//! Disjoint compilation of "not any of these assignments".

use crate::task::{PartialAssignment, Value, VarId};

/// Pairwise-disjoint partial assignments over `vars` (each `(var,
/// domain_size)`) whose union is exactly the full assignments over `vars`
/// that are not listed in `excluded`. Each excluded row gives one value per
/// entry of `vars`, in the same order.
///
/// With no variables the only full assignment is the empty one, so the
/// result is `[{}]` when nothing is excluded and `[]` otherwise.
pub(crate) fn complement_cover(
    vars: &[(VarId, u32)],
    excluded: &[Vec<Value>],
) -> Vec<PartialAssignment> {
    let mut out = Vec::new();
    let rows: Vec<&[Value]> = excluded.iter().map(|r| r.as_slice()).collect();
    let mut prefix = Vec::with_capacity(vars.len());
    split(vars, 0, &rows, &mut prefix, &mut out);
    out
}

fn split(
    vars: &[(VarId, u32)],
    depth: usize,
    rows: &[&[Value]],
    prefix: &mut Vec<(VarId, Value)>,
    out: &mut Vec<PartialAssignment>,
) {
    if rows.is_empty() {
        out.push(PartialAssignment::new(prefix.clone()));
        return;
    }
    if depth == vars.len() {
        return;
    }
    let (var, domain) = vars[depth];
    for value in 0..domain {
        let matching: Vec<&[Value]> = rows.iter().copied().filter(|r| r[depth] == value).collect();
        prefix.push((var, value));
        split(vars, depth + 1, &matching, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_assignments(domains: &[u32]) -> Vec<Vec<Value>> {
        let mut out = vec![Vec::new()];
        for &d in domains {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..d).map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn no_variables() {
        assert_eq!(complement_cover(&[], &[]), vec![PartialAssignment::empty()]);
        assert!(complement_cover(&[], &[vec![]]).is_empty());
    }

    #[test]
    fn covers_exactly_the_complement_once() {
        let vars = [(1, 3), (4, 2), (5, 3)];
        let domains = [3, 2, 3];
        let excluded = vec![vec![0, 1, 2], vec![0, 1, 0], vec![2, 0, 1]];
        let cover = complement_cover(&vars, &excluded);
        for full in all_assignments(&domains) {
            let state: Vec<Value> = {
                let mut s = vec![0; 6];
                for (i, &(v, _)) in vars.iter().enumerate() {
                    s[v] = full[i];
                }
                s
            };
            let hits = cover.iter().filter(|p| p.holds_in(&state)).count();
            let expected = usize::from(!excluded.contains(&full));
            assert_eq!(hits, expected, "assignment {:?}", full);
        }
    }
}
