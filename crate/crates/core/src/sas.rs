//! Reader and writer for the SAS translator output format (version 3).
//!
//! Mutex groups are read and dropped. Axioms, derived variables and
//! conditional effects are rejected.

use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};
use crate::task::{Action, Cost, PartialAssignment, State, Task, Value, VarId, Variable};

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            lines: text.lines().map(|l| l.trim_end_matches('\r')).collect(),
            pos: 0,
        }
    }

    /// 1-based number of the line most recently returned.
    fn line_no(&self) -> usize {
        self.pos
    }

    fn next(&mut self) -> Result<&'a str> {
        let line = self
            .lines
            .get(self.pos)
            .ok_or_else(|| Error::parse(self.pos + 1, "unexpected end of input"))?;
        self.pos += 1;
        Ok(line)
    }

    fn expect(&mut self, keyword: &str) -> Result<()> {
        let line = self.next()?;
        if line.trim() != keyword {
            return Err(Error::parse(
                self.line_no(),
                format!("expected `{}`, found `{}`", keyword, line),
            ));
        }
        Ok(())
    }

    fn int(&mut self) -> Result<i64> {
        let line = self.next()?;
        line.trim().parse().map_err(|_| {
            Error::parse(
                self.line_no(),
                format!("expected an integer, found `{}`", line),
            )
        })
    }

    fn count(&mut self) -> Result<usize> {
        let n = self.int()?;
        usize::try_from(n)
            .map_err(|_| Error::parse(self.line_no(), format!("negative count {}", n)))
    }

    fn ints(&mut self, expected: usize) -> Result<Vec<i64>> {
        let line = self.next()?;
        let values: Vec<i64> = line
            .split_whitespace()
            .map(|tok| tok.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| {
                Error::parse(
                    self.line_no(),
                    format!("expected integers, found `{}`", line),
                )
            })?;
        if values.len() != expected {
            return Err(Error::parse(
                self.line_no(),
                format!("expected {} integers, found {}", expected, values.len()),
            ));
        }
        Ok(values)
    }

    fn var_value(&mut self) -> Result<(VarId, Value)> {
        let v = self.ints(2)?;
        Ok((self.to_var(v[0])?, self.to_value(v[1])?))
    }

    fn to_var(&self, v: i64) -> Result<VarId> {
        usize::try_from(v)
            .map_err(|_| Error::parse(self.line_no(), format!("invalid variable index {}", v)))
    }

    fn to_value(&self, d: i64) -> Result<Value> {
        Value::try_from(d)
            .map_err(|_| Error::parse(self.line_no(), format!("invalid value index {}", d)))
    }
}

pub fn parse_sas_str(text: &str) -> Result<Task> {
    let mut lines = Lines::new(text);

    lines.expect("begin_version")?;
    let version = lines.int()?;
    if version != 3 {
        return Err(Error::parse(
            lines.line_no(),
            format!("unsupported SAS version {}", version),
        ));
    }
    lines.expect("end_version")?;

    lines.expect("begin_metric")?;
    let metric = match lines.int()? {
        0 => false,
        1 => true,
        m => {
            return Err(Error::parse(
                lines.line_no(),
                format!("invalid metric flag {}", m),
            ))
        }
    };
    lines.expect("end_metric")?;

    let num_vars = lines.count()?;
    let mut variables = Vec::with_capacity(num_vars);
    for _ in 0..num_vars {
        lines.expect("begin_variable")?;
        let name = lines.next()?.to_string();
        let layer = lines.int()?;
        if layer != -1 {
            return Err(Error::Unsupported(format!(
                "derived variable `{}` (axiom layer {})",
                name, layer
            )));
        }
        let domain_size = lines.int()?;
        let domain_size = u32::try_from(domain_size).map_err(|_| {
            Error::parse(
                lines.line_no(),
                format!("invalid domain size {}", domain_size),
            )
        })?;
        let mut value_names = Vec::with_capacity(domain_size as usize);
        for _ in 0..domain_size {
            value_names.push(lines.next()?.to_string());
        }
        lines.expect("end_variable")?;
        variables.push(Variable {
            name,
            domain_size,
            value_names,
        });
    }

    let num_mutexes = lines.count()?;
    for _ in 0..num_mutexes {
        lines.expect("begin_mutex_group")?;
        let n = lines.count()?;
        for _ in 0..n {
            lines.var_value()?;
        }
        lines.expect("end_mutex_group")?;
    }

    lines.expect("begin_state")?;
    let mut initial = Vec::with_capacity(num_vars);
    for _ in 0..num_vars {
        let d = lines.int()?;
        initial.push(lines.to_value(d)?);
    }
    lines.expect("end_state")?;

    lines.expect("begin_goal")?;
    let n = lines.count()?;
    let mut goal = Vec::with_capacity(n);
    for _ in 0..n {
        goal.push(lines.var_value()?);
    }
    lines.expect("end_goal")?;

    let num_ops = lines.count()?;
    let mut actions = Vec::with_capacity(num_ops);
    for _ in 0..num_ops {
        lines.expect("begin_operator")?;
        let name = lines.next()?.to_string();
        let n_prevail = lines.count()?;
        let mut pre = Vec::new();
        for _ in 0..n_prevail {
            pre.push(lines.var_value()?);
        }
        let n_eff = lines.count()?;
        let mut eff = Vec::with_capacity(n_eff);
        for _ in 0..n_eff {
            let line = lines.next()?;
            let nums: Vec<i64> = line
                .split_whitespace()
                .map(|t| t.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| {
                    Error::parse(lines.line_no(), format!("malformed effect line `{}`", line))
                })?;
            let n_cond = *nums
                .first()
                .ok_or_else(|| Error::parse(lines.line_no(), "empty effect line"))?;
            if n_cond != 0 {
                return Err(Error::Unsupported(format!(
                    "conditional effect in operator `{}`",
                    name
                )));
            }
            if nums.len() != 4 {
                return Err(Error::parse(
                    lines.line_no(),
                    format!("malformed effect line `{}`", line),
                ));
            }
            let var = lines.to_var(nums[1])?;
            if nums[2] != -1 {
                pre.push((var, lines.to_value(nums[2])?));
            }
            eff.push((var, lines.to_value(nums[3])?));
        }
        let cost: Cost = lines.int()?;
        lines.expect("end_operator")?;
        actions.push(Action {
            name,
            precondition: PartialAssignment::new(pre),
            effect: PartialAssignment::new(eff),
            cost: if metric { cost } else { 1 },
        });
    }

    let num_axioms = lines.count()?;
    if num_axioms > 0 {
        return Err(Error::Unsupported(format!("{} axiom(s)", num_axioms)));
    }

    Ok(Task {
        variables,
        actions,
        initial: State::new(initial),
        goal: PartialAssignment::new(goal),
        metric,
    })
}

pub fn parse_sas<R: Read>(mut input: R) -> Result<Task> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| Error::parse(0, format!("read failed: {}", e)))?;
    parse_sas_str(&text)
}

/// Writes `task` in SAS format. Costs are written verbatim, so a task
/// without a metric round-trips only when its costs are all 1.
pub fn serialize_sas(task: &Task) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "begin_version\n3\nend_version");
    let _ = writeln!(w, "begin_metric\n{}\nend_metric", u8::from(task.metric));
    let _ = writeln!(w, "{}", task.variables.len());
    for var in &task.variables {
        let _ = writeln!(w, "begin_variable\n{}\n-1\n{}", var.name, var.domain_size);
        for name in &var.value_names {
            let _ = writeln!(w, "{}", name);
        }
        let _ = writeln!(w, "end_variable");
    }
    let _ = writeln!(w, "0");
    let _ = writeln!(w, "begin_state");
    for d in task.initial.iter() {
        let _ = writeln!(w, "{}", d);
    }
    let _ = writeln!(w, "end_state");
    let _ = writeln!(w, "begin_goal\n{}", task.goal.len());
    for (v, d) in task.goal.pairs() {
        let _ = writeln!(w, "{} {}", v, d);
    }
    let _ = writeln!(w, "end_goal");
    let _ = writeln!(w, "{}", task.actions.len());
    for a in &task.actions {
        let _ = writeln!(w, "begin_operator\n{}", a.name);
        let prevail = a.prevail();
        let _ = writeln!(w, "{}", prevail.len());
        for (v, d) in prevail.pairs() {
            let _ = writeln!(w, "{} {}", v, d);
        }
        let _ = writeln!(w, "{}", a.effect.len());
        for &(v, d) in a.effect.pairs() {
            let pre = a.precondition.get(v).map_or(-1, i64::from);
            let _ = writeln!(w, "0 {} {} {}", v, pre, d);
        }
        let _ = writeln!(w, "{}", a.cost);
        let _ = writeln!(w, "end_operator");
    }
    let _ = writeln!(w, "0");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "begin_version
3
end_version
begin_metric
1
end_metric
1
begin_variable
var0
-1
2
Atom p()
NegatedAtom p()
end_variable
1
begin_mutex_group
2
0 0
0 1
end_mutex_group
begin_state
1
end_state
begin_goal
1
0 0
end_goal
1
begin_operator
make-p
0
1
0 0 -1 0
5
end_operator
0
";

    #[test]
    fn parses_minimal_file() {
        let t = parse_sas_str(MINIMAL).unwrap();
        assert_eq!(t.variables.len(), 1);
        assert_eq!(t.actions.len(), 1);
        assert_eq!(t.actions[0].cost, 5);
        assert_eq!(t.initial.values(), &[1]);
        assert!(t.validate().is_empty());
    }

    #[test]
    fn metric_zero_forces_unit_costs() {
        let text = MINIMAL.replacen("begin_metric\n1", "begin_metric\n0", 1);
        let t = parse_sas_str(&text).unwrap();
        assert_eq!(t.actions[0].cost, 1);
        assert!(!t.metric);
    }

    #[test]
    fn axioms_are_rejected() {
        let text = MINIMAL.trim_end().strip_suffix('0').unwrap().to_string() + "1\n";
        assert!(matches!(parse_sas_str(&text), Err(Error::Unsupported(_))));
    }

    #[test]
    fn conditional_effects_are_rejected() {
        let text = MINIMAL.replace("0 0 -1 0", "1 0 1 0 -1 0");
        assert!(matches!(parse_sas_str(&text), Err(Error::Unsupported(_))));
    }

    #[test]
    fn malformed_section_reports_line() {
        let text = MINIMAL.replace("begin_state", "begin_stat");
        match parse_sas_str(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 21),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let t = parse_sas_str(MINIMAL).unwrap();
        assert_eq!(parse_sas_str(&serialize_sas(&t)).unwrap(), t);

        let mut empty_goal = t.clone();
        empty_goal.goal = PartialAssignment::empty();
        assert_eq!(
            parse_sas_str(&serialize_sas(&empty_goal)).unwrap(),
            empty_goal
        );
    }
}
