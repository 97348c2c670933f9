use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;
use topcert::certify::PlanSummary;
use topcert::plan::{format_plan, parse_plan_file};
use topcert::planner::Termination;
use topcert::search::{enumerate_loopless, enumerate_plans, optimal_search, SearchStatus};
use topcert::transform::{forbid_set, LooplessOptions};
use topcert::{
    certify_dominance, certify_top_k, certify_top_quality, check_by_enumeration, plan_top_k,
    plan_top_quality, CertificationReport, CertifyOptions, Cost, DominanceRelation, Plan,
    PlannerOptions, SearchLimits, Task, Verdict,
};

use crate::{CertifyArgs, EnumerateArgs, Limits, Mode, PlanArgs, TransformArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Refuted = 1,
    Usage = 2,
    Inconclusive = 3,
}

impl Limits {
    fn search(&self) -> SearchLimits {
        SearchLimits {
            max_expansions: self.max_expansions,
            max_enumeration_nodes: self.max_nodes,
        }
    }

    fn loopless(&self) -> LooplessOptions {
        LooplessOptions {
            prune_static: !self.unpruned,
        }
    }
}

fn load_task(path: &Path) -> Result<Task> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let task = topcert::sas::parse_sas_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    for d in task.validate() {
        eprintln!("warning: {}: {}", d.location, d.message);
    }
    Ok(task)
}

/// Plan files in the order given; a directory contributes its `*.plan`
/// files sorted by name.
fn plan_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(input)
                .with_context(|| format!("listing {}", input.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "plan"));
            files.sort();
            out.extend(files);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

fn load_plans(task: &Task, inputs: &[PathBuf]) -> Result<Vec<Plan>> {
    plan_paths(inputs)?
        .iter()
        .map(|path| {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file = parse_plan_file(task, &text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let plan = topcert::validate_plan(task, &file.steps)
                .map_err(|e| anyhow::anyhow!("{}: invalid plan: {}", path.display(), e))?;
            if let Some(declared) = file.declared_cost.filter(|&c| c != plan.cost()) {
                eprintln!(
                    "warning: {}: declared cost {} differs from computed cost {}",
                    path.display(),
                    declared,
                    plan.cost()
                );
            }
            Ok(plan)
        })
        .collect()
}

/// Parses an integer bound or the multiplier form `xF`, which is resolved
/// against the optimal plan cost.
fn resolve_q(task: &Task, q: &str, limits: &SearchLimits) -> Result<Cost> {
    if let Some(factor) = q.strip_prefix('x') {
        let factor: f64 = factor
            .parse()
            .map_err(|_| topcert::Error::Usage(format!("bad multiplier `{}`", q)))?;
        if !(factor.is_finite() && factor >= 0.0) {
            bail!(topcert::Error::Usage(format!("bad multiplier `{}`", q)));
        }
        let outcome = optimal_search(task, None, limits)?;
        let q = match outcome.status {
            SearchStatus::OptimalFound { cost, .. } => (factor * cost as f64).floor() as Cost,
            _ => 0,
        };
        eprintln!("resolved q = {}", q);
        Ok(q)
    } else {
        q.parse()
            .map_err(|_| topcert::Error::Usage(format!("bad bound `{}`", q)).into())
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn describe(summary: &PlanSummary) -> String {
    format!("<{}> (cost {})", summary.actions.join(", "), summary.cost)
}

pub fn certify(args: &CertifyArgs) -> Result<Status> {
    let task = load_task(&args.task)?;
    let plans = load_plans(&task, &args.plans)?;
    let limits = args.limits.search();
    let options = CertifyOptions {
        limits,
        length_cap: args.limits.length_cap,
        parallel: args.parallel,
        loopless: args.limits.loopless(),
    };
    let relation = DominanceRelation::from(args.relation);
    let report: CertificationReport = match (&args.q, args.k, args.mode) {
        (Some(q), None, Mode::Transform) => {
            let q = resolve_q(&task, q, &limits)?;
            if relation == DominanceRelation::Empty {
                certify_top_quality(&task, &plans, q, &options)?
            } else {
                certify_dominance(&task, &plans, q, relation, &options)?
            }
        }
        (Some(q), None, Mode::Oracle) => {
            let q = resolve_q(&task, q, &limits)?;
            check_by_enumeration(&task, &plans, q, relation, &options)?
        }
        (None, Some(k), Mode::Transform) => certify_top_k(&task, &plans, k, &options)?,
        (None, Some(_), Mode::Oracle) => {
            bail!(topcert::Error::Usage(
                "oracle mode takes --q, not --k".into()
            ))
        }
        _ => bail!(topcert::Error::Usage(
            "give exactly one of --q and --k".into()
        )),
    };

    if let Some(path) = &args.output {
        write_json(path, &report.to_json())?;
    }
    println!("verdict: {}", report.verdict.name());
    for step in &report.steps {
        println!(
            "  {}: {}{} ({} actions, {} expanded){}",
            step.name,
            step.oracle.status,
            step.oracle
                .cost
                .map(|c| format!(" cost {}", c))
                .unwrap_or_default(),
            step.transformed_actions,
            step.oracle.expanded,
            if step.passed { "" } else { " FAILED" }
        );
    }
    Ok(match &report.verdict {
        Verdict::Certified => Status::Success,
        Verdict::Refuted(w) => {
            let json = serde_json::to_value(w)?;
            print!("witness: {}", json["kind"].as_str().unwrap_or("?"));
            match w.plan() {
                Some(p) => println!(" {}", describe(p)),
                None => println!(),
            }
            Status::Refuted
        }
        Verdict::Inconclusive(reason) => {
            println!("reason: {}", reason);
            Status::Inconclusive
        }
    })
}

pub fn plan(args: &PlanArgs) -> Result<Status> {
    let task = load_task(&args.task)?;
    let limits = args.limits.search();
    let options = PlannerOptions {
        limits,
        max_actions: args.max_actions,
        loopless: args.limits.loopless(),
    };
    let result = match (&args.q, args.k) {
        (Some(q), None) => {
            let q = resolve_q(&task, q, &limits)?;
            plan_top_quality(&task, q, args.relation.into(), &options)?
        }
        (None, Some(k)) => plan_top_k(&task, k, &options)?,
        _ => bail!(topcert::Error::Usage(
            "give exactly one of --q and --k".into()
        )),
    };
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    for (i, p) in result.plans.iter().enumerate() {
        let path = args.out_dir.join(format!("{:03}.plan", i + 1));
        fs::write(&path, format_plan(&task, p))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    write_json(
        &args.out_dir.join("trace.json"),
        &serde_json::to_value(&result.trace)?,
    )?;
    println!(
        "{} plans, {} rounds",
        result.plans.len(),
        result.trace.rounds.len()
    );
    Ok(match &result.trace.termination {
        Termination::Incomplete(reason) => {
            println!("incomplete: {}", reason);
            Status::Inconclusive
        }
        _ => Status::Success,
    })
}

pub fn transform(args: &TransformArgs) -> Result<Status> {
    let task = load_task(&args.task)?;
    let plans = load_plans(&task, &args.plans)?;
    let relation = DominanceRelation::from(args.relation);
    let result = if relation == DominanceRelation::Loopless && args.limits.unpruned {
        let mut current = topcert::transform::TransformResult::identity(&task);
        for p in &plans {
            if let Some(next) = current.forbid_further_with(relation, p, args.limits.loopless())? {
                current = next;
            }
        }
        current
    } else {
        forbid_set(&task, &plans, relation)?
    };
    for s in &result.skipped {
        eprintln!("note: plan {} skipped: {}", s.index, s.reason);
    }
    fs::write(&args.output, topcert::sas::serialize_sas(&result.task))
        .with_context(|| format!("writing {}", args.output.display()))?;
    let map_path = map_path(&args.output);
    write_json(&map_path, &result.mapping_json())?;
    println!(
        "{} variables, {} actions; map in {}",
        result.task.variables.len(),
        result.task.actions.len(),
        map_path.display()
    );
    Ok(Status::Success)
}

fn map_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{}.map.json", stem))
}

pub fn enumerate(args: &EnumerateArgs) -> Result<Status> {
    let task = load_task(&args.task)?;
    let limits = args.limits.search();
    let q = resolve_q(&task, &args.q, &limits)?;
    let result = if args.loopless {
        enumerate_loopless(&task, Some(q), &limits)?
    } else {
        enumerate_plans(&task, q, args.limits.length_cap, &limits)?
    };
    let mut plans = result.plans.clone();
    plans.sort_by(|a, b| (a.cost(), a.steps()).cmp(&(b.cost(), b.steps())));
    for p in &plans {
        println!("{} {}", p.cost(), p.action_names(&task).join(" "));
    }
    if let Some(path) = &args.output {
        let summaries: Vec<PlanSummary> =
            plans.iter().map(|p| PlanSummary::new(&task, p)).collect();
        write_json(
            path,
            &json!({
                "q": q,
                "loopless": args.loopless,
                "complete": result.complete,
                "nodes": result.nodes,
                "plans": summaries,
            }),
        )?;
    }
    if !result.complete {
        println!("truncated by the length cap");
        return Ok(Status::Inconclusive);
    }
    Ok(Status::Success)
}
