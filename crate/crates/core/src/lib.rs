//! Certification and generation of top-quality plan sets for SAS+ tasks.
//!
//! A candidate set of plans is checked against a cost bound and a dominance
//! relation either directly, by enumerating every plan within the bound, or
//! through plan-forbidding task transformations whose remaining plans are
//! examined with an optimal search.

pub mod certify;
pub mod error;
pub mod plan;
pub mod planner;
pub mod sas;
pub mod search;
pub mod task;
pub mod transform;

#[cfg(any(test, feature = "testing"))]
pub mod testing;

pub use certify::{
    certify_dominance, certify_top_k, certify_top_quality, check_by_enumeration,
    CertificationReport, CertifyOptions, Verdict, Witness,
};
pub use error::{Error, Result};
pub use plan::{dominates, validate_plan, ActionMultiset, DominanceRelation, Plan, PlanRejection};
pub use planner::{plan_top_k, plan_top_quality, IterationTrace, PlannerOptions, PlannerResult};
pub use search::SearchLimits;
pub use task::{Action, ActionId, Cost, PartialAssignment, State, Task, Value, VarId, Variable};
