//! JSON shapes shared by the command line and the HTTP API.

use serde::Serialize;
use serde_json::{json, Value};

use articopt::evaluate::{self, UnitCapCheck};
use articopt::report::{self, CombinedReport};
use articopt::{model, solver, Constraints, CourseId, Error, Plan, Result, Selection, Units};
use std::collections::BTreeSet;

#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub opt_size: usize,
    pub forced: BTreeSet<CourseId>,
    pub canonical_plan: Plan,
    pub canonical_units: Units,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_optima: Option<Vec<Plan>>,
    pub constraints: Constraints,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct UnitCapWarning {
    pub total_units: Units,
    pub cap: Units,
}

#[derive(Debug, Serialize)]
pub struct SolveResponse {
    #[serde(flatten)]
    pub summary: SolveSummary,
    pub report: CombinedReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit_cap_warning: Option<UnitCapWarning>,
}

pub fn solve_summary(selection: &Selection, constraints: &Constraints, all_optima: bool) -> Result<(SolveSummary, solver::Solution)> {
    let solution = solver::solve(selection, constraints)?;
    let summary = SolveSummary {
        opt_size: solution.opt_size,
        forced: solution.forced.clone(),
        canonical_plan: solution.canonical_plan.clone(),
        canonical_units: model::total_units(&solution.canonical_plan, &selection.catalog)?,
        all_optima: all_optima.then(|| solution.all_optima.iter().cloned().collect()),
        constraints: constraints.clone(),
    };
    Ok((summary, solution))
}

/// Solves, synthesizes the combined report and checks the canonical plan against `unit_cap`.
pub fn solve_response(
    selection: &Selection,
    constraints: &Constraints,
    unit_cap: Units,
    all_optima: bool,
) -> Result<SolveResponse> {
    let (summary, solution) = solve_summary(selection, constraints, all_optima)?;
    let report = report::synthesize_rows(&solution, selection);
    let unit_cap_warning = match evaluate::unit_cap_check(&solution.canonical_plan, &selection.catalog, unit_cap)? {
        UnitCapCheck::Warning { total_units, cap } => Some(UnitCapWarning { total_units, cap }),
        UnitCapCheck::Pass { .. } => None,
    };
    Ok(SolveResponse {
        summary,
        report,
        unit_cap_warning,
    })
}

/// `{"error": CODE, "detail": text}`, plus the unsatisfiable requirements when infeasible.
pub fn error_body(err: &Error) -> Value {
    let mut body = json!({"error": err.code(), "detail": err.to_string()});
    if let Error::Infeasible(refs) = err {
        body["unsatisfiable"] = serde_json::to_value(refs).expect("requirement refs serialize");
    }
    body
}

pub fn parse_units(value: f64) -> Result<Units> {
    Units::from_decimal(value).map_err(|reason| Error::InvalidUnits {
        id: "unit cap".into(),
        reason,
    })
}
