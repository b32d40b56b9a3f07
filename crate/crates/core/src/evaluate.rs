//! Grading a candidate plan against the optimal family.
//!
//! A mistake is a necessary course left out or an unnecessary course put in.
//! The candidate is compared with the optimal plan it is closest to in
//! symmetric difference; the counts are taken against that plan.

use std::cmp::Reverse;

use serde::Serialize;

use crate::error::{RequirementRef, Result};
use crate::ingest::Catalog;
use crate::model::{self, Constraints, Plan, Selection, Units};
use crate::solver::{self, Solution};

/// Default cap above which a plan draws a warning.
pub const DEFAULT_UNIT_CAP: Units = Units::whole(60);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MistakeReport {
    pub missing: usize,
    pub excess: usize,
    pub total: usize,
    pub nearest_optimum: Plan,
    pub unfulfilled: Vec<RequirementRef>,
}

pub fn score_plan(candidate: &Plan, selection: &Selection) -> Result<MistakeReport> {
    // Resolves every candidate id before solving.
    model::plan_satisfies_all(candidate, selection)?;
    let solution = solver::solve(selection, &Constraints::default())?;
    Ok(score_against(candidate, selection, &solution))
}

/// Scores against an already computed unconstrained solution.
pub fn score_against(candidate: &Plan, selection: &Selection, solution: &Solution) -> MistakeReport {
    let nearest = solution
        .all_optima
        .iter()
        .min_by_key(|optimum| {
            (
                candidate.symmetric_difference_len(optimum),
                Reverse(candidate.intersection_len(optimum)),
                *optimum,
            )
        })
        .expect("solutions carry at least one optimum")
        .clone();
    let missing = nearest.courses.difference(&candidate.courses).count();
    let excess = candidate.courses.difference(&nearest.courses).count();
    MistakeReport {
        missing,
        excess,
        total: missing + excess,
        nearest_optimum: nearest,
        unfulfilled: model::unmet_requirements(candidate, selection),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UnitCapCheck {
    Pass { total_units: Units },
    Warning { total_units: Units, cap: Units },
}

impl UnitCapCheck {
    pub fn is_warning(&self) -> bool {
        matches!(self, UnitCapCheck::Warning { .. })
    }
}

/// Warns when the plan's units strictly exceed `cap`.
pub fn unit_cap_check(plan: &Plan, catalog: &Catalog, cap: Units) -> Result<UnitCapCheck> {
    let total_units = model::total_units(plan, catalog)?;
    Ok(if total_units > cap {
        UnitCapCheck::Warning { total_units, cap }
    } else {
        UnitCapCheck::Pass { total_units }
    })
}
