//! Randomized checks of the solver, report and evaluator against each other
//! and against the brute-force oracle.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use articopt::model::{plan_satisfies_all, unmet_requirements};
use articopt::report::{self, Instruction};
use articopt::solver::{brute_force_oracle, solve, Solution};
use articopt::{evaluate, Catalog, Constraints, Course, Error, Plan, Selection, Units};
use common::*;

const SEEDS: u64 = 200;

fn same_outcome(a: &Result<Solution, Error>, b: &Result<Solution, Error>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => x == y,
        (Err(Error::Infeasible(x)), Err(Error::Infeasible(y))) => x == y,
        _ => false,
    }
}

#[test]
fn solver_matches_oracle() {
    for seed in 0..SEEDS {
        let (selection, constraints) = random_instance(seed);
        let fast = solve(&selection, &constraints);
        let slow = brute_force_oracle(&selection, &constraints);
        assert!(same_outcome(&fast, &slow), "seed {seed}: {fast:?} vs {slow:?}");
    }
}

#[test]
fn solution_invariants() {
    for seed in 0..SEEDS {
        let (selection, constraints) = random_instance(seed);
        let Ok(solution) = solve(&selection, &constraints) else { continue };
        assert!(solution.all_optima.contains(&solution.canonical_plan));
        for p in &solution.all_optima {
            assert_eq!(p.len(), solution.opt_size);
            assert!(plan_satisfies_all(p, &selection).unwrap());
            assert!(constraints.pinned.is_subset(&p.courses), "seed {seed}");
            assert!(constraints.excluded.is_disjoint(&p.courses), "seed {seed}");
            assert!(solution.forced.is_subset(&p.courses));
        }
    }
}

#[test]
fn forced_course_characterization() {
    for seed in 0..SEEDS {
        let (selection, _) = random_instance(seed);
        let base = Constraints::default();
        let Ok(solution) = solve(&selection, &base) else { continue };
        for course in selection.referenced_courses() {
            let without = solve(&selection, &base.clone().exclude(course.clone()));
            let costs_more = match without {
                Err(Error::Infeasible(_)) => true,
                Ok(s) => s.opt_size > solution.opt_size,
                Err(e) => panic!("seed {seed}: {e}"),
            };
            assert_eq!(solution.forced.contains(&course), costs_more, "seed {seed} course {course}");
        }
    }
}

#[test]
fn adding_an_agreement_never_shrinks_the_plan() {
    for seed in 0..SEEDS {
        let (selection, _) = random_instance(seed);
        if selection.agreements.len() < 2 {
            continue;
        }
        let fewer = Selection::new(
            selection.catalog.clone(),
            selection.agreements[..selection.agreements.len() - 1].to_vec(),
        )
        .unwrap();
        let full = solve(&selection, &Constraints::default()).unwrap();
        let part = solve(&fewer, &Constraints::default()).unwrap();
        assert!(part.opt_size <= full.opt_size, "seed {seed}");
    }
}

#[test]
fn uniform_unit_scaling_keeps_the_optimal_family() {
    for seed in 0..SEEDS {
        let (selection, constraints) = random_instance(seed);
        let Ok(before) = solve(&selection, &constraints) else { continue };
        let scaled_catalog = Catalog::new(
            selection.catalog.college.clone(),
            selection.catalog.courses().map(|c| Course {
                units: Units::from_tenths(c.units.tenths() * 3),
                ..c.clone()
            }),
        )
        .unwrap();
        let scaled = Selection::new(Arc::new(scaled_catalog), selection.agreements.clone()).unwrap();
        let after = solve(&scaled, &constraints).unwrap();
        assert_eq!(before.opt_size, after.opt_size);
        assert_eq!(before.all_optima, after.all_optima);
        assert_eq!(before.forced, after.forced);
        assert_eq!(before.canonical_plan, after.canonical_plan);
    }
}

#[test]
fn solving_is_deterministic() {
    for seed in 0..50 {
        let (selection, constraints) = random_instance(seed);
        let a = solve(&selection, &constraints).map(|s| report::to_canonical_json(&s));
        let b = solve(&selection, &constraints).map(|s| report::to_canonical_json(&s));
        assert_eq!(a.ok(), b.ok());
    }
}

#[test]
fn report_rows_expand_to_the_optimal_family() {
    let mut separable = 0;
    for seed in 0..SEEDS {
        let (selection, constraints) = random_instance(seed);
        let Ok(solution) = solve(&selection, &constraints) else { continue };
        let combined = report::synthesize_rows(&solution, &selection);
        for row in &combined.rows {
            if row.instruction == Instruction::CompleteOne {
                assert!(row.options.len() >= 2);
            }
        }
        if combined.separable {
            separable += 1;
            let expanded = combined.expand_rows();
            assert_eq!(expanded.len(), solution.all_optima.len(), "seed {seed}");
            for p in &expanded {
                assert_eq!(p.len(), solution.opt_size);
                assert!(plan_satisfies_all(p, &selection).unwrap());
            }
            let expanded: BTreeSet<Plan> = expanded.into_iter().collect();
            assert_eq!(expanded, solution.all_optima, "seed {seed}");
        } else {
            let listed: BTreeSet<Plan> = combined.explicit_optima.clone().unwrap().into_iter().collect();
            assert_eq!(listed, solution.all_optima);
        }
        assert_eq!(report::parse_json(&report::render_json(&combined)).unwrap(), combined);
    }
    assert!(separable > SEEDS / 4, "only {separable} separable instances");
}

#[test]
fn annotations_name_exactly_the_matching_agreements() {
    for seed in 0..SEEDS {
        let (selection, constraints) = random_instance(seed);
        let Ok(solution) = solve(&selection, &constraints) else { continue };
        let combined = report::synthesize_rows(&solution, &selection);
        for row in &combined.rows {
            for agreement in &selection.agreements {
                let acceptable = row
                    .options
                    .iter()
                    .flat_map(|g| g.courses.iter())
                    .any(|c| agreement.courses().any(|a| a == c));
                let listed = row
                    .satisfies
                    .iter()
                    .any(|t| t.institution == agreement.institution && t.major == agreement.major);
                assert_eq!(acceptable, listed, "seed {seed}");
            }
        }
    }
}

#[test]
fn scoring_properties() {
    for seed in 0..SEEDS {
        let (selection, _) = random_instance(seed);
        let solution = solve(&selection, &Constraints::default()).unwrap();
        for optimum in &solution.all_optima {
            assert_eq!(evaluate::score_plan(optimum, &selection).unwrap().total, 0);
        }
        // A course outside every optimum adds exactly one mistake.
        let canonical = &solution.canonical_plan;
        let outsider = selection
            .catalog
            .courses()
            .map(|c| c.id.clone())
            .find(|c| solution.all_optima.iter().all(|p| !p.contains(c)));
        if let Some(extra) = outsider {
            let mut padded = canonical.clone();
            padded.courses.insert(extra);
            assert_eq!(evaluate::score_plan(&padded, &selection).unwrap().total, 1, "seed {seed}");
        }
        // Random candidates: bound by the canonical distance, unfulfilled agrees with satisfaction.
        let ids: Vec<_> = selection.catalog.courses().map(|c| c.id.clone()).collect();
        for mask in [0b1010_1010_1010u32, 0b0110_0110_0110, 0b1111, 0] {
            let candidate: Plan = ids
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| c.clone())
                .collect();
            let mistakes = evaluate::score_plan(&candidate, &selection).unwrap();
            assert_eq!(mistakes.total, mistakes.missing + mistakes.excess);
            assert!(mistakes.total <= candidate.symmetric_difference_len(canonical));
            assert_eq!(
                mistakes.unfulfilled.is_empty(),
                plan_satisfies_all(&candidate, &selection).unwrap()
            );
            assert_eq!(mistakes.unfulfilled, unmet_requirements(&candidate, &selection));
            assert_eq!(mistakes.total == 0, solution.all_optima.contains(&candidate));
        }
    }
}

#[test]
fn satisfies_all_is_the_conjunction_over_agreements() {
    for seed in 0..SEEDS {
        let (selection, _) = random_instance(seed);
        let ids: Vec<_> = selection.catalog.courses().map(|c| c.id.clone()).collect();
        for mask in 0u32..64 {
            let candidate: Plan = ids
                .iter()
                .enumerate()
                .filter(|(i, _)| mask.rotate_left(seed as u32 % 7) & (1 << i) != 0)
                .map(|(_, c)| c.clone())
                .collect();
            let whole = plan_satisfies_all(&candidate, &selection).unwrap();
            let per_agreement = selection.agreements.iter().all(|a| {
                let one = Selection::new(selection.catalog.clone(), vec![a.clone()]).unwrap();
                plan_satisfies_all(&candidate, &one).unwrap()
            });
            let per_requirement = selection.requirements().all(|(_, r)| r.is_met_by(&candidate.courses));
            assert_eq!(whole, per_agreement);
            assert_eq!(whole, per_requirement);
        }
    }
}
