//! Exact minimum-cardinality plans.
//!
//! Satisfying a selection is a generalized minimum hitting set problem: each
//! requirement asks for `choose` option groups, each group is a conjunction of
//! courses, and any course may serve many requirements. [`solve`] runs a
//! branch-and-bound over course inclusion and keeps searching at the incumbent
//! bound so that every optimal plan is enumerated, not just one.
//! [`brute_force_oracle`] answers the same question by exhaustive subset
//! enumeration and exists to check [`solve`] on small instances.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, RequirementRef, Result};
use crate::ingest::Catalog;
use crate::model::{self, Constraints, CourseId, Plan, Selection, Units};

/// Maximum size of the optimal family before [`Error::Explosion`].
pub const MAX_OPTIMA: usize = 10_000;

/// Largest candidate universe [`brute_force_oracle`] accepts.
pub const ORACLE_UNIVERSE_LIMIT: usize = 20;

/// Above this many group combinations a requirement's bound falls back to 1.
const COMBINATION_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub opt_size: usize,
    pub canonical_plan: Plan,
    pub all_optima: BTreeSet<Plan>,
    /// Courses present in every optimal plan.
    pub forced: BTreeSet<CourseId>,
    pub constraints_applied: Constraints,
}

impl Solution {
    fn from_optima(optima: BTreeSet<Plan>, constraints: &Constraints, catalog: &Catalog) -> Result<Self> {
        let canonical_plan = canonical(optima.iter(), catalog).cloned().expect("optimal family is non-empty");
        let forced = optima
            .iter()
            .map(|p| p.courses.clone())
            .reduce(|acc, p| acc.intersection(&p).cloned().collect())
            .unwrap_or_default();
        Ok(Solution {
            opt_size: canonical_plan.len(),
            canonical_plan,
            all_optima: optima,
            forced,
            constraints_applied: constraints.clone(),
        })
    }

    /// Smallest and largest total units over the optimal family.
    pub fn units_range(&self, catalog: &Catalog) -> (Units, Units) {
        let units = self.all_optima.iter().map(|p| plan_units(p, catalog));
        let (mut lo, mut hi) = (Units::from_tenths(u32::MAX), Units::ZERO);
        for u in units {
            lo = lo.min(u);
            hi = hi.max(u);
        }
        (lo, hi)
    }
}

fn plan_units(plan: &Plan, catalog: &Catalog) -> Units {
    plan.iter().filter_map(|c| catalog.get(c)).map(|c| c.units).sum()
}

/// Tie-break among equal-size plans: fewest units, then smallest sorted id sequence.
pub fn canonical<'a>(plans: impl Iterator<Item = &'a Plan>, catalog: &Catalog) -> Option<&'a Plan> {
    plans.min_by(|a, b| (plan_units(a, catalog), *a).cmp(&(plan_units(b, catalog), *b)))
}

fn check_constraints(selection: &Selection, constraints: &Constraints) -> Result<()> {
    constraints.validate()?;
    let missing: BTreeSet<String> = constraints
        .pinned
        .iter()
        .chain(&constraints.excluded)
        .filter(|c| !selection.catalog.contains(c))
        .map(ToString::to_string)
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::UnresolvedCourses(missing.into_iter().collect()))
    }
}

/// Requirements that cannot be met even by taking every non-excluded course.
///
/// Requirements are independent apart from shared courses, so the selection is
/// feasible exactly when this list is empty.
pub fn unattainable_requirements(selection: &Selection, constraints: &Constraints) -> Vec<RequirementRef> {
    let everything: BTreeSet<CourseId> = selection
        .referenced_courses()
        .into_iter()
        .filter(|c| !constraints.excluded.contains(c))
        .chain(constraints.pinned.iter().cloned())
        .collect();
    selection
        .requirements()
        .filter(|(_, r)| !r.is_met_by(&everything))
        .map(|(reference, _)| reference)
        .collect()
}

/// Every minimum-cardinality plan satisfying the selection under `constraints`.
///
/// Pinned courses are part of every plan and count toward its size.
pub fn solve(selection: &Selection, constraints: &Constraints) -> Result<Solution> {
    check_constraints(selection, constraints)?;
    let unattainable = unattainable_requirements(selection, constraints);
    if !unattainable.is_empty() {
        return Err(Error::Infeasible(unattainable));
    }
    let instance = Instance::build(selection, constraints);
    let mut search = Search {
        instance: &instance,
        best: usize::MAX,
        optima: Vec::new(),
        overflow: false,
    };
    let mut included = FixedBitSet::with_capacity(instance.courses.len());
    for pinned in &constraints.pinned {
        included.insert(instance.index[pinned]);
    }
    let mut banned = FixedBitSet::with_capacity(instance.courses.len());
    let size = included.count_ones(..);
    search.run(&mut included, &mut banned, size);
    if search.overflow {
        return Err(Error::Explosion(MAX_OPTIMA));
    }
    let optima: BTreeSet<Plan> = search
        .optima
        .iter()
        .map(|mask| mask.ones().map(|i| instance.courses[i].clone()).collect())
        .collect();
    if optima.is_empty() {
        return Err(Error::Infeasible(selection.requirements().map(|(r, _)| r).collect()));
    }
    Solution::from_optima(optima, constraints, &selection.catalog)
}

/// Same contract as [`solve`], by enumerating subsets in increasing size.
pub fn brute_force_oracle(selection: &Selection, constraints: &Constraints) -> Result<Solution> {
    check_constraints(selection, constraints)?;
    let universe: Vec<CourseId> = selection
        .referenced_courses()
        .into_iter()
        .filter(|c| !constraints.excluded.contains(c))
        .collect();
    if universe.len() > ORACLE_UNIVERSE_LIMIT {
        return Err(Error::UniverseTooLarge {
            size: universe.len(),
            limit: ORACLE_UNIVERSE_LIMIT,
        });
    }
    let free: Vec<&CourseId> = universe.iter().filter(|c| !constraints.pinned.contains(*c)).collect();
    let requirements: Vec<_> = selection.requirements().map(|(_, r)| r).collect();
    for k in 0..=free.len() {
        let mut found = BTreeSet::new();
        for combo in free.iter().combinations(k) {
            let plan: BTreeSet<CourseId> = constraints
                .pinned
                .iter()
                .cloned()
                .chain(combo.into_iter().map(|c| (*c).clone()))
                .collect();
            if requirements.iter().all(|r| r.is_met_by(&plan)) {
                found.insert(Plan::from(plan));
                if found.len() > MAX_OPTIMA {
                    return Err(Error::Explosion(MAX_OPTIMA));
                }
            }
        }
        if !found.is_empty() {
            return Solution::from_optima(found, constraints, &selection.catalog);
        }
    }
    Err(Error::Infeasible(unattainable_requirements(selection, constraints)))
}

/// Fewest additional courses that complete `plan`, tie-broken like [`solve`].
pub fn minimal_completion(plan: &Plan, selection: &Selection) -> Result<BTreeSet<CourseId>> {
    if model::plan_satisfies_all(plan, selection)? {
        return Ok(BTreeSet::new());
    }
    let constraints = Constraints {
        pinned: plan.courses.clone(),
        excluded: BTreeSet::new(),
    };
    let solution = solve(selection, &constraints)?;
    let completions: Vec<Plan> = solution
        .all_optima
        .iter()
        .map(|p| p.courses.difference(&plan.courses).cloned().collect())
        .collect();
    Ok(canonical(completions.iter(), &selection.catalog)
        .expect("solve returned at least one optimum")
        .courses
        .clone())
}

struct Group {
    mask: FixedBitSet,
    department: usize,
}

struct Req {
    choose: usize,
    distinct: bool,
    groups: Vec<Group>,
}

/// Bitset encoding of a selection with excluded courses' groups removed.
struct Instance {
    courses: Vec<CourseId>,
    index: HashMap<CourseId, usize>,
    reqs: Vec<Req>,
}

impl Instance {
    fn build(selection: &Selection, constraints: &Constraints) -> Self {
        let mut courses: Vec<CourseId> = selection
            .referenced_courses()
            .into_iter()
            .filter(|c| !constraints.excluded.contains(c))
            .collect();
        for pinned in &constraints.pinned {
            if !courses.contains(pinned) {
                courses.push(pinned.clone());
            }
        }
        courses.sort();
        let index: HashMap<CourseId, usize> = courses.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut departments: HashMap<String, usize> = HashMap::new();
        let reqs = selection
            .requirements()
            .map(|(_, r)| Req {
                choose: r.choose,
                distinct: r.distinct_departments,
                groups: r
                    .options
                    .iter()
                    .filter(|g| g.courses.iter().all(|c| !constraints.excluded.contains(c)))
                    .map(|g| {
                        let mut mask = FixedBitSet::with_capacity(courses.len());
                        for c in &g.courses {
                            mask.insert(index[c]);
                        }
                        let next = departments.len();
                        let department = *departments.entry(g.department().to_string()).or_insert(next);
                        Group { mask, department }
                    })
                    .collect(),
            })
            .collect();
        Instance { courses, index, reqs }
    }
}

impl Req {
    fn is_met(&self, included: &FixedBitSet) -> bool {
        let taken = self.groups.iter().filter(|g| g.mask.is_subset(included));
        if self.distinct {
            taken.map(|g| g.department).unique().count() >= self.choose
        } else {
            taken.count() >= self.choose
        }
    }

    fn viable<'a>(&'a self, banned: &'a FixedBitSet) -> impl Iterator<Item = &'a Group> + 'a {
        self.groups.iter().filter(move |g| g.mask.is_disjoint(banned))
    }

    /// Lower bound on courses still needed, or `None` when unattainable.
    fn extra_needed(&self, included: &FixedBitSet, banned: &FixedBitSet) -> Option<usize> {
        let viable: Vec<&Group> = self.viable(banned).collect();
        let attainable = if self.distinct {
            viable.iter().map(|g| g.department).unique().count() >= self.choose
        } else {
            viable.len() >= self.choose
        };
        if !attainable {
            return None;
        }
        let cost = |groups: &[&&Group]| {
            let mut union = FixedBitSet::with_capacity(included.len());
            for g in groups {
                union.union_with(&g.mask);
            }
            union.difference_count(included)
        };
        if binomial(viable.len(), self.choose) > COMBINATION_BUDGET {
            return Some(1);
        }
        viable
            .iter()
            .combinations(self.choose)
            .filter(|combo| !self.distinct || combo.iter().map(|g| g.department).all_unique())
            .map(|combo| cost(&combo))
            .min()
    }

    fn candidates(&self, included: &FixedBitSet, banned: &FixedBitSet) -> FixedBitSet {
        let mut union = FixedBitSet::with_capacity(included.len());
        for g in self.viable(banned) {
            union.union_with(&g.mask);
        }
        union.difference_with(included);
        union
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

struct Search<'a> {
    instance: &'a Instance,
    best: usize,
    optima: Vec<FixedBitSet>,
    overflow: bool,
}

impl Search<'_> {
    fn run(&mut self, included: &mut FixedBitSet, banned: &mut FixedBitSet, size: usize) {
        if self.overflow || size > self.best {
            return;
        }
        let unmet: Vec<&Req> = self.instance.reqs.iter().filter(|r| !r.is_met(included)).collect();
        if unmet.is_empty() {
            self.record(included, size);
            return;
        }

        let mut open = Vec::with_capacity(unmet.len());
        for req in unmet {
            let Some(extra) = req.extra_needed(included, banned) else {
                return;
            };
            open.push((req, extra, req.candidates(included, banned)));
        }

        // Requirements with pairwise disjoint candidate sets need disjoint new courses.
        open.sort_by_key(|(_, extra, cands)| (std::cmp::Reverse(*extra), cands.count_ones(..)));
        let mut used = FixedBitSet::with_capacity(included.len());
        let mut bound = 0;
        for (_, extra, cands) in &open {
            if cands.is_disjoint(&used) {
                bound += extra;
                used.union_with(cands);
            }
        }
        if size + bound > self.best {
            return;
        }

        let (_, _, branch_on) = open
            .iter()
            .min_by_key(|(_, extra, cands)| (cands.count_ones(..), std::cmp::Reverse(*extra)))
            .expect("at least one open requirement");
        let course = branch_on
            .ones()
            .max_by_key(|&c| {
                let hits = open.iter().filter(|(_, _, cands)| cands.contains(c)).count();
                (hits, std::cmp::Reverse(c))
            })
            .expect("open requirement has a candidate course");

        included.insert(course);
        self.run(included, banned, size + 1);
        included.set(course, false);

        banned.insert(course);
        self.run(included, banned, size);
        banned.set(course, false);
    }

    fn record(&mut self, included: &FixedBitSet, size: usize) {
        if size < self.best {
            self.best = size;
            self.optima.clear();
        }
        self.optima.push(included.clone());
        if self.optima.len() > MAX_OPTIMA {
            self.overflow = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Agreement, AgreementKind, Course, Requirement};
    use std::sync::Arc;

    fn id(s: &str) -> CourseId {
        CourseId::new(s).unwrap()
    }

    fn plan(ids: &[&str]) -> Plan {
        Plan::parse(ids).unwrap()
    }

    fn agreement(institution: &str, requirements: Vec<Requirement>) -> Arc<Agreement> {
        Arc::new(Agreement {
            college: "Glendale Community College".into(),
            institution: institution.into(),
            major: "History".into(),
            year: "2021-2022".into(),
            kind: AgreementKind::Major,
            requirements,
        })
    }

    fn selection_of(ids: &[&str], agreements: Vec<Arc<Agreement>>) -> Selection {
        let catalog = Catalog::new(
            "Glendale Community College",
            ids.iter().map(|s| Course {
                id: id(s),
                title: String::new(),
                units: Units::whole(3),
            }),
        )
        .unwrap();
        Selection::new(Arc::new(catalog), agreements).unwrap()
    }

    fn glendale_history() -> Selection {
        let ucsd = agreement(
            "UC San Diego",
            vec![
                Requirement::one_of("writing", "Writing Course", ["ENG 200", "ENG 240"]).unwrap(),
                Requirement::one_of("american-history", "American History Course", ["HIST 50", "HIST 70", "HIST 90"])
                    .unwrap(),
            ],
        );
        let csuf = agreement(
            "CSU Fullerton",
            vec![
                Requirement::one_of("writing", "Writing Course", ["ENG 200"]).unwrap(),
                Requirement::one_of("american-history", "American History Course", ["HIST 70", "HIST 90", "HIST 110"])
                    .unwrap(),
            ],
        );
        selection_of(
            &["ENG 200", "ENG 240", "HIST 50", "HIST 70", "HIST 90", "HIST 110"],
            vec![ucsd, csuf],
        )
    }

    #[test]
    fn glendale_history_optima() {
        let s = solve(&glendale_history(), &Constraints::default()).unwrap();
        assert_eq!(s.opt_size, 2);
        let expected: BTreeSet<Plan> = [plan(&["ENG 200", "HIST 70"]), plan(&["ENG 200", "HIST 90"])].into();
        assert_eq!(s.all_optima, expected);
        assert_eq!(s.forced, [id("ENG 200")].into());
        assert_eq!(s.canonical_plan, plan(&["ENG 200", "HIST 70"]));
    }

    #[test]
    fn excluding_shared_history_costs_a_course() {
        let c = Constraints::default().exclude(id("HIST 70")).exclude(id("HIST 90"));
        let s = solve(&glendale_history(), &c).unwrap();
        assert_eq!(s.opt_size, 3);
        assert_eq!(s.all_optima, [plan(&["ENG 200", "HIST 110", "HIST 50"])].into());
        assert_eq!(s, brute_force_oracle(&glendale_history(), &c).unwrap());
    }

    #[test]
    fn pinning_a_less_optimal_course() {
        let c = Constraints::default().pin(id("HIST 50"));
        let s = solve(&glendale_history(), &c).unwrap();
        assert_eq!(s.opt_size, 3);
        assert!(s.all_optima.iter().all(|p| p.contains(&id("HIST 50"))));
        assert_eq!(s, brute_force_oracle(&glendale_history(), &c).unwrap());
    }

    #[test]
    fn excluding_all_writing_options_is_infeasible() {
        let c = Constraints::default().exclude(id("ENG 200"));
        let err = solve(&glendale_history(), &c).unwrap_err();
        let Error::Infeasible(refs) = err else { panic!("expected infeasible") };
        assert_eq!(
            refs,
            vec![RequirementRef {
                agreement: "CSU Fullerton|History|2021-2022".into(),
                requirement: "writing".into(),
            }]
        );
        assert!(matches!(brute_force_oracle(&glendale_history(), &c), Err(Error::Infeasible(r)) if r == refs));
    }

    #[test]
    fn oracle_matches_on_glendale_history() {
        let c = Constraints::default();
        assert_eq!(solve(&glendale_history(), &c).unwrap(), brute_force_oracle(&glendale_history(), &c).unwrap());
    }

    #[test]
    fn oracle_refuses_large_universes() {
        let names: Vec<String> = (0..21).map(|i| format!("GEN {i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let r = Requirement::one_of("any", "Any", &refs).unwrap();
        let s = selection_of(&refs, vec![agreement("X", vec![r])]);
        assert!(matches!(
            brute_force_oracle(&s, &Constraints::default()),
            Err(Error::UniverseTooLarge { size: 21, limit: 20 })
        ));
        assert_eq!(solve(&s, &Constraints::default()).unwrap().all_optima.len(), 21);
    }

    #[test]
    fn constraint_errors() {
        let c = Constraints::default().pin(id("HIST 50")).exclude(id("HIST 50"));
        assert!(matches!(solve(&glendale_history(), &c), Err(Error::ConstraintConflict(_))));
        let c = Constraints::default().pin(id("NOPE 1"));
        assert!(matches!(solve(&glendale_history(), &c), Err(Error::UnresolvedCourses(_))));
    }

    #[test]
    fn explosion_is_reported() {
        // 15 independent choose-one requirements with two options each: 2^15 optima.
        let mut names = Vec::new();
        let mut reqs = Vec::new();
        for i in 0..15 {
            let a = format!("AA {i}");
            let b = format!("BB {i}");
            reqs.push(Requirement::one_of(&format!("r{i}"), "R", [&a, &b]).unwrap());
            names.push(a);
            names.push(b);
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let s = selection_of(&refs, vec![agreement("X", reqs)]);
        assert!(matches!(solve(&s, &Constraints::default()), Err(Error::Explosion(MAX_OPTIMA))));
    }

    #[test]
    fn completion_of_a_partial_plan() {
        let sel = glendale_history();
        let q = minimal_completion(&plan(&["ENG 240", "HIST 110"]), &sel).unwrap();
        assert_eq!(q, [id("ENG 200"), id("HIST 50")].into());
        assert!(minimal_completion(&plan(&["ENG 200", "HIST 90"]), &sel).unwrap().is_empty());
        let from_empty = minimal_completion(&Plan::new(), &sel).unwrap();
        assert_eq!(from_empty.len(), 2);
        let optimum = Plan::from(from_empty);
        assert!(solve(&sel, &Constraints::default()).unwrap().all_optima.contains(&optimum));
    }

    #[test]
    fn choose_two_with_distinct_departments() {
        let mut r = Requirement::one_of("soc", "Social Science", ["SOC A100", "SOC A100H", "PSCI A180"]).unwrap();
        r.choose = 2;
        r.distinct_departments = true;
        let s = selection_of(&["SOC A100", "SOC A100H", "PSCI A180"], vec![agreement("X", vec![r])]);
        let sol = solve(&s, &Constraints::default()).unwrap();
        assert_eq!(sol.opt_size, 2);
        assert_eq!(sol.forced, [id("PSCI A180")].into());
        assert_eq!(sol, brute_force_oracle(&s, &Constraints::default()).unwrap());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(20, 10), 184_756);
    }
}
