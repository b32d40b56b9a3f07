//! Domain types for articulation agreements and the rules deciding when a
//! set of courses satisfies a requirement.
//!
//! Course reuse is unrestricted: one course may count toward any number of
//! requirements, within one agreement and across agreements.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, RequirementRef, Result};
use crate::ingest::Catalog;

/// A community-college course identifier such as `PSYC A100`.
///
/// Stored trimmed with internal whitespace collapsed to single spaces.
/// Comparison is case-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CourseId(String);

impl CourseId {
    pub fn new(raw: &str) -> Result<Self> {
        let normalized = raw.split_whitespace().collect::<Vec<_>>().join(" ");
        if normalized.is_empty() {
            return Err(Error::InvalidCourseId(raw.to_string(), "empty identifier"));
        }
        if department_of(&normalized).is_empty() {
            return Err(Error::InvalidCourseId(
                raw.to_string(),
                "identifier must start with a department prefix",
            ));
        }
        Ok(CourseId(normalized))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Leading run of letters, e.g. `PSYC` for `PSYC A100`.
    pub fn department(&self) -> &str {
        department_of(&self.0)
    }
}

/// Longest leading run of alphabetic characters.
pub fn department_of(id: &str) -> &str {
    let end = id
        .char_indices()
        .find(|(_, c)| !c.is_alphabetic())
        .map_or(id.len(), |(i, _)| i);
    &id[..end]
}

impl TryFrom<String> for CourseId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        CourseId::new(&value)
    }
}

impl From<CourseId> for String {
    fn from(id: CourseId) -> String {
        id.0
    }
}

impl FromStr for CourseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CourseId::new(s)
    }
}

impl fmt::Display for CourseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Semester units held as an exact count of tenths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Units(u32);

impl Units {
    pub const ZERO: Units = Units(0);
    /// Upper bound accepted for a single course.
    pub const MAX_PER_COURSE: Units = Units(200);

    pub const fn from_tenths(tenths: u32) -> Self {
        Units(tenths)
    }

    pub const fn whole(units: u32) -> Self {
        Units(units * 10)
    }

    pub fn tenths(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 10.0
    }

    /// Converts a decimal value carrying at most one fractional digit.
    pub fn from_decimal(value: f64) -> std::result::Result<Self, String> {
        if !value.is_finite() {
            return Err("units must be finite".into());
        }
        if value < 0.0 {
            return Err(format!("units must not be negative (got {value})"));
        }
        let scaled = value * 10.0;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-6 {
            return Err(format!("units allow one decimal place (got {value})"));
        }
        if rounded > f64::from(u32::MAX) {
            return Err(format!("units out of range (got {value})"));
        }
        Ok(Units(rounded as u32))
    }
}

impl Add for Units {
    type Output = Units;

    fn add(self, rhs: Units) -> Units {
        Units(self.0 + rhs.0)
    }
}

impl Sum for Units {
    fn sum<I: Iterator<Item = Units>>(iter: I) -> Units {
        iter.fold(Units::ZERO, Add::add)
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

impl Serialize for Units {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Units {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Units::from_decimal(value).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Course {
    pub id: CourseId,
    pub title: String,
    pub units: Units,
}

/// A conjunction of courses: every course must be taken for the group to count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OptionGroup {
    pub courses: Vec<CourseId>,
}

impl OptionGroup {
    pub fn new(courses: Vec<CourseId>) -> Self {
        OptionGroup { courses }
    }

    pub fn single(course: CourseId) -> Self {
        OptionGroup { courses: vec![course] }
    }

    /// Department of the first course, used by the distinct-department rule.
    pub fn department(&self) -> &str {
        self.courses.first().map_or("", |c| c.department())
    }

    pub fn is_taken(&self, plan: &BTreeSet<CourseId>) -> bool {
        self.courses.iter().all(|c| plan.contains(c))
    }

    fn validate(&self, requirement: &str) -> Result<()> {
        if self.courses.is_empty() {
            return Err(Error::InvalidRequirement {
                requirement: requirement.to_string(),
                reason: "empty option group".into(),
            });
        }
        let mut seen = HashSet::new();
        for course in &self.courses {
            if !seen.insert(course) {
                return Err(Error::InvalidRequirement {
                    requirement: requirement.to_string(),
                    reason: format!("course {course} repeated within one option group"),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for OptionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.courses.iter().map(CourseId::as_str).collect();
        f.write_str(&names.join(" AND "))
    }
}

/// Take `choose` distinct option groups out of `options`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub id: String,
    pub label: String,
    pub choose: usize,
    pub options: Vec<OptionGroup>,
    pub distinct_departments: bool,
}

impl Requirement {
    /// A choose-one requirement over single-course options.
    pub fn one_of<I, S>(id: &str, label: &str, courses: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let options = courses
            .into_iter()
            .map(|c| CourseId::new(c.as_ref()).map(OptionGroup::single))
            .collect::<Result<Vec<_>>>()?;
        let requirement = Requirement {
            id: id.to_string(),
            label: label.to_string(),
            choose: 1,
            options,
            distinct_departments: false,
        };
        requirement.validate()?;
        Ok(requirement)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidRequirement {
            requirement: self.id.clone(),
            reason,
        };
        if self.id.trim().is_empty() {
            return Err(invalid("requirement id must not be empty".into()));
        }
        if self.options.is_empty() {
            return Err(invalid("requirement has no options".into()));
        }
        if self.choose == 0 {
            return Err(invalid("choose must be positive".into()));
        }
        if self.choose > self.options.len() {
            return Err(invalid(format!(
                "choose {} exceeds {} options",
                self.choose,
                self.options.len()
            )));
        }
        for group in &self.options {
            group.validate(&self.id)?;
        }
        if self.distinct_departments {
            let departments: HashSet<&str> = self.options.iter().map(OptionGroup::department).collect();
            if departments.len() < self.choose {
                return Err(invalid(format!(
                    "distinct departments required but options span only {} departments",
                    departments.len()
                )));
            }
        }
        Ok(())
    }

    pub fn courses(&self) -> impl Iterator<Item = &CourseId> {
        self.options.iter().flat_map(|g| g.courses.iter())
    }

    /// Whether `plan` satisfies this requirement. Course ids are not checked.
    pub fn is_met_by(&self, plan: &BTreeSet<CourseId>) -> bool {
        let taken = self.options.iter().filter(|g| g.is_taken(plan));
        if self.distinct_departments {
            taken.map(OptionGroup::department).collect::<HashSet<_>>().len() >= self.choose
        } else {
            taken.count() >= self.choose
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementKind {
    Major,
    GeneralEducation,
    AssociateDegree,
}

/// One college-to-(institution, major) articulation agreement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agreement {
    pub college: String,
    pub institution: String,
    pub major: String,
    pub year: String,
    pub kind: AgreementKind,
    pub requirements: Vec<Requirement>,
}

impl Agreement {
    /// Stable store id, `institution|major|year`.
    pub fn id(&self) -> String {
        format!("{}|{}|{}", self.institution, self.major, self.year)
    }

    /// Human label used in report annotations.
    pub fn label(&self) -> String {
        format!("{} – {}", self.institution, self.major)
    }

    pub fn validate(&self) -> Result<()> {
        if self.requirements.is_empty() {
            return Err(Error::InvalidAgreement {
                agreement: self.id(),
                reason: "agreement has no requirements".into(),
            });
        }
        let mut ids = HashSet::new();
        for requirement in &self.requirements {
            requirement.validate()?;
            if !ids.insert(requirement.id.as_str()) {
                return Err(Error::InvalidAgreement {
                    agreement: self.id(),
                    reason: format!("duplicate requirement id {}", requirement.id),
                });
            }
        }
        Ok(())
    }

    pub fn courses(&self) -> impl Iterator<Item = &CourseId> {
        self.requirements.iter().flat_map(Requirement::courses)
    }
}

/// The agreements a student is planning against, all from one college.
#[derive(Debug, Clone)]
pub struct Selection {
    pub college: String,
    pub agreements: Vec<Arc<Agreement>>,
    pub catalog: Arc<Catalog>,
}

impl Selection {
    pub fn new(catalog: Arc<Catalog>, agreements: Vec<Arc<Agreement>>) -> Result<Self> {
        if agreements.is_empty() {
            return Err(Error::EmptySelection);
        }
        for agreement in &agreements {
            if agreement.college != catalog.college {
                return Err(Error::MixedColleges(catalog.college.clone(), agreement.college.clone()));
            }
        }
        Ok(Selection {
            college: catalog.college.clone(),
            agreements,
            catalog,
        })
    }

    /// Every requirement in selection order, tagged with its reference.
    pub fn requirements(&self) -> impl Iterator<Item = (RequirementRef, &Requirement)> {
        self.agreements.iter().flat_map(|a| {
            let agreement = a.id();
            a.requirements.iter().map(move |r| {
                (
                    RequirementRef {
                        agreement: agreement.clone(),
                        requirement: r.id.clone(),
                    },
                    r,
                )
            })
        })
    }

    /// Courses named by any option group, in first-appearance order.
    pub fn referenced_courses(&self) -> Vec<CourseId> {
        let mut seen = HashSet::new();
        self.agreements
            .iter()
            .flat_map(|a| a.courses())
            .filter(|c| seen.insert(*c))
            .cloned()
            .collect()
    }
}

/// A set of courses. Ordered lexicographically by its sorted id sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Plan {
    pub courses: BTreeSet<CourseId>,
}

impl Plan {
    pub fn new() -> Self {
        Plan::default()
    }

    /// Builds a plan from raw ids, normalizing each one.
    pub fn parse<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        ids.into_iter()
            .map(|s| CourseId::new(s.as_ref()))
            .collect::<Result<BTreeSet<_>>>()
            .map(|courses| Plan { courses })
    }

    pub fn len(&self) -> usize {
        self.courses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.courses.is_empty()
    }

    pub fn contains(&self, id: &CourseId) -> bool {
        self.courses.contains(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CourseId> {
        self.courses.iter()
    }

    pub fn symmetric_difference_len(&self, other: &Plan) -> usize {
        self.courses.symmetric_difference(&other.courses).count()
    }

    pub fn intersection_len(&self, other: &Plan) -> usize {
        self.courses.intersection(&other.courses).count()
    }
}

impl FromIterator<CourseId> for Plan {
    fn from_iter<T: IntoIterator<Item = CourseId>>(iter: T) -> Self {
        Plan {
            courses: iter.into_iter().collect(),
        }
    }
}

impl From<BTreeSet<CourseId>> for Plan {
    fn from(courses: BTreeSet<CourseId>) -> Self {
        Plan { courses }
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.courses.iter().map(CourseId::as_str).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// What-if constraints: courses every plan must contain or must avoid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    pub pinned: BTreeSet<CourseId>,
    pub excluded: BTreeSet<CourseId>,
}

impl Constraints {
    pub fn new(pinned: BTreeSet<CourseId>, excluded: BTreeSet<CourseId>) -> Result<Self> {
        let constraints = Constraints { pinned, excluded };
        constraints.validate()?;
        Ok(constraints)
    }

    pub fn pin(mut self, id: CourseId) -> Self {
        self.pinned.insert(id);
        self
    }

    pub fn exclude(mut self, id: CourseId) -> Self {
        self.excluded.insert(id);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let both: Vec<String> = self
            .pinned
            .intersection(&self.excluded)
            .map(ToString::to_string)
            .collect();
        if both.is_empty() {
            Ok(())
        } else {
            Err(Error::ConstraintConflict(both))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pinned.is_empty() && self.excluded.is_empty()
    }
}

fn check_resolved<'a>(ids: impl IntoIterator<Item = &'a CourseId>, catalog: &Catalog) -> Result<()> {
    let mut missing: Vec<String> = ids
        .into_iter()
        .filter(|id| !catalog.contains(id))
        .map(ToString::to_string)
        .collect();
    if missing.is_empty() {
        return Ok(());
    }
    missing.sort();
    missing.dedup();
    Err(Error::UnresolvedCourses(missing))
}

/// Whether `plan` satisfies `requirement`, after checking every id against `catalog`.
pub fn satisfies(plan: &Plan, requirement: &Requirement, catalog: &Catalog) -> Result<bool> {
    check_resolved(plan.iter().chain(requirement.courses()), catalog)?;
    Ok(requirement.is_met_by(&plan.courses))
}

/// Whether `plan` satisfies every requirement of every selected agreement.
pub fn plan_satisfies_all(plan: &Plan, selection: &Selection) -> Result<bool> {
    check_resolved(plan.iter(), &selection.catalog)?;
    Ok(selection
        .agreements
        .iter()
        .flat_map(|a| a.requirements.iter())
        .all(|r| r.is_met_by(&plan.courses)))
}

/// Requirements of `selection` that `plan` leaves unmet, in selection order.
pub fn unmet_requirements(plan: &Plan, selection: &Selection) -> Vec<RequirementRef> {
    selection
        .requirements()
        .filter(|(_, r)| !r.is_met_by(&plan.courses))
        .map(|(reference, _)| reference)
        .collect()
}

/// Exact sum of units over the plan.
pub fn total_units(plan: &Plan, catalog: &Catalog) -> Result<Units> {
    check_resolved(plan.iter(), catalog)?;
    Ok(plan
        .iter()
        .filter_map(|id| catalog.get(id))
        .map(|c| c.units)
        .sum())
}
