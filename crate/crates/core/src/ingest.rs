//! Loading catalogs and agreements from their JSON documents.
//!
//! Catalog:
//!
//! ```json
//! {"college": "...", "courses": [{"id": "PSYC A100", "title": "...", "units": 3.0}]}
//! ```
//!
//! Agreement (each inner array of `options` is one conjunctive option group):
//!
//! ```json
//! {"college": "...", "institution": "...", "major": "...", "year": "2021-2022",
//!  "kind": "major",
//!  "requirements": [{"id": "writing", "label": "Writing Course", "choose": 1,
//!                    "distinct_departments": false, "options": [["ENG 200"], ["ENG 240"]]}]}
//! ```
//!
//! Unknown fields are rejected.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Agreement, AgreementKind, Course, CourseId, OptionGroup, Requirement, Selection, Units};

/// Courses offered by one college, keyed by normalized id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub college: String,
    courses: BTreeMap<CourseId, Course>,
}

impl Catalog {
    pub fn new(college: impl Into<String>, courses: impl IntoIterator<Item = Course>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for course in courses {
            if course.units > Units::MAX_PER_COURSE {
                return Err(Error::InvalidUnits {
                    id: course.id.to_string(),
                    reason: format!("{} exceeds the {} unit limit", course.units, Units::MAX_PER_COURSE),
                });
            }
            let id = course.id.clone();
            if map.insert(id.clone(), course).is_some() {
                return Err(Error::DuplicateCourse(id.to_string()));
            }
        }
        Ok(Catalog {
            college: college.into(),
            courses: map,
        })
    }

    pub fn get(&self, id: &CourseId) -> Option<&Course> {
        self.courses.get(id)
    }

    pub fn contains(&self, id: &CourseId) -> bool {
        self.courses.contains_key(id)
    }

    pub fn courses(&self) -> impl Iterator<Item = &Course> {
        self.courses.values()
    }

    pub fn len(&self) -> usize {
        self.courses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.courses.is_empty()
    }

    pub fn title(&self, id: &CourseId) -> &str {
        self.get(id).map_or("", |c| c.title.as_str())
    }
}

/// One college's catalog plus the agreements published against it.
#[derive(Debug, Clone)]
pub struct AgreementStore {
    catalog: Arc<Catalog>,
    agreements: Vec<Arc<Agreement>>,
}

impl AgreementStore {
    pub fn new(catalog: Catalog, agreements: Vec<Agreement>) -> Result<Self> {
        let mut ids = HashSet::new();
        for agreement in &agreements {
            if agreement.college != catalog.college {
                return Err(Error::MixedColleges(catalog.college.clone(), agreement.college.clone()));
            }
            if !ids.insert(agreement.id()) {
                return Err(Error::DuplicateAgreement(agreement.id()));
            }
            agreement.validate()?;
            resolve_all(agreement, &catalog)?;
        }
        Ok(AgreementStore {
            catalog: Arc::new(catalog),
            agreements: agreements.into_iter().map(Arc::new).collect(),
        })
    }

    /// Loads `catalog*.json` plus every other `*.json` file in `dir` as an agreement.
    ///
    /// Exactly one catalog file must be present. Agreements keep file-name order.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let io_err = |source| Error::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut files: Vec<_> = fs::read_dir(dir)
            .map_err(io_err)?
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(io_err)?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        files.sort();
        let (catalogs, agreements): (Vec<_>, Vec<_>) = files
            .into_iter()
            .partition(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("catalog")));
        let [catalog_path] = catalogs.as_slice() else {
            return Err(Error::InvalidAgreement {
                agreement: dir.display().to_string(),
                reason: format!("expected exactly one catalog*.json, found {}", catalogs.len()),
            });
        };
        let catalog = load_catalog_file(catalog_path)?;
        let agreements = agreements
            .iter()
            .map(|p| load_agreement_file(p, &catalog))
            .collect::<Result<Vec<_>>>()?;
        AgreementStore::new(catalog, agreements)
    }

    pub fn catalog(&self) -> &Arc<Catalog> {
        &self.catalog
    }

    pub fn agreements(&self) -> &[Arc<Agreement>] {
        &self.agreements
    }

    pub fn get(&self, id: &str) -> Option<&Arc<Agreement>> {
        self.agreements.iter().find(|a| a.id() == id)
    }

    /// Selection of every stored agreement, in store order.
    pub fn select_all(&self) -> Result<Selection> {
        Selection::new(self.catalog.clone(), self.agreements.clone())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    college: String,
    courses: Vec<CourseDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CourseDoc {
    id: CourseId,
    title: String,
    #[serde(default = "default_units")]
    units: f64,
}

fn default_units() -> f64 {
    3.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgreementDoc {
    college: String,
    institution: String,
    major: String,
    year: String,
    kind: AgreementKind,
    requirements: Vec<RequirementDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequirementDoc {
    id: String,
    label: String,
    #[serde(default = "default_choose")]
    choose: usize,
    #[serde(default)]
    distinct_departments: bool,
    options: Vec<Vec<CourseId>>,
}

fn default_choose() -> usize {
    1
}

fn malformed(what: &'static str, err: serde_json::Error) -> Error {
    Error::Malformed {
        what,
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

pub fn load_catalog(mut document: impl Read) -> Result<Catalog> {
    let mut text = String::new();
    document.read_to_string(&mut text).map_err(|source| Error::Io {
        path: "<catalog>".into(),
        source,
    })?;
    let doc: CatalogDoc = serde_json::from_str(&text).map_err(|e| malformed("catalog", e))?;
    let courses = doc
        .courses
        .into_iter()
        .map(|c| {
            let units = Units::from_decimal(c.units).map_err(|reason| Error::InvalidUnits {
                id: c.id.to_string(),
                reason,
            })?;
            Ok(Course {
                id: c.id,
                title: c.title,
                units,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Catalog::new(doc.college, courses)
}

pub fn load_agreement(mut document: impl Read, catalog: &Catalog) -> Result<Agreement> {
    let mut text = String::new();
    document.read_to_string(&mut text).map_err(|source| Error::Io {
        path: "<agreement>".into(),
        source,
    })?;
    let doc: AgreementDoc = serde_json::from_str(&text).map_err(|e| malformed("agreement", e))?;
    let agreement = Agreement {
        college: doc.college,
        institution: doc.institution,
        major: doc.major,
        year: doc.year,
        kind: doc.kind,
        requirements: doc
            .requirements
            .into_iter()
            .map(|r| Requirement {
                id: r.id,
                label: r.label,
                choose: r.choose,
                options: r.options.into_iter().map(OptionGroup::new).collect(),
                distinct_departments: r.distinct_departments,
            })
            .collect(),
    };
    resolve_all(&agreement, catalog)?;
    agreement.validate()?;
    Ok(agreement)
}

fn resolve_all(agreement: &Agreement, catalog: &Catalog) -> Result<()> {
    let missing: BTreeSet<String> = agreement
        .courses()
        .filter(|id| !catalog.contains(id))
        .map(ToString::to_string)
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::UnresolvedCourses(missing.into_iter().collect()))
    }
}

pub fn load_catalog_file(path: impl AsRef<Path>) -> Result<Catalog> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_catalog(file)
}

pub fn load_agreement_file(path: impl AsRef<Path>, catalog: &Catalog) -> Result<Agreement> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_agreement(file, catalog)
}

/// Serializes an agreement back into its document form.
pub fn agreement_to_json(agreement: &Agreement) -> String {
    let doc = AgreementDoc {
        college: agreement.college.clone(),
        institution: agreement.institution.clone(),
        major: agreement.major.clone(),
        year: agreement.year.clone(),
        kind: agreement.kind,
        requirements: agreement
            .requirements
            .iter()
            .map(|r| RequirementDoc {
                id: r.id.clone(),
                label: r.label.clone(),
                choose: r.choose,
                distinct_departments: r.distinct_departments,
                options: r.options.iter().map(|g| g.courses.clone()).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("agreement documents always serialize")
}

/// Serializes a catalog back into its document form.
pub fn catalog_to_json(catalog: &Catalog) -> String {
    let doc = CatalogDoc {
        college: catalog.college.clone(),
        courses: catalog
            .courses()
            .map(|c| CourseDoc {
                id: c.id.clone(),
                title: c.title.clone(),
                units: c.units.as_f64(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("catalog documents always serialize")
}

/// Resolves store ids into a selection, rejecting empty, duplicate and unknown ids.
pub fn validate_selection<S: AsRef<str>>(agreement_ids: &[S], store: &AgreementStore) -> Result<Selection> {
    if agreement_ids.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut seen = HashSet::new();
    let mut agreements = Vec::with_capacity(agreement_ids.len());
    for id in agreement_ids {
        let id = id.as_ref();
        if !seen.insert(id) {
            return Err(Error::DuplicateAgreement(id.to_string()));
        }
        let agreement = store.get(id).ok_or_else(|| Error::UnknownAgreement(id.to_string()))?;
        agreements.push(agreement.clone());
    }
    Selection::new(store.catalog().clone(), agreements)
}
