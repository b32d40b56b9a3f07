//! Exact minimal course planning across several articulation agreements.
//!
//! A student at one community college who wants to keep several
//! university/major options open has to satisfy every lower-division
//! requirement of every selected agreement. This crate models those
//! agreements, finds the minimum-cardinality course sets that do so
//! (together with the whole family of optimal sets), renders them as a
//! single combined report, grades hand-made plans against the optimum and
//! carries the small statistics toolkit used to compare planning methods.
//!
//! ```
//! use articopt::{ingest, solver, Constraints};
//!
//! let catalog = ingest::load_catalog(br#"{
//!   "college": "Glendale Community College",
//!   "courses": [
//!     {"id": "ENG 200", "title": "Composition", "units": 3.0},
//!     {"id": "ENG 240", "title": "Writing", "units": 3.0}
//!   ]
//! }"#.as_slice())?;
//! let ucsd = ingest::load_agreement(br#"{
//!   "college": "Glendale Community College",
//!   "institution": "UC San Diego", "major": "History", "year": "2021-2022",
//!   "kind": "major",
//!   "requirements": [
//!     {"id": "writing", "label": "Writing Course", "options": [["ENG 200"], ["ENG 240"]]}
//!   ]
//! }"#.as_slice(), &catalog)?;
//! let store = ingest::AgreementStore::new(catalog, vec![ucsd])?;
//! let selection = ingest::validate_selection(&["UC San Diego|History|2021-2022"], &store)?;
//! let solution = solver::solve(&selection, &Constraints::default())?;
//! assert_eq!(solution.opt_size, 1);
//! assert_eq!(solution.all_optima.len(), 2);
//! # Ok::<(), articopt::Error>(())
//! ```

mod error;

pub mod evaluate;
pub mod ingest;
pub mod model;
pub mod report;
pub mod solver;
pub mod stats;

pub use error::{Error, ErrorClass, RequirementRef, Result};
pub use ingest::{AgreementStore, Catalog};
pub use model::{
    Agreement, AgreementKind, Constraints, Course, CourseId, OptionGroup, Plan, Requirement,
    Selection, Units,
};
