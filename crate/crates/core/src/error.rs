use std::fmt;

use serde::{Deserialize, Serialize};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Points at one requirement of one agreement, using the agreement's store id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RequirementRef {
    pub agreement: String,
    pub requirement: String,
}

impl fmt::Display for RequirementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.agreement, self.requirement)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed {what} document at line {line}, column {column}: {message}")]
    Malformed {
        what: &'static str,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid course id {0:?}: {1}")]
    InvalidCourseId(String, &'static str),
    #[error("duplicate course: {0}")]
    DuplicateCourse(String),
    #[error("invalid units for {id}: {reason}")]
    InvalidUnits { id: String, reason: String },
    #[error("unresolved course: {}", .0.join(", "))]
    UnresolvedCourses(Vec<String>),
    #[error("invalid requirement {requirement}: {reason}")]
    InvalidRequirement { requirement: String, reason: String },
    #[error("invalid agreement {agreement}: {reason}")]
    InvalidAgreement { agreement: String, reason: String },
    #[error("unknown agreement: {0}")]
    UnknownAgreement(String),
    #[error("duplicate agreement: {0}")]
    DuplicateAgreement(String),
    #[error("selection must name at least one agreement")]
    EmptySelection,
    #[error("selection mixes colleges: {0} and {1}")]
    MixedColleges(String, String),
    #[error("course both pinned and excluded: {}", .0.join(", "))]
    ConstraintConflict(Vec<String>),
    #[error("infeasible: no plan satisfies {}", display_refs(.0))]
    Infeasible(Vec<RequirementRef>),
    #[error("more than {0} optimal plans; refusing to enumerate")]
    Explosion(usize),
    #[error("candidate universe has {size} courses, oracle limit is {limit}")]
    UniverseTooLarge { size: usize, limit: usize },
    #[error("invalid statistics input: {0}")]
    Statistics(String),
    #[error("degenerate statistic: {0}")]
    Degenerate(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn display_refs(refs: &[RequirementRef]) -> String {
    refs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Coarse classification used by front ends to pick exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: documents, ids, selections, parameters.
    Validation,
    /// The input is well formed but the problem has no usable answer.
    Unsolvable,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Infeasible(_)
            | Error::Explosion(_)
            | Error::UniverseTooLarge { .. }
            | Error::Degenerate(_) => ErrorClass::Unsolvable,
            _ => ErrorClass::Validation,
        }
    }

    /// Stable upper-case code for machine consumers.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Malformed { .. } => "MALFORMED",
            Error::InvalidCourseId(..) => "INVALID_COURSE_ID",
            Error::DuplicateCourse(_) => "DUPLICATE_COURSE",
            Error::InvalidUnits { .. } => "INVALID_UNITS",
            Error::UnresolvedCourses(_) => "UNRESOLVED_COURSE",
            Error::InvalidRequirement { .. } => "INVALID_REQUIREMENT",
            Error::InvalidAgreement { .. } => "INVALID_AGREEMENT",
            Error::UnknownAgreement(_) => "UNKNOWN_AGREEMENT",
            Error::DuplicateAgreement(_) => "DUPLICATE_AGREEMENT",
            Error::EmptySelection => "EMPTY_SELECTION",
            Error::MixedColleges(..) => "MIXED_COLLEGES",
            Error::ConstraintConflict(_) => "CONSTRAINT_CONFLICT",
            Error::Infeasible(_) => "INFEASIBLE",
            Error::Explosion(_) => "EXPLOSION",
            Error::UniverseTooLarge { .. } => "UNIVERSE_TOO_LARGE",
            Error::Statistics(_) => "INVALID_STATISTICS_INPUT",
            Error::Degenerate(_) => "DEGENERATE",
            Error::Io { .. } => "IO",
        }
    }
}
