//! Runs every Rust snippet of the guide in `book/` as a doc-test, so the
//! guide cannot drift from the library.
//!
//! The helpers load the example data shipped in `fixtures/`.

use std::path::PathBuf;

use articopt::AgreementStore;

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// Glendale Community College with its UC San Diego and CSU Fullerton history agreements.
pub fn glendale() -> AgreementStore {
    AgreementStore::load_dir(fixture_dir("glendale")).expect("glendale fixtures load")
}

/// Orange Coast College with its UC Berkeley and UCLA psychology agreements.
pub fn occ() -> AgreementStore {
    AgreementStore::load_dir(fixture_dir("occ")).expect("occ fixtures load")
}

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/solving.md")]
pub mod solving {}

#[doc = include_str!("../../../book/src/report.md")]
pub mod report {}

#[doc = include_str!("../../../book/src/scoring.md")]
pub mod scoring {}

#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}

#[doc = include_str!("../../../book/src/interfaces.md")]
pub mod interfaces {}
