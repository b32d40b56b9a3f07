#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use articopt::{
    ingest, Agreement, AgreementKind, AgreementStore, Catalog, Constraints, Course, CourseId, OptionGroup, Plan,
    Requirement, Selection, Units,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture_dir(name: &str) -> PathBuf {
    workspace_root().join("fixtures").join(name)
}

pub fn golden_path(name: &str) -> PathBuf {
    workspace_root().join("golden").join(name)
}

/// Compares `actual` with a golden file; `ARTICOPT_BLESS=1` rewrites it.
pub fn assert_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("ARTICOPT_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

pub fn glendale_store() -> AgreementStore {
    AgreementStore::load_dir(fixture_dir("glendale")).unwrap()
}

pub fn occ_store() -> AgreementStore {
    AgreementStore::load_dir(fixture_dir("occ")).unwrap()
}

pub const UCSD: &str = "UC San Diego|History|2021-2022";
pub const CSUF: &str = "CSU Fullerton|History|2021-2022";
pub const UCB: &str = "UC Berkeley|Psychology B.A.|2021-2022";
pub const UCLA: &str = "UC Los Angeles|Psychology B.A.|2021-2022";

/// The two history agreements in the order UCSD, CSUF.
pub fn glendale_history() -> Selection {
    ingest::validate_selection(&[UCSD, CSUF], &glendale_store()).unwrap()
}

/// The two psychology agreements in the order UCB, UCLA.
pub fn occ_psychology() -> Selection {
    ingest::validate_selection(&[UCB, UCLA], &occ_store()).unwrap()
}

pub fn id(s: &str) -> CourseId {
    CourseId::new(s).unwrap()
}

pub fn plan(ids: &[&str]) -> Plan {
    Plan::parse(ids).unwrap()
}

pub fn plans(list: &[&[&str]]) -> BTreeSet<Plan> {
    list.iter().map(|p| plan(p)).collect()
}

const DEPARTMENTS: [&str; 4] = ["ANTH", "CHEM", "PSCI", "SOC"];

/// A random instance within the oracle's comfort zone: at most 12 courses,
/// at most 8 requirements, choose in {1, 2}, option groups of 1 or 2 courses,
/// spread over 1 to 3 agreements, with random pins and exclusions.
pub fn random_instance(seed: u64) -> (Selection, Constraints) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=12);
    let courses: Vec<Course> = (0..n)
        .map(|i| Course {
            id: id(&format!("{} A{}", DEPARTMENTS.choose(&mut rng).unwrap(), 100 + i)),
            title: format!("Course {i}"),
            units: Units::from_tenths(*[30, 40, 45].choose(&mut rng).unwrap()),
        })
        .collect();
    let ids: Vec<CourseId> = courses.iter().map(|c| c.id.clone()).collect();

    let agreement_count = rng.random_range(1..=3usize);
    let requirement_count = rng.random_range(agreement_count..=8);
    let mut buckets: Vec<Vec<Requirement>> = vec![Vec::new(); agreement_count];
    for r in 0..requirement_count {
        let group_count = rng.random_range(1..=4);
        let options: Vec<OptionGroup> = (0..group_count)
            .map(|_| {
                let size = rng.random_range(1..=2usize).min(ids.len());
                OptionGroup::new(ids.choose_multiple(&mut rng, size).cloned().collect())
            })
            .collect();
        let choose = rng.random_range(1..=2usize).min(options.len());
        let departments: BTreeSet<&str> = options.iter().map(OptionGroup::department).collect();
        let distinct = departments.len() >= choose && rng.random_bool(0.25);
        let requirement = Requirement {
            id: format!("r{r}"),
            label: format!("Requirement {r}"),
            choose,
            options,
            distinct_departments: distinct,
        };
        requirement.validate().unwrap();
        // Every agreement gets at least one requirement.
        let bucket = if r < agreement_count { r } else { rng.random_range(0..agreement_count) };
        buckets[bucket].push(requirement);
    }

    let catalog = Catalog::new("Random College", courses).unwrap();
    let agreements: Vec<Arc<Agreement>> = buckets
        .into_iter()
        .enumerate()
        .map(|(i, requirements)| {
            Arc::new(Agreement {
                college: "Random College".into(),
                institution: format!("University {i}"),
                major: "Major".into(),
                year: "2021-2022".into(),
                kind: AgreementKind::Major,
                requirements,
            })
        })
        .collect();
    let selection = Selection::new(Arc::new(catalog), agreements).unwrap();

    let mut constraints = Constraints::default();
    for c in &ids {
        let roll: f64 = rng.random();
        if roll < 0.08 {
            constraints.pinned.insert(c.clone());
        } else if roll < 0.18 {
            constraints.excluded.insert(c.clone());
        }
    }
    (selection, constraints)
}
