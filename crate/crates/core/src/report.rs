//! The combined articulation report: one table that replaces several
//! separate agreement reports.
//!
//! Courses present in every optimal plan become "complete the course" rows.
//! The remaining requirements are grouped into clusters whose optimal choices
//! are interchangeable, and each cluster becomes a "complete ONE" row. This
//! only works when the optimal family is exactly the product of those rows;
//! otherwise the report lists the optimal plans explicitly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ingest::Catalog;
use crate::model::{CourseId, OptionGroup, Plan, Requirement, Selection, Units};
use crate::solver::Solution;

const COMPLETE_THIS_TEXT: &str = "Complete the course in this row.";
const COMPLETE_ONE_TEXT: &str = "Complete ONE of the course options listed in this row.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Instruction {
    CompleteThis,
    CompleteOne,
}

impl Instruction {
    pub fn text(self) -> &'static str {
        match self {
            Instruction::CompleteThis => COMPLETE_THIS_TEXT,
            Instruction::CompleteOne => COMPLETE_ONE_TEXT,
        }
    }
}

/// An (institution, major) pair a row counts toward.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub institution: String,
    pub major: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instruction: Instruction,
    pub options: Vec<OptionGroup>,
    pub satisfies: Vec<Target>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedAgreement {
    pub id: String,
    pub institution: String,
    pub major: String,
    pub year: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputsEcho {
    pub college: String,
    pub agreements: Vec<SelectedAgreement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitsRange {
    pub min: Units,
    pub max: Units,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinedReport {
    pub inputs_echo: InputsEcho,
    pub rows: Vec<ReportRow>,
    pub separable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit_optima: Option<Vec<Plan>>,
    pub opt_size: usize,
    pub total_units_range: UnitsRange,
    /// Titles of every course the report mentions.
    pub titles: BTreeMap<CourseId, String>,
}

impl CombinedReport {
    /// Number of plans the rows describe: the product of choice-row sizes.
    pub fn combination_count(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.instruction == Instruction::CompleteOne)
            .map(|r| r.options.len())
            .product()
    }

    /// Every plan spelled out by forced rows plus one pick per choice row.
    pub fn expand_rows(&self) -> Vec<Plan> {
        let mut plans = vec![BTreeSet::<CourseId>::new()];
        for row in &self.rows {
            plans = plans
                .into_iter()
                .flat_map(|base| {
                    row.options.iter().map(move |group| {
                        let mut next = base.clone();
                        next.extend(group.courses.iter().cloned());
                        next
                    })
                })
                .collect();
        }
        plans.into_iter().map(Plan::from).collect()
    }
}

/// Agreements (as targets) for which some option group shares a course with `groups`.
fn targets_for(groups: &[OptionGroup], selection: &Selection) -> Vec<Target> {
    let courses: BTreeSet<&CourseId> = groups.iter().flat_map(|g| g.courses.iter()).collect();
    selection
        .agreements
        .iter()
        .filter(|a| a.courses().any(|c| courses.contains(c)))
        .map(|a| Target {
            institution: a.institution.clone(),
            major: a.major.clone(),
        })
        .collect()
}

type GroupKey = BTreeSet<CourseId>;

fn key(group: &OptionGroup) -> GroupKey {
    group.courses.iter().cloned().collect()
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

pub fn synthesize_rows(solution: &Solution, selection: &Selection) -> CombinedReport {
    let forced = &solution.forced;
    let first_seen = selection.referenced_courses();

    let mut forced_order: Vec<CourseId> = first_seen.iter().filter(|c| forced.contains(*c)).cloned().collect();
    forced_order.extend(forced.iter().filter(|c| !first_seen.contains(c)).cloned());
    let forced_rows: Vec<ReportRow> = forced_order
        .into_iter()
        .map(|c| {
            let options = vec![OptionGroup::single(c)];
            ReportRow {
                instruction: Instruction::CompleteThis,
                satisfies: targets_for(&options, selection),
                options,
            }
        })
        .collect();

    let residual: Vec<&Requirement> = selection
        .requirements()
        .map(|(_, r)| r)
        .filter(|r| !r.is_met_by(forced))
        .collect();

    // Link residual requirements that some optimum meets through the same residual group.
    let mut parent: Vec<usize> = (0..residual.len()).collect();
    let mut used: Vec<BTreeSet<GroupKey>> = vec![BTreeSet::new(); residual.len()];
    for plan in &solution.all_optima {
        let mut holders: HashMap<GroupKey, usize> = HashMap::new();
        for (i, req) in residual.iter().enumerate() {
            for group in &req.options {
                if group.is_taken(&plan.courses) && !group.is_taken(forced) {
                    let k = key(group);
                    used[i].insert(k.clone());
                    if let Some(&j) = holders.get(&k) {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        parent[ri] = rj;
                    } else {
                        holders.insert(k, i);
                    }
                }
            }
        }
    }

    let mut cluster_of: Vec<usize> = Vec::new();
    let mut clusters: Vec<BTreeSet<GroupKey>> = Vec::new();
    let mut roots: HashMap<usize, usize> = HashMap::new();
    for i in 0..residual.len() {
        let root = find(&mut parent, i);
        let next = clusters.len();
        let c = *roots.entry(root).or_insert(next);
        if c == clusters.len() {
            clusters.push(BTreeSet::new());
        }
        clusters[c].extend(used[i].iter().cloned());
        cluster_of.push(c);
    }

    // Options in first-appearance order across the selection.
    let all_groups: Vec<&OptionGroup> = selection
        .requirements()
        .flat_map(|(_, r)| r.options.iter())
        .collect();
    let choice_rows: Vec<ReportRow> = clusters
        .iter()
        .map(|keys| {
            let mut seen = BTreeSet::new();
            let options: Vec<OptionGroup> = all_groups
                .iter()
                .filter(|g| {
                    let k = key(g);
                    keys.contains(&k) && seen.insert(k)
                })
                .map(|g| (*g).clone())
                .collect();
            ReportRow {
                instruction: Instruction::CompleteOne,
                satisfies: targets_for(&options, selection),
                options,
            }
        })
        .collect();

    let mut report = CombinedReport {
        inputs_echo: InputsEcho {
            college: selection.college.clone(),
            agreements: selection
                .agreements
                .iter()
                .map(|a| SelectedAgreement {
                    id: a.id(),
                    institution: a.institution.clone(),
                    major: a.major.clone(),
                    year: a.year.clone(),
                })
                .collect(),
        },
        rows: forced_rows.iter().cloned().chain(choice_rows).collect(),
        separable: true,
        explicit_optima: None,
        opt_size: solution.opt_size,
        total_units_range: {
            let (min, max) = solution.units_range(&selection.catalog);
            UnitsRange { min, max }
        },
        titles: BTreeMap::new(),
    };

    if !factors_exactly(&report, solution) {
        report.rows = forced_rows;
        report.separable = false;
        report.explicit_optima = Some(solution.all_optima.iter().cloned().collect());
    }
    report.titles = collect_titles(&report, &selection.catalog);
    report
}

fn factors_exactly(report: &CombinedReport, solution: &Solution) -> bool {
    let choice_rows = report.rows.iter().filter(|r| r.instruction == Instruction::CompleteOne);
    if choice_rows.clone().any(|r| r.options.len() < 2) {
        return false;
    }
    if report.combination_count() != solution.all_optima.len() {
        return false;
    }
    let expanded: BTreeSet<Plan> = report.expand_rows().into_iter().collect();
    expanded.len() == solution.all_optima.len() && expanded == solution.all_optima
}

fn collect_titles(report: &CombinedReport, catalog: &Catalog) -> BTreeMap<CourseId, String> {
    let in_rows = report.rows.iter().flat_map(|r| r.options.iter()).flat_map(|g| g.courses.iter());
    let in_plans = report.explicit_optima.iter().flatten().flat_map(|p| p.iter());
    in_rows
        .chain(in_plans)
        .map(|c| (c.clone(), catalog.title(c).to_string()))
        .collect()
}

fn course_cell(report: &CombinedReport, id: &CourseId) -> String {
    match report.titles.get(id).map(String::as_str) {
        Some(title) if !title.is_empty() => format!("{id} - {title}"),
        _ => id.to_string(),
    }
}

fn escape_cell(text: &str) -> String {
    text.replace('|', "\\|")
}

fn target_label(target: &Target) -> String {
    format!("{} – {}", target.institution, target.major)
}

fn units_text(range: &UnitsRange) -> String {
    if range.min == range.max {
        format!("{} units", range.min)
    } else {
        format!("{}–{} units", range.min, range.max)
    }
}

/// Markdown rendering, byte-stable for a given report.
pub fn render_markdown(report: &CombinedReport) -> String {
    let mut out = String::new();
    let echo = &report.inputs_echo;
    out.push_str("# Combined Articulation Report\n\n## USER INPUTS\n\n");
    let _ = writeln!(out, "Community College Selected: {}\n", echo.college);
    out.push_str("University/Major Pairs Selected:\n\n");
    for a in &echo.agreements {
        let _ = writeln!(out, "- {} – {} ({})", a.institution, a.major, a.year);
    }

    out.push_str("\n## REPORT COURSE REQUIREMENTS\n\n");
    if report.rows.is_empty() {
        out.push_str("No course is required by every optimal plan.\n");
    } else {
        out.push_str(
            "| Row Instructions | Community College Course Option(s) | Course Satisfies Which Transfer Requirement(s) |\n",
        );
        out.push_str("| --- | --- | --- |\n");
        for row in &report.rows {
            let options: Vec<String> = row
                .options
                .iter()
                .map(|g| {
                    g.courses
                        .iter()
                        .map(|c| course_cell(report, c))
                        .collect::<Vec<_>>()
                        .join(" AND ")
                })
                .collect();
            let satisfies: Vec<String> = row.satisfies.iter().map(target_label).collect();
            let _ = writeln!(
                out,
                "| {} | {} | {} |",
                row.instruction.text(),
                escape_cell(&options.join("<br>--- Or ---<br>")),
                escape_cell(&satisfies.join("<br>")),
            );
        }
    }

    if let Some(plans) = &report.explicit_optima {
        out.push_str("\n## OPTIMAL PLANS (non-separable)\n\n");
        out.push_str("The optimal plans do not split into independent rows. Complete every course of ONE plan below.\n\n");
        for (i, plan) in plans.iter().enumerate() {
            let courses: Vec<String> = plan.iter().map(|c| course_cell(report, c)).collect();
            let _ = writeln!(out, "{}. {}", i + 1, courses.join("; "));
        }
    }

    let _ = writeln!(
        out,
        "\nMinimal plan: {} courses, {}.\n\nEND OF REPORT",
        report.opt_size,
        units_text(&report.total_units_range)
    );
    out
}

/// Recursively rebuilds objects with keys in sorted order.
pub fn canonicalize(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let sorted: BTreeMap<String, Value> = map.into_iter().map(|(k, v)| (k, canonicalize(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        other => other,
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("report types always serialize");
    let mut text = serde_json::to_string_pretty(&canonicalize(value)).expect("values always serialize");
    text.push('\n');
    text
}

pub fn render_json(report: &CombinedReport) -> String {
    to_canonical_json(report)
}

pub fn parse_json(text: &str) -> serde_json::Result<CombinedReport> {
    serde_json::from_str(text)
}
