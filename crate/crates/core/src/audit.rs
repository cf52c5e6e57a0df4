//! Four-fifths (adverse impact) audit of a selection.
//!
//! A group's impact ratio is its selection rate divided by the highest group
//! rate. The selection passes when every group with applicants has a ratio of
//! at least 0.8; the comparison is done on integer counts so the boundary is
//! exact.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::pipeline::{Candidate, GroupBy, PipelineError};

pub const FOUR_FIFTHS: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAudit {
    pub applicants: u64,
    pub selected: u64,
    pub rate: f64,
    pub impact_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionAudit {
    pub groups: BTreeMap<String, GroupAudit>,
    pub min_impact_ratio: f64,
    pub passes: bool,
}

/// Audits per-group `(applicants, selected)` counts.
pub fn audit_counts<I, K>(counts: I) -> Result<SelectionAudit, PipelineError>
where
    I: IntoIterator<Item = (K, u64, u64)>,
    K: Into<String>,
{
    let counts: Vec<(String, u64, u64)> = counts
        .into_iter()
        .map(|(k, a, s)| (k.into(), a, s))
        .collect();
    if let Some((k, _, _)) = counts.iter().find(|(_, a, s)| s > a) {
        return Err(PipelineError::SelectedExceedsApplicants(k.clone()));
    }
    // Highest rate as a fraction selected/applicants, compared by cross-multiplying.
    let (best_sel, best_app) = counts
        .iter()
        .filter(|(_, a, _)| *a > 0)
        .map(|(_, a, s)| (*s, *a))
        .max_by(|(s1, a1), (s2, a2)| (*s1 as u128 * *a2 as u128).cmp(&(*s2 as u128 * *a1 as u128)))
        .ok_or(PipelineError::EmptyPool)?;
    if best_sel == 0 {
        return Err(PipelineError::EmptySelection);
    }
    let best_rate = best_sel as f64 / best_app as f64;

    let mut groups = BTreeMap::new();
    let mut passes = true;
    let mut min_ratio = 1.0_f64;
    for (key, applicants, selected) in counts {
        if applicants == 0 {
            groups.insert(
                key,
                GroupAudit {
                    applicants,
                    selected,
                    rate: 0.0,
                    impact_ratio: 0.0,
                },
            );
            continue;
        }
        let rate = selected as f64 / applicants as f64;
        let is_best = (selected as u128) * (best_app as u128) == (best_sel as u128) * (applicants as u128);
        let impact_ratio = if is_best { 1.0 } else { rate / best_rate };
        // ratio >= 4/5  <=>  5 * sel * best_app >= 4 * best_sel * app
        let lhs = 5 * (selected as u128) * (best_app as u128);
        let rhs = 4 * (best_sel as u128) * (applicants as u128);
        if lhs < rhs {
            passes = false;
        }
        min_ratio = min_ratio.min(impact_ratio);
        groups.insert(
            key,
            GroupAudit {
                applicants,
                selected,
                rate,
                impact_ratio,
            },
        );
    }
    Ok(SelectionAudit {
        groups,
        min_impact_ratio: min_ratio,
        passes,
    })
}

/// Audits `selected` ids against the pool's group composition.
pub fn audit_four_fifths(
    pool: &[Candidate],
    selected: &[String],
    group_by: GroupBy,
) -> Result<SelectionAudit, PipelineError> {
    if pool.is_empty() {
        return Err(PipelineError::EmptyPool);
    }
    if selected.is_empty() {
        return Err(PipelineError::EmptySelection);
    }
    let by_id: HashMap<&str, &Candidate> = pool.iter().map(|c| (c.id.as_str(), c)).collect();
    let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for c in pool {
        counts.entry(c.group_key(group_by)).or_default().0 += 1;
    }
    let mut seen = HashSet::new();
    for id in selected {
        let c = by_id
            .get(id.as_str())
            .ok_or_else(|| PipelineError::UnknownCandidate(id.clone()))?;
        if !seen.insert(id.as_str()) {
            return Err(PipelineError::DuplicateSelection(id.clone()));
        }
        counts.get_mut(&c.group_key(group_by)).expect("group counted").1 += 1;
    }
    audit_counts(counts.into_iter().map(|(k, (a, s))| (k, a, s)))
}
