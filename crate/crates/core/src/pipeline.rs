//! Candidate pools, pDEI scoring, ranking and selection.
//!
//! A candidate's pDEI is the CCR efficiency of a unit whose outputs are the
//! candidate's evaluation scores and whose inputs are the disparate impact of
//! the candidate's groups in the chosen sector. The reference set is the pool
//! itself.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dea::{ccr_efficiency_all, DeaError, Dmu};
use crate::format::format_fixed;
use crate::groups::{GenderGroup, RaceGroup};
use crate::labor::{DisparityProfile, SectorDisparity};

/// Ranking compares pDEI and mean scores on this grid so that solver noise
/// below it cannot reorder candidates.
pub const RANK_QUANTUM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("candidate pool is empty")]
    EmptyPool,
    #[error("duplicate candidate id {0:?}")]
    DuplicateCandidate(String),
    #[error("candidate {id}: expected {expected} scores, found {found}")]
    ScoreDimension {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("candidate {id}: score {position} must be finite and nonnegative (got {value})")]
    InvalidScore {
        id: String,
        position: usize,
        value: f64,
    },
    #[error("candidate {0}: at least one score must be positive")]
    ZeroScores(String),
    #[error("candidate {0}: no scores")]
    NoScores(String),
    #[error("unknown sector {0}")]
    UnknownSector(String),
    #[error("k = {k} is out of range for a pool of {pool}")]
    KOutOfRange { k: usize, pool: usize },
    #[error("selection references unknown candidate {0:?}")]
    UnknownCandidate(String),
    #[error("candidate {0:?} selected more than once")]
    DuplicateSelection(String),
    #[error("group {0}: more selected than applicants")]
    SelectedExceedsApplicants(String),
    #[error("selection is empty")]
    EmptySelection,
    #[error("nothing to plot")]
    EmptyInput,
    #[error(transparent)]
    Dea(#[from] DeaError),
}

impl PipelineError {
    pub fn is_internal(&self) -> bool {
        matches!(self, PipelineError::Dea(e) if e.is_internal())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    #[serde(alias = "race")]
    RaceOnly,
    #[serde(alias = "race_gender")]
    RaceAndGender,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::RaceOnly => "race_only",
            Scenario::RaceAndGender => "race_and_gender",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "race" | "race_only" => Ok(Scenario::RaceOnly),
            "race_gender" | "race_and_gender" => Ok(Scenario::RaceAndGender),
            other => Err(format!("unknown scenario {other:?} (expected race or race_gender)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[serde(alias = "raw")]
    RawScore,
    Pdei,
    #[serde(alias = "equal")]
    EqualPerGroup,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::RawScore => "raw_score",
            Scheme::Pdei => "pdei",
            Scheme::EqualPerGroup => "equal_per_group",
        }
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" | "raw_score" => Ok(Scheme::RawScore),
            "pdei" => Ok(Scheme::Pdei),
            "equal" | "equal_per_group" => Ok(Scheme::EqualPerGroup),
            other => Err(format!("unknown scheme {other:?} (expected raw, pdei or equal)")),
        }
    }
}

/// Which demographic key defines a "group" for allocation and auditing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    #[default]
    Race,
    Gender,
    RaceGender,
}

impl GroupBy {
    pub fn key(self, race: RaceGroup, gender: GenderGroup) -> String {
        match self {
            GroupBy::Race => race.to_string(),
            GroupBy::Gender => gender.to_string(),
            GroupBy::RaceGender => format!("{race}&{gender}"),
        }
    }
}

impl FromStr for GroupBy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "race" => Ok(GroupBy::Race),
            "gender" => Ok(GroupBy::Gender),
            "race_gender" => Ok(GroupBy::RaceGender),
            other => Err(format!(
                "unknown grouping {other:?} (expected race, gender or race_gender)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub id: String,
    pub race_group: RaceGroup,
    pub gender_group: GenderGroup,
    pub scores: Vec<f64>,
}

impl Candidate {
    pub fn new(id: impl Into<String>, race: RaceGroup, gender: GenderGroup, scores: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            race_group: race,
            gender_group: gender,
            scores,
        }
    }

    pub fn mean_score(&self) -> f64 {
        if self.scores.is_empty() {
            return 0.0;
        }
        self.scores.iter().sum::<f64>() / self.scores.len() as f64
    }

    pub fn group_key(&self, by: GroupBy) -> String {
        by.key(self.race_group, self.gender_group)
    }
}

/// Checks ids are unique and scores share one dimensionality.
pub fn validate_pool(pool: &[Candidate]) -> Result<(), PipelineError> {
    let first = pool.first().ok_or(PipelineError::EmptyPool)?;
    let dim = first.scores.len();
    let mut ids = HashSet::with_capacity(pool.len());
    for c in pool {
        if !ids.insert(c.id.as_str()) {
            return Err(PipelineError::DuplicateCandidate(c.id.clone()));
        }
        if c.scores.is_empty() {
            return Err(PipelineError::NoScores(c.id.clone()));
        }
        if c.scores.len() != dim {
            return Err(PipelineError::ScoreDimension {
                id: c.id.clone(),
                expected: dim,
                found: c.scores.len(),
            });
        }
        for (position, &value) in c.scores.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(PipelineError::InvalidScore {
                    id: c.id.clone(),
                    position,
                    value,
                });
            }
        }
        if c.scores.iter().all(|&v| v == 0.0) {
            return Err(PipelineError::ZeroScores(c.id.clone()));
        }
    }
    Ok(())
}

fn sector<'a>(profile: &'a DisparityProfile, id: &str) -> Result<&'a SectorDisparity, PipelineError> {
    profile
        .sector(id)
        .ok_or_else(|| PipelineError::UnknownSector(id.to_string()))
}

/// DI inputs of a candidate under `scenario`.
pub fn candidate_inputs(c: &Candidate, sector: &SectorDisparity, scenario: Scenario) -> Vec<f64> {
    match scenario {
        Scenario::RaceOnly => vec![sector.race(c.race_group)],
        Scenario::RaceAndGender => vec![sector.race(c.race_group), sector.gender(c.gender_group)],
    }
}

/// One unit per candidate: outputs are scores, inputs are DI values.
pub fn assemble_dmus(
    pool: &[Candidate],
    profile: &DisparityProfile,
    sector_id: &str,
    scenario: Scenario,
) -> Result<Vec<Dmu>, PipelineError> {
    validate_pool(pool)?;
    let sector = sector(profile, sector_id)?;
    pool.iter()
        .map(|c| {
            Dmu::new(c.id.clone(), candidate_inputs(c, sector, scenario), c.scores.clone())
                .map_err(PipelineError::from)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeiScore {
    pub candidate_id: String,
    pub race_group: RaceGroup,
    pub gender_group: GenderGroup,
    pub sector_id: String,
    pub scenario: Scenario,
    pub mean_score: f64,
    pub pdei: f64,
}

/// pDEI of every candidate, in pool order.
pub fn compute_pdei(
    pool: &[Candidate],
    profile: &DisparityProfile,
    sector_id: &str,
    scenario: Scenario,
) -> Result<Vec<PdeiScore>, PipelineError> {
    let dmus = assemble_dmus(pool, profile, sector_id, scenario)?;
    let result = ccr_efficiency_all(&dmus)?;
    Ok(pool
        .iter()
        .zip(result.units)
        .map(|(c, unit)| PdeiScore {
            candidate_id: c.id.clone(),
            race_group: c.race_group,
            gender_group: c.gender_group,
            sector_id: sector_id.to_string(),
            scenario,
            mean_score: c.mean_score(),
            pdei: unit.theta,
        })
        .collect())
}

fn quantized(v: f64) -> i64 {
    (v / RANK_QUANTUM).round() as i64
}

/// pDEI descending, then mean score descending, then id ascending.
pub fn pdei_order(a: &PdeiScore, b: &PdeiScore) -> Ordering {
    quantized(b.pdei)
        .cmp(&quantized(a.pdei))
        .then_with(|| quantized(b.mean_score).cmp(&quantized(a.mean_score)))
        .then_with(|| a.candidate_id.cmp(&b.candidate_id))
}

/// Mean score descending, then id ascending.
pub fn raw_order(a: &PdeiScore, b: &PdeiScore) -> Ordering {
    quantized(b.mean_score)
        .cmp(&quantized(a.mean_score))
        .then_with(|| a.candidate_id.cmp(&b.candidate_id))
}

pub fn rank(scores: &[PdeiScore]) -> Vec<PdeiScore> {
    let mut out = scores.to_vec();
    out.sort_by(pdei_order);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub scheme: Scheme,
    pub k: usize,
    pub group_by: GroupBy,
    /// Selected candidate ids, best first under the scheme's ordering.
    pub selected: Vec<String>,
}

/// Picks `k` candidates.
///
/// `equal_per_group` gives each group with applicants up to `ceil(k / G)` of its
/// best candidates by pDEI order, trims the union back to `k` in that order, and
/// tops up from the remaining candidates when small groups leave slots empty.
pub fn select_top_k(
    scores: &[PdeiScore],
    k: usize,
    scheme: Scheme,
    group_by: GroupBy,
) -> Result<Selection, PipelineError> {
    if k == 0 || k > scores.len() {
        return Err(PipelineError::KOutOfRange {
            k,
            pool: scores.len(),
        });
    }
    let mut ordered = scores.to_vec();
    let chosen: Vec<&PdeiScore> = match scheme {
        Scheme::RawScore => {
            ordered.sort_by(raw_order);
            ordered.iter().take(k).collect()
        }
        Scheme::Pdei => {
            ordered.sort_by(pdei_order);
            ordered.iter().take(k).collect()
        }
        Scheme::EqualPerGroup => {
            ordered.sort_by(pdei_order);
            let mut per_group: BTreeMap<String, usize> = BTreeMap::new();
            for s in &ordered {
                per_group
                    .entry(group_by.key(s.race_group, s.gender_group))
                    .or_insert(0);
            }
            let quota = k.div_ceil(per_group.len());
            let mut taken = vec![false; ordered.len()];
            for (i, s) in ordered.iter().enumerate() {
                let n = per_group
                    .get_mut(&group_by.key(s.race_group, s.gender_group))
                    .expect("group registered above");
                if *n < quota {
                    *n += 1;
                    taken[i] = true;
                }
            }
            let mut picks: Vec<&PdeiScore> = ordered
                .iter()
                .zip(&taken)
                .filter(|(_, t)| **t)
                .map(|(s, _)| s)
                .take(k)
                .collect();
            if picks.len() < k {
                let missing = k - picks.len();
                picks.extend(
                    ordered
                        .iter()
                        .zip(&taken)
                        .filter(|(_, t)| !**t)
                        .map(|(s, _)| s)
                        .take(missing),
                );
                picks.sort_by(|a, b| pdei_order(a, b));
            }
            picks
        }
    };
    Ok(Selection {
        scheme,
        k,
        group_by,
        selected: chosen.into_iter().map(|s| s.candidate_id.clone()).collect(),
    })
}

/// The all-groups-equal evaluation pool: four candidates per group cell
/// scoring (8,8,8,8), (7,7,7,7), (6,6,6,6) and (5,5,5,5).
///
/// The race-only pool has 16 candidates with ids like `R4/C1`; their gender is
/// set to `G1` and plays no part in that scenario. The race-and-gender pool has
/// 32 candidates with ids like `R4&G2/C1`, women first.
pub fn uniform_pool(scenario: Scenario) -> Vec<Candidate> {
    const LEVELS: [f64; 4] = [8.0, 7.0, 6.0, 5.0];
    let mut pool = Vec::new();
    let mut cell = |race: RaceGroup, gender: GenderGroup, prefix: String| {
        for (j, &level) in LEVELS.iter().enumerate() {
            pool.push(Candidate::new(
                format!("{prefix}/C{}", j + 1),
                race,
                gender,
                vec![level; 4],
            ));
        }
    };
    match scenario {
        Scenario::RaceOnly => {
            for race in RaceGroup::ALL {
                cell(race, GenderGroup::G1, race.to_string());
            }
        }
        Scenario::RaceAndGender => {
            for gender in GenderGroup::ALL {
                for race in RaceGroup::ALL {
                    cell(race, gender, format!("{race}&{gender}"));
                }
            }
        }
    }
    pool
}

pub const SCORES_HEADER: [&str; 7] =
    ["candidate_id", "race_group", "gender_group", "sector_id", "scenario", "mean_score", "pdei"];

/// Renders scores as CSV, six decimals per number, in the given order.
pub fn write_scores_csv(scores: &[PdeiScore]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCORES_HEADER).expect("in-memory write");
    for s in scores {
        w.write_record([
            s.candidate_id.as_str(),
            s.race_group.as_str(),
            s.gender_group.as_str(),
            s.sector_id.as_str(),
            s.scenario.as_str(),
            &format_fixed(s.mean_score, 6),
            &format_fixed(s.pdei, 6),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
