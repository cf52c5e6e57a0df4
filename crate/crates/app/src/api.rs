//! Request/response types and the operations shared by the CLI and HTTP
//! front ends. Both paths serialize these types with [`to_json`], so equal
//! inputs produce equal bytes.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use pdei_core::audit::{audit_four_fifths, SelectionAudit};
use pdei_core::labor::{Dataset, DisparityProfile, LaborError, SectorDisparity, SectorRecord};
use pdei_core::pipeline::{
    compute_pdei, rank, select_top_k, uniform_pool, Candidate, GroupBy, PdeiScore, PipelineError, Scenario,
    Scheme, Selection,
};
use pdei_core::plot::{pdei_scatter, PlotSeries};
use pdei_core::reproduce::ReproduceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub request_id: Option<String>,
    #[serde(skip)]
    pub kind: ErrorKind,
}

impl ApiError {
    pub fn validation(code: &str, message: impl Into<String>, field: Option<&str>) -> Self {
        Self {
            code: code.into(),
            message: message.into(),
            field: field.map(String::from),
            request_id: None,
            kind: ErrorKind::Validation,
        }
    }

    pub fn internal(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.into(),
            message: message.into(),
            field: None,
            request_id: None,
            kind: ErrorKind::Internal,
        }
    }

    pub fn with_request_id(mut self, id: Option<&str>) -> Self {
        self.request_id = id.map(String::from);
        self
    }

    pub fn is_internal(&self) -> bool {
        self.kind == ErrorKind::Internal
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.field {
            Some(field) => write!(f, "{} ({field})", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        use PipelineError::*;
        let (code, field) = match &e {
            Dea(d) if d.is_internal() => return ApiError::internal("solver_failure", e.to_string()),
            EmptyPool => ("empty_pool", "candidates"),
            DuplicateCandidate(_) => ("duplicate_candidate", "candidates"),
            ScoreDimension { .. } | InvalidScore { .. } | ZeroScores(_) | NoScores(_) => {
                ("invalid_scores", "candidates")
            }
            UnknownSector(_) => ("unknown_sector", "sector"),
            KOutOfRange { .. } => ("k_out_of_range", "k"),
            UnknownCandidate(_) | DuplicateSelection(_) | EmptySelection => ("invalid_selection", "selected_ids"),
            SelectedExceedsApplicants(_) => ("invalid_selection", "selected_ids"),
            EmptyInput => ("empty_input", "candidates"),
            Dea(_) => ("invalid_dmu", "candidates"),
        };
        ApiError::validation(code, e.to_string(), Some(field))
    }
}

impl From<LaborError> for ApiError {
    fn from(e: LaborError) -> Self {
        let code = match e {
            LaborError::UnknownDataset(_) => "unknown_dataset",
            _ => "invalid_dataset",
        };
        ApiError::validation(code, e.to_string(), None)
    }
}

impl From<ReproduceError> for ApiError {
    fn from(e: ReproduceError) -> Self {
        match e {
            ReproduceError::UnknownTable(_) => ApiError::validation("unknown_table", e.to_string(), Some("table")),
            ReproduceError::Labor(l) => l.into(),
            ReproduceError::Pipeline(p) => p.into(),
        }
    }
}

/// Deserializes a JSON body, reporting the path of the offending field.
pub fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            ApiError::validation("malformed_json", inner.to_string(), None)
        } else {
            let field = (path != ".").then_some(path);
            ApiError::validation("invalid_field", inner.to_string(), field.as_deref())
        }
    })
}

/// Canonical serialization used by every front end.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("response types serialize")
}

/// Immutable data shared by every request.
#[derive(Debug, Clone)]
pub struct Context {
    pub dataset: Dataset,
    pub profile: DisparityProfile,
}

impl Context {
    pub fn new(dataset: Dataset) -> Result<Self, ApiError> {
        let profile = dataset.profile()?;
        Ok(Self { dataset, profile })
    }

    pub fn sector(&self, id: &str) -> Result<&SectorDisparity, ApiError> {
        self.profile
            .sector(id)
            .ok_or_else(|| PipelineError::UnknownSector(id.to_string()).into())
    }
}

fn pool_or_preset(candidates: &Option<Vec<Candidate>>, scenario: Scenario) -> Vec<Candidate> {
    candidates.clone().unwrap_or_else(|| uniform_pool(scenario))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankRequest {
    /// Defaults to the uniform evaluation pool of the scenario.
    #[serde(default)]
    pub candidates: Option<Vec<Candidate>>,
    pub sector: String,
    #[serde(default = "default_scenario")]
    pub scenario: Scenario,
}

fn default_scenario() -> Scenario {
    Scenario::RaceOnly
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankResponse {
    pub sector: String,
    pub scenario: Scenario,
    /// Candidates best first.
    pub ranking: Vec<PdeiScore>,
}

pub fn rank_pool(ctx: &Context, req: &RankRequest) -> Result<RankResponse, ApiError> {
    let pool = pool_or_preset(&req.candidates, req.scenario);
    let scores = compute_pdei(&pool, &ctx.profile, &req.sector, req.scenario)?;
    Ok(RankResponse {
        sector: req.sector.clone(),
        scenario: req.scenario,
        ranking: rank(&scores),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectRequest {
    #[serde(default)]
    pub candidates: Option<Vec<Candidate>>,
    pub sector: String,
    #[serde(default = "default_scenario")]
    pub scenario: Scenario,
    pub scheme: Scheme,
    pub k: usize,
    #[serde(default)]
    pub group_by: GroupBy,
}

pub fn select(ctx: &Context, req: &SelectRequest) -> Result<Selection, ApiError> {
    let pool = pool_or_preset(&req.candidates, req.scenario);
    let scores = compute_pdei(&pool, &ctx.profile, &req.sector, req.scenario)?;
    Ok(select_top_k(&scores, req.k, req.scheme, req.group_by)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditRequest {
    pub candidates: Vec<Candidate>,
    pub selected_ids: Vec<String>,
    #[serde(default)]
    pub group_by: GroupBy,
}

pub fn audit(req: &AuditRequest) -> Result<SelectionAudit, ApiError> {
    Ok(audit_four_fifths(&req.candidates, &req.selected_ids, req.group_by)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_id: Option<String>,
    #[serde(default)]
    pub candidates: Option<Vec<Candidate>>,
    pub sector: String,
    #[serde(default = "default_scenario")]
    pub scenario: Scenario,
    pub scheme: Scheme,
    pub k: usize,
    #[serde(default)]
    pub group_by: GroupBy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfResponse {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub request_id: Option<String>,
    pub sector: String,
    pub scenario: Scenario,
    pub ranking: Vec<PdeiScore>,
    pub selection: Selection,
    pub audit: SelectionAudit,
    pub plot: PlotSeries,
}

/// Selection, audit and scatter data for one scheme in a single call.
pub fn whatif(ctx: &Context, req: &WhatIfRequest) -> Result<WhatIfResponse, ApiError> {
    let id = req.request_id.as_deref();
    let run = || -> Result<WhatIfResponse, ApiError> {
        let pool = pool_or_preset(&req.candidates, req.scenario);
        let scores = compute_pdei(&pool, &ctx.profile, &req.sector, req.scenario)?;
        let selection = select_top_k(&scores, req.k, req.scheme, req.group_by)?;
        let audit = audit_four_fifths(&pool, &selection.selected, req.group_by)?;
        let plot = pdei_scatter(&scores, &ctx.profile)?;
        Ok(WhatIfResponse {
            request_id: req.request_id.clone(),
            sector: req.sector.clone(),
            scenario: req.scenario,
            ranking: rank(&scores),
            selection,
            audit,
            plot,
        })
    };
    run().map_err(|e| e.with_request_id(id))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorsResponse {
    pub dataset: String,
    pub sectors: Vec<SectorRecord>,
}

pub fn sectors(ctx: &Context) -> SectorsResponse {
    SectorsResponse {
        dataset: ctx.dataset.name.clone(),
        sectors: ctx.dataset.sectors.clone(),
    }
}

/// One sector's disparity row, or every sector when `sector` is `None`.
pub fn disparity(ctx: &Context, sector: Option<&str>) -> Result<DisparityProfile, ApiError> {
    match sector {
        Some(id) => Ok(DisparityProfile {
            sectors: vec![ctx.sector(id)?.clone()],
        }),
        None => Ok(ctx.profile.clone()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub dataset: String,
    pub sectors: usize,
}

pub fn health(ctx: &Context) -> Health {
    Health {
        status: "ok".into(),
        dataset: ctx.dataset.name.clone(),
        sectors: ctx.profile.sectors.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pdei_core::labor::BUILTIN_DATASET;

    fn ctx() -> Context {
        Context::new(Dataset::builtin(BUILTIN_DATASET).unwrap()).unwrap()
    }

    #[test]
    fn rank_defaults_to_preset_pool() {
        let req: RankRequest = parse_json(br#"{"sector":"S1"}"#).unwrap();
        let resp = rank_pool(&ctx(), &req).unwrap();
        assert_eq!(resp.ranking.len(), 16);
        assert_eq!(resp.ranking[0].candidate_id, "R4/C1");
        assert!((resp.ranking[0].pdei - 1.0).abs() < 1e-12);
    }

    #[test]
    fn field_paths_in_errors() {
        let err = parse_json::<RankRequest>(br#"{"sector":"S1","scenario":"both"}"#).unwrap_err();
        assert_eq!(err.code, "invalid_field");
        assert_eq!(err.field.as_deref(), Some("scenario"));
        let err = parse_json::<RankRequest>(
            br#"{"sector":"S1","candidates":[{"id":"a","race_group":"R9","gender_group":"G1","scores":[1]}]}"#,
        )
        .unwrap_err();
        assert_eq!(err.field.as_deref(), Some("candidates[0].race_group"));
        let err = parse_json::<RankRequest>(b"{").unwrap_err();
        assert_eq!((err.code.as_str(), err.field), ("malformed_json", None));
    }

    #[test]
    fn domain_errors_are_validation() {
        let req = RankRequest {
            candidates: None,
            sector: "S9".into(),
            scenario: Scenario::RaceOnly,
        };
        let err = rank_pool(&ctx(), &req).unwrap_err();
        assert_eq!(err.code, "unknown_sector");
        assert_eq!(err.message, "unknown sector S9");
        assert!(!err.is_internal());
    }

    #[test]
    fn whatif_equal_scheme_passes_audit() {
        let req: WhatIfRequest =
            parse_json(br#"{"request_id":"q1","sector":"S1","scheme":"equal_per_group","k":4}"#).unwrap();
        let resp = whatif(&ctx(), &req).unwrap();
        assert!(resp.audit.passes);
        assert!(resp.audit.groups.values().all(|g| g.impact_ratio == 1.0));
        assert_eq!(resp.plot.0.len(), 16);
        assert_eq!(resp.request_id.as_deref(), Some("q1"));

        let req: WhatIfRequest = parse_json(br#"{"request_id":"q2","sector":"S1","scheme":"pdei","k":17}"#).unwrap();
        let err = whatif(&ctx(), &req).unwrap_err();
        assert_eq!((err.code.as_str(), err.request_id.as_deref()), ("k_out_of_range", Some("q2")));
    }

    #[test]
    fn pdei_scheme_fails_four_fifths_in_s1() {
        let req: WhatIfRequest = parse_json(br#"{"sector":"S1","scheme":"pdei","k":4}"#).unwrap();
        let resp = whatif(&ctx(), &req).unwrap();
        assert!(!resp.audit.passes);
        let raw: WhatIfRequest = parse_json(br#"{"sector":"S1","scheme":"raw_score","k":4}"#).unwrap();
        assert!(whatif(&ctx(), &raw).unwrap().audit.passes);
    }
}
