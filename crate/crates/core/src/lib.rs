//! Disparity-adjusted candidate screening.
//!
//! Disparate impact values derived from labor statistics become the inputs of
//! a CCR data envelopment model whose outputs are candidate evaluation scores.
//! The resulting efficiency (pDEI) ranks candidates, drives selection schemes
//! and feeds a four-fifths rule audit.
//!
//! - [`lp`]: dense two-phase simplex.
//! - [`dea`]: CCR multiplier model and a closed-form oracle.
//! - [`fairness`]: group parity metrics.
//! - [`labor`]: sector statistics ingestion and disparate impact.
//! - [`pipeline`], [`audit`], [`plot`]: scoring, ranking, selection, audits, chart data.
//! - [`reproduce`]: published reference tables and comparison reports.

pub mod audit;
pub mod dea;
pub mod fairness;
pub mod format;
pub mod groups;
pub mod labor;
pub mod lp;
pub mod pipeline;
pub mod plot;
pub mod reproduce;

pub use audit::{audit_counts, audit_four_fifths, GroupAudit, SelectionAudit};
pub use dea::{ccr_efficiency, ccr_efficiency_all, ratio_oracle, DeaError, DeaResult, Dmu};
pub use groups::{GenderGroup, Group, RaceGroup};
pub use labor::{Dataset, DisparityProfile, LaborError, LaborForceTable, SectorRecord, BUILTIN_DATASET};
pub use lp::{solve_lp, LinearProgram, LpError, LpSolution, LpStatus, Relation};
pub use pipeline::{
    compute_pdei, rank, select_top_k, uniform_pool, Candidate, GroupBy, PdeiScore, PipelineError, Scenario,
    Scheme, Selection,
};
pub use plot::{PlotKind, PlotPoint, PlotSeries};
