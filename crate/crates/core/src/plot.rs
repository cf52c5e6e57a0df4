//! Chart data for disparity star plots and pDEI scatter/polar views. Pure data;
//! rendering is left to the consumer.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::groups::RaceGroup;
use crate::labor::DisparityProfile;
use crate::pipeline::{PdeiScore, PipelineError};

/// Series name of the unit ring on star plots.
pub const REFERENCE_SERIES: &str = "DI = 1";
/// Series name of the DI outline on polar plots.
pub const DI_SERIES: &str = "DI";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    DiStar,
    PdeiScatter,
    PdeiPolar,
}

impl FromStr for PlotKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "di_star" => Ok(PlotKind::DiStar),
            "pdei_scatter" => Ok(PlotKind::PdeiScatter),
            "pdei_polar" => Ok(PlotKind::PdeiPolar),
            other => Err(format!(
                "unknown plot kind {other:?} (expected di_star, pdei_scatter or pdei_polar)"
            )),
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlotKind::DiStar => "di_star",
            PlotKind::PdeiScatter => "pdei_scatter",
            PlotKind::PdeiPolar => "pdei_polar",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub series: String,
    pub x: f64,
    pub y: f64,
}

/// Flat list of points; serializes as a JSON array of `{series, x, y}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlotSeries(pub Vec<PlotPoint>);

impl PlotSeries {
    pub fn series_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for p in &self.0 {
            if !names.contains(&p.series.as_str()) {
                names.push(&p.series);
            }
        }
        names
    }

    pub fn points_of<'a>(&'a self, series: &'a str) -> impl Iterator<Item = &'a PlotPoint> + 'a {
        self.0.iter().filter(move |p| p.series == series)
    }

    fn push(&mut self, series: impl Into<String>, x: f64, y: f64) {
        self.0.push(PlotPoint {
            series: series.into(),
            x,
            y,
        });
    }
}

/// Angle (radians) of a race group's spoke.
pub fn group_angle(group: RaceGroup) -> f64 {
    TAU * group.index() as f64 / RaceGroup::ALL.len() as f64
}

/// One radial series per sector over the race-group spokes, plus the unit ring.
pub fn di_star(profile: &DisparityProfile) -> Result<PlotSeries, PipelineError> {
    if profile.sectors.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    let mut out = PlotSeries::default();
    for sector in &profile.sectors {
        for g in RaceGroup::ALL {
            out.push(sector.sector_id.clone(), group_angle(g), sector.race(g));
        }
    }
    for g in RaceGroup::ALL {
        out.push(REFERENCE_SERIES, group_angle(g), 1.0);
    }
    Ok(out)
}

fn race_di_of(score: &PdeiScore, profile: &DisparityProfile) -> Result<f64, PipelineError> {
    profile
        .sector(&score.sector_id)
        .map(|s| s.race(score.race_group))
        .ok_or_else(|| PipelineError::UnknownSector(score.sector_id.clone()))
}

/// `(race DI, pDEI)` per candidate, one series per race group.
pub fn pdei_scatter(scores: &[PdeiScore], profile: &DisparityProfile) -> Result<PlotSeries, PipelineError> {
    if scores.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    let mut out = PlotSeries::default();
    for s in scores {
        out.push(s.race_group.to_string(), race_di_of(s, profile)?, s.pdei);
    }
    Ok(out)
}

/// The scatter folded onto race-group spokes, with the sector's DI outline.
pub fn pdei_polar(scores: &[PdeiScore], profile: &DisparityProfile) -> Result<PlotSeries, PipelineError> {
    if scores.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    let mut out = PlotSeries::default();
    for s in scores {
        race_di_of(s, profile)?;
        out.push(s.race_group.to_string(), group_angle(s.race_group), s.pdei);
    }
    let mut sectors: Vec<&str> = Vec::new();
    for s in scores {
        if !sectors.contains(&s.sector_id.as_str()) {
            sectors.push(&s.sector_id);
        }
    }
    for id in sectors {
        let sector = profile.sector(id).expect("checked above");
        let name = if scores.iter().all(|s| s.sector_id == id) {
            DI_SERIES.to_string()
        } else {
            format!("{DI_SERIES} {id}")
        };
        for g in RaceGroup::ALL {
            out.push(name.clone(), group_angle(g), sector.race(g));
        }
    }
    Ok(out)
}

pub enum PlotSource<'a> {
    Profile(&'a DisparityProfile),
    Scores(&'a [PdeiScore], &'a DisparityProfile),
}

pub fn export_plot_series(source: PlotSource<'_>, kind: PlotKind) -> Result<PlotSeries, PipelineError> {
    match (kind, source) {
        (PlotKind::DiStar, PlotSource::Profile(p)) | (PlotKind::DiStar, PlotSource::Scores(_, p)) => di_star(p),
        (PlotKind::PdeiScatter, PlotSource::Scores(s, p)) => pdei_scatter(s, p),
        (PlotKind::PdeiPolar, PlotSource::Scores(s, p)) => pdei_polar(s, p),
        (_, PlotSource::Profile(_)) => Err(PipelineError::EmptyInput),
    }
}
