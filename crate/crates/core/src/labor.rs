//! Labor-statistics ingestion and per-sector disparate impact.
//!
//! A sector's race DI compares the group's employment rate in the sector,
//! `pct(g) / lf(g)`, against the pooled rate of the other three groups,
//! `sum_{g' != g} pct(g') / sum_{g' != g} lf(g')`. The sector total cancels.
//! Gender DI assumes equal labor pools for women and non-women, which reduces
//! it to `pct / (100 - pct)`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::format_fixed;
use crate::groups::{GenderGroup, Group, RaceGroup};

pub const SECTOR_STATS_HEADER: [&str; 8] = [
    "sector_id",
    "sector_name",
    "total_thousands",
    "pct_women",
    "pct_white",
    "pct_black",
    "pct_asian",
    "pct_hispanic",
];
pub const LABOR_FORCE_HEADER: [&str; 2] = ["group_id", "employed_thousands"];
pub const DI_HEADER: [&str; 3] = ["sector_id", "group_id", "di"];

/// Combined race/ethnicity percentages above this are rejected.
pub const MAX_COMBINED_RACE_PCT: f64 = 110.0;

pub const BUILTIN_DATASET: &str = "bls-2022-mgmt";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaborError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("unexpected header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}, column {column}: {reason} (value {value:?})")]
    Cell {
        line: u64,
        column: String,
        value: String,
        reason: String,
    },
    #[error("duplicate sector {0}")]
    DuplicateSector(String),
    #[error("duplicate labor-force group {0}")]
    DuplicateGroup(String),
    #[error("labor-force table is missing group {0}")]
    MissingGroup(String),
    #[error("unknown group {0}")]
    UnknownGroup(String),
    #[error("sector {sector}: {column} = {value} is outside [0, 100]")]
    PctOutOfRange {
        sector: String,
        column: String,
        value: f64,
    },
    #[error("sector {sector}: combined race/ethnicity share {total} exceeds {MAX_COMBINED_RACE_PCT}%")]
    CombinedShare { sector: String, total: f64 },
    #[error("sector {sector}: total employed must be positive (got {value})")]
    NonPositiveTotal { sector: String, value: f64 },
    #[error("labor-force total for {group} must be positive (got {value})")]
    NonPositiveLaborForce { group: String, value: f64 },
    #[error("disparate impact undefined for {group}: {reason}")]
    UndefinedRate { group: String, reason: String },
    #[error("sector {sector}: {source}")]
    InSector {
        sector: String,
        #[source]
        source: Box<LaborError>,
    },
    #[error("no dataset named {0:?}")]
    UnknownDataset(String),
    #[error("di table sector {sector} lacks group {group}")]
    IncompleteProfile { sector: String, group: String },
}

/// Employment statistics for one sector; percentages are shares of the
/// sector's workforce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorRecord {
    pub sector_id: String,
    pub sector_name: String,
    pub total_thousands: f64,
    pub pct_women: f64,
    pub pct_white: f64,
    pub pct_black: f64,
    pub pct_asian: f64,
    pub pct_hispanic: f64,
}

impl SectorRecord {
    pub fn pct(&self, group: RaceGroup) -> f64 {
        match group {
            RaceGroup::R1 => self.pct_white,
            RaceGroup::R2 => self.pct_black,
            RaceGroup::R3 => self.pct_asian,
            RaceGroup::R4 => self.pct_hispanic,
        }
    }

    pub fn race_pcts(&self) -> [f64; 4] {
        RaceGroup::ALL.map(|g| self.pct(g))
    }

    pub fn validate(&self) -> Result<(), LaborError> {
        if !(self.total_thousands.is_finite() && self.total_thousands > 0.0) {
            return Err(LaborError::NonPositiveTotal {
                sector: self.sector_id.clone(),
                value: self.total_thousands,
            });
        }
        if !(0.0..=100.0).contains(&self.pct_women) {
            return Err(LaborError::PctOutOfRange {
                sector: self.sector_id.clone(),
                column: "pct_women".into(),
                value: self.pct_women,
            });
        }
        // Individual race cells only need to be nonnegative; the combined
        // share is what bounds them.
        for (g, col) in RaceGroup::ALL.iter().zip(&SECTOR_STATS_HEADER[4..]) {
            let v = self.pct(*g);
            if !(v.is_finite() && v >= 0.0) {
                return Err(LaborError::PctOutOfRange {
                    sector: self.sector_id.clone(),
                    column: (*col).into(),
                    value: v,
                });
            }
        }
        let total: f64 = self.race_pcts().iter().sum();
        if total > MAX_COMBINED_RACE_PCT {
            return Err(LaborError::CombinedShare {
                sector: self.sector_id.clone(),
                total,
            });
        }
        Ok(())
    }
}

/// National employed persons (thousands) per race/ethnicity group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaborForceTable {
    pub employed: [f64; 4],
}

impl Default for LaborForceTable {
    fn default() -> Self {
        Self {
            employed: [121_908.0, 19_937.0, 10_615.0, 29_299.0],
        }
    }
}

impl LaborForceTable {
    pub fn new(employed: [f64; 4]) -> Result<Self, LaborError> {
        for (g, &v) in RaceGroup::ALL.iter().zip(&employed) {
            if !(v.is_finite() && v > 0.0) {
                return Err(LaborError::NonPositiveLaborForce {
                    group: g.to_string(),
                    value: v,
                });
            }
        }
        Ok(Self { employed })
    }

    pub fn get(&self, group: RaceGroup) -> f64 {
        self.employed[group.index()]
    }
}

fn read_csv(bytes: &[u8], expected: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>, LaborError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| LaborError::Csv(e.to_string()))?
        .clone();
    let found: Vec<&str> = header.iter().map(|h| h.trim_start_matches('\u{feff}')).collect();
    if found != expected {
        return Err(LaborError::Header {
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| LaborError::Csv(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record));
    }
    Ok(rows)
}

fn number(record: &csv::StringRecord, line: u64, idx: usize, header: &[&str]) -> Result<f64, LaborError> {
    let raw = record.get(idx).unwrap_or("");
    let cell_error = |reason: &str| LaborError::Cell {
        line,
        column: header[idx].to_string(),
        value: raw.to_string(),
        reason: reason.to_string(),
    };
    let v: f64 = raw.parse().map_err(|_| cell_error("not a number"))?;
    if !v.is_finite() {
        return Err(cell_error("not a finite number"));
    }
    Ok(v)
}

/// Parses `sector_stats.csv`.
pub fn parse_sector_stats(bytes: &[u8]) -> Result<Vec<SectorRecord>, LaborError> {
    let h = &SECTOR_STATS_HEADER;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, rec) in read_csv(bytes, h)? {
        let sector_id = rec.get(0).unwrap_or("").to_string();
        if sector_id.is_empty() {
            return Err(LaborError::Cell {
                line,
                column: h[0].into(),
                value: String::new(),
                reason: "empty sector id".into(),
            });
        }
        if !seen.insert(sector_id.clone()) {
            return Err(LaborError::DuplicateSector(sector_id));
        }
        let record = SectorRecord {
            sector_name: rec.get(1).unwrap_or("").to_string(),
            total_thousands: number(&rec, line, 2, h)?,
            pct_women: number(&rec, line, 3, h)?,
            pct_white: number(&rec, line, 4, h)?,
            pct_black: number(&rec, line, 5, h)?,
            pct_asian: number(&rec, line, 6, h)?,
            pct_hispanic: number(&rec, line, 7, h)?,
            sector_id,
        };
        record.validate()?;
        out.push(record);
    }
    Ok(out)
}

/// Parses `labor_force.csv`; all four race groups must appear once.
pub fn parse_labor_force(bytes: &[u8]) -> Result<LaborForceTable, LaborError> {
    let h = &LABOR_FORCE_HEADER;
    let mut employed: [Option<f64>; 4] = [None; 4];
    for (line, rec) in read_csv(bytes, h)? {
        let id = rec.get(0).unwrap_or("");
        let group: RaceGroup = id
            .parse()
            .map_err(|_| LaborError::UnknownGroup(id.to_string()))?;
        let slot = &mut employed[group.index()];
        if slot.is_some() {
            return Err(LaborError::DuplicateGroup(id.to_string()));
        }
        *slot = Some(number(&rec, line, 1, h)?);
    }
    let mut values = [0.0; 4];
    for (g, v) in RaceGroup::ALL.iter().zip(employed) {
        values[g.index()] = v.ok_or_else(|| LaborError::MissingGroup(g.to_string()))?;
    }
    LaborForceTable::new(values)
}

/// Race/ethnicity DI of `group` in `sector` against the pooled other groups.
pub fn race_di(sector: &SectorRecord, group: RaceGroup, lf: &LaborForceTable) -> Result<f64, LaborError> {
    let share = sector.pct(group);
    if share <= 0.0 {
        return Err(LaborError::UndefinedRate {
            group: group.to_string(),
            reason: "group has no employment share in this sector".into(),
        });
    }
    let (mut other_share, mut other_force) = (0.0, 0.0);
    for g in RaceGroup::ALL.into_iter().filter(|&g| g != group) {
        other_share += sector.pct(g);
        other_force += lf.get(g);
    }
    if other_share <= 0.0 {
        return Err(LaborError::UndefinedRate {
            group: group.to_string(),
            reason: "remaining groups have no employment share".into(),
        });
    }
    Ok((share / lf.get(group)) / (other_share / other_force))
}

/// `(DI(G1), DI(G2))` with `DI(G2) = 1 / DI(G1)`.
pub fn gender_di(sector: &SectorRecord) -> Result<(f64, f64), LaborError> {
    let women = sector.pct_women;
    if !(women > 0.0 && women < 100.0) {
        return Err(LaborError::UndefinedRate {
            group: GenderGroup::G1.to_string(),
            reason: format!("women's share {women}% leaves one side empty"),
        });
    }
    let di = women / (100.0 - women);
    Ok((di, 1.0 / di))
}

/// Disparate impact of every group in one sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorDisparity {
    pub sector_id: String,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "R3")]
    pub r3: f64,
    #[serde(rename = "R4")]
    pub r4: f64,
    #[serde(rename = "G1")]
    pub g1: f64,
    #[serde(rename = "G2")]
    pub g2: f64,
}

impl SectorDisparity {
    pub fn race(&self, group: RaceGroup) -> f64 {
        match group {
            RaceGroup::R1 => self.r1,
            RaceGroup::R2 => self.r2,
            RaceGroup::R3 => self.r3,
            RaceGroup::R4 => self.r4,
        }
    }

    pub fn gender(&self, group: GenderGroup) -> f64 {
        match group {
            GenderGroup::G1 => self.g1,
            GenderGroup::G2 => self.g2,
        }
    }

    pub fn get(&self, group: Group) -> f64 {
        match group {
            Group::Race(r) => self.race(r),
            Group::Gender(g) => self.gender(g),
        }
    }

    fn set(&mut self, group: Group, value: f64) {
        let slot = match group {
            Group::Race(RaceGroup::R1) => &mut self.r1,
            Group::Race(RaceGroup::R2) => &mut self.r2,
            Group::Race(RaceGroup::R3) => &mut self.r3,
            Group::Race(RaceGroup::R4) => &mut self.r4,
            Group::Gender(GenderGroup::G1) => &mut self.g1,
            Group::Gender(GenderGroup::G2) => &mut self.g2,
        };
        *slot = value;
    }
}

/// Sector → group → DI, in sector input order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DisparityProfile {
    pub sectors: Vec<SectorDisparity>,
}

impl DisparityProfile {
    pub fn sector(&self, id: &str) -> Option<&SectorDisparity> {
        self.sectors.iter().find(|s| s.sector_id == id)
    }

    pub fn sector_ids(&self) -> impl Iterator<Item = &str> {
        self.sectors.iter().map(|s| s.sector_id.as_str())
    }
}

pub fn build_disparity_profile(
    sectors: &[SectorRecord],
    lf: &LaborForceTable,
) -> Result<DisparityProfile, LaborError> {
    let annotate = |sector: &SectorRecord| {
        let id = sector.sector_id.clone();
        move |e: LaborError| LaborError::InSector {
            sector: id,
            source: Box::new(e),
        }
    };
    let rows = sectors
        .iter()
        .map(|s| {
            let r = |g| race_di(s, g, lf).map_err(annotate(s));
            let (g1, g2) = gender_di(s).map_err(annotate(s))?;
            Ok(SectorDisparity {
                sector_id: s.sector_id.clone(),
                r1: r(RaceGroup::R1)?,
                r2: r(RaceGroup::R2)?,
                r3: r(RaceGroup::R3)?,
                r4: r(RaceGroup::R4)?,
                g1,
                g2,
            })
        })
        .collect::<Result<Vec<_>, LaborError>>()?;
    Ok(DisparityProfile { sectors: rows })
}

/// Renders the profile as `di.csv`, six decimals per value.
pub fn write_di_csv(profile: &DisparityProfile) -> String {
    let mut out = DI_HEADER.join(",");
    out.push('\n');
    for sector in &profile.sectors {
        for group in Group::ALL {
            out.push_str(&format!(
                "{},{},{}\n",
                sector.sector_id,
                group,
                format_fixed(sector.get(group), 6)
            ));
        }
    }
    out
}

/// Reads a `di.csv` table back into a profile. Every sector needs all six groups.
pub fn parse_di_csv(bytes: &[u8]) -> Result<DisparityProfile, LaborError> {
    let h = &DI_HEADER;
    let mut order: Vec<String> = Vec::new();
    let mut cells: HashMap<String, HashMap<Group, f64>> = HashMap::new();
    for (line, rec) in read_csv(bytes, h)? {
        let sector = rec.get(0).unwrap_or("").to_string();
        let gid = rec.get(1).unwrap_or("");
        let group: Group = gid
            .parse()
            .map_err(|_| LaborError::UnknownGroup(gid.to_string()))?;
        let di = number(&rec, line, 2, h)?;
        if di <= 0.0 {
            return Err(LaborError::Cell {
                line,
                column: h[2].into(),
                value: rec.get(2).unwrap_or("").into(),
                reason: "disparate impact must be positive".into(),
            });
        }
        if !cells.contains_key(&sector) {
            order.push(sector.clone());
        }
        cells.entry(sector).or_default().insert(group, di);
    }
    let mut sectors = Vec::with_capacity(order.len());
    for id in order {
        let values = &cells[&id];
        let mut row = SectorDisparity {
            sector_id: id.clone(),
            r1: 0.0,
            r2: 0.0,
            r3: 0.0,
            r4: 0.0,
            g1: 0.0,
            g2: 0.0,
        };
        for group in Group::ALL {
            let v = values.get(&group).ok_or_else(|| LaborError::IncompleteProfile {
                sector: id.clone(),
                group: group.to_string(),
            })?;
            row.set(group, *v);
        }
        sectors.push(row);
    }
    Ok(DisparityProfile { sectors })
}

/// Sector statistics plus labor-force totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub sectors: Vec<SectorRecord>,
    pub labor_force: LaborForceTable,
}

const BUILTIN_SECTORS: &str = "\
sector_id,sector_name,total_thousands,pct_women,pct_white,pct_black,pct_asian,pct_hispanic
S1,Chief executives,1780,29.2,85.9,5.9,6.7,6.8
S2,Sales managers Computer and information systems managers,566,34.2,88.3,5.9,3.5,11.3
S3,Medical and health services managers,764,26.4,72.6,7.8,16.5,7.5
S4,Education and childcare administrators Property,797,71.6,74.6,16.0,7.3,9.0
S5,Real estate,988,68.1,78.0,16.3,4.0,9.8
S6,Community association managers,835,50.3,83.1,9.9,4.3,11
";

const BUILTIN_LABOR_FORCE: &str = "\
group_id,employed_thousands
R1,121908
R2,19937
R3,10615
R4,29299
";

impl Dataset {
    /// Looks up an embedded dataset by name.
    pub fn builtin(name: &str) -> Result<Self, LaborError> {
        if name != BUILTIN_DATASET {
            return Err(LaborError::UnknownDataset(name.to_string()));
        }
        Ok(Self {
            name: name.to_string(),
            sectors: parse_sector_stats(BUILTIN_SECTORS.as_bytes())?,
            labor_force: parse_labor_force(BUILTIN_LABOR_FORCE.as_bytes())?,
        })
    }

    pub fn from_csv(name: &str, sectors: &[u8], labor_force: &[u8]) -> Result<Self, LaborError> {
        Ok(Self {
            name: name.to_string(),
            sectors: parse_sector_stats(sectors)?,
            labor_force: parse_labor_force(labor_force)?,
        })
    }

    pub fn builtin_sector_csv() -> &'static str {
        BUILTIN_SECTORS
    }

    pub fn builtin_labor_force_csv() -> &'static str {
        BUILTIN_LABOR_FORCE
    }

    pub fn profile(&self) -> Result<DisparityProfile, LaborError> {
        build_disparity_profile(&self.sectors, &self.labor_force)
    }
}
