//! Published reference tables and a comparison report against recomputed values.
//!
//! Table 3 holds per-sector disparate impact; tables 4 to 7 hold pDEI of the
//! uniform pools in sectors S1, S2, S5 and S6, race-only rows first and then
//! race-and-gender rows (women first).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::format::format_fixed;
use crate::groups::{GenderGroup, Group, RaceGroup};
use crate::labor::{Dataset, LaborError};
use crate::pipeline::{compute_pdei, uniform_pool, PipelineError, Scenario};

/// Absolute per-cell tolerance for table reproduction.
pub const REPRODUCTION_TOLERANCE: f64 = 0.02;

pub const TABLE3_DI: [(&str, [f64; 6]); 6] = [
    ("S1", [2.18, 0.48, 1.09, 0.36, 0.41, 2.42]),
    ("S2", [2.10, 0.46, 0.54, 0.60, 0.52, 1.92]),
    ("S3", [1.12, 0.66, 3.02, 0.40, 0.36, 2.78]),
    ("S4", [1.13, 1.43, 1.18, 0.48, 2.53, 0.40]),
    ("S5", [1.27, 1.44, 0.63, 0.52, 2.14, 0.47]),
    ("S6", [1.61, 0.82, 0.67, 0.59, 1.01, 0.99]),
];

const LADDER: [f64; 4] = [1.0, 0.88, 0.75, 0.63];

/// A published pDEI table: race-only rows R1..R4, then R1&G1..R4&G1, R1&G2..R4&G2.
pub struct PdeiTable {
    pub number: u8,
    pub sector: &'static str,
    pub race_only: [[f64; 4]; 4],
    pub race_and_gender: [[f64; 4]; 8],
    /// `(row in race_and_gender, column)` cells that contradict their own row.
    pub known_typos: &'static [(usize, usize)],
}

pub const PDEI_TABLES: [PdeiTable; 4] = [
    PdeiTable {
        number: 4,
        sector: "S1",
        race_only: [
            [0.17, 0.14, 0.12, 0.10],
            [0.75, 0.65, 0.56, 0.47],
            [0.33, 0.29, 0.25, 0.21],
            LADDER,
        ],
        race_and_gender: [
            LADDER,
            LADDER,
            LADDER,
            LADDER,
            [0.17, 0.15, 0.13, 0.11],
            [0.75, 0.65, 0.56, 0.47],
            [0.33, 0.29, 0.25, 0.21],
            LADDER,
        ],
        known_typos: &[],
    },
    PdeiTable {
        number: 5,
        sector: "S2",
        race_only: [
            [0.22, 0.19, 0.16, 0.14],
            LADDER,
            [0.85, 0.74, 0.64, 0.53],
            [0.76, 0.67, 0.57, 0.48],
        ],
        race_and_gender: [
            LADDER,
            LADDER,
            LADDER,
            LADDER,
            [0.0, 0.24, 0.20, 0.17],
            LADDER,
            [1.0, 0.74, 0.64, 0.53],
            [0.76, 0.67, 0.57, 0.48],
        ],
        known_typos: &[(4, 0), (6, 0)],
    },
    PdeiTable {
        number: 6,
        sector: "S5",
        race_only: [
            [0.41, 0.36, 0.31, 0.26],
            [0.36, 0.32, 0.27, 0.23],
            [0.83, 0.72, 0.62, 0.52],
            LADDER,
        ],
        race_and_gender: [
            [0.41, 0.36, 0.31, 0.26],
            [0.36, 0.32, 0.27, 0.23],
            [0.83, 0.72, 0.62, 0.52],
            LADDER,
            LADDER,
            LADDER,
            LADDER,
            LADDER,
        ],
        known_typos: &[],
    },
    PdeiTable {
        number: 7,
        sector: "S6",
        race_only: [
            [0.36, 0.32, 0.27, 0.23],
            [0.72, 0.63, 0.54, 0.45],
            [0.88, 0.77, 0.66, 0.55],
            LADDER,
        ],
        race_and_gender: [
            [0.98, 0.85, 0.73, 0.61],
            [0.98, 0.85, 0.73, 0.61],
            [0.98, 0.85, 0.73, 0.61],
            LADDER,
            LADDER,
            LADDER,
            LADDER,
            LADDER,
        ],
        known_typos: &[],
    },
];

pub fn pdei_table(number: u8) -> Option<&'static PdeiTable> {
    PDEI_TABLES.iter().find(|t| t.number == number)
}

#[derive(Debug, thiserror::Error)]
pub enum ReproduceError {
    #[error("no reference table {0} (expected 3, 4, 5, 6 or 7)")]
    UnknownTable(u8),
    #[error(transparent)]
    Labor(#[from] LaborError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Mismatch,
    KnownPaperTypo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub row: String,
    pub column: String,
    pub computed: f64,
    pub published: f64,
    pub delta: f64,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: u8,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<String>,
    pub cells: Vec<CellReport>,
    pub tolerance: f64,
}

impl TableReport {
    pub fn passes(&self) -> bool {
        self.cells.iter().all(|c| c.status != CellStatus::Mismatch)
    }

    pub fn max_delta(&self) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.status != CellStatus::KnownPaperTypo)
            .map(|c| c.delta)
            .fold(0.0, f64::max)
    }

    pub fn count(&self, status: CellStatus) -> usize {
        self.cells.iter().filter(|c| c.status == status).count()
    }

    /// Grid of computed values followed by the per-cell deviation report.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Table {}: {}", self.table, self.title);
        let label_width = self.rows.iter().map(String::len).max().unwrap_or(0).max(6);
        let _ = write!(out, "{:label_width$}", "");
        for c in &self.columns {
            let _ = write!(out, " {c:>6}");
        }
        out.push('\n');
        let per_row = self.columns.len();
        for (r, label) in self.rows.iter().enumerate() {
            let _ = write!(out, "{label:label_width$}");
            for cell in &self.cells[r * per_row..(r + 1) * per_row] {
                let _ = write!(out, " {:>6}", format_fixed(cell.computed, 2));
            }
            out.push('\n');
        }
        out.push('\n');
        let _ = writeln!(
            out,
            "{:label_width$} {:>6} {:>9} {:>9} {:>7}  status",
            "row", "col", "computed", "published", "|delta|"
        );
        for c in &self.cells {
            let status = match c.status {
                CellStatus::Ok => "ok",
                CellStatus::Mismatch => "MISMATCH",
                CellStatus::KnownPaperTypo => "known_paper_typo",
            };
            let _ = writeln!(
                out,
                "{:label_width$} {:>6} {:>9} {:>9} {:>7}  {status}",
                c.row,
                c.column,
                format_fixed(c.computed, 4),
                format_fixed(c.published, 2),
                format_fixed(c.delta, 4),
            );
        }
        let _ = writeln!(
            out,
            "\n{} cells: {} ok, {} mismatched, {} known typos; max |delta| {} (tolerance {})",
            self.cells.len(),
            self.count(CellStatus::Ok),
            self.count(CellStatus::Mismatch),
            self.count(CellStatus::KnownPaperTypo),
            format_fixed(self.max_delta(), 4),
            self.tolerance
        );
        out
    }
}

fn cell(row: String, column: String, computed: f64, published: f64, typo: bool) -> CellReport {
    let delta = (computed - published).abs();
    let status = if typo {
        CellStatus::KnownPaperTypo
    } else if delta <= REPRODUCTION_TOLERANCE {
        CellStatus::Ok
    } else {
        CellStatus::Mismatch
    };
    CellReport {
        row,
        column,
        computed,
        published,
        delta,
        status,
    }
}

/// Recomputes reference table `number` from `dataset` and compares cell by cell.
pub fn reproduce_table(number: u8, dataset: &Dataset) -> Result<TableReport, ReproduceError> {
    let profile = dataset.profile()?;
    if number == 3 {
        let columns: Vec<String> = Group::ALL.iter().map(|g| g.to_string()).collect();
        let mut cells = Vec::new();
        let mut rows = Vec::new();
        for (sector_id, published) in TABLE3_DI {
            let sector = profile
                .sector(sector_id)
                .ok_or_else(|| PipelineError::UnknownSector(sector_id.to_string()))?;
            rows.push(sector_id.to_string());
            for (group, &p) in Group::ALL.iter().zip(&published) {
                cells.push(cell(sector_id.into(), group.to_string(), sector.get(*group), p, false));
            }
        }
        return Ok(TableReport {
            table: 3,
            title: "Disparate impact by sector and group".into(),
            columns,
            rows,
            cells,
            tolerance: REPRODUCTION_TOLERANCE,
        });
    }

    let table = pdei_table(number).ok_or(ReproduceError::UnknownTable(number))?;
    let columns: Vec<String> = (1..=4).map(|j| format!("C{j}")).collect();
    let mut rows = Vec::new();
    let mut cells = Vec::new();

    let race = compute_pdei(&uniform_pool(Scenario::RaceOnly), &profile, table.sector, Scenario::RaceOnly)?;
    for (r, group) in RaceGroup::ALL.iter().enumerate() {
        let label = group.to_string();
        rows.push(label.clone());
        for j in 0..4 {
            cells.push(cell(label.clone(), columns[j].clone(), race[r * 4 + j].pdei, table.race_only[r][j], false));
        }
    }

    let both = compute_pdei(
        &uniform_pool(Scenario::RaceAndGender),
        &profile,
        table.sector,
        Scenario::RaceAndGender,
    )?;
    let labels = GenderGroup::ALL
        .iter()
        .flat_map(|g| RaceGroup::ALL.iter().map(move |r| format!("{r} & {g}")));
    for (r, label) in labels.enumerate() {
        rows.push(label.clone());
        for j in 0..4 {
            let typo = table.known_typos.contains(&(r, j));
            cells.push(cell(
                label.clone(),
                columns[j].clone(),
                both[r * 4 + j].pdei,
                table.race_and_gender[r][j],
                typo,
            ));
        }
    }

    Ok(TableReport {
        table: number,
        title: format!("pDEI scores in sector {}", table.sector),
        columns,
        rows,
        cells,
        tolerance: REPRODUCTION_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labor::BUILTIN_DATASET;

    #[test]
    fn unknown_table() {
        let ds = Dataset::builtin(BUILTIN_DATASET).unwrap();
        assert!(matches!(reproduce_table(8, &ds), Err(ReproduceError::UnknownTable(8))));
    }

    #[test]
    fn typo_cells_are_flagged_not_failed() {
        let ds = Dataset::builtin(BUILTIN_DATASET).unwrap();
        let report = reproduce_table(5, &ds).unwrap();
        assert_eq!(report.count(CellStatus::KnownPaperTypo), 2);
        let typos: Vec<_> = report
            .cells
            .iter()
            .filter(|c| c.status == CellStatus::KnownPaperTypo)
            .map(|c| (c.row.as_str(), c.column.as_str(), c.published))
            .collect();
        assert_eq!(typos, [("R1 & G2", "C1", 0.0), ("R3 & G2", "C1", 1.0)]);
        let text = report.render_text();
        assert!(text.contains("known_paper_typo"));
        assert!(text.starts_with("Table 5"));
    }
}
