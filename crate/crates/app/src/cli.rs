//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input (flags, files, schemas), 2 failed
//! computation or a reproduction mismatch. Data goes to standard output or
//! `--out`; diagnostics go to standard error.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pdei_core::labor::{write_di_csv, Dataset, BUILTIN_DATASET};
use pdei_core::pipeline::{compute_pdei, rank, write_scores_csv, Candidate, GroupBy, Scenario, Scheme};
use pdei_core::plot::{export_plot_series, PlotKind, PlotSource};
use pdei_core::reproduce::reproduce_table;

use crate::api::{self, ApiError, AuditRequest, Context, RankRequest, SelectRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "pdei", version, about = "Disparity-adjusted candidate screening")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Derive disparate impact for every sector and group (di.csv).
    Di {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score and rank a candidate pool by pDEI.
    Rank {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        pool: PoolArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Select k candidates under a scheme.
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        pool: PoolArgs,
        #[command(flatten)]
        selection: SelectionArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Four-fifths audit of a selection: either `--selected` ids or the
    /// result of `--scheme`/`--k`.
    Audit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        pool: PoolArgs,
        /// Comma-separated candidate ids.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["scheme", "k"])]
        selected: Option<Vec<String>>,
        #[arg(long)]
        scheme: Option<Scheme>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "race")]
        group_by: GroupBy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a reference table (3 to 7; all when omitted) and report deviations.
    Reproduce {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=7))]
        table: Option<u8>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export chart data as JSON points.
    Plot {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        pool: PoolArgs,
        #[arg(long, default_value = "di_star")]
        kind: PlotKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Embedded dataset name.
    #[arg(long, default_value = BUILTIN_DATASET)]
    pub dataset: String,
    /// Sector statistics CSV; replaces the embedded sectors.
    #[arg(long)]
    pub sectors: Option<PathBuf>,
    /// Labor-force totals CSV; replaces the embedded totals.
    #[arg(long)]
    pub labor: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PoolArgs {
    /// JSON array of candidates; defaults to the uniform evaluation pool.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    #[arg(long, default_value = "S1")]
    pub sector: String,
    #[arg(long, default_value = "race")]
    pub scenario: Scenario,
}

#[derive(Args, Debug, Clone)]
pub struct SelectionArgs {
    #[arg(long)]
    pub scheme: Scheme,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "race")]
    pub group_by: GroupBy,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

enum Failure {
    Api(ApiError),
    Mismatch(String),
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        Failure::Api(e)
    }
}

type CmdResult = Result<(), Failure>;

fn read_file(path: &Path) -> Result<Vec<u8>, ApiError> {
    std::fs::read(path)
        .map_err(|e| ApiError::validation("io", format!("cannot read {}: {e}", path.display()), None))
}

/// Loads the dataset selected by `--dataset`, `--sectors` and `--labor`.
pub fn load_dataset(args: &DataArgs) -> Result<Dataset, ApiError> {
    if args.sectors.is_none() && args.labor.is_none() {
        return Ok(Dataset::builtin(&args.dataset)?);
    }
    let sectors = match &args.sectors {
        Some(p) => read_file(p)?,
        None => Dataset::builtin_sector_csv().as_bytes().to_vec(),
    };
    let labor = match &args.labor {
        Some(p) => read_file(p)?,
        None => Dataset::builtin_labor_force_csv().as_bytes().to_vec(),
    };
    let name = args
        .sectors
        .as_ref()
        .or(args.labor.as_ref())
        .map(|p| p.display().to_string())
        .unwrap_or_default();
    Ok(Dataset::from_csv(&name, &sectors, &labor)?)
}

fn load_context(args: &DataArgs) -> Result<Context, ApiError> {
    Context::new(load_dataset(args)?)
}

fn load_candidates(path: &Option<PathBuf>) -> Result<Option<Vec<Candidate>>, ApiError> {
    match path {
        None => Ok(None),
        Some(p) => {
            let bytes = read_file(p)?;
            api::parse_json(&bytes).map(Some).map_err(|mut e| {
                e.message = format!("{}: {}", p.display(), e.message);
                e
            })
        }
    }
}

fn emit(out: &mut dyn Write, err: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> Result<(), ApiError> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => {
            std::fs::write(p, text)
                .map_err(|e| ApiError::validation("io", format!("cannot write {}: {e}", p.display()), None))?;
            let _ = writeln!(err, "wrote {}", p.display());
        }
        None => {
            out.write_all(text.as_bytes())
                .map_err(|e| ApiError::internal("io", format!("cannot write output: {e}")))?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Mismatch(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILED
        }
        Err(Failure::Api(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_internal() {
                EXIT_FAILED
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::Di { data, out: path } => {
            let ctx = load_context(&data)?;
            emit(out, err, &path, &write_di_csv(&ctx.profile))?;
        }
        Command::Rank {
            data,
            pool,
            format,
            out: path,
        } => {
            let ctx = load_context(&data)?;
            let req = RankRequest {
                candidates: load_candidates(&pool.candidates)?,
                sector: pool.sector,
                scenario: pool.scenario,
            };
            let resp = api::rank_pool(&ctx, &req)?;
            let text = match format {
                Format::Json => api::to_json(&resp),
                Format::Csv => write_scores_csv(&resp.ranking),
            };
            emit(out, err, &path, &text)?;
        }
        Command::Select {
            data,
            pool,
            selection,
            out: path,
        } => {
            let ctx = load_context(&data)?;
            let req = SelectRequest {
                candidates: load_candidates(&pool.candidates)?,
                sector: pool.sector,
                scenario: pool.scenario,
                scheme: selection.scheme,
                k: selection.k,
                group_by: selection.group_by,
            };
            emit(out, err, &path, &api::to_json(&api::select(&ctx, &req)?))?;
        }
        Command::Audit {
            data,
            pool,
            selected,
            scheme,
            k,
            group_by,
            out: path,
        } => {
            let ctx = load_context(&data)?;
            let candidates = load_candidates(&pool.candidates)?;
            let selected_ids = match (selected, scheme, k) {
                (Some(ids), _, _) => ids,
                (None, Some(scheme), Some(k)) => {
                    let req = SelectRequest {
                        candidates: candidates.clone(),
                        sector: pool.sector.clone(),
                        scenario: pool.scenario,
                        scheme,
                        k,
                        group_by,
                    };
                    api::select(&ctx, &req)?.selected
                }
                _ => {
                    return Err(ApiError::validation(
                        "missing_selection",
                        "audit needs --selected, or both --scheme and --k",
                        Some("selected"),
                    )
                    .into())
                }
            };
            let req = AuditRequest {
                candidates: candidates.unwrap_or_else(|| pdei_core::pipeline::uniform_pool(pool.scenario)),
                selected_ids,
                group_by,
            };
            emit(out, err, &path, &api::to_json(&api::audit(&req)?))?;
        }
        Command::Reproduce {
            data,
            table,
            format,
            out: path,
        } => {
            let dataset = load_dataset(&data)?;
            let tables: Vec<u8> = table.map_or_else(|| (3..=7).collect(), |t| vec![t]);
            let mut reports = Vec::new();
            for t in tables {
                reports.push(reproduce_table(t, &dataset).map_err(ApiError::from)?);
            }
            let text = match format {
                ReportFormat::Text => reports.iter().map(|r| r.render_text()).collect::<Vec<_>>().join("\n"),
                ReportFormat::Json if reports.len() == 1 => api::to_json(&reports[0]),
                ReportFormat::Json => api::to_json(&reports),
            };
            emit(out, err, &path, &text)?;
            let failed: Vec<String> = reports
                .iter()
                .filter(|r| !r.passes())
                .map(|r| r.table.to_string())
                .collect();
            if !failed.is_empty() {
                return Err(Failure::Mismatch(format!(
                    "table {} differs from the published values beyond tolerance",
                    failed.join(", ")
                )));
            }
        }
        Command::Plot {
            data,
            pool,
            kind,
            out: path,
        } => {
            let ctx = load_context(&data)?;
            let series = if kind == PlotKind::DiStar {
                export_plot_series(PlotSource::Profile(&ctx.profile), kind)
            } else {
                let candidates = load_candidates(&pool.candidates)?
                    .unwrap_or_else(|| pdei_core::pipeline::uniform_pool(pool.scenario));
                let scores = rank(&compute_pdei(&candidates, &ctx.profile, &pool.sector, pool.scenario).map_err(ApiError::from)?);
                export_plot_series(PlotSource::Scores(&scores, &ctx.profile), kind)
            }
            .map_err(ApiError::from)?;
            emit(out, err, &path, &api::to_json(&series))?;
        }
        Command::Serve { data, host, port } => {
            let ctx = Arc::new(load_context(&data)?);
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| ApiError::internal("runtime", format!("cannot start runtime: {e}")))?;
            let addr = SocketAddr::new(host, port);
            runtime
                .block_on(crate::server::serve(ctx, addr))
                .map_err(|e| ApiError::validation("bind", format!("cannot serve on {addr}: {e}"), Some("port")))?;
        }
    }
    Ok(())
}
