//! Orchestration of a command: tabulations, campaigns, persistence and the
//! exit code.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use qei_core::microlocal::Covector;

use crate::campaigns::{run_campaign, CampaignOptions};
use crate::config::{Campaign, RunConfig};
use crate::error::CliError;
use crate::report::{ensure_dir, write_json, Metadata, RunReport, Table};
use crate::tables;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Modes,
    TwoPoint,
    Energy,
    Qwei,
    Passivity,
    Microlocal,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Modes => "modes",
            Command::TwoPoint => "twopoint",
            Command::Energy => "energy",
            Command::Qwei => "qwei",
            Command::Passivity => "passivity",
            Command::Microlocal => "microlocal",
            Command::VerifyAll => "verify-all",
        }
    }

    /// Campaigns owned by the command; `verify-all` runs the configured list.
    fn campaigns(self, cfg: &RunConfig) -> Vec<Campaign> {
        let own: &[Campaign] = match self {
            Command::Modes => &[Campaign::Foundation],
            Command::TwoPoint => &[],
            Command::Energy => &[Campaign::GeneratorIdentity],
            Command::Qwei => &[Campaign::QStep, Campaign::StaticQwei, Campaign::Quiescence, Campaign::Bochner],
            Command::Passivity => &[Campaign::Passivity, Campaign::WorkIdentity, Campaign::ProofChain],
            Command::Microlocal => &[Campaign::Microlocal],
            Command::VerifyAll => return dedup(&cfg.campaigns),
        };
        own.iter().copied().filter(|c| cfg.campaigns.contains(c)).collect()
    }
}

fn dedup(list: &[Campaign]) -> Vec<Campaign> {
    let mut out: Vec<Campaign> = Vec::new();
    for c in list {
        if !out.contains(c) {
            out.push(*c);
        }
    }
    out
}

/// Everything a command produced, before persistence.
#[derive(Clone, Debug)]
pub struct Execution {
    pub report: RunReport,
    pub tables: Vec<Table>,
    pub campaign_seconds: Vec<(Campaign, f64)>,
    /// One summary line per campaign.
    pub lines: Vec<String>,
}

/// Runs `command` without touching the filesystem.
pub fn execute(cfg: &RunConfig, command: Command, fan: Option<Vec<Covector>>) -> Result<Execution, CliError> {
    let states = cfg.state_specs();
    let (checks, mut tables) = match command {
        Command::Modes => tables::modes(cfg, &cfg.build_catalog()?)?,
        Command::TwoPoint => tables::twopoint(&cfg.build_catalog()?, &states)?,
        Command::Energy => tables::energy(cfg, &cfg.build_catalog()?, &states)?,
        Command::Qwei => tables::qwei(cfg, &cfg.build_catalog()?, &states)?,
        _ => (Vec::new(), Vec::new()),
    };
    let opts = CampaignOptions { fan };
    let mut criteria = Vec::new();
    let mut seconds = Vec::new();
    let mut lines = Vec::new();
    for campaign in command.campaigns(cfg) {
        let out = run_campaign(cfg, campaign, &opts);
        lines.push(out.report.summary_line());
        seconds.push((campaign, out.seconds));
        criteria.push(out.report);
        tables.extend(out.tables);
    }
    let names = tables.iter().map(|t| format!("{}.csv", t.name)).collect();
    Ok(Execution {
        report: RunReport::new(command.name(), cfg.seed, checks, criteria, names),
        tables,
        campaign_seconds: seconds,
        lines,
    })
}

/// Output locations of a run.
#[derive(Clone, Debug, Default)]
pub struct OutputPaths {
    pub dir: PathBuf,
    /// Report path; defaults to `<dir>/<command>.json`.
    pub report: Option<PathBuf>,
    /// Path of the primary table; defaults to `<dir>/<table>.csv`.
    pub csv: Option<PathBuf>,
}

/// Writes the report, its tables and the metadata file.
pub fn persist(exec: &mut Execution, paths: &OutputPaths, meta: &Metadata) -> Result<PathBuf, CliError> {
    let dir = ensure_dir(&paths.dir)?;
    for (i, t) in exec.tables.iter().enumerate() {
        let path = match (&paths.csv, i) {
            (Some(p), 0) => p.clone(),
            _ => dir.join(format!("{}.csv", t.name)),
        };
        t.write_csv(&path)?;
        if i == 0 && paths.csv.is_some() {
            exec.report.tables[0] = path.display().to_string();
        }
    }
    let report = paths.report.clone().unwrap_or_else(|| dir.join(format!("{}.json", exec.report.command)));
    write_json(&report, &exec.report)?;
    write_json(&metadata_path(&report), meta)?;
    Ok(report)
}

fn metadata_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    report.with_file_name(format!("{stem}.metadata.json"))
}

/// Full command: thread pool, execution, persistence. Returns the exit code
/// and the report path.
pub fn run(cfg: &RunConfig, command: Command, fan: Option<Vec<Covector>>, paths: &OutputPaths, threads: Option<usize>) -> Result<(i32, PathBuf, Vec<String>), CliError> {
    let threads = threads.or(cfg.threads).unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let mut exec = pool.install(|| execute(cfg, command, fan))?;
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION"),
        command: command.name().into(),
        started_unix_seconds: started,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        threads,
        campaign_seconds: exec.campaign_seconds.clone(),
    };
    let path = persist(&mut exec, paths, &meta)?;
    Ok((exec.report.exit_code(), path, exec.lines))
}
