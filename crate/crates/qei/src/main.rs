use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qei::config::StateConfig;
use qei::{CliError, Command, OutputPaths, RunConfig};
use qei_core::microlocal::Covector;

/// Numerical laboratory for quantum energy inequalities, passivity and
/// microlocal probes of the free scalar field on static cylinders.
#[derive(Parser, Debug)]
#[command(name = "qei", version)]
struct Cli {
    /// JSON run configuration; the reference configuration when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configured PRNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads.
    #[arg(long, global = true, env = "QEI_THREADS")]
    threads: Option<usize>,

    /// Directory for reports, tables and metadata.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug, Default)]
struct Outputs {
    /// Report path (JSON).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Path of the primary CSV table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StateArgs {
    #[command(flatten)]
    outputs: Outputs,

    /// Test state as JSON, e.g. '{"kind":"pair","mode":1,"epsilon":[0.2,0]}'.
    /// Repeatable; replaces the configured states.
    #[arg(long = "state")]
    states: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Mode catalog table and the mode/CCR foundation checks.
    Modes(Outputs),
    /// Two-point functions of the configured states.
    Twopoint(StateArgs),
    /// Energy densities, smeared energies and the generator identity.
    Energy(StateArgs),
    /// Q functions, static QWEI margins, quiescence and Bochner checks.
    Qwei(StateArgs),
    /// Passivity, work identity and proof-chain campaigns.
    Passivity(Outputs),
    /// Wavefront probes against the Hadamard cone.
    Microlocal {
        #[command(flatten)]
        outputs: Outputs,
        /// JSON array of covectors `[ζ, ξ, ζ', ξ']` replacing the default fan.
        #[arg(long)]
        fan: Option<PathBuf>,
    },
    /// Every configured acceptance campaign.
    VerifyAll(Outputs),
}

fn load_fan(path: &PathBuf) -> Result<Vec<Covector>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let fan: Vec<Covector> =
        serde_json::from_str(&text).map_err(|e| CliError::field("--fan", format!("{}: {e}", path.display())))?;
    if fan.is_empty() || fan.iter().any(|d| d.iter().all(|v| *v == 0.0) || d.iter().any(|v| !v.is_finite())) {
        return Err(CliError::field("--fan", "directions must be finite and nonzero".into()));
    }
    Ok(fan)
}

fn apply_states(cfg: &mut RunConfig, states: &[String]) -> Result<(), CliError> {
    if states.is_empty() {
        return Ok(());
    }
    cfg.states = states
        .iter()
        .enumerate()
        .map(|(i, s)| serde_json::from_str::<StateConfig>(s).map_err(|e| CliError::field(&format!("--state[{i}]"), e.to_string())))
        .collect::<Result<_, _>>()?;
    cfg.validate()
}

fn main_inner(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::reference(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.threads == Some(0) {
        return Err(CliError::field("--threads", "must be at least 1".into()));
    }
    let mut fan = None;
    let (command, outputs) = match &cli.command {
        Cmd::Modes(o) => (Command::Modes, o),
        Cmd::Twopoint(a) => {
            apply_states(&mut cfg, &a.states)?;
            (Command::TwoPoint, &a.outputs)
        }
        Cmd::Energy(a) => {
            apply_states(&mut cfg, &a.states)?;
            (Command::Energy, &a.outputs)
        }
        Cmd::Qwei(a) => {
            apply_states(&mut cfg, &a.states)?;
            (Command::Qwei, &a.outputs)
        }
        Cmd::Passivity(o) => (Command::Passivity, o),
        Cmd::Microlocal { outputs, fan: f } => {
            fan = f.as_ref().map(load_fan).transpose()?;
            (Command::Microlocal, outputs)
        }
        Cmd::VerifyAll(o) => (Command::VerifyAll, o),
    };
    let dir = cli
        .out_dir
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("qei-out"));
    let paths = OutputPaths {
        dir,
        report: outputs.out.clone(),
        csv: outputs.csv.clone(),
    };
    let (code, report, lines) = qei::run(&cfg, command, fan, &paths, cli.threads)?;
    for l in lines {
        println!("{l}");
    }
    println!("report: {}", report.display());
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
