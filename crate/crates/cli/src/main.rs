use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use atcr_core::config::{load_config, ControllerKind, ObserverKind, RunConfig};
use atcr_core::runner::{
    self, compare, format_error_table, format_observer_table, match_eso_bandwidth,
    position_channel_rms, write_error_table_csv, write_observer_table_csv, ControllerRow,
    ObserverScoring, ObserverSummary, Variant,
};
use atcr_core::Error;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("repeat run produced a different trace")]
    SeedMismatch,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Parser)]
#[command(
    name = "atcr",
    version,
    about = "Unicycle tracking-control simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop simulation and write its trace.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run twice and fail unless both traces are byte-identical.
        #[arg(long)]
        seed_check: bool,
    },
    /// Run controller and observer variants of one config side by side.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "ppc,smc,pid")]
        controllers: Vec<ControllerKind>,
        #[arg(long, value_delimiter = ',', default_value = "asmdob,eso")]
        observers: Vec<ObserverKind>,
        /// Retune the ESO to the ASMDOB's steady-state error first.
        #[arg(long)]
        match_eso: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarise a trace file.
    Metrics {
        #[arg(long)]
        trace: PathBuf,
        /// Ignore samples before this time, seconds.
        #[arg(long, default_value_t = 0.0)]
        skip: f64,
    },
}

fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::Core(Error::Config(_) | Error::Parse(_)) => 1,
        CliError::Core(
            Error::Diverged { .. } | Error::ObserverDiverged { .. } | Error::NonFinite(_),
        ) => 2,
        CliError::SeedMismatch => 2,
        CliError::Core(Error::Io(_) | Error::Csv(_) | Error::Empty(_)) | CliError::Io(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed_check,
        } => cmd_run(&config, out, seed_check),
        Command::Compare {
            config,
            controllers,
            observers,
            match_eso,
            out,
        } => cmd_compare(&config, &controllers, &observers, match_eso, out),
        Command::Metrics { trace, skip } => cmd_metrics(&trace, skip),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn output_dir(cfg: &RunConfig, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| cfg.base_dir.join(&cfg.output.dir))
}

fn cmd_run(config: &Path, out: Option<PathBuf>, seed_check: bool) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let run = runner::run_scenario(&cfg)?;
    let bytes = run.trace_csv()?;
    if seed_check {
        let again = runner::run_scenario(&cfg)?.trace_csv()?;
        if again != bytes {
            return Err(CliError::SeedMismatch);
        }
        println!("seed check: traces identical ({} bytes)", bytes.len());
    }

    let dir = output_dir(&cfg, out);
    fs::create_dir_all(&dir)?;
    let label = cfg.label();
    fs::write(dir.join(format!("{label}.trace.csv")), &bytes)?;
    let rows = [ControllerRow {
        label: label.clone(),
        x: run.summary_x,
        y: run.summary_y,
    }];
    write_error_table_csv(
        &rows,
        fs::File::create(dir.join(format!("{label}.summary.csv")))?,
    )?;

    print!("{}", format_error_table(&rows));
    println!("envelope violations: {}", run.events.len());
    println!("trace written to {}", dir.display());
    Ok(())
}

fn cmd_compare(
    config: &Path,
    controllers: &[ControllerKind],
    observers: &[ObserverKind],
    match_eso: bool,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let base = load_config(config)?;
    let scoring = ObserverScoring::default();
    let mut variants = Vec::new();
    for &kind in controllers {
        let mut cfg = base.clone();
        cfg.controller.kind = kind;
        if kind != ControllerKind::Ppc {
            cfg.observer.kind = ObserverKind::None;
        }
        variants.push(Variant {
            name: kind.as_str().to_string(),
            config: cfg,
            score_observer: false,
        });
    }
    for &kind in observers {
        let mut cfg = base.clone();
        cfg.controller.kind = ControllerKind::Ppc;
        cfg.observer.kind = kind;
        variants.push(Variant {
            name: format!("ppc+{}", kind.as_str()),
            config: cfg,
            score_observer: true,
        });
    }

    if match_eso && observers.contains(&ObserverKind::Eso) {
        let mut reference = base.clone();
        reference.controller.kind = ControllerKind::Ppc;
        reference.observer.kind = ObserverKind::Asmdob;
        let run = runner::run_scenario(&reference)?;
        let asmdob = ObserverSummary::from_series("asmdob", &run.series, &scoring)?;
        let (w, _) = match_eso_bandwidth(
            &reference,
            position_channel_rms(&asmdob),
            (1.0, 0.5 / reference.sim.dt),
            &scoring,
        )?;
        println!("matched ESO bandwidth: {w:.3} rad/s");
        for v in variants
            .iter_mut()
            .filter(|v| v.config.observer.kind == ObserverKind::Eso)
        {
            v.config.observer.eso = atcr_core::EsoGains::uniform(w);
        }
    }

    let cmp = compare(&variants, &scoring)?;
    print!("{}", format_error_table(&cmp.controllers));
    if !cmp.observers.is_empty() {
        println!();
        print!("{}", format_observer_table(&cmp.observers));
    }

    let dir = output_dir(&base, out);
    fs::create_dir_all(&dir)?;
    write_error_table_csv(
        &cmp.controllers,
        fs::File::create(dir.join("compare.errors.csv"))?,
    )?;
    if !cmp.observers.is_empty() {
        write_observer_table_csv(
            &cmp.observers,
            fs::File::create(dir.join("compare.observers.csv"))?,
        )?;
    }
    for run in &cmp.runs {
        fs::write(
            dir.join(format!("{}.trace.csv", run.label)),
            run.trace_csv()?,
        )?;
    }
    println!("results written to {}", dir.display());
    Ok(())
}

fn cmd_metrics(trace: &Path, skip: f64) -> Result<(), CliError> {
    let rows = runner::read_trace_file(trace)?;
    let (x, y) = runner::summarize_trace(&rows, skip)?;
    let label = trace
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trace")
        .trim_end_matches(".trace")
        .to_string();
    print!("{}", format_error_table(&[ControllerRow { label, x, y }]));
    let violations = rows.iter().filter(|r| r.violation_flag != 0).count();
    println!("rows: {}  flagged: {}", rows.len(), violations);
    Ok(())
}
