use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use hopscotch::config::Config;
use hopscotch::engine::service::{self, ServeConfig};
use hopscotch::engine::SessionLog;
use hopscotch::firmware::JumpScript;
use hopscotch::soundscape::{self, RenderConfig, SampleBank};
use hopscotch::{fsutil, metrics, pipeline, sieve, Error};

#[derive(Parser)]
#[command(
    name = "hopscotch",
    version,
    about = "Interactive hopscotch mat: sensors in, soundscape out"
)]
struct Cli {
    /// JSON config file; HOPSCOTCH_UDP_PORT / HOPSCOTCH_WS_PORT override its ports.
    #[arg(long, global = true, value_name = "F")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Listen for OSC and UI clients until interrupted.
    Serve(ServeArgs),
    /// Run a jump script through the controller model and engine.
    Sim {
        #[arg(long, value_name = "F")]
        script: PathBuf,
        #[arg(long, value_name = "L")]
        out: PathBuf,
    },
    /// Mix a session log to a 16-bit mono WAV.
    Render {
        #[arg(long, value_name = "L")]
        session: PathBuf,
        #[arg(long, value_name = "W")]
        out: PathBuf,
        /// Also write pad_N.wav stems beside the mix.
        #[arg(long)]
        stems: bool,
        /// Sample bank manifest; defaults to the config's, else tones only.
        #[arg(long, value_name = "M")]
        bank: Option<PathBuf>,
        #[arg(long, default_value_t = soundscape::DEFAULT_SAMPLE_RATE)]
        sample_rate: u32,
    },
    /// Score a session log.
    Metrics {
        #[arg(long, value_name = "L")]
        session: PathBuf,
        /// Also write the JSON report here.
        #[arg(long, value_name = "F")]
        out: Option<PathBuf>,
    },
    /// Evaluate a sieve expression.
    Sieve {
        #[arg(long, value_name = "E")]
        expr: String,
        /// Inclusive range; defaults to one period.
        #[arg(long, value_name = "LO..HI", value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<(i64, i64)>,
    },
}

#[derive(Args)]
struct ServeArgs {
    /// Session log written on shutdown.
    #[arg(long, value_name = "L", default_value = "session.jsonl")]
    session: PathBuf,
    /// SLIP-framed OSC stream, e.g. /dev/ttyUSB0.
    #[arg(long, value_name = "PATH")]
    serial: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo = lo.trim().parse().map_err(|e| format!("LO: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("HI: {e}"))?;
    Ok((lo, hi))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Error> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.apply_env(|k| std::env::var(k).ok())?;
    cfg.validate()?;
    Ok(cfg)
}

fn read_text(path: &Path, module: &'static str) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        module,
        context: format!("reading {}", path.display()),
        source,
    })
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Serve(args) => serve(&cfg, args),
        Command::Sim { script, out } => {
            let script = JumpScript::from_json(&read_text(&script, "firmware")?).map_err(Error::from)?;
            let log = pipeline::simulate_session(&script, &cfg.debounce, &cfg.engine_config().map_err(Error::from)?)
                .map_err(Error::from)?;
            log.write_to(&out).map_err(Error::from)?;
            println!("{} sound commands -> {}", log.commands().len(), out.display());
            Ok(())
        }
        Command::Render {
            session,
            out,
            stems,
            bank,
            sample_rate,
        } => {
            let log = SessionLog::read_from(&session).map_err(Error::from)?;
            let bank = match bank.or(cfg.bank_manifest) {
                Some(manifest) => {
                    let engine = log.header().engine_config().map_err(Error::from)?;
                    SampleBank::load(&manifest, &engine.sieve, engine.base_midi, sample_rate)
                        .map_err(Error::from)?
                        .0
                }
                None => soundscape::bank_for_log(&log),
            };
            let output = soundscape::render(&log, &bank, &RenderConfig { sample_rate, stems });
            let written = output.write(&out).map_err(|source| Error::Io {
                module: "soundscape",
                context: format!("writing {}", out.display()),
                source,
            })?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Metrics { session, out } => {
            let log = SessionLog::read_from(&session).map_err(Error::from)?;
            let report = metrics::compute(&log);
            let json = report.to_json();
            if let Some(path) = out {
                fsutil::write_atomic(&path, format!("{json}\n").as_bytes()).map_err(|source| Error::Io {
                    module: "metrics",
                    context: format!("writing {}", path.display()),
                    source,
                })?;
            }
            println!("{json}");
            println!();
            print!("{}", report.to_table());
            Ok(())
        }
        Command::Sieve { expr, range } => {
            let s = sieve::parse_sieve(&expr).map_err(Error::from)?;
            let period = s.period().map_err(Error::from)?;
            let points = match range {
                Some((lo, hi)) => s.generate(lo, hi),
                None => s.scale(),
            }
            .map_err(Error::from)?;
            let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
            println!("points: {}", join(&mut points.points.iter().map(i64::to_string)));
            match points.intervals() {
                Ok(iv) => println!("intervals: {}", join(&mut iv.iter().map(u64::to_string))),
                Err(_) => println!("intervals:"),
            }
            println!("period: {period}");
            Ok(())
        }
    }
}

fn serve(cfg: &Config, args: ServeArgs) -> Result<()> {
    let serve_cfg = ServeConfig {
        udp_addr: cfg.udp_addr(),
        ui_addr: cfg.ui_addr(),
        serial_path: args.serial.or_else(|| cfg.serial_path.clone()),
        session_path: Some(args.session),
        engine: cfg.engine_config().map_err(Error::from)?,
    };
    let svc = service::serve(serve_cfg).map_err(Error::from)?;
    // tests and scripts read the bound addresses from stdout
    println!("osc udp {}", svc.udp_addr());
    println!("ui tcp {}", svc.ui_addr());

    let (tx, rx) = mpsc::channel();
    ctrlc::set_handler(move || {
        let _ = tx.send(());
    })
    .map_err(|e| anyhow!("cli: installing signal handler: {e}"))?;
    let _ = rx.recv();
    info!("shutting down");
    let log = svc.stop().map_err(Error::from)?;
    println!("{} sound commands logged", log.commands().len());
    Ok(())
}
