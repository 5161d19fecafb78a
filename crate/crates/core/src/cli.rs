//! Command-line front-end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analysis::compute_moments;
use crate::config::MapConfig;
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::grid::{coverage, require_coverage, sample_field, GridSpec, WignerField, COVERAGE_THRESHOLD};
use crate::render::{
    read_wav, render_sweep, stft_sonogram, synth, write_wav, SweepTrajectory, DEFAULT_FRAME, DEFAULT_SAMPLE_RATE,
};
use crate::score::{bank_to_events, partial_gains, write_score};
use crate::sonify::{method1_grid, method2_extremes, method3_sections, method4_moments, Method, PartialBank};
use crate::wigner::{PhasePoint, StateSpec};

#[derive(Debug, Parser)]
#[command(name = "wigson", version, about = "Wigner functions of optical states, sampled, analysed and sonified")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Wigner value of a state at one phase-space point.
    Eval {
        #[arg(long)]
        state: String,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
    },
    /// Sample a state on a grid, write the field CSV and report coverage.
    Field {
        #[command(flatten)]
        source: StateArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Moments of a field CSV as JSON.
    Moments {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render one sonification method to WAV, optionally with a score.
    Sonify {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        score: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE)]
        sample_rate: u32,
    },
    /// Render a δα sweep to WAV.
    Sweep {
        /// Legs `<start>><end>:<seconds>` separated by commas; defaults to
        /// fock>-1:91,-1>-2:91,-2>-3:91.
        #[arg(long, allow_hyphen_values = true)]
        trajectory: Option<String>,
        #[arg(long, default_value_t = DEFAULT_FRAME)]
        frame: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE)]
        sample_rate: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// STFT magnitude matrix of a WAV file as CSV.
    Sonogram {
        #[arg(long)]
        wav: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export quarter-tone score events as JSON.
    Score {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// fock:<m> | cat:<re[,im]>[@<re[,im]>] | coherent:<re[,im]> | psi:<csv>
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
    /// regular:<n>:<min>:<max> | gauss:<n>:<span_sigmas>; defaults to 64×64 over ±6.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long)]
    pub method: Method,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "field", required_unless_present = "field")]
    pub state: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "state")]
    pub grid: Option<String>,
    /// Field CSV written by `field`.
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 1)]
    pub channels: usize,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Spread method I onsets by p index.
    #[arg(long)]
    pub arpeggiate: bool,
}

fn sample(state: &str, grid: Option<&str>) -> Result<WignerField> {
    let state = StateSpec::parse(state)?;
    let grid = match grid {
        Some(g) => GridSpec::parse(g, &state)?,
        None => GridSpec::default_for(&state)?,
    };
    sample_field(&state, &grid)
}

fn load_config(path: Option<&PathBuf>) -> Result<MapConfig> {
    match path {
        Some(p) => MapConfig::read(p),
        None => Ok(MapConfig::default()),
    }
}

/// Field, config and bank for `sonify`/`score`, after the coverage gate.
fn prepare(map: &MapArgs) -> Result<(WignerField, MapConfig, PartialBank)> {
    let cfg = load_config(map.config.as_ref())?;
    if !matches!(map.channels, 1 | 2 | 4) {
        return Err(Error::Config(format!("--channels must be 1, 2 or 4, got {}", map.channels)));
    }
    let field = match (&map.field, &map.state) {
        (Some(path), _) => WignerField::read_csv(path)?,
        (None, Some(state)) => sample(state, map.grid.as_deref())?,
        (None, None) => return Err(Error::Config("need --state or --field".into())),
    };
    require_coverage(&field)?;
    let bank = match map.method {
        Method::I => method1_grid(&field, &cfg, map.duration)?,
        Method::II => method2_extremes(&field, &cfg, map.duration)?,
        Method::III => method3_sections(&field, &cfg, map.duration)?,
        Method::IV => method4_moments(&compute_moments(&field)?, &cfg, map.duration)?,
    };
    Ok((field, cfg, bank))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval { state, r, p } => {
            let v = StateSpec::parse(&state)?.evaluate(PhasePoint::new(r, p))?;
            println!("{}", sig17(v));
        }
        Command::Field { source, out } => {
            let field = sample(&source.state, source.grid.as_deref())?;
            field.write_csv(&out)?;
            let c = coverage(&field)?;
            println!("coverage {}", sig17(c));
            if c < COVERAGE_THRESHOLD {
                return Err(Error::CoverageTooLow {
                    coverage: c,
                    required: COVERAGE_THRESHOLD,
                });
            }
        }
        Command::Moments { field, out } => {
            let json = compute_moments(&WignerField::read_csv(&field)?)?.to_json();
            match out {
                Some(path) => std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?,
                None => println!("{json}"),
            }
        }
        Command::Sonify {
            map,
            out,
            score,
            sample_rate,
        } => {
            let (field, cfg, bank) = prepare(&map)?;
            let gains = partial_gains(&bank, &field, map.channels)?;
            let audio = synth(&bank, sample_rate, &gains)?;
            let events = match score {
                Some(_) => Some(bank_to_events(&bank, &field, &cfg, map.channels, map.arpeggiate)?),
                None => None,
            };
            write_wav(&audio, &out)?;
            if let (Some(path), Some(events)) = (score, events) {
                write_score(&events, &path)?;
            }
        }
        Command::Sweep {
            trajectory,
            frame,
            config,
            sample_rate,
            out,
        } => {
            let cfg = load_config(config.as_ref())?;
            let traj = match trajectory {
                Some(t) => SweepTrajectory::parse(&t)?,
                None => SweepTrajectory::default_path(),
            };
            let render = render_sweep(&traj, &cfg, frame, sample_rate)?;
            write_wav(&render.audio, &out)?;
        }
        Command::Sonogram { wav, out } => {
            stft_sonogram(&read_wav(&wav)?)?.write_csv(&out)?;
        }
        Command::Score { map, out } => {
            let (field, cfg, bank) = prepare(&map)?;
            let events = bank_to_events(&bank, &field, &cfg, map.channels, map.arpeggiate)?;
            write_score(&events, &out)?;
        }
    }
    Ok(())
}
