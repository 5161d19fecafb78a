use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use super::{accumulate, apply_fades, check_nyquist, check_sample_rate, normalize, AudioBuffer};
use crate::analysis::{compute_moments, MomentSet};
use crate::config::MapConfig;
use crate::error::{Error, Result};
use crate::grid::{sample_field, GridSpec};
use crate::sonify::{method4_center, method4_moments};
use crate::wigner::{StateSpec, CAT_EPSILON};

/// Default sweep frame length, seconds. Frames overlap by half.
pub const DEFAULT_FRAME: f64 = 0.25;
const FRAMES_PER_CHUNK: usize = 64;

/// One end of a sweep leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepPoint {
    /// δα → 0, rendered with the first Fock state.
    Fock,
    Shift(f64),
}

impl SweepPoint {
    fn shift(self) -> f64 {
        match self {
            SweepPoint::Fock => 0.0,
            SweepPoint::Shift(d) => d,
        }
    }
}

impl fmt::Display for SweepPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepPoint::Fock => f.write_str("fock"),
            SweepPoint::Shift(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSegment {
    pub start: SweepPoint,
    pub end: SweepPoint,
    pub duration: f64,
}

/// Piecewise-linear δα(t).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrajectory {
    segments: Vec<SweepSegment>,
}

impl SweepTrajectory {
    pub fn new(segments: Vec<SweepSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Config("sweep needs at least one segment".into()));
        }
        for s in &segments {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::Config(format!("segment duration {} must be positive", s.duration)));
            }
            for p in [s.start, s.end] {
                if let SweepPoint::Shift(d) = p {
                    if !(d.is_finite() && d.abs() > CAT_EPSILON) {
                        return Err(Error::Config(format!(
                            "shift {d} must be finite with |δα| > {CAT_EPSILON}; use `fock` for the Fock endpoint"
                        )));
                    }
                }
            }
        }
        Ok(SweepTrajectory { segments })
    }

    /// Fock → −1 → −2 → −3, three 91 s legs (273 s).
    pub fn default_path() -> Self {
        let leg = |start, end| SweepSegment {
            start,
            end,
            duration: 91.0,
        };
        SweepTrajectory {
            segments: vec![
                leg(SweepPoint::Fock, SweepPoint::Shift(-1.0)),
                leg(SweepPoint::Shift(-1.0), SweepPoint::Shift(-2.0)),
                leg(SweepPoint::Shift(-2.0), SweepPoint::Shift(-3.0)),
            ],
        }
    }

    /// `<start>><end>:<seconds>` legs separated by commas; an endpoint is
    /// `fock` or a real shift, e.g. `fock>-1:91,-1>-3:182`.
    pub fn parse(text: &str) -> Result<Self> {
        let point = |s: &str| -> Result<SweepPoint> {
            let s = s.trim();
            if s == "fock" {
                return Ok(SweepPoint::Fock);
            }
            s.parse()
                .map(SweepPoint::Shift)
                .map_err(|_| Error::Parse(format!("bad sweep endpoint `{s}`")))
        };
        let segments = text
            .split(',')
            .map(|leg| {
                let (ends, secs) = leg
                    .rsplit_once(':')
                    .ok_or_else(|| Error::Parse(format!("sweep leg `{leg}` lacks `:<seconds>`")))?;
                let (a, b) = ends
                    .split_once('>')
                    .ok_or_else(|| Error::Parse(format!("sweep leg `{leg}` lacks `>`")))?;
                let duration = secs
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad duration in `{leg}`")))?;
                Ok(SweepSegment {
                    start: point(a)?,
                    end: point(b)?,
                    duration,
                })
            })
            .collect::<Result<_>>()?;
        Self::new(segments)
    }

    pub fn segments(&self) -> &[SweepSegment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// δα at time `t`, clamped to the trajectory ends.
    pub fn shift_at(&self, t: f64) -> f64 {
        let mut t0 = 0.0;
        for s in &self.segments {
            if t <= t0 + s.duration {
                let u = ((t - t0) / s.duration).clamp(0.0, 1.0);
                return s.start.shift() + u * (s.end.shift() - s.start.shift());
            }
            t0 += s.duration;
        }
        self.segments.last().unwrap().end.shift()
    }

    /// State at time `t`; shifts within the cat threshold use the Fock evaluator.
    pub fn state_at(&self, t: f64) -> Result<StateSpec> {
        let d = self.shift_at(t);
        if d.abs() <= CAT_EPSILON {
            Ok(StateSpec::fock(1))
        } else {
            StateSpec::cat(d)
        }
    }
}

impl fmt::Display for SweepTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.segments.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}>{}:{}", s.start, s.end, s.duration)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFrame {
    /// Frame centre, seconds.
    pub time: f64,
    /// None when the Fock evaluator was used.
    pub shift: Option<f64>,
    pub moments: MomentSet,
    pub f0: f64,
    pub sigma_f: f64,
}

#[derive(Debug, Clone)]
pub struct SweepRender {
    pub audio: AudioBuffer,
    pub frames: Vec<SweepFrame>,
}

/// Renders the trajectory as a mono method IV texture. Frames of length
/// `frame` are centred every `frame / 2`; each is windowed by a squared
/// cosine so that overlapping windows sum to one.
pub fn render_sweep(traj: &SweepTrajectory, cfg: &MapConfig, frame: f64, sr: u32) -> Result<SweepRender> {
    check_sample_rate(sr)?;
    cfg.validate()?;
    if !(frame > 0.0 && frame.is_finite()) {
        return Err(Error::Config(format!("frame length {frame} must be positive")));
    }
    let total = traj.total_duration();
    let len = (total * sr as f64).round() as usize;
    let hop = frame / 2.0;
    let n_frames = (total / hop).ceil() as usize + 1;
    let hop_samples = hop * sr as f64;

    let mut out = vec![0.0; len];
    let mut frames = Vec::with_capacity(n_frames);
    let indices: Vec<usize> = (0..n_frames).collect();
    for chunk in indices.chunks(FRAMES_PER_CHUNK) {
        let rendered = chunk
            .par_iter()
            .map(|&k| {
                let time = k as f64 * hop;
                let state = traj.state_at(time)?;
                let shift = match state {
                    StateSpec::Fock { .. } => None,
                    _ => Some(traj.shift_at(time)),
                };
                let field = sample_field(&state, &GridSpec::default_for(&state)?)?;
                let moments = compute_moments(&field)?;
                let (f0, sigma_f) = method4_center(&moments, cfg);
                let bank = method4_moments(&moments, cfg, frame)?;
                check_nyquist(&bank, sr)?;

                let centre = k as f64 * hop_samples;
                let start = (centre - hop_samples).ceil().max(0.0) as usize;
                let stop = ((centre + hop_samples).floor() as usize + 1).min(len);
                let mut block = vec![vec![0.0; stop.saturating_sub(start)]];
                accumulate(&bank, sr, &vec![vec![1.0]; bank.partials.len()], start, &mut block, sr as f64 / 2.0);
                for (n, s) in block[0].iter_mut().enumerate() {
                    let x = ((start + n) as f64 - centre) / hop_samples;
                    *s *= if x.abs() < 1.0 { (0.5 * PI * x).cos().powi(2) } else { 0.0 };
                }
                let info = SweepFrame {
                    time,
                    shift,
                    moments,
                    f0,
                    sigma_f,
                };
                Ok((start, block.pop().unwrap(), info))
            })
            .collect::<Result<Vec<_>>>()?;
        for (start, block, info) in rendered {
            for (s, b) in out[start..].iter_mut().zip(&block) {
                *s += b;
            }
            frames.push(info);
        }
    }
    let mut out = vec![out];
    apply_fades(&mut out, sr);
    Ok(SweepRender {
        audio: normalize(out, sr)?,
        frames,
    })
}
