//! Deterministic mappings from fields and moments to sound events.
//!
//! Every method emits a [`PartialBank`]: a set of partials plus a duration.
//! Quarter-tone rounding, technique tags and channel gains live here as well
//! since the score exporter and the renderer both need them.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::analysis::{extremes, segment, MomentSet};
use crate::config::{CenterMode, GridAxes, MapConfig, NegativeTechnique, Waveform};
use crate::error::{Error, Result};
use crate::grid::{FieldBounds, WignerField};
use crate::wigner::PhasePoint;

/// Method I keeps at most this many partials.
pub const MAX_GRID_PARTIALS: usize = 900;

/// Magnitude bound of every closed-form Wigner function in scope; method II
/// maps `[-VALUE_BOUND, VALUE_BOUND]` onto the frequency range.
pub const VALUE_BOUND: f64 = 2.0 / PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    I,
    II,
    III,
    IV,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "1" => Ok(Method::I),
            "II" | "2" => Ok(Method::II),
            "III" | "3" => Ok(Method::III),
            "IV" | "4" => Ok(Method::IV),
            _ => Err(Error::Parse(format!("unknown method `{s}`, expected I|II|III|IV"))),
        }
    }
}

/// Where a partial came from in the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub point: Option<PhasePoint>,
    /// `(r index, p index)` of the source cell, method I only.
    pub cell: Option<(usize, usize)>,
    pub negative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partial {
    pub freq: f64,
    pub amp: f64,
    pub phase: f64,
    pub waveform: Waveform,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialBank {
    pub partials: Vec<Partial>,
    pub duration: f64,
    pub method: Method,
    pub negativity_flag: bool,
}

fn check_duration(duration: f64) -> Result<()> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Config(format!("duration must be positive, got {duration}")));
    }
    Ok(())
}

fn wrap_phase(phase: f64) -> f64 {
    let w = phase.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Method I: one sine per cell. The frequency axis coordinate is mapped
/// exponentially onto `[f_lo, f_hi]` (first to last cell centre), the phase
/// axis linearly onto `[0, 2π)` across the grid extent, `|value|` to amplitude,
/// and negative cells are shifted by π. Only the 900 largest `|value|` cells
/// survive; ties go to the lower `(r, p)`.
pub fn method1_grid(field: &WignerField, cfg: &MapConfig, duration: f64) -> Result<PartialBank> {
    check_duration(duration)?;
    let grid = field.grid();
    if grid.cell_count() == 0 {
        return Err(Error::EmptyField);
    }
    let (freq_centers, phase_edges) = match cfg.grid_axes {
        GridAxes::RFrequency => (grid.r_centers(), grid.p_edges()),
        GridAxes::PFrequency => (grid.p_centers(), grid.r_edges()),
    };
    let (c_lo, c_hi) = (freq_centers[0], freq_centers[freq_centers.len() - 1]);
    let (e_lo, e_hi) = (phase_edges[0], phase_edges[phase_edges.len() - 1]);
    let peak = field.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut order: Vec<usize> = (0..field.values().len()).collect();
    if order.len() > MAX_GRID_PARTIALS {
        let values = field.values();
        // row-major index order is (r, p) lexicographic order
        order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
        order.truncate(MAX_GRID_PARTIALS);
        order.sort_unstable();
    }

    let n_p = grid.n_p();
    let partials = order
        .into_iter()
        .map(|k| {
            let (i, j) = (k / n_p, k % n_p);
            let pt = grid.center(i, j);
            let value = field.values()[k];
            let (fc, pc) = match cfg.grid_axes {
                GridAxes::RFrequency => (pt.r, pt.p),
                GridAxes::PFrequency => (pt.p, pt.r),
            };
            let t = if c_hi > c_lo {
                ((fc - c_lo) / (c_hi - c_lo)).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let freq = (cfg.f_lo * (cfg.f_hi / cfg.f_lo).powf(t)).clamp(cfg.f_lo, cfg.f_hi);
            let mut phase = TAU * (pc - e_lo) / (e_hi - e_lo);
            if value < 0.0 {
                phase += PI;
            }
            Partial {
                freq,
                amp: if peak > 0.0 { value.abs() / peak } else { 0.0 },
                phase: wrap_phase(phase),
                waveform: Waveform::Sine,
                source: Source {
                    point: Some(pt),
                    cell: Some((i, j)),
                    negative: value < 0.0,
                },
            }
        })
        .collect();
    Ok(PartialBank {
        partials,
        duration,
        method: Method::I,
        negativity_flag: field.values().iter().any(|&v| v < 0.0),
    })
}

/// Affine map of a Wigner value from `[-2/π, 2/π]` onto `[f_lo, f_hi]`.
pub fn value_to_frequency(value: f64, cfg: &MapConfig) -> f64 {
    let t = ((value + VALUE_BOUND) / (2.0 * VALUE_BOUND)).clamp(0.0, 1.0);
    (cfg.f_lo + t * (cfg.f_hi - cfg.f_lo)).clamp(cfg.f_lo, cfg.f_hi)
}

/// Method II: two partials at the images of the field's minimum and maximum.
pub fn method2_extremes(field: &WignerField, cfg: &MapConfig, duration: f64) -> Result<PartialBank> {
    check_duration(duration)?;
    let ext = extremes(field)?;
    if !(ext.max_value > ext.min_value) {
        return Err(Error::DegenerateRange(ext.min_value));
    }
    let loudest = ext.min_value.abs().max(ext.max_value.abs());
    let partial = |value: f64, pt: PhasePoint| Partial {
        freq: value_to_frequency(value, cfg),
        amp: value.abs() / loudest,
        phase: 0.0,
        waveform: cfg.waveform,
        source: Source {
            point: Some(pt),
            cell: None,
            negative: value < 0.0,
        },
    };
    Ok(PartialBank {
        partials: vec![
            partial(ext.min_value, ext.min_point),
            partial(ext.max_value, ext.max_point),
        ],
        duration,
        method: Method::II,
        negativity_flag: ext.min_value < 0.0,
    })
}

/// Method III: four partials, log-spaced over the range, one per value section
/// (lowest values lowest), amplitude = section absolute mass over the largest.
pub fn method3_sections(field: &WignerField, cfg: &MapConfig, duration: f64) -> Result<PartialBank> {
    check_duration(duration)?;
    let seg = segment(field, cfg.sections)?;
    let loudest = seg.abs_mass.iter().cloned().fold(0.0, f64::max);
    let partials = (0..4)
        .map(|k| Partial {
            freq: (cfg.f_lo * (cfg.f_hi / cfg.f_lo).powf(k as f64 / 3.0)).clamp(cfg.f_lo, cfg.f_hi),
            amp: if loudest > 0.0 { seg.abs_mass[k] / loudest } else { 0.0 },
            phase: 0.0,
            waveform: cfg.waveform,
            source: Source {
                point: None,
                cell: None,
                negative: seg.signed_mass[k] < 0.0,
            },
        })
        .collect();
    Ok(PartialBank {
        partials,
        duration,
        method: Method::III,
        negativity_flag: field.values().iter().any(|&v| v < 0.0),
    })
}

/// Centre frequency and envelope width (Hz) used by method IV.
pub fn method4_center(m: &MomentSet, cfg: &MapConfig) -> (f64, f64) {
    let driver = match cfg.center_mode {
        CenterMode::Mean => m.r0,
        CenterMode::Sigma => m.sigma_r,
    };
    (cfg.f0_base + cfg.f0_slope * driver, cfg.q_slope * m.sigma_r)
}

/// Method IV: `n_osc` equally spaced sines under a Gaussian envelope centred
/// at `f0` with width `σ_f = q_slope · σ_r`, spanning `±3σ_f`.
pub fn method4_moments(m: &MomentSet, cfg: &MapConfig, duration: f64) -> Result<PartialBank> {
    check_duration(duration)?;
    if !(m.sigma_r > 0.0) {
        return Err(Error::DegenerateMoments(format!("σ_r = {}", m.sigma_r)));
    }
    let (f0, sigma_f) = method4_center(m, cfg);
    let n = cfg.n_osc;
    let step = if n > 1 { 6.0 * sigma_f / (n - 1) as f64 } else { 0.0 };
    let mid = (n as f64 - 1.0) / 2.0;
    let partials = (0..n)
        .map(|k| {
            let offset = (k as f64 - mid) * step;
            let freq = f0 + offset;
            if !(freq >= cfg.f_lo && freq <= cfg.f_hi) {
                return Err(Error::FrequencyOutOfRange {
                    freq,
                    lo: cfg.f_lo,
                    hi: cfg.f_hi,
                });
            }
            Ok(Partial {
                freq,
                amp: (-offset * offset / (2.0 * sigma_f * sigma_f)).exp(),
                phase: 0.0,
                waveform: cfg.waveform,
                source: Source {
                    point: None,
                    cell: None,
                    negative: m.negativity > 0.0,
                },
            })
        })
        .collect::<Result<_>>()?;
    Ok(PartialBank {
        partials,
        duration,
        method: Method::IV,
        negativity_flag: m.negativity > 0.0,
    })
}

/// Nearest 24-EDO step of `freq` relative to `ref_pitch`; exact half steps round up.
pub fn quarter_tone_index(freq: f64, ref_pitch: f64) -> i32 {
    (24.0 * (freq / ref_pitch).log2() + 0.5).floor() as i32
}

pub fn quarter_tone_frequency(index: i32, ref_pitch: f64) -> f64 {
    ref_pitch * 2f64.powf(index as f64 / 24.0)
}

/// Rounds to the nearest quarter division of the equal-tempered semitone.
pub fn quantize_quarter_tone(freq: f64, ref_pitch: f64) -> f64 {
    quarter_tone_frequency(quarter_tone_index(freq, ref_pitch), ref_pitch)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TechniqueTag {
    Ordinario,
    SulPonticello,
    Ricochet,
}

impl TechniqueTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TechniqueTag::Ordinario => "ordinario",
            TechniqueTag::SulPonticello => "sul_ponticello",
            TechniqueTag::Ricochet => "ricochet",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ordinario" => Ok(TechniqueTag::Ordinario),
            "sul_ponticello" => Ok(TechniqueTag::SulPonticello),
            "ricochet" => Ok(TechniqueTag::Ricochet),
            _ => Err(Error::Parse(format!("unknown technique `{s}`"))),
        }
    }
}

/// Playing technique marking negative Wigner values.
pub fn technique_tag(negative: bool, choice: NegativeTechnique) -> TechniqueTag {
    match (negative, choice) {
        (false, _) => TechniqueTag::Ordinario,
        (true, NegativeTechnique::SulPonticello) => TechniqueTag::SulPonticello,
        (true, NegativeTechnique::Ricochet) => TechniqueTag::Ricochet,
    }
}

/// Energy-preserving channel gains for a phase-space point: equal-power pan
/// on `r` for stereo; square roots of bilinear weights for quad, with channel
/// order (r_min,p_min), (r_max,p_min), (r_min,p_max), (r_max,p_max).
pub fn spatial_gains(pt: PhasePoint, bounds: FieldBounds, n_channels: usize) -> Result<Vec<f64>> {
    let slack = 1e-12 * (bounds.r_max - bounds.r_min).abs().max(bounds.p_max - bounds.p_min);
    let inside = pt.r >= bounds.r_min - slack
        && pt.r <= bounds.r_max + slack
        && pt.p >= bounds.p_min - slack
        && pt.p <= bounds.p_max + slack;
    if !inside || !(pt.r.is_finite() && pt.p.is_finite()) {
        return Err(Error::OutOfBounds { r: pt.r, p: pt.p });
    }
    let u = ((pt.r - bounds.r_min) / (bounds.r_max - bounds.r_min)).clamp(0.0, 1.0);
    let v = ((pt.p - bounds.p_min) / (bounds.p_max - bounds.p_min)).clamp(0.0, 1.0);
    match n_channels {
        2 => {
            let theta = u * FRAC_PI_2;
            Ok(vec![theta.cos(), theta.sin()])
        }
        4 => Ok([
            (1.0 - u) * (1.0 - v),
            u * (1.0 - v),
            (1.0 - u) * v,
            u * v,
        ]
        .iter()
        .map(|w| w.sqrt())
        .collect()),
        n => Err(Error::UnsupportedChannels(n)),
    }
}
