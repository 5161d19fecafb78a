//! Quarter-tone score events and their JSON form.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::analysis::compute_moments;
use crate::config::MapConfig;
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::grid::WignerField;
use crate::sonify::{quantize_quarter_tone, quarter_tone_index, spatial_gains, technique_tag, Method, PartialBank, TechniqueTag};
use crate::wigner::PhasePoint;

#[derive(Debug, Clone, PartialEq)]
pub struct PitchEvent {
    pub onset: f64,
    pub duration: f64,
    /// 24-EDO steps from the reference pitch.
    pub pitch_index: i32,
    pub frequency: f64,
    pub dynamic: f64,
    pub technique: TechniqueTag,
    pub gains: Vec<f64>,
}

/// Channel gains for every partial of `bank`: the source cell centre for
/// method I, otherwise the field centroid clamped into the grid. One channel
/// means unit gain.
pub fn partial_gains(bank: &PartialBank, field: &WignerField, channels: usize) -> Result<Vec<Vec<f64>>> {
    if channels == 1 {
        return Ok(vec![vec![1.0]; bank.partials.len()]);
    }
    let bounds = field.grid().bounds();
    let centroid = if bank.method == Method::I {
        None
    } else {
        let m = compute_moments(field)?;
        Some(PhasePoint::new(
            m.r0.clamp(bounds.r_min, bounds.r_max),
            m.p0.clamp(bounds.p_min, bounds.p_max),
        ))
    };
    bank.partials
        .iter()
        .map(|p| {
            let pt = match (centroid, p.source.point) {
                (Some(c), _) => c,
                (None, Some(pt)) => pt,
                (None, None) => return Err(Error::Config("method I partial lacks a source cell".into())),
            };
            spatial_gains(pt, bounds, channels)
        })
        .collect()
}

/// One event per partial. With `arpeggiate`, method I onsets are spread by
/// the source cell's p index across the bank duration.
pub fn bank_to_events(
    bank: &PartialBank,
    field: &WignerField,
    cfg: &MapConfig,
    channels: usize,
    arpeggiate: bool,
) -> Result<Vec<PitchEvent>> {
    let gains = partial_gains(bank, field, channels)?;
    let n_p = field.grid().n_p() as f64;
    Ok(bank
        .partials
        .iter()
        .zip(gains)
        .map(|(p, gains)| {
            let negative = if bank.method == Method::IV {
                bank.negativity_flag
            } else {
                p.source.negative
            };
            let onset = match (arpeggiate, p.source.cell) {
                (true, Some((_, j))) => j as f64 * bank.duration / n_p,
                _ => 0.0,
            };
            PitchEvent {
                onset,
                duration: bank.duration - onset,
                pitch_index: quarter_tone_index(p.freq, cfg.ref_pitch),
                frequency: quantize_quarter_tone(p.freq, cfg.ref_pitch),
                dynamic: p.amp,
                technique: technique_tag(negative, cfg.negative_technique),
                gains,
            }
        })
        .collect())
}

/// Events ordered by onset, then pitch; ties keep their input order.
pub fn sort_events(events: &mut [PitchEvent]) {
    events.sort_by(|a, b| a.onset.total_cmp(&b.onset).then(a.pitch_index.cmp(&b.pitch_index)));
}

pub fn score_json(events: &[PitchEvent]) -> String {
    let mut sorted = events.to_vec();
    sort_events(&mut sorted);
    let mut out = String::from("[");
    for (k, e) in sorted.iter().enumerate() {
        out.push_str(if k == 0 { "\n" } else { ",\n" });
        let gains: Vec<String> = e.gains.iter().map(|g| sig17(*g)).collect();
        write!(
            out,
            "  {{\"onset\": {}, \"duration\": {}, \"pitch_index\": {}, \"frequency\": {}, \"dynamic\": {}, \"technique\": \"{}\", \"gains\": [{}]}}",
            sig17(e.onset),
            sig17(e.duration),
            e.pitch_index,
            sig17(e.frequency),
            sig17(e.dynamic),
            e.technique.as_str(),
            gains.join(", ")
        )
        .unwrap();
    }
    out.push_str("\n]\n");
    out
}

pub fn write_score(events: &[PitchEvent], path: &Path) -> Result<()> {
    if events.is_empty() {
        return Err(Error::Config("score has no events".into()));
    }
    std::fs::write(path, score_json(events)).map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
struct RawEvent {
    onset: f64,
    duration: f64,
    pitch_index: i32,
    frequency: f64,
    dynamic: f64,
    technique: String,
    gains: Vec<f64>,
}

pub fn parse_score(text: &str) -> Result<Vec<PitchEvent>> {
    let raw: Vec<RawEvent> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("score: {e}")))?;
    raw.into_iter()
        .map(|r| {
            Ok(PitchEvent {
                onset: r.onset,
                duration: r.duration,
                pitch_index: r.pitch_index,
                frequency: r.frequency,
                dynamic: r.dynamic,
                technique: TechniqueTag::parse(&r.technique)?,
                gains: r.gains,
            })
        })
        .collect()
}

pub fn read_score(path: &Path) -> Result<Vec<PitchEvent>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_score(&text)
}
