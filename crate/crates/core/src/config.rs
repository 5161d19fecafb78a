//! Mapping configuration, read from a plain `key = value` file.

use std::path::Path;

use crate::analysis::SectionMode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Waveform {
    #[default]
    Sine,
    Triangle,
}

/// Which moment drives the method IV centre frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CenterMode {
    /// `f0 = f0_base + f0_slope · r0`
    #[default]
    Mean,
    /// `f0 = f0_base + f0_slope · σ_r`
    Sigma,
}

/// Method I axis assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridAxes {
    /// r → frequency, p → phase.
    #[default]
    RFrequency,
    /// p → frequency, r → phase.
    PFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeTechnique {
    #[default]
    SulPonticello,
    Ricochet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapConfig {
    /// Lowest frequency any mapping may emit, Hz.
    pub f_lo: f64,
    /// Highest frequency any mapping may emit, Hz.
    pub f_hi: f64,
    /// Method IV centre frequency at zero moment, Hz.
    pub f0_base: f64,
    /// Method IV centre-frequency slope, Hz per unit of r0 (or σ_r).
    pub f0_slope: f64,
    /// Method IV envelope width per unit of σ_r, Hz.
    pub q_slope: f64,
    /// Method IV oscillator count; odd.
    pub n_osc: usize,
    /// Reference for quarter-tone rounding, Hz.
    pub ref_pitch: f64,
    pub center_mode: CenterMode,
    pub grid_axes: GridAxes,
    pub sections: SectionMode,
    /// Waveform for methods II–IV; method I is always sine.
    pub waveform: Waveform,
    pub negative_technique: NegativeTechnique,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            f_lo: 55.0,
            f_hi: 7040.0,
            f0_base: 2000.0,
            f0_slope: 330.0,
            q_slope: 500.0,
            n_osc: 21,
            ref_pitch: 440.0,
            center_mode: CenterMode::Mean,
            grid_axes: GridAxes::RFrequency,
            sections: SectionMode::EqualWidth,
            waveform: Waveform::Sine,
            negative_technique: NegativeTechnique::SulPonticello,
        }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("f_lo", self.f_lo),
            ("f_hi", self.f_hi),
            ("ref_pitch", self.ref_pitch),
            ("q_slope", self.q_slope),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.f0_base.is_finite() && self.f0_slope.is_finite()) {
            return Err(Error::Config("f0_base and f0_slope must be finite".into()));
        }
        if self.f_lo >= self.f_hi {
            return Err(Error::Config(format!("f_lo {} must be below f_hi {}", self.f_lo, self.f_hi)));
        }
        if self.n_osc == 0 || self.n_osc % 2 == 0 {
            return Err(Error::Config(format!("n_osc must be odd, got {}", self.n_osc)));
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = MapConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config(format!("line {}: {key}: {what} `{value}`", n + 1));
            let num = || value.parse::<f64>().map_err(|_| bad("not a number"));
            match key {
                "f_lo" => cfg.f_lo = num()?,
                "f_hi" => cfg.f_hi = num()?,
                "f0_base" => cfg.f0_base = num()?,
                "f0_slope" => cfg.f0_slope = num()?,
                "q_slope" => cfg.q_slope = num()?,
                "ref_pitch" => cfg.ref_pitch = num()?,
                "n_osc" => cfg.n_osc = value.parse().map_err(|_| bad("not a count"))?,
                "center_mode" => {
                    cfg.center_mode = match value {
                        "mean" => CenterMode::Mean,
                        "sigma" => CenterMode::Sigma,
                        _ => return Err(bad("expected mean|sigma, got")),
                    }
                }
                "grid_axes" => {
                    cfg.grid_axes = match value {
                        "r_frequency" => GridAxes::RFrequency,
                        "p_frequency" => GridAxes::PFrequency,
                        _ => return Err(bad("expected r_frequency|p_frequency, got")),
                    }
                }
                "sections" => {
                    cfg.sections = match value {
                        "equal_width" => SectionMode::EqualWidth,
                        "equal_mass" => SectionMode::EqualMass,
                        _ => return Err(bad("expected equal_width|equal_mass, got")),
                    }
                }
                "waveform" => {
                    cfg.waveform = match value {
                        "sine" => Waveform::Sine,
                        "triangle" => Waveform::Triangle,
                        _ => return Err(bad("expected sine|triangle, got")),
                    }
                }
                "negative_technique" => {
                    cfg.negative_technique = match value {
                        "sul_ponticello" => NegativeTechnique::SulPonticello,
                        "ricochet" => NegativeTechnique::Ricochet,
                        _ => return Err(bad("expected sul_ponticello|ricochet, got")),
                    }
                }
                _ => return Err(Error::Config(format!("line {}: unknown key `{key}`", n + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        MapConfig::default().validate().unwrap();
        assert_eq!(MapConfig::parse("").unwrap(), MapConfig::default());
    }

    #[test]
    fn parses_known_keys() {
        let cfg = MapConfig::parse(
            "# sweep settings\nf_lo = 40\nn_osc=11\ncenter_mode = sigma  # track σ_r\nwaveform = triangle\n",
        )
        .unwrap();
        assert_eq!(cfg.f_lo, 40.0);
        assert_eq!(cfg.n_osc, 11);
        assert_eq!(cfg.center_mode, CenterMode::Sigma);
        assert_eq!(cfg.waveform, Waveform::Triangle);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(MapConfig::parse("tempo = 120"), Err(Error::Config(_))));
        assert!(matches!(MapConfig::parse("n_osc = 20"), Err(Error::Config(_))));
        assert!(matches!(MapConfig::parse("f_lo = 9000"), Err(Error::Config(_))));
        assert!(matches!(MapConfig::parse("f_lo"), Err(Error::Config(_))));
        assert!(matches!(MapConfig::parse("waveform = saw"), Err(Error::Config(_))));
    }
}
