//! Additive synthesis, δα sweeps, sonograms and WAV I/O.

mod sonogram;
mod sweep;
mod wav;

use std::f64::consts::{PI, TAU};

pub use sonogram::{stft_sonogram, Sonogram, FLOOR_DB, HOP, WINDOW};
pub use sweep::{render_sweep, DEFAULT_FRAME, SweepFrame, SweepPoint, SweepRender, SweepSegment, SweepTrajectory};
pub use wav::{read_wav, write_wav};

use crate::config::Waveform;
use crate::error::{Error, Result};
use crate::sonify::PartialBank;

pub const DEFAULT_SAMPLE_RATE: u32 = 48_000;
/// Master peak after normalization: -1 dBFS.
pub const PEAK_TARGET: f64 = 0.891_250_938_133_745_5;
pub const FADE_SECONDS: f64 = 0.010;
const MIN_SAMPLE_RATE: u32 = 8_000;

/// Per-channel sample sequences of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    sample_rate: u32,
    channels: Vec<Vec<f32>>,
}

impl AudioBuffer {
    pub fn new(sample_rate: u32, channels: Vec<Vec<f32>>) -> Result<Self> {
        if !matches!(channels.len(), 1 | 2 | 4) {
            return Err(Error::UnsupportedChannels(channels.len()));
        }
        if channels.iter().any(|c| c.len() != channels[0].len()) {
            return Err(Error::UnsupportedFormat("channels differ in length".into()));
        }
        if sample_rate == 0 {
            return Err(Error::UnsupportedFormat("zero sample rate".into()));
        }
        Ok(AudioBuffer {
            sample_rate,
            channels,
        })
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channels(&self) -> &[Vec<f32>] {
        &self.channels
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn peak(&self) -> f32 {
        self.channels
            .iter()
            .flatten()
            .fold(0.0f32, |m, s| m.max(s.abs()))
    }

    /// Channel average.
    pub fn to_mono(&self) -> Vec<f64> {
        let n = self.channels.len() as f64;
        (0..self.len())
            .map(|k| self.channels.iter().map(|c| c[k] as f64).sum::<f64>() / n)
            .collect()
    }
}

fn check_sample_rate(sr: u32) -> Result<()> {
    if sr < MIN_SAMPLE_RATE {
        return Err(Error::Config(format!("sample rate {sr} is below {MIN_SAMPLE_RATE}")));
    }
    Ok(())
}

fn check_nyquist(bank: &PartialBank, sr: u32) -> Result<()> {
    let nyquist = sr as f64 / 2.0;
    match bank.partials.iter().find(|p| p.freq >= nyquist) {
        Some(p) => Err(Error::NyquistViolation {
            freq: p.freq,
            sample_rate: sr,
        }),
        None => Ok(()),
    }
}

/// Adds `bank` into `out` (one slice per channel) for samples starting at the
/// absolute index `start`. Triangle partials keep only odd harmonics below
/// `band_limit` Hz. Partials are summed in bank order.
pub(crate) fn accumulate(
    bank: &PartialBank,
    sr: u32,
    gains: &[Vec<f64>],
    start: usize,
    out: &mut [Vec<f64>],
    band_limit: f64,
) {
    let len = out[0].len();
    let mut wave = vec![0.0; len];
    for (partial, gain) in bank.partials.iter().zip(gains) {
        if partial.amp == 0.0 {
            continue;
        }
        let omega = TAU * partial.freq / sr as f64;
        match partial.waveform {
            Waveform::Sine => {
                for (n, w) in wave.iter_mut().enumerate() {
                    *w = partial.amp * (omega * (start + n) as f64 + partial.phase).sin();
                }
            }
            Waveform::Triangle => {
                wave.iter_mut().for_each(|w| *w = 0.0);
                let mut k = 1usize;
                while k as f64 * partial.freq < band_limit {
                    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    let coeff = partial.amp * 8.0 / (PI * PI) * sign / (k * k) as f64;
                    for (n, w) in wave.iter_mut().enumerate() {
                        let arg = omega * (start + n) as f64 + partial.phase;
                        *w += coeff * (k as f64 * arg).sin();
                    }
                    k += 2;
                }
            }
        }
        for (channel, g) in out.iter_mut().zip(gain) {
            if *g == 0.0 {
                continue;
            }
            for (s, w) in channel.iter_mut().zip(&wave) {
                *s += g * w;
            }
        }
    }
}

pub(crate) fn apply_fades(out: &mut [Vec<f64>], sr: u32) {
    let len = out[0].len();
    let fade = ((FADE_SECONDS * sr as f64).round() as usize).min(len / 2);
    if fade == 0 {
        return;
    }
    for n in 0..fade {
        let g = 0.5 * (1.0 - (PI * n as f64 / fade as f64).cos());
        for channel in out.iter_mut() {
            channel[n] *= g;
            channel[len - 1 - n] *= g;
        }
    }
}

/// Scales to the -1 dBFS master peak (silence stays silent) and converts to f32.
pub(crate) fn normalize(out: Vec<Vec<f64>>, sr: u32) -> Result<AudioBuffer> {
    let peak = out.iter().flatten().fold(0.0f64, |m, s| m.max(s.abs()));
    let scale = if peak > 0.0 { PEAK_TARGET / peak } else { 0.0 };
    let channels = out
        .into_iter()
        .map(|c| c.into_iter().map(|s| (s * scale) as f32).collect())
        .collect();
    AudioBuffer::new(sr, channels)
}

/// Renders a bank with per-partial channel gains (all gain vectors share one
/// length, the channel count). 10 ms raised-cosine fades, -1 dBFS peak.
pub fn synth(bank: &PartialBank, sr: u32, gains: &[Vec<f64>]) -> Result<AudioBuffer> {
    synth_band_limited(bank, sr, gains, sr as f64 / 2.0)
}

/// Mono rendering with unit gain on every partial.
pub fn synth_mono(bank: &PartialBank, sr: u32) -> Result<AudioBuffer> {
    synth(bank, sr, &vec![vec![1.0]; bank.partials.len()])
}

/// [`synth`] with an explicit triangle band limit; used to inspect the
/// band-limited waveform on an oversampled grid.
pub fn synth_band_limited(bank: &PartialBank, sr: u32, gains: &[Vec<f64>], band_limit: f64) -> Result<AudioBuffer> {
    check_sample_rate(sr)?;
    check_nyquist(bank, sr)?;
    if gains.len() != bank.partials.len() {
        return Err(Error::Config(format!(
            "{} gain vectors for {} partials",
            gains.len(),
            bank.partials.len()
        )));
    }
    let n_channels = gains.first().map_or(1, Vec::len);
    if gains.iter().any(|g| g.len() != n_channels) {
        return Err(Error::Config("gain vectors differ in length".into()));
    }
    if !matches!(n_channels, 1 | 2 | 4) {
        return Err(Error::UnsupportedChannels(n_channels));
    }
    let len = (bank.duration * sr as f64).round() as usize;
    let mut out = vec![vec![0.0; len]; n_channels];
    accumulate(bank, sr, gains, 0, &mut out, band_limit);
    apply_fades(&mut out, sr);
    normalize(out, sr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sonify::{Method, Partial, Source};
    use rustfft::{num_complex::Complex, FftPlanner};

    fn partial(freq: f64, amp: f64, phase: f64, waveform: Waveform) -> Partial {
        Partial {
            freq,
            amp,
            phase,
            waveform,
            source: Source {
                point: None,
                cell: None,
                negative: false,
            },
        }
    }

    fn bank(partials: Vec<Partial>, duration: f64) -> PartialBank {
        PartialBank {
            partials,
            duration,
            method: Method::I,
            negativity_flag: false,
        }
    }

    fn spectrum(x: &[f64]) -> Vec<f64> {
        let mut data: Vec<Complex<f64>> = x.iter().map(|&s| Complex::new(s, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(data.len()).process(&mut data);
        data[..x.len() / 2].iter().map(|c| c.norm()).collect()
    }

    #[test]
    fn single_sine_peaks_at_its_frequency() {
        let b = bank(vec![partial(440.0, 1.0, 0.0, Waveform::Sine)], 1.0);
        let buf = synth_mono(&b, 48_000).unwrap();
        assert_eq!(buf.len(), 48_000);
        let spec = spectrum(&buf.to_mono());
        let peak = spec
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        // 1 s at 48 kHz: bin spacing 1 Hz
        assert!((peak as i64 - 440).abs() <= 1);
    }

    #[test]
    fn opposite_phases_cancel() {
        let b = bank(
            vec![
                partial(440.0, 1.0, 0.0, Waveform::Sine),
                partial(440.0, 1.0, PI, Waveform::Sine),
            ],
            0.5,
        );
        let mut out = vec![vec![0.0; 24_000]];
        accumulate(&b, 48_000, &[vec![1.0], vec![1.0]], 0, &mut out, 24_000.0);
        assert!(out[0].iter().all(|s| s.abs() < 1e-9));
    }

    #[test]
    fn peak_is_minus_one_dbfs() {
        let partials = (0..900)
            .map(|k| partial(60.0 + 7.0 * k as f64, (k % 7) as f64 / 6.0, 0.1 * k as f64, Waveform::Sine))
            .collect();
        let buf = synth_mono(&bank(partials, 0.25), 48_000).unwrap();
        let peak = buf.peak() as f64;
        assert!((20.0 * peak.log10() + 1.0).abs() < 1e-6, "peak {peak}");
    }

    #[test]
    fn nyquist_is_enforced() {
        let b = bank(vec![partial(24_000.0, 1.0, 0.0, Waveform::Sine)], 0.1);
        assert!(matches!(synth_mono(&b, 48_000), Err(Error::NyquistViolation { .. })));
        let b = bank(vec![partial(440.0, 1.0, 0.0, Waveform::Sine)], 0.1);
        assert!(matches!(synth_mono(&b, 4_000), Err(Error::Config(_))));
    }

    #[test]
    fn rendering_is_deterministic() {
        let partials = (0..50)
            .map(|k| partial(100.0 + 13.0 * k as f64, 1.0 / (k + 1) as f64, k as f64, Waveform::Triangle))
            .collect();
        let b = bank(partials, 0.2);
        let gains = vec![vec![0.6, 0.8]; 50];
        assert_eq!(synth(&b, 48_000, &gains).unwrap(), synth(&b, 48_000, &gains).unwrap());
    }

    #[test]
    fn incoherent_rms_scales_with_sqrt_n() {
        let sr = 48_000;
        let len = sr as usize;
        let rms = |b: &PartialBank| {
            let mut out = vec![vec![0.0; len]];
            accumulate(b, sr, &vec![vec![1.0]; b.partials.len()], 0, &mut out, sr as f64 / 2.0);
            (out[0].iter().map(|s| s * s).sum::<f64>() / len as f64).sqrt()
        };
        let single = rms(&bank(vec![partial(1000.0, 1.0, 0.0, Waveform::Sine)], 1.0));
        for n in [4usize, 16, 64] {
            // low-discrepancy frequencies and phases
            let partials = (0..n)
                .map(|k| {
                    let u = (0.618_033_988_75 * (k + 1) as f64).fract();
                    let v = (0.754_877_666_25 * (k + 1) as f64).fract();
                    partial(100.0 + 7900.0 * u, 1.0, TAU * v, Waveform::Sine)
                })
                .collect();
            let ratio = rms(&bank(partials, 1.0)) / (single * (n as f64).sqrt());
            assert!((ratio - 1.0).abs() < 0.05, "n={n}: {ratio}");
        }
    }

    #[test]
    fn triangle_has_no_content_above_nyquist() {
        // band-limited at 48 kHz, inspected on a 4× oversampled grid
        let sr = 48_000u32;
        let over = 4 * sr;
        let b = bank(vec![partial(1_700.0, 1.0, 0.3, Waveform::Triangle)], 0.5);
        let mut out = vec![vec![0.0; (0.5 * over as f64) as usize]];
        accumulate(&b, over, &[vec![1.0]], 0, &mut out, sr as f64 / 2.0);
        // Hann window to keep leakage out of the measurement
        let n = out[0].len();
        let windowed: Vec<f64> = out[0]
            .iter()
            .enumerate()
            .map(|(k, s)| s * (0.5 - 0.5 * (TAU * k as f64 / n as f64).cos()))
            .collect();
        let spec = spectrum(&windowed);
        let hz_per_bin = over as f64 / n as f64;
        let total_peak = spec.iter().cloned().fold(0.0, f64::max);
        let above = spec
            .iter()
            .enumerate()
            .filter(|(k, _)| *k as f64 * hz_per_bin > sr as f64 / 2.0 + 4.0 * hz_per_bin)
            .map(|(_, m)| *m)
            .fold(0.0, f64::max);
        assert!(20.0 * (above / total_peak).log10() < -80.0);
        // and it does contain upper odd harmonics below Nyquist
        let third = spec[(3.0 * 1_700.0 / hz_per_bin).round() as usize];
        assert!(third / total_peak > 0.05);
    }

    #[test]
    fn stereo_gains_route_channels() {
        let b = bank(vec![partial(440.0, 1.0, 0.0, Waveform::Sine)], 0.1);
        let buf = synth(&b, 48_000, &[vec![1.0, 0.0]]).unwrap();
        assert_eq!(buf.channel_count(), 2);
        assert!(buf.channels()[1].iter().all(|&s| s == 0.0));
    }
}
