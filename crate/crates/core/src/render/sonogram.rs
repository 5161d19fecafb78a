use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};

use super::AudioBuffer;
use crate::error::{Error, Result};
use crate::format::sig17;

pub const WINDOW: usize = 2048;
pub const HOP: usize = 512;
pub const FLOOR_DB: f64 = -120.0;

/// Magnitude spectrogram; `magnitudes[t][k]` in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct Sonogram {
    pub times: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<Vec<f32>>,
}

impl Sonogram {
    pub fn frame_count(&self) -> usize {
        self.times.len()
    }

    pub fn bin_count(&self) -> usize {
        self.frequencies.len()
    }

    /// Index of the frame whose centre is nearest `t`.
    pub fn frame_near(&self, t: f64) -> usize {
        let hop = if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            1.0
        };
        (((t - self.times[0]) / hop).round().max(0.0) as usize).min(self.times.len() - 1)
    }

    /// CSV matrix: first row holds frequencies (Hz), first column frame times (s).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let mut line = String::from("time_s");
        for f in &self.frequencies {
            write!(line, ",{}", sig17(*f)).unwrap();
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
        for (t, row) in self.times.iter().zip(&self.magnitudes) {
            line.clear();
            line.push_str(&sig17(*t));
            for m in row {
                write!(line, ",{m:?}").unwrap();
            }
            line.push('\n');
            w.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Hann-windowed STFT of the channel average. Magnitudes are scaled by
/// `2 / Σw` so a full-scale sine reads 0 dB.
pub fn stft_sonogram(buf: &AudioBuffer) -> Result<Sonogram> {
    let mono = buf.to_mono();
    if mono.len() < WINDOW {
        return Err(Error::BufferTooShort {
            len: mono.len(),
            window: WINDOW,
        });
    }
    let sr = buf.sample_rate() as f64;
    let window: Vec<f64> = (0..WINDOW)
        .map(|n| 0.5 - 0.5 * (TAU * n as f64 / WINDOW as f64).cos())
        .collect();
    let scale = 2.0 / window.iter().sum::<f64>();
    let fft = FftPlanner::new().plan_fft_forward(WINDOW);
    let n_frames = 1 + (mono.len() - WINDOW) / HOP;
    let bins = WINDOW / 2 + 1;

    let magnitudes = (0..n_frames)
        .into_par_iter()
        .map(|t| {
            let mut data: Vec<Complex<f64>> = mono[t * HOP..t * HOP + WINDOW]
                .iter()
                .zip(&window)
                .map(|(s, w)| Complex::new(s * w, 0.0))
                .collect();
            fft.process(&mut data);
            data[..bins]
                .iter()
                .map(|c| {
                    let m = c.norm() * scale;
                    if m > 0.0 {
                        (20.0 * m.log10()).max(FLOOR_DB) as f32
                    } else {
                        FLOOR_DB as f32
                    }
                })
                .collect()
        })
        .collect();
    Ok(Sonogram {
        times: (0..n_frames).map(|t| (t * HOP + WINDOW / 2) as f64 / sr).collect(),
        frequencies: (0..bins).map(|k| k as f64 * sr / WINDOW as f64).collect(),
        magnitudes,
    })
}
