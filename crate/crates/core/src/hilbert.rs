//! Analytic signals, instantaneous frequency and the Hilbert spectrum of a
//! set of modes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::vmd::Mode;
use crate::{fft, ComplexSignal, Error, Result, Signal};

/// Discrete analytic signal via one-sided spectrum: negative bins zeroed,
/// positive bins doubled, DC and Nyquist kept as they are.
pub fn analytic_signal(s: &Signal) -> Result<ComplexSignal> {
    if s.len() < 4 {
        return Err(Error::TooShort { len: s.len(), min: 4 });
    }
    ComplexSignal::new(analytic_raw(s.samples()), s.dt())
}

fn analytic_raw(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut spec = fft::forward_real(x);
    for (k, c) in spec.iter_mut().enumerate() {
        let nyquist_bin = n.is_multiple_of(2) && k == n / 2;
        if k == 0 || nyquist_bin {
            continue;
        }
        *c *= if k < n.div_ceil(2) { 2.0 } else { 0.0 };
    }
    let mut out = fft::inverse(&spec);
    // the real part is the input by construction; drop transform round-off
    for (c, &v) in out.iter_mut().zip(x) {
        c.re = v;
    }
    out
}

/// Hilbert envelope of a copy mirrored by half its length on each side,
/// truncated back. Stops energy at one end of a record from wrapping onto
/// the other.
pub fn mirrored_envelope(s: &Signal) -> Vec<f64> {
    let x = s.samples();
    let half = x.len() / 2;
    let padded: Vec<f64> = x[..half]
        .iter()
        .rev()
        .chain(x)
        .chain(x[half..].iter().rev())
        .copied()
        .collect();
    analytic_raw(&padded)[half..half + x.len()]
        .iter()
        .map(|c| c.norm())
        .collect()
}

/// Instantaneous frequency and amplitude of one analytic signal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstFreqSeries {
    /// Hz, `None` where the amplitude vanishes and the phase is undefined.
    pub freqs: Vec<Option<f64>>,
    pub amps: Vec<f64>,
    pub dt: f64,
    /// Samples whose raw frequency was negative and got clamped to 0.
    pub clamped: Vec<usize>,
}

impl InstFreqSeries {
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// True when no sample carries a defined frequency.
    pub fn is_void(&self) -> bool {
        self.freqs.iter().all(Option::is_none)
    }
}

fn wrap_phase(d: f64) -> f64 {
    let w = d.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Central difference of the unwrapped phase over `2π·dt`; endpoints and
/// samples next to amplitude gaps use one-sided differences.
pub fn instantaneous_frequency(a: &ComplexSignal) -> InstFreqSeries {
    let values = a.values();
    let n = values.len();
    let amps: Vec<f64> = values.iter().map(|c| c.norm()).collect();
    let peak = amps.iter().copied().fold(0.0, f64::max);
    let gap_level = peak * 1e-12;
    let defined: Vec<bool> = amps.iter().map(|&m| peak > 0.0 && m > gap_level).collect();
    let phase: Vec<f64> = values.iter().map(|c| c.arg()).collect();
    let scale = 1.0 / (2.0 * PI * a.dt());

    let step = |i: usize| wrap_phase(phase[i + 1] - phase[i]);
    let mut freqs = Vec::with_capacity(n);
    let mut clamped = Vec::new();
    for i in 0..n {
        if !defined[i] {
            freqs.push(None);
            continue;
        }
        let back = i > 0 && defined[i - 1];
        let ahead = i + 1 < n && defined[i + 1];
        let slope = match (back, ahead) {
            (true, true) => 0.5 * (step(i - 1) + step(i)),
            (true, false) => step(i - 1),
            (false, true) => step(i),
            (false, false) => {
                freqs.push(None);
                continue;
            }
        };
        let f = slope * scale;
        if f < 0.0 {
            clamped.push(i);
            freqs.push(Some(0.0));
        } else {
            freqs.push(Some(f));
        }
    }
    InstFreqSeries {
        freqs,
        amps,
        dt: a.dt(),
        clamped,
    }
}

/// Per-mode instantaneous frequency and amplitude on a shared time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HilbertSpectrum {
    pub times: Vec<f64>,
    pub modes: Vec<InstFreqSeries>,
    pub nyquist_hz: f64,
}

/// A frequency ridge of the amplitude-weighted spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ridge {
    pub freq_hz: f64,
    pub weight: f64,
}

pub fn hilbert_spectrum(modes: &[Mode]) -> Result<HilbertSpectrum> {
    let first = modes.first().ok_or(Error::InvalidConfig(
        "Hilbert spectrum needs at least one mode".into(),
    ))?;
    let len = first.u.len();
    let mut series = Vec::with_capacity(modes.len());
    for m in modes {
        if m.u.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: m.u.len(),
            });
        }
        series.push(instantaneous_frequency(&analytic_signal(&m.u)?));
    }
    Ok(HilbertSpectrum {
        times: first.u.times(),
        modes: series,
        nyquist_hz: first.u.nyquist(),
    })
}

impl HilbertSpectrum {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the mode with the largest instantaneous amplitude at each
    /// sample, `None` where every mode is silent.
    pub fn dominant_modes(&self) -> Vec<Option<usize>> {
        (0..self.len())
            .map(|i| {
                self.modes
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m.freqs[i].is_some())
                    .max_by(|a, b| a.1.amps[i].total_cmp(&b.1.amps[i]))
                    .map(|(k, _)| k)
            })
            .collect()
    }

    /// Instantaneous frequency of the dominant mode at each sample.
    pub fn dominant_frequency(&self) -> Vec<Option<f64>> {
        self.dominant_modes()
            .iter()
            .enumerate()
            .map(|(i, k)| k.and_then(|k| self.modes[k].freqs[i]))
            .collect()
    }

    /// Sample indices where the dominant mode changes, reported as the first
    /// sample of the new regime. Regimes shorter than `min_run` samples are
    /// absorbed into their predecessor.
    pub fn transitions(&self, min_run: usize) -> Vec<usize> {
        let dom = self.dominant_modes();
        let mut runs: Vec<(usize, Option<usize>, usize)> = Vec::new();
        for (i, d) in dom.iter().enumerate() {
            match runs.last_mut() {
                Some(run) if run.1 == *d => run.2 += 1,
                _ => runs.push((i, *d, 1)),
            }
        }
        let mut out = Vec::new();
        let mut current: Option<Option<usize>> = None;
        for (start, mode, len) in runs {
            if len < min_run.max(1) {
                continue;
            }
            match current {
                Some(c) if c == mode => {}
                Some(_) => {
                    out.push(start);
                    current = Some(mode);
                }
                None => current = Some(mode),
            }
        }
        out
    }

    /// Amplitude-weighted histogram of instantaneous frequency over all
    /// modes, `bin_hz` wide from 0 to Nyquist.
    pub fn frequency_histogram(&self, bin_hz: f64) -> Vec<f64> {
        let bins = (self.nyquist_hz / bin_hz).ceil().max(1.0) as usize;
        let mut hist = vec![0.0; bins];
        for m in &self.modes {
            for (f, a) in m.freqs.iter().zip(&m.amps) {
                if let Some(f) = f {
                    let b = ((f / bin_hz) as usize).min(bins - 1);
                    hist[b] += a;
                }
            }
        }
        hist
    }

    /// Strongest `count` histogram peaks at least `min_separation_hz` apart,
    /// in descending weight.
    pub fn ridges(&self, bin_hz: f64, min_separation_hz: f64, count: usize) -> Vec<Ridge> {
        let hist = self.frequency_histogram(bin_hz);
        let mut order: Vec<usize> = (0..hist.len()).filter(|&b| hist[b] > 0.0).collect();
        order.sort_by(|&a, &b| hist[b].total_cmp(&hist[a]).then(a.cmp(&b)));
        let mut picked: Vec<Ridge> = Vec::new();
        for b in order {
            if picked.len() == count {
                break;
            }
            let freq_hz = (b as f64 + 0.5) * bin_hz;
            if picked
                .iter()
                .all(|r| (r.freq_hz - freq_hz).abs() >= min_separation_hz)
            {
                picked.push(Ridge {
                    freq_hz,
                    weight: hist[b],
                });
            }
        }
        picked
    }

    /// Amplitude-weighted intensity on a `time_bins × freq_bins` grid over
    /// `[0, Nyquist]`, row-major by time.
    pub fn intensity_grid(&self, time_bins: usize, freq_bins: usize) -> Vec<Vec<f64>> {
        let (tb, fb) = (time_bins.max(1), freq_bins.max(1));
        let mut grid = vec![vec![0.0; fb]; tb];
        let n = self.len().max(1);
        for m in &self.modes {
            for (i, (f, a)) in m.freqs.iter().zip(&m.amps).enumerate() {
                if let Some(f) = f {
                    let t = (i * tb / n).min(tb - 1);
                    let k = ((f / self.nyquist_hz * fb as f64) as usize).min(fb - 1);
                    grid[t][k] += a;
                }
            }
        }
        grid
    }
}
