//! Test-signal generators: piecewise tones, calibrated white noise and a
//! synthetic bolt echo record.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneSegment {
    pub start: f64,
    pub end: f64,
    pub freq_hz: f64,
    pub amplitude: f64,
}

/// Contiguous tone segments. A sample at time `t` belongs to the segment with
/// `start < t ≤ end`; the first segment also owns `t = start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseToneSpec {
    pub segments: Vec<ToneSegment>,
    pub fs: f64,
}

impl PiecewiseToneSpec {
    /// 10 kHz on (0, 0.8] ms, 20 kHz on (0.8, 1.2] ms, 10 kHz on (1.2, 2] ms,
    /// unit amplitude, sampled at 1 MHz.
    pub fn two_tone() -> Self {
        let seg = |start: f64, end: f64, freq_hz: f64| ToneSegment {
            start,
            end,
            freq_hz,
            amplitude: 1.0,
        };
        Self {
            segments: vec![
                seg(0.0, 0.8e-3, 10e3),
                seg(0.8e-3, 1.2e-3, 20e3),
                seg(1.2e-3, 2.0e-3, 10e3),
            ],
            fs: 1e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return bad(format!("sampling rate must be positive, got {}", self.fs));
        }
        if self.segments.is_empty() {
            return bad("no segments".into());
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if !(seg.end > seg.start) {
                return bad(format!("segment {i} is empty or reversed"));
            }
            if !(seg.freq_hz >= 0.0 && seg.freq_hz < self.fs / 2.0) {
                return bad(format!("segment {i} frequency {} outside [0, fs/2)", seg.freq_hz));
            }
            if !seg.amplitude.is_finite() {
                return bad(format!("segment {i} amplitude not finite"));
            }
        }
        for (i, pair) in self.segments.windows(2).enumerate() {
            let gap = pair[1].start - pair[0].end;
            // boundaries are given in seconds; tolerate decimal round-off
            if gap.abs() > 1e-12 * pair[0].end.abs().max(1e-9) {
                return bad(format!(
                    "segments {i} and {} {}",
                    i + 1,
                    if gap > 0.0 { "leave a gap" } else { "overlap" }
                ));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> f64 {
        self.segments[0].start
    }

    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].end
    }

    /// Number of samples `i/fs` covering `[start, end)`.
    pub fn sample_count(&self) -> usize {
        ((self.end() - self.start()) * self.fs).round() as usize
    }

    /// Returns the segment index that owns time `t`. Comparisons allow a
    /// billionth of a sample interval so that `i/fs` lands on the boundary
    /// it is meant to.
    pub fn segment_at(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 / self.fs;
        let first = self.segments.first()?;
        if (t - first.start).abs() <= tol {
            return Some(0);
        }
        self.segments
            .iter()
            .position(|seg| t > seg.start + tol && t <= seg.end + tol)
    }
}

/// Samples `A · sin(2π f t)` per segment, with phase referenced to global
/// time (no per-segment phase reset).
pub fn gen_piecewise(spec: &PiecewiseToneSpec) -> Result<Signal> {
    spec.validate()?;
    let n = spec.sample_count();
    let dt = 1.0 / spec.fs;
    let t0 = spec.start();
    let samples = (0..n)
        .map(|i| {
            let t = t0 + i as f64 * dt;
            let seg = &spec.segments[spec.segment_at(t).unwrap_or(spec.segments.len() - 1)];
            seg.amplitude * (2.0 * PI * seg.freq_hz * t).sin()
        })
        .collect();
    Signal::with_start(samples, dt, t0)
}

/// Adds white Gaussian noise scaled so that the realized SNR equals the
/// target. Deterministic for a given seed.
pub fn add_noise(s: &Signal, snr_target_db: f64, seed: u64) -> Result<Signal> {
    if !snr_target_db.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "SNR target must be finite, got {snr_target_db}"
        )));
    }
    let ps = s.power();
    if ps == 0.0 {
        return Err(Error::ZeroPower);
    }
    let noise = white_noise(s.len(), seed);
    let pn = noise.iter().map(|x| x * x).sum::<f64>() / noise.len() as f64;
    let gain = (ps / 10f64.powf(snr_target_db / 10.0) / pn).sqrt();
    s.like(
        s.samples()
            .iter()
            .zip(&noise)
            .map(|(x, w)| x + gain * w)
            .collect(),
    )
}

/// Unit-variance Gaussian draws from a seeded ChaCha generator.
pub fn white_noise(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Synthetic bolt record: a Gaussian-windowed tone burst at `t = 0` plus its
/// bottom reflection at `t = 2L/v`, under an exponential decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoltEchoSpec {
    pub bolt_length_m: f64,
    pub wave_velocity_m_s: f64,
    pub pulse_freq_hz: f64,
    /// Full burst duration; the Gaussian window's σ is a sixth of it.
    pub pulse_width_s: f64,
    pub echo_amplitude: f64,
    /// Time constant of the `e^{−t/τ}` decay.
    pub decay_s: f64,
    pub record_length_s: f64,
    pub fs: f64,
}

impl Default for BoltEchoSpec {
    /// 3 m bolt at 6000 m/s, 980 samples at a 4 µs interval.
    fn default() -> Self {
        Self {
            bolt_length_m: 3.0,
            wave_velocity_m_s: 6000.0,
            pulse_freq_hz: 20e3,
            pulse_width_s: 0.2e-3,
            echo_amplitude: 0.5,
            decay_s: 2e-3,
            record_length_s: 980.0 * 4e-6,
            fs: 250e3,
        }
    }
}

impl BoltEchoSpec {
    pub fn echo_time(&self) -> f64 {
        2.0 * self.bolt_length_m / self.wave_velocity_m_s
    }

    pub fn sample_count(&self) -> usize {
        (self.record_length_s * self.fs).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        let positive = [
            ("bolt length", self.bolt_length_m),
            ("wave velocity", self.wave_velocity_m_s),
            ("pulse width", self.pulse_width_s),
            ("decay", self.decay_s),
            ("record length", self.record_length_s),
            ("sampling rate", self.fs),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.pulse_freq_hz > 0.0 && self.pulse_freq_hz < self.fs / 2.0) {
            return bad(format!("pulse frequency {} outside (0, fs/2)", self.pulse_freq_hz));
        }
        if !(0.0..=1.0).contains(&self.echo_amplitude) {
            return bad(format!("echo amplitude {} outside [0, 1]", self.echo_amplitude));
        }
        if self.echo_time() >= self.record_length_s {
            return bad(format!(
                "echo at {} s lies beyond the {} s record",
                self.echo_time(),
                self.record_length_s
            ));
        }
        Ok(())
    }

    fn burst(&self, t: f64) -> f64 {
        let sigma = self.pulse_width_s / 6.0;
        (-0.5 * (t / sigma).powi(2)).exp() * (2.0 * PI * self.pulse_freq_hz * t).sin()
    }
}

pub fn gen_bolt_echo(spec: &BoltEchoSpec) -> Result<Signal> {
    spec.validate()?;
    let dt = 1.0 / spec.fs;
    let te = spec.echo_time();
    let samples = (0..spec.sample_count())
        .map(|i| {
            let t = i as f64 * dt;
            (-t / spec.decay_s).exp() * (spec.burst(t) + spec.echo_amplitude * spec.burst(t - te))
        })
        .collect();
    Signal::new(samples, dt)
}
