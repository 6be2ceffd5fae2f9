//! Sampled signal types and the statistics shared by every stage.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{fft, Error, Result};

/// A uniformly sampled real-valued series.
///
/// Values are immutable once constructed; every operation returns a new signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    samples: Vec<f64>,
    dt: f64,
    t0: f64,
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSampleInterval(dt))
    }
}

impl Signal {
    pub const MIN_LEN: usize = 2;

    pub fn new(samples: Vec<f64>, dt: f64) -> Result<Self> {
        Self::with_start(samples, dt, 0.0)
    }

    pub fn with_start(samples: Vec<f64>, dt: f64, t0: f64) -> Result<Self> {
        if samples.len() < Self::MIN_LEN {
            return Err(Error::TooShort {
                len: samples.len(),
                min: Self::MIN_LEN,
            });
        }
        check_dt(dt)?;
        if !t0.is_finite() {
            return Err(Error::InvalidConfig(format!("start time must be finite, got {t0}")));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { samples, dt, t0 })
    }

    /// Builds a signal on the same time grid as `self`.
    pub fn like(&self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: samples.len(),
            });
        }
        Self::with_start(samples, self.dt, self.t0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.len() as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }

    pub fn power(&self) -> f64 {
        self.energy() / self.len() as f64
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.like(self.samples.iter().map(|&x| f(x)).collect())
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|x| c * x)
    }

    pub fn negate(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|x| -x).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Signal) -> Result<Self> {
        check_same_len(self, other)?;
        self.like(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Signal) -> Result<Self> {
        check_same_len(self, other)?;
        self.like(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

fn check_same_len(a: &Signal, b: &Signal) -> Result<()> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        })
    }
}

/// Complex-valued series, e.g. an analytic signal.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    values: Vec<Complex64>,
    dt: f64,
}

impl ComplexSignal {
    pub fn new(values: Vec<Complex64>, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        if let Some(i) = values.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values, dt })
    }

    pub fn from_parts(re: &[f64], im: &[f64], dt: f64) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::LengthMismatch {
                left: re.len(),
                right: im.len(),
            });
        }
        Self::new(
            re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect(),
            dt,
        )
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.im).collect()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.norm()).collect()
    }
}

/// Sample Pearson correlation coefficient.
///
/// Fails when both inputs are constant. When exactly one is constant the
/// covariance vanishes and the result is 0.
pub fn pearson_correlation(a: &Signal, b: &Signal) -> Result<f64> {
    pearson(a.samples(), b.samples())
}

pub(crate) fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    match (saa > 0.0, sbb > 0.0) {
        (false, false) => Err(Error::ConstantInputs),
        (true, true) => Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)),
        _ => Ok(0.0),
    }
}

/// SNR in decibels under the additive-noise convention:
/// `10·log10(P(clean) / P(noisy − clean))`.
pub fn snr_db(clean: &Signal, noisy: &Signal) -> Result<f64> {
    let noise = noisy.sub(clean)?;
    let (ps, pn) = (clean.power(), noise.power());
    if pn == 0.0 {
        return Err(Error::InfiniteSnr);
    }
    if ps == 0.0 {
        return Err(Error::ZeroPower);
    }
    Ok(10.0 * (ps / pn).log10())
}

/// One bin of a one-sided power spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumBin {
    pub freq_hz: f64,
    pub power: f64,
}

/// One-sided power spectrum on the grid `k/(N·dt)`, `k = 0..=N/2`.
///
/// Bins are scaled so that their sum equals the time-domain energy `Σ x²`.
pub fn power_spectrum(s: &Signal) -> Vec<SpectrumBin> {
    let n = s.len();
    let spec = fft::forward_real(s.samples());
    let df = 1.0 / (n as f64 * s.dt());
    (0..=n / 2)
        .map(|k| {
            let mirrored = k != 0 && !(n.is_multiple_of(2) && k == n / 2);
            let weight = if mirrored { 2.0 } else { 1.0 };
            SpectrumBin {
                freq_hz: k as f64 * df,
                power: weight * spec[k].norm_sqr() / n as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec(), 1e-3).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(Signal::new(vec![1.0], 1.0), Err(Error::TooShort { .. })));
        assert!(matches!(
            Signal::new(vec![1.0, 2.0], 0.0),
            Err(Error::InvalidSampleInterval(_))
        ));
        assert!(matches!(
            Signal::new(vec![1.0, f64::NAN], 1.0),
            Err(Error::NonFinite(1))
        ));
        assert!(Signal::new(vec![1.0, 2.0], f64::INFINITY).is_err());
    }

    #[test]
    fn correlation_trivial_cases() {
        let s = sig(&[0.3, -1.0, 2.0, 0.5, 0.0]);
        assert!((pearson_correlation(&s, &s).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson_correlation(&s, &s.negate()).unwrap() + 1.0).abs() < 1e-15);
        let a = sig(&[1.0, 2.0, 3.0, 4.0]);
        let b = sig(&[2.0, 4.0, 6.0, 8.0]);
        assert!((pearson_correlation(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_errors() {
        let c = sig(&[1.0, 1.0, 1.0]);
        assert_eq!(pearson_correlation(&c, &c), Err(Error::ConstantInputs));
        assert_eq!(pearson_correlation(&c, &sig(&[1.0, 2.0, 0.0])), Ok(0.0));
        assert!(matches!(
            pearson_correlation(&c, &sig(&[1.0, 2.0])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn snr_cases() {
        let clean = sig(&[1.0, -1.0, 1.0, -1.0]);
        let noise = sig(&[1.0, 1.0, -1.0, -1.0]);
        let noisy = clean.add(&noise).unwrap();
        assert!(snr_db(&clean, &noisy).unwrap().abs() < 1e-12);

        // power ratio 10^0.5 -> 5 dB
        let g = 10f64.powf(-0.25);
        let noisy = clean.add(&noise.scale(g).unwrap()).unwrap();
        assert!((snr_db(&clean, &noisy).unwrap() - 5.0).abs() < 1e-9);

        assert_eq!(snr_db(&clean, &clean), Err(Error::InfiniteSnr));
    }

    #[test]
    fn tone_lands_in_one_bin() {
        // 10 kHz at 1 MHz, 2000 samples = 20 whole periods -> bin 20
        let s = Signal::new(
            (0..2000)
                .map(|i| (2.0 * std::f64::consts::PI * 1e4 * i as f64 * 1e-6).sin())
                .collect(),
            1e-6,
        )
        .unwrap();
        let spec = power_spectrum(&s);
        assert_eq!(spec.len(), 1001);
        let (imax, peak) = spec
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.power.total_cmp(&b.1.power))
            .unwrap();
        assert_eq!(imax, 20);
        assert!((peak.freq_hz - 1e4).abs() < 1e-6);
        let rest: f64 = spec.iter().map(|b| b.power).sum::<f64>() - peak.power;
        assert!(rest < 1e-18 * peak.power.max(1.0) + 1e-18);
    }

    #[test]
    fn zero_spectrum() {
        let s = sig(&[0.0; 9]);
        assert!(power_spectrum(&s).iter().all(|b| b.power == 0.0));
    }
}
