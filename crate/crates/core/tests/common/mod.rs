#![allow(dead_code)]

use mfvmd::signal::pearson_correlation;
use mfvmd::synthesis::{add_noise, gen_piecewise, PiecewiseToneSpec};
use mfvmd::vmd::VmdResult;
use mfvmd::Signal;

pub const SNR_DB: f64 = 5.0;
pub const MATCH_CORRELATION: f64 = 0.8;

pub fn two_tone() -> Signal {
    gen_piecewise(&PiecewiseToneSpec::two_tone()).unwrap()
}

/// Clean 10 kHz and 20 kHz components: the signal restricted to the
/// segments carrying each tone, zero elsewhere.
pub fn tonal_references() -> (Signal, Signal) {
    let spec = PiecewiseToneSpec::two_tone();
    let s = two_tone();
    let mask = |want: f64| -> Vec<f64> {
        s.samples()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let seg = spec.segment_at(s.time(i)).unwrap();
                if spec.segments[seg].freq_hz == want {
                    x
                } else {
                    0.0
                }
            })
            .collect()
    };
    (s.like(mask(10e3)).unwrap(), s.like(mask(20e3)).unwrap())
}

pub fn noisy_two_tone(seed: u64) -> Signal {
    add_noise(&two_tone(), SNR_DB, seed).unwrap()
}

/// `corr[mode][reference]`.
pub fn correlations(result: &VmdResult, refs: &[&Signal]) -> Vec<Vec<f64>> {
    result
        .modes
        .iter()
        .map(|m| {
            refs.iter()
                .map(|r| pearson_correlation(&m.u, r).unwrap_or(0.0))
                .collect()
        })
        .collect()
}

/// Number of references matched by some mode at `threshold`.
pub fn references_recovered(corr: &[Vec<f64>], threshold: f64) -> usize {
    let refs = corr.first().map_or(0, Vec::len);
    (0..refs)
        .filter(|&r| corr.iter().any(|row| row[r] >= threshold))
        .count()
}

/// Whether distinct modes match each of the two references at `threshold`.
pub fn distinct_pair_recovered(corr: &[Vec<f64>], threshold: f64) -> bool {
    (0..corr.len()).any(|i| {
        (0..corr.len()).any(|j| i != j && corr[i][0] >= threshold && corr[j][1] >= threshold)
    })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
