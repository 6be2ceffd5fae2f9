//! MF-VMD pipeline and bolt-bottom echo picking.

use serde::{Deserialize, Serialize};

use crate::hilbert::mirrored_envelope;
use crate::morphology::{mmc_filter, select_se_width, StructuringElement, DEFAULT_SE_THRESHOLD};
use crate::vmd::{vmd_decompose, VmdConfig, VmdResult};
use crate::{Error, Result, Signal};

/// How the pre-filter's structuring element is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SeChoice {
    /// Flat element of a fixed width.
    Fixed { width: usize },
    /// Largest flat width in `min_width..=max_width` meeting the correlation threshold.
    Auto {
        min_width: usize,
        max_width: usize,
        threshold: f64,
    },
}

impl SeChoice {
    pub const DEFAULT_WIDTH: usize = 5;

    pub fn auto(max_width: usize) -> Self {
        SeChoice::Auto {
            min_width: 1,
            max_width,
            threshold: DEFAULT_SE_THRESHOLD,
        }
    }
}

impl Default for SeChoice {
    fn default() -> Self {
        SeChoice::Fixed {
            width: Self::DEFAULT_WIDTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MfVmdConfig {
    pub se: SeChoice,
    pub vmd: VmdConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MfVmdOutput {
    pub se_width: usize,
    /// Auto selection found no width meeting the threshold.
    pub se_below_threshold: bool,
    pub filtered: Signal,
    pub vmd: VmdResult,
}

/// Combined morphological filter followed by VMD of the filtered signal.
pub fn mf_vmd(s: &Signal, cfg: &MfVmdConfig) -> Result<MfVmdOutput> {
    cfg.vmd.validate()?;
    let (width, below) = match cfg.se {
        SeChoice::Fixed { width } => (width, false),
        SeChoice::Auto {
            min_width,
            max_width,
            threshold,
        } => {
            let sel = select_se_width(s, min_width..=max_width.min(s.len()), threshold)?;
            (sel.width, sel.below_threshold)
        }
    };
    let filtered = mmc_filter(s, &StructuringElement::flat(width)?)?;
    let vmd = vmd_decompose(&filtered, &cfg.vmd)?;
    Ok(MfVmdOutput {
        se_width: width,
        se_below_threshold: below,
        filtered,
        vmd,
    })
}

pub const DEFAULT_BLANK_TIME: f64 = 0.3e-3;
pub const DEFAULT_MIN_PEAK_RATIO: f64 = 3.0;
pub const DEFAULT_VELOCITY: f64 = 6000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoPick {
    pub mode_index: usize,
    pub time_s: f64,
    pub sample: usize,
    /// Envelope peak over the median envelope after the blank time.
    pub peak_ratio: f64,
}

/// Picks the strongest local envelope peak after `blank_time` across all modes,
/// ranking modes by peak-to-median ratio. Times are relative to the record start.
pub fn detect_echo(result: &VmdResult, blank_time: f64, min_ratio: f64) -> Result<EchoPick> {
    let first = result
        .modes
        .first()
        .ok_or_else(|| Error::InvalidConfig("no modes to search".into()))?;
    let (n, dt) = (first.u.len(), first.u.dt());
    if !(blank_time > 0.0 && blank_time < n as f64 * dt) {
        return Err(Error::InvalidConfig(format!(
            "blank time {blank_time} s outside the record (0, {} s)",
            n as f64 * dt
        )));
    }
    let start = ((blank_time / dt).ceil() as usize).min(n - 1);
    let half = (start / 4).max(1);
    let mut best: Option<EchoPick> = None;
    for (k, mode) in result.modes.iter().enumerate() {
        let env = mirrored_envelope(&mode.u);
        let tail = &env[start..];
        // A candidate must dominate its neighbourhood, which rules out the
        // decaying tail of the direct wave at the blank edge.
        let peak_at = (start..n)
            .filter(|&i| {
                let lo = i.saturating_sub(half);
                let hi = (i + half).min(n - 1);
                env[i] > 0.0
                    && env[lo..i].iter().all(|&v| v < env[i])
                    && env[i + 1..=hi].iter().all(|&v| v <= env[i])
            })
            .max_by(|&a, &b| env[a].total_cmp(&env[b]));
        let (offset, peak) = match peak_at {
            Some(i) => (i - start, env[i]),
            None => (0, 0.0),
        };
        let median = median(tail);
        let ratio = if median > 0.0 {
            peak / median
        } else if peak > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if best.is_none_or(|b| ratio > b.peak_ratio) {
            best = Some(EchoPick {
                mode_index: k,
                time_s: (start + offset) as f64 * dt,
                sample: start + offset,
                peak_ratio: ratio,
            });
        }
    }
    let best = best.expect("at least one mode");
    if best.peak_ratio < min_ratio {
        return Err(Error::NoEchoFound {
            best_ratio: best.peak_ratio,
            threshold: min_ratio,
        });
    }
    Ok(best)
}

fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

/// Two-way travel: `L = v·t/2`.
pub fn estimate_length(echo_time: f64, velocity: f64) -> Result<f64> {
    if !(echo_time > 0.0 && echo_time.is_finite()) {
        return Err(Error::InvalidConfig(format!("echo time must be positive, got {echo_time}")));
    }
    if !(velocity > 0.0 && velocity.is_finite()) {
        return Err(Error::InvalidConfig(format!("velocity must be positive, got {velocity}")));
    }
    Ok(velocity * echo_time / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub mf_vmd: MfVmdConfig,
    pub velocity_m_s: f64,
    pub blank_time_s: f64,
    pub min_peak_ratio: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            mf_vmd: MfVmdConfig {
                vmd: VmdConfig::with_modes(3),
                ..Default::default()
            },
            velocity_m_s: DEFAULT_VELOCITY,
            blank_time_s: DEFAULT_BLANK_TIME,
            min_peak_ratio: DEFAULT_MIN_PEAK_RATIO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoltDiagnostics {
    pub se_width: usize,
    pub se_below_threshold: bool,
    pub omegas_hz: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoltReport {
    pub echo_time_s: f64,
    pub estimated_length_m: f64,
    pub carrier_mode_index: usize,
    pub confidence: f64,
    pub diagnostics: BoltDiagnostics,
}

/// MF-VMD, echo pick and length estimate for one record.
pub fn analyze(s: &Signal, cfg: &AnalysisConfig) -> Result<(BoltReport, MfVmdOutput)> {
    let out = mf_vmd(s, &cfg.mf_vmd)?;
    let pick = detect_echo(&out.vmd, cfg.blank_time_s, cfg.min_peak_ratio)?;
    let report = BoltReport {
        echo_time_s: pick.time_s,
        estimated_length_m: estimate_length(pick.time_s, cfg.velocity_m_s)?,
        carrier_mode_index: pick.mode_index,
        confidence: pick.peak_ratio,
        diagnostics: BoltDiagnostics {
            se_width: out.se_width,
            se_below_threshold: out.se_below_threshold,
            omegas_hz: out.vmd.omegas_hz(),
            iterations: out.vmd.iterations,
            converged: out.vmd.converged,
        },
    };
    Ok((report, out))
}
