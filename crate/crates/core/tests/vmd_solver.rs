mod common;

use common::*;
use mfvmd::signal::pearson_correlation;
use mfvmd::synthesis::{gen_piecewise, PiecewiseToneSpec, ToneSegment};
use mfvmd::vmd::{reconstruct, vmd_decompose, InitPolicy, VmdConfig, VmdDiagnostic};
use mfvmd::{Error, Signal};

fn tone(freq: f64, fs: f64, len: usize) -> Signal {
    gen_piecewise(&PiecewiseToneSpec {
        segments: vec![ToneSegment {
            start: 0.0,
            end: len as f64 / fs,
            freq_hz: freq,
            amplitude: 1.0,
        }],
        fs,
    })
    .unwrap()
}

#[test]
fn single_tone_one_mode() {
    let s = tone(30e3, 1e6, 1000);
    let r = vmd_decompose(&s, &VmdConfig::with_modes(1)).unwrap();
    assert!((r.modes[0].omega_hz - 30e3).abs() <= 0.01 * 30e3, "{}", r.modes[0].omega_hz);
    assert!(pearson_correlation(&r.modes[0].u, &s).unwrap() >= 0.999);
    assert!(r.residual_norm() <= 0.05 * s.norm());
    assert!(bitwise_closure(&s, &reconstruct(&r)));
}

fn bitwise_closure(a: &Signal, b: &Signal) -> bool {
    a.samples().iter().zip(b.samples()).all(|(x, y)| x == y)
}

#[test]
fn two_tone_two_modes() {
    let s = two_tone();
    let r = vmd_decompose(&s, &VmdConfig::default()).unwrap();
    assert!(r.converged);
    let w = r.omegas_hz();
    assert!(w[0] < w[1]);
    assert!((w[0] - 10e3).abs() <= 0.02 * 10e3);
    assert!((w[1] - 20e3).abs() <= 0.02 * 20e3);
    assert!(r.residual_norm() <= 0.01 * s.norm());
    assert!(r.imag_leakage <= 1e-10);
    let (r10, r20) = tonal_references();
    let corr = correlations(&r, &[&r10, &r20]);
    assert!(corr[0][0] >= 0.9 && corr[1][1] >= 0.9, "{corr:?}");
}

#[test]
fn zero_signal_gives_zero_modes() {
    let s = Signal::new(vec![0.0; 256], 1e-6).unwrap();
    let r = vmd_decompose(&s, &VmdConfig::with_modes(3)).unwrap();
    assert!(r.converged);
    assert!(r.modes.iter().all(|m| m.u.samples().iter().all(|&v| v == 0.0)));
    let zero_modes = r
        .diagnostics
        .iter()
        .filter(|d| matches!(d, VmdDiagnostic::ZeroPowerMode { .. }))
        .count();
    assert_eq!(zero_modes, 3);
}

#[test]
fn too_short_for_mode_count() {
    let s = Signal::new(vec![1.0, 2.0, 3.0], 1.0).unwrap();
    assert!(matches!(
        vmd_decompose(&s, &VmdConfig::with_modes(2)),
        Err(Error::TooShort { .. })
    ));
}

#[test]
fn invalid_config_rejected() {
    let s = two_tone();
    for cfg in [
        VmdConfig { modes: 0, ..Default::default() },
        VmdConfig { alpha: 0.0, ..Default::default() },
        VmdConfig { tol: -1.0, ..Default::default() },
        VmdConfig { max_iters: 0, ..Default::default() },
    ] {
        assert!(matches!(vmd_decompose(&s, &cfg), Err(Error::InvalidConfig(_))), "{cfg:?}");
    }
}

#[test]
fn excess_modes_flagged() {
    let s = tone(50e3, 1e6, 512);
    let r = vmd_decompose(&s, &VmdConfig::with_modes(6)).unwrap();
    assert_eq!(r.modes.len(), 6);
    assert!(bitwise_closure(&s, &reconstruct(&r)));
    assert!(r.omegas_hz().windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn closure_across_inits() {
    let s = noisy_two_tone(3);
    for init in [InitPolicy::Uniform, InitPolicy::Zero, InitPolicy::Random { seed: 4 }] {
        let r = vmd_decompose(
            &s,
            &VmdConfig {
                init,
                ..VmdConfig::with_modes(3)
            },
        )
        .unwrap();
        assert!(bitwise_closure(&s, &reconstruct(&r)));
        assert!(r.imag_leakage <= 1e-10);
    }
}

#[test]
fn deterministic_and_seed_sensitive() {
    let s = noisy_two_tone(8);
    let cfg = |seed| VmdConfig {
        init: InitPolicy::Random { seed },
        ..VmdConfig::with_modes(3)
    };
    let a = vmd_decompose(&s, &cfg(1)).unwrap();
    let b = vmd_decompose(&s, &cfg(1)).unwrap();
    assert_eq!(a, b);
    let c = vmd_decompose(&s, &cfg(2)).unwrap();
    assert!(a.iterations != c.iterations || a.omegas_hz() != c.omegas_hz());
}

#[test]
fn scale_equivariance() {
    let s = noisy_two_tone(11);
    let cfg = VmdConfig::with_modes(2);
    let base = vmd_decompose(&s, &cfg).unwrap();
    for c in [0.01, 5.0, 1e4] {
        let r = vmd_decompose(&s.scale(c).unwrap(), &cfg).unwrap();
        for (a, b) in base.modes.iter().zip(&r.modes) {
            assert!((a.omega_hz - b.omega_hz).abs() <= 1e-3 * s.nyquist());
            let scaled: Vec<f64> = a.u.samples().iter().map(|v| c * v).collect();
            assert!(max_abs_diff(&scaled, b.u.samples()) <= 1e-6 * c * a.u.norm());
        }
    }
}

#[test]
fn result_serializes_without_tail() {
    let r = vmd_decompose(&two_tone(), &VmdConfig::default()).unwrap();
    let json = serde_json::to_value(&r).unwrap();
    assert!(json.get("residual_tail").is_none());
    assert_eq!(json["modes"].as_array().unwrap().len(), 2);
}
