mod common;

use common::*;
use mfvmd::bolt::{analyze, detect_echo, mf_vmd, AnalysisConfig, MfVmdConfig, SeChoice};
use mfvmd::morphology::{mmc_filter, StructuringElement};
use mfvmd::signal::pearson_correlation;
use mfvmd::synthesis::{add_noise, gen_bolt_echo, BoltEchoSpec};
use mfvmd::vmd::{vmd_decompose, VmdConfig};
use mfvmd::{Error, Signal};

#[test]
fn mf_vmd_is_vmd_of_filtered_signal() {
    let s = noisy_two_tone(4);
    let cfg = MfVmdConfig {
        se: SeChoice::Fixed { width: 7 },
        vmd: VmdConfig::with_modes(3),
    };
    let out = mf_vmd(&s, &cfg).unwrap();
    let filtered = mmc_filter(&s, &StructuringElement::flat(7).unwrap()).unwrap();
    assert_eq!(out.filtered, filtered);
    assert_eq!(out.vmd, vmd_decompose(&filtered, &cfg.vmd).unwrap());
    assert_eq!(out.se_width, 7);
}

#[test]
fn clean_signal_matches_plain_vmd() {
    let s = two_tone();
    let plain = vmd_decompose(&s, &VmdConfig::default()).unwrap();
    let mf = mf_vmd(&s, &MfVmdConfig::default()).unwrap();
    for (a, b) in plain.modes.iter().zip(&mf.vmd.modes) {
        assert!(pearson_correlation(&a.u, &b.u).unwrap() >= 0.99);
    }
}

#[test]
fn auto_width_on_noise() {
    let auto = |min_width| {
        mf_vmd(
            &noisy_two_tone(0),
            &MfVmdConfig {
                se: SeChoice::Auto {
                    min_width,
                    max_width: 15,
                    threshold: 0.95,
                },
                vmd: VmdConfig::with_modes(2),
            },
        )
        .unwrap()
    };
    // Width 1 is the identity and always qualifies.
    let out = auto(1);
    assert_eq!((out.se_width, out.se_below_threshold), (1, false));
    let out = auto(2);
    assert!(out.se_below_threshold);
    assert_eq!(out.se_width, 2);
}

#[test]
fn zero_record_runs() {
    let s = Signal::new(vec![0.0; 500], 4e-6).unwrap();
    let out = mf_vmd(&s, &MfVmdConfig { se: SeChoice::auto(9), ..Default::default() }).unwrap();
    assert!(out.vmd.modes.iter().all(|m| m.u.energy() == 0.0));
    assert!(matches!(analyze(&s, &AnalysisConfig::default()), Err(Error::NoEchoFound { .. })));
}

#[test]
fn clean_bolt_echo_found() {
    let spec = BoltEchoSpec::default();
    let s = gen_bolt_echo(&spec).unwrap();
    let (report, _) = analyze(&s, &AnalysisConfig::default()).unwrap();
    assert!((report.echo_time_s - 1.0e-3).abs() <= 5.0 * s.dt(), "{}", report.echo_time_s);
    assert!((report.estimated_length_m - 3.0).abs() <= 0.15);
    assert!(report.confidence >= 3.0);
}

#[test]
fn missing_echo_reported() {
    let spec = BoltEchoSpec {
        echo_amplitude: 0.0,
        ..Default::default()
    };
    let s = gen_bolt_echo(&spec).unwrap();
    match analyze(&s, &AnalysisConfig::default()) {
        Err(Error::NoEchoFound { best_ratio, threshold }) => assert!(best_ratio < threshold),
        other => panic!("expected NoEchoFound, got {other:?}"),
    }
}

#[test]
fn first_of_two_echoes_picked() {
    let spec = BoltEchoSpec::default();
    let base = gen_bolt_echo(&spec).unwrap();
    let late = gen_bolt_echo(&BoltEchoSpec {
        bolt_length_m: 6.0,
        echo_amplitude: 0.25,
        ..Default::default()
    })
    .unwrap();
    let direct = gen_bolt_echo(&BoltEchoSpec {
        echo_amplitude: 0.0,
        ..Default::default()
    })
    .unwrap();
    // Add only the second echo from the 6 m record.
    let s = base.add(&late.sub(&direct).unwrap()).unwrap();
    let (report, _) = analyze(&s, &AnalysisConfig::default()).unwrap();
    assert!((report.echo_time_s - 1.0e-3).abs() <= 5.0 * s.dt(), "{}", report.echo_time_s);
}

#[test]
fn echo_pick_is_scale_invariant() {
    let s = add_noise(&gen_bolt_echo(&BoltEchoSpec::default()).unwrap(), 10.0, 3).unwrap();
    let cfg = MfVmdConfig {
        vmd: VmdConfig::with_modes(3),
        ..Default::default()
    };
    let a = detect_echo(&mf_vmd(&s, &cfg).unwrap().vmd, 0.3e-3, 3.0).unwrap();
    let b = detect_echo(&mf_vmd(&s.scale(250.0).unwrap(), &cfg).unwrap().vmd, 0.3e-3, 3.0).unwrap();
    assert_eq!(a.sample, b.sample);
    assert_eq!(a.mode_index, b.mode_index);
}

#[test]
fn rejects_blank_time_outside_record() {
    let r = vmd_decompose(&two_tone(), &VmdConfig::default()).unwrap();
    assert!(matches!(detect_echo(&r, 0.0, 3.0), Err(Error::InvalidConfig(_))));
    assert!(matches!(detect_echo(&r, 1.0, 3.0), Err(Error::InvalidConfig(_))));
}

#[test]
fn noisy_lengths_are_unbiased() {
    let clean = gen_bolt_echo(&BoltEchoSpec::default()).unwrap();
    let lengths: Vec<f64> = (0..20)
        .filter_map(|seed| analyze(&add_noise(&clean, 5.0, 500 + seed).unwrap(), &AnalysisConfig::default()).ok())
        .map(|(r, _)| r.estimated_length_m)
        .collect();
    assert!(lengths.len() >= 18);
    let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
    assert!((mean - 3.0).abs() <= 0.05, "mean {mean}");
}
