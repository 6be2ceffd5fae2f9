use std::fmt::Write as _;
use std::path::Path;

use mfvmd::bolt::{analyze, mf_vmd, AnalysisConfig, MfVmdConfig, MfVmdOutput, SeChoice};
use mfvmd::csv::{format_f64, write_signal};
use mfvmd::hilbert::{hilbert_spectrum, HilbertSpectrum};
use mfvmd::morphology::DEFAULT_SE_THRESHOLD;
use mfvmd::synthesis::{add_noise, gen_bolt_echo, gen_piecewise, BoltEchoSpec, PiecewiseToneSpec};
use mfvmd::vmd::{vmd_decompose, InitPolicy, VmdConfig, VmdResult};
use mfvmd::Signal;
use serde::Serialize;
use serde_json::json;

use crate::config::{FileConfig, SCHEMA};
use crate::error::CliResult;
use crate::output::{read_input, OutDir};
use crate::plot::{plot_signal, plot_spectrum, Marker, Series};
use crate::{
    AnalyzeArgs, Cli, Command, DecomposeArgs, InitArg, MfDecomposeArgs, Preset, SeArgs,
    SimulateArgs, SpectrumArgs, VmdArgs,
};

const NOISY_PRESET_SNR_DB: f64 = 5.0;

struct Ctx {
    file: FileConfig,
    plots: bool,
    out: OutDir,
}

pub fn run(cli: Cli) -> CliResult<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let plots = !cli.no_plot && file.plots.unwrap_or(true);
    let input = match &cli.command {
        Command::Simulate(_) => None,
        Command::Decompose(a) => Some(a.input.as_path()),
        Command::MfDecompose(a) => Some(a.input.as_path()),
        Command::Spectrum(a) => Some(a.input.as_path()),
        Command::Analyze(a) => Some(a.input.as_path()),
    };
    // Fail on a missing input before touching the output directory.
    let signal = input.map(read_input).transpose()?;
    let out = OutDir::create(cli.out_dir.clone(), input)?;
    let mut ctx = Ctx { file, plots, out };
    let input_name = input.map(|p| p.display().to_string());
    let (name, seed, config) = match cli.command {
        Command::Simulate(a) => simulate(&mut ctx, a)?,
        Command::Decompose(a) => decompose(&mut ctx, signal.expect("input"), a)?,
        Command::MfDecompose(a) => mf_decompose(&mut ctx, signal.expect("input"), a)?,
        Command::Spectrum(a) => spectrum(&mut ctx, signal.expect("input"), a)?,
        Command::Analyze(a) => analyze_cmd(&mut ctx, signal.expect("input"), a)?,
    };
    let outputs = ctx.out.written();
    let prov = json!({
        "schema": SCHEMA,
        "tool": "mfvmd",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "input": input_name,
        "seed": seed,
        "config": config,
        "outputs": outputs,
    });
    ctx.out.write_json("provenance.json", &prov)?;
    println!("wrote {} files to {}", outputs.len() + 1, cli.out_dir.display());
    Ok(())
}

type Done = (&'static str, Option<u64>, serde_json::Value);

fn simulate(ctx: &mut Ctx, a: SimulateArgs) -> CliResult<Done> {
    let f = &ctx.file.simulate;
    let seed = a.seed.or(ctx.file.seed).unwrap_or(0);
    let default_snr = matches!(a.preset, Preset::Eq10Noisy).then_some(NOISY_PRESET_SNR_DB);
    let snr = a.snr_db.or(f.snr_db).or(default_snr);
    let (clean, spec) = match a.preset {
        Preset::Eq10 | Preset::Eq10Noisy => {
            let spec = PiecewiseToneSpec::two_tone();
            (gen_piecewise(&spec)?, json!(spec))
        }
        Preset::Bolt => {
            let defaults = BoltEchoSpec::default();
            let spec = BoltEchoSpec {
                echo_amplitude: a.echo_amplitude.or(f.echo_amplitude).unwrap_or(defaults.echo_amplitude),
                bolt_length_m: a.bolt_length.or(f.bolt_length_m).unwrap_or(defaults.bolt_length_m),
                wave_velocity_m_s: a
                    .velocity
                    .or(f.wave_velocity_m_s)
                    .unwrap_or(defaults.wave_velocity_m_s),
                ..defaults
            };
            (gen_bolt_echo(&spec)?, json!(spec))
        }
    };
    let signal = match snr {
        Some(db) => add_noise(&clean, db, seed)?,
        None => clean,
    };
    ctx.out.write(&a.name, write_signal(&signal).as_bytes())?;
    if ctx.plots {
        let svg = plot_signal(&format!("{:?} preset", a.preset), &[Series::of("signal", &signal)], &[])?;
        ctx.out.write(&svg_name(&a.name), svg.as_bytes())?;
    }
    Ok((
        "simulate",
        snr.map(|_| seed),
        json!({ "preset": a.preset, "snr_db": snr, "spec": spec }),
    ))
}

fn svg_name(csv_name: &str) -> String {
    let stem = Path::new(csv_name).file_stem().map_or("signal".into(), |s| s.to_string_lossy().into_owned());
    format!("{stem}.svg")
}

fn resolve_vmd(file: &FileConfig, a: &VmdArgs, default_modes: usize) -> (VmdConfig, Option<u64>) {
    let f = &file.vmd;
    let d = VmdConfig::with_modes(default_modes);
    let seed = a.seed.or(file.seed);
    let init = match a.init {
        Some(InitArg::Uniform) => InitPolicy::Uniform,
        Some(InitArg::Zero) => InitPolicy::Zero,
        Some(InitArg::Random) => InitPolicy::Random { seed: seed.unwrap_or(0) },
        None => match (f.init, a.seed) {
            (Some(InitPolicy::Random { .. }), Some(s)) => InitPolicy::Random { seed: s },
            (Some(p), _) => p,
            (None, _) => d.init,
        },
    };
    let seed = match init {
        InitPolicy::Random { seed } => Some(seed),
        _ => None,
    };
    (
        VmdConfig {
            modes: a.modes.or(f.modes).unwrap_or(d.modes),
            alpha: a.alpha.or(f.alpha).unwrap_or(d.alpha),
            tau: a.tau.or(f.tau).unwrap_or(d.tau),
            tol: a.tol.or(f.tol).unwrap_or(d.tol),
            max_iters: a.max_iters.or(f.max_iters).unwrap_or(d.max_iters),
            init,
        },
        seed,
    )
}

fn resolve_se(file: &FileConfig, a: &SeArgs) -> Option<SeChoice> {
    if let Some(width) = a.se_width {
        return Some(SeChoice::Fixed { width });
    }
    if let Some(max_width) = a.se_auto {
        return Some(SeChoice::Auto {
            min_width: 1,
            max_width,
            threshold: a.se_threshold.unwrap_or(DEFAULT_SE_THRESHOLD),
        });
    }
    file.se.clone()
}

#[derive(Serialize)]
struct Summary<'a> {
    omegas_hz: Vec<f64>,
    iterations: usize,
    converged: bool,
    final_change: f64,
    residual_norm: f64,
    imag_leakage: f64,
    diagnostics: &'a [mfvmd::vmd::VmdDiagnostic],
    #[serde(skip_serializing_if = "Option::is_none")]
    se_width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    se_below_threshold: Option<bool>,
}

fn summary<'a>(r: &'a VmdResult, mf: Option<&MfVmdOutput>) -> Summary<'a> {
    Summary {
        omegas_hz: r.omegas_hz(),
        iterations: r.iterations,
        converged: r.converged,
        final_change: r.final_change,
        residual_norm: r.residual_norm(),
        imag_leakage: r.imag_leakage,
        diagnostics: &r.diagnostics,
        se_width: mf.map(|m| m.se_width),
        se_below_threshold: mf.map(|m| m.se_below_threshold),
    }
}

fn write_modes(ctx: &mut Ctx, title: &str, input: &Signal, r: &VmdResult, filtered: Option<&Signal>) -> CliResult<()> {
    for (k, m) in r.modes.iter().enumerate() {
        ctx.out.write(&format!("mode_{}.csv", k + 1), write_signal(&m.u).as_bytes())?;
    }
    ctx.out.write("residual.csv", write_signal(&r.residual).as_bytes())?;
    if let Some(f) = filtered {
        ctx.out.write("filtered.csv", write_signal(f).as_bytes())?;
    }
    if ctx.plots {
        let mut panels = vec![Series::of("input", input)];
        if let Some(f) = filtered {
            panels.push(Series::of("filtered", f));
        }
        for (k, m) in r.modes.iter().enumerate() {
            panels.push(Series::of(format!("IMF{} ({:.2} kHz)", k + 1, m.omega_hz / 1e3), &m.u));
        }
        let svg = plot_signal(title, &panels, &[])?;
        ctx.out.write("modes.svg", svg.as_bytes())?;
    }
    Ok(())
}

fn decompose(ctx: &mut Ctx, s: Signal, a: DecomposeArgs) -> CliResult<Done> {
    let (cfg, seed) = resolve_vmd(&ctx.file, &a.vmd, VmdConfig::default().modes);
    let r = vmd_decompose(&s, &cfg)?;
    write_modes(ctx, "VMD modes", &s, &r, None)?;
    ctx.out.write_json("summary.json", &summary(&r, None))?;
    Ok(("decompose", seed, json!({ "vmd": cfg })))
}

fn mf_config(ctx: &Ctx, vmd: &VmdArgs, se: &SeArgs, default_modes: usize) -> (MfVmdConfig, Option<u64>) {
    let (vmd, seed) = resolve_vmd(&ctx.file, vmd, default_modes);
    let se = resolve_se(&ctx.file, se).unwrap_or_default();
    (MfVmdConfig { se, vmd }, seed)
}

fn mf_decompose(ctx: &mut Ctx, s: Signal, a: MfDecomposeArgs) -> CliResult<Done> {
    let (cfg, seed) = mf_config(ctx, &a.vmd, &a.se, VmdConfig::default().modes);
    let out = mf_vmd(&s, &cfg)?;
    write_modes(ctx, "MF-VMD modes", &s, &out.vmd, Some(&out.filtered))?;
    ctx.out.write_json("summary.json", &summary(&out.vmd, Some(&out)))?;
    Ok(("mf-decompose", seed, json!({ "mf_vmd": cfg })))
}

fn spectrum_csv(spec: &HilbertSpectrum, k: usize) -> String {
    let m = &spec.modes[k];
    let mut out = String::from("time_s,freq_hz,amplitude\n");
    for (i, t) in spec.times.iter().enumerate() {
        let f = m.freqs[i].map(format_f64).unwrap_or_default();
        let _ = writeln!(out, "{},{f},{}", format_f64(*t), format_f64(m.amps[i]));
    }
    out
}

fn spectrum(ctx: &mut Ctx, s: Signal, a: SpectrumArgs) -> CliResult<Done> {
    let (vmd_cfg, seed) = resolve_vmd(&ctx.file, &a.vmd, VmdConfig::default().modes);
    let se = resolve_se(&ctx.file, &a.se);
    let (result, se_width) = match &se {
        Some(se) => {
            let out = mf_vmd(&s, &MfVmdConfig { se: se.clone(), vmd: vmd_cfg.clone() })?;
            (out.vmd, Some(out.se_width))
        }
        None => (vmd_decompose(&s, &vmd_cfg)?, None),
    };
    let spec = hilbert_spectrum(&result.modes)?;
    for k in 0..spec.modes.len() {
        ctx.out.write(&format!("hilbert_mode_{}.csv", k + 1), spectrum_csv(&spec, k).as_bytes())?;
    }
    let ridges = spec.ridges(100.0, 3000.0, result.modes.len());
    let transitions: Vec<f64> = spec.transitions(1).iter().map(|&i| spec.times[i]).collect();
    ctx.out.write_json(
        "summary.json",
        &json!({
            "omegas_hz": result.omegas_hz(),
            "iterations": result.iterations,
            "converged": result.converged,
            "se_width": se_width,
            "ridges": ridges,
            "transition_times_s": transitions,
        }),
    )?;
    if ctx.plots {
        let svg = plot_spectrum("Hilbert spectrum", &spec, a.time_bins, a.freq_bins)?;
        ctx.out.write("spectrum.svg", svg.as_bytes())?;
    }
    Ok((
        "spectrum",
        seed,
        json!({ "vmd": vmd_cfg, "se": se, "time_bins": a.time_bins, "freq_bins": a.freq_bins }),
    ))
}

fn analyze_cmd(ctx: &mut Ctx, s: Signal, a: AnalyzeArgs) -> CliResult<Done> {
    let d = AnalysisConfig::default();
    let (mf, seed) = mf_config(ctx, &a.vmd, &a.se, d.mf_vmd.vmd.modes);
    let f = &ctx.file.analysis;
    let cfg = AnalysisConfig {
        mf_vmd: mf,
        velocity_m_s: a.velocity.or(f.velocity_m_s).unwrap_or(d.velocity_m_s),
        blank_time_s: a.blank_time.or(f.blank_time_s).unwrap_or(d.blank_time_s),
        min_peak_ratio: a.min_ratio.or(f.min_peak_ratio).unwrap_or(d.min_peak_ratio),
    };
    let (report, out) = analyze(&s, &cfg)?;
    ctx.out.write_json("report.json", &report)?;
    if ctx.plots {
        let mut panels = vec![Series::of("record", &s), Series::of("filtered", &out.filtered)];
        for (k, m) in out.vmd.modes.iter().enumerate() {
            let star = if k == report.carrier_mode_index { " *" } else { "" };
            panels.push(Series::of(format!("IMF{}{star}", k + 1), &m.u));
        }
        let markers = [
            Marker {
                time_s: s.t0() + cfg.blank_time_s,
                label: "blank".into(),
            },
            Marker {
                time_s: s.t0() + report.echo_time_s,
                label: format!("echo {:.3} ms, L = {:.3} m", report.echo_time_s * 1e3, report.estimated_length_m),
            },
        ];
        let svg = plot_signal("Bolt echo analysis", &panels, &markers)?;
        ctx.out.write("analysis.svg", svg.as_bytes())?;
    }
    println!(
        "echo_time_s={} estimated_length_m={:.4} mode={}",
        report.echo_time_s,
        report.estimated_length_m,
        report.carrier_mode_index + 1
    );
    Ok(("analyze", seed, json!({ "analysis": cfg })))
}
