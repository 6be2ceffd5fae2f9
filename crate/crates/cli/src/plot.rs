//! Minimal standalone SVG rendering for waveforms and Hilbert spectra.

use std::fmt::Write as _;

use mfvmd::hilbert::HilbertSpectrum;

use crate::error::{CliError, CliResult};

const WIDTH: f64 = 860.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 48.0;
const PANEL_H: f64 = 130.0;
const PANEL_GAP: f64 = 26.0;

pub struct Series<'a> {
    pub label: String,
    pub t0: f64,
    pub dt: f64,
    pub values: &'a [f64],
}

impl<'a> Series<'a> {
    pub fn of(label: impl Into<String>, s: &'a mfvmd::Signal) -> Self {
        Self {
            label: label.into(),
            t0: s.t0(),
            dt: s.dt(),
            values: s.samples(),
        }
    }
}

/// Vertical annotation drawn across every panel.
pub struct Marker {
    pub time_s: f64,
    pub label: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Roughly `target` round-numbered ticks covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e4).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn header(out: &mut String, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xlo: f64,
    xhi: f64,
    ylo: f64,
    yhi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        self.x0 + (v - self.xlo) / (self.xhi - self.xlo) * self.w
    }

    fn y(&self, v: f64) -> f64 {
        self.y0 + self.h - (v - self.ylo) / (self.yhi - self.ylo) * self.h
    }

    fn axes(&self, out: &mut String, y_label: &str, x_label: Option<&str>) {
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
            self.x0, self.y0, self.w, self.h
        );
        for t in ticks(self.xlo, self.xhi, 8) {
            let x = self.x(t);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#444"/>"##,
                self.y0 + self.h,
                self.y0 + self.h + 4.0
            );
            if x_label.is_some() {
                let _ = writeln!(
                    out,
                    r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                    self.y0 + self.h + 16.0,
                    tick_label(t)
                );
            }
        }
        for t in ticks(self.ylo, self.yhi, 4) {
            let y = self.y(t);
            let _ = writeln!(
                out,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#444"/>"##,
                self.x0 - 4.0,
                self.x0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                self.x0 - 6.0,
                y + 4.0,
                tick_label(t)
            );
        }
        let cy = self.y0 + self.h / 2.0;
        let _ = writeln!(
            out,
            r#"<text x="16" y="{cy:.1}" text-anchor="middle" transform="rotate(-90 16 {cy:.1})">{}</text>"#,
            escape(y_label)
        );
        if let Some(label) = x_label {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                self.x0 + self.w / 2.0,
                self.y0 + self.h + 34.0,
                escape(label)
            );
        }
    }
}

/// Per-pixel min/max decimation so long records stay small.
fn polyline_points(frame: &Frame, s: &Series) -> String {
    let n = s.values.len();
    let ms = |i: usize| (s.t0 + i as f64 * s.dt) * 1e3;
    let mut pts = String::new();
    let columns = frame.w as usize;
    if n <= 4 * columns {
        for (i, &v) in s.values.iter().enumerate() {
            let _ = write!(pts, "{:.2},{:.2} ", frame.x(ms(i)), frame.y(v));
        }
    } else {
        for c in 0..columns {
            let lo = c * n / columns;
            let hi = ((c + 1) * n / columns).max(lo + 1);
            let chunk = &s.values[lo..hi];
            let min = chunk.iter().copied().fold(f64::INFINITY, f64::min);
            let max = chunk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let x = frame.x(ms(lo));
            let _ = write!(pts, "{x:.2},{:.2} {x:.2},{:.2} ", frame.y(min), frame.y(max));
        }
    }
    pts
}

/// Stacked waveform panels sharing a time axis in milliseconds.
pub fn plot_signal(title: &str, panels: &[Series], markers: &[Marker]) -> CliResult<String> {
    if panels.is_empty() {
        return Err(CliError::EmptySeries("panel list"));
    }
    if let Some(p) = panels.iter().find(|p| p.values.is_empty()) {
        return Err(CliError::EmptySeries(if p.label.is_empty() { "series" } else { "a series" }));
    }
    let height = TOP + BOTTOM + panels.len() as f64 * (PANEL_H + PANEL_GAP) - PANEL_GAP;
    let xlo = panels.iter().map(|p| p.t0).fold(f64::INFINITY, f64::min) * 1e3;
    let xhi = panels
        .iter()
        .map(|p| p.t0 + (p.values.len() - 1).max(1) as f64 * p.dt)
        .fold(f64::NEG_INFINITY, f64::max)
        * 1e3;
    let mut out = String::new();
    header(&mut out, height, title);
    for (k, p) in panels.iter().enumerate() {
        let peak = p.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let peak = if peak > 0.0 { peak * 1.05 } else { 1.0 };
        let frame = Frame {
            x0: LEFT,
            y0: TOP + k as f64 * (PANEL_H + PANEL_GAP),
            w: WIDTH - LEFT - RIGHT,
            h: PANEL_H,
            xlo,
            xhi,
            ylo: -peak,
            yhi: peak,
        };
        let last = k + 1 == panels.len();
        frame.axes(&mut out, "amplitude", last.then_some("time (ms)"));
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            frame.x0 + 6.0,
            frame.y0 + 14.0,
            escape(&p.label)
        );
        let _ = writeln!(
            out,
            r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="1" points="{}"/>"##,
            polyline_points(&frame, p).trim_end()
        );
        for m in markers {
            let x = frame.x(m.time_s * 1e3);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#c0392b" stroke-dasharray="4 3"/>"##,
                frame.y0,
                frame.y0 + frame.h
            );
            if k == 0 {
                let _ = writeln!(
                    out,
                    r##"<text x="{:.1}" y="{:.1}" fill="#c0392b">{}</text>"##,
                    x + 4.0,
                    frame.y0 - 4.0,
                    escape(&m.label)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Time-frequency intensity of a Hilbert spectrum, time in ms and
/// frequency in kHz. The frequency axis is cropped to the occupied band.
pub fn plot_spectrum(
    title: &str,
    spec: &HilbertSpectrum,
    time_bins: usize,
    freq_bins: usize,
) -> CliResult<String> {
    if spec.is_empty() || spec.modes.is_empty() {
        return Err(CliError::EmptySeries("Hilbert spectrum"));
    }
    let grid = spec.intensity_grid(time_bins, freq_bins);
    let peak = grid.iter().flatten().copied().fold(0.0, f64::max);
    let bin_khz = spec.nyquist_hz / freq_bins as f64 / 1e3;
    let top_bin = (0..freq_bins)
        .rev()
        .find(|&b| grid.iter().any(|row| row[b] >= 0.01 * peak && peak > 0.0))
        .unwrap_or(freq_bins - 1);
    let fmax = ((top_bin + 1) as f64 * bin_khz * 1.25).min(spec.nyquist_hz / 1e3);
    let (t_first, t_last) = (spec.times[0], *spec.times.last().expect("non-empty"));
    let frame = Frame {
        x0: LEFT,
        y0: TOP,
        w: WIDTH - LEFT - RIGHT,
        h: 3.0 * PANEL_H,
        xlo: t_first * 1e3,
        xhi: t_last.max(t_first + f64::EPSILON) * 1e3,
        ylo: 0.0,
        yhi: fmax,
    };
    let mut out = String::new();
    header(&mut out, TOP + BOTTOM + frame.h, title);
    let tb = grid.len();
    let cell_w = frame.w / tb as f64;
    for (t, row) in grid.iter().enumerate() {
        for (f, &v) in row.iter().enumerate() {
            let lo = f as f64 * bin_khz;
            if peak <= 0.0 || v < 1e-2 * peak || lo >= fmax {
                continue;
            }
            let y_top = frame.y(((f + 1) as f64 * bin_khz).min(fmax));
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#1f5fa8" fill-opacity="{:.3}"/>"##,
                frame.x0 + t as f64 * cell_w,
                y_top,
                cell_w,
                frame.y(lo) - y_top,
                (v / peak).sqrt()
            );
        }
    }
    frame.axes(&mut out, "frequency (kHz)", Some("time (ms)"));
    out.push_str("</svg>\n");
    Ok(out)
}
