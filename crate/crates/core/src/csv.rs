//! Signal CSV format.
//!
//! ```text
//! # dt=<seconds> t0=<seconds>
//! <sample>
//! <sample>
//! ...
//! ```
//!
//! Values are written with 17 significant digits so a write/read cycle is
//! bit-exact. Readers reject non-finite samples.

use std::fmt::Write as _;

use crate::{Error, Result, Signal};

/// Formats a float with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_signal(s: &Signal) -> String {
    let mut out = String::with_capacity(26 * (s.len() + 1));
    let _ = writeln!(out, "# dt={} t0={}", format_f64(s.dt()), format_f64(s.t0()));
    for &x in s.samples() {
        out.push_str(&format_f64(x));
        out.push('\n');
    }
    out
}

fn parse_header(line: &str) -> Result<(f64, f64)> {
    let bad = |reason: &str| Error::Csv {
        line: 1,
        reason: reason.to_string(),
    };
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| bad("expected header `# dt=<seconds> t0=<seconds>`"))?;
    let (mut dt, mut t0) = (None, None);
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| bad("header field without `=`"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| bad(&format!("unparseable header value `{value}`")))?;
        if !value.is_finite() {
            return Err(bad("non-finite header value"));
        }
        match key {
            "dt" => dt = Some(value),
            "t0" => t0 = Some(value),
            other => return Err(bad(&format!("unknown header key `{other}`"))),
        }
    }
    Ok((dt.ok_or_else(|| bad("header lacks dt"))?, t0.unwrap_or(0.0)))
}

pub fn read_signal(text: &str) -> Result<Signal> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::Csv {
        line: 1,
        reason: "empty file".into(),
    })?;
    let (dt, t0) = parse_header(header)?;
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let x: f64 = trimmed.parse().map_err(|_| Error::Csv {
            line: line_no,
            reason: format!("unparseable sample `{trimmed}`"),
        })?;
        if !x.is_finite() {
            return Err(Error::Csv {
                line: line_no,
                reason: "non-finite sample".into(),
            });
        }
        samples.push(x);
    }
    Signal::with_start(samples, dt, t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let s = Signal::new(vec![1.0, -0.5], 1e-6).unwrap();
        let text = write_signal(&s);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "# dt=9.9999999999999995e-7 t0=0.0000000000000000e0"
        );
        assert_eq!(lines.next().unwrap(), "1.0000000000000000e0");
    }

    #[test]
    fn rejects_non_finite() {
        for bad in ["# dt=1e-6 t0=0\n1.0\nNaN\n", "# dt=1e-6 t0=0\ninf\n2\n"] {
            assert!(matches!(read_signal(bad), Err(Error::Csv { .. })));
        }
        assert!(read_signal("# dt=inf t0=0\n1\n2\n").is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_signal("").is_err());
        assert!(read_signal("1.0\n2.0\n").is_err());
        assert!(read_signal("# t0=0\n1\n2\n").is_err());
        assert!(read_signal("# dt=1e-6 t0=0\n1\nabc\n").is_err());
        assert!(matches!(
            read_signal("# dt=1e-6 t0=0\n1\n"),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn t0_optional() {
        let s = read_signal("# dt=0.5\n1\n2\n3\n").unwrap();
        assert_eq!(s.t0(), 0.0);
        assert_eq!(s.dt(), 0.5);
        assert_eq!(s.samples(), &[1.0, 2.0, 3.0]);
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            samples in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 2..64),
            dt in 1e-9f64..1.0,
            t0 in -1.0f64..1.0,
        ) {
            let s = Signal::with_start(samples, dt, t0).unwrap();
            let back = read_signal(&write_signal(&s)).unwrap();
            prop_assert_eq!(back.dt().to_bits(), s.dt().to_bits());
            prop_assert_eq!(back.t0().to_bits(), s.t0().to_bits());
            for (a, b) in back.samples().iter().zip(s.samples()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
