//! Grey-level morphology for 1-D signals.
//!
//! Erosion and dilation follow the Minkowski forms
//!
//! ```text
//! (s ⊖ g)(n) = min_m { s(n + m − o) − g(m) }
//! (s ⊕ g)(n) = max_m { s(n − m + o) + g(m) }
//! ```
//!
//! where `o` is the structuring element's origin. The signal is
//! replicate-extended by `M − 1` samples on each side, so every output has
//! the input length. With `o = 0` the forms are the textbook leading-edge
//! ones; flat elements default to the centered origin. Opening and closing
//! do not depend on the origin.

use std::collections::VecDeque;

use serde::Serialize;

use crate::signal::pearson;
use crate::{Error, Result, Signal};

/// Finite structuring element `g(m)`, `m = 0..M`, with an origin index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuringElement {
    values: Vec<f64>,
    origin: usize,
    flat: bool,
}

impl StructuringElement {
    /// All-zero element of width `m` with centered origin.
    pub fn flat(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidConfig("structuring element width must be >= 1".into()));
        }
        Ok(Self {
            values: vec![0.0; width],
            origin: (width - 1) / 2,
            flat: true,
        })
    }

    /// Element with the given values and centered origin.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let origin = values.len().saturating_sub(1) / 2;
        Self::with_origin(values, origin)
    }

    pub fn with_origin(values: Vec<f64>, origin: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("structuring element width must be >= 1".into()));
        }
        if origin >= values.len() {
            return Err(Error::InvalidConfig(format!(
                "origin {origin} outside element of width {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let flat = values.iter().all(|&v| v == 0.0);
        Ok(Self {
            values,
            origin,
            flat,
        })
    }

    pub fn width(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn is_flat(&self) -> bool {
        self.flat
    }

    /// Mirror image `g(M − 1 − m)` with the origin mirrored as well.
    pub fn reflect(&self) -> Self {
        Self {
            values: self.values.iter().rev().copied().collect(),
            origin: self.width() - 1 - self.origin,
            flat: self.flat,
        }
    }
}

fn check_width(s: &Signal, g: &StructuringElement) -> Result<()> {
    if g.width() > s.len() {
        Err(Error::SeWiderThanSignal {
            width: g.width(),
            len: s.len(),
        })
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Extremum {
    Min,
    Max,
}

impl Extremum {
    fn keeps(self, kept: f64, incoming: f64) -> bool {
        match self {
            Extremum::Min => kept < incoming,
            Extremum::Max => kept > incoming,
        }
    }
}

/// `out[n] = extremum of x[clamp(n + start + j)]` for `j = 0..width`, via a
/// monotone deque over the replicate-extended signal.
fn sliding_extremum(x: &[f64], width: usize, start: isize, kind: Extremum) -> Vec<f64> {
    let n = x.len() as isize;
    let at = |i: isize| x[i.clamp(0, n - 1) as usize];
    let mut out = Vec::with_capacity(x.len());
    let mut deque: VecDeque<(isize, f64)> = VecDeque::with_capacity(width + 1);
    let w = width as isize;
    let push = |dq: &mut VecDeque<(isize, f64)>, i: isize| {
        let v = at(i);
        while dq.back().is_some_and(|&(_, b)| !kind.keeps(b, v)) {
            dq.pop_back();
        }
        dq.push_back((i, v));
    };
    for i in start..start + w - 1 {
        push(&mut deque, i);
    }
    for k in 0..n {
        let hi = k + start + w - 1;
        push(&mut deque, hi);
        while deque.front().is_some_and(|&(i, _)| i < k + start) {
            deque.pop_front();
        }
        out.push(deque.front().map(|&(_, v)| v).unwrap_or_else(|| at(hi)));
    }
    out
}

fn erode_raw(x: &[f64], g: &StructuringElement) -> Vec<f64> {
    let o = g.origin as isize;
    if g.flat {
        return sliding_extremum(x, g.width(), -o, Extremum::Min);
    }
    let n = x.len() as isize;
    (0..n)
        .map(|i| {
            g.values
                .iter()
                .enumerate()
                .map(|(m, gm)| x[(i + m as isize - o).clamp(0, n - 1) as usize] - gm)
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

fn dilate_raw(x: &[f64], g: &StructuringElement) -> Vec<f64> {
    let o = g.origin as isize;
    if g.flat {
        let w = g.width() as isize;
        return sliding_extremum(x, g.width(), o - (w - 1), Extremum::Max);
    }
    let n = x.len() as isize;
    (0..n)
        .map(|i| {
            g.values
                .iter()
                .enumerate()
                .map(|(m, gm)| x[(i - m as isize + o).clamp(0, n - 1) as usize] + gm)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

fn open_raw(x: &[f64], g: &StructuringElement) -> Vec<f64> {
    dilate_raw(&erode_raw(x, g), g)
}

fn close_raw(x: &[f64], g: &StructuringElement) -> Vec<f64> {
    erode_raw(&dilate_raw(x, g), g)
}

fn mmc_raw(x: &[f64], g: &StructuringElement) -> Vec<f64> {
    let oc = close_raw(&open_raw(x, g), g);
    let co = open_raw(&close_raw(x, g), g);
    oc.iter().zip(&co).map(|(a, b)| 0.5 * (a + b)).collect()
}

pub fn erode(s: &Signal, g: &StructuringElement) -> Result<Signal> {
    check_width(s, g)?;
    s.like(erode_raw(s.samples(), g))
}

pub fn dilate(s: &Signal, g: &StructuringElement) -> Result<Signal> {
    check_width(s, g)?;
    s.like(dilate_raw(s.samples(), g))
}

/// Erosion followed by dilation. Removes positive peaks narrower than the element.
pub fn open(s: &Signal, g: &StructuringElement) -> Result<Signal> {
    check_width(s, g)?;
    s.like(open_raw(s.samples(), g))
}

/// Dilation followed by erosion. Fills negative troughs narrower than the element.
pub fn close(s: &Signal, g: &StructuringElement) -> Result<Signal> {
    check_width(s, g)?;
    s.like(close_raw(s.samples(), g))
}

/// Combined open-close / close-open filter: `((s∘g)•g + (s•g)∘g) / 2`.
pub fn mmc_filter(s: &Signal, g: &StructuringElement) -> Result<Signal> {
    check_width(s, g)?;
    s.like(mmc_raw(s.samples(), g))
}

pub const DEFAULT_SE_THRESHOLD: f64 = 0.95;

/// Outcome of [`select_se_width`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeSelection {
    pub width: usize,
    /// Set when no width reached the threshold and the smallest was returned.
    pub below_threshold: bool,
    /// `(width, correlation)` for every candidate, in the order given.
    pub correlations: Vec<(usize, f64)>,
}

/// Largest flat width whose MMC output keeps correlation with the input at or
/// above `threshold`. Falls back to the smallest candidate (flagged) when
/// none qualifies.
pub fn select_se_width(
    s: &Signal,
    widths: impl IntoIterator<Item = usize>,
    threshold: f64,
) -> Result<SeSelection> {
    let widths: Vec<usize> = widths.into_iter().collect();
    if widths.is_empty() {
        return Err(Error::EmptyWidthRange);
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "correlation threshold must lie in (0, 1), got {threshold}"
        )));
    }
    if let Some(&w) = widths.iter().find(|&&w| w == 0 || w > s.len()) {
        return Err(if w == 0 {
            Error::InvalidConfig("structuring element width must be >= 1".into())
        } else {
            Error::SeWiderThanSignal { width: w, len: s.len() }
        });
    }
    let constant = s.samples().iter().all(|&x| x == s.samples()[0]);
    let mut correlations = Vec::with_capacity(widths.len());
    for &w in &widths {
        let r = if constant {
            1.0
        } else {
            pearson(s.samples(), &mmc_raw(s.samples(), &StructuringElement::flat(w)?))?
        };
        correlations.push((w, r));
    }
    let best = correlations
        .iter()
        .filter(|(_, r)| *r >= threshold)
        .map(|&(w, _)| w)
        .max();
    Ok(match best {
        Some(width) => SeSelection {
            width,
            below_threshold: false,
            correlations,
        },
        None => SeSelection {
            width: *widths.iter().min().expect("non-empty"),
            below_threshold: true,
            correlations,
        },
    })
}
