//! Peak/valley features of an aspect-ratio signature.
//!
//! Extrema are found on the circularly smoothed signature using topographic
//! prominence, so an extremum that straddles 359/0 degrees is reported once.
//! [`detect_extrema`] returns every extremum on the circle. [`build_features`]
//! then drops the extremum sitting on the 0-degree reference direction: the
//! reference is where the sweep starts and ends, so a plot of the signature
//! over `[0, 360)` splits that extremum across both ends and it is not
//! counted as a feature.
//!
//! The classifier input is a flat vector of [`FEATURE_DIM`] values laid out
//! as:
//!
//! | columns   | content                                     |
//! |-----------|---------------------------------------------|
//! | 0..360    | signature value at 0..359 degrees           |
//! | 360       | number of peaks                             |
//! | 361       | number of valleys                           |
//! | 362..367  | first five peak angles / 360, zero padded   |
//! | 367..372  | first five valley angles / 360, zero padded |

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signature::{AspectSignature, SIGNATURE_LEN};

pub const FEATURE_DIM: usize = SIGNATURE_LEN + 2 + 10;
pub const N_LOCATIONS: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum ExtremaConfigError {
    #[error("smoothing window must be odd and >= 1, got {0}")]
    Window(usize),
    #[error("min prominence must lie in (0, 1), got {0}")]
    Prominence(f64),
    #[error("min separation must lie in [1, 120] degrees, got {0}")]
    Separation(usize),
    #[error("reference band must be below 90 degrees, got {0}")]
    ReferenceBand(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtremaConfig {
    /// Circular moving-average window, in degrees.
    pub smoothing_window: usize,
    pub min_prominence: f64,
    /// Minimum angular distance between two extrema of the same kind.
    pub min_separation: usize,
    /// Extrema within this many degrees of 0 are the reference extremum and
    /// are left out of the feature counts.
    pub reference_band: usize,
}

impl Default for ExtremaConfig {
    fn default() -> Self {
        Self {
            smoothing_window: 5,
            min_prominence: 0.05,
            min_separation: 15,
            reference_band: 10,
        }
    }
}

impl ExtremaConfig {
    pub fn validate(&self) -> Result<(), ExtremaConfigError> {
        if self.smoothing_window == 0 || self.smoothing_window % 2 == 0 {
            return Err(ExtremaConfigError::Window(self.smoothing_window));
        }
        if !(self.min_prominence > 0.0 && self.min_prominence < 1.0) {
            return Err(ExtremaConfigError::Prominence(self.min_prominence));
        }
        if !(1..=120).contains(&self.min_separation) {
            return Err(ExtremaConfigError::Separation(self.min_separation));
        }
        if self.reference_band >= 90 {
            return Err(ExtremaConfigError::ReferenceBand(self.reference_band));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    /// Location in whole degrees, `0..360`.
    pub angle: usize,
    /// Smoothed signature value at `angle`.
    pub value: f64,
    pub prominence: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub peaks: Vec<Extremum>,
    pub valleys: Vec<Extremum>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternFeatures {
    pub signature: Vec<f64>,
    pub n_peaks: usize,
    pub n_valleys: usize,
    pub locations: [f64; 2 * N_LOCATIONS],
    pub peaks: Vec<Extremum>,
    pub valleys: Vec<Extremum>,
}

impl PatternFeatures {
    /// The flat classifier input, see the module docs for the layout.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(FEATURE_DIM);
        v.extend_from_slice(&self.signature);
        v.push(self.n_peaks as f64);
        v.push(self.n_valleys as f64);
        v.extend_from_slice(&self.locations);
        v
    }
}

/// Column names of the feature vector, in order.
pub fn feature_names() -> Vec<String> {
    let mut names: Vec<String> = (0..SIGNATURE_LEN).map(|t| format!("ar_{t:03}")).collect();
    names.push("n_peaks".into());
    names.push("n_valleys".into());
    names.extend((1..=N_LOCATIONS).map(|k| format!("peak_loc_{k}")));
    names.extend((1..=N_LOCATIONS).map(|k| format!("valley_loc_{k}")));
    names
}

/// Human-readable name of a feature column.
pub fn describe_feature(index: usize) -> String {
    match index {
        i if i < SIGNATURE_LEN => format!("aspect ratio at {i}\u{b0}"),
        360 => "number of peaks".into(),
        361 => "number of valleys".into(),
        i if i < 362 + N_LOCATIONS => format!("location of peak {}", i - 361),
        i if i < FEATURE_DIM => format!("location of valley {}", i - 361 - N_LOCATIONS),
        i => format!("feature {i}"),
    }
}

/// Circular moving average with an odd window.
pub fn smooth_circular(values: &[f64], window: usize) -> Vec<f64> {
    let n = values.len();
    let half = (window / 2) as isize;
    (0..n as isize)
        .map(|i| {
            let sum: f64 = (-half..=half)
                .map(|d| values[(i + d).rem_euclid(n as isize) as usize])
                .sum();
            sum / window as f64
        })
        .collect()
}

pub fn detect_extrema(sig: &AspectSignature, cfg: &ExtremaConfig) -> Extrema {
    detect_extrema_in(sig.values(), cfg)
}

/// Extrema of an arbitrary circular signal (one sample per degree).
pub fn detect_extrema_in(values: &[f64], cfg: &ExtremaConfig) -> Extrema {
    let smoothed = smooth_circular(values, cfg.smoothing_window.max(1));
    let peaks = prominent_maxima(&smoothed, cfg);
    let negated: Vec<f64> = smoothed.iter().map(|v| -v).collect();
    let valleys = prominent_maxima(&negated, cfg)
        .into_iter()
        .map(|e| Extremum {
            value: -e.value,
            ..e
        })
        .collect();
    enforce_alternation(peaks, valleys)
}

pub fn build_features(sig: &AspectSignature, cfg: &ExtremaConfig) -> PatternFeatures {
    let Extrema { peaks, valleys } = detect_extrema(sig, cfg);
    let keep = |e: &Extremum| circular_distance(e.angle, 0, SIGNATURE_LEN) > cfg.reference_band;
    let peaks: Vec<Extremum> = peaks.into_iter().filter(keep).collect();
    let valleys: Vec<Extremum> = valleys.into_iter().filter(keep).collect();

    let mut locations = [0.0; 2 * N_LOCATIONS];
    for (slot, e) in locations[..N_LOCATIONS].iter_mut().zip(&peaks) {
        *slot = e.angle as f64 / SIGNATURE_LEN as f64;
    }
    for (slot, e) in locations[N_LOCATIONS..].iter_mut().zip(&valleys) {
        *slot = e.angle as f64 / SIGNATURE_LEN as f64;
    }
    PatternFeatures {
        signature: sig.values().to_vec(),
        n_peaks: peaks.len(),
        n_valleys: valleys.len(),
        locations,
        peaks,
        valleys,
    }
}

pub(crate) fn circular_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b) % n;
    d.min(n - d)
}

/// Local maxima (plateaus collapse to their middle sample) that pass the
/// prominence and separation filters, sorted by angle.
fn prominent_maxima(s: &[f64], cfg: &ExtremaConfig) -> Vec<Extremum> {
    let n = s.len();
    let at = |i: isize| s[i.rem_euclid(n as isize) as usize];
    let mut candidates = Vec::new();
    for i in 0..n as isize {
        if at(i) <= at(i - 1) {
            continue;
        }
        // walk to the end of a possible plateau
        let mut len = 1;
        while len < n as isize && at(i + len) == at(i) {
            len += 1;
        }
        if len < n as isize && at(i + len) < at(i) {
            let mid = (i + (len - 1) / 2).rem_euclid(n as isize) as usize;
            candidates.push(mid);
        }
    }

    let mut scored: Vec<Extremum> = candidates
        .into_iter()
        .map(|p| Extremum {
            angle: p,
            value: s[p],
            prominence: prominence(s, p),
        })
        .filter(|e| e.prominence >= cfg.min_prominence)
        .collect();

    // strongest first; a weaker extremum too close to a kept one is dropped
    scored.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.angle.cmp(&b.angle)));
    let mut kept: Vec<Extremum> = Vec::new();
    for e in scored {
        if kept
            .iter()
            .all(|k| circular_distance(k.angle, e.angle, n) >= cfg.min_separation)
        {
            kept.push(e);
        }
    }
    kept.sort_by_key(|e| e.angle);
    kept
}

/// Topographic prominence of the sample at `p` on a circular signal.
fn prominence(s: &[f64], p: usize) -> f64 {
    let n = s.len();
    let h = s[p];
    let walk = |step: isize| -> f64 {
        let mut lowest = h;
        for k in 1..n as isize {
            let v = s[(p as isize + step * k).rem_euclid(n as isize) as usize];
            if v > h {
                break;
            }
            lowest = lowest.min(v);
        }
        lowest
    };
    h - walk(-1).max(walk(1))
}

/// Makes peaks and valleys alternate around the circle by dropping the
/// weaker of any two neighbors of the same kind.
fn enforce_alternation(peaks: Vec<Extremum>, valleys: Vec<Extremum>) -> Extrema {
    if peaks.is_empty() || valleys.is_empty() {
        return Extrema { peaks, valleys };
    }
    let mut merged: Vec<(bool, Extremum)> = peaks
        .into_iter()
        .map(|e| (true, e))
        .chain(valleys.into_iter().map(|e| (false, e)))
        .collect();
    merged.sort_by_key(|(is_peak, e)| (e.angle, !is_peak));

    loop {
        let len = merged.len();
        let clash = (0..len).find(|&i| merged[i].0 == merged[(i + 1) % len].0);
        let Some(i) = clash else { break };
        let j = (i + 1) % len;
        let (is_peak, a) = merged[i];
        let b = merged[j].1;
        let drop_first = if is_peak {
            a.value < b.value || (a.value == b.value && a.prominence < b.prominence)
        } else {
            a.value > b.value || (a.value == b.value && a.prominence < b.prominence)
        };
        merged.remove(if drop_first { i } else { j });
    }
    let (peaks, valleys): (Vec<_>, Vec<_>) = merged.into_iter().partition(|(p, _)| *p);
    Extrema {
        peaks: peaks.into_iter().map(|(_, e)| e).collect(),
        valleys: valleys.into_iter().map(|(_, e)| e).collect(),
    }
}
