//! Rotating-line aspect-ratio signatures.
//!
//! A line (or ray) anchored at the foreground centroid is swept through 360
//! one-degree steps. At every angle the extent of the shape along it is
//! measured, and the whole list is divided by the largest extent seen, so
//! the result lies in `[0, 1]` and touches 1 at least once.
//!
//! Extents are measured by marching along the line in quarter-pixel steps
//! and testing the bilinear coverage of the mask against 0.5. Only the
//! outermost foreground samples count, so a non-convex shape contributes its
//! envelope rather than the sum of its interior pieces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mask::{MaskError, ShapeMask};

/// Number of samples in a signature (one per degree).
pub const SIGNATURE_LEN: usize = 360;
/// Marching step along the line, in pixels.
pub const MARCH_STEP: f64 = 0.25;

#[derive(Debug, Error)]
pub enum SignatureError {
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error("every chord has zero length")]
    DegenerateShape,
    #[error("signature needs {SIGNATURE_LEN} values, got {0}")]
    Length(usize),
    #[error("signature value {value} at {theta} degrees is outside [0, 1] or not finite")]
    OutOfRange { theta: usize, value: f64 },
    #[error("signature maximum is {0}, expected exactly 1")]
    NotNormalized(f64),
}

/// How the extent along the rotating line is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChordMode {
    /// Distance from the centroid to the farthest foreground sample along
    /// the ray at angle theta. Not 180-degree periodic.
    #[default]
    Ray,
    /// Span between the two outermost foreground samples on the full line
    /// through the centroid. 180-degree periodic by construction.
    #[serde(alias = "full_line")]
    Line,
}

impl std::str::FromStr for ChordMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ray" => Ok(ChordMode::Ray),
            "line" | "full_line" => Ok(ChordMode::Line),
            other => Err(format!("unknown chord mode {other:?} (expected ray|line)")),
        }
    }
}

impl std::fmt::Display for ChordMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChordMode::Ray => "ray",
            ChordMode::Line => "line",
        })
    }
}

/// Which way theta = 0 points on screen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleZero {
    /// Toward the bottom row of the image (increasing row index).
    #[default]
    Down,
    /// Toward the top row of the image.
    Up,
}

/// Angle convention for signatures. Theta always increases counterclockwise
/// as seen on screen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleConvention {
    pub zero: AngleZero,
}

impl AngleConvention {
    /// Unit direction for `theta_deg` in image coordinates (x right, y down).
    pub fn direction(&self, theta_deg: f64) -> (f64, f64) {
        let (s, c) = theta_deg.to_radians().sin_cos();
        match self.zero {
            AngleZero::Down => (s, c),
            AngleZero::Up => (-s, -c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AspectSignature {
    values: Vec<f64>,
    pub centroid: (f64, f64),
    pub max_chord: f64,
    pub mode: ChordMode,
    /// Set when the mask had more than one 8-connected foreground component.
    pub multi_component: bool,
}

impl AspectSignature {
    /// Wraps already-normalized values, checking range and `max == 1`.
    pub fn from_values(values: Vec<f64>) -> Result<Self, SignatureError> {
        if values.len() != SIGNATURE_LEN {
            return Err(SignatureError::Length(values.len()));
        }
        let mut max = f64::NEG_INFINITY;
        for (theta, &v) in values.iter().enumerate() {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(SignatureError::OutOfRange { theta, value: v });
            }
            max = max.max(v);
        }
        if max != 1.0 {
            return Err(SignatureError::NotNormalized(max));
        }
        Ok(Self {
            values,
            centroid: (0.0, 0.0),
            max_chord: 1.0,
            mode: ChordMode::Ray,
            multi_component: false,
        })
    }

    /// Normalizes raw non-negative chord lengths by their maximum.
    pub fn from_chords(chords: Vec<f64>) -> Result<Self, SignatureError> {
        if chords.len() != SIGNATURE_LEN {
            return Err(SignatureError::Length(chords.len()));
        }
        let max_chord = chords.iter().copied().fold(0.0, f64::max);
        if !(max_chord > 0.0 && max_chord.is_finite()) {
            return Err(SignatureError::DegenerateShape);
        }
        let values = chords.iter().map(|c| c / max_chord).collect();
        Ok(Self {
            values,
            centroid: (0.0, 0.0),
            max_chord,
            mode: ChordMode::Ray,
            multi_component: false,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, theta: usize) -> f64 {
        self.values[theta % SIGNATURE_LEN]
    }

    /// CSV with header `theta,aspect_ratio` and one row per degree.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,aspect_ratio\n");
        for (theta, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{theta},{v}\n"));
        }
        out
    }
}

/// Arithmetic mean of the foreground pixel centers.
pub fn compute_centroid(mask: &ShapeMask) -> Result<(f64, f64), MaskError> {
    let (mut sx, mut sy, mut n) = (0u64, 0u64, 0u64);
    for (x, y) in mask.foreground() {
        sx += x as u64;
        sy += y as u64;
        n += 1;
    }
    if n == 0 {
        return Err(MaskError::EmptyMask);
    }
    Ok((sx as f64 / n as f64, sy as f64 / n as f64))
}

/// Extent of the shape along the line through `centroid` at `theta` degrees
/// under the default angle convention.
///
/// Builds a [`ChordSampler`] per call; use one sampler directly when
/// measuring many angles.
pub fn chord_length(mask: &ShapeMask, centroid: (f64, f64), theta: f64, mode: ChordMode) -> f64 {
    chord_length_with(mask, centroid, theta, mode, AngleConvention::default())
}

pub fn chord_length_with(
    mask: &ShapeMask,
    centroid: (f64, f64),
    theta: f64,
    mode: ChordMode,
    convention: AngleConvention,
) -> f64 {
    ChordSampler::new(mask, convention).map_or(0.0, |s| s.chord(centroid, theta, mode))
}

/// Chord measurements against one mask.
pub struct ChordSampler<'a> {
    mask: &'a ShapeMask,
    bounds: SampleBounds,
    convention: AngleConvention,
}

impl<'a> ChordSampler<'a> {
    /// `None` when the mask has no foreground.
    pub fn new(mask: &'a ShapeMask, convention: AngleConvention) -> Option<Self> {
        Some(Self {
            mask,
            bounds: SampleBounds::of(mask)?,
            convention,
        })
    }

    pub fn chord(&self, centroid: (f64, f64), theta: f64, mode: ChordMode) -> f64 {
        let dir = self.convention.direction(theta);
        let inside =
            |t: f64| self.mask.coverage(centroid.0 + t * dir.0, centroid.1 + t * dir.1) >= 0.5;
        let hit = |k: i64| inside(k as f64 * MARCH_STEP);
        // Beyond these step indices every sample is outside the support of
        // the bilinear interpolant, so scanning inward from them finds the
        // same outermost hit as a full outward march.
        let k_fwd = self.bounds.exit_steps(centroid, dir);
        let k_back = self.bounds.exit_steps(centroid, (-dir.0, -dir.1));
        match mode {
            ChordMode::Ray => (0..=k_fwd)
                .rev()
                .find(|&k| hit(k))
                .map_or(0.0, |k| refine_crossing(&inside, k, 1)),
            ChordMode::Line => {
                let Some(k_max) = (-k_back..=k_fwd).rev().find(|&k| hit(k)) else {
                    return 0.0;
                };
                let k_min = (-k_back..=k_max).find(|&k| hit(k)).unwrap_or(k_max);
                refine_crossing(&inside, k_max, 1) - refine_crossing(&inside, k_min, -1)
            }
        }
    }
}

/// Bisects the boundary crossing between the hit at step `k` and the miss
/// at step `k + dir`; returns its signed distance along the ray.
fn refine_crossing(inside: &impl Fn(f64) -> bool, k: i64, dir: i64) -> f64 {
    let mut a = k as f64 * MARCH_STEP;
    let mut b = (k + dir) as f64 * MARCH_STEP;
    for _ in 0..12 {
        let mid = 0.5 * (a + b);
        if inside(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// Computes the signature under the default angle convention.
pub fn aspect_signature(mask: &ShapeMask, mode: ChordMode) -> Result<AspectSignature, SignatureError> {
    aspect_signature_with(mask, mode, AngleConvention::default())
}

pub fn aspect_signature_with(
    mask: &ShapeMask,
    mode: ChordMode,
    convention: AngleConvention,
) -> Result<AspectSignature, SignatureError> {
    mask.validate()?;
    let centroid = compute_centroid(mask)?;
    let sampler = ChordSampler::new(mask, convention).ok_or(MaskError::EmptyMask)?;
    let chords: Vec<f64> = (0..SIGNATURE_LEN)
        .map(|theta| sampler.chord(centroid, theta as f64, mode))
        .collect();
    let mut sig = AspectSignature::from_chords(chords)?;
    sig.centroid = centroid;
    sig.mode = mode;
    sig.multi_component = mask.component_count() > 1;
    Ok(sig)
}

/// Region outside of which the bilinear coverage of the mask is zero.
struct SampleBounds {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl SampleBounds {
    fn of(mask: &ShapeMask) -> Option<Self> {
        let (x0, y0, x1, y1) = mask.bounding_box()?;
        Some(Self {
            x0: x0 as f64 - 1.0,
            y0: y0 as f64 - 1.0,
            x1: x1 as f64 + 1.0,
            y1: y1 as f64 + 1.0,
        })
    }

    /// Number of whole marching steps from `origin` along `dir` until the
    /// ray has certainly left the region.
    fn exit_steps(&self, origin: (f64, f64), dir: (f64, f64)) -> i64 {
        let axis = |o: f64, d: f64, lo: f64, hi: f64| -> f64 {
            if d > 1e-12 {
                (hi - o) / d
            } else if d < -1e-12 {
                (lo - o) / d
            } else {
                f64::INFINITY
            }
        };
        let tx = axis(origin.0, dir.0, self.x0, self.x1);
        let ty = axis(origin.1, dir.1, self.y0, self.y1);
        let t = tx.min(ty);
        if !t.is_finite() || t < 0.0 {
            // origin outside the region: fall back to the far corner distance
            let far = [
                (self.x0, self.y0),
                (self.x1, self.y0),
                (self.x0, self.y1),
                (self.x1, self.y1),
            ]
            .iter()
            .map(|&(x, y)| ((x - origin.0).powi(2) + (y - origin.1).powi(2)).sqrt())
            .fold(0.0, f64::max);
            return (far / MARCH_STEP).ceil() as i64 + 1;
        }
        (t / MARCH_STEP).ceil() as i64 + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(n: usize, cx: f64, cy: f64, r: f64) -> ShapeMask {
        ShapeMask::from_fn(n, n, |x, y| {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            dx * dx + dy * dy <= r * r
        })
    }

    #[test]
    fn centroid_examples() {
        let full = ShapeMask::raw(3, 3, vec![true; 9]).unwrap();
        assert_eq!(compute_centroid(&full).unwrap(), (1.0, 1.0));

        let single = ShapeMask::from_fn(16, 16, |x, y| (x, y) == (5, 7));
        assert_eq!(compute_centroid(&single).unwrap(), (5.0, 7.0));

        let l = ShapeMask::from_fn(2, 2, |x, y| (x, y) != (1, 1));
        let (cx, cy) = compute_centroid(&l).unwrap();
        assert!((cx - 1.0 / 3.0).abs() < 1e-15 && (cy - 1.0 / 3.0).abs() < 1e-15);

        let empty = ShapeMask::raw(8, 8, vec![false; 64]).unwrap();
        assert!(matches!(compute_centroid(&empty), Err(MaskError::EmptyMask)));
    }

    #[test]
    fn disk_chords_match_radius_and_diameter() {
        // centered between pixels so the digitized boundary is symmetric
        let m = disk(128, 63.5, 63.5, 50.0);
        let c = compute_centroid(&m).unwrap();
        let mut line_sum = 0.0;
        for theta in 0..360 {
            let ray = chord_length(&m, c, theta as f64, ChordMode::Ray);
            assert!((ray - 50.0).abs() <= 0.5, "theta {theta}: {ray}");
            // both ends carry the staircase error of the digitized rim
            let line = chord_length(&m, c, theta as f64, ChordMode::Line);
            assert!((line - 100.0).abs() <= 1.0, "theta {theta}: {line}");
            line_sum += line;
        }
        assert!((line_sum / 360.0 - 100.0).abs() <= 0.5);
    }

    #[test]
    fn ray_that_misses_has_zero_length() {
        // ring: centroid sits in the hole, every ray still hits the ring
        let ring = ShapeMask::from_fn(64, 64, |x, y| {
            let d = ((x as f64 - 32.0).powi(2) + (y as f64 - 32.0).powi(2)).sqrt();
            (20.0..=25.0).contains(&d)
        });
        let c = compute_centroid(&ring).unwrap();
        assert!(chord_length(&ring, c, 0.0, ChordMode::Ray) > 20.0);

        // two blobs left and right: rays straight down miss both
        let pair = ShapeMask::from_fn(64, 64, |x, y| (y > 28 && y < 36) && (x < 10 || x > 54));
        let c = compute_centroid(&pair).unwrap();
        assert_eq!(chord_length(&pair, c, 0.0, ChordMode::Ray), 0.0);
        assert_eq!(chord_length(&pair, c, 0.0, ChordMode::Line), 0.0);
        assert!(chord_length(&pair, c, 90.0, ChordMode::Line) > 60.0);
    }

    #[test]
    fn angle_convention_directions() {
        let down = AngleConvention::default();
        let (x, y) = down.direction(0.0);
        assert!(x.abs() < 1e-12 && (y - 1.0).abs() < 1e-12);
        let (x, y) = down.direction(90.0);
        assert!((x - 1.0).abs() < 1e-12 && y.abs() < 1e-12);
        let up = AngleConvention { zero: AngleZero::Up };
        let (x, y) = up.direction(90.0);
        assert!((x + 1.0).abs() < 1e-12 && y.abs() < 1e-12);
    }

    #[test]
    fn signature_is_normalized_and_deterministic() {
        let m = ShapeMask::from_fn(64, 64, |x, y| (10..50).contains(&x) && (20..40).contains(&y));
        let a = aspect_signature(&m, ChordMode::Ray).unwrap();
        let b = aspect_signature(&m, ChordMode::Ray).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values().iter().copied().fold(0.0, f64::max), 1.0);
        assert!(a.values().iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(!a.multi_component);
    }

    #[test]
    fn multiple_components_are_flagged() {
        let m = ShapeMask::from_fn(32, 32, |x, y| (2..8).contains(&y) && ((2..8).contains(&x) || (20..26).contains(&x)));
        let s = aspect_signature(&m, ChordMode::Ray).unwrap();
        assert!(s.multi_component);
    }

    #[test]
    fn from_values_rejects_unnormalized() {
        assert!(matches!(
            AspectSignature::from_values(vec![0.5; 360]),
            Err(SignatureError::NotNormalized(_))
        ));
        assert!(matches!(
            AspectSignature::from_values(vec![1.0; 10]),
            Err(SignatureError::Length(10))
        ));
        let mut v = vec![1.0; 360];
        v[3] = 1.5;
        assert!(matches!(
            AspectSignature::from_values(v),
            Err(SignatureError::OutOfRange { theta: 3, .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let s = AspectSignature::from_values(vec![1.0; 360]).unwrap();
        let csv = s.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "theta,aspect_ratio");
        assert_eq!(lines.len(), 361);
        assert_eq!(lines[1], "0,1");
        assert_eq!(lines[360], "359,1");
    }
}
