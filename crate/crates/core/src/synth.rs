//! Synthetic fire-pattern masks.
//!
//! Each class starts from an upright parametric outline ([`base_polygon`])
//! which is then perturbed and rasterized in a fixed order:
//!
//! 1. resample the boundary to 256 points (original vertices are kept),
//! 2. per-point radial noise, `Uniform(-a, a)` times the local radius,
//! 3. a low-frequency horizontal warp `x += A sin(2 pi y / lambda + phase)`,
//!    `lambda` = half the canvas height,
//! 4. a small rotation about the canvas center,
//! 5. even-odd scanline fill,
//! 6. Gaussian blur and re-threshold at 0.5.
//!
//! Every sample draws from its own ChaCha stream keyed by class, index and
//! retry attempt, so the dataset does not depend on generation order.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mask::{MaskError, ShapeMask, MIN_FOREGROUND};

pub const RESAMPLE_POINTS: usize = 256;
pub const MAX_ATTEMPTS: u64 = 10;

pub type Point = [f64; 2];

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("only {0} foreground pixels survived perturbation")]
    DegenerateShape(usize),
    #[error("invalid synth config: {0}")]
    Config(String),
    #[error("sample {class}_{index} stayed degenerate after {MAX_ATTEMPTS} attempts")]
    RetriesExhausted { class: PatternClass, index: usize },
    #[error(transparent)]
    Mask(#[from] MaskError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternClass {
    Circle,
    HalfCircle,
    Hourglass,
    Rectangle,
    TriangleUp,
    TriangleDown,
    VShape,
    UShape,
}

impl PatternClass {
    pub const ALL: [PatternClass; 8] = [
        PatternClass::Circle,
        PatternClass::HalfCircle,
        PatternClass::Hourglass,
        PatternClass::Rectangle,
        PatternClass::TriangleUp,
        PatternClass::TriangleDown,
        PatternClass::VShape,
        PatternClass::UShape,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PatternClass::Circle => "circle",
            PatternClass::HalfCircle => "half_circle",
            PatternClass::Hourglass => "hourglass",
            PatternClass::Rectangle => "rectangle",
            PatternClass::TriangleUp => "triangle_up",
            PatternClass::TriangleDown => "triangle_down",
            PatternClass::VShape => "v_shape",
            PatternClass::UShape => "u_shape",
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).unwrap()
    }
}

impl std::fmt::Display for PatternClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PatternClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown pattern class {s:?}"))
    }
}

/// Label sets used for training and evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassScheme {
    /// Seven labels; both triangle orientations become `triangle`.
    #[default]
    Grouped,
    /// One label per generator.
    Full,
}

impl ClassScheme {
    pub fn class_names(self) -> Vec<String> {
        match self {
            ClassScheme::Grouped => [
                "circle",
                "half_circle",
                "hourglass",
                "rectangle",
                "triangle",
                "v_shape",
                "u_shape",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            ClassScheme::Full => PatternClass::ALL.iter().map(|c| c.name().to_string()).collect(),
        }
    }

    pub fn label(self, class: PatternClass) -> usize {
        match self {
            ClassScheme::Full => class.index(),
            ClassScheme::Grouped => match class {
                PatternClass::Circle => 0,
                PatternClass::HalfCircle => 1,
                PatternClass::Hourglass => 2,
                PatternClass::Rectangle => 3,
                PatternClass::TriangleUp | PatternClass::TriangleDown => 4,
                PatternClass::VShape => 5,
                PatternClass::UShape => 6,
            },
        }
    }

    pub fn n_classes(self) -> usize {
        match self {
            ClassScheme::Grouped => 7,
            ClassScheme::Full => 8,
        }
    }
}

/// Outline proportions. Lengths are relative to the shape's height unless
/// noted otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapeProportions {
    pub circle_vertices: usize,
    /// Width of the top and bottom edges of the hourglass.
    pub hourglass_width: f64,
    /// Width of the hourglass neck.
    pub hourglass_waist: f64,
    /// Height over width of the rectangle.
    pub rectangle_aspect: f64,
    pub triangle_apex_deg: f64,
    /// Perpendicular thickness of each V leg.
    pub v_leg_width: f64,
    pub v_opening_deg: f64,
    /// Outer width of the U.
    pub u_width: f64,
    /// Notch width as a fraction of the U width.
    pub u_notch_width: f64,
    /// Notch depth as a fraction of the U height.
    pub u_notch_depth: f64,
}

impl Default for ShapeProportions {
    fn default() -> Self {
        Self {
            circle_vertices: 64,
            hourglass_width: 0.8,
            hourglass_waist: 0.15,
            rectangle_aspect: 2.2,
            triangle_apex_deg: 50.0,
            v_leg_width: 0.22,
            v_opening_deg: 70.0,
            u_width: 0.8,
            u_notch_width: 0.5,
            u_notch_depth: 0.6,
        }
    }
}

impl ShapeProportions {
    /// Scales every continuous proportion by an independent factor in
    /// `[1 - j, 1 + j]`, keeping the outlines simple.
    pub fn jittered(&self, j: f64, rng: &mut impl Rng) -> Self {
        let mut f = |v: f64| v * (1.0 + rng.random_range(-j..=j));
        let hourglass_width = f(self.hourglass_width);
        let hourglass_waist = f(self.hourglass_waist).min(0.9 * hourglass_width);
        Self {
            circle_vertices: self.circle_vertices,
            hourglass_width,
            hourglass_waist,
            rectangle_aspect: f(self.rectangle_aspect),
            triangle_apex_deg: f(self.triangle_apex_deg).clamp(10.0, 150.0),
            v_leg_width: f(self.v_leg_width),
            v_opening_deg: f(self.v_opening_deg).clamp(10.0, 150.0),
            u_width: f(self.u_width),
            u_notch_width: f(self.u_notch_width).min(0.9),
            u_notch_depth: f(self.u_notch_depth).min(0.9),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub canvas_width: usize,
    pub canvas_height: usize,
    pub n_per_class: usize,
    pub seed: u64,
    /// Radial noise amplitude as a fraction of the local radius.
    pub noise_amplitude: f64,
    /// Gaussian blur sigma in pixels; 0 disables the blur.
    pub smoothing_sigma: f64,
    /// Warp amplitude as a fraction of the shape's half extent.
    pub distortion_amplitude: f64,
    /// Maximum absolute rotation, in degrees.
    pub rotation_jitter: f64,
    /// Relative per-sample spread of the outline proportions.
    pub proportion_jitter: f64,
    /// Largest shape dimension as a fraction of the smaller canvas side.
    pub scale_range: (f64, f64),
    pub shapes: ShapeProportions,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            canvas_width: 256,
            canvas_height: 256,
            n_per_class: 100,
            seed: 0,
            noise_amplitude: 0.06,
            smoothing_sigma: 2.0,
            distortion_amplitude: 0.08,
            rotation_jitter: 5.0,
            proportion_jitter: 0.85,
            scale_range: (0.55, 0.90),
            shapes: ShapeProportions::default(),
        }
    }
}

impl SynthConfig {
    /// Same config with every perturbation switched off.
    pub fn clean(&self) -> Self {
        Self {
            noise_amplitude: 0.0,
            smoothing_sigma: 0.0,
            distortion_amplitude: 0.0,
            rotation_jitter: 0.0,
            proportion_jitter: 0.0,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Config(m.to_string()));
        if self.canvas_width < 16 || self.canvas_height < 16 {
            return bad("canvas must be at least 16x16");
        }
        for (name, v) in [
            ("noise_amplitude", self.noise_amplitude),
            ("smoothing_sigma", self.smoothing_sigma),
            ("distortion_amplitude", self.distortion_amplitude),
            ("rotation_jitter", self.rotation_jitter),
            ("proportion_jitter", self.proportion_jitter),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(&format!("{name} must be finite and >= 0"));
            }
        }
        if self.noise_amplitude >= 1.0 {
            return bad("noise_amplitude must be below 1");
        }
        if self.proportion_jitter >= 0.9 {
            return bad("proportion_jitter must be below 0.9");
        }
        let (lo, hi) = self.scale_range;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return bad("scale_range must satisfy 0 < min <= max <= 1");
        }
        Ok(())
    }

    fn extent(&self, scale: f64) -> f64 {
        scale * self.canvas_width.min(self.canvas_height) as f64
    }

    fn center(&self) -> Point {
        // midway between pixel centers, so symmetric outlines rasterize
        // symmetrically
        [
            (self.canvas_width as f64 - 1.0) / 2.0,
            (self.canvas_height as f64 - 1.0) / 2.0,
        ]
    }
}

/// Output of [`perturb_and_rasterize`].
#[derive(Clone, Debug)]
pub struct Perturbed {
    pub mask: ShapeMask,
    /// Rotation jitter that was applied, in degrees.
    pub rotation: f64,
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub class: PatternClass,
    pub index: usize,
    pub seed_offset: u64,
    pub scale: f64,
    pub rotation: f64,
    pub mask: ShapeMask,
}

impl Sample {
    pub fn filename(&self) -> String {
        sample_filename(self.class, self.index)
    }
}

pub fn sample_filename(class: PatternClass, index: usize) -> String {
    format!("{}_{index:04}.pgm", class.name())
}

/// Canonical upright outline of `class`, its largest dimension equal to
/// `scale` times the smaller canvas side, centered on the canvas. Image
/// coordinates: y grows downward.
pub fn base_polygon(class: PatternClass, scale: f64, cfg: &SynthConfig) -> Vec<Point> {
    let p = &cfg.shapes;
    // unit outlines with y pointing up, roughly centered on the origin
    let unit: Vec<Point> = match class {
        PatternClass::Circle => {
            let n = p.circle_vertices.max(3);
            (0..n)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / n as f64;
                    [0.5 * a.cos(), 0.5 * a.sin()]
                })
                .collect()
        }
        PatternClass::HalfCircle => {
            let n = p.circle_vertices.max(4) / 2;
            (0..=n)
                .map(|k| {
                    let a = PI * k as f64 / n as f64;
                    [0.5 * a.cos(), 0.5 * a.sin()]
                })
                .collect()
        }
        PatternClass::Hourglass => {
            let (w, n) = (p.hourglass_width / 2.0, p.hourglass_waist / 2.0);
            vec![[-w, 0.5], [-n, 0.0], [-w, -0.5], [w, -0.5], [n, 0.0], [w, 0.5]]
        }
        PatternClass::Rectangle => {
            let w = 0.5 / p.rectangle_aspect;
            vec![[-w, -0.5], [w, -0.5], [w, 0.5], [-w, 0.5]]
        }
        PatternClass::TriangleUp | PatternClass::TriangleDown => {
            let half_base = (p.triangle_apex_deg.to_radians() / 2.0).tan();
            let tri = vec![[-half_base, -0.5], [half_base, -0.5], [0.0, 0.5]];
            if class == PatternClass::TriangleUp {
                tri
            } else {
                tri.into_iter().map(|[x, y]| [x, -y]).collect()
            }
        }
        PatternClass::VShape => {
            let half = (p.v_opening_deg.to_radians() / 2.0).max(1e-3);
            let (s, c) = half.sin_cos();
            let outer = half.tan();
            // inner edges are the outer ones shifted inward by the leg width
            let notch = p.v_leg_width / s;
            let inner = (1.0 - notch).max(0.0) * s / c;
            vec![
                [0.0, 0.0],
                [outer, 1.0],
                [inner, 1.0],
                [0.0, notch.min(1.0)],
                [-inner, 1.0],
                [-outer, 1.0],
            ]
        }
        PatternClass::UShape => {
            let w = p.u_width / 2.0;
            let nw = w * p.u_notch_width;
            let top = 0.5;
            let notch_floor = top - p.u_notch_depth;
            vec![
                [-w, -0.5],
                [w, -0.5],
                [w, top],
                [nw, top],
                [nw, notch_floor],
                [-nw, notch_floor],
                [-nw, top],
                [-w, top],
            ]
        }
    };

    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &[x, y] in &unit {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let k = cfg.extent(scale) / (x1 - x0).max(y1 - y0);
    let (mx, my) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let [cx, cy] = cfg.center();
    unit.into_iter()
        .map(|[x, y]| [cx + (x - mx) * k, cy - (y - my) * k])
        .collect()
}

/// Inserts points along the edges until the outline has `target` points.
/// Original vertices are kept; extra points go to edges in proportion to
/// their length.
pub fn resample_boundary(poly: &[Point], target: usize) -> Vec<Point> {
    let n = poly.len();
    if n >= target || n < 2 {
        return poly.to_vec();
    }
    let lengths: Vec<f64> = (0..n).map(|i| dist(poly[i], poly[(i + 1) % n])).collect();
    let total: f64 = lengths.iter().sum();
    let extra = target - n;
    // largest-remainder apportionment keeps the count exact
    let quotas: Vec<f64> = lengths.iter().map(|l| l / total * extra as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut remaining = extra - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in &order {
        if remaining == 0 {
            break;
        }
        counts[i] += 1;
        remaining -= 1;
    }
    let mut out = Vec::with_capacity(target);
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        out.push(a);
        let m = counts[i];
        for k in 1..=m {
            let t = k as f64 / (m + 1) as f64;
            out.push([a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]);
        }
    }
    out
}

/// Runs the perturbation pipeline on `poly` and rasterizes the result.
pub fn perturb_and_rasterize(
    poly: &[Point],
    cfg: &SynthConfig,
    rng: &mut impl Rng,
) -> Result<Perturbed, SynthError> {
    let mut pts = resample_boundary(poly, RESAMPLE_POINTS);
    let center = polygon_centroid(&pts);
    let extent = bbox_extent(&pts);

    if cfg.noise_amplitude > 0.0 {
        let a = cfg.noise_amplitude;
        for p in pts.iter_mut() {
            let u: f64 = rng.random_range(-a..=a);
            p[0] = center[0] + (p[0] - center[0]) * (1.0 + u);
            p[1] = center[1] + (p[1] - center[1]) * (1.0 + u);
        }
    }

    if cfg.distortion_amplitude > 0.0 {
        let amp = cfg.distortion_amplitude * extent / 2.0 * rng.random_range(-1.0..=1.0);
        let phase = rng.random_range(0.0..2.0 * PI);
        let lambda = cfg.canvas_height as f64 / 2.0;
        for p in pts.iter_mut() {
            p[0] += amp * (2.0 * PI * p[1] / lambda + phase).sin();
        }
    }

    let rotation = if cfg.rotation_jitter > 0.0 {
        rng.random_range(-cfg.rotation_jitter..=cfg.rotation_jitter)
    } else {
        0.0
    };
    if rotation != 0.0 {
        let [cx, cy] = cfg.center();
        // positive angles turn the outline counterclockwise on screen
        let (s, c) = (-rotation).to_radians().sin_cos();
        for p in pts.iter_mut() {
            let (dx, dy) = (p[0] - cx, p[1] - cy);
            *p = [cx + c * dx - s * dy, cy + s * dx + c * dy];
        }
    }

    let mut mask = rasterize_even_odd(&pts, cfg.canvas_width, cfg.canvas_height);
    if cfg.smoothing_sigma > 0.0 {
        mask = blur_threshold(&mask, cfg.smoothing_sigma);
    }
    let n = mask.foreground_count();
    if n < MIN_FOREGROUND {
        return Err(SynthError::DegenerateShape(n));
    }
    Ok(Perturbed { mask, rotation })
}

/// Generates one sample for `(class, index)`, retrying on degenerate draws.
pub fn generate_sample(
    class: PatternClass,
    index: usize,
    cfg: &SynthConfig,
) -> Result<Sample, SynthError> {
    for attempt in 0..MAX_ATTEMPTS {
        let seed_offset = stream_id(class, index, attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(seed_offset);
        let (lo, hi) = cfg.scale_range;
        let scale = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        let poly = if cfg.proportion_jitter > 0.0 {
            let shapes = cfg.shapes.jittered(cfg.proportion_jitter, &mut rng);
            base_polygon(class, scale, &SynthConfig { shapes, ..cfg.clone() })
        } else {
            base_polygon(class, scale, cfg)
        };
        match perturb_and_rasterize(&poly, cfg, &mut rng) {
            Ok(Perturbed { mask, rotation }) => {
                return Ok(Sample {
                    class,
                    index,
                    seed_offset,
                    scale,
                    rotation,
                    mask,
                })
            }
            Err(SynthError::DegenerateShape(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(SynthError::RetriesExhausted { class, index })
}

/// Balanced dataset over all eight generators, ordered by class then index.
pub fn generate_dataset(cfg: &SynthConfig) -> Result<Vec<Sample>, SynthError> {
    cfg.validate()?;
    if cfg.n_per_class == 0 {
        return Err(SynthError::Config("n_per_class must be at least 1".into()));
    }
    let jobs: Vec<(PatternClass, usize)> = PatternClass::ALL
        .iter()
        .flat_map(|&c| (0..cfg.n_per_class).map(move |i| (c, i)))
        .collect();
    jobs.into_par_iter()
        .map(|(c, i)| generate_sample(c, i, cfg))
        .collect()
}

/// Manifest CSV: `filename,class,seed_offset,scale,rotation`.
pub fn manifest_csv(samples: &[Sample]) -> String {
    let mut out = String::from("filename,class,seed_offset,scale,rotation\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6}\n",
            s.filename(),
            s.class,
            s.seed_offset,
            s.scale,
            s.rotation
        ));
    }
    out
}

/// Substream for a sample: class in the top byte, index above the 4-bit
/// retry counter.
fn stream_id(class: PatternClass, index: usize, attempt: u64) -> u64 {
    ((class.index() as u64) << 56) | ((index as u64) << 4) | attempt
}

/// Even-odd fill sampled at pixel centers.
pub fn rasterize_even_odd(poly: &[Point], width: usize, height: usize) -> ShapeMask {
    let mut data = vec![false; width * height];
    let n = poly.len();
    let mut xs = Vec::new();
    for row in 0..height {
        let y = row as f64;
        xs.clear();
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            // half-open in y so shared vertices are counted once
            if (a[1] <= y && b[1] > y) || (b[1] <= y && a[1] > y) {
                let t = (y - a[1]) / (b[1] - a[1]);
                xs.push(a[0] + t * (b[0] - a[0]));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            let start = pair[0].ceil().max(0.0);
            let end = pair[1].min(width as f64 - 1.0);
            if start > end {
                continue;
            }
            for col in start as usize..=end.floor() as usize {
                data[row * width + col] = true;
            }
        }
    }
    ShapeMask::raw(width, height, data).expect("dimensions match")
}

/// Separable Gaussian blur of the 0/1 image, re-thresholded at 0.5.
pub fn blur_threshold(mask: &ShapeMask, sigma: f64) -> ShapeMask {
    let (w, h) = (mask.width(), mask.height());
    let radius = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    let kernel: Vec<f64> = kernel.into_iter().map(|k| k / norm).collect();

    let src: Vec<f64> = mask.data().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                let xx = x as isize + k as isize - radius;
                if xx >= 0 && (xx as usize) < w {
                    acc += kv * src[y * w + xx as usize];
                }
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut data = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                let yy = y as isize + k as isize - radius;
                if yy >= 0 && (yy as usize) < h {
                    acc += kv * tmp[yy as usize * w + x];
                }
            }
            data[y * w + x] = acc >= 0.5;
        }
    }
    ShapeMask::raw(w, h, data).expect("dimensions match")
}

/// Area centroid of a simple polygon (vertex mean for degenerate input).
pub fn polygon_centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let cross = p[0] * q[1] - q[0] * p[1];
        a += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    if a.abs() < 1e-12 {
        let k = n.max(1) as f64;
        return [
            poly.iter().map(|p| p[0]).sum::<f64>() / k,
            poly.iter().map(|p| p[1]).sum::<f64>() / k,
        ];
    }
    [cx / (3.0 * a), cy / (3.0 * a)]
}

fn bbox_extent(poly: &[Point]) -> f64 {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &[x, y] in poly {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    (x1 - x0).max(y1 - y0)
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::compute_centroid;

    #[test]
    fn circle_vertices_on_radius() {
        let cfg = SynthConfig::default();
        let poly = base_polygon(PatternClass::Circle, 0.8, &cfg);
        assert_eq!(poly.len(), 64);
        let [cx, cy] = cfg.center();
        for p in &poly {
            let r = ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt();
            assert!((r - 0.4 * 256.0).abs() < 1e-9, "{r}");
        }
    }

    #[test]
    fn rectangle_is_tall() {
        let cfg = SynthConfig::default();
        for scale in [0.55, 0.7, 0.9] {
            let poly = base_polygon(PatternClass::Rectangle, scale, &cfg);
            assert_eq!(poly.len(), 4);
            let w = (poly[1][0] - poly[0][0]).abs();
            let h = (poly[2][1] - poly[1][1]).abs();
            assert!((h / w - 2.2).abs() < 1e-12);
            assert!((h - scale * 256.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hourglass_is_horizontally_centered() {
        let cfg = SynthConfig::default();
        let poly = base_polygon(PatternClass::Hourglass, 0.7, &cfg);
        let mask = rasterize_even_odd(&poly, 256, 256);
        let (cx, _) = compute_centroid(&mask).unwrap();
        assert!((cx - 127.5).abs() <= 1.0, "{cx}");
    }

    #[test]
    fn triangles_point_the_right_way() {
        let cfg = SynthConfig::default();
        let up = base_polygon(PatternClass::TriangleUp, 0.8, &cfg);
        let apex = up.iter().min_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
        assert!((apex[0] - 127.5).abs() < 1e-9, "apex of the up triangle is on top");
        let down = base_polygon(PatternClass::TriangleDown, 0.8, &cfg);
        let apex = down.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
        assert!((apex[0] - 127.5).abs() < 1e-9);
    }

    #[test]
    fn resampling_keeps_vertices_and_count() {
        let square = vec![[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0]];
        let r = resample_boundary(&square, 256);
        assert_eq!(r.len(), 256);
        for v in &square {
            assert!(r.contains(v));
        }
    }

    #[test]
    fn identity_pipeline_is_plain_rasterization() {
        let cfg = SynthConfig::default().clean();
        let poly = base_polygon(PatternClass::UShape, 0.7, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = perturb_and_rasterize(&poly, &cfg, &mut rng).unwrap();
        assert_eq!(out.mask, rasterize_even_odd(&poly, 256, 256));
    }

    #[test]
    fn same_seed_same_bytes() {
        let cfg = SynthConfig {
            seed: 42,
            ..Default::default()
        };
        let a = generate_sample(PatternClass::VShape, 5, &cfg).unwrap();
        let b = generate_sample(PatternClass::VShape, 5, &cfg).unwrap();
        assert_eq!(a.mask.to_pgm(), b.mask.to_pgm());
        let c = generate_sample(PatternClass::VShape, 6, &cfg).unwrap();
        assert_ne!(a.mask.to_pgm(), c.mask.to_pgm());
    }

    #[test]
    fn dataset_counts_and_manifest() {
        let cfg = SynthConfig {
            n_per_class: 3,
            seed: 7,
            ..Default::default()
        };
        let ds = generate_dataset(&cfg).unwrap();
        assert_eq!(ds.len(), 24);
        let manifest = manifest_csv(&ds);
        assert_eq!(manifest.lines().count(), 25);
        assert!(manifest.starts_with("filename,class,seed_offset,scale,rotation\n"));
        assert_eq!(manifest, manifest_csv(&generate_dataset(&cfg).unwrap()));
    }

    #[test]
    fn even_odd_fill_of_square() {
        let square = vec![[2.0, 2.0], [6.0, 2.0], [6.0, 6.0], [2.0, 6.0]];
        let m = rasterize_even_odd(&square, 10, 10);
        // rows 2..6 (half-open in y), cols 2..=6
        assert_eq!(m.foreground_count(), 4 * 5);
    }

    #[test]
    fn class_schemes() {
        assert_eq!(ClassScheme::Grouped.class_names().len(), 7);
        assert_eq!(ClassScheme::Full.class_names().len(), 8);
        assert_eq!(
            ClassScheme::Grouped.label(PatternClass::TriangleUp),
            ClassScheme::Grouped.label(PatternClass::TriangleDown)
        );
        for c in PatternClass::ALL {
            assert_eq!(ClassScheme::Full.class_names()[ClassScheme::Full.label(c)], c.name());
            assert_eq!(c.name().parse::<PatternClass>().unwrap(), c);
        }
    }

    #[test]
    fn config_validation() {
        assert!(SynthConfig::default().validate().is_ok());
        let bad = SynthConfig {
            scale_range: (0.9, 0.5),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SynthConfig {
            noise_amplitude: -0.1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
