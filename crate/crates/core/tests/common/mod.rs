//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use firesig::forest::{DecisionTree, Node};
use firesig::ShapeMask;

/// Direction of angle `theta` (degrees): zero points down the image and
/// angles grow counterclockwise on screen.
pub fn dir(theta: f64) -> (f64, f64) {
    let (s, c) = theta.to_radians().sin_cos();
    (s, c)
}

/// Ray parameters `t` at which `o + t d` crosses the polygon's edges.
fn crossings(poly: &[[f64; 2]], o: (f64, f64), d: (f64, f64)) -> Vec<f64> {
    let mut ts = Vec::new();
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let e = (b[0] - a[0], b[1] - a[1]);
        let den = d.0 * e.1 - d.1 * e.0;
        if den.abs() < 1e-12 {
            continue;
        }
        let w = (a[0] - o.0, a[1] - o.1);
        let t = (w.0 * e.1 - w.1 * e.0) / den;
        let u = (w.0 * d.1 - w.1 * d.0) / den;
        if (0.0..=1.0).contains(&u) {
            ts.push(t);
        }
    }
    ts
}

/// Distance from `o` to the farthest boundary crossing along the ray.
pub fn ray_polygon(poly: &[[f64; 2]], o: (f64, f64), theta: f64) -> f64 {
    crossings(poly, o, dir(theta))
        .into_iter()
        .filter(|&t| t >= 0.0)
        .fold(0.0, f64::max)
}

/// Span between the outermost crossings of the full line.
pub fn line_polygon(poly: &[[f64; 2]], o: (f64, f64), theta: f64) -> f64 {
    let ts = crossings(poly, o, dir(theta));
    let hi = ts.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ts.iter().cloned().fold(f64::MAX, f64::min);
    if ts.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Farthest crossing of a circle along the ray from `o` (inside the circle).
pub fn ray_circle(center: (f64, f64), r: f64, o: (f64, f64), theta: f64) -> f64 {
    let d = dir(theta);
    let w = (o.0 - center.0, o.1 - center.1);
    let b = w.0 * d.0 + w.1 * d.1;
    let c = w.0 * w.0 + w.1 * w.1 - r * r;
    -b + (b * b - c).sqrt()
}

pub fn disk_mask(n: usize, center: (f64, f64), r: f64) -> ShapeMask {
    ShapeMask::from_fn(n, n, |x, y| {
        let (dx, dy) = (x as f64 - center.0, y as f64 - center.1);
        dx * dx + dy * dy <= r * r
    })
}

/// Rotates `mask` by `deg` counterclockwise on screen about `about`.
pub fn rotate_mask(mask: &ShapeMask, deg: f64, about: (f64, f64)) -> ShapeMask {
    let (s, c) = deg.to_radians().sin_cos();
    mask.resample(mask.width(), mask.height(), |x, y| {
        let (dx, dy) = (x - about.0, y - about.1);
        (about.0 + c * dx - s * dy, about.1 + s * dx + c * dy)
    })
}

/// Uniformly scales `mask` (and its canvas) by `k`.
pub fn scale_mask(mask: &ShapeMask, k: f64) -> ShapeMask {
    let w = (mask.width() as f64 * k).round() as usize;
    let h = (mask.height() as f64 * k).round() as usize;
    mask.resample(w, h, |x, y| ((x + 0.5) / k - 0.5, (y + 0.5) / k - 0.5))
}

pub fn max_circular_shift_error(a: &[f64], b: &[f64], shift: usize) -> f64 {
    let n = a.len();
    (0..n)
        .map(|t| (b[(t + shift) % n] - a[t]).abs())
        .fold(0.0, f64::max)
}

/// Exhaustive CART reference: every feature, every midpoint between
/// distinct neighbouring values, weighted Gini impurity compared exactly as
/// fractions.
pub struct ReferenceTree<'a> {
    pub x: &'a [Vec<f64>],
    pub y: &'a [usize],
    pub n_classes: usize,
    pub max_depth: usize,
    pub min_leaf: u64,
    pub nodes: Vec<Node>,
}

impl ReferenceTree<'_> {
    pub fn build(
        x: &[Vec<f64>],
        y: &[usize],
        w: &[u32],
        n_classes: usize,
        max_depth: usize,
        min_leaf: u64,
    ) -> DecisionTree {
        let mut t = ReferenceTree {
            x,
            y,
            n_classes,
            max_depth,
            min_leaf,
            nodes: Vec::new(),
        };
        let idx: Vec<(usize, u64)> = w
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| (i, k as u64))
            .collect();
        t.node(&idx, 0);
        DecisionTree { nodes: t.nodes }
    }

    fn counts(&self, idx: &[(usize, u64)]) -> Vec<u64> {
        let mut c = vec![0; self.n_classes];
        for &(i, w) in idx {
            c[self.y[i]] += w;
        }
        c
    }

    /// Weighted impurity `sum_child n_c * gini_c` as `(num, den)`.
    fn impurity(parts: &[Vec<u64>]) -> (i128, i128) {
        // n_c * (1 - sum p^2) = (n_c^2 - sum k^2) / n_c
        let mut num = 0i128;
        let mut den = 1i128;
        for c in parts {
            let n: i128 = c.iter().map(|&v| v as i128).sum();
            let sq: i128 = c.iter().map(|&v| (v as i128) * (v as i128)).sum();
            // num/den + (n^2 - sq)/n
            num = num * n + (n * n - sq) * den;
            den *= n;
        }
        (num, den)
    }

    fn less(a: (i128, i128), b: (i128, i128)) -> bool {
        a.0 * b.1 < b.0 * a.1
    }

    fn node(&mut self, idx: &[(usize, u64)], depth: usize) -> usize {
        let counts = self.counts(idx);
        let n: u64 = counts.iter().sum();
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            counts: counts.iter().map(|&c| c as u32).collect(),
        });
        if depth >= self.max_depth
            || counts.iter().filter(|&&c| c > 0).count() <= 1
            || n < 2 * self.min_leaf
        {
            return id;
        }
        let parent = Self::impurity(&[counts.clone()]);
        let mut best: Option<((i128, i128), usize, f64)> = None;
        for f in 0..self.x[0].len() {
            let mut vals: Vec<f64> = idx.iter().map(|&(i, _)| self.x[i][f]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for pair in vals.windows(2) {
                let mut thr = pair[0] + (pair[1] - pair[0]) / 2.0;
                if thr >= pair[1] {
                    thr = pair[0];
                }
                let l: Vec<_> = idx.iter().copied().filter(|&(i, _)| self.x[i][f] <= thr).collect();
                let r: Vec<_> = idx.iter().copied().filter(|&(i, _)| self.x[i][f] > thr).collect();
                let (cl, cr) = (self.counts(&l), self.counts(&r));
                let (nl, nr): (u64, u64) = (cl.iter().sum(), cr.iter().sum());
                if nl < self.min_leaf || nr < self.min_leaf {
                    continue;
                }
                let imp = Self::impurity(&[cl, cr]);
                // features and thresholds are visited in increasing order, so
                // only a strictly better impurity replaces the incumbent
                if best.is_none_or(|(b, _, _)| Self::less(imp, b)) {
                    best = Some((imp, f, thr));
                }
            }
        }
        let Some((imp, f, thr)) = best else {
            return id;
        };
        if !Self::less(imp, parent) {
            return id;
        }
        let l: Vec<_> = idx.iter().copied().filter(|&(i, _)| self.x[i][f] <= thr).collect();
        let r: Vec<_> = idx.iter().copied().filter(|&(i, _)| self.x[i][f] > thr).collect();
        let left = self.node(&l, depth + 1);
        let right = self.node(&r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: f,
            threshold: thr,
            left,
            right,
        };
        id
    }
}

/// Embeds `mask` in a canvas grown by `p` pixels on every side.
pub fn pad(mask: &ShapeMask, p: usize) -> ShapeMask {
    let q = p as f64;
    mask.resample(mask.width() + 2 * p, mask.height() + 2 * p, |x, y| (x - q, y - q))
}

/// Filled ellipse with semi-axes `a`, `b`, rotated by `phi` degrees.
pub fn ellipse_mask(n: usize, center: (f64, f64), a: f64, b: f64, phi: f64) -> ShapeMask {
    let (s, c) = phi.to_radians().sin_cos();
    ShapeMask::from_fn(n, n, |x, y| {
        let (dx, dy) = (x as f64 - center.0, y as f64 - center.1);
        let (u, v) = (c * dx + s * dy, -s * dx + c * dy);
        (u / a).powi(2) + (v / b).powi(2) <= 1.0
    })
}
