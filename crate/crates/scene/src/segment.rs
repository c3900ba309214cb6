//! Sequential RANSAC plane segmentation with least-squares refits.

use nalgebra::{Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{mean, PointCloud};
use crate::{SceneError, Vec3};

/// Planes whose normal is at least this aligned with gravity are
/// horizontal.
pub const HORIZONTAL_COS: f64 = 0.9;
/// Planes whose normal is at most this aligned with gravity are walls.
pub const VERTICAL_COS: f64 = 0.3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentConfig {
    /// Point-to-plane distance, in meters, below which a point is an inlier.
    pub inlier_eps: f64,
    /// Smallest plane, as a fraction of the whole cloud.
    pub min_inlier_frac: f64,
    pub max_planes: usize,
    /// Candidate planes drawn per extracted plane.
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            inlier_eps: 0.02,
            min_inlier_frac: 0.05,
            max_planes: 12,
            iterations: 2000,
            seed: 0,
        }
    }
}

impl SegmentConfig {
    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |m: &str| Err(SceneError::Config(m.into()));
        if !(self.inlier_eps.is_finite() && self.inlier_eps > 0.0) {
            return bad("inlier_eps must be positive");
        }
        if !(self.min_inlier_frac > 0.0 && self.min_inlier_frac <= 1.0) {
            return bad("min_inlier_frac must be in (0, 1]");
        }
        if self.max_planes == 0 || self.iterations == 0 {
            return bad("max_planes and iterations must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SurfaceKind {
    Wall,
    Floor,
    Ceiling,
    Other,
}

impl SurfaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::Wall => "wall",
            SurfaceKind::Floor => "floor",
            SurfaceKind::Ceiling => "ceiling",
            SurfaceKind::Other => "other",
        }
    }
}

impl std::str::FromStr for SurfaceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wall" => Ok(Self::Wall),
            "floor" => Ok(Self::Floor),
            "ceiling" => Ok(Self::Ceiling),
            "other" => Ok(Self::Other),
            _ => Err(format!("unknown surface kind {s:?}")),
        }
    }
}

/// `normal . p + offset = 0`, with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub normal: Vec3,
    pub offset: f64,
}

impl Plane {
    pub fn through(normal: Vec3, point: &Vec3) -> Self {
        let normal = normal.normalize();
        Self {
            normal,
            offset: -normal.dot(point),
        }
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) + self.offset
    }

    pub fn project(&self, p: &Vec3) -> Vec3 {
        p - self.normal * self.signed_distance(p)
    }

    fn flipped(self) -> Self {
        Self {
            normal: -self.normal,
            offset: -self.offset,
        }
    }
}

/// Orthonormal in-plane frame: `u`, `v` and the plane normal form a
/// right-handed basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chart {
    pub origin: Vec3,
    pub u: Vec3,
    pub v: Vec3,
}

impl Chart {
    pub fn to_uv(&self, p: &Vec3) -> (f64, f64) {
        let d = p - self.origin;
        (d.dot(&self.u), d.dot(&self.v))
    }

    pub fn to_world(&self, u: f64, v: f64) -> Vec3 {
        self.origin + self.u * u + self.v * v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UvRect {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl UvRect {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        (self.u_min..=self.u_max).contains(&u) && (self.v_min..=self.v_max).contains(&v)
    }

    pub fn width(&self) -> f64 {
        self.u_max - self.u_min
    }

    pub fn height(&self) -> f64 {
        self.v_max - self.v_min
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSegment {
    pub id: usize,
    pub kind: SurfaceKind,
    pub plane: Plane,
    /// Indices into the segmented cloud, ascending.
    pub inliers: Vec<usize>,
    /// Mean of the inlier points.
    pub centroid: Vec3,
    /// `None` only for a wall-like plane without a usable "up" direction,
    /// which the kind rule makes impossible for clouds segmented here.
    pub chart: Option<Chart>,
    /// Chart rectangle of all cloud points within `inlier_eps` of the plane,
    /// a superset of the inliers.
    pub bounds: UvRect,
    pub rms_residual: f64,
}

/// Extracts up to `max_planes` planes, largest first.
///
/// Each round draws `iterations` random point triples from the points not
/// yet assigned, keeps the candidate with the most inliers (earliest draw on
/// ties), refits it by least squares on its inliers and removes the refit
/// plane's inliers. Rounds stop once the unassigned points or the best
/// candidate drop below `min_inlier_frac` of the cloud.
pub fn segment_planes(cloud: &PointCloud, cfg: &SegmentConfig) -> Result<Vec<PlanarSegment>, SceneError> {
    cloud.validate()?;
    cfg.validate()?;
    let pts = &cloud.points;
    let n = pts.len();
    let min_count = ((cfg.min_inlier_frac * n as f64).ceil() as usize).max(3);
    let center = cloud.centroid();

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut planes: Vec<(Plane, Vec<usize>)> = Vec::new();
    while planes.len() < cfg.max_planes && remaining.len() >= min_count {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(planes.len() as u64);
        let Some(candidate) = best_candidate(pts, &remaining, cfg, &mut rng) else {
            break;
        };
        let first = inliers_of(pts, &remaining, &candidate, cfg.inlier_eps);
        if first.len() < min_count {
            break;
        }
        let Some(refit) = fit_plane(first.iter().map(|&i| &pts[i])) else {
            break;
        };
        let inliers = inliers_of(pts, &remaining, &refit, cfg.inlier_eps);
        if inliers.len() < min_count {
            break;
        }
        let plane = orient(refit, &mean(inliers.iter().map(|&i| &pts[i])), &center);
        let taken: std::collections::HashSet<usize> = inliers.iter().copied().collect();
        remaining.retain(|i| !taken.contains(i));
        planes.push((plane, inliers));
    }
    if planes.is_empty() {
        return Err(SceneError::NoPlanesFound(min_count));
    }

    let up = cloud.gravity;
    let heights: Vec<f64> = planes
        .iter()
        .map(|(_, inl)| mean(inl.iter().map(|&i| &pts[i])).dot(&up))
        .collect();
    let horizontal: Vec<usize> = (0..planes.len())
        .filter(|&k| planes[k].0.normal.dot(&up).abs() > HORIZONTAL_COS)
        .collect();
    let lowest = horizontal
        .iter()
        .copied()
        .min_by(|&a, &b| heights[a].total_cmp(&heights[b]));
    let highest = horizontal
        .iter()
        .copied()
        .max_by(|&a, &b| heights[a].total_cmp(&heights[b]).then(b.cmp(&a)));
    let mid_height = center.dot(&up);

    let segments = planes
        .into_iter()
        .enumerate()
        .map(|(id, (plane, mut inliers))| {
            inliers.sort_unstable();
            let cos = plane.normal.dot(&up).abs();
            let kind = if cos > HORIZONTAL_COS {
                if horizontal.len() == 1 {
                    if heights[id] <= mid_height {
                        SurfaceKind::Floor
                    } else {
                        SurfaceKind::Ceiling
                    }
                } else if Some(id) == lowest {
                    SurfaceKind::Floor
                } else if Some(id) == highest {
                    SurfaceKind::Ceiling
                } else {
                    SurfaceKind::Other
                }
            } else if cos < VERTICAL_COS {
                SurfaceKind::Wall
            } else {
                SurfaceKind::Other
            };
            finish_segment(id, kind, plane, inliers, pts, &up, cfg.inlier_eps)
        })
        .collect();
    Ok(segments)
}

fn finish_segment(
    id: usize,
    kind: SurfaceKind,
    plane: Plane,
    inliers: Vec<usize>,
    pts: &[Vec3],
    up: &Vec3,
    eps: f64,
) -> PlanarSegment {
    let centroid = mean(inliers.iter().map(|&i| &pts[i]));
    let chart = chart_for(&plane, &plane.project(&centroid), up);
    let mut bounds = UvRect {
        u_min: f64::INFINITY,
        u_max: f64::NEG_INFINITY,
        v_min: f64::INFINITY,
        v_max: f64::NEG_INFINITY,
    };
    // the rectangle spans every point on the plane, including points along
    // shared edges that an earlier segment already claimed
    if let Some(c) = &chart {
        for p in pts.iter().filter(|p| plane.signed_distance(p).abs() <= eps) {
            let (u, v) = c.to_uv(p);
            bounds.u_min = bounds.u_min.min(u);
            bounds.u_max = bounds.u_max.max(u);
            bounds.v_min = bounds.v_min.min(v);
            bounds.v_max = bounds.v_max.max(v);
        }
    }
    let ss: f64 = inliers
        .iter()
        .map(|&i| plane.signed_distance(&pts[i]).powi(2))
        .sum();
    PlanarSegment {
        id,
        kind,
        plane,
        rms_residual: (ss / inliers.len().max(1) as f64).sqrt(),
        centroid,
        chart,
        bounds,
        inliers,
    }
}

/// In-plane frame with `v` along gravity's projection, so "up" in a chart
/// image is world up. Horizontal planes use the world axis least aligned
/// with the normal instead. `None` if no such direction exists.
pub fn chart_for(plane: &Plane, origin: &Vec3, up: &Vec3) -> Option<Chart> {
    let n = plane.normal;
    let reference = if n.dot(up).abs() > HORIZONTAL_COS {
        let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
        let k = (0..3)
            .min_by(|&a, &b| n.dot(&axes[a]).abs().total_cmp(&n.dot(&axes[b]).abs()))
            .unwrap_or(0);
        axes[k]
    } else {
        *up
    };
    let v = reference - n * n.dot(&reference);
    if v.norm() < 1e-9 {
        return None;
    }
    let v = v.normalize();
    Some(Chart {
        origin: *origin,
        u: v.cross(&n),
        v,
    })
}

/// Normals point toward the cloud's centroid, so walls face into the room.
fn orient(plane: Plane, on_plane: &Vec3, center: &Vec3) -> Plane {
    let s = plane.normal.dot(&(center - on_plane));
    if s.abs() > 1e-9 {
        return if s < 0.0 { plane.flipped() } else { plane };
    }
    // centroid on the plane: make the largest normal component positive
    let n = plane.normal;
    let k = n.iamax();
    if n[k] < 0.0 {
        plane.flipped()
    } else {
        plane
    }
}

fn inliers_of(pts: &[Vec3], candidates: &[usize], plane: &Plane, eps: f64) -> Vec<usize> {
    candidates
        .iter()
        .copied()
        .filter(|&i| plane.signed_distance(&pts[i]).abs() <= eps)
        .collect()
}

fn best_candidate(
    pts: &[Vec3],
    remaining: &[usize],
    cfg: &SegmentConfig,
    rng: &mut impl Rng,
) -> Option<Plane> {
    let m = remaining.len();
    if m < 3 {
        return None;
    }
    // triples are drawn sequentially so the candidate set does not depend
    // on how the scoring below is scheduled
    let triples: Vec<[usize; 3]> = (0..cfg.iterations)
        .map(|_| {
            let a = rng.random_range(0..m);
            let mut b = rng.random_range(0..m - 1);
            if b >= a {
                b += 1;
            }
            let mut c = rng.random_range(0..m - 2);
            for taken in [a.min(b), a.max(b)] {
                if c >= taken {
                    c += 1;
                }
            }
            [remaining[a], remaining[b], remaining[c]]
        })
        .collect();
    triples
        .par_iter()
        .enumerate()
        .filter_map(|(it, &[a, b, c])| {
            let n = (pts[b] - pts[a]).cross(&(pts[c] - pts[a]));
            if n.norm() < 1e-12 {
                return None;
            }
            let plane = Plane::through(n, &pts[a]);
            let count = remaining
                .iter()
                .filter(|&&i| plane.signed_distance(&pts[i]).abs() <= cfg.inlier_eps)
                .count();
            Some((count, it, plane))
        })
        .reduce_with(|x, y| {
            if (y.0, std::cmp::Reverse(y.1)) > (x.0, std::cmp::Reverse(x.1)) {
                y
            } else {
                x
            }
        })
        .map(|(_, _, plane)| plane)
}

/// Total least-squares plane: through the mean, normal along the smallest
/// principal axis.
pub fn fit_plane<'a>(points: impl Iterator<Item = &'a Vec3> + Clone) -> Option<Plane> {
    let c = mean(points.clone());
    let mut cov = Matrix3::zeros();
    let mut n = 0usize;
    for p in points {
        let d = p - c;
        cov += d * d.transpose();
        n += 1;
    }
    if n < 3 {
        return None;
    }
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imin();
    let normal: Vec3 = eig.eigenvectors.column(k).into_owned();
    if !normal.iter().all(|v| v.is_finite()) || normal.norm() < 0.5 {
        return None;
    }
    Some(Plane::through(normal, &c))
}
