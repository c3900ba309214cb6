//! Placing 2D pattern masks on planar segments.

use firesig::ShapeMask;
use serde::{Deserialize, Serialize};

use crate::cloud::{mean, PointCloud};
use crate::segment::PlanarSegment;
use crate::{SceneError, Vec3};

/// Where a mask sits on a segment. The mask's center lands at `(u0, v0)`
/// meters from the lower-left corner `(u_min, v_min)` of the segment's
/// bounding rectangle, and each mask pixel spans `scale` meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub u0: f64,
    pub v0: f64,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Classification {
    pub label: String,
    pub probability: f64,
    /// Every class with its probability, in the model's class order.
    pub probabilities: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedPattern {
    pub id: usize,
    /// Where the mask came from, typically its path.
    pub source: String,
    pub host: usize,
    /// Cloud indices of the pattern points, a subset of the host inliers.
    pub indices: Vec<usize>,
    /// Pattern points snapped onto the host plane.
    pub points: Vec<Vec3>,
    pub centroid: Vec3,
    /// Foreground pixels inside the host rectangle times `scale^2`.
    pub area_m2: f64,
    /// Part of the mask footprint falls outside the host rectangle.
    pub clipped: bool,
    pub class: Option<Classification>,
}

/// Marks every host inlier whose chart position falls on a foreground mask
/// pixel, snaps the marked points onto the host plane and drops any that
/// were farther than `2 * inlier_eps` from it.
pub fn project_mask(
    cloud: &PointCloud,
    seg: &PlanarSegment,
    mask: &ShapeMask,
    placement: &Placement,
    inlier_eps: f64,
) -> Result<ProjectedPattern, SceneError> {
    if !(placement.scale.is_finite() && placement.scale > 0.0) {
        return Err(SceneError::Config("placement scale must be positive".into()));
    }
    if !(placement.u0.is_finite() && placement.v0.is_finite()) {
        return Err(SceneError::Config("placement offsets must be finite".into()));
    }
    let chart = seg.chart.ok_or(SceneError::DegenerateBasis(seg.id))?;
    let b = &seg.bounds;
    let (cu, cv) = (b.u_min + placement.u0, b.v_min + placement.v0);
    let (w, h) = (mask.width(), mask.height());
    let (half_w, half_h) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let s = placement.scale;

    let mut inside = 0usize;
    let mut clipped = false;
    for (x, y) in mask.foreground() {
        let u = cu + (x as f64 - half_w) * s;
        let v = cv - (y as f64 - half_h) * s;
        if b.contains(u, v) {
            inside += 1;
        } else {
            clipped = true;
        }
    }

    let mut indices = Vec::new();
    let mut points = Vec::new();
    for &i in &seg.inliers {
        let p = &cloud.points[i];
        let (u, v) = chart.to_uv(p);
        let col = ((u - cu) / s + half_w).round();
        let row = ((cv - v) / s + half_h).round();
        if col < 0.0 || row < 0.0 || col >= w as f64 || row >= h as f64 {
            continue;
        }
        if !mask.get(col as usize, row as usize) {
            continue;
        }
        if seg.plane.signed_distance(p).abs() > 2.0 * inlier_eps {
            continue;
        }
        indices.push(i);
        points.push(seg.plane.project(p));
    }
    if indices.is_empty() {
        return Err(SceneError::EmptyProjection(seg.id));
    }
    Ok(ProjectedPattern {
        id: 0,
        source: String::new(),
        host: seg.id,
        centroid: mean(points.iter()),
        indices,
        points,
        area_m2: inside as f64 * s * s,
        clipped,
        class: None,
    })
}
