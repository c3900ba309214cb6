//! Orthographic raster frames over planar segments.

use crate::segment::{Chart, PlanarSegment, UvRect};
use crate::{SceneError, Vec3};

/// Pixel frame of a segment: column grows with `u`, row grows against `v`,
/// and pixel `(0, 0)` sits at `(u_min, v_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageChart {
    pub segment: usize,
    pub chart: Chart,
    pub bounds: UvRect,
    /// Pixels per meter.
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
}

impl ImageChart {
    /// Continuous pixel coordinates `(column, row)` of a chart position.
    pub fn uv_to_pixel(&self, u: f64, v: f64) -> (f64, f64) {
        (
            (u - self.bounds.u_min) * self.resolution,
            (self.bounds.v_max - v) * self.resolution,
        )
    }

    pub fn pixel_to_uv(&self, col: f64, row: f64) -> (f64, f64) {
        (
            self.bounds.u_min + col / self.resolution,
            self.bounds.v_max - row / self.resolution,
        )
    }

    pub fn to_pixel(&self, p: &Vec3) -> (f64, f64) {
        let (u, v) = self.chart.to_uv(p);
        self.uv_to_pixel(u, v)
    }

    /// Point on the plane under pixel `(col, row)`.
    pub fn to_world(&self, col: f64, row: f64) -> Vec3 {
        let (u, v) = self.pixel_to_uv(col, row);
        self.chart.to_world(u, v)
    }
}

pub fn plane_to_image(seg: &PlanarSegment, resolution: f64) -> Result<ImageChart, SceneError> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(SceneError::Config("resolution must be positive".into()));
    }
    if seg.inliers.len() < 3 {
        return Err(SceneError::TooFewInliers(seg.id));
    }
    let chart = seg.chart.ok_or(SceneError::DegenerateBasis(seg.id))?;
    Ok(ImageChart {
        segment: seg.id,
        chart,
        bounds: seg.bounds,
        resolution,
        // pixel centers 0..=round(extent * res), so every inlier's rounded
        // pixel lies inside the frame
        width: (seg.bounds.width() * resolution).round() as usize + 1,
        height: (seg.bounds.height() * resolution).round() as usize + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;
    use crate::segment::{segment_planes, SegmentConfig};

    fn wall_x0() -> PlanarSegment {
        let pts: Vec<Vec3> = (0..31 * 21)
            .map(|k| Vec3::new(0.0, (k % 31) as f64 * 0.1, (k / 31) as f64 * 0.1))
            .collect();
        let cloud = PointCloud::new(pts);
        segment_planes(&cloud, &SegmentConfig::default()).unwrap().remove(0)
    }

    #[test]
    fn round_trip_and_up_is_up() {
        let seg = wall_x0();
        let img = plane_to_image(&seg, 100.0).unwrap();
        let p = Vec3::new(0.0, 1.0, 2.0);
        let (c, r) = img.to_pixel(&p);
        assert!((img.to_world(c, r) - p).norm() < 1.0 / 100.0);
        // higher points land on smaller rows
        let (_, r_up) = img.to_pixel(&Vec3::new(0.0, 1.0, 2.5));
        assert!((r - r_up - 50.0).abs() < 1e-9);
        assert!(img.width.abs_diff(301) <= 1 && img.height.abs_diff(201) <= 1);
    }

    #[test]
    fn one_meter_is_resolution_pixels() {
        let img = plane_to_image(&wall_x0(), 100.0).unwrap();
        let (a, b) = (img.to_pixel(&Vec3::new(0.0, 0.5, 0.5)), img.to_pixel(&Vec3::new(0.0, 1.5, 0.5)));
        assert!(((a.0 - b.0).hypot(a.1 - b.1) - 100.0).abs() < 1.0);
    }

    #[test]
    fn degenerate_basis() {
        let mut seg = wall_x0();
        seg.chart = None;
        assert!(matches!(plane_to_image(&seg, 10.0), Err(SceneError::DegenerateBasis(0))));
        assert!(plane_to_image(&wall_x0(), 0.0).is_err());
    }
}
