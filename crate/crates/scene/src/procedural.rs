//! Procedural test scenes with known geometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::segment::{Plane, SurfaceKind};
use crate::{SceneError, Vec3};

/// Axis-aligned room `[0, sx] x [0, sy] x [0, sz]` sampled on a grid over
/// its six faces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoxRoom {
    pub size: [f64; 3],
    /// Grid spacing on each face, in meters.
    pub spacing: f64,
    /// Standard deviation of the offset along each face's normal.
    pub noise: f64,
    /// Fraction of the final cloud made of points uniform in the room.
    pub outlier_frac: f64,
    pub seed: u64,
}

impl Default for BoxRoom {
    fn default() -> Self {
        Self {
            size: [4.0, 5.0, 3.0],
            spacing: 0.05,
            noise: 0.005,
            outlier_frac: 0.2,
            seed: 0,
        }
    }
}

/// A face of the room: its plane (normal facing inward), kind and the two
/// in-face extents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Face {
    pub plane: Plane,
    pub kind: SurfaceKind,
    pub extent: [f64; 2],
}

impl BoxRoom {
    pub fn faces(&self) -> Vec<Face> {
        let [sx, sy, sz] = self.size;
        let face = |n: Vec3, at: Vec3, kind, extent| Face {
            plane: Plane::through(n, &at),
            kind,
            extent,
        };
        vec![
            face(Vec3::z(), Vec3::zeros(), SurfaceKind::Floor, [sx, sy]),
            face(-Vec3::z(), Vec3::new(0.0, 0.0, sz), SurfaceKind::Ceiling, [sx, sy]),
            face(Vec3::x(), Vec3::zeros(), SurfaceKind::Wall, [sy, sz]),
            face(-Vec3::x(), Vec3::new(sx, 0.0, 0.0), SurfaceKind::Wall, [sy, sz]),
            face(Vec3::y(), Vec3::zeros(), SurfaceKind::Wall, [sx, sz]),
            face(-Vec3::y(), Vec3::new(0.0, sy, 0.0), SurfaceKind::Wall, [sx, sz]),
        ]
    }

    pub fn generate(&self) -> Result<PointCloud, SceneError> {
        let [sx, sy, sz] = self.size;
        if !(self.size.iter().all(|&s| s > 0.0) && self.spacing > 0.0) {
            return Err(SceneError::Config("room size and spacing must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.outlier_frac) || self.noise < 0.0 {
            return Err(SceneError::Config("outlier_frac must be in [0, 1), noise >= 0".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let normal = Normal::new(0.0, self.noise.max(f64::MIN_POSITIVE)).expect("valid sigma");
        let jitter = |rng: &mut ChaCha8Rng| if self.noise > 0.0 { normal.sample(rng) } else { 0.0 };
        let steps = |len: f64| (len / self.spacing).round() as usize;

        let mut points = Vec::new();
        // (fixed axis, fixed value, first free axis, second free axis)
        let layout = [(2, 0.0), (2, sz), (0, 0.0), (0, sx), (1, 0.0), (1, sy)];
        for (axis, value) in layout {
            let free: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
            let (na, nb) = (steps(self.size[free[0]]), steps(self.size[free[1]]));
            for i in 0..=na {
                for j in 0..=nb {
                    let mut p = Vec3::zeros();
                    p[axis] = value + jitter(&mut rng);
                    p[free[0]] = self.size[free[0]] * i as f64 / na as f64;
                    p[free[1]] = self.size[free[1]] * j as f64 / nb as f64;
                    points.push(p);
                }
            }
        }
        let n_out = (self.outlier_frac / (1.0 - self.outlier_frac) * points.len() as f64).round() as usize;
        for _ in 0..n_out {
            points.push(Vec3::new(
                rng.random_range(0.0..sx),
                rng.random_range(0.0..sy),
                rng.random_range(0.0..sz),
            ));
        }
        Ok(PointCloud::new(points))
    }
}
