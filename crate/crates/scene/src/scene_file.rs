//! JSON scene description and the end-to-end scene pipeline.
//!
//! ```json
//! {
//!   "cloud": "room.ply",
//!   "gravity": [0, 0, 1],
//!   "segmentation": { "inlier_eps": 0.02, "seed": 0 },
//!   "graph": { "tau": 1.5 },
//!   "furniture": [
//!     { "label": "sofa", "center": [1, 1, 0.4], "half_extents": [1, 0.5, 0.4] }
//!   ],
//!   "patterns": [
//!     { "mask": "v.pgm", "segment": "wall:0", "u0": 1.2, "v0": 1.0, "scale": 0.005 }
//!   ]
//! }
//! ```
//!
//! Relative paths are resolved against the scene file's directory. A
//! pattern's `segment` is a segment id, a kind (`"wall"` picks the first
//! wall), a kind with an ordinal (`"wall:2"`), or `{"near": [x, y, z]}` for
//! the surface closest to a point.

use std::path::{Path, PathBuf};

use firesig::{read_mask, ShapeMask};
use serde::{Deserialize, Serialize};

use crate::cloud::{read_cloud, PointCloud};
use crate::graph::{build_scene_graph, Furniture, GraphConfig, SceneGraph};
use crate::project::{project_mask, Classification, Placement, ProjectedPattern};
use crate::segment::{segment_planes, PlanarSegment, SegmentConfig, SurfaceKind};
use crate::{SceneError, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub cloud: PathBuf,
    #[serde(default = "default_gravity")]
    pub gravity: [f64; 3],
    #[serde(default)]
    pub segmentation: SegmentConfig,
    #[serde(default)]
    pub graph: GraphConfig,
    #[serde(default)]
    pub furniture: Vec<Furniture>,
    #[serde(default)]
    pub patterns: Vec<PatternPlacement>,
}

fn default_gravity() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternPlacement {
    pub mask: PathBuf,
    pub segment: SegmentSelector,
    pub u0: f64,
    pub v0: f64,
    /// Meters per mask pixel.
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SegmentSelector {
    Id(usize),
    Kind(String),
    Near { near: [f64; 3] },
}

fn schema(field: impl Into<String>, msg: impl Into<String>) -> SceneError {
    SceneError::Schema {
        field: field.into(),
        msg: msg.into(),
    }
}

impl SceneFile {
    /// Parses and validates a scene document; errors name the offending
    /// field.
    pub fn parse(text: &str) -> Result<Self, SceneError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: SceneFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema(if path == "." { "(root)".into() } else { path }, e.into_inner().to_string())
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SceneError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SceneError::Io(path.to_path_buf(), e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let g = Vec3::from(self.gravity);
        if !(g.iter().all(|c| c.is_finite()) && g.norm() > 0.0) {
            return Err(schema("gravity", "must be a finite non-zero vector"));
        }
        self.segmentation
            .validate()
            .map_err(|e| schema("segmentation", e.to_string()))?;
        if !(self.graph.tau.is_finite() && self.graph.tau >= 0.0) {
            return Err(schema("graph.tau", "must be finite and >= 0"));
        }
        if !(self.graph.adjacency_gap.is_finite() && self.graph.adjacency_gap >= 0.0) {
            return Err(schema("graph.adjacency_gap", "must be finite and >= 0"));
        }
        for (k, f) in self.furniture.iter().enumerate() {
            if !f.center.iter().all(|c| c.is_finite()) {
                return Err(schema(format!("furniture[{k}].center"), "must be finite"));
            }
            if !f.half_extents.iter().all(|h| h.is_finite() && *h >= 0.0) {
                return Err(schema(format!("furniture[{k}].half_extents"), "must be finite and >= 0"));
            }
            if let Some(axes) = &f.axes {
                if axes.iter().any(|a| !(Vec3::from(*a).norm() > 0.0)) {
                    return Err(schema(format!("furniture[{k}].axes"), "axes must be non-zero"));
                }
            }
        }
        for (k, p) in self.patterns.iter().enumerate() {
            if !(p.scale.is_finite() && p.scale > 0.0) {
                return Err(schema(format!("patterns[{k}].scale"), "must be positive"));
            }
            if !(p.u0.is_finite() && p.v0.is_finite()) {
                return Err(schema(format!("patterns[{k}].u0"), "offsets must be finite"));
            }
            if let SegmentSelector::Kind(s) = &p.segment {
                parse_kind_selector(s).map_err(|m| schema(format!("patterns[{k}].segment"), m))?;
            }
        }
        Ok(())
    }
}

fn parse_kind_selector(s: &str) -> Result<(SurfaceKind, usize), String> {
    let (kind, ordinal) = match s.split_once(':') {
        Some((k, n)) => (k, n.parse::<usize>().map_err(|_| format!("bad ordinal in {s:?}"))?),
        None => (s, 0),
    };
    Ok((kind.parse()?, ordinal))
}

impl SegmentSelector {
    pub fn resolve(&self, segments: &[PlanarSegment]) -> Result<usize, String> {
        match self {
            SegmentSelector::Id(id) => segments
                .iter()
                .position(|s| s.id == *id)
                .ok_or_else(|| format!("no segment with id {id}")),
            SegmentSelector::Kind(s) => {
                let (kind, ordinal) = parse_kind_selector(s)?;
                segments
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.kind == kind)
                    .nth(ordinal)
                    .map(|(i, _)| i)
                    .ok_or_else(|| format!("no {} number {ordinal}", kind.name()))
            }
            SegmentSelector::Near { near } => {
                let p = Vec3::from(*near);
                // distance to the plane plus how far the foot point falls
                // outside the segment's rectangle
                let cost = |s: &PlanarSegment| {
                    let off = s.plane.signed_distance(&p).abs();
                    let Some(c) = s.chart else { return f64::INFINITY };
                    let (u, v) = c.to_uv(&p);
                    let b = &s.bounds;
                    let du = (b.u_min - u).max(u - b.u_max).max(0.0);
                    let dv = (b.v_min - v).max(v - b.v_max).max(0.0);
                    off + du.hypot(dv)
                };
                (0..segments.len())
                    .min_by(|&a, &b| cost(&segments[a]).total_cmp(&cost(&segments[b])))
                    .ok_or_else(|| "no segments".to_string())
            }
        }
    }
}

/// Everything the scene pipeline produces.
#[derive(Clone, Debug)]
pub struct SceneOutput {
    pub cloud: PointCloud,
    pub segments: Vec<PlanarSegment>,
    pub patterns: Vec<ProjectedPattern>,
    pub graph: SceneGraph,
    pub warnings: Vec<String>,
}

/// Segments the cloud, projects every placed mask (classifying it with
/// `classify`) and builds the scene graph. `base` resolves relative paths.
pub fn run_scene(
    file: &SceneFile,
    base: &Path,
    classify: impl Fn(&ShapeMask) -> Option<Classification>,
) -> Result<SceneOutput, SceneError> {
    let cloud = read_cloud(base.join(&file.cloud))?.with_gravity(Vec3::from(file.gravity))?;
    let masks = file
        .patterns
        .iter()
        .enumerate()
        .map(|(k, p)| {
            read_mask(base.join(&p.mask)).map_err(|e| schema(format!("patterns[{k}].mask"), e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    run_scene_with(file, cloud, &masks, classify)
}

/// [`run_scene`] on an in-memory cloud and masks (one per placement).
pub fn run_scene_with(
    file: &SceneFile,
    cloud: PointCloud,
    masks: &[ShapeMask],
    classify: impl Fn(&ShapeMask) -> Option<Classification>,
) -> Result<SceneOutput, SceneError> {
    let segments = segment_planes(&cloud, &file.segmentation)?;
    let mut patterns = Vec::new();
    let mut warnings = Vec::new();
    for (k, (p, mask)) in file.patterns.iter().zip(masks).enumerate() {
        let host = p
            .segment
            .resolve(&segments)
            .map_err(|m| SceneError::DanglingReference(format!("patterns[{k}].segment: {m}")))?;
        let placement = Placement {
            u0: p.u0,
            v0: p.v0,
            scale: p.scale,
        };
        let mut proj = project_mask(&cloud, &segments[host], mask, &placement, file.segmentation.inlier_eps)?;
        proj.id = k;
        proj.source = p.mask.display().to_string();
        proj.class = classify(mask);
        if proj.clipped {
            warnings.push(format!(
                "patterns[{k}]: mask footprint extends past segment {}",
                segments[host].id
            ));
        }
        patterns.push(proj);
    }
    let graph = build_scene_graph(&cloud, &segments, &patterns, &file.furniture, &file.graph)?;
    Ok(SceneOutput {
        cloud,
        segments,
        patterns,
        graph,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let f = SceneFile::parse(r#"{"cloud": "c.xyz"}"#).unwrap();
        assert_eq!(f.gravity, [0.0, 0.0, 1.0]);
        assert_eq!(f.segmentation, SegmentConfig::default());
        assert!(f.patterns.is_empty());
    }

    #[test]
    fn errors_name_the_field() {
        let e = SceneFile::parse(r#"{"cloud": "c", "patterns": [{"mask": "m", "segment": 0, "u0": 1, "v0": "x", "scale": 1}]}"#)
            .unwrap_err();
        assert!(e.to_string().contains("patterns[0].v0"), "{e}");
        let e = SceneFile::parse(r#"{"cloud": "c", "patterns": [{"mask": "m", "segment": "wal", "u0": 1, "v0": 1, "scale": 1}]}"#)
            .unwrap_err();
        assert!(e.to_string().contains("patterns[0].segment"), "{e}");
        let e = SceneFile::parse(r#"{"cloud": "c", "bogus": 1}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = SceneFile::parse(r#"{"cloud": "c", "furniture": [{"label": "t", "center": [0,0,0], "half_extents": [1,-1,1]}]}"#)
            .unwrap_err();
        assert!(e.to_string().contains("furniture[0].half_extents"), "{e}");
        assert!(SceneFile::parse(r#"{"patterns": []}"#).is_err());
    }

    #[test]
    fn selectors() {
        let s: SegmentSelector = serde_json::from_str(r#"{"near": [0, 1, 2]}"#).unwrap();
        assert_eq!(s, SegmentSelector::Near { near: [0.0, 1.0, 2.0] });
        assert_eq!(parse_kind_selector("wall:2"), Ok((SurfaceKind::Wall, 2)));
        assert_eq!(parse_kind_selector("floor"), Ok((SurfaceKind::Floor, 0)));
        assert!(parse_kind_selector("wall:x").is_err());
    }
}
