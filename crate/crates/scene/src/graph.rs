//! Scene graph over surfaces, projected patterns and furniture.

use std::collections::BTreeMap;

use nalgebra::Rotation3;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cloud::PointCloud;
use crate::project::ProjectedPattern;
use crate::segment::{PlanarSegment, SurfaceKind};
use crate::{SceneError, Vec3};

/// A labeled box, optionally rotated. `axes` holds the box's local x, y and
/// z directions in world coordinates; the default is the world frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Furniture {
    pub label: String,
    pub center: [f64; 3],
    pub half_extents: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<[[f64; 3]; 3]>,
}

impl Furniture {
    pub fn center(&self) -> Vec3 {
        Vec3::from(self.center)
    }

    fn frame(&self) -> [Vec3; 3] {
        match self.axes {
            Some(a) => a.map(|v| Vec3::from(v).normalize()),
            None => [Vec3::x(), Vec3::y(), Vec3::z()],
        }
    }

    /// Same box after `p -> r p + t`.
    pub fn transformed(&self, r: &Rotation3<f64>, t: &Vec3) -> Self {
        let axes = self.frame().map(|a| {
            let b = r * a;
            [b.x, b.y, b.z]
        });
        let c = r * self.center() + t;
        Self {
            label: self.label.clone(),
            center: [c.x, c.y, c.z],
            half_extents: self.half_extents,
            axes: Some(axes),
        }
    }

    /// Whether the line through `p` along `up` passes through the box.
    pub fn vertically_overlaps(&self, p: &Vec3, up: &Vec3) -> bool {
        let d = p - self.center();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, h) in self.frame().iter().zip(self.half_extents) {
            let (off, rate) = (d.dot(a), up.dot(a));
            if rate.abs() < 1e-12 {
                if off.abs() > h {
                    return false;
                }
                continue;
            }
            let (t0, t1) = ((-h - off) / rate, (h - off) / rate);
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
        lo <= hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphConfig {
    /// NEAR threshold in meters.
    pub tau: f64,
    /// Two surfaces are ADJACENT when one has an inlier within this many
    /// meters of the other's plane and inside its rectangle.
    pub adjacency_gap: f64,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            tau: 1.5,
            adjacency_gap: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeKind {
    Pattern,
    Wall,
    Floor,
    Ceiling,
    Furniture,
    /// A planar segment that is neither wall, floor nor ceiling.
    Surface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    On,
    Adjacent,
    Above,
    Below,
    Near,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub centroid: [f64; 3],
    pub attributes: BTreeMap<String, Value>,
}

/// A relation from `a` to `b`; `Above` reads "a is above b".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub distance_m: f64,
    pub relation: Relation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub a: String,
    pub b: String,
    pub distance_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// Centroid distance for every unordered node pair, in node order.
    pub distances: Vec<Distance>,
}

impl SceneGraph {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edges_of(&self, relation: Relation) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.relation == relation)
    }

    pub fn distance(&self, a: &str, b: &str) -> Option<f64> {
        self.distances
            .iter()
            .find(|d| (d.a == a && d.b == b) || (d.a == b && d.b == a))
            .map(|d| d.distance_m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    /// `id_a,id_b,distance_m`, one row per node pair.
    pub fn distances_csv(&self) -> String {
        let mut out = String::from("id_a,id_b,distance_m\n");
        for d in &self.distances {
            out.push_str(&format!("{},{},{}\n", d.a, d.b, d.distance_m));
        }
        out
    }
}

pub fn segment_node_id(id: usize) -> String {
    format!("segment_{id}")
}

pub fn pattern_node_id(id: usize) -> String {
    format!("pattern_{id}")
}

pub fn furniture_node_id(k: usize) -> String {
    format!("furniture_{k}")
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

pub fn build_scene_graph(
    cloud: &PointCloud,
    segments: &[PlanarSegment],
    patterns: &[ProjectedPattern],
    furniture: &[Furniture],
    cfg: &GraphConfig,
) -> Result<SceneGraph, SceneError> {
    if !(cfg.tau.is_finite() && cfg.tau >= 0.0) {
        return Err(SceneError::Config("tau must be finite and >= 0".into()));
    }
    let up = cloud.gravity;
    let mut nodes = Vec::new();
    for s in segments {
        let kind = match s.kind {
            SurfaceKind::Wall => NodeKind::Wall,
            SurfaceKind::Floor => NodeKind::Floor,
            SurfaceKind::Ceiling => NodeKind::Ceiling,
            SurfaceKind::Other => NodeKind::Surface,
        };
        let mut attributes = BTreeMap::new();
        attributes.insert("normal".into(), json!(arr(&s.plane.normal)));
        attributes.insert("offset".into(), json!(s.plane.offset));
        attributes.insert("n_inliers".into(), json!(s.inliers.len()));
        attributes.insert("rms_residual".into(), json!(s.rms_residual));
        attributes.insert("extent_m".into(), json!([s.bounds.width(), s.bounds.height()]));
        nodes.push(Node {
            id: segment_node_id(s.id),
            kind,
            label: s.kind.name().into(),
            centroid: arr(&s.centroid),
            attributes,
        });
    }
    for p in patterns {
        if !segments.iter().any(|s| s.id == p.host) {
            return Err(SceneError::DanglingReference(format!(
                "pattern {} is hosted by unknown segment {}",
                p.id, p.host
            )));
        }
        let mut attributes = BTreeMap::new();
        attributes.insert("host".into(), json!(segment_node_id(p.host)));
        attributes.insert("source".into(), json!(p.source));
        attributes.insert("area_m2".into(), json!(p.area_m2));
        attributes.insert("n_points".into(), json!(p.indices.len()));
        attributes.insert("clipped".into(), json!(p.clipped));
        if let Some(c) = &p.class {
            attributes.insert("probability".into(), json!(c.probability));
            let probs: serde_json::Map<String, Value> =
                c.probabilities.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            attributes.insert("probabilities".into(), Value::Object(probs));
        }
        nodes.push(Node {
            id: pattern_node_id(p.id),
            kind: NodeKind::Pattern,
            label: p.class.as_ref().map_or("pattern".into(), |c| c.label.clone()),
            centroid: arr(&p.centroid),
            attributes,
        });
    }
    for (k, f) in furniture.iter().enumerate() {
        let mut attributes = BTreeMap::new();
        attributes.insert("half_extents".into(), json!(f.half_extents));
        nodes.push(Node {
            id: furniture_node_id(k),
            kind: NodeKind::Furniture,
            label: f.label.clone(),
            centroid: f.center,
            attributes,
        });
    }

    let pos = |n: &Node| Vec3::from(n.centroid);
    let dist = |a: &Node, b: &Node| (pos(a) - pos(b)).norm();
    let mut distances = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            distances.push(Distance {
                a: nodes[i].id.clone(),
                b: nodes[j].id.clone(),
                distance_m: dist(&nodes[i], &nodes[j]),
            });
        }
    }

    let mut edges = Vec::new();
    let edge = |a: &Node, b: &Node, relation| Edge {
        a: a.id.clone(),
        b: b.id.clone(),
        distance_m: dist(a, b),
        relation,
    };
    let by_id = |id: &str| nodes.iter().find(|n| n.id == id).expect("node exists");

    for (i, a) in segments.iter().enumerate() {
        for b in &segments[i + 1..] {
            if adjacent(cloud, a, b, cfg.adjacency_gap) || adjacent(cloud, b, a, cfg.adjacency_gap) {
                edges.push(edge(
                    by_id(&segment_node_id(a.id)),
                    by_id(&segment_node_id(b.id)),
                    Relation::Adjacent,
                ));
            }
        }
    }
    for p in patterns {
        let pn = by_id(&pattern_node_id(p.id));
        edges.push(edge(pn, by_id(&segment_node_id(p.host)), Relation::On));
        for (k, f) in furniture.iter().enumerate() {
            if !f.vertically_overlaps(&p.centroid, &up) {
                continue;
            }
            let rise = (p.centroid - f.center()).dot(&up);
            let fnode = by_id(&furniture_node_id(k));
            if rise > 0.0 {
                edges.push(edge(pn, fnode, Relation::Above));
            } else if rise < 0.0 {
                edges.push(edge(pn, fnode, Relation::Below));
            }
        }
    }
    let movable: Vec<&Node> = nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::Pattern | NodeKind::Furniture))
        .collect();
    for (i, a) in movable.iter().enumerate() {
        for b in &movable[i + 1..] {
            if dist(a, b) < cfg.tau {
                edges.push(edge(a, b, Relation::Near));
            }
        }
    }

    Ok(SceneGraph {
        nodes,
        edges,
        distances,
    })
}

/// Some inlier of `a` lies within `gap` of `b`'s plane and inside `b`'s
/// rectangle grown by `gap`.
fn adjacent(cloud: &PointCloud, a: &PlanarSegment, b: &PlanarSegment, gap: f64) -> bool {
    let Some(chart) = b.chart else {
        return false;
    };
    let r = &b.bounds;
    a.inliers.iter().any(|&i| {
        let p = &cloud.points[i];
        if b.plane.signed_distance(p).abs() > gap {
            return false;
        }
        let (u, v) = chart.to_uv(p);
        u >= r.u_min - gap && u <= r.u_max + gap && v >= r.v_min - gap && v <= r.v_max + gap
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(center: [f64; 3]) -> Furniture {
        Furniture {
            label: "table".into(),
            center,
            half_extents: [0.5, 0.5, 0.4],
            axes: None,
        }
    }

    #[test]
    fn vertical_overlap() {
        let t = table([0.0, 0.0, 0.0]);
        assert!(t.vertically_overlaps(&Vec3::new(0.2, -0.3, 5.0), &Vec3::z()));
        assert!(!t.vertically_overlaps(&Vec3::new(0.6, 0.0, 5.0), &Vec3::z()));
        let turned = t.transformed(
            &Rotation3::from_axis_angle(&Vec3::z_axis(), std::f64::consts::FRAC_PI_4),
            &Vec3::zeros(),
        );
        // the corner of the turned box reaches 0.5 * sqrt(2) along x
        assert!(turned.vertically_overlaps(&Vec3::new(0.6, 0.0, 1.0), &Vec3::z()));
    }
}
