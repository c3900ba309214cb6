//! Self-contained SVG plots. Markers and shapes carry a `class` attribute so
//! tests can count them without rendering.

use std::fmt::Write;

use firesig::features::Extremum;
use firesig_scene::graph::Furniture;
use firesig_scene::scene_file::SceneOutput;
use firesig_scene::{SurfaceKind, Vec3};

const STYLE: &str = "text{font-family:sans-serif;font-size:12px}\
.axis{stroke:#333;stroke-width:1}\
.grid{stroke:#ddd;stroke-width:1}\
.curve{fill:none;stroke:#c0392b;stroke-width:1.5}\
.peak{fill:#c0392b}\
.valley{fill:#2471a3}\
.wall{fill:none;stroke:#555;stroke-width:3}\
.floor{fill:#f4f1ea;stroke:#999;stroke-width:1}\
.ceiling{fill:none;stroke:#bbb;stroke-width:1;stroke-dasharray:4 3}\
.other{fill:none;stroke:#888;stroke-width:1}\
.furniture{fill:#d5e8d4;stroke:#82b366;stroke-width:1}\
.pattern{fill:#e67e22;fill-opacity:0.7;stroke:#a04000}";

fn open(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n<title>{}</title>\n<style>{STYLE}</style>\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Aspect ratio against angle, with the detected extrema marked.
pub fn signature_plot(values: &[f64], peaks: &[Extremum], valleys: &[Extremum], title: &str) -> String {
    let (w, h) = (760.0, 360.0);
    let (left, right, top, bottom) = (60.0, 20.0, 30.0, 45.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let n = values.len().max(1) as f64;
    let x = |theta: f64| left + theta / n * pw;
    let y = |v: f64| top + (1.0 - v.clamp(0.0, 1.0)) * ph;

    let mut s = String::new();
    open(&mut s, w, h, title);
    let _ = writeln!(s, "<text x=\"{left}\" y=\"18\">{}</text>", escape(title));
    for k in 0..=4 {
        let v = k as f64 / 4.0;
        let _ = writeln!(
            s,
            "<line class=\"grid\" x1=\"{left}\" x2=\"{:.1}\" y1=\"{:.1}\" y2=\"{:.1}\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{v:.2}</text>",
            left + pw,
            y(v),
            y(v),
            left - 6.0,
            y(v) + 4.0
        );
    }
    for deg in (0..=360).step_by(45) {
        let px = left + deg as f64 / 360.0 * pw;
        let _ = writeln!(
            s,
            "<line class=\"axis\" x1=\"{px:.1}\" x2=\"{px:.1}\" y1=\"{:.1}\" y2=\"{:.1}\"/>\
             <text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{deg}</text>",
            top + ph,
            top + ph + 5.0,
            top + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        "<line class=\"axis\" x1=\"{left}\" x2=\"{left}\" y1=\"{top}\" y2=\"{:.1}\"/>\
         <line class=\"axis\" x1=\"{left}\" x2=\"{:.1}\" y1=\"{:.1}\" y2=\"{:.1}\"/>",
        top + ph,
        left + pw,
        top + ph,
        top + ph
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">rotation angle (degrees)</text>\
         <text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">aspect ratio</text>",
        left + pw / 2.0,
        h - 6.0,
        top + ph / 2.0,
        top + ph / 2.0
    );

    s.push_str("<polyline class=\"curve\" points=\"");
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.2},{:.2}", x(i as f64), y(*v));
    }
    s.push_str("\"/>\n");
    for (class, list) in [("peak", peaks), ("valley", valleys)] {
        for e in list {
            let v = values.get(e.angle).copied().unwrap_or(e.value);
            let _ = writeln!(
                s,
                "<circle class=\"{class}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\"><title>{class} {}\u{b0} {v:.3}</title></circle>",
                x(e.angle as f64),
                y(v),
                e.angle
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Two horizontal axes perpendicular to `up`, right-handed with it.
fn ground_basis(up: &Vec3) -> (Vec3, Vec3) {
    let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
    let seed = axes
        .iter()
        .min_by(|a, b| a.dot(up).abs().total_cmp(&b.dot(up).abs()))
        .copied()
        .unwrap_or_else(Vec3::x);
    let e1 = (seed - up * seed.dot(up)).normalize();
    (e1, up.cross(&e1))
}

/// Convex hull (monotone chain), counter-clockwise.
fn hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn box_corners(f: &Furniture) -> Vec<Vec3> {
    let frame = match f.axes {
        Some(a) => a.map(|v| Vec3::from(v).normalize()),
        None => [Vec3::x(), Vec3::y(), Vec3::z()],
    };
    let c = f.center();
    let mut out = Vec::with_capacity(8);
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                out.push(
                    c + frame[0] * (sx * f.half_extents[0])
                        + frame[1] * (sy * f.half_extents[1])
                        + frame[2] * (sz * f.half_extents[2]),
                );
            }
        }
    }
    out
}

/// Top-down sketch of a scene: surfaces as their footprints seen along
/// gravity, furniture boxes, and patterns as discs of matching area.
pub fn scene_sketch(scene: &SceneOutput, furniture: &[Furniture], title: &str) -> String {
    let (e1, e2) = ground_basis(&scene.cloud.gravity);
    let flat = |p: &Vec3| [p.dot(&e1), p.dot(&e2)];

    let mut surfaces = Vec::new();
    for seg in &scene.segments {
        let Some(chart) = seg.chart else { continue };
        let b = &seg.bounds;
        let corners = [
            (b.u_min, b.v_min),
            (b.u_max, b.v_min),
            (b.u_max, b.v_max),
            (b.u_min, b.v_max),
        ]
        .map(|(u, v)| flat(&chart.to_world(u, v)));
        surfaces.push((seg, hull(corners.to_vec())));
    }
    let boxes: Vec<_> = furniture
        .iter()
        .map(|f| (f, hull(box_corners(f).iter().map(flat).collect())))
        .collect();
    let discs: Vec<_> = scene
        .patterns
        .iter()
        .map(|p| (p, flat(&p.centroid), (p.area_m2 / std::f64::consts::PI).sqrt()))
        .collect();

    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut grow = |q: [f64; 2], r: f64| {
        for k in 0..2 {
            lo[k] = lo[k].min(q[k] - r);
            hi[k] = hi[k].max(q[k] + r);
        }
    };
    for (_, poly) in &surfaces {
        poly.iter().for_each(|q| grow(*q, 0.0));
    }
    for (_, poly) in &boxes {
        poly.iter().for_each(|q| grow(*q, 0.0));
    }
    for (_, q, r) in &discs {
        grow(*q, *r);
    }
    if !lo[0].is_finite() {
        lo = [0.0, 0.0];
        hi = [1.0, 1.0];
    }

    let (side, margin) = (600.0, 40.0);
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-6);
    let k = (side - 2.0 * margin) / span;
    let (w, h) = (2.0 * margin + (hi[0] - lo[0]) * k, 2.0 * margin + (hi[1] - lo[1]) * k + 20.0);
    let px = |q: [f64; 2]| (margin + (q[0] - lo[0]) * k, h - margin - (q[1] - lo[1]) * k);
    let points = |poly: &[[f64; 2]]| {
        poly.iter()
            .map(|q| {
                let (x, y) = px(*q);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    open(&mut s, w.round(), h.round(), title);
    let _ = writeln!(s, "<text x=\"{margin}\" y=\"18\">{}</text>", escape(title));
    // floor first so walls and markers draw on top of it
    let order = [SurfaceKind::Floor, SurfaceKind::Other, SurfaceKind::Wall, SurfaceKind::Ceiling];
    for kind in order {
        for (seg, poly) in surfaces.iter().filter(|(s, _)| s.kind == kind) {
            let _ = writeln!(
                s,
                "<polygon class=\"{}\" points=\"{}\"><title>segment_{} {}</title></polygon>",
                kind.name(),
                points(poly),
                seg.id,
                kind.name()
            );
        }
    }
    for (k_f, (f, poly)) in boxes.iter().enumerate() {
        let _ = writeln!(
            s,
            "<polygon class=\"furniture\" points=\"{}\"><title>furniture_{k_f} {}</title></polygon>",
            points(poly),
            escape(&f.label)
        );
        let (x, y) = px(flat(&f.center()));
        let _ = writeln!(s, "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"middle\">{}</text>", escape(&f.label));
    }
    for (p, q, r) in &discs {
        let (x, y) = px(*q);
        let label = p
            .class
            .as_ref()
            .map(|c| format!("{} {:.0}%", c.label, 100.0 * c.probability))
            .unwrap_or_else(|| format!("pattern_{}", p.id));
        let _ = writeln!(
            s,
            "<circle class=\"pattern\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{:.2}\"><title>pattern_{}</title></circle>\
             <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            (r * k).max(3.0),
            p.id,
            y - (r * k).max(3.0) - 4.0,
            escape(&label)
        );
    }
    let bar = 1.0 * k;
    let _ = writeln!(
        s,
        "<line class=\"axis\" x1=\"{margin}\" x2=\"{:.2}\" y1=\"{:.2}\" y2=\"{:.2}\"/>\
         <text x=\"{margin}\" y=\"{:.2}\">1 m</text>",
        margin + bar,
        h - 12.0,
        h - 12.0,
        h - 16.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior_point() {
        let h = hull(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.5], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn ground_basis_for_z_up() {
        let (e1, e2) = ground_basis(&Vec3::z());
        assert!((e1 - Vec3::x()).norm() < 1e-12);
        assert!((e2 - Vec3::y()).norm() < 1e-12);
    }

    #[test]
    fn markers_are_counted_by_class() {
        let values: Vec<f64> = (0..360).map(|t| 0.5 + 0.5 * (t as f64).to_radians().cos().abs()).collect();
        let peak = |angle| Extremum {
            angle,
            value: 1.0,
            prominence: 0.5,
        };
        let svg = signature_plot(&values, &[peak(0), peak(180)], &[], "t<1>");
        assert_eq!(svg.matches("class=\"peak\"").count(), 2);
        assert!(svg.contains("t&lt;1&gt;"));
        assert!(!svg.contains("href"));
    }
}
