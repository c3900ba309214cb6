//! Point clouds and their ASCII readers (PLY and plain XYZ).

use std::path::Path;

use nalgebra::Rotation3;

use crate::{SceneError, Vec3};

/// Fewest points `segment_planes` accepts.
pub const MIN_POINTS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
    pub colors: Option<Vec<[u8; 3]>>,
    /// Unit vector pointing up.
    pub gravity: Vec3,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Self {
        Self {
            points,
            colors: None,
            gravity: Vec3::z(),
        }
    }

    pub fn with_gravity(mut self, up: Vec3) -> Result<Self, SceneError> {
        let n = up.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(SceneError::Config("gravity axis must be a non-zero vector".into()));
        }
        self.gravity = up / n;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if self.points.len() < MIN_POINTS {
            return Err(SceneError::TooFewPoints(self.points.len(), MIN_POINTS));
        }
        if let Some(i) = self.points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(SceneError::NonFinite(i));
        }
        Ok(())
    }

    pub fn centroid(&self) -> Vec3 {
        mean(self.points.iter())
    }

    /// Applies `p -> r p + t` to every point and turns the gravity axis with
    /// the points.
    pub fn transformed(&self, r: &Rotation3<f64>, t: &Vec3) -> Self {
        Self {
            points: self.points.iter().map(|p| r * p + t).collect(),
            colors: self.colors.clone(),
            gravity: r * self.gravity,
        }
    }

    pub fn to_ply(&self) -> String {
        let mut out = format!(
            "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n",
            self.points.len()
        );
        if self.colors.is_some() {
            out.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
        }
        out.push_str("end_header\n");
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!("{} {} {}", p.x, p.y, p.z));
            if let Some(c) = &self.colors {
                out.push_str(&format!(" {} {} {}", c[i][0], c[i][1], c[i][2]));
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn mean<'a>(points: impl Iterator<Item = &'a Vec3>) -> Vec3 {
    let (mut sum, mut n) = (Vec3::zeros(), 0usize);
    for p in points {
        sum += p;
        n += 1;
    }
    if n == 0 {
        sum
    } else {
        sum / n as f64
    }
}

/// Reads `.ply` files as ASCII PLY and anything else as whitespace-separated
/// XYZ.
pub fn read_cloud(path: impl AsRef<Path>) -> Result<PointCloud, SceneError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SceneError::Io(path.to_path_buf(), e))?;
    let name = path.display().to_string();
    let is_ply = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("ply"));
    if is_ply {
        parse_ply(&text, &name)
    } else {
        parse_xyz(&text, &name)
    }
}

/// ASCII PLY with `x y z` and optional `red green blue` (or `r g b`) vertex
/// properties. Elements after the vertex block are ignored.
pub fn parse_ply(text: &str, name: &str) -> Result<PointCloud, SceneError> {
    let err = |line: usize, msg: &str| SceneError::Parse {
        path: name.to_string(),
        line,
        msg: msg.to_string(),
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(err(1, "missing 'ply' magic")),
    }

    let mut n_vertices = None;
    let mut props: Vec<String> = Vec::new();
    let mut in_vertex = false;
    let mut vertices_first = None;
    loop {
        let Some((i, line)) = lines.next() else {
            return Err(err(0, "missing end_header"));
        };
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.as_slice() {
            ["format", fmt, ..] if *fmt != "ascii" => {
                return Err(err(i + 1, &format!("unsupported format {fmt}, only ascii is read")))
            }
            ["element", "vertex", n] => {
                let n: usize = n.parse().map_err(|_| err(i + 1, "bad vertex count"))?;
                n_vertices = Some(n);
                vertices_first.get_or_insert(true);
                in_vertex = true;
            }
            ["element", ..] => {
                vertices_first.get_or_insert(false);
                in_vertex = false;
            }
            ["property", "list", ..] if in_vertex => {
                return Err(err(i + 1, "list properties on vertices are not supported"))
            }
            ["property", _, pname] if in_vertex => props.push(pname.to_string()),
            ["end_header"] => break,
            _ => {}
        }
    }
    let n = n_vertices.ok_or_else(|| err(0, "no vertex element"))?;
    if vertices_first != Some(true) {
        return Err(err(0, "vertex element must come first"));
    }
    let col = |names: &[&str]| props.iter().position(|p| names.contains(&p.as_str()));
    let (Some(xi), Some(yi), Some(zi)) = (col(&["x"]), col(&["y"]), col(&["z"])) else {
        return Err(err(0, "vertex element lacks x/y/z"));
    };
    let rgb = match (col(&["red", "r"]), col(&["green", "g"]), col(&["blue", "b"])) {
        (Some(r), Some(g), Some(b)) => Some([r, g, b]),
        _ => None,
    };

    let mut points = Vec::with_capacity(n);
    let mut colors = rgb.map(|_| Vec::with_capacity(n));
    for (i, line) in lines.by_ref() {
        if points.len() == n {
            break;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < props.len() {
            return Err(err(i + 1, "too few values"));
        }
        let num = |k: usize| -> Result<f64, SceneError> {
            f[k].parse().map_err(|_| err(i + 1, &format!("bad number {:?}", f[k])))
        };
        points.push(Vec3::new(num(xi)?, num(yi)?, num(zi)?));
        if let (Some(cols), Some([r, g, b])) = (colors.as_mut(), rgb) {
            let byte = |k: usize| -> Result<u8, SceneError> {
                let v = num(k)?;
                // float colors in [0, 1] are scaled up
                let v = if f[k].contains('.') && v <= 1.0 { v * 255.0 } else { v };
                Ok(v.round().clamp(0.0, 255.0) as u8)
            };
            cols.push([byte(r)?, byte(g)?, byte(b)?]);
        }
    }
    if points.len() != n {
        return Err(err(0, &format!("expected {n} vertices, found {}", points.len())));
    }
    Ok(PointCloud {
        points,
        colors,
        gravity: Vec3::z(),
    })
}

/// One point per line: `x y z` or `x y z r g b`. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_xyz(text: &str, name: &str) -> Result<PointCloud, SceneError> {
    let mut points = Vec::new();
    let mut colors: Vec<[u8; 3]> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| SceneError::Parse {
            path: name.to_string(),
            line: i + 1,
            msg,
        };
        let vals: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| err(format!("bad number {s:?}"))))
            .collect::<Result<_, _>>()?;
        match vals.len() {
            3 => {}
            6 => colors.push([vals[3], vals[4], vals[5]].map(|v| v.round().clamp(0.0, 255.0) as u8)),
            k => return Err(err(format!("expected 3 or 6 values, found {k}"))),
        }
        points.push(Vec3::new(vals[0], vals[1], vals[2]));
    }
    let colors = (!colors.is_empty() && colors.len() == points.len()).then_some(colors);
    Ok(PointCloud {
        points,
        colors,
        gravity: Vec3::z(),
    })
}
