//! Procedural letter outlines and shape files.

use crate::error::{Error, Result};

/// Samples `n` points at equal arc length along the closed polygon `verts`,
/// starting at its first vertex.
fn sample_polygon(verts: &[[f64; 2]], n: usize) -> Vec<f64> {
    let edges: Vec<([f64; 2], [f64; 2], f64)> = (0..verts.len())
        .map(|i| {
            let a = verts[i];
            let b = verts[(i + 1) % verts.len()];
            (a, b, (b[0] - a[0]).hypot(b[1] - a[1]))
        })
        .collect();
    let total: f64 = edges.iter().map(|e| e.2).sum();
    let mut out = Vec::with_capacity(2 * n);
    let mut edge = 0;
    let mut start = 0.0;
    for k in 0..n {
        let s = total * k as f64 / n as f64;
        while s > start + edges[edge].2 {
            start += edges[edge].2;
            edge += 1;
        }
        let (a, b, len) = edges[edge];
        let t = (s - start) / len;
        out.push(a[0] + t * (b[0] - a[0]));
        out.push(a[1] + t * (b[1] - a[1]));
    }
    out
}

/// Outline of a capital T of height `scale`, centred at the origin and
/// traversed clockwise from the middle of the top edge. Every edge length is
/// a multiple of 1/50 of the perimeter, so with 50 points each corner is a
/// sample and no two samples crowd each other at the inner corners.
pub fn letter_t(n: usize, scale: f64) -> Vec<f64> {
    // Units of perimeter/50: width 12, height 13, stem width 4, bar height 3.
    let u = scale / 13.0;
    let v = [
        [0.0, 6.5],
        [6.0, 6.5],
        [6.0, 3.5],
        [2.0, 3.5],
        [2.0, -6.5],
        [-2.0, -6.5],
        [-2.0, 3.5],
        [-6.0, 3.5],
        [-6.0, 6.5],
    ]
    .map(|[x, y]| [u * x, u * y]);
    sample_polygon(&v, n)
}

/// A circle of radius `0.4 · scale`, traversed clockwise from the top.
pub fn letter_o(n: usize, scale: f64) -> Vec<f64> {
    let r = 0.4 * scale;
    (0..n)
        .flat_map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n as f64;
            [r * th.sin(), r * th.cos()]
        })
        .collect()
}

/// Adds `(dx, dy)` to every landmark.
pub fn translate(shape: &[f64], dx: f64, dy: f64) -> Vec<f64> {
    shape
        .chunks(2)
        .flat_map(|p| [p[0] + dx, p[1] + dy])
        .collect()
}

/// Parses a shape from CSV text with an `x,y` header and one landmark per row.
pub fn read_shape_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next().map(|h| h.replace(' ', "")) {
        Some(h) if h == "x,y" => {}
        other => {
            return Err(Error::Parse(format!(
                "shape CSV must start with an x,y header, found {other:?}"
            )))
        }
    }
    let mut out = Vec::new();
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!("row {}: expected two columns", row + 1)));
        }
        for f in fields {
            out.push(
                f.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", row + 1)))?,
            );
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("shape CSV has no landmarks".into()));
    }
    Ok(out)
}

pub fn shape_to_csv(shape: &[f64]) -> String {
    let mut s = String::from("x,y\n");
    for p in shape.chunks(2) {
        s.push_str(&format!("{:e},{:e}\n", p[0], p[1]));
    }
    s
}
