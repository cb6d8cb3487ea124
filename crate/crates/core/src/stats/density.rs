use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::SampleSet;
use crate::error::{Error, Result};
use crate::manifold::Manifold;
use crate::numkernel::DenseMatrix;

/// Kernel density estimate on a latitude/longitude grid of a closed surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    /// Cell-centred latitudes in `(−π/2, π/2)`.
    pub lat: Vec<f64>,
    /// Cell-centred longitudes in `(0, 2π)`.
    pub lon: Vec<f64>,
    pub bandwidth: f64,
    /// `n_lat × n_lon`; integrates to one against `area`.
    pub density: DenseMatrix,
    /// Surface area of each cell.
    pub area: DenseMatrix,
    /// Embedded cell centres, row-major over `(lat, lon)`.
    pub points: Vec<[f64; 3]>,
}

fn direction(lat: f64, lon: f64) -> [f64; 3] {
    [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
}

/// Chart point of a unit direction under stereographic projection from the
/// north pole.
fn chart_of(s: [f64; 3]) -> [f64; 2] {
    let k = 1.0 / (1.0 - s[2]);
    [s[0] * k, s[1] * k]
}

fn surface(m: &Manifold, lat: f64, lon: f64) -> Result<[f64; 3]> {
    let x = chart_of(direction(lat, lon));
    let p = m
        .embed(&x)?
        .ok_or_else(|| Error::InvalidArgument("density grids need an embedded manifold".into()))?;
    match p.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(Error::InvalidArgument("density grids need a surface in R³".into())),
    }
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross_norm(a: [f64; 3], b: [f64; 3]) -> f64 {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

/// Gaussian kernel density of `samples` (chart points, embedded through the
/// manifold) evaluated at the centres of an `n_lat × n_lon` grid.
///
/// Grid cells are laid out on the unit sphere and carried to the surface
/// through the stereographic chart, so the manifold must be one of the
/// stereographic surfaces (sphere, ellipsoid).
pub fn density_grid(
    m: &Manifold,
    samples: &SampleSet,
    bandwidth: f64,
    n_lat: usize,
    n_lon: usize,
) -> Result<DensityGrid> {
    if m.dim() != 2 || samples.dim() != 2 {
        return Err(Error::InvalidArgument("density grids are defined for surfaces".into()));
    }
    if !(bandwidth > 0.0) || n_lat < 2 || n_lon < 3 {
        return Err(Error::InvalidArgument(
            "need bandwidth > 0, n_lat >= 2 and n_lon >= 3".into(),
        ));
    }
    let embedded: Vec<[f64; 3]> = samples
        .points()
        .iter()
        .map(|x| {
            let p = m.embed(x)?.ok_or_else(|| {
                Error::InvalidArgument("density grids need an embedded manifold".into())
            })?;
            Ok([p[0], p[1], p[2]])
        })
        .collect::<Result<_>>()?;
    let dlat = PI / n_lat as f64;
    let dlon = TAU / n_lon as f64;
    let lat: Vec<f64> = (0..n_lat).map(|i| -FRAC_PI_2 + (i as f64 + 0.5) * dlat).collect();
    let lon: Vec<f64> = (0..n_lon).map(|j| (j as f64 + 0.5) * dlon).collect();
    let h = 1e-6;
    let inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    let mut density = DenseMatrix::zeros(n_lat, n_lon);
    let mut area = DenseMatrix::zeros(n_lat, n_lon);
    let mut points = Vec::with_capacity(n_lat * n_lon);
    let mut mass = 0.0;
    for (i, &la) in lat.iter().enumerate() {
        for (j, &lo) in lon.iter().enumerate() {
            let p = surface(m, la, lo)?;
            let p_lat = sub3(surface(m, la + h, lo)?, surface(m, la - h, lo)?);
            let p_lon = sub3(surface(m, la, lo + h)?, surface(m, la, lo - h)?);
            let a = cross_norm(p_lat, p_lon) / (4.0 * h * h) * dlat * dlon;
            let rho: f64 = embedded
                .iter()
                .map(|q| {
                    let r = sub3(p, *q);
                    (-(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]) * inv2h2).exp()
                })
                .sum();
            density[(i, j)] = rho;
            area[(i, j)] = a;
            mass += rho * a;
            points.push(p);
        }
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidArgument(
            "bandwidth too small: the density vanishes on the grid".into(),
        ));
    }
    Ok(DensityGrid {
        lat,
        lon,
        bandwidth,
        density: density.scale(1.0 / mass),
        area,
        points,
    })
}

impl DensityGrid {
    pub fn total_mass(&self) -> f64 {
        self.density.data().iter().zip(self.area.data()).map(|(r, a)| r * a).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.area.data().iter().sum()
    }

    /// Ambient mean and covariance of the density.
    pub fn moments(&self) -> ([f64; 3], DenseMatrix) {
        let w: Vec<f64> = self.density.data().iter().zip(self.area.data()).map(|(r, a)| r * a).collect();
        let total: f64 = w.iter().sum();
        let mut mean = [0.0; 3];
        for (p, wi) in self.points.iter().zip(&w) {
            (0..3).for_each(|k| mean[k] += wi * p[k] / total);
        }
        let mut cov = DenseMatrix::zeros(3, 3);
        for (p, wi) in self.points.iter().zip(&w) {
            let r = sub3(*p, mean);
            for a in 0..3 {
                for b in 0..3 {
                    cov[(a, b)] += wi * r[a] * r[b] / total;
                }
            }
        }
        (mean, cov)
    }

    /// Cell index of the largest density value.
    pub fn argmax(&self) -> (usize, usize) {
        let (k, _) = self
            .density
            .data()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |b, (k, &v)| if v > b.1 { (k, v) } else { b });
        (k / self.lon.len(), k % self.lon.len())
    }

    /// The density matrix as CSV, one latitude per row.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.lat.len() {
            let row: Vec<String> = self.density.row(i).iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Grid description accompanying [`DensityGrid::to_csv`].
    pub fn metadata(&self) -> serde_json::Value {
        json!({
            "n_lat": self.lat.len(),
            "n_lon": self.lon.len(),
            "lat_range": [-FRAC_PI_2, FRAC_PI_2],
            "lon_range": [0.0, TAU],
            "cell_centred": true,
            "bandwidth": self.bandwidth,
            "total_area": self.total_area(),
        })
    }
}
