//! Named manifolds constructible from a string id.

use super::Manifold;
use crate::autodiff::{Jet, SmoothMap};
use crate::error::{Error, Result};

/// `R^d` with the identity embedding.
pub fn euclidean(d: usize) -> Result<Manifold> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    Manifold::from_embedding(format!("euclidean:{d}"), SmoothMap::identity(d))
}

fn stereographic(x: &[Jet]) -> Result<[Jet; 3]> {
    let r2 = &x[0] * &x[0] + &x[1] * &x[1];
    let inv = (&r2 + 1.0).recip()?;
    Ok([
        &x[0] * &inv * 2.0,
        &x[1] * &inv * 2.0,
        (r2 - 1.0) * &inv,
    ])
}

/// The unit sphere in stereographic coordinates; the chart covers all of
/// `R²` and reaches every point but the north pole.
pub fn sphere_stereographic() -> Result<Manifold> {
    let f = SmoothMap::new(2, 3, |x| Ok(stereographic(x)?.to_vec()));
    Manifold::from_embedding("sphere-stereographic", f)
}

/// The ellipsoid `diag(a, b, c) · S²` in stereographic coordinates.
pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Manifold> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ellipsoid semi-axes must be positive, got ({a}, {b}, {c})"
        )));
    }
    let f = SmoothMap::new(2, 3, move |x| {
        let [u, v, w] = stereographic(x)?;
        Ok(vec![u * a, v * b, w * c])
    });
    Manifold::from_embedding(format!("ellipsoid:{a},{b},{c}"), f)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in {what}")))
        })
        .collect()
}

/// Builds a manifold from an id such as `euclidean:3`, `sphere-stereographic`,
/// `ellipsoid:1,0.8,1.2` or `landmarks:50,0.1,1`.
pub fn from_id(id: &str) -> Result<Manifold> {
    let (head, args) = match id.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (id, None),
    };
    match (head, args) {
        ("sphere-stereographic", None) | ("sphere", None) => sphere_stereographic(),
        ("euclidean", Some(a)) => {
            let d = a
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dimension in {id:?}")))?;
            euclidean(d)
        }
        ("ellipsoid", Some(a)) => match parse_list(a, id)?.as_slice() {
            [a, b, c] => ellipsoid(*a, *b, *c),
            _ => Err(Error::Parse(format!("ellipsoid needs three semi-axes: {id:?}"))),
        },
        ("landmarks", Some(a)) => match parse_list(a, id)?.as_slice() {
            [n, sigma, alpha] if *n >= 1.0 && n.fract() == 0.0 => {
                crate::landmarks::LandmarkConfig::new(*n as usize, *sigma, *alpha)?.manifold()
            }
            _ => Err(Error::Parse(format!(
                "landmarks needs <n>,<sigma>,<alpha>: {id:?}"
            ))),
        },
        _ => Err(Error::Parse(format!("unknown manifold id {id:?}"))),
    }
}
