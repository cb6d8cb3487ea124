use std::fmt;
use std::sync::Arc;

use super::jet::{Jet, JetSpace};
use crate::error::{Error, Result};
use crate::numkernel::{DenseMatrix, Tensor};

type MapFn = dyn Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync;

/// A smooth map `R^domain_dim -> R^codomain_dim` written against jets.
///
/// The closure must only use jet arithmetic and the elementary functions on
/// [`Jet`], so that evaluating it on seeded jets yields exact derivatives.
#[derive(Clone)]
pub struct SmoothMap {
    domain_dim: usize,
    codomain_dim: usize,
    f: Arc<MapFn>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap({} -> {})", self.domain_dim, self.codomain_dim)
    }
}

impl SmoothMap {
    pub fn new<F>(domain_dim: usize, codomain_dim: usize, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static,
    {
        SmoothMap {
            domain_dim,
            codomain_dim,
            f: Arc::new(f),
        }
    }

    /// The identity map on `R^d`.
    pub fn identity(d: usize) -> Self {
        SmoothMap::new(d, d, |x| Ok(x.to_vec()))
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn eval(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        if x.len() != self.domain_dim {
            return Err(Error::DimensionMismatch {
                what: "smooth map input",
                expected: self.domain_dim,
                got: x.len(),
            });
        }
        let y = (self.f)(x)?;
        if y.len() != self.codomain_dim {
            return Err(Error::DimensionMismatch {
                what: "smooth map output",
                expected: self.codomain_dim,
                got: y.len(),
            });
        }
        Ok(y)
    }

    /// Plain evaluation at a real point.
    pub fn eval_f64(&self, x: &[f64]) -> Result<Vec<f64>> {
        let jets: Vec<Jet> = x.iter().map(|&v| Jet::scalar(v)).collect();
        Ok(self.eval(&jets)?.iter().map(Jet::value).collect())
    }

    /// Local Taylor expansion at `x` of the given order, one jet per output.
    pub fn taylor(&self, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        if x.len() != self.domain_dim {
            return Err(Error::DimensionMismatch {
                what: "evaluation point",
                expected: self.domain_dim,
                got: x.len(),
            });
        }
        let space = JetSpace::get(self.domain_dim, order);
        self.eval(&Jet::variables(&space, x))
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &SmoothMap) -> Result<SmoothMap> {
        if g.domain_dim != self.codomain_dim {
            return Err(Error::DimensionMismatch {
                what: "composition",
                expected: self.codomain_dim,
                got: g.domain_dim,
            });
        }
        let f = self.clone();
        let g2 = g.clone();
        Ok(SmoothMap::new(self.domain_dim, g.codomain_dim, move |x| {
            g2.eval(&f.eval(x)?)
        }))
    }
}

/// Jacobian `∂f_i/∂x_j` at `x`, exact to roundoff.
pub fn jacobian(f: &SmoothMap, x: &[f64]) -> Result<DenseMatrix> {
    let y = f.taylor(x, 1)?;
    let mut m = DenseMatrix::zeros(f.codomain_dim(), f.domain_dim());
    for (i, yi) in y.iter().enumerate() {
        for j in 0..f.domain_dim() {
            m[(i, j)] = yi.d(j);
        }
    }
    Ok(m)
}

/// All partials of the given order as a tensor of shape
/// `[codomain, domain, domain(, domain)]`, symmetric in the trailing axes.
pub fn higher_derivative(f: &SmoothMap, x: &[f64], order: usize) -> Result<Tensor> {
    if !(2..=3).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let d = f.domain_dim();
    let y = f.taylor(x, order)?;
    let mut shape = vec![f.codomain_dim()];
    shape.extend(std::iter::repeat_n(d, order));
    let mut t = Tensor::zeros(&shape);
    let mut exp = vec![0u8; d];
    crate::numkernel::for_each_index(&shape, |idx| {
        exp.iter_mut().for_each(|e| *e = 0);
        for &v in &idx[1..] {
            exp[v] += 1;
        }
        t.set(idx, y[idx[0]].derivative(&exp));
    });
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_jacobian() {
        let j = jacobian(&SmoothMap::identity(2), &[0.4, -2.0]).unwrap();
        assert_eq!(j, DenseMatrix::identity(2));
    }

    #[test]
    fn gradient_of_quadratic() {
        let f = SmoothMap::new(3, 1, |x| Ok(vec![&x[0] * &x[0] + &x[1] * &x[1] + &x[2] * &x[2]]));
        let j = jacobian(&f, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(j.row(0), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = SmoothMap::identity(2);
        assert!(matches!(
            jacobian(&f, &[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bilinear_hessian() {
        let f = SmoothMap::new(2, 1, |x| Ok(vec![&x[0] * &x[1]]));
        let h = higher_derivative(&f, &[0.3, 0.9], 2).unwrap();
        assert_eq!(h.data(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn affine_map_has_zero_hessian() {
        let f = SmoothMap::new(2, 2, |x| Ok(vec![&x[0] * 3.0 - &x[1] + 1.0, &x[1] * 0.5]));
        let h = higher_derivative(&f, &[1.0, 1.0], 2).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn cubic_third_derivative() {
        let f = SmoothMap::new(1, 1, |x| Ok(vec![x[0].powi(3)?]));
        let t = higher_derivative(&f, &[0.7], 3).unwrap();
        assert!((t.data()[0] - 6.0).abs() < 1e-14);
    }

    #[test]
    fn unsupported_order() {
        let f = SmoothMap::identity(1);
        assert!(matches!(
            higher_derivative(&f, &[0.0], 4),
            Err(Error::UnsupportedOrder(4))
        ));
        assert!(higher_derivative(&f, &[0.0], 1).is_err());
    }
}
