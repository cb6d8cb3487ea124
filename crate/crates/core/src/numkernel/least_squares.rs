//! Levenberg–Marquardt for small dense nonlinear least-squares problems.

use serde::{Deserialize, Serialize};

use super::{solve, DenseMatrix};
use crate::error::{Error, Result};

/// Stopping rules for [`levenberg_marquardt`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeastSquaresConfig {
    pub max_iters: usize,
    /// Stop once `½‖r‖²` falls below this.
    pub cost_tol: f64,
    /// Stop once `‖Jᵀr‖` falls below this.
    pub grad_tol: f64,
}

impl Default for LeastSquaresConfig {
    fn default() -> Self {
        LeastSquaresConfig {
            max_iters: 100,
            cost_tol: 1e-24,
            grad_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeastSquaresFit {
    pub x: Vec<f64>,
    /// `½‖r(x)‖²`.
    pub cost: f64,
    pub residual: Vec<f64>,
    pub iters: usize,
    pub jacobian_evals: usize,
    pub converged: bool,
}

fn half_sq(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

/// Minimizes `½‖r(x)‖²`. `residual` evaluates `r` alone; `jacobian` returns
/// `r` and its Jacobian together.
pub fn levenberg_marquardt<R, J>(
    mut residual: R,
    mut jacobian: J,
    x0: &[f64],
    cfg: &LeastSquaresConfig,
) -> Result<LeastSquaresFit>
where
    R: FnMut(&[f64]) -> Result<Vec<f64>>,
    J: FnMut(&[f64]) -> Result<(Vec<f64>, DenseMatrix)>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut r, mut jac) = jacobian(&x)?;
    let mut jevals = 1;
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 0 });
    }
    let mut cost = half_sq(&r);
    let mut lambda = 1e-6;
    for iter in 0..cfg.max_iters {
        let jt = jac.transpose();
        let g = jt.matvec(&r)?;
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if cost <= cfg.cost_tol || gnorm <= cfg.grad_tol {
            return Ok(LeastSquaresFit {
                x,
                cost,
                residual: r,
                iters: iter,
                jacobian_evals: jevals,
                converged: true,
            });
        }
        let jtj = jt.matmul(&jac)?;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
            }
            let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            let step = match solve(&a, &rhs) {
                Ok(s) => s,
                Err(_) => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let ok = match residual(&trial) {
                Ok(rt) if rt.iter().all(|v| v.is_finite()) => {
                    let ct = half_sq(&rt);
                    if ct < cost {
                        Some(trial)
                    } else {
                        None
                    }
                }
                _ => None,
            };
            match ok {
                Some(t) => {
                    x = t;
                    lambda = (lambda / 5.0).max(1e-12);
                    improved = true;
                    break;
                }
                None => lambda *= 8.0,
            }
        }
        if !improved {
            return Ok(LeastSquaresFit {
                x,
                cost,
                residual: r,
                iters: iter,
                jacobian_evals: jevals,
                converged: false,
            });
        }
        let (rn, jn) = jacobian(&x)?;
        jevals += 1;
        r = rn;
        jac = jn;
        cost = half_sq(&r);
    }
    let converged = cost <= cfg.cost_tol;
    Ok(LeastSquaresFit {
        x,
        cost,
        residual: r,
        iters: cfg.max_iters,
        jacobian_evals: jevals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_decay() {
        let ts: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 2.0 * (-1.3 * t).exp()).collect();
        let res = |p: &[f64]| -> Vec<f64> {
            ts.iter().zip(&ys).map(|(t, y)| p[0] * (-p[1] * t).exp() - y).collect()
        };
        let fit = levenberg_marquardt(
            |p| Ok(res(p)),
            |p| {
                let mut j = DenseMatrix::zeros(ts.len(), 2);
                for (i, t) in ts.iter().enumerate() {
                    let e = (-p[1] * t).exp();
                    j[(i, 0)] = e;
                    j[(i, 1)] = -p[0] * t * e;
                }
                Ok((res(p), j))
            },
            &[1.0, 0.5],
            &LeastSquaresConfig::default(),
        )
        .unwrap();
        assert!(fit.converged);
        assert!((fit.x[0] - 2.0).abs() < 1e-9 && (fit.x[1] - 1.3).abs() < 1e-9);
    }
}
