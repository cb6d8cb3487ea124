//! Fixed-step ODE and SDE integrators.
//!
//! Every scheme is generic over [`Scalar`], implemented for `f64` and for
//! [`Jet`]. Both implementations perform the same floating-point operations
//! on the value part, so a jet-valued run reproduces the plain run exactly
//! while also carrying derivatives with respect to whatever was seeded.

mod trajectory;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::autodiff::Jet;
use crate::error::{Error, Result};
use crate::numkernel::DenseMatrix;

pub use trajectory::Trajectory;

/// Arithmetic needed by the integrators.
pub trait Scalar: Clone {
    fn value(&self) -> f64;
    /// `self + a * x`
    fn axpy(&self, a: f64, x: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn is_finite(&self) -> bool;
    fn from_f64(v: f64) -> Self;
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn axpy(&self, a: f64, x: &f64) -> f64 {
        self + a * x
    }
    fn scale(&self, s: f64) -> f64 {
        self * s
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn from_f64(v: f64) -> f64 {
        v
    }
}

impl Scalar for Jet {
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn axpy(&self, a: f64, x: &Jet) -> Jet {
        let mut r = self.clone();
        r.add_scaled(a, x);
        r
    }
    fn scale(&self, s: f64) -> Jet {
        self * s
    }
    fn is_finite(&self) -> bool {
        Jet::is_finite(self)
    }
    fn from_f64(v: f64) -> Jet {
        Jet::scalar(v)
    }
}

fn axpy_vec<T: Scalar>(y: &[T], a: f64, x: &[T]) -> Vec<T> {
    y.iter().zip(x).map(|(yi, xi)| yi.axpy(a, xi)).collect()
}

/// Deterministic time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OdeScheme {
    Euler,
    #[default]
    Rk4,
}

impl FromStr for OdeScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(OdeScheme::Euler),
            "rk4" => Ok(OdeScheme::Rk4),
            _ => Err(Error::Parse(format!("unknown scheme {s:?} (euler|rk4)"))),
        }
    }
}

/// Stochastic scheme: Euler–Maruyama for Itô, Euler–Heun for Stratonovich.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdeScheme {
    Ito,
    #[default]
    Stratonovich,
}

impl FromStr for SdeScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ito" | "euler" => Ok(SdeScheme::Ito),
            "stratonovich" | "euler-heun" | "heun" => Ok(SdeScheme::Stratonovich),
            _ => Err(Error::Parse(format!(
                "unknown sde scheme {s:?} (ito|stratonovich)"
            ))),
        }
    }
}

fn check_grid(n_steps: usize, t_end: f64) -> Result<f64> {
    if n_steps < 1 {
        return Err(Error::InvalidArgument("n_steps must be >= 1".into()));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t_end}")));
    }
    Ok(t_end / n_steps as f64)
}

fn time(k: usize, n: usize, t_end: f64) -> f64 {
    t_end * k as f64 / n as f64
}

fn check_finite<T: Scalar>(x: &[T], step: usize) -> Result<()> {
    if x.iter().all(Scalar::is_finite) {
        Ok(())
    } else {
        Err(Error::NonFinite { step })
    }
}

fn check_len<T>(v: &[T], n: usize, what: &'static str) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected: n,
            got: v.len(),
        })
    }
}

/// One step of `scheme` for `ẋ = f(t, x)`.
pub fn ode_step<T, F>(f: &mut F, t: f64, x: &[T], dt: f64, scheme: OdeScheme) -> Result<Vec<T>>
where
    T: Scalar,
    F: FnMut(f64, &[T]) -> Result<Vec<T>>,
{
    let k1 = f(t, x)?;
    check_len(&k1, x.len(), "vector field output")?;
    match scheme {
        OdeScheme::Euler => Ok(axpy_vec(x, dt, &k1)),
        OdeScheme::Rk4 => {
            let h = 0.5 * dt;
            let k2 = f(t + h, &axpy_vec(x, h, &k1))?;
            let k3 = f(t + h, &axpy_vec(x, h, &k2))?;
            let k4 = f(t + dt, &axpy_vec(x, dt, &k3))?;
            let mut s = axpy_vec(&k1, 2.0, &k2);
            s = axpy_vec(&s, 2.0, &k3);
            s = axpy_vec(&s, 1.0, &k4);
            Ok(axpy_vec(x, dt / 6.0, &s))
        }
    }
}

/// Integrates `ẋ = f(t, x)` on `[0, t_end]` with `n_steps` uniform steps.
pub fn integrate_ode<T, F>(
    mut f: F,
    x0: &[T],
    n_steps: usize,
    t_end: f64,
    scheme: OdeScheme,
) -> Result<Trajectory<T>>
where
    T: Scalar,
    F: FnMut(f64, &[T]) -> Result<Vec<T>>,
{
    let dt = check_grid(n_steps, t_end)?;
    check_finite(x0, 0)?;
    let mut traj = Trajectory::with_capacity(n_steps);
    traj.push(0.0, x0.to_vec());
    let mut x = x0.to_vec();
    for k in 0..n_steps {
        x = ode_step(&mut f, time(k, n_steps, t_end), &x, dt, scheme)?;
        check_finite(&x, k + 1)?;
        traj.push(time(k + 1, n_steps, t_end), x.clone());
    }
    Ok(traj)
}

/// Integrates an SDE given by `field(dW, t, x) = (drift, diffusion · dW)`.
///
/// `dw` holds one row of increments per step; `dt` is the step length.
/// State components whose diffusion is identically zero are advanced by the
/// drift alone, which is how auxiliary slowly varying variables are carried.
pub fn integrate_sde<T, F>(
    mut field: F,
    x0: &[T],
    dw: &DenseMatrix,
    dt: f64,
    scheme: SdeScheme,
) -> Result<Trajectory<T>>
where
    T: Scalar,
    F: FnMut(&[f64], f64, &[T]) -> Result<(Vec<T>, Vec<T>)>,
{
    let n = dw.rows();
    let t_end = dt * n as f64;
    check_grid(n, t_end)?;
    check_finite(x0, 0)?;
    let mut traj = Trajectory::with_capacity(n);
    traj.push(0.0, x0.to_vec());
    let mut x = x0.to_vec();
    for k in 0..n {
        let t = time(k, n, t_end);
        let w = dw.row(k);
        let (det, sto) = field(w, t, &x)?;
        check_len(&det, x.len(), "drift")?;
        check_len(&sto, x.len(), "diffusion")?;
        x = match scheme {
            SdeScheme::Ito => {
                let y = axpy_vec(&x, dt, &det);
                axpy_vec(&y, 1.0, &sto)
            }
            SdeScheme::Stratonovich => {
                let predictor = axpy_vec(&x, 1.0, &sto);
                let (_, sto2) = field(w, t + dt, &predictor)?;
                check_len(&sto2, x.len(), "diffusion")?;
                let y = axpy_vec(&x, dt, &det);
                let avg = axpy_vec(&sto, 1.0, &sto2);
                axpy_vec(&y, 0.5, &avg)
            }
        };
        check_finite(&x, k + 1)?;
        traj.push(time(k + 1, n, t_end), x.clone());
    }
    Ok(traj)
}

/// Itô SDE by Euler–Maruyama.
pub fn integrate_sde_ito<T, F>(field: F, x0: &[T], dw: &DenseMatrix, dt: f64) -> Result<Trajectory<T>>
where
    T: Scalar,
    F: FnMut(&[f64], f64, &[T]) -> Result<(Vec<T>, Vec<T>)>,
{
    integrate_sde(field, x0, dw, dt, SdeScheme::Ito)
}

/// Stratonovich SDE by Euler–Heun.
pub fn integrate_sde_stratonovich<T, F>(
    field: F,
    x0: &[T],
    dw: &DenseMatrix,
    dt: f64,
) -> Result<Trajectory<T>>
where
    T: Scalar,
    F: FnMut(&[f64], f64, &[T]) -> Result<(Vec<T>, Vec<T>)>,
{
    integrate_sde(field, x0, dw, dt, SdeScheme::Stratonovich)
}

#[cfg(test)]
mod tests;
