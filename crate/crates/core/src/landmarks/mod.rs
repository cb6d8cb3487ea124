//! Landmark shape spaces with the Gaussian kernel cometric, geodesic
//! shooting between shapes and exact matching.

mod shapes;
mod tangent;

use serde::{Deserialize, Serialize};

use crate::autodiff::{Jet, SmoothMap};
use crate::error::{Error, Result};
use crate::geodesics::{exp_hamiltonian, relative_drift};
use crate::integrate::Trajectory;
use crate::manifold::Manifold;
use crate::numkernel::{
    cholesky, invert, levenberg_marquardt, DenseMatrix, LeastSquaresConfig,
};

pub use shapes::{letter_o, letter_t, read_shape_csv, shape_to_csv, translate};

/// Size of the demo letters relative to a kernel width of 0.1. At this size
/// neighbouring landmarks on the T sit about 1.15σ apart.
pub const DEMO_SCALE: f64 = 1.5;

/// The T and O demo shapes with `n` landmarks each.
pub fn t_to_o(n: usize) -> (Vec<f64>, Vec<f64>) {
    (letter_t(n, DEMO_SCALE), letter_o(n, DEMO_SCALE))
}

/// Ambient dimension of every landmark.
pub const LANDMARK_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandmarkConfig {
    pub n: usize,
    pub sigma: f64,
    pub alpha: f64,
}

impl LandmarkConfig {
    pub fn new(n: usize, sigma: f64, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one landmark".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) || !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kernel parameters must be positive, got sigma={sigma}, alpha={alpha}"
            )));
        }
        Ok(LandmarkConfig { n, sigma, alpha })
    }

    /// Chart dimension `n · 2`.
    pub fn dim(&self) -> usize {
        self.n * LANDMARK_DIM
    }

    fn check_shape(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "landmark shape",
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("shape has non-finite coordinates".into()));
        }
        Ok(())
    }

    /// The landmark manifold in cometric form, with Hamilton's equations
    /// supplied in closed form.
    pub fn manifold(&self) -> Result<Manifold> {
        let cfg = *self;
        let gs = SmoothMap::new(self.dim(), self.dim() * self.dim(), move |x| {
            Ok(cometric_jets(&cfg, x))
        });
        let id = format!("landmarks:{},{},{}", self.n, self.sigma, self.alpha);
        Ok(Manifold::from_cometric(id, self.dim(), gs)?
            .with_hamiltonian_field(move |s| Ok(hamiltonian_field(&cfg, s))))
    }
}

/// `α exp(−‖xi − xj‖² / (2σ²))`.
pub fn kernel(cfg: &LandmarkConfig, xi: &[f64], xj: &[f64]) -> f64 {
    let r2: f64 = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
    cfg.alpha * (-r2 / (2.0 * cfg.sigma * cfg.sigma)).exp()
}

fn kernel_jet(cfg: &LandmarkConfig, dx: &Jet, dy: &Jet) -> Jet {
    let r2 = dx * dx + dy * dy;
    (r2 * (-0.5 / (cfg.sigma * cfg.sigma))).exp() * cfg.alpha
}

fn cometric_jets(cfg: &LandmarkConfig, x: &[Jet]) -> Vec<Jet> {
    let n = cfg.n;
    let dim = cfg.dim();
    let zero = x[0].clone() * 0.0;
    let mut out = vec![zero; dim * dim];
    for i in 0..n {
        for j in 0..n {
            let k = if i == j {
                x[0].clone() * 0.0 + cfg.alpha
            } else {
                kernel_jet(cfg, &(&x[2 * i] - &x[2 * j]), &(&x[2 * i + 1] - &x[2 * j + 1]))
            };
            for a in 0..LANDMARK_DIM {
                out[(2 * i + a) * dim + 2 * j + a] = k.clone();
            }
        }
    }
    out
}

/// `K(x)` with blocks `k(x_i, x_j) I₂`. Fails with `NotPositiveDefinite`
/// when coincident landmarks make it numerically singular.
pub fn landmark_cometric(cfg: &LandmarkConfig, x: &[f64]) -> Result<DenseMatrix> {
    cfg.check_shape(x)?;
    let dim = cfg.dim();
    let mut k = DenseMatrix::zeros(dim, dim);
    for i in 0..cfg.n {
        for j in 0..cfg.n {
            let v = kernel(cfg, &x[2 * i..2 * i + 2], &x[2 * j..2 * j + 2]);
            for a in 0..LANDMARK_DIM {
                k[(2 * i + a, 2 * j + a)] = v;
            }
        }
    }
    cholesky(&k)?;
    Ok(k)
}

/// `ẋ_i = Σ_j k_ij p_j`, `ṗ_i = Σ_j (p_i·p_j) k_ij (x_i − x_j)/σ²`.
fn hamiltonian_field(cfg: &LandmarkConfig, s: &[Jet]) -> Vec<Jet> {
    let n = cfg.n;
    let dim = cfg.dim();
    let (x, p) = s.split_at(dim);
    let mut out: Vec<Jet> = p.iter().map(|pi| pi * cfg.alpha).collect();
    out.extend(p.iter().map(|pi| pi * 0.0));
    let inv_s2 = 1.0 / (cfg.sigma * cfg.sigma);
    for i in 0..n {
        for j in i + 1..n {
            let dx = &x[2 * i] - &x[2 * j];
            let dy = &x[2 * i + 1] - &x[2 * j + 1];
            let k = kernel_jet(cfg, &dx, &dy);
            for a in 0..LANDMARK_DIM {
                out[2 * i + a].add_product(&k, &p[2 * j + a]);
                out[2 * j + a].add_product(&k, &p[2 * i + a]);
            }
            let pp = &p[2 * i] * &p[2 * j] + &p[2 * i + 1] * &p[2 * j + 1];
            let c = &k * &pp * inv_s2;
            let fx = &c * &dx;
            let fy = &c * &dy;
            out[dim + 2 * i] += &fx;
            out[dim + 2 * i + 1] += &fy;
            out[dim + 2 * j] -= &fx;
            out[dim + 2 * j + 1] -= &fy;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchOptions {
    pub n_steps: usize,
    pub max_iters: usize,
    /// Accepted normalized endpoint loss `‖Exp(x1, p0) − x2‖² / (2n)`.
    pub loss_tol: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            n_steps: 100,
            max_iters: 50,
            loss_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// Initial momentum.
    pub p0: Vec<f64>,
    pub loss: f64,
    pub converged: bool,
    pub iters: usize,
    pub jacobian_evals: usize,
    pub energy_drift: f64,
    /// Geodesic states `(x, p)`.
    pub trajectory: Trajectory,
}

/// Finds the initial momentum whose landmark geodesic carries `x1` onto `x2`.
///
/// The unknown is the initial velocity `v = K(x1) p0`, started from the
/// straight-line guess `x2 − x1` and refined by Levenberg–Marquardt on the
/// endpoint residual, with the Jacobian propagated through the integrator by
/// first-order jets.
pub fn match_shapes(
    cfg: &LandmarkConfig,
    x1: &[f64],
    x2: &[f64],
    opts: &MatchOptions,
) -> Result<MatchResult> {
    cfg.check_shape(x1)?;
    cfg.check_shape(x2)?;
    let m = cfg.manifold()?;
    let dim = cfg.dim();
    let kinv = invert(&landmark_cometric(cfg, x1)?)?;
    let steps = opts.n_steps;

    let residual = |v: &[f64]| -> Result<Vec<f64>> {
        let mut s0 = x1.to_vec();
        s0.extend(kinv.matvec(v)?);
        let (s, _) = tangent::flow_with_tangents(cfg, &s0, &[], 0, steps);
        if s.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { step: steps });
        }
        Ok(s[..dim].iter().zip(x2).map(|(e, y)| e - y).collect())
    };
    let jacobian = |v: &[f64]| endpoint_jacobian(cfg, x1, x2, &kinv, v, steps);

    let v0: Vec<f64> = x2.iter().zip(x1).map(|(b, a)| b - a).collect();
    let lm_cfg = LeastSquaresConfig {
        max_iters: opts.max_iters,
        cost_tol: 0.5e-2 * opts.loss_tol * dim as f64,
        grad_tol: 1e-16,
    };
    let fit = if v0.iter().all(|&c| c == 0.0) {
        None
    } else {
        Some(levenberg_marquardt(residual, jacobian, &v0, &lm_cfg)?)
    };
    let (v, iters, jevals) = match &fit {
        Some(f) => (f.x.clone(), f.iters, f.jacobian_evals),
        None => (v0, 0, 0),
    };
    let p0 = kinv.matvec(&v)?;
    let flow = exp_hamiltonian(&m, x1, &p0, steps)?;
    let loss = flow.trajectory.last()[..dim]
        .iter()
        .zip(x2)
        .map(|(e, y)| (e - y).powi(2))
        .sum::<f64>()
        / dim as f64;
    Ok(MatchResult {
        p0,
        loss,
        converged: loss <= opts.loss_tol,
        iters,
        jacobian_evals: jevals,
        energy_drift: relative_drift(&flow.energy),
        trajectory: flow.trajectory,
    })
}

/// Endpoint residual `x(1) − x2` and its Jacobian in the initial velocity
/// `v`, where `p0 = K(x1)⁻¹ v`.
fn endpoint_jacobian(
    cfg: &LandmarkConfig,
    x1: &[f64],
    x2: &[f64],
    kinv: &DenseMatrix,
    v: &[f64],
    steps: usize,
) -> Result<(Vec<f64>, DenseMatrix)> {
    let dim = cfg.dim();
    let mut s0 = x1.to_vec();
    s0.extend(kinv.matvec(v)?);
    let mut t0 = vec![0.0; dim * dim];
    t0.extend_from_slice(kinv.data());
    let (s, t) = tangent::flow_with_tangents(cfg, &s0, &t0, dim, steps);
    if s.iter().chain(&t).any(|c| !c.is_finite()) {
        return Err(Error::NonFinite { step: steps });
    }
    let res = s[..dim].iter().zip(x2).map(|(e, y)| e - y).collect();
    Ok((res, DenseMatrix::from_vec(dim, dim, t[..dim * dim].to_vec())?))
}

/// The same Jacobian as [`endpoint_jacobian`], computed with jets through
/// the generic integrator.
#[cfg(test)]
fn endpoint_jacobian_jets(
    cfg: &LandmarkConfig,
    x1: &[f64],
    kinv: &DenseMatrix,
    v: &[f64],
    steps: usize,
) -> Result<DenseMatrix> {
    use crate::autodiff::JetSpace;
    use crate::geodesics::exp_hamiltonian_jets;
    use crate::integrate::OdeScheme;

    let dim = cfg.dim();
    let m = cfg.manifold()?;
    let space = JetSpace::get(dim, 1);
    let p: Vec<Jet> = (0..dim)
        .map(|i| {
            let row = kinv.row(i);
            let mut c = Vec::with_capacity(dim + 1);
            c.push(row.iter().zip(v).map(|(a, b)| a * b).sum());
            c.extend_from_slice(row);
            Jet::from_coeffs(&space, c)
        })
        .collect();
    let x1s: Vec<Jet> = x1.iter().map(|&c| Jet::scalar(c)).collect();
    let tr = exp_hamiltonian_jets(&m, &x1s, &p, steps, 1.0, OdeScheme::Rk4)?;
    let mut jac = DenseMatrix::zeros(dim, dim);
    for (r, e) in tr.last()[..dim].iter().enumerate() {
        for c in 0..dim {
            jac[(r, c)] = e.d(c);
        }
    }
    Ok(jac)
}
