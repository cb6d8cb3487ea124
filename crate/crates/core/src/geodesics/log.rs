use serde::{Deserialize, Serialize};

use super::{exp, geodesic_jets, DEFAULT_STEPS};
use crate::autodiff::{gradient_of_loss, Jet, JetSpace};
use crate::error::{Error, Result};
use crate::integrate::OdeScheme;
use crate::manifold::Manifold;
use crate::numkernel::{
    levenberg_marquardt, minimize_objective, DenseMatrix, GaussianStream, LeastSquaresConfig, Objective,
    OptimizerConfig,
};

/// Solver used for the shooting problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogMethod {
    /// L-BFGS on the squared endpoint mismatch with a jet gradient.
    #[default]
    Lbfgs,
    /// Levenberg–Marquardt on the endpoint residual with the jet Jacobian of
    /// the exponential map; converges quadratically near the solution.
    GaussNewton,
}

/// Settings for the shooting solve behind [`log`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogOptions {
    /// Starting tangent; zero when absent.
    pub v_init: Option<Vec<f64>>,
    pub n_steps: usize,
    pub optimizer: OptimizerConfig,
    /// Number of shooting solves; extra ones start from random perturbations
    /// of the initial guess and the best result wins.
    pub restarts: usize,
    pub restart_scale: f64,
    pub seed: u64,
    /// Normalized endpoint loss accepted as success.
    pub loss_tol: f64,
    pub method: LogMethod,
}

impl Default for LogOptions {
    fn default() -> Self {
        LogOptions {
            v_init: None,
            n_steps: DEFAULT_STEPS,
            optimizer: OptimizerConfig::default().with_grad_tol(1e-10),
            restarts: 1,
            restart_scale: 0.1,
            seed: 0,
            loss_tol: 1e-8,
            method: LogMethod::Lbfgs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogResult {
    pub v: Vec<f64>,
    /// `‖Exp(x1, v) − x2‖² / d`.
    pub loss: f64,
    pub converged: bool,
    pub iters: usize,
}

struct Shooting<'a> {
    m: &'a Manifold,
    x1: &'a [f64],
    x2: &'a [f64],
    n_steps: usize,
}

impl Shooting<'_> {
    fn loss_of(&self, end: &[f64]) -> f64 {
        let d = self.x2.len() as f64;
        end.iter().zip(self.x2).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / d
    }
}

impl Shooting<'_> {
    fn residual(&self, v: &[f64]) -> Result<Vec<f64>> {
        let scale = 1.0 / (self.x2.len() as f64).sqrt();
        let end = super::geodesic(self.m, self.x1, v, self.n_steps, OdeScheme::Rk4)?;
        Ok(end.last()[..self.m.dim()]
            .iter()
            .zip(self.x2)
            .map(|(e, y)| (e - y) * scale)
            .collect())
    }

    fn residual_and_jacobian(&self, v: &[f64]) -> Result<(Vec<f64>, DenseMatrix)> {
        let d = self.m.dim();
        let scale = 1.0 / (d as f64).sqrt();
        let space = JetSpace::get(d, 1);
        let x1: Vec<Jet> = self.x1.iter().map(|&c| Jet::constant(&space, c)).collect();
        let vs = Jet::variables(&space, v);
        let tr = geodesic_jets(self.m, &x1, &vs, self.n_steps, OdeScheme::Rk4)?;
        let end = &tr.last()[..d];
        let r = end.iter().zip(self.x2).map(|(e, y)| (e.value() - y) * scale).collect();
        let rows: Vec<Vec<f64>> = end
            .iter()
            .map(|e| (0..d).map(|k| e.d(k) * scale).collect())
            .collect();
        Ok((r, DenseMatrix::from_rows(&rows)))
    }

    fn solve_from(&mut self, start: &[f64], opts: &LogOptions) -> Result<(Vec<f64>, f64, usize)> {
        match opts.method {
            LogMethod::Lbfgs => {
                let res = minimize_objective(self, start, &opts.optimizer)?;
                Ok((res.x, res.loss, res.iters))
            }
            LogMethod::GaussNewton => {
                let cfg = LeastSquaresConfig {
                    max_iters: opts.optimizer.max_iters,
                    cost_tol: 1e-28,
                    grad_tol: opts.optimizer.grad_tol * 1e-4,
                };
                let this = &*self;
                let fit = levenberg_marquardt(
                    |v| this.residual(v),
                    |v| this.residual_and_jacobian(v),
                    start,
                    &cfg,
                )?;
                Ok((fit.x, 2.0 * fit.cost, fit.iters))
            }
        }
    }
}

impl Objective for Shooting<'_> {
    fn value(&mut self, v: &[f64]) -> Result<f64> {
        let end = if self.n_steps == DEFAULT_STEPS {
            exp(self.m, self.x1, v)?
        } else {
            super::geodesic(self.m, self.x1, v, self.n_steps, OdeScheme::Rk4)?.last()
                [..self.m.dim()]
                .to_vec()
        };
        Ok(self.loss_of(&end))
    }

    fn value_and_gradient(&mut self, v: &[f64]) -> Result<(f64, Vec<f64>)> {
        let d = self.m.dim();
        let x1: Vec<Jet> = self.x1.iter().map(|&c| Jet::scalar(c)).collect();
        gradient_of_loss(v, |vs| {
            let tr = geodesic_jets(self.m, &x1, vs, self.n_steps, OdeScheme::Rk4)?;
            let end = &tr.last()[..d];
            let mut acc = Jet::scalar(0.0);
            for (e, y) in end.iter().zip(self.x2) {
                let r = e - *y;
                acc += &r * &r;
            }
            Ok(acc * (1.0 / d as f64))
        })
    }
}

/// `Log_{x1}(x2)` by minimizing the normalized endpoint mismatch of geodesic
/// shooting. Returns the best tangent found together with a convergence flag.
pub fn log(m: &Manifold, x1: &[f64], x2: &[f64], opts: &LogOptions) -> Result<LogResult> {
    let d = m.dim();
    if x1.len() != d || x2.len() != d {
        return Err(Error::DimensionMismatch {
            what: "log endpoints",
            expected: d,
            got: x1.len().min(x2.len()),
        });
    }
    if !m.is_valid(x1) || !m.is_valid(x2) {
        return Err(Error::InvalidArgument("log endpoints outside the chart".into()));
    }
    if x1 == x2 {
        return Ok(LogResult {
            v: vec![0.0; d],
            loss: 0.0,
            converged: true,
            iters: 0,
        });
    }
    let init = opts.v_init.clone().unwrap_or_else(|| vec![0.0; d]);
    if init.len() != d {
        return Err(Error::DimensionMismatch {
            what: "log initial guess",
            expected: d,
            got: init.len(),
        });
    }
    let mut problem = Shooting {
        m,
        x1,
        x2,
        n_steps: opts.n_steps,
    };
    let mut stream = GaussianStream::new(opts.seed);
    let mut best: Option<LogResult> = None;
    let mut last_err = None;
    for attempt in 0..opts.restarts.max(1) {
        let start: Vec<f64> = if attempt == 0 {
            init.clone()
        } else {
            init.iter()
                .map(|v| v + opts.restart_scale * stream.standard_normal())
                .collect()
        };
        let (v, loss, iters) = match problem.solve_from(&start, opts) {
            Ok(r) => r,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let cand = LogResult {
            converged: loss <= opts.loss_tol,
            v,
            loss,
            iters,
        };
        let better = best.as_ref().is_none_or(|b| cand.loss < b.loss);
        if better {
            best = Some(cand);
        }
        if best.as_ref().is_some_and(|b| b.converged) {
            break;
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::NotConverged("log".into())))
}

/// Geodesic distance `‖Log_x(y)‖_g`.
pub fn distance(m: &Manifold, x: &[f64], y: &[f64], opts: &LogOptions) -> Result<f64> {
    let r = log(m, x, y, opts)?;
    if !r.converged {
        return Err(Error::NotConverged(format!(
            "log shooting stopped at loss {:e}",
            r.loss
        )));
    }
    m.norm(x, &r.v)
}
