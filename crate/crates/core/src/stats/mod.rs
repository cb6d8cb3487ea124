//! Sample statistics on manifolds: empirical Fréchet means, Brownian
//! endpoint sampling through stochastic development, and kernel density
//! grids over embedded surfaces.

mod density;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framebundle::{stochastic_development, FramePoint};
use crate::geodesics::{log, LogMethod, LogOptions};
use crate::manifold::Manifold;
use crate::numkernel::{increments_from, minimize_objective, spd_sqrt, DenseMatrix, GaussianStream, Objective, OptimizerConfig};

pub use density::{density_grid, DensityGrid};

/// A nonempty list of chart points of a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
}

impl SampleSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidArgument("sample set is empty".into()));
        };
        let d = first.len();
        if let Some(bad) = points.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch {
                what: "sample point",
                expected: d,
                got: bad.len(),
            });
        }
        Ok(SampleSet { points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Coordinate-wise sample mean in the chart.
    pub fn chart_mean(&self) -> Vec<f64> {
        let n = self.len() as f64;
        (0..self.dim())
            .map(|i| self.points.iter().map(|p| p[i]).sum::<f64>() / n)
            .collect()
    }

    /// Unbiased sample covariance in the chart.
    pub fn chart_covariance(&self) -> DenseMatrix {
        let d = self.dim();
        let mu = self.chart_mean();
        let mut c = DenseMatrix::zeros(d, d);
        for p in &self.points {
            for i in 0..d {
                for j in 0..d {
                    c[(i, j)] += (p[i] - mu[i]) * (p[j] - mu[j]);
                }
            }
        }
        c.scale(1.0 / (self.len() as f64 - 1.0).max(1.0))
    }

    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        let mut s = header.join(",");
        s.push('\n');
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Parses the format written by [`SampleSet::to_csv`]; a non-numeric
    /// first line is treated as a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|t| t.trim().parse::<f64>()).collect();
            match parsed {
                Ok(p) => points.push(p),
                Err(_) if i == 0 => continue,
                Err(_) => return Err(Error::Parse(format!("bad sample row {}: {line:?}", i + 1))),
            }
        }
        SampleSet::new(points)
    }

    /// Draws `n` points with i.i.d. `N(0, sd²)` chart coordinates around `center`.
    pub fn gaussian_chart(center: &[f64], sd: f64, n: usize, seed: u64) -> Result<Self> {
        let mut s = GaussianStream::new(seed);
        SampleSet::new(
            (0..n)
                .map(|_| center.iter().map(|c| s.normal(*c, sd)).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetOptions {
    pub optimizer: OptimizerConfig,
    pub log: LogOptions,
    /// Replace the envelope gradient by central differences of the full
    /// objective (each evaluation re-solving every logarithm).
    pub finite_difference: bool,
    pub fd_step: f64,
}

impl Default for FrechetOptions {
    fn default() -> Self {
        FrechetOptions {
            optimizer: OptimizerConfig::default().with_grad_tol(1e-7),
            log: LogOptions {
                method: LogMethod::GaussNewton,
                ..LogOptions::default()
            },
            finite_difference: false,
            fd_step: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetResult {
    pub mean: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub converged: bool,
    pub iters: usize,
    /// Objective after each accepted iteration.
    pub history: Vec<f64>,
    /// Final tangents `Log(mean, y_i)`.
    pub tangents: Vec<Vec<f64>>,
}

struct FrechetObjective<'a> {
    m: &'a Manifold,
    samples: &'a SampleSet,
    opts: &'a FrechetOptions,
    warm: Vec<Vec<f64>>,
}

impl FrechetObjective<'_> {
    /// Objective value and the tangents realizing it.
    fn evaluate(&mut self, x: &[f64]) -> Result<(f64, Vec<Vec<f64>>)> {
        if !self.m.is_valid(x) {
            return Err(Error::InvalidArgument("iterate left the chart".into()));
        }
        let g = self.m.metric(x)?;
        let solve = |i: usize| -> Result<Vec<f64>> {
            let mut lo = self.opts.log.clone();
            lo.v_init = Some(self.warm[i].clone());
            let r = log(self.m, x, &self.samples.points()[i], &lo).map_err(|e| Error::InnerLog {
                index: i,
                reason: e.to_string(),
            })?;
            if !r.converged {
                return Err(Error::InnerLog {
                    index: i,
                    reason: format!("shooting stopped at loss {:e}", r.loss),
                });
            }
            Ok(r.v)
        };
        let tangents = parallel_map(self.samples.len(), solve)?;
        let total: f64 = tangents.iter().map(|v| g.bilinear(v, v)).sum();
        Ok((total / self.samples.len() as f64, tangents))
    }
}

impl Objective for FrechetObjective<'_> {
    fn value(&mut self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate(x)?.0)
    }

    fn value_and_gradient(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (value, tangents) = self.evaluate(x)?;
        let grad = if self.opts.finite_difference {
            let h = self.opts.fd_step;
            let mut grad = vec![0.0; x.len()];
            for (k, gk) in grad.iter_mut().enumerate() {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                *gk = (self.evaluate(&xp)?.0 - self.evaluate(&xm)?.0) / (2.0 * h);
            }
            grad
        } else {
            // d/dx ‖Log_x y‖² = −2 g(x) Log_x y once the tangent is optimal
            let g = self.m.metric(x)?;
            let n = self.samples.len() as f64;
            let mut grad = vec![0.0; x.len()];
            for v in &tangents {
                let gv = g.matvec(v)?;
                grad.iter_mut().zip(gv).for_each(|(a, b)| *a -= 2.0 * b / n);
            }
            grad
        };
        self.warm = tangents;
        Ok((value, grad))
    }
}

/// Empirical Fréchet mean `argmin_x (1/n) Σ ‖Log(x, y_i)‖²` started at `x0`.
pub fn frechet_mean(
    m: &Manifold,
    samples: &SampleSet,
    x0: &[f64],
    opts: &FrechetOptions,
) -> Result<FrechetResult> {
    if samples.dim() != m.dim() || x0.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            what: "sample dimension",
            expected: m.dim(),
            got: if x0.len() != m.dim() { x0.len() } else { samples.dim() },
        });
    }
    let mut obj = FrechetObjective {
        m,
        samples,
        opts,
        warm: vec![vec![0.0; m.dim()]; samples.len()],
    };
    let min = minimize_objective(&mut obj, x0, &opts.optimizer)?;
    let (value, grad) = obj.value_and_gradient(&min.x)?;
    let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    Ok(FrechetResult {
        converged: grad_norm <= opts.optimizer.grad_tol,
        mean: min.x,
        value,
        grad_norm,
        iters: min.iters,
        history: min.history,
        tangents: obj.warm,
    })
}

/// How a covariance matrix becomes an initial frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameMode {
    /// Frame vectors are the columns of `Σ` itself.
    Columns,
    /// Frame vectors are the columns of `Σ^{1/2}`, so flat developments have
    /// covariance `T Σ`.
    #[default]
    SquareRoot,
}

impl FromStr for FrameMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "columns" => Ok(FrameMode::Columns),
            "sqrt" | "square-root" => Ok(FrameMode::SquareRoot),
            _ => Err(Error::Parse(format!("unknown frame mode {s:?} (columns|sqrt)"))),
        }
    }
}

/// The frame at `x` representing covariance `sigma`.
pub fn covariance_frame(x: &[f64], sigma: &DenseMatrix, mode: FrameMode) -> Result<FramePoint> {
    if sigma.symmetry_error() > 1e-12 * (1.0 + sigma.max_abs()) {
        return Err(Error::InvalidArgument("covariance must be symmetric".into()));
    }
    let nu = match mode {
        FrameMode::Columns => sigma.clone(),
        FrameMode::SquareRoot => spd_sqrt(sigma)?,
    };
    FramePoint::new(x.to_vec(), nu)
}

/// Endpoints of `n_paths` stochastic developments of independent Brownian
/// motions over `[0, t_end]`. Path `i` draws its increments from stream
/// `(seed, i)`, so results do not depend on the thread count.
pub fn sample_brownian(
    m: &Manifold,
    u0: &FramePoint,
    t_end: f64,
    n_steps: usize,
    n_paths: usize,
    seed: u64,
) -> Result<SampleSet> {
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be positive".into()));
    }
    if n_steps == 0 || !(t_end > 0.0) {
        return Err(Error::InvalidArgument("need n_steps >= 1 and T > 0".into()));
    }
    let dt = t_end / n_steps as f64;
    let d = m.dim();
    let zero = vec![0.0; u0.rank()];
    let one_path = |i: usize| -> Result<Vec<f64>> {
        let mut s = GaussianStream::for_stream(seed, i as u64);
        let dw = increments_from(&mut s, u0.rank(), n_steps, dt)?;
        let tr = stochastic_development(m, u0, &dw, dt, &zero)?;
        Ok(tr.last()[..d].to_vec())
    };
    SampleSet::new(parallel_map(n_paths, one_path)?)
}

/// `(0..n).map(f)` spread over the available cores, in index order.
fn parallel_map<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(n).max(1);
    let chunk = n.div_ceil(workers);
    let results: Vec<Result<Vec<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || (w * chunk..((w + 1) * chunk).min(n)).map(f).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(n);
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
