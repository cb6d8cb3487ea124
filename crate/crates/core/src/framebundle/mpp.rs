use serde::{Deserialize, Serialize};

use super::{check_frame, exp_fm, exp_fm_jets, scalars, FmFlow, FramePoint};
use crate::autodiff::{gradient_of_loss, Jet};
use crate::error::{Error, Result};
use crate::manifold::Manifold;
use crate::numkernel::{invert, minimize_objective, DenseMatrix, Objective, OptimizerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MppOptions {
    pub v_init: Option<Vec<f64>>,
    pub n_steps: usize,
    pub optimizer: OptimizerConfig,
    /// Chart distance `‖π(u_1) − y‖` accepted as a hit.
    pub tol: f64,
}

impl Default for MppOptions {
    fn default() -> Self {
        MppOptions {
            v_init: None,
            n_steps: 100,
            optimizer: OptimizerConfig::default().with_grad_tol(1e-12),
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MppResult {
    /// Horizontal coordinates of the initial velocity in the frame.
    pub v: Vec<f64>,
    /// Initial momentum on `F M`; vertical entries are zero.
    pub p0: Vec<f64>,
    pub distance: f64,
    pub converged: bool,
    pub iters: usize,
    pub flow: FmFlow,
}

struct Endpoint<'a> {
    m: &'a Manifold,
    u0: Vec<f64>,
    nu_inv_t: DenseMatrix,
    r: usize,
    y: &'a [f64],
    n_steps: usize,
}

impl Endpoint<'_> {
    fn momentum<T>(&self, v: &[T], zero: T, mul: impl Fn(f64, &T) -> T, add: impl Fn(&T, &T) -> T) -> Vec<T>
    where
        T: Clone,
    {
        let d = self.m.dim();
        let mut p = vec![zero; self.u0.len()];
        for (i, pi) in p.iter_mut().enumerate().take(d) {
            for (a, va) in v.iter().enumerate() {
                *pi = add(pi, &mul(self.nu_inv_t[(i, a)], va));
            }
        }
        p
    }

    fn loss_jets(&self, v: &[Jet]) -> Result<Jet> {
        let d = self.m.dim();
        let p = self.momentum(v, Jet::scalar(0.0), |c, x| x * c, |a, b| a + b);
        let tr = exp_fm_jets(self.m, self.r, &scalars(&self.u0), &p, self.n_steps)?;
        let end = &tr.last()[..d];
        let mut acc = Jet::scalar(0.0);
        for (e, yi) in end.iter().zip(self.y) {
            let diff = e - *yi;
            acc.add_product(&diff, &diff);
        }
        Ok(acc * (1.0 / d as f64))
    }
}

impl Objective for Endpoint<'_> {
    fn value(&mut self, v: &[f64]) -> Result<f64> {
        Ok(self.loss_jets(&scalars(v))?.value())
    }

    fn value_and_gradient(&mut self, v: &[f64]) -> Result<(f64, Vec<f64>)> {
        gradient_of_loss(v, |vs| self.loss_jets(vs))
    }
}

/// Most probable path from `u0` to the fiber over `y`: the horizontal
/// initial velocity `v` (in frame coordinates) whose normal geodesic on
/// `F M` projects to a curve ending at `y` at time 1.
pub fn mpp(m: &Manifold, u0: &FramePoint, y: &[f64], opts: &MppOptions) -> Result<MppResult> {
    check_frame(m, u0)?;
    let d = m.dim();
    if u0.rank() != d {
        return Err(Error::InvalidArgument("most probable paths need a full frame".into()));
    }
    if y.len() != d {
        return Err(Error::DimensionMismatch {
            what: "target point",
            expected: d,
            got: y.len(),
        });
    }
    if !m.is_valid(y) {
        return Err(Error::InvalidArgument("target point outside the chart".into()));
    }
    let mut obj = Endpoint {
        m,
        u0: u0.flatten(),
        nu_inv_t: invert(&u0.nu)?.transpose(),
        r: d,
        y,
        n_steps: opts.n_steps,
    };
    let v0 = match &opts.v_init {
        Some(v) if v.len() == d => v.clone(),
        Some(v) => {
            return Err(Error::DimensionMismatch {
                what: "initial guess",
                expected: d,
                got: v.len(),
            })
        }
        None => vec![0.0; d],
    };
    let (v, iters) = if y == u0.x.as_slice() {
        (vec![0.0; d], 0)
    } else {
        let min = minimize_objective(&mut obj, &v0, &opts.optimizer)?;
        (min.x, min.iters)
    };
    let p0 = obj.momentum(&v, 0.0, |c, x| c * x, |a, b| a + b);
    let flow = exp_fm(m, u0, &p0, opts.n_steps)?;
    let end = &flow.trajectory.last()[..d];
    let distance = end.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    Ok(MppResult {
        v,
        p0,
        distance,
        converged: distance <= opts.tol,
        iters,
        flow,
    })
}
