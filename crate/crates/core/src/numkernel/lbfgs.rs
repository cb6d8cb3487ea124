//! Limited-memory BFGS with an Armijo backtracking line search.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping rules and history length for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_tol: f64,
    pub memory: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 500,
            grad_tol: 1e-8,
            step_tol: 1e-12,
            memory: 10,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        if !(self.grad_tol > 0.0 && self.step_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.memory < 1 {
            return Err(Error::InvalidArgument("memory must be >= 1".into()));
        }
        Ok(())
    }

    pub fn with_grad_tol(mut self, tol: f64) -> Self {
        self.grad_tol = tol;
        self
    }

    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.max_iters = n;
        self
    }
}

/// Outcome of a minimization. On `converged`, `grad_norm <= grad_tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub loss: f64,
    pub converged: bool,
    pub iters: usize,
    pub grad_norm: f64,
    /// Loss after every accepted step, starting with the loss at `x0`.
    pub history: Vec<f64>,
}

/// A differentiable scalar objective.
pub trait Objective {
    fn value(&mut self, x: &[f64]) -> Result<f64>;
    fn value_and_gradient(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)>;
}

struct Pair<L, G> {
    loss: L,
    grad: G,
}

impl<L, G> Objective for Pair<L, G>
where
    L: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    fn value(&mut self, x: &[f64]) -> Result<f64> {
        (self.loss)(x)
    }
    fn value_and_gradient(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok(((self.loss)(x)?, (self.grad)(x)?))
    }
}

/// Minimizes `loss` given its gradient `grad`, starting from `x0`.
pub fn minimize<L, G>(loss: L, grad: G, x0: &[f64], cfg: &OptimizerConfig) -> Result<Minimum>
where
    L: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    minimize_objective(&mut Pair { loss, grad }, x0, cfg)
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_HALVINGS: usize = 50;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + a * di).collect()
}

fn finite_or_inf(v: Result<f64>) -> f64 {
    match v {
        Ok(f) if f.is_finite() => f,
        _ => f64::INFINITY,
    }
}

/// Minimizes an [`Objective`] from `x0`.
pub fn minimize_objective(
    obj: &mut dyn Objective,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Minimum> {
    cfg.validate()?;
    let mut x = x0.to_vec();
    let (mut f, mut g) = obj.value_and_gradient(&x)?;
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 0 });
    }
    let mut history = vec![f];
    let mut gnorm = norm(&g);
    if gnorm <= cfg.grad_tol {
        return Ok(Minimum {
            x,
            loss: f,
            converged: true,
            iters: 0,
            grad_norm: gnorm,
            history,
        });
    }

    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(cfg.memory);
    for iter in 1..=cfg.max_iters {
        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let gamma = match mem.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0,
        };
        q.iter_mut().for_each(|v| *v *= gamma);
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 || !slope.is_finite() {
            mem.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }

        let mut alpha = if mem.is_empty() { (1.0 / gnorm).min(1.0) } else { 1.0 };
        let mut accepted = None;
        let mut trial = finite_or_inf(obj.value(&axpy(&x, alpha, &dir)));
        for _ in 0..MAX_HALVINGS {
            if trial <= f + ARMIJO_C1 * alpha * slope {
                // refine with the quadratic model through (0, f), (alpha, trial)
                let curv = trial - f - alpha * slope;
                if curv > 0.0 {
                    let aq = -slope * alpha * alpha / (2.0 * curv);
                    if aq > 0.0 && (aq / alpha - 1.0).abs() > 1e-3 && aq < 10.0 * alpha {
                        let tq = finite_or_inf(obj.value(&axpy(&x, aq, &dir)));
                        if tq < trial && tq <= f + ARMIJO_C1 * aq * slope {
                            alpha = aq;
                        }
                    }
                }
                accepted = Some(alpha);
                break;
            }
            let curv = trial - f - alpha * slope;
            let aq = if trial.is_finite() && curv > 0.0 {
                -slope * alpha * alpha / (2.0 * curv)
            } else {
                0.5 * alpha
            };
            alpha = aq.clamp(0.1 * alpha, 0.5 * alpha);
            trial = finite_or_inf(obj.value(&axpy(&x, alpha, &dir)));
        }

        let Some(alpha) = accepted else {
            return Ok(Minimum {
                x,
                loss: f,
                converged: false,
                iters: iter - 1,
                grad_norm: gnorm,
                history,
            });
        };

        let x_new = axpy(&x, alpha, &dir);
        let (f_new, g_new) = match obj.value_and_gradient(&x_new) {
            Ok(v) if v.0.is_finite() && v.1.iter().all(|e| e.is_finite()) => v,
            _ => {
                return Ok(Minimum {
                    x,
                    loss: f,
                    converged: false,
                    iters: iter - 1,
                    grad_norm: gnorm,
                    history,
                })
            }
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if mem.len() == cfg.memory {
                mem.pop_front();
            }
            mem.push_back((s.clone(), y, 1.0 / sy));
        }
        let step = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let xscale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        x = x_new;
        f = f_new;
        g = g_new;
        gnorm = norm(&g);
        history.push(f);
        if gnorm <= cfg.grad_tol {
            return Ok(Minimum {
                x,
                loss: f,
                converged: true,
                iters: iter,
                grad_norm: gnorm,
                history,
            });
        }
        if step <= cfg.step_tol * (1.0 + xscale) {
            return Ok(Minimum {
                x,
                loss: f,
                converged: false,
                iters: iter,
                grad_norm: gnorm,
                history,
            });
        }
    }
    Ok(Minimum {
        x,
        loss: f,
        converged: false,
        iters: cfg.max_iters,
        grad_norm: gnorm,
        history,
    })
}
