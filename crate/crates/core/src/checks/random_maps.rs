//! Random smooth scalar maps built from `+`, `×`, `exp`, `sin` and a
//! reciprocal kept away from its pole, evaluated on plain numbers and on jets.

use crate::autodiff::Jet;
use crate::numkernel::GaussianStream;

#[derive(Debug, Clone)]
pub enum Expr {
    Var(usize),
    Const(f64),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    /// `1 / (c + a²)` with `c ≥ 1`.
    Recip(f64, Box<Expr>),
}

impl Expr {
    pub fn random(rng: &mut GaussianStream, n_vars: usize, depth: usize) -> Expr {
        let pick = |rng: &mut GaussianStream, k: usize| ((rng.uniform() * k as f64) as usize).min(k - 1);
        if depth == 0 {
            return if rng.uniform() < 0.75 {
                Expr::Var(pick(rng, n_vars))
            } else {
                Expr::Const(2.0 * rng.uniform() - 1.0)
            };
        }
        let sub = |rng: &mut GaussianStream| Box::new(Expr::random(rng, n_vars, depth - 1));
        match pick(rng, 5) {
            0 => Expr::Add(sub(rng), sub(rng)),
            1 => Expr::Mul(sub(rng), sub(rng)),
            2 => Expr::Exp(Box::new(Expr::Mul(Box::new(Expr::Const(0.5)), sub(rng)))),
            3 => Expr::Sin(sub(rng)),
            _ => Expr::Recip(1.0 + rng.uniform(), sub(rng)),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Var(i) => x[*i],
            Expr::Const(c) => *c,
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Exp(a) => a.eval(x).exp(),
            Expr::Sin(a) => a.eval(x).sin(),
            Expr::Recip(c, a) => {
                let v = a.eval(x);
                1.0 / (c + v * v)
            }
        }
    }

    pub fn eval_jet(&self, x: &[Jet]) -> Jet {
        match self {
            Expr::Var(i) => x[*i].clone(),
            Expr::Const(c) => Jet::constant(x[0].space(), *c),
            Expr::Add(a, b) => a.eval_jet(x) + b.eval_jet(x),
            Expr::Mul(a, b) => a.eval_jet(x) * b.eval_jet(x),
            Expr::Exp(a) => a.eval_jet(x).exp(),
            Expr::Sin(a) => a.eval_jet(x).sin(),
            Expr::Recip(c, a) => (a.eval_jet(x).square() + *c)
                .recip()
                .expect("denominator is at least one"),
        }
    }
}

/// Central-difference estimate of `∂^e f` using nested first differences.
pub fn finite_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], exponent: &[u8], h: f64) -> f64 {
    match exponent.iter().position(|&e| e > 0) {
        None => f(x),
        Some(i) => {
            let mut lower = exponent.to_vec();
            lower[i] -= 1;
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            (finite_difference(f, &xp, &lower, h) - finite_difference(f, &xm, &lower, h)) / (2.0 * h)
        }
    }
}
