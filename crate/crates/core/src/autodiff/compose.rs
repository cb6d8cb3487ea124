//! Composition of local Taylor expansions with jet-valued inputs.
//!
//! Geometric quantities such as Christoffel symbols are computed as jets in
//! the chart variables around a real point `x0`. When the point itself is a
//! jet (e.g. a state seeded with parameter sensitivities), the quantity at
//! that point is recovered exactly to the input's order by substituting
//! `x - x0` into the local expansion.

use std::sync::Arc;

use super::jet::{Jet, JetSpace};

/// Precomputed monomials `(x - x0)^α` of a set of input jets.
pub struct Composer {
    target: Arc<JetSpace>,
    n_inputs: usize,
    order: usize,
    monomials: Vec<Jet>,
    point: Vec<f64>,
}

impl Composer {
    /// Prepares substitution of `inputs` into expansions of order up to
    /// `expansion_order`. All inputs must share one jet space.
    pub fn new(inputs: &[Jet], expansion_order: usize) -> Composer {
        let target = inputs
            .iter()
            .map(|j| j.space().clone())
            .find(|s| s.n_vars() > 0)
            .unwrap_or_else(JetSpace::constants);
        let order = expansion_order.min(target.order());
        let src = JetSpace::get(inputs.len(), order);
        let point: Vec<f64> = inputs.iter().map(|j| j.value()).collect();
        let deltas: Vec<Jet> = inputs
            .iter()
            .map(|j| {
                let mut d = j.promote(&target);
                let v = d.value();
                d = d - v;
                d
            })
            .collect();
        let mut monomials: Vec<Jet> = Vec::with_capacity(src.len());
        monomials.push(Jet::constant(&target, 1.0));
        for i in 1..src.len() {
            let e = src.exponent(i);
            // peel off the highest variable to reuse a lower monomial
            let v = (0..e.len()).rev().find(|&v| e[v] > 0).unwrap();
            let mut lower = e.to_vec();
            lower[v] -= 1;
            let li = src.index_of(&lower).unwrap();
            let m = &monomials[li] * &deltas[v];
            monomials.push(m);
        }
        Composer {
            target,
            n_inputs: inputs.len(),
            order,
            monomials,
            point,
        }
    }

    /// Expansion point `x0`, the values of the inputs.
    pub fn point(&self) -> &[f64] {
        &self.point
    }

    /// Order of expansion the inputs can absorb.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn target(&self) -> &Arc<JetSpace> {
        &self.target
    }

    /// Substitutes the inputs into `local`, a jet in `n_inputs` variables
    /// expanded around [`Composer::point`].
    pub fn apply(&self, local: &Jet) -> Jet {
        let ls = local.space();
        if ls.n_vars() == 0 {
            return Jet::constant(&self.target, local.value());
        }
        assert_eq!(ls.n_vars(), self.n_inputs, "expansion arity mismatch");
        let n = ls.prefix_len(self.order).min(self.monomials.len());
        let mut out = Jet::constant(&self.target, 0.0);
        for (i, m) in self.monomials.iter().enumerate().take(n) {
            let c = local.coeffs()[i];
            if c != 0.0 {
                if i == 0 {
                    out = out + c;
                } else {
                    out.add_scaled(c, m);
                }
            }
        }
        out
    }

    pub fn apply_all(&self, locals: &[Jet]) -> Vec<Jet> {
        locals.iter().map(|l| self.apply(l)).collect()
    }
}
