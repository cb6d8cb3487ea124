//! Forward sensitivities: seeding parameters, scalar-loss gradients and
//! Hamiltonian vector fields evaluated on jet-valued states.

use std::sync::Arc;

use super::compose::Composer;
use super::jet::{Jet, JetSpace};
use crate::error::{Error, Result};

/// One first-order seed variable per parameter.
pub fn seed(params: &[f64]) -> Vec<Jet> {
    let space = JetSpace::get(params.len(), 1);
    Jet::variables(&space, params)
}

/// Value and gradient of `loss` at `params`.
///
/// `loss` receives one seeded jet per parameter and may run any number of
/// integrator steps on them; every step carries the full sensitivity.
pub fn gradient_of_loss<F>(params: &[f64], loss: F) -> Result<(f64, Vec<f64>)>
where
    F: FnOnce(&[Jet]) -> Result<Jet>,
{
    let seeds = seed(params);
    let l = loss(&seeds)?;
    if !l.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    let g = (0..params.len()).map(|i| l.d(i)).collect();
    Ok((l.value(), g))
}

/// Highest jet order present in `xs` (0 for plain constants).
pub fn max_order(xs: &[Jet]) -> usize {
    xs.iter()
        .filter(|j| j.space().n_vars() > 0)
        .map(|j| j.space().order())
        .max()
        .unwrap_or(0)
}

/// Space shared by the non-constant jets in `xs`, if any.
pub fn common_space(xs: &[Jet]) -> Option<Arc<JetSpace>> {
    xs.iter()
        .map(|j| j.space().clone())
        .find(|s| s.n_vars() > 0)
}

/// Hamilton's equations `(∂H/∂p, −∂H/∂q)` at a state `(q, p)` of length `2n`.
///
/// `h` is evaluated on fresh seeds one order above the state's order, its
/// partials are taken exactly and substituted back onto the state, so the
/// result carries the state's own sensitivities.
pub fn hamiltonian_field<H>(state: &[Jet], h: H) -> Result<Vec<Jet>>
where
    H: Fn(&[Jet], &[Jet]) -> Result<Jet>,
{
    if !state.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "hamiltonian state must have even length".into(),
        ));
    }
    let n = state.len() / 2;
    let k = max_order(state);
    let point: Vec<f64> = state.iter().map(Jet::value).collect();
    let cs = JetSpace::get(2 * n, k + 1);
    let seeds = Jet::variables(&cs, &point);
    let hv = h(&seeds[..n], &seeds[n..])?;
    let hv = hv.promote(&cs);
    let mut local = Vec::with_capacity(2 * n);
    for i in 0..n {
        local.push(hv.partial(n + i));
    }
    for i in 0..n {
        local.push(-hv.partial(i));
    }
    if k == 0 {
        return Ok(local.iter().map(|j| Jet::scalar(j.value())).collect());
    }
    Ok(Composer::new(state, k).apply_all(&local))
}
