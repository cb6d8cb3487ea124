//! Geodesic flows, exponential and logarithm maps, distances and parallel
//! transport.

mod log;
mod transport;

use serde::{Deserialize, Serialize};

use crate::autodiff::{linalg, Jet};
use crate::error::{Error, Result};
use crate::integrate::{integrate_ode, OdeScheme, Trajectory};
use crate::manifold::Manifold;

pub use log::{distance, log, LogMethod, LogOptions, LogResult};
pub use transport::{central_velocities, parallel_transport, parallel_transport_along};

/// Steps used by [`exp`] and the shooting solvers.
pub const DEFAULT_STEPS: usize = 100;

fn scalars(v: &[f64]) -> Vec<Jet> {
    v.iter().map(|&x| Jet::scalar(x)).collect()
}

/// `(ẋ, ẇ) = (w, −Γ(x)(w, w))` on a jet-valued state.
pub fn geodesic_field(m: &Manifold, state: &[Jet]) -> Result<Vec<Jet>> {
    let d = m.dim();
    let (x, w) = state.split_at(d);
    let gam = m.christoffel_at(x)?;
    let mut out: Vec<Jet> = w.to_vec();
    for k in 0..d {
        let mut acc: Option<Jet> = None;
        for i in 0..d {
            // Σ_j Γ^k_ij w^j, then times w^i
            let row = &gam[(k * d + i) * d..(k * d + i + 1) * d];
            let inner = linalg::matvec(row, w).pop().unwrap();
            let t = &inner * &w[i];
            acc = Some(match acc {
                None => t,
                Some(a) => a + t,
            });
        }
        out.push(-acc.unwrap());
    }
    Ok(out)
}

/// Returns `ChartExit` at the first grid point whose position leaves the chart.
pub(crate) fn check_chart<T: crate::integrate::Scalar>(
    m: &Manifold,
    traj: &Trajectory<T>,
) -> Result<()> {
    let d = m.dim();
    for (k, s) in traj.states.iter().enumerate() {
        let x: Vec<f64> = s[..d].iter().map(|v| v.value()).collect();
        if !m.is_valid(&x) {
            return Err(Error::ChartExit { step: k });
        }
    }
    Ok(())
}

/// Fails with `ChartExit` when the position part of `s` is off the chart.
pub(crate) fn guard(m: &Manifold, t: f64, dt: f64, s: &[Jet]) -> Result<()> {
    let x: Vec<f64> = s[..m.dim()].iter().map(Jet::value).collect();
    if m.is_valid(&x) {
        Ok(())
    } else {
        Err(Error::ChartExit {
            step: (t / dt).floor() as usize,
        })
    }
}

/// Geodesic on a jet-valued initial condition over `[0, 1]`.
pub fn geodesic_jets(
    m: &Manifold,
    x0: &[Jet],
    v0: &[Jet],
    n_steps: usize,
    scheme: OdeScheme,
) -> Result<Trajectory<Jet>> {
    let d = m.dim();
    if x0.len() != d || v0.len() != d {
        return Err(Error::DimensionMismatch {
            what: "geodesic initial condition",
            expected: d,
            got: x0.len().min(v0.len()),
        });
    }
    let mut s0 = x0.to_vec();
    s0.extend_from_slice(v0);
    let dt = 1.0 / n_steps.max(1) as f64;
    let traj = integrate_ode(
        |t, s: &[Jet]| {
            guard(m, t, dt, s)?;
            geodesic_field(m, s)
        },
        &s0,
        n_steps,
        1.0,
        scheme,
    )?;
    check_chart(m, &traj)?;
    Ok(traj)
}

/// Geodesic from `x0` with initial velocity `v0`; states are `(x, w)`.
pub fn geodesic(
    m: &Manifold,
    x0: &[f64],
    v0: &[f64],
    n_steps: usize,
    scheme: OdeScheme,
) -> Result<Trajectory> {
    Ok(geodesic_jets(m, &scalars(x0), &scalars(v0), n_steps, scheme)?.values())
}

/// `Exp_x(v)`, the time-one point of the geodesic (RK4, 100 steps).
pub fn exp(m: &Manifold, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    if v.iter().all(|&c| c == 0.0) {
        if x.len() != m.dim() || v.len() != m.dim() {
            return Err(Error::DimensionMismatch {
                what: "exp arguments",
                expected: m.dim(),
                got: x.len().min(v.len()),
            });
        }
        return Ok(x.to_vec());
    }
    let tr = geodesic(m, x, v, DEFAULT_STEPS, OdeScheme::Rk4)?;
    Ok(tr.last()[..m.dim()].to_vec())
}

/// Hamiltonian geodesic flow with the energy recorded at every grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianFlow {
    /// States `(x, p)`.
    pub trajectory: Trajectory,
    pub energy: Vec<f64>,
}

impl HamiltonianFlow {
    /// `max |H_t − H_0| / |H_0|` (absolute drift when `H_0 = 0`).
    pub fn relative_energy_drift(&self) -> f64 {
        relative_drift(&self.energy)
    }
}

pub(crate) fn relative_drift(series: &[f64]) -> f64 {
    let h0 = series[0];
    let scale = if h0.abs() > 0.0 { h0.abs() } else { 1.0 };
    series.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max) / scale
}

/// Hamilton's equations on jet-valued `(x, p)` over `[0, t_end]`.
pub fn exp_hamiltonian_jets(
    m: &Manifold,
    x0: &[Jet],
    p0: &[Jet],
    n_steps: usize,
    t_end: f64,
    scheme: OdeScheme,
) -> Result<Trajectory<Jet>> {
    let d = m.dim();
    if x0.len() != d || p0.len() != d {
        return Err(Error::DimensionMismatch {
            what: "hamiltonian initial condition",
            expected: d,
            got: x0.len().min(p0.len()),
        });
    }
    let mut s0 = x0.to_vec();
    s0.extend_from_slice(p0);
    let dt = t_end / n_steps.max(1) as f64;
    let traj = integrate_ode(
        |t, s: &[Jet]| {
            guard(m, t, dt, s)?;
            m.hamiltonian_vector_field(s)
        },
        &s0,
        n_steps,
        t_end,
        scheme,
    )?;
    check_chart(m, &traj)?;
    Ok(traj)
}

/// Hamiltonian geodesic from `x` with momentum `p` on `[0, 1]` (RK4).
pub fn exp_hamiltonian(m: &Manifold, x: &[f64], p: &[f64], n_steps: usize) -> Result<HamiltonianFlow> {
    let traj = exp_hamiltonian_jets(m, &scalars(x), &scalars(p), n_steps, 1.0, OdeScheme::Rk4)?
        .values();
    let d = m.dim();
    let energy = traj
        .states
        .iter()
        .map(|s| Ok(0.5 * m.cometric(&s[..d])?.bilinear(&s[d..], &s[d..])))
        .collect::<Result<Vec<f64>>>()?;
    Ok(HamiltonianFlow {
        trajectory: traj,
        energy,
    })
}

/// Speed `‖ẋ_t‖_g` along a second-order geodesic trajectory.
pub fn speeds(m: &Manifold, traj: &Trajectory) -> Result<Vec<f64>> {
    let d = m.dim();
    traj.states.iter().map(|s| m.norm(&s[..d], &s[d..])).collect()
}

#[cfg(test)]
mod tests;
