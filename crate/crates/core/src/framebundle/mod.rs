//! The frame bundle over a chart manifold: horizontal lifts, the
//! sub-Riemannian cometric and its normal geodesics, the curvature form,
//! (stochastic) development and most probable paths.
//!
//! A frame point `u = (x, ν)` with `ν` a `d×r` matrix of frame columns is
//! flattened as `(x^1..x^d, ν_1^1..ν_1^d, ν_2^1, ..)`, i.e. `ν` column-major,
//! so `ν_α^i` sits at index `d + α d + i`.

mod mpp;

use serde::{Deserialize, Serialize};

use crate::autodiff::{hamiltonian_field, Jet};
use crate::error::{Error, Result};
use crate::geodesics::relative_drift;
use crate::integrate::{integrate_ode, integrate_sde, OdeScheme, SdeScheme, Trajectory};
use crate::manifold::Manifold;
use crate::numkernel::{determinant, invert, DenseMatrix, Tensor};

pub use mpp::{mpp, MppOptions, MppResult};

/// A point of the frame bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePoint {
    pub x: Vec<f64>,
    /// `d × r`, one frame vector per column.
    pub nu: DenseMatrix,
}

impl FramePoint {
    pub fn new(x: Vec<f64>, nu: DenseMatrix) -> Result<Self> {
        if nu.rows() != x.len() || nu.cols() == 0 || nu.cols() > x.len() {
            return Err(Error::DimensionMismatch {
                what: "frame rows",
                expected: x.len(),
                got: nu.rows(),
            });
        }
        let gram = nu.transpose().matmul(&nu)?;
        if determinant(&gram)?.abs() <= 1e-12 {
            return Err(Error::InvalidArgument(
                "frame vectors are linearly dependent".into(),
            ));
        }
        Ok(FramePoint { x, nu })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn rank(&self) -> usize {
        self.nu.cols()
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut s = self.x.clone();
        for a in 0..self.rank() {
            s.extend(self.nu.column(a));
        }
        s
    }

    /// Inverse of [`FramePoint::flatten`]; performs no rank check.
    pub fn from_flat(d: usize, r: usize, s: &[f64]) -> Result<Self> {
        if s.len() != d + d * r {
            return Err(Error::DimensionMismatch {
                what: "frame bundle state",
                expected: d + d * r,
                got: s.len(),
            });
        }
        let cols: Vec<Vec<f64>> = (0..r).map(|a| s[d + a * d..d + (a + 1) * d].to_vec()).collect();
        Ok(FramePoint {
            x: s[..d].to_vec(),
            nu: DenseMatrix::from_columns(&cols),
        })
    }
}

/// Gram–Schmidt in the metric at `x`, producing a `g`-orthonormal frame.
pub fn orthonormal_frame(m: &Manifold, x: &[f64], vectors: &[Vec<f64>]) -> Result<FramePoint> {
    let g = m.metric(x)?;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for c in &cols {
            let proj = g.bilinear(&w, c);
            w.iter_mut().zip(c).for_each(|(wi, ci)| *wi -= proj * ci);
        }
        let n = g.bilinear(&w, &w).sqrt();
        if !(n > 1e-12) {
            return Err(Error::InvalidArgument("frame vectors are dependent".into()));
        }
        cols.push(w.iter().map(|c| c / n).collect());
    }
    FramePoint::new(x.to_vec(), DenseMatrix::from_columns(&cols))
}

/// Horizontal fields on jet-valued flattened states: entry `α` is `H_α(u)`
/// in the flattened layout.
fn horizontal_jets(m: &Manifold, r: usize, u: &[Jet]) -> Result<Vec<Vec<Jet>>> {
    let d = m.dim();
    let gam = m.christoffel_at(&u[..d])?;
    let nu = |a: usize, i: usize| &u[d + a * d + i];
    let mut out = Vec::with_capacity(r);
    for a in 0..r {
        let mut h: Vec<Jet> = (0..d).map(|i| nu(a, i).clone()).collect();
        for b in 0..r {
            for k in 0..d {
                let mut acc = Jet::scalar(0.0);
                for i in 0..d {
                    for j in 0..d {
                        let t = nu(a, i) * nu(b, j);
                        acc.add_product(&t, &gam[(k * d + i) * d + j]);
                    }
                }
                h.push(-acc);
            }
        }
        out.push(h);
    }
    Ok(out)
}

fn scalars(v: &[f64]) -> Vec<Jet> {
    v.iter().map(|&c| Jet::scalar(c)).collect()
}

/// `(d + d r) × r` matrix whose column `α` is the horizontal lift `H_α(u)`.
pub fn horizontal_basis(m: &Manifold, u: &FramePoint) -> Result<DenseMatrix> {
    check_frame(m, u)?;
    let h = horizontal_jets(m, u.rank(), &scalars(&u.flatten()))?;
    let cols: Vec<Vec<f64>> = h.iter().map(|c| c.iter().map(Jet::value).collect()).collect();
    Ok(DenseMatrix::from_columns(&cols))
}

fn check_frame(m: &Manifold, u: &FramePoint) -> Result<()> {
    if u.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            what: "frame base point",
            expected: m.dim(),
            got: u.dim(),
        });
    }
    if !m.is_valid(&u.x) {
        return Err(Error::InvalidArgument("frame base point outside the chart".into()));
    }
    Ok(())
}

/// The sub-Riemannian cometric on `F M` in block form
/// `[[W⁻¹, −W⁻¹Γᵀ], [−ΓW⁻¹, ΓW⁻¹Γᵀ]]` with `W⁻¹ = ν νᵀ` and
/// `Γ_{(α,k), i} = Γ^k_ij ν_α^j`.
pub fn sub_riemannian_cometric(m: &Manifold, u: &FramePoint) -> Result<DenseMatrix> {
    check_frame(m, u)?;
    let d = m.dim();
    let r = u.rank();
    let gam = m.christoffel(&u.x)?;
    let mut gm = DenseMatrix::zeros(d * r, d);
    for a in 0..r {
        for k in 0..d {
            for i in 0..d {
                gm[(a * d + k, i)] = (0..d).map(|j| gam.get(&[k, i, j]) * u.nu[(j, a)]).sum();
            }
        }
    }
    let winv = u.nu.matmul(&u.nu.transpose())?;
    let top_right = winv.matmul(&gm.transpose())?.scale(-1.0);
    let bottom_left = gm.matmul(&winv)?.scale(-1.0);
    let bottom_right = gm.matmul(&winv)?.matmul(&gm.transpose())?;
    let n = d + d * r;
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = match (i < d, j < d) {
                (true, true) => winv[(i, j)],
                (true, false) => top_right[(i, j - d)],
                (false, true) => bottom_left[(i - d, j)],
                (false, false) => bottom_right[(i - d, j - d)],
            };
        }
    }
    Ok(out)
}

/// `H(u, p) = ½ Σ_α ⟨H_α(u), p⟩²`.
pub fn fm_hamiltonian(m: &Manifold, r: usize, u: &[Jet], p: &[Jet]) -> Result<Jet> {
    let h = horizontal_jets(m, r, u)?;
    let mut acc = Jet::scalar(0.0);
    for col in &h {
        let mut s = Jet::scalar(0.0);
        for (hc, pc) in col.iter().zip(p) {
            s.add_product(hc, pc);
        }
        acc.add_product(&s, &s);
    }
    Ok(acc * 0.5)
}

/// Normal sub-Riemannian geodesic on jet-valued `(u, p)` over `[0, 1]`.
pub fn exp_fm_jets(
    m: &Manifold,
    r: usize,
    u0: &[Jet],
    p0: &[Jet],
    n_steps: usize,
) -> Result<Trajectory<Jet>> {
    let d = m.dim();
    let n = d + d * r;
    if u0.len() != n || p0.len() != n {
        return Err(Error::DimensionMismatch {
            what: "frame bundle state",
            expected: n,
            got: u0.len().min(p0.len()),
        });
    }
    let mut s0 = u0.to_vec();
    s0.extend_from_slice(p0);
    let dt = 1.0 / n_steps.max(1) as f64;
    integrate_ode(
        |t, s: &[Jet]| {
            let x: Vec<f64> = s[..d].iter().map(Jet::value).collect();
            if !m.is_valid(&x) {
                return Err(Error::ChartExit {
                    step: (t / dt).floor() as usize,
                });
            }
            hamiltonian_field(s, |q, p| fm_hamiltonian(m, r, q, p))
        },
        &s0,
        n_steps,
        1.0,
        OdeScheme::Rk4,
    )
}

/// A frame-bundle geodesic with its Hamiltonian per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmFlow {
    /// States `(u, p)`, each of length `d + d r`.
    pub trajectory: Trajectory,
    pub energy: Vec<f64>,
}

impl FmFlow {
    pub fn relative_energy_drift(&self) -> f64 {
        relative_drift(&self.energy)
    }

    pub fn frames(&self, d: usize, r: usize) -> Result<Vec<FramePoint>> {
        let n = d + d * r;
        self.trajectory
            .states
            .iter()
            .map(|s| FramePoint::from_flat(d, r, &s[..n]))
            .collect()
    }
}

/// Hamilton's equations for the sub-Riemannian cometric from `(u, p)` (RK4).
pub fn exp_fm(m: &Manifold, u: &FramePoint, p: &[f64], n_steps: usize) -> Result<FmFlow> {
    check_frame(m, u)?;
    let r = u.rank();
    let tr = exp_fm_jets(m, r, &scalars(&u.flatten()), &scalars(p), n_steps)?.values();
    let n = u.flatten().len();
    let energy = tr
        .states
        .iter()
        .map(|s| Ok(fm_hamiltonian(m, r, &scalars(&s[..n]), &scalars(&s[n..]))?.value()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(FmFlow {
        trajectory: tr,
        energy,
    })
}

/// `R_u[i][j][β][α] = Σ_km (u⁻¹)_βm R_ijk^m u_kα`, the curvature endomorphism
/// `R(∂_i, ∂_j)` expressed in the frame.
pub fn curvature_form(m: &Manifold, u: &FramePoint) -> Result<Tensor> {
    check_frame(m, u)?;
    let d = m.dim();
    if u.rank() != d {
        return Err(Error::InvalidArgument(
            "curvature form needs a full frame".into(),
        ));
    }
    let r = m.riemann(&u.x)?;
    let ui = invert(&u.nu)?;
    let mut out = Tensor::zeros(&[d, d, d, d]);
    for i in 0..d {
        for j in 0..d {
            for b in 0..d {
                for a in 0..d {
                    let mut acc = 0.0;
                    for k in 0..d {
                        for mm in 0..d {
                            acc += ui[(b, mm)] * r.get(&[i, j, k, mm]) * u.nu[(k, a)];
                        }
                    }
                    out.set(&[i, j, b, a], acc);
                }
            }
        }
    }
    Ok(out)
}

/// `Ω(v, w) = Σ_ij v^i w^j R_u[i][j]` as a `d × d` matrix.
pub fn curvature_form_on(
    m: &Manifold,
    u: &FramePoint,
    v: &[f64],
    w: &[f64],
) -> Result<DenseMatrix> {
    let d = m.dim();
    let ru = curvature_form(m, u)?;
    let mut out = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            for b in 0..d {
                for a in 0..d {
                    out[(b, a)] += v[i] * w[j] * ru.get(&[i, j, b, a]);
                }
            }
        }
    }
    Ok(out)
}

/// Stochastic development `dU = H(U) drift dt + Σ_α H_α(U) ∘ dW^α` by
/// Euler–Heun. `dw` has one row of `r` increments per step.
pub fn stochastic_development(
    m: &Manifold,
    u0: &FramePoint,
    dw: &DenseMatrix,
    dt: f64,
    drift: &[f64],
) -> Result<Trajectory> {
    check_frame(m, u0)?;
    let d = m.dim();
    let r = u0.rank();
    if dw.cols() != r || drift.len() != r {
        return Err(Error::DimensionMismatch {
            what: "driving increments",
            expected: r,
            got: if dw.cols() != r { dw.cols() } else { drift.len() },
        });
    }
    let combine = |h: &[Vec<Jet>], c: &[f64]| -> Vec<f64> {
        (0..h[0].len())
            .map(|row| h.iter().zip(c).map(|(col, ci)| col[row].value() * ci).sum())
            .collect()
    };
    let field = |w: &[f64], t: f64, s: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
        if !m.is_valid(&s[..d]) {
            return Err(Error::ChartExit {
                step: (t / dt).round() as usize,
            });
        }
        let h = horizontal_jets(m, r, &scalars(s))?;
        Ok((combine(&h, drift), combine(&h, w)))
    };
    integrate_sde(field, &u0.flatten(), dw, dt, SdeScheme::Stratonovich)
}

/// Development of a deterministic path given by its increments.
pub fn development(m: &Manifold, u0: &FramePoint, increments: &DenseMatrix) -> Result<Trajectory> {
    let n = increments.rows().max(1);
    stochastic_development(m, u0, increments, 1.0 / n as f64, &vec![0.0; u0.rank()])
}

/// `−½‖v‖²_g + S(x)/12`.
pub fn onsager_machlup_integrand(m: &Manifold, x: &[f64], v: &[f64]) -> Result<f64> {
    let g = m.metric(x)?;
    Ok(-0.5 * g.bilinear(v, v) + m.scalar_curvature(x)? / 12.0)
}

/// Trapezoidal quadrature of the integrand over a trajectory of `(x, ẋ)`.
pub fn onsager_machlup_functional(m: &Manifold, traj: &Trajectory) -> Result<f64> {
    let d = m.dim();
    let vals = traj
        .states
        .iter()
        .map(|s| onsager_machlup_integrand(m, &s[..d], &s[d..2 * d]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(traj
        .times
        .windows(2)
        .zip(vals.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum())
}

/// Maximum over a list of frames of `max |⟨ν_a, ν_b⟩_g − δ_ab|`.
pub fn orthonormality_error(m: &Manifold, frames: &[FramePoint]) -> Result<f64> {
    let mut worst = 0.0f64;
    for u in frames {
        let g = m.metric(&u.x)?;
        let gram = u.nu.transpose().matmul(&g)?.matmul(&u.nu)?;
        let e = gram.sub(&DenseMatrix::identity(u.rank())).max_abs();
        worst = worst.max(e);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
