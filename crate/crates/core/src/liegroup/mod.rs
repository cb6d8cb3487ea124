//! The rotation group SO(3) and its Lie algebra so(3): translations,
//! brackets, left-invariant metrics, adjoint and coadjoint actions,
//! Euler–Poincaré dynamics with reconstruction, and Brownian motion.
//!
//! Group and algebra elements are `3×3` [`DenseMatrix`] values; algebra
//! vectors and dual vectors are plain `[f64; 3]` in the basis `hat(e_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{integrate_ode, integrate_sde, OdeScheme, SdeScheme, Trajectory};
use crate::numkernel::{cholesky, invert, spd_sqrt, DenseMatrix, Tensor};

pub type Vec3 = [f64; 3];

/// Default tolerance on `‖gᵀg − I‖_F` for accepting a group element.
pub const GROUP_TOL: f64 = 1e-6;

/// `hat(v) w = v × w`.
pub fn hat(v: Vec3) -> DenseMatrix {
    DenseMatrix::from_rows(&[
        vec![0.0, -v[2], v[1]],
        vec![v[2], 0.0, -v[0]],
        vec![-v[1], v[0], 0.0],
    ])
}

fn check3(m: &DenseMatrix, what: &'static str) -> Result<()> {
    if m.rows() != 3 || m.cols() != 3 {
        return Err(Error::DimensionMismatch {
            what,
            expected: 3,
            got: if m.rows() != 3 { m.rows() } else { m.cols() },
        });
    }
    Ok(())
}

/// Inverse of [`hat`]. Rejects matrices that are not antisymmetric.
pub fn vee(m: &DenseMatrix) -> Result<Vec3> {
    check3(m, "so(3) element")?;
    let asym = m.add(&m.transpose()).frobenius_norm();
    if asym > 1e-10 * m.frobenius_norm().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "matrix is not antisymmetric (‖m + mᵀ‖ = {asym:e})"
        )));
    }
    Ok([m[(2, 1)], m[(0, 2)], m[(1, 0)]])
}

/// Matrix commutator `ξη − ηξ`.
pub fn bracket(xi: &DenseMatrix, eta: &DenseMatrix) -> DenseMatrix {
    (xi * eta).sub(&(eta * xi))
}

fn basis(i: usize) -> Vec3 {
    let mut e = [0.0; 3];
    e[i] = 1.0;
    e
}

/// `C[i][j][k] = C^i_jk` with `[X_j, X_k] = C^i_jk X_i`.
pub fn structure_constants() -> Tensor {
    let mut c = Tensor::zeros(&[3, 3, 3]);
    for j in 0..3 {
        for k in 0..3 {
            let b = bracket(&hat(basis(j)), &hat(basis(k)));
            let v = vee(&b).expect("bracket of so(3) elements is antisymmetric");
            for (i, vi) in v.iter().enumerate() {
                c.set(&[i, j, k], *vi);
            }
        }
    }
    c
}

pub fn translate_left(a: &DenseMatrix, g: &DenseMatrix) -> DenseMatrix {
    a * g
}

pub fn translate_right(a: &DenseMatrix, g: &DenseMatrix) -> DenseMatrix {
    g * a
}

/// Differential of left translation by `g` applied to a tangent matrix.
pub fn dl(g: &DenseMatrix, v: &DenseMatrix) -> DenseMatrix {
    g * v
}

/// `‖gᵀg − I‖_F`.
pub fn orthogonality_error(g: &DenseMatrix) -> f64 {
    g.transpose().matmul(g).map(|p| p.sub(&DenseMatrix::identity(g.cols())).frobenius_norm())
        .unwrap_or(f64::INFINITY)
}

/// Checks that `g` is a rotation to within `tol`.
pub fn check_group(g: &DenseMatrix, tol: f64) -> Result<()> {
    check3(g, "group element")?;
    let err = orthogonality_error(g);
    if !(err <= tol) {
        return Err(Error::InvalidArgument(format!(
            "not in SO(3): ‖gᵀg − I‖ = {err:e}"
        )));
    }
    if crate::numkernel::determinant(g)? <= 0.0 {
        return Err(Error::InvalidArgument("determinant is not positive".into()));
    }
    Ok(())
}

/// Nearest rotation `g (gᵀg)^{-1/2}`.
pub fn polar_projection(g: &DenseMatrix) -> Result<DenseMatrix> {
    let s = spd_sqrt(&g.transpose().matmul(g)?)?;
    g.matmul(&invert(&s)?)
}

/// Rotation by `theta` about the z axis.
pub fn rot_z(theta: f64) -> DenseMatrix {
    let (s, c) = theta.sin_cos();
    DenseMatrix::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]])
}

/// Rotation `exp(hat(v))` by Rodrigues' formula.
pub fn rodrigues(v: Vec3) -> DenseMatrix {
    let th = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let k = hat(v);
    let k2 = &k * &k;
    let (a, b) = if th < 1e-8 {
        (1.0 - th * th / 6.0, 0.5 - th * th / 24.0)
    } else {
        (th.sin() / th, (1.0 - th.cos()) / (th * th))
    };
    DenseMatrix::identity(3).add(&k.scale(a)).add(&k2.scale(b))
}

/// Symmetric positive definite inertia `A` defining `⟨ξ, η⟩_A = ξᵀAη`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inertia {
    a: DenseMatrix,
    a_inv: DenseMatrix,
}

impl Inertia {
    pub fn new(a: DenseMatrix) -> Result<Self> {
        check3(&a, "inertia")?;
        if a.symmetry_error() > 1e-12 * a.max_abs().max(1.0) {
            return Err(Error::InvalidArgument("inertia must be symmetric".into()));
        }
        cholesky(&a)?;
        let a_inv = invert(&a)?;
        Ok(Inertia { a, a_inv })
    }

    pub fn diagonal(d: Vec3) -> Result<Self> {
        Inertia::new(DenseMatrix::diag(&d))
    }

    pub fn identity() -> Self {
        Inertia::diagonal([1.0; 3]).expect("identity is SPD")
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    /// `ξ = A⁻¹ μ`.
    pub fn velocity(&self, mu: Vec3) -> Vec3 {
        to3(&self.a_inv.matvec(&mu).expect("3x3"))
    }

    /// `½ μᵀ A⁻¹ μ`.
    pub fn energy(&self, mu: Vec3) -> f64 {
        0.5 * self.a_inv.bilinear(&mu, &mu)
    }

    /// Algebra vectors orthonormal for `⟨·,·⟩_A`: the columns of `A^{-1/2}`.
    pub fn orthonormal_basis(&self) -> Result<[Vec3; 3]> {
        let r = spd_sqrt(&self.a_inv)?;
        Ok([0, 1, 2].map(|i| to3(&r.column(i))))
    }
}

fn to3(v: &[f64]) -> Vec3 {
    [v[0], v[1], v[2]]
}

/// Left-invariant metric: pull `v`, `w` back to the algebra and pair with `A`.
pub fn invariant_metric(
    g: &DenseMatrix,
    v: &DenseMatrix,
    w: &DenseMatrix,
    inertia: &Inertia,
) -> Result<f64> {
    check3(g, "group element")?;
    let gi = invert(g)?;
    let a = vee(&gi.matmul(v)?)?;
    let b = vee(&gi.matmul(w)?)?;
    Ok(inertia.matrix().bilinear(&a, &b))
}

/// `Ad(a) ξ = a ξ a⁻¹`.
pub fn ad_group(a: &DenseMatrix, xi: &DenseMatrix) -> Result<DenseMatrix> {
    a.matmul(xi)?.matmul(&invert(a)?)
}

/// `ad_ξ η = [ξ, η]`.
pub fn ad(xi: &DenseMatrix, eta: &DenseMatrix) -> DenseMatrix {
    bracket(xi, eta)
}

/// The coadjoint action `ad*_ξ μ` defined by `⟨ad*_ξ μ, η⟩ = ⟨μ, ad_ξ η⟩`,
/// assembled from the structure constants as `Σ_ij μ_i C^i_jk ξ_j`.
pub fn coad(xi: Vec3, mu: Vec3) -> Vec3 {
    let c = structure_constants();
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                *o += mu[i] * c.get(&[i, j, k]) * xi[j];
            }
        }
    }
    out
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Euler–Poincaré flow `μ̇ = ad*_ξ μ`, `ξ = A⁻¹μ`, on `[0, t_end]` (RK4).
pub fn euler_poincare(
    mu0: Vec3,
    inertia: &Inertia,
    n_steps: usize,
    t_end: f64,
) -> Result<Trajectory> {
    integrate_ode(
        |_, m: &[f64]| {
            let mu = to3(m);
            // ad*_ξ μ = μ × ξ for so(3)
            Ok(cross(mu, inertia.velocity(mu)).to_vec())
        },
        &mu0,
        n_steps,
        t_end,
        OdeScheme::Rk4,
    )
}

fn flat(g: &DenseMatrix) -> Vec<f64> {
    g.data().to_vec()
}

/// Reads a row-major flattened `3×3` state back into a matrix.
pub fn unflatten(s: &[f64]) -> DenseMatrix {
    DenseMatrix::from_vec(3, 3, s[..9].to_vec()).expect("nine entries")
}

fn rate(g: &[f64], xi: Vec3) -> Vec<f64> {
    flat(&(&unflatten(g) * &hat(xi)))
}

/// Cubic interpolation of `ξ` at the midpoint of grid interval `k`.
fn midpoint(xi: &[Vec3], k: usize) -> Vec3 {
    let n = xi.len();
    if n < 4 {
        return [0, 1, 2].map(|c| 0.5 * (xi[k][c] + xi[k + 1][c]));
    }
    let (start, w) = if k == 0 {
        (0, [0.3125, 0.9375, -0.3125, 0.0625])
    } else if k + 2 >= n {
        (n - 4, [0.0625, -0.3125, 0.9375, 0.3125])
    } else {
        (k - 1, [-0.0625, 0.5625, 0.5625, -0.0625])
    };
    [0, 1, 2].map(|c| (0..4).map(|q| w[q] * xi[start + q][c]).sum())
}

/// Reconstruction `ġ = g hat(ξ_t)` along a momentum trajectory, RK4 on the
/// momentum grid with cubic interpolation of `ξ` at the half steps. States
/// are `g` flattened row-major.
pub fn reconstruct(g0: &DenseMatrix, mu: &Trajectory, inertia: &Inertia) -> Result<Trajectory> {
    check_group(g0, GROUP_TOL)?;
    let n = mu.states.len();
    if n < 2 || mu.states.iter().any(|s| s.len() != 3) {
        return Err(Error::InvalidArgument(
            "momentum trajectory needs at least two 3-vectors".into(),
        ));
    }
    let xi: Vec<Vec3> = mu.states.iter().map(|s| inertia.velocity(to3(s))).collect();
    let mut out = Trajectory::with_capacity(n - 1);
    let mut g = flat(g0);
    out.push(mu.times[0], g.clone());
    for k in 0..n - 1 {
        let h = mu.times[k + 1] - mu.times[k];
        let xm = midpoint(&xi, k);
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(a, b)| a + s * b).collect()
        };
        let k1 = rate(&g, xi[k]);
        let k2 = rate(&axpy(&g, 0.5 * h, &k1), xm);
        let k3 = rate(&axpy(&g, 0.5 * h, &k2), xm);
        let k4 = rate(&axpy(&g, h, &k3), xi[k + 1]);
        for i in 0..9 {
            g[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: k + 1 });
        }
        out.push(mu.times[k + 1], g.clone());
    }
    Ok(out)
}

/// Euler–Poincaré momentum and its reconstructed group curve integrated
/// together. States are `(μ, g)` with `g` flattened row-major.
pub fn geodesic(
    g0: &DenseMatrix,
    mu0: Vec3,
    inertia: &Inertia,
    n_steps: usize,
    t_end: f64,
) -> Result<Trajectory> {
    check_group(g0, GROUP_TOL)?;
    let mut s0 = mu0.to_vec();
    s0.extend(flat(g0));
    integrate_ode(
        |_, s: &[f64]| {
            let mu = to3(s);
            let xi = inertia.velocity(mu);
            let mut d = cross(mu, xi).to_vec();
            d.extend(rate(&s[3..], xi));
            Ok(d)
        },
        &s0,
        n_steps,
        t_end,
        OdeScheme::Rk4,
    )
}

/// Options for [`brownian_group`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BrownianOptions {
    /// Re-project onto SO(3) after every step. Off by default, leaving the
    /// integrator's own drift off the group visible.
    pub project: bool,
}

/// Brownian motion `dg = −½ Σ C^j_ij X_i(g) dt + X_i(g) ∘ dW^i` with
/// `X_i(g) = g hat(b_i)` for an `A`-orthonormal basis `b_i`, integrated by
/// Euler–Heun. The drift vanishes on so(3) but is assembled in general.
pub fn brownian_group(
    g0: &DenseMatrix,
    dw: &DenseMatrix,
    dt: f64,
    inertia: &Inertia,
    opts: BrownianOptions,
) -> Result<Trajectory> {
    check_group(g0, GROUP_TOL)?;
    if dw.cols() != 3 {
        return Err(Error::DimensionMismatch {
            what: "Brownian increments",
            expected: 3,
            got: dw.cols(),
        });
    }
    let b = inertia.orthonormal_basis()?;
    let drift_dir = basis_drift(&b)?;
    let field = |w: &[f64], _t: f64, s: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
        let v: Vec3 = [0, 1, 2].map(|c| (0..3).map(|i| b[i][c] * w[i]).sum());
        Ok((rate(s, drift_dir), rate(s, v)))
    };
    if !opts.project {
        return integrate_sde(field, &flat(g0), dw, dt, SdeScheme::Stratonovich);
    }
    let mut out = Trajectory::with_capacity(dw.rows());
    let mut g = flat(g0);
    out.push(0.0, g.clone());
    for k in 0..dw.rows() {
        let one = DenseMatrix::from_vec(1, 3, dw.row(k).to_vec())?;
        let step = integrate_sde(field, &g, &one, dt, SdeScheme::Stratonovich)?;
        g = flat(&polar_projection(&unflatten(step.last()))?);
        out.push(dt * (k + 1) as f64, g.clone());
    }
    Ok(out)
}

/// `−½ Σ_ij C'^j_ij b_i` with `C'` the structure constants in the basis `b`.
fn basis_drift(b: &[Vec3; 3]) -> Result<Vec3> {
    let bm = DenseMatrix::from_columns(&b.map(|v| v.to_vec()));
    let bi = invert(&bm)?;
    let mut out = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            let br = vee(&bracket(&hat(b[i]), &hat(b[j])))?;
            let coords = bi.matvec(&br)?;
            for c in 0..3 {
                out[c] -= 0.5 * coords[j] * b[i][c];
            }
        }
    }
    Ok(out)
}

/// Column `col` of each group state, i.e. the curve `g_t e_col` on S².
pub fn sphere_curve(traj: &Trajectory, col: usize) -> Vec<Vec3> {
    traj.states
        .iter()
        .map(|s| [s[col], s[3 + col], s[6 + col]])
        .collect()
}
