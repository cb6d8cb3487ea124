//! Landmark geodesics together with their first-order sensitivities,
//! propagated as dense tangent rows instead of general jets. This is the
//! same computation as running the closed-form field on order-one jets,
//! but without per-operation allocation.

use super::{LandmarkConfig, LANDMARK_DIM};

/// Pairs with `k_ij < α e^{-40}` contribute below double precision.
const NEGLIGIBLE_EXPONENT: f64 = 40.0;

/// Hamilton's equations on `(x, p)` and their linearization applied to the
/// tangent block `t` (one row of `m` derivatives per state component).
fn field(cfg: &LandmarkConfig, s: &[f64], t: &[f64], m: usize, ds: &mut [f64], dt: &mut [f64]) {
    let n = cfg.n;
    let dim = cfg.dim();
    let (x, p) = s.split_at(dim);
    let (tx, tp) = t.split_at(dim * m);
    let inv_s2 = 1.0 / (cfg.sigma * cfg.sigma);
    let a = cfg.alpha;
    ds.fill(0.0);
    dt.fill(0.0);
    for r in 0..dim {
        ds[r] = a * p[r];
        for c in 0..m {
            dt[r * m + c] = a * tp[r * m + c];
        }
    }
    let mut ddx = vec![0.0; LANDMARK_DIM * m];
    let mut dk = vec![0.0; m];
    let mut dpp = vec![0.0; m];
    for i in 0..n {
        for j in i + 1..n {
            let d0 = x[2 * i] - x[2 * j];
            let d1 = x[2 * i + 1] - x[2 * j + 1];
            let e = (d0 * d0 + d1 * d1) * 0.5 * inv_s2;
            if e > NEGLIGIBLE_EXPONENT {
                continue;
            }
            let k = a * (-e).exp();
            let pp = p[2 * i] * p[2 * j] + p[2 * i + 1] * p[2 * j + 1];
            let c = k * pp * inv_s2;
            for q in 0..m {
                let e0 = tx[2 * i * m + q] - tx[2 * j * m + q];
                let e1 = tx[(2 * i + 1) * m + q] - tx[(2 * j + 1) * m + q];
                ddx[q] = e0;
                ddx[m + q] = e1;
                dk[q] = -k * inv_s2 * (d0 * e0 + d1 * e1);
                dpp[q] = tp[2 * i * m + q] * p[2 * j]
                    + p[2 * i] * tp[2 * j * m + q]
                    + tp[(2 * i + 1) * m + q] * p[2 * j + 1]
                    + p[2 * i + 1] * tp[(2 * j + 1) * m + q];
            }
            for ax in 0..LANDMARK_DIM {
                let (ri, rj) = (2 * i + ax, 2 * j + ax);
                ds[ri] += k * p[rj];
                ds[rj] += k * p[ri];
                let dv = if ax == 0 { d0 } else { d1 };
                ds[dim + ri] += c * dv;
                ds[dim + rj] -= c * dv;
                for q in 0..m {
                    dt[ri * m + q] += dk[q] * p[rj] + k * tp[rj * m + q];
                    dt[rj * m + q] += dk[q] * p[ri] + k * tp[ri * m + q];
                    let dc = (dk[q] * pp + k * dpp[q]) * inv_s2;
                    let g = dc * dv + c * ddx[ax * m + q];
                    dt[(dim + ri) * m + q] += g;
                    dt[(dim + rj) * m + q] -= g;
                }
            }
        }
    }
}

/// RK4 over `[0, 1]` from state `s0` with tangent block `t0`. Returns the
/// final state and tangent block.
pub(super) fn flow_with_tangents(
    cfg: &LandmarkConfig,
    s0: &[f64],
    t0: &[f64],
    m: usize,
    n_steps: usize,
) -> (Vec<f64>, Vec<f64>) {
    let ns = s0.len();
    let nt = t0.len();
    let h = 1.0 / n_steps as f64;
    let mut s = s0.to_vec();
    let mut t = t0.to_vec();
    let mut ks = vec![vec![0.0; ns]; 4];
    let mut kt = vec![vec![0.0; nt]; 4];
    let mut ys = vec![0.0; ns];
    let mut yt = vec![0.0; nt];
    for _ in 0..n_steps {
        for stage in 0..4 {
            let c = match stage {
                0 => 0.0,
                3 => h,
                _ => 0.5 * h,
            };
            if stage == 0 {
                ys.copy_from_slice(&s);
                yt.copy_from_slice(&t);
            } else {
                for (y, (a, b)) in ys.iter_mut().zip(s.iter().zip(&ks[stage - 1])) {
                    *y = a + c * b;
                }
                for (y, (a, b)) in yt.iter_mut().zip(t.iter().zip(&kt[stage - 1])) {
                    *y = a + c * b;
                }
            }
            let (ksl, ktl) = (&mut ks[stage], &mut kt[stage]);
            field(cfg, &ys, &yt, m, ksl, ktl);
        }
        for r in 0..ns {
            s[r] += h / 6.0 * (ks[0][r] + 2.0 * ks[1][r] + 2.0 * ks[2][r] + ks[3][r]);
        }
        for r in 0..nt {
            t[r] += h / 6.0 * (kt[0][r] + 2.0 * kt[1][r] + 2.0 * kt[2][r] + kt[3][r]);
        }
    }
    (s, t)
}
