use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::manifold::Manifold;

/// `v̇^k = −Γ^k_ij γ̇^i v^j`.
fn transport_rate(m: &Manifold, x: &[f64], xdot: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let d = m.dim();
    let gam = m.christoffel(x)?;
    let g = gam.data();
    Ok((0..d)
        .map(|k| {
            let mut acc = 0.0;
            for i in 0..d {
                for j in 0..d {
                    acc += g[(k * d + i) * d + j] * xdot[i] * v[j];
                }
            }
            -acc
        })
        .collect())
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(x, y)| x + a * y).collect()
}

fn rk4_transport(
    m: &Manifold,
    v: &[f64],
    h: f64,
    start: (&[f64], &[f64]),
    mid: (&[f64], &[f64]),
    end: (&[f64], &[f64]),
) -> Result<Vec<f64>> {
    let k1 = transport_rate(m, start.0, start.1, v)?;
    let k2 = transport_rate(m, mid.0, mid.1, &axpy(v, 0.5 * h, &k1))?;
    let k3 = transport_rate(m, mid.0, mid.1, &axpy(v, 0.5 * h, &k2))?;
    let k4 = transport_rate(m, end.0, end.1, &axpy(v, h, &k3))?;
    Ok((0..v.len())
        .map(|i| v[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Velocities of a sampled curve by central differences on its grid, with
/// second-order one-sided differences at the two ends.
pub fn central_velocities(gamma: &Trajectory, dim: usize) -> Result<Vec<Vec<f64>>> {
    let n = gamma.states.len();
    if n < 3 {
        return Err(Error::InvalidArgument(
            "finite-difference velocities need at least three grid points".into(),
        ));
    }
    let h = gamma.dt();
    let x = |k: usize, i: usize| gamma.states[k][i];
    Ok((0..n)
        .map(|k| {
            (0..dim)
                .map(|i| match k {
                    0 => (-3.0 * x(0, i) + 4.0 * x(1, i) - x(2, i)) / (2.0 * h),
                    k if k == n - 1 => {
                        (3.0 * x(k, i) - 4.0 * x(k - 1, i) + x(k - 2, i)) / (2.0 * h)
                    }
                    k => (x(k + 1, i) - x(k - 1, i)) / (2.0 * h),
                })
                .collect()
        })
        .collect())
}

/// Transports `v` along a sampled curve. The first `dim` components of each
/// state of `gamma` are its chart positions. Without explicit velocities they
/// are estimated by [`central_velocities`]. Between grid points the curve is
/// filled in by cubic Hermite interpolation for the RK4 midpoint stages.
pub fn parallel_transport(
    m: &Manifold,
    v: &[f64],
    gamma: &Trajectory,
    gamma_dot: Option<&[Vec<f64>]>,
) -> Result<Trajectory> {
    let d = m.dim();
    if v.len() != d {
        return Err(Error::DimensionMismatch {
            what: "transported vector",
            expected: d,
            got: v.len(),
        });
    }
    let n = gamma.states.len();
    if n == 0 || gamma.states.iter().any(|s| s.len() < d) {
        return Err(Error::InvalidArgument("curve states shorter than the chart".into()));
    }
    let owned;
    let vel = match gamma_dot {
        Some(gd) => {
            if gd.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "curve velocity grid",
                    expected: n,
                    got: gd.len(),
                });
            }
            if gd.iter().any(|w| w.len() != d) {
                return Err(Error::InvalidArgument("curve velocity of wrong length".into()));
            }
            gd
        }
        None => {
            owned = central_velocities(gamma, d)?;
            &owned[..]
        }
    };
    let mut out = Trajectory::with_capacity(n - 1);
    let mut cur = v.to_vec();
    out.push(gamma.times[0], cur.clone());
    for k in 0..n - 1 {
        let h = gamma.times[k + 1] - gamma.times[k];
        let (x0, x1) = (&gamma.states[k][..d], &gamma.states[k + 1][..d]);
        let (w0, w1) = (&vel[k], &vel[k + 1]);
        let xm: Vec<f64> = (0..d)
            .map(|i| 0.5 * (x0[i] + x1[i]) + h * (w0[i] - w1[i]) / 8.0)
            .collect();
        let wm: Vec<f64> = (0..d)
            .map(|i| 1.5 * (x1[i] - x0[i]) / h - 0.25 * (w0[i] + w1[i]))
            .collect();
        cur = rk4_transport(m, &cur, h, (x0, w0), (&xm, &wm), (x1, w1))?;
        if cur.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { step: k + 1 });
        }
        out.push(gamma.times[k + 1], cur.clone());
    }
    Ok(out)
}

/// Transports `v` along an analytically given curve `t ↦ (γ(t), γ̇(t))` on
/// `[0, t_end]` with RK4. The returned states are `(γ, v)`.
pub fn parallel_transport_along<C>(
    m: &Manifold,
    v: &[f64],
    curve: C,
    n_steps: usize,
    t_end: f64,
) -> Result<Trajectory>
where
    C: Fn(f64) -> (Vec<f64>, Vec<f64>),
{
    let d = m.dim();
    if v.len() != d {
        return Err(Error::DimensionMismatch {
            what: "transported vector",
            expected: d,
            got: v.len(),
        });
    }
    if n_steps == 0 || !(t_end > 0.0) {
        return Err(Error::InvalidArgument("need n_steps > 0 and t_end > 0".into()));
    }
    let h = t_end / n_steps as f64;
    let mut out = Trajectory::with_capacity(n_steps);
    let mut cur = v.to_vec();
    let record = |t: f64, cur: &[f64], out: &mut Trajectory| {
        let (x, _) = curve(t);
        let mut s = x;
        s.extend_from_slice(cur);
        out.push(t, s);
    };
    record(0.0, &cur, &mut out);
    for k in 0..n_steps {
        let t = t_end * k as f64 / n_steps as f64;
        let a = curve(t);
        let b = curve(t + 0.5 * h);
        let c = curve(t_end * (k + 1) as f64 / n_steps as f64);
        if !m.is_valid(&a.0) || !m.is_valid(&c.0) {
            return Err(Error::ChartExit { step: k });
        }
        cur = rk4_transport(m, &cur, h, (&a.0, &a.1), (&b.0, &b.1), (&c.0, &c.1))?;
        if cur.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { step: k + 1 });
        }
        record(t_end * (k + 1) as f64 / n_steps as f64, &cur, &mut out);
    }
    Ok(out)
}
