//! Numbered end-to-end checks shared by the `selftest` command and the
//! acceptance test target. Each check returns an outcome instead of
//! panicking so a runner can report every line.

mod random_maps;

use std::time::Instant;

use serde::Serialize;

use crate::autodiff::{Jet, JetSpace};
use crate::error::Result;
use crate::framebundle::{development, exp_fm, mpp, orthonormal_frame, FramePoint, MppOptions};
use crate::geodesics::{exp, exp_hamiltonian, geodesic, log, parallel_transport_along, LogOptions};
use crate::integrate::{integrate_sde, OdeScheme, SdeScheme};
use crate::landmarks::{match_shapes, t_to_o, LandmarkConfig, MatchOptions};
use crate::liegroup::{
    brownian_group, euler_poincare, orthogonality_error, reconstruct, rodrigues, unflatten, BrownianOptions,
    Inertia,
};
use crate::manifold::{ellipsoid, euclidean, sphere_stereographic, Manifold};
use crate::numkernel::{gaussian_increments, DenseMatrix, GaussianStream};
use crate::stats::{covariance_frame, frechet_mean, sample_brownian, FrameMode, FrechetOptions, SampleSet};

pub use random_maps::{finite_difference, Expr};

/// Result of one numbered check.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} | {} | {} ({:.2} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.seconds
        )
    }
}

fn timed(id: u32, title: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome {
        id,
        title,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn uniform(rng: &mut GaussianStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.uniform()
}

fn chart_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// A random chart point in `[−r, r]²` and a tangent with `‖v‖_g ≤ max_norm`.
fn random_point_and_tangent(m: &Manifold, rng: &mut GaussianStream, r: f64, max_norm: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let x = vec![uniform(rng, -r, r), uniform(rng, -r, r)];
    let dir = [rng.standard_normal(), rng.standard_normal()];
    let n = m.norm(&x, &dir)?;
    let len = max_norm * rng.uniform();
    Ok((x, dir.iter().map(|c| c * len / n).collect()))
}

/// Sphere curvature at random chart points.
pub fn sphere_curvature() -> Outcome {
    timed(1, "sphere scalar curvature 2 and sectional curvature 1", || {
        let m = sphere_stereographic()?;
        let mut rng = GaussianStream::new(1);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let x = [uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0)];
            worst = worst.max((m.scalar_curvature(&x)? - 2.0).abs());
            worst = worst.max((m.sectional(&x, &[1.0, 0.0], &[0.0, 1.0])? - 1.0).abs());
        }
        Ok((worst <= 1e-6, format!("max error {worst:.2e}")))
    })
}

/// Second-order and Hamiltonian geodesics agree.
pub fn geodesic_equivalence() -> Outcome {
    timed(2, "second-order vs Hamiltonian geodesics", || {
        let mut rng = GaussianStream::new(2);
        let mut worst = 0.0f64;
        for m in [sphere_stereographic()?, ellipsoid(1.0, 0.8, 1.2)?] {
            for _ in 0..20 {
                let (x, v) = random_point_and_tangent(&m, &mut rng, 0.5, 1.5)?;
                let a = geodesic(&m, &x, &v, 100, OdeScheme::Rk4)?;
                let p = m.metric(&x)?.matvec(&v)?;
                let b = exp_hamiltonian(&m, &x, &p, 100)?;
                worst = worst.max(chart_dist(&a.last()[..2], &b.trajectory.last()[..2]));
            }
        }
        Ok((worst <= 1e-4, format!("max endpoint distance {worst:.2e}")))
    })
}

/// Energy conservation along Hamiltonian flows on `M` and on `F M`.
pub fn hamiltonian_conservation() -> Outcome {
    timed(3, "Hamiltonian conservation on M and FM", || {
        let m = sphere_stereographic()?;
        let mut rng = GaussianStream::new(3);
        let mut worst_m = 0.0f64;
        let mut worst_fm = 0.0f64;
        for _ in 0..20 {
            let (x, v) = random_point_and_tangent(&m, &mut rng, 0.5, 1.5)?;
            let p = m.metric(&x)?.matvec(&v)?;
            worst_m = worst_m.max(exp_hamiltonian(&m, &x, &p, 100)?.relative_energy_drift());
        }
        for _ in 0..20 {
            let x = vec![uniform(&mut rng, -0.5, 0.5), uniform(&mut rng, -0.5, 0.5)];
            let nu = DenseMatrix::from_rows(&[
                vec![0.5 + 0.2 * uniform(&mut rng, -1.0, 1.0), 0.2 * uniform(&mut rng, -1.0, 1.0)],
                vec![0.2 * uniform(&mut rng, -1.0, 1.0), 0.5 + 0.2 * uniform(&mut rng, -1.0, 1.0)],
            ]);
            let u = FramePoint::new(x, nu)?;
            let p: Vec<f64> = (0..6).map(|_| uniform(&mut rng, -0.5, 0.5)).collect();
            worst_fm = worst_fm.max(exp_fm(&m, &u, &p, 100)?.relative_energy_drift());
        }
        Ok((
            worst_m <= 1e-5 && worst_fm <= 1e-5,
            format!("max relative drift M {worst_m:.2e}, FM {worst_fm:.2e}"),
        ))
    })
}

/// `Log(x, Exp(x, v)) = v` for short tangents.
pub fn exp_log_roundtrip() -> Outcome {
    timed(4, "Exp/Log roundtrip on the sphere", || {
        let m = sphere_stereographic()?;
        let mut rng = GaussianStream::new(4);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let (x, v) = random_point_and_tangent(&m, &mut rng, 0.5, 0.5)?;
            let y = exp(&m, &x, &v)?;
            let r = log(&m, &x, &y, &LogOptions::default())?;
            worst = worst.max(chart_dist(&r.v, &v));
        }
        Ok((worst <= 1e-3, format!("max tangent error {worst:.2e}")))
    })
}

/// Parallel transport preserves inner products.
pub fn transport_isometry() -> Outcome {
    timed(5, "parallel transport isometry", || {
        let m = sphere_stereographic()?;
        let mut rng = GaussianStream::new(5);
        let mut worst = 0.0f64;
        let mut check = |curve: &dyn Fn(f64) -> (Vec<f64>, Vec<f64>), v: [f64; 2], w: [f64; 2]| -> Result<()> {
            let tv = parallel_transport_along(&m, &v, curve, 100, 1.0)?;
            let tw = parallel_transport_along(&m, &w, curve, 100, 1.0)?;
            let inner = |k: usize| -> Result<f64> {
                Ok(m.metric(&tv.states[k][..2])?.bilinear(&tv.states[k][2..], &tw.states[k][2..]))
            };
            let i0 = inner(0)?;
            for k in 0..tv.states.len() {
                worst = worst.max((inner(k)? - i0).abs());
            }
            Ok(())
        };
        check(
            &|t: f64| (vec![t * t, -t.sin()], vec![2.0 * t, -t.cos()]),
            [-0.5, -0.5],
            [0.3, -0.2],
        )?;
        for _ in 0..10 {
            let c: Vec<f64> = (0..6).map(|_| uniform(&mut rng, -0.5, 0.5)).collect();
            let curve = move |t: f64| {
                (
                    vec![c[0] + c[1] * t + c[2] * (3.0 * t).sin(), c[3] + c[4] * t * t + c[5] * t.cos()],
                    vec![c[1] + 3.0 * c[2] * (3.0 * t).cos(), 2.0 * c[4] * t - c[5] * t.sin()],
                )
            };
            let v = [uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0)];
            let w = [uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0)];
            check(&curve, v, w)?;
        }
        Ok((worst <= 1e-4, format!("max inner-product drift {worst:.2e}")))
    })
}

/// Worst relative error, per order 1..=3, of jet partials against central
/// differences over `n_maps` random maps.
pub fn ad_errors(n_maps: usize, seed: u64) -> [f64; 3] {
    let steps = [1e-5, 1e-4, 1e-3];
    let mut rng = GaussianStream::new(seed);
    let mut worst = [0.0f64; 3];
    for _ in 0..n_maps {
        let n = 1 + (rng.uniform() * 3.0) as usize;
        let depth = 2 + (rng.uniform() * 3.0) as usize;
        let e = Expr::random(&mut rng, n, depth);
        let x: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -0.8, 0.8)).collect();
        let space = JetSpace::get(n, 3);
        let jet = e.eval_jet(&Jet::variables(&space, &x));
        let f = |p: &[f64]| e.eval(p);
        for k in 1..space.len() {
            let exponent = space.exponent(k);
            let order = space.degree(k);
            let fd = finite_difference(&f, &x, exponent, steps[order - 1]);
            let err = (jet.derivative(exponent) - fd).abs() / fd.abs().max(1.0);
            worst[order - 1] = worst[order - 1].max(err);
        }
    }
    worst
}

/// Jet partials of random maps against finite differences.
pub fn ad_correctness() -> Outcome {
    timed(6, "AD partials to order 3 vs finite differences", || {
        let w = ad_errors(100, 6);
        Ok((
            w[0] <= 1e-6 && w[1] <= 1e-4 && w[2] <= 1e-2,
            format!("max relative errors {:.1e} / {:.1e} / {:.1e}", w[0], w[1], w[2]),
        ))
    })
}

/// Euler–Poincaré invariants, reconstruction and SO(3) Brownian motion.
pub fn lie_group() -> Outcome {
    timed(7, "Lie group flows on SO(3)", || {
        let a = Inertia::diagonal([1.0, 2.0, 3.0])?;
        let mu0 = [1.0, 0.5, -0.3];
        let tr = euler_poincare(mu0, &a, 1000, 10.0)?;
        let norm = |m: &[f64]| m.iter().map(|c| c * c).sum::<f64>().sqrt();
        let e0 = a.energy(mu0);
        let n0 = norm(&mu0);
        let mut dn = 0.0f64;
        let mut de = 0.0f64;
        for s in &tr.states {
            dn = dn.max((norm(s) / n0 - 1.0).abs());
            de = de.max((a.energy([s[0], s[1], s[2]]) / e0 - 1.0).abs());
        }
        // a principal-axis momentum keeps ξ constant
        let omega = 0.8;
        let mu_axis = euler_poincare([0.0, 0.0, 3.0 * omega], &a, 100, 1.0)?;
        let g0 = rodrigues([0.1, 0.2, -0.3]);
        let g = reconstruct(&g0, &mu_axis, &a)?;
        let exact = &g0 * &rodrigues([0.0, 0.0, omega]);
        let recon = unflatten(g.last()).sub(&exact).max_abs();
        let mut orth = 0.0f64;
        for seed in 0..20 {
            let dw = gaussian_increments(3, 1000, 1e-3, seed)?;
            let p = brownian_group(&DenseMatrix::identity(3), &dw, 1e-3, &Inertia::identity(), BrownianOptions::default())?;
            for s in &p.states {
                orth = orth.max(orthogonality_error(&unflatten(s)));
            }
        }
        Ok((
            dn <= 1e-6 && de <= 1e-5 && recon <= 1e-5 && orth <= 1e-2,
            format!("|mu| drift {dn:.1e}, energy drift {de:.1e}, reconstruction {recon:.1e}, orthogonality {orth:.1e}"),
        ))
    })
}

/// Mean strong error of `dU = U dW` (or `U ∘ dW`) at `T = 1` for each grid
/// `2^-l`, against the closed form on fine paths of `2^12` increments that
/// are summed down to every coarser grid. Returns `(errors, slope)`.
pub fn gbm_strong_errors(scheme: SdeScheme, levels: &[u32], paths: u64, seed: u64) -> Result<(Vec<f64>, f64)> {
    let fine = 1usize << 12;
    let mut errs = vec![0.0; levels.len()];
    for path in 0..paths {
        let dw = gaussian_increments(1, fine, 1.0 / fine as f64, seed.wrapping_add(path))?;
        let w: f64 = dw.data().iter().sum();
        let exact = match scheme {
            SdeScheme::Ito => (w - 0.5).exp(),
            SdeScheme::Stratonovich => w.exp(),
        };
        for (err, &l) in errs.iter_mut().zip(levels) {
            let n = 1usize << l;
            let k = fine / n;
            let coarse: Vec<f64> = dw.data().chunks(k).map(|c| c.iter().sum()).collect();
            let coarse = DenseMatrix::from_vec(n, 1, coarse)?;
            let tr = integrate_sde(
                |w: &[f64], _, x: &[f64]| Ok((vec![0.0], vec![x[0] * w[0]])),
                &[1.0],
                &coarse,
                1.0 / n as f64,
                scheme,
            )?;
            *err += (tr.last()[0] - exact).abs() / paths as f64;
        }
    }
    let xs: Vec<f64> = levels.iter().map(|&l| -(l as f64) * std::f64::consts::LN_2).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    Ok((errs, fit_slope(&xs, &ys)))
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// Strong order of both SDE schemes and their agreement on additive noise.
pub fn sde_schemes() -> Outcome {
    timed(8, "SDE strong order and scheme agreement", || {
        let levels = [4, 5, 6, 7, 8, 9, 10];
        let (_, ito) = gbm_strong_errors(SdeScheme::Ito, &levels, 200, 80)?;
        let (_, strat) = gbm_strong_errors(SdeScheme::Stratonovich, &levels, 200, 80)?;
        let dw = gaussian_increments(2, 200, 0.01, 8)?;
        let field = |w: &[f64], t: f64, x: &[f64]| Ok((vec![-x[0], t.sin()], vec![0.5 * w[0], w[0] - w[1]]));
        let a = integrate_sde(field, &[1.0, 0.0], &dw, 0.01, SdeScheme::Ito)?;
        let b = integrate_sde(field, &[1.0, 0.0], &dw, 0.01, SdeScheme::Stratonovich)?;
        let agree = a
            .states
            .iter()
            .zip(&b.states)
            .flat_map(|(p, q)| p.iter().zip(q).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        let ok = |s: f64| (s - 0.5).abs() <= 0.15;
        Ok((
            ok(ito) && ok(strat) && agree <= 1e-12,
            format!("slopes Ito {ito:.2}, Stratonovich {strat:.2}; additive-noise gap {agree:.1e}"),
        ))
    })
}

/// Flat development reproduces its driving path; flat Brownian covariance.
pub fn flat_development() -> Outcome {
    timed(9, "development on flat space", || {
        let m = euclidean(2)?;
        let u = FramePoint::new(vec![0.3, -0.7], DenseMatrix::identity(2))?;
        let dw = gaussian_increments(2, 1000, 1e-3, 9)?;
        let tr = development(&m, &u, &dw)?;
        let mut acc = [0.3, -0.7];
        let mut path_err = 0.0f64;
        for (k, s) in tr.states.iter().enumerate() {
            path_err = path_err.max(chart_dist(&s[..2], &acc));
            if k < dw.rows() {
                acc[0] += dw[(k, 0)];
                acc[1] += dw[(k, 1)];
            }
        }
        let sigma = DenseMatrix::from_rows(&[vec![0.2, 0.1], vec![0.1, 0.1]]);
        let t = 1.0;
        let u = covariance_frame(&[0.0, 0.0], &sigma, FrameMode::SquareRoot)?;
        let c = sample_brownian(&m, &u, t, 10, 5000, 99)?.chart_covariance();
        let mut cov_err = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                cov_err = cov_err.max((c[(i, j)] / (t * sigma[(i, j)]) - 1.0).abs());
            }
        }
        Ok((
            path_err <= 1e-12 && cov_err <= 0.1,
            format!("path error {path_err:.1e}, covariance relative error {cov_err:.3}"),
        ))
    })
}

/// Landmark momenta with closed forms.
pub fn landmark_closed_forms() -> Outcome {
    timed(10, "landmark single and decoupled momenta", || {
        let single = LandmarkConfig::new(1, 0.1, 2.0)?;
        let r = match_shapes(&single, &[0.1, 0.2], &[0.4, -0.3], &MatchOptions::default())?;
        let mut err = chart_dist(&r.p0, &[0.15, -0.25]);
        let pair = LandmarkConfig::new(2, 0.1, 1.0)?;
        let r = match_shapes(&pair, &[0.0, 0.0, 10.0, 0.0], &[0.05, 0.02, 9.97, 0.04], &MatchOptions::default())?;
        err = err.max(chart_dist(&r.p0, &[0.05, 0.02, -0.03, 0.04]));
        Ok((err <= 1e-6, format!("max momentum error {err:.1e}")))
    })
}

/// The T→O landmark match (slow tier).
pub fn landmark_t_to_o() -> Outcome {
    timed(10, "landmark T to O with 50 landmarks", || {
        let cfg = LandmarkConfig::new(50, 0.1, 1.0)?;
        let (t, o) = t_to_o(50);
        let start = Instant::now();
        let r = match_shapes(&cfg, &t, &o, &MatchOptions::default())?;
        let secs = start.elapsed().as_secs_f64();
        Ok((
            r.loss <= 1e-6 && secs < 60.0,
            format!("loss {:.1e} after {} iterations", r.loss, r.iters),
        ))
    })
}

/// Fréchet means on flat space and on the sphere.
pub fn frechet() -> Outcome {
    timed(11, "Frechet means", || {
        let opts = FrechetOptions::default();
        let e = euclidean(2)?;
        let s = SampleSet::gaussian_chart(&[0.5, -1.0], 0.3, 20, 11)?;
        let r = frechet_mean(&e, &s, &[0.0, 0.0], &opts)?;
        let flat_err = chart_dist(&r.mean, &s.chart_mean());

        let m = sphere_stereographic()?;
        let s = SampleSet::gaussian_chart(&[0.0, 0.0], 0.2, 20, 8)?;
        let r = frechet_mean(&m, &s, &[0.4, -0.4], &opts)?;
        let grad = r.grad_norm;

        let x = [0.1, 0.2];
        let v = [0.15, -0.1];
        let pair = SampleSet::new(vec![exp(&m, &x, &v)?, exp(&m, &x, &[-v[0], -v[1]])?])?;
        let sym_err = chart_dist(&frechet_mean(&m, &pair, &[0.3, 0.0], &opts)?.mean, &x);
        Ok((
            flat_err <= 1e-8 && grad <= 1e-6 && sym_err <= 1e-4,
            format!("flat error {flat_err:.1e}, sphere gradient {grad:.1e}, symmetric pair error {sym_err:.1e}"),
        ))
    })
}

/// Isotropic most probable paths are Riemannian geodesics.
pub fn mpp_isotropic() -> Outcome {
    timed(12, "isotropic MPP follows the geodesic", || {
        let m = sphere_stereographic()?;
        let x0 = [0.1, -0.2];
        let y = [0.6, 0.4];
        let u = orthonormal_frame(&m, &x0, &[vec![1.0, 0.0], vec![0.0, 1.0]])?;
        let r = mpp(&m, &u, &y, &MppOptions::default())?;
        let l = log(&m, &x0, &y, &LogOptions::default())?;
        let g = geodesic(&m, &x0, &l.v, 100, OdeScheme::Rk4)?;
        let worst = r
            .flow
            .trajectory
            .states
            .iter()
            .zip(&g.states)
            .map(|(a, b)| chart_dist(&a[..2], &b[..2]))
            .fold(0.0, f64::max);
        Ok((
            r.converged && worst <= 1e-2,
            format!("endpoint miss {:.1e}, max path distance {worst:.1e}", r.distance),
        ))
    })
}

/// Checks whose threshold the prescribed scheme cannot reach. The scalar
/// Stratonovich test problem commutes, so Euler-Heun converges with strong
/// order one there instead of one half.
pub const KNOWN_UNATTAINABLE: &[u32] = &[8];

/// Runs the checks of the default tier (everything except the T→O match).
pub fn fast_suite() -> Vec<Outcome> {
    vec![
        sphere_curvature(),
        geodesic_equivalence(),
        hamiltonian_conservation(),
        exp_log_roundtrip(),
        transport_isometry(),
        ad_correctness(),
        lie_group(),
        sde_schemes(),
        flat_development(),
        landmark_closed_forms(),
        frechet(),
        mpp_isotropic(),
    ]
}

/// Criterion 13: the fast tier finishes within five minutes.
pub fn suite_runtime(outcomes: &[Outcome], wall_seconds: f64) -> Outcome {
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    Outcome {
        id: 13,
        title: "selftest suite under five minutes",
        passed: wall_seconds < 300.0,
        detail: format!("{wall_seconds:.1} s, failing checks {failed:?}"),
        seconds: wall_seconds,
    }
}
