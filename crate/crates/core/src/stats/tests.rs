use super::*;
use crate::geodesics::exp;
use crate::manifold::{euclidean, sphere_stereographic};

fn identity_frame(x: &[f64]) -> FramePoint {
    FramePoint::new(x.to_vec(), DenseMatrix::identity(x.len())).unwrap()
}

#[test]
fn sample_set_validation_and_csv() {
    assert!(SampleSet::new(vec![]).is_err());
    assert!(SampleSet::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    let s = SampleSet::new(vec![vec![1.0, 2.0], vec![-0.5, 0.25]]).unwrap();
    assert_eq!(SampleSet::from_csv(&s.to_csv()).unwrap(), s);
    assert_eq!(s.chart_mean(), vec![0.25, 1.125]);
    assert!(SampleSet::from_csv("x0,x1\n1,2\nfoo,3\n").is_err());
}

#[test]
fn single_sample_mean() {
    let m = sphere_stereographic().unwrap();
    let s = SampleSet::new(vec![vec![0.2, -0.1]]).unwrap();
    let r = frechet_mean(&m, &s, &[0.0, 0.0], &FrechetOptions::default()).unwrap();
    assert!(r.converged);
    assert!((r.mean[0] - 0.2).abs() < 1e-6 && (r.mean[1] + 0.1).abs() < 1e-6);
}

#[test]
fn euclidean_mean_is_arithmetic() {
    let m = euclidean(2).unwrap();
    let s = SampleSet::gaussian_chart(&[1.0, -2.0], 0.5, 15, 3).unwrap();
    let r = frechet_mean(&m, &s, &[0.0, 0.0], &FrechetOptions::default()).unwrap();
    let mu = s.chart_mean();
    assert!(r.converged);
    assert!((r.mean[0] - mu[0]).abs() < 1e-8 && (r.mean[1] - mu[1]).abs() < 1e-8);
}

#[test]
fn symmetric_pair_on_the_sphere() {
    let m = sphere_stereographic().unwrap();
    let x = [0.1, 0.2];
    let v = [0.15, -0.1];
    let y1 = exp(&m, &x, &v).unwrap();
    let y2 = exp(&m, &x, &[-v[0], -v[1]]).unwrap();
    let s = SampleSet::new(vec![y1, y2]).unwrap();
    let r = frechet_mean(&m, &s, &[0.3, 0.0], &FrechetOptions::default()).unwrap();
    assert!((r.mean[0] - x[0]).abs() < 1e-4 && (r.mean[1] - x[1]).abs() < 1e-4);
    // the objective at the mean is below nearby values
    let opts = FrechetOptions::default();
    let mut obj = FrechetObjective {
        m: &m,
        samples: &s,
        opts: &opts,
        warm: vec![vec![0.0; 2]; 2],
    };
    for dx in [[1e-2, 0.0], [-1e-2, 0.0], [0.0, 1e-2], [0.0, -1e-2]] {
        let xp = [r.mean[0] + dx[0], r.mean[1] + dx[1]];
        assert!(obj.value(&xp).unwrap() > r.value);
    }
}

#[test]
fn envelope_gradient_matches_finite_differences() {
    let m = sphere_stereographic().unwrap();
    let s = SampleSet::gaussian_chart(&[0.0, 0.0], 0.2, 5, 1).unwrap();
    let opts = FrechetOptions::default();
    let mut obj = FrechetObjective {
        m: &m,
        samples: &s,
        opts: &opts,
        warm: vec![vec![0.0; 2]; 5],
    };
    let x = [0.25, -0.15];
    let (_, g) = obj.value_and_gradient(&x).unwrap();
    let fd_opts = FrechetOptions {
        finite_difference: true,
        ..FrechetOptions::default()
    };
    let mut fd = FrechetObjective {
        m: &m,
        samples: &s,
        opts: &fd_opts,
        warm: vec![vec![0.0; 2]; 5],
    };
    let (_, gf) = fd.value_and_gradient(&x).unwrap();
    for (a, b) in g.iter().zip(&gf) {
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }
}

#[test]
fn frechet_objective_beats_every_sample() {
    let m = sphere_stereographic().unwrap();
    let s = SampleSet::gaussian_chart(&[0.0, 0.0], 0.2, 8, 5).unwrap();
    let opts = FrechetOptions::default();
    let r = frechet_mean(&m, &s, &[0.4, -0.4], &opts).unwrap();
    assert!(r.converged, "{}", r.grad_norm);
    assert!(r.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let mut obj = FrechetObjective {
        m: &m,
        samples: &s,
        opts: &opts,
        warm: vec![vec![0.0; 2]; s.len()],
    };
    for y in s.points() {
        assert!(r.value <= obj.value(y).unwrap());
    }
}

#[test]
fn brownian_short_time_limit() {
    let m = sphere_stereographic().unwrap();
    let u = identity_frame(&[0.1, 0.1]);
    let s = sample_brownian(&m, &u, 1e-8, 1, 20, 0).unwrap();
    for p in s.points() {
        assert!((p[0] - 0.1).abs() < 1e-3 && (p[1] - 0.1).abs() < 1e-3);
    }
}

#[test]
fn brownian_sampling_is_reproducible() {
    let m = sphere_stereographic().unwrap();
    let u = identity_frame(&[0.0, 0.0]);
    let a = sample_brownian(&m, &u, 0.1, 50, 17, 42).unwrap();
    let b = sample_brownian(&m, &u, 0.1, 50, 17, 42).unwrap();
    assert_eq!(a, b);
    let c = sample_brownian(&m, &u, 0.1, 50, 17, 43).unwrap();
    assert_ne!(a, c);
    // path i does not depend on how many paths are drawn
    let d = sample_brownian(&m, &u, 0.1, 50, 5, 42).unwrap();
    assert_eq!(&a.points()[..5], d.points());
}

#[test]
fn flat_brownian_covariance() {
    let m = euclidean(2).unwrap();
    let t = 0.7;
    let s = sample_brownian(&m, &identity_frame(&[1.0, 2.0]), t, 10, 5000, 8).unwrap();
    let c = s.chart_covariance();
    assert!((c[(0, 0)] / t - 1.0).abs() < 0.1 && (c[(1, 1)] / t - 1.0).abs() < 0.1);
    assert!(c[(0, 1)].abs() < 0.1 * t);

    let sigma = DenseMatrix::from_rows(&[vec![0.2, 0.1], vec![0.1, 0.1]]);
    let u = covariance_frame(&[0.0, 0.0], &sigma, FrameMode::SquareRoot).unwrap();
    let s = sample_brownian(&m, &u, t, 10, 5000, 9).unwrap();
    let c = s.chart_covariance();
    for i in 0..2 {
        for j in 0..2 {
            assert!((c[(i, j)] - t * sigma[(i, j)]).abs() < 0.1 * t * sigma[(i, j)], "{i}{j}");
        }
    }
}

#[test]
fn standard_error_halves_with_quadrupled_paths() {
    // The endpoint-mean standard error scales like 1/√n; estimate it from
    // the spread of batch means.
    let m = euclidean(1).unwrap();
    let u = identity_frame(&[0.0]);
    let spread = |n: usize| {
        let means: Vec<f64> = (0..40)
            .map(|b| sample_brownian(&m, &u, 1.0, 1, n, 1000 + b).unwrap().chart_mean()[0])
            .collect();
        let mu = means.iter().sum::<f64>() / 40.0;
        (means.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / 39.0).sqrt()
    };
    let ratio = spread(100) / spread(400);
    assert!((ratio / 2.0 - 1.0).abs() < 0.3, "{ratio}");
}

#[test]
fn frame_modes() {
    let sigma = DenseMatrix::from_rows(&[vec![0.2, 0.1], vec![0.1, 0.1]]);
    let c = covariance_frame(&[0.0, 0.0], &sigma, FrameMode::Columns).unwrap();
    assert_eq!(c.nu, sigma);
    let r = covariance_frame(&[0.0, 0.0], &sigma, FrameMode::SquareRoot).unwrap();
    assert!(r.nu.matmul(&r.nu).unwrap().sub(&sigma).max_abs() < 1e-12);
    assert!("columns".parse::<FrameMode>().is_ok() && "bogus".parse::<FrameMode>().is_err());
}

#[test]
fn density_grid_basics() {
    let m = sphere_stereographic().unwrap();
    let s = SampleSet::new(vec![vec![0.3, -0.2]]).unwrap();
    let g = density_grid(&m, &s, 0.3, 60, 120).unwrap();
    assert!((g.total_mass() - 1.0).abs() < 0.02);
    assert!((g.total_area() / (4.0 * PI_) - 1.0).abs() < 0.02);
    let (i, j) = g.argmax();
    let peak = g.points[i * 120 + j];
    let target = m.embed(&[0.3, -0.2]).unwrap().unwrap();
    let dist = (0..3).map(|k| (peak[k] - target[k]).powi(2)).sum::<f64>().sqrt();
    assert!(dist < 0.1);
    assert!(density_grid(&m, &s, 0.0, 10, 10).is_err());
    assert!(density_grid(&euclidean(3).unwrap(), &SampleSet::new(vec![vec![0.0; 3]]).unwrap(), 0.1, 10, 10).is_err());
}

const PI_: f64 = std::f64::consts::PI;

#[test]
fn anisotropic_density_has_a_positive_cross_moment() {
    let m = sphere_stereographic().unwrap();
    let iso = covariance_frame(&[0.0, 0.0], &DenseMatrix::diag(&[0.15, 0.15]), FrameMode::Columns).unwrap();
    let aniso = covariance_frame(
        &[0.0, 0.0],
        &DenseMatrix::from_rows(&[vec![0.2, 0.1], vec![0.1, 0.1]]),
        FrameMode::Columns,
    )
    .unwrap();
    let cross = |u: &FramePoint, seed| {
        let s = sample_brownian(&m, u, 1.0, 100, 400, seed).unwrap();
        let g = density_grid(&m, &s, 0.1, 40, 80).unwrap();
        g.moments().1[(0, 1)]
    };
    let (ci, ca) = (cross(&iso, 1), cross(&aniso, 1));
    assert!(ca > 0.0 && ca > 5.0 * ci.abs(), "{ci} {ca}");
}
