use super::*;
use crate::manifold::{ellipsoid, euclidean, sphere_stereographic, Tangent};

fn lcg(seed: &mut u64) -> f64 {
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
}

fn norm3(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[test]
fn euclidean_geodesic_is_a_line() {
    let m = euclidean(2).unwrap();
    let tr = geodesic(&m, &[1.0, -1.0], &[0.5, 2.0], 10, OdeScheme::Rk4).unwrap();
    for (t, s) in tr.times.iter().zip(&tr.states) {
        assert!((s[0] - (1.0 + 0.5 * t)).abs() < 1e-14);
        assert!((s[1] - (-1.0 + 2.0 * t)).abs() < 1e-14);
    }
    let e = exp(&m, &[1.0, 2.0], &[3.0, 4.0]).unwrap();
    assert!((e[0] - 4.0).abs() < 1e-12 && (e[1] - 6.0).abs() < 1e-12);
}

#[test]
fn zero_velocity_is_constant() {
    let m = sphere_stereographic().unwrap();
    let x = [0.2, -0.4];
    assert_eq!(exp(&m, &x, &[0.0, 0.0]).unwrap(), x.to_vec());
    let tr = geodesic(&m, &x, &[0.0, 0.0], 20, OdeScheme::Rk4).unwrap();
    assert!(tr.states.iter().all(|s| s[..2] == x));
}

#[test]
fn sphere_geodesic_stays_on_sphere_with_constant_speed() {
    let m = sphere_stereographic().unwrap();
    let tr = geodesic(&m, &[0.0, 0.0], &[1.0, -1.0], 100, OdeScheme::Rk4).unwrap();
    let mut worst = 0.0f64;
    for s in &tr.states {
        let p = m.embed(&s[..2]).unwrap().unwrap();
        worst = worst.max((norm3(&p) - 1.0).abs());
    }
    assert!(worst < 1e-6, "{worst}");
    let sp = speeds(&m, &tr).unwrap();
    let drift = sp.iter().map(|s| (s - sp[0]).abs()).fold(0.0, f64::max) / sp[0];
    assert!(drift < 1e-5, "{drift}");
}

#[test]
fn ellipsoid_speed_is_conserved() {
    let m = ellipsoid(1.0, 0.6, 1.4).unwrap();
    let tr = geodesic(&m, &[0.1, 0.2], &[0.8, -0.5], 100, OdeScheme::Rk4).unwrap();
    let sp = speeds(&m, &tr).unwrap();
    let drift = sp.iter().map(|s| (s - sp[0]).abs()).fold(0.0, f64::max) / sp[0];
    assert!(drift < 1e-5, "{drift}");
}

#[test]
fn embedded_arc_length_matches_norm() {
    let m = sphere_stereographic().unwrap();
    let v = [0.3, 0.7];
    let tr = geodesic(&m, &[0.0, 0.0], &v, 400, OdeScheme::Rk4).unwrap();
    let pts: Vec<Vec<f64>> = tr
        .states
        .iter()
        .map(|s| m.embed(&s[..2]).unwrap().unwrap())
        .collect();
    let len: f64 = pts
        .windows(2)
        .map(|w| norm3(&[w[1][0] - w[0][0], w[1][1] - w[0][1], w[1][2] - w[0][2]]))
        .sum();
    let expected = m.norm(&[0.0, 0.0], &v).unwrap();
    assert!((len - expected).abs() < 1e-4, "{len} vs {expected}");
}

#[test]
fn chart_exit_is_reported() {
    let m = euclidean(2)
        .unwrap()
        .with_validity(|x| x[0] < 0.5);
    let err = geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], 10, OdeScheme::Rk4).unwrap_err();
    assert!(matches!(err, Error::ChartExit { step } if (4..=6).contains(&step)), "{err:?}");
}

#[test]
fn hamiltonian_euclidean_line() {
    let m = euclidean(2).unwrap();
    let flow = exp_hamiltonian(&m, &[0.0, 0.0], &[1.0, 0.0], 10).unwrap();
    for (t, s) in flow.trajectory.times.iter().zip(&flow.trajectory.states) {
        assert!((s[0] - t).abs() < 1e-14 && s[1].abs() < 1e-14);
        assert_eq!(&s[2..], &[1.0, 0.0]);
    }
}

#[test]
fn hamiltonian_matches_second_order_form() {
    let m = sphere_stereographic().unwrap();
    let x = [0.0, 0.0];
    let v = [1.0, -1.0];
    let p = m
        .flat(&Tangent {
            base: x.to_vec(),
            components: v.to_vec(),
        })
        .unwrap();
    let flow = exp_hamiltonian(&m, &x, &p.components, 100).unwrap();
    let a = &flow.trajectory.last()[..2];
    let b = exp(&m, &x, &v).unwrap();
    assert!((a[0] - b[0]).abs() < 1e-4 && (a[1] - b[1]).abs() < 1e-4);
}

#[test]
fn hamiltonian_is_conserved_on_the_example_flow() {
    // The flow reaches chart radius ~6 near the far pole, so a finer grid
    // is needed for the tighter tolerance.
    let m = sphere_stereographic().unwrap();
    let p = m.metric(&[0.0, 0.0]).unwrap().matvec(&[1.0, -1.0]).unwrap();
    let flow = exp_hamiltonian(&m, &[0.0, 0.0], &p, 400).unwrap();
    assert!(flow.relative_energy_drift() < 1e-6, "{}", flow.relative_energy_drift());
    let coarse = exp_hamiltonian(&m, &[0.0, 0.0], &p, 100).unwrap();
    assert!(coarse.relative_energy_drift() < 1e-4);
}

#[test]
fn formulations_agree_on_random_data() {
    let mut seed = 17;
    for m in [sphere_stereographic().unwrap(), ellipsoid(1.0, 0.8, 1.2).unwrap()] {
        for _ in 0..20 {
            let x = [0.5 * lcg(&mut seed), 0.5 * lcg(&mut seed)];
            let mut v = [lcg(&mut seed), lcg(&mut seed)];
            let scale = 1.5 * lcg(&mut seed).abs() / m.norm(&x, &v).unwrap();
            v.iter_mut().for_each(|c| *c *= scale);
            let p = m.metric(&x).unwrap().matvec(&v).unwrap();
            let flow = exp_hamiltonian(&m, &x, &p, 100).unwrap();
            let a = &flow.trajectory.last()[..2];
            let b = exp(&m, &x, &v).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-4 && (a[1] - b[1]).abs() < 1e-4);
        }
    }
}

#[test]
fn log_trivial_cases() {
    let m = euclidean(2).unwrap();
    let opts = LogOptions::default();
    let r = log(&m, &[0.3, 0.3], &[0.3, 0.3], &opts).unwrap();
    assert_eq!(r.v, vec![0.0, 0.0]);
    let r = log(&m, &[0.0, 1.0], &[2.0, -1.0], &opts).unwrap();
    assert!(r.converged);
    assert!((r.v[0] - 2.0).abs() < 1e-8 && (r.v[1] + 2.0).abs() < 1e-8);
    let d = distance(&m, &[0.0, 0.0], &[3.0, 4.0], &opts).unwrap();
    assert!((d - 5.0).abs() < 1e-8);
    assert_eq!(distance(&m, &[1.0, 1.0], &[1.0, 1.0], &opts).unwrap(), 0.0);
}

#[test]
fn sphere_exp_log_roundtrip() {
    let m = sphere_stereographic().unwrap();
    let mut seed = 5;
    let opts = LogOptions::default();
    for _ in 0..20 {
        let x = [0.3 * lcg(&mut seed), 0.3 * lcg(&mut seed)];
        let mut v = [lcg(&mut seed), lcg(&mut seed)];
        let n = m.norm(&x, &v).unwrap();
        let target = 0.5 * (0.2 + 0.8 * lcg(&mut seed).abs());
        v.iter_mut().for_each(|c| *c *= target / n);
        let y = exp(&m, &x, &v).unwrap();
        let r = log(&m, &x, &y, &opts).unwrap();
        assert!(r.converged, "loss {}", r.loss);
        let err = ((r.v[0] - v[0]).powi(2) + (r.v[1] - v[1]).powi(2)).sqrt();
        assert!(err < 1e-3, "{err}");
        let d = distance(&m, &x, &y, &opts).unwrap();
        assert!((d - target).abs() < 1e-3);
    }
}

#[test]
fn distance_is_symmetric() {
    let m = ellipsoid(1.0, 0.8, 1.2).unwrap();
    let opts = LogOptions::default();
    let a = [0.1, -0.2];
    let b = [-0.2, 0.3];
    let dab = distance(&m, &a, &b, &opts).unwrap();
    let dba = distance(&m, &b, &a, &opts).unwrap();
    assert!((dab - dba).abs() < 1e-4, "{dab} {dba}");
}

#[test]
fn transport_in_euclidean_space_is_constant() {
    let m = euclidean(2).unwrap();
    let tr = parallel_transport_along(
        &m,
        &[1.0, 2.0],
        |t| (vec![t.sin(), t * t], vec![t.cos(), 2.0 * t]),
        50,
        1.0,
    )
    .unwrap();
    assert!(tr.states.iter().all(|s| s[2..] == [1.0, 2.0]));
}

fn example_curve(t: f64) -> (Vec<f64>, Vec<f64>) {
    (vec![t * t, -t.sin()], vec![2.0 * t, -t.cos()])
}

#[test]
fn transport_preserves_norm_on_sphere() {
    let m = sphere_stereographic().unwrap();
    let v = [-0.5, -0.5];
    let tr = parallel_transport_along(&m, &v, example_curve, 100, 1.0).unwrap();
    let norms: Vec<f64> = tr
        .states
        .iter()
        .map(|s| m.norm(&s[..2], &s[2..]).unwrap())
        .collect();
    let drift = norms.iter().map(|n| (n - norms[0]).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-4, "{drift}");
}

#[test]
fn sampled_transport_matches_analytic() {
    let m = sphere_stereographic().unwrap();
    let n = 100;
    let mut gamma = Trajectory::with_capacity(n);
    let mut vel = Vec::new();
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let (x, xd) = example_curve(t);
        gamma.push(t, x);
        vel.push(xd);
    }
    let v = [0.3, -0.1];
    let a = parallel_transport(&m, &v, &gamma, Some(&vel)).unwrap();
    let b = parallel_transport_along(&m, &v, example_curve, n, 1.0).unwrap();
    let fd = parallel_transport(&m, &v, &gamma, None).unwrap();
    for k in 0..=n {
        for i in 0..2 {
            assert!((a.states[k][i] - b.states[k][2 + i]).abs() < 1e-6);
            assert!((fd.states[k][i] - b.states[k][2 + i]).abs() < 1e-3);
        }
    }
    let bad = vec![vec![0.0, 0.0]; 3];
    assert!(matches!(
        parallel_transport(&m, &v, &gamma, Some(&bad)),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn geodesic_velocity_is_self_parallel() {
    let m = ellipsoid(1.0, 0.8, 1.2).unwrap();
    let tr = geodesic(&m, &[0.1, 0.0], &[0.6, 0.9], 100, OdeScheme::Rk4).unwrap();
    let vel: Vec<Vec<f64>> = tr.states.iter().map(|s| s[2..].to_vec()).collect();
    let pt = parallel_transport(&m, &vel[0], &tr, Some(&vel)).unwrap();
    for (a, b) in pt.states.iter().zip(&vel) {
        assert!((a[0] - b[0]).abs() < 1e-4 && (a[1] - b[1]).abs() < 1e-4);
    }
}

#[test]
fn transport_is_an_isometry_along_random_curves() {
    let m = ellipsoid(1.0, 0.7, 1.3).unwrap();
    let mut seed = 99;
    for _ in 0..10 {
        let c: Vec<f64> = (0..6).map(|_| 0.5 * lcg(&mut seed)).collect();
        let curve = move |t: f64| {
            (
                vec![c[0] + c[1] * t + c[2] * (3.0 * t).sin(), c[3] + c[4] * t * t + c[5] * t.cos()],
                vec![c[1] + 3.0 * c[2] * (3.0 * t).cos(), 2.0 * c[4] * t - c[5] * t.sin()],
            )
        };
        let v = [lcg(&mut seed), lcg(&mut seed)];
        let w = [lcg(&mut seed), lcg(&mut seed)];
        let tv = parallel_transport_along(&m, &v, curve.clone(), 100, 1.0).unwrap();
        let tw = parallel_transport_along(&m, &w, curve, 100, 1.0).unwrap();
        let inner = |k: usize| {
            let x = &tv.states[k][..2];
            m.metric(x).unwrap().bilinear(&tv.states[k][2..], &tw.states[k][2..])
        };
        let i0 = inner(0);
        for k in 0..=100 {
            assert!((inner(k) - i0).abs() < 1e-4);
        }
    }
}

#[test]
fn shooting_gradient_matches_finite_differences() {
    let m = sphere_stereographic().unwrap();
    let x1 = [0.1, 0.2];
    let x2 = [0.4, -0.1];
    let loss = |v: &[f64]| {
        let e = exp(&m, &x1, v).unwrap();
        ((e[0] - x2[0]).powi(2) + (e[1] - x2[1]).powi(2)) / 2.0
    };
    let v = [0.2, -0.3];
    let xs: Vec<Jet> = x1.iter().map(|&c| Jet::scalar(c)).collect();
    let (val, g) = crate::autodiff::gradient_of_loss(&v, |vs| {
        let tr = geodesic_jets(&m, &xs, vs, DEFAULT_STEPS, OdeScheme::Rk4)?;
        let e = &tr.last()[..2];
        let r0 = &e[0] - x2[0];
        let r1 = &e[1] - x2[1];
        Ok((&r0 * &r0 + &r1 * &r1) * 0.5)
    })
    .unwrap();
    assert!((val - loss(&v)).abs() < 1e-15);
    let h = 1e-6;
    for i in 0..2 {
        let mut vp = v;
        let mut vm = v;
        vp[i] += h;
        vm[i] -= h;
        let fd = (loss(&vp) - loss(&vm)) / (2.0 * h);
        assert!((fd - g[i]).abs() < 1e-5 * fd.abs().max(1e-3), "{fd} {}", g[i]);
    }
}

#[test]
fn gauss_newton_log_agrees_with_lbfgs() {
    let m = sphere_stereographic().unwrap();
    let x = [0.2, -0.3];
    let v = [0.3, 0.25];
    let y = exp(&m, &x, &v).unwrap();
    let gn = log(
        &m,
        &x,
        &y,
        &LogOptions {
            method: LogMethod::GaussNewton,
            ..LogOptions::default()
        },
    )
    .unwrap();
    assert!(gn.converged && gn.loss < 1e-20);
    assert!((gn.v[0] - v[0]).abs() < 1e-9 && (gn.v[1] - v[1]).abs() < 1e-9);
    let lb = log(&m, &x, &y, &LogOptions::default()).unwrap();
    assert!((gn.v[0] - lb.v[0]).abs() < 1e-4 && (gn.v[1] - lb.v[1]).abs() < 1e-4);
}
