use super::*;
use crate::autodiff::{jacobian, JetSpace};
use crate::numkernel::cholesky;

fn lcg(seed: &mut u64) -> f64 {
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
}

fn conformal(x: &[f64]) -> f64 {
    4.0 / (1.0 + x[0] * x[0] + x[1] * x[1]).powi(2)
}

#[test]
fn stereographic_jacobian_at_origin() {
    let s = sphere_stereographic().unwrap();
    let j = jacobian(s.embedding().unwrap(), &[0.0, 0.0]).unwrap();
    assert_eq!(j.data(), &[2.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
    // central differences agree away from the origin too
    let x = [0.3, -0.7];
    let j = jacobian(s.embedding().unwrap(), &x).unwrap();
    let h = 1e-6;
    for c in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[c] += h;
        xm[c] -= h;
        let fp = s.embed(&xp).unwrap().unwrap();
        let fm = s.embed(&xm).unwrap().unwrap();
        for r in 0..3 {
            assert!((j[(r, c)] - (fp[r] - fm[r]) / (2.0 * h)).abs() < 1e-8);
        }
    }
}

#[test]
fn euclidean_is_flat() {
    let m = euclidean(3).unwrap();
    let x = [0.4, -1.0, 2.5];
    assert_eq!(m.metric(&x).unwrap(), DenseMatrix::identity(3));
    assert_eq!(m.cometric(&x).unwrap(), DenseMatrix::identity(3));
    assert_eq!(m.christoffel(&x).unwrap().max_abs(), 0.0);
    assert_eq!(m.riemann(&x).unwrap().max_abs(), 0.0);
    assert_eq!(m.scalar_curvature(&x).unwrap(), 0.0);
    assert_eq!(m.sectional(&x, &[1.0, 0.0, 0.0], &[0.3, 1.0, 0.0]).unwrap(), 0.0);
}

#[test]
fn sphere_metric_is_conformal() {
    let s = sphere_stereographic().unwrap();
    assert_eq!(s.metric(&[0.0, 0.0]).unwrap(), DenseMatrix::diag(&[4.0, 4.0]));
    assert_eq!(s.cometric(&[0.0, 0.0]).unwrap(), DenseMatrix::diag(&[0.25, 0.25]));
    let mut seed = 3;
    for _ in 0..20 {
        let x = [2.0 * lcg(&mut seed), 2.0 * lcg(&mut seed)];
        let g = s.metric(&x).unwrap();
        let l = conformal(&x);
        assert!((g[(0, 0)] - l).abs() < 1e-10 && (g[(1, 1)] - l).abs() < 1e-10);
        assert!(g[(0, 1)].abs() < 1e-10);
    }
}

#[test]
fn christoffel_vanishes_at_chart_origin() {
    let s = sphere_stereographic().unwrap();
    assert!(s.christoffel(&[0.0, 0.0]).unwrap().max_abs() < 1e-12);
}

#[test]
fn christoffel_matches_finite_differences() {
    let s = sphere_stereographic().unwrap();
    let x = [0.3, -0.2];
    let gam = s.christoffel(&x).unwrap();
    let h = 1e-5;
    let dg = |l: usize| {
        let mut xp = x;
        let mut xm = x;
        xp[l] += h;
        xm[l] -= h;
        s.metric(&xp).unwrap().sub(&s.metric(&xm).unwrap()).scale(0.5 / h)
    };
    let d = [dg(0), dg(1)];
    let gi = s.cometric(&x).unwrap();
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut v = 0.0;
                for l in 0..2 {
                    v += 0.5 * gi[(k, l)] * (d[i][(j, l)] + d[j][(i, l)] - d[l][(i, j)]);
                }
                assert!((gam.get(&[k, i, j]) - v).abs() < 1e-6);
                assert_eq!(gam.get(&[k, i, j]), gam.get(&[k, j, i]));
            }
        }
    }
}

#[test]
fn sphere_riemann_has_constant_curvature_form() {
    let s = sphere_stereographic().unwrap();
    for x in [[0.0, 0.0], [0.3, -0.2], [1.5, 0.8], [-2.0, 0.1]] {
        let r = s.riemann(&x).unwrap();
        let g = s.metric(&x).unwrap();
        for_each4(2, |i, j, k, m| {
            let di = if i == m { 1.0 } else { 0.0 };
            let dj = if j == m { 1.0 } else { 0.0 };
            let expect = g[(j, k)] * di - g[(i, k)] * dj;
            assert!((r.get(&[i, j, k, m]) - expect).abs() < 1e-6 * (1.0 + expect.abs()));
            assert!((r.get(&[i, j, k, m]) + r.get(&[j, i, k, m])).abs() < 1e-12);
        });
    }
}

#[test]
fn first_bianchi_identity() {
    let mut seed = 11;
    for m in [sphere_stereographic().unwrap(), ellipsoid(1.0, 0.8, 1.2).unwrap()] {
        for _ in 0..5 {
            let x = [lcg(&mut seed), lcg(&mut seed)];
            let r = m.riemann(&x).unwrap();
            for_each4(2, |i, j, k, mm| {
                let s = r.get(&[i, j, k, mm]) + r.get(&[j, k, i, mm]) + r.get(&[k, i, j, mm]);
                assert!(s.abs() < 1e-9);
            });
        }
    }
}

#[test]
fn sphere_scalar_and_sectional_curvature() {
    let s = sphere_stereographic().unwrap();
    let mut seed = 5;
    for _ in 0..10 {
        let x = [1.5 * lcg(&mut seed), 1.5 * lcg(&mut seed)];
        assert!((s.scalar_curvature(&x).unwrap() - 2.0).abs() < 1e-6);
        let e1 = [lcg(&mut seed), lcg(&mut seed)];
        let e2 = [e1[1] + 0.5, -e1[0]];
        let k = s.sectional(&x, &e1, &e2).unwrap();
        assert!((k - 1.0).abs() < 1e-6);
        let k2 = s.sectional(&x, &[2.0 * e1[0], 2.0 * e1[1]], &e2).unwrap();
        assert!((k - k2).abs() < 1e-10);
    }
    let k = s.sectional(&[0.0, 0.0], &[0.5, 0.0], &[0.0, 0.5]).unwrap();
    assert!((k - 1.0).abs() < 1e-6);
    let ric = s.ricci(&[0.2, 0.4]).unwrap();
    assert!(ric.symmetry_error() < 1e-9);
}

#[test]
fn parallel_vectors_have_no_sectional_curvature() {
    let s = sphere_stereographic().unwrap();
    assert!(s.sectional(&[0.1, 0.1], &[1.0, 1.0], &[2.0, 2.0]).is_err());
}

#[test]
fn unit_ellipsoid_is_the_sphere() {
    let s = sphere_stereographic().unwrap();
    let e = ellipsoid(1.0, 1.0, 1.0).unwrap();
    for x in [[0.2, -0.4], [1.0, 1.0]] {
        assert_eq!(s.metric(&x).unwrap(), e.metric(&x).unwrap());
        assert!((e.scalar_curvature(&x).unwrap() - 2.0).abs() < 1e-6);
    }
}

#[test]
fn flat_and_sharp_are_inverse() {
    let s = sphere_stereographic().unwrap();
    let v = Tangent {
        base: vec![0.0, 0.0],
        components: vec![1.0, -1.0],
    };
    let p = s.flat(&v).unwrap();
    assert_eq!(p.components, vec![4.0, -4.0]);
    let mut seed = 9;
    for _ in 0..10 {
        let v = Tangent {
            base: vec![lcg(&mut seed), lcg(&mut seed)],
            components: vec![lcg(&mut seed), lcg(&mut seed)],
        };
        let back = s.sharp(&s.flat(&v).unwrap()).unwrap();
        for (a, b) in back.components.iter().zip(&v.components) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn embedded_metrics_are_positive_definite() {
    let mut seed = 21;
    for m in [sphere_stereographic().unwrap(), ellipsoid(1.0, 0.8, 1.2).unwrap()] {
        for _ in 0..100 {
            let x = [3.0 * lcg(&mut seed), 3.0 * lcg(&mut seed)];
            assert!(cholesky(&m.metric(&x).unwrap()).is_ok());
        }
    }
}

#[test]
fn christoffel_at_jets_matches_expansion() {
    let s = ellipsoid(1.0, 0.8, 1.2).unwrap();
    let space = JetSpace::get(2, 1);
    let x = Jet::variables(&space, &[0.3, -0.1]);
    let at = s.christoffel_at(&x).unwrap();
    let local = s.christoffel_expansion(&[0.3, -0.1], 1).unwrap();
    for (a, b) in at.iter().zip(&local) {
        assert!((a.value() - b.value()).abs() < 1e-15);
        assert!((a.d(0) - b.d(0)).abs() < 1e-13 && (a.d(1) - b.d(1)).abs() < 1e-13);
    }
}

#[test]
fn metric_mode_matches_embedding_mode() {
    let conformal_metric = SmoothMap::new(2, 4, |x| {
        let s = &x[0] * &x[0] + &x[1] * &x[1] + 1.0;
        let l = s.square().recip()? * 4.0;
        Ok(vec![l.clone(), Jet::scalar(0.0), Jet::scalar(0.0), l])
    });
    let m = Manifold::from_metric("conformal", 2, conformal_metric).unwrap();
    let s = sphere_stereographic().unwrap();
    let x = [0.4, 0.7];
    let a = m.christoffel(&x).unwrap();
    let b = s.christoffel(&x).unwrap();
    assert!(a.sub(&b).max_abs() < 1e-12);
    assert!((m.scalar_curvature(&x).unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn ids_parse() {
    assert_eq!(from_id("euclidean:4").unwrap().dim(), 4);
    assert_eq!(from_id("sphere-stereographic").unwrap().dim(), 2);
    assert_eq!(from_id("ellipsoid:1,0.8,1.2").unwrap().dim(), 2);
    assert_eq!(from_id("landmarks:3,0.1,1").unwrap().dim(), 6);
    assert!(from_id("torus").is_err());
    assert!(from_id("ellipsoid:1,2").is_err());
    assert!(from_id("landmarks:2.5,0.1,1").is_err());
}
