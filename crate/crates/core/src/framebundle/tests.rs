use super::*;
use crate::geodesics::{geodesic, log, LogOptions};
use crate::manifold::{euclidean, sphere_stereographic, Manifold};
use crate::numkernel::gaussian_increments;

fn lcg(seed: &mut u64) -> f64 {
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
}

fn frame(x: &[f64], cols: &[[f64; 2]]) -> FramePoint {
    let c: Vec<Vec<f64>> = cols.iter().map(|c| c.to_vec()).collect();
    FramePoint::new(x.to_vec(), DenseMatrix::from_columns(&c)).unwrap()
}

fn identity_frame(x: &[f64]) -> FramePoint {
    FramePoint::new(x.to_vec(), DenseMatrix::identity(x.len())).unwrap()
}

fn sphere_frame() -> FramePoint {
    frame(&[0.0, 0.0], &[[0.5, 0.0], [0.0, 0.5]])
}

fn random_frame(seed: &mut u64) -> FramePoint {
    let x = [0.8 * lcg(seed), 0.8 * lcg(seed)];
    loop {
        let cols = [[lcg(seed), lcg(seed)], [lcg(seed), lcg(seed)]];
        if let Ok(u) = FramePoint::new(x.to_vec(), DenseMatrix::from_columns(&[cols[0].to_vec(), cols[1].to_vec()])) {
            return u;
        }
    }
}

#[test]
fn flatten_roundtrip_and_layout() {
    let u = frame(&[0.1, 0.2], &[[1.0, 2.0], [3.0, 4.0]]);
    let s = u.flatten();
    assert_eq!(s, vec![0.1, 0.2, 1.0, 2.0, 3.0, 4.0]);
    assert_eq!(FramePoint::from_flat(2, 2, &s).unwrap(), u);
    assert!(FramePoint::new(vec![0.0, 0.0], DenseMatrix::from_columns(&[vec![1.0, 1.0], vec![2.0, 2.0]])).is_err());
}

#[test]
fn horizontal_basis_in_flat_space() {
    let m = euclidean(2).unwrap();
    let h = horizontal_basis(&m, &identity_frame(&[0.3, 0.4])).unwrap();
    assert_eq!((h.rows(), h.cols()), (6, 2));
    for r in 0..6 {
        for c in 0..2 {
            let expected = if r == c { 1.0 } else { 0.0 };
            assert_eq!(h[(r, c)], expected);
        }
    }
}

#[test]
fn horizontal_basis_matches_index_loops() {
    let m = sphere_stereographic().unwrap();
    let u = frame(&[0.1, 0.1], &[[0.3, 0.1], [-0.1, 0.4]]);
    let h = horizontal_basis(&m, &u).unwrap();
    let gam = m.christoffel(&u.x).unwrap();
    for a in 0..2 {
        for i in 0..2 {
            assert_eq!(h[(i, a)], u.nu[(i, a)]);
        }
        for b in 0..2 {
            for k in 0..2 {
                let mut naive = 0.0;
                for j in 0..2 {
                    for l in 0..2 {
                        naive -= u.nu[(j, a)] * u.nu[(l, b)] * gam.get(&[k, j, l]);
                    }
                }
                assert!((h[(2 + 2 * b + k, a)] - naive).abs() < 1e-10);
            }
        }
    }
    // the stereographic chart is normal at its origin
    let h0 = horizontal_basis(&m, &sphere_frame()).unwrap();
    for r in 2..6 {
        assert!(h0[(r, 0)].abs() < 1e-14 && h0[(r, 1)].abs() < 1e-14);
    }
}

#[test]
fn cometric_is_h_h_transpose() {
    let m = sphere_stereographic().unwrap();
    let mut seed = 11;
    for _ in 0..20 {
        let u = random_frame(&mut seed);
        let gs = sub_riemannian_cometric(&m, &u).unwrap();
        let h = horizontal_basis(&m, &u).unwrap();
        let hh = h.matmul(&h.transpose()).unwrap();
        assert!(gs.sub(&hh).max_abs() < 1e-9 * (1.0 + hh.max_abs()));
        assert!(gs.symmetry_error() < 1e-12 * (1.0 + gs.max_abs()));
    }
    let e = sub_riemannian_cometric(&euclidean(2).unwrap(), &identity_frame(&[0.0, 1.0])).unwrap();
    let mut expected = DenseMatrix::zeros(6, 6);
    expected[(0, 0)] = 1.0;
    expected[(1, 1)] = 1.0;
    assert_eq!(e, expected);
}

#[test]
fn cometric_has_rank_d() {
    let m = sphere_stereographic().unwrap();
    let mut seed = 5;
    for _ in 0..10 {
        let u = random_frame(&mut seed);
        let gs = sub_riemannian_cometric(&m, &u).unwrap();
        // Gram pivoting on the PSD matrix
        let mut a = gs.clone();
        let scale = a.max_abs();
        let mut rank = 0;
        for _ in 0..6 {
            let (p, piv) = (0..6).map(|i| (i, a[(i, i)])).fold((0, f64::MIN), |b, c| if c.1 > b.1 { c } else { b });
            if piv <= 1e-10 * scale {
                break;
            }
            rank += 1;
            let col: Vec<f64> = (0..6).map(|i| a[(i, p)]).collect();
            for i in 0..6 {
                for j in 0..6 {
                    a[(i, j)] -= col[i] * col[j] / piv;
                }
            }
        }
        assert_eq!(rank, 2);
    }
}

#[test]
fn fm_geodesics_trivial_cases() {
    let m = sphere_stereographic().unwrap();
    let u = sphere_frame();
    let f = exp_fm(&m, &u, &[0.0; 6], 10).unwrap();
    assert!(f.trajectory.states.iter().all(|s| s[..6] == u.flatten()[..]));

    let e = euclidean(2).unwrap();
    let f = exp_fm(&e, &identity_frame(&[0.0, 0.0]), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 10).unwrap();
    for (t, s) in f.trajectory.times.iter().zip(&f.trajectory.states) {
        assert!((s[0] - t).abs() < 1e-14 && s[1] == 0.0);
        assert_eq!(&s[2..6], &[1.0, 0.0, 0.0, 1.0]);
    }
}

#[test]
fn fm_geodesic_transports_an_orthonormal_frame() {
    let m = sphere_stereographic().unwrap();
    let u = sphere_frame();
    let f = exp_fm(&m, &u, &[1.0, 0.5, 0.0, 0.0, 0.0, 0.0], 100).unwrap();
    assert!(f.relative_energy_drift() < 1e-5, "{}", f.relative_energy_drift());
    let frames = f.frames(2, 2).unwrap();
    assert!(orthonormality_error(&m, &frames).unwrap() < 1e-4);
    // the base curve is a Riemannian geodesic with velocity ν νᵀ p_x
    let v0 = u.nu.matmul(&u.nu.transpose()).unwrap().matvec(&[1.0, 0.5]).unwrap();
    let g = geodesic(&m, &u.x, &v0, 100, OdeScheme::Rk4).unwrap();
    for (a, b) in f.trajectory.states.iter().zip(&g.states) {
        assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8);
    }
}

#[test]
fn fm_energy_is_conserved_for_random_frames() {
    let m = sphere_stereographic().unwrap();
    let mut seed = 23;
    for _ in 0..5 {
        let u = random_frame(&mut seed);
        let p: Vec<f64> = (0..6).map(|_| 0.5 * lcg(&mut seed)).collect();
        match exp_fm(&m, &u, &p, 100) {
            Ok(f) => assert!(f.relative_energy_drift() < 1e-5),
            Err(Error::ChartExit { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn curvature_form_properties() {
    let e = euclidean(2).unwrap();
    assert_eq!(curvature_form(&e, &identity_frame(&[0.1, 0.2])).unwrap().max_abs(), 0.0);

    let m = sphere_stereographic().unwrap();
    let x = [0.3, -0.2];
    let u = orthonormal_frame(&m, &x, &[vec![1.0, 0.2], vec![0.0, 1.0]]).unwrap();
    let om = curvature_form_on(&m, &u, &u.nu.column(0), &u.nu.column(1)).unwrap();
    assert!(om.add(&om.transpose()).max_abs() < 1e-9);
    assert!(om.max_abs() > 0.5);

    let a = DenseMatrix::from_rows(&[vec![1.3, -0.4], vec![0.7, 0.9]]);
    let ua = FramePoint::new(x.to_vec(), u.nu.matmul(&a).unwrap()).unwrap();
    let (v, w) = ([0.4, 1.1], [-0.6, 0.2]);
    let lhs = curvature_form_on(&m, &ua, &v, &w).unwrap();
    let rhs = invert(&a).unwrap().matmul(&curvature_form_on(&m, &u, &v, &w).unwrap()).unwrap().matmul(&a).unwrap();
    assert!(lhs.sub(&rhs).max_abs() < 1e-9);

    let partial = frame(&x, &[[1.0, 0.0], [0.0, 1.0]]);
    assert!(curvature_form(&m, &partial).is_ok());
    let thin = FramePoint::new(x.to_vec(), DenseMatrix::from_columns(&[vec![1.0, 0.0]])).unwrap();
    assert!(curvature_form(&m, &thin).is_err());
}

#[test]
fn euclidean_development_is_the_path() {
    let m = euclidean(2).unwrap();
    let u = identity_frame(&[1.0, -1.0]);
    let dw = gaussian_increments(2, 50, 0.01, 3).unwrap();
    let tr = development(&m, &u, &dw).unwrap();
    let mut acc = [1.0, -1.0];
    for (k, s) in tr.states.iter().enumerate() {
        assert!((s[0] - acc[0]).abs() < 1e-12 && (s[1] - acc[1]).abs() < 1e-12);
        assert_eq!(&s[2..], &[1.0, 0.0, 0.0, 1.0]);
        if k < 50 {
            acc[0] += dw[(k, 0)];
            acc[1] += dw[(k, 1)];
        }
    }
}

#[test]
fn zero_increments_give_constant_frame() {
    let m = sphere_stereographic().unwrap();
    let u = frame(&[0.2, 0.1], &[[0.4, 0.1], [0.0, 0.3]]);
    let tr = stochastic_development(&m, &u, &DenseMatrix::zeros(20, 2), 0.01, &[0.0, 0.0]).unwrap();
    assert!(tr.states.iter().all(|s| *s == u.flatten()));
    assert!(stochastic_development(&m, &u, &DenseMatrix::zeros(5, 3), 0.1, &[0.0, 0.0]).is_err());
}

#[test]
fn development_is_permutation_equivariant() {
    let m = sphere_stereographic().unwrap();
    let u = frame(&[0.2, 0.1], &[[0.4, 0.1], [0.0, 0.3]]);
    let swapped = frame(&[0.2, 0.1], &[[0.0, 0.3], [0.4, 0.1]]);
    let dw = gaussian_increments(2, 200, 0.005, 9).unwrap();
    let dw_swapped = DenseMatrix::from_columns(&[dw.column(1), dw.column(0)]);
    let a = stochastic_development(&m, &u, &dw, 0.005, &[0.3, -0.1]).unwrap();
    let b = stochastic_development(&m, &swapped, &dw_swapped, 0.005, &[-0.1, 0.3]).unwrap();
    for (sa, sb) in a.states.iter().zip(&b.states) {
        assert!((sa[0] - sb[0]).abs() < 1e-12 && (sa[1] - sb[1]).abs() < 1e-12);
    }
}

#[test]
fn reduced_rank_development() {
    let m = sphere_stereographic().unwrap();
    let u = FramePoint::new(vec![0.1, 0.0], DenseMatrix::from_columns(&[vec![0.5, 0.0]])).unwrap();
    let tr = development(&m, &u, &DenseMatrix::from_rows(&vec![vec![0.01]; 100])).unwrap();
    assert_eq!(tr.state_dim(), 4);
    // a one-frame development of a straight driving path is a geodesic
    let g = geodesic(&m, &[0.1, 0.0], &[0.5, 0.0], 100, OdeScheme::Rk4).unwrap();
    assert!((tr.last()[0] - g.last()[0]).abs() < 1e-3);
}

#[test]
fn stochastic_development_keeps_frames_orthonormal() {
    let m = sphere_stereographic().unwrap();
    let u = sphere_frame();
    let dw = gaussian_increments(2, 10_000, 1e-4, 4).unwrap();
    let tr = stochastic_development(&m, &u, &dw, 1e-4, &[0.5, 0.5]).unwrap();
    let frames: Vec<FramePoint> = tr.states.iter().map(|s| FramePoint::from_flat(2, 2, s).unwrap()).collect();
    assert!(orthonormality_error(&m, &frames).unwrap() < 1e-3);
}

#[test]
fn onsager_machlup_values() {
    let e = euclidean(3).unwrap();
    assert!((onsager_machlup_integrand(&e, &[0.0; 3], &[1.0, 2.0, 2.0]).unwrap() + 4.5).abs() < 1e-14);
    let m = sphere_stereographic().unwrap();
    for x in [[0.0, 0.0], [0.7, -0.3], [-1.5, 2.0]] {
        assert!((onsager_machlup_integrand(&m, &x, &[0.0, 0.0]).unwrap() - 1.0 / 6.0).abs() < 1e-10);
    }
    let g = geodesic(&m, &[0.1, 0.0], &[0.4, 0.3], 200, OdeScheme::Rk4).unwrap();
    let len = m.norm(&[0.1, 0.0], &[0.4, 0.3]).unwrap();
    let om = onsager_machlup_functional(&m, &g).unwrap();
    assert!((om - (-len * len / 2.0 + 1.0 / 6.0)).abs() < 1e-4);
}

#[test]
fn mpp_trivial_cases() {
    let e = euclidean(2).unwrap();
    let u = identity_frame(&[0.5, 0.5]);
    let r = mpp(&e, &u, &[0.5, 0.5], &MppOptions::default()).unwrap();
    assert_eq!(r.v, vec![0.0, 0.0]);
    let r = mpp(&e, &u, &[1.5, -0.5], &MppOptions::default()).unwrap();
    assert!(r.converged);
    assert!((r.v[0] - 1.0).abs() < 1e-5 && (r.v[1] + 1.0).abs() < 1e-5);
}

#[test]
fn isotropic_mpp_is_a_riemannian_geodesic() {
    let m = sphere_stereographic().unwrap();
    let x0 = [0.1, -0.2];
    let y = [0.6, 0.4];
    let u = orthonormal_frame(&m, &x0, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let r = mpp(&m, &u, &y, &MppOptions::default()).unwrap();
    assert!(r.converged, "{}", r.distance);
    let l = log(&m, &x0, &y, &LogOptions::default()).unwrap();
    let g = geodesic(&m, &x0, &l.v, 100, OdeScheme::Rk4).unwrap();
    for (a, b) in r.flow.trajectory.states.iter().zip(&g.states) {
        let dist = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        assert!(dist < 1e-2);
    }
    let nv = u.nu.matvec(&r.v).unwrap();
    assert!((nv[0] - l.v[0]).abs() < 1e-3 && (nv[1] - l.v[1]).abs() < 1e-3);
}

fn spiral_increments(n: usize) -> DenseMatrix {
    let g = |t: f64| [20.0 * t.sin(), t * t + 2.0 * t];
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let a = g(10.0 * k as f64 / n as f64);
            let b = g(10.0 * (k + 1) as f64 / n as f64);
            vec![b[0] - a[0], b[1] - a[1]]
        })
        .collect();
    DenseMatrix::from_rows(&rows)
}

fn spiral_frame(m: &Manifold) -> FramePoint {
    orthonormal_frame(m, &[0.0, 0.0], &[vec![-1.0, 1.0], vec![1.0, 1.0]]).unwrap()
}

// The path winds around the sphere many times and passes close to the point
// the chart sends to infinity; a coarse grid cannot follow it there.
#[test]
fn long_spiral_on_a_coarse_grid_fails_cleanly() {
    let m = sphere_stereographic().unwrap();
    assert!(development(&m, &spiral_frame(&m), &spiral_increments(1000)).is_err());
}

#[test]
#[ignore = "slow: a million development steps"]
fn long_spiral_development_on_a_fine_grid() {
    let m = sphere_stereographic().unwrap();
    let tr = development(&m, &spiral_frame(&m), &spiral_increments(1_000_000)).unwrap();
    let frames: Vec<FramePoint> = tr.states.iter().step_by(100).map(|s| FramePoint::from_flat(2, 2, s).unwrap()).collect();
    assert!(orthonormality_error(&m, &frames).unwrap() < 1e-3);
    for s in tr.states.iter().step_by(100) {
        let p = m.embed(&s[..2]).unwrap().unwrap();
        assert!((p.iter().map(|c| c * c).sum::<f64>().sqrt() - 1.0).abs() < 1e-4);
    }
}
