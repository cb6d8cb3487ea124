use super::*;
use crate::autodiff::JetSpace;
use crate::numkernel::gaussian_increments;

fn exp_field<T: Scalar>(_t: f64, x: &[T]) -> Result<Vec<T>> {
    Ok(x.to_vec())
}

#[test]
fn zero_field_is_constant() {
    let tr = integrate_ode(|_, x: &[f64]| Ok(vec![0.0; x.len()]), &[1.5, -2.0], 10, 1.0, OdeScheme::Rk4).unwrap();
    assert!(tr.states.iter().all(|s| s == &[1.5, -2.0]));
    assert_eq!(tr.times.len(), 11);
}

#[test]
fn rk4_exponential() {
    let tr = integrate_ode(exp_field, &[1.0], 100, 1.0, OdeScheme::Rk4).unwrap();
    assert!((tr.last()[0] - std::f64::consts::E).abs() < 1e-8);
    assert_eq!(*tr.times.last().unwrap(), 1.0);
    assert!(tr.grid_error() < 1e-14);
}

#[test]
fn euler_matches_closed_recursion() {
    let tr = integrate_ode(exp_field, &[1.0], 100, 1.0, OdeScheme::Euler).unwrap();
    let mut y = 1.0f64;
    for _ in 0..100 {
        y += 0.01 * y;
    }
    assert_eq!(tr.last()[0], y);
    assert!((y - 1.01f64.powi(100)).abs() < 1e-12);
}

fn slope(hs: &[f64], errs: &[f64]) -> f64 {
    let n = hs.len() as f64;
    let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn deterministic_convergence_orders() {
    for (scheme, expect, tol, ns) in [
        (OdeScheme::Euler, 1.0, 0.1, vec![10usize, 30, 100, 300, 1000]),
        (OdeScheme::Rk4, 4.0, 0.3, vec![10usize, 20, 40, 80]),
    ] {
        let hs: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let tr = integrate_ode(exp_field, &[1.0], n, 1.0, scheme).unwrap();
                (tr.last()[0] - std::f64::consts::E).abs()
            })
            .collect();
        let s = slope(&hs, &errs);
        assert!((s - expect).abs() < tol, "{scheme:?} slope {s}");
    }
}

#[test]
fn jet_transparency_is_bitwise() {
    // a nonlinear field written once for any scalar
    fn field<T: Scalar>(_t: f64, x: &[T]) -> Result<Vec<T>> {
        Ok(vec![x[1].clone(), x[0].scale(-1.0).axpy(0.3, &x[1])])
    }
    let x0 = [0.7, -0.2];
    let plain = integrate_ode(field::<f64>, &x0, 50, 2.0, OdeScheme::Rk4).unwrap();
    let space = JetSpace::get(2, 3);
    let jets = Jet::variables(&space, &x0);
    let jt = integrate_ode(field::<Jet>, &jets, 50, 2.0, OdeScheme::Rk4).unwrap();
    assert_eq!(jt.values(), plain);
}

#[test]
fn non_finite_state_reports_step() {
    let r = integrate_ode(
        |t, _x: &[f64]| Ok(vec![if t > 0.25 { f64::INFINITY } else { 0.0 }]),
        &[0.0],
        10,
        1.0,
        OdeScheme::Euler,
    );
    assert_eq!(r.unwrap_err(), Error::NonFinite { step: 4 });
}

#[test]
fn zero_diffusion_matches_euler_bitwise() {
    let dw = gaussian_increments(1, 100, 0.01, 1).unwrap();
    let ode = integrate_ode(exp_field, &[1.0], 100, 1.0, OdeScheme::Euler).unwrap();
    for scheme in [SdeScheme::Ito, SdeScheme::Stratonovich] {
        let sde = integrate_sde(|_, _, x: &[f64]| Ok((x.to_vec(), vec![0.0])), &[1.0], &dw, 0.01, scheme).unwrap();
        assert_eq!(sde.states, ode.states);
    }
}

#[test]
fn additive_noise_telescopes() {
    let dw = gaussian_increments(1, 200, 0.005, 8).unwrap();
    let tr = integrate_sde_ito(|w, _, _x: &[f64]| Ok((vec![0.0], vec![w[0]])), &[0.0], &dw, 0.005).unwrap();
    let mut s = 0.0;
    for k in 0..200 {
        s += dw[(k, 0)];
    }
    assert_eq!(tr.last()[0], s);
}

#[test]
fn ito_and_stratonovich_agree_on_additive_noise() {
    let dw = gaussian_increments(2, 300, 0.01, 4).unwrap();
    let field = |w: &[f64], _t: f64, x: &[f64]| {
        Ok((vec![-x[0], 0.5 * x[0] - x[1]], vec![0.3 * w[0], 0.2 * w[0] - 0.1 * w[1]]))
    };
    let a = integrate_sde_ito(field, &[1.0, 2.0], &dw, 0.01).unwrap();
    let b = integrate_sde_stratonovich(field, &[1.0, 2.0], &dw, 0.01).unwrap();
    for (x, y) in a.states.iter().flatten().zip(b.states.iter().flatten()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn csv_and_json_roundtrip() {
    let tr = integrate_ode(exp_field, &[1.0, 0.1 + 0.2], 7, 0.3, OdeScheme::Rk4).unwrap();
    let back = Trajectory::from_json(&tr.to_json().unwrap()).unwrap();
    assert_eq!(back, tr);
    let csv = tr.to_csv();
    assert!(csv.starts_with("t,s0,s1\n"));
    let back = Trajectory::from_csv(&csv).unwrap();
    assert_eq!(back, tr);
}

#[test]
fn invalid_grids_rejected() {
    assert!(integrate_ode(exp_field, &[1.0], 0, 1.0, OdeScheme::Rk4).is_err());
    assert!(integrate_ode(exp_field, &[1.0], 10, 0.0, OdeScheme::Rk4).is_err());
}

#[test]
fn gbm_strong_order_under_euler_maruyama() {
    let (errs, slope) =
        crate::checks::gbm_strong_errors(SdeScheme::Ito, &[4, 6, 8, 10], 100, 1).unwrap();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    assert!((slope - 0.5).abs() <= 0.15, "{slope}");
}

#[test]
fn gbm_stratonovich_converges_to_exp_w() {
    let (errs, slope) =
        crate::checks::gbm_strong_errors(SdeScheme::Stratonovich, &[4, 6, 8, 10], 100, 1).unwrap();
    assert!(errs[3] < 2e-3);
    // one commuting noise source: Heun's method gains a full order
    assert!((slope - 1.0).abs() <= 0.15, "{slope}");
}
