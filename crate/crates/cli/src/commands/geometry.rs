//! Geodesics, logarithms, transport and curvature.

use std::path::PathBuf;

use geomkit::geodesics::{self, LogMethod, LogOptions};
use geomkit::integrate::{OdeScheme, Trajectory};
use geomkit::manifold::Tangent;
use serde_json::json;

use super::{base_point, expect_len, manifold, relative_drift, required, state_table};
use crate::args::{Common, Floats, Place};
use crate::output::{Sink, Summary};
use crate::{CliError, CliResult};

pub fn geodesic(place: &Place, v: Option<Floats>, steps: usize, scheme: &str, common: &Common) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let d = m.dim();
    let x = base_point(&m, place.x.clone())?;
    let v = required(v, "v")?;
    expect_len(&v, d, "v")?;
    let scheme: OdeScheme = scheme.parse().map_err(|e| CliError::Usage(format!("--scheme: {e}")))?;
    if steps == 0 {
        return Err(CliError::Usage("--steps must be positive".into()));
    }

    let traj = geodesics::geodesic(&m, &x, &v, steps, scheme)?;
    let energy: Vec<f64> = geodesics::speeds(&m, &traj)?.iter().map(|s| 0.5 * s * s).collect();

    let mut summary = Summary::new("geodesic");
    let table = state_table(&m, &traj, &[("x", d), ("v", d)])?;
    Sink::new(common, "geodesic").write_table(&table, &mut summary)?;
    summary
        .set("manifold", m.id())
        .set("energy_drift", relative_drift(&energy))
        .set("final_x", json!(traj.last()[..d]));
    Ok(summary)
}

pub fn exp_ham(
    place: &Place,
    v: Option<Floats>,
    p: Option<Floats>,
    steps: usize,
    common: &Common,
) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let d = m.dim();
    let x = base_point(&m, place.x.clone())?;
    let p = match (v, p) {
        (_, Some(p)) => p.0,
        (Some(v), None) => {
            expect_len(&v.0, d, "v")?;
            m.flat(&Tangent {
                base: x.clone(),
                components: v.0,
            })?
            .components
        }
        (None, None) => return Err(CliError::Usage("one of --v or --p is required".into())),
    };
    expect_len(&p, d, "p")?;
    if steps == 0 {
        return Err(CliError::Usage("--steps must be positive".into()));
    }

    let flow = geodesics::exp_hamiltonian(&m, &x, &p, steps)?;
    let mut summary = Summary::new("exp-ham");
    let table = state_table(&m, &flow.trajectory, &[("x", d), ("p", d)])?;
    Sink::new(common, "exp-ham").write_table(&table, &mut summary)?;
    summary
        .set("manifold", m.id())
        .set("energy", flow.energy[0])
        .set("energy_drift", flow.relative_energy_drift())
        .set("final_x", json!(flow.trajectory.last()[..d]));
    Ok(summary)
}

pub fn log(
    place: &Place,
    y: Option<Floats>,
    steps: usize,
    method: &str,
    restarts: usize,
    common: &Common,
) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let d = m.dim();
    let x = base_point(&m, place.x.clone())?;
    let y = required(y, "y")?;
    expect_len(&y, d, "y")?;
    let method = match method {
        "lbfgs" => LogMethod::Lbfgs,
        "gauss-newton" => LogMethod::GaussNewton,
        other => return Err(CliError::Usage(format!("--method: unknown method {other:?} (lbfgs|gauss-newton)"))),
    };
    if steps == 0 || restarts == 0 {
        return Err(CliError::Usage("--steps and --restarts must be positive".into()));
    }
    let opts = LogOptions {
        n_steps: steps,
        restarts,
        seed: common.seed,
        method,
        ..LogOptions::default()
    };

    let r = geodesics::log(&m, &x, &y, &opts)?;
    let traj = geodesics::geodesic(&m, &x, &r.v, steps, OdeScheme::Rk4)?;
    let mut summary = Summary::new("log");
    let table = state_table(&m, &traj, &[("x", d), ("v", d)])?;
    Sink::new(common, "log").write_table(&table, &mut summary)?;
    summary
        .set("manifold", m.id())
        .set("v", json!(r.v))
        .set("distance", m.norm(&x, &r.v)?)
        .set("loss", r.loss)
        .set("iterations", r.iters)
        .set("converged", r.converged);
    if !r.converged {
        summary.not_converged();
    }
    Ok(summary)
}

/// The spiral `(t², −sin t)` and its velocity.
fn spiral(t: f64) -> (Vec<f64>, Vec<f64>) {
    (vec![t * t, -t.sin()], vec![2.0 * t, -t.cos()])
}

pub fn partransport(
    place: &Place,
    v: Option<Floats>,
    curve: &str,
    curve_file: Option<PathBuf>,
    steps: usize,
    t_end: f64,
    common: &Common,
) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let d = m.dim();
    let v = required(v, "v")?;
    expect_len(&v, d, "v")?;

    let traj = match curve {
        "spiral" => {
            if d != 2 {
                return Err(CliError::Usage("--curve spiral needs a two-dimensional manifold".into()));
            }
            geodesics::parallel_transport_along(&m, &v, spiral, steps, t_end)?
        }
        "file" => {
            let path = curve_file.ok_or_else(|| CliError::Usage("--curve file needs --curve-file".into()))?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("--curve-file {}: {e}", path.display())))?;
            let gamma = Trajectory::from_csv(&text).map_err(|e| CliError::Usage(format!("--curve-file: {e}")))?;
            if gamma.states.len() < 2 || gamma.state_dim() != d {
                return Err(CliError::Usage(format!(
                    "--curve-file needs at least two rows of {d} coordinates"
                )));
            }
            let mut tr = geodesics::parallel_transport(&m, &v, &gamma, None)?;
            for (s, g) in tr.states.iter_mut().zip(&gamma.states) {
                s.splice(0..0, g[..d].iter().copied());
            }
            tr
        }
        other => return Err(CliError::Usage(format!("--curve: unknown curve {other:?} (spiral|file)"))),
    };

    let norms = traj
        .states
        .iter()
        .map(|s| m.norm(&s[..d], &s[d..]))
        .collect::<geomkit::Result<Vec<f64>>>()?;
    let mut summary = Summary::new("partransport");
    let table = state_table(&m, &traj, &[("x", d), ("v", d)])?;
    Sink::new(common, "partransport").write_table(&table, &mut summary)?;
    summary
        .set("manifold", m.id())
        .set("norm", norms[0])
        .set("norm_drift", relative_drift(&norms))
        .set("final_v", json!(traj.last()[d..]));
    Ok(summary)
}

pub fn curvature(place: &Place, plane: Option<Floats>, common: &Common) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let d = m.dim();
    if d < 2 {
        return Err(CliError::Usage("curvature needs dimension at least two".into()));
    }
    let x = base_point(&m, place.x.clone())?;
    let (e1, e2) = match plane {
        Some(p) => {
            expect_len(&p.0, 2 * d, "plane")?;
            (p.0[..d].to_vec(), p.0[d..].to_vec())
        }
        None => {
            let mut e1 = vec![0.0; d];
            let mut e2 = vec![0.0; d];
            e1[0] = 1.0;
            e2[1] = 1.0;
            (e1, e2)
        }
    };

    let scalar = m.scalar_curvature(&x)?;
    let sectional = m.sectional(&x, &e1, &e2)?;
    let rows = |a: &geomkit::numkernel::DenseMatrix| -> Vec<Vec<f64>> { (0..a.rows()).map(|i| a.row(i).to_vec()).collect() };
    let doc = json!({
        "manifold": m.id(),
        "x": x,
        "metric": rows(&m.metric(&x)?),
        "ricci": rows(&m.ricci(&x)?),
        "scalar": scalar,
        "sectional": sectional,
        "plane": [e1, e2],
    });
    let mut summary = Summary::new("curvature");
    Sink::json(common, "curvature").write_json(&doc, &mut summary)?;
    summary
        .set("manifold", m.id())
        .set("scalar", scalar)
        .set("sectional", sectional);
    Ok(summary)
}
