//! Frame bundle commands.

use std::path::PathBuf;

use geomkit::framebundle::{self, exp_fm, FramePoint, MppOptions};
use geomkit::geodesics::{self, LogOptions};
use geomkit::integrate::{OdeScheme, Trajectory};
use geomkit::manifold::Manifold;
use geomkit::numkernel::{gaussian_increments, invert, DenseMatrix};
use serde_json::json;

use super::{base_point, chart_distance, expect_len, frame, gram_drift, manifold, required, state_table};
use crate::args::{Common, Floats, FrameArgs, Place};
use crate::output::{names, Sink, Summary};
use crate::{CliError, CliResult};

fn frames_of(traj: &Trajectory, d: usize, r: usize) -> CliResult<Vec<FramePoint>> {
    let n = d + d * r;
    Ok(traj
        .states
        .iter()
        .map(|s| FramePoint::from_flat(d, r, &s[..n]))
        .collect::<geomkit::Result<_>>()?)
}

/// Largest deviation of `‖F(x_t)‖` from its start; only meaningful on the
/// round sphere, where it should stay zero.
fn sphere_norm_drift(m: &Manifold, traj: &Trajectory) -> CliResult<Option<f64>> {
    if !m.id().starts_with("sphere") {
        return Ok(None);
    }
    let d = m.dim();
    let mut norms = Vec::with_capacity(traj.states.len());
    for s in &traj.states {
        if let Some(f) = m.embed(&s[..d])? {
            norms.push(f.iter().map(|c| c * c).sum::<f64>().sqrt());
        }
    }
    Ok(norms.first().map(|n0| norms.iter().map(|n| (n - n0).abs()).fold(0.0, f64::max)))
}

/// Frame-bundle momentum `(ν^{-T} v, 0)` for horizontal frame coordinates `v`.
fn horizontal_momentum(u: &FramePoint, v: &[f64]) -> CliResult<Vec<f64>> {
    let d = u.dim();
    if u.rank() != d {
        return Err(CliError::Usage("--v needs a full frame; pass --p instead".into()));
    }
    let mut p = invert(&u.nu.transpose())?.matvec(v)?;
    p.resize(d + d * d, 0.0);
    Ok(p)
}

pub fn fm_geodesic(
    place: &Place,
    frame_args: &FrameArgs,
    v: Option<Floats>,
    p: Option<Floats>,
    steps: usize,
    common: &Common,
) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let d = m.dim();
    let x = base_point(&m, place.x.clone())?;
    let u = frame(&m, &x, frame_args)?;
    let r = u.rank();
    let n = d + d * r;
    let p = match (v, p) {
        (_, Some(p)) => p.0,
        (Some(v), None) => {
            expect_len(&v.0, r, "v")?;
            horizontal_momentum(&u, &v.0)?
        }
        (None, None) => return Err(CliError::Usage("one of --v or --p is required".into())),
    };
    expect_len(&p, n, "p")?;
    if steps == 0 {
        return Err(CliError::Usage("--steps must be positive".into()));
    }

    let flow = exp_fm(&m, &u, &p, steps)?;
    let frames = flow.frames(d, r)?;
    let mut summary = Summary::new("fm-geodesic");
    let table = state_table(&m, &flow.trajectory, &[("x", d), ("nu", d * r), ("p", n)])?;
    Sink::new(common, "fm-geodesic").write_table(&table, &mut summary)?;
    summary
        .set("manifold", m.id())
        .set("energy", flow.energy[0])
        .set("energy_drift", flow.relative_energy_drift())
        .set("frame_gram_drift", gram_drift(&m, &frames)?)
        .set("final_x", json!(flow.trajectory.last()[..d]));
    Ok(summary)
}

/// The curve `(20 sin t, t² + 2t)`.
fn wave(t: f64) -> [f64; 2] {
    [20.0 * t.sin(), t * t + 2.0 * t]
}

/// Driving path sampled on the grid, one row per grid point.
fn curve_samples(curve: &str, curve_file: Option<PathBuf>, steps: usize, t_end: f64) -> CliResult<Trajectory> {
    match curve {
        "wave" => {
            if steps == 0 || !(t_end > 0.0) {
                return Err(CliError::Usage("--steps and --t-end must be positive".into()));
            }
            let mut c = Trajectory::with_capacity(steps);
            for k in 0..=steps {
                let t = t_end * k as f64 / steps as f64;
                c.push(t, wave(t).to_vec());
            }
            Ok(c)
        }
        "file" => {
            let path = curve_file.ok_or_else(|| CliError::Usage("--curve file needs --curve-file".into()))?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("--curve-file {}: {e}", path.display())))?;
            let c = Trajectory::from_csv(&text).map_err(|e| CliError::Usage(format!("--curve-file: {e}")))?;
            if c.states.len() < 2 {
                return Err(CliError::Usage("--curve-file needs at least two rows".into()));
            }
            Ok(c)
        }
        other => Err(CliError::Usage(format!("--curve: unknown curve {other:?} (wave|file)"))),
    }
}

pub fn develop(
    place: &Place,
    frame_args: &FrameArgs,
    curve: &str,
    curve_file: Option<PathBuf>,
    steps: usize,
    t_end: f64,
    common: &Common,
) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let x = base_point(&m, place.x.clone())?;
    let u = frame(&m, &x, frame_args)?;
    let r = u.rank();
    let c = curve_samples(curve, curve_file, steps, t_end)?;
    if c.state_dim() != r {
        return Err(CliError::Usage(format!(
            "the curve has {} coordinates but the frame has {r} vectors",
            c.state_dim()
        )));
    }
    let n = c.states.len() - 1;
    let mut inc = DenseMatrix::zeros(n, r);
    for k in 0..n {
        for a in 0..r {
            inc[(k, a)] = c.states[k + 1][a] - c.states[k][a];
        }
    }
    // The library runs on a unit grid; restore the curve's own times.
    let mut traj = framebundle::development(&m, &u, &inc)?;
    traj.times.clone_from(&c.times);

    report_development("develop", &m, &u, &traj, None, common)
}

pub fn stoc_develop(
    place: &Place,
    frame_args: &FrameArgs,
    drift: Option<Floats>,
    steps: usize,
    t_end: f64,
    common: &Common,
) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let x = base_point(&m, place.x.clone())?;
    let u = frame(&m, &x, frame_args)?;
    let r = u.rank();
    let drift = drift.map_or_else(|| vec![0.0; r], |f| f.0);
    expect_len(&drift, r, "drift")?;
    if steps == 0 || !(t_end > 0.0) {
        return Err(CliError::Usage("--steps and --t-end must be positive".into()));
    }
    let dt = t_end / steps as f64;
    let dw = gaussian_increments(r, steps, dt, common.seed)?;
    let traj = framebundle::stochastic_development(&m, &u, &dw, dt, &drift)?;

    // Driving process X_t = W_t + drift t, for plotting next to the development.
    let mut driver = Vec::with_capacity(steps + 1);
    let mut w = vec![0.0; r];
    driver.push(w.clone());
    for k in 0..steps {
        for a in 0..r {
            w[a] += dw[(k, a)] + drift[a] * dt;
        }
        driver.push(w.clone());
    }
    let mut summary = report_development("stoc-develop", &m, &u, &traj, Some(&driver), common)?;
    summary.set("seed", common.seed).set("dt", dt);
    Ok(summary)
}

fn report_development(
    command: &str,
    m: &Manifold,
    u: &FramePoint,
    traj: &Trajectory,
    driver: Option<&[Vec<f64>]>,
    common: &Common,
) -> CliResult<Summary> {
    let d = m.dim();
    let r = u.rank();
    let mut table = state_table(m, traj, &[("x", d), ("nu", d * r)])?;
    if let Some(w) = driver {
        let mut cols = names("w", r);
        cols.append(&mut table.columns);
        table.columns = cols;
        for (row, wk) in table.rows.iter_mut().zip(w) {
            let mut full = wk.clone();
            full.append(row);
            *row = full;
        }
    }
    let frames = frames_of(traj, d, r)?;
    let mut summary = Summary::new(command);
    Sink::new(common, command).write_table(&table, &mut summary)?;
    summary
        .set("manifold", m.id())
        .set("frame_gram_drift", gram_drift(m, &frames)?)
        .set("final_x", json!(traj.last()[..d]));
    if let Some(drift) = sphere_norm_drift(m, traj)? {
        summary.set("embedded_norm_drift", drift);
    }
    Ok(summary)
}

pub fn mpp(
    place: &Place,
    frame_args: &FrameArgs,
    y: Option<Floats>,
    steps: usize,
    reference_v: Option<Floats>,
    common: &Common,
) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let d = m.dim();
    let x = base_point(&m, place.x.clone())?;
    let u = frame(&m, &x, frame_args)?;
    let y = required(y, "y")?;
    expect_len(&y, d, "y")?;
    if u.rank() != d {
        return Err(CliError::Usage("--frame must have d vectors for most probable paths".into()));
    }
    let opts = MppOptions {
        n_steps: steps,
        ..MppOptions::default()
    };

    let r = framebundle::mpp(&m, &u, &y, &opts)?;
    let mut padded = r.v.clone();
    padded.resize(d + d * d, 0.0);

    let mut summary = Summary::new("mpp");
    let table = state_table(&m, &r.flow.trajectory, &[("x", d), ("nu", d * d)])?;
    Sink::new(common, "mpp").write_table(&table, &mut summary)?;
    summary
        .set("manifold", m.id())
        .set("v", json!(r.v))
        .set("v_horizontal", json!(padded))
        .set("endpoint_miss", r.distance)
        .set("iterations", r.iters)
        .set("converged", r.converged)
        .set("energy_drift", r.flow.relative_energy_drift());

    // Riemannian geodesic between the same points for comparison.
    let log_opts = LogOptions {
        n_steps: steps,
        ..LogOptions::default()
    };
    if let Ok(l) = geodesics::log(&m, &x, &y, &log_opts) {
        if l.converged {
            let g = geodesics::geodesic(&m, &x, &l.v, steps, OdeScheme::Rk4)?;
            let gap = r
                .flow
                .trajectory
                .states
                .iter()
                .zip(&g.states)
                .map(|(a, b)| chart_distance(&a[..d], &b[..d]))
                .fold(0.0, f64::max);
            summary.set("geodesic_max_chart_gap", gap);
        }
    }
    if let Some(reference) = reference_v {
        summary.set("reference_v", json!(reference.0)).set(
            "reference_note",
            "reference velocity from a configuration with unstated ellipsoid axes; not expected to match",
        );
    }
    if !r.converged {
        summary.not_converged();
    }
    Ok(summary)
}
